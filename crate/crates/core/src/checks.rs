//! Check suites that turn symbolic and numeric results into
//! [`CheckRecord`]s; shared by the command-line tool and the test suites.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{apply_to_pn, project_vacuum_left};
use crate::exterior::{b0_matrix, evaluate_ext, omega_d, ModelParams};
use crate::expansion::{build_l0, build_q1, compute_b0, compute_f2, ExpansionReport};
use crate::geometry::{check_ruleset, random_instances};
use crate::numeric::fock::{clusters, fock_matrix, l02_matrix, level_count, low_spectrum, FockSpace, NoAtoms};
use crate::numeric::kernels::{
    b0_numeric, first_excited_l02, heat_to_bergman_rate, kernel_leakage, mehler_kernel_closed, mehler_vs_matrix,
    bergman_kernel_closed, projector_vs_closed, reproducing_defect, semigroup_defect,
};
use crate::numeric::oracle::random_word_trials;
use crate::numeric::{torus_gap_demo, FockBasisSpec, GridSpec, Modes, NumericError, TorusSpec};
use crate::report::{fmt_float, CheckRecord, Status};
use crate::symbolic::{Expr, Head};
use crate::tensor::{apply_identities, RuleSet};

/// Numeric settings of the model checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSettings {
    pub params: ModelParams,
    pub cutoff: usize,
    /// Closed form against numerical oracle.
    pub tol: f64,
    /// Algebraic identities evaluated in floating point.
    pub algebra_tol: f64,
    /// Eigenvalues of truncated matrices.
    pub spectrum_tol: f64,
    pub trials: usize,
    pub seed: u64,
}

impl ModelSettings {
    pub fn new(params: ModelParams, cutoff: usize) -> Self {
        Self { params, cutoff, tol: 1e-6, algebra_tol: 1e-10, spectrum_tol: 1e-8, trials: 200, seed: 2024 }
    }

    fn tag(&self) -> String {
        let a: Vec<String> = self.params.a.iter().map(|x| fmt_float(*x)).collect();
        format!("n={} a={} cutoff={}", self.params.n(), a.join(";"), self.cutoff)
    }
}

fn numeric_failure(name: &str, tag: &str, formula: &str, e: NumericError) -> CheckRecord {
    CheckRecord::failure(name, tag, formula, &e.to_string())
}

/// Runs the expansion and records every intermediate, `b₀`, `b₁`, its trace,
/// the vacuum identity for `𝒬₁`, and the flat and Kähler degenerations.
pub fn symbolic_checks(rules: &RuleSet) -> (Vec<CheckRecord>, Option<ExpansionReport>) {
    let tag = format!("rules={}", &rules.hash()[..12]);
    let mut out = Vec::new();
    let pq = project_vacuum_left(&apply_to_pn(&build_q1())).0;
    out.push(CheckRecord::exact("vacuum-q1-vacuum", &tag, "P Q1 P = 0", &pq.to_string(), "0"));
    let b0 = evaluate_ext::<Complex64>(&compute_b0(), 2, &NoAtoms).map(|m| {
        let want = b0_matrix(&ModelParams::standard(2));
        m.data.iter().zip(want.transpose().iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    });
    match b0 {
        Ok(dev) => out.push(CheckRecord::bound("b0", "n=2", "b0 = det|J| I_{det(W̄*)} = I_{C⊗E} for a_j = 2π", dev, 0.0)),
        Err(e) => out.push(CheckRecord::failure("b0", "n=2", "", &e.to_string())),
    }
    let report = match compute_f2(rules) {
        Ok(r) => r,
        Err(e) => {
            out.push(CheckRecord::failure("expansion", &tag, "F2 evaluation", &e.to_string()));
            return (out, None);
        }
    };
    for s in &report.steps {
        let formula = if s.axiom { "imported value (axiom)" } else { "computed = displayed" };
        let status = if s.matches { Status::Pass } else { Status::Fail };
        out.push(CheckRecord::exact(&s.name, &tag, formula, &s.value, &s.expected).with_status(status));
    }
    let b1 = parse(&report.b1);
    let curvature = |h: Head| !matches!(h, Head::Dim | Head::Pin(_));
    let flat = b1.filter(|m| !m.atoms.iter().any(|a| curvature(a.head)));
    out.push(CheckRecord::exact("flat-b1", &tag, "b1 = 0 when all curvature vanishes", &flat.to_string(), "0"));
    let no_nj = |e: &Expr| e.filter(|m| !m.atoms.iter().any(|a| matches!(a.head, Head::Nj | Head::Nnj)));
    let reduced = |text: &str| apply_identities(&parse(text), rules).map(|e| no_nj(&e).to_string());
    match (reduced(&report.trace_b1), reduced("1/8 pi^-1 RX + 1 pi^-1 RE(h0,a0)")) {
        (Ok(actual), Ok(expected)) => out.push(CheckRecord::exact(
            "kaehler-trace",
            &tag,
            "tr b1 = (1/8π)[r + 4 R^E(w_j, w̄_j)] when ∇J = 0",
            &actual,
            &expected,
        )),
        (Err(e), _) | (_, Err(e)) => out.push(CheckRecord::failure("kaehler-trace", &tag, "", &e.to_string())),
    }
    (out, Some(report))
}

fn parse(text: &str) -> Expr {
    text.parse().expect("expression produced by the engine")
}

/// Validates every rule on `instances` random exact geometries.
pub fn identity_checks(rules: &RuleSet, instances: usize, seed: u64) -> Vec<CheckRecord> {
    let geos = random_instances(instances, seed);
    let tag = format!("instances={instances} seed={seed}");
    check_ruleset(rules, &geos)
        .into_iter()
        .map(|(name, res)| match res {
            Ok(k) => CheckRecord {
                name: format!("rule:{name}"),
                parameters: tag.clone(),
                formula: "lhs - rhs = 0 exactly on every index assignment".into(),
                status: if k >= instances { Status::Pass } else { Status::Fail },
                expected: format!(">= {instances} evaluations"),
                actual: format!("{k} evaluations"),
                tolerance: "exact".into(),
            },
            Err(m) => CheckRecord::failure(
                &format!("rule:{name}"),
                &tag,
                "lhs - rhs = 0 exactly",
                &format!("{} on {}: lhs = {}, rhs = {}", m.rule, m.instance, m.lhs, m.rhs),
            ),
        })
        .collect()
}

/// The lowest `count` distinct values of `Σ_j 2|a_j| k_j`.
pub fn expected_levels(params: &ModelParams, count: usize) -> Vec<f64> {
    let step: Vec<f64> = params.a.iter().map(|a| 2.0 * a.abs()).collect();
    let top = step.iter().copied().fold(f64::INFINITY, f64::min) * count as f64;
    let mut out = vec![0.0];
    for s in step {
        let mut next = Vec::new();
        for v in &out {
            let mut x = *v;
            while x <= top + 1e-9 {
                next.push(x);
                x += s;
            }
        }
        out = next;
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    out.truncate(count);
    out
}

/// Spectrum of `𝓛₀`, ground space of `L⁰₂`, `ω_d`, `b₀`, and the random-word oracle.
pub fn spectrum_checks(s: &ModelSettings) -> Vec<CheckRecord> {
    let tag = s.tag();
    let p = &s.params;
    let n = p.n();
    let mut out = Vec::new();
    let landau = FockBasisSpec { n, cutoff: s.cutoff, include_exterior: false, modes: Modes::Landau };

    let formula = "σ(L0) = { Σ 2|a_j| α_j }";
    match fock_matrix(&build_l0(), &landau, p, &NoAtoms) {
        Ok(m) => {
            let ev = m.eigenvalues();
            let want = expected_levels(p, 10);
            let got: Vec<f64> = clusters(&ev, 1e-6).into_iter().map(|c| c.0).take(want.len()).collect();
            let err = if got.len() == want.len() {
                got.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            out.push(CheckRecord::bound("l0-spectrum", &tag, formula, err, s.spectrum_tol));
            let space = FockSpace::new(landau.clone(), p.clone()).expect("valid basis");
            let level = want[want.len().min(4) - 1];
            let dense = ev.iter().filter(|v| (*v - level).abs() < 1e-6).count();
            out.push(CheckRecord::exact(
                "l0-multiplicity",
                &format!("{tag} level={}", fmt_float(level)),
                "multiplicity = #{α : Σ 2|a_j| α_j = level} within the truncation",
                &dense.to_string(),
                &level_count(&space, level, 1e-6).to_string(),
            ));
        }
        Err(e) => out.push(numeric_failure("l0-spectrum", &tag, formula, e)),
    }

    match low_spectrum(&build_l0(), &landau, p, &NoAtoms, 10, s.spectrum_tol) {
        Ok((_, warning)) => {
            let dev = warning.as_ref().map_or(0.0, |w| w.deviation);
            let rec = CheckRecord::bound("l0-truncation", &tag, "lowest eigenvalues stable under cutoff + 10", dev, s.spectrum_tol);
            out.push(if warning.is_some() { rec.with_status(Status::Warn) } else { rec });
        }
        Err(e) => out.push(numeric_failure("l0-truncation", &tag, "", e)),
    }

    let with_ext = FockBasisSpec { include_exterior: true, ..landau.clone() };
    match l02_matrix(&with_ext, p) {
        Ok(m) => out.push(CheckRecord::bound("l02-hermitian", &tag, "L02 = L02^*", m.hermiticity_defect(), 1e-12)),
        Err(e) => out.push(numeric_failure("l02-hermitian", &tag, "", e)),
    }
    match kernel_leakage(p, s.cutoff.min(12)) {
        Ok((dim, leak)) => {
            out.push(CheckRecord::exact("l02-kernel-dimension", &tag, "dim Ker L02 = 1 (Landau basis)", &dim.to_string(), "1"));
            out.push(CheckRecord::bound("l02-kernel-leakage", &tag, "Ker L02 ⊂ det(W̄*) component", leak, 1e-8));
        }
        Err(e) => out.push(numeric_failure("l02-kernel-leakage", &tag, "", e)),
    }

    let w = omega_d(p);
    let diag: Vec<f64> = (0..w.nrows()).map(|i| w[(i, i)].re).collect();
    let mask = p.kernel_mask();
    let top_nonzero = diag.iter().enumerate().filter(|(i, _)| *i != mask).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    out.push(CheckRecord::numeric("omega-kernel", &tag, "ω_d = 0 on det(W̄*)", diag[mask], 0.0, s.algebra_tol));
    out.push(CheckRecord::bound("omega-gap", &tag, "ω_d ≤ -μ0 off det(W̄*)", top_nonzero + p.mu0(), s.algebra_tol));
    let tau = -diag.iter().copied().fold(f64::INFINITY, f64::min);
    out.push(CheckRecord::numeric("omega-tau", &tag, "τ = Σ|a_j| = -min σ(ω_d)", tau, p.tau(), s.algebra_tol * p.tau()));
    out.push(CheckRecord::numeric("omega-mu0", &tag, "μ0 = min|a_j|", -top_nonzero, p.mu0(), s.algebra_tol * p.mu0()));

    match b0_numeric(p, if n == 1 { 8 } else { 4 }) {
        Ok(m) => out.push(CheckRecord::bound(
            "b0-numeric",
            &tag,
            "P^{L02}(0,0) = det|J| I_{det(W̄*)}",
            (m - b0_matrix(p)).iter().map(|x| x.norm()).fold(0.0, f64::max),
            s.algebra_tol,
        )),
        Err(e) => out.push(numeric_failure("b0-numeric", &tag, "", e)),
    }

    let oracle_tag = format!("trials={} seed={} n<=2 degree<=4", s.trials, s.seed);
    match random_word_trials(s.trials, 2, s.seed, s.algebra_tol) {
        Ok(r) => out.push(CheckRecord::bound("oracle-random-words", &oracle_tag, "normal order = matrix product", r.max_deviation, s.algebra_tol)),
        Err(e) => out.push(numeric_failure("oracle-random-words", &oracle_tag, "normal order = matrix product", e)),
    }
    out
}

/// Parameters of one complex direction, for checks that factorize.
fn directions(p: &ModelParams) -> Vec<ModelParams> {
    p.a.iter().map(|a| ModelParams::new(vec![*a]).expect("nonzero")).collect()
}

/// Closed-form Bergman and Mehler kernels against quadrature and the
/// spectral evaluation of Fock matrices, and the heat-to-Bergman decay.
pub fn kernel_checks(s: &ModelSettings) -> Vec<CheckRecord> {
    let tag = s.tag();
    let p = &s.params;
    let n = p.n();
    let mut out = Vec::new();
    for (j, d) in directions(p).iter().enumerate() {
        let dtag = format!("{tag} direction={j}");
        let grid5 = GridSpec::new(1, 1.0, 5).expect("grid");
        match projector_vs_closed(d, s.cutoff.max(40), &grid5) {
            Ok(c) => {
                out.push(CheckRecord::bound("projector-pointwise", &dtag, "spectral projector of L0 = closed-form P on a 5×5 grid", c.pointwise, s.tol));
                out.push(CheckRecord::bound("projector-idempotent", &dtag, "P² = P", c.idempotence, 1e-8));
            }
            Err(e) => out.push(numeric_failure("projector-pointwise", &dtag, "", e)),
        }
        let grid3 = GridSpec::new(1, 0.5, 3).expect("grid");
        for u in [0.05, 0.1, 0.5, 1.0] {
            let utag = format!("{dtag} u={u}");
            match mehler_vs_matrix(d, u, &grid3) {
                Ok(dev) => out.push(CheckRecord::bound("mehler-vs-matrix", &utag, "closed-form heat kernel = exp(-u L0) in the Hermite basis", dev, s.tol)),
                Err(e) => out.push(numeric_failure("mehler-vs-matrix", &utag, "", e)),
            }
        }
    }
    let (grid, order) = if n == 1 { (GridSpec::new(1, 1.0, 5), 40) } else { (GridSpec::new(n, 0.5, 2), 16) };
    let grid = grid.expect("grid");
    out.push(CheckRecord::bound("bergman-reproducing", &tag, "∫ P(Z,W) P(W,Z') dW = P(Z,Z')", reproducing_defect(p, &grid, order), s.tol));
    out.push(CheckRecord::bound(
        "mehler-semigroup",
        &format!("{tag} u=0.1 v=0.25"),
        "K_u ∘ K_v = K_{u+v}",
        semigroup_defect(p, 0.1, 0.25, &grid, order),
        s.tol,
    ));
    let z: Vec<f64> = (0..2 * n).map(|i| 0.3 - 0.2 * i as f64).collect();
    let zp: Vec<f64> = (0..2 * n).map(|i| -0.1 + 0.15 * i as f64).collect();
    let limit = (mehler_kernel_closed(p, 40.0 / p.mu0(), &z, &zp) - bergman_kernel_closed(p, &z, &zp).0).norm();
    out.push(CheckRecord::bound("mehler-long-time", &tag, "K_u → P as u → ∞", limit, s.tol));
    let zero = vec![0.0; 2 * n];
    let k0 = mehler_kernel_closed(p, 0.1, &zero, &zero).re;
    let want: f64 = p.a.iter().map(|a| (a.abs() / (2.0 * PI)) / -(-0.2 * a.abs()).exp_m1()).product();
    out.push(CheckRecord::numeric("mehler-origin", &format!("{tag} u=0.1"), "K_u(0,0) = det(|J| / (1 - e^{-4πu|J|}))", k0, want, s.algebra_tol * want));
    match first_excited_l02(p, s.cutoff.min(10)) {
        Ok(lam) => {
            let fit = heat_to_bergman_rate(p);
            out.push(CheckRecord::numeric(
                "heat-to-bergman-rate",
                &tag,
                "d/du log sup|e^{-uL02}(0,0) - P(0,0)| = -(first nonzero eigenvalue of L02)",
                fit.slope,
                -lam,
                0.05 * lam,
            ));
        }
        Err(e) => out.push(numeric_failure("heat-to-bergman-rate", &tag, "", e)),
    }
    out
}

/// Low-cluster multiplicity and gap of the torus Landau problem per flux.
pub fn torus_checks(fluxes: &[usize], grid: usize) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for &p in fluxes {
        let tag = format!("p={p} m={grid}");
        let result = TorusSpec::new(p, grid).and_then(|spec| torus_gap_demo(&spec));
        match result {
            Ok(r) => {
                out.push(CheckRecord::exact("torus-cluster-count", &tag, "#low cluster = p", &r.low_cluster.len().to_string(), &p.to_string()));
                let target = 4.0 * PI * p as f64;
                out.push(CheckRecord::numeric("torus-gap", &tag, "gap ≈ 4πp (5%)", r.gap, target, 0.05 * target));
            }
            Err(e) => out.push(numeric_failure("torus-gap", &tag, "", e)),
        }
    }
    out
}
