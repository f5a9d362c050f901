//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use spinc_core::checks::identity_checks;
use spinc_core::exterior::{b0_matrix, omega_d, ModelParams};
use spinc_core::expansion::compute_f2;
use spinc_core::algebra::{apply_to_pn, project_vacuum_left};
use spinc_core::expansion::build_q1;
use spinc_core::numeric::fock::l0_matrix;
use spinc_core::numeric::kernels::{
    b0_numeric, first_excited_l02, heat_to_bergman_rate, kernel_leakage, mehler_vs_matrix, projector_vs_closed,
    reproducing_defect,
};
use spinc_core::numeric::oracle::random_word_trials;
use spinc_core::numeric::{torus_gap_demo, FockBasisSpec, GridSpec, Modes, TorusSpec};
use spinc_core::report::Status;
use spinc_core::tensor::RuleSet;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn params(a: &[f64]) -> ModelParams {
    ModelParams::new(a.iter().map(|x| x * PI).collect()).expect("nonzero a_j")
}

fn symbolic_b1() -> Outcome {
    let start = Instant::now();
    let report = match compute_f2(&RuleSet::bundled()) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let elapsed = start.elapsed();
    let step = |name: &str| report.steps.iter().any(|s| s.name == name && s.matches);
    let b1 = step("coefficient-unitary");
    let trace = step("trace");
    outcome(
        b1 && trace && elapsed < Duration::from_secs(300),
        format!("b1 exact: {b1}, trace exact: {trace}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn intermediate_ledger() -> Outcome {
    let report = match compute_f2(&RuleSet::bundled()) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let failing: Vec<&str> = report.steps.iter().filter(|s| !s.matches).map(|s| s.name.as_str()).collect();
    let vacuum = project_vacuum_left(&apply_to_pn(&build_q1())).0.is_zero();
    outcome(
        failing.is_empty() && vacuum,
        format!("{} steps, failing {:?}, P Q1 P = 0: {vacuum}", report.steps.len(), failing),
    )
}

fn identity_rules() -> Outcome {
    let records = identity_checks(&RuleSet::bundled(), 21, 2024);
    let failing: Vec<&str> = records.iter().filter(|r| r.status != Status::Pass).map(|r| r.name.as_str()).collect();
    outcome(failing.is_empty(), format!("{} rules × 21 geometries, failing {:?}", records.len(), failing))
}

fn model_spectrum() -> Outcome {
    let start = Instant::now();
    let spec = FockBasisSpec::new(1, 40, false, Modes::Landau).expect("spec");
    let ev = match l0_matrix(&spec, &ModelParams::standard(1)) {
        Ok(m) => m.eigenvalues(),
        Err(e) => return outcome(false, e.to_string()),
    };
    let err = (0..10).map(|k| (ev[k] - 4.0 * PI * k as f64).abs()).fold(0.0, f64::max);
    outcome(err < 1e-8, format!("max |λ_k − 4πk| = {err:.2e}, {:.2}s", start.elapsed().as_secs_f64()))
}

fn kernel_formulas() -> Outcome {
    let grid5 = GridSpec::new(1, 1.0, 5).expect("grid");
    let grid3 = GridSpec::new(1, 0.5, 3).expect("grid");
    let mut worst: f64 = 0.0;
    let mut idem: f64 = 0.0;
    for a in [2.0, -2.0] {
        match projector_vs_closed(&params(&[a]), 40, &grid5) {
            Ok(c) => {
                worst = worst.max(c.pointwise);
                idem = idem.max(c.idempotence);
            }
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let mut mehler: f64 = 0.0;
    for u in [0.05, 0.1, 0.5, 1.0] {
        match mehler_vs_matrix(&ModelParams::standard(1), u, &grid3) {
            Ok(d) => mehler = mehler.max(d),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let repro = [2.0, -2.0].iter().map(|a| reproducing_defect(&params(&[*a]), &grid5, 40)).fold(0.0, f64::max);
    outcome(
        worst < 1e-6 && idem < 1e-8 && mehler < 1e-6 && repro < 1e-6,
        format!("projector {worst:.2e} (P²−P {idem:.2e}), Mehler {mehler:.2e}, reproducing {repro:.2e}"),
    )
}

fn mixed_curvature() -> Outcome {
    let mut leak: f64 = 0.0;
    let mut dims = Vec::new();
    for a in [vec![-2.0], vec![-2.0, 4.0], vec![-2.0, -6.0]] {
        match kernel_leakage(&params(&a), 10) {
            Ok((d, l)) => {
                dims.push(d);
                leak = leak.max(l);
            }
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let mut gap_ok = true;
    for a in [vec![2.0], vec![-2.0], vec![-2.0, 4.0], vec![-2.0, -6.0]] {
        let p = params(&a);
        let w = omega_d(&p);
        let mask = p.kernel_mask();
        for i in 0..w.nrows() {
            let v = w[(i, i)].re;
            gap_ok &= if i == mask { v.abs() < 1e-12 } else { v <= -p.mu0() + 1e-12 };
        }
    }
    let mut b0: f64 = 0.0;
    for a in [vec![2.0], vec![-2.0], vec![-2.0, 4.0]] {
        let p = params(&a);
        match b0_numeric(&p, 4) {
            Ok(m) => b0 = b0.max((m - b0_matrix(&p)).iter().map(|x| x.norm()).fold(0.0, f64::max)),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    outcome(
        leak < 1e-8 && dims.iter().all(|d| *d == 1) && gap_ok && b0 < 1e-10,
        format!("kernel dims {dims:?}, leakage {leak:.2e}, ω_d ≤ −μ₀ off kernel: {gap_ok}, b0 deviation {b0:.2e}"),
    )
}

fn decay_slope() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [vec![2.0], vec![-2.0], vec![2.0, 6.0], vec![-2.0, 6.0]] {
        let p = params(&a);
        let lam = match first_excited_l02(&p, 8) {
            Ok(l) => l,
            Err(e) => return outcome(false, e.to_string()),
        };
        let slope = heat_to_bergman_rate(&p).slope;
        worst = worst.max((slope + lam).abs() / lam);
    }
    outcome(worst < 0.05, format!("worst relative slope error {:.3}%", 100.0 * worst))
}

fn torus_gap() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for p in 1..=5 {
        let start = Instant::now();
        let r = match TorusSpec::new(p, 64).and_then(|s| torus_gap_demo(&s)) {
            Ok(r) => r,
            Err(e) => return outcome(false, e.to_string()),
        };
        let secs = start.elapsed().as_secs_f64();
        let target = 4.0 * PI * p as f64;
        let rel = (r.gap - target).abs() / target;
        pass &= r.low_cluster.len() == p && rel < 0.05 && secs < 60.0;
        parts.push(format!("p={p}: {} low, gap {:.2} ({:.2}%), {secs:.1}s", r.low_cluster.len(), r.gap, 100.0 * rel));
    }
    outcome(pass, parts.join("; "))
}

fn oracle_equivalence() -> Outcome {
    match random_word_trials(200, 2, 99, 1e-10) {
        Ok(s) => outcome(s.max_deviation < 1e-10, format!("{} words, max deviation {:.2e}", s.trials, s.max_deviation)),
        Err(e) => outcome(false, e.to_string()),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("symbolic b1 and its trace", symbolic_b1),
        ("intermediate ledger", intermediate_ledger),
        ("identity-rule validation", identity_rules),
        ("model spectrum", model_spectrum),
        ("kernel formulas", kernel_formulas),
        ("mixed-curvature structure", mixed_curvature),
        ("heat-to-Bergman decay slope", decay_slope),
        ("torus gap", torus_gap),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        eprintln!("[{}] {} {}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, name, o.detail);
    }
    eprintln!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
