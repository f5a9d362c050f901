//! Exact curvature data of left-invariant almost-Kähler structures on
//! four-dimensional Lie groups.
//!
//! A Lie algebra with an orthonormal basis `e_0..e_3`, `J e_{2j} = e_{2j+1}`
//! and closed `ω = g(J·,·)` is transformed by random rational symplectic
//! changes of basis, which keeps `ω` closed while making `J` generically
//! non-integrable. Every tensor is then computed in exact rational
//! arithmetic and evaluated on the complex frame
//! `∂z_j = ½(e_{2j} − i e_{2j+1})`, `∂z̄_j = ½(e_{2j} + i e_{2j+1})`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::coefficient::{rat, Coefficient, GaussRat};
use crate::exterior::{atoms_value, for_each_assignment, AtomValues};
use crate::symbolic::{Atom, Head, Label, Monomial, SlotType};
use crate::tensor::{Rule, RuleSet};

const DIM: usize = 4;

type Mat = Vec<Vec<GaussRat>>;

fn g(re: i64) -> GaussRat {
    Complex::new(rat(re, 1), rat(0, 1))
}

fn zeros() -> Mat {
    vec![vec![GaussRat::zero(); DIM]; DIM]
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = zeros();
    for i in 0..DIM {
        for k in 0..DIM {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..DIM {
                out[i][j] = &out[i][j] + &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

fn lin(a: &Mat, ca: &GaussRat, b: &Mat, cb: &GaussRat) -> Mat {
    (0..DIM)
        .map(|i| (0..DIM).map(|j| &a[i][j] * ca + &b[i][j] * cb).collect())
        .collect()
}

fn comm(a: &Mat, b: &Mat) -> Mat {
    lin(&mul(a, b), &g(1), &mul(b, a), &g(-1))
}

fn from_int(m: [[i64; DIM]; DIM]) -> Mat {
    m.iter().map(|r| r.iter().map(|&x| g(x)).collect()).collect()
}

/// Inverse of a unimodular-or-rational 4×4 matrix by Gauss–Jordan.
fn inverse(m: &Mat) -> Mat {
    let mut a = m.clone();
    let mut inv = from_int([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
    for col in 0..DIM {
        let piv = (col..DIM).find(|&r| !a[r][col].is_zero()).expect("invertible");
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = GaussRat::one() / a[col][col].clone();
        for j in 0..DIM {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..DIM {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..DIM {
                    a[r][j] = &a[r][j] - &f * &a[col][j];
                    inv[r][j] = &inv[r][j] - &f * &inv[col][j];
                }
            }
        }
    }
    inv
}

/// Structure constants `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
pub type Structure = Vec<Vec<Vec<GaussRat>>>;

fn structure(pairs: &[(usize, usize, usize, i64)]) -> Structure {
    let mut c = vec![vec![vec![GaussRat::zero(); DIM]; DIM]; DIM];
    for &(i, j, k, v) in pairs {
        c[i][j][k] = g(v);
        c[j][i][k] = g(-v);
    }
    c
}

/// Base algebras with `ω = e^{01} + e^{23}` closed.
pub fn base_algebras() -> Vec<(&'static str, Structure)> {
    vec![
        // Kodaira–Thurston: [X1, X2] = X3 with (e0, e1, e2, e3) = (X1, X3, X2, X4)
        ("kodaira-thurston", structure(&[(0, 2, 1, 1)])),
        // aff(ℝ) × aff(ℝ)
        ("aff-aff", structure(&[(0, 1, 1, 1), (2, 3, 3, 1)])),
        // Heisenberg × ℝ: [e0, e2] = e3
        ("heisenberg-times-line", structure(&[(0, 2, 3, 1)])),
    ]
}

/// Jacobi identity for the structure constants.
pub fn is_lie(c: &Structure) -> bool {
    (0..DIM).all(|i| {
        (0..DIM).all(|j| {
            (0..DIM).all(|k| {
                (0..DIM).all(|l| {
                    let mut s = GaussRat::zero();
                    for (a, b, x) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for m in 0..DIM {
                            s += &c[a][b][m] * &c[m][x][l];
                        }
                    }
                    s.is_zero()
                })
            })
        })
    })
}

/// `dω(e_i, e_j, e_k) = 0` for `ω = e^{01} + e^{23}`.
pub fn omega_closed(c: &Structure) -> bool {
    let w = omega_matrix();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut s = GaussRat::zero();
                for (a, b, x) in [(i, j, k), (j, k, i), (k, i, j)] {
                    for m in 0..DIM {
                        s += &c[a][b][m] * &w[m][x];
                    }
                }
                if !s.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// `ω_{ij} = ω(e_i, e_j)`.
fn omega_matrix() -> Mat {
    from_int([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
}

/// Matrix of `J` acting on coordinate columns.
fn j_matrix() -> Mat {
    from_int([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
}

/// Random rational symplectic matrix for `ω = e^{01} + e^{23}` built from
/// shears and block scalings in the coordinates `(q, p) = (e0, e2 | e1, e3)`.
pub fn random_symplectic(rng: &mut ChaCha8Rng) -> Mat {
    let mut s = from_int([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
    // indices of q and p coordinates in the e-basis
    let q = [0usize, 2];
    let p = [1usize, 3];
    for _ in 0..3 {
        let a = rng.gen_range(-2..=2i64);
        let b = rng.gen_range(-2..=2i64);
        let d = rng.gen_range(-2..=2i64);
        let sym = [[a, b], [b, d]];
        let mut m = from_int([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        let kind = rng.gen_range(0..3);
        for x in 0..2 {
            for y in 0..2 {
                match kind {
                    // p ↦ p + A q
                    0 => m[p[x]][q[y]] = g(sym[x][y]),
                    // q ↦ q + B p
                    1 => m[q[x]][p[y]] = g(sym[x][y]),
                    _ => {}
                }
            }
        }
        if kind == 2 {
            let two = Complex::new(rat(2, 1), rat(0, 1));
            let half = Complex::new(rat(1, 2), rat(0, 1));
            // M = [[2, a], [0, 1]], M^{-T} = [[1/2, 0], [-a/2, 1]]
            m[q[0]][q[0]] = two;
            m[q[0]][q[1]] = g(a);
            m[p[0]][p[0]] = half;
            m[p[1]][p[0]] = Complex::new(rat(-a, 2), rat(0, 1));
        }
        s = mul(&s, &m);
    }
    s
}

/// Structure constants in the basis `f_i = Σ_k S_{ki} e_k`.
pub fn transform(c: &Structure, s: &Mat) -> Structure {
    let sinv = inverse(s);
    let mut out = vec![vec![vec![GaussRat::zero(); DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            // [f_i, f_j] in e-coordinates
            let mut v = vec![GaussRat::zero(); DIM];
            for a in 0..DIM {
                for b in 0..DIM {
                    let f = &s[a][i] * &s[b][j];
                    if f.is_zero() {
                        continue;
                    }
                    for m in 0..DIM {
                        v[m] = &v[m] + &f * &c[a][b][m];
                    }
                }
            }
            for k in 0..DIM {
                let mut x = GaussRat::zero();
                for m in 0..DIM {
                    x += &sinv[k][m] * &v[m];
                }
                out[i][j][k] = x;
            }
        }
    }
    out
}

/// Exact tensors of one instantiation, in the real orthonormal frame.
pub struct GeometricTensors {
    pub label: String,
    gamma: Vec<Mat>,
    nj: Vec<Mat>,
    curvature: Vec<Vec<Mat>>,
    nnj: Vec<Vec<Mat>>,
    t10: Vec<Vec<GaussRat>>,
    d1rl: Vec<Vec<Vec<GaussRat>>>,
    re: Vec<Vec<GaussRat>>,
    rx: GaussRat,
    cache: Mutex<HashMap<(Head, Vec<(SlotType, usize)>), Coefficient>>,
}

impl GeometricTensors {
    pub fn new(label: String, c: &Structure, re_form: [[i64; DIM]; DIM]) -> Self {
        let jm = j_matrix();
        // (Γ_i)_{kj} = ⟨∇_{e_i} e_j, e_k⟩ = ½(c_ij^k − c_jk^i + c_ki^j)
        let half = Complex::new(rat(1, 2), rat(0, 1));
        let gamma: Vec<Mat> = (0..DIM)
            .map(|i| {
                let mut m = zeros();
                for j in 0..DIM {
                    for k in 0..DIM {
                        m[k][j] = &(&(&c[i][j][k] - &c[j][k][i]) + &c[k][i][j]) * &half;
                    }
                }
                m
            })
            .collect();
        let nj: Vec<Mat> = gamma.iter().map(|gi| comm(gi, &jm)).collect();
        let curvature: Vec<Vec<Mat>> = (0..DIM)
            .map(|i| {
                (0..DIM)
                    .map(|j| {
                        let mut r = comm(&gamma[i], &gamma[j]);
                        for k in 0..DIM {
                            r = lin(&r, &g(1), &gamma[k], &-c[i][j][k].clone());
                        }
                        r
                    })
                    .collect()
            })
            .collect();
        let nnj: Vec<Vec<Mat>> = (0..DIM)
            .map(|i| {
                (0..DIM)
                    .map(|j| {
                        let mut r = comm(&gamma[i], &nj[j]);
                        for m in 0..DIM {
                            r = lin(&r, &g(1), &nj[m], &-gamma[i][m][j].clone());
                        }
                        r
                    })
                    .collect()
            })
            .collect();
        // projection onto T^{(1,0)}: P = ½(1 − iJ)
        let ij = lin(&jm, &Complex::new(rat(0, 1), rat(-1, 2)), &zeros(), &g(0));
        let mut proj = ij;
        for (k, row) in proj.iter_mut().enumerate() {
            row[k] = &row[k] + &half;
        }
        let pg: Vec<Mat> = gamma.iter().map(|gi| mul(&proj, &mul(gi, &proj))).collect();
        let t10 = (0..DIM)
            .map(|i| {
                (0..DIM)
                    .map(|j| {
                        let mut r = comm(&pg[i], &pg[j]);
                        for k in 0..DIM {
                            r = lin(&r, &g(1), &pg[k], &-c[i][j][k].clone());
                        }
                        (0..DIM).fold(GaussRat::zero(), |acc, d| acc + &r[d][d])
                    })
                    .collect()
            })
            .collect();
        // ω_{jk} = g(J e_j, e_k) = J_{kj}
        let w = |j: usize, k: usize| jm[k][j].clone();
        let d1rl = (0..DIM)
            .map(|i| {
                (0..DIM)
                    .map(|j| {
                        (0..DIM)
                            .map(|k| {
                                let mut s = GaussRat::zero();
                                for m in 0..DIM {
                                    s = s - &gamma[i][m][j] * w(m, k) - &gamma[i][m][k] * w(j, m);
                                }
                                s
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let re = (0..DIM)
            .map(|i| {
                (0..DIM)
                    .map(|j| Complex::new(rat(0, 1), rat(re_form[i][j] - re_form[j][i], 1)))
                    .collect()
            })
            .collect();
        let mut rx = GaussRat::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                // ⟨R(e_i,e_j)e_i, e_j⟩ = R(i,j)_{ji}
                rx -= &curvature[i][j][j][i];
            }
        }
        Self {
            label,
            gamma,
            nj,
            curvature,
            nnj,
            t10,
            d1rl,
            re,
            rx,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// `|∇J|² = Σ_{ij} |(∇_{e_i}J) e_j|²`.
    pub fn nabla_j_norm_sq(&self) -> GaussRat {
        let mut s = GaussRat::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    s += &self.nj[i][k][j] * &self.nj[i][k][j];
                }
            }
        }
        s
    }

    pub fn is_kaehler(&self) -> bool {
        self.nj.iter().all(|m| m.iter().flatten().all(Zero::is_zero))
    }

    pub fn connection(&self) -> &[Mat] {
        &self.gamma
    }

    fn real_value(&self, head: Head, idx: &[usize]) -> Coefficient {
        let v = match head {
            Head::Rtx => self.curvature[idx[0]][idx[1]][idx[3]][idx[2]].clone(),
            Head::Nj => self.nj[idx[0]][idx[2]][idx[1]].clone(),
            Head::Nnj => self.nnj[idx[0]][idx[1]][idx[3]][idx[2]].clone(),
            Head::Trt10 => self.t10[idx[0]][idx[1]].clone(),
            Head::Re => self.re[idx[0]][idx[1]].clone(),
            Head::Rx => self.rx.clone(),
            Head::D1rl => {
                let x = self.d1rl[idx[0]][idx[1]][idx[2]].clone();
                // R^L = −2πi ω
                return Coefficient::monomial(x * Complex::new(rat(0, 1), rat(-2, 1)), 1);
            }
            other => panic!("no geometric value for {other:?}"),
        };
        Coefficient::monomial(v, 0)
    }
}

/// Real-frame components of `∂z_j` / `∂z̄_j`.
fn frame(ty: SlotType, j: usize) -> [(usize, GaussRat); 2] {
    let half = Complex::new(rat(1, 2), rat(0, 1));
    let ihalf = Complex::new(rat(0, 1), rat(1, 2));
    match ty {
        SlotType::Hol => [(2 * j, half), (2 * j + 1, -ihalf)],
        SlotType::Anti => [(2 * j, half), (2 * j + 1, ihalf)],
    }
}

/// Evaluates a real-frame tensor `f` on coordinate-frame slots.
fn complexify(slots: &[(SlotType, usize)], f: impl Fn(&[usize]) -> Coefficient) -> Coefficient {
    let mut acc = Coefficient::zero();
    let k = slots.len();
    for code in 0..(1usize << k) {
        let mut idx = Vec::with_capacity(k);
        let mut c = GaussRat::one();
        for (s, (ty, j)) in slots.iter().enumerate() {
            let (i, f) = frame(*ty, *j)[(code >> s) & 1].clone();
            idx.push(i);
            c *= f;
        }
        acc += &f(&idx).scale(&c);
    }
    acc
}

impl AtomValues<Coefficient> for GeometricTensors {
    fn value(&self, head: Head, slots: &[(SlotType, usize)]) -> Coefficient {
        let key = (head, slots.to_vec());
        if let Some(v) = self.cache.lock().expect("cache").get(&key) {
            return v.clone();
        }
        let acc = complexify(slots, |idx| self.real_value(head, idx));
        self.cache.lock().expect("cache").insert(key, acc.clone());
        acc
    }
}

/// `count` random instantiations, deterministic in `seed`.
pub fn random_instances(count: usize, seed: u64) -> Vec<GeometricTensors> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = base_algebras();
    (0..count)
        .map(|t| {
            let (name, c) = &bases[t % bases.len()];
            let s = random_symplectic(&mut rng);
            let ct = transform(c, &s);
            let mut re = [[0i64; DIM]; DIM];
            for row in re.iter_mut() {
                for x in row.iter_mut() {
                    *x = rng.gen_range(-3..=3);
                }
            }
            GeometricTensors::new(format!("{name}#{t}"), &ct, re)
        })
        .collect()
}

/// Complex dimension of the model geometry.
pub const N: usize = DIM / 2;

/// Value of a generator-free, exterior-free expression (dummies summed).
pub fn scalar_value(e: &crate::Expr, values: &dyn AtomValues<Coefficient>) -> Coefficient {
    let mut acc = Coefficient::zero();
    for (m, c) in e.iter() {
        assert!(m.gens.is_empty() && m.ext.is_empty(), "not a scalar: {m}");
        acc += &(c * &monomial_value(&m.atoms, values));
    }
    acc
}

fn monomial_value(atoms: &[Atom], values: &dyn AtomValues<Coefficient>) -> Coefficient {
    let m = Monomial { atoms: atoms.to_vec(), ..Monomial::default() };
    let mut acc = Coefficient::zero();
    for_each_assignment(&m, N, |idx| {
        acc += &atoms_value(atoms, N, idx, values);
    });
    acc
}

/// A rule whose two sides disagree on a concrete geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleMismatch {
    pub rule: String,
    pub instance: String,
    pub lhs: String,
    pub rhs: String,
}

/// Checks `lhs = rhs` for every slot-type choice of the wildcards and every
/// index assignment of the pattern labels, on every instance.
pub fn check_rule(rule: &Rule, instances: &[GeometricTensors]) -> Result<usize, RuleMismatch> {
    let pattern = &rule.pattern;
    let mut labels: Vec<Label> = pattern.slots.iter().map(|s| s.label).collect();
    labels.sort_unstable();
    labels.dedup();
    let wild: Vec<usize> = (0..pattern.slots.len())
        .filter(|&i| rule.wildcards.contains(&pattern.slots[i].label))
        .collect();
    let fresh = labels.iter().max().map_or(0, |x| x + 1);
    let mut checked = 0;
    for types in 0..(1usize << wild.len()) {
        let mut atom = pattern.clone();
        for (b, &i) in wild.iter().enumerate() {
            atom.slots[i].ty = if (types >> b) & 1 == 1 { SlotType::Anti } else { SlotType::Hol };
        }
        let rhs = rule.rewrite(&atom, fresh).expect("pattern matches itself");
        for code in 0..N.pow(labels.len() as u32) {
            let pins: Vec<Atom> = labels
                .iter()
                .enumerate()
                .map(|(d, &l)| Atom::pin((code / N.pow(d as u32) % N) as u32 + 1, l))
                .collect();
            let with = |atoms: &[Atom]| -> Vec<Atom> {
                atoms.iter().cloned().chain(pins.iter().cloned()).collect()
            };
            for inst in instances {
                let l = monomial_value(&with(std::slice::from_ref(&atom)), inst);
                let mut r = Coefficient::zero();
                for (c, atoms) in &rhs {
                    r += &(c * &monomial_value(&with(atoms), inst));
                }
                if l != r {
                    return Err(RuleMismatch {
                        rule: rule.record.name.clone(),
                        instance: inst.label.clone(),
                        lhs: l.to_string(),
                        rhs: r.to_string(),
                    });
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Checks every rule of `ruleset`; returns the per-rule outcome.
pub fn check_ruleset(
    ruleset: &RuleSet,
    instances: &[GeometricTensors],
) -> Vec<(String, Result<usize, RuleMismatch>)> {
    ruleset
        .rules
        .iter()
        .map(|r| (r.record.name.clone(), check_rule(r, instances)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn base_algebras_are_symplectic_and_jacobi() {
        for (name, c) in base_algebras() {
            assert!(omega_closed(&c) && is_lie(&c), "{name}");
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let s = random_symplectic(&mut rng);
            let w = omega_matrix();
            // Sᵀ ω S = ω
            let st: Mat = (0..DIM).map(|i| (0..DIM).map(|j| s[j][i].clone()).collect()).collect();
            assert_eq!(mul(&st, &mul(&w, &s)), w);
            let ct = transform(&c, &s);
            assert!(omega_closed(&ct) && is_lie(&ct), "{name}");
        }
    }

    #[test]
    fn connection_is_metric_and_torsion_free() {
        for t in random_instances(3, 11) {
            for gm in t.connection() {
                for i in 0..DIM {
                    for j in 0..DIM {
                        assert_eq!(gm[i][j], -gm[j][i].clone());
                    }
                }
            }
        }
    }

    #[test]
    fn bundled_rules_hold_on_random_geometries() {
        let inst = random_instances(21, 2024);
        for (name, res) in check_ruleset(&RuleSet::bundled(), &inst) {
            let n = res.unwrap_or_else(|e| panic!("{name}: {e:?}"));
            assert!(n >= 21, "{name}");
        }
    }

    #[test]
    fn corrupted_rule_is_detected() {
        let text = crate::tensor::DEFAULT_RULES.replace(
            "rhs = -1i NJ(h1,h3,h5) NJ(a2,a4,a5)",
            "rhs = 1i NJ(h1,h3,h5) NJ(a2,a4,a5)",
        );
        assert_ne!(text, crate::tensor::DEFAULT_RULES);
        let rs = RuleSet::parse(&text).unwrap();
        let inst = random_instances(6, 9);
        let bad = check_ruleset(&rs, &inst);
        assert!(bad.iter().any(|(_, r)| r.is_err()));
    }

    #[test]
    fn generic_instances_are_not_kaehler() {
        let inst = random_instances(6, 5);
        assert!(inst.iter().any(|t| !t.is_kaehler()));
    }
}
