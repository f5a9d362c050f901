//! Building blocks of symbolic terms: tensor atoms with typed dummy slots,
//! Weyl generators, and exterior letters.

use serde::{Deserialize, Serialize};

/// Dummy summation label; every label is summed over `1..=n`.
pub type Label = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SlotType {
    /// `∂/∂z_l`
    Hol,
    /// `∂/∂z̄_l`
    Anti,
}

impl SlotType {
    pub fn flip(self) -> Self {
        match self {
            SlotType::Hol => SlotType::Anti,
            SlotType::Anti => SlotType::Hol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub ty: SlotType,
    pub label: Label,
}

pub fn h(label: Label) -> Slot {
    Slot { ty: SlotType::Hol, label }
}

pub fn a(label: Label) -> Slot {
    Slot { ty: SlotType::Anti, label }
}

/// Tensor heads. Slot meanings:
///
/// * `Rtx(x,y,u,v)  = ⟨R^{TX}(x,y)u, v⟩`
/// * `Re(x,y)       = R^E(x,y)` (endomorphism valued, does not commute with other `Re`)
/// * `Nj(x,u,v)     = ⟨(∇_x J)u, v⟩`
/// * `Nnj(x,y,u,v)  = ⟨(∇∇J)_{(x,y)}u, v⟩`
/// * `Rx`           scalar curvature
/// * `Trt10(x,y)    = tr R^{T^{(1,0)}X}(x,y)`
/// * `D1rl(x,u,v)   = (∇_x R^L)(u,v)`
/// * `D2rl(x,y,u,v) = (∂_x ∂_y R^L)(u,v)`
/// * `D2tau(x,y)    = ∂_x ∂_y τ`
/// * `Dim`          the complex dimension `n`
/// * `Pin(k)(x)     = δ_{label(x), k}`, used to pin a dummy label to a concrete index
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Head {
    Rtx,
    Re,
    Nj,
    Nnj,
    Rx,
    Trt10,
    D1rl,
    D2rl,
    D2tau,
    Dim,
    Pin(u32),
}

impl Head {
    pub fn arity(self) -> usize {
        match self {
            Head::Rtx | Head::Nnj | Head::D2rl => 4,
            Head::Nj | Head::D1rl => 3,
            Head::Re | Head::Trt10 | Head::D2tau => 2,
            Head::Pin(_) => 1,
            Head::Rx | Head::Dim => 0,
        }
    }

    /// Sign acquired under complex conjugation (besides flipping slot types).
    pub fn conj_sign(self) -> i8 {
        match self {
            Head::Re | Head::Trt10 | Head::D1rl | Head::D2rl => -1,
            _ => 1,
        }
    }

    pub fn commutes(self) -> bool {
        self != Head::Re
    }

    /// Slot symmetry group as `(perm, sign)` with `new[k] = old[perm[k]]`.
    pub fn symmetries(self) -> &'static [(&'static [usize], i8)] {
        match self {
            Head::Rtx => &[
                (&[0, 1, 2, 3], 1),
                (&[1, 0, 2, 3], -1),
                (&[0, 1, 3, 2], -1),
                (&[1, 0, 3, 2], 1),
                (&[2, 3, 0, 1], 1),
                (&[3, 2, 0, 1], -1),
                (&[2, 3, 1, 0], -1),
                (&[3, 2, 1, 0], 1),
            ],
            Head::Re | Head::Trt10 => &[(&[0, 1], 1), (&[1, 0], -1)],
            Head::Nj | Head::D1rl => &[(&[0, 1, 2], 1), (&[0, 2, 1], -1)],
            Head::Nnj => &[(&[0, 1, 2, 3], 1), (&[0, 1, 3, 2], -1)],
            Head::D2rl => &[
                (&[0, 1, 2, 3], 1),
                (&[1, 0, 2, 3], 1),
                (&[0, 1, 3, 2], -1),
                (&[1, 0, 3, 2], -1),
            ],
            Head::D2tau => &[(&[0, 1], 1), (&[1, 0], 1)],
            Head::Pin(_) => &[(&[0], 1)],
            Head::Rx | Head::Dim => &[(&[], 1)],
        }
    }

    pub fn name(self) -> String {
        match self {
            Head::Rtx => "RTX".into(),
            Head::Re => "RE".into(),
            Head::Nj => "NJ".into(),
            Head::Nnj => "NNJ".into(),
            Head::Rx => "RX".into(),
            Head::Trt10 => "TRT10".into(),
            Head::D1rl => "D1RL".into(),
            Head::D2rl => "D2RL".into(),
            Head::D2tau => "D2TAU".into(),
            Head::Dim => "DIM".into(),
            Head::Pin(k) => format!("PIN{k}"),
        }
    }

    pub fn from_name(s: &str) -> Option<Head> {
        Some(match s {
            "RTX" => Head::Rtx,
            "RE" => Head::Re,
            "NJ" => Head::Nj,
            "NNJ" => Head::Nnj,
            "RX" => Head::Rx,
            "TRT10" => Head::Trt10,
            "D1RL" => Head::D1rl,
            "D2RL" => Head::D2rl,
            "D2TAU" => Head::D2tau,
            "DIM" => Head::Dim,
            _ => Head::Pin(s.strip_prefix("PIN")?.parse().ok()?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub head: Head,
    pub slots: Vec<Slot>,
}

impl Atom {
    pub fn new(head: Head, slots: Vec<Slot>) -> Self {
        assert_eq!(head.arity(), slots.len(), "wrong arity for {}", head.name());
        Self { head, slots }
    }

    pub fn rtx(x: Slot, y: Slot, u: Slot, v: Slot) -> Self {
        Self::new(Head::Rtx, vec![x, y, u, v])
    }
    pub fn re(x: Slot, y: Slot) -> Self {
        Self::new(Head::Re, vec![x, y])
    }
    pub fn nj(x: Slot, u: Slot, v: Slot) -> Self {
        Self::new(Head::Nj, vec![x, u, v])
    }
    pub fn nnj(x: Slot, y: Slot, u: Slot, v: Slot) -> Self {
        Self::new(Head::Nnj, vec![x, y, u, v])
    }
    pub fn trt10(x: Slot, y: Slot) -> Self {
        Self::new(Head::Trt10, vec![x, y])
    }
    pub fn rx() -> Self {
        Self::new(Head::Rx, vec![])
    }
    pub fn dim() -> Self {
        Self::new(Head::Dim, vec![])
    }
    pub fn pin(k: u32, label: Label) -> Self {
        Self::new(Head::Pin(k), vec![h(label)])
    }

    /// Complex conjugate: slot types flip, some heads change sign.
    pub fn conj(&self) -> (i8, Atom) {
        let slots = match self.head {
            Head::Pin(_) => self.slots.clone(),
            _ => self
                .slots
                .iter()
                .map(|s| Slot { ty: s.ty.flip(), label: s.label })
                .collect(),
        };
        (self.head.conj_sign(), Atom { head: self.head, slots })
    }

    /// True when the atom is identically zero by slot-type counting.
    pub fn vanishes_by_type(&self) -> bool {
        match self.head {
            Head::Nj => {
                let t = self.slots[0].ty;
                self.slots.iter().any(|s| s.ty != t)
            }
            _ => false,
        }
    }
}

/// Generators of the model Weyl algebra; the derived order is the normal
/// order (primed coordinates are central and come first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GenKind {
    ZPrime,
    ZBarPrime,
    B,
    Z,
    ZBar,
    BPlus,
}

impl GenKind {
    pub fn adjoint(self) -> GenKind {
        match self {
            GenKind::B => GenKind::BPlus,
            GenKind::BPlus => GenKind::B,
            GenKind::Z => GenKind::ZBar,
            GenKind::ZBar => GenKind::Z,
            GenKind::ZPrime => GenKind::ZBarPrime,
            GenKind::ZBarPrime => GenKind::ZPrime,
        }
    }

    pub fn is_prime(self) -> bool {
        matches!(self, GenKind::ZPrime | GenKind::ZBarPrime)
    }

    pub fn prefix(self) -> &'static str {
        match self {
            GenKind::B => "b",
            GenKind::BPlus => "bp",
            GenKind::Z => "z",
            GenKind::ZBar => "zb",
            GenKind::ZPrime => "zp",
            GenKind::ZBarPrime => "zbp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gen {
    pub kind: GenKind,
    pub label: Label,
}

pub fn gen(kind: GenKind, label: Label) -> Gen {
    Gen { kind, label }
}

/// Letters of exterior words: `C(l) = dz̄_l ∧`, `A(l) = i_{∂/∂z̄_l}`, and the
/// vacuum projector `I` onto `Λ^0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    C(Label),
    I,
    A(Label),
}

impl Letter {
    pub fn label(self) -> Option<Label> {
        match self {
            Letter::C(l) | Letter::A(l) => Some(l),
            Letter::I => None,
        }
    }
}

/// A coefficient-free product `atoms · ext-word · generator-word`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub atoms: Vec<Atom>,
    pub ext: Vec<Letter>,
    pub gens: Vec<Gen>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_parts(atoms: Vec<Atom>, ext: Vec<Letter>, gens: Vec<Gen>) -> Self {
        Self { atoms, ext, gens }
    }

    pub fn for_each_label_mut(&mut self, mut f: impl FnMut(&mut Label)) {
        for at in &mut self.atoms {
            for s in &mut at.slots {
                f(&mut s.label);
            }
        }
        for l in &mut self.ext {
            match l {
                Letter::C(x) | Letter::A(x) => f(x),
                Letter::I => {}
            }
        }
        for g in &mut self.gens {
            f(&mut g.label);
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        let mut m = self.clone();
        m.for_each_label_mut(|l| out.push(*l));
        out
    }

    pub fn max_label(&self) -> Option<Label> {
        self.labels().into_iter().max()
    }

    pub fn shift_labels(&mut self, by: Label) {
        self.for_each_label_mut(|l| *l += by);
    }

    pub fn uses(&self, label: Label) -> bool {
        self.labels().contains(&label)
    }

    /// Applies `δ_{keep,gone}` after the two factors carrying `keep` and
    /// `gone` have been removed: `gone` is renamed to `keep`, and if the
    /// merged label is no longer referenced the sum over it yields `n`.
    pub fn contract(&mut self, keep: Label, gone: Label) {
        if keep != gone {
            self.for_each_label_mut(|l| {
                if *l == gone {
                    *l = keep;
                }
            });
        }
        if !self.uses(keep) {
            self.atoms.push(Atom::dim());
        }
    }

    /// Product of two monomials; the labels of `rhs` are shifted past those
    /// of `self` so that dummies stay independent.
    pub fn product(&self, rhs: &Monomial) -> Monomial {
        let mut r = rhs.clone();
        r.shift_labels(self.max_label().map_or(0, |m| m + 1));
        let mut out = self.clone();
        out.atoms.extend(r.atoms);
        out.ext.extend(r.ext);
        out.gens.extend(r.gens);
        out
    }

    pub fn has_prime(&self) -> bool {
        self.gens.iter().any(|g| g.kind.is_prime())
    }

    pub fn count(&self, kind: GenKind) -> usize {
        self.gens.iter().filter(|g| g.kind == kind).count()
    }

    pub fn creation_degree(&self) -> usize {
        self.ext
            .iter()
            .take_while(|l| **l != Letter::I)
            .filter(|l| matches!(l, Letter::C(_)))
            .count()
    }
}
