//! Symbolic terms: typed dummy-index tensors, Weyl generators and exterior
//! words, with canonical forms.

pub mod canon;
pub mod order;
pub mod term;
pub mod text;

pub use canon::{canonical, Expr};
pub use order::{bracket, normalize, Ordering};
pub use term::{a, gen, h, Atom, Gen, GenKind, Head, Label, Letter, Monomial, Slot, SlotType};
pub use text::ParseError;
