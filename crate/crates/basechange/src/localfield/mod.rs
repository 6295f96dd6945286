//! Exact finite-precision arithmetic in tame cyclic towers E/Q_p.

pub mod elem;
pub mod residue;
pub mod tower;

pub use elem::PadicElem;
pub use residue::{FqElem, ResidueField};
pub use tower::{make_tower, Tower, TowerInner};
