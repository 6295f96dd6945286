//! Matrices over E, congruence subgroups, twisted conjugation and norms.

pub mod congruence;
pub mod matrix;
pub mod twisted;
pub mod unipotent;

pub use congruence::{in_congruence, theta_fixed_level, CongruenceLevel, Side};
pub use matrix::{poly_disc, MatrixE};
pub use twisted::{is_norm_of, regular_disc_valuation, TwistedElem, REGULARITY_SLACK};
pub use unipotent::{dth_root_tu, is_top_unipotent, p_power_trivialization};
