//! Exact arithmetic and orbital-integral machinery for tame cyclic
//! extensions E/Q_p of GL_n.
//!
//! The crate builds towers E = Q_p(w, pi) with pi^e = p and w unramified of
//! degree f, carries their cyclic Galois generator theta exactly at finite
//! pi-adic precision, and on top of that provides:
//!
//! * matrices over E, congruence subgroups and their theta-fixed parts,
//!   twisted conjugation and the concrete norm map (`matgrp`);
//! * the Cayley transform between topologically nilpotent Lie elements and
//!   topologically unipotent group elements, eigenspace splitting for
//!   d theta, and the constructive descent iteration (`descent`);
//! * normalizing factors, Haar-volume conventions, exact twisted and
//!   untwisted orbital integrals of congruence-subgroup indicators, and the
//!   end-to-end matching checker (`orbital`);
//! * a seeded experiment harness with JSON-lines reports (`harness`).
//!
//! All values are exact rationals or p-adic numbers at tracked precision;
//! no floating point enters any computation.

pub mod error;
pub mod localfield;
pub mod matgrp;
pub mod descent;
pub mod orbital;
pub mod harness;
pub mod zplin;

pub use error::{Error, Result};
pub use localfield::{make_tower, PadicElem, Tower};
