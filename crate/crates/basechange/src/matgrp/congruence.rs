//! Congruence subgroups K_E(m), K_F(m) and the theta-fixed level formula.

use crate::error::{Error, Result};
use crate::localfield::PadicElem;

use super::matrix::MatrixE;

/// Which side of the tower a congruence level lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// K_E(m) = I + pi_E^m M_n(O_E); m = 0 means GL_n(O_E).
    E,
    /// K_F(m) = I + p^m M_n(Z_p); m = 0 means GL_n(Z_p).
    F,
}

/// A principal congruence level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongruenceLevel {
    pub side: Side,
    pub m: u32,
}

impl CongruenceLevel {
    pub fn e_side(m: u32) -> Self {
        CongruenceLevel { side: Side::E, m }
    }

    pub fn f_side(m: u32) -> Self {
        CongruenceLevel { side: Side::F, m }
    }
}

/// The F-level k with K_E(m)_theta = K_F(k): writing m = ke + r with
/// 0 <= r < e, the answer is k+1 if r != 0 and k if r = 0.
pub fn theta_fixed_level(e: u32, m: u32) -> u32 {
    let k = m / e;
    let r = m % e;
    if r != 0 {
        k + 1
    } else {
        k
    }
}

/// Membership of M in the congruence subgroup at `level`. For F-side levels
/// the matrix must additionally be theta-fixed at precision.
pub fn in_congruence(m: &MatrixE, level: CongruenceLevel) -> Result<bool> {
    let t = m.tower();
    let depth: i64 = match level.side {
        Side::E => level.m as i64,
        Side::F => level.m as i64 * t.e as i64,
    };
    if let Some(p) = m.min_precision() {
        if p < depth {
            return Err(Error::PrecisionExhausted(format!(
                "membership at level {} needs precision >= {depth}, have {p}",
                level.m
            )));
        }
    }
    if level.side == Side::F && !m.is_theta_fixed() {
        return Ok(false);
    }
    if level.m == 0 {
        // full maximal compact: integral entries, unit determinant
        if !m.is_integral() {
            return Ok(false);
        }
        return Ok(m.det().valuation() == Some(0));
    }
    let n = m.n();
    let id = MatrixE::identity(t, n);
    let diff = m.sub(&id);
    for i in 0..n {
        for j in 0..n {
            if !diff.at(i, j).valuation_at_least(depth)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Sample of K_E(m): I + pi^m Z with Z random integral.
pub fn random_congruence_element<R: rand::Rng>(
    tower: &crate::localfield::Tower,
    n: usize,
    m: u32,
    rng: &mut R,
) -> MatrixE {
    let pi_m = PadicElem::uniformizer(tower).pow_u64(m as u64);
    let z = MatrixE::random_integral(tower, n, rng);
    MatrixE::identity(tower, n).add(&z.scalar_mul(&pi_m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::make_tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn theta_fixed_level_formula() {
        assert_eq!(theta_fixed_level(2, 3), 2);
        assert_eq!(theta_fixed_level(1, 5), 5);
        assert_eq!(theta_fixed_level(3, 6), 2);
        assert_eq!(theta_fixed_level(2, 1), 1);
        assert_eq!(theta_fixed_level(2, 4), 2);
    }

    #[test]
    fn identity_in_all_levels() {
        let t = make_tower(3, 2, 1, 8).unwrap();
        let id = MatrixE::identity(&t, 2);
        for m in 0..=8 {
            assert!(in_congruence(&id, CongruenceLevel::e_side(m)).unwrap());
        }
        for m in 0..=4 {
            assert!(in_congruence(&id, CongruenceLevel::f_side(m)).unwrap());
        }
    }

    #[test]
    fn boundary_membership() {
        let t = make_tower(3, 2, 1, 8).unwrap();
        let pi = PadicElem::uniformizer(&t);
        for m in 1..=4u32 {
            let mut mtx = MatrixE::identity(&t, 2);
            mtx.set(0, 1, pi.pow_u64(m as u64));
            assert!(in_congruence(&mtx, CongruenceLevel::e_side(m)).unwrap());
            assert!(!in_congruence(&mtx, CongruenceLevel::e_side(m + 1)).unwrap());
        }
    }

    #[test]
    fn theta_preserves_congruence_membership() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let t = make_tower(3, 2, 1, 8).unwrap();
        for m in 1..=3 {
            for _ in 0..20 {
                let k = random_congruence_element(&t, 2, m, &mut rng);
                assert!(in_congruence(&k, CongruenceLevel::e_side(m)).unwrap());
                assert!(in_congruence(&k.apply_theta(), CongruenceLevel::e_side(m)).unwrap());
            }
        }
    }

    #[test]
    fn precision_exhaustion_below_level() {
        let t = make_tower(3, 2, 1, 4).unwrap();
        let id = MatrixE::identity(&t, 2);
        assert!(matches!(
            in_congruence(&id, CongruenceLevel::e_side(20)),
            Err(Error::PrecisionExhausted(_))
        ));
    }
}
