//! The twisted space G rtimes theta: twisted conjugation, the concrete norm
//! map, and the characteristic-polynomial norm test.

use crate::error::{Error, Result};

use super::matrix::{poly_disc, MatrixE};

/// Regularity slack: a discriminant is treated as determinate only when its
/// valuation sits this far below the working precision.
pub const REGULARITY_SLACK: i64 = 2;

/// An element g rtimes theta of the twisted space, stored by its unique
/// group coordinate.
#[derive(Debug, Clone)]
pub struct TwistedElem {
    g: MatrixE,
}

impl TwistedElem {
    pub fn new(g: MatrixE) -> Self {
        TwistedElem { g }
    }

    pub fn coordinate(&self) -> &MatrixE {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    /// N(delta) = delta theta(delta) ... theta^{d-1}(delta).
    pub fn twisted_norm(&self) -> MatrixE {
        let d = self.g.tower().d;
        let mut acc = self.g.clone();
        let mut cur = self.g.clone();
        for _ in 1..d {
            cur = cur.apply_theta();
            acc = acc.mul(&cur);
        }
        acc
    }

    /// The coordinate of g^{-1} (delta rtimes theta) g, namely
    /// g^{-1} delta theta(g).
    pub fn twisted_conjugate(&self, g: &MatrixE) -> Result<TwistedElem> {
        let gi = g.inverse()?;
        Ok(TwistedElem::new(gi.mul(&self.g).mul(&g.apply_theta())))
    }
}

/// Valuation of the discriminant of the characteristic polynomial, with the
/// regularity gate: errors when the discriminant is too close to zero at
/// precision to certify regular semisimplicity.
pub fn regular_disc_valuation(m: &MatrixE) -> Result<i64> {
    let t = m.tower();
    let coeffs = m.charpoly();
    let disc = poly_disc(t, &coeffs);
    match disc.valuation() {
        Some(v) => {
            let prec = disc.precision().unwrap_or(t.precision);
            if v <= prec - REGULARITY_SLACK {
                Ok(v)
            } else {
                Err(Error::IrregularInput(format!(
                    "discriminant valuation {v} too close to precision {prec}"
                )))
            }
        }
        None => Err(Error::IrregularInput(
            "discriminant vanishes at precision".into(),
        )),
    }
}

/// Characteristic-polynomial norm test, valid in the regular semisimple
/// regime: gamma (over F) is a norm of delta iff charpoly(N delta) equals
/// charpoly(gamma) coefficient-wise at precision.
pub fn is_norm_of(gamma: &MatrixE, delta: &TwistedElem) -> Result<bool> {
    regular_disc_valuation(gamma)?;
    let ndelta = delta.twisted_norm();
    regular_disc_valuation(&ndelta)?;
    let a = gamma.charpoly();
    let b = ndelta.charpoly();
    Ok(a.iter().zip(&b).all(|(x, y)| x.eq_at_min_prec(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{make_tower, PadicElem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn norm_of_theta_fixed_is_dth_power() {
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        let t = make_tower(3, 2, 1, 8).unwrap();
        let g = MatrixE::random_gl(&t, 2, &mut rng);
        // force theta-fixed: take entries in F by averaging is overkill;
        // use an F-matrix directly
        let h = MatrixE::from_fn(&t, 2, |i, j| {
            PadicElem::from_i64(&t, [[2, 1], [1, 1]][i][j])
        });
        let _ = g;
        let delta = TwistedElem::new(h.clone());
        let n = delta.twisted_norm();
        assert!(n.eq_at_min_prec(&h.pow_u64(t.d as u64)));
    }

    #[test]
    fn scalar_norm_examples() {
        // n = 1, e = 2, p = 3, delta = pi: N(delta) = -3
        let t = make_tower(3, 2, 1, 8).unwrap();
        let pi = PadicElem::uniformizer(&t);
        let delta = TwistedElem::new(MatrixE::diag(&t, &[pi]));
        let n = delta.twisted_norm();
        let expected = MatrixE::diag(&t, &[PadicElem::from_i64(&t, -3)]);
        assert!(n.eq_at_min_prec(&expected));
    }

    #[test]
    fn norm_covariance_under_twisted_conjugation() {
        let mut rng = ChaCha20Rng::seed_from_u64(43);
        let t = make_tower(3, 1, 2, 8).unwrap();
        for _ in 0..10 {
            let delta = TwistedElem::new(MatrixE::random_gl(&t, 2, &mut rng));
            let g = MatrixE::random_gl(&t, 2, &mut rng);
            let conj = delta.twisted_conjugate(&g).unwrap();
            let lhs = conj.twisted_norm();
            let rhs = g.inverse().unwrap().mul(&delta.twisted_norm()).mul(&g);
            assert!(lhs.eq_at_min_prec(&rhs));
        }
    }

    #[test]
    fn norm_charpoly_is_theta_fixed() {
        let mut rng = ChaCha20Rng::seed_from_u64(47);
        for (p, e, f) in [(3, 2, 1), (3, 1, 2), (5, 2, 1)] {
            let t = make_tower(p, e, f, 8).unwrap();
            for _ in 0..10 {
                let delta = TwistedElem::new(MatrixE::random_gl(&t, 2, &mut rng));
                let n = delta.twisted_norm();
                for c in n.charpoly() {
                    assert!(c.eq_at_min_prec(&c.apply_theta()));
                }
            }
        }
    }

    #[test]
    fn twisted_conjugation_cocycle() {
        let mut rng = ChaCha20Rng::seed_from_u64(53);
        let t = make_tower(5, 2, 1, 8).unwrap();
        let delta = TwistedElem::new(MatrixE::random_gl(&t, 2, &mut rng));
        let g1 = MatrixE::random_gl(&t, 2, &mut rng);
        let g2 = MatrixE::random_gl(&t, 2, &mut rng);
        let step = delta
            .twisted_conjugate(&g1)
            .unwrap()
            .twisted_conjugate(&g2)
            .unwrap();
        let combined = delta.twisted_conjugate(&g1.mul(&g2)).unwrap();
        assert!(step.coordinate().eq_at_min_prec(combined.coordinate()));
    }

    #[test]
    fn twisted_conjugate_by_identity_and_in_h() {
        let t = make_tower(3, 2, 1, 8).unwrap();
        let h = MatrixE::from_fn(&t, 2, |i, j| {
            PadicElem::from_i64(&t, [[4, 3], [3, 1]][i][j])
        });
        let delta = TwistedElem::new(h.clone());
        let id = MatrixE::identity(&t, 2);
        assert!(delta
            .twisted_conjugate(&id)
            .unwrap()
            .coordinate()
            .eq_at_min_prec(&h));
        // g, delta in H: ordinary conjugation
        let g = MatrixE::from_fn(&t, 2, |i, j| {
            PadicElem::from_i64(&t, [[1, 1], [0, 1]][i][j])
        });
        let tc = delta.twisted_conjugate(&g).unwrap();
        let ord = g.inverse().unwrap().mul(&h).mul(&g);
        assert!(tc.coordinate().eq_at_min_prec(&ord));
    }

    #[test]
    fn norm_test_scalar_cases() {
        // n = 1, e = 2, p = 3: gamma = -3 is a norm of pi; gamma = 3 is not
        let t = make_tower(3, 2, 1, 8).unwrap();
        let pi = PadicElem::uniformizer(&t);
        let delta = TwistedElem::new(MatrixE::diag(&t, &[pi]));
        let gamma = MatrixE::diag(&t, &[PadicElem::from_i64(&t, -3)]);
        assert!(is_norm_of(&gamma, &delta).unwrap());
        let gamma = MatrixE::diag(&t, &[PadicElem::from_i64(&t, 3)]);
        assert!(!is_norm_of(&gamma, &delta).unwrap());
    }

    #[test]
    fn norm_test_diagonal_pair() {
        // gamma = diag(-3, -2), delta = diag(pi, 1 + pi) over (3, 2, 1)
        let t = make_tower(3, 2, 1, 8).unwrap();
        let pi = PadicElem::uniformizer(&t);
        let delta = TwistedElem::new(MatrixE::diag(
            &t,
            &[pi.clone(), PadicElem::one(&t).add(&pi)],
        ));
        let gamma = MatrixE::diag(
            &t,
            &[PadicElem::from_i64(&t, -3), PadicElem::from_i64(&t, -2)],
        );
        assert!(is_norm_of(&gamma, &delta).unwrap());
        // swapped multiset also matches (conjugacy class data only)
        let gamma2 = MatrixE::diag(
            &t,
            &[PadicElem::from_i64(&t, -2), PadicElem::from_i64(&t, -3)],
        );
        assert!(is_norm_of(&gamma2, &delta).unwrap());
        // a wrong pair fails
        let gamma3 = MatrixE::diag(
            &t,
            &[PadicElem::from_i64(&t, -3), PadicElem::from_i64(&t, -1)],
        );
        assert!(!is_norm_of(&gamma3, &delta).unwrap());
    }

    #[test]
    fn irregular_input_rejected() {
        let t = make_tower(3, 2, 1, 8).unwrap();
        let gamma = MatrixE::identity(&t, 2);
        let delta = TwistedElem::new(MatrixE::identity(&t, 2));
        assert!(matches!(
            is_norm_of(&gamma, &delta),
            Err(Error::IrregularInput(_))
        ));
    }
}
