//! Topological unipotence and d-th roots of topologically unipotent
//! elements.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::localfield::PadicElem;

use super::matrix::MatrixE;

/// Binomial coefficient as i64 (n small).
fn binom(n: usize, k: usize) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

/// Topological unipotence: g integral with unit determinant and
/// charpoly(g) = (X-1)^n mod pi. Non-integral inputs return false.
pub fn is_top_unipotent(g: &MatrixE) -> Result<bool> {
    if !g.is_integral() {
        return Ok(false);
    }
    if let Some(p) = g.min_precision() {
        if p < 1 {
            return Err(Error::PrecisionExhausted(
                "unipotence test needs at least one digit".into(),
            ));
        }
    }
    if g.det().valuation() != Some(0) {
        return Ok(false);
    }
    let t = g.tower();
    let n = g.n();
    let c = g.charpoly();
    for k in 1..=n {
        // coefficient of X^{n-k} in (X-1)^n is binom(n,k) (-1)^k
        let expected = PadicElem::from_i64(t, binom(n, k) * if k % 2 == 1 { -1 } else { 1 });
        let diff = c[k].sub(&expected);
        if !diff.valuation_at_least(1)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest K with g^{p^K} trivial at the matrix's working precision;
/// returns (K, the stabilized power). Errors if the limit is not reached
/// within a generous cap (indicating a non-unipotent input).
pub fn p_power_trivialization(g: &MatrixE) -> Result<(u32, MatrixE)> {
    let t = g.tower();
    let n = g.n();
    let id = MatrixE::identity(t, n);
    let target = g.min_precision().unwrap_or(t.precision);
    let mut h = g.clone();
    let mut k: u32 = 0;
    let cap = 64 + 2 * t.precision as u32;
    loop {
        let diff = h.sub(&id);
        let trivial = (0..n * n).all(|idx| {
            diff.entries()[idx]
                .valuation_at_least(target)
                .unwrap_or(false)
        });
        if trivial {
            return Ok((k, h));
        }
        if k >= cap {
            return Err(Error::NotTopologicallyUnipotent(format!(
                "p-power iteration did not reach the identity within {cap} steps"
            )));
        }
        h = h.pow_u64(t.p);
        k += 1;
    }
}

/// The unique topologically unipotent d-th root of a topologically
/// unipotent element, computed as gamma^{u} with u = d^{-1} mod p^K for K
/// large enough that gamma^{p^K} is trivial at precision.
pub fn dth_root_tu(gamma: &MatrixE) -> Result<MatrixE> {
    let t = gamma.tower();
    if !is_top_unipotent(gamma)? {
        return Err(Error::NotTopologicallyUnipotent(
            "d-th root requires a topologically unipotent input".into(),
        ));
    }
    let (k, _) = p_power_trivialization(gamma)?;
    let p = BigUint::from(t.p);
    let pk = p.pow(k.max(1));
    // d^{-1} mod p^K via Euler: d^{phi(p^K) - 1}
    let phi = &pk / &p * (&p - BigUint::one());
    let d = BigUint::from(t.d);
    let u = d.modpow(&(phi - BigUint::one()), &pk);
    let root = gamma.pow_biguint(&u);
    debug_assert!(root
        .pow_u64(t.d as u64)
        .eq_at_min_prec(gamma));
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{make_tower, PadicElem};

    #[test]
    fn unipotence_examples() {
        let t = make_tower(3, 1, 1, 8).unwrap();
        let id = MatrixE::identity(&t, 2);
        assert!(is_top_unipotent(&id).unwrap());

        // diag(-1, 1) at p = 3: (-1)^{3^k} = -1 never tends to 1
        let m = MatrixE::diag(
            &t,
            &[PadicElem::from_i64(&t, -1), PadicElem::from_i64(&t, 1)],
        );
        assert!(!is_top_unipotent(&m).unwrap());

        // [[1,1],[0,1]] is unipotent
        let mut u = MatrixE::identity(&t, 2);
        u.set(0, 1, PadicElem::one(&t));
        assert!(is_top_unipotent(&u).unwrap());
        // and its iterated p-th powers reach the identity at precision
        let (k, h) = p_power_trivialization(&u).unwrap();
        assert!(k > 0);
        assert!(h.eq_at_min_prec(&MatrixE::identity(&t, 2)));

        // non-integral inputs are rejected by fiat
        let mut v = MatrixE::identity(&t, 2);
        v.set(0, 1, PadicElem::from_i64(&t, 3).inv().unwrap());
        assert!(!is_top_unipotent(&v).unwrap());
    }

    #[test]
    fn dth_root_scalar_example() {
        // gamma = 4 in Q_3^x, d = 2 -> -2
        let t = make_tower(3, 1, 2, 10).unwrap(); // d = 2 via f = 2
        let gamma = MatrixE::diag(&t, &[PadicElem::from_i64(&t, 4)]);
        let root = dth_root_tu(&gamma).unwrap();
        let expected = MatrixE::diag(&t, &[PadicElem::from_i64(&t, -2)]);
        assert!(root.eq_at_min_prec(&expected));
    }

    #[test]
    fn dth_root_unipotent_matrix_example() {
        // gamma = [[1,3],[0,1]] over Q_3, d = 2 -> [[1, 3/2],[0,1]]
        let t = make_tower(3, 2, 1, 12).unwrap(); // d = 2 via e = 2
        let mut gamma = MatrixE::identity(&t, 2);
        gamma.set(0, 1, PadicElem::from_i64(&t, 3));
        let root = dth_root_tu(&gamma).unwrap();
        let mut expected = MatrixE::identity(&t, 2);
        expected.set(0, 1, PadicElem::from_ratio(&t, 3, 2).unwrap());
        assert!(root.eq_at_min_prec(&expected));
        // and squaring recovers gamma
        assert!(root.pow_u64(2).eq_at_min_prec(&gamma));
    }

    #[test]
    fn dth_root_identity() {
        let t = make_tower(5, 2, 1, 8).unwrap();
        let id = MatrixE::identity(&t, 2);
        let root = dth_root_tu(&id).unwrap();
        assert!(root.eq_at_min_prec(&id));
    }

    #[test]
    fn dth_root_rejects_non_unipotent() {
        let t = make_tower(3, 2, 1, 8).unwrap();
        let m = MatrixE::diag(
            &t,
            &[PadicElem::from_i64(&t, -1), PadicElem::from_i64(&t, 1)],
        );
        assert!(matches!(
            dth_root_tu(&m),
            Err(Error::NotTopologicallyUnipotent(_))
        ));
    }
}
