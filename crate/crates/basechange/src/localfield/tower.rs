//! Tower construction: E = Q_p(w, pi) with w a root of the deterministic
//! unramified polynomial of degree f and pi^e = p, together with the cyclic
//! Galois generator theta = (Frobenius lift) o (pi -> zeta_e * pi).

use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::residue::{least_irreducible, FqElem, ResidueField};

/// Extra pi-adic precision carried by the tower's Galois tables beyond the
/// working precision, so that theta stays exact on moderately negative
/// valuations produced by matrix inverses.
pub const TABLE_GUARD: i64 = 48;

/// Context for raw coefficient arithmetic on the basis x^i pi^j
/// (0 <= i < f, 0 <= j < e), independent of any particular precision.
#[derive(Debug, Clone)]
pub struct RawCtx {
    pub p: BigUint,
    pub f: usize,
    pub e: usize,
    /// Non-leading coefficients of the monic defining polynomial h of the
    /// unramified part, trivially lifted (exact integers in [0, p)).
    pub hc: Vec<BigUint>,
}

/// Raw coefficient vector of length f*e; index (i, j) -> j*f + i.
pub type Raw = Vec<BigUint>;

impl RawCtx {
    pub fn len(&self) -> usize {
        self.f * self.e
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.f + i
    }

    pub fn zero_raw(&self) -> Raw {
        vec![BigUint::zero(); self.len()]
    }

    pub fn one_raw(&self) -> Raw {
        let mut v = self.zero_raw();
        v[0] = BigUint::one();
        v
    }

    pub fn reduce(&self, a: &mut Raw, modulus: &BigUint) {
        for c in a.iter_mut() {
            *c %= modulus;
        }
    }

    pub fn add(&self, a: &Raw, b: &Raw, modulus: &BigUint) -> Raw {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + y) % modulus)
            .collect()
    }

    pub fn neg(&self, a: &Raw, modulus: &BigUint) -> Raw {
        a.iter()
            .map(|x| {
                if x.is_zero() {
                    BigUint::zero()
                } else {
                    modulus - (x % modulus)
                }
            })
            .collect()
    }

    pub fn sub(&self, a: &Raw, b: &Raw, modulus: &BigUint) -> Raw {
        self.add(a, &self.neg(b, modulus), modulus)
    }

    pub fn scalar_mul(&self, a: &Raw, c: &BigUint, modulus: &BigUint) -> Raw {
        a.iter().map(|x| (x * c) % modulus).collect()
    }

    /// Full product with reduction by h(x) and pi^e = p.
    pub fn mul(&self, a: &Raw, b: &Raw, modulus: &BigUint) -> Raw {
        let (f, e) = (self.f, self.e);
        // accumulate on the extended grid (2f-1) x (2e-1)
        let width = 2 * f - 1;
        let height = 2 * e - 1;
        let mut acc = vec![BigUint::zero(); width * height];
        for j1 in 0..e {
            for i1 in 0..f {
                let c1 = &a[self.idx(i1, j1)];
                if c1.is_zero() {
                    continue;
                }
                for j2 in 0..e {
                    for i2 in 0..f {
                        let c2 = &b[self.idx(i2, j2)];
                        if c2.is_zero() {
                            continue;
                        }
                        let t = (j1 + j2) * width + (i1 + i2);
                        acc[t] = (&acc[t] + c1 * c2) % modulus;
                    }
                }
            }
        }
        // reduce x-degrees >= f using x^f = -sum hc[t] x^t
        for j in 0..height {
            for i in (f..width).rev() {
                let t = j * width + i;
                if acc[t].is_zero() {
                    continue;
                }
                let c = std::mem::take(&mut acc[t]);
                for (k, h) in self.hc.iter().enumerate() {
                    if h.is_zero() {
                        continue;
                    }
                    let dst = j * width + (i - f + k);
                    let m = (&c * h) % modulus;
                    let negm = if m.is_zero() {
                        BigUint::zero()
                    } else {
                        modulus - m
                    };
                    acc[dst] = (&acc[dst] + negm) % modulus;
                }
            }
        }
        // reduce pi-degrees >= e using pi^e = p
        for j in (e..height).rev() {
            for i in 0..f {
                let t = j * width + i;
                if acc[t].is_zero() {
                    continue;
                }
                let c = std::mem::take(&mut acc[t]);
                let dst = (j - e) * width + i;
                acc[dst] = (&acc[dst] + c * &self.p) % modulus;
            }
        }
        let mut out = self.zero_raw();
        for j in 0..e {
            for i in 0..f {
                out[self.idx(i, j)] = std::mem::take(&mut acc[j * width + i]);
            }
        }
        out
    }

    pub fn pow(&self, a: &Raw, mut n: u64, modulus: &BigUint) -> Raw {
        let mut base = a.clone();
        let mut acc = self.one_raw();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base, modulus);
            }
            base = self.mul(&base, &base, modulus);
            n >>= 1;
        }
        acc
    }

    /// Residue in F_q of an integral raw element (row j = 0 mod p).
    pub fn residue(&self, a: &Raw) -> FqElem {
        let p64 = biguint_to_u64(&self.p);
        (0..self.f)
            .map(|i| biguint_to_u64(&(&a[self.idx(i, 0)] % &self.p)) % p64)
            .collect()
    }

    /// Newton inverse of a unit (residue nonzero), exact mod
    /// (h, pi^e - p, modulus). `pi_prec` is the pi-adic precision to which
    /// the inverse must be correct; iterations double it each step.
    pub fn inv_unit(&self, a: &Raw, modulus: &BigUint, pi_prec: i64, field: &ResidueField) -> Raw {
        let res = self.residue(a);
        let res_inv = field
            .inv(&res)
            .expect("inv_unit requires a certified unit");
        let mut z = self.zero_raw();
        for (i, &c) in res_inv.iter().enumerate() {
            z[self.idx(i, 0)] = BigUint::from(c);
        }
        let two = self.scalar_mul(&self.one_raw(), &BigUint::from(2u32), modulus);
        let mut reached: i64 = 1;
        while reached < pi_prec {
            // z <- z (2 - a z)
            let az = self.mul(a, &z, modulus);
            let corr = self.sub(&two, &az, modulus);
            z = self.mul(&z, &corr, modulus);
            reached *= 2;
        }
        z
    }
}

pub fn biguint_to_u64(x: &BigUint) -> u64 {
    let digits = x.to_u64_digits();
    match digits.len() {
        0 => 0,
        1 => digits[0],
        _ => panic!("value does not fit in u64"),
    }
}

/// Tame cyclic tower E/Q_p with its Galois generator.
#[derive(Debug)]
pub struct TowerInner {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub d: u32,
    /// Absolute pi_E-adic working precision N.
    pub precision: i64,
    pub ctx: RawCtx,
    pub residue_field: ResidueField,
    /// p-adic precision of the stored Galois tables: ceil((N + TABLE_GUARD)/e).
    pub table_prec: i64,
    pub table_modulus: BigUint,
    /// theta(x)^i as unramified raw elements (rows j > 0 zero), i < f.
    pub frob_pows: Vec<Raw>,
    /// zeta_e^j mod p^table_prec, j < e.
    pub zeta_pows: Vec<BigUint>,
    scalar: OnceLock<Tower>,
}

/// Shared handle to a tower. Cheap to clone; all values reference one.
#[derive(Debug, Clone)]
pub struct Tower(pub Arc<TowerInner>);

impl std::ops::Deref for Tower {
    type Target = TowerInner;
    fn deref(&self) -> &TowerInner {
        &self.0
    }
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.p == other.p
                && self.e == other.e
                && self.f == other.f
                && self.precision == other.precision)
    }
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Build the tower for the extension with ramification e and inertia f over
/// Q_p, at absolute pi_E-adic precision `precision`.
pub fn make_tower(p: u64, e: u32, f: u32, precision: i64) -> Result<Tower> {
    if !is_small_prime(p) || p == 2 {
        return Err(Error::UnsupportedExtension(format!(
            "p = {p} must be an odd prime"
        )));
    }
    if e == 0 || f == 0 || precision < 1 {
        return Err(Error::UnsupportedExtension(
            "e, f and precision must be positive".into(),
        ));
    }
    let d = e as u64 * f as u64;
    if d % p == 0 {
        return Err(Error::UnsupportedExtension(format!(
            "p = {p} divides d = {d}"
        )));
    }
    if (p - 1) % e as u64 != 0 {
        return Err(Error::UnsupportedExtension(format!(
            "e = {e} does not divide p - 1 = {}",
            p - 1
        )));
    }
    if gcd(e as u64, f as u64) != 1 {
        return Err(Error::UnsupportedExtension(format!(
            "gcd(e, f) = {} is not 1",
            gcd(e as u64, f as u64)
        )));
    }

    let hc_small = least_irreducible(p, f as usize);
    let residue_field = ResidueField::new(p, hc_small.clone());
    let ctx = RawCtx {
        p: BigUint::from(p),
        f: f as usize,
        e: e as usize,
        hc: hc_small.iter().map(|&c| BigUint::from(c)).collect(),
    };

    let table_prec = (precision + TABLE_GUARD + e as i64 - 1) / e as i64;
    let table_modulus = BigUint::from(p).pow(table_prec as u32);

    // zeta_e: Teichmuller lift of the least positive residue of exact
    // multiplicative order e.
    let zeta = if e == 1 {
        BigUint::one()
    } else {
        let mut c0 = 0u64;
        for c in 2..p {
            if mult_order_mod_p(c, p) == e as u64 {
                c0 = c;
                break;
            }
        }
        teichmuller_zp(c0, p, table_prec as u32)
    };
    let mut zeta_pows = Vec::with_capacity(e as usize);
    let mut acc = BigUint::one();
    for _ in 0..e {
        zeta_pows.push(acc.clone());
        acc = (&acc * &zeta) % &table_modulus;
    }

    // Frobenius lift on the unramified part: the root of h congruent to
    // x^p mod p, by Newton iteration. Computed in the e = 1 sub-context.
    let uctx = RawCtx {
        p: BigUint::from(p),
        f: f as usize,
        e: 1,
        hc: ctx.hc.clone(),
    };
    let frob_x = if f == 1 {
        uctx.zero_raw() // unused: x = 0 in the trivial unramified part
    } else {
        frobenius_lift(&uctx, &residue_field, &table_modulus, table_prec)
    };
    let mut frob_pows = Vec::with_capacity(f as usize);
    let mut accp = uctx.one_raw();
    for _ in 0..f {
        // embed the unramified (length f) vector into the full grid
        let mut full = ctx.zero_raw();
        full[..f as usize].clone_from_slice(&accp);
        frob_pows.push(full);
        accp = uctx.mul(&accp, &frob_x, &table_modulus);
    }

    Ok(Tower(Arc::new(TowerInner {
        p,
        e,
        f,
        d: e * f,
        precision,
        ctx,
        residue_field,
        table_prec,
        table_modulus,
        frob_pows,
        zeta_pows,
        scalar: OnceLock::new(),
    })))
}

impl TowerInner {
    pub fn p_big(&self) -> &BigUint {
        &self.ctx.p
    }

    /// p^k as BigUint.
    pub fn p_pow(&self, k: i64) -> BigUint {
        assert!(k >= 0);
        self.ctx.p.pow(k as u32)
    }

    /// Residue field size q = p^f.
    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }
}

impl Tower {
    /// The scalar tower (e = f = 1) used for Q_p coordinates, with matching
    /// p-adic precision. A trivial tower is its own scalar tower.
    pub fn scalar(&self) -> Tower {
        if self.e == 1 && self.f == 1 {
            return self.clone();
        }
        self.0
            .scalar
            .get_or_init(|| {
                let n_p = (self.precision + self.e as i64 - 1) / self.e as i64 + 4;
                make_tower(self.p, 1, 1, n_p).expect("scalar tower parameters are valid")
            })
            .clone()
    }

    /// Fault-injection hook for selfcheck: returns a copy of the tower with
    /// zeta_e replaced by 1, which breaks theta^d = id detection when e > 1.
    pub fn with_corrupted_zeta(&self) -> Tower {
        let mut zeta_pows = self.zeta_pows.clone();
        for z in zeta_pows.iter_mut() {
            *z = BigUint::one();
        }
        Tower(Arc::new(TowerInner {
            p: self.p,
            e: self.e,
            f: self.f,
            d: self.d,
            precision: self.precision,
            ctx: self.ctx.clone(),
            residue_field: self.residue_field.clone(),
            table_prec: self.table_prec,
            table_modulus: self.table_modulus.clone(),
            frob_pows: self.frob_pows.clone(),
            zeta_pows,
            scalar: OnceLock::new(),
        }))
    }
}

fn mult_order_mod_p(c: u64, p: u64) -> u64 {
    let mut acc = c % p;
    let mut n = 1;
    while acc != 1 {
        acc = acc * c % p;
        n += 1;
    }
    n
}

/// Teichmuller lift in Z_p: the (p-1)-st root of unity congruent to c,
/// by the Frobenius fixed-point iteration t <- t^p.
pub fn teichmuller_zp(c: u64, p: u64, prec: u32) -> BigUint {
    let modulus = BigUint::from(p).pow(prec);
    let mut t = BigUint::from(c % p);
    for _ in 0..prec {
        t = t.modpow(&BigUint::from(p), &modulus);
    }
    t
}

/// Newton iteration for the root of h congruent to x^p mod p, inside the
/// unramified context (e = 1).
fn frobenius_lift(
    uctx: &RawCtx,
    field: &ResidueField,
    modulus: &BigUint,
    prec: i64,
) -> Raw {
    let _f = uctx.f;
    let x = {
        let mut v = uctx.zero_raw();
        v[1] = BigUint::one();
        v
    };
    let p64 = biguint_to_u64(&uctx.p);
    let mut t = uctx.pow(&x, p64, modulus);
    // h(t) and h'(t) as raw evaluations; iterate t <- t - h(t)/h'(t)
    let mut reached: i64 = 1;
    while reached < prec {
        let ht = eval_h(uctx, &t, modulus);
        let hpt = eval_h_prime(uctx, &t, modulus);
        let hpt_inv = uctx.inv_unit(&hpt, modulus, prec.max(2), field);
        let delta = uctx.mul(&ht, &hpt_inv, modulus);
        t = uctx.sub(&t, &delta, modulus);
        reached *= 2;
    }
    debug_assert!(eval_h(uctx, &t, modulus).iter().all(|c| c.is_zero()));
    t
}

fn eval_h(uctx: &RawCtx, t: &Raw, modulus: &BigUint) -> Raw {
    // h(t) = t^f + sum hc[k] t^k, Horner from the top
    let f = uctx.f;
    let mut acc = uctx.one_raw();
    for k in (0..f).rev() {
        acc = uctx.mul(&acc, t, modulus);
        let mut term = uctx.zero_raw();
        term[0] = uctx.hc[k].clone();
        acc = uctx.add(&acc, &term, modulus);
    }
    acc
}

fn eval_h_prime(uctx: &RawCtx, t: &Raw, modulus: &BigUint) -> Raw {
    // h'(t) = f t^{f-1} + sum_{k>=1} k hc[k] t^{k-1}
    let f = uctx.f;
    let mut acc = uctx.scalar_mul(&uctx.one_raw(), &BigUint::from(f as u64), modulus);
    for k in (1..f).rev() {
        acc = uctx.mul(&acc, t, modulus);
        let mut term = uctx.zero_raw();
        term[0] = (&uctx.hc[k] * BigUint::from(k as u64)) % modulus;
        acc = uctx.add(&acc, &term, modulus);
    }
    acc
}
