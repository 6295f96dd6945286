//! Elements of E at finite pi-adic precision.
//!
//! A nonzero value is stored as pi^val * unit with the unit an integral
//! element of O_E written on the basis x^i pi^j, together with an absolute
//! precision tag. Arithmetic never reports more precision than it can
//! certify; anything indistinguishable from zero is a distinct state.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::residue::FqElem;
use super::tower::{Raw, Tower};

#[derive(Debug, Clone)]
enum Repr {
    /// Exact zero: infinite valuation and precision.
    ExactZero,
    /// Indistinguishable from zero at absolute precision `prec`.
    ZeroAt { prec: i64 },
    /// pi^val * unit + O(pi^prec), with val < prec and `unit` a certified
    /// unit of O_E (nonzero residue), coefficients mod p^ceil((prec-val)/e).
    Unit { val: i64, prec: i64, unit: Raw },
}

/// An element of E at finite pi_E-adic precision.
#[derive(Debug, Clone)]
pub struct PadicElem {
    tower: Tower,
    repr: Repr,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    (a + b - 1).div_euclid(b)
}

impl PadicElem {
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn zero(tower: &Tower) -> Self {
        PadicElem {
            tower: tower.clone(),
            repr: Repr::ExactZero,
        }
    }

    pub fn zero_at(tower: &Tower, prec: i64) -> Self {
        PadicElem {
            tower: tower.clone(),
            repr: Repr::ZeroAt { prec },
        }
    }

    pub fn one(tower: &Tower) -> Self {
        Self::from_bigint(tower, &BigInt::one())
    }

    pub fn from_i64(tower: &Tower, n: i64) -> Self {
        Self::from_bigint(tower, &BigInt::from(n))
    }

    /// Integer embedded at the tower's working precision.
    pub fn from_bigint(tower: &Tower, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(tower);
        }
        let mut mag = n.magnitude().clone();
        let p = tower.p_big().clone();
        let mut vp: i64 = 0;
        while (&mag % &p).is_zero() {
            mag /= &p;
            vp += 1;
        }
        let val = vp * tower.e as i64;
        let prec = tower.precision;
        if val >= prec {
            return Self::zero_at(tower, prec);
        }
        let m = ceil_div(prec - val, tower.e as i64);
        let modulus = tower.p_pow(m);
        let mut c = mag % &modulus;
        if n.sign() == Sign::Minus && !c.is_zero() {
            c = &modulus - c;
        }
        let mut unit = tower.ctx.zero_raw();
        unit[0] = c;
        PadicElem {
            tower: tower.clone(),
            repr: Repr::Unit { val, prec, unit },
        }
    }

    /// a/b with arbitrary integers, b nonzero; p-powers in b lower the
    /// valuation.
    pub fn from_ratio(tower: &Tower, a: i64, b: i64) -> Result<Self> {
        let num = Self::from_i64(tower, a);
        let den = Self::from_i64(tower, b);
        let (_, inv) = den.valuation_invert()?;
        Ok(num.mul(&inv))
    }

    /// The uniformizer pi of E.
    pub fn uniformizer(tower: &Tower) -> Self {
        if tower.e == 1 {
            return Self::from_i64(tower, tower.p as i64);
        }
        let prec = tower.precision;
        let val = 1i64;
        if val >= prec {
            return Self::zero_at(tower, prec);
        }
        let mut unit = tower.ctx.zero_raw();
        unit[0] = BigUint::one();
        PadicElem {
            tower: tower.clone(),
            repr: Repr::Unit { val, prec, unit },
        }
    }

    /// The unramified generator w (the class of x). For f = 1 this is 1.
    pub fn unram_gen(tower: &Tower) -> Self {
        if tower.f == 1 {
            return Self::one(tower);
        }
        let prec = tower.precision;
        let mut unit = tower.ctx.zero_raw();
        unit[tower.ctx.idx(1, 0)] = BigUint::one();
        PadicElem {
            tower: tower.clone(),
            repr: Repr::Unit { val: 0, prec, unit },
        }
    }

    /// Build pi^val * unit directly from raw coefficients (used by samplers
    /// and parsers). The raw vector is normalized.
    pub fn from_raw_at(tower: &Tower, raw: Raw, val_shift: i64, prec: i64) -> Self {
        normalize(tower, raw, val_shift, prec)
    }

    /// Teichmuller representative of a nonzero residue-field element: the
    /// unique (q-1)-st root of unity congruent to it.
    pub fn teichmuller(tower: &Tower, c: &FqElem) -> Result<Self> {
        if tower.residue_field.is_zero(c) {
            return Err(Error::ZeroResidue);
        }
        let m = tower.table_prec;
        let modulus = tower.table_modulus.clone();
        let mut t = tower.ctx.zero_raw();
        for (i, &ci) in c.iter().enumerate() {
            t[tower.ctx.idx(i, 0)] = BigUint::from(ci);
        }
        let q = tower.q();
        for _ in 0..m {
            t = tower.ctx.pow(&t, q, &modulus);
        }
        let prec = tower.precision.min(m * tower.e as i64);
        Ok(normalize(tower, t, 0, prec))
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    /// True when the value cannot be distinguished from zero at its precision.
    pub fn is_zero_at_prec(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// Valuation, None for exact or apparent zeros.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { val, .. } => Some(*val),
            _ => None,
        }
    }

    /// Absolute precision; None for exact zero (infinite).
    pub fn precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::ExactZero => None,
            Repr::ZeroAt { prec } => Some(*prec),
            Repr::Unit { prec, .. } => Some(*prec),
        }
    }

    /// Valuation is certified >= k (true for zeros whose precision reaches k).
    pub fn valuation_at_least(&self, k: i64) -> Result<bool> {
        match &self.repr {
            Repr::ExactZero => Ok(true),
            Repr::ZeroAt { prec } => {
                if *prec >= k {
                    Ok(true)
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "cannot certify valuation >= {k} at precision {prec}"
                    )))
                }
            }
            Repr::Unit { val, prec, .. } => {
                if *val >= k {
                    if *prec >= k {
                        Ok(true)
                    } else {
                        Err(Error::PrecisionExhausted(format!(
                            "cannot certify valuation >= {k} at precision {prec}"
                        )))
                    }
                } else {
                    Ok(false)
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(self.tower == other.tower, "tower mismatch");
        let t = &self.tower;
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) => other.clone(),
            (_, Repr::ExactZero) => self.clone(),
            (Repr::ZeroAt { prec: pz }, Repr::ZeroAt { prec: qz }) => {
                Self::zero_at(t, (*pz).min(*qz))
            }
            (Repr::ZeroAt { prec: pz }, Repr::Unit { val, prec, unit })
            | (Repr::Unit { val, prec, unit }, Repr::ZeroAt { prec: pz }) => {
                let newp = (*pz).min(*prec);
                if *val >= newp {
                    Self::zero_at(t, newp)
                } else {
                    normalize(t, unit.clone(), *val, newp)
                }
            }
            (
                Repr::Unit {
                    val: v1,
                    prec: p1,
                    unit: u1,
                },
                Repr::Unit {
                    val: v2,
                    prec: p2,
                    unit: u2,
                },
            ) => {
                let v = (*v1).min(*v2);
                let prec = (*p1).min(*p2);
                if v >= prec {
                    return Self::zero_at(t, prec);
                }
                let m = ceil_div(prec - v, t.e as i64);
                let modulus = t.p_pow(m);
                let a = shift_up(t, u1, (*v1 - v) as usize, &modulus);
                let b = shift_up(t, u2, (*v2 - v) as usize, &modulus);
                let sum = t.ctx.add(&a, &b, &modulus);
                normalize(t, sum, v, prec)
            }
        }
    }

    pub fn neg(&self) -> Self {
        let t = &self.tower;
        match &self.repr {
            Repr::Unit { val, prec, unit } => {
                let m = ceil_div(*prec - *val, t.e as i64);
                let modulus = t.p_pow(m);
                PadicElem {
                    tower: t.clone(),
                    repr: Repr::Unit {
                        val: *val,
                        prec: *prec,
                        unit: t.ctx.neg(unit, &modulus),
                    },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(self.tower == other.tower, "tower mismatch");
        let t = &self.tower;
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => Self::zero(t),
            (Repr::ZeroAt { prec }, Repr::ZeroAt { prec: q }) => {
                // both O(pi^a), O(pi^b): product is O(pi^{a+b})
                Self::zero_at(t, prec + q)
            }
            (Repr::ZeroAt { prec: pz }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::ZeroAt { prec: pz }) => {
                Self::zero_at(t, pz + val)
            }
            (
                Repr::Unit {
                    val: v1,
                    prec: p1,
                    unit: u1,
                },
                Repr::Unit {
                    val: v2,
                    prec: p2,
                    unit: u2,
                },
            ) => {
                let val = v1 + v2;
                let prec = (p1 + v2).min(p2 + v1);
                let m = ceil_div(prec - val, t.e as i64);
                let modulus = t.p_pow(m);
                let prod = t.ctx.mul(u1, u2, &modulus);
                // unit * unit stays a unit; no renormalization needed
                PadicElem {
                    tower: t.clone(),
                    repr: Repr::Unit {
                        val,
                        prec,
                        unit: prod,
                    },
                }
            }
        }
    }

    /// (valuation, inverse). Errors if the element cannot be certified
    /// nonzero at its precision.
    pub fn valuation_invert(&self) -> Result<(i64, Self)> {
        let t = &self.tower;
        match &self.repr {
            Repr::ExactZero => Err(Error::PrecisionExhausted(
                "inverse of exact zero".into(),
            )),
            Repr::ZeroAt { prec } => Err(Error::PrecisionExhausted(format!(
                "inverse of a value indistinguishable from 0 at O(pi^{prec})"
            ))),
            Repr::Unit { val, prec, unit } => {
                let rel = prec - val;
                let m = ceil_div(rel, t.e as i64);
                let modulus = t.p_pow(m);
                let inv = t
                    .ctx
                    .inv_unit(unit, &modulus, rel, &t.residue_field);
                Ok((
                    *val,
                    PadicElem {
                        tower: t.clone(),
                        repr: Repr::Unit {
                            val: -val,
                            prec: -val + rel,
                            unit: inv,
                        },
                    },
                ))
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.valuation_invert()?.1)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Galois generator applied to the value. Valuation and precision are
    /// preserved (up to the tower's table precision).
    pub fn apply_theta(&self) -> Self {
        let t = &self.tower;
        match &self.repr {
            Repr::Unit { val, prec, unit } => {
                // theta(sum c_ij x^i pi^j) = sum c_ij frob(x)^i zeta^j pi^j
                let cap = val + t.e as i64 * t.table_prec;
                let prec = (*prec).min(cap);
                if *val >= prec {
                    return Self::zero_at(t, prec);
                }
                let m = ceil_div(prec - val, t.e as i64);
                let modulus = t.p_pow(m);
                let mut out = t.ctx.zero_raw();
                let (f, e) = (t.ctx.f, t.ctx.e);
                // theta(pi^val) = zeta^val pi^val scales the whole unit
                let zshift = &t.zeta_pows[val.rem_euclid(e as i64) as usize];
                for j in 0..e {
                    for i in 0..f {
                        let c = &unit[t.ctx.idx(i, j)];
                        if c.is_zero() {
                            continue;
                        }
                        let scale = (c * &t.zeta_pows[j]) % &modulus * zshift % &modulus;
                        // frob_pows[i] has support on row 0 only
                        for k in 0..f {
                            let fp = &t.frob_pows[i][k];
                            if fp.is_zero() {
                                continue;
                            }
                            let dst = t.ctx.idx(k, j);
                            out[dst] = (&out[dst] + fp * &scale) % &modulus;
                        }
                    }
                }
                // theta preserves valuations: result is a unit again
                PadicElem {
                    tower: t.clone(),
                    repr: Repr::Unit {
                        val: *val,
                        prec,
                        unit: out,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn apply_theta_k(&self, k: u32) -> Self {
        let mut acc = self.clone();
        for _ in 0..(k % self.tower.d) {
            acc = acc.apply_theta();
        }
        acc
    }

    /// (N_{E/F}(x), Tr_{E/F}(x)) = (prod theta^i x, sum theta^i x).
    pub fn norm_trace(&self) -> (Self, Self) {
        let d = self.tower.d;
        let mut n = self.clone();
        let mut tr = self.clone();
        let mut cur = self.clone();
        for _ in 1..d {
            cur = cur.apply_theta();
            n = n.mul(&cur);
            tr = tr.add(&cur);
        }
        (n, tr)
    }

    pub fn pow_u64(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.tower);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    pub fn pow_biguint(&self, n: &BigUint) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.tower);
        let bits = n.bits();
        for k in 0..bits {
            if n.bit(k) {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
        }
        acc
    }

    /// Truncate to a lower absolute precision (precision only shrinks).
    pub fn truncate_to(&self, new_prec: i64) -> Self {
        let t = &self.tower;
        match &self.repr {
            Repr::ExactZero => self.clone(),
            Repr::ZeroAt { prec } => Self::zero_at(t, (*prec).min(new_prec)),
            Repr::Unit { val, prec, unit } => {
                let prec = (*prec).min(new_prec);
                if *val >= prec {
                    return Self::zero_at(t, prec);
                }
                let m = ceil_div(prec - val, t.e as i64);
                let modulus = t.p_pow(m);
                let mut u = unit.clone();
                t.ctx.reduce(&mut u, &modulus);
                PadicElem {
                    tower: t.clone(),
                    repr: Repr::Unit {
                        val: *val,
                        prec,
                        unit: u,
                    },
                }
            }
        }
    }

    /// Canonical per-coefficient representation at the element's precision:
    /// (val, prec, coefficients with c_ij reduced mod p^max(0,ceil((prec-val-j)/e))).
    pub fn canonical(&self) -> (Option<i64>, Option<i64>, Vec<BigUint>) {
        let t = &self.tower;
        match &self.repr {
            Repr::ExactZero => (None, None, vec![]),
            Repr::ZeroAt { prec } => (None, Some(*prec), vec![]),
            Repr::Unit { val, prec, unit } => {
                let rel = prec - val;
                let (f, e) = (t.ctx.f, t.ctx.e);
                let mut out = Vec::with_capacity(f * e);
                for j in 0..e {
                    let mj = ceil_div((rel - j as i64).max(0), t.e as i64);
                    let modulus = t.p_pow(mj);
                    for i in 0..f {
                        let c = if mj == 0 {
                            BigUint::zero()
                        } else {
                            &unit[t.ctx.idx(i, j)] % &modulus
                        };
                        out.push(c);
                    }
                }
                (Some(*val), Some(*prec), out)
            }
        }
    }

    /// Equality of the justified digits at the minimum of the two precisions.
    pub fn eq_at_min_prec(&self, other: &Self) -> bool {
        let d = self.sub(other);
        d.is_zero_at_prec()
    }

    /// Residue in F_q for integral elements; None when the element has
    /// negative valuation or is integral-zero.
    pub fn residue(&self) -> Option<FqElem> {
        match &self.repr {
            Repr::ExactZero => Some(self.tower.residue_field.zero()),
            Repr::ZeroAt { prec } => {
                if *prec >= 1 {
                    Some(self.tower.residue_field.zero())
                } else {
                    None
                }
            }
            Repr::Unit { val, unit, .. } => {
                if *val < 0 {
                    None
                } else if *val > 0 {
                    Some(self.tower.residue_field.zero())
                } else {
                    Some(self.tower.ctx.residue(unit))
                }
            }
        }
    }

    /// Q_p coordinates on the basis x^i pi^j: f*e scalars on the scalar
    /// tower, each with its own justified precision.
    pub fn qp_coords(&self) -> Vec<PadicElem> {
        let t = &self.tower;
        let st = t.scalar();
        let (f, e) = (t.ctx.f, t.ctx.e);
        match &self.repr {
            Repr::ExactZero => vec![PadicElem::zero(&st); f * e],
            Repr::ZeroAt { prec } => (0..e)
                .flat_map(|j| {
                    let pj = ceil_div(prec - j as i64, t.e as i64);
                    std::iter::repeat(PadicElem::zero_at(&st, pj)).take(f)
                })
                .collect(),
            Repr::Unit { val, prec, unit } => {
                // write val = e*a + r with 0 <= r < e, shift the unit by r
                let ei = t.e as i64;
                let a = val.div_euclid(ei);
                let r = val.rem_euclid(ei) as usize;
                let m = ceil_div(prec - val, ei) + 1;
                let modulus = t.p_pow(m);
                let shifted = shift_up(t, unit, r, &modulus);
                let mut out = Vec::with_capacity(f * e);
                for j in 0..e {
                    // x known mod pi^prec => coefficient of x^i pi^j known
                    // mod p^ceil((prec - j)/e); subtract the p^a prefactor
                    let pj = ceil_div(prec - j as i64, ei) - a;
                    for i in 0..f {
                        let c = &shifted[t.ctx.idx(i, j)];
                        let sc = scalar_from_parts(&st, c, a, pj + a);
                        out.push(sc);
                    }
                }
                out
            }
        }
    }

    /// Embed a scalar (element of the scalar tower, i.e. of Q_p) into E.
    pub fn from_scalar(tower: &Tower, s: &PadicElem) -> Self {
        debug_assert!(s.tower.e == 1 && s.tower.f == 1);
        match &s.repr {
            Repr::ExactZero => Self::zero(tower),
            Repr::ZeroAt { prec } => Self::zero_at(tower, prec * tower.e as i64),
            Repr::Unit { val, prec, unit } => {
                let mut raw = tower.ctx.zero_raw();
                raw[0] = unit[0].clone();
                normalize(
                    tower,
                    raw,
                    val * tower.e as i64,
                    prec * tower.e as i64,
                )
            }
        }
    }

    /// Uniformly random integral element: coefficients uniform mod the
    /// working modulus.
    pub fn random_integral<R: rand::Rng>(tower: &Tower, rng: &mut R) -> Self {
        let m = ceil_div(tower.precision, tower.e as i64);
        let modulus = tower.p_pow(m);
        let raw: Raw = (0..tower.ctx.len())
            .map(|_| random_biguint_below(rng, &modulus))
            .collect();
        normalize(tower, raw, 0, tower.precision)
    }

    /// Uniformly random unit of O_E.
    pub fn random_unit<R: rand::Rng>(tower: &Tower, rng: &mut R) -> Self {
        loop {
            let x = Self::random_integral(tower, rng);
            if x.valuation() == Some(0) {
                return x;
            }
        }
    }
}

fn random_biguint_below<R: rand::Rng>(rng: &mut R, bound: &BigUint) -> BigUint {
    use num_bigint::RandBigInt;
    rng.gen_biguint_below(bound)
}

fn scalar_from_parts(st: &Tower, c: &BigUint, shift: i64, prec: i64) -> PadicElem {
    // value = p^shift * c, with absolute p-adic precision `prec`
    if c.is_zero() {
        return PadicElem::zero_at(st, prec);
    }
    let mut raw = st.ctx.zero_raw();
    raw[0] = c.clone();
    normalize(st, raw, shift, prec)
}

/// Multiply a raw integral vector by pi^k (k >= 0): rows shift up with
/// p-carries past row e-1.
fn shift_up(t: &Tower, unit: &Raw, k: usize, modulus: &BigUint) -> Raw {
    let (f, e) = (t.ctx.f, t.ctx.e);
    let mut cur = unit.clone();
    for c in cur.iter_mut() {
        *c %= modulus;
    }
    for _ in 0..k {
        let mut next = t.ctx.zero_raw();
        for j in 0..e {
            for i in 0..f {
                let c = &cur[t.ctx.idx(i, j)];
                if c.is_zero() {
                    continue;
                }
                if j + 1 < e {
                    next[t.ctx.idx(i, j + 1)] = c.clone();
                } else {
                    // pi^e = p
                    next[t.ctx.idx(i, 0)] = (c * t.p_big()) % modulus;
                }
            }
        }
        cur = next;
    }
    cur
}

/// Divide a raw vector by pi exactly: row 0 coefficients must be divisible
/// by p; they move to row e-1 divided by p, all other rows shift down.
fn shift_down_once(t: &Tower, raw: &Raw) -> Raw {
    let (f, e) = (t.ctx.f, t.ctx.e);
    let mut next = t.ctx.zero_raw();
    for j in 1..e {
        for i in 0..f {
            let c = &raw[t.ctx.idx(i, j)];
            if !c.is_zero() {
                next[t.ctx.idx(i, j - 1)] = c.clone();
            }
        }
    }
    let p = t.p_big();
    for i in 0..f {
        let c = &raw[t.ctx.idx(i, 0)];
        if !c.is_zero() {
            debug_assert!((c % p).is_zero(), "inexact division by pi");
            next[t.ctx.idx(i, e - 1)] = c / p;
        }
    }
    next
}

/// Normalize raw coefficients at shift pi^val_shift with absolute precision
/// prec: extract the true valuation, divide out, certify the unit.
pub(crate) fn normalize(t: &Tower, raw: Raw, val_shift: i64, prec: i64) -> PadicElem {
    if val_shift >= prec {
        return PadicElem::zero_at(t, prec);
    }
    let rel = prec - val_shift;
    let (f, e) = (t.ctx.f, t.ctx.e);
    // valuation of the raw part from justified digits
    let mut vmin: Option<i64> = None;
    for j in 0..e {
        let mj = ceil_div((rel - j as i64).max(0), t.e as i64);
        if mj == 0 {
            continue;
        }
        let modulus = t.p_pow(mj);
        for i in 0..f {
            let c = &raw[t.ctx.idx(i, j)] % &modulus;
            if c.is_zero() {
                continue;
            }
            let vp = p_valuation(&c, t.p_big());
            let v = t.e as i64 * vp + j as i64;
            vmin = Some(match vmin {
                None => v,
                Some(old) => old.min(v),
            });
        }
    }
    let v_unit = match vmin {
        None => return PadicElem::zero_at(t, prec),
        Some(v) => v,
    };
    if val_shift + v_unit >= prec {
        return PadicElem::zero_at(t, prec);
    }
    // divide out pi^v_unit
    let mut u = raw;
    // reduce first so division sees consistent digits
    let m_in = ceil_div(rel, t.e as i64);
    let mod_in = t.p_pow(m_in);
    t.ctx.reduce(&mut u, &mod_in);
    for _ in 0..v_unit {
        u = shift_down_once(t, &u);
    }
    let val = val_shift + v_unit;
    let m = ceil_div(prec - val, t.e as i64);
    let modulus = t.p_pow(m);
    t.ctx.reduce(&mut u, &modulus);
    debug_assert!(!t.ctx.residue(&u).iter().all(|&c| c == 0));
    PadicElem {
        tower: t.clone(),
        repr: Repr::Unit { val, prec, unit: u },
    }
}

pub(crate) fn p_valuation(c: &BigUint, p: &BigUint) -> i64 {
    debug_assert!(!c.is_zero());
    let mut v = 0;
    let mut c = c.clone();
    while (&c % p).is_zero() {
        c /= p;
        v += 1;
    }
    v
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

impl std::fmt::Display for PadicElem {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (val, prec, coeffs) = self.canonical();
        match (val, prec) {
            (None, None) => write!(fm, "0"),
            (None, Some(p)) => write!(fm, "O(pi^{p})"),
            (Some(v), Some(p)) => {
                let t = &self.tower;
                let (f, e) = (t.ctx.f, t.ctx.e);
                let mut terms = vec![];
                for j in 0..e {
                    for i in 0..f {
                        let c = &coeffs[j * f + i];
                        if c.is_zero() {
                            continue;
                        }
                        let mut s = c.to_string();
                        if i == 1 {
                            s.push_str(" x");
                        } else if i > 1 {
                            s.push_str(&format!(" x^{i}"));
                        }
                        if j == 1 {
                            s.push_str(" pi");
                        } else if j > 1 {
                            s.push_str(&format!(" pi^{j}"));
                        }
                        terms.push(s);
                    }
                }
                let body = if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join(" + ")
                };
                write!(fm, "pi^{v} * ({body}) + O(pi^{p})")
            }
            _ => unreachable!(),
        }
    }
}

impl PadicElem {
    /// Parse the Display form back into an element of the given tower.
    pub fn parse(tower: &Tower, s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero(tower));
        }
        if let Some(rest) = s.strip_prefix("O(pi^") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Unsupported(format!("bad element literal: {s}")))?;
            let prec: i64 = inner
                .parse()
                .map_err(|_| Error::Unsupported(format!("bad precision in: {s}")))?;
            return Ok(Self::zero_at(tower, prec));
        }
        let err = || Error::Unsupported(format!("bad element literal: {s}"));
        let (head, tail) = s.split_once('*').ok_or_else(err)?;
        let head = head.trim();
        let val: i64 = head.strip_prefix("pi^").ok_or_else(err)?.parse().map_err(|_| err())?;
        let tail = tail.trim();
        let (body, osuffix) = tail.rsplit_once('+').ok_or_else(err)?;
        let prec: i64 = osuffix
            .trim()
            .strip_prefix("O(pi^")
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(err)?
            .parse()
            .map_err(|_| err())?;
        let body = body.trim();
        let body = body
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(err)?;
        let mut raw = tower.ctx.zero_raw();
        for term in body.split('+') {
            let term = term.trim();
            if term == "0" || term.is_empty() {
                continue;
            }
            let mut c = BigUint::zero();
            let mut i = 0usize;
            let mut j = 0usize;
            for (kpart, part) in term.split_whitespace().enumerate() {
                if kpart == 0 {
                    c = part.parse().map_err(|_| err())?;
                } else if part == "x" {
                    i = 1;
                } else if let Some(ex) = part.strip_prefix("x^") {
                    i = ex.parse().map_err(|_| err())?;
                } else if part == "pi" {
                    j = 1;
                } else if let Some(ex) = part.strip_prefix("pi^") {
                    j = ex.parse().map_err(|_| err())?;
                } else {
                    return Err(err());
                }
            }
            if i >= tower.ctx.f || j >= tower.ctx.e {
                return Err(err());
            }
            raw[tower.ctx.idx(i, j)] = c;
        }
        Ok(normalize(tower, raw, val, prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::tower::make_tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn integer_embedding_and_valuations() {
        let t = make_tower(3, 2, 1, 8).unwrap();
        let pi = PadicElem::uniformizer(&t);
        assert_eq!(pi.valuation(), Some(1));
        let three = PadicElem::from_i64(&t, 3);
        assert_eq!(three.valuation(), Some(2)); // v_E(p) = e
        let x = PadicElem::from_i64(&t, 12); // 12 = 3 * 4
        assert_eq!(x.valuation(), Some(2));
    }

    #[test]
    fn pi_pow_e_is_p() {
        for (p, e, f) in [(3, 2, 1), (5, 2, 1), (7, 3, 1), (3, 1, 2)] {
            let t = make_tower(p, e, f, 10).unwrap();
            let pi = PadicElem::uniformizer(&t);
            let lhs = pi.pow_u64(e as u64);
            let rhs = PadicElem::from_i64(&t, p as i64);
            assert!(lhs.eq_at_min_prec(&rhs), "pi^e != p for ({p},{e},{f})");
        }
    }

    #[test]
    fn theta_on_uniformizer_is_zeta_pi() {
        // e = 2: theta(pi) = -pi
        let t = make_tower(3, 2, 1, 8).unwrap();
        let pi = PadicElem::uniformizer(&t);
        let theta_pi = pi.apply_theta();
        assert!(theta_pi.eq_at_min_prec(&pi.neg()));
    }

    #[test]
    fn theta_on_unram_generator_is_frobenius() {
        // f = 2, p = 3: theta(w) = w^3 (Teichmuller generator satisfies this
        // exactly; the class of x satisfies it mod the defining relation)
        let t = make_tower(3, 1, 2, 8).unwrap();
        let gen = t.residue_field.multiplicative_generator();
        let w = PadicElem::teichmuller(&t, &gen).unwrap();
        let lhs = w.apply_theta();
        let rhs = w.pow_u64(3);
        assert!(lhs.eq_at_min_prec(&rhs));
    }

    #[test]
    fn theta_d_is_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for (p, e, f) in [(3, 2, 1), (3, 1, 2), (5, 2, 1), (7, 3, 1), (7, 3, 2)] {
            let t = make_tower(p, e, f, 8).unwrap();
            for _ in 0..20 {
                let x = PadicElem::random_integral(&t, &mut rng);
                let y = x.apply_theta_k(t.d);
                assert!(x.eq_at_min_prec(&y), "theta^d != id on ({p},{e},{f})");
            }
        }
    }

    #[test]
    fn theta_is_ring_automorphism() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let t = make_tower(7, 3, 2, 8).unwrap();
        for _ in 0..20 {
            let x = PadicElem::random_integral(&t, &mut rng);
            let y = PadicElem::random_integral(&t, &mut rng);
            let lhs = x.add(&y).apply_theta();
            let rhs = x.apply_theta().add(&y.apply_theta());
            assert!(lhs.eq_at_min_prec(&rhs));
            let lhs = x.mul(&y).apply_theta();
            let rhs = x.apply_theta().mul(&y.apply_theta());
            assert!(lhs.eq_at_min_prec(&rhs));
        }
    }

    #[test]
    fn norm_examples() {
        // e = 2, p = 3: N(pi) = -3, N(1 + pi) = -2
        let t = make_tower(3, 2, 1, 8).unwrap();
        let pi = PadicElem::uniformizer(&t);
        let (n, _) = pi.norm_trace();
        assert!(n.eq_at_min_prec(&PadicElem::from_i64(&t, -3)));
        let one_plus = PadicElem::one(&t).add(&pi);
        let (n, _) = one_plus.norm_trace();
        assert!(n.eq_at_min_prec(&PadicElem::from_i64(&t, -2)));
    }

    #[test]
    fn norm_trace_of_base_field_element() {
        let t = make_tower(5, 2, 1, 8).unwrap();
        let a = PadicElem::from_i64(&t, 7);
        let (n, tr) = a.norm_trace();
        assert!(n.eq_at_min_prec(&PadicElem::from_i64(&t, 49)));
        assert!(tr.eq_at_min_prec(&PadicElem::from_i64(&t, 14)));
    }

    #[test]
    fn norm_is_theta_invariant_and_scales_valuation() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let t = make_tower(3, 2, 1, 10).unwrap();
        for _ in 0..20 {
            let x = PadicElem::random_unit(&t, &mut rng);
            let (n1, _) = x.norm_trace();
            let (n2, _) = x.apply_theta().norm_trace();
            assert!(n1.eq_at_min_prec(&n2));
            // N(x) is theta-fixed
            assert!(n1.eq_at_min_prec(&n1.apply_theta()));
        }
        let pi = PadicElem::uniformizer(&t);
        let x = pi.mul(&pi).mul(&PadicElem::from_i64(&t, 2));
        let (n, _) = x.norm_trace();
        // v_E(N(x)) = d * v_E(x)
        assert_eq!(n.valuation(), Some(t.d as i64 * 2));
    }

    #[test]
    fn inverse_roundtrip_and_errors() {
        let t = make_tower(3, 2, 1, 8).unwrap();
        let pi = PadicElem::uniformizer(&t);
        let x = PadicElem::one(&t).add(&pi);
        let (v, inv) = x.valuation_invert().unwrap();
        assert_eq!(v, 0);
        assert!(x.mul(&inv).eq_at_min_prec(&PadicElem::one(&t)));
        // v(pi) = 1, v(p) = e
        assert_eq!(pi.valuation(), Some(1));
        assert_eq!(PadicElem::from_i64(&t, 3).valuation(), Some(2));
        // zero at precision
        let z = PadicElem::zero_at(&t, 8);
        assert!(matches!(
            z.valuation_invert(),
            Err(Error::PrecisionExhausted(_))
        ));
        assert!(matches!(
            PadicElem::zero(&t).valuation_invert(),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn teichmuller_spec_examples() {
        // p=5, c=4 -> -1 exactly
        let t = make_tower(5, 1, 1, 8).unwrap();
        let c = t.residue_field.from_u64(4);
        let teich = PadicElem::teichmuller(&t, &c).unwrap();
        assert!(teich.eq_at_min_prec(&PadicElem::from_i64(&t, -1)));
        // p=5, c=2 -> 7 mod 25
        let c = t.residue_field.from_u64(2);
        let teich = PadicElem::teichmuller(&t, &c).unwrap();
        let seven = PadicElem::from_i64(&t, 7);
        assert!(teich.sub(&seven).valuation_at_least(2).unwrap());
        // ZeroResidue
        let c = t.residue_field.zero();
        assert!(matches!(
            PadicElem::teichmuller(&t, &c),
            Err(Error::ZeroResidue)
        ));
        // p=3, c=1 -> 1
        let t3 = make_tower(3, 1, 1, 8).unwrap();
        let c = t3.residue_field.from_u64(1);
        let teich = PadicElem::teichmuller(&t3, &c).unwrap();
        assert!(teich.eq_at_min_prec(&PadicElem::one(&t3)));
    }

    #[test]
    fn precision_soundness_truncation() {
        // recompute a pipeline at precision N+4 and truncate: bit-identical
        let n = 8;
        let run = |prec: i64| {
            let t = make_tower(3, 2, 1, prec).unwrap();
            let pi = PadicElem::uniformizer(&t);
            let a = PadicElem::from_i64(&t, 5).add(&pi.mul(&PadicElem::from_i64(&t, 7)));
            let b = a.inv().unwrap().mul(&a.apply_theta()).add(&pi.pow_u64(3));
            let (nm, tr) = b.norm_trace();
            nm.mul(&tr).sub(&b)
        };
        let lo = run(n);
        let hi = run(n + 4).truncate_to(lo.precision().unwrap());
        assert_eq!(format!("{lo}"), format!("{hi}"));
    }

    #[test]
    fn display_parse_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let t = make_tower(3, 2, 2, 8).unwrap();
        for _ in 0..20 {
            let x = PadicElem::random_integral(&t, &mut rng);
            let s = format!("{x}");
            let y = PadicElem::parse(&t, &s).unwrap();
            assert_eq!(s, format!("{y}"), "roundtrip failed for {s}");
        }
        let z = PadicElem::zero(&t);
        assert_eq!(format!("{z}"), "0");
        assert!(PadicElem::parse(&t, "0").unwrap().is_exact_zero());
    }

    #[test]
    fn qp_coords_roundtrip_through_linear_combination() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let t = make_tower(3, 2, 2, 8).unwrap();
        // basis x^i pi^j as elements
        let w = PadicElem::unram_gen(&t);
        let pi = PadicElem::uniformizer(&t);
        for _ in 0..10 {
            let x = PadicElem::random_integral(&t, &mut rng);
            let coords = x.qp_coords();
            let mut acc = PadicElem::zero(&t);
            for j in 0..t.ctx.e {
                for i in 0..t.ctx.f {
                    let basis = w.pow_u64(i as u64).mul(&pi.pow_u64(j as u64));
                    let c = PadicElem::from_scalar(&t, &coords[j * t.ctx.f + i]);
                    acc = acc.add(&c.mul(&basis));
                }
            }
            assert!(acc.eq_at_min_prec(&x), "coords failed for {x}");
        }
    }
}
