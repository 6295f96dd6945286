//! Small finite-field arithmetic for residue computations.
//!
//! The residue field of the tower is F_q with q = p^f, realized as
//! F_p[x]/(h) for the deterministic defining polynomial h. Everything here
//! is u64-sized; residue fields in this crate never exceed a few hundred
//! elements.

/// Finite field F_{p^f} = F_p[x]/(h mod p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    pub p: u64,
    pub f: usize,
    /// Non-leading coefficients of the monic defining polynomial, low to
    /// high: h(x) = x^f + hc[f-1] x^{f-1} + ... + hc[0].
    pub hc: Vec<u64>,
}

/// Element of a `ResidueField`, coefficients low to high, length f, mod p.
pub type FqElem = Vec<u64>;

impl ResidueField {
    pub fn new(p: u64, hc: Vec<u64>) -> Self {
        let f = hc.len();
        ResidueField { p, f, hc }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    pub fn zero(&self) -> FqElem {
        vec![0; self.f]
    }

    pub fn one(&self) -> FqElem {
        let mut v = vec![0; self.f];
        v[0] = 1;
        v
    }

    pub fn from_u64(&self, c: u64) -> FqElem {
        let mut v = vec![0; self.f];
        v[0] = c % self.p;
        v
    }

    /// Element with index `i` under the base-p encoding of coefficients.
    pub fn from_index(&self, mut i: u64) -> FqElem {
        let mut v = vec![0; self.f];
        for c in v.iter_mut() {
            *c = i % self.p;
            i /= self.p;
        }
        v
    }

    pub fn to_index(&self, a: &FqElem) -> u64 {
        let mut i = 0u64;
        for &c in a.iter().rev() {
            i = i * self.p + c;
        }
        i
    }

    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + self.p - y) % self.p)
            .collect()
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        // Schoolbook product then reduction by x^f = -hc.
        let mut prod = vec![0u64; 2 * self.f];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % self.p;
            }
        }
        for k in (self.f..2 * self.f).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (t, &h) in self.hc.iter().enumerate() {
                let idx = k - self.f + t;
                prod[idx] = (prod[idx] + c * (self.p - h)) % self.p;
            }
        }
        prod.truncate(self.f);
        prod
    }

    pub fn pow(&self, a: &FqElem, mut n: u64) -> FqElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.q() - 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: &FqElem) -> u64 {
        let mut acc = a.clone();
        let mut n = 1;
        while !self.is_one(&acc) {
            acc = self.mul(&acc, a);
            n += 1;
        }
        n
    }

    pub fn is_one(&self, a: &FqElem) -> bool {
        a[0] == 1 && a[1..].iter().all(|&c| c == 0)
    }

    /// A generator of the cyclic group F_q^*, found by scanning indices in
    /// increasing order.
    pub fn multiplicative_generator(&self) -> FqElem {
        let q = self.q();
        for i in 1..q {
            let a = self.from_index(i);
            if self.order(&a) == q - 1 {
                return a;
            }
        }
        unreachable!("F_q^* is cyclic");
    }
}

/// The lexicographically least monic irreducible polynomial of degree f over
/// F_p, returned as its non-leading coefficients (low to high). Coefficient
/// tuples are ordered by (c_{f-1}, ..., c_1, c_0) ascending.
pub fn least_irreducible(p: u64, f: usize) -> Vec<u64> {
    if f == 1 {
        // x + 0 = x is not irreducible as a defining polynomial for a field
        // extension in the usual sense (it has the root 0), but degree-1
        // towers use h(x) = x so that the generator is 0 and the unramified
        // part is trivial. We instead pick x - 1... no: for f = 1 the
        // unramified part is Q_p itself; use h(x) = x (generator 0 never
        // used in arithmetic since all coefficients sit in index 0).
        return vec![0];
    }
    let total = p.pow(f as u32);
    for idx in 0..total {
        // idx encodes (c_{f-1}, ..., c_0) with c_{f-1} most significant.
        let mut coeffs = vec![0u64; f];
        let mut rem = idx;
        for k in 0..f {
            // k = 0 is c_{f-1}
            let pos = f - 1 - k;
            let digit = rem / p.pow((f - 1 - k) as u32);
            rem %= p.pow((f - 1 - k) as u32);
            coeffs[pos] = digit;
        }
        if is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p");
}

/// Irreducibility of the monic polynomial x^f + c_{f-1}x^{f-1} + ... + c_0
/// over F_p, by the standard criterion: x^{p^f} = x mod h and
/// gcd(x^{p^{f/l}} - x, h) = 1 for each prime l | f.
fn is_irreducible(p: u64, hc: &[u64]) -> bool {
    let f = hc.len();
    let field = ResidueField::new(p, hc.to_vec());
    // x as an element of F_p[x]/(h)
    let x = {
        let mut v = vec![0u64; f];
        if f == 1 {
            // h = x + c0: the quotient ring is F_p with x = -c0
            v[0] = (p - hc[0]) % p;
        } else {
            v[1] = 1;
        }
        v
    };
    // x^{p^f} must equal x
    let mut acc = x.clone();
    for _ in 0..f {
        acc = field.pow(&acc, p);
    }
    if acc != x {
        return false;
    }
    if f == 1 {
        return true;
    }
    // for each prime l | f: x^{p^{f/l}} - x must be a unit (h irreducible
    // has no roots in subfields); since the quotient may not be a field,
    // test gcd via polynomial arithmetic instead.
    let mut m = f;
    let mut primes = vec![];
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for l in primes {
        let mut acc = x.clone();
        for _ in 0..(f / l) {
            acc = field.pow(&acc, p);
        }
        let diff = field.sub(&acc, &x);
        if !poly_gcd_is_one(p, hc, &diff) {
            return false;
        }
    }
    true
}

/// gcd(h, g) = 1 in F_p[x], where h is monic of degree f given by its
/// non-leading coefficients and g is given by its coefficient vector.
fn poly_gcd_is_one(p: u64, hc: &[u64], g: &[u64]) -> bool {
    let mut a: Vec<u64> = hc.to_vec();
    a.push(1);
    let mut b: Vec<u64> = g.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(p, &a, &b);
        a = b;
        b = r;
    }
    a.len() == 1
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = (r[dr] * lead_inv) % p;
        if c != 0 {
            for k in 0..=db {
                let idx = dr - db + k;
                r[idx] = (r[idx] + p - (c * b[k]) % p) % p;
            }
        }
        r.pop();
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is a small prime
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_irreducible_matches_hand_computation() {
        // Over F_3: x^2 + 1 is the least irreducible quadratic.
        assert_eq!(least_irreducible(3, 2), vec![1, 0]);
        // Over F_5: x^2 + 1 factors (2^2 = 4 = -1), so x^2 + 2 is least.
        assert_eq!(least_irreducible(5, 2), vec![2, 0]);
        // Over F_7: -1 is not a square, so x^2 + 1 is least.
        assert_eq!(least_irreducible(7, 2), vec![1, 0]);
    }

    #[test]
    fn field_arithmetic_f9() {
        let fq = ResidueField::new(3, least_irreducible(3, 2));
        assert_eq!(fq.q(), 9);
        let g = fq.multiplicative_generator();
        assert_eq!(fq.order(&g), 8);
        // inverses
        for i in 1..9 {
            let a = fq.from_index(i);
            let inv = fq.inv(&a).unwrap();
            assert!(fq.is_one(&fq.mul(&a, &inv)));
        }
    }

    #[test]
    fn cubic_over_f7() {
        let hc = least_irreducible(7, 3);
        let fq = ResidueField::new(7, hc);
        assert_eq!(fq.q(), 343);
        let g = fq.multiplicative_generator();
        assert_eq!(fq.order(&g), 342);
    }
}
