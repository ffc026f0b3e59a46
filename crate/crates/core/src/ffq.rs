//! Finite fields `F_{p^{2k}}` in a polynomial basis, with the arithmetic
//! Frobenius `sigma: x -> x^p`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `F_{p^deg}`, stored as little-endian coefficients of its
/// polynomial representative. Arithmetic goes through [`FieldCtx`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(pub Vec<u64>);

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

/// Serialized form of a field context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub deg: usize,
    pub modulus: Vec<u64>,
}

/// The field `F_p[x]/(f)` for a monic irreducible `f` of even degree.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    p: u64,
    deg: usize,
    modulus: Vec<u64>,
    // frob[e][t] = sigma^e(x^t), for 0 <= e < deg
    frob: Vec<Vec<FieldElem>>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- polynomial helpers over F_p (little-endian, trimmed) ----

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut r = vec![0; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        r[i] = (x + p - y) % p;
    }
    trim(&mut r);
    r
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x as u128 * y as u128) % p as u128;
        }
    }
    let mut r: Vec<u64> = r.into_iter().map(|v| v as u64).collect();
    trim(&mut r);
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime, a != 0
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128 % m as u128;
    let mut bb = b as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % m as u128;
        }
        bb = bb * bb % m as u128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// Returns (quotient, remainder).
fn poly_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (r[r.len() - 1] as u128 * lead_inv as u128 % p as u128) as u64;
        q[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (c as u128 * bi as u128 % p as u128) as u64;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    poly_divrem(&poly_mul(a, b, p), f, p).1
}

fn poly_powmod_p(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    // a^p mod f
    let mut result = vec![1u64];
    let mut base = a.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &base, f, p);
        }
        base = poly_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    result
}

/// Rabin's test: `f` (monic, degree n) is irreducible iff `f | x^{p^n} - x`
/// and `gcd(x^{p^d} - x, f) = 1` for every proper divisor `d` of `n`.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    let mut xp = poly_divrem(&x, f, p).1; // x^{p^0}
    for d in 1..=n {
        xp = poly_powmod_p(&xp, f, p);
        let diff = poly_sub(&xp, &x, p);
        if d < n && n % d == 0 {
            let g = poly_gcd(f, &diff, p);
            if g.len() > 1 {
                return false;
            }
        }
        if d == n {
            let r = poly_divrem(&diff, f, p).1;
            return r.is_empty();
        }
    }
    unreachable!()
}

/// Least monic irreducible polynomial of degree `n` over `F_p`, where
/// candidates `x^n + sum c_i x^i` are ordered by the integer `sum c_i p^i`.
pub fn least_irreducible(p: u64, n: usize) -> Vec<u64> {
    let mut c = vec![0u64; n];
    loop {
        let mut f = c.clone();
        f.push(1);
        if c[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
        // increment base-p counter, c[0] least significant
        let mut i = 0;
        loop {
            c[i] += 1;
            if c[i] < p {
                break;
            }
            c[i] = 0;
            i += 1;
            assert!(i < n, "no irreducible polynomial found");
        }
    }
}

impl FieldCtx {
    /// The field `F_{p^{2k}}` with the least irreducible modulus.
    pub fn new(p: u64, k: usize) -> Result<Arc<FieldCtx>> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Self::with_degree(p, 2 * k)
    }

    pub fn with_degree(p: u64, deg: usize) -> Result<Arc<FieldCtx>> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if deg < 2 || deg % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "extension degree {deg} must be even and at least 2"
            )));
        }
        if (p as u128).pow(2) >= (1u128 << 62) {
            return Err(Error::InvalidArgument(format!("prime {p} too large")));
        }
        let modulus = least_irreducible(p, deg);
        Ok(Arc::new(Self::build(p, deg, modulus)))
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Arc<FieldCtx>> {
        if !is_prime(spec.p) {
            return Err(Error::InvalidArgument(format!("{} is not prime", spec.p)));
        }
        if spec.deg < 2 || spec.deg % 2 != 0 || spec.modulus.len() != spec.deg + 1 {
            return Err(Error::InvalidArgument("malformed field spec".into()));
        }
        if spec.modulus[spec.deg] != 1 || spec.modulus.iter().any(|&c| c >= spec.p) {
            return Err(Error::InvalidArgument("modulus must be monic and reduced".into()));
        }
        if !is_irreducible(&spec.modulus, spec.p) {
            return Err(Error::InvalidArgument("modulus is reducible".into()));
        }
        Ok(Arc::new(Self::build(spec.p, spec.deg, spec.modulus.clone())))
    }

    fn build(p: u64, deg: usize, modulus: Vec<u64>) -> FieldCtx {
        let mut ctx = FieldCtx {
            p,
            deg,
            modulus,
            frob: vec![],
        };
        // sigma(x^t) = (x^p)^t
        let mut x = vec![0u64; deg];
        x[1 % deg] = 1;
        let xp = ctx.pow(&FieldElem(x), p as u128);
        let mut images = Vec::with_capacity(deg);
        let mut cur = ctx.one();
        for _ in 0..deg {
            images.push(cur.clone());
            cur = ctx.mul(&cur, &xp);
        }
        let mut frob = vec![ctx.basis_images_identity()];
        for e in 1..deg {
            let prev: &Vec<FieldElem> = &frob[e - 1];
            let next: Vec<FieldElem> = prev.iter().map(|y| ctx.apply_linear(&images, y)).collect();
            frob.push(next);
        }
        ctx.frob = frob;
        ctx
    }

    fn basis_images_identity(&self) -> Vec<FieldElem> {
        (0..self.deg).map(|t| self.monomial(t)).collect()
    }

    // Evaluate the F_p-linear map sending x^t to images[t].
    fn apply_linear(&self, images: &[FieldElem], y: &FieldElem) -> FieldElem {
        let p = self.p as u128;
        let mut acc = vec![0u128; self.deg];
        for (t, &c) in y.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (i, &v) in images[t].0.iter().enumerate() {
                acc[i] = (acc[i] + c as u128 * v as u128) % p;
            }
        }
        FieldElem(acc.into_iter().map(|v| v as u64).collect())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Extension degree `2k` over `F_p`.
    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn k(&self) -> usize {
        self.deg / 2
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            deg: self.deg,
            modulus: self.modulus.clone(),
        }
    }

    /// Number of elements, if it fits in a u128.
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.deg as u32)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(vec![0; self.deg])
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> FieldElem {
        let mut c = vec![0; self.deg];
        c[0] = v.rem_euclid(self.p as i64) as u64;
        FieldElem(c)
    }

    /// `x^t` for `t < deg`.
    pub fn monomial(&self, t: usize) -> FieldElem {
        let mut c = vec![0; self.deg];
        c[t] = 1;
        FieldElem(c)
    }

    /// The class of `x`, a root of the modulus.
    pub fn gen(&self) -> FieldElem {
        let mut c = vec![0; self.deg];
        c[1] = 1;
        FieldElem(c)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() > self.deg {
            return Err(Error::InvalidArgument("too many coefficients".into()));
        }
        let mut c = vec![0; self.deg];
        for (i, &v) in coeffs.iter().enumerate() {
            c[i] = v % self.p;
        }
        Ok(FieldElem(c))
    }

    pub fn is_valid(&self, x: &FieldElem) -> bool {
        x.0.len() == self.deg && x.0.iter().all(|&c| c < self.p)
    }

    pub fn is_zero(&self, x: &FieldElem) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem((0..self.deg).map(|_| rng.gen_range(0..self.p)).collect())
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| {
                    let s = x + y;
                    if s >= self.p {
                        s - self.p
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| if x >= y { x - y } else { x + self.p - y })
                .collect(),
        )
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem(a.0.iter().map(|&x| if x == 0 { 0 } else { self.p - x }).collect())
    }

    pub fn scale(&self, a: &FieldElem, c: u64) -> FieldElem {
        let c = c % self.p;
        FieldElem(
            a.0.iter()
                .map(|&x| (x as u128 * c as u128 % self.p as u128) as u64)
                .collect(),
        )
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let n = self.deg;
        let p = self.p as u128;
        let mut r = vec![0u128; 2 * n - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                r[i + j] += x as u128 * y as u128;
            }
            if i % 8 == 7 {
                for v in r.iter_mut() {
                    *v %= p;
                }
            }
        }
        for v in r.iter_mut() {
            *v %= p;
        }
        // reduce by the monic modulus from the top
        for top in (n..2 * n - 1).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            r[top] = 0;
            for t in 0..n {
                let m = self.modulus[t] as u128;
                if m != 0 {
                    r[top - n + t] = (r[top - n + t] + (p - c) * m) % p;
                }
            }
        }
        FieldElem(r[..n].iter().map(|&v| v as u64).collect())
    }

    pub fn square(&self, a: &FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &FieldElem, mut e: u128) -> FieldElem {
        let mut result = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        if self.is_zero(a) {
            return None;
        }
        // extended Euclid on (a, f)
        let p = self.p;
        let mut r0 = self.modulus.clone();
        let mut r1 = a.0.clone();
        trim(&mut r1);
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1, p);
            let s = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is a nonzero constant
        let c = inv_mod(r0[0], p);
        let mut out = vec![0u64; self.deg];
        let s0 = poly_divrem(&s0, &self.modulus, p).1;
        for (i, &v) in s0.iter().enumerate() {
            out[i] = (v as u128 * c as u128 % p as u128) as u64;
        }
        Some(FieldElem(out))
    }

    /// `sigma^e(x) = x^{p^e}`; negative `e` is taken modulo the degree.
    pub fn frobenius(&self, x: &FieldElem, e: i64) -> FieldElem {
        let e = e.rem_euclid(self.deg as i64) as usize;
        if e == 0 {
            return x.clone();
        }
        self.apply_linear(&self.frob[e], x)
    }

    /// Whether `x` lies in `F_{p^d}`; `d` must divide the degree.
    pub fn in_subfield(&self, x: &FieldElem, d: usize) -> Result<bool> {
        if d == 0 || self.deg % d != 0 {
            return Err(Error::InvalidArgument(format!(
                "{d} does not divide the extension degree {}",
                self.deg
            )));
        }
        Ok(&self.frobenius(x, d as i64) == x)
    }

    /// `F_p`-basis of the subfield `F_{p^d}`, as the kernel of `sigma^d - 1`.
    pub fn subfield_basis(&self, d: usize) -> Result<Vec<FieldElem>> {
        if d == 0 || self.deg % d != 0 {
            return Err(Error::InvalidArgument(format!(
                "{d} does not divide the extension degree {}",
                self.deg
            )));
        }
        let cols: Vec<Vec<u64>> = (0..self.deg)
            .map(|t| {
                let m = self.monomial(t);
                self.sub(&self.frobenius(&m, d as i64), &m).0
            })
            .collect();
        let ker = crate::linalg::kernel_of_columns(&cols, self.deg, self.p);
        Ok(ker.into_iter().map(FieldElem).collect())
    }

    /// All elements of `F_{p^d}` in a deterministic order.
    pub fn subfield_elements(&self, d: usize) -> Result<Vec<FieldElem>> {
        let basis = self.subfield_basis(d)?;
        let mut out = vec![self.zero()];
        for b in &basis {
            let mut next = Vec::with_capacity(out.len() * self.p as usize);
            for c in 0..self.p {
                let cb = self.scale(b, c);
                for x in &out {
                    next.push(self.add(x, &cb));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Trace to `F_p` is not needed elsewhere; the `F_p`-coordinates of an
    /// element are its coefficients in the power basis.
    pub fn coords(&self, x: &FieldElem) -> Vec<u64> {
        x.0.clone()
    }

    /// Roots of `poly` (little-endian, coefficients in this field) lying in
    /// `F_{p^d}`, by enumeration of the subfield.
    pub fn roots_in_subfield(&self, poly: &[FieldElem], d: usize) -> Result<Vec<FieldElem>> {
        let mut out = vec![];
        for x in self.subfield_elements(d)? {
            let mut acc = self.zero();
            for c in poly.iter().rev() {
                acc = self.add(&self.mul(&acc, &x), c);
            }
            if self.is_zero(&acc) {
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Determinant over the field by Gaussian elimination.
    pub fn det(&self, m: &[Vec<FieldElem>]) -> FieldElem {
        let n = m.len();
        let mut a: Vec<Vec<FieldElem>> = m.to_vec();
        let mut det = self.one();
        for col in 0..n {
            let piv = (col..n).find(|&r| !self.is_zero(&a[r][col]));
            let Some(piv) = piv else {
                return self.zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = self.neg(&det);
            }
            let inv = self.inv(&a[col][col]).expect("nonzero pivot");
            det = self.mul(&det, &a[col][col]);
            for r in col + 1..n {
                if self.is_zero(&a[r][col]) {
                    continue;
                }
                let f = self.mul(&a[r][col], &inv);
                for c in col..n {
                    let t = self.mul(&f, &a[col][c]);
                    a[r][c] = self.sub(&a[r][c], &t);
                }
            }
        }
        det
    }

    /// Rank of a matrix over the field.
    pub fn rank(&self, m: &[Vec<FieldElem>]) -> usize {
        if m.is_empty() {
            return 0;
        }
        let rows = m.len();
        let cols = m[0].len();
        let mut a: Vec<Vec<FieldElem>> = m.to_vec();
        let mut rank = 0;
        for col in 0..cols {
            let piv = (rank..rows).find(|&r| !self.is_zero(&a[r][col]));
            let Some(piv) = piv else { continue };
            a.swap(piv, rank);
            let inv = self.inv(&a[rank][col]).expect("nonzero pivot");
            for r in 0..rows {
                if r == rank || self.is_zero(&a[r][col]) {
                    continue;
                }
                let f = self.mul(&a[r][col], &inv);
                for c in col..cols {
                    let t = self.mul(&f, &a[rank][c]);
                    a[r][c] = self.sub(&a[r][c], &t);
                }
            }
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn least_moduli_are_the_classical_ones() {
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(2, 4), vec![1, 1, 0, 0, 1]);
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
    }

    #[test]
    fn reducible_polynomials_are_rejected() {
        // (x^2+x+1)^2 = x^4+x^2+1 over F_2
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
        // x^5+x^4+1 = (x^2+x+1)(x^3+x+1) over F_2; passes the gcd test for d = 1 only
        assert!(!is_irreducible(&[1, 0, 0, 0, 1, 1], 2));
        assert!(is_irreducible(&[1, 0, 1, 0, 0, 1], 2));
    }

    #[test]
    fn frobenius_of_generator_has_order_deg() {
        let f = FieldCtx::new(2, 2).unwrap();
        let t = f.gen();
        // exponentiation oracle: t^16
        assert_eq!(f.pow(&t, 16), t);
        assert_eq!(f.frobenius(&t, 4), t);
        assert_ne!(f.pow(&t, 4), t);
        assert!(!f.in_subfield(&t, 2).unwrap());
        assert!(f.in_subfield(&f.one(), 2).unwrap());
        assert!(f.in_subfield(&t, 4).unwrap());
        assert!(f.in_subfield(&t, 3).is_err());
    }

    #[test]
    fn inverse_and_negative_frobenius() {
        let f = FieldCtx::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = f.random(&mut rng);
            if let Some(xi) = f.inv(&x) {
                assert_eq!(f.mul(&x, &xi), f.one());
            } else {
                assert!(f.is_zero(&x));
            }
            let y = f.frobenius(&x, -1);
            assert_eq!(f.frobenius(&y, 1), x);
            assert_eq!(f.frobenius(&x, 1), f.pow(&x, 3));
        }
    }

    #[test]
    fn subfield_f_p2_has_p2_elements() {
        let f = FieldCtx::new(3, 2).unwrap();
        let els = f.subfield_elements(2).unwrap();
        assert_eq!(els.len(), 9);
        for e in &els {
            assert!(f.in_subfield(e, 2).unwrap());
        }
    }
}
