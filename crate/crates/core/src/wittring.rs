//! Truncated Witt vectors `W_n(F_q)` realized as `(Z/p^n)[x]/(f^)`, and the
//! twisted ring `W[Pi; sigma]/(Pi^N)` with `Pi^2 = p`, `Pi c = sigma(c) Pi`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffq::{FieldCtx, FieldElem};

/// Element of `W_prec(F_q)`: coefficients in `Z/p^prec` of a polynomial
/// modulo the lifted field modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WittScalar {
    pub prec: u32,
    pub c: Vec<u64>,
}

/// `c0 + c1 Pi` modulo `Pi^n`; `c0` has precision `ceil(n/2)`, `c1` has
/// precision `floor(n/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiCoeff {
    pub n: u32,
    pub c0: WittScalar,
    pub c1: WittScalar,
}

/// Element of `O_D / Pi^n`: a [`PiCoeff`] over the degree-2 context.
pub type ODScalar = PiCoeff;

#[derive(Debug)]
pub struct WittCtx {
    field: Arc<FieldCtx>,
    nmax: u32,
    pows: Vec<u64>,
    // sigma[e][t] = sigma^e(x^t) at precision nmax
    sigma: Vec<Vec<Vec<u64>>>,
}

#[inline]
fn half_up(n: u32) -> u32 {
    n.div_ceil(2)
}

impl WittCtx {
    /// Context for `W_nmax(F)`; requires `p^nmax < 2^63`.
    pub fn new(field: Arc<FieldCtx>, nmax: u32) -> Result<Arc<WittCtx>> {
        let p = field.p();
        let mut pows = vec![1u64];
        for _ in 0..nmax {
            let last = *pows.last().unwrap() as u128 * p as u128;
            if last >= 1u128 << 63 {
                return Err(Error::InvalidArgument(format!(
                    "precision {nmax} too large for p = {p}"
                )));
            }
            pows.push(last as u64);
        }
        let mut ctx = WittCtx {
            field,
            nmax,
            pows,
            sigma: vec![],
        };
        ctx.init_sigma();
        Ok(Arc::new(ctx))
    }

    fn init_sigma(&mut self) {
        let deg = self.field.deg();
        let n = self.nmax;
        let ident: Vec<Vec<u64>> = (0..deg)
            .map(|t| {
                let mut v = vec![0; deg];
                v[t] = 1;
                v
            })
            .collect();
        self.sigma = vec![ident];
        if n == 0 {
            return;
        }
        // Newton lift of the root congruent to x^p
        let xp = self.field.frobenius(&self.field.gen(), 1);
        let mut theta = self.lift_naive(&xp, n);
        let f = self.field.modulus().to_vec();
        for _ in 0..=n.ilog2() + 1 {
            let (fv, dfv) = self.eval_poly_and_derivative(&f, &theta);
            let inv = self.inv(&dfv).expect("separable modulus");
            theta = self.sub(&theta, &self.mul(&fv, &inv));
        }
        let mut powers = vec![self.one(n)];
        for t in 1..deg {
            let next = self.mul(&powers[t - 1], &theta);
            powers.push(next);
        }
        let m1: Vec<Vec<u64>> = powers.into_iter().map(|w| w.c).collect();
        for e in 1..deg {
            let prev = &self.sigma[e - 1];
            let next: Vec<Vec<u64>> = prev
                .iter()
                .map(|col| self.apply_matrix(&m1, col, n))
                .collect();
            self.sigma.push(next);
        }
    }

    fn eval_poly_and_derivative(&self, f: &[u64], x: &WittScalar) -> (WittScalar, WittScalar) {
        let n = x.prec;
        let mut v = self.zero(n);
        let mut d = self.zero(n);
        for &c in f.iter().rev() {
            d = self.add(&self.mul(&d, x), &v);
            v = self.add(&self.mul(&v, x), &self.from_int(c as i64, n));
        }
        (v, d)
    }

    fn apply_matrix(&self, cols: &[Vec<u64>], v: &[u64], prec: u32) -> Vec<u64> {
        let deg = v.len();
        let m64 = self.pows[prec as usize];
        if m64 < 1 << 31 {
            let mut acc = vec![0u64; deg];
            for (t, &c) in v.iter().enumerate() {
                let c = c % m64;
                if c == 0 {
                    continue;
                }
                for (i, &y) in cols[t].iter().enumerate() {
                    acc[i] = (acc[i] + c * (y % m64)) % m64;
                }
            }
            return acc;
        }
        let m = m64 as u128;
        let mut acc = vec![0u128; deg];
        for (t, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (i, &y) in cols[t].iter().enumerate() {
                acc[i] = (acc[i] + c as u128 * (y as u128 % m)) % m;
            }
        }
        acc.into_iter().map(|a| a as u64).collect()
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn deg(&self) -> usize {
        self.field.deg()
    }

    pub fn nmax(&self) -> u32 {
        self.nmax
    }

    /// Largest Pi-precision supported by this context.
    pub fn max_pi_precision(&self) -> u32 {
        2 * self.nmax
    }

    pub fn modulus_of(&self, prec: u32) -> u64 {
        self.pows[prec as usize]
    }

    fn check_prec(&self, prec: u32) {
        assert!(prec <= self.nmax, "precision {prec} exceeds context maximum {}", self.nmax);
    }

    // ---- WittScalar ----

    pub fn zero(&self, prec: u32) -> WittScalar {
        self.check_prec(prec);
        WittScalar {
            prec,
            c: vec![0; self.deg()],
        }
    }

    pub fn one(&self, prec: u32) -> WittScalar {
        self.from_int(1, prec)
    }

    pub fn from_int(&self, v: i64, prec: u32) -> WittScalar {
        self.check_prec(prec);
        let mut w = self.zero(prec);
        let m = self.pows[prec as usize] as i128;
        w.c[0] = (v as i128).rem_euclid(m) as u64;
        w
    }

    /// Coefficient-wise lift of a field element (not multiplicative).
    pub fn lift_naive(&self, a: &FieldElem, prec: u32) -> WittScalar {
        self.check_prec(prec);
        let m = self.pows[prec as usize];
        WittScalar {
            prec,
            c: a.0.iter().map(|&x| x % m.max(1)).collect(),
        }
    }

    pub fn is_zero(&self, a: &WittScalar) -> bool {
        a.c.iter().all(|&x| x == 0)
    }

    pub fn reduce(&self, a: &WittScalar, prec: u32) -> WittScalar {
        let prec = prec.min(a.prec);
        let m = self.pows[prec as usize];
        WittScalar {
            prec,
            c: a.c.iter().map(|&x| x % m).collect(),
        }
    }

    /// Residue mod p.
    pub fn residue(&self, a: &WittScalar) -> FieldElem {
        let p = self.p();
        if a.prec == 0 {
            return self.field.zero();
        }
        FieldElem(a.c.iter().map(|&x| x % p).collect())
    }

    pub fn add(&self, a: &WittScalar, b: &WittScalar) -> WittScalar {
        let prec = a.prec.min(b.prec);
        let m = self.pows[prec as usize];
        WittScalar {
            prec,
            c: a.c
                .iter()
                .zip(&b.c)
                .map(|(&x, &y)| ((x % m) as u128 + (y % m) as u128) as u64 % m)
                .collect(),
        }
    }

    pub fn neg(&self, a: &WittScalar) -> WittScalar {
        let m = self.pows[a.prec as usize];
        WittScalar {
            prec: a.prec,
            c: a.c.iter().map(|&x| (m - x % m) % m).collect(),
        }
    }

    pub fn sub(&self, a: &WittScalar, b: &WittScalar) -> WittScalar {
        self.add(a, &self.neg(b))
    }

    pub fn scale_int(&self, a: &WittScalar, v: i64) -> WittScalar {
        let m = self.pows[a.prec as usize] as i128;
        let v = (v as i128).rem_euclid(m) as u128;
        WittScalar {
            prec: a.prec,
            c: a.c
                .iter()
                .map(|&x| (x as u128 * v % m as u128) as u64)
                .collect(),
        }
    }

    pub fn mul(&self, a: &WittScalar, b: &WittScalar) -> WittScalar {
        let prec = a.prec.min(b.prec);
        let m = self.pows[prec as usize] as u128;
        let deg = self.deg();
        if m < 1 << 31 {
            return self.mul_small(a, b, prec);
        }
        let mut r = vec![0u128; 2 * deg - 1];
        if m < 1 << 40 {
            for (i, &x) in a.c.iter().enumerate() {
                let x = x as u128 % m;
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.c.iter().enumerate() {
                    r[i + j] += x * (y as u128 % m);
                }
            }
            for v in r.iter_mut() {
                *v %= m;
            }
        } else {
            for (i, &x) in a.c.iter().enumerate() {
                let x = x as u128 % m;
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.c.iter().enumerate() {
                    r[i + j] = (r[i + j] + x * (y as u128 % m)) % m;
                }
            }
        }
        let f = self.field.modulus();
        for top in (deg..2 * deg - 1).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            r[top] = 0;
            let neg = m - c;
            for t in 0..deg {
                if f[t] != 0 {
                    r[top - deg + t] = (r[top - deg + t] + neg * f[t] as u128) % m;
                }
            }
        }
        WittScalar {
            prec,
            c: r[..deg].iter().map(|&v| v as u64).collect(),
        }
    }

    // products below 2^62 fit in u64 arithmetic
    fn mul_small(&self, a: &WittScalar, b: &WittScalar, prec: u32) -> WittScalar {
        let m = self.pows[prec as usize];
        let deg = self.deg();
        let mut r = vec![0u64; 2 * deg - 1];
        for (i, &x) in a.c.iter().enumerate() {
            let x = x % m;
            if x == 0 {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate() {
                r[i + j] = (r[i + j] + x * (y % m)) % m;
            }
        }
        let f = self.field.modulus();
        for top in (deg..2 * deg - 1).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            r[top] = 0;
            let neg = m - c;
            for t in 0..deg {
                if f[t] != 0 {
                    r[top - deg + t] = (r[top - deg + t] + neg * f[t]) % m;
                }
            }
        }
        r.truncate(deg);
        WittScalar { prec, c: r }
    }

    pub fn pow(&self, a: &WittScalar, mut e: u128) -> WittScalar {
        let mut result = self.one(a.prec);
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

    /// Inverse of a unit; `None` if the residue is zero.
    pub fn inv(&self, a: &WittScalar) -> Option<WittScalar> {
        let r = self.residue(a);
        let r_inv = self.field.inv(&r)?;
        let mut y = self.lift_naive(&r_inv, a.prec);
        let two = self.from_int(2, a.prec);
        // y <- y (2 - a y), doubling correct digits
        let mut good = 1u32;
        while good < a.prec {
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
            good *= 2;
        }
        Some(y)
    }

    /// Witt vector Frobenius `sigma^e`, any integer `e`.
    pub fn frobenius(&self, a: &WittScalar, e: i64) -> WittScalar {
        let e = e.rem_euclid(self.deg() as i64) as usize;
        if e == 0 {
            return a.clone();
        }
        WittScalar {
            prec: a.prec,
            c: self.apply_matrix(&self.sigma[e], &a.c, a.prec),
        }
    }

    /// Multiplicative lift `[a]`.
    pub fn teichmuller(&self, a: &FieldElem, prec: u32) -> WittScalar {
        let mut w = self.lift_naive(a, prec);
        if prec <= 1 || self.field.is_zero(a) {
            return w;
        }
        let q = self.field.order();
        for _ in 1..prec {
            w = self.pow(&w, q);
        }
        w
    }

    /// Exact division by `p`; the precision drops by one.
    pub fn div_p(&self, a: &WittScalar) -> Result<WittScalar> {
        let p = self.p();
        if a.prec == 0 {
            return Ok(a.clone());
        }
        if a.c.iter().any(|&x| x % p != 0) {
            return Err(Error::PiDivision);
        }
        Ok(WittScalar {
            prec: a.prec - 1,
            c: a.c.iter().map(|&x| x / p).collect(),
        })
    }

    /// Multiply by `p^e`, raising the precision by `e` (the new low digits
    /// are exact zeros), capped at `cap`.
    pub fn mul_p_pow(&self, a: &WittScalar, e: u32, cap: u32) -> WittScalar {
        let prec = (a.prec + e).min(cap).min(self.nmax);
        let m = self.pows[prec as usize] as u128;
        let f = self.pows[e.min(self.nmax) as usize] as u128;
        if e > self.nmax {
            return self.zero(prec);
        }
        WittScalar {
            prec,
            c: a.c.iter().map(|&x| (x as u128 * f % m) as u64).collect(),
        }
    }

    /// p-adic valuation, `None` when zero at the tracked precision.
    pub fn valuation(&self, a: &WittScalar) -> Option<u32> {
        let p = self.p();
        let mut v = 0;
        let mut c = a.c.clone();
        while v < a.prec {
            if c.iter().any(|&x| x % p != 0) {
                return Some(v);
            }
            for x in c.iter_mut() {
                *x /= p;
            }
            v += 1;
        }
        None
    }

    // ---- PiCoeff ----

    pub fn pc_zero(&self, n: u32) -> PiCoeff {
        PiCoeff {
            n,
            c0: self.zero(half_up(n)),
            c1: self.zero(n / 2),
        }
    }

    pub fn pc_from_scalar(&self, a: &WittScalar, n: u32) -> PiCoeff {
        PiCoeff {
            n,
            c0: self.with_prec_checked(a, half_up(n)),
            c1: self.zero(n / 2),
        }
    }

    fn with_prec_checked(&self, a: &WittScalar, prec: u32) -> WittScalar {
        assert!(a.prec >= prec, "scalar precision {} below required {prec}", a.prec);
        self.reduce(a, prec)
    }

    pub fn pc_int(&self, v: i64, n: u32) -> PiCoeff {
        PiCoeff {
            n,
            c0: self.from_int(v, half_up(n)),
            c1: self.zero(n / 2),
        }
    }

    /// `Pi` itself.
    pub fn pc_pi(&self, n: u32) -> PiCoeff {
        PiCoeff {
            n,
            c0: self.zero(half_up(n)),
            c1: self.from_int(1, n / 2),
        }
    }

    pub fn pc_teichmuller(&self, a: &FieldElem, n: u32) -> PiCoeff {
        let t = self.teichmuller(a, half_up(n));
        self.pc_from_scalar(&t, n)
    }

    pub fn pc_is_zero(&self, x: &PiCoeff) -> bool {
        self.is_zero(&x.c0) && self.is_zero(&x.c1)
    }

    pub fn pc_reduce(&self, x: &PiCoeff, n: u32) -> PiCoeff {
        let n = n.min(x.n);
        PiCoeff {
            n,
            c0: self.reduce(&x.c0, half_up(n)),
            c1: self.reduce(&x.c1, n / 2),
        }
    }

    pub fn pc_add(&self, a: &PiCoeff, b: &PiCoeff) -> PiCoeff {
        let n = a.n.min(b.n);
        PiCoeff {
            n,
            c0: self.reduce(&self.add(&a.c0, &b.c0), half_up(n)),
            c1: self.reduce(&self.add(&a.c1, &b.c1), n / 2),
        }
    }

    pub fn pc_neg(&self, a: &PiCoeff) -> PiCoeff {
        PiCoeff {
            n: a.n,
            c0: self.neg(&a.c0),
            c1: self.neg(&a.c1),
        }
    }

    pub fn pc_sub(&self, a: &PiCoeff, b: &PiCoeff) -> PiCoeff {
        self.pc_add(a, &self.pc_neg(b))
    }

    /// Twisted product: `(a0 + a1 Pi)(b0 + b1 Pi)
    /// = (a0 b0 + p a1 sigma(b1)) + (a0 b1 + a1 sigma(b0)) Pi`.
    pub fn pc_mul(&self, a: &PiCoeff, b: &PiCoeff) -> PiCoeff {
        let n = a.n.min(b.n);
        let h0 = half_up(n);
        let h1 = n / 2;
        let a1sb1 = self.mul(&a.c1, &self.frobenius(&b.c1, 1));
        let c0 = self.add(
            &self.reduce(&self.mul(&a.c0, &b.c0), h0),
            &self.mul_p_pow(&a1sb1, 1, h0),
        );
        let c1 = self.add(
            &self.mul(&a.c0, &b.c1),
            &self.mul(&a.c1, &self.frobenius(&b.c0, 1)),
        );
        PiCoeff {
            n,
            c0: self.reduce(&c0, h0),
            c1: self.reduce(&c1, h1),
        }
    }

    /// Left multiplication by a scalar `w` of sufficient precision.
    pub fn pc_scale(&self, w: &WittScalar, x: &PiCoeff) -> PiCoeff {
        PiCoeff {
            n: x.n,
            c0: self.mul(w, &x.c0),
            c1: self.reduce(&self.mul(w, &x.c1), x.n / 2),
        }
    }

    /// `Pi x = p sigma(c1) + sigma(c0) Pi`.
    pub fn pc_pi_left(&self, x: &PiCoeff) -> PiCoeff {
        let n = x.n;
        PiCoeff {
            n,
            c0: self.mul_p_pow(&self.frobenius(&x.c1, 1), 1, half_up(n)),
            c1: self.reduce(&self.frobenius(&x.c0, 1), n / 2),
        }
    }

    /// `x Pi = p c1 + c0 Pi`.
    pub fn pc_pi_right(&self, x: &PiCoeff) -> PiCoeff {
        let n = x.n;
        PiCoeff {
            n,
            c0: self.mul_p_pow(&x.c1, 1, half_up(n)),
            c1: self.reduce(&x.c0, n / 2),
        }
    }

    /// Componentwise `sigma^e`; fixes `Pi`.
    pub fn pc_frobenius(&self, x: &PiCoeff, e: i64) -> PiCoeff {
        PiCoeff {
            n: x.n,
            c0: self.frobenius(&x.c0, e),
            c1: self.frobenius(&x.c1, e),
        }
    }

    pub fn pc_mul_p(&self, x: &PiCoeff) -> PiCoeff {
        PiCoeff {
            n: x.n,
            c0: self.mul_p_pow(&x.c0, 1, half_up(x.n)),
            c1: self.mul_p_pow(&x.c1, 1, x.n / 2),
        }
    }

    /// Solve `x = Pi y`; the result has precision `n - 1`.
    pub fn pc_div_pi_left(&self, x: &PiCoeff) -> Result<PiCoeff> {
        if x.n == 0 {
            return Ok(x.clone());
        }
        let c0p = self.div_p(&x.c0)?;
        let n = x.n - 1;
        Ok(PiCoeff {
            n,
            c0: self.reduce(&self.frobenius(&x.c1, -1), half_up(n)),
            c1: self.reduce(&self.frobenius(&c0p, -1), n / 2),
        })
    }

    /// Pi-adic valuation, `None` if zero at tracked precision.
    pub fn pc_valuation(&self, x: &PiCoeff) -> Option<u32> {
        let v0 = self.valuation(&x.c0).map(|v| 2 * v);
        let v1 = self.valuation(&x.c1).map(|v| 2 * v + 1);
        match (v0, v1) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Digits `a_l` with `x = sum [a_l] Pi^l`.
    pub fn pi_digits(&self, x: &PiCoeff) -> Vec<FieldElem> {
        let mut out = Vec::with_capacity(x.n as usize);
        let mut cur = x.clone();
        for l in 0..x.n {
            let d = self.residue(&cur.c0);
            out.push(self.field.frobenius(&d, l as i64));
            if l + 1 == x.n {
                break;
            }
            let t = self.pc_teichmuller(&d, cur.n);
            let rest = self.pc_sub(&cur, &t);
            cur = self
                .pc_div_pi_left(&rest)
                .expect("digit removal leaves a multiple of Pi");
        }
        out
    }

    pub fn from_pi_digits(&self, digits: &[FieldElem], n: u32) -> PiCoeff {
        let h0 = half_up(n);
        let h1 = n / 2;
        let mut c0 = self.zero(h0);
        let mut c1 = self.zero(h1);
        for (l, a) in digits.iter().enumerate().take(n as usize) {
            let l = l as u32;
            if l % 2 == 0 {
                let t = self.teichmuller(a, h0 - l / 2);
                c0 = self.add(&c0, &self.mul_p_pow(&t, l / 2, h0));
            } else {
                let t = self.teichmuller(a, h1 - (l - 1) / 2);
                c1 = self.add(&c1, &self.mul_p_pow(&t, (l - 1) / 2, h1));
            }
        }
        PiCoeff { n, c0, c1 }
    }
}

/// Ring embedding `W(F_{p^2}) -> W(F_q)`, extended to the twisted rings.
#[derive(Debug, Clone)]
pub struct OdEmbedding {
    pub small: Arc<WittCtx>,
    pub big: Arc<WittCtx>,
    // images of y^t, y the generator of the small context
    images: Vec<WittScalar>,
    field_images: Vec<FieldElem>,
}

impl OdEmbedding {
    pub fn new(small: Arc<WittCtx>, big: Arc<WittCtx>) -> Result<OdEmbedding> {
        if small.deg() != 2 || small.p() != big.p() {
            return Err(Error::InvalidArgument(
                "embedding source must be W(F_p^2) over the same prime".into(),
            ));
        }
        let bf = big.field().clone();
        let f2 = small.field().modulus().to_vec();
        let poly: Vec<FieldElem> = f2.iter().map(|&c| bf.from_int(c as i64)).collect();
        let roots = bf.roots_in_subfield(&poly, 2)?;
        let root = roots
            .into_iter()
            .min()
            .ok_or_else(|| Error::Internal("no root of the quadratic modulus".into()))?;
        let n = big.nmax().min(small.nmax());
        let mut rho = big.lift_naive(&root, n);
        for _ in 0..=n.max(1).ilog2() + 1 {
            let (fv, dfv) = big.eval_poly_and_derivative(&f2, &rho);
            let inv = big.inv(&dfv).expect("separable");
            rho = big.sub(&rho, &big.mul(&fv, &inv));
        }
        let images = vec![big.one(n), rho];
        let field_images = vec![bf.one(), root];
        Ok(OdEmbedding {
            small,
            big,
            images,
            field_images,
        })
    }

    pub fn embed_scalar(&self, a: &WittScalar) -> WittScalar {
        let b = &self.big;
        let mut acc = b.zero(a.prec);
        for (t, &c) in a.c.iter().enumerate() {
            let img = b.reduce(&self.images[t], a.prec);
            acc = b.add(&acc, &b.scale_int(&img, c as i64));
        }
        acc
    }

    pub fn embed_field(&self, a: &FieldElem) -> FieldElem {
        let bf = self.big.field();
        let mut acc = bf.zero();
        for (t, &c) in a.0.iter().enumerate() {
            acc = bf.add(&acc, &bf.scale(&self.field_images[t], c));
        }
        acc
    }

    pub fn embed(&self, x: &ODScalar) -> PiCoeff {
        PiCoeff {
            n: x.n,
            c0: self.embed_scalar(&x.c0),
            c1: self.embed_scalar(&x.c1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u64, k: usize, n: u32) -> Arc<WittCtx> {
        WittCtx::new(FieldCtx::new(p, k).unwrap(), n).unwrap()
    }

    #[test]
    fn teichmuller_over_f4_is_fixed_point() {
        let w = ctx(2, 1, 3);
        let f = w.field().clone();
        let omega = f.gen();
        let t = w.teichmuller(&omega, 3);
        // independent oracle: exhaust x in W_3(F_4) with x = omega mod 2, x^4 = x
        let mut found = vec![];
        for a in 0..8u64 {
            for b in 0..8u64 {
                let x = WittScalar { prec: 3, c: vec![a, b] };
                if a % 2 == 0 && b % 2 == 1 && w.pow(&x, 4) == x {
                    found.push(x);
                }
            }
        }
        assert_eq!(found, vec![t.clone()]);
        // x^2 + x + 1 lifts to a cyclotomic relation, so x itself is the lift
        assert_eq!(t, WittScalar { prec: 3, c: vec![0, 1] });
    }

    #[test]
    fn frobenius_lifts_field_frobenius() {
        let w = ctx(3, 2, 4);
        let f = w.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = f.random(&mut rng);
            let t = w.teichmuller(&a, 4);
            assert_eq!(w.frobenius(&t, 1), w.teichmuller(&f.frobenius(&a, 1), 4));
            assert_eq!(w.frobenius(&w.frobenius(&t, 1), 3), t);
        }
        let p1 = w.from_int(3, 4);
        assert_eq!(w.frobenius(&p1, 1), p1);
    }

    #[test]
    fn digits_of_simple_elements() {
        let w = ctx(2, 2, 3);
        let f = w.field().clone();
        let a = f.gen();
        let n = 6;
        let d = w.pi_digits(&w.pc_teichmuller(&a, n));
        assert_eq!(d[0], a);
        assert!(d[1..].iter().all(|x| f.is_zero(x)));
        let d = w.pi_digits(&w.pc_int(2, n));
        assert_eq!(d[2], f.one());
        assert!(f.is_zero(&d[0]) && f.is_zero(&d[1]) && f.is_zero(&d[3]));
        // Pi [a] = [a^p] Pi
        let x = w.pc_mul(&w.pc_pi(n), &w.pc_teichmuller(&a, n));
        let d = w.pi_digits(&x);
        assert!(f.is_zero(&d[0]));
        assert_eq!(d[1], f.pow(&a, 2));
        assert_eq!(x, w.pc_pi_left(&w.pc_teichmuller(&a, n)));
    }

    #[test]
    fn embedding_respects_products() {
        let small = ctx(3, 1, 3);
        let big = ctx(3, 3, 3);
        let emb = OdEmbedding::new(small.clone(), big.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 5;
        for _ in 0..20 {
            let xd: Vec<_> = (0..n).map(|_| small.field().random(&mut rng)).collect();
            let yd: Vec<_> = (0..n).map(|_| small.field().random(&mut rng)).collect();
            let x = small.from_pi_digits(&xd, n);
            let y = small.from_pi_digits(&yd, n);
            let lhs = emb.embed(&small.pc_mul(&x, &y));
            let rhs = big.pc_mul(&emb.embed(&x), &emb.embed(&y));
            assert_eq!(lhs, rhs);
        }
        assert_eq!(emb.embed(&small.pc_pi(n)), big.pc_pi(n));
        assert_eq!(emb.embed(&small.pc_int(1, n)), big.pc_int(1, n));
    }
}
