//! The tau-stable lattice `Lambda_0` with basis `X_1..X_g`, the operators
//! `F`, `V`, `tau`, the alternating pairing, and Dieudonne sublattices
//! stored as subgroups of `Lambda_0 / Pi^N Lambda_0`.
//!
//! A coordinate `c0 + c1 Pi` at index `i` stands for `c0 X_i + c1 Y_i`
//! with `Y_i = F X_i = Pi X_i`. With `X_i = Pi^{c_i} e_i` the pairing on the
//! basis is
//!
//! `<X_i, Pi^j X_{g+1-i}> = (-1)^{c_i} p^{(j-g)/2}` when `j - g` is even,
//!
//! and zero otherwise.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffq::{FieldCtx, FieldElem};
use crate::filtered::{Echelon, Layout};
use crate::wittring::{PiCoeff, WittCtx, WittScalar};

/// Exponents `c_i` with `X_i = Pi^{c_i} e_i`.
pub fn basis_exponents(g: usize) -> Vec<i32> {
    let gi = g as i32;
    (1..=gi)
        .map(|i| {
            if g % 2 == 0 {
                if i <= gi / 2 {
                    0
                } else {
                    -gi + 1
                }
            } else {
                let m = (gi + 1) / 2;
                match i.cmp(&m) {
                    std::cmp::Ordering::Less => 0,
                    std::cmp::Ordering::Equal => -(gi - 1) / 2,
                    std::cmp::Ordering::Greater => -gi + 1,
                }
            }
        })
        .collect()
}

/// One entry of the basis pairing table: `sign * p^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingEntry {
    pub sign: i8,
    pub exponent: i32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisPairingTable {
    pub g: usize,
    pub jmax: usize,
    /// `entries[i-1][j]` is `<X_i, Pi^j X_{g+1-i}>`.
    pub entries: Vec<Vec<Option<PairingEntry>>>,
}

impl BasisPairingTable {
    pub fn get(&self, i: usize, j: usize) -> Option<PairingEntry> {
        self.entries[i - 1][j]
    }
}

/// Values of `<X_i, Pi^j X_{g+1-i}>` for `0 <= j <= jmax`.
pub fn pairing_table(g: usize, jmax: usize) -> Result<BasisPairingTable> {
    if g < 2 {
        return Err(Error::InvalidArgument("g must be at least 2".into()));
    }
    let c = basis_exponents(g);
    let entries = (0..g)
        .map(|i| {
            let k = g - 1 - i;
            (0..=jmax)
                .map(|j| {
                    let t = c[i] + c[k] + j as i32;
                    if t.rem_euclid(2) == 1 {
                        Some(PairingEntry {
                            sign: if c[i].rem_euclid(2) == 0 { 1 } else { -1 },
                            exponent: (t - 1) / 2,
                        })
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    Ok(BasisPairingTable { g, jmax, entries })
}

/// An element of `Lambda_0 / Pi^N Lambda_0` in the basis `X_1..X_g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeVector {
    pub coords: Vec<PiCoeff>,
}

impl LatticeVector {
    pub fn precision(&self) -> u32 {
        self.coords.iter().map(|c| c.n).min().unwrap_or(0)
    }
}

/// A value `p^{-shift} q` of the pairing, with `q` known modulo
/// `p^{q.prec}`; the value itself is known modulo `p^{q.prec - shift}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PValued {
    pub shift: u32,
    pub q: WittScalar,
}

impl PValued {
    /// The value is known modulo `p^known_to()`.
    pub fn known_to(&self) -> i32 {
        self.q.prec as i32 - self.shift as i32
    }
}

/// The model of `Lambda_0` at Pi-precision `N`.
#[derive(Debug)]
pub struct Lambda0 {
    g: usize,
    n: u32,
    w: Arc<WittCtx>,
    c: Vec<i32>,
    layout: Arc<Layout>,
    teich_basis: Vec<WittScalar>,
}

impl Lambda0 {
    pub fn new(g: usize, field: Arc<FieldCtx>, n: u32) -> Result<Arc<Lambda0>> {
        if g < 2 {
            return Err(Error::InvalidArgument("g must be at least 2".into()));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("precision must be at least 2".into()));
        }
        let w = WittCtx::new(field, n.div_ceil(2) + 1)?;
        Self::with_witt(g, w, n)
    }

    pub fn with_witt(g: usize, w: Arc<WittCtx>, n: u32) -> Result<Arc<Lambda0>> {
        if n.div_ceil(2) > w.nmax() {
            return Err(Error::InvalidArgument("Witt context too small for precision".into()));
        }
        let deg = w.deg();
        let p = w.p();
        let h0 = n.div_ceil(2);
        let h1 = n / 2;
        let mut nexp = vec![];
        let mut base = vec![];
        for _ in 0..g {
            for (part, h) in [(0u32, h0), (1u32, h1)] {
                for _ in 0..deg {
                    nexp.push(h);
                    base.push(part);
                }
            }
        }
        let layout = Arc::new(Layout::new(p, nexp, base));
        let field = w.field().clone();
        let teich_basis = (0..deg)
            .map(|t| w.teichmuller(&field.monomial(t), h0))
            .collect();
        Ok(Arc::new(Lambda0 {
            g,
            n,
            c: basis_exponents(g),
            w,
            layout,
            teich_basis,
        }))
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn witt(&self) -> &Arc<WittCtx> {
        &self.w
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        self.w.field()
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn exponents(&self) -> &[i32] {
        &self.c
    }

    pub fn deg(&self) -> usize {
        self.w.deg()
    }

    /// Shift used to clear denominators of pairings: `floor(g/2)`.
    pub fn pairing_shift(&self) -> u32 {
        (self.g / 2) as u32
    }

    // ---- vectors ----

    pub fn zero(&self) -> LatticeVector {
        LatticeVector {
            coords: (0..self.g).map(|_| self.w.pc_zero(self.n)).collect(),
        }
    }

    pub fn basis_x(&self, i: usize) -> LatticeVector {
        let mut v = self.zero();
        v.coords[i - 1] = self.w.pc_int(1, self.n);
        v
    }

    pub fn basis_y(&self, i: usize) -> LatticeVector {
        let mut v = self.zero();
        v.coords[i - 1] = self.w.pc_pi(self.n);
        v
    }

    /// `sum_i sum_l [digits[i][l]] Pi^l X_i`.
    pub fn from_digits(&self, digits: &[Vec<FieldElem>]) -> Result<LatticeVector> {
        if digits.len() != self.g {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinate digit strings",
                self.g
            )));
        }
        Ok(LatticeVector {
            coords: digits
                .iter()
                .map(|d| self.w.from_pi_digits(d, self.n))
                .collect(),
        })
    }

    pub fn digits(&self, v: &LatticeVector) -> Vec<Vec<FieldElem>> {
        v.coords.iter().map(|c| self.w.pi_digits(c)).collect()
    }

    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> LatticeVector {
        let f = self.field();
        let digits: Vec<Vec<FieldElem>> = (0..self.g)
            .map(|_| (0..self.n).map(|_| f.random(rng)).collect())
            .collect();
        self.from_digits(&digits).expect("shape")
    }

    fn map(&self, v: &LatticeVector, f: impl Fn(&PiCoeff) -> PiCoeff) -> LatticeVector {
        LatticeVector {
            coords: v.coords.iter().map(f).collect(),
        }
    }

    pub fn add(&self, a: &LatticeVector, b: &LatticeVector) -> LatticeVector {
        LatticeVector {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| self.w.pc_add(x, y))
                .collect(),
        }
    }

    pub fn sub(&self, a: &LatticeVector, b: &LatticeVector) -> LatticeVector {
        LatticeVector {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| self.w.pc_sub(x, y))
                .collect(),
        }
    }

    pub fn neg(&self, a: &LatticeVector) -> LatticeVector {
        self.map(a, |x| self.w.pc_neg(x))
    }

    /// Left multiplication by a Witt scalar.
    pub fn scale(&self, c: &WittScalar, v: &LatticeVector) -> LatticeVector {
        self.map(v, |x| self.w.pc_scale(c, x))
    }

    pub fn scale_teichmuller(&self, a: &FieldElem, v: &LatticeVector) -> LatticeVector {
        let t = self.w.teichmuller(a, self.n.div_ceil(2));
        self.scale(&t, v)
    }

    pub fn mul_p(&self, v: &LatticeVector) -> LatticeVector {
        self.map(v, |x| self.w.pc_mul_p(x))
    }

    /// The linear operator `Pi` (`e -> f`, `f -> p e`).
    pub fn apply_pi(&self, v: &LatticeVector) -> LatticeVector {
        self.map(v, |x| self.w.pc_pi_right(x))
    }

    pub fn apply_f(&self, v: &LatticeVector) -> LatticeVector {
        self.map(v, |x| self.w.pc_pi_left(x))
    }

    pub fn apply_v(&self, v: &LatticeVector) -> LatticeVector {
        self.map(v, |x| {
            let y = self.w.pc_frobenius(x, -1);
            self.w.pc_pi_right(&y)
        })
    }

    pub fn apply_tau(&self, v: &LatticeVector) -> LatticeVector {
        self.map(v, |x| self.w.pc_frobenius(x, 2))
    }

    pub fn apply_f_pow(&self, v: &LatticeVector, j: u32) -> LatticeVector {
        let mut out = v.clone();
        for _ in 0..j {
            out = self.apply_f(&out);
        }
        out
    }

    // ---- pairing ----

    /// `<x, y>` as `p^{-floor(g/2)} q`.
    pub fn pair(&self, x: &LatticeVector, y: &LatticeVector) -> PValued {
        let w = &self.w;
        let g = self.g;
        let n = x.precision().min(y.precision());
        let s = self.pairing_shift() as i32;
        let e = (n as i32 - g as i32).div_euclid(2) + (n as i32 - g as i32).rem_euclid(2);
        let prec = (s + e).max(0) as u32;
        let mut q = w.zero(prec);
        for i in 0..g {
            let k = g - 1 - i;
            let si = if self.c[i].rem_euclid(2) == 0 { 1 } else { -1 };
            for a in 0..2 {
                for b in 0..2 {
                    let t = a + b - g as i32;
                    if t.rem_euclid(2) != 0 {
                        continue;
                    }
                    let expo = s + t / 2;
                    debug_assert!(expo >= 0);
                    let ca = if a == 0 { &x.coords[i].c0 } else { &x.coords[i].c1 };
                    let db = if b == 0 { &y.coords[k].c0 } else { &y.coords[k].c1 };
                    let prod = w.mul(&w.reduce(ca, prec), &w.reduce(db, prec));
                    let term = w.mul_p_pow(&prod, expo as u32, prec);
                    let sign = si * if a == 0 { 1 } else { -1 };
                    q = if sign == 1 {
                        w.add(&q, &term)
                    } else {
                        w.sub(&q, &term)
                    };
                }
            }
        }
        let q = w.reduce(&q, prec);
        PValued {
            shift: s as u32,
            q,
        }
    }

    /// Teichmuller digits of a pairing value at positions
    /// `-shift .. known_to()`; entry `m` is the digit of `p^{m - shift}`.
    pub fn pvalue_digits(&self, v: &PValued) -> Vec<FieldElem> {
        let w = &self.w;
        let mut cur = v.q.clone();
        let mut out = vec![];
        while cur.prec > 0 {
            let d = w.residue(&cur);
            out.push(d.clone());
            let t = w.teichmuller(&d, cur.prec);
            cur = w.div_p(&w.sub(&cur, &t)).expect("digit removed");
        }
        out
    }

    /// Digit of `p^pos` in the Teichmuller expansion of the value.
    pub fn pvalue_digit(&self, v: &PValued, pos: i32) -> Result<FieldElem> {
        if pos >= v.known_to() {
            return Err(Error::Precision(format!(
                "digit {pos} requested, value known below {}",
                v.known_to()
            )));
        }
        let idx = pos + v.shift as i32;
        if idx < 0 {
            return Ok(self.field().zero());
        }
        Ok(self.pvalue_digits(v)[idx as usize].clone())
    }

    /// p-adic valuation of the value, `None` if zero to known precision.
    pub fn pvalue_valuation(&self, v: &PValued) -> Option<i32> {
        self.w
            .valuation(&v.q)
            .map(|e| e as i32 - v.shift as i32)
    }

    /// Whether two values agree to their common known precision.
    pub fn pvalue_agrees(&self, a: &PValued, b: &PValued) -> bool {
        let w = &self.w;
        let shift = a.shift.max(b.shift);
        let lift = |v: &PValued| w.mul_p_pow(&v.q, shift - v.shift, w.nmax());
        let (x, y) = (lift(a), lift(b));
        w.is_zero(&w.sub(&x, &y))
    }

    pub fn pvalue_scale(&self, v: &PValued, c: &WittScalar) -> PValued {
        PValued {
            shift: v.shift,
            q: self.w.mul(&v.q, c),
        }
    }

    pub fn pvalue_frobenius(&self, v: &PValued, e: i64) -> PValued {
        PValued {
            shift: v.shift,
            q: self.w.frobenius(&v.q, e),
        }
    }

    pub fn pvalue_neg(&self, v: &PValued) -> PValued {
        PValued {
            shift: v.shift,
            q: self.w.neg(&v.q),
        }
    }

    /// Multiply by `p`: one more known digit.
    pub fn pvalue_mul_p(&self, v: &PValued) -> PValued {
        PValued {
            shift: v.shift,
            q: self.w.mul_p_pow(&v.q, 1, self.w.nmax()),
        }
    }

    // ---- flat coordinates ----

    pub fn to_flat(&self, v: &LatticeVector) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.layout.len());
        for c in &v.coords {
            let c = self.w.pc_reduce(c, self.n);
            out.extend_from_slice(&c.c0.c);
            out.extend_from_slice(&c.c1.c);
        }
        out
    }

    pub fn from_flat(&self, x: &[u64]) -> LatticeVector {
        let deg = self.deg();
        let h0 = self.n.div_ceil(2);
        let h1 = self.n / 2;
        let coords = (0..self.g)
            .map(|i| {
                let off = 2 * i * deg;
                PiCoeff {
                    n: self.n,
                    c0: WittScalar {
                        prec: h0,
                        c: x[off..off + deg].to_vec(),
                    },
                    c1: WittScalar {
                        prec: h1,
                        c: x[off + deg..off + 2 * deg].to_vec(),
                    },
                }
            })
            .collect();
        LatticeVector { coords }
    }

    /// Teichmuller lifts of the power basis of `F_q`.
    pub fn teichmuller_basis(&self) -> &[WittScalar] {
        &self.teich_basis
    }

    // ---- lattices ----

    /// The subgroup generated by `gens` (no further closure).
    pub fn group_generated(self: &Arc<Self>, gens: &[LatticeVector]) -> DieudonneLattice {
        let mut ech = Echelon::new(self.layout.clone());
        for v in gens {
            ech.insert(&self.to_flat(v));
        }
        DieudonneLattice::from_echelon(self.clone(), None, ech)
    }

    /// The Dieudonne module generated by `gens`: the group spanned by
    /// `[lambda] F^a v` and `[lambda] V^b v`.
    pub fn generated_by(self: &Arc<Self>, gens: &[LatticeVector]) -> DieudonneLattice {
        let mut ech = Echelon::new(self.layout.clone());
        for v in gens {
            let mut fv = v.clone();
            let mut vv = self.apply_v(v);
            for _ in 0..self.n {
                for t in &self.teich_basis {
                    ech.insert(&self.to_flat(&self.scale(t, &fv)));
                    ech.insert(&self.to_flat(&self.scale(t, &vv)));
                }
                fv = self.apply_f(&fv);
                vv = self.apply_v(&vv);
            }
        }
        DieudonneLattice::from_echelon(self.clone(), None, ech)
    }

    /// `D v`, requiring the leading digits of `v` to be independent over `F_{p^2}`.
    pub fn dieudonne_span(self: &Arc<Self>, v: &LatticeVector) -> Result<DieudonneLattice> {
        if v.precision() < self.g as u32 + 1 {
            return Err(Error::Precision(format!(
                "span needs precision at least g + 1 = {}",
                self.g + 1
            )));
        }
        let lead: Vec<FieldElem> = v.coords.iter().map(|c| self.w.residue(&c.c0)).collect();
        if !crate::semilinear::is_fp2_independent(self.field(), &lead) {
            return Err(Error::NotALatticePoint(
                "leading digits are dependent over F_{p^2}".into(),
            ));
        }
        let mut m = self.generated_by(std::slice::from_ref(v));
        m.generator = Some(v.clone());
        Ok(m)
    }

    pub fn lambda0_lattice(self: &Arc<Self>) -> DieudonneLattice {
        let gens: Vec<LatticeVector> = (1..=self.g).map(|i| self.basis_x(i)).collect();
        self.generated_by(&gens)
    }

    /// `Pi^s Lambda_0`.
    pub fn pi_power_lattice(self: &Arc<Self>, s: u32) -> DieudonneLattice {
        let gens: Vec<LatticeVector> = (1..=self.g)
            .map(|i| {
                let mut v = self.basis_x(i);
                for _ in 0..s {
                    v = self.apply_pi(&v);
                }
                v
            })
            .collect();
        self.generated_by(&gens)
    }

    /// The superspecial lattice spanned by the `e_i` and `f_i`.
    pub fn superspecial_lattice(self: &Arc<Self>) -> DieudonneLattice {
        let gens: Vec<LatticeVector> = (1..=self.g)
            .map(|i| {
                let mut v = self.basis_x(i);
                for _ in 0..self.c[i - 1].unsigned_abs() {
                    v = self.apply_pi(&v);
                }
                v
            })
            .collect();
        self.generated_by(&gens)
    }

    /// Per-`j` data of `<v, F^j v>` for `1 <= j <= g - 2`.
    pub fn selfdual_check(&self, v: &LatticeVector) -> Result<SelfDualReport> {
        if v.precision() < self.g as u32 + 1 {
            return Err(Error::Precision("self-duality check needs precision g + 1".into()));
        }
        let mut entries = vec![];
        let mut fj = v.clone();
        for j in 1..=self.g.saturating_sub(2) {
            fj = self.apply_f(&fj);
            let val = self.pair(v, &fj);
            if val.known_to() < 0 {
                return Err(Error::Precision(format!("pairing with F^{j} v not integral-testable")));
            }
            // integral iff q = 0 mod p^shift
            let shift = val.shift;
            let low = self.w.reduce(&val.q, shift);
            let integral = self.w.is_zero(&low);
            entries.push(SelfDualEntry {
                j: j as u32,
                valuation: self.pvalue_valuation(&val),
                integral,
            });
        }
        let pass = entries.iter().all(|e| e.integral);
        Ok(SelfDualReport { entries, pass })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfDualEntry {
    pub j: u32,
    /// Valuation of `<v, F^j v>`; `None` when zero to tracked precision.
    pub valuation: Option<i32>,
    pub integral: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfDualReport {
    pub entries: Vec<SelfDualEntry>,
    pub pass: bool,
}

/// A lattice `M` with `Pi^N Lambda_0 <= M <= Lambda_0`, as the subgroup
/// `M / Pi^N Lambda_0`.
#[derive(Clone, Debug)]
pub struct DieudonneLattice {
    model: Arc<Lambda0>,
    pub generator: Option<LatticeVector>,
    ech: Echelon,
}

impl DieudonneLattice {
    pub fn from_echelon(model: Arc<Lambda0>, generator: Option<LatticeVector>, ech: Echelon) -> Self {
        DieudonneLattice {
            model,
            generator,
            ech,
        }
    }

    pub fn model(&self) -> &Arc<Lambda0> {
        &self.model
    }

    pub fn echelon(&self) -> &Echelon {
        &self.ech
    }

    pub fn member(&self, w: &LatticeVector) -> bool {
        self.ech.contains(&self.model.to_flat(w))
    }

    /// `log_p |M / Pi^N Lambda_0|`.
    pub fn length(&self) -> usize {
        self.ech.length()
    }

    /// Dimension over `F_q` of `(M cap Pi^L) / (M cap Pi^{L+1})` for each level `L < N`.
    pub fn filtration_profile(&self) -> Vec<usize> {
        let deg = self.model.deg();
        self.ech.graded_dims().iter().map(|d| d / deg).collect()
    }

    /// Smallest `c` with `Pi^c Lambda_0 <= M`, if any below `N`.
    pub fn containment_level(&self) -> Option<u32> {
        let dims = self.ech.graded_dims();
        let layout = self.model.layout();
        let mut c = dims.len();
        for l in (0..dims.len()).rev() {
            if dims[l] == layout.level_width(l as u32) {
                c = l;
            } else {
                break;
            }
        }
        (c < dims.len()).then_some(c as u32)
    }

    /// `length(Lambda_0 / M)` over `W`, valid when `Pi^N Lambda_0 <= M` is
    /// implied by the containment level.
    pub fn colength(&self) -> Result<usize> {
        if self.containment_level().is_none() {
            return Err(Error::Precision("lattice does not contain Pi^(N-1) Lambda_0".into()));
        }
        let layout = self.model.layout();
        let deg = self.model.deg();
        let diff = layout.total_length() - self.ech.length();
        if diff % deg != 0 {
            return Err(Error::Internal("colength not divisible by the field degree".into()));
        }
        Ok(diff / deg)
    }

    pub fn a_number(&self) -> Result<usize> {
        let c = self
            .containment_level()
            .ok_or_else(|| Error::Precision("containment level unknown".into()))?;
        if self.model.precision() < c + 2 {
            return Err(Error::Precision(format!(
                "a-number needs precision {} but model has {}",
                c + 2,
                self.model.precision()
            )));
        }
        let m = &self.model;
        let mut fv = Echelon::new(m.layout().clone());
        for x in self.ech.basis() {
            let v = m.from_flat(x);
            fv.insert(&m.to_flat(&m.apply_f(&v)));
            fv.insert(&m.to_flat(&m.apply_v(&v)));
        }
        let diff = self.ech.length() - fv.length();
        let deg = m.deg();
        if diff % deg != 0 {
            return Err(Error::Internal("a-number not divisible by the field degree".into()));
        }
        Ok(diff / deg)
    }

    /// Smallest tau-stable lattice containing `M`.
    pub fn tau_closure(&self) -> DieudonneLattice {
        let m = &self.model;
        let mut ech = self.ech.clone();
        loop {
            let before = ech.length();
            let imgs: Vec<Vec<u64>> = ech
                .basis()
                .map(|x| m.to_flat(&m.apply_tau(&m.from_flat(x))))
                .collect();
            for x in &imgs {
                ech.insert(x);
            }
            if ech.length() == before {
                break;
            }
        }
        DieudonneLattice::from_echelon(m.clone(), None, ech)
    }

    pub fn contains_lattice(&self, other: &DieudonneLattice) -> bool {
        self.ech.contains_group(&other.ech)
    }

    pub fn same_as(&self, other: &DieudonneLattice) -> bool {
        self.length() == other.length() && self.contains_lattice(other)
    }

    pub fn is_lambda0(&self) -> bool {
        self.ech.length() == self.model.layout().total_length()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_matches_three_cases() {
        let t = pairing_table(4, 8).unwrap();
        assert_eq!(t.get(1, 4), Some(PairingEntry { sign: 1, exponent: 0 }));
        assert_eq!(t.get(1, 2), Some(PairingEntry { sign: 1, exponent: -1 }));
        assert_eq!(t.get(1, 3), None);
        assert_eq!(t.get(3, 4), Some(PairingEntry { sign: -1, exponent: 0 }));
        let t = pairing_table(5, 10).unwrap();
        assert_eq!(t.get(3, 1), Some(PairingEntry { sign: 1, exponent: -2 }));
        assert_eq!(t.get(3, 5), Some(PairingEntry { sign: 1, exponent: 0 }));
        assert_eq!(t.get(4, 5), Some(PairingEntry { sign: 1, exponent: 0 }));
    }

    #[test]
    fn pair_agrees_with_table_on_basis() {
        let f = FieldCtx::new(3, 2).unwrap();
        for g in [4usize, 5] {
            let m = Lambda0::new(g, f.clone(), 2 * g as u32 + 2).unwrap();
            let t = pairing_table(g, g).unwrap();
            for i in 1..=g {
                let k = g + 1 - i;
                let mut y = m.basis_x(k);
                for j in 0..=g {
                    let val = m.pair(&m.basis_x(i), &y);
                    let expect = match t.get(i, j) {
                        None => None,
                        Some(e) => Some(e.exponent),
                    };
                    assert_eq!(m.pvalue_valuation(&val), expect, "g={g} i={i} j={j}");
                    if let Some(e) = t.get(i, j) {
                        let d = m.pvalue_digit(&val, e.exponent).unwrap();
                        assert_eq!(d, m.field().from_int(e.sign as i64));
                    }
                    y = m.apply_pi(&y);
                }
            }
        }
    }

    #[test]
    fn lambda0_and_superspecial_a_numbers() {
        let f = FieldCtx::new(2, 2).unwrap();
        let m = Lambda0::new(4, f, 5).unwrap();
        let l0 = m.lambda0_lattice();
        assert!(l0.is_lambda0());
        assert_eq!(l0.a_number().unwrap(), 4);
        assert!(l0.tau_closure().same_as(&l0));
        let m0 = m.superspecial_lattice();
        assert_eq!(m0.a_number().unwrap(), 4);
    }

    #[test]
    fn f_v_tau_relations() {
        let f = FieldCtx::new(3, 3).unwrap();
        let m = Lambda0::new(4, f, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let v = m.random_vector(&mut rng);
            assert_eq!(m.apply_f(&m.apply_v(&v)), m.mul_p(&v));
            assert_eq!(m.apply_v(&m.apply_f(&v)), m.mul_p(&v));
            assert_eq!(m.apply_tau(&m.apply_f(&v)), m.apply_f(&m.apply_tau(&v)));
        }
        for i in 1..=4 {
            assert_eq!(m.apply_tau(&m.basis_x(i)), m.basis_x(i));
            assert_eq!(m.apply_f(&m.basis_x(i)), m.basis_y(i));
            assert_eq!(m.apply_v(&m.basis_x(i)), m.basis_y(i));
        }
    }
}
