//! Automorphisms of `(Lambda_0, F)` as `g x g` matrices over `O_D`, and the
//! image modulo `Pi^s` of those that stabilize a lattice `M = D v`.
//!
//! A matrix `A` acts by `j(w)_l = sum_i w_i A_{li}` (right multiplication on
//! the coordinates), which commutes with `F`. Since `j` commutes with `F`
//! and `V`, `j M <= M` iff `j(v) in M`, and `j(v) mod Pi^c Lambda_0` only
//! depends on `A mod Pi^c`. With `c` the containment level of `M`, the set
//! `{A mod Pi^c : A(v) in M}` is an additive subgroup computed exactly by
//! echelon elimination; the stabilizer image mod `Pi^s` is enumerated from
//! its reduction one Pi-layer at a time.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffq::{FieldCtx, FieldElem};
use crate::filtered::{Echelon, Layout};
use crate::lattice::{DieudonneLattice, Lambda0, LatticeVector, PValued};
use crate::sampler::{self, Mode, SampleConfig, SamplePoint};
use crate::seeds::trial_seed;
use crate::wittring::{ODScalar, OdEmbedding, PiCoeff, WittCtx, WittScalar};

/// Default enumeration budget in `F_p`-dimensions.
pub const DEFAULT_BUDGET: u32 = 24;

/// Reports list every element when the group has at most this many.
const ELEMENT_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AutMatrix {
    pub s: u32,
    /// `entries[l][i] = A_{l+1, i+1}` over `W(F_{p^2})[Pi] / Pi^s`.
    pub entries: Vec<Vec<ODScalar>>,
}

/// Pi-adic digits over `F_{p^2}` of each entry, `grid[l][i][m]`.
pub type DigitGrid = Vec<Vec<Vec<FieldElem>>>;

fn lift_scalar(a: &WittScalar, prec: u32) -> WittScalar {
    WittScalar {
        prec,
        c: a.c.clone(),
    }
}

fn lift_pc(x: &PiCoeff, n: u32) -> PiCoeff {
    PiCoeff {
        n,
        c0: lift_scalar(&x.c0, n.div_ceil(2)),
        c1: lift_scalar(&x.c1, n / 2),
    }
}

/// Matrices over `O_D` acting on a fixed model of `Lambda_0`.
#[derive(Debug)]
pub struct AutContext {
    model: Arc<Lambda0>,
    emb: OdEmbedding,
    // <X_i, X_k> and <X_i, Y_k>
    ref_xx: Vec<Vec<PValued>>,
    ref_xy: Vec<Vec<PValued>>,
}

impl AutContext {
    pub fn new(model: &Arc<Lambda0>) -> Result<AutContext> {
        let big = model.witt().clone();
        let f2 = FieldCtx::new(big.p(), 1)?;
        let small = WittCtx::new(f2, big.nmax())?;
        let emb = OdEmbedding::new(small, big)?;
        let g = model.g();
        let xs: Vec<LatticeVector> = (1..=g).map(|i| model.basis_x(i)).collect();
        let ys: Vec<LatticeVector> = (1..=g).map(|i| model.basis_y(i)).collect();
        let ref_xx = xs
            .iter()
            .map(|a| xs.iter().map(|b| model.pair(a, b)).collect())
            .collect();
        let ref_xy = xs
            .iter()
            .map(|a| ys.iter().map(|b| model.pair(a, b)).collect())
            .collect();
        Ok(AutContext {
            model: model.clone(),
            emb,
            ref_xx,
            ref_xy,
        })
    }

    pub fn model(&self) -> &Arc<Lambda0> {
        &self.model
    }

    /// `W(F_{p^2})`.
    pub fn small(&self) -> &Arc<WittCtx> {
        &self.emb.small
    }

    pub fn embedding(&self) -> &OdEmbedding {
        &self.emb
    }

    pub fn g(&self) -> usize {
        self.model.g()
    }

    pub fn p(&self) -> u64 {
        self.model.field().p()
    }

    // ---- construction ----

    pub fn scalar(&self, lambda: &ODScalar) -> AutMatrix {
        let g = self.g();
        let w = self.small();
        AutMatrix {
            s: lambda.n,
            entries: (0..g)
                .map(|l| {
                    (0..g)
                        .map(|i| if l == i { lambda.clone() } else { w.pc_zero(lambda.n) })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn identity(&self, s: u32) -> AutMatrix {
        self.scalar(&self.small().pc_int(1, s))
    }

    pub fn int_scalar(&self, v: i64, s: u32) -> AutMatrix {
        self.scalar(&self.small().pc_int(v, s))
    }

    /// A uniformly random element of `O_D / Pi^n`.
    pub fn random_od<R: Rng + ?Sized>(&self, n: u32, rng: &mut R) -> ODScalar {
        let w = self.small();
        let digits: Vec<FieldElem> = (0..n).map(|_| w.field().random(rng)).collect();
        w.from_pi_digits(&digits, n)
    }

    pub fn from_digit_grid(&self, grid: &DigitGrid, s: u32) -> AutMatrix {
        let w = self.small();
        AutMatrix {
            s,
            entries: grid
                .iter()
                .map(|row| row.iter().map(|d| w.from_pi_digits(d, s)).collect())
                .collect(),
        }
    }

    pub fn digit_grid(&self, a: &AutMatrix) -> DigitGrid {
        let w = self.small();
        a.entries
            .iter()
            .map(|row| row.iter().map(|x| w.pi_digits(x)).collect())
            .collect()
    }

    pub fn reduce(&self, a: &AutMatrix, s: u32) -> AutMatrix {
        let w = self.small();
        AutMatrix {
            s: s.min(a.s),
            entries: a
                .entries
                .iter()
                .map(|row| row.iter().map(|x| w.pc_reduce(x, s)).collect())
                .collect(),
        }
    }

    // ---- flat coordinates of (O_D / Pi^s)^{g x g} ----

    pub fn entry_layout(&self, s: u32) -> Arc<Layout> {
        let g = self.g();
        let mut nexp = vec![];
        let mut base = vec![];
        for _ in 0..g * g {
            for (part, h) in [(0u32, s.div_ceil(2)), (1, s / 2)] {
                for _ in 0..2 {
                    nexp.push(h);
                    base.push(part);
                }
            }
        }
        Arc::new(Layout::new(self.p(), nexp, base))
    }

    pub fn to_flat(&self, a: &AutMatrix) -> Vec<u64> {
        let mut out = Vec::with_capacity(4 * self.g() * self.g());
        for row in &a.entries {
            for x in row {
                out.extend_from_slice(&x.c0.c);
                out.extend_from_slice(&x.c1.c);
            }
        }
        out
    }

    pub fn from_flat(&self, x: &[u64], s: u32) -> AutMatrix {
        let g = self.g();
        let entries = (0..g)
            .map(|l| {
                (0..g)
                    .map(|i| {
                        let o = 4 * (l * g + i);
                        PiCoeff {
                            n: s,
                            c0: WittScalar {
                                prec: s.div_ceil(2),
                                c: x[o..o + 2].to_vec(),
                            },
                            c1: WittScalar {
                                prec: s / 2,
                                c: x[o + 2..o + 4].to_vec(),
                            },
                        }
                    })
                    .collect()
            })
            .collect();
        AutMatrix { s, entries }
    }

    // ---- group operations ----

    /// Matrix of `j_a o j_b`: `(ab)_{li} = sum_m b_{mi} a_{lm}`.
    pub fn mul(&self, a: &AutMatrix, b: &AutMatrix) -> AutMatrix {
        let w = self.small();
        let g = self.g();
        let s = a.s.min(b.s);
        let entries = (0..g)
            .map(|l| {
                (0..g)
                    .map(|i| {
                        let mut acc = w.pc_zero(s);
                        for m in 0..g {
                            acc = w.pc_add(&acc, &w.pc_mul(&b.entries[m][i], &a.entries[l][m]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        AutMatrix { s, entries }
    }

    pub fn neg(&self, a: &AutMatrix) -> AutMatrix {
        let w = self.small();
        AutMatrix {
            s: a.s,
            entries: a
                .entries
                .iter()
                .map(|row| row.iter().map(|x| w.pc_neg(x)).collect())
                .collect(),
        }
    }

    pub fn residue_matrix(&self, a: &AutMatrix) -> Vec<Vec<FieldElem>> {
        let w = self.small();
        a.entries
            .iter()
            .map(|row| row.iter().map(|x| w.residue(&x.c0)).collect())
            .collect()
    }

    pub fn is_invertible(&self, a: &AutMatrix) -> bool {
        if a.s == 0 {
            return true;
        }
        let f = self.small().field();
        !f.is_zero(&f.det(&self.residue_matrix(a)))
    }

    /// Multiplicative order, if at most `cap`.
    pub fn order(&self, a: &AutMatrix, cap: u64) -> Option<u64> {
        let one = self.identity(a.s);
        let mut x = a.clone();
        for n in 1..=cap {
            if x == one {
                return Some(n);
            }
            x = self.mul(&x, a);
        }
        None
    }

    // ---- action ----

    fn embedded(&self, a: &AutMatrix, n: u32) -> Vec<Vec<PiCoeff>> {
        a.entries
            .iter()
            .map(|row| row.iter().map(|x| self.emb.embed(&lift_pc(x, n))).collect())
            .collect()
    }

    fn apply_embedded(&self, e: &[Vec<PiCoeff>], w: &LatticeVector) -> LatticeVector {
        let big = self.model.witt();
        let g = self.g();
        let n = w.precision();
        LatticeVector {
            coords: (0..g)
                .map(|l| {
                    let mut acc = big.pc_zero(n);
                    for i in 0..g {
                        acc = big.pc_add(&acc, &big.pc_mul(&w.coords[i], &e[l][i]));
                    }
                    acc
                })
                .collect(),
        }
    }

    /// `j_A(w)`, with `A` lifted to the precision of `w` by its canonical
    /// representative.
    pub fn aut_apply(&self, a: &AutMatrix, w: &LatticeVector) -> LatticeVector {
        let e = self.embedded(a, w.precision());
        self.apply_embedded(&e, w)
    }

    /// Whether `j_A` preserves the pairing on all pairs of basis vectors to
    /// the precision determined by `A mod Pi^s`: `<X_i, X_k>` modulo
    /// `p^ceil((s-g)/2)` and `<X_i, Y_k>` modulo `p^ceil((s+1-g)/2)`.
    pub fn is_symplectic(&self, a: &AutMatrix) -> Result<bool> {
        let (ex, ey) = self.symplectic_exponents(a.s);
        for (i, k, xx, xy) in self.basis_pairings(a)? {
            if let Some(xx) = xx {
                if !self.agree_mod(&xx, &self.ref_xx[i][k], ex)? {
                    return Ok(false);
                }
            }
            if !self.agree_mod(&xy, &self.ref_xy[i][k], ey)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn symplectic_exponents(&self, s: u32) -> (i32, i32) {
        let g = self.g() as i32;
        let ceil_half = |x: i32| x.div_euclid(2) + x.rem_euclid(2);
        (ceil_half(s as i32 - g), ceil_half(s as i32 + 1 - g))
    }

    /// `(i, k, <AX_i, AX_k> if i < k, <AX_i, AY_k>)` at full model precision.
    #[allow(clippy::type_complexity)]
    fn basis_pairings(&self, a: &AutMatrix) -> Result<Vec<(usize, usize, Option<PValued>, PValued)>> {
        let m = &self.model;
        let n = m.precision();
        if a.s + 1 > n {
            return Err(Error::Precision(format!(
                "symplectic test at s = {} needs precision {}",
                a.s,
                a.s + 1
            )));
        }
        let g = self.g();
        let e = self.embedded(a, n);
        let us: Vec<LatticeVector> = (0..g)
            .map(|i| LatticeVector {
                coords: e.iter().map(|row| row[i].clone()).collect(),
            })
            .collect();
        let ys: Vec<LatticeVector> = us.iter().map(|u| m.apply_f(u)).collect();
        let mut out = Vec::with_capacity(g * g);
        for i in 0..g {
            for k in 0..g {
                let xx = (i < k).then(|| m.pair(&us[i], &us[k]));
                out.push((i, k, xx, m.pair(&us[i], &ys[k])));
            }
        }
        Ok(out)
    }

    /// For `A` that passes the symplectic test modulo `Pi^{s-1}`, the digits
    /// that decide it modulo `Pi^s`. These are affine in the top Pi-layer
    /// of `A` once `s >= 2`.
    fn new_symplectic_digits(&self, a: &AutMatrix) -> Result<Vec<u64>> {
        let w = self.model.witt();
        let p = self.p();
        let shift = self.model.pairing_shift() as i32;
        let (ex, ey) = self.symplectic_exponents(a.s);
        let (ex0, ey0) = self.symplectic_exponents(a.s - 1);
        let mut out = vec![];
        let mut digit = |v: &PValued, r: &PValued, e: i32, e0: i32| {
            let idx = e + shift;
            if e == e0 || idx <= 0 {
                return;
            }
            let d = w.reduce(&w.sub(&v.q, &r.q), idx as u32);
            let scale = p.pow(idx as u32 - 1);
            out.extend(d.c.iter().map(|&c| (c / scale) % p));
        };
        for (i, k, xx, xy) in self.basis_pairings(a)? {
            if let Some(xx) = xx {
                digit(&xx, &self.ref_xx[i][k], ex, ex0);
            }
            digit(&xy, &self.ref_xy[i][k], ey, ey0);
        }
        Ok(out)
    }

    fn agree_mod(&self, a: &PValued, b: &PValued, e: i32) -> Result<bool> {
        let w = self.model.witt();
        debug_assert_eq!(a.shift, b.shift);
        let idx = e + a.shift as i32;
        if idx <= 0 {
            return Ok(true);
        }
        if e > a.known_to().min(b.known_to()) {
            return Err(Error::Precision(format!("pairing known below p^{e}")));
        }
        let d = w.reduce(&w.sub(&a.q, &b.q), idx as u32);
        Ok(w.is_zero(&d))
    }
}

/// `{A mod Pi^s : A(v) in M + Pi^s Lambda_0}` as a subgroup of
/// `(O_D / Pi^s)^{g x g}`.
#[derive(Debug, Clone)]
pub struct StabilizerSpace {
    pub s: u32,
    pub echelon: Echelon,
}

impl StabilizerSpace {
    /// `log_p` of the order; the `F_p`-dimension when the group is elementary.
    pub fn dim(&self) -> usize {
        self.echelon.length()
    }

    pub fn contains(&self, ctx: &AutContext, a: &AutMatrix) -> bool {
        self.echelon.contains(&ctx.to_flat(&ctx.reduce(a, self.s)))
    }
}

pub fn stabilizer_space(
    ctx: &AutContext,
    m: &DieudonneLattice,
    v: &LatticeVector,
    s: u32,
) -> Result<StabilizerSpace> {
    let model = ctx.model();
    let n = model.precision();
    if s == 0 || s >= n {
        return Err(Error::Precision(format!("need 1 <= s <= {} (got {s})", n - 1)));
    }
    let g = ctx.g();
    let lam = model.layout();
    let el = ctx.entry_layout(s);
    let offset = lam.levels();
    let graph = Arc::new(Layout::concat(lam, &el, offset));
    let mut ech = Echelon::new(graph);
    let pad = el.len();
    let mut push = |x: &[u64], e: &[u64]| {
        let mut y = x.to_vec();
        y.extend_from_slice(e);
        ech.insert(&y);
    };
    for x in m.echelon().basis() {
        push(x, &vec![0; pad]);
    }
    if s < n {
        for x in model.pi_power_lattice(s).echelon().basis() {
            push(x, &vec![0; pad]);
        }
    }
    let w = ctx.small();
    for l in 0..g {
        for i in 0..g {
            for part in 0..2 {
                if part == 1 && s < 2 {
                    continue;
                }
                for t in 0..2 {
                    let mut e = vec![0u64; pad];
                    e[4 * (l * g + i) + 2 * part + t] = 1;
                    let mut x = w.pc_zero(n);
                    let unit = WittScalar {
                        prec: if part == 0 { n.div_ceil(2) } else { n / 2 },
                        c: if t == 0 { vec![1, 0] } else { vec![0, 1] },
                    };
                    if part == 0 {
                        x.c0 = unit;
                    } else {
                        x.c1 = unit;
                    }
                    let emb = ctx.embedding().embed(&x);
                    let big = model.witt();
                    let mut img = model.zero();
                    img.coords[l] = big.pc_mul(&v.coords[i], &emb);
                    push(&model.to_flat(&img), &e);
                }
            }
        }
    }
    let mut out = Echelon::new(el.clone());
    for level in offset..offset + s {
        for x in ech.basis_at(level) {
            out.insert(&x[lam.len()..].to_vec());
        }
    }
    Ok(StabilizerSpace { s, echelon: out })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Classification {
    PmIdentity,
    ScalarsZp,
    ScalarsZpPlusPOD,
    Larger {
        order: Option<u64>,
        /// Digit grids of a few elements outside every smaller class.
        witnesses: Vec<DigitGrid>,
    },
}

impl Classification {
    pub fn rank(&self) -> u8 {
        match self {
            Classification::PmIdentity => 0,
            Classification::ScalarsZp => 1,
            Classification::ScalarsZpPlusPOD => 2,
            Classification::Larger { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Classification::PmIdentity => "pm_identity",
            Classification::ScalarsZp => "scalars_Zp",
            Classification::ScalarsZpPlusPOD => "scalars_Zp_plus_pOD",
            Classification::Larger { .. } => "larger",
        }
    }
}

/// The class the claims predict for a generic point.
pub fn target_class(g: usize, mode: Mode) -> Classification {
    match mode {
        Mode::Polarized => Classification::PmIdentity,
        Mode::Nonpolarized if g >= 5 => Classification::ScalarsZp,
        Mode::Nonpolarized => Classification::ScalarsZpPlusPOD,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerInfo {
    pub level: u32,
    /// Number of basis elements of the stabilizer space at this Pi-level.
    pub kernel_dim: usize,
    pub candidates: u64,
    pub survivors: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElement {
    pub grid: DigitGrid,
    pub order: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerReport {
    pub s: u32,
    pub mode: Mode,
    /// Pi-precision at which membership was decided.
    pub working_precision: u32,
    /// `log_p` of the additive stabilizer space at the working precision.
    pub space_dim: usize,
    pub layers: Vec<LayerInfo>,
    pub enumeration_skipped: bool,
    /// Upper bound on `log_p` of the group order when enumeration is skipped.
    pub dimension_bound: Option<u32>,
    pub order: Option<u64>,
    /// Elements found before the budget stopped the last layer (equal to
    /// `order` when it did not).
    pub order_lower_bound: Option<u64>,
    /// All elements, when there are at most a few thousand.
    pub elements: Vec<GroupElement>,
    pub classification: Classification,
    pub target: Classification,
    pub pass: bool,
    /// Every element found modulo `Pi^{t-1}` lifts to one modulo `Pi^t`.
    pub monotone: bool,
    /// Contains `-1` (polarized) or all `Z_p^*` scalars (non-polarized).
    pub contains_expected_scalars: bool,
}

fn is_scalar_matrix(ctx: &AutContext, a: &AutMatrix) -> Option<ODScalar> {
    let w = ctx.small();
    let g = ctx.g();
    let d = a.entries[0][0].clone();
    for l in 0..g {
        for i in 0..g {
            let x = &a.entries[l][i];
            let ok = if l == i { x == &d } else { w.pc_is_zero(x) };
            if !ok {
                return None;
            }
        }
    }
    Some(d)
}

fn in_class(ctx: &AutContext, a: &AutMatrix, class: &Classification) -> bool {
    let s = a.s;
    match class {
        Classification::PmIdentity => *a == ctx.identity(s) || *a == ctx.int_scalar(-1, s),
        Classification::ScalarsZp => is_scalar_matrix(ctx, a)
            .is_some_and(|d| d.c0.c[1] == 0 && d.c1.c.iter().all(|&x| x == 0)),
        Classification::ScalarsZpPlusPOD => {
            let p = ctx.p();
            is_scalar_matrix(ctx, a)
                .is_some_and(|d| d.c0.c[1] % p == 0 && d.c1.c.iter().all(|&x| x % p == 0))
        }
        Classification::Larger { .. } => true,
    }
}

fn classify(ctx: &AutContext, elems: &[AutMatrix], mode: Mode) -> Classification {
    let mut classes = vec![];
    if mode == Mode::Polarized {
        classes.push(Classification::PmIdentity);
    }
    classes.push(Classification::ScalarsZp);
    classes.push(Classification::ScalarsZpPlusPOD);
    for c in classes {
        if elems.iter().all(|a| in_class(ctx, a, &c)) {
            return c;
        }
    }
    let witnesses = elems
        .iter()
        .filter(|a| !in_class(ctx, a, &Classification::ScalarsZpPlusPOD))
        .take(3)
        .map(|a| ctx.digit_grid(a))
        .collect();
    Classification::Larger {
        order: Some(elems.len() as u64),
        witnesses,
    }
}

/// Images of `Z_p^*` modulo `Pi^s`.
pub fn zp_unit_scalars(ctx: &AutContext, s: u32) -> Vec<AutMatrix> {
    let p = ctx.p();
    let m = p.pow(s.div_ceil(2));
    (1..m)
        .filter(|u| u % p != 0)
        .map(|u| ctx.int_scalar(u as i64, s))
        .collect()
}

/// Largest number of survivors kept in memory between layers.
const SURVIVOR_CAP: u64 = 1 << 18;

type Affine = Option<(Vec<u64>, Vec<Vec<u64>>)>;

/// `f(c) = konst + sum_i unary[i][c_i] + sum_{i<j} c_i c_j cross[(i,j)]`.
struct Quadratic {
    p: u64,
    konst: Vec<u64>,
    unary: Vec<Vec<Vec<u64>>>,
    cross: Vec<Vec<u64>>,
}

impl Quadratic {
    fn vanishes_at(&self, c: &[u64]) -> bool {
        let p = self.p;
        let r = c.len();
        (0..self.konst.len()).all(|t| {
            let mut acc = self.konst[t];
            let mut k = 0;
            for i in 0..r {
                acc += self.unary[i][c[i] as usize][t];
                for j in i + 1..r {
                    acc += c[i] * c[j] % p * self.cross[k][t];
                    k += 1;
                }
            }
            acc % p == 0
        })
    }
}

struct Layered<'a> {
    ctx: &'a AutContext,
    space: &'a StabilizerSpace,
    s: u32,
    mode: Mode,
    el: Arc<Layout>,
}

impl Layered<'_> {
    /// Level-`level` basis elements of the space, reduced modulo `Pi^s`.
    fn gens(&self, level: u32) -> Vec<Vec<u64>> {
        let t = self.space.s;
        self.space
            .echelon
            .basis_at(level)
            .map(|x| self.ctx.to_flat(&self.ctx.reduce(&self.ctx.from_flat(x, t), self.s)))
            .collect()
    }

    fn combine(&self, gens: &[Vec<u64>], b: &[u64], coef: &[u64]) -> Vec<u64> {
        let mut x = b.to_vec();
        for (h, &cf) in gens.iter().zip(coef) {
            if cf != 0 {
                x = self.el.add(&x, &self.el.scale(h, cf));
            }
        }
        x
    }

    fn truncated(&self, x: &[u64], level: u32) -> AutMatrix {
        self.ctx.reduce(&self.ctx.from_flat(x, self.s), level + 1)
    }

    /// Change of the new symplectic digits at `b` along each level-`level`
    /// generator. It only depends on `b` modulo `Pi`.
    fn linear_part(&self, gens: &[Vec<u64>], b: &[u64], level: u32) -> Result<Vec<Vec<u64>>> {
        let p = self.ctx.p();
        let d0 = self.ctx.new_symplectic_digits(&self.truncated(b, level))?;
        digit_basis(gens.len())
            .into_iter()
            .map(|e| {
                let d = self
                    .ctx
                    .new_symplectic_digits(&self.truncated(&self.combine(gens, b, &e), level))?;
                Ok(d.iter().zip(&d0).map(|(&x, &y)| (x + p - y) % p).collect())
            })
            .collect()
    }

    /// Lifts of `b` through the level-`level` generators that satisfy the
    /// new symplectic digits, as an affine space of coefficient vectors.
    fn lift_space(&self, gens: &[Vec<u64>], b: &[u64], level: u32, cols: &[Vec<u64>]) -> Result<Affine> {
        let r = gens.len();
        let p = self.ctx.p();
        if self.mode == Mode::Nonpolarized {
            return Ok(Some((vec![0; r], digit_basis(r))));
        }
        let d0 = self.ctx.new_symplectic_digits(&self.truncated(b, level))?;
        let rows: Vec<Vec<u64>> = (0..d0.len())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        let rhs: Vec<u64> = d0.iter().map(|&x| (p - x) % p).collect();
        let sol = crate::linalg::solve(&rows, &rhs, r, p);
        if let Some((x, _)) = &sol {
            let check = self
                .ctx
                .new_symplectic_digits(&self.truncated(&self.combine(gens, b, x), level))?;
            if check.iter().any(|&d| d != 0) {
                return Err(Error::Internal(format!("symplectic digits at level {level} are not affine")));
            }
        }
        Ok(sol)
    }

    /// The level-0 symplectic digits of `sum_i c_i gens_i` as a quadratic
    /// function of `c` over `F_p`.
    fn level0_quadratic(&self, gens: &[Vec<u64>]) -> Result<Quadratic> {
        let r = gens.len();
        let p = self.ctx.p();
        let zero = self.el.zero();
        let eval = |c: &[u64]| self.ctx.new_symplectic_digits(&self.truncated(&self.combine(gens, &zero, c), 0));
        let sub = |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).map(|(&x, &y)| (x + p - y) % p).collect() };
        let konst = eval(&vec![0; r])?;
        let mut unary = vec![];
        for i in 0..r {
            let mut row = vec![vec![0; konst.len()]];
            for c in 1..p {
                let mut e = vec![0; r];
                e[i] = c;
                row.push(sub(&eval(&e)?, &konst));
            }
            unary.push(row);
        }
        let mut cross = vec![];
        for i in 0..r {
            for j in i + 1..r {
                let mut e = vec![0; r];
                e[i] = 1;
                e[j] = 1;
                let f = eval(&e)?;
                cross.push(
                    (0..konst.len())
                        .map(|t| (f[t] + 3 * p - konst[t] - unary[i][1][t] - unary[j][1][t]) % p)
                        .collect::<Vec<u64>>(),
                );
            }
        }
        Ok(Quadratic { p, konst, unary, cross })
    }

    /// Whether `a` (modulo `Pi^s`) lies in the enumerated group.
    fn contains(&self, a: &AutMatrix) -> Result<bool> {
        let t = self.space.s;
        let ctx = self.ctx;
        let mut lifted = self.ctx.to_flat(&AutMatrix {
            s: t,
            entries: a
                .entries
                .iter()
                .map(|row| row.iter().map(|x| lift_pc(x, t)).collect())
                .collect(),
        });
        if self.space.echelon.reduce(&mut lifted, self.s).is_some() {
            return Ok(false);
        }
        if !ctx.is_invertible(a) {
            return Ok(false);
        }
        if self.mode == Mode::Polarized {
            for l in 1..=self.s {
                if !ctx.is_symplectic(&ctx.reduce(a, l))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Image modulo `Pi^s` of the automorphisms of `Lambda_0` (preserving the
/// pairing in polarized mode) that stabilize `M = D v`.
///
/// `budget` bounds `log_2` of the number of candidates examined in one
/// layer.
pub fn stabilizer_group(
    ctx: &AutContext,
    m: &DieudonneLattice,
    v: &LatticeVector,
    s: u32,
    mode: Mode,
    budget: u32,
) -> Result<StabilizerReport> {
    let c = m
        .containment_level()
        .ok_or_else(|| Error::Precision("lattice does not contain Pi^(N-1) Lambda_0".into()))?;
    let t = c.max(s).max(1);
    let space = stabilizer_space(ctx, m, v, t)?;
    let lay = Layered {
        ctx,
        space: &space,
        s,
        mode,
        el: ctx.entry_layout(s),
    };
    let p = ctx.p();
    let cap = 2f64.powi(budget as i32);
    let target = target_class(ctx.g(), mode);
    let expected: Vec<AutMatrix> = match mode {
        Mode::Polarized => vec![ctx.identity(s), ctx.int_scalar(-1, s)],
        Mode::Nonpolarized => zp_unit_scalars(ctx, s),
    };
    let mut contains_expected_scalars = true;
    for e in &expected {
        contains_expected_scalars &= lay.contains(e)?;
    }
    let mut report = StabilizerReport {
        s,
        mode,
        working_precision: t,
        space_dim: space.dim(),
        layers: vec![],
        enumeration_skipped: false,
        dimension_bound: None,
        order: None,
        order_lower_bound: None,
        elements: vec![],
        classification: Classification::Larger {
            order: None,
            witnesses: vec![],
        },
        target: target.clone(),
        pass: false,
        monotone: true,
        contains_expected_scalars,
    };

    let mut survivors: Vec<Vec<u64>> = vec![lay.el.zero()];
    for level in 0..s {
        let gens = lay.gens(level);
        let r = gens.len();
        let size = |x: &Affine| x.as_ref().map_or(0.0, |(_, k)| (p as f64).powi(k.len() as i32));
        let last = level + 1 == s;
        let mut spaces: Vec<Affine> = vec![];
        let mut count = 0.0;
        let mut cut_short = false;
        if level == 0 {
            spaces.push(Some((vec![0; r], digit_basis(r))));
            count = size(&spaces[0]);
        } else {
            let mut linear: HashMap<Vec<u64>, Vec<Vec<u64>>> = HashMap::new();
            for chunk in survivors.chunks(256) {
                let keys: Vec<Vec<u64>> = chunk.iter().map(|b| ctx.to_flat(&lay.truncated(b, 0))).collect();
                if mode == Mode::Polarized {
                    for (b, key) in chunk.iter().zip(&keys) {
                        if !linear.contains_key(key) {
                            linear.insert(key.clone(), lay.linear_part(&gens, b, level)?);
                        }
                    }
                }
                let part: Vec<Affine> = chunk
                    .par_iter()
                    .zip(&keys)
                    .map(|(b, key)| {
                        let cols = linear.get(key).map(Vec::as_slice).unwrap_or(&[]);
                        lay.lift_space(&gens, b, level, cols)
                    })
                    .collect::<Result<_>>()?;
                count += part.iter().map(size).sum::<f64>();
                spaces.extend(part);
                if last && count > cap {
                    cut_short = spaces.len() < survivors.len();
                    break;
                }
            }
        }
        if level > 0 && spaces.iter().any(Option::is_none) {
            report.monotone = false;
        }
        let mut info = LayerInfo {
            level,
            kernel_dim: r,
            candidates: count as u64,
            survivors: 0,
        };
        if count > cap || (level > 0 && count > SURVIVOR_CAP as f64) {
            if last && level > 0 && count <= u64::MAX as f64 {
                // every solution survives from here on, so the count is the
                // order (or a lower bound when cut short) and exceeds the
                // size of every scalar class
                info.survivors = count as u64;
                report.layers.push(info);
                let (b, sol) = survivors
                    .iter()
                    .zip(&spaces)
                    .find_map(|(b, x)| x.as_ref().map(|x| (b, x)))
                    .expect("count > 0");
                let witnesses = crate::linalg::enumerate_affine(&sol.0, &sol.1, p)
                    .into_iter()
                    .take(64)
                    .map(|coef| ctx.from_flat(&lay.combine(&gens, b, &coef), s))
                    .filter(|a| !in_class(ctx, a, &Classification::ScalarsZpPlusPOD))
                    .take(3)
                    .map(|a| ctx.digit_grid(&a))
                    .collect();
                let order = (!cut_short).then_some(count as u64);
                report.order = order;
                report.order_lower_bound = Some(count as u64);
                report.classification = Classification::Larger { order, witnesses };
                return Ok(report);
            }
            report.enumeration_skipped = true;
            report.dimension_bound = Some((count.ln() / (p as f64).ln()).ceil() as u32);
            report.layers.push(info);
            return Ok(report);
        }
        let quad = if level == 0 && mode == Mode::Polarized {
            Some(lay.level0_quadratic(&gens)?)
        } else {
            None
        };
        let lifted: Vec<Vec<Vec<u64>>> = survivors
            .par_iter()
            .zip(&spaces)
            .map(|(b, sol)| -> Result<Vec<Vec<u64>>> {
                let Some((part, ker)) = sol else {
                    return Ok(vec![]);
                };
                let mut out = vec![];
                for coef in crate::linalg::enumerate_affine(part, ker, p) {
                    if quad.as_ref().is_some_and(|q| !q.vanishes_at(&coef)) {
                        continue;
                    }
                    let x = lay.combine(&gens, b, &coef);
                    if level == 0 {
                        let a = lay.truncated(&x, 0);
                        if !ctx.is_invertible(&a) {
                            continue;
                        }
                        if mode == Mode::Polarized && !ctx.is_symplectic(&a)? {
                            return Err(Error::Internal("level-0 quadratic admitted a non-isometry".into()));
                        }
                    }
                    out.push(x);
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        survivors = lifted.into_iter().flatten().collect();
        info.survivors = survivors.len() as u64;
        report.layers.push(info);
    }
    if mode == Mode::Polarized {
        for x in survivors.iter().take(ELEMENT_LIMIT) {
            if !ctx.is_symplectic(&ctx.from_flat(x, s))? {
                return Err(Error::Internal("linearized symplectic layer admitted a non-isometry".into()));
            }
        }
    }
    let elems: Vec<AutMatrix> = survivors.iter().map(|x| ctx.from_flat(x, s)).collect();
    report.classification = classify(ctx, &elems, mode);
    report.pass = report.classification.rank() <= target.rank();
    report.order = Some(elems.len() as u64);
    report.order_lower_bound = report.order;
    if elems.len() <= ELEMENT_LIMIT {
        report.elements = elems
            .iter()
            .map(|a| GroupElement {
                grid: ctx.digit_grid(a),
                order: ctx.order(a, elems.len() as u64),
            })
            .collect();
    }
    Ok(report)
}

fn digit_basis(r: usize) -> Vec<Vec<u64>> {
    (0..r)
        .map(|i| {
            let mut e = vec![0; r];
            e[i] = 1;
            e
        })
        .collect()
}

/// Whether the scalar `lambda` (acting as `lambda * id`) maps `M = D v` into itself.
pub fn scalar_action_check(ctx: &AutContext, m: &DieudonneLattice, lambda: &ODScalar, v: &LatticeVector) -> bool {
    let a = ctx.scalar(lambda);
    m.member(&ctx.aut_apply(&a, v))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimTrial {
    pub trial: u64,
    pub seed: u64,
    pub point: Option<SamplePoint>,
    pub report: Option<StabilizerReport>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub g: usize,
    pub p: u64,
    pub k: usize,
    pub s: u32,
    pub mode: Mode,
    pub master_seed: u64,
    pub passes: usize,
    pub pass_fraction: f64,
    pub first_witness: Option<u64>,
    pub class_counts: Vec<(String, usize)>,
    pub trials: Vec<ClaimTrial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimConfig {
    pub k: usize,
    pub budget: u32,
    pub sample: SampleConfig,
}

impl ClaimConfig {
    pub fn new(g: usize) -> ClaimConfig {
        ClaimConfig {
            k: g,
            budget: DEFAULT_BUDGET,
            sample: SampleConfig::default(),
        }
    }
}

/// A field degree at which sampled points behave like generic points for
/// the stabilizer modulo `Pi^s`.
///
/// Killing the unipotent layer at level `d` takes about `2 g^2` conditions
/// against `2 k (g - d)` available ones, so `k` must exceed `g^2 / (g - d)`.
/// Usually `d = s`; separating `1 + p[b]` from `1 + p[sigma(b)]` for
/// `g >= 5` without a polarization happens one level further down.
pub fn generic_field_degree(g: usize, s: u32, mode: Mode) -> usize {
    let d = match mode {
        Mode::Nonpolarized if g >= 5 && s >= 3 => s as usize + 1,
        _ => s as usize,
    };
    if d >= g {
        return 2 * g * g + 1;
    }
    (g * g).div_ceil(g - d) + 1
}

/// Whether a list of elements (mod `Pi^s`) is closed under products.
pub fn is_product_closed(ctx: &AutContext, elems: &[AutMatrix]) -> bool {
    let key = |a: &AutMatrix| ctx.to_flat(a);
    let set: HashSet<Vec<u64>> = elems.iter().map(key).collect();
    elems
        .par_iter()
        .all(|a| elems.iter().all(|b| set.contains(&key(&ctx.mul(a, b)))))
}

/// Elements of a report as matrices.
pub fn report_elements(ctx: &AutContext, rep: &StabilizerReport) -> Vec<AutMatrix> {
    rep.elements.iter().map(|e| ctx.from_digit_grid(&e.grid, rep.s)).collect()
}

/// Sample one point and compute its stabilizer modulo `Pi^s`.
pub fn run_trial(g: usize, p: u64, s: u32, mode: Mode, seed: u64, cfg: &ClaimConfig) -> Result<(SamplePoint, StabilizerReport)> {
    let pt = sampler::sample(g, p, cfg.k, mode, seed, &cfg.sample)?;
    let model = pt.model()?;
    let v = pt.vector(&model)?;
    let m = model.dieudonne_span(&v)?;
    let ctx = AutContext::new(&model)?;
    let rep = stabilizer_group(&ctx, &m, &v, s, mode, cfg.budget)?;
    Ok((pt, rep))
}

/// Sample `trials` points and compute their stabilizers; trial `t` uses
/// the seed `trial_seed(seed, t)`.
pub fn verify_claim(
    g: usize,
    p: u64,
    s: u32,
    mode: Mode,
    trials: u64,
    seed: u64,
    cfg: &ClaimConfig,
) -> ClaimReport {
    let results: Vec<ClaimTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, t);
            match run_trial(g, p, s, mode, ts, cfg) {
                Ok((pt, rep)) => ClaimTrial {
                    trial: t,
                    seed: ts,
                    pass: rep.pass,
                    point: Some(pt),
                    report: Some(rep),
                    error: None,
                },
                Err(e) => ClaimTrial {
                    trial: t,
                    seed: ts,
                    point: None,
                    report: None,
                    pass: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let passes = results.iter().filter(|r| r.pass).count();
    let first_witness = results.iter().find(|r| r.pass).map(|r| r.trial);
    let mut class_counts: Vec<(String, usize)> = vec![];
    for r in &results {
        let name = match &r.report {
            Some(rep) if rep.enumeration_skipped => "skipped".to_string(),
            Some(rep) => rep.classification.name().to_string(),
            None => "error".to_string(),
        };
        match class_counts.iter_mut().find(|(n, _)| *n == name) {
            Some((_, c)) => *c += 1,
            None => class_counts.push((name, 1)),
        }
    }
    class_counts.sort();
    ClaimReport {
        g,
        p,
        k: cfg.k,
        s,
        mode,
        master_seed: seed,
        passes,
        pass_fraction: if trials == 0 { 0.0 } else { passes as f64 / trials as f64 },
        first_witness,
        class_counts,
        trials: results,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(g: usize, p: u64, mode: Mode, seed: u64) -> (AutContext, DieudonneLattice, LatticeVector) {
        let pt = sampler::sample(g, p, g, mode, seed, &SampleConfig::default()).unwrap();
        let model = pt.model().unwrap();
        let v = pt.vector(&model).unwrap();
        let m = model.dieudonne_span(&v).unwrap();
        (AutContext::new(&model).unwrap(), m, v)
    }

    fn one_plus_2w(ctx: &AutContext) -> AutMatrix {
        let f = ctx.small().field().clone();
        let d = vec![f.one(), f.zero(), f.gen()];
        let z = vec![f.zero(); 3];
        let g = ctx.g();
        let grid: DigitGrid = (0..g)
            .map(|l| (0..g).map(|i| if l == i { d.clone() } else { z.clone() }).collect())
            .collect();
        ctx.from_digit_grid(&grid, 3)
    }

    #[test]
    fn one_plus_2w_is_an_isometry_class_only_for_even_g() {
        let model = Lambda0::new(4, FieldCtx::new(2, 4).unwrap(), 9).unwrap();
        let ctx = AutContext::new(&model).unwrap();
        let a = one_plus_2w(&ctx);
        assert!(ctx.is_symplectic(&a).unwrap());
        // lift through the full space of Lambda_0 to Pi^8
        let target = 8;
        let space = stabilizer_space(&ctx, &model.lambda0_lattice(), &model.basis_x(1), target).unwrap();
        let lay = Layered {
            ctx: &ctx,
            space: &space,
            s: target,
            mode: Mode::Polarized,
            el: ctx.entry_layout(target),
        };
        let big = AutMatrix {
            s: target,
            entries: a.entries.iter().map(|r| r.iter().map(|x| lift_pc(x, target)).collect()).collect(),
        };
        let mut b = ctx.to_flat(&big);
        for level in 3..target {
            let gens = lay.gens(level);
            let cols = lay.linear_part(&gens, &b, level).unwrap();
            let (part, _) = lay.lift_space(&gens, &b, level, &cols).unwrap().expect("lift exists");
            b = lay.combine(&gens, &b, &part);
        }
        assert!(ctx.is_symplectic(&ctx.from_flat(&b, target)).unwrap());

        let model = Lambda0::new(5, FieldCtx::new(2, 5).unwrap(), 6).unwrap();
        let ctx = AutContext::new(&model).unwrap();
        assert!(!ctx.is_symplectic(&one_plus_2w(&ctx)).unwrap());
    }

    fn random_matrix(ctx: &AutContext, s: u32, seed: u64) -> AutMatrix {
        let mut rng = crate::seeds::rng_from_seed(seed);
        let f = ctx.small().field().clone();
        let g = ctx.g();
        let grid: DigitGrid = (0..g)
            .map(|_| (0..g).map(|_| (0..s).map(|_| f.random(&mut rng)).collect()).collect())
            .collect();
        ctx.from_digit_grid(&grid, s)
    }

    #[test]
    fn space_dimension_matches_membership_rank_at_level_one() {
        let (ctx, m, v) = setup(4, 3, Mode::Polarized, 11);
        let model = ctx.model().clone();
        let fq = model.field().clone();
        let f2 = ctx.small().field().clone();
        let g = ctx.g();
        let p = ctx.p();
        let flat = |w: &LatticeVector| -> Vec<u64> {
            w.coords.iter().flat_map(|c| fq.coords(&model.witt().residue(&c.c0))).collect()
        };
        // columns: images of the 2 g^2 unit matrices mod Pi, then F_p multiples of v mod Pi
        let mut rows = vec![];
        for l in 0..g {
            for i in 0..g {
                for t in 0..2 {
                    let mut grid: DigitGrid = vec![vec![vec![f2.zero()]; g]; g];
                    grid[l][i][0] = f2.monomial(t);
                    rows.push(flat(&ctx.aut_apply(&ctx.from_digit_grid(&grid, 1), &v)));
                }
            }
        }
        let n_aut = rows.len();
        let vbar: Vec<FieldElem> = v.coords.iter().map(|c| model.witt().residue(&c.c0)).collect();
        for t in 0..fq.deg() {
            let c = fq.monomial(t);
            rows.push(vbar.iter().flat_map(|x| fq.coords(&fq.mul(&c, x))).collect());
        }
        let ncols = rows[0].len();
        let rank_all = crate::linalg::rank(&rows, ncols, p);
        let rank_v = crate::linalg::rank(&rows[n_aut..], ncols, p);
        let rank = rank_all - rank_v;
        let space = stabilizer_space(&ctx, &m, &v, 1).unwrap();
        assert_eq!(space.dim(), 2 * g * g - rank);
        assert!(rank > 0);
    }

    #[test]
    fn aut_apply_commutes_with_f() {
        let (ctx, _, v) = setup(4, 2, Mode::Nonpolarized, 4);
        let model = ctx.model().clone();
        let n = model.precision();
        for seed in 0..5 {
            let a = random_matrix(&ctx, n, seed);
            let lhs = ctx.aut_apply(&a, &model.apply_f(&v));
            let rhs = model.apply_f(&ctx.aut_apply(&a, &v));
            assert_eq!(model.digits(&lhs), model.digits(&rhs));
        }
    }

    #[test]
    fn one_plus_p_od_stabilizes_for_g4() {
        for seed in 0..3 {
            let (ctx, m, v) = setup(4, 3, Mode::Nonpolarized, seed);
            let w = ctx.small();
            let n = ctx.model().precision();
            for t in 0..5 {
                let x = random_matrix(&ctx, n, 100 + t).entries[0][0].clone();
                let lambda = w.pc_add(&w.pc_int(1, n), &w.pc_mul(&w.pc_int(3, n), &x));
                assert!(scalar_action_check(&ctx, &m, &lambda, &v));
            }
            assert!(scalar_action_check(&ctx, &m, &w.pc_int(-1, n), &v));
        }
    }

    #[test]
    fn teichmuller_omega_does_not_stabilize_for_g5() {
        let (ctx, m, v) = setup(5, 3, Mode::Nonpolarized, 8);
        let w = ctx.small();
        let n = ctx.model().precision();
        let omega = w.pc_teichmuller(&w.field().gen(), n);
        assert!(!scalar_action_check(&ctx, &m, &omega, &v));
    }

    #[test]
    fn small_reports_are_product_closed() {
        let (ctx, m, v) = setup(2, 2, Mode::Polarized, 1);
        let rep = stabilizer_group(&ctx, &m, &v, 1, Mode::Polarized, DEFAULT_BUDGET).unwrap();
        let elems = report_elements(&ctx, &rep);
        assert_eq!(elems.len() as u64, rep.order.unwrap());
        assert!(is_product_closed(&ctx, &elems));
        assert!(rep.contains_expected_scalars);
    }

    #[test]
    fn orders_at_small_fields_are_stable() {
        // frozen from the layer-by-layer enumeration without shared linear
        // parts or the level-0 quadratic filter
        for (g, p, s, order) in [(4usize, 3u64, 2u32, 538002u64), (4, 2, 3, 17825792)] {
            let pt = sampler::sample(g, p, g, Mode::Polarized, 3, &SampleConfig::default()).unwrap();
            let model = pt.model().unwrap();
            let v = pt.vector(&model).unwrap();
            let m = model.dieudonne_span(&v).unwrap();
            let ctx = AutContext::new(&model).unwrap();
            let rep = stabilizer_group(&ctx, &m, &v, s, Mode::Polarized, DEFAULT_BUDGET).unwrap();
            assert_eq!(rep.order, Some(order), "g={g} p={p}");
        }
    }

    #[test]
    fn level0_quadratic_matches_the_symplectic_test() {
        let (ctx, m, v) = setup(4, 3, Mode::Polarized, 5);
        let space = stabilizer_space(&ctx, &m, &v, 3).unwrap();
        let lay = Layered {
            ctx: &ctx,
            space: &space,
            s: 1,
            mode: Mode::Polarized,
            el: ctx.entry_layout(1),
        };
        let gens = lay.gens(0);
        let q = lay.level0_quadratic(&gens).unwrap();
        let mut rng = crate::seeds::rng_from_seed(1);
        let zero = lay.el.zero();
        let mut hits = 0;
        for coef in crate::linalg::enumerate_affine(&vec![0; gens.len()], &digit_basis(gens.len()), 3) {
            let a = lay.truncated(&lay.combine(&gens, &zero, &coef), 0);
            let exact = ctx.is_symplectic(&a).unwrap();
            hits += exact as usize;
            if exact || rng.gen_range(0..20) == 0 {
                assert_eq!(q.vanishes_at(&coef), exact);
            }
        }
        assert!(hits > 1);
    }

    #[test]
    fn generic_degrees() {
        assert_eq!(generic_field_degree(4, 2, Mode::Polarized), 9);
        assert_eq!(generic_field_degree(5, 2, Mode::Nonpolarized), 10);
        assert_eq!(generic_field_degree(5, 3, Mode::Polarized), 14);
        assert_eq!(generic_field_degree(5, 3, Mode::Nonpolarized), 26);
        assert_eq!(generic_field_degree(4, 3, Mode::Nonpolarized), 17);
    }

    #[test]
    fn pi_matrix_sends_x_to_y() {
        let (ctx, _, _) = setup(4, 2, Mode::Nonpolarized, 1);
        let pi = ctx.scalar(&ctx.small().pc_pi(3));
        let model = ctx.model().clone();
        for i in 1..=4 {
            let y = ctx.aut_apply(&pi, &model.basis_x(i));
            assert_eq!(model.digits(&y)[..], model.digits(&model.basis_y(i))[..]);
        }
    }

    #[test]
    fn identity_and_minus_one_are_symplectic() {
        let (ctx, _, _) = setup(4, 3, Mode::Polarized, 2);
        for s in 1..4 {
            assert!(ctx.is_symplectic(&ctx.identity(s)).unwrap());
            assert!(ctx.is_symplectic(&ctx.int_scalar(-1, s)).unwrap());
        }
        assert!(!ctx.is_symplectic(&ctx.int_scalar(2, 3)).unwrap());
    }

    #[test]
    fn space_of_lambda0_is_everything() {
        let (ctx, _, v) = setup(4, 2, Mode::Nonpolarized, 3);
        let l0 = ctx.model().lambda0_lattice();
        let sp = stabilizer_space(&ctx, &l0, &v, 2).unwrap();
        assert_eq!(sp.dim(), 2 * 16 * 2);
    }
}
