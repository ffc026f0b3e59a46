//! Generators `v` of Dieudonne lattices `M = D v` with `a(M) = 1` and
//! `M_tau = Lambda_0`, self-dual in the polarized case.
//!
//! Polarized sampling fixes the coordinates `i <= ceil((g+1)/2)` freely and
//! solves for the remaining digits level by level. The constants of each
//! level's system are read off from the pairing digits of the current
//! trial vector, never derived symbolically.

use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffq::{FieldCtx, FieldElem, FieldSpec};
use crate::lattice::{Lambda0, LatticeVector};
use crate::seeds::rng_from_seed;
use crate::semilinear::{self, is_fp2_independent, level_exponents, SemilinearSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Polarized,
    Nonpolarized,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "polarized" => Ok(Mode::Polarized),
            "nonpolarized" => Ok(Mode::Nonpolarized),
            other => Err(Error::InvalidArgument(format!("unknown mode {other}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Polarized => "polarized",
            Mode::Nonpolarized => "nonpolarized",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    /// Redraws of the free digits at a level before restarting.
    pub level_retries: u32,
    /// Restarts from level 0 before extending the field.
    pub restarts: u32,
    /// How many times `k` may grow by `g`.
    pub extensions: u32,
    /// Pi-precision; defaults to `g + 1`.
    pub precision: Option<u32>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            level_retries: 8,
            restarts: 256,
            extensions: 1,
            precision: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempts {
    pub level_redraws: u32,
    pub restarts: u32,
    pub extensions: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub level: usize,
    pub exps: Vec<u32>,
    /// Constants `d_j` of the solved system.
    pub consts: Vec<FieldElem>,
    pub kernel_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub g: usize,
    pub p: u64,
    pub k: usize,
    pub precision: u32,
    pub mode: Mode,
    pub seed: u64,
    pub field: FieldSpec,
    /// `digits[i][l]` is `a_{i+1, l}`.
    pub digits: Vec<Vec<FieldElem>>,
    pub trace: Vec<LevelTrace>,
    pub attempts: Attempts,
}

impl SamplePoint {
    /// Rebuild the model this point lives in.
    pub fn model(&self) -> Result<Arc<Lambda0>> {
        let f = FieldCtx::from_spec(&self.field)?;
        Lambda0::new(self.g, f, self.precision)
    }

    pub fn vector(&self, model: &Lambda0) -> Result<LatticeVector> {
        model.from_digits(&self.digits)
    }

    pub fn leading_digits(&self) -> Vec<FieldElem> {
        self.digits.iter().map(|d| d[0].clone()).collect()
    }
}

pub fn default_precision(g: usize) -> u32 {
    g as u32 + 1
}

/// Number of freely chosen coordinates, `ceil((g+1)/2)`.
pub fn free_count(g: usize) -> usize {
    (g + 2) / 2
}

fn check_params(g: usize, p: u64, k: usize) -> Result<()> {
    if g < 2 {
        return Err(Error::InvalidArgument("g must be at least 2".into()));
    }
    if !crate::ffq::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if k < g {
        return Err(Error::InvalidArgument(format!(
            "k = {k} < g = {g}: no g independent elements over F_p^2"
        )));
    }
    Ok(())
}

fn random_independent<R: Rng + ?Sized>(f: &FieldCtx, count: usize, rng: &mut R) -> Vec<FieldElem> {
    loop {
        let xs: Vec<FieldElem> = (0..count).map(|_| f.random(rng)).collect();
        if is_fp2_independent(f, &xs) {
            return xs;
        }
    }
}

/// Leading digits at position `(l + j - g)/2` of `<v, F^j v>` for `j` in `exps`.
pub fn level_residuals(model: &Lambda0, v: &LatticeVector, l: usize, exps: &[u32]) -> Result<Vec<FieldElem>> {
    let g = model.g() as i32;
    let mut out = vec![];
    for &j in exps {
        let pos = (l as i32 + j as i32 - g).div_euclid(2);
        let fj = model.apply_f_pow(v, j);
        let val = model.pair(v, &fj);
        if let Some(vv) = model.pvalue_valuation(&val) {
            if vv < pos {
                return Err(Error::Internal(format!(
                    "<v, F^{j} v> has valuation {vv} below {pos} at level {l}"
                )));
            }
        }
        out.push(model.pvalue_digit(&val, pos)?);
    }
    Ok(out)
}

fn fresh_digits<R: Rng + ?Sized>(model: &Lambda0, rng: &mut R) -> Vec<Vec<FieldElem>> {
    let f = model.field();
    let g = model.g();
    let n = model.precision() as usize;
    let h = free_count(g);
    let lead = random_independent(f, h, rng);
    (0..g)
        .map(|i| {
            (0..n)
                .map(|l| {
                    if i < h {
                        if l == 0 {
                            lead[i].clone()
                        } else {
                            f.random(rng)
                        }
                    } else if l + 1 >= g {
                        f.random(rng)
                    } else {
                        f.zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// One attempt at a polarized point inside a fixed model. Returns `None`
/// when the retry budget is exhausted.
fn polarized_in<R: Rng + ?Sized>(
    model: &Arc<Lambda0>,
    rng: &mut R,
    cfg: &SampleConfig,
    attempts: &mut Attempts,
) -> Result<Option<(Vec<Vec<FieldElem>>, Vec<LevelTrace>)>> {
    let f = model.field().clone();
    let g = model.g();
    let h = free_count(g);
    let nunk = g - h;
    for restart in 0..cfg.restarts.max(1) {
        if restart > 0 {
            attempts.restarts += 1;
        }
        let mut digits = fresh_digits(model, rng);
        let mut trace = vec![];
        let mut ok = true;
        for l in 0..g.saturating_sub(1) {
            if nunk == 0 {
                break;
            }
            let exps = level_exponents(g, l);
            if exps.is_empty() {
                for kk in 0..nunk {
                    digits[g - 1 - kk][l] = f.random(rng);
                }
                trace.push(LevelTrace {
                    level: l,
                    exps,
                    consts: vec![],
                    kernel_dim: nunk * f.deg(),
                });
                continue;
            }
            let mut solved = false;
            for attempt in 0..cfg.level_retries.max(1) {
                if attempt > 0 {
                    attempts.level_redraws += 1;
                    if l == 0 {
                        let lead = random_independent(&f, h, rng);
                        for (i, a) in lead.into_iter().enumerate() {
                            digits[i][0] = a;
                        }
                    } else {
                        for row in digits.iter_mut().take(h) {
                            row[l] = f.random(rng);
                        }
                    }
                }
                for kk in 0..nunk {
                    digits[g - 1 - kk][l] = f.zero();
                }
                let v = model.from_digits(&digits)?;
                let r0 = level_residuals(model, &v, l, &exps)?;
                let coeffs: Vec<FieldElem> = (0..nunk).map(|i| digits[i][0].clone()).collect();
                let consts: Vec<FieldElem> = r0.iter().map(|r| f.neg(r)).collect();
                let sys = SemilinearSystem::for_level(&f, g, l, coeffs, Some(consts.clone()));
                let sol = semilinear::solve(&f, &sys)?;
                let Some(z) = sol.random_point(&f, rng) else {
                    continue;
                };
                for (kk, zk) in z.iter().enumerate() {
                    digits[g - 1 - kk][l] = zk.clone();
                }
                let v = model.from_digits(&digits)?;
                let r = level_residuals(model, &v, l, &exps)?;
                if r.iter().any(|x| !f.is_zero(x)) {
                    return Err(Error::Internal(format!(
                        "level {l} residuals do not vanish after solving"
                    )));
                }
                trace.push(LevelTrace {
                    level: l,
                    exps: exps.clone(),
                    consts,
                    kernel_dim: sol.kernel_dim(),
                });
                solved = true;
                break;
            }
            if !solved {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let lead: Vec<FieldElem> = digits.iter().map(|d| d[0].clone()).collect();
        if !is_fp2_independent(&f, &lead) {
            // not expected; counted as a restart
            continue;
        }
        return Ok(Some((digits, trace)));
    }
    Ok(None)
}

fn nonpolarized_in<R: Rng + ?Sized>(model: &Arc<Lambda0>, rng: &mut R) -> Vec<Vec<FieldElem>> {
    let f = model.field();
    let g = model.g();
    let n = model.precision() as usize;
    let lead = random_independent(f, g, rng);
    (0..g)
        .map(|i| {
            (0..n)
                .map(|l| if l == 0 { lead[i].clone() } else { f.random(rng) })
                .collect()
        })
        .collect()
}

/// Sample inside a given model (no field extension).
pub fn sample_in(model: &Arc<Lambda0>, mode: Mode, seed: u64, cfg: &SampleConfig) -> Result<SamplePoint> {
    let f = model.field();
    check_params(model.g(), f.p(), f.k())?;
    let mut rng = rng_from_seed(seed);
    let mut attempts = Attempts::default();
    let (digits, trace) = match mode {
        Mode::Nonpolarized => (nonpolarized_in(model, &mut rng), vec![]),
        Mode::Polarized => polarized_in(model, &mut rng, cfg, &mut attempts)?.ok_or_else(|| {
            Error::SamplingFailure(format!(
                "no consistent system after {} restarts",
                cfg.restarts
            ))
        })?,
    };
    Ok(SamplePoint {
        g: model.g(),
        p: f.p(),
        k: f.k(),
        precision: model.precision(),
        mode,
        seed,
        field: f.spec(),
        digits,
        trace,
        attempts,
    })
}

/// Sample with the retry policy, extending `k` by `g` if a field is exhausted.
pub fn sample(g: usize, p: u64, k: usize, mode: Mode, seed: u64, cfg: &SampleConfig) -> Result<SamplePoint> {
    check_params(g, p, k)?;
    let n = cfg.precision.unwrap_or(default_precision(g));
    let mut k = k;
    let mut extensions = 0;
    loop {
        let model = Lambda0::new(g, FieldCtx::new(p, k)?, n)?;
        match sample_in(&model, mode, seed, cfg) {
            Ok(mut pt) => {
                pt.attempts.extensions = extensions;
                return Ok(pt);
            }
            Err(Error::SamplingFailure(msg)) => {
                if extensions >= cfg.extensions {
                    return Err(Error::SamplingFailure(msg));
                }
                extensions += 1;
                k += g;
            }
            Err(e) => return Err(e),
        }
    }
}

pub fn sample_polarized(g: usize, p: u64, k: usize, seed: u64) -> Result<SamplePoint> {
    sample(g, p, k, Mode::Polarized, seed, &SampleConfig::default())
}

pub fn sample_nonpolarized(g: usize, p: u64, k: usize, seed: u64) -> Result<SamplePoint> {
    sample(g, p, k, Mode::Nonpolarized, seed, &SampleConfig::default())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: Mode,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Run every structural check on `v`; failures are report entries.
pub fn verify_point(model: &Arc<Lambda0>, v: &LatticeVector, mode: Mode) -> VerifyReport {
    let g = model.g();
    let f = model.field();
    let mut checks = vec![];
    let mut push = |name: &str, pass: bool, detail: String| {
        checks.push(Check {
            name: name.to_string(),
            pass,
            detail,
        })
    };
    let lead: Vec<FieldElem> = v.coords.iter().map(|c| model.witt().residue(&c.c0)).collect();
    push(
        "independence",
        is_fp2_independent(f, &lead),
        "leading digits independent over F_p^2".into(),
    );
    match model.dieudonne_span(v) {
        Err(e) => push("span", false, e.to_string()),
        Ok(m) => {
            push("span", true, format!("length {}", m.length()));
            let c = m.containment_level();
            push(
                "containment",
                c.is_some_and(|c| c as usize <= g - 1),
                format!("{c:?}"),
            );
            let col = m.colength();
            push(
                "colength",
                col.as_ref().ok() == Some(&(g * (g - 1) / 2)),
                format!("{col:?}"),
            );
            let prof = m.filtration_profile();
            let expect: Vec<usize> = (0..prof.len()).map(|l| (l + 1).min(g)).collect();
            push("profile", prof == expect, format!("{prof:?}"));
            let a = m.a_number();
            push("a_number", a.as_ref().ok() == Some(&1), format!("{a:?}"));
            let t = m.tau_closure();
            push("tau_closure", t.is_lambda0(), format!("length {}", t.length()));
        }
    }
    if mode == Mode::Polarized {
        match model.selfdual_check(v) {
            Ok(r) => push("selfdual", r.pass, serde_json::to_string(&r.entries).unwrap_or_default()),
            Err(e) => push("selfdual", false, e.to_string()),
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport { mode, checks, pass }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityCertificate {
    /// Column subsets (out of `0..g`) joined with the last column, and
    /// whether the corresponding minor is nonzero.
    pub minors: Vec<(Vec<usize>, bool)>,
    pub moore_invertible: bool,
    pub generic: bool,
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// Maximal minors of `(a_{i,0}^{sigma^{2j}})`, `i <= floor(g/2)+1`,
/// `j = 0..g`, that involve the last column, plus Moore invertibility of
/// all leading digits.
pub fn genericity_certificate(f: &FieldCtx, lead: &[FieldElem]) -> GenericityCertificate {
    let g = lead.len();
    let r = (g / 2 + 1).min(g);
    let rows: Vec<Vec<FieldElem>> = lead[..r]
        .iter()
        .map(|a| (0..=g).map(|j| f.frobenius(a, 2 * j as i64)).collect())
        .collect();
    let minors = combinations(g, r - 1)
        .into_iter()
        .map(|cols| {
            let m: Vec<Vec<FieldElem>> = rows
                .iter()
                .map(|row| {
                    let mut v: Vec<FieldElem> = cols.iter().map(|&c| row[c].clone()).collect();
                    v.push(row[g].clone());
                    v
                })
                .collect();
            let nz = !f.is_zero(&f.det(&m));
            (cols, nz)
        })
        .collect::<Vec<_>>();
    let moore_invertible = is_fp2_independent(f, lead);
    let generic = moore_invertible && minors.iter().all(|(_, b)| *b);
    GenericityCertificate {
        minors,
        moore_invertible,
        generic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use crate::lattice::PValued;

    #[test]
    fn residual_map_matches_semilinear_system() {
        // moving the level-l unknowns changes <v, F^j v> at position
        // (l + j - g)/2 by exactly the left-hand side of the level system
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (g, p) in [(4usize, 3u64), (5, 2), (5, 3), (6, 2)] {
            let model = Lambda0::new(g, FieldCtx::new(p, g).unwrap(), g as u32 + 1).unwrap();
            let f = model.field().clone();
            let w = model.witt().clone();
            let h = free_count(g);
            let nunk = g - h;
            for l in 0..g - 1 {
                let exps = level_exponents(g, l);
                if exps.is_empty() {
                    continue;
                }
                let mut digits = fresh_digits(&model, &mut rng);
                for row in digits.iter_mut().skip(h) {
                    for d in row.iter_mut().take(l) {
                        *d = f.random(&mut rng);
                    }
                }
                let v0 = model.from_digits(&digits).unwrap();
                let z: Vec<FieldElem> = (0..nunk).map(|_| f.random(&mut rng)).collect();
                for (kk, zk) in z.iter().enumerate() {
                    digits[g - 1 - kk][l] = zk.clone();
                }
                let v1 = model.from_digits(&digits).unwrap();
                let coeffs: Vec<FieldElem> = (0..nunk).map(|i| digits[i][0].clone()).collect();
                let sys = SemilinearSystem::for_level(&f, g, l, coeffs, None);
                let lhs = sys.eval(&f, &z);
                for (&j, c) in exps.iter().zip(&lhs) {
                    let pos = (l as i32 + j as i32 - g as i32) / 2;
                    let q0 = model.pair(&v0, &model.apply_f_pow(&v0, j));
                    let q1 = model.pair(&v1, &model.apply_f_pow(&v1, j));
                    let diff = PValued {
                        shift: q0.shift,
                        q: w.sub(&q1.q, &q0.q),
                    };
                    if let Some(val) = model.pvalue_valuation(&diff) {
                        assert!(val >= pos, "g={g} p={p} l={l} j={j}");
                    }
                    assert_eq!(&model.pvalue_digit(&diff, pos).unwrap(), c, "g={g} p={p} l={l} j={j}");
                }
            }
        }
    }

    #[test]
    fn g5_level0_constants_match_closed_form() {
        let model = Lambda0::new(5, FieldCtx::new(3, 5).unwrap(), 6).unwrap();
        let f = model.field().clone();
        let pt = sample_in(&model, Mode::Polarized, 17, &SampleConfig::default()).unwrap();
        let a3 = &pt.digits[2][0];
        let t0 = &pt.trace[0];
        assert_eq!(t0.exps, vec![1, 3]);
        for (j, d) in t0.exps.iter().zip(&t0.consts) {
            let expect = f.neg(&f.mul(a3, &f.frobenius(a3, *j as i64)));
            assert_eq!(d, &expect);
        }
    }

    #[test]
    fn even_g_level0_constants_match_closed_form() {
        let model = Lambda0::new(4, FieldCtx::new(3, 4).unwrap(), 5).unwrap();
        let f = model.field().clone();
        let pt = sample_in(&model, Mode::Polarized, 5, &SampleConfig::default()).unwrap();
        let a2 = &pt.digits[1][0];
        let a3 = &pt.digits[2][0];
        let t0 = &pt.trace[0];
        for (j, d) in t0.exps.iter().zip(&t0.consts) {
            let j = *j as i64;
            let expect = f.add(
                &f.neg(&f.mul(a2, &f.frobenius(a3, j))),
                &f.mul(&f.frobenius(a2, j), a3),
            );
            assert_eq!(d, &expect);
        }
    }

    #[test]
    fn sampled_points_verify() {
        for (g, p, mode) in [(4usize, 2u64, Mode::Polarized), (5, 3, Mode::Polarized), (4, 2, Mode::Nonpolarized)] {
            let pt = sample(g, p, g, mode, 99, &SampleConfig::default()).unwrap();
            let model = pt.model().unwrap();
            let v = pt.vector(&model).unwrap();
            let rep = verify_point(&model, &v, mode);
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn x1_is_not_a_generator() {
        let model = Lambda0::new(4, FieldCtx::new(2, 4).unwrap(), 5).unwrap();
        let rep = verify_point(&model, &model.basis_x(1), Mode::Nonpolarized);
        assert!(!rep.pass);
        assert!(!rep.check("independence").unwrap().pass);
    }

    #[test]
    fn k_below_g_is_rejected() {
        assert!(matches!(
            sample_nonpolarized(4, 2, 3, 1),
            Err(Error::InvalidArgument(_))
        ));
    }
}
