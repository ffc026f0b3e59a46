//! Moore matrices and the semilinear systems
//!
//! `sum_i (s a_i^{sigma^j} z_i + a_i z_i^{sigma^j}) = d_j`, `j in J`,
//!
//! solved by restriction of scalars to `F_p`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffq::{FieldCtx, FieldElem};
use crate::linalg;

/// `n x n` matrix with entry `(i, j) = sigma^{step j - shift}(x_i)`.
pub fn moore_matrix(f: &FieldCtx, xs: &[FieldElem], step: i64, shift: i64) -> Vec<Vec<FieldElem>> {
    let n = xs.len();
    xs.iter()
        .map(|x| {
            (0..n)
                .map(|j| f.frobenius(x, step * j as i64 - shift))
                .collect()
        })
        .collect()
}

/// Linear independence over `F_{p^2}`, via the Moore determinant with
/// `sigma^2`-steps.
pub fn is_fp2_independent(f: &FieldCtx, xs: &[FieldElem]) -> bool {
    if xs.is_empty() {
        return true;
    }
    if xs.len() > f.k() {
        return false;
    }
    let m = moore_matrix(f, xs, 2, 0);
    !f.is_zero(&f.det(&m))
}

/// Number of unknowns at a level: `floor((g-1)/2)`.
pub fn unknown_count(g: usize) -> usize {
    (g - 1) / 2
}

/// Exponent set `{1 <= j < g-1-l, j = g+l mod 2}`.
pub fn level_exponents(g: usize, l: usize) -> Vec<u32> {
    (1..(g as i64 - 1 - l as i64).max(1))
        .filter(|j| (j - (g + l) as i64).rem_euclid(2) == 0)
        .map(|j| j as u32)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilinearSystem {
    pub g: usize,
    /// `+1` or `-1`.
    pub sign: i8,
    pub coeffs: Vec<FieldElem>,
    pub exps: Vec<u32>,
    pub consts: Vec<FieldElem>,
}

impl SemilinearSystem {
    /// The homogeneous system of level 0: sign `(-1)^{g-1}`, `J = J_0`.
    pub fn homogeneous(f: &FieldCtx, g: usize, coeffs: Vec<FieldElem>) -> SemilinearSystem {
        Self::for_level(f, g, 0, coeffs, None)
    }

    /// The system at level `l`, sign `(-1)^{g-1+l}`; zero constants if none given.
    pub fn for_level(
        f: &FieldCtx,
        g: usize,
        l: usize,
        coeffs: Vec<FieldElem>,
        consts: Option<Vec<FieldElem>>,
    ) -> SemilinearSystem {
        let exps = level_exponents(g, l);
        let consts = consts.unwrap_or_else(|| vec![f.zero(); exps.len()]);
        SemilinearSystem {
            g,
            sign: if (g - 1 + l) % 2 == 0 { 1 } else { -1 },
            coeffs,
            exps,
            consts,
        }
    }

    pub fn unknowns(&self) -> usize {
        self.coeffs.len()
    }

    /// Left-hand sides at `z`.
    pub fn eval(&self, f: &FieldCtx, z: &[FieldElem]) -> Vec<FieldElem> {
        self.exps
            .iter()
            .map(|&j| {
                let mut acc = f.zero();
                for (a, zi) in self.coeffs.iter().zip(z) {
                    let t1 = f.mul(&f.frobenius(a, j as i64), zi);
                    let t2 = f.mul(a, &f.frobenius(zi, j as i64));
                    acc = if self.sign == 1 {
                        f.add(&acc, &t1)
                    } else {
                        f.sub(&acc, &t1)
                    };
                    acc = f.add(&acc, &t2);
                }
                acc
            })
            .collect()
    }

    /// Residuals `lhs(z) - d`.
    pub fn residual(&self, f: &FieldCtx, z: &[FieldElem]) -> Vec<FieldElem> {
        self.eval(f, z)
            .iter()
            .zip(&self.consts)
            .map(|(a, d)| f.sub(a, d))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSpace {
    /// `None` when the system has no solution over the working field.
    pub particular: Option<Vec<FieldElem>>,
    /// `F_p`-basis of the homogeneous solutions.
    pub kernel: Vec<Vec<FieldElem>>,
}

impl SolutionSpace {
    pub fn is_consistent(&self) -> bool {
        self.particular.is_some()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    /// `particular + sum c_i kernel_i` for `c` in `F_p^dim`.
    pub fn point(&self, f: &FieldCtx, c: &[u64]) -> Option<Vec<FieldElem>> {
        let mut z = self.particular.clone()?;
        for (ci, k) in c.iter().zip(&self.kernel) {
            for (zi, ki) in z.iter_mut().zip(k) {
                *zi = f.add(zi, &f.scale(ki, *ci));
            }
        }
        Some(z)
    }

    pub fn random_point<R: Rng + ?Sized>(&self, f: &FieldCtx, rng: &mut R) -> Option<Vec<FieldElem>> {
        let c: Vec<u64> = (0..self.kernel.len()).map(|_| rng.gen_range(0..f.p())).collect();
        self.point(f, &c)
    }

    /// Every solution; intended for small kernels.
    pub fn enumerate(&self, f: &FieldCtx) -> Vec<Vec<FieldElem>> {
        let Some(_) = &self.particular else {
            return vec![];
        };
        let zero = vec![0u64; self.kernel.len()];
        let ids: Vec<Vec<u64>> = (0..self.kernel.len())
            .map(|i| {
                let mut v = zero.clone();
                v[i] = 1;
                v
            })
            .collect();
        linalg::enumerate_affine(&zero, &ids, f.p())
            .into_iter()
            .map(|c| self.point(f, &c).unwrap())
            .collect()
    }
}

fn flatten(z: &[FieldElem]) -> Vec<u64> {
    z.iter().flat_map(|x| x.0.iter().copied()).collect()
}

fn unflatten(f: &FieldCtx, v: &[u64]) -> Vec<FieldElem> {
    v.chunks(f.deg()).map(|c| FieldElem(c.to_vec())).collect()
}

/// Solve by writing the left-hand side as an `F_p`-linear map
/// `F_p^{2kn} -> F_p^{2k|J|}`.
pub fn solve(f: &FieldCtx, sys: &SemilinearSystem) -> Result<SolutionSpace> {
    if sys.consts.len() != sys.exps.len() {
        return Err(Error::InvalidSystem("one constant per exponent required".into()));
    }
    if !is_fp2_independent(f, &sys.coeffs) {
        return Err(Error::InvalidSystem(
            "coefficients are dependent over F_{p^2}".into(),
        ));
    }
    let n = sys.unknowns();
    let deg = f.deg();
    let ncols = n * deg;
    let nrows = sys.exps.len() * deg;
    let mut cols = Vec::with_capacity(ncols);
    for i in 0..n {
        for t in 0..deg {
            let mut z = vec![f.zero(); n];
            z[i] = f.monomial(t);
            cols.push(flatten(&sys.eval(f, &z)));
        }
    }
    let rows: Vec<Vec<u64>> = (0..nrows)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    let rhs = flatten(&sys.consts);
    match linalg::solve(&rows, &rhs, ncols, f.p()) {
        Some((x, ker)) => Ok(SolutionSpace {
            particular: Some(unflatten(f, &x)),
            kernel: ker.iter().map(|k| unflatten(f, k)).collect(),
        }),
        None => Ok(SolutionSpace {
            particular: None,
            kernel: linalg::kernel(&rows, ncols, f.p())
                .iter()
                .map(|k| unflatten(f, k))
                .collect(),
        }),
    }
}

/// Number of solutions of the homogeneous system, `p^dim ker`.
pub fn count_homogeneous(f: &FieldCtx, sys: &SemilinearSystem) -> Result<u128> {
    let mut h = sys.clone();
    h.consts = vec![f.zero(); h.exps.len()];
    let sol = solve(f, &h)?;
    Ok((f.p() as u128).pow(sol.kernel_dim() as u32))
}

/// `F_p`-basis of the kernel of `sigma + 1` (an element with `e^sigma = -e`).
pub fn antiinvariant_element(f: &FieldCtx) -> FieldElem {
    let cols: Vec<Vec<u64>> = (0..f.deg())
        .map(|t| {
            let m = f.monomial(t);
            f.add(&f.frobenius(&m, 1), &m).0
        })
        .collect();
    let ker = linalg::kernel_of_columns(&cols, f.deg(), f.p());
    FieldElem(ker[0].clone())
}

/// All homogeneous solutions in the form `x = B a` with `B` over `F_{p^2}`,
/// `B_{il} = (-1)^g sigma^g(B_{li})`.
pub fn param_solutions(f: &FieldCtx, a: &[FieldElem], g: usize) -> Result<Vec<Vec<FieldElem>>> {
    let n = a.len();
    if n != unknown_count(g) {
        return Err(Error::InvalidArgument(format!(
            "expected {} coefficients for g = {g}",
            unknown_count(g)
        )));
    }
    let fp2 = f.subfield_elements(2)?;
    let diag: Vec<FieldElem> = if g % 2 == 0 {
        fp2.clone()
    } else {
        let eps = antiinvariant_element(f);
        (0..f.p()).map(|c| f.scale(&eps, c)).collect()
    };
    let sign_g = if g % 2 == 0 { 1 } else { -1 };
    // parameter slots: diagonal entries, then upper entries (i < l)
    let mut slots: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    for i in 0..n {
        for l in i + 1..n {
            slots.push((i, l));
        }
    }
    let mut out = vec![];
    let mut idx = vec![0usize; slots.len()];
    loop {
        let mut b = vec![vec![f.zero(); n]; n];
        for (s, &(i, l)) in slots.iter().enumerate() {
            if i == l {
                b[i][i] = diag[idx[s]].clone();
            } else {
                let v = fp2[idx[s]].clone();
                let tw = f.frobenius(&v, g as i64);
                b[l][i] = if sign_g == 1 { tw } else { f.neg(&tw) };
                b[i][l] = v;
            }
        }
        let x: Vec<FieldElem> = (0..n)
            .map(|i| {
                let mut acc = f.zero();
                for l in 0..n {
                    acc = f.add(&acc, &f.mul(&b[i][l], &a[l]));
                }
                acc
            })
            .collect();
        out.push(x);
        // next parameter choice
        let mut s = 0;
        loop {
            if s == slots.len() {
                return Ok(out);
            }
            idx[s] += 1;
            let lim = if slots[s].0 == slots[s].1 { diag.len() } else { fp2.len() };
            if idx[s] < lim {
                break;
            }
            idx[s] = 0;
            s += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moore_examples() {
        let f = FieldCtx::new(2, 2).unwrap();
        assert!(!is_fp2_independent(&f, &[f.zero()]));
        assert!(is_fp2_independent(&f, &[f.one()]));
        let t = f.gen();
        let m = moore_matrix(&f, &[f.one(), t.clone()], 2, 0);
        // det = t^4 - t
        let expect = f.sub(&f.pow(&t, 4), &t);
        assert_eq!(f.det(&m), expect);
        assert!(!f.is_zero(&expect));
        let f4 = FieldCtx::new(2, 1).unwrap();
        assert!(!is_fp2_independent(&f4, &[f4.one(), f4.gen()]));
    }

    #[test]
    fn exponent_sets() {
        assert_eq!(level_exponents(4, 0), vec![2]);
        assert_eq!(level_exponents(5, 0), vec![1, 3]);
        assert_eq!(level_exponents(6, 0), vec![2, 4]);
        assert_eq!(level_exponents(5, 1), vec![2]);
        assert_eq!(level_exponents(5, 2), vec![1]);
        assert_eq!(level_exponents(5, 3), Vec::<u32>::new());
        assert_eq!(level_exponents(2, 0), Vec::<u32>::new());
    }

    #[test]
    fn counts_match_product_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (g, p, expect) in [(4usize, 2u64, 4u128), (5, 3, 81), (6, 2, 64)] {
            let f = FieldCtx::new(p, g).unwrap();
            let n = unknown_count(g);
            let a = loop {
                let a: Vec<FieldElem> = (0..n).map(|_| f.random(&mut rng)).collect();
                if is_fp2_independent(&f, &a) {
                    break a;
                }
            };
            let sys = SemilinearSystem::homogeneous(&f, g, a.clone());
            assert_eq!(count_homogeneous(&f, &sys).unwrap(), expect);
            let params = param_solutions(&f, &a, g).unwrap();
            assert_eq!(params.len() as u128, expect);
            for x in &params {
                assert!(sys.residual(&f, x).iter().all(|r| f.is_zero(r)));
            }
        }
    }
}
