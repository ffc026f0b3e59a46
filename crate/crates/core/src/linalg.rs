//! Dense linear algebra over `F_p`.

use crate::ffq::pow_mod;

#[inline]
pub fn inv_p(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Reduced row echelon form in place. Returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<u64>>, ncols: usize, p: u64) -> Vec<usize> {
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = inv_p(rows[r][c], p);
        if inv != 1 {
            for x in rows[r].iter_mut() {
                *x = (*x as u128 * inv as u128 % p as u128) as u64;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = p - row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if y != 0 {
                    *x = ((*x as u128 + f as u128 * y as u128) % p as u128) as u64;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<u64>], ncols: usize, p: u64) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols, p).len()
}

/// Basis of `{x : A x = 0}` for `A` given by rows.
pub fn kernel(rows: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols, p);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = vec![];
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = (p - row[free]) % p;
        }
        out.push(v);
    }
    out
}

/// Kernel of the matrix whose columns are `cols` (each of length `nrows`).
pub fn kernel_of_columns(cols: &[Vec<u64>], nrows: usize, p: u64) -> Vec<Vec<u64>> {
    let rows: Vec<Vec<u64>> = (0..nrows)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    kernel(&rows, cols.len(), p)
}

/// Solutions of `A x = b`: a particular solution and a kernel basis, or
/// `None` if inconsistent.
pub fn solve(rows: &[Vec<u64>], rhs: &[u64], ncols: usize, p: u64) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let mut aug: Vec<Vec<u64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut r = r.clone();
            r.push(b % p);
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1, p);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![0u64; ncols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[ncols];
    }
    Some((x, kernel(rows, ncols, p)))
}

/// Multiply a matrix (rows) by a vector.
pub fn mat_vec(rows: &[Vec<u64>], x: &[u64], p: u64) -> Vec<u64> {
    rows.iter()
        .map(|r| {
            (r.iter()
                .zip(x)
                .map(|(&a, &b)| a as u128 * b as u128)
                .sum::<u128>()
                % p as u128) as u64
        })
        .collect()
}

/// All `F_p`-combinations `base + sum c_i v_i`, in counter order.
pub fn enumerate_affine(base: &[u64], basis: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let mut out = vec![base.to_vec()];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for c in 0..p {
            for x in &out {
                next.push(
                    x.iter()
                        .zip(b)
                        .map(|(&u, &v)| ((u as u128 + c as u128 * v as u128) % p as u128) as u64)
                        .collect(),
                );
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_vectors_are_annihilated() {
        let p = 5;
        let a = vec![vec![1, 2, 3, 4], vec![2, 4, 1, 3], vec![3, 1, 4, 2]];
        let ker = kernel(&a, 4, p);
        assert_eq!(ker.len() + rank(&a, 4, p), 4);
        for v in &ker {
            assert!(mat_vec(&a, v, p).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_detects_inconsistency() {
        let p = 3;
        let a = vec![vec![1, 1], vec![2, 2]];
        assert!(solve(&a, &[1, 1], 2, p).is_none());
        let (x, ker) = solve(&a, &[1, 2], 2, p).unwrap();
        assert_eq!(mat_vec(&a, &x, p), vec![1, 2]);
        assert_eq!(ker.len(), 1);
    }
}
