//! Subgroups of a finite abelian p-group `prod Z/p^{n_t}` with a
//! filtration by levels: `p^e` in coordinate `t` sits at level `base_t + 2e`.
//!
//! A subgroup is stored as an echelon: for every level, basis elements
//! whose leading digit vectors are in echelon form. The order of the
//! subgroup is `p^(number of basis elements)`.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::linalg::inv_p;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    p: u64,
    nexp: Vec<u32>,
    base: Vec<u32>,
    mods: Vec<u64>,
    // level -> (coordinate, exponent)
    level_coords: Vec<Vec<(usize, u32)>>,
}

impl Layout {
    pub fn new(p: u64, nexp: Vec<u32>, base: Vec<u32>) -> Layout {
        assert_eq!(nexp.len(), base.len());
        let mods = nexp.iter().map(|&n| p.pow(n)).collect();
        let nlev = nexp
            .iter()
            .zip(&base)
            .filter(|(&n, _)| n > 0)
            .map(|(&n, &b)| b + 2 * (n - 1) + 1)
            .max()
            .unwrap_or(0);
        let mut level_coords = vec![vec![]; nlev as usize];
        for (t, (&n, &b)) in nexp.iter().zip(&base).enumerate() {
            for e in 0..n {
                level_coords[(b + 2 * e) as usize].push((t, e));
            }
        }
        Layout {
            p,
            nexp,
            base,
            mods,
            level_coords,
        }
    }

    /// Coordinates of `b` placed after those of `a`, with levels shifted by `offset`.
    pub fn concat(a: &Layout, b: &Layout, offset: u32) -> Layout {
        assert_eq!(a.p, b.p);
        let mut nexp = a.nexp.clone();
        nexp.extend_from_slice(&b.nexp);
        let mut base = a.base.clone();
        base.extend(b.base.iter().map(|&x| x + offset));
        Layout::new(a.p, nexp, base)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.nexp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nexp.is_empty()
    }

    pub fn levels(&self) -> u32 {
        self.level_coords.len() as u32
    }

    pub fn modulus(&self, t: usize) -> u64 {
        self.mods[t]
    }

    /// `log_p` of the order of the whole group.
    pub fn total_length(&self) -> usize {
        self.nexp.iter().map(|&n| n as usize).sum()
    }

    pub fn level_width(&self, level: u32) -> usize {
        self.level_coords
            .get(level as usize)
            .map(|v| v.len())
            .unwrap_or(0)
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.len()]
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.mods)
            .map(|((&x, &y), &m)| ((x as u128 + y as u128) % m as u128) as u64)
            .collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.mods)
            .map(|((&x, &y), &m)| ((x as u128 + m as u128 - y as u128 % m as u128) % m as u128) as u64)
            .collect()
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter()
            .zip(&self.mods)
            .map(|(&x, &m)| (x as u128 * c as u128 % m as u128) as u64)
            .collect()
    }

    fn axpy_neg(&self, x: &mut [u64], c: u64, h: &[u64]) {
        // x -= c h
        for ((xi, &hi), &m) in x.iter_mut().zip(h).zip(&self.mods) {
            if hi == 0 {
                continue;
            }
            let m = m as u128;
            let sub = c as u128 * hi as u128 % m;
            *xi = ((*xi as u128 + m - sub) % m) as u64;
        }
    }

    /// Smallest level with a nonzero digit, or `None` for zero.
    pub fn valuation(&self, x: &[u64]) -> Option<u32> {
        let p = self.p;
        let mut best: Option<u32> = None;
        for (t, &v) in x.iter().enumerate() {
            if v == 0 {
                continue;
            }
            let mut e = 0u32;
            let mut w = v;
            while w % p == 0 {
                w /= p;
                e += 1;
            }
            let l = self.base[t] + 2 * e;
            best = Some(best.map_or(l, |b| b.min(l)));
        }
        best
    }

    /// Digit vector at `level`, assuming all lower-level digits vanish.
    pub fn digits(&self, x: &[u64], level: u32) -> Vec<u64> {
        let p = self.p;
        self.level_coords[level as usize]
            .iter()
            .map(|&(t, e)| (x[t] / p.pow(e)) % p)
            .collect()
    }

    /// Element with the given digit vector at `level` and nothing else.
    pub fn from_digits(&self, d: &[u64], level: u32) -> Vec<u64> {
        let mut x = self.zero();
        for (&(t, e), &c) in self.level_coords[level as usize].iter().zip(d) {
            x[t] = c * self.p.pow(e);
        }
        x
    }
}

#[derive(Debug, Clone)]
struct BasisElem {
    x: Vec<u64>,
    d: Vec<u64>,
    pivot: usize,
}

/// A subgroup in filtered echelon form.
#[derive(Debug, Clone)]
pub struct Echelon {
    layout: Arc<Layout>,
    levels: Vec<Vec<BasisElem>>,
}

impl Echelon {
    pub fn new(layout: Arc<Layout>) -> Echelon {
        let n = layout.levels() as usize;
        Echelon {
            layout,
            levels: vec![vec![]; n],
        }
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    /// Reduce `x` against the basis at levels below `upto`. Returns the
    /// first level whose digit vector is not in the span, with `x` reduced
    /// so that its leading digits at that level are the returned residual.
    pub fn reduce(&self, x: &mut [u64], upto: u32) -> Option<(u32, Vec<u64>)> {
        let p = self.layout.p;
        let upto = upto.min(self.layout.levels());
        for level in 0..upto {
            if self.layout.level_width(level) == 0 {
                continue;
            }
            let mut d = self.layout.digits(x, level);
            if d.iter().all(|&c| c == 0) {
                continue;
            }
            for h in &self.levels[level as usize] {
                let c = d[h.pivot];
                if c == 0 {
                    continue;
                }
                for (di, &hi) in d.iter_mut().zip(&h.d) {
                    *di = (*di + (p - c) * hi % p) % p;
                }
                self.layout.axpy_neg(x, c, &h.x);
            }
            if d.iter().any(|&c| c != 0) {
                return Some((level, d));
            }
        }
        None
    }

    /// Add `x` to the subgroup (closing under the group law).
    pub fn insert(&mut self, x: &[u64]) -> bool {
        let p = self.layout.p;
        let mut queue = VecDeque::new();
        queue.push_back(x.to_vec());
        let mut grew = false;
        while let Some(mut y) = queue.pop_front() {
            let Some((level, mut d)) = self.reduce(&mut y, u32::MAX) else {
                continue;
            };
            let pivot = d.iter().position(|&c| c != 0).unwrap();
            let c = inv_p(d[pivot], p);
            if c != 1 {
                y = self.layout.scale(&y, c);
                for di in d.iter_mut() {
                    *di = *di * c % p;
                }
            }
            let py = self.layout.scale(&y, p);
            self.levels[level as usize].push(BasisElem { x: y, d, pivot });
            grew = true;
            if py.iter().any(|&v| v != 0) {
                queue.push_back(py);
            }
        }
        grew
    }

    pub fn insert_all<'a, I: IntoIterator<Item = &'a Vec<u64>>>(&mut self, xs: I) {
        for x in xs {
            self.insert(x);
        }
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        let mut y = x.to_vec();
        self.reduce(&mut y, u32::MAX).is_none()
    }

    /// `log_p` of the order.
    pub fn length(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }

    /// Number of basis elements at each level (the `F_p`-dimension of the
    /// graded piece).
    pub fn graded_dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    pub fn basis(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.levels.iter().flatten().map(|h| &h.x)
    }

    pub fn basis_at(&self, level: u32) -> impl Iterator<Item = &Vec<u64>> {
        self.levels[level as usize].iter().map(|h| &h.x)
    }

    /// Digit vectors spanning the graded piece at `level`.
    pub fn level_digit_basis(&self, level: u32) -> Vec<Vec<u64>> {
        self.levels[level as usize].iter().map(|h| h.d.clone()).collect()
    }

    /// Whether every element of `other` lies in `self`.
    pub fn contains_group(&self, other: &Echelon) -> bool {
        other.basis().all(|x| self.contains(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_orders() {
        // Z/8 x Z/2 with generator (2, 1): order 4
        let l = Arc::new(Layout::new(2, vec![3, 1], vec![0, 0]));
        let mut e = Echelon::new(l.clone());
        e.insert(&vec![2, 1]);
        assert_eq!(e.length(), 2);
        assert!(e.contains(&[4, 0]));
        assert!(e.contains(&[6, 1]));
        assert!(!e.contains(&[4, 1]));
        assert!(!e.contains(&[1, 0]));
    }

    #[test]
    fn brute_force_subgroup_order() {
        // Z/9 x Z/3 x Z/9 generated by two random-ish elements
        let l = Arc::new(Layout::new(3, vec![2, 1, 2], vec![0, 1, 1]));
        let gens = vec![vec![3, 1, 2], vec![6, 2, 3]];
        let mut e = Echelon::new(l.clone());
        e.insert_all(&gens);
        let mut all = std::collections::HashSet::new();
        for a in 0..9u64 {
            for b in 0..9u64 {
                let x = l.add(&l.scale(&gens[0], a), &l.scale(&gens[1], b));
                all.insert(x);
            }
        }
        assert_eq!(3usize.pow(e.length() as u32), all.len());
        for x in &all {
            assert!(e.contains(x));
        }
    }
}
