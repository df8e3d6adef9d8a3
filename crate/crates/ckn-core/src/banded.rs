//! Banded matrices: symmetric products and an LU factorization with partial
//! pivoting.

use crate::error::{CknError, Result};
use crate::scalar::Real;

/// Square matrix with `kl` sub- and `ku` super-diagonals, stored by rows.
/// Row `i` holds columns `i - kl ..= i + ku` (out-of-range slots unused).
#[derive(Debug, Clone)]
pub(crate) struct Banded<T: Real> {
    n: usize,
    kl: usize,
    ku: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Real> Banded<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, rows: vec![vec![T::zero(); kl + ku + 1]; n] }
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku || j >= self.n {
            None
        } else {
            Some(j + self.kl - i)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.rows[i][s])
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let s = self.slot(i, j).expect("entry inside band");
        self.rows[i][s] = self.rows[i][s] + v;
    }

    /// `Lᵀ diag(w) L` for a banded `L`; the result is symmetric.
    pub fn gram(l: &Banded<T>, w: &[T]) -> Self {
        let bw = l.kl + l.ku;
        let mut g = Self::zeros(l.n, bw, bw);
        for k in 0..l.n {
            let lo = k.saturating_sub(l.kl);
            let hi = (k + l.ku).min(l.n - 1);
            for i in lo..=hi {
                let a = l.get(k, i) * w[k];
                if a == T::zero() {
                    continue;
                }
                for j in lo..=hi {
                    g.add(i, j, a * l.get(k, j));
                }
            }
        }
        g
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Copy with `c·d` added to the diagonal.
    pub fn shifted(&self, c: T, d: &[T]) -> Self {
        let mut out = self.clone();
        for (i, &di) in d.iter().enumerate() {
            out.add(i, i, c * di);
        }
        out
    }

    pub fn lu(&self) -> Result<BandedLu<T>> {
        BandedLu::factor(self)
    }
}

/// LU factors of a banded matrix, row pivoting within the band.
#[derive(Debug, Clone)]
pub(crate) struct BandedLu<T: Real> {
    n: usize,
    // Row i of U starts at column i.
    u: Vec<Vec<T>>,
    l: Vec<Vec<T>>,
    piv: Vec<usize>,
}

impl<T: Real> BandedLu<T> {
    fn factor(a: &Banded<T>) -> Result<Self> {
        let n = a.n;
        let kl = a.kl;
        // Working rows aligned so that slot 0 is column i - kl; pivoting can
        // push fill up to kl + ku columns right of the diagonal.
        let span = 2 * kl + a.ku + 1;
        let mut w: Vec<Vec<T>> = (0..n)
            .map(|i| {
                let mut r = vec![T::zero(); span];
                for j in i.saturating_sub(kl)..=(i + a.ku).min(n - 1) {
                    r[j + kl - i] = a.get(i, j);
                }
                r
            })
            .collect();
        // Column index of slot s in working row i is i + s - kl.
        let col = |i: usize, s: usize| (i + s).wrapping_sub(kl);
        let mut piv = vec![0; n];
        let mut l = vec![vec![T::zero(); kl]; n];
        let mut scale = T::zero();
        for r in &w {
            for v in r {
                scale = scale.max(v.abs());
            }
        }
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = T::zero();
            for i in k..=last {
                let v = w[i][k + kl - i];
                if v.abs() > best {
                    best = v.abs();
                    p = i;
                }
            }
            if best <= scale * T::epsilon() * T::epsilon() {
                return Err(CknError::Singular(k));
            }
            piv[k] = p;
            if p != k {
                // Realign row p to row k's slot convention before swapping.
                let mut rp = vec![T::zero(); span];
                let mut rk = vec![T::zero(); span];
                for s in 0..span {
                    let c = col(p, s);
                    if c < n && c + kl >= k && c + kl - k < span {
                        rp[c + kl - k] = w[p][s];
                    }
                    let c = col(k, s);
                    if c < n && c + kl >= p && c + kl - p < span {
                        rk[c + kl - p] = w[k][s];
                    }
                }
                w[k] = rp;
                w[p] = rk;
            }
            let pivot = w[k][kl];
            for i in k + 1..=last {
                let si = k + kl - i;
                let f = w[i][si] / pivot;
                l[k][i - k - 1] = f;
                if f == T::zero() {
                    continue;
                }
                w[i][si] = T::zero();
                for s in kl..span {
                    let c = col(k, s);
                    if c >= n {
                        break;
                    }
                    let t = c + kl - i;
                    if t < span {
                        w[i][t] = w[i][t] - f * w[k][s];
                    }
                }
            }
        }
        let u = (0..n).map(|i| w[i][kl..].to_vec()).collect();
        Ok(Self { n, u, l, piv })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for (d, &f) in self.l[k].iter().enumerate() {
                let i = k + 1 + d;
                if i < n {
                    x[i] = x[i] - f * xk;
                }
            }
        }
        for i in (0..n).rev() {
            let row = &self.u[i];
            let mut acc = x[i];
            for (s, &v) in row.iter().enumerate().skip(1) {
                let j = i + s;
                if j >= n {
                    break;
                }
                acc = acc - v * x[j];
            }
            x[i] = acc / row[0];
        }
        x
    }
}
