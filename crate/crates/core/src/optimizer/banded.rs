//! Banded LU with partial pivoting for the block-bidiagonal shooting Jacobian.

use crate::scalar::Scalar;

/// Square matrix with `kl` sub- and `ku` super-diagonals.
///
/// Rows keep `kl` extra columns on the right for fill-in from row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![T::zero(); n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.width || i >= self.n || j >= self.n {
            None
        } else {
            Some(i * self.width + off as usize)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Sets an entry; panics outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let off = j as isize - i as isize;
        assert!(
            off >= -(self.kl as isize) && off <= self.ku as isize,
            "entry ({i}, {j}) outside band"
        );
        let s = self.slot(i, j).expect("index in range");
        self.data[s] = v;
    }

    /// Solves `A x = b` in place of `b`, consuming the matrix. `None` if singular.
    pub fn solve(mut self, b: &mut [T]) -> Option<()> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let reach = self.ku + self.kl;
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let mut piv = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if !(best > T::zero()) || !best.is_finite() {
                return None;
            }
            let jmax = (k + reach).min(n - 1);
            if piv != k {
                for j in k..=jmax {
                    let a = self.get(k, j);
                    let c = self.get(piv, j);
                    self.put(k, j, c);
                    self.put(piv, j, a);
                }
                b.swap(k, piv);
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last {
                let l = self.get(i, k) / pivot;
                if l == T::zero() {
                    continue;
                }
                self.put(i, k, T::zero());
                for j in k + 1..=jmax {
                    let v = self.get(i, j) - l * self.get(k, j);
                    self.put(i, j, v);
                }
                let bk = b[k];
                b[i] -= l * bk;
            }
        }
        for k in (0..n).rev() {
            let jmax = (k + reach).min(n - 1);
            let mut s = b[k];
            for j in k + 1..=jmax {
                s -= self.get(k, j) * b[j];
            }
            b[k] = s / self.get(k, k);
        }
        Some(())
    }

    #[inline]
    fn put(&mut self, i: usize, j: usize, v: T) {
        let s = self.slot(i, j).expect("fill-in stays inside storage");
        self.data[s] = v;
    }
}
