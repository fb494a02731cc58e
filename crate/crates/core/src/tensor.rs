use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Dense cubic array `n x n x n`, row-major in `(i, j, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t[(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|x| *x *= factor);
    }

    /// `T'_{abc} = sum_{ijk} T_{ijk} M_{ia} M_{jb} M_{kc}`, applied one index
    /// at a time. `m` may be rectangular (`n x p`), producing a `p`-cube.
    pub fn transform(&self, m: &DMatrix<f64>) -> Tensor3 {
        self.transform_each(m, m, m)
    }

    /// Like [`Tensor3::transform`] with a separate matrix per index.
    pub fn transform_each(&self, m0: &DMatrix<f64>, m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> Tensor3 {
        let n = self.n;
        assert!(m0.nrows() == n && m1.nrows() == n && m2.nrows() == n);
        let p = m0.ncols();
        assert!(m1.ncols() == p && m2.ncols() == p, "output must be cubic");

        // contract k
        let mut t1 = vec![0.0; n * n * p];
        for i in 0..n {
            for j in 0..n {
                let row = &self.data[(i * n + j) * n..(i * n + j + 1) * n];
                for c in 0..p {
                    t1[(i * n + j) * p + c] = (0..n).map(|k| row[k] * m2[(k, c)]).sum();
                }
            }
        }
        // contract j
        let mut t2 = vec![0.0; n * p * p];
        for i in 0..n {
            for b in 0..p {
                for c in 0..p {
                    t2[(i * p + b) * p + c] =
                        (0..n).map(|j| t1[(i * n + j) * p + c] * m1[(j, b)]).sum();
                }
            }
        }
        // contract i
        let mut out = Tensor3::zeros(p);
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    out[(a, b, c)] = (0..n).map(|i| t2[(i * p + b) * p + c] * m0[(i, a)]).sum();
                }
            }
        }
        out
    }

    /// Largest deviation from full permutation symmetry, relative to the
    /// largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self[(i, j, k)];
                    for w in [
                        self[(i, k, j)],
                        self[(j, i, k)],
                        self[(j, k, i)],
                        self[(k, i, j)],
                        self[(k, j, i)],
                    ] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst / scale
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| self[(i, j, k)]).collect()).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[(i * self.n + j) * self.n + k]
    }
}

impl std::ops::IndexMut<(usize, usize, usize)> for Tensor3 {
    #[inline]
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[(i * self.n + j) * self.n + k]
    }
}
