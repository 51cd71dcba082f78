//! Exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::poly::MultiPoly;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Matrix {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    let v = &self[(r, j)] * &f;
                    self[(i, j)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Basis of the right null space, itself in reduced row echelon form.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Rat>> {
    let mut r = m.clone();
    let pivots = r.rref();
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() {
        return Vec::new();
    }
    let raw: Vec<Vec<Rat>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); m.cols];
            v[f] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, f)].clone();
            }
            v
        })
        .collect();
    let mut b = Matrix::from_rows(raw).expect("uniform rows");
    let k = b.rref().len();
    (0..k).map(|i| b.row(i).to_vec()).collect()
}

/// Lexicographic k-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Whether hyperplanes given by linear forms in `n+1` variables are in
/// general position: every subset of size `min(q, n+1)` is linearly
/// independent (which covers all smaller subsets too).
pub fn hyperplanes_general_position(forms: &[MultiPoly]) -> Result<bool> {
    let coeffs = forms
        .iter()
        .map(|f| f.linear_coefficients().ok_or(Error::NotLinear))
        .collect::<Result<Vec<_>>>()?;
    let Some(first) = coeffs.first() else {
        return Ok(true);
    };
    let dim = first.len();
    if coeffs.iter().any(|c| c.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: coeffs.iter().map(Vec::len).find(|&l| l != dim).unwrap(),
        });
    }
    let k = coeffs.len().min(dim);
    for subset in combinations(coeffs.len(), k) {
        let m = Matrix::from_rows(subset.iter().map(|&i| coeffs[i].clone()).collect())?;
        if m.rank() < k {
            return Ok(false);
        }
    }
    Ok(true)
}
