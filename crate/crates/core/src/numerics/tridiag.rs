//! Thomas algorithm for tridiagonal systems.

use crate::Real;

/// Tridiagonal matrix stored by diagonals. Row `i` reads
/// `lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1]`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![T::zero(); n],
            diag: vec![T::zero(); n],
            upper: vec![T::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc = acc + self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    acc = acc + self.upper[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Solves `A x = rhs` without pivoting. Returns `None` when a pivot
    /// vanishes or the result is not finite; diagonally dominant systems
    /// (every Jacobian built by the solver) never hit that.
    pub fn solve(&self, rhs: &[T]) -> Option<Vec<T>> {
        let n = self.len();
        assert_eq!(rhs.len(), n, "rhs length must match matrix size");
        if n == 0 {
            return Some(Vec::new());
        }
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let mut pivot = self.diag[0];
        if pivot == T::zero() {
            return None;
        }
        c[0] = self.upper[0] / pivot;
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            if pivot == T::zero() {
                return None;
            }
            c[i] = self.upper[i] / pivot;
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / pivot;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] = x[i] - c[i] * x[i + 1];
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn matches_dense_elimination() {
        let n = 9;
        let mut m = Tridiagonal::<f64>::zeros(n);
        for i in 0..n {
            m.diag[i] = 4.0 + (i as f64).sin();
            m.lower[i] = -1.0 + 0.1 * i as f64;
            m.upper[i] = -0.5 - 0.05 * i as f64;
        }
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            dense[i][i] = m.diag[i];
            if i > 0 {
                dense[i][i - 1] = m.lower[i];
            }
            if i + 1 < n {
                dense[i][i + 1] = m.upper[i];
            }
        }
        let expect = dense_solve(&mut dense, &mut rhs.clone());
        let got = m.solve(&rhs).unwrap();
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-13, "{g} vs {e}");
        }
        let back = m.mul_vec(&got);
        for (b, r) in back.iter().zip(&rhs) {
            assert!((b - r).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let m = Tridiagonal::<f64>::zeros(3);
        assert!(m.solve(&[1.0, 1.0, 1.0]).is_none());
    }
}
