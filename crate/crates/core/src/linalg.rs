//! Dense complex linear algebra needed by the Schmidt decomposition and the
//! dip fitter.
//!
//! Two independent routes to singular values are provided: a one-sided
//! (Hestenes) Jacobi SVD acting on the matrix columns, and a two-sided Jacobi
//! eigen-decomposition of the Hermitian Gram matrix `AᴴA`. They share no code
//! beyond the matrix container.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std inherent methods whenever std is in the graph
use num_traits::Float;

const MAX_SWEEPS: usize = 80;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Column-major copy as one vector per column.
    fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c)).collect())
            .collect()
    }

    /// `AᴴA`, a `cols × cols` Hermitian matrix.
    pub fn gram(&self) -> Self {
        let cols = self.columns();
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for p in 0..n {
            for q in p..n {
                let v = dot_conj(&cols[p], &cols[q]);
                g.set(p, q, v);
                g.set(q, p, v.conj());
            }
        }
        g
    }
}

/// `Σ conj(a_k)·b_k`, summed in index order.
fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Jacobi rotation parameters `(c, s)` that zero the coupling `g > 0` between
/// diagonal entries `a` and `b`.
fn rotation(a: f64, b: f64, g: f64) -> (f64, f64) {
    let zeta = (b - a) / (2.0 * g);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t)
}

/// Result of [`svd`]: singular values in descending order, and optionally the
/// left/right singular vectors as columns (`u[k]`, `v[k]` for value `k`).
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub left: Option<Vec<Vec<Complex64>>>,
    pub right: Option<Vec<Vec<Complex64>>>,
    pub sweeps: usize,
}

/// One-sided Jacobi SVD. Works on the transpose when `rows < cols` so the
/// rotated columns are always the longer dimension.
pub fn svd(matrix: &ComplexMatrix, vectors: bool) -> Svd {
    if matrix.rows < matrix.cols {
        let mut t = svd(&matrix.transpose(), vectors);
        // A = U S Vᴴ  <=>  Aᵀ = conj(V) S Uᵀ
        if vectors {
            let conj = |m: Option<Vec<Vec<Complex64>>>| {
                m.map(|cols| {
                    cols.into_iter()
                        .map(|c| c.into_iter().map(|z| z.conj()).collect())
                        .collect()
                })
            };
            let left = conj(t.right.take());
            let right = conj(t.left.take());
            t.left = left;
            t.right = right;
        }
        return t;
    }
    let n = matrix.cols;
    let mut a = matrix.columns();
    let mut v: Option<Vec<Vec<Complex64>>> = vectors.then(|| {
        (0..n)
            .map(|k| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[k] = Complex64::new(1.0, 0.0);
                e
            })
            .collect()
    });

    let total: f64 = a.iter().map(|c| norm_sqr(c)).sum();
    // columns this far below the Frobenius norm carry no resolvable information
    let negligible = total * 1e-300;
    let tol = f64::EPSILON * (matrix.rows as f64).sqrt();

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norm_sqr(&a[p]);
                let beta = norm_sqr(&a[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot_conj(&a[p], &a[q]);
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let (c, s) = rotation(alpha, beta, g);
                let pc = phase.conj();
                rotate_pair(&mut a, p, q, c, s, pc);
                if let Some(v) = v.as_mut() {
                    rotate_pair(v, p, q, c, s, pc);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = a.iter().enumerate().map(|(k, c)| (norm_sqr(c).sqrt(), k)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let singular_values = order.iter().map(|(s, _)| *s).collect();
    let (left, right) = if let Some(v) = v {
        let left = order
            .iter()
            .map(|&(s, k)| {
                if s > 0.0 {
                    a[k].iter().map(|z| z / s).collect()
                } else {
                    vec![Complex64::new(0.0, 0.0); matrix.rows]
                }
            })
            .collect();
        let right = order.iter().map(|&(_, k)| v[k].clone()).collect();
        (Some(left), Some(right))
    } else {
        (None, None)
    };
    Svd {
        singular_values,
        left,
        right,
        sweeps,
    }
}

/// `x_p ← c·x_p − s·φ*·x_q`, `x_q ← s·x_p + c·φ*·x_q` on column vectors.
fn rotate_pair(cols: &mut [Vec<Complex64>], p: usize, q: usize, c: f64, s: f64, phase_conj: Complex64) {
    let (head, tail) = cols.split_at_mut(q);
    let xp = &mut head[p];
    let xq = &mut tail[0];
    for (x, y) in xp.iter_mut().zip(xq.iter_mut()) {
        let yq = *y * phase_conj;
        let nx = *x * c - yq * s;
        let ny = *x * s + yq * c;
        *x = nx;
        *y = ny;
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic two-sided Jacobi rotations,
/// in descending order. Only the upper triangle's Hermitian structure is assumed.
pub fn hermitian_eigenvalues(matrix: &ComplexMatrix) -> Vec<f64> {
    assert_eq!(matrix.rows, matrix.cols, "Hermitian matrix must be square");
    let n = matrix.rows;
    let mut g = matrix.clone();
    let scale: f64 = g.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| g.get(p, q).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale * 1e-2 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let gpq = g.get(p, q);
                let mag = gpq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = gpq / mag;
                let (c, s) = rotation(g.get(p, p).re, g.get(q, q).re, mag);
                let pc = phase.conj();
                // G ← G·U with U_pp = c, U_pq = s, U_qp = −s·φ*, U_qq = c·φ*
                for k in 0..n {
                    let x = g.get(k, p);
                    let y = g.get(k, q) * pc;
                    g.set(k, p, x * c - y * s);
                    g.set(k, q, x * s + y * c);
                }
                // G ← Uᴴ·G
                let ph = phase;
                for k in 0..n {
                    let x = g.get(p, k);
                    let y = g.get(q, k) * ph;
                    g.set(p, k, x * c - y * s);
                    g.set(q, k, x * s + y * c);
                }
                g.set(p, q, Complex64::new(0.0, 0.0));
                g.set(q, p, Complex64::new(0.0, 0.0));
                let dp = g.get(p, p).re;
                let dq = g.get(q, q).re;
                g.set(p, p, Complex64::new(dp, 0.0));
                g.set(q, q, Complex64::new(dq, 0.0));
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|k| g.get(k, k).re).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

/// Singular values through the Gram route: `s_k = sqrt(max(eig_k(AᴴA), 0))`.
pub fn singular_values_via_gram(matrix: &ComplexMatrix) -> Vec<f64> {
    let g = if matrix.rows < matrix.cols {
        matrix.transpose().gram()
    } else {
        matrix.gram()
    };
    hermitian_eigenvalues(&g)
        .into_iter()
        .map(|e| e.max(0.0).sqrt())
        .collect()
}

/// Inverse of a small dense real matrix (row-major, `n × n`) by Gauss–Jordan
/// elimination with partial pivoting. `None` when singular to working precision.
pub fn invert(matrix: &[f64], n: usize) -> Option<Vec<f64>> {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&r1, &r2| a[r1 * n + col].abs().total_cmp(&a[r2 * n + col].abs()))?;
        if a[pivot * n + col].abs() <= scale * 1e-14 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let d = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                a[r * n + k] -= f * a[col * n + k];
                inv[r * n + k] -= f * inv[col * n + k];
            }
        }
    }
    Some(inv)
}
