//! Small dense linear algebra: symmetric eigenproblems (Householder
//! tridiagonalization + implicit QL), LU with partial pivoting and
//! Householder complements of a set of constraint vectors.

use crate::error::{Error, Result};

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    /// `max |A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n {
            for j in 0..i {
                m = m.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        m
    }

    /// Trailing principal block starting at `k`.
    pub fn trailing(&self, k: usize) -> Self {
        Self::from_fn(self.n - k, |i, j| self[(i + k, j + k)])
    }

    pub fn shifted_diag(&self, sigma: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= sigma;
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenvalues in ascending order; eigenvectors as the columns of
/// `vectors` when requested.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Matrix>,
}

impl SymmetricEigen {
    pub fn vector(&self, j: usize) -> Option<Vec<f64>> {
        self.vectors.as_ref().map(|v| v.column(j))
    }
}

/// Full eigendecomposition of a symmetric matrix. Only the lower triangle
/// is read.
pub fn symmetric_eigen(a: &Matrix, want_vectors: bool) -> Result<SymmetricEigen> {
    let n = a.dim();
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: want_vectors.then(|| Matrix::zeros(0)),
        });
    }
    if a.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure("matrix has non-finite entries".into()));
    }
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e, want_vectors);
    tql2(&mut d, &mut e, want_vectors.then_some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| Matrix::from_fn(n, |i, j| v[(i, order[j])]));
    Ok(SymmetricEigen { values, vectors })
}

// Householder reduction to tridiagonal form. On return `d` holds the
// diagonal and `e[1..]` the subdiagonal. With `accumulate` the orthogonal
// transform is left in `v`.
fn tred2(v: &mut Matrix, d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let n = v.dim();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);
            for j in 0..i {
                let f = d[j];
                v[(j, i)] = f;
                let mut g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = v[(j, j)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal matrix (d, e), updating `v` if given.
fn tql2(d: &mut [f64], e: &mut [f64], mut v: Option<&mut Matrix>) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::EigenFailure(format!(
                        "QL iteration stalled at index {l}"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d[l + 2..].iter_mut() {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let h = v[(k, i + 1)];
                            v[(k, i + 1)] = s * v[(k, i)] + c * h;
                            v[(k, i)] = c * v[(k, i)] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails with [`Error::Singular`] on an exactly zero pivot.
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] / pivot;
                lu[(i, k)] = m;
                if m != 0.0 {
                    let (top, bottom) = lu.data.split_at_mut(i * n);
                    let rk = &top[k * n + k + 1..k * n + n];
                    let ri = &mut bottom[k + 1..n];
                    for (x, y) in ri.iter_mut().zip(rk) {
                        *x -= m * y;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.dim();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = dot(&self.lu.row(i)[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s = dot(&self.lu.row(i)[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    /// Smallest `|u_kk| / max |u_kk|`, a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        let n = self.lu.dim();
        let piv: Vec<f64> = (0..n).map(|k| self.lu[(k, k)].abs()).collect();
        let max = piv.iter().cloned().fold(0.0, f64::max);
        piv.iter().cloned().fold(f64::INFINITY, f64::min) / max
    }
}

/// Solves `A x = b` with one step of iterative refinement.
pub fn solve_refined(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let lu = Lu::factor(a)?;
    let mut x = lu.solve(b);
    let r: Vec<f64> = a
        .mul_vec(&x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| bi - ax)
        .collect();
    let dx = lu.solve(&r);
    for (xi, di) in x.iter_mut().zip(dx) {
        *xi += di;
    }
    Ok(x)
}

/// Eigenvector for an eigenvalue estimate `lambda` by inverse iteration.
pub fn inverse_iteration(a: &Matrix, lambda: f64) -> Result<Vec<f64>> {
    let n = a.dim();
    let scale = a.data.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let mut shifted = a.shifted_diag(lambda);
    let lu = match Lu::factor(&shifted) {
        Ok(lu) => lu,
        Err(_) => {
            shifted = a.shifted_diag(lambda + 1e3 * f64::EPSILON * scale);
            Lu::factor(&shifted)?
        }
    };
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i * 7919) % 31) as f64 / 31.0)
        .collect();
    for _ in 0..4 {
        let y = lu.solve(&x);
        let nrm = norm(&y);
        if !(nrm.is_finite() && nrm > 0.0) {
            return Err(Error::EigenFailure("inverse iteration broke down".into()));
        }
        x = y.into_iter().map(|v| v / nrm).collect();
    }
    Ok(x)
}

/// Orthogonal `Q = H₁⋯H_m` whose first `m` columns span the given vectors.
#[derive(Debug, Clone)]
pub struct HouseholderBasis {
    n: usize,
    reflectors: Vec<(Vec<f64>, f64)>,
}

impl HouseholderBasis {
    /// Rejects sets whose `R` has a diagonal below `1e−10` relative to the
    /// vector norm.
    pub fn new(vectors: &[Vec<f64>]) -> Result<Self> {
        let m = vectors.len();
        let n = vectors.first().map_or(0, Vec::len);
        if vectors.iter().any(|v| v.len() != n) || m > n {
            return Err(Error::invalid(
                "constraint vectors have inconsistent lengths",
            ));
        }
        let mut cols: Vec<Vec<f64>> = vectors.to_vec();
        let mut reflectors = Vec::with_capacity(m);
        for j in 0..m {
            let orig = norm(&vectors[j]);
            let x = &cols[j][j..];
            let alpha = norm(x);
            if !(alpha > 1e-10 * orig) {
                return Err(Error::invalid(format!(
                    "constraint {j} is linearly dependent on the others"
                )));
            }
            let mut u = vec![0.0; n];
            let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
            u[j..].copy_from_slice(x);
            u[j] += sign * alpha;
            let tau = 2.0 / dot(&u, &u);
            for c in cols.iter_mut().skip(j) {
                let s = tau * dot(&u, c);
                for (ci, ui) in c.iter_mut().zip(&u) {
                    *ci -= s * ui;
                }
            }
            reflectors.push((u, tau));
        }
        Ok(Self { n, reflectors })
    }

    pub fn rank(&self) -> usize {
        self.reflectors.len()
    }

    /// `Qᵀ A Q`.
    pub fn conjugate(&self, a: &Matrix) -> Matrix {
        let n = self.n;
        let mut b = a.clone();
        for (u, tau) in &self.reflectors {
            // B ← H B H with H = I − τ u uᵀ
            let w = b.mul_vec(u);
            let k = 0.5 * tau * dot(u, &w);
            let z: Vec<f64> = w
                .iter()
                .zip(u)
                .map(|(wi, ui)| tau * (wi - k * ui))
                .collect();
            for i in 0..n {
                for j in 0..n {
                    b[(i, j)] -= u[i] * z[j] + z[i] * u[j];
                }
            }
        }
        b
    }

    /// `Q x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for (u, tau) in self.reflectors.iter().rev() {
            let s = tau * dot(u, &y);
            for (yi, ui) in y.iter_mut().zip(u) {
                *yi -= s * ui;
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> Matrix {
        Matrix::from_fn(n, |i, j| {
            let (i, j) = (i.min(j) as f64, i.max(j) as f64);
            1.0 / (1.0 + i + j) + if i == j { i * i } else { 0.0 }
        })
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let a = test_matrix(12);
        let eig = symmetric_eigen(&a, true).unwrap();
        let v = eig.vectors.as_ref().unwrap();
        for j in 0..12 {
            let x = v.column(j);
            let ax = a.mul_vec(&x);
            for i in 0..12 {
                assert!((ax[i] - eig.values[j] * x[i]).abs() < 1e-12 * (1.0 + eig.values[j].abs()));
            }
        }
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn values_only_path_matches() {
        let a = test_matrix(20);
        let with = symmetric_eigen(&a, true).unwrap().values;
        let without = symmetric_eigen(&a, false).unwrap().values;
        for (x, y) in with.iter().zip(&without) {
            assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn diagonal_and_tiny_cases() {
        let a = Matrix::from_fn(3, |i, j| if i == j { [3.0, -1.0, 2.0][i] } else { 0.0 });
        assert_eq!(
            symmetric_eigen(&a, false).unwrap().values,
            vec![-1.0, 2.0, 3.0]
        );
        let one = Matrix::from_fn(1, |_, _| 5.0);
        assert_eq!(symmetric_eigen(&one, true).unwrap().values, vec![5.0]);
    }

    #[test]
    fn lu_solves_and_flags_singular() {
        let a = test_matrix(9);
        let b: Vec<f64> = (0..9).map(|i| i as f64 - 3.0).collect();
        let x = solve_refined(&a, &b).unwrap();
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-12);
        }
        let s = Matrix::from_fn(2, |_, _| 1.0);
        assert!(matches!(Lu::factor(&s), Err(Error::Singular(_))));
    }

    #[test]
    fn householder_complement_is_orthogonal_to_constraints() {
        let c1: Vec<f64> = (0..6).map(|i| 1.0 + i as f64).collect();
        let c2: Vec<f64> = (0..6).map(|i| ((i * i) as f64).sin()).collect();
        let q = HouseholderBasis::new(&[c1.clone(), c2.clone()]).unwrap();
        for j in 2..6 {
            let mut e = vec![0.0; 6];
            e[j] = 1.0;
            let col = q.apply(&e);
            assert!(dot(&col, &c1).abs() < 1e-12);
            assert!(dot(&col, &c2).abs() < 1e-12);
            assert!((norm(&col) - 1.0).abs() < 1e-12);
        }
        let dup = HouseholderBasis::new(&[c1.clone(), c1.iter().map(|x| 2.0 * x).collect()]);
        assert!(dup.is_err());
    }

    #[test]
    fn conjugate_matches_explicit_product() {
        let a = test_matrix(5);
        let c: Vec<f64> = vec![1.0, -2.0, 0.5, 0.0, 3.0];
        let q = HouseholderBasis::new(&[c]).unwrap();
        let b = q.conjugate(&a);
        let qm = Matrix::from_fn(5, |i, j| {
            let mut e = vec![0.0; 5];
            e[j] = 1.0;
            q.apply(&e)[i]
        });
        for i in 0..5 {
            for j in 0..5 {
                let mut s = 0.0;
                for k in 0..5 {
                    for l in 0..5 {
                        s += qm[(k, i)] * a[(k, l)] * qm[(l, j)];
                    }
                }
                assert!((s - b[(i, j)]).abs() < 1e-12);
            }
        }
    }
}
