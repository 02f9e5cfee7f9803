//! Fourier–Galerkin matrix of the linearized operator `L = M + ω − ψ`.
//!
//! Full-space vectors are indexed by the mode `n ∈ [−N, N]` (slot `n + N`).
//! A real vector `v` stands for the real function whose even part has
//! coefficients `v` and whose odd part has coefficients `−i v`, so the
//! Euclidean dot product is `∫ f g / L0` and `L` acts as a real symmetric
//! matrix. The even subspace uses the orthonormal basis `1, √2 cos(κₙx)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm, HouseholderBasis, Matrix};
use crate::multiplier::{wavenumber, MultiplierSymbol};
use crate::profile::{FourierProfile, SineSeries};

/// Tail level above which [`assemble`] attaches an under-resolution warning.
pub const RESOLUTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GalerkinOperator {
    truncation: usize,
    period: f64,
    speed: f64,
    symbol: MultiplierSymbol,
    theta: Vec<f64>,
    psi: Vec<f64>,
    warning: Option<String>,
}

/// Assembles `L` at the truncation of `psi`.
pub fn assemble(psi: &FourierProfile, speed: f64, sym: &MultiplierSymbol) -> GalerkinOperator {
    GalerkinOperator::new(psi, speed, sym, psi.truncation()).expect("truncation equals that of psi")
}

impl GalerkinOperator {
    pub fn new(
        psi: &FourierProfile,
        speed: f64,
        sym: &MultiplierSymbol,
        truncation: usize,
    ) -> Result<Self> {
        if psi.truncation() > truncation {
            return Err(Error::invalid(format!(
                "profile has {} modes, operator truncation is {truncation}",
                psi.truncation()
            )));
        }
        if !speed.is_finite() {
            return Err(Error::invalid("speed must be finite"));
        }
        let period = psi.period();
        let theta = (0..=truncation)
            .map(|n| sym.at_mode(n as i64, period))
            .collect();
        let psi_c = (0..=2 * truncation).map(|n| psi.coeff(n as i64)).collect();
        let tail = psi.tail_ratio();
        let warning = (tail > RESOLUTION_TOL)
            .then(|| format!("profile tail ratio {tail:.2e} exceeds {RESOLUTION_TOL:.0e}; spectrum may be under-resolved"));
        Ok(Self {
            truncation,
            period,
            speed,
            symbol: *sym,
            theta,
            psi: psi_c,
            warning,
        })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn symbol(&self) -> &MultiplierSymbol {
        &self.symbol
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    /// Size `2N + 1` of the full space.
    pub fn dim(&self) -> usize {
        2 * self.truncation + 1
    }

    pub fn index(&self, n: i64) -> usize {
        (n + self.truncation as i64) as usize
    }

    pub fn mode(&self, i: usize) -> i64 {
        i as i64 - self.truncation as i64
    }

    #[inline]
    fn psi_hat(&self, n: i64) -> f64 {
        self.psi[n.unsigned_abs() as usize]
    }

    // θ + (ω − ψ̂₀): grouping keeps the entries invariant under the
    // Galilean gauge ψ → ψ + α, ω → ω + α.
    #[inline]
    fn diag(&self, n: i64) -> f64 {
        self.theta[n.unsigned_abs() as usize] + (self.speed - self.psi[0])
    }

    /// Matrix entry between modes `m` and `n`.
    pub fn entry(&self, m: i64, n: i64) -> f64 {
        if m == n {
            self.diag(n)
        } else {
            -self.psi_hat(m - n)
        }
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim(), |i, j| self.entry(self.mode(i), self.mode(j)))
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                let m = self.mode(i);
                (0..d).map(|j| self.entry(m, self.mode(j)) * v[j]).sum()
            })
            .collect()
    }

    /// Block on the even subspace, basis `1, √2 cos(κₙx)`, `n = 0..=N`.
    pub fn even_matrix(&self) -> Matrix {
        let s2 = std::f64::consts::SQRT_2;
        Matrix::from_fn(self.truncation + 1, |i, j| {
            let (m, n) = (i as i64, j as i64);
            match (m, n) {
                (0, 0) => self.diag(0),
                (0, _) | (_, 0) => -s2 * self.psi_hat(m + n),
                _ => {
                    let d = if m == n {
                        self.diag(m) + self.psi[0]
                    } else {
                        0.0
                    };
                    d - self.psi_hat(m - n) - self.psi_hat(m + n)
                }
            }
        })
    }

    /// Block on the odd subspace, basis `√2 sin(κₙx)`, `n = 1..=N`.
    pub fn odd_matrix(&self) -> Matrix {
        Matrix::from_fn(self.truncation, |i, j| {
            let (m, n) = (i as i64 + 1, j as i64 + 1);
            let d = if m == n {
                self.diag(m) + self.psi[0]
            } else {
                0.0
            };
            d - self.psi_hat(m - n) + self.psi_hat(m + n)
        })
    }

    /// Full-space vector of an even profile.
    pub fn even_vector(&self, f: &FourierProfile) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                if self.mode(i).unsigned_abs() as usize <= self.truncation {
                    f.coeff(self.mode(i))
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Full-space vector of an odd function given as a sine series.
    pub fn odd_vector(&self, s: &SineSeries) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let n = self.mode(i);
                let c = s
                    .coeffs
                    .get(n.unsigned_abs() as usize)
                    .copied()
                    .unwrap_or(0.0);
                0.5 * n.signum() as f64 * c
            })
            .collect()
    }

    /// Full-space vector of `ψ'`, the expected kernel direction.
    pub fn kernel_vector(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let n = self.mode(i);
                -wavenumber(n, self.period) * self.psi_hat(n)
            })
            .collect()
    }

    /// Even part of a full-space vector as a profile.
    pub fn to_profile(&self, v: &[f64]) -> FourierProfile {
        let c = (0..=self.truncation as i64)
            .map(|n| 0.5 * (v[self.index(n)] + v[self.index(-n)]))
            .collect();
        FourierProfile::new(self.period, c).expect("period is positive")
    }

    /// Even-block coordinates of a profile.
    pub fn to_even_coords(&self, f: &FourierProfile) -> Vec<f64> {
        let s2 = std::f64::consts::SQRT_2;
        (0..=self.truncation)
            .map(|n| {
                if n == 0 {
                    f.mean()
                } else {
                    s2 * f.coeff(n as i64)
                }
            })
            .collect()
    }

    pub fn from_even_coords(&self, u: &[f64]) -> FourierProfile {
        let s2 = std::f64::consts::SQRT_2;
        let c = u
            .iter()
            .enumerate()
            .map(|(n, x)| if n == 0 { *x } else { x / s2 })
            .collect();
        FourierProfile::new(self.period, c).expect("period is positive")
    }

    /// `⟨L f, f⟩ = ∫ (Lf) f` for an even profile.
    pub fn quadratic_form(&self, f: &FourierProfile) -> f64 {
        let u = self.to_even_coords(&f.resized(self.truncation));
        self.period * self.even_matrix().quadratic_form(&u)
    }

    /// Gauge-invariant size of the low-mode part of the operator, used to
    /// set the zero threshold.
    pub fn low_mode_scale(&self) -> f64 {
        let fluct: f64 = self.psi[1..].iter().map(|c| 2.0 * c.abs()).sum();
        1.0 + (self.speed - self.psi[0]).abs() + fluct
    }
}

/// Threshold separating zero from nonzero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "policy", content = "value", rename_all = "snake_case")]
pub enum ZeroTolerance {
    /// `1e−6 · low_mode_scale + 64 ε · max |λ|`.
    Default,
    /// `factor · max |λ|`.
    RelativeToMax(f64),
    Absolute(f64),
}

impl ZeroTolerance {
    pub fn resolve(&self, op: &GalerkinOperator, max_abs: f64) -> f64 {
        match *self {
            ZeroTolerance::Default => 1e-6 * op.low_mode_scale() + 64.0 * f64::EPSILON * max_abs,
            ZeroTolerance::RelativeToMax(f) => f * max_abs,
            ZeroTolerance::Absolute(t) => t,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub truncation: usize,
    pub eigenvalues: Vec<f64>,
    pub tol_zero: f64,
    pub tol_policy: ZeroTolerance,
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
    /// `|⟨v₀, ψ'⟩| / (‖v₀‖‖ψ'‖)` for the eigenvector closest to zero.
    pub kernel_corr: f64,
    /// Distance from 0 to the nearest eigenvalue outside the zero band.
    pub gap: f64,
    pub warning: Option<String>,
    /// Eigenvector of the lowest eigenvalue (full-space vector).
    #[serde(skip)]
    pub lowest_vector: Vec<f64>,
}

impl SpectrumReport {
    /// One simple negative eigenvalue, one simple zero spanned by `ψ'`.
    pub fn assumption_h(&self) -> bool {
        self.n_neg == 1 && self.n_zero == 1 && self.kernel_corr > 0.999
    }

    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `index,eigenvalue` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,eigenvalue\n");
        for (i, l) in self.eigenvalues.iter().enumerate() {
            s.push_str(&format!("{i},{l:.17e}\n"));
        }
        s
    }
}

pub fn spectrum(op: &GalerkinOperator, tol: ZeroTolerance) -> Result<SpectrumReport> {
    let h = op.matrix();
    let eigenvalues = linalg::symmetric_eigen(&h, false)?.values;
    let max_abs = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol_zero = tol.resolve(op, max_abs);
    let n_neg = eigenvalues.iter().filter(|&&l| l < -tol_zero).count();
    let n_zero = eigenvalues.iter().filter(|&&l| l.abs() <= tol_zero).count();
    let n_pos = eigenvalues.len() - n_neg - n_zero;
    let gap = eigenvalues
        .iter()
        .filter(|l| l.abs() > tol_zero)
        .fold(f64::INFINITY, |m, l| m.min(l.abs()));

    let nearest = eigenvalues
        .iter()
        .copied()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .expect("nonempty spectrum");
    let kv = op.kernel_vector();
    let kn = norm(&kv);
    let kernel_corr = if kn > 0.0 {
        let v0 = linalg::inverse_iteration(&h, nearest)?;
        dot(&v0, &kv).abs() / (norm(&v0) * kn)
    } else {
        0.0
    };
    let lowest_vector = linalg::inverse_iteration(&h, eigenvalues[0])?;

    Ok(SpectrumReport {
        truncation: op.truncation(),
        eigenvalues,
        tol_zero,
        tol_policy: tol,
        n_neg,
        n_zero,
        n_pos,
        kernel_corr,
        gap,
        warning: op.warning().map(str::to_owned),
        lowest_vector,
    })
}

/// `η = ∂ψ/∂ω` and `β = ∂ψ/∂A` from `Lη = −ψ`, `Lβ = −1`.
#[derive(Debug, Clone)]
pub struct Variations {
    pub eta: FourierProfile,
    pub beta: FourierProfile,
    /// Smallest `|λ|` of the even block.
    pub even_gap: f64,
    /// Largest coefficient of `Lη + ψ`.
    pub residual_eta: f64,
    /// Largest coefficient of `Lβ + 1`.
    pub residual_beta: f64,
}

pub fn solve_variations(op: &GalerkinOperator, psi: &FourierProfile) -> Result<Variations> {
    let s = op.even_matrix();
    let even = linalg::symmetric_eigen(&s, false)?.values;
    let max_abs = even.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let even_gap = even.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let tol = ZeroTolerance::Default.resolve(op, max_abs);
    if even_gap <= tol {
        return Err(Error::Singular(format!(
            "even-restricted operator has eigenvalue {even_gap:.3e} within the zero band {tol:.1e}; degenerate point"
        )));
    }
    let n = op.truncation();
    let rhs_eta: Vec<f64> = op
        .to_even_coords(&psi.resized(n))
        .iter()
        .map(|x| -x)
        .collect();
    let mut rhs_beta = vec![0.0; n + 1];
    rhs_beta[0] = -1.0;

    let lu = linalg::Lu::factor(&s)?;
    let solve = |b: &[f64]| -> (Vec<f64>, f64) {
        let mut x = lu.solve(b);
        let r: Vec<f64> = s
            .mul_vec(&x)
            .iter()
            .zip(b)
            .map(|(ax, bi)| bi - ax)
            .collect();
        for (xi, di) in x.iter_mut().zip(lu.solve(&r)) {
            *xi += di;
        }
        let res = s
            .mul_vec(&x)
            .iter()
            .zip(b)
            .enumerate()
            .map(|(k, (ax, bi))| {
                (ax - bi).abs()
                    / if k == 0 {
                        1.0
                    } else {
                        std::f64::consts::SQRT_2
                    }
            })
            .fold(0.0, f64::max);
        (x, res)
    };
    let (ue, residual_eta) = solve(&rhs_eta);
    let (ub, residual_beta) = solve(&rhs_beta);
    Ok(Variations {
        eta: op.from_even_coords(&ue),
        beta: op.from_even_coords(&ub),
        even_gap,
        residual_eta,
        residual_beta,
    })
}

/// A constraint direction for [`constrained_min`].
#[derive(Debug, Clone)]
pub enum Constraint {
    Even(FourierProfile),
    Odd(SineSeries),
}

impl Constraint {
    fn vector(&self, op: &GalerkinOperator) -> Vec<f64> {
        match self {
            Constraint::Even(f) => op.even_vector(f),
            Constraint::Odd(s) => op.odd_vector(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstrainedMin {
    /// Minimum of `⟨Lf, f⟩ / ⟨f, f⟩` over the complement of the constraints.
    pub w: f64,
    /// Minimizer as a unit full-space vector.
    pub argmin: Vec<f64>,
}

pub fn constrained_min(
    op: &GalerkinOperator,
    constraints: &[Constraint],
) -> Result<ConstrainedMin> {
    let h = op.matrix();
    if constraints.is_empty() {
        let eig = linalg::symmetric_eigen(&h, false)?;
        let w = eig.values[0];
        let argmin = linalg::inverse_iteration(&h, w)?;
        return Ok(ConstrainedMin { w, argmin });
    }
    let vecs: Vec<Vec<f64>> = constraints.iter().map(|c| c.vector(op)).collect();
    let q = HouseholderBasis::new(&vecs)?;
    let m = q.rank();
    let block = q.conjugate(&h).trailing(m);
    let w = linalg::symmetric_eigen(&block, false)?.values[0];
    let y = linalg::inverse_iteration(&block, w)?;
    let mut z = vec![0.0; op.dim()];
    z[m..].copy_from_slice(&y);
    let mut argmin = q.apply(&z);
    let nrm = norm(&argmin);
    argmin.iter_mut().for_each(|x| *x /= nrm);
    Ok(ConstrainedMin { w, argmin })
}
