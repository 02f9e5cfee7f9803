//! Newton continuation of even travelling waves over the `(ω, A)` plane at
//! fixed period.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galerkin::{self, GalerkinOperator};
use crate::linalg::{Lu, Matrix};
use crate::multiplier::MultiplierSymbol;
use crate::profile::{travelling_residual, FourierProfile};

pub const MAX_ITERATIONS: usize = 25;
pub const MAX_HALVINGS: usize = 6;
/// Convergence level of the residual sup-norm, relative to the scale.
pub const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationPoint {
    pub omega: f64,
    pub a_const: f64,
    pub psi: FourierProfile,
    /// Largest coefficient of `Mψ + ωψ − ψ²/2 + A`.
    pub residual_norm: f64,
    pub newton_iters: usize,
    /// Residual after each iterate, starting with the initial guess.
    pub history: Vec<f64>,
}

impl ContinuationPoint {
    pub fn scale(&self) -> f64 {
        residual_scale(&self.psi, self.omega, self.a_const)
    }
}

fn residual_scale(psi: &FourierProfile, omega: f64, a: f64) -> f64 {
    let c = psi.coeffs().iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    1.0_f64.max(c * c).max(omega.abs() * c).max(a.abs())
}

fn residual_vec(psi: &FourierProfile, omega: f64, a: f64, sym: &MultiplierSymbol) -> Vec<f64> {
    travelling_residual(psi, omega, a, sym, psi.truncation())
        .coeffs()
        .to_vec()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Jacobian of the coefficient residual with respect to `c₀..c_N`.
fn jacobian(psi: &FourierProfile, omega: f64, sym: &MultiplierSymbol) -> Matrix {
    let n = psi.truncation();
    let l = psi.period();
    Matrix::from_fn(n + 1, |m, j| {
        let (mi, ji) = (m as i64, j as i64);
        let diag = if m == j {
            sym.at_mode(mi, l) + omega
        } else {
            0.0
        };
        if j == 0 {
            diag - psi.coeff(mi)
        } else {
            diag - psi.coeff(mi - ji) - psi.coeff(mi + ji)
        }
    })
}

/// Damped Newton iteration for `Mψ + ωψ − ψ²/2 + A = 0` on cosine
/// coefficients, starting from `psi0`.
pub fn newton_solve(
    psi0: &FourierProfile,
    omega: f64,
    a_const: f64,
    sym: &MultiplierSymbol,
) -> Result<ContinuationPoint> {
    if !(omega.is_finite() && a_const.is_finite()) {
        return Err(Error::invalid("ω and A must be finite"));
    }
    let mut psi = psi0.clone();
    let mut r = residual_vec(&psi, omega, a_const, sym);
    let mut rn = sup(&r);
    let mut history = vec![rn];
    let mut iters = 0;
    while rn > RESIDUAL_TOL * residual_scale(&psi, omega, a_const) {
        if iters == MAX_ITERATIONS || !rn.is_finite() {
            return Err(Error::NewtonDiverged {
                iterations: iters,
                residual: rn,
            });
        }
        iters += 1;
        let lu = Lu::factor(&jacobian(&psi, omega, sym))?;
        let neg: Vec<f64> = r.iter().map(|x| -x).collect();
        let step = lu.solve(&neg);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let c: Vec<f64> = psi
                .coeffs()
                .iter()
                .zip(&step)
                .map(|(c, s)| c + t * s)
                .collect();
            let trial = FourierProfile::new(psi.period(), c)?;
            let tr = residual_vec(&trial, omega, a_const, sym);
            let tn = sup(&tr);
            if tn < rn {
                accepted = Some((trial, tr, tn));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, tr, tn)) = accepted else {
            // No decrease along the Newton direction: stop at the
            // iteration cap with the current residual.
            return Err(Error::NewtonDiverged {
                iterations: MAX_ITERATIONS,
                residual: rn,
            });
        };
        let step_size = sup(&step) * t;
        psi = trial;
        r = tr;
        rn = tn;
        history.push(rn);
        if step_size < 1e-15 * residual_scale(&psi, omega, a_const) {
            break;
        }
    }
    Ok(ContinuationPoint {
        omega,
        a_const,
        psi,
        residual_norm: rn,
        newton_iters: iters,
        history,
    })
}

/// `(∂ψ/∂ω, ∂ψ/∂A)` at a converged point.
fn tangents(
    p: &ContinuationPoint,
    sym: &MultiplierSymbol,
) -> Result<(FourierProfile, FourierProfile)> {
    let op = GalerkinOperator::new(&p.psi, p.omega, sym, p.psi.truncation())?;
    let v = galerkin::solve_variations(&op, &p.psi)?;
    Ok((v.eta, v.beta))
}

fn predict(
    p: &ContinuationPoint,
    sym: &MultiplierSymbol,
    dw: f64,
    da: f64,
) -> Result<FourierProfile> {
    let (eta, beta) = tangents(p, sym)?;
    let c = p
        .psi
        .coeffs()
        .iter()
        .zip(eta.coeffs())
        .zip(beta.coeffs())
        .map(|((c, e), b)| c + dw * e + da * b)
        .collect();
    FourierProfile::new(p.psi.period(), c)
}

/// Grid `ω₀ + i δω`, `A₀ + j δA`, `|i| ≤ extent.0`, `|j| ≤ extent.1`.
#[derive(Debug, Clone, Serialize)]
pub struct Patch {
    pub omegas: Vec<f64>,
    pub a_values: Vec<f64>,
    /// Row-major over `(ω, A)`; `None` past the continuable boundary.
    pub points: Vec<Option<ContinuationPoint>>,
}

impl Patch {
    pub fn get(&self, i: usize, j: usize) -> Option<&ContinuationPoint> {
        self.points[i * self.a_values.len() + j].as_ref()
    }

    pub fn center(&self) -> Option<&ContinuationPoint> {
        self.get(self.omegas.len() / 2, self.a_values.len() / 2)
    }

    /// `omega,A,mean,F,residual` rows; missing points are skipped.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("omega,A,mean,F,residual\n");
        for p in self.points.iter().flatten() {
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.6e}\n",
                p.omega,
                p.a_const,
                p.psi.mean(),
                0.5 * p.psi.norm_sq(),
                p.residual_norm
            ));
        }
        s
    }
}

// Walks `steps` points from `start`, stopping at the first failure.
fn ray(
    start: &ContinuationPoint,
    sym: &MultiplierSymbol,
    dw: f64,
    da: f64,
    steps: usize,
) -> Vec<Option<ContinuationPoint>> {
    let mut out = Vec::with_capacity(steps);
    let mut prev = start.clone();
    for s in 1..=steps {
        let (w, a) = (start.omega + s as f64 * dw, start.a_const + s as f64 * da);
        let next = predict(&prev, sym, w - prev.omega, a - prev.a_const)
            .and_then(|guess| newton_solve(&guess, w, a, sym));
        match next {
            Ok(p) => {
                prev = p.clone();
                out.push(Some(p));
            }
            Err(_) => break,
        }
    }
    out.resize(steps, None);
    out
}

/// Predictor–corrector continuation over a rectangular `(ω, A)` grid.
///
/// Walks the `ω` axis from the center, then each `A` column from its
/// axis point; columns run in parallel.
pub fn surface_patch(
    center: &ContinuationPoint,
    sym: &MultiplierSymbol,
    d_omega: f64,
    d_a: f64,
    extent: (usize, usize),
) -> Result<Patch> {
    let (ei, ej) = extent;
    if (ei > 0 && !(d_omega.abs() > 0.0)) || (ej > 0 && !(d_a.abs() > 0.0)) {
        return Err(Error::invalid("patch steps must be nonzero"));
    }
    let ni = 2 * ei + 1;
    let nj = 2 * ej + 1;
    let omegas: Vec<f64> = (0..ni)
        .map(|i| center.omega + (i as f64 - ei as f64) * d_omega)
        .collect();
    let a_values: Vec<f64> = (0..nj)
        .map(|j| center.a_const + (j as f64 - ej as f64) * d_a)
        .collect();

    let up = ray(center, sym, d_omega, 0.0, ei);
    let down = ray(center, sym, -d_omega, 0.0, ei);
    let mut axis: Vec<Option<ContinuationPoint>> = down.into_iter().rev().collect();
    axis.push(Some(center.clone()));
    axis.extend(up);

    let columns: Vec<Vec<Option<ContinuationPoint>>> = axis
        .par_iter()
        .map(|p| match p {
            None => vec![None; nj],
            Some(p) => {
                let hi = ray(p, sym, 0.0, d_a, ej);
                let lo = ray(p, sym, 0.0, -d_a, ej);
                let mut col: Vec<_> = lo.into_iter().rev().collect();
                col.push(Some(p.clone()));
                col.extend(hi);
                col
            }
        })
        .collect();
    let points = columns.into_iter().flatten().collect();
    Ok(Patch {
        omegas,
        a_values,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klcurve;
    use crate::profile::build_dnoidal;

    fn dn(k: f64, w: f64, n: usize) -> (f64, FourierProfile) {
        let pt = klcurve::branch_point(k).unwrap();
        let (p, psi) = build_dnoidal(k, pt.period, w, n).unwrap();
        (p.a_const, psi)
    }

    #[test]
    fn exact_wave_is_a_fixed_point() {
        let sym = MultiplierSymbol::kawahara();
        let (a, psi) = dn(0.8, 1.0, 48);
        let p = newton_solve(&psi, 1.0, a, &sym).unwrap();
        assert!(p.newton_iters <= 2);
        let diff = p
            .psi
            .coeffs()
            .iter()
            .zip(psi.coeffs())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-10);
    }

    #[test]
    fn galilean_target_reached() {
        let sym = MultiplierSymbol::kawahara();
        let (a0, psi0) = dn(0.8, 1.0, 48);
        let (a1, psi1) = dn(0.8, 1.01, 48);
        let p = newton_solve(&psi0, 1.01, a1, &sym).unwrap();
        let diff = p
            .psi
            .coeffs()
            .iter()
            .zip(psi1.coeffs())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-8, "{diff}");
        let alpha = 0.01;
        assert!((a1 - (a0 - alpha - 0.5 * alpha * alpha)).abs() < 1e-9);
    }

    #[test]
    fn quadratic_convergence_from_perturbed_start() {
        let sym = MultiplierSymbol::kawahara();
        let (a, psi) = dn(0.7, 1.0, 48);
        let mut c = psi.coeffs().to_vec();
        c[1] *= 1.02;
        c[2] *= 0.98;
        let p = newton_solve(&FourierProfile::new(psi.period(), c).unwrap(), 1.0, a, &sym).unwrap();
        let scale = p.scale();
        for w in p.history.windows(2) {
            if w[0] < 1e-3 * scale && w[1] > 1e-13 * scale {
                assert!(w[1] <= 50.0 * w[0] * w[0] / scale, "{:?}", p.history);
            }
        }
    }

    #[test]
    fn single_point_patch_is_center() {
        let sym = MultiplierSymbol::kawahara();
        let (a, psi) = dn(0.8, 1.0, 32);
        let c = newton_solve(&psi, 1.0, a, &sym).unwrap();
        let patch = surface_patch(&c, &sym, 0.0, 0.0, (0, 0)).unwrap();
        assert_eq!(patch.points.len(), 1);
        assert_eq!(patch.center().unwrap().psi, c.psi);
    }
}
