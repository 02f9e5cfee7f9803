//! Stability quantities of a travelling wave and the resulting verdict.

use serde::Serialize;

use crate::continuation;
use crate::error::{Error, Result};
use crate::galerkin::{
    self, Constraint, GalerkinOperator, SpectrumReport, Variations, ZeroTolerance,
};
use crate::klcurve;
use crate::linalg::{self, dot, norm};
use crate::multiplier::MultiplierSymbol;
use crate::profile::{build_dnoidal, psi_dpsi, FourierProfile, DEFAULT_TRUNCATION};

/// Relative level at which the two evaluations of `I` are said to disagree.
pub const I_AGREEMENT_TOL: f64 = 1e-5;
/// Constrained minima are compared with zero at this multiple of the
/// operator's low-mode scale.
pub const MIN_TOL: f64 = 1e-8;

/// `(M, F) = (∫ψ, ½∫ψ²)`.
pub fn functionals(psi: &FourierProfile) -> (f64, f64) {
    (psi.period() * psi.mean(), 0.5 * psi.norm_sq())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derivatives {
    pub m_omega: f64,
    pub m_a: f64,
    pub f_omega: f64,
    pub f_a: f64,
}

/// `M_ω = ∫η`, `M_A = ∫β`, `F_ω = ∫ψη`, `F_A = ∫ψβ`.
pub fn derivatives(
    psi: &FourierProfile,
    eta: &FourierProfile,
    beta: &FourierProfile,
) -> Derivatives {
    let l = psi.period();
    Derivatives {
        m_omega: l * eta.mean(),
        m_a: l * beta.mean(),
        f_omega: psi.inner(eta),
        f_a: psi.inner(beta),
    }
}

/// Relative residuals of the three identities linking `M`, `F` and their
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `F_ω = ω M_ω + M`.
    pub f_omega: f64,
    /// `F_A = ω M_A + L`.
    pub f_a: f64,
    /// `L = M_ω − ω M_A`.
    pub period: f64,
}

fn rel(lhs: f64, terms: &[f64]) -> f64 {
    let rhs: f64 = terms.iter().sum();
    let scale = terms
        .iter()
        .fold(lhs.abs(), |m, t| m.max(t.abs()))
        .max(f64::MIN_POSITIVE);
    (lhs - rhs).abs() / scale
}

pub fn identity_residuals(d: &Derivatives, m: f64, period: f64, omega: f64) -> IdentityResiduals {
    IdentityResiduals {
        f_omega: rel(d.f_omega, &[omega * d.m_omega, m]),
        f_a: rel(d.f_a, &[omega * d.m_a, period]),
        period: rel(period, &[d.m_omega, -omega * d.m_a]),
    }
}

/// `F_A M_ω − F_ω M_A`.
pub fn det_d(d: &Derivatives) -> f64 {
    d.f_a * d.m_omega - d.f_omega * d.m_a
}

/// `(L/ω)(ω − M/L) M_ω + M L/ω`, equal to [`det_d`] on solutions.
pub fn det_d_reduced(m: f64, period: f64, omega: f64, m_omega: f64) -> f64 {
    period / omega * (omega - m / period) * m_omega + m * period / omega
}

/// `P(x, y) = x² F_ω + xy (F_A + M_ω) + y² M_A`.
pub fn p_form(d: &Derivatives, x: f64, y: f64) -> f64 {
    x * x * d.f_omega + x * y * (d.f_a + d.m_omega) + y * y * d.m_a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub x0: f64,
    pub y0: f64,
    /// `P(x₀, y₀)` from the derivatives.
    pub p: f64,
    /// `(L/ω²)(M/L − ω)`.
    pub p_closed: f64,
    /// `⟨LΦ, Φ⟩` with `Φ = x₀η + y₀β`, from the Galerkin matrix.
    pub i: f64,
}

/// Witness `y₀ = 1`, `x₀ = −1/ω`.
pub fn choose_witness(
    op: &GalerkinOperator,
    d: &Derivatives,
    var: &Variations,
    m: f64,
    omega: f64,
) -> Witness {
    let (x0, y0) = (-1.0 / omega, 1.0);
    let period = op.period();
    let phi: Vec<f64> = var
        .eta
        .coeffs()
        .iter()
        .zip(var.beta.coeffs())
        .map(|(e, b)| x0 * e + y0 * b)
        .collect();
    let phi = FourierProfile::new(period, phi).expect("period is positive");
    Witness {
        x0,
        y0,
        p: p_form(d, x0, y0),
        p_closed: period / (omega * omega) * (m / period - omega),
        i: op.quadratic_form(&phi),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// (H), `M/L > ω > 0`, `M_ω < 0` and `I < 0`.
    StableByDetCriterion,
    /// (H), `M/L > ω > 0`, `M_ω ≥ 0`, `F_ω > 0`, both constrained minima
    /// passing and `ψ > 0`.
    StableByMOmegaNonnegBranch,
    Inconclusive,
}

impl Verdict {
    pub fn is_stable(self) -> bool {
        self != Verdict::Inconclusive
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::StableByDetCriterion => "stable_by_det_criterion",
            Verdict::StableByMOmegaNonnegBranch => "stable_by_m_omega_nonneg_branch",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Summary of the full-space spectrum carried in the report.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub n_neg: usize,
    pub n_zero: usize,
    pub kernel_corr: f64,
    pub lowest: f64,
    pub gap: f64,
    pub tol_zero: f64,
    pub assumption_h: bool,
}

impl From<&SpectrumReport> for SpectrumSummary {
    fn from(r: &SpectrumReport) -> Self {
        Self {
            n_neg: r.n_neg,
            n_zero: r.n_zero,
            kernel_corr: r.kernel_corr,
            lowest: r.lowest(),
            gap: r.gap,
            tol_zero: r.tol_zero,
            assumption_h: r.assumption_h(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PData {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub zero_policy: ZeroTolerance,
    pub i_agreement: f64,
    pub constrained_min: f64,
    pub newton_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub k: Option<f64>,
    pub period: f64,
    pub omega: f64,
    pub a_const: f64,
    pub truncation: usize,
    pub symbol: String,
    pub m: f64,
    pub f: f64,
    #[serde(flatten)]
    pub derivatives: Derivatives,
    pub identity_residuals: IdentityResiduals,
    pub det_d: f64,
    pub det_d_reduced: f64,
    pub p_data: PData,
    pub witness: Witness,
    /// `|I + P| / max(|I|, |P|)`; large values flag under-resolution.
    pub i_mismatch: f64,
    pub avg_minus_speed: f64,
    /// `⟨L⁻¹ψ, ψ⟩` from the eigen-expansion on the even subspace.
    pub inverse_form: f64,
    pub spectrum: SpectrumSummary,
    /// `|⟨χ, ψ⟩| / (‖χ‖‖ψ‖)` for the negative eigenvector `χ`.
    pub chi_psi_corr: f64,
    pub min_psi: f64,
    /// Constrained minimum over `f ⊥ ψ`; `None` when the constraint set
    /// is degenerate.
    pub w_psi: Option<f64>,
    /// Constrained minimum over `f ⊥ ψ, ψψ'`.
    pub w_psi_dpsi: Option<f64>,
    pub verdict: Verdict,
    pub tolerances: Tolerances,
    pub warnings: Vec<String>,
}

impl StabilityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Applies the decision rules to the computed quantities.
pub fn verdict(r: &StabilityReport) -> Verdict {
    let tol = r.tolerances.constrained_min;
    let h = r.spectrum.assumption_h;
    let window = r.m / r.period > r.omega && r.omega > 0.0;
    if !(h && window) {
        return Verdict::Inconclusive;
    }
    if r.derivatives.m_omega < 0.0 {
        if r.witness.i < 0.0 {
            return Verdict::StableByDetCriterion;
        }
        return Verdict::Inconclusive;
    }
    let lemma_checks =
        matches!((r.w_psi, r.w_psi_dpsi), (Some(w1), Some(w2)) if w1 >= -tol && w2 > tol);
    if r.derivatives.f_omega > 0.0 && lemma_checks && r.min_psi > 0.0 {
        Verdict::StableByMOmegaNonnegBranch
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriteriaOptions {
    pub truncation: usize,
    pub tol: ZeroTolerance,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            tol: ZeroTolerance::Default,
        }
    }
}

/// All quantities for a solution `ψ` of `Mψ + ωψ − ψ²/2 + A = 0`.
pub fn evaluate(
    psi: &FourierProfile,
    omega: f64,
    a_const: f64,
    sym: &MultiplierSymbol,
    opts: &CriteriaOptions,
) -> Result<StabilityReport> {
    if !(omega.is_finite() && omega != 0.0) {
        return Err(Error::invalid(format!(
            "speed must be finite and nonzero, got {omega}"
        )));
    }
    let n = opts.truncation.max(psi.truncation());
    let psi = psi.resized(n);
    let op = GalerkinOperator::new(&psi, omega, sym, n)?;
    let mut warnings: Vec<String> = op.warning().map(str::to_owned).into_iter().collect();
    let spec = galerkin::spectrum(&op, opts.tol)?;
    let var = galerkin::solve_variations(&op, &psi)?;
    let period = psi.period();
    let (m, f) = functionals(&psi);
    let d = derivatives(&psi, &var.eta, &var.beta);
    let ids = identity_residuals(&d, m, period, omega);
    let witness = choose_witness(&op, &d, &var, m, omega);
    let i_mismatch =
        (witness.i + witness.p).abs() / witness.i.abs().max(witness.p.abs()).max(f64::MIN_POSITIVE);
    if i_mismatch > I_AGREEMENT_TOL {
        warnings.push(format!(
            "direct and closed-form I disagree by {i_mismatch:.2e}; possible under-resolution"
        ));
    }

    let even = linalg::symmetric_eigen(&op.even_matrix(), true)?;
    let u = op.to_even_coords(&psi);
    let inverse_form = period
        * even
            .values
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let c = dot(&even.vector(j).expect("vectors requested"), &u);
                c * c / l
            })
            .sum::<f64>();

    let pv = op.even_vector(&psi);
    let chi = &spec.lowest_vector;
    let pn = norm(&pv);
    let chi_psi_corr = if pn > 0.0 {
        dot(chi, &pv).abs() / (norm(chi) * pn)
    } else {
        0.0
    };
    let min_psi = psi.min_value();

    let mut cmin = |cs: &[Constraint]| match galerkin::constrained_min(&op, cs) {
        Ok(c) => Ok(Some(c.w)),
        Err(Error::Invalid(msg)) => {
            warnings.push(format!("constrained minimum skipped: {msg}"));
            Ok(None)
        }
        Err(e) => Err(e),
    };
    let w_psi = cmin(&[Constraint::Even(psi.clone())])?;
    let w_psi_dpsi = cmin(&[
        Constraint::Even(psi.clone()),
        Constraint::Odd(psi_dpsi(&psi, n)),
    ])?;

    let mut report = StabilityReport {
        k: None,
        period,
        omega,
        a_const,
        truncation: n,
        symbol: sym.to_string(),
        m,
        f,
        derivatives: d,
        identity_residuals: ids,
        det_d: det_d(&d),
        det_d_reduced: det_d_reduced(m, period, omega, d.m_omega),
        p_data: PData {
            xx: d.f_omega,
            xy: d.f_a + d.m_omega,
            yy: d.m_a,
        },
        witness,
        i_mismatch,
        avg_minus_speed: m / period - omega,
        inverse_form,
        spectrum: SpectrumSummary::from(&spec),
        chi_psi_corr,
        min_psi,
        w_psi,
        w_psi_dpsi,
        verdict: Verdict::Inconclusive,
        tolerances: Tolerances {
            zero_policy: opts.tol,
            i_agreement: I_AGREEMENT_TOL,
            constrained_min: MIN_TOL * op.low_mode_scale(),
            newton_residual: continuation::RESIDUAL_TOL,
        },
        warnings,
    };
    report.verdict = verdict(&report);
    Ok(report)
}

/// Full pipeline for the dnoidal wave of modulus `k` on its branch at
/// speed `omega`. With `a_const` the wave is continued to that constant
/// at fixed speed and period.
pub fn analyze_dnoidal(
    k: f64,
    omega: f64,
    a_const: Option<f64>,
    opts: &CriteriaOptions,
) -> Result<StabilityReport> {
    let pt = klcurve::branch_point(k)?;
    let sym = MultiplierSymbol::kawahara();
    let (params, psi) = build_dnoidal(k, pt.period, omega, opts.truncation)?;
    let mut report = match a_const {
        Some(a) if (a - params.a_const).abs() > 1e-12 * params.a_const.abs().max(1.0) => {
            let p = continuation::newton_solve(&psi, omega, a, &sym)?;
            evaluate(&p.psi, omega, a, &sym, opts)?
        }
        _ => evaluate(&psi, omega, params.a_const, &sym, opts)?,
    };
    report.k = Some(k);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functionals_of_simple_profiles() {
        let c = FourierProfile::constant(3.0, 2.0, 4).unwrap();
        assert_eq!(functionals(&c), (6.0, 6.0));
        let cosine = FourierProfile::cosine_mode(3.0, 1, 1.0, 4).unwrap();
        let (m, f) = functionals(&cosine);
        assert_eq!(m, 0.0);
        assert!((f - 0.75).abs() < 1e-15);
    }

    #[test]
    fn det_d_arithmetic() {
        let d = Derivatives {
            f_a: 1.0,
            m_omega: 2.0,
            f_omega: 3.0,
            m_a: 4.0,
        };
        assert_eq!(det_d(&d), -10.0);
    }

    #[test]
    fn trivial_wave_is_inconclusive() {
        let psi = FourierProfile::constant(20.0, 0.0, 32).unwrap();
        let sym = MultiplierSymbol::kawahara();
        let opts = CriteriaOptions {
            truncation: 32,
            ..Default::default()
        };
        let r = evaluate(&psi, 1.0, 0.0, &sym, &opts).unwrap();
        assert_eq!(r.spectrum.n_neg, 0);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn dnoidal_identities_and_verdict() {
        let opts = CriteriaOptions {
            truncation: 64,
            ..Default::default()
        };
        let r = analyze_dnoidal(0.8, 1.0, None, &opts).unwrap();
        let ids = r.identity_residuals;
        assert!(
            ids.f_omega < 1e-6 && ids.f_a < 1e-6 && ids.period < 1e-6,
            "{ids:?}"
        );
        assert!((r.det_d - r.det_d_reduced).abs() < 1e-8 * r.det_d.abs());
        assert!(r.i_mismatch < 1e-6);
        assert!((r.witness.p - r.witness.p_closed).abs() < 1e-8 * r.witness.p.abs());
        assert!(
            (r.inverse_form + r.derivatives.f_omega).abs() < 1e-6 * r.derivatives.f_omega.abs()
        );
        assert!(r.avg_minus_speed > 0.0 && r.derivatives.m_omega < 0.0);
        assert_eq!(r.verdict, Verdict::StableByDetCriterion);
        assert!(r.chi_psi_corr > 1e-6 && r.min_psi > 0.0);
    }
}
