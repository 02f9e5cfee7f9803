//! Fourier-multiplier symbols `θ(κ)` of the dispersion operator `M`,
//! `(Mg)^(κ) = θ(κ) ĝ(κ)`.
//!
//! Symbols take physical wavenumbers. On a period `L0` mode `n` sits at
//! `κ = 2πn / L0`; callers do that scaling.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolKind {
    /// `κ⁴ + κ²`, i.e. `M = ∂⁴ − ∂²`.
    Kawahara,
    /// `κ²`, i.e. `M = −∂²`.
    Kdv,
    /// `|κ|`, i.e. `M = H∂`.
    BenjaminOno,
    /// `|κ|^α`, `0 < α ≤ 2`.
    Fractional { alpha: f64 },
}

/// A symbol together with its declared growth bounds
/// `A1 |κ|^m2 ≤ θ(κ) ≤ A2 |κ|^m2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplierSymbol {
    pub kind: SymbolKind,
    pub order: f64,
    pub lower: f64,
    pub upper: f64,
}

impl MultiplierSymbol {
    pub fn kawahara() -> Self {
        Self {
            kind: SymbolKind::Kawahara,
            order: 4.0,
            lower: 1.0,
            upper: 2.0,
        }
    }

    pub fn kdv() -> Self {
        Self {
            kind: SymbolKind::Kdv,
            order: 2.0,
            lower: 1.0,
            upper: 1.0,
        }
    }

    pub fn benjamin_ono() -> Self {
        Self {
            kind: SymbolKind::BenjaminOno,
            order: 1.0,
            lower: 1.0,
            upper: 1.0,
        }
    }

    pub fn fractional(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::invalid(format!(
                "fractional order must lie in (0, 2], got {alpha}"
            )));
        }
        Ok(Self {
            kind: SymbolKind::Fractional { alpha },
            order: alpha,
            lower: 1.0,
            upper: 1.0,
        })
    }

    /// Same symbol, different declared bounds.
    pub fn with_bounds(self, lower: f64, upper: f64, order: f64) -> Self {
        Self {
            lower,
            upper,
            order,
            ..self
        }
    }

    /// `θ(κ)`.
    #[inline]
    pub fn eval(&self, kappa: f64) -> f64 {
        match self.kind {
            SymbolKind::Kawahara => {
                let k2 = kappa * kappa;
                k2 * k2 + k2
            }
            SymbolKind::Kdv => kappa * kappa,
            SymbolKind::BenjaminOno => kappa.abs(),
            SymbolKind::Fractional { alpha } => {
                if kappa == 0.0 {
                    0.0
                } else {
                    kappa.abs().powf(alpha)
                }
            }
        }
    }

    /// `θ` at mode `n` of an `L0`-periodic function.
    #[inline]
    pub fn at_mode(&self, n: i64, period: f64) -> f64 {
        self.eval(wavenumber(n, period))
    }

    /// Checks the sandwich bound on integers `1 ≤ |κ| ≤ kappa_max`.
    pub fn verify_bounds(&self, kappa_max: u32) -> BoundsCheck {
        for m in 1..=kappa_max {
            for kappa in [m as f64, -(m as f64)] {
                let theta = self.eval(kappa);
                let p = kappa.abs().powf(self.order);
                let tol = 1e-12 * p.max(1.0);
                if theta < self.lower * p - tol || theta > self.upper * p + tol {
                    return BoundsCheck {
                        holds: false,
                        first_violation: Some(kappa as i64),
                    };
                }
            }
        }
        BoundsCheck {
            holds: true,
            first_violation: None,
        }
    }
}

/// Physical wavenumber of mode `n` on period `L0`.
#[inline]
pub fn wavenumber(n: i64, period: f64) -> f64 {
    2.0 * std::f64::consts::PI * n as f64 / period
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundsCheck {
    pub holds: bool,
    pub first_violation: Option<i64>,
}

impl fmt::Display for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Kawahara => write!(f, "kawahara"),
            SymbolKind::Kdv => write!(f, "kdv"),
            SymbolKind::BenjaminOno => write!(f, "bo"),
            SymbolKind::Fractional { alpha } => write!(f, "fractional({alpha})"),
        }
    }
}

impl FromStr for MultiplierSymbol {
    type Err = Error;

    /// Accepts `kawahara`, `kdv`, `bo` and `fractional(α)` (also `fractional:α`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "kawahara" => return Ok(Self::kawahara()),
            "kdv" => return Ok(Self::kdv()),
            "bo" | "benjamin-ono" | "benjamin_ono" => return Ok(Self::benjamin_ono()),
            _ => {}
        }
        let arg = s
            .strip_prefix("fractional(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("fractional:"));
        match arg {
            Some(a) => {
                let alpha: f64 = a
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad fractional order '{a}'")))?;
                Self::fractional(alpha)
            }
            None => Err(Error::invalid(format!("unknown symbol '{s}'"))),
        }
    }
}

/// Looks a builtin symbol up by name.
pub fn builtin_symbol(name: &str) -> Result<MultiplierSymbol> {
    name.parse()
}
