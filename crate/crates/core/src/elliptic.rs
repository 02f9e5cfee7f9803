//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! `K` and `E` come from the arithmetic-geometric mean; `sn`, `cn`, `dn` from
//! the descending Landen transformation. Everything is parameterized by the
//! modulus `k` (not the parameter `m = k²`).

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest modulus accepted. Beyond this `K` grows like `ln(4/k')` and the
/// dnoidal ansatz degenerates into a solitary wave.
pub const MAX_MODULUS: f64 = 1.0 - 1e-12;

const AGM_TOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 40;

/// Complete integrals at a modulus and at its complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticPair {
    pub k: f64,
    /// K(k)
    pub k1: f64,
    /// E(k)
    pub e1: f64,
    /// K(k') with k' = sqrt(1 - k²)
    pub k1p: f64,
    /// E(k')
    pub e1p: f64,
}

impl EllipticPair {
    /// `E K' + E' K - K K' - π/2`, zero up to rounding.
    pub fn legendre_residual(&self) -> f64 {
        self.e1 * self.k1p + self.e1p * self.k1 - self.k1 * self.k1p - FRAC_PI_2
    }

    /// Nome ratio `π K'/K` appearing in the Fourier series of `dn`.
    pub fn nome_exponent(&self) -> f64 {
        std::f64::consts::PI * self.k1p / self.k1
    }
}

fn check_modulus(k: f64) -> Result<()> {
    if !(0.0..=MAX_MODULUS).contains(&k) || k.is_nan() {
        return Err(Error::domain(format!(
            "modulus k = {k} outside [0, 1 - 1e-12]"
        )));
    }
    Ok(())
}

/// K(k) and E(k) by the AGM with `a0 = 1`, `b0 = k'`, `c0 = k`.
fn agm_integrals(k: f64, kc: f64) -> (f64, f64) {
    let mut a = 1.0_f64;
    let mut b = kc;
    let mut weight = 0.5_f64;
    let mut sum = weight * k * k;
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() < AGM_TOL * a {
            break;
        }
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        weight *= 2.0;
        sum += weight * c * c;
    }
    let kk = FRAC_PI_2 / a;
    (kk, kk * (1.0 - sum))
}

/// K, E at `k` and at the complementary modulus.
pub fn complete_integrals(k: f64) -> Result<EllipticPair> {
    check_modulus(k)?;
    // 1 - k² computed as (1-k)(1+k) keeps digits near k = 1.
    let kc = ((1.0 - k) * (1.0 + k)).sqrt();
    let (k1, e1) = agm_integrals(k, kc);
    let (k1p, e1p) = agm_integrals(kc, k);
    Ok(EllipticPair {
        k,
        k1,
        e1,
        k1p,
        e1p,
    })
}

/// Complete integral of the first kind.
pub fn ellip_k(k: f64) -> Result<f64> {
    check_modulus(k)?;
    let kc = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(agm_integrals(k, kc).0)
}

/// The three Jacobi functions at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// `sn`, `cn`, `dn` by descending Landen transformation.
pub fn jacobi(u: f64, k: f64) -> Result<Jacobi> {
    check_modulus(k)?;
    Ok(jacobi_unchecked(u, k))
}

pub(crate) fn jacobi_unchecked(u: f64, k: f64) -> Jacobi {
    let mut mc = (1.0 - k) * (1.0 + k);
    if k == 0.0 {
        return Jacobi {
            sn: u.sin(),
            cn: u.cos(),
            dn: 1.0,
        };
    }
    let mut em = [0.0_f64; AGM_MAX_ITER];
    let mut en = [0.0_f64; AGM_MAX_ITER];
    let mut a = 1.0_f64;
    let mut c = 1.0_f64;
    let mut last = 0;
    for i in 0..AGM_MAX_ITER {
        last = i;
        em[i] = a;
        mc = mc.sqrt();
        en[i] = mc;
        c = 0.5 * (a + mc);
        if (a - mc).abs() <= 1e-8 * a {
            break;
        }
        mc *= a;
        a = c;
    }
    let v = c * u;
    let mut sn = v.sin();
    let mut cn = v.cos();
    let mut dn = 1.0_f64;
    if sn != 0.0 {
        let mut a = cn / sn;
        c *= a;
        for ii in (0..=last).rev() {
            let b = em[ii];
            a *= c;
            c *= dn;
            dn = (en[ii] + a) / (b + a);
            a = c / b;
        }
        a = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn >= 0.0 { a } else { -a };
        cn = c * sn;
    }
    Jacobi { sn, cn, dn }
}

/// Jacobi `dn(u, k)`.
pub fn dn(u: f64, k: f64) -> Result<f64> {
    Ok(jacobi(u, k)?.dn)
}

/// Jacobi `sn(u, k)`.
pub fn sn(u: f64, k: f64) -> Result<f64> {
    Ok(jacobi(u, k)?.sn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn degenerate_modulus() {
        let p = complete_integrals(0.0).unwrap();
        assert!((p.k1 - FRAC_PI_2).abs() < 1e-15);
        assert!((p.e1 - FRAC_PI_2).abs() < 1e-15);
        for u in [0.0, 0.3, 2.0, -7.5] {
            assert_eq!(dn(u, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn near_unit_modulus() {
        let k = 0.999999;
        let p = complete_integrals(k).unwrap();
        assert!(p.k1 > 7.0);
        // E ≈ 1 + (k'^2/2)(ln(4/k') - 1/2)
        let kc2 = (1.0 - k) * (1.0 + k);
        let kc = kc2.sqrt();
        let approx = 1.0 + 0.5 * kc2 * ((4.0 / kc).ln() - 0.5);
        assert!((p.e1 - approx).abs() < 1e-4);
        assert!((p.e1 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(complete_integrals(1.0).is_err());
        assert!(complete_integrals(-0.1).is_err());
        assert!(complete_integrals(1.0 - 1e-13).is_err());
        assert!(dn(0.1, 1.2).is_err());
        assert!(jacobi(0.1, f64::NAN).is_err());
    }

    #[test]
    fn ordering_of_integrals() {
        for i in 0..100 {
            let k = i as f64 / 100.0;
            let p = complete_integrals(k).unwrap();
            assert!(p.k1 > 0.0 && p.e1 > 0.0);
            assert!(p.e1 <= p.k1 + 1e-15);
        }
    }

    #[test]
    fn half_period_value() {
        let k = 0.5;
        let kk = ellip_k(k).unwrap();
        let v = dn(kk, k).unwrap();
        assert!((v - (1.0 - k * k).sqrt()).abs() < 1e-12);
        assert_eq!(dn(0.0, k).unwrap(), 1.0);
    }

    #[test]
    fn dn_is_even_and_periodic() {
        for &k in &[0.1, 0.5, 0.8, 0.95] {
            let kk = ellip_k(k).unwrap();
            for i in 0..50 {
                let u = -3.0 + 0.17 * i as f64;
                let a = dn(u, k).unwrap();
                assert!((a - dn(-u, k).unwrap()).abs() < 1e-14);
                assert!((a - dn(u + 2.0 * kk, k).unwrap()).abs() < 1e-12);
                assert!(a >= (1.0 - k * k).sqrt() - 1e-15 && a <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn sn_at_quarter_period() {
        let k = 0.7;
        let kk = ellip_k(k).unwrap();
        let j = jacobi(kk, k).unwrap();
        assert!((j.sn - 1.0).abs() < 1e-12);
        assert!(j.cn.abs() < 1e-7);
        let j = jacobi(PI / 7.0, 0.0).unwrap();
        assert!((j.sn - (PI / 7.0).sin()).abs() < 1e-15);
    }
}
