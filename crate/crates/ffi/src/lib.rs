//! C ABI for wavestab.
//!
//! Every function returns a [`WsStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and can be copied out with
//! [`ws_last_error_message`]. Waves are opaque handles created by
//! [`ws_wave_new_dnoidal`] and released with [`ws_wave_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wavestab::criteria::{self, CriteriaOptions, Verdict};
use wavestab::galerkin::{self, ZeroTolerance};
use wavestab::multiplier::MultiplierSymbol;
use wavestab::profile::{build_dnoidal, FourierProfile};
use wavestab::{elliptic, klcurve, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Invalid = 3,
    NewtonDiverged = 4,
    Singular = 5,
    EigenFailure = 6,
    BlowUp = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

impl From<&Error> for WsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => WsStatus::Domain,
            Error::Invalid(_) => WsStatus::Invalid,
            Error::NewtonDiverged { .. } => WsStatus::NewtonDiverged,
            Error::Singular(_) => WsStatus::Singular,
            Error::EigenFailure(_) => WsStatus::EigenFailure,
            Error::BlowUp { .. } => WsStatus::BlowUp,
            Error::Io(_) => WsStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsVerdict {
    StableByDetCriterion = 0,
    StableByMOmegaNonnegBranch = 1,
    Inconclusive = 2,
}

impl From<Verdict> for WsVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::StableByDetCriterion => WsVerdict::StableByDetCriterion,
            Verdict::StableByMOmegaNonnegBranch => WsVerdict::StableByMOmegaNonnegBranch,
            Verdict::Inconclusive => WsVerdict::Inconclusive,
        }
    }
}

/// `K(k)`, `E(k)`, `K(k')`, `E(k')`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WsEllipticPair {
    pub k: f64,
    pub big_k: f64,
    pub big_e: f64,
    pub big_k_prime: f64,
    pub big_e_prime: f64,
}

/// Branch solution of the period constraint.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WsKlPoint {
    pub k: f64,
    pub l1: f64,
    pub period: f64,
    pub residual: f64,
    pub p_value: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WsSpectrumSummary {
    pub truncation: usize,
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
    pub lowest: f64,
    pub tol_zero: f64,
    pub kernel_corr: f64,
    pub gap: f64,
    /// 1 when exactly one negative and one zero eigenvalue, kernel along ψ′.
    pub assumption_h: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsStabilitySummary {
    pub verdict: WsVerdict,
    pub m: f64,
    pub f: f64,
    pub m_omega: f64,
    pub m_a: f64,
    pub f_omega: f64,
    pub f_a: f64,
    pub det_d: f64,
    pub i: f64,
    pub avg_minus_speed: f64,
    pub n_neg: usize,
    pub n_zero: usize,
    pub kernel_corr: f64,
}

/// Travelling wave: profile with its speed and integration constant.
pub struct WsWave {
    psi: FourierProfile,
    k: f64,
    omega: f64,
    a_const: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> Result<(), WsStatus>) -> WsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            WsStatus::Panic
        }
    }
}

fn lib<T>(r: wavestab::Result<T>) -> Result<T, WsStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        WsStatus::from(&e)
    })
}

fn null(what: &str) -> WsStatus {
    set_error(format!("{what} is null"));
    WsStatus::NullPointer
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, WsStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn wave<'a>(w: *const WsWave) -> Result<&'a WsWave, WsStatus> {
    w.as_ref().ok_or_else(|| null("wave"))
}

/// Length of the last error message on this thread, without the
/// terminating nul; 0 if the last call succeeded.
#[no_mangle]
pub extern "C" fn ws_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |s| s.as_bytes().len()))
}

/// Copies the last error message (nul-terminated) into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ws_last_error_message(buf: *mut c_char, len: usize) -> WsStatus {
    if buf.is_null() {
        return WsStatus::NullPointer;
    }
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[0u8][..], |s| s.as_bytes_with_nul());
        if bytes.len() > len {
            return WsStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, bytes.len());
        WsStatus::Ok
    })
}

/// Complete elliptic integrals at modulus `k ∈ [0, 1)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_complete_integrals(k: f64, out_pair: *mut WsEllipticPair) -> WsStatus {
    guard(|| {
        let o = out(out_pair, "out_pair")?;
        let ep = lib(elliptic::complete_integrals(k))?;
        *o = WsEllipticPair {
            k,
            big_k: ep.k1,
            big_e: ep.e1,
            big_k_prime: ep.k1p,
            big_e_prime: ep.e1p,
        };
        Ok(())
    })
}

/// Jacobi `dn(u, k)`.
///
/// # Safety
/// `out_value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_dn(u: f64, k: f64, out_value: *mut f64) -> WsStatus {
    guard(|| {
        let o = out(out_value, "out_value")?;
        *o = lib(elliptic::dn(u, k))?;
        Ok(())
    })
}

/// Branch root of the period constraint at `k`.
///
/// # Safety
/// `out_point` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_kl_solve(k: f64, out_point: *mut WsKlPoint) -> WsStatus {
    guard(|| {
        let o = out(out_point, "out_point")?;
        let p = lib(klcurve::branch_point(k))?;
        *o = WsKlPoint {
            k: p.k,
            l1: p.l1,
            period: p.period,
            residual: p.residual,
            p_value: p.p_value,
        };
        Ok(())
    })
}

/// `p(k, L²)`, whose sign is that of `M/L − ω`.
///
/// # Safety
/// `out_value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_p_of_k(k: f64, period: f64, out_value: *mut f64) -> WsStatus {
    guard(|| {
        let o = out(out_value, "out_value")?;
        *o = lib(klcurve::p_of_k(k, period))?;
        Ok(())
    })
}

/// Dnoidal wave of modulus `k` on the branch at speed `omega`, truncated at
/// `truncation` modes. Free with [`ws_wave_free`].
///
/// # Safety
/// `out_wave` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_wave_new_dnoidal(
    k: f64,
    omega: f64,
    truncation: usize,
    out_wave: *mut *mut WsWave,
) -> WsStatus {
    guard(|| {
        let o = out(out_wave, "out_wave")?;
        *o = ptr::null_mut();
        let pt = lib(klcurve::branch_point(k))?;
        let (params, psi) = lib(build_dnoidal(k, pt.period, omega, truncation))?;
        *o = Box::into_raw(Box::new(WsWave {
            psi,
            k,
            omega,
            a_const: params.a_const,
        }));
        Ok(())
    })
}

/// Releases a wave; null is ignored.
///
/// # Safety
/// `w` must come from [`ws_wave_new_dnoidal`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ws_wave_free(w: *mut WsWave) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Number of stored coefficients, `N + 1`; 0 for null.
///
/// # Safety
/// `w` must be null or a live wave.
#[no_mangle]
pub unsafe extern "C" fn ws_wave_len(w: *const WsWave) -> usize {
    w.as_ref().map_or(0, |w| w.psi.coeffs().len())
}

/// Period, speed and integration constant.
///
/// # Safety
/// `w` must be a live wave; out-pointers may be null to skip.
#[no_mangle]
pub unsafe extern "C" fn ws_wave_params(
    w: *const WsWave,
    period: *mut f64,
    omega: *mut f64,
    a_const: *mut f64,
) -> WsStatus {
    guard(|| {
        let w = wave(w)?;
        for (p, v) in [
            (period, w.psi.period()),
            (omega, w.omega),
            (a_const, w.a_const),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Copies the cosine coefficients `c₀..c_N` into `buf`.
///
/// # Safety
/// `w` must be a live wave and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ws_wave_coeffs(w: *const WsWave, buf: *mut f64, len: usize) -> WsStatus {
    guard(|| {
        let w = wave(w)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let c = w.psi.coeffs();
        if len < c.len() {
            set_error(format!("buffer holds {len} values, need {}", c.len()));
            return Err(WsStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(c.as_ptr(), buf, c.len());
        Ok(())
    })
}

/// `ψ(x)` from the truncated series.
///
/// # Safety
/// `w` must be a live wave, `out_value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_wave_eval(w: *const WsWave, x: f64, out_value: *mut f64) -> WsStatus {
    guard(|| {
        let w = wave(w)?;
        *out(out_value, "out_value")? = w.psi.eval(x);
        Ok(())
    })
}

/// Spectrum of the linearized operator at the wave's own truncation.
///
/// # Safety
/// `w` must be a live wave, `out_summary` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_spectrum_summary(
    w: *const WsWave,
    out_summary: *mut WsSpectrumSummary,
) -> WsStatus {
    guard(|| {
        let w = wave(w)?;
        let o = out(out_summary, "out_summary")?;
        let op = galerkin::assemble(&w.psi, w.omega, &MultiplierSymbol::kawahara());
        let r = lib(galerkin::spectrum(&op, ZeroTolerance::Default))?;
        *o = WsSpectrumSummary {
            truncation: r.truncation,
            n_neg: r.n_neg,
            n_zero: r.n_zero,
            n_pos: r.n_pos,
            lowest: r.lowest(),
            tol_zero: r.tol_zero,
            kernel_corr: r.kernel_corr,
            gap: r.gap,
            assumption_h: r.assumption_h() as i32,
        };
        Ok(())
    })
}

fn report(w: &WsWave) -> Result<criteria::StabilityReport, WsStatus> {
    let opts = CriteriaOptions {
        truncation: w.psi.truncation(),
        ..Default::default()
    };
    let mut r = lib(criteria::evaluate(
        &w.psi,
        w.omega,
        w.a_const,
        &MultiplierSymbol::kawahara(),
        &opts,
    ))?;
    r.k = Some(w.k);
    Ok(r)
}

/// Stability criteria at the wave.
///
/// # Safety
/// `w` must be a live wave, `out_summary` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_stability_report(
    w: *const WsWave,
    out_summary: *mut WsStabilitySummary,
) -> WsStatus {
    guard(|| {
        let w = wave(w)?;
        let o = out(out_summary, "out_summary")?;
        let r = report(w)?;
        let d = r.derivatives;
        *o = WsStabilitySummary {
            verdict: r.verdict.into(),
            m: r.m,
            f: r.f,
            m_omega: d.m_omega,
            m_a: d.m_a,
            f_omega: d.f_omega,
            f_a: d.f_a,
            det_d: r.det_d,
            i: r.witness.i,
            avg_minus_speed: r.avg_minus_speed,
            n_neg: r.spectrum.n_neg,
            n_zero: r.spectrum.n_zero,
            kernel_corr: r.spectrum.kernel_corr,
        };
        Ok(())
    })
}

/// Full report as nul-terminated JSON. `needed` receives the size including
/// the nul; with a short or null `buf` the call returns `BufferTooSmall`.
///
/// # Safety
/// `w` must be a live wave, `buf` null or `len` writable bytes, `needed`
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ws_stability_report_json(
    w: *const WsWave,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> WsStatus {
    guard(|| {
        let w = wave(w)?;
        let json = CString::new(report(w)?.to_json()).expect("json has no nul");
        let bytes = json.as_bytes_with_nul();
        if let Some(n) = needed.as_mut() {
            *n = bytes.len();
        }
        if buf.is_null() || len < bytes.len() {
            set_error(format!("report needs {} bytes", bytes.len()));
            return Err(WsStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, bytes.len());
        Ok(())
    })
}
