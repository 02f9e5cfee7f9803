//! Pseudospectral integration of `u_t + u u_x − (Mu)_x = 0` with
//! exponential time differencing, conserved quantities and the orbital
//! semi-distance to a wave.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiplier::{wavenumber, MultiplierSymbol};
use crate::profile::{psi_dpsi, FourierProfile};
use crate::spectral::Grid;

/// Sup-norm beyond which a run is treated as blown up.
pub const BLOWUP_LEVEL: f64 = 1e6;
/// Phase samples in the translation search of [`orbital_fit`].
pub const SHIFT_SAMPLES: usize = 4096;
/// Final bracket width of the golden-section refinement.
pub const SHIFT_TOL: f64 = 1e-12;
/// Points on the contour used for the ETDRK4 coefficients.
const CONTOUR_POINTS: usize = 64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Real solution stored as the half spectrum `û(0..=N)`; the negative modes
/// are the conjugates, so reality holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub t: f64,
    period: f64,
    modes: Vec<Complex64>,
}

impl EvolutionState {
    pub fn new(period: f64, modes: Vec<Complex64>) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid(format!(
                "period must be positive, got {period}"
            )));
        }
        if modes.is_empty() {
            return Err(Error::invalid("state needs at least the mean mode"));
        }
        let mut modes = modes;
        modes[0].im = 0.0;
        Ok(Self {
            t: 0.0,
            period,
            modes,
        })
    }

    pub fn from_profile(psi: &FourierProfile) -> Self {
        Self {
            t: 0.0,
            period: psi.period(),
            modes: psi.half_spectrum(),
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn truncation(&self) -> usize {
        self.modes.len() - 1
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    /// `u(· + y)`.
    pub fn translated(&self, y: f64) -> Self {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, wavenumber(n as i64, self.period) * y))
            .collect();
        Self {
            t: self.t,
            period: self.period,
            modes,
        }
    }

    pub fn samples(&self, len: usize) -> Vec<f64> {
        Grid::new(len).synthesize(&self.modes)
    }

    pub fn sup_norm(&self) -> f64 {
        let len = Grid::dealiased_for(self.truncation()).len();
        self.samples(len).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `|û_N| / max |û_n|`.
    pub fn tail_ratio(&self) -> f64 {
        let max = self.modes.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if max == 0.0 {
            0.0
        } else {
            self.modes.last().unwrap().norm() / max
        }
    }

    /// Real cosine part as a profile.
    pub fn even_part(&self) -> FourierProfile {
        FourierProfile::new(self.period, self.modes.iter().map(|c| c.re).collect())
            .expect("period is positive")
    }

    fn is_finite(&self) -> bool {
        self.modes
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// `(E, F, M)` with `E = ½∫(M^{1/2}u)² − ⅙∫u³`, `F = ½∫u²`, `M = ∫u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservedTriple {
    pub e: f64,
    pub f: f64,
    pub m: f64,
}

impl ConservedTriple {
    /// `E + ωF + AM`.
    pub fn lyapunov(&self, omega: f64, a_const: f64) -> f64 {
        self.e + omega * self.f + a_const * self.m
    }
}

pub fn conserved(state: &EvolutionState, sym: &MultiplierSymbol) -> ConservedTriple {
    let l = state.period;
    let mut quad = state.modes[0].norm_sqr();
    let mut kin = 0.0;
    for (n, c) in state.modes.iter().enumerate().skip(1) {
        quad += 2.0 * c.norm_sqr();
        kin += 2.0 * sym.at_mode(n as i64, l) * c.norm_sqr();
    }
    // u³ has degree 3N; the dealiased grid integrates it exactly.
    let u = state.samples(Grid::dealiased_for(state.truncation()).len());
    let cube = u.iter().map(|v| v * v * v).sum::<f64>() / u.len() as f64;
    ConservedTriple {
        e: 0.5 * l * kin - l * cube / 6.0,
        f: 0.5 * l * quad,
        m: l * state.modes[0].re,
    }
}

pub fn conserved_profile(psi: &FourierProfile, sym: &MultiplierSymbol) -> ConservedTriple {
    conserved(&EvolutionState::from_profile(psi), sym)
}

/// How the stiff linear part `û_t = λ(κ) û` is formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearPart {
    /// `λ = iκθ(κ)` from `−(Mu)_x`.
    Symbol(MultiplierSymbol),
    /// `λ = −(iκ)³ + (iκ)⁵` from `u_xxx − u_xxxxx` written out.
    KawaharaExplicit,
}

impl LinearPart {
    pub fn coefficient(&self, kappa: f64) -> Complex64 {
        match self {
            LinearPart::Symbol(sym) => Complex64::new(0.0, kappa * sym.eval(kappa)),
            LinearPart::KawaharaExplicit => {
                let ik = Complex64::new(0.0, kappa);
                -ik.powi(3) + ik.powi(5)
            }
        }
    }
}

/// Fourth-order exponential time differencing (Cox–Matthews with
/// contour-integral coefficients).
#[derive(Debug, Clone)]
pub struct Etdrk4 {
    dt: f64,
    period: f64,
    truncation: usize,
    nonlinear: bool,
    grid: Grid,
    ik_half: Vec<Complex64>,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

impl Etdrk4 {
    pub fn new(linear: LinearPart, period: f64, truncation: usize, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!(
                "time step must be positive, got {dt}"
            )));
        }
        if !(period > 0.0) {
            return Err(Error::invalid("period must be positive"));
        }
        let roots: Vec<Complex64> = (0..CONTOUR_POINTS)
            .map(|j| {
                Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64)
            })
            .collect();
        let mean = |f: &dyn Fn(Complex64) -> Complex64, z: Complex64| -> Complex64 {
            roots.iter().map(|r| f(z + r)).sum::<Complex64>() / CONTOUR_POINTS as f64
        };
        let n = truncation + 1;
        let mut s = Self {
            dt,
            period,
            truncation,
            nonlinear: true,
            grid: Grid::dealiased_for(truncation),
            ik_half: Vec::with_capacity(n),
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        for m in 0..n {
            let kappa = wavenumber(m as i64, period);
            let z = linear.coefficient(kappa) * dt;
            s.ik_half.push(Complex64::new(0.0, -0.5 * kappa));
            s.e.push(z.exp());
            s.e2.push((z * 0.5).exp());
            s.q.push(dt * mean(&|w| ((w * 0.5).exp() - 1.0) / w, z));
            s.f1.push(
                dt * mean(
                    &|w| (-4.0 - w + w.exp() * (4.0 - 3.0 * w + w * w)) / w.powi(3),
                    z,
                ),
            );
            s.f2.push(dt * mean(&|w| (2.0 + w + w.exp() * (w - 2.0)) / w.powi(3), z));
            s.f3.push(
                dt * mean(
                    &|w| (-4.0 - 3.0 * w - w * w + w.exp() * (4.0 - w)) / w.powi(3),
                    z,
                ),
            );
        }
        Ok(s)
    }

    pub fn for_symbol(
        sym: &MultiplierSymbol,
        period: f64,
        truncation: usize,
        dt: f64,
    ) -> Result<Self> {
        Self::new(LinearPart::Symbol(*sym), period, truncation, dt)
    }

    /// Test hook: drops the quadratic term, leaving the exact linear flow.
    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    // −(iκ/2) (u²)^, products on the padded grid, truncated to N.
    fn rhs(&self, v: &[Complex64]) -> Vec<Complex64> {
        if !self.nonlinear {
            return vec![ZERO; v.len()];
        }
        let sq = self.grid.multiply(v, v, self.truncation);
        sq.iter().zip(&self.ik_half).map(|(s, k)| s * k).collect()
    }

    pub fn step(&self, state: &EvolutionState) -> Result<EvolutionState> {
        if state.truncation() != self.truncation || state.period != self.period {
            return Err(Error::invalid("state does not match the stepper's grid"));
        }
        let v = &state.modes;
        let nv = self.rhs(v);
        let a: Vec<Complex64> = (0..v.len())
            .map(|i| self.e2[i] * v[i] + self.q[i] * nv[i])
            .collect();
        let na = self.rhs(&a);
        let b: Vec<Complex64> = (0..v.len())
            .map(|i| self.e2[i] * v[i] + self.q[i] * na[i])
            .collect();
        let nb = self.rhs(&b);
        let c: Vec<Complex64> = (0..v.len())
            .map(|i| self.e2[i] * a[i] + self.q[i] * (2.0 * nb[i] - nv[i]))
            .collect();
        let nc = self.rhs(&c);
        let mut modes: Vec<Complex64> = (0..v.len())
            .map(|i| {
                self.e[i] * v[i]
                    + nv[i] * self.f1[i]
                    + 2.0 * (na[i] + nb[i]) * self.f2[i]
                    + nc[i] * self.f3[i]
            })
            .collect();
        modes[0].im = 0.0;
        let next = EvolutionState {
            t: state.t + self.dt,
            period: self.period,
            modes,
        };
        if !next.is_finite() {
            return Err(Error::BlowUp {
                t: next.t,
                sup_norm: f64::INFINITY,
            });
        }
        let sup = next.sup_norm();
        if sup > BLOWUP_LEVEL {
            return Err(Error::BlowUp {
                t: next.t,
                sup_norm: sup,
            });
        }
        Ok(next)
    }
}

/// One step with a freshly built stepper.
pub fn step(state: &EvolutionState, dt: f64, sym: &MultiplierSymbol) -> Result<EvolutionState> {
    Etdrk4::for_symbol(sym, state.period, state.truncation(), dt)?.step(state)
}

/// `0.5 / θ(κ_eff)`, `κ_eff` the highest mode with `|û_n| ≥ 1e−12 max |û|`.
pub fn default_dt(state: &EvolutionState, sym: &MultiplierSymbol) -> f64 {
    let max = state.modes.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let n_eff = state
        .modes
        .iter()
        .rposition(|c| c.norm() >= 1e-12 * max)
        .unwrap_or(0)
        .max(1);
    0.5 / sym.at_mode(n_eff as i64, state.period).max(f64::EPSILON)
}

/// Minimizing translation and the distances there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitalFit {
    /// `inf_y ‖u(· + y) − ψ‖` in the weighted norm.
    pub rho: f64,
    pub shift: f64,
    /// `|⟨ψψ', u(· + y*) − ψ⟩| / (‖ψψ'‖ ‖u(· + y*) − ψ‖)`, in `L²`.
    pub compat: f64,
}

fn weights(period: f64, n: usize, sym: &MultiplierSymbol) -> Vec<f64> {
    (0..=n)
        .map(|m| {
            let mult = if m == 0 { 1.0 } else { 2.0 };
            mult * period * (1.0 + sym.at_mode(m as i64, period))
        })
        .collect()
}

pub fn orbital_distance(u: &EvolutionState, psi: &FourierProfile, sym: &MultiplierSymbol) -> f64 {
    orbital_fit(u, psi, sym).rho
}

/// Translation search over [`SHIFT_SAMPLES`] phases via one weighted
/// cross-correlation, then golden-section refinement of the directly
/// evaluated distance.
pub fn orbital_fit(u: &EvolutionState, psi: &FourierProfile, sym: &MultiplierSymbol) -> OrbitalFit {
    let l = u.period;
    let n = u.truncation().max(psi.truncation());
    let ph = psi.half_spectrum();
    let uh = &u.modes;
    let get = |v: &[Complex64], m: usize| v.get(m).copied().unwrap_or(ZERO);
    let w = weights(l, n, sym);
    let kappa: Vec<f64> = (0..=n).map(|m| wavenumber(m as i64, l)).collect();

    let dist2 = |y: f64| -> f64 {
        (0..=n)
            .map(|m| {
                w[m] * (get(uh, m) * Complex64::from_polar(1.0, kappa[m] * y) - get(&ph, m))
                    .norm_sqr()
            })
            .sum()
    };

    let samples = SHIFT_SAMPLES.max((2 * n + 2).next_power_of_two());
    let g: Vec<Complex64> = (0..=n)
        .map(|m| 0.5 * w[m] * get(uh, m) * get(&ph, m).conj())
        .collect();
    // Σ_{|m|≤n} ĝ(m) e^{iκ_m y_j}: with the halved weights this is the
    // correlation term for every shift on the grid.
    let corr = Grid::new(samples).synthesize(&g);
    let j = (0..samples)
        .max_by(|&a, &b| corr[a].total_cmp(&corr[b]))
        .unwrap_or(0);
    let h = l / samples as f64;
    let (mut a, mut b) = ((j as f64 - 1.0) * h, (j as f64 + 1.0) * h);

    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (dist2(c), dist2(d));
    while b - a > SHIFT_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = dist2(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = dist2(d);
        }
    }
    let mut y = 0.5 * (a + b);
    let mut best = dist2(y);
    let grid_y = j as f64 * h;
    let at_grid = dist2(grid_y);
    if at_grid < best {
        y = grid_y;
        best = at_grid;
    }
    // Parabolic steps on the directly evaluated distance; accurate because
    // no cancellation is involved.
    for s in [1e-6 * h, 1e-9 * h] {
        let (lo, hi) = (dist2(y - s), dist2(y + s));
        let curv = hi - 2.0 * best + lo;
        if curv > 0.0 {
            let cand = y - 0.5 * s * (hi - lo) / curv;
            let dc = dist2(cand);
            if dc < best {
                y = cand;
                best = dc;
            }
        }
    }
    let shift = y.rem_euclid(l);
    let rho = best.max(0.0).sqrt();

    let diff: Vec<Complex64> = (0..=n)
        .map(|m| get(uh, m) * Complex64::from_polar(1.0, kappa[m] * y) - get(&ph, m))
        .collect();
    let pp = psi_dpsi(&psi.resized(n), n).half_spectrum();
    let l2 = |f: &[Complex64], g: &[Complex64]| -> f64 {
        l * (0..=n)
            .map(|m| (if m == 0 { 1.0 } else { 2.0 }) * (get(f, m) * get(g, m).conj()).re)
            .sum::<f64>()
    };
    let denom = (l2(&pp, &pp) * l2(&diff, &diff)).sqrt();
    let compat = if denom > 0.0 {
        l2(&pp, &diff).abs() / denom
    } else {
        0.0
    };
    OrbitalFit { rho, shift, compat }
}

/// Direction `v` of the initial perturbation `u₀ = ψ + δ v`; `v` has unit
/// root-mean-square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Perturbation {
    /// `√2 cos(2π n x / L)`.
    Mode { mode: usize },
    /// Random cosine and sine amplitudes on modes `1..=max_mode`.
    Random { max_mode: usize, seed: u64 },
    /// The constant `1`; changes the mean.
    MeanShift,
}

impl Perturbation {
    pub fn is_mean_preserving(&self) -> bool {
        !matches!(self, Perturbation::MeanShift)
    }

    fn direction(&self, period: f64, n: usize) -> Result<Vec<Complex64>> {
        let mut v = vec![ZERO; n + 1];
        match *self {
            Perturbation::Mode { mode } => {
                if mode == 0 || mode > n {
                    return Err(Error::invalid(format!(
                        "perturbation mode must be in 1..={n}, got {mode}"
                    )));
                }
                v[mode] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            }
            Perturbation::Random { max_mode, seed } => {
                if max_mode == 0 || max_mode > n {
                    return Err(Error::invalid(format!(
                        "random band must be in 1..={n}, got {max_mode}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for slot in v.iter_mut().take(max_mode + 1).skip(1) {
                    *slot = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
                let rms = (2.0 * v.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
                v.iter_mut().for_each(|c| *c /= rms);
            }
            Perturbation::MeanShift => v[0] = Complex64::new(1.0, 0.0),
        }
        let _ = period;
        Ok(v)
    }
}

/// `ψ + δv`. With `fix_f`, `v` is first made orthogonal to `1` and `ψ`
/// and the fluctuation of `ψ` rescaled so that `F` and `M` match `ψ`.
pub fn perturbed_state(
    psi: &FourierProfile,
    delta: f64,
    pert: &Perturbation,
    fix_f: bool,
) -> Result<EvolutionState> {
    let n = psi.truncation();
    let l = psi.period();
    let mut v = pert.direction(l, n)?;
    let p = psi.half_spectrum();
    let ip = |a: &[Complex64], b: &[Complex64]| -> f64 {
        (0..=n)
            .map(|m| (if m == 0 { 1.0 } else { 2.0 }) * (a[m] * b[m].conj()).re)
            .sum()
    };
    let mut base = p.clone();
    if fix_f {
        if !pert.is_mean_preserving() {
            return Err(Error::invalid(
                "an F-preserving perturbation must also preserve the mean",
            ));
        }
        let mut wv = p.clone();
        wv[0] = ZERO;
        let ww = ip(&wv, &wv);
        if ww == 0.0 {
            return Err(Error::invalid("profile has no fluctuation to rescale"));
        }
        v[0] = ZERO;
        let s = ip(&v, &wv) / ww;
        v.iter_mut().zip(&wv).for_each(|(a, b)| *a -= s * b);
        let vv = ip(&v, &v);
        let disc = 1.0 - delta * delta * vv / ww;
        if disc < 0.0 {
            return Err(Error::invalid("perturbation too large to keep F fixed"));
        }
        let tau = 1.0 - disc.sqrt();
        base.iter_mut().zip(&wv).for_each(|(a, b)| *a -= tau * b);
    }
    let modes = base.iter().zip(&v).map(|(a, b)| a + delta * b).collect();
    EvolutionState::new(l, modes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub delta: f64,
    pub perturbation: Perturbation,
    /// Keep `F` and `M` at the wave's values.
    pub fix_f: bool,
    pub horizon: f64,
    pub dt: f64,
    /// Diagnostics every this many steps.
    pub sample_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub t: f64,
    pub rho: f64,
    pub e: f64,
    pub f: f64,
    pub m: f64,
    pub delta_p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    /// Verdict of the criteria at the wave, as supplied by the caller.
    pub predicted: String,
    pub omega: f64,
    pub a_const: f64,
    pub rows: Vec<ExperimentRow>,
    pub rho0: f64,
    pub max_rho: f64,
    /// `u₀` has the wave's `F` and `M` to `1e−12` relative.
    pub on_level_set: bool,
    pub f_defect: f64,
    pub m_defect: f64,
    pub max_compat: f64,
    pub horizon: f64,
    pub note: String,
    /// Blow-up message if the run stopped early; `rows` is then partial.
    pub blowup: Option<String>,
}

impl ExperimentReport {
    /// `t,rho,E,F,M,deltaP` with a header row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,rho,E,F,M,deltaP\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{:.10e},{:.10e},{:.15e},{:.15e},{:.15e},{:.10e}\n",
                r.t, r.rho, r.e, r.f, r.m, r.delta_p
            ));
        }
        s
    }

    /// `max_t |ΔP(t) − ΔP(0)|`.
    pub fn delta_p_drift(&self) -> f64 {
        let p0 = self.rows.first().map_or(0.0, |r| r.delta_p);
        self.rows
            .iter()
            .fold(0.0, |m, r| m.max((r.delta_p - p0).abs()))
    }
}

/// Evolves a perturbation of the wave `ψ` (a solution at `(ω, A)`) up to the
/// horizon and records the orbital distance and conserved quantities.
pub fn stability_experiment(
    psi: &FourierProfile,
    omega: f64,
    a_const: f64,
    sym: &MultiplierSymbol,
    cfg: &ExperimentConfig,
    predicted: &str,
) -> Result<ExperimentReport> {
    if !(cfg.horizon >= 0.0 && cfg.horizon.is_finite()) {
        return Err(Error::invalid("horizon must be nonnegative"));
    }
    if cfg.sample_every == 0 {
        return Err(Error::invalid("sample interval must be at least one step"));
    }
    let u0 = perturbed_state(psi, cfg.delta, &cfg.perturbation, cfg.fix_f)?;
    let stepper = Etdrk4::for_symbol(sym, psi.period(), psi.truncation(), cfg.dt)?;
    let wave = conserved_profile(psi, sym);
    let p_wave = wave.lyapunov(omega, a_const);
    let c0 = conserved(&u0, sym);
    let f_defect = (c0.f - wave.f).abs() / wave.f.abs().max(1.0);
    let m_defect = (c0.m - wave.m).abs() / wave.m.abs().max(1.0);

    let steps = (cfg.horizon / cfg.dt).round() as usize;
    let mut rows = Vec::with_capacity(steps / cfg.sample_every + 2);
    let mut max_compat = 0.0_f64;
    let mut record = |u: &EvolutionState, rows: &mut Vec<ExperimentRow>| {
        let fit = orbital_fit(u, psi, sym);
        max_compat = max_compat.max(fit.compat);
        let c = conserved(u, sym);
        rows.push(ExperimentRow {
            t: u.t,
            rho: fit.rho,
            e: c.e,
            f: c.f,
            m: c.m,
            delta_p: c.lyapunov(omega, a_const) - p_wave,
        });
    };

    let mut u = u0;
    record(&u, &mut rows);
    let mut blowup = None;
    for s in 1..=steps {
        match stepper.step(&u) {
            Ok(next) => u = next,
            Err(e @ Error::BlowUp { .. }) => {
                blowup = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
        if s % cfg.sample_every == 0 || s == steps {
            record(&u, &mut rows);
        }
    }
    let rho0 = rows[0].rho;
    let max_rho = rows.iter().fold(0.0_f64, |m, r| m.max(r.rho));
    Ok(ExperimentReport {
        predicted: predicted.to_owned(),
        omega,
        a_const,
        rows,
        rho0,
        max_rho,
        on_level_set: f_defect < 1e-12 && m_defect < 1e-12,
        f_defect,
        m_defect,
        max_compat,
        horizon: cfg.horizon,
        note: format!(
            "finite horizon T = {}; nothing is claimed beyond it",
            cfg.horizon
        ),
        blowup,
    })
}
