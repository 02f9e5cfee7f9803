//! FFT plumbing shared by the profile, continuation and evolution code.
//!
//! Half-spectrum convention: a real `L`-periodic function is stored as
//! `ĉ(0..=N)` with `ĉ(−n) = conj(ĉ(n))`, so that
//! `u(x) = Σ_{|n|≤N} ĉ(n) e^{2πinx/L}`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse transforms of one fixed length.
#[derive(Clone)]
pub struct Grid {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("len", &self.len).finish()
    }
}

impl Grid {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "grid length must be positive");
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    /// Smallest convenient length that holds products of two degree-`n`
    /// trigonometric polynomials without aliasing into `|mode| ≤ n`.
    pub fn dealiased_for(n: usize) -> Self {
        let min = 3 * n + 1;
        let mut len = 8;
        while len < min {
            len *= 2;
        }
        Self::new(len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Half-spectrum `ĉ(0..=n_max)` of real samples on `x_j = jL/len`.
    pub fn analyze(&self, samples: &[f64], n_max: usize) -> Vec<Complex64> {
        assert_eq!(samples.len(), self.len);
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        let top = n_max.min(self.len / 2);
        let mut out: Vec<Complex64> = buf[..=top].iter().map(|c| c * scale).collect();
        if 2 * top == self.len && top > 0 {
            // Nyquist bin is shared by ±len/2; split it.
            out[top] *= 0.5;
        }
        out.resize(n_max + 1, Complex64::new(0.0, 0.0));
        out
    }

    /// Real samples on the grid from a half spectrum.
    pub fn synthesize(&self, half: &[Complex64]) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        let top = (half.len() - 1).min((self.len - 1) / 2);
        buf[0] = Complex64::new(half[0].re, 0.0);
        for n in 1..=top {
            buf[n] = half[n];
            buf[self.len - n] = half[n].conj();
        }
        self.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Product of two band-limited real functions, truncated to `n_out` modes.
    pub fn multiply(&self, a: &[Complex64], b: &[Complex64], n_out: usize) -> Vec<Complex64> {
        let ua = self.synthesize(a);
        let ub = self.synthesize(b);
        let prod: Vec<f64> = ua.iter().zip(&ub).map(|(x, y)| x * y).collect();
        self.analyze(&prod, n_out)
    }
}

/// Real cosine coefficients to a half spectrum.
pub fn real_to_half(c: &[f64]) -> Vec<Complex64> {
    c.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}
