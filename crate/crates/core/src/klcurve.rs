//! The `(k, L)` constraint under which the dnoidal ansatz solves the
//! Kawahara profile equation, and the mean-minus-speed function along it.
//!
//! With `L1 = L²` the constraint is the depressed cubic
//! `L1³ − q(k) L1 + c(k) = 0`,
//! `q = (908544/31)(k⁴ − k² + 1)K⁶/K²`, `c = (89989120/31)(k²−2)(k²−½)(k²+1)K⁶`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::elliptic::{self, EllipticPair};
use crate::error::{Error, Result};
use crate::profile::mean_minus_speed_numerator;

/// One solution of the constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KLPoint {
    pub k: f64,
    /// `L²`
    pub l1: f64,
    /// `L`
    pub period: f64,
    /// Cubic residual divided by its largest term.
    pub residual: f64,
    /// `507 L⁴ (a − ω)`, independent of the speed.
    pub p_value: f64,
}

/// Coefficients `(q, c)` of `L1³ − q L1 + c`.
pub fn cubic_coefficients(ep: &EllipticPair) -> (f64, f64) {
    let k2 = ep.k * ep.k;
    let kk2 = ep.k1 * ep.k1;
    let kk4 = kk2 * kk2;
    let q = 908544.0 / 31.0 * (k2 * k2 - k2 + 1.0) * kk4;
    let c = 89989120.0 / 31.0 * (k2 - 2.0) * (k2 - 0.5) * (k2 + 1.0) * kk4 * kk2;
    (q, c)
}

fn cubic(q: f64, c: f64, x: f64) -> f64 {
    (x * x - q) * x + c
}

/// Cubic residual at `(k, L1)` relative to the largest of its three terms.
pub fn relative_residual(ep: &EllipticPair, l1: f64) -> f64 {
    let (q, c) = cubic_coefficients(ep);
    let scale = c.abs().max((q * l1).abs()).max(l1.powi(3).abs());
    cubic(q, c, l1).abs() / scale
}

fn bisect(q: f64, c: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = cubic(q, c, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = cubic(q, c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    // Newton polish; stays inside the bracket.
    for _ in 0..3 {
        let d = 3.0 * x * x - q;
        if d == 0.0 {
            break;
        }
        let nx = x - cubic(q, c, x) / d;
        if nx.is_finite() && nx > lo && nx < hi {
            x = nx;
        }
    }
    x
}

/// All positive roots `L1` at modulus `k`, ascending.
pub fn positive_roots(k: f64) -> Result<Vec<f64>> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::domain(format!("modulus k = {k} outside (0, 1)")));
    }
    let ep = elliptic::complete_integrals(k)?;
    let (q, c) = cubic_coefficients(&ep);
    let crit = (q / 3.0).sqrt();
    let upper = 2.0 * (q.sqrt() + c.abs().cbrt()) + 1.0;
    let mut roots = Vec::new();
    if c > 0.0 {
        if cubic(q, c, crit) < 0.0 {
            roots.push(bisect(q, c, 0.0, crit));
            roots.push(bisect(q, c, crit, upper));
        } else if cubic(q, c, crit) == 0.0 {
            roots.push(crit);
        }
    } else if c < 0.0 {
        roots.push(bisect(q, c, crit, upper));
    } else {
        roots.push(q.sqrt());
    }
    Ok(roots)
}

fn point(ep: &EllipticPair, l1: f64) -> KLPoint {
    KLPoint {
        k: ep.k,
        l1,
        period: l1.sqrt(),
        residual: relative_residual(ep, l1),
        p_value: mean_minus_speed_numerator(ep, l1),
    }
}

/// Result of solving the constraint at one modulus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KLSolution {
    pub k: f64,
    pub roots: Vec<KLPoint>,
    /// Root on the smooth branch through `k = 1/√2`, if any.
    pub branch: Option<KLPoint>,
}

/// Solves for `L1` at `k`. The branch root is the largest positive root:
/// it coincides with `√q` at `k² = ½` and stays continuous down to the fold
/// where the two positive roots merge.
pub fn solve_l1(k: f64) -> Result<KLSolution> {
    let ep = elliptic::complete_integrals(k)?;
    let roots: Vec<KLPoint> = positive_roots(k)?
        .into_iter()
        .map(|r| point(&ep, r))
        .collect();
    let branch = roots.last().copied();
    Ok(KLSolution { k, roots, branch })
}

/// The branch point at `k`, failing when the branch does not reach `k`.
pub fn branch_point(k: f64) -> Result<KLPoint> {
    solve_l1(k)?.branch.ok_or_else(|| {
        Error::domain(format!(
            "no positive period solves the kL constraint at k = {k}"
        ))
    })
}

/// `L1` at `k = 1/√2`, where the constant term of the cubic vanishes.
pub fn analytic_branch_l1() -> f64 {
    let kk = elliptic::ellip_k(FRAC_1_SQRT_2).unwrap();
    (908544.0_f64 / 31.0 * 0.75).sqrt() * kk * kk
}

/// `p(k, L²) = 507 L⁴ (a − ω)`.
pub fn p_of_k(k: f64, period: f64) -> Result<f64> {
    let ep = elliptic::complete_integrals(k)?;
    Ok(mean_minus_speed_numerator(&ep, period * period))
}

/// One row of a branch sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: f64,
    pub point: Option<KLPoint>,
    /// `M(ψ)/L0 > ω0 > 0`, i.e. `p > 0` with a positive speed.
    pub stable: bool,
}

/// Follows the branch over `k_grid`, starting from the grid point nearest
/// `1/√2` and taking the nearest positive root at each step outward.
/// Root finding runs on up to `jobs` threads.
pub fn sweep(k_grid: &[f64], speed: f64, jobs: usize) -> Result<Vec<SweepRow>> {
    if let Some(bad) = k_grid.iter().find(|k| !(**k > 0.0 && **k < 1.0)) {
        return Err(Error::domain(format!("grid modulus {bad} outside (0, 1)")));
    }
    let solve = |k: &f64| -> Result<(EllipticPair, Vec<f64>)> {
        Ok((elliptic::complete_integrals(*k)?, positive_roots(*k)?))
    };
    let roots: Vec<(EllipticPair, Vec<f64>)> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?;
        pool.install(|| k_grid.par_iter().map(solve).collect::<Result<Vec<_>>>())?
    } else {
        k_grid.iter().map(solve).collect::<Result<Vec<_>>>()?
    };

    let mut chosen: Vec<Option<f64>> = vec![None; k_grid.len()];
    if let Some(seed) = (0..k_grid.len()).min_by(|&i, &j| {
        let di = (k_grid[i] - FRAC_1_SQRT_2).abs();
        let dj = (k_grid[j] - FRAC_1_SQRT_2).abs();
        di.total_cmp(&dj)
    }) {
        chosen[seed] = roots[seed].1.last().copied();
        let mut follow = |order: &mut dyn Iterator<Item = usize>| {
            let mut prev = chosen[seed];
            for i in order {
                let pick = match prev {
                    Some(p) => roots[i]
                        .1
                        .iter()
                        .copied()
                        .min_by(|a, b| (a - p).abs().total_cmp(&(b - p).abs())),
                    None => None,
                };
                chosen[i] = pick;
                prev = pick;
            }
        };
        follow(&mut (seed + 1..k_grid.len()));
        follow(&mut (0..seed).rev());
    }

    Ok(k_grid
        .iter()
        .zip(&roots)
        .zip(&chosen)
        .map(|((&k, (ep, _)), l1)| {
            let point = l1.map(|l1| point(ep, l1));
            let stable = point.is_some_and(|p| p.p_value > 0.0) && speed > 0.0;
            SweepRow { k, point, stable }
        })
        .collect())
}

/// `steps` equispaced moduli on `[k_min, k_max]`.
pub fn linear_grid(k_min: f64, k_max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![k_min],
        _ => (0..steps)
            .map(|i| k_min + (k_max - k_min) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// CSV with header `k,L1,L,p,stable`; rows off the branch carry empty
/// numeric fields and `no_root` in the last column.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("k,L1,L,p,stable\n");
    for r in rows {
        match r.point {
            Some(p) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.k, p.l1, p.period, p.p_value, r.stable
                );
            }
            None => {
                let _ = writeln!(out, "{},,,,no_root", r.k);
            }
        }
    }
    out
}

/// `p(L1(k))` on the branch.
pub fn p_on_branch(k: f64) -> Result<f64> {
    Ok(branch_point(k)?.p_value)
}

/// Modulus where `p(L1(k))` changes sign inside `[k_lo, k_hi]`.
pub fn p_sign_change(k_lo: f64, k_hi: f64) -> Result<f64> {
    let mut lo = k_lo;
    let mut hi = k_hi;
    let mut flo = p_on_branch(lo)?;
    let fhi = p_on_branch(hi)?;
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::invalid(format!(
            "p keeps its sign on [{k_lo}, {k_hi}]"
        )));
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        let fm = p_on_branch(mid)?;
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest modulus on the branch (fold point) within `[k_lo, k_hi]`,
/// located by bisection on root existence.
pub fn branch_fold(k_lo: f64, k_hi: f64) -> Result<f64> {
    let has = |k: f64| solve_l1(k).map(|s| s.branch.is_some());
    if has(k_lo)? || !has(k_hi)? {
        return Err(Error::invalid("fold not bracketed"));
    }
    let (mut lo, mut hi) = (k_lo, k_hi);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if has(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::dnoidal_coefficients;

    // Independent of the bracketing solver: dense scan of the cubic for sign
    // changes, then plain bisection.
    fn scan_oracle(k: f64) -> Vec<f64> {
        let ep = elliptic::complete_integrals(k).unwrap();
        let (q, c) = cubic_coefficients(&ep);
        let f = |x: f64| x * x * x - q * x + c;
        let xs: Vec<f64> = (0..=200_000)
            .map(|i| 1e-6 * (1e12_f64).powf(i as f64 / 200_000.0))
            .collect();
        let mut out = vec![];
        for w in xs.windows(2) {
            if f(w[0]).signum() != f(w[1]).signum() {
                let (mut a, mut b) = (w[0], w[1]);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if f(m).signum() == f(a).signum() {
                        a = m
                    } else {
                        b = m
                    }
                }
                out.push(0.5 * (a + b));
            }
        }
        out
    }

    #[test]
    fn analytic_point() {
        let s = solve_l1(FRAC_1_SQRT_2).unwrap();
        let b = s.branch.unwrap();
        let exact = analytic_branch_l1();
        assert!(
            (b.l1 - exact).abs() < 1e-12 * exact,
            "{} vs {}",
            b.l1,
            exact
        );
    }

    #[test]
    fn roots_match_scan() {
        for &k in &[0.55, 0.6, 0.65, 0.75, 0.8, 0.9, 0.95] {
            let ours = positive_roots(k).unwrap();
            let oracle = scan_oracle(k);
            assert_eq!(ours.len(), oracle.len(), "k={k}");
            for (a, b) in ours.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-10 * b, "k={k}: {a} vs {b}");
            }
            let ep = elliptic::complete_integrals(k).unwrap();
            for r in ours {
                assert!(relative_residual(&ep, r) < 1e-10);
            }
        }
    }

    #[test]
    fn no_branch_at_small_modulus() {
        let s = solve_l1(0.5).unwrap();
        assert!(s.roots.is_empty() && s.branch.is_none());
        assert!(branch_point(0.5).is_err());
        let fold = branch_fold(0.5, 0.6).unwrap();
        assert!(fold > 0.5 && fold < 0.56, "fold at {fold}");
    }

    #[test]
    fn p_matches_profile_mean() {
        let mut state = 0x2545F4914F6CDD1D_u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let k = 0.05 + 0.9 * next();
            let l = 2.0 + 60.0 * next();
            let w = -3.0 + 6.0 * next();
            let (a, _, _) = dnoidal_coefficients(k, l, w).unwrap();
            let p = p_of_k(k, l).unwrap();
            let lhs = a - w;
            let rhs = p / (507.0 * l.powi(4));
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                "{lhs} {rhs}"
            );
        }
    }

    #[test]
    fn sweep_follows_largest_root() {
        let grid = linear_grid(0.05, 0.95, 91);
        let rows = sweep(&grid, 1.0, 1).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        for r in &rows {
            if let Some(p) = r.point {
                assert_eq!(Some(p), solve_l1(r.k).unwrap().branch);
                assert!(p.residual < 1e-10);
                if let Some((k0, l0)) = prev {
                    assert!(p.l1 > l0, "L1 not monotone at k={}", r.k);
                    // generous Lipschitz bound away from the fold
                    if k0 > 0.56 {
                        assert!((p.l1 - l0).abs() < 1e5 * (r.k - k0));
                    }
                }
                prev = Some((r.k, p.l1));
            }
        }
        assert!(rows.iter().any(|r| r.stable));
        assert!(rows.iter().any(|r| r.point.is_some() && !r.stable));
        let par = sweep(&grid, 1.0, 4).unwrap();
        assert_eq!(rows, par);
    }

    #[test]
    fn single_and_empty_sweeps() {
        let rows = sweep(&[0.8], 1.0, 1).unwrap();
        assert_eq!(rows[0].point, solve_l1(0.8).unwrap().branch);
        assert_eq!(sweep_csv(&[]), "k,L1,L,p,stable\n");
        let rows = sweep(&[0.3], 1.0, 1).unwrap();
        assert!(sweep_csv(&rows).ends_with("0.3,,,,no_root\n"));
        assert!(sweep(&[1.2], 1.0, 1).is_err());
    }

    #[test]
    fn sign_change_is_bracketed() {
        let ks = p_sign_change(0.8, 0.9).unwrap();
        assert!(p_on_branch(ks - 1e-6).unwrap() > 0.0);
        assert!(p_on_branch(ks + 1e-6).unwrap() < 0.0);
    }
}
