//! Shared numeric primitives: monotone bisection, projected ascent for
//! linear objectives over projection oracles, alternating projections,
//! point separation, and exact projections onto the simple polytopes the
//! cone and set oracles reduce to.

use crate::linalg as la;
use crate::{Error, Result};

/// Tolerances and budgets shared by the iterative routines.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Absolute tolerance on residuals and displacements.
    pub tol: f64,
    /// Iteration budget per solver invocation.
    pub max_iter: usize,
    /// Number of starts used by multistart searches.
    pub multistarts: usize,
    /// Seed for any randomized start generation.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-9,
            max_iter: 100_000,
            multistarts: 8,
            seed: 1,
        }
    }
}

impl SolverConfig {
    /// Same budgets with a different tolerance.
    pub fn with_tol(&self, tol: f64) -> SolverConfig {
        SolverConfig { tol, ..self.clone() }
    }
}

/// Root of a nondecreasing function by bisection.
///
/// Requires `g(lo) <= 0 <= g(hi)`; returns the bracket midpoint once the
/// bracket width drops to `cfg.tol`, so the iteration count is at most
/// `log2((hi - lo) / tol) + 1`.
pub fn bisect_monotone(g: impl Fn(f64) -> f64, lo: f64, hi: f64, cfg: &SolverConfig) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidInput(format!("bad bracket [{lo}, {hi}]")));
    }
    let (mut lo, mut hi) = (lo, hi);
    if g(lo) > 0.0 || g(hi) < 0.0 {
        return Err(Error::InvalidInput(
            "bisection bracket does not satisfy g(lo) <= 0 <= g(hi)".into(),
        ));
    }
    let mut iters = 0usize;
    while hi - lo > cfg.tol && iters < cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    Ok(0.5 * (lo + hi))
}

/// Minimizer of a convex function on `[lo, hi]` by ternary search.
pub fn ternary_min(g: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..iters {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if g(a) <= g(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, g(x))
}

/// Maximizes the linear objective `<c, x>` over the convex set behind a
/// projection oracle by projected ascent with unit step on the normalized
/// direction.
///
/// Runs one ascent per start and merges deterministically: a strictly
/// better value replaces the incumbent, ties keep the earliest start. A
/// start counts as converged when the per-step displacement drops to
/// `cfg.tol` or the value plateaus; if no start converges the best
/// iterate is carried in the [`Error::SolverFailure`].
pub fn projected_gradient_max(
    c: &[f64],
    project: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    starts: &[Vec<f64>],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, f64)> {
    let dir = la::normalize(c, 0.0)
        .ok_or_else(|| Error::InvalidInput("zero objective direction".into()))?;
    if starts.is_empty() {
        return Err(Error::InvalidInput("no starts supplied".into()));
    }
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for start in starts {
        let mut x = project(start)?;
        let mut value = la::dot(c, &x);
        let mut converged = false;
        let mut stall = 0usize;
        let mut iters = 0usize;
        while iters < cfg.max_iter {
            iters += 1;
            let y = project(&la::add(&x, &dir))?;
            let disp = la::dist2(&y, &x);
            let vy = la::dot(c, &y);
            if vy > value + 1e-13 * (1.0 + value.abs()) {
                stall = 0;
            } else {
                stall += 1;
            }
            x = y;
            value = vy;
            if disp <= cfg.tol || stall >= 80 {
                converged = true;
                break;
            }
        }
        let better = match &best {
            None => true,
            Some((_, v, _)) => value > *v,
        };
        if better {
            best = Some((x, value, converged));
        } else if let Some((_, _, conv)) = &mut best {
            // A non-improving converged start still certifies the value.
            *conv = *conv || converged;
        }
    }
    let (x, value, converged) = best.unwrap();
    if !converged {
        return Err(Error::SolverFailure {
            iterations: cfg.max_iter,
            residual: f64::NAN,
            best: x,
        });
    }
    Ok((x, value))
}

/// Cyclic projections onto a list of convex sets until a full cycle moves
/// the iterate by at most `tol`. Finds a point of the intersection when
/// one exists near the start; non-convergence is reported, not hidden.
pub fn pocs(
    z0: &[f64],
    projectors: &[&dyn Fn(&[f64]) -> Result<Vec<f64>>],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let mut x = z0.to_vec();
    for _ in 0..max_iter {
        let before = x.clone();
        for p in projectors {
            x = p(&x)?;
        }
        if la::dist2(&x, &before) <= tol {
            return Ok(x);
        }
    }
    Err(Error::SolverFailure {
        iterations: max_iter,
        residual: f64::NAN,
        best: x,
    })
}

/// Dykstra's alternating projections with per-set correction vectors:
/// converges to the Euclidean projection of `z` onto the intersection of
/// the sets (all projectors must be exact Euclidean projections).
pub fn dykstra(
    z: &[f64],
    projectors: &[&dyn Fn(&[f64]) -> Result<Vec<f64>>],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let mut x = z.to_vec();
    let mut corrections = vec![vec![0.0; z.len()]; projectors.len()];
    for _ in 0..max_iter {
        let before = x.clone();
        for (p, corr) in projectors.iter().zip(corrections.iter_mut()) {
            let shifted = la::add(&x, corr);
            let y = p(&shifted)?;
            *corr = la::sub(&shifted, &y);
            x = y;
        }
        if la::dist2(&x, &before) <= tol {
            return Ok(x);
        }
    }
    Err(Error::SolverFailure {
        iterations: max_iter,
        residual: f64::NAN,
        best: x,
    })
}

/// Separating functional for a point outside a convex set given its
/// projection oracle: `f = (z - proj(z)) / dist`, Euclidean-normalized.
/// Fails when `z` is within `cfg.tol * max(1, |z|)` of the set.
pub fn separate_point(
    project: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    z: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, f64)> {
    let p = project(z)?;
    let gap = la::sub(z, &p);
    let dist = la::nrm2(&gap);
    if dist <= cfg.tol * la::nrm2(z).max(1.0) {
        return Err(Error::SeparationFailed(format!(
            "point is within {dist:.3e} of the set"
        )));
    }
    Ok((la::scale(&gap, 1.0 / dist), dist))
}

/// Exact Euclidean projection onto the weighted simplex
/// `{x >= 0, <w, x> = level}` with `w > 0`, by scan over the sorted
/// breakpoints of the piecewise-linear multiplier equation.
pub fn weighted_simplex_projection(z: &[f64], w: &[f64], level: f64) -> Vec<f64> {
    assert_eq!(z.len(), w.len());
    assert!(level > 0.0 && w.iter().all(|&wi| wi > 0.0));
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = z[a] / w[a];
        let rb = z[b] / w[b];
        rb.partial_cmp(&ra).unwrap()
    });
    let mut s1 = 0.0; // running sum of w_i z_i over the active set
    let mut s2 = 0.0; // running sum of w_i^2
    let mut lambda = 0.0;
    for (k, &i) in order.iter().enumerate() {
        s1 += w[i] * z[i];
        s2 += w[i] * w[i];
        let cand = (s1 - level) / s2;
        let next_ratio = order
            .get(k + 1)
            .map(|&j| z[j] / w[j])
            .unwrap_or(f64::NEG_INFINITY);
        if cand >= next_ratio {
            lambda = cand;
            break;
        }
    }
    z.iter()
        .zip(w)
        .map(|(&zi, &wi)| (zi - lambda * wi).max(0.0))
        .collect()
}

/// Exact Euclidean projection onto the l1 ball of the given radius
/// (soft-thresholding with the exact multiplier).
pub fn l1_ball_projection(z: &[f64], radius: f64) -> Vec<f64> {
    assert!(radius > 0.0);
    if la::nrm1(z) <= radius {
        return z.to_vec();
    }
    let mut mags: Vec<f64> = z.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut prefix = 0.0;
    let mut lambda = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        prefix += m;
        let cand = (prefix - radius) / (k + 1) as f64;
        let next = mags.get(k + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if cand >= next {
            lambda = cand;
            break;
        }
    }
    z.iter()
        .map(|&zi| zi.signum() * (zi.abs() - lambda).max(0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    #[test]
    fn bisection_finds_cube_root() {
        let cfg = SolverConfig::default();
        let root = bisect_monotone(|t| t * t * t, -1.0, 2.0, &cfg).unwrap();
        assert!(root.abs() <= cfg.tol, "got {root}");
    }

    #[test]
    fn bisection_iteration_count_is_logarithmic() {
        let cfg = SolverConfig::default();
        let evals = Cell::new(0usize);
        let _ = bisect_monotone(
            |t| {
                evals.set(evals.get() + 1);
                t
            },
            -1.0,
            2.0,
            &cfg,
        )
        .unwrap();
        let bound = ((3.0 / cfg.tol).log2().ceil() as usize) + 3; // +2 bracket checks
        assert!(evals.get() <= bound, "{} evals > {}", evals.get(), bound);
    }

    #[test]
    fn bisection_rejects_bad_bracket() {
        let cfg = SolverConfig::default();
        assert!(bisect_monotone(|t| t + 10.0, 0.0, 1.0, &cfg).is_err());
        assert!(bisect_monotone(|t| t, 1.0, 0.0, &cfg).is_err());
    }

    fn clamp_box(z: &[f64]) -> Result<Vec<f64>> {
        Ok(z.iter().map(|x| x.clamp(0.0, 1.0)).collect())
    }

    #[test]
    fn projected_ascent_solves_box_lp() {
        let cfg = SolverConfig::default();
        let (x, v) =
            projected_gradient_max(&[1.0, 0.5], &clamp_box, &[vec![0.2, 0.3]], &cfg).unwrap();
        assert!((v - 1.5).abs() <= 1e-9, "value {v}");
        assert!((x[0] - 1.0).abs() <= 1e-9 && (x[1] - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn projected_ascent_values_are_monotone() {
        let cfg = SolverConfig::default();
        // Instrumented projector records values along the path.
        let vals = std::cell::RefCell::new(Vec::new());
        let project = |z: &[f64]| -> Result<Vec<f64>> {
            let p: Vec<f64> = z.iter().map(|x| x.clamp(0.0, 1.0)).collect();
            vals.borrow_mut().push(p[0] + 0.5 * p[1]);
            Ok(p)
        };
        let _ = projected_gradient_max(&[1.0, 0.5], &project, &[vec![-3.0, 0.1]], &cfg).unwrap();
        let vals = vals.borrow();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn dykstra_projects_onto_intersection() {
        let ball = |z: &[f64]| -> Result<Vec<f64>> {
            let n = la::nrm2(z);
            Ok(if n <= 1.0 {
                z.to_vec()
            } else {
                la::scale(z, 1.0 / n)
            })
        };
        let halfplane = |z: &[f64]| -> Result<Vec<f64>> {
            let mut p = z.to_vec();
            p[0] = p[0].min(0.5);
            Ok(p)
        };
        let got = dykstra(&[2.0, 0.0], &[&ball, &halfplane], 1e-13, 10_000).unwrap();
        assert!(la::dist2(&got, &[0.5, 0.0]) <= 1e-9, "got {got:?}");
        // A point whose ball projection already satisfies the halfplane.
        let got = dykstra(&[0.0, 3.0], &[&ball, &halfplane], 1e-13, 10_000).unwrap();
        assert!(la::dist2(&got, &[0.0, 1.0]) <= 1e-9, "got {got:?}");
    }

    #[test]
    fn separation_from_unit_ball() {
        let ball = |z: &[f64]| -> Result<Vec<f64>> {
            let n = la::nrm2(z);
            Ok(if n <= 1.0 {
                z.to_vec()
            } else {
                la::scale(z, 1.0 / n)
            })
        };
        let cfg = SolverConfig::default();
        let (f, d) = separate_point(&ball, &[2.0, 0.0], &cfg).unwrap();
        assert!(la::dist2(&f, &[1.0, 0.0]) <= 1e-12);
        assert!((d - 1.0).abs() <= 1e-12);
        assert!(separate_point(&ball, &[0.5, 0.0], &cfg).is_err());
    }

    #[test]
    fn weighted_simplex_projection_cases() {
        let got = weighted_simplex_projection(&[2.0, 0.0], &[1.0, 1.0], 1.0);
        assert!(la::dist2(&got, &[1.0, 0.0]) <= 1e-14);
        let got = weighted_simplex_projection(&[0.6, 0.4], &[1.0, 1.0], 1.0);
        assert!(la::dist2(&got, &[0.6, 0.4]) <= 1e-14);
        // Optimality via the multiplier identity z - x = lambda w on the support.
        let got = weighted_simplex_projection(&[1.0, 1.0], &[1.0, 2.0], 2.0);
        assert!(la::dist2(&got, &[0.8, 0.6]) <= 1e-14, "got {got:?}");
    }

    #[test]
    fn l1_ball_projection_cases() {
        let got = l1_ball_projection(&[3.0, 0.0], 1.0);
        assert!(la::dist2(&got, &[1.0, 0.0]) <= 1e-14);
        let got = l1_ball_projection(&[0.3, -0.2], 1.0);
        assert!(la::dist2(&got, &[0.3, -0.2]) <= 1e-14);
        let got = l1_ball_projection(&[1.0, 1.0, 1.0], 1.5);
        assert!(la::dist2(&got, &[0.5, 0.5, 0.5]) <= 1e-14);
        let got = l1_ball_projection(&[1.0, -0.5], 1.0);
        assert!(la::dist2(&got, &[0.75, -0.25]) <= 1e-14);
    }

    #[test]
    fn ternary_search_minimizes_parabola() {
        let (x, v) = ternary_min(|t| (t - 1.0) * (t - 1.0), -4.0, 5.0, 200);
        assert!((x - 1.0).abs() <= 1e-10);
        assert!(v <= 1e-18);
    }
}
