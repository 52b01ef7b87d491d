//! Ordering cones on truncated sequence spaces: membership, Euclidean
//! projection, strict-positivity tests for dual functionals, bounded
//! bases, and dilation.
//!
//! Three families are supported.
//!
//! * `Orthant`: the nonnegative orthant in any ambient. Projection is
//!   coordinate-wise clipping, which is metric-optimal for every
//!   monotone norm in play.
//! * `Slanted`: `{p : p_1 >= 0, |p_n| <= n p_1, 2 <= n <= N}` in the
//!   Euclidean ambient. The dual cone has empty interior in the limit
//!   family (the slices through `e_1` blow up), which is what makes it
//!   useful as a counterexample order.
//! * `Dilated`: `cone(B + delta * ball)` for a bounded base `B` of one of
//!   the other two families. Dilation strictly enlarges the cone while
//!   keeping it pointed (enforced via `delta <= 0.9 * inf |b|`), and is
//!   the engine behind the positive-support approximation scheme.
//!
//! A note on strict positivity over the slanted cone: the test used here
//! is `f_1 - sum_{n>=2} n |f_n| > margin * |f|`, i.e. positivity at the
//! worst sign pattern of the box slice `{p_1 = 1, |p_n| <= n}`. Checking
//! only the single-slot rays `(1, 0, .., +-n, .., 0)` is not enough:
//! `f = (1, 0.4, 0.2)` is positive on every such ray yet takes the value
//! `-0.4` at the corner `(1, -2, -3)`.

use crate::linalg as la;
use crate::solvers::{ternary_min, weighted_simplex_projection, SolverConfig};
use crate::spaces::{NormKind, Vector};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
enum ConeKind {
    Orthant,
    Slanted,
    Dilated(Box<DilatedCone>),
}

#[derive(Debug, Clone)]
struct DilatedCone {
    base: BaseSpec,
    delta: f64,
}

/// A closed convex ordering cone.
#[derive(Debug, Clone)]
pub struct ConeSpec {
    kind: ConeKind,
    dim: usize,
    ambient: NormKind,
}

/// Which cone family a base slices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseCone {
    Orthant,
    Slanted,
}

/// A base of a cone: the slice `{p in P : f(p) = level}` through a
/// strictly positive functional, together with precomputed extremal
/// norms and the boundedness verdict for the truncation family.
#[derive(Debug, Clone)]
pub struct BaseSpec {
    cone: BaseCone,
    functional: Vector,
    level: f64,
    dim: usize,
    ambient: NormKind,
    sup_norm: f64,
    min_norm: f64,
    bounded: bool,
}

impl ConeSpec {
    /// Nonnegative orthant of the given dimension and ambient.
    pub fn orthant(dim: usize, ambient: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("cone of dimension 0".into()));
        }
        Ok(ConeSpec {
            kind: ConeKind::Orthant,
            dim,
            ambient,
        })
    }

    /// Slanted cone `{p_1 >= 0, |p_n| <= n p_1}` in the Euclidean ambient.
    pub fn slanted(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("cone of dimension 0".into()));
        }
        Ok(ConeSpec {
            kind: ConeKind::Slanted,
            dim,
            ambient: NormKind::L2,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> NormKind {
        self.ambient
    }

    pub fn is_dilated(&self) -> bool {
        matches!(self.kind, ConeKind::Dilated(_))
    }

    pub fn is_orthant(&self) -> bool {
        matches!(self.kind, ConeKind::Orthant)
    }

    pub fn is_slanted(&self) -> bool {
        matches!(self.kind, ConeKind::Slanted)
    }

    /// A canonical strictly positive functional, used to seed scalarized
    /// dominance searches.
    pub fn canonical_positive_functional(&self) -> Vector {
        match &self.kind {
            ConeKind::Orthant => {
                Vector::new(vec![1.0; self.dim], self.ambient).expect("finite coords")
            }
            ConeKind::Slanted => Vector::basis(self.dim, 1, self.ambient),
            ConeKind::Dilated(d) => d.base.functional().clone(),
        }
    }

    /// Dilation radius for dilated cones, 0 otherwise.
    pub fn delta(&self) -> f64 {
        match &self.kind {
            ConeKind::Dilated(d) => d.delta,
            _ => 0.0,
        }
    }

    fn check_vector(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.dim(),
            });
        }
        if x.ambient() != self.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: x.ambient(),
            });
        }
        Ok(())
    }

    /// Membership within `tol`: defining inequalities for the explicit
    /// families, projection distance for dilations.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        self.check_vector(x)?;
        let c = x.coords();
        Ok(match &self.kind {
            ConeKind::Orthant => c.iter().all(|&v| v >= -tol),
            ConeKind::Slanted => {
                c[0] >= -tol
                    && c.iter()
                        .enumerate()
                        .skip(1)
                        .all(|(i, &v)| (i + 1) as f64 * c[0] + tol >= v.abs())
            }
            ConeKind::Dilated(d) => dilated_project(d, c).1 <= tol,
        })
    }

    /// Metric projection onto the cone: the projected point and its
    /// distance from `z` in the ambient norm.
    ///
    /// Orthant and slanted projections are exact (clipping, respectively
    /// a breakpoint scan on the 1-D reduction in `p_1`); dilated
    /// projections solve the scale subproblem `min_l d(z, l * (B + delta
    /// ball))` by ternary search, which is convex in the scale.
    pub fn project(&self, z: &Vector, _cfg: &SolverConfig) -> Result<(Vector, f64)> {
        self.check_vector(z)?;
        let c = z.coords();
        let (p, dist) = match &self.kind {
            ConeKind::Orthant => {
                let p: Vec<f64> = c.iter().map(|&v| v.max(0.0)).collect();
                let gap = Vector::new(la::sub(c, &p), self.ambient)
                    .unwrap_or_else(|_| Vector::zeros(self.dim, self.ambient));
                let dist = if la::nrm2(&la::sub(c, &p)) == 0.0 {
                    0.0
                } else {
                    gap.norm()
                };
                (p, dist)
            }
            ConeKind::Slanted => slanted_project(c),
            ConeKind::Dilated(d) => dilated_project(d, c),
        };
        Ok((Vector::new(p, self.ambient)?, dist))
    }

    /// Strict positivity of the functional `f` on the cone minus the
    /// origin, with a quantitative margin.
    ///
    /// * orthant: every coordinate exceeds `margin * |f|_dual`;
    /// * slanted: `f_1 - sum n |f_n| > margin * |f|_2` (worst corner of
    ///   the box slice);
    /// * dilated: `inf_B f > delta * |f|_2 + margin`, the exact condition
    ///   for positivity on the dilated generators.
    pub fn strictly_positive(&self, f: &Vector, margin: f64) -> Result<bool> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: f.dim(),
            });
        }
        if margin < 0.0 {
            return Err(Error::InvalidParameter("negative margin".into()));
        }
        let c = f.coords();
        Ok(match &self.kind {
            ConeKind::Orthant => {
                let scale = f.norm_as(self.ambient.dual());
                c.iter().fold(f64::INFINITY, |m, &v| m.min(v)) > margin * scale
            }
            ConeKind::Slanted => slanted_corner_margin(c) > margin * la::nrm2(c),
            ConeKind::Dilated(d) => {
                d.base.inf_functional(f)? > d.delta * la::nrm2(c) + margin
            }
        })
    }

    /// Largest margin for which [`Self::strictly_positive`] holds
    /// (relative for orthant/slanted, absolute for dilated cones).
    pub fn positivity_margin(&self, f: &Vector) -> Result<f64> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: f.dim(),
            });
        }
        let c = f.coords();
        Ok(match &self.kind {
            ConeKind::Orthant => {
                let scale = f.norm_as(self.ambient.dual());
                if scale == 0.0 {
                    0.0
                } else {
                    c.iter().fold(f64::INFINITY, |m, &v| m.min(v)) / scale
                }
            }
            ConeKind::Slanted => {
                let scale = la::nrm2(c);
                if scale == 0.0 {
                    0.0
                } else {
                    slanted_corner_margin(c) / scale
                }
            }
            ConeKind::Dilated(d) => d.base.inf_functional(f)? - d.delta * la::nrm2(c),
        })
    }

    /// Base through `f` at the given level. Requires `f` strictly
    /// positive for the cone; slanted bases are supported for positive
    /// multiples of `e_1` (other slices have exponentially many corners
    /// and no closed extremal norms).
    pub fn base(&self, f: &Vector, level: f64) -> Result<BaseSpec> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: f.dim(),
            });
        }
        if !(level > 0.0 && level.is_finite()) {
            return Err(Error::InvalidParameter(format!("base level {level}")));
        }
        let c = f.coords();
        match &self.kind {
            ConeKind::Orthant => {
                if c.iter().any(|&v| v <= 0.0) {
                    return Err(Error::InvalidParameter(
                        "base functional must be strictly positive on the orthant".into(),
                    ));
                }
                let vert_norm = |i: usize| -> f64 {
                    let t = level / c[i];
                    match self.ambient {
                        NormKind::Triple => t * (1.0 + f64::exp2(-(i as f64 + 1.0))),
                        _ => t,
                    }
                };
                let sup_over = |upto: usize| (0..upto).map(vert_norm).fold(0.0f64, f64::max);
                let sup_norm = sup_over(self.dim);
                let min_norm = match self.ambient {
                    NormKind::L2 => level / la::nrm2(c),
                    NormKind::L1 => level / c.iter().fold(0.0f64, |m, &v| m.max(v)),
                    // Exact for Sup; a valid lower bound for Triple.
                    NormKind::Sup | NormKind::Triple => level / c.iter().sum::<f64>(),
                };
                let half = self.dim.div_ceil(2);
                let bounded = sup_norm <= 1.25 * sup_over(half);
                Ok(BaseSpec {
                    cone: BaseCone::Orthant,
                    functional: f.clone(),
                    level,
                    dim: self.dim,
                    ambient: self.ambient,
                    sup_norm,
                    min_norm,
                    bounded,
                })
            }
            ConeKind::Slanted => {
                if c[0] <= 0.0 || c.iter().skip(1).any(|&v| v != 0.0) {
                    return Err(Error::InvalidParameter(
                        "slanted bases are supported for positive multiples of e1 only".into(),
                    ));
                }
                let s = level / c[0];
                let slice_sq = |upto: usize| {
                    1.0 + (2..=upto).map(|n| (n * n) as f64).sum::<f64>()
                };
                let sup_norm = s * slice_sq(self.dim).sqrt();
                let half = self.dim.div_ceil(2);
                let bounded = sup_norm <= 1.25 * s * slice_sq(half).sqrt();
                Ok(BaseSpec {
                    cone: BaseCone::Slanted,
                    functional: f.clone(),
                    level,
                    dim: self.dim,
                    ambient: self.ambient,
                    sup_norm,
                    min_norm: s,
                    bounded,
                })
            }
            ConeKind::Dilated(_) => Err(Error::InvalidParameter(
                "bases of dilated cones are not supported".into(),
            )),
        }
    }

    /// Dilation `cone(B + delta * ball)` of this cone around one of its
    /// bases. Pointedness is preserved by requiring
    /// `0 < delta <= 0.9 * inf_B |b|`; the ambient must be Euclidean
    /// (the dilation ball and the projection arithmetic agree there).
    pub fn dilate(&self, base: &BaseSpec, delta: f64) -> Result<ConeSpec> {
        let own = match self.kind {
            ConeKind::Orthant => BaseCone::Orthant,
            ConeKind::Slanted => BaseCone::Slanted,
            ConeKind::Dilated(_) => {
                return Err(Error::InvalidParameter(
                    "cannot dilate an already dilated cone".into(),
                ))
            }
        };
        if base.cone != own || base.dim != self.dim {
            return Err(Error::InvalidParameter(
                "base does not belong to this cone".into(),
            ));
        }
        if self.ambient != NormKind::L2 {
            return Err(Error::InvalidParameter(
                "dilation is implemented for the Euclidean ambient".into(),
            ));
        }
        if !(delta > 0.0) || delta > 0.9 * base.min_norm {
            return Err(Error::InvalidParameter(format!(
                "dilation radius {delta} outside (0, {}] = (0, 0.9 inf_B |b|]",
                0.9 * base.min_norm
            )));
        }
        Ok(ConeSpec {
            kind: ConeKind::Dilated(Box::new(DilatedCone {
                base: base.clone(),
                delta,
            })),
            dim: self.dim,
            ambient: self.ambient,
        })
    }

    /// Deterministic members of the cone for sampling-based checks.
    pub fn samples(&self, count: usize, seed: u64) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let coords = match &self.kind {
                ConeKind::Orthant => {
                    let k = out.len();
                    if k < self.dim {
                        let mut c = vec![0.0; self.dim];
                        c[k] = 1.0 + (k as f64) * 0.25;
                        c
                    } else {
                        (0..self.dim)
                            .map(|_| rng.gen_range(0.0..2.0f64))
                            .collect()
                    }
                }
                ConeKind::Slanted => {
                    let t: f64 = rng.gen_range(0.05..2.0);
                    let mut c = vec![0.0; self.dim];
                    c[0] = t;
                    for n in 2..=self.dim {
                        let reach = n as f64 * t;
                        c[n - 1] = if out.len() % 3 == 0 {
                            // corner samples exercise the extreme rays
                            reach * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
                        } else {
                            rng.gen_range(-reach..=reach)
                        };
                    }
                    c
                }
                ConeKind::Dilated(d) => {
                    let lam: f64 = rng.gen_range(0.1..2.0);
                    let b = d.base.sample_coords(&mut rng);
                    let dir: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let dir = la::normalize(&dir, 1e-12).unwrap_or_else(|| {
                        let mut e = vec![0.0; self.dim];
                        e[0] = 1.0;
                        e
                    });
                    let rho: f64 = rng.gen_range(0.0..d.delta);
                    la::scale(&la::add_scaled(&b, rho, &dir), lam)
                }
            };
            out.push(Vector::new(coords, self.ambient).expect("sampled coords are finite"));
        }
        out
    }

    /// Directions used to seed dominance searches along the cone.
    pub(crate) fn search_directions(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5ee_d1e);
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        match &self.kind {
            ConeKind::Orthant => {
                dirs.push(vec![1.0 / (self.dim as f64).sqrt(); self.dim]);
                for i in 0..self.dim {
                    let mut e = vec![0.0; self.dim];
                    e[i] = 1.0;
                    dirs.push(e);
                }
            }
            ConeKind::Slanted => {
                let mut e1 = vec![0.0; self.dim];
                e1[0] = 1.0;
                dirs.push(e1);
                let corner: Vec<f64> = (1..=self.dim)
                    .map(|n| if n == 1 { 1.0 } else { n as f64 })
                    .collect();
                dirs.push(la::normalize(&corner, 0.0).unwrap());
                let alt: Vec<f64> = (1..=self.dim)
                    .map(|n| {
                        if n == 1 {
                            1.0
                        } else if n % 2 == 0 {
                            n as f64
                        } else {
                            -(n as f64)
                        }
                    })
                    .collect();
                dirs.push(la::normalize(&alt, 0.0).unwrap());
            }
            ConeKind::Dilated(d) => {
                let c = d.base.center();
                dirs.push(la::normalize(c.coords(), 0.0).unwrap());
            }
        }
        while dirs.len() < count {
            let s = self.samples(1, rng.gen())[0].clone();
            if let Some(u) = la::normalize(s.coords(), 1e-9) {
                dirs.push(u);
            }
        }
        dirs.truncate(count.max(1));
        dirs
    }
}

impl BaseSpec {
    pub fn functional(&self) -> &Vector {
        &self.functional
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Supremum of the ambient norm over the base.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Infimum of the ambient norm over the base (a lower bound in the
    /// Triple ambient).
    pub fn min_norm(&self) -> f64 {
        self.min_norm
    }

    /// Whether the truncation family of this base stays norm-bounded as
    /// the dimension grows: decided by comparing the closed-form extremal
    /// norm at the full truncation against the half truncation.
    pub fn bounded(&self) -> bool {
        self.bounded
    }

    /// Rescales the slice level (the base geometry scales linearly).
    pub fn rescaled(&self, level: f64) -> Result<BaseSpec> {
        if !(level > 0.0 && level.is_finite()) {
            return Err(Error::InvalidParameter(format!("base level {level}")));
        }
        let ratio = level / self.level;
        Ok(BaseSpec {
            level,
            sup_norm: self.sup_norm * ratio,
            min_norm: self.min_norm * ratio,
            ..self.clone()
        })
    }

    /// Exact infimum of a linear functional over the base.
    pub fn inf_functional(&self, g: &Vector) -> Result<f64> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: g.dim(),
            });
        }
        let gc = g.coords();
        let fc = self.functional.coords();
        Ok(match self.cone {
            BaseCone::Orthant => (0..self.dim)
                .map(|i| self.level * gc[i] / fc[i])
                .fold(f64::INFINITY, f64::min),
            BaseCone::Slanted => {
                let s = self.level / fc[0];
                s * slanted_corner_margin(gc)
            }
        })
    }

    /// A canonical interior point of the base.
    pub fn center(&self) -> Vector {
        let fc = self.functional.coords();
        let coords = match self.cone {
            BaseCone::Orthant => {
                let scale = self.level / la::dot(fc, fc);
                la::scale(fc, scale)
            }
            BaseCone::Slanted => {
                let mut c = vec![0.0; self.dim];
                c[0] = self.level / fc[0];
                c
            }
        };
        Vector::new(coords, self.ambient).expect("center is finite")
    }

    /// Euclidean projection of raw coordinates onto `lambda * base`.
    pub(crate) fn project_scaled(&self, z: &[f64], lambda: f64) -> Vec<f64> {
        if lambda <= 0.0 {
            return vec![0.0; self.dim];
        }
        let fc = self.functional.coords();
        match self.cone {
            BaseCone::Orthant => {
                weighted_simplex_projection(z, fc, lambda * self.level)
            }
            BaseCone::Slanted => {
                let s = lambda * self.level / fc[0];
                let mut p = vec![0.0; self.dim];
                p[0] = s;
                for (i, &zi) in z.iter().enumerate().skip(1) {
                    let reach = (i + 1) as f64 * s;
                    p[i] = zi.clamp(-reach, reach);
                }
                p
            }
        }
    }

    /// Deterministic base members.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                Vector::new(self.sample_coords(&mut rng), self.ambient)
                    .expect("sampled coords are finite")
            })
            .collect()
    }

    fn sample_coords(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let fc = self.functional.coords();
        match self.cone {
            BaseCone::Orthant => {
                let u: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(0.0..1.0f64)).collect();
                let denom = la::dot(fc, &u);
                if denom <= 1e-12 {
                    return self.center().coords().to_vec();
                }
                la::scale(&u, self.level / denom)
            }
            BaseCone::Slanted => {
                let s = self.level / fc[0];
                let mut c = vec![0.0; self.dim];
                c[0] = s;
                for n in 2..=self.dim {
                    let reach = n as f64 * s;
                    c[n - 1] = rng.gen_range(-reach..=reach);
                }
                c
            }
        }
    }

    /// Vertices for orthant bases (`level / f_i * e_i`).
    pub fn orthant_vertices(&self) -> Option<Vec<Vector>> {
        match self.cone {
            BaseCone::Orthant => {
                let fc = self.functional.coords();
                Some(
                    (0..self.dim)
                        .map(|i| {
                            let mut c = vec![0.0; self.dim];
                            c[i] = self.level / fc[i];
                            Vector::new(c, self.ambient).expect("vertex is finite")
                        })
                        .collect(),
                )
            }
            BaseCone::Slanted => None,
        }
    }
}

/// Worst-corner value of `f` over the slanted box slice at height 1.
fn slanted_corner_margin(f: &[f64]) -> f64 {
    f[0]
        - f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &v)| (i + 1) as f64 * v.abs())
            .sum::<f64>()
}

/// Exact Euclidean projection onto the slanted cone via the 1-D
/// reduction in `p_1`: for fixed `p_1 = t` the optimal coordinates are
/// `clamp(z_n, +-n t)`, and the stationarity condition
/// `psi(t) = (t - z_1) - sum_n n (|z_n| - n t)_+` is increasing and
/// piecewise linear, so its root comes from a breakpoint scan.
pub(crate) fn slanted_project(z: &[f64]) -> (Vec<f64>, f64) {
    // (breakpoint |z_n|/n, n|z_n|, n^2) for the active-set sums
    let mut bps: Vec<(f64, f64, f64)> = z
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| {
            let n = (i + 1) as f64;
            (v.abs() / n, n * v.abs(), n * n)
        })
        .collect();
    bps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut s1: f64 = bps.iter().map(|b| b.1).sum();
    let mut s2: f64 = bps.iter().map(|b| b.2).sum();

    let t = if -z[0] - s1 >= 0.0 {
        0.0 // psi(0) >= 0: the apex is optimal
    } else {
        let mut t_lo = 0.0f64;
        let mut root = z[0].max(0.0);
        for k in 0..=bps.len() {
            let t_hi = bps.get(k).map(|b| b.0).unwrap_or(f64::INFINITY);
            let cand = (z[0] + s1) / (1.0 + s2);
            if cand < t_hi {
                root = cand.max(t_lo).max(0.0);
                break;
            }
            if let Some(b) = bps.get(k) {
                s1 -= b.1;
                s2 -= b.2;
                t_lo = t_hi;
            }
        }
        root
    };

    let mut p = vec![0.0; z.len()];
    p[0] = t;
    for (i, &zi) in z.iter().enumerate().skip(1) {
        let reach = (i + 1) as f64 * t;
        p[i] = zi.clamp(-reach, reach);
    }
    let dist = la::dist2(z, &p);
    (p, dist)
}

/// Euclidean projection onto a dilated cone `cone(B + delta ball)`.
///
/// Since the sets `l * (B + delta ball)` sweep out the cone and
/// `d(z, l B) - l delta` is convex in `l`, the scale is found by ternary
/// search and the projected point is reconstructed from the base
/// projection at the optimal scale.
fn dilated_project(d: &DilatedCone, z: &[f64]) -> (Vec<f64>, f64) {
    let zn = la::nrm2(z);
    if zn == 0.0 {
        return (vec![0.0; z.len()], 0.0);
    }
    let reach = d.base.min_norm - d.delta;
    debug_assert!(reach > 0.0);
    let hi = 2.0 * zn / reach + 1.0;
    let phi = |lam: f64| -> f64 {
        if lam <= 0.0 {
            return zn;
        }
        let y = d.base.project_scaled(z, lam);
        (la::dist2(z, &y) - lam * d.delta).max(0.0)
    };
    let (lam, _) = ternary_min(phi, 0.0, hi, 200);
    if lam <= 0.0 {
        return (vec![0.0; z.len()], zn);
    }
    let y = d.base.project_scaled(z, lam);
    let gap = la::dist2(z, &y);
    if gap <= lam * d.delta {
        // z lies inside the swept set at this scale
        (z.to_vec(), 0.0)
    } else {
        let p = la::add_scaled(&y, lam * d.delta / gap, &la::sub(z, &y));
        (p.clone(), la::dist2(z, &p))
    }
}
