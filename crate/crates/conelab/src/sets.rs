//! Feasible-set oracles: membership, metric projection, linear
//! maximization, and deterministic samplers for the fixed set families
//! the library studies, plus the `Certificate` type that records
//! re-checkable verdicts about points of these sets.
//!
//! The families:
//!
//! * `Flat`: `{x : x_1 + x_n^2 <= 0, 2 <= n <= N}` capped by a ball `rB`
//!   (the raw solution set is unbounded along `-e_1`, so the cap is part
//!   of the definition here; default radius 1). Euclidean ambient.
//! * `MinusSlanted`: `(-Slanted) ∩ B`, the reflected slanted cone inside
//!   the unit ball. Euclidean ambient.
//! * `Slab`: `{-1 <= <h, x> <= 0} ∩ 2B_l1` with the harmonic functional
//!   `h = (1, 1/2, 1/3, ...)`, in the l1 ambient.
//! * `TripleBall`: unit ball of the composite norm (sup plus compressed
//!   l2).
//! * `Disk`, `Square`, `Cap`: planar calibration sets and a capped
//!   halfspace, used to pin solver behaviour where everything is known
//!   in closed form. `Square` is `[-1, 0]^2`, so the origin is its
//!   unique orthant-maximal corner.
//!
//! Projections are exact where a closed form or a finite reduction
//! exists (balls, boxes, the slab band, the flat cup via a 1-D
//! bisection, the slanted cone via a breakpoint scan) and otherwise are
//! composed with Dykstra's algorithm, which converges to the Euclidean
//! projection onto the intersection. The reported distance is always in
//! the family's ambient norm; for the `Slab` (l1 ambient) the projected
//! point is the Euclidean one, so the reported l1 distance is an upper
//! bound on the l1-metric distance. `TripleBall` uses radial scaling,
//! the exact metric projection in its own norm.

use crate::cones::{self, ConeSpec};
use crate::linalg as la;
use crate::solvers::{
    bisect_monotone, dykstra, l1_ball_projection, projected_gradient_max, SolverConfig,
};
use crate::spaces::{NormKind, Vector};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Above this dimension the slab switches from exact vertex enumeration
/// to projected gradient (the vertex count grows quadratically but the
/// candidate scan constant gets unpleasant, and the gradient path is
/// exercised anyway).
const SLAB_VERTEX_LIMIT: usize = 12;

#[derive(Debug, Clone)]
pub enum SetFamily {
    Flat { radius: f64 },
    MinusSlanted,
    Slab,
    TripleBall,
    Disk { radius: f64 },
    Square,
    Cap { normal: Vec<f64>, offset: f64, radius: f64 },
}

/// One of the fixed feasible sets, at a concrete truncation dimension.
#[derive(Debug, Clone)]
pub struct SetSpec {
    family: SetFamily,
    dim: usize,
}

/// The harmonic functional `(1, 1/2, ..., 1/N)` defining the slab,
/// tagged with the sup norm (the dual of the slab's l1 ambient).
pub fn harmonic_functional(dim: usize) -> Vector {
    Vector::new((1..=dim).map(|k| 1.0 / k as f64).collect(), NormKind::Sup)
        .expect("harmonic coordinates are finite")
}

impl SetSpec {
    pub fn flat(dim: usize, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput("flat set needs dimension >= 2".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("flat radius {radius}")));
        }
        Ok(SetSpec {
            family: SetFamily::Flat { radius },
            dim,
        })
    }

    pub fn minus_slanted(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(
                "reflected slanted set needs dimension >= 2".into(),
            ));
        }
        Ok(SetSpec {
            family: SetFamily::MinusSlanted,
            dim,
        })
    }

    pub fn slab(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput("slab needs dimension >= 2".into()));
        }
        Ok(SetSpec {
            family: SetFamily::Slab,
            dim,
        })
    }

    pub fn triple_ball(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("set of dimension 0".into()));
        }
        Ok(SetSpec {
            family: SetFamily::TripleBall,
            dim,
        })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("disk radius {radius}")));
        }
        Ok(SetSpec {
            family: SetFamily::Disk { radius },
            dim: 2,
        })
    }

    pub fn square() -> Self {
        SetSpec {
            family: SetFamily::Square,
            dim: 2,
        }
    }

    /// `{x : <normal, x> <= offset} ∩ radius B` (Euclidean). Requires
    /// `offset >= 0` so the origin stays feasible.
    pub fn cap(normal: Vec<f64>, offset: f64, radius: f64) -> Result<Self> {
        let dim = normal.len();
        if dim == 0 || la::nrm2(&normal) == 0.0 {
            return Err(Error::InvalidInput("cap needs a nonzero normal".into()));
        }
        if !(offset >= 0.0) || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cap offset {offset} / radius {radius}"
            )));
        }
        Ok(SetSpec {
            family: SetFamily::Cap {
                normal,
                offset,
                radius,
            },
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    pub fn ambient(&self) -> NormKind {
        match self.family {
            SetFamily::Slab => NormKind::L1,
            SetFamily::TripleBall => NormKind::Triple,
            _ => NormKind::L2,
        }
    }

    fn check_member(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.dim(),
            });
        }
        if x.ambient() != self.ambient() {
            return Err(Error::AmbientMismatch {
                left: self.ambient(),
                right: x.ambient(),
            });
        }
        Ok(())
    }

    /// All defining inequalities within `tol`.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        self.check_member(x)?;
        let c = x.coords();
        Ok(match &self.family {
            SetFamily::Flat { radius } => {
                c.iter().skip(1).all(|&v| c[0] + v * v <= tol)
                    && c[0] <= tol
                    && la::nrm2(c) <= radius + tol
            }
            SetFamily::MinusSlanted => {
                let neg: Vec<f64> = c.iter().map(|v| -v).collect();
                let slanted_ok = neg[0] >= -tol
                    && neg
                        .iter()
                        .enumerate()
                        .skip(1)
                        .all(|(i, &v)| (i + 1) as f64 * neg[0] + tol >= v.abs());
                slanted_ok && la::nrm2(c) <= 1.0 + tol
            }
            SetFamily::Slab => {
                let t = la::dot(harmonic_functional(self.dim).coords(), c);
                (-1.0 - tol..=tol).contains(&t) && la::nrm1(c) <= 2.0 + tol
            }
            SetFamily::TripleBall => x.norm() <= 1.0 + tol,
            SetFamily::Disk { radius } => la::nrm2(c) <= radius + tol,
            SetFamily::Square => c.iter().all(|&v| (-1.0 - tol..=tol).contains(&v)),
            SetFamily::Cap {
                normal,
                offset,
                radius,
            } => la::dot(normal, c) <= offset + tol && la::nrm2(c) <= radius + tol,
        })
    }

    /// Largest `t` in `[0, t_max]` with `x + t d` in the set, or 0 when
    /// even the start is infeasible.
    ///
    /// Each defining inequality is restricted to the ray and solved in a
    /// cancellation-free form (the constant term carries all the rounding,
    /// the `t`-dependence is exact). This matters: testing membership of
    /// `x + t d` directly hits a rounding plateau of width about
    /// `sqrt(eps)` wherever a quadratic constraint is tangent to the ray,
    /// which would fabricate positive extents at boundary points. The
    /// triple ball mixes a sup with a compressed `l2` term and keeps a
    /// plain membership bisection instead; see the module notes.
    pub(crate) fn ray_extent(&self, x: &Vector, d: &[f64], t_max: f64) -> Result<f64> {
        self.check_member(x)?;
        if d.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: d.len(),
            });
        }
        let c = x.coords();
        let ball = |radius: f64| -> f64 {
            let nx = la::nrm2(c);
            quad_extent(
                la::dot(d, d),
                la::dot(c, d),
                (nx - radius) * (nx + radius),
                t_max,
            )
        };
        Ok(match &self.family {
            SetFamily::Flat { radius } => {
                let mut t = lin_extent(c[0], d[0], t_max).min(ball(*radius));
                for n in 1..self.dim {
                    t = t.min(quad_extent(
                        d[n] * d[n],
                        0.5 * d[0] + c[n] * d[n],
                        c[0] + c[n] * c[n],
                        t_max,
                    ));
                }
                t
            }
            SetFamily::MinusSlanted => {
                let mut t = lin_extent(c[0], d[0], t_max).min(ball(1.0));
                for n in 1..self.dim {
                    let w = (n + 1) as f64;
                    t = t
                        .min(lin_extent(c[n] + w * c[0], d[n] + w * d[0], t_max))
                        .min(lin_extent(-c[n] + w * c[0], -d[n] + w * d[0], t_max));
                }
                t
            }
            SetFamily::Slab => {
                let h = harmonic_functional(self.dim);
                let (hx, hd) = (la::dot(h.coords(), c), la::dot(h.coords(), d));
                lin_extent(hx, hd, t_max)
                    .min(lin_extent(-1.0 - hx, -hd, t_max))
                    .min(l1_extent(c, d, 2.0, t_max))
            }
            SetFamily::Disk { radius } => ball(*radius),
            SetFamily::Square => {
                let mut t = t_max;
                for n in 0..self.dim {
                    t = t
                        .min(lin_extent(c[n], d[n], t_max))
                        .min(lin_extent(-1.0 - c[n], -d[n], t_max));
                }
                t
            }
            SetFamily::Cap {
                normal,
                offset,
                radius,
            } => lin_extent(la::dot(normal, c) - offset, la::dot(normal, d), t_max)
                .min(ball(*radius)),
            SetFamily::TripleBall => {
                // |x + t d|_triple <= 1 splits per coordinate and sign into
                // sqrt(q(t)) <= 1 - s(x_i + t d_i) with q the compressed
                // l2 part, an exact quadratic in t. Squaring gives one
                // quadratic prefix per pair; the sign condition on the
                // right side is the matching linear constraint.
                let (mut q0, mut q1, mut q2) = (0.0, 0.0, 0.0);
                for i in 0..self.dim {
                    let w = f64::exp2(-(i as f64 + 1.0));
                    q0 += (c[i] * w) * (c[i] * w);
                    q1 += (c[i] * w) * (d[i] * w);
                    q2 += (d[i] * w) * (d[i] * w);
                }
                let mut t = t_max;
                for i in 0..self.dim {
                    for s in [1.0, -1.0] {
                        let (l0, l1) = (1.0 - s * c[i], -s * d[i]);
                        t = t
                            .min(quad_extent(
                                q2 - l1 * l1,
                                q1 - l0 * l1,
                                q0 - l0 * l0,
                                t_max,
                            ))
                            .min(lin_extent(s * c[i] - 1.0, s * d[i], t_max));
                    }
                }
                t
            }
        })
    }

    /// Metric projection: the projected point and its distance from `z`
    /// in the ambient norm. See the module notes for which families are
    /// exact and which report a feasible upper bound.
    pub fn project(&self, z: &Vector, cfg: &SolverConfig) -> Result<(Vector, f64)> {
        self.check_member(z)?;
        if self.contains(z, 0.0)? {
            return Ok((z.clone(), 0.0));
        }
        let y = self.project_coords(z.coords(), (cfg.tol * 1e-3).max(1e-14))?;
        let gap = la::sub(z.coords(), &y);
        let dist = Vector::new(gap, self.ambient())?.norm();
        Ok((Vector::new(y, self.ambient())?, dist))
    }

    /// Projection on raw coordinates (Euclidean for every family except
    /// the triple ball, which scales radially). Backend for `project`
    /// and for the feasibility searches in the analysis layer.
    pub(crate) fn project_coords(&self, z: &[f64], tol: f64) -> Result<Vec<f64>> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: z.len(),
            });
        }
        match &self.family {
            SetFamily::Flat { radius } => {
                let r = *radius;
                let cup = |y: &[f64]| -> Result<Vec<f64>> { Ok(flat_cup_project(y)) };
                let ball = |y: &[f64]| -> Result<Vec<f64>> { Ok(l2_ball_project(y, r)) };
                let projs: [&dyn Fn(&[f64]) -> Result<Vec<f64>>; 2] = [&cup, &ball];
                dykstra(z, &projs, tol, 50_000)
            }
            SetFamily::MinusSlanted => {
                let neg = |y: &[f64]| -> Result<Vec<f64>> {
                    let flipped: Vec<f64> = y.iter().map(|v| -v).collect();
                    let (p, _) = cones::slanted_project(&flipped);
                    Ok(p.iter().map(|v| -v).collect())
                };
                let ball = |y: &[f64]| -> Result<Vec<f64>> { Ok(l2_ball_project(y, 1.0)) };
                let projs: [&dyn Fn(&[f64]) -> Result<Vec<f64>>; 2] = [&neg, &ball];
                dykstra(z, &projs, tol, 50_000)
            }
            SetFamily::Slab => {
                let h = harmonic_functional(self.dim);
                let band = |y: &[f64]| -> Result<Vec<f64>> {
                    Ok(band_project(y, h.coords(), -1.0, 0.0))
                };
                let ball = |y: &[f64]| -> Result<Vec<f64>> { Ok(l1_ball_projection(y, 2.0)) };
                let projs: [&dyn Fn(&[f64]) -> Result<Vec<f64>>; 2] = [&band, &ball];
                dykstra(z, &projs, tol, 50_000)
            }
            SetFamily::TripleBall => {
                let t = Vector::new(z.to_vec(), NormKind::Triple)?.norm();
                Ok(if t <= 1.0 {
                    z.to_vec()
                } else {
                    la::scale(z, 1.0 / t)
                })
            }
            SetFamily::Disk { radius } => Ok(l2_ball_project(z, *radius)),
            SetFamily::Square => Ok(z.iter().map(|&v| v.clamp(-1.0, 0.0)).collect()),
            SetFamily::Cap {
                normal,
                offset,
                radius,
            } => {
                let half = |y: &[f64]| -> Result<Vec<f64>> {
                    let t = la::dot(normal, y);
                    Ok(if t <= *offset {
                        y.to_vec()
                    } else {
                        la::add_scaled(y, (offset - t) / la::dot(normal, normal), normal)
                    })
                };
                let r = *radius;
                let ball = |y: &[f64]| -> Result<Vec<f64>> { Ok(l2_ball_project(y, r)) };
                let projs: [&dyn Fn(&[f64]) -> Result<Vec<f64>>; 2] = [&half, &ball];
                dykstra(z, &projs, tol, 50_000)
            }
        }
    }

    /// Linear maximization `sup f(K)` with an attaining point. Closed
    /// forms and finite enumerations where the geometry allows (disk,
    /// square, cap, triple ball, small slab); projected gradient with
    /// deterministic multistarts elsewhere.
    pub fn maximize(&self, f: &Vector, cfg: &SolverConfig) -> Result<(Vector, f64)> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: f.dim(),
            });
        }
        let c = f.coords();
        if la::nrm2(c) == 0.0 {
            return Err(Error::InvalidInput("cannot maximize the zero functional".into()));
        }
        let (x, value) = match &self.family {
            SetFamily::Disk { radius } => {
                let x = la::scale(c, radius / la::nrm2(c));
                let v = la::dot(c, &x);
                (x, v)
            }
            SetFamily::Square => {
                let x: Vec<f64> = c.iter().map(|&v| if v > 0.0 { 0.0 } else { -1.0 }).collect();
                let v = la::dot(c, &x);
                (x, v)
            }
            SetFamily::Cap {
                normal,
                offset,
                radius,
            } => cap_maximize(c, normal, *offset, *radius),
            SetFamily::TripleBall => triple_ball_maximize(c),
            SetFamily::Slab if self.dim <= SLAB_VERTEX_LIMIT => {
                let verts = slab_vertices(self.dim);
                let mut best = verts[0].clone();
                let mut bv = la::dot(c, &best);
                for v in &verts[1..] {
                    let val = la::dot(c, v);
                    if val > bv {
                        bv = val;
                        best = v.clone();
                    }
                }
                (best, bv)
            }
            _ => {
                let ptol = (cfg.tol * 1e-3).max(1e-14);
                let project = |y: &[f64]| self.project_coords(y, ptol);
                let starts = self.ascent_starts(c, cfg);
                projected_gradient_max(c, &project, &starts, cfg)?
            }
        };
        Ok((Vector::new(x, self.ambient())?, value))
    }

    fn ascent_starts(&self, c: &[f64], cfg: &SolverConfig) -> Vec<Vec<f64>> {
        let mut starts = vec![vec![0.0; self.dim]];
        if let Some(u) = la::normalize(c, 1e-12) {
            starts.push(u);
        }
        if let SetFamily::Flat { radius } = &self.family {
            // cup boundary points -alpha e_1 + sqrt(alpha) e_j seed the
            // search at every profitable coordinate pattern
            let mut order: Vec<usize> = (1..self.dim).collect();
            order.sort_by(|&a, &b| c[b].partial_cmp(&c[a]).unwrap());
            for &j in order.iter().take(6) {
                let alpha = 0.25 * radius.min(1.0);
                let mut s = vec![0.0; self.dim];
                s[0] = -alpha;
                s[j] = alpha.sqrt();
                starts.push(s);
            }
        }
        for s in self.samples(cfg.multistarts, cfg.seed) {
            starts.push(s.coords().to_vec());
        }
        starts
    }

    /// Deterministic members: a few structural boundary points first,
    /// then seeded interior points. Every returned vector passes
    /// `contains` at tolerance 1e-9.
    pub fn samples(&self, count: usize, seed: u64) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
        match &self.family {
            SetFamily::Flat { radius } => {
                out.push(vec![0.0; self.dim]);
                for j in 1..self.dim.min(5) {
                    let mut s = vec![0.0; self.dim];
                    s[0] = -0.25 * radius.min(1.0);
                    s[j] = (0.25 * radius.min(1.0)).sqrt() * 0.95;
                    out.push(s);
                }
                while out.len() < count {
                    let u: f64 = rng.gen_range(0.05..0.8);
                    let mut s = vec![0.0; self.dim];
                    s[0] = -u * u;
                    for v in s.iter_mut().skip(1) {
                        *v = u * rng.gen_range(-0.95..0.95);
                    }
                    let n = la::nrm2(&s);
                    if n > 0.999 * radius {
                        s = la::scale(&s, 0.999 * radius / n);
                    }
                    out.push(s);
                }
            }
            SetFamily::MinusSlanted => {
                out.push(vec![0.0; self.dim]);
                while out.len() < count {
                    let t: f64 = rng.gen_range(0.02..0.6);
                    let mut s = vec![0.0; self.dim];
                    s[0] = -t;
                    for n in 2..=self.dim {
                        let reach = n as f64 * t;
                        s[n - 1] = -rng.gen_range(-reach..=reach);
                    }
                    let nrm = la::nrm2(&s);
                    if nrm > 0.999 {
                        s = la::scale(&s, 0.999 / nrm);
                    }
                    out.push(s);
                }
            }
            SetFamily::Slab => {
                let h = harmonic_functional(self.dim);
                let hc = h.coords().to_vec();
                let hnorm2 = la::dot(&hc, &hc);
                for n in (2..=self.dim).take(4) {
                    // e_n - (1/n) e_1 sits exactly on the upper slab face
                    let mut s = vec![0.0; self.dim];
                    s[n - 1] = 1.0;
                    s[0] = -1.0 / n as f64;
                    out.push(s);
                }
                let deep = {
                    let mut d = vec![0.0; self.dim];
                    d[0] = -0.5;
                    d
                };
                while out.len() < count {
                    let mut y: Vec<f64> =
                        (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let n1 = la::nrm1(&y);
                    if n1 > 0.0 {
                        y = la::scale(&y, rng.gen_range(0.0..2.0) / n1);
                    }
                    let target: f64 = rng.gen_range(-0.9..-0.1);
                    let t = la::dot(&hc, &y);
                    let mut s = la::add_scaled(&y, (target - t) / hnorm2, &hc);
                    // blend toward a deep interior point until the l1 cap holds
                    let mut lam = 0.0;
                    while la::nrm1(&s) > 2.0 && lam < 1.0 {
                        lam = (lam + 1.0) / 2.0;
                        s = la::add_scaled(&la::scale(&s, 1.0 - lam), lam, &deep);
                    }
                    out.push(s);
                }
            }
            SetFamily::TripleBall => {
                let mut two_thirds = vec![0.0; self.dim];
                two_thirds[0] = 2.0 / 3.0;
                out.push(two_thirds);
                out.push(vec![0.0; self.dim]);
                while out.len() < count {
                    let v: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let t = Vector::new(v.clone(), NormKind::Triple)
                        .map(|w| w.norm())
                        .unwrap_or(0.0);
                    if t <= 1e-9 {
                        out.push(vec![0.0; self.dim]);
                    } else {
                        let u: f64 = rng.gen_range(0.0..0.999);
                        out.push(la::scale(&v, u / t));
                    }
                }
            }
            SetFamily::Disk { radius } => {
                out.push(vec![*radius, 0.0]);
                out.push(vec![0.0, 0.0]);
                while out.len() < count {
                    let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let r: f64 = rng.gen_range(0.0..*radius);
                    out.push(vec![r * a.cos(), r * a.sin()]);
                }
            }
            SetFamily::Square => {
                out.push(vec![0.0, 0.0]);
                out.push(vec![-1.0, -1.0]);
                while out.len() < count {
                    out.push(vec![rng.gen_range(-1.0..0.0), rng.gen_range(-1.0..0.0)]);
                }
            }
            SetFamily::Cap {
                normal,
                offset,
                radius,
            } => {
                out.push(vec![0.0; self.dim]);
                while out.len() < count {
                    let mut y: Vec<f64> =
                        (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let n = la::nrm2(&y);
                    if n > 0.0 {
                        y = la::scale(&y, rng.gen_range(0.0..*radius) / n);
                    }
                    let t = la::dot(normal, &y);
                    if t > *offset {
                        y = la::add_scaled(&y, (offset - t) / la::dot(normal, normal), normal);
                        let n = la::nrm2(&y);
                        if n > *radius {
                            // scaling keeps the halfspace side because offset >= 0
                            y = la::scale(&y, radius / n);
                        }
                    }
                    out.push(y);
                }
            }
        }
        out.truncate(count);
        out.into_iter()
            .map(|c| Vector::new(c, self.ambient()).expect("sampled coords are finite"))
            .collect()
    }
}

/// Euclidean projection onto `{x : x_1 + x_n^2 <= 0 for n >= 2}`.
///
/// For fixed first coordinate `a` the tail projects by clamping to
/// `+-sqrt(-a)`, and the derivative of the squared distance in `a`,
/// `g(a) = 2(a - z_1) + (1/sqrt(-a)) sum_n (|z_n| - sqrt(-a))_+`,
/// is increasing, so its root is found by bisection and the projection
/// is assembled exactly from that root.
fn flat_cup_project(z: &[f64]) -> Vec<f64> {
    let tail_abs: f64 = z[1..].iter().map(|v| v.abs()).sum();
    let assemble = |a: f64| -> Vec<f64> {
        let s = (-a).max(0.0).sqrt();
        let mut p = vec![0.0; z.len()];
        p[0] = a;
        for (i, &v) in z.iter().enumerate().skip(1) {
            p[i] = v.clamp(-s, s);
        }
        p
    };
    if tail_abs <= 1e-14 {
        return assemble(z[0].min(0.0));
    }
    let g = |a: f64| -> f64 {
        let s = (-a).sqrt();
        let bend: f64 = z[1..].iter().map(|&v| (v.abs() - s).max(0.0)).sum();
        2.0 * (a - z[0]) + bend / s
    };
    let lo = -(1.0 + z[0].abs() + tail_abs);
    let hi = -1e-30;
    if g(hi) <= 0.0 {
        return assemble(hi);
    }
    let cfg = SolverConfig::default().with_tol(1e-13);
    let a = bisect_monotone(g, lo, hi, &cfg).unwrap_or(hi);
    assemble(a)
}

fn l2_ball_project(z: &[f64], r: f64) -> Vec<f64> {
    let n = la::nrm2(z);
    if n <= r {
        z.to_vec()
    } else {
        la::scale(z, r / n)
    }
}

/// Euclidean projection onto `{x : lo <= <f, x> <= hi}`.
fn band_project(z: &[f64], f: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let t = la::dot(f, z);
    let ff = la::dot(f, f);
    if t > hi {
        la::add_scaled(z, (hi - t) / ff, f)
    } else if t < lo {
        la::add_scaled(z, (lo - t) / ff, f)
    } else {
        z.to_vec()
    }
}

fn cap_maximize(c: &[f64], normal: &[f64], offset: f64, radius: f64) -> (Vec<f64>, f64) {
    let free = la::scale(c, radius / la::nrm2(c));
    if la::dot(normal, &free) <= offset {
        let v = la::dot(c, &free);
        return (free, v);
    }
    let nn = la::dot(normal, normal);
    let center = la::scale(normal, offset / nn);
    let tangential = la::sub(c, &la::scale(normal, la::dot(normal, c) / nn));
    let rho = (radius * radius - offset * offset / nn).max(0.0).sqrt();
    let x = match la::normalize(&tangential, 1e-14) {
        Some(u) => la::add_scaled(&center, rho, &u),
        None => center,
    };
    let v = la::dot(c, &x);
    (x, v)
}

/// Largest `t` in `[0, t_max]` with `g0 + g1 t <= 0`.
fn lin_extent(g0: f64, g1: f64, t_max: f64) -> f64 {
    if g0 > 0.0 {
        0.0
    } else if g1 <= 0.0 {
        t_max
    } else {
        (-g0 / g1).min(t_max)
    }
}

/// Length of the largest prefix `[0, t]` of `[0, t_max]` on which
/// `a t^2 + 2 b t + c <= 0` holds throughout. Either sign of `a` is
/// allowed; the crossing roots use conjugate forms so that `c` near
/// zero (a ray starting on the constraint surface) stays exact.
fn quad_extent(a: f64, b: f64, c: f64, t_max: f64) -> f64 {
    if c > 0.0 {
        return 0.0;
    }
    if a == 0.0 {
        return lin_extent(c, 2.0 * b, t_max);
    }
    let disc = b * b - a * c;
    if a > 0.0 {
        let sq = disc.max(0.0).sqrt();
        let t = if b > 0.0 { -c / (b + sq) } else { (sq - b) / a };
        return t.min(t_max);
    }
    // concave: nonnegative only on the bump between the roots, if any
    if disc < 0.0 {
        return t_max;
    }
    let sq = disc.sqrt();
    if (-b - sq) / a <= 0.0 {
        return t_max;
    }
    let r1 = if b > 0.0 { -c / (b + sq) } else { (-b + sq) / a };
    if r1 > 0.0 {
        r1.min(t_max)
    } else if b > 0.0 {
        // touches zero at the start and immediately rises
        0.0
    } else {
        t_max
    }
}

/// Largest `t` in `[0, t_max]` with `|x + t d|_1 <= bound`, walking the
/// kinks of the piecewise linear norm along the ray.
fn l1_extent(x: &[f64], d: &[f64], bound: f64, t_max: f64) -> f64 {
    let f = |t: f64| -> f64 {
        x.iter()
            .zip(d)
            .map(|(&xi, &di)| (xi + t * di).abs())
            .sum::<f64>()
            - bound
    };
    if f(0.0) > 0.0 {
        return 0.0;
    }
    let mut knots: Vec<f64> = x
        .iter()
        .zip(d)
        .filter(|(_, &di)| di != 0.0)
        .map(|(&xi, &di)| -xi / di)
        .filter(|t| *t > 0.0 && *t < t_max)
        .collect();
    knots.push(t_max);
    knots.sort_by(|a, b| a.partial_cmp(b).expect("finite knots"));
    let (mut t_lo, mut f_lo) = (0.0, f(0.0));
    for t_hi in knots {
        let f_hi = f(t_hi);
        if f_hi > 0.0 {
            return t_lo + (t_hi - t_lo) * (-f_lo) / (f_hi - f_lo);
        }
        (t_lo, f_lo) = (t_hi, f_hi);
    }
    t_max
}

/// All vertices of the slab polytope `{-1 <= <h, x> <= 0} ∩ 2B_l1`:
/// the l1-ball vertices that satisfy the band, plus every edge of the
/// ball cut by one of the two (parallel) band hyperplanes. Parallel cuts
/// cannot both be active at a point, so this enumeration is complete.
fn slab_vertices(dim: usize) -> Vec<Vec<f64>> {
    let h = harmonic_functional(dim);
    let hc = h.coords();
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let vertex = |i: usize, s: f64| -> (Vec<f64>, f64) {
        let mut v = vec![0.0; dim];
        v[i] = s;
        let t = s * hc[i];
        (v, t)
    };
    for i in 0..dim {
        for s in [2.0, -2.0] {
            let (v, t) = vertex(i, s);
            if (-1.0..=0.0).contains(&t) {
                verts.push(v);
            }
        }
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            for si in [2.0, -2.0] {
                for sj in [2.0, -2.0] {
                    let (vi, ti) = vertex(i, si);
                    let (vj, tj) = vertex(j, sj);
                    for level in [0.0, -1.0] {
                        if (ti - level) * (tj - level) < 0.0 {
                            let t = (level - ti) / (tj - ti);
                            let x = la::add_scaled(&la::scale(&vi, 1.0 - t), t, &vj);
                            verts.push(x);
                        }
                    }
                }
            }
        }
    }
    verts
}

/// Maximizes a linear functional over the triple-norm unit ball, i.e.
/// evaluates the dual norm with an attaining point.
///
/// Reduction: by sign symmetry work with `|c|` and `y >= 0`; fix the cap
/// `a = max y`, leaving `max <|c|, y>` over `0 <= y <= a`,
/// `|W y|_2 <= 1 - a` with `W = diag(2^-i)`. The inner problem is
/// water-filling with a scalar multiplier (bisection); the value is
/// concave in `a` because the constraint graph is jointly convex, so the
/// outer cap is located by ternary search.
fn triple_ball_maximize(c: &[f64]) -> (Vec<f64>, f64) {
    let dim = c.len();
    let cabs: Vec<f64> = c.iter().map(|v| v.abs()).collect();
    let w: Vec<f64> = (1..=dim).map(|i| f64::exp2(-(i as f64))).collect();
    let inner = |a: f64| -> (Vec<f64>, f64) {
        if a <= 0.0 {
            return (vec![0.0; dim], 0.0);
        }
        let rho = 1.0 - a;
        if rho <= 0.0 {
            return (vec![0.0; dim], f64::NEG_INFINITY);
        }
        let active: Vec<usize> = (0..dim).filter(|&i| cabs[i] > 0.0).collect();
        let load_at = |y_of: &dyn Fn(usize) -> f64| -> f64 {
            active
                .iter()
                .map(|&i| {
                    let y = y_of(i);
                    (w[i] * y) * (w[i] * y)
                })
                .sum::<f64>()
                .sqrt()
        };
        let full = load_at(&|_| a);
        let y: Vec<f64> = if full <= rho {
            (0..dim).map(|i| if cabs[i] > 0.0 { a } else { 0.0 }).collect()
        } else {
            // water-fill: y_i = min(a, c_i / (2 lam w_i^2)), lam set by
            // the ellipsoid budget (load decreasing in lam)
            let y_of = |lam: f64, i: usize| (cabs[i] / (2.0 * lam * w[i] * w[i])).min(a);
            let mut lam_hi = 1.0;
            while load_at(&|i| y_of(lam_hi, i)) > rho && lam_hi < 1e300 {
                lam_hi *= 2.0;
            }
            let mut lam_lo = 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lam_lo + lam_hi);
                if mid <= 0.0 {
                    break;
                }
                if load_at(&|i| y_of(mid, i)) > rho {
                    lam_lo = mid;
                } else {
                    lam_hi = mid;
                }
            }
            (0..dim)
                .map(|i| if cabs[i] > 0.0 { y_of(lam_hi, i) } else { 0.0 })
                .collect()
        };
        let v = la::dot(&cabs, &y);
        (y, v)
    };
    let (a_best, _) = crate::solvers::ternary_min(|a| -inner(a).1, 0.0, 1.0, 300);
    let (y, _) = inner(a_best);
    let mut x: Vec<f64> = (0..dim)
        .map(|i| if c[i] < 0.0 { -y[i] } else { y[i] })
        .collect();
    let t = Vector::new(x.clone(), NormKind::Triple)
        .map(|v| v.norm())
        .unwrap_or(0.0);
    if t > 1.0 {
        x = la::scale(&x, 1.0 / t);
    }
    let v = la::dot(c, &x);
    (x, v)
}

/// What a certificate asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertKind {
    Maximality,
    PositiveSupport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Maximal,
    Dominated,
    Inconclusive,
    Supported,
    NotSupported,
    NotStrictlyPositive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Maximal => "maximal",
            Verdict::Dominated => "dominated",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Supported => "supported",
            Verdict::NotSupported => "not_supported",
            Verdict::NotStrictlyPositive => "not_strictly_positive",
        }
    }
}

/// A re-checkable verdict about a point: the verdict, the optional
/// witness/functional that proves the negative direction, and named
/// residuals that `replay` recomputes from scratch.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub kind: CertKind,
    pub verdict: Verdict,
    pub witness: Option<Vector>,
    pub functional: Option<Vector>,
    pub residuals: Vec<(&'static str, f64)>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Maximal | Verdict::Supported)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
    }

    fn witness(&self) -> Result<&Vector> {
        self.witness
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("certificate has no witness".into()))
    }

    /// Recomputes every recorded residual through the set and cone
    /// oracles; true iff all agree with the stored values to 1e-12.
    pub fn replay(
        &self,
        set: &SetSpec,
        cone: &ConeSpec,
        x: &Vector,
        cfg: &SolverConfig,
    ) -> Result<bool> {
        for (name, recorded) in &self.residuals {
            let fresh = match *name {
                "witness_set_gap" => set.project(self.witness()?, cfg)?.1,
                "witness_cone_gap" => {
                    let d = self.witness()?.sub(x)?;
                    cone.project(&d, cfg)?.1
                }
                "gain" => self.witness()?.sub(x)?.norm(),
                "support_excess" => {
                    let f = self.functional.as_ref().ok_or_else(|| {
                        Error::InvalidInput("certificate has no functional".into())
                    })?;
                    f.inner(self.witness()?)? - f.inner(x)?
                }
                "positivity_margin" => {
                    let f = self.functional.as_ref().ok_or_else(|| {
                        Error::InvalidInput("certificate has no functional".into())
                    })?;
                    cone.positivity_margin(f)?
                }
                other => {
                    return Err(Error::InvalidInput(format!("unknown residual `{other}`")))
                }
            };
            if (fresh - recorded).abs() > 1e-12 {
                return Ok(false);
            }
        }
        Ok(!self.residuals.is_empty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v2(coords: &[f64], ambient: NormKind) -> Vector {
        Vector::new(coords.to_vec(), ambient).unwrap()
    }

    #[test]
    fn flat_membership_examples() {
        let k = SetSpec::flat(4, 1.0).unwrap();
        let inv = 1.0 / (2.0 * 2.0f64.sqrt());
        let z2 = v2(&[-inv, 0.5, 0.5, 0.0], NormKind::L2);
        assert!(k.contains(&z2, 1e-9).unwrap());
        assert!(!k
            .contains(&Vector::basis(4, 1, NormKind::L2), 1e-9)
            .unwrap());
        // cup holds but the ball cap fails
        assert!(!k.contains(&v2(&[-1.0, 0.9, 0.0, 0.0], NormKind::L2), 1e-9).unwrap());
    }

    #[test]
    fn slab_membership_examples() {
        let k = SetSpec::slab(10).unwrap();
        let mut c = vec![0.0; 10];
        c[9] = 1.0;
        c[0] = -0.1;
        let x10 = v2(&c, NormKind::L1);
        assert!(k.contains(&x10, 1e-9).unwrap());
        assert!((x10.norm() - 1.1).abs() <= 1e-15);
        assert!(!k.contains(&Vector::basis(10, 1, NormKind::L1), 1e-9).unwrap());
    }

    #[test]
    fn triple_ball_membership() {
        let k = SetSpec::triple_ball(4).unwrap();
        assert!(!k.contains(&Vector::basis(4, 1, NormKind::Triple), 1e-9).unwrap());
        let x = v2(&[2.0 / 3.0, 0.0, 0.0, 0.0], NormKind::Triple);
        assert!(k.contains(&x, 1e-9).unwrap());
    }

    #[test]
    fn disk_projection_is_radial() {
        let k = SetSpec::disk(1.0).unwrap();
        let cfg = SolverConfig::default();
        let (y, d) = k.project(&v2(&[2.0, 0.0], NormKind::L2), &cfg).unwrap();
        assert!(la::dist2(y.coords(), &[1.0, 0.0]) <= 1e-15);
        assert!((d - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn flat_projection_basics() {
        let k = SetSpec::flat(3, 1.0).unwrap();
        let cfg = SolverConfig::default();
        let zero = Vector::zeros(3, NormKind::L2);
        let (y, d) = k.project(&zero, &cfg).unwrap();
        assert_eq!(y.coords(), zero.coords());
        assert_eq!(d, 0.0);

        let z = v2(&[0.1, 0.3, 0.0], NormKind::L2);
        let (y, d) = k.project(&z, &cfg).unwrap();
        assert!(k.contains(&y, 1e-9).unwrap());
        assert!(d > 0.05 && d < 0.4);
        // variational inequality against sampled members
        for s in k.samples(60, 5) {
            let lhs = la::dot(
                &la::sub(z.coords(), y.coords()),
                &la::sub(s.coords(), y.coords()),
            );
            assert!(lhs <= 1e-8, "VI violated: {lhs}");
        }
    }

    #[test]
    fn flat_projection_idempotent_on_samples() {
        let k = SetSpec::flat(4, 1.0).unwrap();
        let cfg = SolverConfig::default();
        for s in k.samples(20, 9) {
            let (_, d) = k.project(&s, &cfg).unwrap();
            assert!(d <= 1e-9);
        }
    }

    #[test]
    fn minus_slanted_projection_and_membership() {
        let k = SetSpec::minus_slanted(4).unwrap();
        let cfg = SolverConfig::default();
        let z = v2(&[1.0, 0.0, 0.0, 0.0], NormKind::L2);
        let (y, d) = k.project(&z, &cfg).unwrap();
        assert!(k.contains(&y, 1e-8).unwrap());
        // the set lies in {x_1 <= 0}, so e_1 is at distance >= 1 from it
        assert!(d >= 1.0 - 1e-9);
        for s in k.samples(20, 3) {
            assert!(k.contains(&s, 1e-9).unwrap());
        }
    }

    #[test]
    fn square_and_disk_maximize_closed_forms() {
        let cfg = SolverConfig::default();
        let sq = SetSpec::square();
        let (x, val) = sq.maximize(&v2(&[1.0, 1.0], NormKind::L2), &cfg).unwrap();
        assert_eq!(x.coords(), &[0.0, 0.0]);
        assert_eq!(val, 0.0);

        let disk = SetSpec::disk(1.0).unwrap();
        let (x, val) = disk.maximize(&v2(&[1.0, 1.0], NormKind::L2), &cfg).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert!(la::dist2(x.coords(), &[s, s]) <= 1e-12);
        assert!((val - 2.0f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn minus_slanted_sup_of_first_coordinate_is_zero() {
        let k = SetSpec::minus_slanted(4).unwrap();
        let cfg = SolverConfig::default();
        let f = Vector::basis(4, 1, NormKind::L2);
        let (x, val) = k.maximize(&f, &cfg).unwrap();
        assert!(val.abs() <= 1e-6, "sup x_1 over the set is 0, got {val}");
        assert!(x.norm() <= 1e-4);
    }

    #[test]
    fn flat_maximize_finds_the_cup_arch() {
        // max of x_1 + x_2 over the flat cup is 1/4 at (-1/4, 1/2)
        let k = SetSpec::flat(2, 1.0).unwrap();
        let cfg = SolverConfig::default();
        let (x, val) = k.maximize(&v2(&[1.0, 1.0], NormKind::L2), &cfg).unwrap();
        assert!(k.contains(&x, 1e-8).unwrap());
        assert!((val - 0.25).abs() <= 1e-6, "value {val}");
    }

    #[test]
    fn slab_maximize_by_vertex_enumeration() {
        let cfg = SolverConfig::default();
        let k = SetSpec::slab(6).unwrap();
        let ones = v2(&[1.0; 6], NormKind::Sup);
        let (x, val) = k.maximize(&ones, &cfg).unwrap();
        assert!((val - 10.0 / 7.0).abs() <= 1e-12);
        let mut expected = vec![0.0; 6];
        expected[0] = -2.0 / 7.0;
        expected[5] = 12.0 / 7.0;
        assert!(la::dist2(x.coords(), &expected) <= 1e-12);

        let k4 = SetSpec::slab(4).unwrap();
        let e4 = Vector::basis(4, 4, NormKind::Sup);
        let (x, val) = k4.maximize(&e4, &cfg).unwrap();
        assert!((val - 1.6).abs() <= 1e-12);
        assert!(la::dist2(x.coords(), &[-0.4, 0.0, 0.0, 1.6]) <= 1e-12);
    }

    #[test]
    fn slab_maximize_large_dim_stays_consistent() {
        // beyond the enumeration limit the gradient path must still beat
        // every sampled member
        let cfg = SolverConfig::default();
        let k = SetSpec::slab(16).unwrap();
        let f = v2(
            &(1..=16).map(|i| 1.0 / (i as f64)).collect::<Vec<_>>(),
            NormKind::Sup,
        );
        let (x, val) = k.maximize(&f, &cfg).unwrap();
        assert!(k.contains(&x, 1e-7).unwrap());
        for s in k.samples(200, 2) {
            assert!(f.inner(&s).unwrap() <= val + 1e-7);
        }
    }

    #[test]
    fn triple_ball_maximize_is_the_dual_norm() {
        let cfg = SolverConfig::default();
        let k = SetSpec::triple_ball(4).unwrap();
        let e1 = Vector::basis(4, 1, NormKind::Sup);
        let (x, val) = k.maximize(&e1, &cfg).unwrap();
        // sup x_1 over the ball: cap a with a/2 budget, best at 2/3
        assert!((val - 2.0 / 3.0).abs() <= 1e-9, "value {val}");
        assert!(k.contains(&x, 1e-9).unwrap());
        // symmetric functional: flipping signs flips the maximizer
        let minus = v2(&[-1.0, 0.0, 0.0, 0.0], NormKind::Sup);
        let (xm, vm) = k.maximize(&minus, &cfg).unwrap();
        assert!((vm - 2.0 / 3.0).abs() <= 1e-9);
        assert!((xm.coord(1) + 2.0 / 3.0).abs() <= 1e-9);
    }

    #[test]
    fn cap_maximize_closed_form() {
        let cfg = SolverConfig::default();
        // constraint inactive: plain disk answer
        let k = SetSpec::cap(vec![0.0, 1.0], 2.0, 1.0).unwrap();
        let (_, val) = k.maximize(&v2(&[1.0, 0.0], NormKind::L2), &cfg).unwrap();
        assert!((val - 1.0).abs() <= 1e-12);
        // constraint active and aligned with the objective
        let k = SetSpec::cap(vec![1.0, 0.0], 0.0, 1.0).unwrap();
        let (x, val) = k.maximize(&v2(&[1.0, 0.0], NormKind::L2), &cfg).unwrap();
        assert!(val.abs() <= 1e-12);
        assert!(x.coord(1).abs() <= 1e-12);
        // constraint active, objective tilted
        let k = SetSpec::cap(vec![1.0, 0.0], 0.5, 1.0).unwrap();
        let (x, val) = k.maximize(&v2(&[1.0, 1.0], NormKind::L2), &cfg).unwrap();
        let expected = 0.5 + (1.0 - 0.25f64).sqrt();
        assert!((val - expected).abs() <= 1e-12);
        assert!(k.contains(&x, 1e-12).unwrap());
    }

    #[test]
    fn samples_are_members_in_every_family() {
        let specs = vec![
            SetSpec::flat(5, 1.0).unwrap(),
            SetSpec::minus_slanted(5).unwrap(),
            SetSpec::slab(5).unwrap(),
            SetSpec::triple_ball(5).unwrap(),
            SetSpec::disk(1.5).unwrap(),
            SetSpec::square(),
            SetSpec::cap(vec![1.0, 2.0], 0.5, 1.0).unwrap(),
        ];
        for k in &specs {
            for s in k.samples(50, 1) {
                assert!(k.contains(&s, 1e-9).unwrap(), "{:?}", k.family());
            }
            // determinism
            let a = k.samples(5, 42);
            let b = k.samples(5, 42);
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.coords(), y.coords());
            }
        }
    }

    #[test]
    fn midpoints_of_members_are_members() {
        let specs = vec![
            SetSpec::flat(4, 1.0).unwrap(),
            SetSpec::minus_slanted(4).unwrap(),
            SetSpec::slab(4).unwrap(),
            SetSpec::triple_ball(4).unwrap(),
        ];
        for k in &specs {
            let pts = k.samples(20, 8);
            for pair in pts.chunks(2) {
                if pair.len() < 2 {
                    continue;
                }
                let mid = la::scale(
                    &la::add(pair[0].coords(), pair[1].coords()),
                    0.5,
                );
                let m = Vector::new(mid, k.ambient()).unwrap();
                assert!(k.contains(&m, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn certificate_replay_detects_tampering() {
        let k = SetSpec::square();
        let p = ConeSpec::orthant(2, NormKind::L2).unwrap();
        let cfg = SolverConfig::default();
        let x = v2(&[-0.5, -0.5], NormKind::L2);
        let y = v2(&[0.0, 0.0], NormKind::L2);
        let gain = y.sub(&x).unwrap().norm();
        let mut cert = Certificate {
            kind: CertKind::Maximality,
            verdict: Verdict::Dominated,
            witness: Some(y),
            functional: None,
            residuals: vec![
                ("witness_set_gap", 0.0),
                ("witness_cone_gap", 0.0),
                ("gain", gain),
            ],
        };
        assert!(cert.replay(&k, &p, &x, &cfg).unwrap());
        cert.residuals[2].1 += 1e-6;
        assert!(!cert.replay(&k, &p, &x, &cfg).unwrap());
    }
}
