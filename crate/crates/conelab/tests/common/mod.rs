//! Brute-force oracles for cross-checking derived quantities: lattice
//! search over boxes in dimension <= 3, refined coarse-to-fine, plus an
//! angular-sector model of two-dimensional dilated cones.

#![allow(dead_code)]

/// Minimizes `obj` over the feasible lattice points of `[lo, hi]`,
/// shrinking the box around the incumbent after each round. With
/// `per_axis` n and `rounds` r the final pitch is about
/// `span * (4/n)^(r-1) / n`.
pub fn grid_min(
    feasible: &dyn Fn(&[f64]) -> bool,
    obj: &dyn Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    per_axis: usize,
    rounds: usize,
) -> Option<(Vec<f64>, f64)> {
    assert!(per_axis >= 5 && !lo.is_empty() && lo.len() == hi.len());
    let dim = lo.len();
    let (mut lo, mut hi) = (lo.to_vec(), hi.to_vec());
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..rounds {
        let mut idx = vec![0usize; dim];
        let mut point = vec![0.0; dim];
        loop {
            for (a, &i) in idx.iter().enumerate() {
                point[a] = lo[a] + (hi[a] - lo[a]) * i as f64 / (per_axis - 1) as f64;
            }
            if feasible(&point) {
                let v = obj(&point);
                if best.as_ref().map_or(true, |(_, b)| v < *b) {
                    best = Some((point.clone(), v));
                }
            }
            // mixed-radix increment
            let mut a = 0;
            loop {
                idx[a] += 1;
                if idx[a] < per_axis {
                    break;
                }
                idx[a] = 0;
                a += 1;
                if a == dim {
                    break;
                }
            }
            if a == dim {
                break;
            }
        }
        let center = match &best {
            Some((p, _)) => p.clone(),
            None => return None,
        };
        for a in 0..dim {
            let pitch = (hi[a] - lo[a]) / (per_axis - 1) as f64;
            lo[a] = center[a] - 2.0 * pitch;
            hi[a] = center[a] + 2.0 * pitch;
        }
    }
    best
}

/// Maximization via the negated objective.
pub fn grid_max(
    feasible: &dyn Fn(&[f64]) -> bool,
    obj: &dyn Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    per_axis: usize,
    rounds: usize,
) -> Option<(Vec<f64>, f64)> {
    grid_min(feasible, &|p| -obj(p), lo, hi, per_axis, rounds).map(|(p, v)| (p, -v))
}

pub fn nrm2(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A two-dimensional cone over a sampled compact set that misses the
/// origin is the angular sector spanned by the sample directions. Keeps
/// the raw angle range, so it only models cones inside (-pi/2, pi).
pub struct Sector {
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Sector {
    /// Sector of `cone(points + delta * disk)` from dense samples.
    pub fn dilated(points: &[[f64; 2]], delta: f64, circle_samples: usize) -> Sector {
        let (mut t_min, mut t_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for b in points {
            for j in 0..circle_samples {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / circle_samples as f64;
                let q = [b[0] + delta * phi.cos(), b[1] + delta * phi.sin()];
                assert!(nrm2(&q) > 1e-9, "dilation must keep the base off zero");
                let theta = q[1].atan2(q[0]);
                t_min = t_min.min(theta);
                t_max = t_max.max(theta);
            }
        }
        assert!(t_max - t_min < std::f64::consts::PI, "sector must be pointed");
        Sector {
            theta_min: t_min,
            theta_max: t_max,
        }
    }

    pub fn contains(&self, q: [f64; 2], angle_tol: f64) -> bool {
        let n = nrm2(&q);
        if n <= 1e-12 {
            return true;
        }
        let theta = q[1].atan2(q[0]);
        theta >= self.theta_min - angle_tol && theta <= self.theta_max + angle_tol
    }

    /// Euclidean distance from `q` to the sector: zero inside, otherwise
    /// the distance to the nearer boundary ray (or to the apex when the
    /// foot of the perpendicular falls behind it).
    pub fn distance(&self, q: [f64; 2]) -> f64 {
        let n = nrm2(&q);
        if n <= 1e-300 || self.contains(q, 0.0) {
            return 0.0;
        }
        let mut best = n;
        for theta in [self.theta_min, self.theta_max] {
            let u = [theta.cos(), theta.sin()];
            let t = dot(&q, &u).max(0.0);
            best = best.min(dist2(&q, &[t * u[0], t * u[1]]));
        }
        best
    }
}
