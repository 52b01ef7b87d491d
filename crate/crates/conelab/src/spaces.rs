//! Vectors on finite truncations of sequence spaces and the norms in play.
//!
//! A [`Vector`] is a dense coordinate block `x_1..x_N` tagged with the
//! ambient norm it is measured in. Four norms are supported:
//!
//! | kind     | definition                                   | models        |
//! |----------|----------------------------------------------|---------------|
//! | `L2`     | `sqrt(sum x_n^2)`                            | truncated ℓ²  |
//! | `L1`     | `sum |x_n|`                                  | truncated ℓ¹  |
//! | `Sup`    | `max |x_n|`                                  | truncated c₀  |
//! | `Triple` | `max |x_n| + sqrt(sum (x_n / 2^n)^2)`        | renormed c₀   |
//!
//! `Triple` is the sup norm perturbed by the compression operator
//! `(T x)_n = x_n / 2^n`; it is equivalent to the sup norm with
//! equivalence constant [`triple_equivalence_factor`] and makes the unit
//! ball strictly convex enough for the renormed-sphere experiments.

use crate::linalg as la;
use crate::{Error, GalleryRow, Result};

/// Ambient norm tag for a [`Vector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    L2,
    L1,
    Sup,
    Triple,
}

impl NormKind {
    /// Norm used on functionals paired with vectors of this ambient.
    ///
    /// `L2` is self-dual and `L1`/`Sup` pair with each other. The dual of
    /// `Triple` has no closed form; the `L1` norm dominates it and is used
    /// as a conservative scale in margin tests.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L2 => NormKind::L2,
            NormKind::L1 => NormKind::Sup,
            NormKind::Sup => NormKind::L1,
            NormKind::Triple => NormKind::L1,
        }
    }
}

/// A truncated sequence-space element: coordinates plus ambient norm tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
    ambient: NormKind,
}

impl Vector {
    /// Builds a vector, rejecting empty coordinate blocks and non-finite
    /// entries.
    pub fn new(coords: Vec<f64>, ambient: NormKind) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("vector of dimension 0".into()));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate {bad}")));
        }
        Ok(Vector { coords, ambient })
    }

    /// Zero vector. `dim` must be at least 1.
    pub fn zeros(dim: usize, ambient: NormKind) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Vector {
            coords: vec![0.0; dim],
            ambient,
        }
    }

    /// Canonical basis vector `e_index` with 1-based `index <= dim`.
    pub fn basis(dim: usize, index: usize, ambient: NormKind) -> Self {
        assert!(
            (1..=dim).contains(&index),
            "basis index {index} out of range 1..={dim}"
        );
        let mut coords = vec![0.0; dim];
        coords[index - 1] = 1.0;
        Vector { coords, ambient }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn ambient(&self) -> NormKind {
        self.ambient
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// 1-based coordinate access.
    pub fn coord(&self, index: usize) -> f64 {
        self.coords[index - 1]
    }

    /// Same coordinates, different ambient tag.
    pub fn with_ambient(&self, ambient: NormKind) -> Vector {
        Vector {
            coords: self.coords.clone(),
            ambient,
        }
    }

    /// Norm in the vector's own ambient.
    pub fn norm(&self) -> f64 {
        self.norm_as(self.ambient)
    }

    /// Norm of the same coordinates measured with `kind`.
    pub fn norm_as(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::L2 => la::nrm2(&self.coords),
            NormKind::L1 => la::nrm1(&self.coords),
            NormKind::Sup => la::nrm_sup(&self.coords),
            NormKind::Triple => {
                la::nrm_sup(&self.coords) + la::nrm2(&compress_coords(&self.coords))
            }
        }
    }

    /// Applies the diagonal compression operator `(T x)_n = x_n / 2^n`.
    /// The image is square-summable regardless of the source ambient, so
    /// the result is tagged `L2`.
    pub fn compress(&self) -> Vector {
        Vector {
            coords: compress_coords(&self.coords),
            ambient: NormKind::L2,
        }
    }

    /// Coordinate pairing `sum f_n x_n`. Functionals are represented as
    /// plain vectors; only the dimensions must agree.
    pub fn inner(&self, other: &Vector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(la::dot(&self.coords, &other.coords))
    }

    /// `self + t * dir`, requiring equal dimension and ambient.
    pub fn add_scaled(&self, t: f64, dir: &Vector) -> Result<Vector> {
        self.check_compatible(dir)?;
        Ok(Vector {
            coords: la::add_scaled(&self.coords, t, &dir.coords),
            ambient: self.ambient,
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.check_compatible(other)?;
        Ok(Vector {
            coords: la::sub(&self.coords, &other.coords),
            ambient: self.ambient,
        })
    }

    pub fn scale(&self, t: f64) -> Vector {
        Vector {
            coords: la::scale(&self.coords, t),
            ambient: self.ambient,
        }
    }

    fn check_compatible(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }
}

fn compress_coords(coords: &[f64]) -> Vec<f64> {
    coords
        .iter()
        .enumerate()
        .map(|(i, x)| x * f64::exp2(-(i as f64 + 1.0)))
        .collect()
}

/// Equivalence constant between the triple and sup norms at truncation
/// `dim`: `sup <= triple <= factor * sup` with
/// `factor = 1 + sqrt((1 - 4^-dim) / 3)`.
pub fn triple_equivalence_factor(dim: usize) -> f64 {
    assert!(dim >= 1);
    1.0 + ((1.0 - f64::exp2(-2.0 * dim as f64)) / 3.0).sqrt()
}

/// Screens a family of vectors for the "weakly null but norm-bounded
/// away from zero" signature on a finite truncation.
///
/// For each member the probe value `max_{j<=probes} |x_j|` is a proxy for
/// pairing decay against the first `probes` coordinate functionals. A row
/// is flagged (`pass = true`) when the probe is at most `probe_threshold`
/// while the ambient norm stays at least `norm_floor`. Constant nonzero
/// families and norm-vanishing families are not flagged.
pub fn weak_null_gap(
    family: &[Vector],
    probes: usize,
    probe_threshold: f64,
    norm_floor: f64,
) -> Result<Vec<GalleryRow>> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty family".into()));
    }
    let dim = family[0].dim();
    if probes == 0 || probes > dim {
        return Err(Error::InvalidParameter(format!(
            "probe count {probes} out of range 1..={dim}"
        )));
    }
    let mut rows = Vec::with_capacity(family.len());
    for (i, x) in family.iter().enumerate() {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: x.dim(),
            });
        }
        let probe = x.coords()[..probes]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
        let norm = x.norm();
        rows.push(GalleryRow {
            n: i + 1,
            columns: vec![("probe_max", probe), ("norm", norm)],
            pass: probe <= probe_threshold && norm >= norm_floor,
        });
    }
    Ok(rows)
}

/// Default probe threshold for [`weak_null_gap`].
pub const WEAK_NULL_PROBE_THRESHOLD: f64 = 0.1;
/// Default norm floor for [`weak_null_gap`].
pub const WEAK_NULL_NORM_FLOOR: f64 = 0.25;
