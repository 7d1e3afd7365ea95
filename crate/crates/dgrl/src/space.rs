//! Action-space description and the proto-action scaling pipeline.
//!
//! The actor emits a proto-action in `[-1, 1]^(N+M)`: the first `N`
//! coordinates relax the discrete dimensions, the remaining `M` the
//! continuous ones. Scaling maps proto coordinates affinely onto the
//! per-dimension bounds; rounding snaps the discrete part onto the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance metric used for the neighborhood constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Chebyshev,
    Euclidean,
    Manhattan,
}

/// Integer bounds of one discrete dimension (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimBounds {
    pub min: i64,
    pub max: i64,
}

impl DimBounds {
    pub fn new(min: i64, max: i64) -> Self {
        DimBounds { min, max }
    }

    pub fn width(&self) -> f64 {
        (self.max - self.min) as f64
    }
}

/// Real bounds of one continuous dimension (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContBounds {
    pub min: f64,
    pub max: f64,
}

/// Full description of a discrete or hybrid action space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionSpaceSpec {
    dims: Vec<DimBounds>,
    continuous: Vec<ContBounds>,
    /// Per-dimension relabeling of value codes; `None` means the structured
    /// (identity) layout. Applied at the environment boundary only.
    permutation: Option<Vec<Vec<i64>>>,
    pub metric: Metric,
}

impl ActionSpaceSpec {
    pub fn discrete(dims: Vec<DimBounds>) -> Result<Self> {
        Self::new(dims, Vec::new(), None, Metric::Chebyshev)
    }

    /// Uniform box: `n_dims` dimensions, each ranging over `[min, max]`.
    pub fn uniform_box(n_dims: usize, min: i64, max: i64) -> Result<Self> {
        Self::discrete(vec![DimBounds::new(min, max); n_dims])
    }

    pub fn new(
        dims: Vec<DimBounds>,
        continuous: Vec<ContBounds>,
        permutation: Option<Vec<Vec<i64>>>,
        metric: Metric,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter(
                "action space needs at least one discrete dimension".into(),
            ));
        }
        for (i, d) in dims.iter().enumerate() {
            if d.min > d.max {
                return Err(Error::InvalidParameter(format!(
                    "dimension {i}: min {} > max {}",
                    d.min, d.max
                )));
            }
        }
        for (i, c) in continuous.iter().enumerate() {
            if !(c.min.is_finite() && c.max.is_finite()) || c.min > c.max {
                return Err(Error::InvalidParameter(format!(
                    "continuous dimension {i}: invalid bounds [{}, {}]",
                    c.min, c.max
                )));
            }
        }
        if let Some(perm) = &permutation {
            if perm.len() != dims.len() {
                return Err(Error::InvalidParameter(
                    "permutation must cover every discrete dimension".into(),
                ));
            }
            for (i, (p, d)) in perm.iter().zip(&dims).enumerate() {
                let n = (d.max - d.min + 1) as usize;
                let mut seen = vec![false; n];
                if p.len() != n {
                    return Err(Error::InvalidParameter(format!(
                        "permutation for dimension {i} has wrong length"
                    )));
                }
                for &v in p {
                    if v < d.min || v > d.max || seen[(v - d.min) as usize] {
                        return Err(Error::InvalidParameter(format!(
                            "permutation for dimension {i} is not a bijection"
                        )));
                    }
                    seen[(v - d.min) as usize] = true;
                }
            }
        }
        Ok(ActionSpaceSpec {
            dims,
            continuous,
            permutation,
            metric,
        })
    }

    pub fn n_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn n_continuous(&self) -> usize {
        self.continuous.len()
    }

    /// Actor output width: discrete plus continuous coordinates.
    pub fn proto_dim(&self) -> usize {
        self.dims.len() + self.continuous.len()
    }

    pub fn dims(&self) -> &[DimBounds] {
        &self.dims
    }

    pub fn continuous_bounds(&self) -> &[ContBounds] {
        &self.continuous
    }

    pub fn permutation(&self) -> Option<&[Vec<i64>]> {
        self.permutation.as_deref()
    }

    pub fn with_permutation(mut self, permutation: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(
            std::mem::take(&mut self.dims),
            std::mem::take(&mut self.continuous),
            Some(permutation),
            self.metric,
        )
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    /// Total number of discrete actions as a float (may overflow to inf for
    /// display purposes only).
    pub fn cardinality(&self) -> f64 {
        self.dims
            .iter()
            .map(|d| (d.max - d.min + 1) as f64)
            .product()
    }

    pub fn contains(&self, action: &ExecutableAction) -> bool {
        action.discrete.len() == self.dims.len()
            && action.continuous.len() == self.continuous.len()
            && action
                .discrete
                .iter()
                .zip(&self.dims)
                .all(|(a, d)| *a >= d.min && *a <= d.max)
            && action
                .continuous
                .iter()
                .zip(&self.continuous)
                .all(|(c, b)| *c >= b.min && *c <= b.max)
    }
}

/// A fully specified action: integer vector plus optional continuous part,
/// always inside the action-space bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutableAction {
    pub discrete: Vec<i64>,
    pub continuous: Vec<f64>,
}

impl ExecutableAction {
    pub fn discrete_only(discrete: Vec<i64>) -> Self {
        ExecutableAction {
            discrete,
            continuous: Vec::new(),
        }
    }
}

/// Affine map from the clipped proto range `[-1, 1]` onto `[min, max]`.
#[inline]
fn affine_to_bounds(proto: f64, min: f64, max: f64) -> f64 {
    let clipped = proto.clamp(-1.0, 1.0);
    (clipped + 1.0) / 2.0 * (max - min) + min
}

/// Scale the discrete part of a proto-action onto the integer bounds.
/// Degenerate bounds (`min == max`) produce the constant bound value.
pub fn scale_proto(proto: &[f64], spec: &ActionSpaceSpec) -> Result<Vec<f64>> {
    if proto.len() < spec.n_dims() {
        return Err(Error::Dimension(format!(
            "proto length {} shorter than discrete dims {}",
            proto.len(),
            spec.n_dims()
        )));
    }
    Ok(proto[..spec.n_dims()]
        .iter()
        .zip(spec.dims())
        .map(|(p, d)| affine_to_bounds(*p, d.min as f64, d.max as f64))
        .collect())
}

/// Scale the continuous tail of a proto-action onto its real bounds.
pub fn scale_continuous(proto: &[f64], spec: &ActionSpaceSpec) -> Result<Vec<f64>> {
    if proto.len() != spec.proto_dim() {
        return Err(Error::Dimension(format!(
            "proto length {} does not match proto dim {}",
            proto.len(),
            spec.proto_dim()
        )));
    }
    Ok(proto[spec.n_dims()..]
        .iter()
        .zip(spec.continuous_bounds())
        .map(|(p, b)| affine_to_bounds(*p, b.min, b.max))
        .collect())
}

/// Round a scaled coordinate half-up and clip it into its bounds.
#[inline]
pub fn round_coord(scaled: f64, bounds: DimBounds) -> i64 {
    let rounded = (scaled + 0.5).floor() as i64;
    rounded.clamp(bounds.min, bounds.max)
}

/// Nearest discrete action to a scaled proto-action: per-dimension
/// round-half-up, clipped to bounds.
pub fn nearest_neighbor(scaled: &[f64], spec: &ActionSpaceSpec) -> Result<ExecutableAction> {
    if scaled.len() != spec.n_dims() {
        return Err(Error::Dimension(format!(
            "scaled length {} does not match discrete dims {}",
            scaled.len(),
            spec.n_dims()
        )));
    }
    Ok(ExecutableAction::discrete_only(
        scaled
            .iter()
            .zip(spec.dims())
            .map(|(s, d)| round_coord(*s, *d))
            .collect(),
    ))
}

/// Encode an action for the critic: every coordinate mapped into `[0, 1]`.
/// Degenerate dimensions encode as 0.5.
pub fn encode_action_unit(action: &ExecutableAction, spec: &ActionSpaceSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(spec.proto_dim());
    for (a, d) in action.discrete.iter().zip(spec.dims()) {
        let w = d.width();
        out.push(if w == 0.0 {
            0.5
        } else {
            (*a - d.min) as f64 / w
        });
    }
    for (c, b) in action.continuous.iter().zip(spec.continuous_bounds()) {
        let w = b.max - b.min;
        out.push(if w == 0.0 { 0.5 } else { (c - b.min) / w });
    }
    out
}

/// Distance between a candidate and the scaled proto under `metric`.
pub fn metric_distance(candidate: &[i64], scaled: &[f64], metric: Metric) -> f64 {
    match metric {
        Metric::Chebyshev => candidate
            .iter()
            .zip(scaled)
            .map(|(c, s)| (*c as f64 - s).abs())
            .fold(0.0, f64::max),
        Metric::Euclidean => candidate
            .iter()
            .zip(scaled)
            .map(|(c, s)| (*c as f64 - s).powi(2))
            .sum::<f64>()
            .sqrt(),
        Metric::Manhattan => candidate
            .iter()
            .zip(scaled)
            .map(|(c, s)| (*c as f64 - s).abs())
            .sum(),
    }
}
