//! Sampled Dynamic Neighborhoods.
//!
//! The actor's proto-action is scaled onto the action grid and used as the
//! center of an L-infinity trust region. Candidates are drawn by independent
//! per-coordinate sampling inside that region, scored by the critic, and the
//! executed action is either the argmax (evaluation) or a rank-based draw
//! (training). The nearest integer neighbor of the proto-action is always
//! part of the candidate set.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{
    metric_distance, nearest_neighbor, scale_continuous, scale_proto, ActionSpaceSpec,
    ExecutableAction, Metric,
};

/// How per-coordinate sampling weights are formed from distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingScheme {
    /// `w(z) = L - |z - center| + tau_s`.
    Linear,
    /// Softmax over negative absolute distances: `w(z) = exp(-|z - center| / tau_s)`.
    Softmax,
}

/// Neighborhood construction and exploration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdnConfig {
    /// Trust-region radius in grid units.
    pub radius: i64,
    /// Number of candidates kept after deduplication (2K are oversampled).
    pub samples: usize,
    /// Sampling temperature of the distance-to-weight map.
    pub tau_s: f64,
    /// Rank-based exploration temperature in (0, 1].
    pub tau_e: f64,
    /// Std of the Gaussian proto-action perturbation during training.
    pub sigma_f: f64,
    pub scheme: SamplingScheme,
}

impl Default for SdnConfig {
    fn default() -> Self {
        SdnConfig {
            radius: 1,
            samples: 10,
            tau_s: 1.0,
            tau_e: 0.8,
            sigma_f: 0.0,
            scheme: SamplingScheme::Linear,
        }
    }
}

impl SdnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::InvalidParameter("radius must be >= 1".into()));
        }
        if self.samples < 1 {
            return Err(Error::InvalidParameter("samples must be >= 1".into()));
        }
        if self.tau_s <= 0.0 {
            return Err(Error::InvalidParameter("tau_s must be > 0".into()));
        }
        if !(self.tau_e > 0.0 && self.tau_e <= 1.0) {
            return Err(Error::InvalidParameter("tau_e must be in (0, 1]".into()));
        }
        if self.sigma_f < 0.0 {
            return Err(Error::InvalidParameter("sigma_f must be >= 0".into()));
        }
        Ok(())
    }
}

/// Candidate actions plus their critic scores (filled after evaluation).
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub actions: Vec<ExecutableAction>,
    pub q_values: Vec<f64>,
}

impl CandidateSet {
    pub fn evaluate(
        &mut self,
        q_eval: &mut dyn FnMut(&ExecutableAction) -> Result<f64>,
    ) -> Result<()> {
        self.q_values.clear();
        for action in &self.actions {
            let q = q_eval(action)?;
            if !q.is_finite() {
                return Err(Error::Numeric("critic produced a non-finite Q-value".into()));
            }
            self.q_values.push(q);
        }
        Ok(())
    }
}

/// All integers within distance `radius` of `scaled_coord`, clipped to the
/// dimension bounds, together with their normalized sampling probabilities.
pub fn coordinate_options(
    scaled_coord: f64,
    radius: i64,
    bounds: crate::space::DimBounds,
    tau_s: f64,
    scheme: SamplingScheme,
) -> (Vec<i64>, Vec<f64>) {
    let lo = ((scaled_coord - radius as f64).ceil() as i64).max(bounds.min);
    let hi = ((scaled_coord + radius as f64).floor() as i64).min(bounds.max);
    let options: Vec<i64> = (lo..=hi).collect();
    let weights: Vec<f64> = options
        .iter()
        .map(|z| {
            let dist = (*z as f64 - scaled_coord).abs();
            match scheme {
                SamplingScheme::Linear => radius as f64 - dist + tau_s,
                SamplingScheme::Softmax => (-dist / tau_s).exp(),
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let probs = weights.iter().map(|w| w / total).collect();
    (options, probs)
}

fn categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Draw candidates by independent per-coordinate sampling inside the trust
/// region. Oversamples `2 * samples`, removes duplicates, enforces the metric
/// constraint for Euclidean/Manhattan metrics, truncates to `samples`, and
/// appends the nearest neighbor of the scaled proto if it is not already
/// present. The nearest neighbor is exempt from the metric filter so the set
/// is never empty.
pub fn sample_neighborhood<R: Rng + ?Sized>(
    scaled: &[f64],
    cfg: &SdnConfig,
    spec: &ActionSpaceSpec,
    rng: &mut R,
) -> Result<CandidateSet> {
    cfg.validate()?;
    if scaled.len() != spec.n_dims() {
        return Err(Error::Dimension(format!(
            "scaled proto length {} does not match discrete dims {}",
            scaled.len(),
            spec.n_dims()
        )));
    }
    let per_dim: Vec<(Vec<i64>, Vec<f64>)> = scaled
        .iter()
        .zip(spec.dims())
        .map(|(s, d)| coordinate_options(*s, cfg.radius, *d, cfg.tau_s, cfg.scheme))
        .collect();

    let mut actions: Vec<ExecutableAction> = Vec::with_capacity(cfg.samples + 1);
    let mut seen: HashSet<Vec<i64>> = HashSet::with_capacity(2 * cfg.samples);
    for _ in 0..2 * cfg.samples {
        let candidate: Vec<i64> = per_dim
            .iter()
            .map(|(options, probs)| options[categorical(probs, rng)])
            .collect();
        if spec.metric != Metric::Chebyshev
            && metric_distance(&candidate, scaled, spec.metric) > cfg.radius as f64
        {
            continue;
        }
        if seen.insert(candidate.clone()) {
            actions.push(ExecutableAction::discrete_only(candidate));
        }
    }
    actions.truncate(cfg.samples);

    let nn = nearest_neighbor(scaled, spec)?;
    if !actions.iter().any(|a| a.discrete == nn.discrete) {
        actions.push(nn);
    }
    Ok(CandidateSet {
        actions,
        q_values: Vec::new(),
    })
}

/// Rank-based exploration: candidates are ranked by descending Q-value
/// (ties keep candidate order) and index `i` is drawn with probability
/// proportional to `tau_e^rank(i)`.
pub fn rank_selection<R: Rng + ?Sized>(
    q_values: &[f64],
    tau_e: f64,
    rng: &mut R,
) -> Result<usize> {
    if q_values.is_empty() {
        return Err(Error::InvalidParameter(
            "rank selection over an empty candidate list".into(),
        ));
    }
    if !(tau_e > 0.0 && tau_e <= 1.0) {
        return Err(Error::InvalidParameter("tau_e must be in (0, 1]".into()));
    }
    if q_values.iter().any(|q| !q.is_finite()) {
        return Err(Error::Numeric("non-finite Q-value in rank selection".into()));
    }
    let mut order: Vec<usize> = (0..q_values.len()).collect();
    order.sort_by(|&a, &b| {
        q_values[b]
            .partial_cmp(&q_values[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut probs = vec![0.0; q_values.len()];
    for (rank, &idx) in order.iter().enumerate() {
        probs[idx] = tau_e.powi(rank as i32);
    }
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    Ok(categorical(&probs, rng))
}

/// Argmax with ties broken by the lowest candidate index.
pub fn argmax_index(q_values: &[f64]) -> Result<usize> {
    if q_values.is_empty() {
        return Err(Error::InvalidParameter("argmax over empty list".into()));
    }
    let mut best = 0;
    for (i, q) in q_values.iter().enumerate().skip(1) {
        if *q > q_values[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Whether an action is selected for execution (exploring) or evaluation
/// (deterministic argmax, no proto noise).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectMode {
    Train,
    Eval,
}

fn perturb_proto<R: Rng + ?Sized>(proto: &[f64], sigma_f: f64, rng: &mut R) -> Vec<f64> {
    if sigma_f == 0.0 {
        return proto.to_vec();
    }
    let normal = Normal::new(0.0, sigma_f).expect("sigma_f validated non-negative");
    proto.iter().map(|p| p + normal.sample(rng)).collect()
}

fn select_impl<R: Rng + ?Sized>(
    proto: &[f64],
    q_eval: &mut dyn FnMut(&ExecutableAction) -> Result<f64>,
    cfg: &SdnConfig,
    spec: &ActionSpaceSpec,
    sigma_c: f64,
    mode: SelectMode,
    rng: &mut R,
) -> Result<ExecutableAction> {
    cfg.validate()?;
    let proto_used = match mode {
        SelectMode::Train => perturb_proto(proto, cfg.sigma_f, rng),
        SelectMode::Eval => proto.to_vec(),
    };
    let scaled = scale_proto(&proto_used, spec)?;
    let mut set = sample_neighborhood(&scaled, cfg, spec, rng)?;

    if spec.n_continuous() > 0 {
        let scaled_c = scale_continuous(&proto_used, spec)?;
        let nn = nearest_neighbor(&scaled, spec)?;
        for action in set.actions.iter_mut() {
            // The nearest neighbor keeps the unperturbed continuous part so
            // the actor's own estimate is always in the set.
            let keep_center = action.discrete == nn.discrete || sigma_c == 0.0;
            action.continuous = scaled_c
                .iter()
                .zip(spec.continuous_bounds())
                .map(|(c, b)| {
                    let value = if keep_center {
                        *c
                    } else {
                        let normal = Normal::new(*c, sigma_c).expect("sigma_c >= 0");
                        normal.sample(rng)
                    };
                    value.clamp(b.min, b.max)
                })
                .collect();
        }
    }

    set.evaluate(q_eval)?;
    let idx = match mode {
        SelectMode::Eval => argmax_index(&set.q_values)?,
        SelectMode::Train => rank_selection(&set.q_values, cfg.tau_e, rng)?,
    };
    Ok(set.actions.swap_remove(idx))
}

/// SDN action selection for purely discrete spaces.
pub fn sdn_select<R: Rng + ?Sized>(
    proto: &[f64],
    q_eval: &mut dyn FnMut(&ExecutableAction) -> Result<f64>,
    cfg: &SdnConfig,
    spec: &ActionSpaceSpec,
    mode: SelectMode,
    rng: &mut R,
) -> Result<ExecutableAction> {
    select_impl(proto, q_eval, cfg, spec, 0.0, mode, rng)
}

/// Joint selection for hybrid spaces: discrete part via the sampled
/// neighborhood, continuous part via Gaussian perturbation (std `sigma_c`)
/// of the scaled continuous proto, clipped to bounds. The joint tuple is
/// evaluated by the critic.
pub fn hybrid_select<R: Rng + ?Sized>(
    proto: &[f64],
    q_eval: &mut dyn FnMut(&ExecutableAction) -> Result<f64>,
    cfg: &SdnConfig,
    spec: &ActionSpaceSpec,
    sigma_c: f64,
    mode: SelectMode,
    rng: &mut R,
) -> Result<ExecutableAction> {
    if spec.n_continuous() == 0 {
        return Err(Error::InvalidParameter(
            "hybrid selection requires at least one continuous dimension".into(),
        ));
    }
    if sigma_c < 0.0 {
        return Err(Error::InvalidParameter("sigma_c must be >= 0".into()));
    }
    select_impl(proto, q_eval, cfg, spec, sigma_c, mode, rng)
}
