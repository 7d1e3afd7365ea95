//! Mapping baselines: axial greedy search and plain rounding.
//!
//! The axial baseline perturbs one coordinate at a time and hill-climbs on
//! the critic, so its one-step support is restricted to the coordinate axes.
//! The rounding baseline executes the nearest neighbor of the scaled
//! proto-action without consulting the critic at all.

use crate::error::{Error, Result};
use crate::space::{
    nearest_neighbor, scale_continuous, scale_proto, ActionSpaceSpec, ExecutableAction,
};

/// Single-coordinate +/-1 perturbations of `point`, clipped to bounds.
/// Moves that clip back onto `point` itself are dropped.
pub fn axial_neighbors(point: &[i64], spec: &ActionSpaceSpec) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(2 * point.len());
    for (d, bounds) in spec.dims().iter().enumerate() {
        for delta in [-1i64, 1] {
            let moved = (point[d] + delta).clamp(bounds.min, bounds.max);
            if moved != point[d] {
                let mut neighbor = point.to_vec();
                neighbor[d] = moved;
                out.push(neighbor);
            }
        }
    }
    out
}

/// Greedy axial search: start from the nearest neighbor of the scaled
/// proto-action, repeatedly move to the best improving single-coordinate
/// neighbor, stop at a local optimum or after `steps` iterations.
///
/// For hybrid spaces the continuous part is fixed to the scaled continuous
/// proto on every evaluated candidate; only discrete coordinates are
/// searched.
pub fn axial_greedy_baseline(
    proto: &[f64],
    q_eval: &mut dyn FnMut(&ExecutableAction) -> Result<f64>,
    steps: usize,
    spec: &ActionSpaceSpec,
) -> Result<ExecutableAction> {
    if steps < 1 {
        return Err(Error::InvalidParameter(
            "axial greedy search needs at least one step".into(),
        ));
    }
    let scaled = scale_proto(proto, spec)?;
    let continuous = if spec.n_continuous() > 0 {
        scale_continuous(proto, spec)?
            .iter()
            .zip(spec.continuous_bounds())
            .map(|(c, b)| c.clamp(b.min, b.max))
            .collect()
    } else {
        Vec::new()
    };
    let make = |discrete: Vec<i64>| ExecutableAction {
        discrete,
        continuous: continuous.clone(),
    };

    let mut current = nearest_neighbor(&scaled, spec)?.discrete;
    let mut current_q = q_eval(&make(current.clone()))?;
    for _ in 0..steps {
        let mut best: Option<(Vec<i64>, f64)> = None;
        for neighbor in axial_neighbors(&current, spec) {
            let q = q_eval(&make(neighbor.clone()))?;
            if best.as_ref().map_or(true, |(_, bq)| q > *bq) {
                best = Some((neighbor, q));
            }
        }
        match best {
            Some((neighbor, q)) if q > current_q => {
                current = neighbor;
                current_q = q;
            }
            _ => break,
        }
    }
    Ok(make(current))
}

/// Scale and round; no critic involvement.
pub fn round_only_baseline(proto: &[f64], spec: &ActionSpaceSpec) -> Result<ExecutableAction> {
    let scaled = scale_proto(proto, spec)?;
    let mut action = nearest_neighbor(&scaled, spec)?;
    if spec.n_continuous() > 0 {
        action.continuous = scale_continuous(proto, spec)?
            .iter()
            .zip(spec.continuous_bounds())
            .map(|(c, b)| c.clamp(b.min, b.max))
            .collect();
    }
    Ok(action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdn::{sdn_select, SdnConfig, SelectMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn box_spec(n: usize, max: i64) -> ActionSpaceSpec {
        ActionSpaceSpec::uniform_box(n, 0, max).unwrap()
    }

    #[test]
    fn converges_to_the_critic_peak_on_a_small_grid() {
        // Critic = negative squared distance to an integer target; greedy
        // axial descent must reach the brute-force argmax.
        let spec = box_spec(2, 6);
        let target = [5i64, 1];
        let mut q = |a: &ExecutableAction| {
            Ok(-a
                .discrete
                .iter()
                .zip(target)
                .map(|(x, t)| ((x - t) as f64).powi(2))
                .sum::<f64>())
        };
        let found = axial_greedy_baseline(&[0.0, 0.0], &mut q, 50, &spec).unwrap();
        assert_eq!(found.discrete, vec![5, 1]);
    }

    #[test]
    fn zero_steps_rejected_and_local_optimum_returns_start() {
        let spec = box_spec(2, 4);
        let mut flat = |_: &ExecutableAction| Ok(0.0);
        assert!(axial_greedy_baseline(&[0.0, 0.0], &mut flat, 0, &spec).is_err());
        // A flat critic never improves, so the start (nearest neighbor) wins.
        let found = axial_greedy_baseline(&[0.0, 0.0], &mut flat, 1, &spec).unwrap();
        assert_eq!(found.discrete, vec![2, 2]);
    }

    #[test]
    fn one_step_support_is_axial_only() {
        // A diagonal-only improvement is invisible to a single greedy step.
        let spec = box_spec(2, 4);
        let mut q = |a: &ExecutableAction| {
            if a.discrete == vec![3, 3] {
                Ok(10.0)
            } else {
                Ok(0.0)
            }
        };
        let found = axial_greedy_baseline(&[0.0, 0.0], &mut q, 1, &spec).unwrap();
        assert_eq!(found.discrete, vec![2, 2], "diagonal peak must not be reached");
    }

    #[test]
    fn axial_neighbors_clip_at_bounds() {
        let spec = box_spec(2, 4);
        let n = axial_neighbors(&[0, 4], &spec);
        assert_eq!(n.len(), 2);
        assert!(n.contains(&vec![1, 4]));
        assert!(n.contains(&vec![0, 3]));
    }

    #[test]
    fn round_only_matches_integer_proto() {
        let spec = box_spec(1, 4);
        // Proto 0.0 scales to 2.0 exactly.
        let a = round_only_baseline(&[0.0], &spec).unwrap();
        assert_eq!(a.discrete, vec![2]);
    }

    #[test]
    fn midpoint_tie_rounds_up() {
        let spec = box_spec(1, 1);
        // Proto 0.0 scales to 0.5, the midpoint between 0 and 1.
        let a = round_only_baseline(&[0.0], &spec).unwrap();
        assert_eq!(a.discrete, vec![1]);
    }

    #[test]
    fn agrees_with_sdn_when_the_candidate_set_is_the_singleton_nn() {
        // Degenerate one-point space: SDN with K = 1 and sigma_f = 0 can only
        // ever produce the nearest neighbor.
        let spec = ActionSpaceSpec::uniform_box(2, 3, 3).unwrap();
        let cfg = SdnConfig {
            samples: 1,
            sigma_f: 0.0,
            ..SdnConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut q = |_: &ExecutableAction| Ok(1.0);
        let via_sdn = sdn_select(&[0.3, -0.8], &mut q, &cfg, &spec, SelectMode::Train, &mut rng)
            .unwrap();
        let via_round = round_only_baseline(&[0.3, -0.8], &spec).unwrap();
        assert_eq!(via_sdn, via_round);
    }
}
