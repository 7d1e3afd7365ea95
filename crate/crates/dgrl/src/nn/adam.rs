use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Mlp, MlpGrads};

/// Adam optimizer state for one network. Moment buffers mirror the parameter
/// shapes; `step_count` drives bias correction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamState {
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    step_count: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(net: &Mlp, learning_rate: f64) -> Result<Self> {
        if learning_rate <= 0.0 {
            return Err(Error::InvalidParameter(
                "learning rate must be positive".into(),
            ));
        }
        let n = net.num_params();
        Ok(AdamState {
            first_moment: vec![0.0; n],
            second_moment: vec![0.0; n],
            step_count: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One bias-corrected Adam update applied in place.
    pub fn step(&mut self, net: &mut Mlp, grads: &MlpGrads) -> Result<()> {
        if !grads.is_finite() {
            return Err(Error::Numeric("non-finite gradients in Adam step".into()));
        }
        self.step_count += 1;
        let t = self.step_count as f64;
        let bias1 = 1.0 - self.beta1.powf(t);
        let bias2 = 1.0 - self.beta2.powf(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.learning_rate, self.epsilon);
        let (m, v) = (&mut self.first_moment, &mut self.second_moment);
        net.for_each_param_mut(grads, |p, g, idx| {
            m[idx] = b1 * m[idx] + (1.0 - b1) * g;
            v[idx] = b2 * v[idx] + (1.0 - b2) * g * g;
            let m_hat = m[idx] / bias1;
            let v_hat = v[idx] / bias2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;

    fn scalar_net(w: f64) -> Mlp {
        Mlp::from_layers(
            vec![(vec![vec![w]], vec![0.0])],
            Activation::Relu,
            Activation::Identity,
        )
        .unwrap()
    }

    fn grad_of(net: &Mlp, value: f64) -> MlpGrads {
        let mut g = MlpGrads::zeros_like(net);
        g.layers[0].d_weights[0] = value;
        g
    }

    #[test]
    fn zero_gradient_is_a_parameter_noop() {
        let mut net = scalar_net(0.5);
        let mut state = AdamState::new(&net, 0.1).unwrap();
        let g = grad_of(&net, 0.0);
        state.step(&mut net, &g).unwrap();
        assert_eq!(net.layers()[0].weights()[0], 0.5);
        assert_eq!(state.step_count(), 1);
        assert_eq!(state.first_moment[0], 0.0);
        assert_eq!(state.second_moment[0], 0.0);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // Bias correction makes m_hat = v_hat = g on step one, so the update
        // is -lr * g / (|g| + eps) = -lr for g = 1.
        let mut net = scalar_net(1.0);
        let mut state = AdamState::new(&net, 0.1).unwrap();
        let g = grad_of(&net, 1.0);
        state.step(&mut net, &g).unwrap();
        let delta = net.layers()[0].weights()[0] - 1.0;
        assert!((delta + 0.1).abs() < 1e-6, "delta = {delta}");
    }

    #[test]
    fn repeated_positive_gradient_decreases_parameter_monotonically() {
        let mut net = scalar_net(2.0);
        let mut state = AdamState::new(&net, 0.05).unwrap();
        let mut previous = 2.0;
        for _ in 0..5 {
            let g = grad_of(&net, 1.0);
            state.step(&mut net, &g).unwrap();
            let current = net.layers()[0].weights()[0];
            assert!(current < previous);
            previous = current;
        }
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let mut net = scalar_net(1.0);
        let mut state = AdamState::new(&net, 0.1).unwrap();
        let g = grad_of(&net, f64::NAN);
        assert!(matches!(state.step(&mut net, &g), Err(Error::Numeric(_))));
    }
}
