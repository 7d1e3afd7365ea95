//! Minimal feed-forward network engine.
//!
//! Actor and critic networks are plain multilayer perceptrons over `f64`
//! vectors. Everything is explicit: forward passes, reverse-mode gradients,
//! Adam moments. No autograd, no GPU, fixed MLP topology.

mod adam;
mod fourier;
mod loss;

pub use adam::AdamState;
pub use fourier::{fourier_features, FourierConfig};
pub use loss::{huber_loss, squared_loss};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element-wise activation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the post-activation value `y = f(z)`.
    #[inline]
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

/// One dense layer, weights row-major with shape `(out_dim, in_dim)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Layer {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }
}

/// A feed-forward network: hidden layers share one activation, the output
/// layer has its own.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
    hidden_activation: Activation,
    output_activation: Activation,
}

/// Per-layer parameter gradients, shapes mirroring [`Mlp`].
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub layers: Vec<LayerGrads>,
}

#[derive(Debug, Clone)]
pub struct LayerGrads {
    pub d_weights: Vec<f64>,
    pub d_bias: Vec<f64>,
}

impl MlpGrads {
    /// Zero gradients shaped like `net`.
    pub fn zeros_like(net: &Mlp) -> Self {
        MlpGrads {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrads {
                    d_weights: vec![0.0; l.weights.len()],
                    d_bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    /// Accumulate `other` into `self`.
    pub fn add_assign(&mut self, other: &MlpGrads) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.d_weights.iter_mut().zip(&b.d_weights) {
                *x += y;
            }
            for (x, y) in a.d_bias.iter_mut().zip(&b.d_bias) {
                *x += y;
            }
        }
    }

    /// Scale every gradient entry by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for layer in &mut self.layers {
            for g in &mut layer.d_weights {
                *g *= factor;
            }
            for g in &mut layer.d_bias {
                *g *= factor;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| {
            l.d_weights.iter().all(|g| g.is_finite()) && l.d_bias.iter().all(|g| g.is_finite())
        })
    }
}

impl Mlp {
    /// Build a network with the given layer sizes, e.g. `[in, h, h, h, out]`.
    /// Weights are initialized uniformly in `[-1/sqrt(fan_in), +1/sqrt(fan_in)]`,
    /// biases at zero.
    pub fn new<R: Rng + ?Sized>(
        layer_dims: &[usize],
        hidden_activation: Activation,
        output_activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        if layer_dims.len() < 2 {
            return Err(Error::InvalidParameter(
                "network needs at least an input and an output dimension".into(),
            ));
        }
        if layer_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter("layer dims must be > 0".into()));
        }
        let mut layers = Vec::with_capacity(layer_dims.len() - 1);
        for w in layer_dims.windows(2) {
            let (in_dim, out_dim) = (w[0], w[1]);
            let limit = 1.0 / (in_dim as f64).sqrt();
            let weights = (0..in_dim * out_dim)
                .map(|_| rng.gen_range(-limit..=limit))
                .collect();
            layers.push(Layer {
                in_dim,
                out_dim,
                weights,
                bias: vec![0.0; out_dim],
            });
        }
        Ok(Mlp {
            layers,
            hidden_activation,
            output_activation,
        })
    }

    /// Network with all weights and biases at zero (useful as a fixture).
    pub fn zeros(
        layer_dims: &[usize],
        hidden_activation: Activation,
        output_activation: Activation,
    ) -> Result<Self> {
        if layer_dims.len() < 2 {
            return Err(Error::InvalidParameter(
                "network needs at least an input and an output dimension".into(),
            ));
        }
        if layer_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter("layer dims must be > 0".into()));
        }
        let layers = layer_dims
            .windows(2)
            .map(|w| Layer {
                in_dim: w[0],
                out_dim: w[1],
                weights: vec![0.0; w[0] * w[1]],
                bias: vec![0.0; w[1]],
            })
            .collect();
        Ok(Mlp {
            layers,
            hidden_activation,
            output_activation,
        })
    }

    /// Build directly from explicit per-layer parameters.
    pub fn from_layers(
        layers: Vec<(Vec<Vec<f64>>, Vec<f64>)>,
        hidden_activation: Activation,
        output_activation: Activation,
    ) -> Result<Self> {
        let mut built = Vec::with_capacity(layers.len());
        for (rows, bias) in layers {
            let out_dim = rows.len();
            if out_dim == 0 || out_dim != bias.len() {
                return Err(Error::Dimension("weight rows must match bias length".into()));
            }
            let in_dim = rows[0].len();
            if rows.iter().any(|r| r.len() != in_dim) {
                return Err(Error::Dimension("ragged weight matrix".into()));
            }
            built.push(Layer {
                in_dim,
                out_dim,
                weights: rows.into_iter().flatten().collect(),
                bias,
            });
        }
        let net = Mlp {
            layers: built,
            hidden_activation,
            output_activation,
        };
        net.validate_chain()?;
        Ok(net)
    }

    fn validate_chain(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidParameter("network has no layers".into()));
        }
        for pair in self.layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::Dimension(format!(
                    "layer output {} does not chain into next input {}",
                    pair[0].out_dim, pair[1].in_dim
                )));
            }
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    fn activation_for(&self, layer_idx: usize) -> Activation {
        if layer_idx + 1 == self.layers.len() {
            self.output_activation
        } else {
            self.hidden_activation
        }
    }

    /// Forward pass.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut current = input.to_vec();
        for (idx, layer) in self.layers.iter().enumerate() {
            current = affine_activate(layer, &current, self.activation_for(idx));
        }
        Ok(current)
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::Dimension(format!(
                "input length {} does not match network input dim {}",
                input.len(),
                self.input_dim()
            )));
        }
        if input.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("non-finite network input".into()));
        }
        Ok(())
    }

    /// Reverse-mode gradients of `output . output_grad` with respect to every
    /// parameter and the input. The forward pass is recomputed internally.
    pub fn backward(&self, input: &[f64], output_grad: &[f64]) -> Result<(MlpGrads, Vec<f64>)> {
        self.check_input(input)?;
        if output_grad.len() != self.output_dim() {
            return Err(Error::Dimension(format!(
                "output grad length {} does not match network output dim {}",
                output_grad.len(),
                self.output_dim()
            )));
        }

        // Forward with stored post-activations; activations[0] is the input.
        let mut activations: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.to_vec());
        for (idx, layer) in self.layers.iter().enumerate() {
            let next = affine_activate(layer, activations.last().unwrap(), self.activation_for(idx));
            activations.push(next);
        }

        let mut grads = MlpGrads::zeros_like(self);
        let mut delta = output_grad.to_vec();
        for idx in (0..self.layers.len()).rev() {
            let layer = &self.layers[idx];
            let act = self.activation_for(idx);
            let output = &activations[idx + 1];
            let input_act = &activations[idx];
            // delta <- delta * f'(z), expressed via the stored output.
            for (d, y) in delta.iter_mut().zip(output) {
                *d *= act.derivative_from_output(*y);
            }
            let lg = &mut grads.layers[idx];
            for (o, d) in delta.iter().enumerate() {
                lg.d_bias[o] = *d;
                let row = &mut lg.d_weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (r, x) in row.iter_mut().zip(input_act) {
                    *r = d * x;
                }
            }
            // Propagate to the previous layer: delta_prev = W^T delta.
            let mut prev = vec![0.0; layer.in_dim];
            for (o, d) in delta.iter().enumerate() {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += w * d;
                }
            }
            delta = prev;
        }
        Ok((grads, delta))
    }

    /// Target-network blend: `self <- (1 - rho) * self + rho * online`.
    pub fn blend_from(&mut self, online: &Mlp, rho: f64) {
        debug_assert_eq!(self.layers.len(), online.layers.len());
        for (t, o) in self.layers.iter_mut().zip(&online.layers) {
            for (tw, ow) in t.weights.iter_mut().zip(&o.weights) {
                *tw = (1.0 - rho) * *tw + rho * ow;
            }
            for (tb, ob) in t.bias.iter_mut().zip(&o.bias) {
                *tb = (1.0 - rho) * *tb + rho * ob;
            }
        }
    }

    /// Apply `f` to every parameter, paired with the matching gradient entry.
    pub(crate) fn for_each_param_mut(
        &mut self,
        grads: &MlpGrads,
        mut f: impl FnMut(&mut f64, f64, usize),
    ) {
        let mut flat_idx = 0;
        for (layer, lg) in self.layers.iter_mut().zip(&grads.layers) {
            for (w, g) in layer.weights.iter_mut().zip(&lg.d_weights) {
                f(w, *g, flat_idx);
                flat_idx += 1;
            }
            for (b, g) in layer.bias.iter_mut().zip(&lg.d_bias) {
                f(b, *g, flat_idx);
                flat_idx += 1;
            }
        }
    }

    /// Mutable access to one flat-indexed parameter (weights first, then bias,
    /// layer by layer). Used by finite-difference probes.
    pub fn param_mut(&mut self, mut idx: usize) -> Option<&mut f64> {
        for layer in &mut self.layers {
            if idx < layer.weights.len() {
                return layer.weights.get_mut(idx);
            }
            idx -= layer.weights.len();
            if idx < layer.bias.len() {
                return layer.bias.get_mut(idx);
            }
            idx -= layer.bias.len();
        }
        None
    }

    pub fn all_finite(&self) -> bool {
        self.layers.iter().all(|l| {
            l.weights.iter().all(|w| w.is_finite()) && l.bias.iter().all(|b| b.is_finite())
        })
    }
}

#[inline]
fn affine_activate(layer: &Layer, input: &[f64], act: Activation) -> Vec<f64> {
    let mut out = Vec::with_capacity(layer.out_dim);
    for o in 0..layer.out_dim {
        let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
        let mut z = layer.bias[o];
        for (w, x) in row.iter().zip(input) {
            z += w * x;
        }
        out.push(act.apply(z));
    }
    out
}

/// Central-difference gradient of `output . probe` over every parameter.
pub fn numeric_gradient(net: &Mlp, input: &[f64], probe: &[f64], eps: f64) -> Result<MlpGrads> {
    let mut grads = MlpGrads::zeros_like(net);
    let mut scratch = net.clone();
    let n_params = net.num_params();
    let mut flat = Vec::with_capacity(n_params);
    for idx in 0..n_params {
        let p = *scratch.param_mut(idx).unwrap();
        *scratch.param_mut(idx).unwrap() = p + eps;
        let up = dot(&scratch.forward(input)?, probe);
        *scratch.param_mut(idx).unwrap() = p - eps;
        let down = dot(&scratch.forward(input)?, probe);
        *scratch.param_mut(idx).unwrap() = p;
        flat.push((up - down) / (2.0 * eps));
    }
    let mut it = flat.into_iter();
    for lg in &mut grads.layers {
        for g in &mut lg.d_weights {
            *g = it.next().unwrap();
        }
        for g in &mut lg.d_bias {
            *g = it.next().unwrap();
        }
    }
    Ok(grads)
}

/// Maximum relative disagreement between two gradient sets.
pub fn max_relative_error(a: &MlpGrads, b: &MlpGrads) -> f64 {
    let mut worst: f64 = 0.0;
    for (la, lb) in a.layers.iter().zip(&b.layers) {
        for (x, y) in la
            .d_weights
            .iter()
            .chain(&la.d_bias)
            .zip(lb.d_weights.iter().chain(&lb.d_bias))
        {
            let denom = (x.abs() + y.abs()).max(1e-8);
            worst = worst.max((x - y).abs() / denom);
        }
    }
    worst
}

/// Compare analytic backpropagation against central differences on every
/// parameter; returns the maximum relative error.
pub fn grad_check(net: &Mlp, input: &[f64], eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "grad check eps must be in (0, 1e-3], got {eps}"
        )));
    }
    let probe: Vec<f64> = (0..net.output_dim())
        .map(|i| ((i as f64) * 0.7311 + 0.2).sin() + 1.1)
        .collect();
    let (analytic, _) = net.backward(input, &probe)?;
    let numeric = numeric_gradient(net, input, &probe, eps)?;
    Ok(max_relative_error(&analytic, &numeric))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_net_maps_any_input_to_zero() {
        let net = Mlp::zeros(&[3, 4, 2], Activation::Relu, Activation::Identity).unwrap();
        let out = net.forward(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn single_linear_layer_hand_evaluation() {
        // W = [[2]], b = [1], input [3] -> 2*3 + 1 = 7
        let net = Mlp::from_layers(
            vec![(vec![vec![2.0]], vec![1.0])],
            Activation::Relu,
            Activation::Identity,
        )
        .unwrap();
        let out = net.forward(&[3.0]).unwrap();
        assert!((out[0] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn tanh_output_at_zero_preactivation_is_zero() {
        let net = Mlp::zeros(&[2, 3, 1], Activation::Tanh, Activation::Tanh).unwrap();
        let out = net.forward(&[0.3, 0.9]).unwrap();
        assert_eq!(out[0], 0.0);
    }

    #[test]
    fn forward_rejects_shape_mismatch() {
        let net = Mlp::zeros(&[3, 2], Activation::Relu, Activation::Identity).unwrap();
        match net.forward(&[1.0, 2.0]) {
            Err(Error::Dimension(_)) => {}
            other => panic!("expected dimension error, got {other:?}"),
        }
    }

    #[test]
    fn linear_layer_backward_identities() {
        // y = Wx + b, dL/dy = g  =>  dW = g x^T, db = g, dx = W^T g
        let net = Mlp::from_layers(
            vec![(vec![vec![1.5, -2.0], vec![0.5, 3.0]], vec![0.0, 0.0])],
            Activation::Relu,
            Activation::Identity,
        )
        .unwrap();
        let x = [2.0, -1.0];
        let g = [1.0, -0.5];
        let (grads, dx) = net.backward(&x, &g).unwrap();
        let lg = &grads.layers[0];
        assert_eq!(lg.d_bias, vec![1.0, -0.5]);
        assert_eq!(lg.d_weights, vec![2.0, -1.0, -1.0, 0.5]);
        // W^T g = [1.5*1 + 0.5*(-0.5), -2*1 + 3*(-0.5)]
        assert!((dx[0] - 1.25).abs() < 1e-12);
        assert!((dx[1] - (-3.5)).abs() < 1e-12);
    }

    #[test]
    fn tanh_unit_input_grad_equals_weights_at_zero_preactivation() {
        // tanh'(0) = 1, so the input gradient is exactly W.
        let net = Mlp::from_layers(
            vec![(vec![vec![0.7, -0.3]], vec![0.0])],
            Activation::Tanh,
            Activation::Tanh,
        )
        .unwrap();
        let (_, dx) = net.backward(&[0.0, 0.0], &[1.0]).unwrap();
        assert!((dx[0] - 0.7).abs() < 1e-12);
        assert!((dx[1] - (-0.3)).abs() < 1e-12);
    }

    #[test]
    fn backward_matches_finite_differences_on_random_nets() {
        // Property: exact reverse-mode gradients agree with central
        // differences on 100 random small networks.
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hidden = if seed % 2 == 0 {
                Activation::Relu
            } else {
                Activation::Tanh
            };
            let output = if seed % 3 == 0 {
                Activation::Tanh
            } else {
                Activation::Identity
            };
            let net = Mlp::new(&[4, 8, 8, 8, 3], hidden, output, &mut rng).unwrap();
            let input: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let err = grad_check(&net, &input, 1e-5).unwrap();
            assert!(err < 1e-4, "seed {seed}: max relative error {err}");
        }
    }

    #[test]
    fn grad_check_zero_net_is_exact() {
        let net = Mlp::zeros(&[3, 5, 2], Activation::Relu, Activation::Identity).unwrap();
        let err = grad_check(&net, &[0.1, 0.2, 0.3], 1e-5).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn corrupted_gradient_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let net = Mlp::new(&[3, 6, 2], Activation::Tanh, Activation::Identity, &mut rng).unwrap();
        let input = [0.4, -0.2, 0.9];
        let probe = [1.0, -1.0];
        let (mut analytic, _) = net.backward(&input, &probe).unwrap();
        let numeric = numeric_gradient(&net, &input, &probe, 1e-5).unwrap();
        // Double one entry: the relative error must jump above 0.1.
        analytic.layers[0].d_weights[0] *= 2.0;
        let err = max_relative_error(&analytic, &numeric);
        assert!(err > 0.1, "corruption not detected: {err}");
    }

    #[test]
    fn grad_check_rejects_bad_eps() {
        let net = Mlp::zeros(&[2, 2], Activation::Relu, Activation::Identity).unwrap();
        assert!(grad_check(&net, &[0.0, 0.0], 0.0).is_err());
        assert!(grad_check(&net, &[0.0, 0.0], 1e-2).is_err());
    }

    #[test]
    fn blend_from_moves_target_toward_online() {
        let mut target = Mlp::zeros(&[2, 2], Activation::Relu, Activation::Identity).unwrap();
        let online = Mlp::from_layers(
            vec![(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 1.0])],
            Activation::Relu,
            Activation::Identity,
        )
        .unwrap();
        target.blend_from(&online, 0.02);
        assert!((target.layers()[0].weights()[0] - 0.02).abs() < 1e-15);
        assert!((target.layers()[0].bias()[1] - 0.02).abs() < 1e-15);
    }
}
