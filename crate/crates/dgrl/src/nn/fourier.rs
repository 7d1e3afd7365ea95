use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decoupled (per-coordinate) cosine feature basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierConfig {
    pub order: u32,
    pub input_dim: usize,
}

impl FourierConfig {
    pub fn new(order: u32, input_dim: usize) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidParameter(
                "fourier input dim must be >= 1".into(),
            ));
        }
        Ok(FourierConfig { order, input_dim })
    }

    pub fn output_dim(&self) -> usize {
        self.input_dim * (self.order as usize + 1)
    }
}

/// For each coordinate `s_j` in `[0, 1]` and each `i` in `0..=order`, emits
/// `cos(i * pi * s_j)`. Output length is `input_dim * (order + 1)`.
pub fn fourier_features(state: &[f64], cfg: &FourierConfig) -> Result<Vec<f64>> {
    if state.len() != cfg.input_dim {
        return Err(Error::Dimension(format!(
            "state length {} does not match fourier input dim {}",
            state.len(),
            cfg.input_dim
        )));
    }
    let mut out = Vec::with_capacity(cfg.output_dim());
    for (j, &s) in state.iter().enumerate() {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!(
                "state coordinate {j} = {s} outside [0, 1]"
            )));
        }
        for i in 0..=cfg.order {
            out.push((i as f64 * PI * s).cos());
        }
    }
    Ok(out)
}
