//! The learned vector field: a small fully connected network with a
//! hand-written backward pass.
//!
//! Input is `features(g) ++ [t]`, output the field's components in the
//! left-invariant frame. Weights of each layer are stored input-major
//! (`w[i * out + o]`) followed by the biases, all in one flat vector so the
//! optimizer and the checkpoint format see a single array.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::group::MetricWeights;
use crate::math;
use crate::{Error, Result};

pub const DEFAULT_HIDDEN: [usize; 4] = [64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Activation {
    /// `z * sigmoid(z)`
    Silu,
}

impl Activation {
    pub fn name(&self) -> &'static str {
        match self {
            Activation::Silu => "silu",
        }
    }

    #[inline]
    fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Silu => z * sigmoid(z),
        }
    }

    /// Value and derivative at `z`.
    #[inline]
    fn apply_with_slope(&self, z: f64) -> (f64, f64) {
        match self {
            Activation::Silu => {
                let s = sigmoid(z);
                (z * s, s * (1.0 + z * (1.0 - s)))
            }
        }
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + math::exp(-z))
}

/// A batch of regression pairs `(features ++ t) -> target`, row-major.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Batch {
    input_dim: usize,
    output_dim: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl Batch {
    pub fn new(input_dim: usize, output_dim: usize) -> Self {
        Self { input_dim, output_dim, inputs: Vec::new(), targets: Vec::new() }
    }

    /// Appends one pair. `features.len() + 1` must equal the input width.
    pub fn push(&mut self, features: &[f64], t: f64, target: &[f64]) {
        assert_eq!(features.len() + 1, self.input_dim, "feature length does not match batch");
        assert_eq!(target.len(), self.output_dim, "target length does not match batch");
        self.inputs.extend_from_slice(features);
        self.inputs.push(t);
        self.targets.extend_from_slice(target);
    }

    pub fn len(&self) -> usize {
        self.targets.len().checked_div(self.output_dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.input_dim..(i + 1) * self.input_dim]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        &self.targets[i * self.output_dim..(i + 1) * self.output_dim]
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }
}

/// Time-dependent vector field network `u(features, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldNet {
    sizes: Vec<usize>,
    activation: Activation,
    params: Vec<f64>,
}

impl VectorFieldNet {
    /// Kaiming-uniform weights scaled by fan-in, biases uniform in
    /// `+-1/sqrt(fan_in)`. With `zero_last` the output layer starts at zero,
    /// so the initial field is identically zero.
    pub fn new<R: Rng + ?Sized>(
        feature_dim: usize,
        hidden: &[usize],
        output_dim: usize,
        zero_last: bool,
        rng: &mut R,
    ) -> Self {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(feature_dim + 1);
        sizes.extend_from_slice(hidden);
        sizes.push(output_dim);
        let total = param_count(&sizes);
        let mut params = Vec::with_capacity(total);
        let layers = sizes.len() - 1;
        for l in 0..layers {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            if zero_last && l == layers - 1 {
                params.extend(core::iter::repeat_n(0.0, fan_in * fan_out + fan_out));
                continue;
            }
            let w_bound = math::sqrt(6.0 / fan_in as f64);
            let b_bound = 1.0 / math::sqrt(fan_in as f64);
            params.extend((0..fan_in * fan_out).map(|_| rng.random_range(-w_bound..w_bound)));
            params.extend((0..fan_out).map(|_| rng.random_range(-b_bound..b_bound)));
        }
        debug_assert_eq!(params.len(), total);
        Self { sizes, activation: Activation::Silu, params }
    }

    /// Rebuilds a network from stored layer sizes and flat parameters.
    pub fn from_parts(sizes: Vec<usize>, activation: Activation, params: Vec<f64>) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::InvalidArgument("network needs at least two non-empty layers".into()));
        }
        let expected = param_count(&sizes);
        if params.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: params.len() });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("network parameters must be finite".into()));
        }
        Ok(Self { sizes, activation, params })
    }

    /// Layer widths, input first.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Width of the input, i.e. feature dimension plus one for `t`.
    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn layer_offsets(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.sizes.windows(2).scan(0usize, |offset, w| {
            let start = *offset;
            *offset += w[0] * w[1] + w[1];
            Some((start, w[0], w[1]))
        })
    }

    /// Evaluates the field at one point.
    pub fn forward(&self, features: &[f64], t: f64) -> Result<Vec<f64>> {
        if features.len() + 1 != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim() - 1, found: features.len() });
        }
        let mut x = Vec::with_capacity(self.input_dim());
        x.extend_from_slice(features);
        x.push(t);
        let layers = self.sizes.len() - 1;
        for (l, (offset, n_in, n_out)) in self.layer_offsets().enumerate() {
            let w = &self.params[offset..offset + n_in * n_out];
            let mut z = self.params[offset + n_in * n_out..offset + n_in * n_out + n_out].to_vec();
            affine_accumulate(&x, w, n_out, &mut z);
            if l + 1 < layers {
                for v in z.iter_mut() {
                    *v = self.activation.apply(*v);
                }
            }
            x = z;
        }
        Ok(x)
    }

    /// Mean weighted squared error over the batch and its exact gradient
    /// with respect to every parameter.
    ///
    /// The loss is `1/B sum_b sum_i w_i (u_i(x_b) - y_bi)^2`. A non-finite
    /// loss is reported as `NonFiniteLoss { step: 0 }`; the training loop
    /// fills in the actual step.
    pub fn loss_and_grad(&self, batch: &Batch, weights: &MetricWeights) -> Result<(f64, Vec<f64>)> {
        if batch.is_empty() {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        if batch.input_dim() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), found: batch.input_dim() });
        }
        if batch.output_dim() != self.output_dim() || weights.len() != self.output_dim() {
            return Err(Error::DimensionMismatch { expected: self.output_dim(), found: batch.output_dim() });
        }
        let n = batch.len();
        let layers: Vec<(usize, usize, usize)> = self.layer_offsets().collect();

        // Forward pass, keeping activations and activation slopes per layer.
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(layers.len() + 1);
        let mut slopes: Vec<Vec<f64>> = Vec::with_capacity(layers.len());
        acts.push(batch.inputs.clone());
        for (l, &(offset, n_in, n_out)) in layers.iter().enumerate() {
            let w = &self.params[offset..offset + n_in * n_out];
            let b = &self.params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            let x = &acts[l];
            let mut z = vec![0.0; n * n_out];
            for (row, zrow) in x.chunks_exact(n_in).zip(z.chunks_exact_mut(n_out)) {
                zrow.copy_from_slice(b);
                affine_accumulate(row, w, n_out, zrow);
            }
            if l + 1 < layers.len() {
                let mut slope = vec![0.0; z.len()];
                for (v, s) in z.iter_mut().zip(slope.iter_mut()) {
                    let (a, d) = self.activation.apply_with_slope(*v);
                    *v = a;
                    *s = d;
                }
                slopes.push(slope);
            }
            acts.push(z);
        }

        let out = acts.last().unwrap();
        let n_out = self.output_dim();
        let scale = 1.0 / n as f64;
        let w_metric = weights.as_slice();
        let mut loss = 0.0;
        let mut delta = vec![0.0; n * n_out];
        for b in 0..n {
            let target = batch.target(b);
            for i in 0..n_out {
                let r = out[b * n_out + i] - target[i];
                loss += w_metric[i] * r * r;
                delta[b * n_out + i] = 2.0 * scale * w_metric[i] * r;
            }
        }
        loss *= scale;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { step: 0 });
        }

        // Backward pass. `delta` holds dL/dz for the current layer.
        let mut grad = vec![0.0; self.params.len()];
        for l in (0..layers.len()).rev() {
            let (offset, n_in, n_out) = layers[l];
            let x = &acts[l];
            {
                let (gw, gb) = grad[offset..offset + n_in * n_out + n_out].split_at_mut(n_in * n_out);
                for (row, drow) in x.chunks_exact(n_in).zip(delta.chunks_exact(n_out)) {
                    for (i, &xi) in row.iter().enumerate() {
                        let gw_row = &mut gw[i * n_out..(i + 1) * n_out];
                        for (g, d) in gw_row.iter_mut().zip(drow) {
                            *g += xi * d;
                        }
                    }
                    for (g, d) in gb.iter_mut().zip(drow) {
                        *g += d;
                    }
                }
            }
            if l == 0 {
                break;
            }
            let w = &self.params[offset..offset + n_in * n_out];
            // output-major copy so the propagation below is a contiguous axpy
            let mut w_t = vec![0.0; n_in * n_out];
            for i in 0..n_in {
                for o in 0..n_out {
                    w_t[o * n_in + i] = w[i * n_out + o];
                }
            }
            let slope = &slopes[l - 1];
            let mut next = vec![0.0; n * n_in];
            for ((drow, nrow), srow) in delta.chunks_exact(n_out).zip(next.chunks_exact_mut(n_in)).zip(slope.chunks_exact(n_in)) {
                affine_accumulate(drow, &w_t, n_in, nrow);
                for (v, s) in nrow.iter_mut().zip(srow) {
                    *v *= s;
                }
            }
            delta = next;
        }
        Ok((loss, grad))
    }
}

/// `z += x^T W` for input-major `w` with `n_out` columns.
#[inline]
fn affine_accumulate(x: &[f64], w: &[f64], n_out: usize, z: &mut [f64]) {
    for (xi, w_row) in x.iter().zip(w.chunks_exact(n_out)) {
        for (zo, wo) in z.iter_mut().zip(w_row) {
            *zo += xi * wo;
        }
    }
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}
