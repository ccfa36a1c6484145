//! Conditional flow matching on a group.
//!
//! Each training pair is `T ~ U[0, 1 - eps)`, `G0 ~ source`, `G1 ~ target`
//! drawn independently, the interpolant `G_T = G0 exp(T log(G0^-1 G1))` and
//! the regression target `log(G0^-1 G1)`. Along the interpolant the
//! conditional field `log(G_T^-1 G1) / (1 - T)` equals that constant vector,
//! which avoids dividing by `1 - T`.

use alloc::vec::Vec;

use rand::Rng;

use crate::adam::{Adam, AdamConfig};
use crate::data::Distribution;
use crate::group::{curve_velocity, exp_curve_with, AlgebraVector, LieGroup, MetricWeights};
use crate::groups::{Element, Group};
use crate::mlp::{Batch, VectorFieldNet, DEFAULT_HIDDEN};
use crate::{math, rng};
use crate::{Error, Result};

/// Learning-rate schedule over a run of `steps` updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum LrSchedule {
    Constant,
    /// `lr * (1 + cos(pi * step / steps)) / 2`, annealing to zero so the
    /// final parameters are not a noisy snapshot of the last batches.
    Cosine,
}

impl LrSchedule {
    pub fn name(&self) -> &'static str {
        match self {
            LrSchedule::Constant => "constant",
            LrSchedule::Cosine => "cosine",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "constant" => Some(LrSchedule::Constant),
            "cosine" => Some(LrSchedule::Cosine),
            _ => None,
        }
    }

    /// Learning rate for the 0-based `step` of `steps`.
    pub fn lr(&self, base: f64, step: usize, steps: usize) -> f64 {
        match self {
            LrSchedule::Constant => base,
            LrSchedule::Cosine => 0.5 * base * (1.0 + math::cos(math::PI * step as f64 / steps as f64)),
        }
    }
}

/// Hyperparameters of a training run. Distribution choice is passed
/// separately as resolved [`Distribution`]s.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub steps: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Times are drawn from `[0, 1 - epsilon)`.
    pub epsilon: f64,
    pub adam: AdamConfig,
    pub schedule: LrSchedule,
    pub hidden: Vec<usize>,
    /// `None` means unit weights.
    pub weights: Option<MetricWeights>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            steps: 10_000,
            batch_size: 256,
            seed: 0,
            epsilon: 1e-3,
            adam: AdamConfig::default(),
            schedule: LrSchedule::Cosine,
            hidden: DEFAULT_HIDDEN.to_vec(),
            weights: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if self.steps == 0 {
            return bad("steps must be >= 1");
        }
        if self.batch_size == 0 {
            return bad("batch size must be >= 1");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if !(self.adam.lr.is_finite() && self.adam.lr > 0.0) {
            return bad("learning rate must be positive");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("hidden layer widths must be non-empty and positive");
        }
        Ok(())
    }
}

/// One conditional flow matching draw.
#[derive(Debug, Clone, PartialEq)]
pub struct CfmDraw {
    pub t: f64,
    pub g0: Element,
    pub g1: Element,
    /// Interpolant `g0 exp(t log(g0^-1 g1))`.
    pub gt: Element,
    /// Regression target `log(g0^-1 g1)`.
    pub target: AlgebraVector,
}

/// Draws `n` independent `(T, G0, G1)` triples with their interpolant and
/// regression target.
pub fn cfm_draw<R: Rng + ?Sized>(
    group: &Group,
    source: &Distribution,
    target: &Distribution,
    n: usize,
    epsilon: f64,
    rng: &mut R,
) -> Vec<CfmDraw> {
    (0..n)
        .map(|_| {
            let t = rng.random_range(0.0..1.0 - epsilon);
            let g0 = source.sample_one(rng);
            let g1 = target.sample_one(rng);
            let velocity = curve_velocity(group, &g0, &g1);
            let gt = exp_curve_with(group, &g0, &velocity, t);
            CfmDraw { t, g0, g1, gt, target: velocity }
        })
        .collect()
}

/// [`cfm_draw`] packed into a network training batch.
pub fn cfm_sample<R: Rng + ?Sized>(
    group: &Group,
    source: &Distribution,
    target: &Distribution,
    n: usize,
    epsilon: f64,
    rng: &mut R,
) -> Batch {
    let mut batch = Batch::new(group.feature_dim() + 1, group.dim());
    let mut features = Vec::with_capacity(group.feature_dim());
    for draw in cfm_draw(group, source, target, n, epsilon, rng) {
        features.clear();
        group.features_into(&draw.gt, &mut features);
        batch.push(&features, draw.t, &draw.target);
    }
    batch
}

/// Result of [`train`].
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub net: VectorFieldNet,
    /// Loss of every step, evaluated before that step's update.
    pub losses: Vec<f64>,
}

/// Runs `config.steps` iterations of sample, loss-and-gradient, Adam update.
pub fn train(group: &Group, source: &Distribution, target: &Distribution, config: &TrainConfig) -> Result<TrainOutcome> {
    train_with_progress(group, source, target, config, |_, _| {})
}

/// [`train`] with a callback receiving `(step, loss)` after every step.
pub fn train_with_progress<F: FnMut(usize, f64)>(
    group: &Group,
    source: &Distribution,
    target: &Distribution,
    config: &TrainConfig,
    mut progress: F,
) -> Result<TrainOutcome> {
    config.validate()?;
    if source.group() != group || target.group() != group {
        return Err(Error::GroupMismatch { expected: group.name(), found: source.group().name() });
    }
    let weights = match &config.weights {
        Some(w) if w.len() != group.dim() => {
            return Err(Error::DimensionMismatch { expected: group.dim(), found: w.len() });
        }
        Some(w) => w.clone(),
        None => MetricWeights::unit(group.dim()),
    };
    let mut init_rng = rng::stream(config.seed, rng::INIT);
    let mut net = VectorFieldNet::new(group.feature_dim(), &config.hidden, group.dim(), true, &mut init_rng);
    let mut adam = Adam::new(config.adam, net.params().len());
    let mut sample_rng = rng::stream(config.seed, rng::TRAIN);
    let mut losses = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        let batch = cfm_sample(group, source, target, config.batch_size, config.epsilon, &mut sample_rng);
        let (loss, grad) = net.loss_and_grad(&batch, &weights).map_err(|e| match e {
            Error::NonFiniteLoss { .. } => Error::NonFiniteLoss { step },
            other => other,
        })?;
        adam.set_lr(config.schedule.lr(config.adam.lr, step, config.steps));
        adam.step(net.params_mut(), &grad);
        if net.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFiniteLoss { step });
        }
        losses.push(loss);
        progress(step, loss);
    }
    Ok(TrainOutcome { net, losses })
}
