//! Two-sample discrepancies between batches of group elements, measured in
//! the network feature embedding, and the sampling loop that pushes source
//! samples through a trained field.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::Distribution;
use crate::flow::integrate_field;
use crate::group::LieGroup;
use crate::groups::{Element, Group};
use crate::math;
use crate::mlp::VectorFieldNet;
use crate::{Error, Result};

/// Smallest batch accepted by [`two_sample_metrics`].
pub const MIN_SAMPLES: usize = 50;

/// Mean and standard deviation of one feature coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Marginal {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub n_a: usize,
    pub n_b: usize,
    /// `2 E|X-Y| - E|X-X'| - E|Y-Y'|` (V-statistic).
    pub energy_distance: f64,
    /// Square root of the biased RBF-kernel MMD^2.
    pub mmd: f64,
    pub mmd_sq: f64,
    /// RBF bandwidth (median pairwise distance of the pooled sample).
    pub bandwidth: f64,
    /// Largest group-invariant defect over both batches.
    pub manifold_defect: f64,
    pub marginals_a: Vec<Marginal>,
    pub marginals_b: Vec<Marginal>,
}

/// Outcome of an MMD permutation test.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PermutationTest {
    pub permutations: usize,
    /// Observed MMD (not squared).
    pub observed: f64,
    /// 95th and 99th percentiles of the null MMD distribution.
    pub threshold_95: f64,
    pub threshold_99: f64,
    /// `(1 + #{null >= observed}) / (1 + permutations)`.
    pub p_value: f64,
}

/// Pooled feature matrix with its pairwise distances.
struct Pooled {
    n_a: usize,
    n: usize,
    dist: Vec<f64>,
    bandwidth: f64,
}

impl Pooled {
    fn new(group: &Group, a: &[Element], b: &[Element]) -> Self {
        let dim = group.feature_dim();
        let mut feats = Vec::with_capacity((a.len() + b.len()) * dim);
        for g in a.iter().chain(b) {
            group.features_into(g, &mut feats);
        }
        let n = a.len() + b.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            let fi = &feats[i * dim..(i + 1) * dim];
            for j in (i + 1)..n {
                let fj = &feats[j * dim..(j + 1) * dim];
                let d = math::sqrt(fi.iter().zip(fj).map(|(x, y)| (x - y) * (x - y)).sum());
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let mut upper: Vec<f64> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| dist[i * n + j]).collect();
        let bandwidth = median(&mut upper);
        let bandwidth = if bandwidth > 0.0 { bandwidth } else { 1.0 };
        Self { n_a: a.len(), n, dist, bandwidth }
    }

    fn kernel(&self) -> Vec<f64> {
        let inv = 1.0 / (2.0 * self.bandwidth * self.bandwidth);
        self.dist.iter().map(|d| math::exp(-d * d * inv)).collect()
    }

    /// Biased MMD^2 for the split given by `labels` (`true` = first sample).
    fn mmd_sq(&self, kernel: &[f64], labels: &[bool]) -> f64 {
        let (mut kaa, mut kbb, mut kab) = (0.0, 0.0, 0.0);
        for i in 0..self.n {
            let row = &kernel[i * self.n..(i + 1) * self.n];
            for (j, k) in row.iter().enumerate() {
                match (labels[i], labels[j]) {
                    (true, true) => kaa += k,
                    (false, false) => kbb += k,
                    _ => kab += k,
                }
            }
        }
        let na = self.n_a as f64;
        let nb = (self.n - self.n_a) as f64;
        (kaa / (na * na) + kbb / (nb * nb) - kab / (na * nb)).max(0.0)
    }

    fn energy(&self) -> f64 {
        let (mut daa, mut dbb, mut dab) = (0.0, 0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self.dist[i * self.n + j];
                match (i < self.n_a, j < self.n_a) {
                    (true, true) => daa += d,
                    (false, false) => dbb += d,
                    _ => dab += d,
                }
            }
        }
        let na = self.n_a as f64;
        let nb = (self.n - self.n_a) as f64;
        // dab counts each cross pair twice
        (dab / (na * nb) - daa / (na * na) - dbb / (nb * nb)).max(0.0)
    }

    fn labels(&self) -> Vec<bool> {
        (0..self.n).map(|i| i < self.n_a).collect()
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_unstable_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn marginals(group: &Group, xs: &[Element]) -> Vec<Marginal> {
    let dim = group.feature_dim();
    let mut sum = vec![0.0; dim];
    let mut sq = vec![0.0; dim];
    let mut f = Vec::with_capacity(dim);
    for g in xs {
        f.clear();
        group.features_into(g, &mut f);
        for k in 0..dim {
            sum[k] += f[k];
            sq[k] += f[k] * f[k];
        }
    }
    let n = xs.len() as f64;
    sum.iter()
        .zip(&sq)
        .map(|(s, q)| {
            let mean = s / n;
            Marginal { mean, std: math::sqrt((q / n - mean * mean).max(0.0)) }
        })
        .collect()
}

fn check_batches(group: &Group, a: &[Element], b: &[Element]) -> Result<()> {
    if a.len() < MIN_SAMPLES || b.len() < MIN_SAMPLES {
        return Err(Error::InvalidArgument(alloc::format!(
            "two-sample metrics need at least {MIN_SAMPLES} samples per batch, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    for g in a.iter().chain(b) {
        group.check(g)?;
    }
    Ok(())
}

/// Energy distance and RBF-MMD between two batches of the same group.
pub fn two_sample_metrics(group: &Group, a: &[Element], b: &[Element]) -> Result<EvalReport> {
    check_batches(group, a, b)?;
    let pooled = Pooled::new(group, a, b);
    let kernel = pooled.kernel();
    let mmd_sq = pooled.mmd_sq(&kernel, &pooled.labels());
    let manifold_defect = a.iter().chain(b).map(|g| group.defect(g)).fold(0.0, f64::max);
    Ok(EvalReport {
        n_a: a.len(),
        n_b: b.len(),
        energy_distance: pooled.energy(),
        mmd: math::sqrt(mmd_sq),
        mmd_sq,
        bandwidth: pooled.bandwidth,
        manifold_defect,
        marginals_a: marginals(group, a),
        marginals_b: marginals(group, b),
    })
}

/// Permutation test of `MMD(a, b)` against random relabelings of the pooled
/// sample. The bandwidth is fixed from the pooled sample, which every
/// relabeling shares.
pub fn mmd_permutation_test<R: Rng + ?Sized>(
    group: &Group,
    a: &[Element],
    b: &[Element],
    permutations: usize,
    rng: &mut R,
) -> Result<PermutationTest> {
    check_batches(group, a, b)?;
    if permutations == 0 {
        return Err(Error::InvalidArgument("need at least one permutation".into()));
    }
    let pooled = Pooled::new(group, a, b);
    let kernel = pooled.kernel();
    let mut labels = pooled.labels();
    let observed = math::sqrt(pooled.mmd_sq(&kernel, &labels));
    let mut null = Vec::with_capacity(permutations);
    for _ in 0..permutations {
        labels.shuffle(rng);
        null.push(math::sqrt(pooled.mmd_sq(&kernel, &labels)));
    }
    let exceed = null.iter().filter(|v| **v >= observed).count();
    null.sort_unstable_by(f64::total_cmp);
    Ok(PermutationTest {
        permutations,
        observed,
        threshold_95: quantile(&null, 0.95),
        threshold_99: quantile(&null, 0.99),
        p_value: (1 + exceed) as f64 / (1 + permutations) as f64,
    })
}

/// Empirical `q`-quantile of sorted values (lower order statistic).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = libm::ceil(q * sorted.len() as f64) as usize;
    sorted[idx.clamp(1, sorted.len()) - 1]
}

/// Integrates every source sample through the field defined by `net`.
pub fn flow_samples(net: &VectorFieldNet, group: &Group, sources: &[Element], steps: usize) -> Result<Vec<Vec<Element>>> {
    if net.output_dim() != group.dim() || net.input_dim() != group.feature_dim() + 1 {
        return Err(Error::DimensionMismatch { expected: group.dim(), found: net.output_dim() });
    }
    let mut features = Vec::with_capacity(group.feature_dim());
    sources
        .iter()
        .map(|g0| {
            integrate_field(
                group,
                |g, t| {
                    features.clear();
                    group.features_into(g, &mut features);
                    net.forward(&features, t)
                },
                g0,
                steps,
            )
        })
        .collect()
}

/// Result of [`flow_and_eval`].
#[derive(Debug, Clone)]
pub struct FlowEval {
    pub report: EvalReport,
    /// `n` trajectories of `steps + 1` points each.
    pub trajectories: Vec<Vec<Element>>,
    /// The fresh target batch the endpoints were compared against.
    pub targets: Vec<Element>,
}

impl FlowEval {
    pub fn endpoints(&self) -> Vec<Element> {
        self.trajectories.iter().map(|t| t.last().unwrap().clone()).collect()
    }

    /// Largest defect over every trajectory point.
    pub fn trajectory_defect(&self, group: &Group) -> f64 {
        self.trajectories.iter().flatten().map(|g| group.defect(g)).fold(0.0, f64::max)
    }
}

/// Draws `n` sources, flows them with `steps` Lie-Euler steps, and compares
/// the endpoints with `n` fresh target draws.
pub fn flow_and_eval<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    net: &VectorFieldNet,
    source: &Distribution,
    target: &Distribution,
    steps: usize,
    n: usize,
    source_rng: &mut R1,
    target_rng: &mut R2,
) -> Result<FlowEval> {
    let group = source.group();
    if target.group() != group {
        return Err(Error::GroupMismatch { expected: group.name(), found: target.group().name() });
    }
    let sources = source.sample(n, source_rng)?;
    let trajectories = flow_samples(net, group, &sources, steps)?;
    let targets = target.sample(n, target_rng)?;
    let endpoints: Vec<Element> = trajectories.iter().map(|t| t.last().unwrap().clone()).collect();
    let mut report = two_sample_metrics(group, &endpoints, &targets)?;
    let traj_defect = trajectories.iter().flatten().map(|g| group.defect(g)).fold(0.0, f64::max);
    report.manifold_defect = report.manifold_defect.max(traj_defect);
    Ok(FlowEval { report, trajectories, targets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DistributionParams;
    use crate::rng;

    fn draws(group: &Group, id: &str, n: usize, seed: u64) -> Vec<Element> {
        Distribution::parse(group, id, DistributionParams::default())
            .unwrap()
            .sample(n, &mut rng::stream(seed, "eval-test"))
            .unwrap()
    }

    #[test]
    fn identical_batches_have_zero_discrepancy() {
        let g = Group::se2();
        let a = draws(&g, "circle", 80, 1);
        let r = two_sample_metrics(&g, &a, &a).unwrap();
        assert!(r.mmd_sq.abs() < 1e-12 && r.mmd < 1e-6);
        assert!(r.energy_distance.abs() < 1e-12);
    }

    #[test]
    fn metrics_are_symmetric() {
        let g = Group::se2();
        let a = draws(&g, "hline", 60, 1);
        let b = draws(&g, "circle", 70, 2);
        let ab = two_sample_metrics(&g, &a, &b).unwrap();
        let ba = two_sample_metrics(&g, &b, &a).unwrap();
        assert!((ab.mmd - ba.mmd).abs() < 1e-12);
        assert!((ab.energy_distance - ba.energy_distance).abs() < 1e-12);
        assert_eq!(ab.bandwidth, ba.bandwidth);
    }

    #[test]
    fn small_batches_rejected() {
        let g = Group::se2();
        let a = draws(&g, "hline", 49, 1);
        let b = draws(&g, "hline", 60, 2);
        assert!(two_sample_metrics(&g, &a, &b).is_err());
        let wrong = draws(&Group::so3(), "hline", 60, 2);
        assert!(two_sample_metrics(&g, &b, &wrong).is_err());
    }

    #[test]
    fn distinct_lines_are_detected() {
        let g = Group::se2();
        let a = draws(&g, "hline", 100, 1);
        let b = draws(&g, "vline", 100, 2);
        let test = mmd_permutation_test(&g, &a, &b, 200, &mut rng::stream(0, rng::PERMUTATION)).unwrap();
        assert!(test.observed > test.threshold_99);
        assert!(test.p_value < 0.01);
    }
}
