use lieflow_core::mlp::{Activation, Batch, VectorFieldNet, DEFAULT_HIDDEN};
use lieflow_core::{rng, MetricWeights};
use rand::Rng;

/// Forward pass written from the documented parameter layout, independent of
/// the library's batched implementation.
fn reference_forward(net: &VectorFieldNet, input: &[f64]) -> Vec<f64> {
    let sizes = net.sizes();
    let p = net.params();
    let mut x = input.to_vec();
    let mut offset = 0;
    for l in 0..sizes.len() - 1 {
        let (n_in, n_out) = (sizes[l], sizes[l + 1]);
        let mut z = vec![0.0; n_out];
        for o in 0..n_out {
            let mut s = p[offset + n_in * n_out + o];
            for i in 0..n_in {
                s += p[offset + i * n_out + o] * x[i];
            }
            z[o] = if l + 2 < sizes.len() { s / (1.0 + (-s).exp()) } else { s };
        }
        offset += n_in * n_out + n_out;
        x = z;
    }
    x
}

fn reference_loss(net: &VectorFieldNet, batch: &Batch, w: &MetricWeights) -> f64 {
    let mut total = 0.0;
    for b in 0..batch.len() {
        let out = reference_forward(net, batch.input(b));
        total += out.iter().zip(batch.target(b)).zip(w.as_slice()).map(|((u, y), w)| w * (u - y) * (u - y)).sum::<f64>();
    }
    total / batch.len() as f64
}

fn random_batch<R: Rng>(r: &mut R, features: usize, out: usize, n: usize) -> Batch {
    let mut batch = Batch::new(features + 1, out);
    for _ in 0..n {
        let f: Vec<f64> = (0..features).map(|_| r.random_range(-1.5..1.5)).collect();
        let y: Vec<f64> = (0..out).map(|_| r.random_range(-2.0..2.0)).collect();
        batch.push(&f, r.random_range(0.0..1.0), &y);
    }
    batch
}

#[test]
fn forward_matches_reference() {
    let mut r = rng::stream(31, "grad");
    for _ in 0..5 {
        let net = VectorFieldNet::new(4, &DEFAULT_HIDDEN, 3, false, &mut r);
        for _ in 0..20 {
            let f: Vec<f64> = (0..4).map(|_| r.random_range(-2.0..2.0)).collect();
            let t = r.random_range(0.0..1.0);
            let mut input = f.clone();
            input.push(t);
            let got = net.forward(&f, t).unwrap();
            let want = reference_forward(&net, &input);
            for (a, b) in got.iter().zip(&want) {
                assert!(a.is_finite());
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }
}

#[test]
fn loss_matches_reference() {
    let mut r = rng::stream(32, "grad");
    let net = VectorFieldNet::new(9, &[16, 16], 3, false, &mut r);
    let batch = random_batch(&mut r, 9, 3, 12);
    let w = MetricWeights::new(vec![1.0, 0.5, 2.0]).unwrap();
    let (loss, _) = net.loss_and_grad(&batch, &w).unwrap();
    let want = reference_loss(&net, &batch, &w);
    assert!((loss - want).abs() < 1e-12 * want);
}

/// Max relative error of the analytic gradient against central differences
/// with step 1e-5. Relative error uses `max(|a|, |fd|, 1e-6)` as the scale so
/// that exactly-zero gradients are compared absolutely.
pub fn max_relative_error(net: &VectorFieldNet, batch: &Batch, w: &MetricWeights) -> f64 {
    let (_, grad) = net.loss_and_grad(batch, w).unwrap();
    let eps = 1e-5;
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for (k, &g) in grad.iter().enumerate() {
        let orig = probe.params()[k];
        probe.params_mut()[k] = orig + eps;
        let plus = reference_loss(&probe, batch, w);
        probe.params_mut()[k] = orig - eps;
        let minus = reference_loss(&probe, batch, w);
        probe.params_mut()[k] = orig;
        let fd = (plus - minus) / (2.0 * eps);
        let scale = g.abs().max(fd.abs()).max(1e-6);
        worst = worst.max((g - fd).abs() / scale);
    }
    worst
}

#[test]
fn gradient_matches_central_differences() {
    let mut r = rng::stream(33, "grad");
    for trial in 0..10 {
        let (features, out) = [(4, 3), (9, 3), (1, 1), (6, 5)][trial % 4];
        let net = VectorFieldNet::new(features, &[12, 12, 12, 12], out, false, &mut r);
        let batch = random_batch(&mut r, features, out, 6);
        let w = MetricWeights::new((0..out).map(|_| r.random_range(0.5..2.0)).collect()).unwrap();
        let err = max_relative_error(&net, &batch, &w);
        assert!(err < 1e-4, "trial {trial}: {err:e}");
    }
}

#[test]
fn activation_is_recorded() {
    let net = VectorFieldNet::new(2, &[3], 1, true, &mut rng::stream(0, "grad"));
    assert_eq!(net.activation(), Activation::Silu);
    assert_eq!(net.activation().name(), "silu");
}
