//! Fast property suite run by `lieflow selfcheck`.

use std::time::Instant;

use lieflow_core::flow::integrate_field;
use lieflow_core::group::conditional_field;
use lieflow_core::math;
use lieflow_core::mlp::{Batch, VectorFieldNet};
use lieflow_core::{rng, Element, Group, LieGroup, MetricWeights, Se2};
use rand::Rng;

pub const GROUPS: &[&str] = &["r1", "r2", "se2", "so3", "se2xr2"];
pub const ROUNDTRIP_SAMPLES: usize = 10_000;
pub const ROUNDTRIP_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-8;
pub const INTEGRATION_TOL: f64 = 1e-3;
pub const GRADIENT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// `sinc` off by one part in 10^4; stands in for a broken closed form.
fn faulty_sinc(x: f64) -> f64 {
    math::sinc(x) * (1.0 + 1e-4)
}

/// The group's exponential, or a corrupted one on SE(2) when `fault` is set.
fn exp_fn(group: &Group, fault: bool) -> impl Fn(&[f64]) -> Element + '_ {
    move |c: &[f64]| match group {
        Group::Se2(_) if fault => Element::Se2(Se2::exp_with([c[0], c[1], c[2]], faulty_sinc)),
        _ => group.exp(c),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(group: &Group, g: &Element, h: &Element) -> f64 {
    norm(&group.log(&group.product(&group.inverse(g), h)))
}

fn check(name: String, worst: f64, tol: f64, what: &str) -> Check {
    Check { passed: worst < tol, detail: format!("max {what} {worst:.2e} (tol {tol:.0e})"), name }
}

fn roundtrip(group: &Group, fault: bool, seed: u64) -> Check {
    let exp = exp_fn(group, fault);
    let mut r = rng::stream(seed, "selfcheck-roundtrip");
    let worst = (0..ROUNDTRIP_SAMPLES)
        .map(|_| {
            let g = group.random(&mut r);
            dist(group, &exp(&group.log(&g)), &g)
        })
        .fold(0.0, f64::max);
    check(format!("exp/log roundtrip {}", group.name()), worst, ROUNDTRIP_TOL, "error")
}

/// `log(gamma(t)^-1 g1) = (1 - t) log(g0^-1 g1)` along exponential curves.
fn curve_identity(group: &Group, fault: bool, seed: u64) -> Check {
    let exp = exp_fn(group, fault);
    let mut r = rng::stream(seed, "selfcheck-identity");
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (g0, g1) = (group.random(&mut r), group.random(&mut r));
        let a = group.log(&group.product(&group.inverse(&g0), &g1));
        for k in 0..10 {
            let t = k as f64 / 10.0;
            let ta: Vec<f64> = a.iter().map(|x| t * x).collect();
            let gt = group.product(&g0, &exp(&ta));
            let lhs = group.log(&group.product(&group.inverse(&gt), &g1));
            let diff: Vec<f64> = lhs.iter().zip(&a).map(|(l, a)| l - (1.0 - t) * a).collect();
            worst = worst.max(norm(&diff));
        }
    }
    check(format!("curve identity {}", group.name()), worst, IDENTITY_TOL, "error")
}

fn integration(group: &Group, seed: u64) -> Check {
    let mut r = rng::stream(seed, "selfcheck-integration");
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (g0, g1) = (group.random(&mut r), group.random(&mut r));
        let path = integrate_field(group, |g, t| conditional_field(group, g, &g1, t), &g0, 1000);
        worst = match path {
            Ok(p) => worst.max(dist(group, p.last().unwrap(), &g1)),
            Err(_) => f64::INFINITY,
        };
    }
    check(format!("conditional field reaches g1 {}", group.name()), worst, INTEGRATION_TOL, "distance")
}

/// Backprop gradient against central differences of the loss.
fn gradient(group: &Group, seed: u64) -> Check {
    let mut r = rng::stream(seed, "selfcheck-gradient");
    let net = VectorFieldNet::new(group.feature_dim(), &[10, 10], group.dim(), false, &mut r);
    let mut batch = Batch::new(group.feature_dim() + 1, group.dim());
    for _ in 0..6 {
        let g = group.random(&mut r);
        let y: Vec<f64> = (0..group.dim()).map(|_| r.random_range(-2.0..2.0)).collect();
        batch.push(&group.features(&g), r.random_range(0.0..1.0), &y);
    }
    let w = MetricWeights::new((0..group.dim()).map(|_| r.random_range(0.5..2.0)).collect()).expect("positive weights");
    let loss = |n: &VectorFieldNet| n.loss_and_grad(&batch, &w).map(|(l, _)| l);
    let worst = match net.loss_and_grad(&batch, &w) {
        Ok((_, grad)) => {
            let (h, mut probe) = (1e-5, net.clone());
            let mut worst: f64 = 0.0;
            for (k, g) in grad.iter().enumerate() {
                let orig = probe.params()[k];
                probe.params_mut()[k] = orig + h;
                let plus = loss(&probe).unwrap_or(f64::NAN);
                probe.params_mut()[k] = orig - h;
                let minus = loss(&probe).unwrap_or(f64::NAN);
                probe.params_mut()[k] = orig;
                let fd = (plus - minus) / (2.0 * h);
                let err = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-6);
                worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
            }
            worst
        }
        Err(_) => f64::INFINITY,
    };
    check(format!("gradient vs finite differences {}", group.name()), worst, GRADIENT_TOL, "relative error")
}

/// Runs every check; `fault` corrupts the SE(2) exponential.
pub fn run(fault: bool) -> Vec<Check> {
    let groups: Vec<Group> = GROUPS.iter().map(|id| Group::from_id(id).expect("shipped group")).collect();
    let mut checks = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        checks.push(roundtrip(g, fault, i as u64));
    }
    for (i, g) in groups.iter().enumerate() {
        checks.push(curve_identity(g, fault, i as u64));
    }
    for (i, g) in groups.iter().enumerate() {
        checks.push(integration(g, i as u64));
    }
    for (i, g) in groups.iter().enumerate() {
        checks.push(gradient(g, i as u64));
    }
    checks
}

/// Pass/fail table, one row per check.
pub fn render(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{mark}  {:<width$}  {}\n", c.name, c.detail));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} checks, {failed} failed\n", checks.len()));
    out
}

/// Runs the suite, prints the table and returns the number of failures.
pub fn run_and_print(fault: bool) -> usize {
    let start = Instant::now();
    let checks = run(fault);
    print!("{}", render(&checks));
    println!("elapsed {:.2}s", start.elapsed().as_secs_f64());
    checks.iter().filter(|c| !c.passed).count()
}
