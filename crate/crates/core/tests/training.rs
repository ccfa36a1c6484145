use lieflow_core::data::{Distribution, DistributionParams};
use lieflow_core::eval::{flow_and_eval, flow_samples};
use lieflow_core::group::distance;
use lieflow_core::training::{train, TrainConfig};
use lieflow_core::{rng, Element, Group, LieGroup};

fn dist(g: &Group, id: &str) -> Distribution {
    Distribution::parse(g, id, DistributionParams::default()).unwrap()
}

const TREND_SLACK: f64 = 1e-9;

fn smoothed(losses: &[f64], window: usize) -> Vec<f64> {
    losses.windows(window).map(|w| w.iter().sum::<f64>() / window as f64).collect()
}

#[test]
fn unit_segment_field_is_learned_on_the_segment() {
    // every interpolant point of delta_0 -> delta_1 sits at x = t
    let g = Group::translation(1).unwrap();
    let cfg = TrainConfig { steps: 3000, batch_size: 128, seed: 3, ..Default::default() };
    let out = train(&g, &dist(&g, "delta:0"), &dist(&g, "delta:1"), &cfg).unwrap();
    let mut worst: f64 = 0.0;
    for j in 0..=90 {
        let t = j as f64 * 0.01;
        let u = out.net.forward(&[t], t).unwrap()[0];
        worst = worst.max((u - 1.0).abs());
    }
    assert!(worst < 0.05, "max |u - 1| = {worst}");
}

#[test]
fn point_mass_loss_stays_flat() {
    let g = Group::se2();
    let d = dist(&g, "delta:0.2,0.4,-1.0");
    let cfg = TrainConfig { steps: 200, batch_size: 64, seed: 1, ..Default::default() };
    let out = train(&g, &d, &d, &cfg).unwrap();
    assert!(out.losses[150..].iter().all(|l| *l < 1e-6));
    // increases below the roundoff floor of the zero-target loss are ignored
    let s = smoothed(&out.losses, 50);
    assert!(s.windows(2).all(|w| w[1] <= w[0] + TREND_SLACK));

    // flowing the trained field leaves the point where it is
    let ev = flow_and_eval(&out.net, &d, &d, 100, 60, &mut rng::stream(1, rng::SOURCE), &mut rng::stream(1, rng::TARGET)).unwrap();
    let target = d.sample_one(&mut rng::stream(0, "x"));
    for e in ev.endpoints() {
        assert!(distance(&g, &e, &target) < 1e-2);
    }
}

#[test]
fn training_is_deterministic() {
    let g = Group::se2();
    let cfg = TrainConfig { steps: 30, batch_size: 32, seed: 9, ..Default::default() };
    let (s, t) = (dist(&g, "hline"), dist(&g, "vline"));
    let a = train(&g, &s, &t, &cfg).unwrap();
    let b = train(&g, &s, &t, &cfg).unwrap();
    assert_eq!(a.losses, b.losses);
    assert_eq!(a.net, b.net);
    let c = train(&g, &s, &t, &TrainConfig { seed: 10, ..cfg }).unwrap();
    assert_ne!(a.losses, c.losses);
}

#[test]
fn untrained_net_leaves_samples_in_place() {
    let g = Group::se2();
    let net = lieflow_core::mlp::VectorFieldNet::new(g.feature_dim(), &[64; 4], g.dim(), true, &mut rng::stream(0, rng::INIT));
    let (s, t) = (dist(&g, "hline"), dist(&g, "vline"));
    let sources = s.sample(60, &mut rng::stream(2, "src")).unwrap();
    let traj = flow_samples(&net, &g, &sources, 5).unwrap();
    for (tr, g0) in traj.iter().zip(&sources) {
        assert_eq!(tr.len(), 6);
        assert!(tr.iter().all(|p| p == g0));
    }
    let ev = flow_and_eval(&net, &s, &t, 5, 100, &mut rng::stream(2, rng::SOURCE), &mut rng::stream(2, rng::TARGET)).unwrap();
    let test = lieflow_core::eval::mmd_permutation_test(&g, &ev.endpoints(), &ev.targets, 200, &mut rng::stream(2, rng::PERMUTATION)).unwrap();
    assert!(test.observed > test.threshold_99);
}

#[test]
fn so3_flow_stays_on_group() {
    let g = Group::so3();
    let (s, t) = (dist(&g, "vline"), dist(&g, "circle"));
    let cfg = TrainConfig { steps: 100, batch_size: 64, seed: 5, ..Default::default() };
    let out = train(&g, &s, &t, &cfg).unwrap();
    let ev = flow_and_eval(&out.net, &s, &t, 200, 60, &mut rng::stream(5, rng::SOURCE), &mut rng::stream(5, rng::TARGET)).unwrap();
    for p in ev.trajectories.iter().flatten() {
        let Element::So3(r) = p else { panic!("not a rotation") };
        assert!(r.orthogonality_defect() < 1e-9);
    }
}
