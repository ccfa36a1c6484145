//! Lie-Euler integration of time-dependent vector fields.

use alloc::vec::Vec;

use crate::group::{AlgebraVector, LieGroup};
use crate::{Error, Result};

/// Integrates the field `u(g, t)`, given by its components in the
/// left-invariant frame, over `[0, 1]` with `steps` geometric
/// Euler steps `g_{k+1} = g_k * exp(dt * u(g_k, t_k))`.
///
/// Returns `steps + 1` points, starting with `g0`. Every iterate is produced
/// by group operations only, so it lies on the group without projection.
pub fn integrate_field<G, F>(group: &G, mut field: F, g0: &G::Element, steps: usize) -> Result<Vec<G::Element>>
where
    G: LieGroup,
    F: FnMut(&G::Element, f64) -> Result<AlgebraVector>,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("integration needs at least one step".into()));
    }
    let dt = 1.0 / steps as f64;
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(g0.clone());
    let mut g = g0.clone();
    for k in 0..steps {
        let t = k as f64 * dt;
        let u = field(&g, t)?;
        if u.len() != group.dim() {
            return Err(Error::DimensionMismatch { expected: group.dim(), found: u.len() });
        }
        if u.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteField { step: k });
        }
        let step: Vec<f64> = u.iter().map(|c| dt * c).collect();
        g = group.product(&g, &group.exp(&step));
        trajectory.push(g.clone());
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{conditional_field, distance};
    use crate::groups::{Group, Se2, Se2Group};
    use alloc::vec;

    #[test]
    fn zero_field_keeps_start() {
        let g = Se2Group;
        let g0 = Se2::new(0.2, -0.4, 1.0);
        let traj = integrate_field(&g, |_, _| Ok(vec![0.0; 3]), &g0, 10).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.iter().all(|p| *p == g0));
    }

    #[test]
    fn conditional_field_reaches_target() {
        let g = Group::se2();
        let g0 = g.identity();
        let g1 = crate::groups::Element::Se2(Se2::new(1.0, 1.0, core::f64::consts::FRAC_PI_2));
        let traj = integrate_field(&g, |x, t| conditional_field(&g, x, &g1, t), &g0, 1000).unwrap();
        assert!(distance(&g, traj.last().unwrap(), &g1) < 1e-3);
    }

    #[test]
    fn non_finite_field_aborts() {
        let g = Se2Group;
        let err = integrate_field(&g, |_, t| Ok(vec![0.0, if t > 0.35 { f64::NAN } else { 0.0 }, 0.0]), &Se2::IDENTITY, 10)
            .unwrap_err();
        assert_eq!(err, Error::NonFiniteField { step: 4 });
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(integrate_field(&Se2Group, |_, _| Ok(vec![0.0; 3]), &Se2::IDENTITY, 0).is_err());
    }
}
