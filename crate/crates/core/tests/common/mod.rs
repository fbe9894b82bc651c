#![allow(dead_code)]

use nalgebra::{Matrix6, Vector3, Vector6};
use pkm::parasitic::{solve_loop_closure, CompatiblePose};
use pkm::{MechanismParams, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Compatible pose with tilts in ±40° and height in `[z0 - 100, z0 + 50]`.
pub fn random_pose(rng: &mut ChaCha8Rng, params: &MechanismParams) -> CompatiblePose {
    let lim = 40f64.to_radians();
    loop {
        let psi = rng.gen_range(-lim..=lim);
        let theta = rng.gen_range(-lim..=lim);
        let z = params.home_height() + rng.gen_range(-100.0..=50.0);
        if let Ok(cp) = solve_loop_closure(params, psi, theta, z) {
            return cp;
        }
    }
}

pub fn random_twist(rng: &mut ChaCha8Rng) -> Vector6<f64> {
    Vector6::from_fn(|k, _| {
        let v: f64 = rng.gen_range(-1.0..1.0);
        if k < 3 {
            v
        } else {
            v / 250.0
        }
    })
}

/// Stiffness assembled by hand: `sum_j k_j w_j w_j^T` over the six limb
/// wrenches, rebuilt from the limb geometry. Valid for uniform coefficients,
/// where the spherical joint is isotropic.
pub fn wrench_sum_oracle(params: &MechanismParams, cp: &CompatiblePose) -> Matrix6<f64> {
    let k = params.stiffness.k_carriage;
    let k_active = 1.0 / (3.0 / k);
    let k_constraint = 1.0 / (2.0 / k);
    let limbs = pkm::kinematics::inverse_kinematics(params, &cp.pose).unwrap();
    let mut sum = Matrix6::zeros();
    for (i, limb) in limbs.iter().enumerate() {
        let a = cp.pose.r * Vector3::new(params.xi(i).cos(), params.xi(i).sin(), 0.0) * params.r_platform;
        let strut = cp.pose.p + a - limb.anchor;
        let drive = match params.variant {
            Variant::Z3Prs => {
                let l1 = strut - Vector3::z() * limb.actuated_length;
                (l1, l1.z)
            }
            Variant::A3Rps => (strut, strut.norm()),
        };
        let (l1, div) = drive;
        let mut w = Vector6::zeros();
        w.fixed_rows_mut::<3>(0).copy_from(&(l1 / div));
        w.fixed_rows_mut::<3>(3).copy_from(&(a.cross(&l1) / div));
        sum += k_active * w * w.transpose();
        let s = Vector3::new(-params.xi(i).sin(), params.xi(i).cos(), 0.0);
        let mut c = Vector6::zeros();
        c.fixed_rows_mut::<3>(0).copy_from(&s);
        c.fixed_rows_mut::<3>(3).copy_from(&a.cross(&s));
        sum += k_constraint * c * c.transpose();
    }
    sum
}
