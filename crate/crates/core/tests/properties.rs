//! Property tests over randomly drawn parameter sets.

use gerstner::analysis::{self, OracleOutcome};
use gerstner::fields;
use gerstner::kinematics::{self, ParticleLabel};
use gerstner::params::{
    current_upper_bound, resolve_classical, resolve_geophysical_from_current,
    resolve_geophysical_from_m, validate, Branch, ParamSpec, PhysicalConstants, Sign,
};
use gerstner::WaveParameters;
use proptest::prelude::*;

fn classical() -> impl Strategy<Value = WaveParameters> {
    (0.2..5.0_f64, any::<bool>(), -10.0..10.0_f64).prop_map(|(k, plus, current)| {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        resolve_classical(PhysicalConstants::classical(), k, sign, current).unwrap()
    })
}

/// Geophysical sets with rotation strong enough to keep `c` moderate.
fn geophysical() -> impl Strategy<Value = WaveParameters> {
    (0.2..2.0_f64, 0.2..3.0_f64, -1.0..1.0_f64).prop_map(|(omega, k, unit)| {
        let constants = PhysicalConstants::default().with_omega(omega);
        let scale = (constants.g / k).sqrt();
        resolve_geophysical_from_m(constants, k, 1.5 * scale * unit).unwrap()
    })
}

fn any_params() -> impl Strategy<Value = WaveParameters> {
    prop_oneof![classical(), geophysical()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn constructors_validate(p in any_params()) {
        prop_assert!(validate(&p).is_empty(), "{:?}", validate(&p));
    }

    #[test]
    fn speed_never_exceeds_stagnation_speed(
        omega in 1e-5..2.0_f64,
        k in 0.1..5.0_f64,
        m in -20.0..20.0_f64,
    ) {
        let constants = PhysicalConstants::default().with_omega(omega);
        let p = resolve_geophysical_from_m(constants, k, m).unwrap();
        let bound = constants.g / (2.0 * omega);
        prop_assert!(p.c <= bound);
        prop_assert_eq!(p.c == bound, m == 0.0);
    }

    #[test]
    fn current_round_trips(
        omega in 0.05..2.0_f64,
        k in 0.1..5.0_f64,
        fraction in -5.0..0.999_f64,
        upper in any::<bool>(),
    ) {
        let constants = PhysicalConstants::default().with_omega(omega);
        let bound = current_upper_bound(&constants, k);
        let current = fraction * bound;
        let branch = if upper { Branch::Upper } else { Branch::Lower };
        let p = resolve_geophysical_from_current(constants, k, current, branch).unwrap();
        prop_assert!((p.current - current).abs() <= 1e-12 * current.abs().max(1.0));
        prop_assert!(validate(&p).is_empty());
    }

    #[test]
    fn jacobian_determinant(p in any_params(), t in -10.0..10.0_f64, a in -10.0..10.0_f64, b in -6.0..0.0_f64) {
        let j = kinematics::jacobian(&p, t, ParticleLabel::new(a, b)).unwrap();
        let exact = -(2.0 * p.k * b).exp_m1();
        prop_assert!((j.det - exact).abs() <= 4.0 * f64::EPSILON * (1.0 + exact.abs()));
        let direct = j.xa * j.zb - j.xb * j.za;
        prop_assert!((direct - exact).abs() <= 1e-13 * (1.0 + (2.0 * p.k * b).exp()));
    }

    #[test]
    fn horizontal_periodicity(p in any_params(), t in 0.0..5.0_f64, a in -5.0..5.0_f64, b in -4.0..0.0_f64) {
        let lambda = p.wavelength();
        let (x0, z0) = kinematics::position(&p, t, ParticleLabel::new(a, b)).unwrap();
        let (x1, z1) = kinematics::position(&p, t, ParticleLabel::new(a + lambda, b)).unwrap();
        prop_assert!((x1 - x0 - lambda).abs() <= 1e-12 * (1.0 + x0.abs()));
        prop_assert!((z1 - z0).abs() <= 1e-12);
    }

    #[test]
    fn traveling_wave_shift(p in any_params(), t in 0.0..5.0_f64, a in -5.0..5.0_f64, b in -4.0..0.0_f64) {
        let (x, z) = kinematics::position(&p, t, ParticleLabel::new(a, b)).unwrap();
        let (x0, z0) = kinematics::position(&p, 0.0, ParticleLabel::new(a - p.m * t, b)).unwrap();
        let scale = 1.0 + x.abs() + (p.c * t).abs();
        prop_assert!((x - p.c * t - x0).abs() <= 1e-12 * scale);
        prop_assert!((z - z0).abs() <= 1e-12 * (1.0 + z.abs()));
    }

    #[test]
    fn orbital_velocity_decays(p in any_params(), t in 0.0..5.0_f64, a in -5.0..5.0_f64, b in -8.0..0.0_f64) {
        let (du, w) = kinematics::orbital_velocity(&p, t, ParticleLabel::new(a, b)).unwrap();
        let bound = p.m.abs() * (p.k * b).exp() * (1.0 + 1e-15);
        prop_assert!(du.abs() <= bound && w.abs() <= bound);
    }

    #[test]
    fn inversion_round_trip(p in any_params(), t in 0.0..3.0_f64, a in -5.0..5.0_f64, b in -4.0..-0.05_f64) {
        let (x, z) = kinematics::position(&p, t, ParticleLabel::new(a, b)).unwrap();
        let label = kinematics::invert_map(&p, t, x, z).unwrap();
        let (x1, z1) = kinematics::position(&p, t, label).unwrap();
        prop_assert!((x1 - x).abs() <= 1e-12 * (1.0 + x.abs()));
        prop_assert!((z1 - z).abs() <= 1e-12 * (1.0 + z.abs()));
    }

    #[test]
    fn pressure_follows_label_depth(p in any_params(), t in 0.0..3.0_f64, a in -5.0..5.0_f64, b in -4.0..-0.2_f64) {
        let (x, z) = kinematics::position(&p, t, ParticleLabel::new(a, b)).unwrap();
        let sample = fields::eulerian_state(&p, t, x, z).unwrap();
        let direct = fields::pressure(&p, b).unwrap();
        prop_assert!((sample.p - direct).abs() <= 1e-9 * direct.abs());
    }

    #[test]
    fn vorticity_scales_with_m(p in any_params(), b in -8.0..-1e-3_f64) {
        let gamma = fields::vorticity(&p, b).unwrap();
        if p.m == 0.0 {
            prop_assert_eq!(gamma, 0.0);
        } else {
            prop_assert_eq!(gamma.signum(), -p.m.signum());
            let e2 = (2.0 * p.k * b).exp();
            let reference = -2.0 * p.k * e2 / (1.0 - e2);
            prop_assert!((gamma / p.m - reference).abs() <= 1e-12 * reference.abs());
        }
    }

    #[test]
    fn drift_follows_the_current(p in any_params()) {
        prop_assume!(p.m != 0.0 && p.current != 0.0);
        prop_assert_eq!(analysis::drift(&p).unwrap().signum(), p.current.signum());
    }

    #[test]
    fn drift_is_uniform(p in any_params(), a in -5.0..5.0_f64, b in -5.0..-0.01_f64) {
        prop_assume!(p.m != 0.0);
        let period = analysis::orbit_period(&p).unwrap();
        let label = ParticleLabel::new(a, b);
        let (x0, z0) = kinematics::position(&p, 0.0, label).unwrap();
        let (x1, z1) = kinematics::position(&p, period, label).unwrap();
        let d = analysis::drift(&p).unwrap();
        prop_assert!((x1 - x0 - d).abs() <= 1e-9 * d.abs().max(1.0));
        prop_assert!((z1 - z0).abs() <= 1e-10);
    }

    #[test]
    fn oracle_agrees_with_threshold(p in any_params(), b in -4.0..0.0_f64) {
        let near_tie = analysis::critical_depth(&p).is_some_and(|s| (s - b).abs() < 1e-6);
        prop_assume!(!near_tie);
        let (class, _) = analysis::classify_trajectory(&p, b).unwrap();
        match analysis::classify_oracle(&p, b).unwrap() {
            OracleOutcome::Resolved(found) => prop_assert_eq!(found, class),
            OracleOutcome::Unresolved(reason) => prop_assert!(false, "unresolved: {}", reason),
        }
    }

    #[test]
    fn document_round_trip(p in any_params(), b0 in -2.0..0.0_f64) {
        let spec = ParamSpec {
            omega: Some(p.constants.omega),
            k: Some(p.k),
            b0: Some(b0),
            m: (p.regime == gerstner::Regime::Geophysical).then_some(p.m),
            current: (p.regime == gerstner::Regime::Classical).then_some(p.current),
            sign_m: (p.regime == gerstner::Regime::Classical)
                .then_some(if p.m > 0.0 { Sign::Plus } else { Sign::Minus }),
            ..ParamSpec::default()
        };
        let text = spec.to_document();
        let back = ParamSpec::parse(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        let resolved = back.resolve().unwrap();
        prop_assert_eq!(resolved.c.to_bits(), p.c.to_bits());
        prop_assert_eq!(resolved.b0, b0);
    }
}

#[test]
fn earth_circle_thresholds_have_zero_current() {
    let constants = PhysicalConstants::default();
    for k in [0.5, 1.0, 3.0] {
        let rc = gerstner::params::regime_constants(&constants, k).unwrap();
        for m in [rc.m1, rc.m2] {
            let p = resolve_geophysical_from_m(constants, k, m).unwrap();
            assert!(
                p.current.abs() <= 1e-12,
                "k = {k}, m = {m}: U = {}",
                p.current
            );
        }
        for m in [rc.m1 * 1.01, rc.m2 * 0.99] {
            let p = resolve_geophysical_from_m(constants, k, m).unwrap();
            assert!(p.current.abs() > 1e-6);
        }
    }
}

#[test]
fn residuals_are_shift_invariant() {
    let constants = PhysicalConstants::default().with_omega(0.5);
    let p = resolve_geophysical_from_m(constants, 1.0, 1.2).unwrap();
    let grid = fields::VerificationGrid::below_troughs(&p, 6, 5);
    let base = fields::verify(&p, &grid, 1e-3).unwrap();
    for s in [0.37, 2.0] {
        let shifted = fields::VerificationGrid {
            t: grid.t + s,
            x_min: grid.x_min + p.c * s,
            x_max: grid.x_max + p.c * s,
            ..grid
        };
        let r = fields::verify(&p, &shifted, 1e-3).unwrap();
        for (x, y) in [
            (base.momentum_x, r.momentum_x),
            (base.momentum_z, r.momentum_z),
            (base.divergence, r.divergence),
            (base.kinematic_bc, r.kinematic_bc),
            (base.farfield, r.farfield),
        ] {
            assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
        }
        assert_eq!(r.dynamic_bc, 0.0);
    }
}
