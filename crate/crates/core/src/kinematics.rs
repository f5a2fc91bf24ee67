//! The Lagrangian flow map and its inverse.
//!
//! A particle with label `(a, b)`, `b <= b0`, sits at
//!
//! ```text
//! X(t, a, b) = a + U t - (e^{kb}/k) sin(k(a - m t))
//! Z(t, a, b) = b + (e^{kb}/k) cos(k(a - m t))
//! ```
//!
//! Everything here is closed form except the inversions, which solve for the
//! label of a given Eulerian point with safeguarded Newton iterations.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfmt::{self, sig17};
use crate::params::WaveParameters;

const INVERT_X_MAX_ITER: usize = 200;
const NEWTON_2D_MAX_ITER: usize = 40;
const DEPTH_SEARCH_MAX_ITER: usize = 200;

/// Lagrangian coordinates of one particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticleLabel {
    #[serde(serialize_with = "numfmt::serialize")]
    pub a: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub b: f64,
}

impl ParticleLabel {
    pub fn new(a: f64, b: f64) -> Self {
        ParticleLabel { a, b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinematicState {
    #[serde(serialize_with = "numfmt::serialize")]
    pub x: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub z: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub u: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub w: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub ax: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub az: f64,
}

/// Partial derivatives of the flow map with respect to the labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianSample {
    pub xa: f64,
    pub xb: f64,
    pub za: f64,
    pub zb: f64,
    pub det: f64,
}

/// `e^{kb}` together with the orbital phase `k(a - m t)`.
#[derive(Debug, Clone, Copy)]
struct Orbit {
    radius_factor: f64,
    sin: f64,
    cos: f64,
    /// `1 - e^{kb} cos(phase)`, evaluated without cancellation near the surface.
    one_minus_ecos: f64,
}

impl Orbit {
    fn new(params: &WaveParameters, t: f64, label: ParticleLabel) -> Orbit {
        let k = params.k;
        let kb = k * label.b;
        let e = kb.exp();
        let phase = k * (label.a - params.m * t);
        let (sin, cos) = phase.sin_cos();
        let half = (0.5 * phase).sin();
        Orbit {
            radius_factor: e,
            sin,
            cos,
            one_minus_ecos: -kb.exp_m1() + 2.0 * e * half * half,
        }
    }
}

fn checked_orbit(params: &WaveParameters, t: f64, label: ParticleLabel) -> Result<Orbit> {
    params.check_depth(label.b)?;
    Ok(Orbit::new(params, t, label))
}

pub fn position(params: &WaveParameters, t: f64, label: ParticleLabel) -> Result<(f64, f64)> {
    let o = checked_orbit(params, t, label)?;
    Ok(position_of(params, t, label, &o))
}

fn position_of(params: &WaveParameters, t: f64, label: ParticleLabel, o: &Orbit) -> (f64, f64) {
    let r = o.radius_factor / params.k;
    (
        label.a + params.current * t - r * o.sin,
        label.b + r * o.cos,
    )
}

/// Velocity `(X_t, Z_t)` of the particle.
pub fn velocity(params: &WaveParameters, t: f64, label: ParticleLabel) -> Result<(f64, f64)> {
    let (du, w) = orbital_velocity(params, t, label)?;
    Ok((params.current + du, w))
}

/// Velocity relative to the uniform current: `(u - U, w)`.
pub fn orbital_velocity(
    params: &WaveParameters,
    t: f64,
    label: ParticleLabel,
) -> Result<(f64, f64)> {
    let o = checked_orbit(params, t, label)?;
    let me = params.m * o.radius_factor;
    Ok((me * o.cos, me * o.sin))
}

pub fn acceleration(params: &WaveParameters, t: f64, label: ParticleLabel) -> Result<(f64, f64)> {
    let o = checked_orbit(params, t, label)?;
    let kmme = params.k * params.m * params.m * o.radius_factor;
    Ok((kmme * o.sin, -kmme * o.cos))
}

/// Position, velocity and acceleration in one evaluation.
pub fn state(params: &WaveParameters, t: f64, label: ParticleLabel) -> Result<KinematicState> {
    let o = checked_orbit(params, t, label)?;
    let (x, z) = position_of(params, t, label, &o);
    let me = params.m * o.radius_factor;
    let kmme = params.k * params.m * me;
    Ok(KinematicState {
        x,
        z,
        u: params.current + me * o.cos,
        w: me * o.sin,
        ax: kmme * o.sin,
        az: -kmme * o.cos,
    })
}

pub fn jacobian(params: &WaveParameters, t: f64, label: ParticleLabel) -> Result<JacobianSample> {
    let o = checked_orbit(params, t, label)?;
    Ok(jacobian_of(&o))
}

fn jacobian_of(o: &Orbit) -> JacobianSample {
    let e = o.radius_factor;
    let xa = o.one_minus_ecos;
    let xb = -e * o.sin;
    let za = -e * o.sin;
    let zb = 1.0 + e * o.cos;
    JacobianSample {
        xa,
        xb,
        za,
        zb,
        det: xa * zb - xb * za,
    }
}

/// Solves `X(t, a, b) = x` for `a` at fixed depth `b`.
///
/// `a -> X(t, a, b)` is increasing with slope at least `1 - e^{kb}`, and its
/// root lies within `e^{kb}/k` of `x - U t`. Newton steps are taken from that
/// guess and replaced by bisection whenever they leave the bracket, which also
/// covers the cusps of the `b = 0` surface where the slope vanishes.
pub fn invert_x(params: &WaveParameters, t: f64, x: f64, b: f64) -> Result<f64> {
    params.check_depth(b)?;
    let k = params.k;
    let e = (k * b).exp();
    let a0 = x - params.current * t;
    let r = e / k;
    if r == 0.0 {
        return Ok(a0);
    }
    let one_minus_e = -(k * b).exp_m1();

    let (mut lo, mut hi) = (a0 - r, a0 + r);
    let mut a = a0;
    let mut best = (a, f64::INFINITY);
    for _ in 0..INVERT_X_MAX_ITER {
        let phase = k * (a - params.m * t);
        let sin = phase.sin();
        let f = (a - a0) - r * sin;
        if f.abs() < best.1 {
            best = (a, f.abs());
        }
        if f == 0.0 {
            return Ok(a);
        }
        if f < 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        let half = (0.5 * phase).sin();
        let slope = one_minus_e + 2.0 * e * half * half;
        let newton = a - f / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - a).abs();
        a = next;
        let tol = 2.0 * f64::EPSILON * a.abs().max(1.0);
        if step <= tol || hi - lo <= tol {
            return Ok(a);
        }
    }
    Err(Error::NonConvergence {
        what: "horizontal label inversion",
        iterations: INVERT_X_MAX_ITER,
        best: (best.0, b),
        residual: best.1,
    })
}

/// Height of the free surface above `x` at time `t`.
pub fn surface_profile(params: &WaveParameters, t: f64, x: f64) -> Result<f64> {
    let a = invert_x(params, t, x, params.b0)?;
    Ok(position(params, t, ParticleLabel::new(a, params.b0))?.1)
}

/// `n` surface points over one wavelength, generated in label space.
///
/// Unlike [`surface_profile`] this needs no root finding, so the crests of a
/// cusped (`b0 = 0`) surface are hit exactly.
pub fn surface_samples(params: &WaveParameters, t: f64, n: usize) -> Vec<(f64, f64)> {
    let lambda = params.wavelength();
    // a = m t is the crest label at time t, sitting at x = c t
    let a_start = params.m * t;
    (0..n)
        .map(|i| {
            let a = a_start + lambda * i as f64 / n as f64;
            let o = Orbit::new(params, t, ParticleLabel::new(a, params.b0));
            position_of(params, t, ParticleLabel::new(a, params.b0), &o)
        })
        .collect()
}

/// Label of the particle at `(x, z)`; the point must lie strictly below the surface.
///
/// Runs Newton on both coordinates with the analytic Jacobian and falls back
/// to [`invert_map_by_depth`] if that fails to settle, which happens close to
/// a `b0 = 0` surface where the Jacobian degenerates.
pub fn invert_map(params: &WaveParameters, t: f64, x: f64, z: f64) -> Result<ParticleLabel> {
    check_below_surface(params, t, x, z)?;
    match newton_2d(params, t, x, z) {
        Some(label) => Ok(label),
        None => depth_search(params, t, x, z),
    }
}

/// Label inversion through a one-dimensional search in depth.
///
/// For fixed `(t, x)` the height `Z(t, X^{-1}(t, x, b), b)` increases strictly
/// with `b`, so `b` is found by safeguarded Newton on that monotone function,
/// calling [`invert_x`] for the abscissa at every step.
pub fn invert_map_by_depth(
    params: &WaveParameters,
    t: f64,
    x: f64,
    z: f64,
) -> Result<ParticleLabel> {
    check_below_surface(params, t, x, z)?;
    depth_search(params, t, x, z)
}

fn check_below_surface(params: &WaveParameters, t: f64, x: f64, z: f64) -> Result<()> {
    if !(x.is_finite() && z.is_finite()) {
        return Err(Error::domain("point coordinates must be finite"));
    }
    let eta = surface_profile(params, t, x)?;
    if z < eta {
        Ok(())
    } else {
        Err(Error::AboveSurface { x, z, eta })
    }
}

fn newton_2d(params: &WaveParameters, t: f64, x: f64, z: f64) -> Option<ParticleLabel> {
    let mut label = ParticleLabel::new(x - params.current * t, z.min(params.b0));
    for _ in 0..NEWTON_2D_MAX_ITER {
        let o = Orbit::new(params, t, label);
        let (px, pz) = position_of(params, t, label, &o);
        let (rx, rz) = (px - x, pz - z);
        let j = jacobian_of(&o);
        if !(j.det > 0.0) {
            return None;
        }
        let da = (j.zb * rx - j.xb * rz) / j.det;
        let db = (j.xa * rz - j.za * rx) / j.det;
        let next = ParticleLabel::new(label.a - da, (label.b - db).min(params.b0));
        let settled = (next.a - label.a).abs() <= 4.0 * f64::EPSILON * next.a.abs().max(1.0)
            && (next.b - label.b).abs() <= 4.0 * f64::EPSILON * next.b.abs().max(1.0);
        label = next;
        if !(label.a.is_finite() && label.b.is_finite()) {
            return None;
        }
        if settled {
            let o = Orbit::new(params, t, label);
            let (px, pz) = position_of(params, t, label, &o);
            let scale = x.abs().max(z.abs()).max(1.0);
            let ok = (px - x).abs() <= 1e-12 * scale && (pz - z).abs() <= 1e-12 * scale;
            return ok.then_some(label);
        }
    }
    None
}

fn depth_search(params: &WaveParameters, t: f64, x: f64, z: f64) -> Result<ParticleLabel> {
    let k = params.k;
    let height_at = |b: f64| -> Result<(f64, f64, f64)> {
        let a = invert_x(params, t, x, b)?;
        let label = ParticleLabel::new(a, b);
        let o = Orbit::new(params, t, label);
        let (_, pz) = position_of(params, t, label, &o);
        // d/db Z(t, X^{-1}(t, x, b), b) = det / X_a
        let slope = -(2.0 * k * b).exp_m1() / o.one_minus_ecos;
        Ok((a, pz - z, slope))
    };

    let surface_reach = (k * params.b0).exp() / k;
    let mut lo = (z - surface_reach).min(params.b0);
    let mut widen = 1.0;
    while height_at(lo)?.1 >= 0.0 {
        lo -= widen;
        widen *= 2.0;
    }
    let mut hi = params.b0;
    let mut b = z.clamp(lo, hi);
    let mut best = (b, f64::INFINITY);
    for _ in 0..DEPTH_SEARCH_MAX_ITER {
        let (a, f, slope) = height_at(b)?;
        if f.abs() < best.1 {
            best = (b, f.abs());
        }
        if f == 0.0 {
            return Ok(ParticleLabel::new(a, b));
        }
        if f < 0.0 {
            lo = b;
        } else {
            hi = b;
        }
        let newton = b - f / slope;
        let next = if slope.is_finite() && slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - b).abs();
        b = next;
        let tol = 2.0 * f64::EPSILON * b.abs().max(1.0);
        if step <= tol || hi - lo <= tol {
            let a = invert_x(params, t, x, b)?;
            return Ok(ParticleLabel::new(a, b));
        }
    }
    Err(Error::NonConvergence {
        what: "depth search",
        iterations: DEPTH_SEARCH_MAX_ITER,
        best: (x, best.0),
        residual: best.1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: KinematicState,
}

/// `n` uniform samples of the particle's path on `[t0, t1]`, both ends included.
pub fn sample_trajectory(
    params: &WaveParameters,
    label: ParticleLabel,
    t0: f64,
    t1: f64,
    n: usize,
) -> Result<Vec<TrajectorySample>> {
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 samples, got {n}")));
    }
    if !(t0 < t1) {
        return Err(Error::domain(format!("need t0 < t1, got [{t0}, {t1}]")));
    }
    params.check_depth(label.b)?;
    let dt = (t1 - t0) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let t = if i == n - 1 { t1 } else { t0 + dt * i as f64 };
            Ok(TrajectorySample {
                t,
                state: state(params, t, label)?,
            })
        })
        .collect()
}

pub const TRAJECTORY_CSV_HEADER: &str = "t,a,b,X,Z,u,w,ax,az";
pub const SURFACE_CSV_HEADER: &str = "t,X,eta";

pub fn write_trajectory_csv<W: Write>(
    mut out: W,
    label: ParticleLabel,
    samples: &[TrajectorySample],
) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_CSV_HEADER}")?;
    for s in samples {
        let st = &s.state;
        let row = [s.t, label.a, label.b, st.x, st.z, st.u, st.w, st.ax, st.az]
            .map(sig17)
            .join(",");
        writeln!(out, "{row}")?;
    }
    Ok(())
}

pub fn write_surface_csv<W: Write>(mut out: W, t: f64, points: &[(f64, f64)]) -> io::Result<()> {
    writeln!(out, "{SURFACE_CSV_HEADER}")?;
    for &(x, eta) in points {
        writeln!(out, "{},{},{}", sig17(t), sig17(x), sig17(eta))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{resolve_classical, resolve_geophysical_from_m, PhysicalConstants, Sign};
    use rand::{rngs::StdRng, Rng, SeedableRng};
    use std::f64::consts::PI;

    fn gerstner() -> WaveParameters {
        resolve_classical(PhysicalConstants::classical(), 1.0, Sign::Plus, 0.0).unwrap()
    }

    fn geo(m: f64) -> WaveParameters {
        resolve_geophysical_from_m(PhysicalConstants::default(), 1.0, m).unwrap()
    }

    /// Geophysical set with a fast rotation so that `c` stays of order one.
    fn spun(m: f64) -> WaveParameters {
        let constants = PhysicalConstants::default().with_omega(0.5);
        resolve_geophysical_from_m(constants, 1.0, m).unwrap()
    }

    fn with_current(current: f64) -> WaveParameters {
        resolve_classical(PhysicalConstants::classical(), 1.0, Sign::Plus, current).unwrap()
    }

    #[test]
    fn position_at_crest_and_trough() {
        let p = gerstner();
        assert_eq!(
            position(&p, 0.0, ParticleLabel::new(0.0, 0.0)).unwrap(),
            (0.0, 1.0)
        );
        let (x, z) = position(&p, 0.0, ParticleLabel::new(PI, 0.0)).unwrap();
        assert!((x - PI).abs() < 1e-15);
        assert!((z + 1.0).abs() < 1e-15);
    }

    #[test]
    fn deep_particles_follow_the_current() {
        let p = with_current(0.7);
        let bound = (-50.0_f64).exp();
        for (t, a) in [(0.0, 0.0), (3.3, 1.2), (-7.0, 40.0)] {
            let (x, z) = position(&p, t, ParticleLabel::new(a, -50.0)).unwrap();
            assert!((x - (a + 0.7 * t)).abs() <= bound + 1e-14 * (a + 0.7 * t).abs());
            assert!((z + 50.0).abs() <= bound + 1e-14);
        }
    }

    #[test]
    fn labels_above_the_surface_are_rejected() {
        let p = gerstner().with_b0(-0.5).unwrap();
        assert!(position(&p, 0.0, ParticleLabel::new(0.0, -0.4)).is_err());
        assert!(velocity(&p, 0.0, ParticleLabel::new(0.0, f64::NAN)).is_err());
    }

    #[test]
    fn stagnation_velocity_is_uniform() {
        let p = geo(0.0);
        for (t, a, b) in [(0.0, 0.0, 0.0), (1.0, 2.0, -3.0), (100.0, -5.0, -0.1)] {
            let (u, w) = velocity(&p, t, ParticleLabel::new(a, b)).unwrap();
            assert_eq!((u, w), (p.c, 0.0));
            assert_eq!(
                acceleration(&p, t, ParticleLabel::new(a, b)).unwrap(),
                (0.0, 0.0)
            );
        }
    }

    #[test]
    fn velocity_at_the_crest() {
        let p = gerstner();
        let (u, w) = velocity(&p, 0.0, ParticleLabel::new(0.0, 0.0)).unwrap();
        assert_eq!(u, 9.8_f64.sqrt());
        assert_eq!(w, 0.0);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let mut rng = StdRng::seed_from_u64(7);
        let sets = [gerstner(), with_current(-1.3), spun(1.0), spun(-2.0)];
        let h = 1e-6;
        for _ in 0..100 {
            let p = sets[rng.gen_range(0..sets.len())];
            let t = rng.gen_range(0.0..10.0);
            let label = ParticleLabel::new(rng.gen_range(-5.0..5.0), rng.gen_range(-3.0..0.0));
            let (xp, zp) = position(&p, t + h, label).unwrap();
            let (xm, zm) = position(&p, t - h, label).unwrap();
            let (u, w) = velocity(&p, t, label).unwrap();
            assert!(((xp - xm) / (2.0 * h) - u).abs() <= 1e-8);
            assert!(((zp - zm) / (2.0 * h) - w).abs() <= 1e-8);

            let (up, wp) = velocity(&p, t + h, label).unwrap();
            let (um, wm) = velocity(&p, t - h, label).unwrap();
            let (ax, az) = acceleration(&p, t, label).unwrap();
            assert!(((up - um) / (2.0 * h) - ax).abs() <= 1e-7);
            assert!(((wp - wm) / (2.0 * h) - az).abs() <= 1e-7);
        }
    }

    #[test]
    fn jacobian_determinant_identity() {
        let p = gerstner();
        let j = jacobian(&p, 0.3, ParticleLabel::new(0.0, 0.0)).unwrap();
        assert!(j.det.abs() <= 4.0 * f64::EPSILON);
        let j = jacobian(&p, 0.0, ParticleLabel::new(0.0, -1.0)).unwrap();
        assert!((j.det - 0.864_664_716_763_387_3).abs() < 1e-15);
        assert_eq!(j.det, j.xa * j.zb - j.xb * j.za);

        let mut rng = StdRng::seed_from_u64(3);
        let reference = jacobian(&p, 0.0, ParticleLabel::new(0.0, -0.7))
            .unwrap()
            .det;
        for _ in 0..100 {
            let label = ParticleLabel::new(rng.gen_range(-10.0..10.0), -0.7);
            let det = jacobian(&p, rng.gen_range(0.0..50.0), label).unwrap().det;
            assert!((det - reference).abs() <= 1e-15);
        }
    }

    #[test]
    fn invert_x_deep_and_periodic() {
        let p = with_current(0.4);
        let a = invert_x(&p, 2.0, 1.5, -50.0).unwrap();
        assert!((a - (1.5 - 0.8)).abs() <= (-50.0_f64).exp() + 1e-15);

        let lambda = p.wavelength();
        let a0 = invert_x(&p, 0.7, 0.3, -0.2).unwrap();
        let a1 = invert_x(&p, 0.7, 0.3 + lambda, -0.2).unwrap();
        assert!((a1 - a0 - lambda).abs() < 1e-12);
    }

    #[test]
    fn invert_x_round_trip() {
        let mut rng = StdRng::seed_from_u64(11);
        let sets = [
            gerstner(),
            with_current(2.0),
            spun(1.5),
            spun(-0.5),
            geo(3.0),
        ];
        for i in 0..1000 {
            let p = sets[i % sets.len()];
            let t = rng.gen_range(0.0..5.0);
            let label = ParticleLabel::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..-1e-3));
            let (x, _) = position(&p, t, label).unwrap();
            let a = invert_x(&p, t, x, label.b).unwrap();
            let tol = 1e-12 * (1.0 + (p.current * t).abs());
            assert!((a - label.a).abs() <= tol, "{} vs {}", a, label.a);
        }
    }

    #[test]
    fn invert_x_handles_the_cusped_surface() {
        let p = gerstner();
        // x = 0 at t = 0 is a cusp: slope of a -> X vanishes at a = 0
        let a = invert_x(&p, 0.0, 0.0, 0.0).unwrap();
        assert!(a.abs() < 1e-4);
        let eta = surface_profile(&p, 0.0, 0.0).unwrap();
        assert!((eta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn invert_map_round_trip() {
        let mut rng = StdRng::seed_from_u64(5);
        let sets = [
            gerstner(),
            with_current(-0.9),
            spun(2.0),
            spun(-3.0),
            geo(-3.1),
        ];
        for i in 0..400 {
            let p = sets[i % sets.len()];
            let t = rng.gen_range(0.0..3.0);
            let label = ParticleLabel::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..-0.01));
            let (x, z) = position(&p, t, label).unwrap();
            let got = invert_map(&p, t, x, z).unwrap();
            assert!((got.a - label.a).abs() < 1e-10, "{got:?} vs {label:?}");
            assert!((got.b - label.b).abs() < 1e-10, "{got:?} vs {label:?}");
            let slow = invert_map_by_depth(&p, t, x, z).unwrap();
            assert!((slow.a - label.a).abs() < 1e-10, "{slow:?} vs {label:?}");
            assert!((slow.b - label.b).abs() < 1e-10, "{slow:?} vs {label:?}");
        }
    }

    #[test]
    fn invert_map_far_below_is_nearly_identity() {
        let p = with_current(1.0);
        let got = invert_map(&p, 2.0, 3.0, -40.0).unwrap();
        assert!((got.b + 40.0).abs() < 1e-15);
        assert!((got.a - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invert_map_depth_is_monotone_in_height() {
        let p = gerstner();
        let mut last = f64::NEG_INFINITY;
        let eta = surface_profile(&p, 0.2, 0.9).unwrap();
        for i in 0..50 {
            let z = -4.0 + (eta + 4.0 - 1e-3) * i as f64 / 50.0;
            let b = invert_map(&p, 0.2, 0.9, z).unwrap().b;
            assert!(b > last);
            last = b;
        }
    }

    #[test]
    fn invert_map_rejects_points_above_the_surface() {
        let p = gerstner();
        assert!(matches!(
            invert_map(&p, 0.0, 0.0, 1.5),
            Err(Error::AboveSurface { .. })
        ));
        let eta = surface_profile(&p, 0.0, 2.0).unwrap();
        assert!(invert_map(&p, 0.0, 2.0, eta).is_err());
    }

    #[test]
    fn surface_height_range_and_travel() {
        let p = gerstner().with_b0(-1.0).unwrap();
        let pts = surface_samples(&p, 0.0, 512);
        let max = pts.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        let min = pts.iter().map(|p| p.1).fold(f64::MAX, f64::min);
        assert!((max - min - 2.0 * (-1.0_f64).exp()).abs() < 1e-12);

        let p = with_current(0.5).with_b0(-0.2).unwrap();
        for (t, x) in [(0.3, 0.1), (2.0, -1.0), (7.5, 4.0)] {
            let now = surface_profile(&p, t, x).unwrap();
            let before = surface_profile(&p, 0.0, x - p.c * t).unwrap();
            assert!((now - before).abs() < 1e-10);
        }
    }

    #[test]
    fn cusped_surface_crest_heights() {
        let p = gerstner();
        let pts = surface_samples(&p, 0.0, 64);
        // the first sample is the crest label a = 0
        assert_eq!(pts[0], (0.0, 1.0));
    }

    #[test]
    fn trajectory_sampling() {
        let p = with_current(0.8);
        let label = ParticleLabel::new(0.3, -0.4);
        let period = 2.0 * PI / (p.k * p.m.abs());
        let samples = sample_trajectory(&p, label, 0.0, period, 101).unwrap();
        assert_eq!(samples.len(), 101);
        let first = samples[0].state;
        let last = samples[100].state;
        let drift = 2.0 * PI * p.current / (p.k * p.m.abs());
        assert!((last.x - first.x - drift).abs() < 1e-12);
        assert!((last.z - first.z).abs() < 1e-12);

        let still = geo(0.0);
        let s = sample_trajectory(&still, label, 0.0, 1.0, 5).unwrap();
        for w in s.windows(2) {
            assert_eq!(w[0].state.z, w[1].state.z);
            let slope = (w[1].state.x - w[0].state.x) / (w[1].t - w[0].t);
            assert!((slope - still.c).abs() < 1e-6 * still.c);
        }

        let circle = gerstner();
        let s = sample_trajectory(&circle, label, 0.0, 10.0, 200).unwrap();
        let r = (-0.4_f64).exp();
        for sample in &s {
            let d =
                ((sample.state.x - label.a).powi(2) + (sample.state.z - label.b).powi(2)).sqrt();
            assert!((d - r).abs() < 1e-12);
        }

        assert!(sample_trajectory(&p, label, 0.0, 1.0, 1).is_err());
        assert!(sample_trajectory(&p, label, 1.0, 1.0, 5).is_err());
    }

    #[test]
    fn csv_layout() {
        let p = gerstner();
        let label = ParticleLabel::new(0.0, -1.0);
        let s = sample_trajectory(&p, label, 0.0, 1.0, 3).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, label, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,a,b,X,Z,u,w,ax,az");
        assert_eq!(lines.len(), 4);
        let row: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[0], 0.5);
        assert_eq!(row[3], s[1].state.x);
    }
}
