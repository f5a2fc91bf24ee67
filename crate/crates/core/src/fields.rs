//! Pressure and vorticity, their Eulerian lift, and residual checks of the
//! rotating Euler system.
//!
//! Residuals are computed from central differences of the composed fields
//! `(t, X, Z) -> label -> (u, w, P)`, never from chain-rule identities, so a
//! small residual is independent evidence that the flow solves the system.

use serde::Serialize;

use crate::convergence::observed_orders;
use crate::error::{Error, Result};
use crate::kinematics::{self, ParticleLabel};
use crate::numfmt;
use crate::params::WaveParameters;

/// Tolerance (relative) for treating a point as lying on the free surface.
const ON_SURFACE_TOL: f64 = 1e-12;
/// Surface labels with `X_a` below this are cusps and skipped by the kinematic check.
const CUSP_SLOPE_TOL: f64 = 1e-9;

/// `P - P0` as a function of the label depth.
pub fn pressure_anomaly(params: &WaveParameters, b: f64) -> Result<f64> {
    params.check_depth(b)?;
    let WaveParameters { k, b0, m, c, .. } = *params;
    let omega = params.constants.omega;
    let rho = params.constants.rho;
    let g = params.constants.g;
    let exp_part = rho * m * (k * m + 2.0 * omega) / (2.0 * k);
    // e^{2kb} - e^{2kb0} without cancellation near the surface
    let exp_diff = (2.0 * k * b0).exp() * (2.0 * k * (b - b0)).exp_m1();
    let linear_part = 2.0 * omega * rho * (c - m) - g * rho;
    Ok(exp_part * exp_diff + linear_part * (b - b0))
}

/// Pressure on the particle line of depth `b`; equals `p0` at `b = b0`.
pub fn pressure(params: &WaveParameters, b: f64) -> Result<f64> {
    Ok(pressure_anomaly(params, b)? + params.constants.p0)
}

/// Analytic `dP/db`.
pub fn pressure_gradient_b(params: &WaveParameters, b: f64) -> f64 {
    let WaveParameters { k, m, c, .. } = *params;
    let omega = params.constants.omega;
    let rho = params.constants.rho;
    rho * m * (k * m + 2.0 * omega) * (2.0 * k * b).exp() + 2.0 * omega * rho * (c - m)
        - params.constants.g * rho
}

/// Vorticity `u_Z - w_X` on the particle line of depth `b`.
///
/// Diverges on `b = 0` (unless `m = 0`); that case is reported as
/// [`Error::SingularVorticity`] carrying the sign of the infinity.
pub fn vorticity(params: &WaveParameters, b: f64) -> Result<f64> {
    params.check_depth(b)?;
    let WaveParameters { k, m, .. } = *params;
    if m == 0.0 {
        return Ok(0.0);
    }
    if b == 0.0 {
        return Err(Error::SingularVorticity { sign: -m.signum() });
    }
    let two_kb = 2.0 * k * b;
    Ok(-2.0 * k * m * two_kb.exp() / (-two_kb.exp_m1()))
}

/// Velocity and pressure at a fixed Eulerian point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerianSample {
    #[serde(serialize_with = "numfmt::serialize")]
    pub x: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub z: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub u: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub w: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub p: f64,
    /// Label of the particle occupying the point.
    pub label: ParticleLabel,
}

/// Fields minus their uniform background, `(u - U, w, P - P0)`.
#[derive(Debug, Clone, Copy)]
struct Disturbance {
    du: f64,
    w: f64,
    dp: f64,
    label: ParticleLabel,
}

fn locate(params: &WaveParameters, t: f64, x: f64, z: f64) -> Result<ParticleLabel> {
    if !(x.is_finite() && z.is_finite()) {
        return Err(Error::domain("point coordinates must be finite"));
    }
    let eta = kinematics::surface_profile(params, t, x)?;
    let on_surface_band = ON_SURFACE_TOL * z.abs().max(1.0);
    if (z - eta).abs() <= on_surface_band {
        let a = kinematics::invert_x(params, t, x, params.b0)?;
        return Ok(ParticleLabel::new(a, params.b0));
    }
    if z > eta {
        return Err(Error::AboveSurface { x, z, eta });
    }
    kinematics::invert_map(params, t, x, z)
}

fn disturbance(params: &WaveParameters, t: f64, x: f64, z: f64) -> Result<Disturbance> {
    let label = locate(params, t, x, z)?;
    let (du, w) = kinematics::orbital_velocity(params, t, label)?;
    Ok(Disturbance {
        du,
        w,
        dp: pressure_anomaly(params, label.b)?,
        label,
    })
}

/// Velocity and pressure at `(x, z)`; points on the surface (to rounding) are
/// assigned the surface label `b0`.
pub fn eulerian_state(params: &WaveParameters, t: f64, x: f64, z: f64) -> Result<EulerianSample> {
    let d = disturbance(params, t, x, z)?;
    Ok(EulerianSample {
        x,
        z,
        u: params.current + d.du,
        w: d.w,
        p: d.dp + params.constants.p0,
        label: d.label,
    })
}

/// Differencing steps: `space` in metres and the matching `time` step.
///
/// Time derivatives are taken along the current, `(t, X) + s (1, U)`, where
/// the field moves past at speed `|m|`; the time step is `h / max(1, |m|)` so
/// the field shifts by at most `h` per step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifferenceSteps {
    #[serde(serialize_with = "numfmt::serialize")]
    pub space: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub time: f64,
}

impl DifferenceSteps {
    pub fn new(params: &WaveParameters, h: f64) -> Self {
        DifferenceSteps {
            space: h,
            time: h / params.m.abs().max(1.0),
        }
    }
}

/// Pointwise residuals of the two momentum equations and of mass conservation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EulerResidual {
    #[serde(serialize_with = "numfmt::serialize")]
    pub momentum_x: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub momentum_z: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub divergence: f64,
}

struct Stencil {
    center: Disturbance,
    x_plus: Disturbance,
    x_minus: Disturbance,
    z_plus: Disturbance,
    z_minus: Disturbance,
    t_plus: Disturbance,
    t_minus: Disturbance,
    steps: DifferenceSteps,
}

fn stencil(params: &WaveParameters, t: f64, x: f64, z: f64, h: f64) -> Result<Stencil> {
    if !(h > 0.0) {
        return Err(Error::domain(format!(
            "differencing step must be > 0, got {h}"
        )));
    }
    let steps = DifferenceSteps::new(params, h);
    let ht = steps.time;
    let drift = params.current * ht;

    let columns = [
        (t, x),
        (t, x + h),
        (t, x - h),
        (t + ht, x + drift),
        (t - ht, x - drift),
    ];
    let mut available = f64::INFINITY;
    for (tc, xc) in columns {
        available = available.min(kinematics::surface_profile(params, tc, xc)? - z);
    }
    if available < 2.0 * h {
        return Err(Error::InsufficientClearance {
            required: 2.0 * h,
            available,
        });
    }

    Ok(Stencil {
        center: disturbance(params, t, x, z)?,
        x_plus: disturbance(params, t, x + h, z)?,
        x_minus: disturbance(params, t, x - h, z)?,
        z_plus: disturbance(params, t, x, z + h)?,
        z_minus: disturbance(params, t, x, z - h)?,
        t_plus: disturbance(params, t + ht, x + drift, z)?,
        t_minus: disturbance(params, t - ht, x - drift, z)?,
        steps,
    })
}

/// Momentum and continuity residuals at an interior point, all derivatives by
/// second-order central differences with spatial step `h`.
///
/// The point needs a clearance of `2h` below the surface.
pub fn euler_residual(
    params: &WaveParameters,
    t: f64,
    x: f64,
    z: f64,
    h: f64,
) -> Result<EulerResidual> {
    let s = stencil(params, t, x, z, h)?;
    let omega = params.constants.omega;
    let rho = params.constants.rho;
    let g = params.constants.g;
    let two_h = 2.0 * s.steps.space;
    let two_ht = 2.0 * s.steps.time;

    let u_x = (s.x_plus.du - s.x_minus.du) / two_h;
    let u_z = (s.z_plus.du - s.z_minus.du) / two_h;
    let w_x = (s.x_plus.w - s.x_minus.w) / two_h;
    let w_z = (s.z_plus.w - s.z_minus.w) / two_h;
    let p_x = (s.x_plus.dp - s.x_minus.dp) / two_h;
    let p_z = (s.z_plus.dp - s.z_minus.dp) / two_h;
    // u_t + U u_x and w_t + U w_x in one difference along the current
    let du_along = (s.t_plus.du - s.t_minus.du) / two_ht;
    let dw_along = (s.t_plus.w - s.t_minus.w) / two_ht;

    let du = s.center.du;
    let w = s.center.w;
    let u = params.current + du;
    Ok(EulerResidual {
        momentum_x: du_along + du * u_x + w * u_z + 2.0 * omega * w + p_x / rho,
        momentum_z: dw_along + du * w_x + w * w_z - 2.0 * omega * u + p_z / rho + g,
        divergence: u_x + w_z,
    })
}

/// `u_Z - w_X` by central differences, together with the recovered label.
pub fn vorticity_by_differences(
    params: &WaveParameters,
    t: f64,
    x: f64,
    z: f64,
    h: f64,
) -> Result<(f64, ParticleLabel)> {
    let s = stencil(params, t, x, z, h)?;
    let two_h = 2.0 * h;
    let u_z = (s.z_plus.du - s.z_minus.du) / two_h;
    let w_x = (s.x_plus.w - s.x_minus.w) / two_h;
    Ok((u_z - w_x, s.center.label))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BoundaryResiduals {
    /// `max |P(b0) - P0|`
    #[serde(serialize_with = "numfmt::serialize")]
    pub dynamic: f64,
    /// `max |w - (u - c) eta_X|` over non-cusp surface labels
    #[serde(serialize_with = "numfmt::serialize")]
    pub kinematic: f64,
    pub evaluated: usize,
    pub excluded_cusps: usize,
}

/// Dynamic and kinematic surface conditions at the given surface labels.
///
/// The surface slope comes from label space, `eta_X = Z_a / X_a`. Labels at
/// the cusps of a `b0 = 0` surface (where `X_a` vanishes) are skipped and
/// counted in `excluded_cusps`.
pub fn boundary_residuals(
    params: &WaveParameters,
    t: f64,
    surface_labels: &[f64],
) -> Result<BoundaryResiduals> {
    let b0 = params.b0;
    let dynamic = (pressure(params, b0)? - params.constants.p0).abs();
    let mut out = BoundaryResiduals {
        dynamic,
        ..Default::default()
    };
    for &a in surface_labels {
        let label = ParticleLabel::new(a, b0);
        let j = kinematics::jacobian(params, t, label)?;
        if j.xa <= CUSP_SLOPE_TOL {
            out.excluded_cusps += 1;
            continue;
        }
        let (u, w) = kinematics::velocity(params, t, label)?;
        let slope = j.za / j.xa;
        out.kinematic = out.kinematic.max((w - (u - params.c) * slope).abs());
        out.evaluated += 1;
    }
    Ok(out)
}

/// Residuals of the label-space pressure equations: `r_pa = |RHS of P_a|`
/// (the pressure does not depend on `a`) and `r_pb = |P_b - RHS of P_b|`.
pub fn lagrangian_pressure_check(
    params: &WaveParameters,
    t: f64,
    label: ParticleLabel,
) -> Result<(f64, f64)> {
    let s = kinematics::state(params, t, label)?;
    let j = kinematics::jacobian(params, t, label)?;
    let omega = params.constants.omega;
    let rho = params.constants.rho;
    let g = params.constants.g;
    let horizontal = s.ax + 2.0 * omega * s.w;
    let vertical = s.az - 2.0 * omega * s.u + g;
    let rhs_a = -rho * horizontal * j.xa - rho * vertical * j.za;
    let rhs_b = -rho * horizontal * j.xb - rho * vertical * j.zb;
    Ok((
        rhs_a.abs(),
        (pressure_gradient_b(params, label.b) - rhs_b).abs(),
    ))
}

/// Rectangle of Eulerian points at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationGrid {
    #[serde(serialize_with = "numfmt::serialize")]
    pub t: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub x_min: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub x_max: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub z_min: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub z_max: f64,
    pub nx: usize,
    pub nz: usize,
}

impl VerificationGrid {
    /// One wavelength wide (right end excluded), from half a wavelength-unit
    /// below the troughs down three more units `1/k`.
    pub fn below_troughs(params: &WaveParameters, nx: usize, nz: usize) -> Self {
        let k = params.k;
        let trough = params.b0 - (k * params.b0).exp() / k;
        let lambda = params.wavelength();
        VerificationGrid {
            t: 0.0,
            x_min: 0.0,
            x_max: lambda * (nx.max(1) - 1) as f64 / nx.max(1) as f64,
            z_min: trough - 3.5 / k,
            z_max: trough - 0.5 / k,
            nx,
            nz,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let span = |lo: f64, hi: f64, n: usize, i: usize| {
            if n <= 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        (0..self.nz).flat_map(move |j| {
            (0..self.nx).map(move |i| {
                (
                    span(self.x_min, self.x_max, self.nx, i),
                    span(self.z_min, self.z_max, self.nz, j),
                )
            })
        })
    }
}

/// Maxima of every residual over a grid, with the metadata needed to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    #[serde(serialize_with = "numfmt::serialize")]
    pub momentum_x: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub momentum_z: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub divergence: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub dynamic_bc: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub kinematic_bc: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub farfield: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub h: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub time_step: f64,
    pub grid: VerificationGrid,
    pub interior_points: usize,
    pub failed_points: usize,
    pub surface_labels: usize,
    pub excluded_cusps: usize,
    #[serde(serialize_with = "numfmt::serialize")]
    pub farfield_depth: f64,
    pub params: WaveParameters,
}

/// Number of surface labels used for the kinematic condition in reports.
pub const SURFACE_LABELS: usize = 1000;
/// Depth below the grid bottom, in units `1/k`, where the far field is sampled.
pub const FARFIELD_OFFSET: f64 = 20.0;

/// Surface labels spread over one wavelength at time `t`, offset by half a
/// spacing from the crest label.
pub fn surface_labels(params: &WaveParameters, t: f64, n: usize) -> Vec<f64> {
    let lambda = params.wavelength();
    (0..n)
        .map(|i| params.m * t + lambda * (i as f64 + 0.5) / n as f64)
        .collect()
}

/// Sweeps the grid and collects every residual maximum.
pub fn verify(params: &WaveParameters, grid: &VerificationGrid, h: f64) -> Result<ResidualReport> {
    let steps = DifferenceSteps::new(params, h);
    let mut report = ResidualReport {
        momentum_x: 0.0,
        momentum_z: 0.0,
        divergence: 0.0,
        dynamic_bc: 0.0,
        kinematic_bc: 0.0,
        farfield: 0.0,
        h,
        time_step: steps.time,
        grid: *grid,
        interior_points: 0,
        failed_points: 0,
        surface_labels: 0,
        excluded_cusps: 0,
        farfield_depth: grid.z_min - FARFIELD_OFFSET / params.k,
        params: *params,
    };

    for (x, z) in grid.points() {
        match euler_residual(params, grid.t, x, z, h) {
            Ok(r) => {
                report.momentum_x = report.momentum_x.max(r.momentum_x.abs());
                report.momentum_z = report.momentum_z.max(r.momentum_z.abs());
                report.divergence = report.divergence.max(r.divergence.abs());
                report.interior_points += 1;
            }
            Err(Error::InsufficientClearance { .. }) => {
                return Err(Error::domain(format!(
                    "grid point ({x}, {z}) is closer than 2h to the surface"
                )))
            }
            Err(_) => report.failed_points += 1,
        }
    }

    let labels = surface_labels(params, grid.t, SURFACE_LABELS);
    let bc = boundary_residuals(params, grid.t, &labels)?;
    report.dynamic_bc = bc.dynamic;
    report.kinematic_bc = bc.kinematic;
    report.surface_labels = bc.evaluated;
    report.excluded_cusps = bc.excluded_cusps;

    let nx = grid.nx.max(1);
    for i in 0..nx {
        let x = grid.x_min + (grid.x_max - grid.x_min) * i as f64 / nx as f64;
        match eulerian_state(params, grid.t, x, report.farfield_depth) {
            Ok(s) => {
                let dev = (s.u - params.current).abs().max(s.w.abs());
                report.farfield = report.farfield.max(dev);
            }
            Err(_) => report.failed_points += 1,
        }
    }
    Ok(report)
}

/// Convergence orders of the interior residuals between successive steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualOrders {
    pub momentum_x: Vec<f64>,
    pub momentum_z: Vec<f64>,
    pub divergence: Vec<f64>,
}

impl ResidualOrders {
    /// Smallest order over every field and step pair.
    pub fn min(&self) -> f64 {
        self.momentum_x
            .iter()
            .chain(&self.momentum_z)
            .chain(&self.divergence)
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderStudy {
    pub steps: Vec<f64>,
    pub reports: Vec<ResidualReport>,
    pub orders: ResidualOrders,
}

/// Runs [`verify`] at each step (coarsest first, each half the previous) and
/// estimates the observed order of every interior residual.
pub fn order_study(
    params: &WaveParameters,
    grid: &VerificationGrid,
    steps: &[f64],
) -> Result<OrderStudy> {
    if steps.len() < 2 {
        return Err(Error::domain("an order study needs at least two steps"));
    }
    let ratio = steps[0] / steps[1];
    let reports = steps
        .iter()
        .map(|&h| verify(params, grid, h))
        .collect::<Result<Vec<_>>>()?;
    let series = |f: fn(&ResidualReport) -> f64| {
        let errors: Vec<f64> = reports.iter().map(f).collect();
        observed_orders(&errors, ratio)
    };
    let orders = ResidualOrders {
        momentum_x: series(|r| r.momentum_x),
        momentum_z: series(|r| r.momentum_z),
        divergence: series(|r| r.divergence),
    };
    Ok(OrderStudy {
        steps: steps.to_vec(),
        reports,
        orders,
    })
}

/// Largest deviation between the differenced curl and the closed-form
/// vorticity over the grid, for each step.
pub fn vorticity_errors(
    params: &WaveParameters,
    grid: &VerificationGrid,
    steps: &[f64],
) -> Result<Vec<f64>> {
    steps
        .iter()
        .map(|&h| {
            let mut worst = 0.0_f64;
            for (x, z) in grid.points() {
                let (curl, label) = vorticity_by_differences(params, grid.t, x, z, h)?;
                worst = worst.max((curl - vorticity(params, label.b)?).abs());
            }
            Ok(worst)
        })
        .collect()
}
