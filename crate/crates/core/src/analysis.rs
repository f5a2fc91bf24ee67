//! Drift, orbit period, stagnation, current orientation and the shape of
//! particle paths.
//!
//! Path shapes come from two independent routes. [`classify_trajectory`]
//! compares the label depth `b` with the threshold `(1/k) ln|U/m|`.
//! [`classify_oracle`] samples the path from the flow map and decides from
//! its geometry alone.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{self, ParticleLabel};
use crate::numfmt;
use crate::params::{Regime, WaveParameters};

/// Net horizontal displacement of every particle over one orbit period,
/// `2 pi U / (k |m|)`.
pub fn drift(params: &WaveParameters) -> Result<f64> {
    if params.m == 0.0 {
        return Err(Error::UndefinedForStagnation("drift"));
    }
    Ok(2.0 * PI * params.current / (params.k * params.m.abs()))
}

/// Time between successive passages of a particle through a crest line.
pub fn orbit_period(params: &WaveParameters) -> Result<f64> {
    if params.m == 0.0 {
        return Err(Error::UndefinedForStagnation("orbit period"));
    }
    Ok(2.0 * PI / (params.k * params.m.abs()))
}

/// True iff every particle is a stagnation point, i.e. `m = 0`.
pub fn stagnation_check(params: &WaveParameters) -> bool {
    params.m == 0.0
}

/// Speed `g / (2 omega)` of the all-stagnation flow. A formal limit of the
/// family (about 6.7e4 m/s with Earth constants), not an ocean flow.
pub fn stagnation_speed(params: &WaveParameters) -> Result<f64> {
    let omega = params.constants.omega;
    if omega == 0.0 {
        return Err(Error::RegimeMismatch {
            regime: Regime::Classical,
            requirement: "omega > 0 for a stagnation flow",
            omega,
        });
    }
    Ok(params.constants.g / (2.0 * omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurrentDirection {
    Favorable,
    Adverse,
    NoCurrent,
    NoWave,
}

/// Whether the current runs with the wave (`cU > 0`) or against it.
pub fn current_direction(params: &WaveParameters) -> CurrentDirection {
    let (c, u) = (params.c, params.current);
    if c == 0.0 {
        CurrentDirection::NoWave
    } else if u == 0.0 {
        CurrentDirection::NoCurrent
    } else if c * u > 0.0 {
        CurrentDirection::Favorable
    } else {
        CurrentDirection::Adverse
    }
}

/// The same classification read off from where `m` sits relative to
/// `m1 < -sqrt(g/k) < m2 < sqrt(g/k)`. Only meaningful in the geophysical
/// regime; `None` otherwise.
pub fn current_direction_from_intervals(params: &WaveParameters) -> Option<CurrentDirection> {
    if params.regime != Regime::Geophysical {
        return None;
    }
    let rc = params.regime_constants();
    let s = params.deep_water_speed();
    let m = params.m;
    Some(if m == rc.m1 || m == rc.m2 {
        CurrentDirection::NoCurrent
    } else if m == s || m == -s {
        CurrentDirection::NoWave
    } else if m < rc.m1 || (-s < m && m < rc.m2) || m > s {
        CurrentDirection::Favorable
    } else {
        CurrentDirection::Adverse
    })
}

/// Depth `(1/k) ln|U/m|` at which the path turns into a cycloid; `None`
/// when `U = 0` or `m = 0`.
pub fn critical_depth(params: &WaveParameters) -> Option<f64> {
    if params.m == 0.0 || params.current == 0.0 {
        return None;
    }
    Some((params.current / params.m).abs().ln() / params.k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathKind {
    Circle,
    HorizontalLine,
    Trochoid,
    ReflectedTrochoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrochoidSubtype {
    Curtate,
    Cuspidal,
    Prolate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
}

/// Shape of one particle path. `subtype` is set exactly for the two trochoid
/// kinds and `orientation` exactly for circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrajectoryClass {
    pub kind: PathKind,
    pub subtype: Option<TrochoidSubtype>,
    pub orientation: Option<Orientation>,
}

impl TrajectoryClass {
    pub fn horizontal_line() -> Self {
        TrajectoryClass {
            kind: PathKind::HorizontalLine,
            subtype: None,
            orientation: None,
        }
    }

    pub fn circle(orientation: Orientation) -> Self {
        TrajectoryClass {
            kind: PathKind::Circle,
            subtype: None,
            orientation: Some(orientation),
        }
    }

    pub fn trochoid(reflected: bool, subtype: TrochoidSubtype) -> Self {
        TrajectoryClass {
            kind: if reflected {
                PathKind::ReflectedTrochoid
            } else {
                PathKind::Trochoid
            },
            subtype: Some(subtype),
            orientation: None,
        }
    }
}

impl fmt::Display for TrajectoryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(s) = self.subtype {
            write!(f, "/{s:?}")?;
        }
        if let Some(o) = self.orientation {
            write!(f, "/{o:?}")?;
        }
        Ok(())
    }
}

/// The rolling-circle picture of a path: a point at `point_distance` from the
/// centre of a circle of radius `rolling_radius` rolling along a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathGeometry {
    /// `|U| / (k |m|)`; absent when `m = 0`.
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub rolling_radius: Option<f64>,
    /// `e^{kb} / k`
    #[serde(serialize_with = "numfmt::serialize")]
    pub point_distance: f64,
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub critical_depth: Option<f64>,
}

pub fn path_geometry(params: &WaveParameters, b: f64) -> Result<PathGeometry> {
    params.check_depth(b)?;
    let k = params.k;
    let rolling_radius = (params.m != 0.0).then(|| params.current.abs() / (k * params.m.abs()));
    Ok(PathGeometry {
        rolling_radius,
        point_distance: (k * b).exp() / k,
        critical_depth: critical_depth(params),
    })
}

/// Path shape of the particles on the label line of depth `b`.
pub fn classify_trajectory(
    params: &WaveParameters,
    b: f64,
) -> Result<(TrajectoryClass, PathGeometry)> {
    let geometry = path_geometry(params, b)?;
    let m = params.m;
    let u = params.current;
    let class = if m == 0.0 {
        TrajectoryClass::horizontal_line()
    } else if u == 0.0 {
        // the phase k(a - m t) runs backwards for m > 0
        TrajectoryClass::circle(if m > 0.0 {
            Orientation::Clockwise
        } else {
            Orientation::Counterclockwise
        })
    } else {
        let threshold = geometry.critical_depth.unwrap_or(f64::NAN);
        let subtype = if b > threshold {
            TrochoidSubtype::Prolate
        } else if b == threshold {
            TrochoidSubtype::Cuspidal
        } else {
            TrochoidSubtype::Curtate
        };
        TrajectoryClass::trochoid(u * m.signum() <= 0.0, subtype)
    };
    Ok((class, geometry))
}

/// The path point for the rescaled time `tau = sign(m) k (m t - a)`.
pub fn reparametrize_tau(
    params: &WaveParameters,
    label: ParticleLabel,
    tau: f64,
) -> Result<(f64, f64)> {
    let WaveParameters {
        k, m, c, current, ..
    } = *params;
    if m == 0.0 {
        return Err(Error::UndefinedForStagnation("tau parametrization"));
    }
    params.check_depth(label.b)?;
    let sign = m.signum();
    let r = (k * label.b).exp() / k;
    Ok((
        label.a * c / m + current * tau / (k * m * sign) + r * (sign * tau).sin(),
        label.b + r * tau.cos(),
    ))
}

/// Time at which the particle `label` reaches rescaled time `tau`.
pub fn tau_to_time(params: &WaveParameters, label: ParticleLabel, tau: f64) -> Result<f64> {
    let m = params.m;
    if m == 0.0 {
        return Err(Error::UndefinedForStagnation("tau parametrization"));
    }
    Ok((label.a + m.signum() * tau / params.k) / m)
}

/// Outcome of the geometric classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOutcome {
    Resolved(TrajectoryClass),
    /// The sampled geometry sits inside a tolerance band; no label is given.
    Unresolved(&'static str),
}

impl OracleOutcome {
    pub fn class(&self) -> Option<TrajectoryClass> {
        match self {
            OracleOutcome::Resolved(c) => Some(*c),
            OracleOutcome::Unresolved(_) => None,
        }
    }
}

impl Serialize for OracleOutcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        match self {
            OracleOutcome::Resolved(c) => {
                map.serialize_entry("kind", &c.kind)?;
                map.serialize_entry("subtype", &c.subtype)?;
                map.serialize_entry("orientation", &c.orientation)?;
            }
            OracleOutcome::Unresolved(reason) => {
                map.serialize_entry("kind", "Unresolved")?;
                map.serialize_entry("reason", reason)?;
            }
        }
        map.end()
    }
}

/// Samples per period taken by the oracle.
const ORACLE_SAMPLES: usize = 2048;
/// Relative band around zero inside which the slowest forward speed counts
/// as a cusp.
const CUSP_BAND: f64 = 1e-9;
/// Relative closure gap below which a one-period path counts as closed.
const CLOSURE_BAND: f64 = 1e-9;

/// Classifies the path of the particle with label `(0, b)` from samples of
/// the flow map over one period.
///
/// * Closed paths are circles if their distance to the mean point is
///   constant; the orientation is the sign of the enclosed area.
/// * Open paths are prolate if the horizontal velocity reverses against the
///   drift, curtate if it never drops to zero, and cuspidal in between.
/// * A trochoid whose slowest point is at the bottom of the path is plain,
///   one slowest at the top is reflected.
///
/// Anything falling inside a tolerance band is returned as unresolved.
pub fn classify_oracle(params: &WaveParameters, b: f64) -> Result<OracleOutcome> {
    params.check_depth(b)?;
    let label = ParticleLabel::new(0.0, b);
    if params.m == 0.0 {
        return oracle_without_orbit(params, label);
    }

    let period = orbit_period(params)?;
    let n = ORACLE_SAMPLES;
    let times: Vec<f64> = (0..=n).map(|i| period * i as f64 / n as f64).collect();
    let points = times
        .iter()
        .map(|&t| kinematics::position(params, t, label))
        .collect::<Result<Vec<_>>>()?;

    let r = (params.k * b).exp() / params.k;
    let scale = r + params.current.abs() * period;
    let (first, last) = (points[0], points[n]);
    let gap = (last.0 - first.0).hypot(last.1 - first.1);
    if gap <= CLOSURE_BAND * scale {
        return Ok(oracle_closed(&points[..n], r));
    }

    let forward = (last.0 - first.0).signum();
    let speed = |t: f64| -> Result<f64> { Ok(forward * kinematics::velocity(params, t, label)?.0) };
    let mut slowest = 0;
    let mut slowest_speed = f64::INFINITY;
    for (i, &t) in times[..n].iter().enumerate() {
        let s = speed(t)?;
        if s < slowest_speed {
            slowest = i;
            slowest_speed = s;
        }
    }
    let dt = period / n as f64;
    let (t_slow, s_slow) = golden_minimum(&speed, times[slowest] - dt, times[slowest] + dt)?;
    let speed_scale = params.current.abs() + params.m.abs() * (params.k * b).exp();
    let relative = s_slow.min(slowest_speed) / speed_scale;
    let subtype = if relative < -CUSP_BAND {
        TrochoidSubtype::Prolate
    } else if relative > CUSP_BAND {
        TrochoidSubtype::Curtate
    } else {
        TrochoidSubtype::Cuspidal
    };

    let (z_min, z_max) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    let half = 0.5 * (z_max - z_min);
    let middle = 0.5 * (z_max + z_min);
    if !(half > 0.0) {
        return Ok(OracleOutcome::Unresolved("path has no vertical excursion"));
    }
    let z_slow = kinematics::position(params, t_slow, label)?.1;
    let offset = (z_slow - middle) / half;
    if offset.abs() < 0.5 {
        return Ok(OracleOutcome::Unresolved(
            "slowest point is not at an extreme height",
        ));
    }
    Ok(OracleOutcome::Resolved(TrajectoryClass::trochoid(
        offset > 0.0,
        subtype,
    )))
}

fn oracle_closed(points: &[(f64, f64)], r: f64) -> OracleOutcome {
    let n = points.len() as f64;
    let (sx, sz) = points
        .iter()
        .fold((0.0, 0.0), |(x, z), p| (x + p.0, z + p.1));
    let centre = (sx / n, sz / n);
    let (lo, hi) = points.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), p| {
        let d = (p.0 - centre.0).hypot(p.1 - centre.1);
        (lo.min(d), hi.max(d))
    });
    if hi - lo > CLOSURE_BAND * r {
        return OracleOutcome::Unresolved("closed path is not a circle");
    }
    let area = signed_area(points);
    if area.abs() <= CLOSURE_BAND * r * r {
        return OracleOutcome::Unresolved("closed path encloses no area");
    }
    OracleOutcome::Resolved(TrajectoryClass::circle(if area > 0.0 {
        Orientation::Counterclockwise
    } else {
        Orientation::Clockwise
    }))
}

/// `m = 0`: follow the particle for two wavelengths of travel and check that
/// its height never changes while it keeps moving one way.
fn oracle_without_orbit(params: &WaveParameters, label: ParticleLabel) -> Result<OracleOutcome> {
    let speed = params.c.abs();
    if speed == 0.0 {
        return Ok(OracleOutcome::Unresolved("particle is at rest"));
    }
    let duration = 2.0 * params.wavelength() / speed;
    let n = ORACLE_SAMPLES;
    let points = (0..=n)
        .map(|i| kinematics::position(params, duration * i as f64 / n as f64, label))
        .collect::<Result<Vec<_>>>()?;
    let z0 = points[0].1;
    let level = points
        .iter()
        .all(|p| (p.1 - z0).abs() <= CLOSURE_BAND * (points[0].1.abs() + 1.0 / params.k));
    let monotone = points
        .windows(2)
        .all(|w| (w[1].0 - w[0].0) * params.c > 0.0);
    Ok(if level && monotone {
        OracleOutcome::Resolved(TrajectoryClass::horizontal_line())
    } else {
        OracleOutcome::Unresolved("stationary-wave path is not a straight line")
    })
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
fn golden_minimum(f: &impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Shoelace area of a closed polygon; positive when traversed counterclockwise.
pub fn signed_area(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (p, q) = (points[i], points[(i + 1) % n]);
            p.0 * q.1 - q.0 * p.1
        })
        .sum::<f64>()
        * 0.5
}

/// True if two non-adjacent segments of the polyline cross.
pub fn has_self_intersection(points: &[(f64, f64)]) -> bool {
    let cross = |o: (f64, f64), p: (f64, f64), q: (f64, f64)| {
        (p.0 - o.0) * (q.1 - o.1) - (p.1 - o.1) * (q.0 - o.0)
    };
    let segments = points.len().saturating_sub(1);
    for i in 0..segments {
        let (p1, p2) = (points[i], points[i + 1]);
        for j in i + 2..segments {
            let (q1, q2) = (points[j], points[j + 1]);
            let d1 = cross(q1, q2, p1);
            let d2 = cross(q1, q2, p2);
            let d3 = cross(p1, p2, q1);
            let d4 = cross(p1, p2, q2);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return true;
            }
        }
    }
    false
}

/// One row of classification output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationRecord {
    #[serde(serialize_with = "numfmt::serialize")]
    pub b: f64,
    pub kind: PathKind,
    pub subtype: Option<TrochoidSubtype>,
    pub orientation: Option<Orientation>,
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub rolling_radius: Option<f64>,
    #[serde(serialize_with = "numfmt::serialize")]
    pub point_distance: f64,
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub critical_depth: Option<f64>,
    #[serde(
        serialize_with = "numfmt::serialize_opt",
        skip_serializing_if = "Option::is_none"
    )]
    pub drift: Option<f64>,
    #[serde(
        serialize_with = "numfmt::serialize_opt",
        skip_serializing_if = "Option::is_none"
    )]
    pub period: Option<f64>,
    pub oracle: OracleOutcome,
    /// Oracle and formula give the same label. False when the oracle is unresolved.
    pub agreement: bool,
}

/// Formula and oracle classification of the label line `b`, side by side.
pub fn classification_record(params: &WaveParameters, b: f64) -> Result<ClassificationRecord> {
    let (class, geometry) = classify_trajectory(params, b)?;
    let oracle = classify_oracle(params, b)?;
    Ok(ClassificationRecord {
        b,
        kind: class.kind,
        subtype: class.subtype,
        orientation: class.orientation,
        rolling_radius: geometry.rolling_radius,
        point_distance: geometry.point_distance,
        critical_depth: geometry.critical_depth,
        drift: drift(params).ok(),
        period: orbit_period(params).ok(),
        agreement: oracle.class() == Some(class),
        oracle,
    })
}
