//! Parameter sets for the wave family.
//!
//! A [`WaveParameters`] value carries every constant the flow map, the
//! pressure and the diagnostics depend on. The constructors enforce the
//! dispersion relation of each regime:
//!
//! * classical (`omega = 0`): `m^2 = g/k`, with `c` free and `U = c - m`;
//! * geophysical (`omega > 0`): `c = (g - k m^2) / (2 omega)`, with `m` free.
//!
//! Hand-built values are allowed; [`validate`] lists the relations they break.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numfmt::{self, sig17};

/// Earth's rotation rate used as the geophysical default, rad/s.
pub const EARTH_OMEGA: f64 = 7.3e-5;
/// Gravitational acceleration at the Earth's surface, m/s^2.
pub const EARTH_GRAVITY: f64 = 9.8;
pub const WATER_DENSITY: f64 = 1000.0;
pub const ATMOSPHERIC_PRESSURE: f64 = 101_325.0;

const RELATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    #[serde(serialize_with = "numfmt::serialize")]
    pub omega: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub g: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub rho: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub p0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            omega: EARTH_OMEGA,
            g: EARTH_GRAVITY,
            rho: WATER_DENSITY,
            p0: ATMOSPHERIC_PRESSURE,
        }
    }
}

impl PhysicalConstants {
    /// Earth constants with the Coriolis term switched off.
    pub fn classical() -> Self {
        PhysicalConstants {
            omega: 0.0,
            ..Default::default()
        }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        PhysicalConstants { omega, ..self }
    }

    pub fn with_gravity(self, g: f64) -> Self {
        PhysicalConstants { g, ..self }
    }

    fn check(&self) -> Result<()> {
        let all_finite = [self.omega, self.g, self.rho, self.p0]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::domain("physical constants must be finite"));
        }
        if self.omega < 0.0 {
            return Err(Error::domain(format!(
                "omega must be >= 0, got {}",
                self.omega
            )));
        }
        if self.g <= 0.0 {
            return Err(Error::domain(format!("g must be > 0, got {}", self.g)));
        }
        if self.rho <= 0.0 {
            return Err(Error::domain(format!("rho must be > 0, got {}", self.rho)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Classical,
    Geophysical,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "classical" => Ok(Regime::Classical),
            "geo" | "geophysical" => Ok(Regime::Geophysical),
            other => Err(Error::Parse(format!("unknown regime '{other}'"))),
        }
    }
}

/// Sign of `m` in the classical regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "1.0" | "+1.0" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "-1.0" | "minus" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!(
                "sign must be +1 or -1, got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Root of the quadratic for `m` picked when the current is prescribed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Lower,
    Upper,
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lower" => Ok(Branch::Lower),
            "upper" => Ok(Branch::Upper),
            other => Err(Error::Parse(format!(
                "branch must be lower or upper, got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        })
    }
}

/// The full constant set of one member of the wave family.
///
/// `current` is the uniform background current `U`; for values produced by
/// the resolvers `current == c - m` holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveParameters {
    pub constants: PhysicalConstants,
    #[serde(serialize_with = "numfmt::serialize")]
    pub k: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub b0: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub m: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub c: f64,
    #[serde(rename = "U", serialize_with = "numfmt::serialize")]
    pub current: f64,
    pub regime: Regime,
}

impl WaveParameters {
    /// Returns a copy with the surface label moved to `b0 <= 0`.
    pub fn with_b0(self, b0: f64) -> Result<Self> {
        if !(b0 <= 0.0) {
            return Err(Error::domain(format!(
                "surface label b0 must be <= 0, got {b0}"
            )));
        }
        Ok(WaveParameters { b0, ..self })
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k
    }

    /// `sqrt(g/k)`, the classical orbital speed.
    pub fn deep_water_speed(&self) -> f64 {
        (self.constants.g / self.k).sqrt()
    }

    pub fn regime_constants(&self) -> RegimeConstants {
        RegimeConstants::new(&self.constants, self.k)
    }

    /// Errors unless `b` is an admissible label depth (`b <= b0`).
    pub fn check_depth(&self, b: f64) -> Result<()> {
        if b.is_nan() || b > self.b0 {
            return Err(Error::domain(format!(
                "label depth b = {b} lies above the surface label b0 = {}",
                self.b0
            )));
        }
        Ok(())
    }
}

/// Classical regime: `m = sign * sqrt(g/k)`, `c = U + m`.
pub fn resolve_classical(
    constants: PhysicalConstants,
    k: f64,
    sign_m: Sign,
    current: f64,
) -> Result<WaveParameters> {
    constants.check()?;
    if constants.omega != 0.0 {
        return Err(Error::RegimeMismatch {
            regime: Regime::Classical,
            requirement: "omega = 0",
            omega: constants.omega,
        });
    }
    check_wave_number(k)?;
    if !current.is_finite() {
        return Err(Error::domain("current must be finite"));
    }
    let m = sign_m.as_f64() * (constants.g / k).sqrt();
    Ok(WaveParameters {
        constants,
        k,
        b0: 0.0,
        m,
        c: current + m,
        current,
        regime: Regime::Classical,
    })
}

/// Geophysical regime with `m` prescribed: `c = (g - k m^2)/(2 omega)`.
///
/// `m` is only known to its last bit, which pins `U` down only to about
/// `|dU/dm| * ulp(m)`; a current inside that band is stored as exactly zero
/// (and `c = m`). Likewise `c` is stored as zero when `g - k m^2` vanishes to
/// within rounding.
pub fn resolve_geophysical_from_m(
    constants: PhysicalConstants,
    k: f64,
    m: f64,
) -> Result<WaveParameters> {
    constants.check()?;
    check_rotating(&constants)?;
    check_wave_number(k)?;
    if !m.is_finite() {
        return Err(Error::domain("m must be finite"));
    }
    let PhysicalConstants { omega, g, .. } = constants;

    let numerator = g - k * m * m;
    let mut c = if numerator.abs() <= 4.0 * f64::EPSILON * g {
        0.0
    } else {
        numerator / (2.0 * omega)
    };
    let mut current = c - m;
    let resolution = 8.0 * f64::EPSILON * (m.abs() * (k * m.abs() + omega) / omega + c.abs());
    if m != 0.0 && current.abs() <= resolution {
        current = 0.0;
        c = m;
    }

    Ok(WaveParameters {
        constants,
        k,
        b0: 0.0,
        m,
        c,
        current,
        regime: Regime::Geophysical,
    })
}

/// Geophysical regime with the current prescribed.
///
/// Solves `k m^2 + 2 omega m + (2 omega U - g) = 0`; the discriminant must be
/// non-negative, i.e. `U <= (omega^2 + k g)/(2 k omega)` (a double root at
/// equality).
pub fn resolve_geophysical_from_current(
    constants: PhysicalConstants,
    k: f64,
    current: f64,
    branch: Branch,
) -> Result<WaveParameters> {
    constants.check()?;
    check_rotating(&constants)?;
    check_wave_number(k)?;
    if !current.is_finite() {
        return Err(Error::domain("current must be finite"));
    }
    let PhysicalConstants { omega, g, .. } = constants;

    let quarter_disc = omega * omega + k * g - 2.0 * k * omega * current;
    // a current equal to the bound (up to rounding of the bound itself) is the double root
    let scale = omega * omega + k * g + (2.0 * k * omega * current).abs();
    if quarter_disc < -4.0 * f64::EPSILON * scale {
        return Err(Error::NoSolution {
            current,
            bound: current_upper_bound(&constants, k),
        });
    }
    let root = quarter_disc.max(0.0).sqrt();
    // both roots without cancellation: omega > 0 and root >= 0
    let m = match branch {
        Branch::Lower => -(omega + root) / k,
        Branch::Upper => (g - 2.0 * omega * current) / (omega + root),
    };
    Ok(WaveParameters {
        constants,
        k,
        b0: 0.0,
        m,
        c: current + m,
        current,
        regime: Regime::Geophysical,
    })
}

/// Largest current for which a geophysical member exists, `(omega^2 + k g)/(2 k omega)`.
pub fn current_upper_bound(constants: &PhysicalConstants, k: f64) -> f64 {
    let PhysicalConstants { omega, g, .. } = *constants;
    (omega * omega + k * g) / (2.0 * k * omega)
}

fn check_rotating(constants: &PhysicalConstants) -> Result<()> {
    if constants.omega > 0.0 {
        Ok(())
    } else {
        Err(Error::RegimeMismatch {
            regime: Regime::Geophysical,
            requirement: "omega > 0",
            omega: constants.omega,
        })
    }
}

fn check_wave_number(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("wave number k must be > 0, got {k}")))
    }
}

/// The thresholds `m1 < m2` (circular orbits at `U = 0`) and `m3`, `m4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeConstants {
    #[serde(serialize_with = "numfmt::serialize")]
    pub m1: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub m2: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub m3: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub m4: f64,
}

impl RegimeConstants {
    pub fn new(constants: &PhysicalConstants, k: f64) -> Self {
        let PhysicalConstants { omega, g, .. } = *constants;
        let r12 = (omega * omega + g * k).sqrt();
        let r34 = (4.0 * omega * omega + g * k).sqrt();
        RegimeConstants {
            m1: -(omega + r12) / k,
            m2: g / (omega + r12),
            m3: -(2.0 * omega + r34) / k,
            m4: g / (2.0 * omega + r34),
        }
    }
}

pub fn regime_constants(constants: &PhysicalConstants, k: f64) -> Result<RegimeConstants> {
    constants.check()?;
    check_wave_number(k)?;
    Ok(RegimeConstants::new(constants, k))
}

/// One broken relation found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite(&'static str),
    NegativeOmega { omega: f64 },
    NonPositiveGravity { g: f64 },
    NonPositiveDensity { rho: f64 },
    NonPositiveWaveNumber { k: f64 },
    SurfaceLabelAboveZero { b0: f64 },
    CurrentMismatch { current: f64, c_minus_m: f64 },
    ClassicalWithRotation { omega: f64 },
    ClassicalDispersion { m: f64, expected_abs: f64 },
    GeophysicalWithoutRotation,
    GeophysicalSpeed { c: f64, expected: f64 },
    SpeedAboveBound { c: f64, bound: f64 },
    CurrentAboveBound { current: f64, bound: f64 },
}

impl Violation {
    /// Short stable identifier used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NonFinite(_) => "non_finite",
            Violation::NegativeOmega { .. } => "omega",
            Violation::NonPositiveGravity { .. } => "g",
            Violation::NonPositiveDensity { .. } => "rho",
            Violation::NonPositiveWaveNumber { .. } => "k",
            Violation::SurfaceLabelAboveZero { .. } => "b0",
            Violation::CurrentMismatch { .. } => "current",
            Violation::ClassicalWithRotation { .. } => "classical_omega",
            Violation::ClassicalDispersion { .. } => "classical_dispersion",
            Violation::GeophysicalWithoutRotation => "geophysical_omega",
            Violation::GeophysicalSpeed { .. } => "geophysical_speed",
            Violation::SpeedAboveBound { .. } => "restr2",
            Violation::CurrentAboveBound { .. } => "restr1",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite(name) => write!(f, "{name} is not finite"),
            Violation::NegativeOmega { omega } => write!(f, "omega = {omega} is negative"),
            Violation::NonPositiveGravity { g } => write!(f, "g = {g} is not positive"),
            Violation::NonPositiveDensity { rho } => write!(f, "rho = {rho} is not positive"),
            Violation::NonPositiveWaveNumber { k } => write!(f, "k = {k} is not positive"),
            Violation::SurfaceLabelAboveZero { b0 } => write!(f, "b0 = {b0} must be <= 0"),
            Violation::CurrentMismatch { current, c_minus_m } => {
                write!(f, "U = {current} differs from c - m = {c_minus_m}")
            }
            Violation::ClassicalWithRotation { omega } => {
                write!(f, "classical regime with omega = {omega}")
            }
            Violation::ClassicalDispersion { m, expected_abs } => {
                write!(
                    f,
                    "classical regime needs |m| = sqrt(g/k) = {expected_abs}, got m = {m}"
                )
            }
            Violation::GeophysicalWithoutRotation => write!(f, "geophysical regime with omega = 0"),
            Violation::GeophysicalSpeed { c, expected } => {
                write!(f, "c = {c} differs from (g - k m^2)/(2 omega) = {expected}")
            }
            Violation::SpeedAboveBound { c, bound } => {
                write!(f, "c = {c} exceeds g/(2 omega) = {bound}")
            }
            Violation::CurrentAboveBound { current, bound } => {
                write!(
                    f,
                    "U = {current} exceeds (omega^2 + k g)/(2 k omega) = {bound}"
                )
            }
        }
    }
}

impl Serialize for Violation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Violation", 2)?;
        st.serialize_field("code", self.code())?;
        st.serialize_field("message", &self.to_string())?;
        st.end()
    }
}

/// Lists every invariant `params` breaks; empty when the set is consistent.
pub fn validate(params: &WaveParameters) -> Vec<Violation> {
    let mut out = Vec::new();
    let WaveParameters {
        constants,
        k,
        b0,
        m,
        c,
        current,
        regime,
    } = *params;
    let PhysicalConstants { omega, g, rho, p0 } = constants;

    let named = [
        ("omega", omega),
        ("g", g),
        ("rho", rho),
        ("p0", p0),
        ("k", k),
        ("b0", b0),
        ("m", m),
        ("c", c),
        ("U", current),
    ];
    for (name, value) in named {
        if !value.is_finite() {
            out.push(Violation::NonFinite(name));
        }
    }
    if !out.is_empty() {
        return out;
    }

    if omega < 0.0 {
        out.push(Violation::NegativeOmega { omega });
    }
    if g <= 0.0 {
        out.push(Violation::NonPositiveGravity { g });
    }
    if rho <= 0.0 {
        out.push(Violation::NonPositiveDensity { rho });
    }
    if k <= 0.0 {
        out.push(Violation::NonPositiveWaveNumber { k });
    }
    if b0 > 0.0 {
        out.push(Violation::SurfaceLabelAboveZero { b0 });
    }

    let scale = current.abs().max(c.abs()).max(m.abs());
    let c_minus_m = c - m;
    if (current - c_minus_m).abs() > RELATION_TOL * scale {
        out.push(Violation::CurrentMismatch { current, c_minus_m });
    }

    match regime {
        Regime::Classical => {
            if omega != 0.0 {
                out.push(Violation::ClassicalWithRotation { omega });
            }
            if k > 0.0 && (k * m * m - g).abs() > RELATION_TOL * g {
                out.push(Violation::ClassicalDispersion {
                    m,
                    expected_abs: (g / k).sqrt(),
                });
            }
        }
        Regime::Geophysical => {
            if omega <= 0.0 {
                out.push(Violation::GeophysicalWithoutRotation);
            } else {
                let residual = k * m * m + 2.0 * omega * c - g;
                let size = g + k * m * m + (2.0 * omega * c).abs();
                if residual.abs() > RELATION_TOL * size {
                    out.push(Violation::GeophysicalSpeed {
                        c,
                        expected: (g - k * m * m) / (2.0 * omega),
                    });
                }
                let speed_bound = g / (2.0 * omega);
                if c > speed_bound * (1.0 + 4.0 * f64::EPSILON) {
                    out.push(Violation::SpeedAboveBound {
                        c,
                        bound: speed_bound,
                    });
                }
                if k > 0.0 {
                    let bound = current_upper_bound(&constants, k);
                    if current > bound * (1.0 + RELATION_TOL) {
                        out.push(Violation::CurrentAboveBound { current, bound });
                    }
                }
            }
        }
    }
    out
}

/// Flat `key=value` description of a parameter set, as read from a config
/// file or assembled from command-line flags.
///
/// Exactly one closure must be present: `m`, `U` with `branch`, or `U` with
/// `sign_m`. Unset constants fall back to the regime defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSpec {
    pub regime: Option<Regime>,
    pub omega: Option<f64>,
    pub g: Option<f64>,
    pub rho: Option<f64>,
    pub p0: Option<f64>,
    pub k: Option<f64>,
    pub b0: Option<f64>,
    pub m: Option<f64>,
    pub current: Option<f64>,
    pub branch: Option<Branch>,
    pub sign_m: Option<Sign>,
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{key}: '{value}' is not a number")))
}

impl ParamSpec {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = ParamSpec::default();
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "line {}: expected key=value, got '{line}'",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            if seen.insert(key.to_string(), lineno).is_some() {
                return Err(Error::Parse(format!(
                    "line {}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
            spec.set(key, value)?;
        }
        Ok(spec)
    }

    /// Sets one key; accepts the same names as the config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "regime" => self.regime = Some(value.parse()?),
            "omega" => self.omega = Some(parse_number(key, value)?),
            "g" => self.g = Some(parse_number(key, value)?),
            "rho" => self.rho = Some(parse_number(key, value)?),
            "p0" => self.p0 = Some(parse_number(key, value)?),
            "k" => self.k = Some(parse_number(key, value)?),
            "b0" => self.b0 = Some(parse_number(key, value)?),
            "m" => self.m = Some(parse_number(key, value)?),
            "U" => self.current = Some(parse_number(key, value)?),
            "branch" => self.branch = Some(value.parse()?),
            "sign_m" => self.sign_m = Some(value.parse()?),
            other => return Err(Error::Parse(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        *self == ParamSpec::default()
    }

    /// Writes the present keys back out with 17 significant digits.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let mut push = |key: &str, value: String| {
            out.push_str(key);
            out.push('=');
            out.push_str(&value);
            out.push('\n');
        };
        if let Some(r) = self.regime {
            push(
                "regime",
                match r {
                    Regime::Classical => "classical",
                    Regime::Geophysical => "geophysical",
                }
                .to_string(),
            );
        }
        let numbers = [
            ("omega", self.omega),
            ("g", self.g),
            ("rho", self.rho),
            ("p0", self.p0),
            ("k", self.k),
            ("b0", self.b0),
            ("m", self.m),
            ("U", self.current),
        ];
        for (key, value) in numbers {
            if let Some(v) = value {
                push(key, sig17(v));
            }
        }
        if let Some(b) = self.branch {
            push("branch", b.to_string());
        }
        if let Some(s) = self.sign_m {
            push("sign_m", s.to_string());
        }
        out
    }

    /// Resolves the document into a parameter set.
    pub fn resolve(&self) -> Result<WaveParameters> {
        enum Closure {
            Gerstner(f64),
            Current(f64, Branch),
            Classical(f64, Sign),
        }
        let closure = match (self.m, self.current, self.branch, self.sign_m) {
            (Some(m), None, None, None) => Closure::Gerstner(m),
            (None, Some(u), Some(b), None) => Closure::Current(u, b),
            (None, Some(u), None, Some(s)) => Closure::Classical(u, s),
            _ => {
                return Err(Error::Parse(
                    "give exactly one of: m | U with branch | U with sign_m".into(),
                ))
            }
        };
        let implied = match closure {
            Closure::Classical(..) => Regime::Classical,
            _ => Regime::Geophysical,
        };
        if let Some(r) = self.regime {
            if r != implied {
                return Err(Error::Parse(format!(
                    "regime {r:?} does not match the given closure (implies {implied:?})"
                )));
            }
        }
        let k = self
            .k
            .ok_or_else(|| Error::Parse("missing wave number k".into()))?;
        let defaults = match implied {
            Regime::Classical => PhysicalConstants::classical(),
            Regime::Geophysical => PhysicalConstants::default(),
        };
        let constants = PhysicalConstants {
            omega: self.omega.unwrap_or(defaults.omega),
            g: self.g.unwrap_or(defaults.g),
            rho: self.rho.unwrap_or(defaults.rho),
            p0: self.p0.unwrap_or(defaults.p0),
        };
        let params = match closure {
            Closure::Gerstner(m) => resolve_geophysical_from_m(constants, k, m)?,
            Closure::Current(u, b) => resolve_geophysical_from_current(constants, k, u, b)?,
            Closure::Classical(u, s) => resolve_classical(constants, k, s, u)?,
        };
        params.with_b0(self.b0.unwrap_or(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn earth() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn classical_gerstner_has_m_equal_c() {
        let p = resolve_classical(PhysicalConstants::classical(), 1.0, Sign::Plus, 0.0).unwrap();
        assert_eq!(p.m, 9.8_f64.sqrt());
        assert_eq!(p.c, p.m);
        assert_eq!(p.current, 0.0);
        assert!((p.m - 3.1305).abs() < 1e-4);
        assert_eq!(p.regime, Regime::Classical);
    }

    #[test]
    fn classical_current_opposite_to_m_stops_the_wave() {
        let p = resolve_classical(
            PhysicalConstants::classical(),
            1.0,
            Sign::Plus,
            -(9.8_f64.sqrt()),
        )
        .unwrap();
        assert_eq!(p.c, 0.0);
    }

    #[test]
    fn classical_negative_sign() {
        let p = resolve_classical(PhysicalConstants::classical(), 1.0, Sign::Minus, 9.8).unwrap();
        assert!((p.m + 3.130_495_168_499_705_5).abs() < 1e-15);
        assert!((p.c - 6.669_504_831_500_295).abs() < 1e-14);
        assert!(validate(&p).is_empty());
    }

    #[test]
    fn classical_rejects_rotation_and_bad_k() {
        let err = resolve_classical(earth(), 1.0, Sign::Plus, 0.0).unwrap_err();
        assert!(matches!(err, Error::RegimeMismatch { .. }));
        let err =
            resolve_classical(PhysicalConstants::classical(), 0.0, Sign::Plus, 0.0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let err =
            resolve_classical(PhysicalConstants::classical(), -2.0, Sign::Plus, 0.0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn stagnation_member_moves_at_the_speed_bound() {
        let p = resolve_geophysical_from_m(earth(), 1.0, 0.0).unwrap();
        assert_eq!(p.c, 9.8 / (2.0 * 7.3e-5));
        assert_eq!(p.current, p.c);
        assert!(validate(&p).is_empty());
    }

    #[test]
    fn m2_gives_zero_current() {
        let rc = regime_constants(&earth(), 1.0).unwrap();
        let p = resolve_geophysical_from_m(earth(), 1.0, rc.m2).unwrap();
        assert_eq!(p.current, 0.0);
        let p = resolve_geophysical_from_m(earth(), 1.0, rc.m1).unwrap();
        assert_eq!(p.current, 0.0);
    }

    #[test]
    fn sqrt_g_member_has_zero_speed() {
        let m = 9.8_f64.sqrt();
        let p = resolve_geophysical_from_m(earth(), 1.0, m).unwrap();
        assert_eq!(p.c, 0.0);
        assert_eq!(p.current, -m);
    }

    #[test]
    fn from_m_rejects_zero_rotation() {
        let err = resolve_geophysical_from_m(PhysicalConstants::classical(), 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::RegimeMismatch { .. }));
    }

    #[test]
    fn zero_current_recovers_m1_and_m2() {
        let rc = regime_constants(&earth(), 1.0).unwrap();
        let lo = resolve_geophysical_from_current(earth(), 1.0, 0.0, Branch::Lower).unwrap();
        let hi = resolve_geophysical_from_current(earth(), 1.0, 0.0, Branch::Upper).unwrap();
        assert!((lo.m - rc.m1).abs() <= 4.0 * f64::EPSILON * rc.m1.abs());
        assert!((hi.m - rc.m2).abs() <= 4.0 * f64::EPSILON * rc.m2.abs());
    }

    #[test]
    fn current_at_the_bound_gives_a_double_root() {
        let c = earth();
        let bound = current_upper_bound(&c, 1.0);
        let lo = resolve_geophysical_from_current(c, 1.0, bound, Branch::Lower).unwrap();
        let hi = resolve_geophysical_from_current(c, 1.0, bound, Branch::Upper).unwrap();
        let expected = -c.omega;
        // a double root is only square-root conditioned
        assert!((lo.m - expected).abs() < 1e-6, "{}", lo.m);
        assert!((hi.m - expected).abs() < 1e-6, "{}", hi.m);
    }

    #[test]
    fn current_above_the_bound_has_no_solution() {
        let c = earth();
        let bound = current_upper_bound(&c, 1.0);
        let err = resolve_geophysical_from_current(c, 1.0, bound + 1.0, Branch::Upper).unwrap_err();
        assert!(matches!(err, Error::NoSolution { .. }));
    }

    #[test]
    fn regime_constants_collapse_without_rotation() {
        let rc = regime_constants(&PhysicalConstants::classical(), 1.0).unwrap();
        let root = 9.8_f64.sqrt();
        assert_eq!(rc.m1, -root);
        assert!((rc.m2 - root).abs() <= 2.0 * f64::EPSILON * root);
    }

    #[test]
    fn regime_constants_earth_values() {
        // values from evaluating the closed forms directly, each root
        // substituted back into its quadratic below
        let rc = regime_constants(&earth(), 1.0).unwrap();
        assert!((rc.m1 + 3.130_568_169_350_849).abs() < 1e-12);
        assert!((rc.m2 - 3.130_422_169_350_849).abs() < 1e-12);
        assert!((rc.m3 + 3.130_641_171_904_279).abs() < 1e-12);
        assert!((rc.m4 - 3.130_349_171_904_279).abs() < 1e-12);
        let (w, g) = (7.3e-5, 9.8);
        for m in [rc.m1, rc.m2] {
            assert!((m * m + 2.0 * w * m - g).abs() < 1e-13);
        }
        for m in [rc.m3, rc.m4] {
            assert!((m * m + 4.0 * w * m - g).abs() < 1e-13);
        }
        assert!(rc.m3 < rc.m1 && rc.m1 < 0.0 && 0.0 < rc.m4 && rc.m4 < rc.m2);
    }

    #[test]
    fn validate_flags_hand_built_sets() {
        let good = resolve_classical(PhysicalConstants::classical(), 1.0, Sign::Plus, 0.0).unwrap();
        assert!(validate(&good).is_empty());

        let geo = resolve_geophysical_from_m(earth(), 1.0, 1.0).unwrap();
        let broken = WaveParameters {
            c: 9.8 / 7.3e-5,
            ..geo
        };
        let codes: Vec<_> = validate(&broken).iter().map(|v| v.code()).collect();
        assert!(codes.contains(&"restr2"), "{codes:?}");

        let above = WaveParameters { b0: 0.1, ..good };
        let codes: Vec<_> = validate(&above).iter().map(|v| v.code()).collect();
        assert!(codes.contains(&"b0"), "{codes:?}");
    }

    #[test]
    fn with_b0_rejects_positive_labels() {
        let p = resolve_classical(PhysicalConstants::classical(), 1.0, Sign::Plus, 0.0).unwrap();
        assert!(p.with_b0(0.1).is_err());
        assert_eq!(p.with_b0(-1.0).unwrap().b0, -1.0);
    }

    #[test]
    fn document_parsing() {
        let text = "# equatorial\nk = 1\nm=0 # stagnation\nomega=7.3e-5\n";
        let spec = ParamSpec::parse(text).unwrap();
        let p = spec.resolve().unwrap();
        assert_eq!(p.regime, Regime::Geophysical);
        assert_eq!(p.c, p.current);

        let spec = ParamSpec::parse("k=1\nU=0\nsign_m=+1\n").unwrap();
        let p = spec.resolve().unwrap();
        assert_eq!(p.regime, Regime::Classical);
        assert_eq!(p.constants.omega, 0.0);

        assert!(ParamSpec::parse("k=1\nm=1\nU=0\nbranch=upper")
            .unwrap()
            .resolve()
            .is_err());
        assert!(ParamSpec::parse("k=1\nk=2").is_err());
        assert!(ParamSpec::parse("k=one").is_err());
        assert!(ParamSpec::parse("nonsense").is_err());
        assert!(ParamSpec::parse("m=1").unwrap().resolve().is_err());
    }

    #[test]
    fn explicit_regime_must_match_closure() {
        let spec = ParamSpec::parse("regime=classical\nk=1\nm=1").unwrap();
        assert!(matches!(spec.resolve(), Err(Error::Parse(_))));
        let spec = ParamSpec::parse("regime=classical\nk=1\nU=0\nsign_m=-1\nomega=1e-4").unwrap();
        assert!(matches!(spec.resolve(), Err(Error::RegimeMismatch { .. })));
    }
}
