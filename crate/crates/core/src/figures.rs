//! The two particle-path figure sets: seven classical panels that vary the
//! current, and fifteen geophysical panels that vary `m` at Earth rotation.
//!
//! Each panel traces the particles `a = 0` at five label depths over two
//! orbit periods and renders them as one SVG.

use std::fmt::Write as _;

use crate::analysis;
use crate::error::{Error, Result};
use crate::kinematics::{self, ParticleLabel};
use crate::numfmt::sig17;
use crate::params::{
    resolve_classical, resolve_geophysical_from_m, PhysicalConstants, Sign, WaveParameters,
};

/// Label depths traced in every panel, surface first.
pub const FIGURE_DEPTHS: [f64; 5] = [0.0, -0.8, -1.5, -2.0, -2.5];
/// Points per curve written by default.
pub const DEFAULT_SAMPLES: usize = 401;

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub figure: u8,
    /// 1-based panel number.
    pub index: usize,
    pub caption: String,
    pub params: WaveParameters,
}

impl Panel {
    pub fn file_name(&self) -> String {
        format!("figure{}_panel{:02}.svg", self.figure, self.index)
    }
}

/// Classical waves, `k = 1`, `m = sqrt(g)`, with the current running through
/// `-g, -sqrt(g), -g^(1/4), 0, g^(1/4), sqrt(g), g`.
pub fn figure_one() -> Result<Vec<Panel>> {
    let constants = PhysicalConstants::classical();
    let g = constants.g;
    let currents = [
        ("U = -g", -g),
        ("U = -sqrt(g)", -g.sqrt()),
        ("U = -g^(1/4)", -g.powf(0.25)),
        ("U = 0", 0.0),
        ("U = g^(1/4)", g.powf(0.25)),
        ("U = sqrt(g)", g.sqrt()),
        ("U = g", g),
    ];
    currents
        .iter()
        .enumerate()
        .map(|(i, &(caption, current))| {
            Ok(Panel {
                figure: 1,
                index: i + 1,
                caption: format!("k = 1, m = sqrt(g), {caption}"),
                params: resolve_classical(constants, 1.0, Sign::Plus, current)?,
            })
        })
        .collect()
}

/// Geophysical waves at Earth rotation, `k = 1`, over fifteen values of `m`.
pub fn figure_two() -> Result<Vec<Panel>> {
    let constants = PhysicalConstants::default();
    let (w, g) = (constants.omega, constants.g);
    let values = [
        ("m = -9w - sqrt(g)", -9.0 * w - g.sqrt()),
        (
            "m = -2w - sqrt(4w^2 + g)",
            -2.0 * w - (4.0 * w * w + g).sqrt(),
        ),
        ("m = -1.5w - sqrt(w^2 + g)", -1.5 * w - (w * w + g).sqrt()),
        ("m = -w - sqrt(w^2 + g)", -w - (w * w + g).sqrt()),
        ("m = -w/2 - sqrt(w^2 + g)", -0.5 * w - (w * w + g).sqrt()),
        ("m = -sqrt(g)", -g.sqrt()),
        ("m = -w - sqrt(g)", -w - g.sqrt()),
        ("m = 0", 0.0),
        (
            "m = -3w + sqrt(4w^2 + g)",
            -3.0 * w + (4.0 * w * w + g).sqrt(),
        ),
        (
            "m = -2w + sqrt(4w^2 + g)",
            -2.0 * w + (4.0 * w * w + g).sqrt(),
        ),
        (
            "m = -1.5w + sqrt(2.25w^2 + g)",
            -1.5 * w + (2.25 * w * w + g).sqrt(),
        ),
        ("m = -w + sqrt(w^2 + g)", -w + (w * w + g).sqrt()),
        (
            "m = -w/2 + sqrt(w^2/4 + g)",
            -0.5 * w + (0.25 * w * w + g).sqrt(),
        ),
        ("m = sqrt(g)", g.sqrt()),
        ("m = w + sqrt(w^2 + g)", w + (w * w + g).sqrt()),
    ];
    values
        .iter()
        .enumerate()
        .map(|(i, &(caption, m))| {
            Ok(Panel {
                figure: 2,
                index: i + 1,
                caption: format!("k = 1, {caption}"),
                params: resolve_geophysical_from_m(constants, 1.0, m)?,
            })
        })
        .collect()
}

pub fn figure(which: u8) -> Result<Vec<Panel>> {
    match which {
        1 => figure_one(),
        2 => figure_two(),
        other => Err(Error::domain(format!("no figure {other}; expected 1 or 2"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelCurve {
    pub b: f64,
    pub points: Vec<(f64, f64)>,
}

/// Time span of a panel: two orbit periods, or, when `m = 0` and there is
/// no orbit, the time to travel two wavelengths.
pub fn panel_duration(params: &WaveParameters) -> Result<f64> {
    match analysis::orbit_period(params) {
        Ok(period) => Ok(2.0 * period),
        Err(_) if params.c != 0.0 => Ok(2.0 * params.wavelength() / params.c.abs()),
        Err(e) => Err(e),
    }
}

/// Paths of the particles `(0, b)` for every panel depth, `samples` points each.
pub fn panel_curves(panel: &Panel, samples: usize) -> Result<Vec<PanelCurve>> {
    let duration = panel_duration(&panel.params)?;
    FIGURE_DEPTHS
        .iter()
        .map(|&b| {
            let path = kinematics::sample_trajectory(
                &panel.params,
                ParticleLabel::new(0.0, b),
                0.0,
                duration,
                samples,
            )?;
            Ok(PanelCurve {
                b,
                points: path.iter().map(|s| (s.state.x, s.state.z)).collect(),
            })
        })
        .collect()
}

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// SVG of one panel: curves in data coordinates under a single affine map
/// with equal scales on both axes, plus the frame and its range labels.
pub fn render_svg(panel: &Panel, curves: &[PanelCurve]) -> String {
    let (mut x0, mut x1, mut z0, mut z1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in curves.iter().flat_map(|c| &c.points) {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        z0 = z0.min(p.1);
        z1 = z1.max(p.1);
    }
    let span = (x1 - x0).max(z1 - z0).max(f64::MIN_POSITIVE);
    let scale = (CANVAS - 2.0 * MARGIN) / span;
    let width = (x1 - x0) * scale + 2.0 * MARGIN;
    let height = (z1 - z0) * scale + 2.0 * MARGIN;
    let tx = MARGIN - x0 * scale;
    let ty = MARGIN + z1 * scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.2}" height="{h:.2}" viewBox="0 0 {w:.2} {h:.2}">"#,
        w = width,
        h = height + 20.0,
    );
    let _ = writeln!(
        svg,
        "<title>Figure {} panel {}: {}</title>",
        panel.figure, panel.index, panel.caption
    );
    let _ = writeln!(
        svg,
        r#"<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
        width - 2.0 * MARGIN,
        height - 2.0 * MARGIN,
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{:.2}" font-size="12">x: [{}, {}]  z: [{}, {}]</text>"#,
        height - 0.5 * MARGIN + 20.0,
        sig17(x0),
        sig17(x1),
        sig17(z0),
        sig17(z1),
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{:.2}" font-size="14">{}</text>"#,
        0.6 * MARGIN,
        panel.caption
    );
    let _ = writeln!(
        svg,
        r#"<g transform="matrix({} 0 0 {} {} {})" fill="none" stroke="navy">"#,
        sig17(scale),
        sig17(-scale),
        sig17(tx),
        sig17(ty),
    );
    for curve in curves {
        let mut points = String::new();
        for (i, p) in curve.points.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{},{}", sig17(p.0), sig17(p.1));
        }
        let _ = writeln!(
            svg,
            r#"<polyline data-b="{}" vector-effect="non-scaling-stroke" stroke-width="1.5" points="{points}"/>"#,
            sig17(curve.b),
        );
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

/// `(file name, SVG text)` for every panel of a figure.
pub fn render_figure(which: u8, samples: usize) -> Result<Vec<(String, String)>> {
    figure(which)?
        .iter()
        .map(|panel| {
            Ok((
                panel.file_name(),
                render_svg(panel, &panel_curves(panel, samples)?),
            ))
        })
        .collect()
}
