//! Observed order of accuracy from step-halving studies.

/// Order `p` implied by errors `e_coarse ~ C h^p` and `e_fine ~ C (h/ratio)^p`,
/// for quantities whose exact limit is known (residuals that must vanish).
pub fn observed_order(e_coarse: f64, e_fine: f64, ratio: f64) -> f64 {
    (e_coarse.abs() / e_fine.abs()).ln() / ratio.ln()
}

/// Orders between consecutive entries of an error sequence taken at steps
/// shrinking by `ratio` each time.
pub fn observed_orders(errors: &[f64], ratio: f64) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| observed_order(w[0], w[1], ratio))
        .collect()
}

/// Three-level Richardson estimate of the order when the limit is unknown:
/// `p = ln((f1 - f2)/(f2 - f3)) / ln(ratio)`, with `f1` the coarsest value.
pub fn richardson_order(f_coarse: f64, f_medium: f64, f_fine: f64, ratio: f64) -> f64 {
    ((f_coarse - f_medium) / (f_medium - f_fine)).abs().ln() / ratio.ln()
}

/// Richardson extrapolation to zero step for a method of order `p`.
pub fn extrapolate(f_coarse: f64, f_fine: f64, ratio: f64, p: f64) -> f64 {
    let rp = ratio.powf(p);
    (rp * f_fine - f_coarse) / (rp - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_the_order_of_a_power_law() {
        let errors: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|h: &f64| 3.0 * h * h)
            .collect();
        for p in observed_orders(&errors, 2.0) {
            assert!((p - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn three_level_estimate_on_a_central_difference() {
        // central difference of sin at 1: error ~ h^2
        let d = |h: f64| ((1.0 + h).sin() - (1.0 - h).sin()) / (2.0 * h);
        let p = richardson_order(d(0.1), d(0.05), d(0.025), 2.0);
        assert!((p - 2.0).abs() < 0.01, "{p}");
        let best = extrapolate(d(0.05), d(0.025), 2.0, 2.0);
        assert!((best - 1.0_f64.cos()).abs() < 1e-7);
    }
}
