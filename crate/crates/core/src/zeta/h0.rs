//! Divergence threshold of `∫ |f|^{-h} φ` from dyadic shell sums.

use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::funcmodel::{BumpFunction, SmoothModelFunction};
use crate::newton::{newton_distance, polyhedron_of};
use crate::quad::QuadratureConfig;
use crate::C64;

use super::logquad::{box_integral, BoxSpec, Powers};

#[derive(Debug, Clone, Serialize)]
pub struct H0Estimate {
    /// Estimated threshold: `∫ |f|^{-h} φ` converges for `h < h0`.
    pub h0: f64,
    /// Range of the thresholds from adjacent pairs of exponents.
    pub interval: (f64, f64),
    pub sigmas: Vec<f64>,
    /// Growth rate of the shell sums per dyadic step, one per exponent.
    pub slopes: Vec<f64>,
    /// `1 / d(f)` from the Newton polyhedron, when it exists.
    pub newton_inverse: Option<f64>,
    /// Set when the shell sums are far from geometric or the rates far from linear.
    pub ambiguous: bool,
}

/// First and last shell index.
const SHELLS: (i32, i32) = (10, 40);

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let resid = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - icpt - slope * a).abs())
        .fold(0.0, f64::max);
    (slope, icpt, resid)
}

/// Estimate the divergence threshold by measuring how `∫_{2^{-n-1} < |y| < 2^{-n}} |f|^σ φ`
/// grows with `n` for a few negative `σ` and locating where the growth rate
/// changes sign.
pub fn h0_estimate(f: &SmoothModelFunction, phi: &BumpFunction, cfg: &QuadratureConfig) -> Result<H0Estimate> {
    let scale = f.a.max(1) as f64;
    let sigmas: Vec<f64> = [-0.3, -0.5, -0.7].iter().map(|s| s / scale).collect();
    let ss: Vec<C64> = sigmas.iter().map(|&s| C64::new(s, 0.0)).collect();
    let pw = Powers::new(&ss);
    let expr = f.to_expr();
    let [[xl, xh], [yl, yh]] = phi.support_box();
    let weight = |x: f64, y: f64| phi.eval(x, y);
    let x_range = |_: f64| (xl, xh);
    let ns: Vec<f64> = (SHELLS.0..=SHELLS.1).map(|n| n as f64).collect();
    let mut logs = vec![Vec::new(); ss.len()];
    for &n in &ns {
        let (lo, hi) = (2f64.powf(-n - 1.0), 2f64.powf(-n));
        let mut total = vec![0.0; ss.len()];
        for (a, b) in [(lo, hi), (-hi, -lo)] {
            if b <= yl || a >= yh {
                continue;
            }
            let spec = BoxSpec {
                expr: &expr,
                weight: &weight,
                x_range: &x_range,
                y_breaks: vec![a.max(yl), b.min(yh)],
                x_hint: f.a as f64 * pw.sigma,
                y_hint: 0.0,
            };
            let (v, _) = box_integral(&spec, &pw, cfg.tol);
            for (t, z) in total.iter_mut().zip(v) {
                *t += z.re;
            }
        }
        for (l, t) in logs.iter_mut().zip(total) {
            if !(t > 0.0) {
                return Err(ZetaError::Diagnostic(format!("shell {n} has no mass")));
            }
            l.push(t.ln());
        }
    }
    let mut slopes = Vec::new();
    let mut ambiguous = false;
    for l in &logs {
        let (slope, _, resid) = least_squares(&ns, l);
        ambiguous |= resid > 0.5;
        slopes.push(slope);
    }
    let (beta, alpha, resid) = least_squares(&sigmas, &slopes);
    ambiguous |= resid > 0.05 * beta.abs() * (sigmas[0] - sigmas[2]).abs();
    if beta == 0.0 || !beta.is_finite() {
        return Err(ZetaError::Diagnostic("shell growth rate does not depend on σ".into()));
    }
    let h0 = alpha / beta;
    let mut pair_roots = Vec::new();
    for k in 1..sigmas.len() {
        let b = (slopes[k] - slopes[k - 1]) / (sigmas[k] - sigmas[k - 1]);
        if b != 0.0 {
            let root = sigmas[k] - slopes[k] / b;
            pair_roots.push(-root);
        }
    }
    let lo = pair_roots.iter().copied().fold(h0, f64::min);
    let hi = pair_roots.iter().copied().fold(h0, f64::max);
    let newton_inverse = polyhedron_of(f).ok().map(|p| {
        let d = newton_distance(&p);
        *d.denom() as f64 / *d.numer() as f64
    });
    Ok(H0Estimate {
        h0,
        interval: (lo, hi),
        sigmas,
        slopes,
        newton_inverse,
        ambiguous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_threshold() {
        let f = SmoothModelFunction::monomial(1, 2);
        let phi = BumpFunction::product([1.0, 1.0], [0.5, 0.5]);
        let e = h0_estimate(&f, &phi, &QuadratureConfig::default()).unwrap();
        assert!((e.h0 - 0.5).abs() < 0.02, "{e:?}");
        assert_eq!(e.newton_inverse, Some(0.5));
        // shells of y^{2σ}: rate -(2σ+1) ln 2
        for (s, k) in e.sigmas.iter().zip(&e.slopes) {
            assert!((k + (2.0 * s + 1.0) * std::f64::consts::LN_2).abs() < 1e-6);
        }
    }
}
