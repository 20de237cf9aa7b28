//! Van der Corput-type estimates: if `|f^{(k)}| > η` on `I` then
//! `∫_I |f|^σ < C(σ, k) η^σ |I|^{1+kσ}` for `σ ∈ (-1/k, 0)`.
//!
//! The integral is computed through the distribution function
//! `F(λ) = |{x ∈ I : |f(x)| ≤ λ}|` and the layer-cake identity
//! `∫_I |f|^σ = -σ ∫_0^∞ λ^{σ-1} F(λ) dλ`, and independently by direct
//! quadrature.

use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::model1d::{fd_step, richardson_coefficient};
use crate::quad::{integrate_singular, Tolerance};
use crate::C64;

const TOL: Tolerance = Tolerance {
    abs: 1e-15,
    rel: 1e-11,
    max_intervals: 2000,
};

/// `|f|` sampled on a grid refined by its zeros and local extrema, so that
/// `|f|` is monotone on every cell.
struct Sampler<'a, F> {
    f: &'a F,
    xs: Vec<f64>,
    ys: Vec<f64>,
    zeros: Vec<f64>,
    /// Values of `|f|` at interior local extrema and at the endpoints.
    critical: Vec<f64>,
    scale: f64,
}

fn bisect<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        if (g(m) > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for an extremum of `g` on `[a, b]`; `sign = 1` finds a maximum.
fn golden<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, sign: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if sign * g(c) > sign * g(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    0.5 * (a + b)
}

impl<'a, F: Fn(f64) -> f64> Sampler<'a, F> {
    fn build(f: &'a F, lo: f64, hi: f64, resolution: usize) -> Result<Self> {
        if hi.is_nan() || lo.is_nan() || hi <= lo {
            return Err(ZetaError::Precondition("interval must satisfy lo < hi".into()));
        }
        let n = resolution.max(16);
        let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let raw: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let abs: Vec<f64> = raw.iter().map(|y| y.abs()).collect();
        let scale = abs.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut zeros = Vec::new();
        for i in 0..n {
            if raw[i] == 0.0 {
                zeros.push(grid[i]);
            } else if raw[i] * raw[i + 1] < 0.0 {
                zeros.push(bisect(f, grid[i], grid[i + 1]));
            }
        }
        if raw[n] == 0.0 {
            zeros.push(grid[n]);
        }
        let mut extrema = Vec::new();
        let mut critical = vec![abs[0], abs[n]];
        for i in 1..n {
            let (l, c, r) = (abs[i - 1], abs[i], abs[i + 1]);
            let is_max = c >= l && c >= r && (c > l || c > r);
            let is_min = c <= l && c <= r && (c < l || c < r);
            if !(is_max || is_min) {
                continue;
            }
            let x = golden(|x| f(x).abs(), grid[i - 1], grid[i + 1], if is_max { 1.0 } else { -1.0 });
            let v = f(x).abs();
            if is_min && v <= 1e-13 * scale {
                if !zeros.iter().any(|z| (z - x).abs() < (hi - lo) / n as f64) {
                    zeros.push(x);
                }
            } else {
                extrema.push(x);
                critical.push(v);
            }
        }
        let mut xs: Vec<f64> = grid.iter().chain(&zeros).chain(&extrema).copied().collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (hi - lo));
        let ys: Vec<f64> = xs.iter().map(|&x| f(x).abs()).collect();
        for i in 0..xs.len() - 1 {
            let m = f(0.5 * (xs[i] + xs[i + 1])).abs();
            let (a, b) = (ys[i].min(ys[i + 1]), ys[i].max(ys[i + 1]));
            if m < a - 1e-12 * scale || m > b + 1e-12 * scale {
                return Err(ZetaError::Diagnostic(format!(
                    "|f| is not monotone on [{}, {}] at resolution {n}; increase the resolution",
                    xs[i],
                    xs[i + 1]
                )));
            }
        }
        zeros.sort_by(f64::total_cmp);
        critical.sort_by(f64::total_cmp);
        Ok(Self {
            f,
            xs,
            ys,
            zeros,
            critical,
            scale,
        })
    }

    fn max_abs(&self) -> f64 {
        self.scale
    }

    fn measure(&self, lambda: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.xs.len() - 1 {
            let (x0, x1) = (self.xs[i], self.xs[i + 1]);
            let (a, b) = (self.ys[i] <= lambda, self.ys[i + 1] <= lambda);
            total += match (a, b) {
                (true, true) => x1 - x0,
                (false, false) => 0.0,
                _ => {
                    let root = bisect(|x| (self.f)(x).abs() - lambda, x0, x1);
                    if a {
                        root - x0
                    } else {
                        x1 - root
                    }
                }
            };
        }
        total
    }
}

/// `|{x ∈ [lo, hi] : |f(x)| ≤ λ}|`.
pub fn distribution_function<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, lambda: f64, resolution: usize) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(ZetaError::Precondition("λ must be nonnegative".into()));
    }
    Ok(Sampler::build(&f, lo, hi, resolution)?.measure(lambda))
}

#[derive(Debug, Clone, Serialize)]
pub struct LayerCake {
    /// `-σ ∫ λ^{σ-1} F(λ) dλ`.
    pub layer_cake: f64,
    /// `∫_I |f|^σ` by direct quadrature.
    pub direct: f64,
    pub discrepancy: f64,
}

fn zero_order<F: Fn(f64) -> f64>(f: &F, x0: f64, lo: f64, hi: f64) -> u32 {
    let h = 1e-3 * (hi - lo);
    let side = if x0 + h <= hi { 1.0 } else { -1.0 };
    let (a, b) = (f(x0 + side * h).abs(), f(x0 + side * 0.1 * h).abs());
    if a == 0.0 || b == 0.0 {
        return 1;
    }
    ((a / b).log10().round() as i64).clamp(1, 8) as u32
}

fn direct_integral<F: Fn(f64) -> f64>(s: &Sampler<'_, F>, lo: f64, hi: f64, sigma: f64) -> Result<f64> {
    let f = s.f;
    let mut breaks = vec![lo, hi];
    breaks.extend(s.zeros.iter().copied());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (hi - lo));
    let hint = |x: f64| -> Result<Option<f64>> {
        if !s.zeros.iter().any(|z| (z - x).abs() <= 1e-15 * (hi - lo)) {
            return Ok(None);
        }
        let e = sigma * zero_order(f, x, lo, hi) as f64;
        if e <= -1.0 {
            return Err(ZetaError::DivergenceSuspected(format!(
                "∫|f|^σ diverges at the zero x = {x} (local exponent {e})"
            )));
        }
        Ok(Some(e))
    };
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (h0, h1) = (hint(w[0])?, hint(w[1])?);
        let r = integrate_singular(
            |x: f64| {
                let y = f(x).abs();
                if y == 0.0 {
                    0.0
                } else {
                    y.powf(sigma)
                }
            },
            w[0],
            w[1],
            h0,
            h1,
            TOL,
        );
        total += r.value;
    }
    Ok(total)
}

fn layer_cake_value<F: Fn(f64) -> f64>(s: &Sampler<'_, F>, lo: f64, hi: f64, sigma: f64) -> Result<f64> {
    let big_m = s.max_abs();
    let len = hi - lo;
    let min_abs = s.ys.iter().copied().fold(f64::INFINITY, f64::min);
    let lambda_min = 1e-8 * big_m;
    let (start, tail) = if min_abs > lambda_min {
        (min_abs, 0.0)
    } else {
        let f1 = s.measure(lambda_min);
        let f2 = s.measure(0.25 * lambda_min);
        if f1 <= 0.0 || f2 <= 0.0 {
            (lambda_min, 0.0)
        } else {
            let gamma = (f1 / f2).ln() / 4f64.ln();
            if sigma + gamma <= 0.0 {
                return Err(ZetaError::DivergenceSuspected(format!(
                    "sublevel measure decays like λ^{gamma:.3}, too slowly for σ = {sigma}"
                )));
            }
            (lambda_min, -sigma * f1 * lambda_min.powf(sigma) / (sigma + gamma))
        }
    };
    let mut cuts: Vec<f64> = s
        .critical
        .iter()
        .copied()
        .filter(|&c| c > start * (1.0 + 1e-12) && c < big_m * (1.0 - 1e-12))
        .collect();
    cuts.insert(0, start);
    cuts.push(big_m);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * big_m);
    let mut total = tail + len * big_m.powf(sigma);
    for (i, w) in cuts.windows(2).enumerate() {
        let r = if i == 0 {
            // first layer spans many decades: integrate in ln λ
            integrate_singular(
                |t: f64| {
                    let l = t.exp();
                    -sigma * l.powf(sigma) * s.measure(l)
                },
                w[0].ln(),
                w[1].ln(),
                None,
                Some(0.5),
                TOL,
            )
        } else {
            integrate_singular(
                |l: f64| -sigma * l.powf(sigma - 1.0) * s.measure(l),
                w[0],
                w[1],
                Some(0.5),
                Some(0.5),
                TOL,
            )
        };
        total += r.value;
    }
    Ok(total)
}

/// Both routes to `∫_I |f|^σ` for `σ ∈ (-1, 0)`.
pub fn layer_cake_integral<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, sigma: f64, resolution: usize) -> Result<LayerCake> {
    if !(sigma > -1.0 && sigma < 0.0) {
        return Err(ZetaError::Precondition("σ must lie in (-1, 0)".into()));
    }
    let s = Sampler::build(&f, lo, hi, resolution)?;
    let layer_cake = layer_cake_value(&s, lo, hi, sigma)?;
    let direct = direct_integral(&s, lo, hi, sigma)?;
    Ok(LayerCake {
        layer_cake,
        direct,
        discrepancy: (layer_cake - direct).abs(),
    })
}

/// `f^{(k)}(x)` by Richardson-extrapolated central differences.
pub fn numeric_derivative<F: Fn(f64) -> f64>(f: &F, x: f64, k: usize, h: f64) -> f64 {
    let g = |t: f64| C64::new(f(t), 0.0);
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    richardson_coefficient(&g, x, k, fd_step(h, k)).re * fact
}

/// Verify `|f^{(k)}| > η` on a grid of `[lo, hi]`.
pub fn check_derivative_floor<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, k: usize, eta: f64) -> Result<f64> {
    let h = 0.02 * (hi - lo);
    let mut min = f64::INFINITY;
    for i in 0..=200 {
        let x = lo + (hi - lo) * i as f64 / 200.0;
        let d = numeric_derivative(f, x, k, h).abs();
        if d <= eta {
            return Err(ZetaError::Precondition(format!(
                "|f^({k})({x})| = {d} does not exceed η = {eta}"
            )));
        }
        min = min.min(d);
    }
    Ok(min)
}

/// Sampled distribution function of `|f|` on `I`.
#[derive(Debug, Clone, Serialize)]
pub struct SublevelProfile {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub k: usize,
    pub eta: f64,
    pub max_abs: f64,
}

impl SublevelProfile {
    /// Profile on `points` log-spaced levels in `[1e-4, 1]·max|f|`, after
    /// checking `|f^{(k)}| > η` on `I`.
    pub fn build<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, k: usize, eta: f64, points: usize, resolution: usize) -> Result<Self> {
        if k == 0 || eta.is_nan() || eta <= 0.0 {
            return Err(ZetaError::Precondition("need k ≥ 1 and η > 0".into()));
        }
        check_derivative_floor(f, lo, hi, k, eta)?;
        let s = Sampler::build(f, lo, hi, resolution)?;
        let m = s.max_abs();
        let points = points.max(2);
        let lambdas: Vec<f64> = (0..points)
            .map(|i| m * 10f64.powf(-4.0 + 4.0 * i as f64 / (points - 1) as f64))
            .collect();
        let values = lambdas.iter().map(|&l| s.measure(l)).collect();
        Ok(Self {
            lambdas,
            values,
            lo,
            hi,
            k,
            eta,
            max_abs: m,
        })
    }
}

/// Sharp constant in `|{x ∈ I : |f(x)| ≤ λ}| ≤ C (λ/η)^{1/k}` for `|f^{(k)}| ≥ η`:
/// `C = 2^{2-1/k} (k!)^{1/k}`.
pub fn sublevel_constant(k: usize) -> f64 {
    let kf = k as f64;
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    2f64.powf(2.0 - 1.0 / kf) * fact.powf(1.0 / kf)
}

/// Window `[0.08, 0.8]·max|f|` used by [`sublevel_bound_fit`].
pub const FIT_WINDOW: (f64, f64) = (0.08, 0.8);

/// Least-squares slope of `ln F` against `ln λ` over [`FIT_WINDOW`], and the
/// smallest `C` with `F(λ) ≤ C λ^{1/k} η^{-1/k}` on the whole profile.
pub fn sublevel_bound_fit(profile: &SublevelProfile) -> Result<(f64, f64)> {
    let (lo, hi) = (FIT_WINDOW.0 * profile.max_abs, FIT_WINDOW.1 * profile.max_abs);
    let pts: Vec<(f64, f64)> = profile
        .lambdas
        .iter()
        .zip(&profile.values)
        .filter(|(l, v)| **l >= lo && **l <= hi && **v > 0.0)
        .map(|(l, v)| (l.ln(), v.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(ZetaError::Diagnostic(format!(
            "only {} profile levels fall in the fit window",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    let inv_k = 1.0 / profile.k as f64;
    let c_fit = profile
        .lambdas
        .iter()
        .zip(&profile.values)
        .map(|(l, v)| v / (l.powf(inv_k) * profile.eta.powf(-inv_k)))
        .fold(0.0, f64::max);
    Ok((slope, c_fit))
}

#[derive(Debug, Clone, Serialize)]
pub struct VdcReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
    /// Split level `λ₀ = η |I|^k`.
    pub lambda0: f64,
    /// `C k/(1+kσ) η^σ |I|^{1+kσ}`, the bound on the part below `λ₀`.
    pub j1_bound: f64,
    /// `-1/σ η^σ |I|^{1+kσ}`, the bound on the part above `λ₀`.
    pub j2_bound: f64,
    /// `C k/(1+kσ) - 1/σ`.
    pub constant: f64,
}

/// Compare `∫_I |f|^σ` with `[C k/(1+kσ) - 1/σ] η^σ |I|^{1+kσ}`.
pub fn vdc_bound_check<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    k: usize,
    eta: f64,
    sigma: f64,
    c_sublevel: f64,
) -> Result<VdcReport> {
    let kf = k as f64;
    if k == 0 || !(sigma > -1.0 / kf && sigma < 0.0) {
        return Err(ZetaError::Precondition("σ must lie in (-1/k, 0)".into()));
    }
    check_derivative_floor(&f, lo, hi, k, eta)?;
    let len = hi - lo;
    let s = Sampler::build(&f, lo, hi, 4000)?;
    let lhs = layer_cake_value(&s, lo, hi, sigma)?;
    let common = eta.powf(sigma) * len.powf(1.0 + kf * sigma);
    let j1 = c_sublevel * kf / (1.0 + kf * sigma);
    let j2 = -1.0 / sigma;
    let rhs = (j1 + j2) * common;
    Ok(VdcReport {
        lhs,
        rhs,
        ok: lhs < rhs,
        lambda0: eta * len.powf(kf),
        j1_bound: j1 * common,
        j2_bound: j2 * common,
        constant: j1 + j2,
    })
}
