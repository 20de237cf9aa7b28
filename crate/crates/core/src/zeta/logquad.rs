//! Quadrature of `|f|^s · w` over boxes of the plane. `|f|^s` is formed as
//! `exp(s ln|f|)` from a signed-log evaluation of `f`, and nodes are graded
//! toward the coordinate axes and toward the zeros of `f(·, y)`.

use crate::funcmodel::Expr;
use crate::quad::{grading_power, integrate, integrate_graded, GradedPoint, QuadResult, Tolerance, Toward};
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Exponent data shared by every node: the points `s` and the smallest `Re s`.
pub(crate) struct Powers<'a> {
    pub ss: &'a [C64],
    pub sigma: f64,
}

impl<'a> Powers<'a> {
    pub fn new(ss: &'a [C64]) -> Self {
        let sigma = ss.iter().map(|s| s.re).fold(f64::INFINITY, f64::min);
        Self { ss, sigma }
    }

    /// `exp(s ln|f| + ln_w)` for every `s`.
    fn apply(&self, ln_f: f64, ln_w: f64) -> Vec<C64> {
        self.ss
            .iter()
            .map(|&s| {
                let z = s * ln_f + ln_w;
                if z.re < -745.0 {
                    ZERO
                } else {
                    z.exp()
                }
            })
            .collect()
    }
}

/// Integrand description for [`box_integral`].
pub(crate) struct BoxSpec<'a> {
    pub expr: &'a Expr,
    /// Nonnegative weight `w(x, y)`.
    pub weight: &'a dyn Fn(f64, f64) -> f64,
    /// `x`-interval for a given `y`.
    pub x_range: &'a dyn Fn(f64) -> (f64, f64),
    /// Sorted outer breakpoints; the first and last are the `y`-limits.
    pub y_breaks: Vec<f64>,
    /// Exponent of `|x|` in `|f|^σ` at the line `x = 0` (usually `a σ`).
    pub x_hint: f64,
    /// Exponent of `|y|` in the inner integral at `y = 0`.
    pub y_hint: f64,
}

fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Sign of `f(x, y)` given `ln|y|` and the sign of `y`.
fn sign_at(expr: &Expr, x: f64, ly: f64, sy: f64) -> f64 {
    if x == 0.0 {
        return expr.eval(0.0, sy * ly.exp()).signum();
    }
    expr.eval_log(x.abs().ln(), sgn(x), ly, sy).sign
}

/// Zeros of `x ↦ f(x, y)` in the open interval `(lo, hi)`, excluding `x = 0`,
/// located by sign changes on a linear grid plus logarithmic grids around 0.
pub(crate) fn zeros_in_x(expr: &Expr, ly: f64, sy: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=64).map(|i| lo + (hi - lo) * i as f64 / 64.0).collect();
    let ext = lo.abs().max(hi.abs());
    for side in [-1.0, 1.0] {
        for i in 0..48 {
            let x = side * ext * 10f64.powf(-30.0 + 30.0 * i as f64 / 47.0);
            if x > lo && x < hi {
                grid.push(x);
            }
        }
    }
    grid.retain(|&x| x != 0.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut out = Vec::new();
    let signs: Vec<f64> = grid.iter().map(|&x| sign_at(expr, x, ly, sy)).collect();
    for k in 1..grid.len() {
        let (mut a, mut b) = (grid[k - 1], grid[k]);
        let (sa, sb) = (signs[k - 1], signs[k]);
        if sa == 0.0 && a != lo && a != hi {
            out.push(a);
            continue;
        }
        if sa * sb >= 0.0 || a * b < 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = if a > 0.0 && b / a > 4.0 {
                (a * b).sqrt()
            } else if b < 0.0 && a / b > 4.0 {
                -(a * b).sqrt()
            } else {
                0.5 * (a + b)
            };
            if m <= a || m >= b {
                break;
            }
            let sm = sign_at(expr, m, ly, sy);
            if sm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if sm == sa {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn add_into(acc: &mut Vec<C64>, v: &[C64]) {
    if acc.is_empty() {
        *acc = v.to_vec();
    } else {
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b;
        }
    }
}

/// Integrate `node(x, ln|x|, ln_jac)` over `[p, q]` with grading toward
/// ends flagged by hints. `ln|x|` is exact near an end at the origin.
fn graded_segment<F: FnMut(f64, f64, f64) -> Vec<C64>>(
    mut node: F,
    p: f64,
    q: f64,
    hint_p: Option<f64>,
    hint_q: Option<f64>,
    ns: usize,
    tol: Tolerance,
) -> QuadResult<Vec<C64>> {
    let mut one = |lo: f64, hi: f64, end: Option<(Toward, f64)>| -> QuadResult<Vec<C64>> {
        match end {
            None => integrate(|x: f64| node(x, x.abs().ln(), 0.0), lo, hi, tol),
            Some((toward, hint)) => {
                let at = if toward == Toward::Lo { lo } else { hi };
                integrate_graded(
                    |pt: &GradedPoint| {
                        if pt.ln_jac == f64::NEG_INFINITY {
                            return vec![ZERO; ns];
                        }
                        let lx = if at == 0.0 { pt.ln_dist } else { pt.x.abs().ln() };
                        node(pt.x, lx, pt.ln_jac)
                    },
                    lo,
                    hi,
                    toward,
                    grading_power(hint),
                    tol,
                )
            }
        }
    };
    match (hint_p, hint_q) {
        (Some(h1), Some(h2)) => {
            let mid = 0.5 * (p + q);
            let mut l = one(p, mid, Some((Toward::Lo, h1)));
            let r = one(mid, q, Some((Toward::Hi, h2)));
            for (a, b) in l.value.iter_mut().zip(&r.value) {
                *a += b;
            }
            QuadResult {
                value: l.value,
                error: l.error + r.error,
                evals: l.evals + r.evals,
                converged: l.converged && r.converged,
            }
        }
        (Some(h), None) => one(p, q, Some((Toward::Lo, h))),
        (None, Some(h)) => one(p, q, Some((Toward::Hi, h))),
        (None, None) => one(p, q, None),
    }
}

/// `∫_lo^hi |f(x, y)|^s w(x, y) dx` for every `s`, with `y = sy e^{ly}`.
pub(crate) fn inner_x(spec: &BoxSpec, pw: &Powers, y: f64, ly: f64, sy: f64, tol: Tolerance) -> (Vec<C64>, f64) {
    let ns = pw.ss.len();
    let (lo, hi) = (spec.x_range)(y);
    if !(hi > lo) {
        return (vec![ZERO; ns], 0.0);
    }
    let zeros = zeros_in_x(spec.expr, ly, sy, lo, hi);
    let mut pts: Vec<(f64, Option<f64>)> = vec![(lo, (lo == 0.0).then_some(spec.x_hint))];
    if lo < 0.0 && hi > 0.0 {
        pts.push((0.0, Some(spec.x_hint)));
    }
    for &z in &zeros {
        pts.push((z, Some(pw.sigma)));
    }
    pts.push((hi, (hi == 0.0).then_some(spec.x_hint)));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = Vec::new();
    let mut err = 0.0;
    for w in pts.windows(2) {
        let ((p, hp), (q, hq)) = (w[0], w[1]);
        if q <= p {
            continue;
        }
        let sx = sgn(0.5 * (p + q));
        let res = graded_segment(
            |x, lx, ln_jac| {
                let wt = (spec.weight)(x, y);
                if wt <= 0.0 {
                    return vec![ZERO; ns];
                }
                let l = spec.expr.eval_log(lx, sx, ly, sy);
                if l.sign == 0.0 {
                    return vec![ZERO; ns];
                }
                pw.apply(l.ln, wt.ln() + ln_jac)
            },
            p,
            q,
            hp,
            hq,
            ns,
            tol,
        );
        err += res.error;
        add_into(&mut acc, &res.value);
    }
    if acc.is_empty() {
        acc = vec![ZERO; ns];
    }
    (acc, err)
}

/// `∬ |f|^s w` over `{y ∈ [y_breaks], x ∈ x_range(y)}` for every `s`.
pub(crate) fn box_integral(spec: &BoxSpec, pw: &Powers, tol: Tolerance) -> (Vec<C64>, f64) {
    let ns = pw.ss.len();
    let mut breaks = spec.y_breaks.clone();
    let (ylo, yhi) = (breaks[0], *breaks.last().unwrap());
    if ylo < 0.0 && yhi > 0.0 && !breaks.contains(&0.0) {
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
    }
    let mut acc = Vec::new();
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q <= p {
            continue;
        }
        let sy = sgn(0.5 * (p + q));
        let hp = (p == 0.0).then_some(spec.y_hint);
        let hq = (q == 0.0).then_some(spec.y_hint);
        // the last component carries the inner error, integrated like the values
        let res = graded_segment(
            |y, ly, ln_jac| {
                let (mut v, e) = inner_x(spec, pw, y, ly, sy, tol);
                v.push(C64::new(e, 0.0));
                let j = ln_jac.exp();
                v.into_iter().map(|z| if z == ZERO { z } else { z * j }).collect()
            },
            p,
            q,
            hp,
            hq,
            ns + 1,
            tol,
        );
        let mut v = res.value;
        let inner = v.pop().map_or(0.0, |z| z.re.abs());
        err += res.error + inner;
        add_into(&mut acc, &v);
    }
    if acc.is_empty() {
        acc = vec![ZERO; ns];
    }
    (acc, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::{FlatFactor, SmoothModelFunction};

    #[test]
    fn zeros_of_reflected_flat_function() {
        // -x² y³ + e^{-1/y²} vanishes at x = e^{-1/(2y²)} y^{-3/2}
        let f = SmoothModelFunction::monomial(2, 3).with_h(0, FlatFactor::pure(2)).reflect(1.0, -1.0);
        let e = f.to_expr();
        for y in [0.2f64, 0.5, 0.8] {
            let want = (-0.5 / (y * y)).exp() * y.powf(-1.5);
            let z = zeros_in_x(&e, y.ln(), 1.0, -1.0, 1.0);
            assert_eq!(z.len(), 2, "{z:?}");
            assert!((z[1] - want).abs() < 1e-12 * want.max(1.0), "{} {}", z[1], want);
            assert!((z[0] + want).abs() < 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn monomial_box_integral() {
        // ∫_0^1∫_0^1 (x² y³)^s = 1/((2s+1)(3s+1))
        let e = SmoothModelFunction::monomial(2, 3).to_expr();
        let ss = [C64::new(0.5, 0.3), C64::new(-0.2, 0.0), C64::new(1.0, -2.0)];
        let pw = Powers::new(&ss);
        let spec = BoxSpec {
            expr: &e,
            weight: &|_, _| 1.0,
            x_range: &|_| (0.0, 1.0),
            y_breaks: vec![0.0, 1.0],
            x_hint: 2.0 * pw.sigma,
            y_hint: 3.0 * pw.sigma,
        };
        let (v, _) = box_integral(&spec, &pw, Tolerance::new(1e-14, 1e-12));
        for (z, s) in v.iter().zip(&ss) {
            let want = 1.0 / ((2.0 * s + 1.0) * (3.0 * s + 1.0));
            assert!((z - want).norm() < 1e-10 * want.norm(), "{z} {want}");
        }
    }
}
