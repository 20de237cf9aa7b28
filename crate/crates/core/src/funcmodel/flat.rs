use crate::series::{pow_coeffs, Series1};
use crate::C64;

use super::SignedLog;

/// A flat function `q(t) e^{-|t|^{-p}}` with a Laurent polynomial `q`.
///
/// The two half-lines carry their own Laurent coefficients so that the
/// family is closed under differentiation for odd `p` as well; a freshly
/// constructed factor uses the same `q` on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatFactor {
    pub p: u32,
    /// `(coefficient, exponent)` pairs of `q` on `t > 0`.
    pub laurent: Vec<(f64, i32)>,
    /// Coefficients of `q` on `t < 0`.
    pub laurent_neg: Vec<(f64, i32)>,
}

fn normalize(terms: &[(f64, i32)]) -> Vec<(f64, i32)> {
    let mut out: Vec<(f64, i32)> = Vec::new();
    let mut sorted = terms.to_vec();
    sorted.sort_by_key(|t| t.1);
    for (c, e) in sorted {
        match out.last_mut() {
            Some(last) if last.1 == e => last.0 += c,
            _ => out.push((c, e)),
        }
    }
    out.retain(|t| t.0 != 0.0);
    out
}

fn laurent_derivative(q: &[(f64, i32)], p: u32, sign: f64) -> Vec<(f64, i32)> {
    let mut out = Vec::with_capacity(2 * q.len());
    for &(c, e) in q {
        if e != 0 {
            out.push((c * e as f64, e - 1));
        }
        out.push((sign * c * p as f64, e - p as i32 - 1));
    }
    normalize(&out)
}

impl FlatFactor {
    pub fn new(p: u32, laurent: Vec<(f64, i32)>) -> Self {
        let q = normalize(&laurent);
        Self {
            p,
            laurent: q.clone(),
            laurent_neg: q,
        }
    }

    /// `e^{-|t|^{-p}}`.
    pub fn pure(p: u32) -> Self {
        Self::new(p, vec![(1.0, 0)])
    }

    pub fn is_zero(&self) -> bool {
        self.laurent.is_empty() && self.laurent_neg.is_empty()
    }

    fn side(&self, t: f64) -> &[(f64, i32)] {
        if t > 0.0 {
            &self.laurent
        } else {
            &self.laurent_neg
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let at = t.abs();
        let lt = at.ln();
        let damp = -at.powi(-(self.p as i32));
        let mut acc = 0.0;
        for &(c, e) in self.side(t) {
            let sign = if t < 0.0 && e % 2 != 0 { -c.signum() } else { c.signum() };
            acc += sign * (c.abs().ln() + e as f64 * lt + damp).exp();
        }
        acc
    }

    /// Push the terms of this factor at `t = sign·e^{ln_abs}` as signed logs.
    pub fn push_log_terms(&self, ln_abs: f64, sign: f64, scale: SignedLog, out: &mut Vec<SignedLog>) {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            return;
        }
        let damp = -(-(self.p as f64) * ln_abs).exp();
        let side = if sign > 0.0 { &self.laurent } else { &self.laurent_neg };
        for &(c, e) in side {
            let s = if sign < 0.0 && e % 2 != 0 { -c.signum() } else { c.signum() };
            out.push(SignedLog {
                sign: s * scale.sign,
                ln: scale.ln + c.abs().ln() + e as f64 * ln_abs + damp,
            });
        }
    }

    /// Exact derivative, again a flat factor of the same `p`.
    pub fn derivative(&self) -> Self {
        let neg_sign = if self.p % 2 == 0 { 1.0 } else { -1.0 };
        Self {
            p: self.p,
            laurent: laurent_derivative(&self.laurent, self.p, 1.0),
            laurent_neg: laurent_derivative(&self.laurent_neg, self.p, neg_sign),
        }
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    /// The factor `t ↦ self(-t)`.
    pub fn reflect(&self) -> Self {
        let flip = |q: &[(f64, i32)]| -> Vec<(f64, i32)> {
            q.iter()
                .map(|&(c, e)| (if e % 2 != 0 { -c } else { c }, e))
                .collect()
        };
        Self {
            p: self.p,
            laurent: flip(&self.laurent_neg),
            laurent_neg: flip(&self.laurent),
        }
    }

    pub fn scale(&self, w: f64) -> Self {
        let sc = |q: &[(f64, i32)]| normalize(&q.iter().map(|&(c, e)| (c * w, e)).collect::<Vec<_>>());
        Self {
            p: self.p,
            laurent: sc(&self.laurent),
            laurent_neg: sc(&self.laurent_neg),
        }
    }

    /// Multiply `q` by `t^k`.
    pub fn shift(&self, k: i32) -> Self {
        let sh = |q: &[(f64, i32)]| q.iter().map(|&(c, e)| (c, e + k)).collect::<Vec<_>>();
        Self {
            p: self.p,
            laurent: sh(&self.laurent),
            laurent_neg: sh(&self.laurent_neg),
        }
    }

    /// Scaled Taylor coefficients at `t0`; identically zero at `t0 = 0`.
    pub fn taylor(&self, t0: f64, n: usize) -> Series1 {
        if t0 == 0.0 || self.is_zero() {
            return Series1::zeros(n);
        }
        let at = t0.abs();
        let dir = t0.signum();
        // |t0 + h| = at + dir h
        let mut damp = Series1 {
            c: pow_coeffs(C64::new(at, 0.0), C64::new(-(self.p as f64), 0.0), n),
        }
        .rescale(dir)
        .scale(C64::new(-1.0, 0.0));
        let d0 = damp.c[0];
        damp.c[0] = C64::new(0.0, 0.0);
        let expo = damp.exp().scale(d0.exp());
        let mut q = Series1::zeros(n);
        for &(c, e) in self.side(t0) {
            let pw = Series1 {
                c: pow_coeffs(C64::new(at, 0.0), C64::new(e as f64, 0.0), n),
            }
            .rescale(dir);
            let sign = if t0 < 0.0 && e % 2 != 0 { -1.0 } else { 1.0 };
            q = q.add(&pw.scale(C64::new(c * sign, 0.0)));
        }
        q.mul(&expo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn richardson_derivative(f: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        let d = |h: f64| (f(t + h) - f(t - h)) / (2.0 * h);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    #[test]
    fn value_at_origin_is_zero() {
        let f = FlatFactor::new(2, vec![(1.0, -5), (3.0, 2)]);
        assert_eq!(f.eval(0.0), 0.0);
    }

    #[test]
    fn derivative_of_pure_factor() {
        let f = FlatFactor::pure(2);
        let d = f.derivative();
        let expect = 16.0 * (-4.0f64).exp();
        assert!((d.eval(0.5) - expect).abs() < 1e-14);
        assert_eq!(d.eval(0.0), 0.0);
    }

    #[test]
    fn odd_p_derivative_on_both_sides() {
        let f = FlatFactor::new(1, vec![(1.0, 2), (-0.5, 1)]);
        let d = f.derivative();
        for t in [-0.7, -0.3, 0.2, 0.9] {
            let fd = richardson_derivative(&|x| f.eval(x), t, 1e-4);
            assert!((d.eval(t) - fd).abs() < 1e-9, "t={t}: {} vs {fd}", d.eval(t));
        }
    }

    #[test]
    fn reflect_is_mirror() {
        let f = FlatFactor::new(3, vec![(1.0, 1), (2.0, -2)]);
        let r = f.reflect();
        for t in [-0.8, -0.1, 0.3, 0.6] {
            assert!((r.eval(t) - f.eval(-t)).abs() < 1e-15);
        }
    }

    #[test]
    fn taylor_matches_symbolic_derivatives() {
        let f = FlatFactor::new(2, vec![(1.0, 0), (0.5, -3)]);
        for t0 in [0.4, -0.6] {
            let s = f.taylor(t0, 5);
            let mut fact = 1.0;
            for k in 0..=5 {
                if k > 0 {
                    fact *= k as f64;
                }
                let exact = f.nth_derivative(k).eval(t0) / fact;
                assert!((s.c[k].re - exact).abs() < 1e-11 * (1.0 + exact.abs()), "k={k} t0={t0}");
            }
        }
    }

    #[test]
    fn log_terms_match_eval() {
        let f = FlatFactor::new(1, vec![(1.0, 2), (-0.25, -1)]);
        for t in [-0.4, 0.7] {
            let mut terms = Vec::new();
            f.push_log_terms(f64::ln(f64::abs(t)), t.signum(), SignedLog::ONE, &mut terms);
            let v = SignedLog::sum(&terms).value();
            assert!((v - f.eval(t)).abs() < 1e-15);
        }
    }
}
