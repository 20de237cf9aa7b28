use std::collections::BTreeMap;

use crate::series::{Jet2, Series1};
use crate::C64;

use super::SignedLog;

/// Sparse real polynomial in `(x, y)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub coeffs: BTreeMap<(u32, u32), f64>,
}

/// Scaled Taylor coefficients of `t ↦ t^k` at `t0` for an integer `k`.
pub fn int_pow_series(t0: f64, k: i32, n: usize) -> Series1 {
    let mut s = Series1::zeros(n);
    if t0 == 0.0 {
        if k >= 0 && (k as usize) <= n {
            s.c[k as usize] = C64::new(1.0, 0.0);
        }
        return s;
    }
    let mut c = t0.powi(k);
    s.c[0] = C64::new(c, 0.0);
    for i in 1..=n {
        c *= (k as f64 - (i as f64 - 1.0)) / (i as f64 * t0);
        s.c[i] = C64::new(c, 0.0);
    }
    s
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

impl Polynomial {
    pub fn new<I: IntoIterator<Item = (u32, u32, f64)>>(terms: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (a, b, c) in terms {
            *coeffs.entry((a, b)).or_insert(0.0) += c;
        }
        coeffs.retain(|_, c| *c != 0.0);
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new([(0, 0, c)])
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_term(&self) -> f64 {
        self.coeffs.get(&(0, 0)).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> Vec<(u32, u32)> {
        self.coeffs.keys().copied().collect()
    }

    pub fn degree(&self) -> (u32, u32) {
        self.coeffs
            .keys()
            .fold((0, 0), |(da, db), &(a, b)| (da.max(a), db.max(b)))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(a, b), &c)| c * x.powi(a as i32) * y.powi(b as i32))
            .sum()
    }

    pub fn partial(&self, da: u32, db: u32) -> Self {
        Self::new(self.coeffs.iter().filter_map(|(&(a, b), &c)| {
            (a >= da && b >= db).then(|| (a - da, b - db, c * falling(a, da) * falling(b, db)))
        }))
    }

    /// Multiply by `x^a y^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        Self::new(self.coeffs.iter().map(|(&(i, j), &c)| (i + a, j + b, c)))
    }

    /// The polynomial `(x, y) ↦ self(θx x, θy y)`.
    pub fn reflect(&self, tx: f64, ty: f64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|(&(a, b), &c)| (a, b, c * tx.powi(a as i32) * ty.powi(b as i32))),
        )
    }

    pub fn swap(&self) -> Self {
        Self::new(self.coeffs.iter().map(|(&(a, b), &c)| (b, a, c)))
    }

    pub fn scale(&self, w: f64) -> Self {
        Self::new(self.coeffs.iter().map(|(&(a, b), &c)| (a, b, c * w)))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .chain(o.coeffs.iter())
                .map(|(&(a, b), &c)| (a, b, c)),
        )
    }

    pub fn push_log_terms(&self, lx: f64, sx: f64, ly: f64, sy: f64, out: &mut Vec<SignedLog>) {
        for (&(a, b), &c) in &self.coeffs {
            let sign = c.signum() * sx.powi(a as i32) * sy.powi(b as i32);
            if sign == 0.0 {
                continue;
            }
            let ln = c.abs().ln()
                + if a == 0 { 0.0 } else { a as f64 * lx }
                + if b == 0 { 0.0 } else { b as f64 * ly };
            out.push(SignedLog { sign, ln });
        }
    }

    /// Scaled Taylor coefficients at `(x0, y0)` up to orders `(nu, nv)`.
    pub fn taylor(&self, x0: f64, y0: f64, nu: usize, nv: usize) -> Jet2 {
        let mut j = Jet2::zeros(nu, nv);
        for (&(a, b), &c) in &self.coeffs {
            for i in 0..=nu.min(a as usize) {
                let wx = c * binom(a, i as u32) * x0.powi(a as i32 - i as i32);
                if wx == 0.0 {
                    continue;
                }
                for k in 0..=nv.min(b as usize) {
                    let w = wx * binom(b, k as u32) * y0.powi(b as i32 - k as i32);
                    j.add_at(i, k, C64::new(w, 0.0));
                }
            }
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_of_monomial() {
        let p = Polynomial::new([(2, 3, 1.0)]);
        let d = p.partial(1, 0);
        assert_eq!(d.eval(1.0, 1.0), 2.0);
        assert!(p.partial(3, 0).is_zero());
    }

    #[test]
    fn taylor_reproduces_polynomial() {
        let p = Polynomial::new([(0, 0, 1.0), (1, 0, 1.0), (2, 1, -0.5), (0, 3, 2.0)]);
        let j = p.taylor(0.3, -0.2, 4, 4);
        let (du, dv) = (0.11, 0.07);
        let v = j.eval(du, dv).re;
        assert!((v - p.eval(0.3 + du, -0.2 + dv)).abs() < 1e-14);
    }

    #[test]
    fn negative_power_series() {
        let s = int_pow_series(2.0, -3, 6);
        // t^{-3} at 2: coefficients binom(-3, k) 2^{-3-k}
        let mut c = 0.125;
        for k in 0..=6 {
            assert!((s.c[k].re - c).abs() < 1e-15);
            c *= (-3.0 - k as f64) / ((k + 1) as f64 * 2.0);
        }
    }
}
