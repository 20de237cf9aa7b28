//! Truncated Taylor series in one and two variables.
//!
//! Coefficients are stored scaled, `c_k = f^{(k)}(x0) / k!`, so that products
//! are plain Cauchy products and jets of compositions follow from series
//! arithmetic.

use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Univariate truncated series `Σ_{k ≤ n} c_k t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series1 {
    pub c: Vec<C64>,
}

impl Series1 {
    pub fn zeros(order: usize) -> Self {
        Self {
            c: vec![ZERO; order + 1],
        }
    }

    pub fn constant(v: C64, order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.c[0] = v;
        s
    }

    /// The series of `t ↦ x0 + t`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut s = Self::constant(C64::new(x0, 0.0), order);
        if order >= 1 {
            s.c[1] = ONE;
        }
        s
    }

    pub fn from_real(c: &[f64]) -> Self {
        Self {
            c: c.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.c.clone();
        c.resize(order + 1, ZERO);
        Self { c }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        Self {
            c: (0..=n).map(|k| self.c[k] + o.c[k]).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        Self {
            c: (0..=n).map(|k| self.c[k] - o.c[k]).collect(),
        }
    }

    pub fn scale(&self, w: C64) -> Self {
        Self {
            c: self.c.iter().map(|&x| x * w).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = vec![ZERO; n + 1];
        for (i, &a) in self.c.iter().enumerate().take(n + 1) {
            if a == ZERO {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self { c: out }
    }

    pub fn recip(&self) -> Self {
        let n = self.order();
        let a0 = self.c[0];
        let mut b = vec![ZERO; n + 1];
        b[0] = ONE / a0;
        for k in 1..=n {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.c[j] * b[k - j];
            }
            b[k] = -acc / a0;
        }
        Self { c: b }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut e = vec![ZERO; n + 1];
        e[0] = self.c[0].exp();
        for k in 1..=n {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.c[j] * e[k - j] * j as f64;
            }
            e[k] = acc / k as f64;
        }
        Self { c: e }
    }

    /// Principal logarithm; requires a nonzero constant term.
    pub fn ln(&self) -> Self {
        let n = self.order();
        let a0 = self.c[0];
        let mut l = vec![ZERO; n + 1];
        l[0] = a0.ln();
        for k in 1..=n {
            let mut acc = self.c[k] * k as f64;
            for j in 1..k {
                acc -= l[j] * self.c[k - j] * j as f64;
            }
            l[k] = acc / (a0 * k as f64);
        }
        Self { c: l }
    }

    /// `self^s` via the principal branch.
    pub fn powc(&self, s: C64) -> Self {
        self.compose(&pow_coeffs(self.c[0], s, self.order()))
    }

    /// `Σ_k g_k (self - c_0)^k`, i.e. `g ∘ self` where `g` is given by its
    /// scaled Taylor coefficients at `c_0`.
    pub fn compose(&self, g: &[C64]) -> Self {
        let n = self.order();
        let mut d = self.clone();
        d.c[0] = ZERO;
        let top = g.len().min(n + 1);
        let mut acc = Self::constant(if top > 0 { g[top - 1] } else { ZERO }, n);
        for k in (0..top.saturating_sub(1)).rev() {
            acc = acc.mul(&d);
            acc.c[0] += g[k];
        }
        acc
    }

    /// Series of `t ↦ f(h t)`.
    pub fn rescale(&self, h: f64) -> Self {
        let mut w = 1.0;
        Self {
            c: self
                .c
                .iter()
                .map(|&x| {
                    let y = x * w;
                    w *= h;
                    y
                })
                .collect(),
        }
    }

    /// Coefficients of the derivative series.
    pub fn derivative(&self) -> Self {
        if self.c.len() <= 1 {
            return Self::zeros(0);
        }
        Self {
            c: (1..self.c.len()).map(|k| self.c[k] * k as f64).collect(),
        }
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.c.iter().rev().fold(ZERO, |acc, &x| acc * t + x)
    }
}

/// Scaled Taylor coefficients of `w ↦ w^s` at `w = c0`:
/// `g_k = binom(s, k) c0^{s-k}`.
pub fn pow_coeffs(c0: C64, s: C64, order: usize) -> Vec<C64> {
    let mut g = Vec::with_capacity(order + 1);
    g.push((s * c0.ln()).exp());
    for k in 1..=order {
        let prev = g[k - 1];
        g.push(prev * (s - (k - 1) as f64) / (c0 * k as f64));
    }
    g
}

/// Bivariate series truncated to the box `i ≤ nu, j ≤ nv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub nu: usize,
    pub nv: usize,
    pub data: Vec<C64>,
}

impl Jet2 {
    pub fn zeros(nu: usize, nv: usize) -> Self {
        Self {
            nu,
            nv,
            data: vec![ZERO; (nu + 1) * (nv + 1)],
        }
    }

    pub fn constant(v: C64, nu: usize, nv: usize) -> Self {
        let mut j = Self::zeros(nu, nv);
        j.data[0] = v;
        j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        if i > self.nu || j > self.nv {
            return ZERO;
        }
        self.data[i * (self.nv + 1) + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * (self.nv + 1) + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * (self.nv + 1) + j] += v;
    }

    /// Outer product `U(u) V(v)` of two univariate series.
    pub fn outer(su: &Series1, sv: &Series1, nu: usize, nv: usize) -> Self {
        let mut out = Self::zeros(nu, nv);
        for i in 0..=nu.min(su.order()) {
            if su.c[i] == ZERO {
                continue;
            }
            for j in 0..=nv.min(sv.order()) {
                out.set(i, j, su.c[i] * sv.c[j]);
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for i in 0..=self.nu {
            for j in 0..=self.nv {
                out.add_at(i, j, o.get(i, j));
            }
        }
        out
    }

    pub fn scale(&self, w: C64) -> Self {
        Self {
            nu: self.nu,
            nv: self.nv,
            data: self.data.iter().map(|&x| x * w).collect(),
        }
    }

    fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let mut nz = Vec::new();
        for i in 0..=self.nu {
            for j in 0..=self.nv {
                let c = self.get(i, j);
                if c != ZERO {
                    nz.push((i, j, c));
                }
            }
        }
        nz
    }

    /// Truncated product; cost scales with the number of nonzeros of the
    /// sparser factor.
    pub fn mul(&self, o: &Self) -> Self {
        let (sparse, dense) = {
            let a = self.nonzeros();
            let b = o.nonzeros();
            if a.len() <= b.len() {
                (a, o)
            } else {
                (b, self)
            }
        };
        let mut out = Self::zeros(self.nu, self.nv);
        for (i, j, c) in sparse {
            for di in 0..=(self.nu - i) {
                for dj in 0..=(self.nv - j) {
                    let d = dense.get(di, dj);
                    if d != ZERO {
                        out.add_at(i + di, j + dj, c * d);
                    }
                }
            }
        }
        out
    }

    /// Multiply by a series in `u` alone.
    pub fn mul_u(&self, su: &Series1) -> Self {
        let mut out = Self::zeros(self.nu, self.nv);
        for k in 0..=self.nu.min(su.order()) {
            let w = su.c[k];
            if w == ZERO {
                continue;
            }
            for i in 0..=(self.nu - k) {
                for j in 0..=self.nv {
                    out.add_at(i + k, j, w * self.get(i, j));
                }
            }
        }
        out
    }

    /// Multiply by a series in `v` alone.
    pub fn mul_v(&self, sv: &Series1) -> Self {
        let mut out = Self::zeros(self.nu, self.nv);
        for k in 0..=self.nv.min(sv.order()) {
            let w = sv.c[k];
            if w == ZERO {
                continue;
            }
            for i in 0..=self.nu {
                for j in 0..=(self.nv - k) {
                    out.add_at(i, j + k, w * self.get(i, j));
                }
            }
        }
        out
    }

    /// Powers `(self - c00)^k` for `k = 0..=max`, the basis used by
    /// [`Jet2::combine`]; reusable across exponents.
    pub fn shifted_powers(&self, max: usize) -> Vec<Jet2> {
        let mut d = self.clone();
        d.data[0] = ZERO;
        let mut out = vec![Self::constant(ONE, self.nu, self.nv)];
        let all_zero = d.data.iter().all(|&x| x == ZERO);
        for k in 1..=max {
            if all_zero {
                break;
            }
            let next = out[k - 1].mul(&d);
            if next.data.iter().all(|&x| x == ZERO) {
                break;
            }
            out.push(next);
        }
        out
    }

    /// `Σ_k g_k P_k` for a power basis from [`Jet2::shifted_powers`].
    pub fn combine(powers: &[Jet2], g: &[C64]) -> Jet2 {
        let mut out = Self::zeros(powers[0].nu, powers[0].nv);
        for (p, &gk) in powers.iter().zip(g) {
            for (o, &x) in out.data.iter_mut().zip(&p.data) {
                *o += gk * x;
            }
        }
        out
    }

    pub fn powc(&self, s: C64) -> Jet2 {
        let k = self.nu + self.nv;
        let powers = self.shifted_powers(k);
        Self::combine(&powers, &pow_coeffs(self.data[0], s, powers.len() - 1))
    }

    /// Row `i` as a series in `v`.
    pub fn row_u(&self, i: usize) -> Series1 {
        Series1 {
            c: (0..=self.nv).map(|j| self.get(i, j)).collect(),
        }
    }

    /// Column `j` as a series in `u`.
    pub fn col_v(&self, j: usize) -> Series1 {
        Series1 {
            c: (0..=self.nu).map(|i| self.get(i, j)).collect(),
        }
    }

    pub fn eval(&self, du: f64, dv: f64) -> C64 {
        let mut acc = ZERO;
        for i in (0..=self.nu).rev() {
            let mut row = ZERO;
            for j in (0..=self.nv).rev() {
                row = row * dv + self.get(i, j);
            }
            acc = acc * du + row;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn exp_of_variable() {
        let e = Series1::variable(0.0, 10).exp();
        let mut f = 1.0;
        for k in 0..=10 {
            if k > 0 {
                f *= k as f64;
            }
            assert!(close(e.c[k], C64::new(1.0 / f, 0.0), 1e-15));
        }
    }

    #[test]
    fn recip_and_ln_roundtrip() {
        let x = Series1::from_real(&[2.0, 0.5, -0.3, 0.1, 0.0, 0.2]);
        let one = x.mul(&x.recip());
        assert!(close(one.c[0], ONE, 1e-15));
        for k in 1..=5 {
            assert!(one.c[k].norm() < 1e-15);
        }
        let back = x.ln().exp();
        for k in 0..=5 {
            assert!(close(back.c[k], x.c[k], 1e-14));
        }
    }

    #[test]
    fn powc_matches_binomial_series() {
        // (1 + t)^s = Σ binom(s, k) t^k
        let s = C64::new(-0.7, 0.4);
        let p = Series1::variable(1.0, 8).powc(s);
        let mut b = ONE;
        for k in 0..=8 {
            assert!(close(p.c[k], b, 1e-14));
            b = b * (s - k as f64) / (k as f64 + 1.0);
        }
    }

    #[test]
    fn jet_power_of_sum() {
        // (1 + u + v)^2 = 1 + 2u + 2v + u^2 + 2uv + v^2
        let mut j = Jet2::constant(ONE, 3, 3);
        j.set(1, 0, ONE);
        j.set(0, 1, ONE);
        let p = j.powc(C64::new(2.0, 0.0));
        let expect = [((0, 0), 1.0), ((1, 0), 2.0), ((0, 1), 2.0), ((2, 0), 1.0), ((1, 1), 2.0), ((0, 2), 1.0)];
        for ((i, k), v) in expect {
            assert!(close(p.get(i, k), C64::new(v, 0.0), 1e-14), "{i} {k}");
        }
        assert!(p.get(3, 0).norm() < 1e-14 && p.get(2, 1).norm() < 1e-14);
    }

    #[test]
    fn jet_eval_matches_function() {
        let mut j = Jet2::constant(C64::new(1.5, 0.0), 20, 20);
        j.set(1, 0, C64::new(0.3, 0.0));
        j.set(0, 2, C64::new(-0.2, 0.0));
        let s = C64::new(0.5, -1.0);
        let p = j.powc(s);
        let (du, dv) = (0.1, 0.2);
        let direct = (C64::new(1.5 + 0.3 * du - 0.2 * dv * dv, 0.0).ln() * s).exp();
        assert!(close(p.eval(du, dv), direct, 1e-12));
    }
}
