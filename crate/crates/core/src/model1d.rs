//! Continuation of `L(s) = ∫_0^r u^{As+B} ψ(u; s) du`.
//!
//! Expanding `ψ` to order `N` at the origin gives
//! `L(s) = Σ_{α≤N} ψ_α(s) r^{As+B+α+1} / (As+B+α+1) + ∫_0^r u^{As+B+N+1} R_N(u; s) du`,
//! meromorphic on `Re s > -(B+N+2)/A` with simple poles at `-(B+j)/A`.

use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::funcmodel::Profile;
use crate::quad::{gauss_legendre, integrate, integrate_power, QuadratureConfig};
use crate::C64;

/// Supplier of scaled Taylor coefficients `ψ^{(k)}(u; s) / k!`.
pub trait JetProvider1D: Sync {
    fn taylor(&self, u: f64, n: usize, s: C64) -> Vec<C64>;

    fn value(&self, u: f64, s: C64) -> C64 {
        self.taylor(u, 0, s)[0]
    }

    /// Radius on which the Taylor series at 0 converges to `ψ`, when known.
    /// Without it remainders use the integral form of Taylor's theorem.
    fn expansion_radius(&self) -> Option<f64> {
        None
    }

    /// Highest derivative order the provider can supply.
    fn max_order(&self) -> Option<usize> {
        None
    }
}

/// Value of a continued integral together with its bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuationResult {
    pub value: C64,
    pub order_used: usize,
    /// The formula is valid on `Re s > half_plane`.
    pub half_plane: f64,
    pub nearest_pole: Option<f64>,
    pub remainder_estimate: f64,
    /// Which remainder piece sets `half_plane`.
    pub binding: String,
}

pub struct ConstJet(pub C64);

impl JetProvider1D for ConstJet {
    fn taylor(&self, _u: f64, n: usize, _s: C64) -> Vec<C64> {
        let mut c = vec![C64::new(0.0, 0.0); n + 1];
        c[0] = self.0;
        c
    }
    fn expansion_radius(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }
}

/// `ψ(u) = e^u`.
pub struct ExpJet;

impl JetProvider1D for ExpJet {
    fn taylor(&self, u: f64, n: usize, _s: C64) -> Vec<C64> {
        let mut c = Vec::with_capacity(n + 1);
        let mut t = u.exp();
        for k in 0..=n {
            c.push(C64::new(t, 0.0));
            t /= (k + 1) as f64;
        }
        c
    }
    fn expansion_radius(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }
}

/// Polynomial `Σ c_k u^k`.
pub struct PolyJet(pub Vec<f64>);

impl JetProvider1D for PolyJet {
    fn taylor(&self, u: f64, n: usize, _s: C64) -> Vec<C64> {
        let mut d = self.0.clone();
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let v = d.iter().rev().fold(0.0, |acc, &c| acc * u + c);
            out.push(C64::new(v, 0.0));
            // next scaled coefficient: derivative divided by (k + 1)
            d = d
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64 / (k + 1) as f64)
                .collect();
        }
        out
    }
    fn expansion_radius(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }
}

/// A plateau profile used as a smooth cutoff.
pub struct ProfileJet(pub Profile);

impl JetProvider1D for ProfileJet {
    fn taylor(&self, u: f64, n: usize, _s: C64) -> Vec<C64> {
        self.0.taylor(u, n).c
    }
    fn expansion_radius(&self) -> Option<f64> {
        let r = self.0.inner - self.0.center.abs();
        (r > 0.0).then_some(r)
    }
}

/// Jets from a closure returning scaled coefficients.
pub struct FnJet<F> {
    pub f: F,
    pub radius: Option<f64>,
}

impl<F: Fn(f64, usize, C64) -> Vec<C64> + Sync> JetProvider1D for FnJet<F> {
    fn taylor(&self, u: f64, n: usize, s: C64) -> Vec<C64> {
        (self.f)(u, n, s)
    }
    fn expansion_radius(&self) -> Option<f64> {
        self.radius
    }
}

/// Central differences with two Richardson steps, orders up to 8.
pub struct FiniteDifferenceJet<F> {
    pub f: F,
    pub step: f64,
}

impl<F: Fn(f64, C64) -> C64 + Sync> FiniteDifferenceJet<F> {
    pub fn new(f: F) -> Self {
        Self { f, step: 0.2 }
    }
}

fn central<G: Fn(f64) -> C64>(g: &G, x: f64, k: usize, h: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let mut binom = 1.0;
    for i in 0..=k {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += g(x + (k as f64 / 2.0 - i as f64) * h) * (sign * binom);
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    acc / h.powi(k as i32)
}

/// `g^{(k)}(x) / k!` from central differences at steps `h, h/2, h/4`
/// combined by two Richardson steps.
pub(crate) fn richardson_coefficient<G: Fn(f64) -> C64>(g: &G, x: f64, k: usize, h: f64) -> C64 {
    if k == 0 {
        return g(x);
    }
    let [d0, d1, d2] = [1.0, 2.0, 4.0].map(|m| central(g, x, k, h / m));
    let (r1, r2) = ((d1 * 4.0 - d0) / 3.0, (d2 * 4.0 - d1) / 3.0);
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    (r2 * 16.0 - r1) / (15.0 * fact)
}

/// Step used for order `k` given a base step.
pub(crate) fn fd_step(base: f64, k: usize) -> f64 {
    base * (1.0 + 0.25 * k as f64)
}

impl<F: Fn(f64, C64) -> C64 + Sync> JetProvider1D for FiniteDifferenceJet<F> {
    fn taylor(&self, u: f64, n: usize, s: C64) -> Vec<C64> {
        assert!(n <= 8, "finite-difference jets support orders up to 8");
        let g = |x: f64| (self.f)(x, s);
        (0..=n)
            .map(|k| richardson_coefficient(&g, u, k, fd_step(self.step, k)))
            .collect()
    }
    fn max_order(&self) -> Option<usize> {
        Some(8)
    }
}

/// Candidate poles `-(B+j)/A`, `j = 1..=count`.
pub fn poles_l(a: u32, b: u32, count: usize) -> Vec<f64> {
    (1..=count).map(|j| -((b as usize + j) as f64) / a as f64).collect()
}

/// Residue at `s_j = -(B+j)/A`: `ψ_{j-1}(s_j) / A`.
pub fn residue_l(a: u32, b: u32, jets: &dyn JetProvider1D, j: usize) -> C64 {
    assert!(j >= 1);
    let sj = C64::new(-((b as usize + j) as f64) / a as f64, 0.0);
    jets.taylor(0.0, j - 1, sj)[j - 1] / a as f64
}

/// Smallest `N` with `-(B+N+2)/A < Re s - 1`.
pub fn default_order(a: u32, b: u32, s: C64) -> usize {
    let need = -(a as f64) * (s.re - 1.0) - b as f64 - 2.0;
    if need < 0.0 {
        0
    } else {
        need.floor() as usize + 1
    }
}

fn nearest_lattice_pole(a: u32, b: u32, s: C64) -> f64 {
    let j = (-(a as f64 * s.re) - b as f64).round().max(1.0);
    -(b as f64 + j) / a as f64
}

/// Power integral `∫_lo^hi t^e K(t) dt` where `K(t) = Σ_k d_k t^k` on
/// `[0, delta]` and is evaluated pointwise on `[delta, hi]`. Returns
/// `(value, error estimate)`.
pub(crate) fn split_power_integral<K: FnMut(f64) -> C64>(
    e: C64,
    lo: f64,
    hi: f64,
    delta: f64,
    series: &[C64],
    mut pointwise: K,
    cfg: &QuadratureConfig,
) -> (C64, f64) {
    let mut value = C64::new(0.0, 0.0);
    let mut err = 0.0;
    let mid = hi.min(delta);
    if mid > lo {
        let (l_hi, l_lo) = (mid.ln(), if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY });
        let mut last = 0.0;
        for (k, &d) in series.iter().enumerate() {
            if d == C64::new(0.0, 0.0) {
                continue;
            }
            let p = e + (k + 1) as f64;
            let mut term = (p * l_hi).exp();
            if lo > 0.0 {
                term -= (p * l_lo).exp();
            }
            let t = d * term / p;
            value += t;
            last = t.norm();
        }
        err += last;
    }
    let start = lo.max(delta);
    if hi > start {
        let r = integrate(|t: f64| (e * t.ln()).exp() * pointwise(t), start, hi, cfg.tol);
        value += r.value;
        err += r.error;
    }
    (value, err)
}

/// Continue `L(s)` to `Re s > -(B+N+2)/A`. `order = None` picks the default `N`.
pub fn continue_l(
    a: u32,
    b: u32,
    r: f64,
    jets: &dyn JetProvider1D,
    s: C64,
    order: Option<usize>,
    cfg: &QuadratureConfig,
) -> Result<ContinuationResult> {
    if a == 0 || r <= 0.0 {
        return Err(ZetaError::Precondition("need A ≥ 1 and r > 0".into()));
    }
    let n = order.unwrap_or_else(|| default_order(a, b, s));
    let af = a as f64;
    let bound = -((b as usize + n + 2) as f64) / af;
    if s.re <= bound {
        return Err(ZetaError::HalfPlaneExceeded {
            re: s.re,
            bound,
            detail: format!("expansion order N = {n}"),
        });
    }
    let radius = cfg.exclusion_radius / af;
    for j in 1..=n + 1 {
        let pole = -((b as usize + j) as f64) / af;
        if (s - pole).norm() < radius {
            return Err(ZetaError::PoleProximity { s, pole, radius });
        }
    }
    if let Some(m) = jets.max_order() {
        if n + 1 > m {
            return Err(ZetaError::Precondition(format!(
                "order N = {n} needs derivatives up to {} but the provider stops at {m}",
                n + 1
            )));
        }
    }
    let e = s * af + b as f64;
    let ln_r = r.ln();
    let series_mode = jets.expansion_radius();
    let extra = if series_mode.is_some() { cfg.series_extra } else { 0 };
    let c = jets.taylor(0.0, n + extra, s);
    let mut value = C64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for (alpha, &ca) in c.iter().enumerate().take(n + 1) {
        let p = e + (alpha + 1) as f64;
        let t = ca * (p * ln_r).exp() / p;
        value += t;
        magnitude += t.norm();
    }
    let big_e = e + (n + 1) as f64;
    let (rem, rem_err) = match series_mode {
        Some(rho) => {
            let delta = (0.5 * rho).min(r);
            let taylor_poly = |u: f64| c[..=n].iter().rev().fold(C64::new(0.0, 0.0), |acc, &x| acc * u + x);
            split_power_integral(
                big_e,
                0.0,
                r,
                delta,
                &c[n + 1..],
                |u| (jets.value(u, s) - taylor_poly(u)) / u.powi(n as i32 + 1),
                cfg,
            )
        }
        None => {
            let (t, w) = gauss_legendre(cfg.kernel_nodes);
            let kernel = |u: f64| -> C64 {
                let mut acc = C64::new(0.0, 0.0);
                for (ti, wi) in t.iter().zip(&w) {
                    let tt = 0.5 * (ti + 1.0);
                    let d = jets.taylor(tt * u, n + 1, s)[n + 1];
                    acc += d * (0.5 * wi * (1.0 - tt).powi(n as i32) * (n + 1) as f64);
                }
                acc
            };
            let res = integrate_power(big_e, r, kernel, cfg.tol);
            (res.value, res.error)
        }
    };
    value += rem;
    magnitude += rem.norm();
    Ok(ContinuationResult {
        value,
        order_used: n,
        half_plane: bound,
        nearest_pole: Some(nearest_lattice_pole(a, b, s)),
        remainder_estimate: rem_err + 64.0 * f64::EPSILON * magnitude,
        binding: format!("remainder integral, Re s > -(B+N+2)/A with N = {n}"),
    })
}

/// Direct quadrature of `L(s)`, valid for `Re s > -(B+1)/A`.
pub fn direct_l(a: u32, b: u32, r: f64, jets: &dyn JetProvider1D, s: C64, cfg: &QuadratureConfig) -> Result<C64> {
    let e = s * a as f64 + b as f64;
    if e.re <= -1.0 {
        return Err(ZetaError::HalfPlaneExceeded {
            re: s.re,
            bound: -((b + 1) as f64) / a as f64,
            detail: "direct integral diverges".into(),
        });
    }
    Ok(integrate_power(e, r, |u| jets.value(u, s), cfg.tol).value)
}

/// `L(s)` for compactly supported `ψ`: `[0, r]` by [`continue_l`] and the
/// entire piece `∫_r^{end} u^{As+B} ψ` by quadrature.
pub fn continue_l_unbounded(
    a: u32,
    b: u32,
    r: f64,
    support_end: f64,
    jets: &dyn JetProvider1D,
    s: C64,
    order: Option<usize>,
    cfg: &QuadratureConfig,
) -> Result<ContinuationResult> {
    let mut head = continue_l(a, b, r, jets, s, order, cfg)?;
    if support_end > r {
        let e = s * a as f64 + b as f64;
        let tail = integrate(|u: f64| (e * u.ln()).exp() * jets.value(u, s), r, support_end, cfg.tol);
        head.value += tail.value;
        head.remainder_estimate += tail.error;
    }
    Ok(head)
}

/// The entire piece `∫_r^{end} u^{As+B} ψ` alone.
pub fn tail_l(a: u32, b: u32, r: f64, support_end: f64, jets: &dyn JetProvider1D, s: C64, cfg: &QuadratureConfig) -> C64 {
    let e = s * a as f64 + b as f64;
    integrate(|u: f64| (e * u.ln()).exp() * jets.value(u, s), r, support_end, cfg.tol).value
}
