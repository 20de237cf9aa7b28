//! Continuation of `H(s) = ∬_D u^{as} v^{bs} ψ(u, v; s) du dv` over
//! `D = {v^p < u ≤ R, 0 < v ≤ r}`.
//!
//! With `c_{αβ}` the scaled Taylor coefficients of `ψ` at the origin,
//!
//! `ψ = Σ_{α,β≤N} c_{αβ} u^α v^β + Σ_{α≤N} u^α v^{N+1} Ã_α(v)
//!      + Σ_{β≤N} v^β u^{N+1} B̃_β(u) + (uv)^{N+1} C̃(u, v)`,
//!
//! so `H` is a sum of closed-form monomial integrals `H_{αβ}` and three
//! remainder groups. Every pole lies in `{-j/a} ∪ {-k/b} ∪ {-(p+l)/(ap+b)}`.
//!
//! When the provider reports expansion radii, remainder integrals near the
//! axes are summed in closed form from higher Taylor coefficients and only
//! pieces bounded away from the axes are integrated numerically. Otherwise
//! the kernels are evaluated from the integral form of Taylor's theorem.
//!
//! Everything is evaluated on a slice of `s` values at once.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::funcmodel::Polynomial;
use crate::model1d::{fd_step, richardson_coefficient, ContinuationResult};
use crate::newton::Rational;
use crate::quad::{
    gauss_legendre, grading_power, integrate, integrate_graded, GradedPoint, QuadValue,
    QuadratureConfig, Toward,
};
use crate::series::Jet2;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// `D = {(u, v) : v^p < u ≤ R, 0 < v ≤ r}` with `r^p ≤ R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionD {
    pub p: u32,
    pub r: f64,
    pub big_r: f64,
}

impl RegionD {
    pub fn new(p: u32, r: f64, big_r: f64) -> Result<Self> {
        if p == 0 || r.is_nan() || r <= 0.0 || big_r.is_nan() || big_r <= 0.0 {
            return Err(ZetaError::Precondition("region needs p ≥ 1 and r, R > 0".into()));
        }
        if r.powi(p as i32) > big_r * (1.0 + 1e-12) {
            return Err(ZetaError::Precondition(format!(
                "region needs r^p ≤ R, got r = {r}, p = {p}, R = {big_r}"
            )));
        }
        Ok(Self { p, r, big_r })
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        v > 0.0 && v <= self.r && u > v.powi(self.p as i32) && u <= self.big_r
    }
}

/// Supplier of scaled Taylor coefficients `∂_u^i ∂_v^j ψ(u, v; s) / (i! j!)`.
pub trait JetProvider2D: Sync {
    fn taylor(&self, u: f64, v: f64, nu: usize, nv: usize, s: C64) -> Jet2;

    fn taylor_batch(&self, u: f64, v: f64, nu: usize, nv: usize, ss: &[C64]) -> Vec<Jet2> {
        ss.iter().map(|&s| self.taylor(u, v, nu, nv, s)).collect()
    }

    fn value(&self, u: f64, v: f64, s: C64) -> C64 {
        self.taylor(u, v, 0, 0, s).get(0, 0)
    }

    fn value_batch(&self, u: f64, v: f64, ss: &[C64]) -> Vec<C64> {
        ss.iter().map(|&s| self.value(u, v, s)).collect()
    }

    /// `(ρ_u, ρ_v)`: the expansion in `u` at each `(0, v)` with `0 ≤ v ≤ r`
    /// converges to `ψ` on `|Δu| < ρ_u`, the expansion in `v` at each `(u, 0)`
    /// with `0 ≤ u ≤ R` on `|Δv| < ρ_v`, and the double series at the origin on
    /// the polydisc of these radii.
    fn expansion_radii(&self) -> Option<(f64, f64)> {
        None
    }

    fn max_order(&self) -> Option<usize> {
        None
    }
}

pub struct ConstJet2(pub C64);

impl JetProvider2D for ConstJet2 {
    fn taylor(&self, _u: f64, _v: f64, nu: usize, nv: usize, _s: C64) -> Jet2 {
        Jet2::constant(self.0, nu, nv)
    }
    fn expansion_radii(&self) -> Option<(f64, f64)> {
        Some((f64::INFINITY, f64::INFINITY))
    }
}

/// `ψ(u, v) = e^{ku·u + kv·v}`.
pub struct ExpJet2 {
    pub ku: f64,
    pub kv: f64,
}

fn exp_scaled(k: f64, n: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n + 1);
    let mut t = 1.0;
    for i in 0..=n {
        c.push(t);
        t *= k / (i + 1) as f64;
    }
    c
}

impl JetProvider2D for ExpJet2 {
    fn taylor(&self, u: f64, v: f64, nu: usize, nv: usize, _s: C64) -> Jet2 {
        let e = (self.ku * u + self.kv * v).exp();
        let (cu, cv) = (exp_scaled(self.ku, nu), exp_scaled(self.kv, nv));
        let mut j = Jet2::zeros(nu, nv);
        for (i, x) in cu.iter().enumerate() {
            for (k, y) in cv.iter().enumerate() {
                j.set(i, k, C64::new(e * x * y, 0.0));
            }
        }
        j
    }
    fn expansion_radii(&self) -> Option<(f64, f64)> {
        Some((f64::INFINITY, f64::INFINITY))
    }
}

/// A polynomial in `(u, v)`.
pub struct PolyJet2(pub Polynomial);

impl JetProvider2D for PolyJet2 {
    fn taylor(&self, u: f64, v: f64, nu: usize, nv: usize, _s: C64) -> Jet2 {
        self.0.taylor(u, v, nu, nv)
    }
    fn expansion_radii(&self) -> Option<(f64, f64)> {
        Some((f64::INFINITY, f64::INFINITY))
    }
}

/// Jets from a closure.
pub struct FnJet2<F> {
    pub f: F,
    pub radii: Option<(f64, f64)>,
}

impl<F: Fn(f64, f64, usize, usize, C64) -> Jet2 + Sync> JetProvider2D for FnJet2<F> {
    fn taylor(&self, u: f64, v: f64, nu: usize, nv: usize, s: C64) -> Jet2 {
        (self.f)(u, v, nu, nv, s)
    }
    fn expansion_radii(&self) -> Option<(f64, f64)> {
        self.radii
    }
}

/// Tensor central differences with Richardson extrapolation, orders up to 8
/// in each variable.
pub struct FiniteDifferenceJet2<F> {
    pub f: F,
    pub step: f64,
}

impl<F: Fn(f64, f64, C64) -> C64 + Sync> FiniteDifferenceJet2<F> {
    pub fn new(f: F) -> Self {
        Self { f, step: 0.2 }
    }
}

impl<F: Fn(f64, f64, C64) -> C64 + Sync> JetProvider2D for FiniteDifferenceJet2<F> {
    fn taylor(&self, u: f64, v: f64, nu: usize, nv: usize, s: C64) -> Jet2 {
        assert!(nu <= 8 && nv <= 8, "finite-difference jets support orders up to 8");
        let mut out = Jet2::zeros(nu, nv);
        for j in 0..=nv {
            let along_v = |x: f64| {
                let g = |y: f64| (self.f)(x, y, s);
                richardson_coefficient(&g, v, j, fd_step(self.step, j))
            };
            for i in 0..=nu {
                out.set(i, j, richardson_coefficient(&along_v, u, i, fd_step(self.step, i)));
            }
        }
        out
    }
    fn value(&self, u: f64, v: f64, s: C64) -> C64 {
        (self.f)(u, v, s)
    }
    fn max_order(&self) -> Option<usize> {
        Some(8)
    }
}

fn h_raw(p: u32, r: f64, big_r: f64, a: u32, b: u32, alpha: usize, beta: usize, s: C64) -> C64 {
    let pf = p as f64;
    let e1 = s * a as f64 + (alpha + 1) as f64;
    let e2 = s * b as f64 + (beta + 1) as f64;
    let e3 = s * (a as f64 * pf + b as f64) + (alpha as f64 * pf + beta as f64 + pf + 1.0);
    let (lr, lbig) = (r.ln(), big_r.ln());
    ((e1 * lbig + e2 * lr).exp() / e2 - (e3 * lr).exp() / e3) / e1
}

fn exclusion(cfg: &QuadratureConfig, a: u32, b: u32) -> f64 {
    cfg.exclusion_radius / a.max(b) as f64
}

/// `∬_D u^{as+α} v^{bs+β} du dv` in closed form.
pub fn h_monomial(region: &RegionD, a: u32, b: u32, alpha: usize, beta: usize, s: C64) -> Result<C64> {
    let radius = exclusion(&QuadratureConfig::default(), a, b);
    let pf = region.p as f64;
    let checks = [
        (a as f64, (alpha + 1) as f64),
        (b as f64, (beta + 1) as f64),
        (a as f64 * pf + b as f64, alpha as f64 * pf + beta as f64 + pf + 1.0),
    ];
    for (scale, shift) in checks {
        if scale > 0.0 {
            let pole = -shift / scale;
            if (s - pole).norm() < radius {
                return Err(ZetaError::PoleProximity { s, pole, radius });
            }
        }
    }
    Ok(h_raw(region.p, region.r, region.big_r, a, b, alpha, beta, s))
}

/// Source lattice of a candidate pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PoleLattice {
    /// `-j/a`
    U,
    /// `-k/b`
    V,
    /// `-(p+l)/(ap+b)`
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidatePole {
    pub location: f64,
    pub numer: i64,
    pub denom: i64,
    pub sources: Vec<PoleLattice>,
}

/// Candidate poles greater than `above`, closest to the origin first.
pub fn candidate_poles(a: u32, b: u32, p: u32, above: f64) -> Vec<CandidatePole> {
    let mut map: BTreeMap<Rational, Vec<PoleLattice>> = BTreeMap::new();
    let mut push = |num: i64, den: i64, tag: PoleLattice| {
        let q = Rational::new(-num, den);
        let e = map.entry(q).or_default();
        if !e.contains(&tag) {
            e.push(tag);
        }
    };
    let lattices = [
        (a as i64, 0i64, PoleLattice::U),
        (b as i64, 0, PoleLattice::V),
        ((a * p + b) as i64, p as i64, PoleLattice::Mixed),
    ];
    for (den, offset, tag) in lattices {
        if den == 0 {
            continue;
        }
        let mut l = 1i64;
        while -((offset + l) as f64) / den as f64 > above {
            push(offset + l, den, tag);
            l += 1;
        }
    }
    map.into_iter()
        .rev()
        .map(|(q, sources)| CandidatePole {
            location: *q.numer() as f64 / *q.denom() as f64,
            numer: *q.numer(),
            denom: *q.denom(),
            sources,
        })
        .collect()
}

/// Half-plane `Re s > bound` on which all remainder groups at order `N`
/// converge, with the binding group.
pub fn half_plane(a: u32, b: u32, p: u32, n: usize) -> (f64, String) {
    let (af, bf, pf, nf) = (a as f64, b as f64, p as f64, n as f64);
    let d = af * pf + bf;
    let branches = [
        (-(nf + 2.0) / bf, "A and C remainders: -(N+2)/b"),
        (-(pf + nf + 2.0) / d, "A remainder at α = 0: -(p+N+2)/(ap+b)"),
        (-(pf * nf + 2.0 * pf + 1.0) / d, "B remainder at β = 0: -(pN+2p+1)/(ap+b)"),
    ];
    let (bound, label) = branches
        .iter()
        .copied()
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .unwrap();
    (bound, format!("{label} with N = {n}"))
}

/// Smallest `N` for which every branch of [`half_plane`] lies at least two of
/// its own lattice steps to the left of `re`.
pub fn default_order_2d(a: u32, b: u32, p: u32, re: f64) -> usize {
    let (af, bf, pf) = (a as f64, b as f64, p as f64);
    let d = af * pf + bf;
    (0..10_000)
        .find(|&n| {
            let nf = n as f64;
            -(nf + 2.0) / bf <= re - 2.0 / bf
                && -(pf + nf + 2.0) / d <= re - 2.0 / d
                && -(pf * nf + 2.0 * pf + 1.0) / d <= re - 2.0 * pf / d
        })
        .unwrap_or(10_000)
}

/// Closed-form `∫_lo^hi t^{e+k} dt` summed against `d_k`; returns the sum
/// and the magnitude of the last nonzero term.
fn series_power_sum(e: C64, lo: f64, hi: f64, d: &[C64]) -> (C64, f64) {
    let (l_hi, l_lo) = (hi.ln(), if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY });
    let mut value = ZERO;
    let mut last = 0.0;
    for (k, &dk) in d.iter().enumerate() {
        if dk == ZERO {
            continue;
        }
        let q = e + (k + 1) as f64;
        let mut t = (q * l_hi).exp();
        if lo > 0.0 {
            t -= (q * l_lo).exp();
        }
        let term = dk * t / q;
        value += term;
        last = term.norm();
    }
    (value, last)
}

/// Componentwise `∫_lo^hi t^{e_i} K_i(t) dt`, with `K_i = Σ_k series[i][k] t^k`
/// on `[lo, delta]` and `kernel(t)[i]` on `[delta, hi]`.
pub(crate) fn split_power_multi<K: FnMut(f64) -> Vec<C64>>(
    exps: &[C64],
    lo: f64,
    hi: f64,
    delta: f64,
    series: &[Vec<C64>],
    mut kernel: K,
    cfg: &QuadratureConfig,
) -> (Vec<C64>, f64) {
    let mut out = vec![ZERO; exps.len()];
    let mut err = 0.0;
    let mid = hi.min(delta);
    if mid > lo {
        for (i, &e) in exps.iter().enumerate() {
            let (v, last) = series_power_sum(e, lo, mid, &series[i]);
            out[i] += v;
            err += last;
        }
    }
    let start = lo.max(delta);
    if hi > start {
        let weighted = |k: Vec<C64>, ln_t: f64, ln_jac: f64| -> Vec<C64> {
            k.iter()
                .zip(exps)
                .map(|(&k, &e)| {
                    let w = (e * ln_t + ln_jac).exp();
                    if w == ZERO || k == ZERO {
                        ZERO
                    } else {
                        w * k
                    }
                })
                .collect()
        };
        let res = if start > 0.0 {
            integrate(|t: f64| weighted(kernel(t), t.ln(), 0.0), start, hi, cfg.tol)
        } else {
            let hint = exps.iter().map(|e| e.re).fold(f64::INFINITY, f64::min);
            integrate_graded(
                |pt: &GradedPoint| weighted(kernel(pt.x), pt.ln_dist, pt.ln_jac),
                0.0,
                hi,
                Toward::Lo,
                grading_power(hint),
                cfg.tol,
            )
        };
        out.axpy(1.0, &res.value);
        err += res.error;
    }
    (out, err)
}

fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut t = 1.0;
    for _ in 0..=n {
        out.push(t);
        t *= x;
    }
    out
}

struct Engine<'a> {
    p: u32,
    pf: f64,
    r: f64,
    big_r: f64,
    a: u32,
    b: u32,
    jets: &'a dyn JetProvider2D,
    ss: &'a [C64],
    n: usize,
    /// Highest order of the origin jets.
    m: usize,
    cfg: &'a QuadratureConfig,
    /// `(δ_u, δ_v)` for the series split, absent for integral-form kernels.
    split: Option<(f64, f64)>,
    origin: Vec<Jet2>,
    /// Gauss–Legendre nodes and weights on `[0, 1]`.
    gl: (Vec<f64>, Vec<f64>),
}

impl<'a> Engine<'a> {
    fn new(
        region: &RegionD,
        a: u32,
        b: u32,
        jets: &'a dyn JetProvider2D,
        ss: &'a [C64],
        n: usize,
        cfg: &'a QuadratureConfig,
    ) -> Result<Self> {
        let pf = region.p as f64;
        let split = jets.expansion_radii().map(|(ru, rv)| {
            let du = (0.5 * ru).min(region.big_r);
            let dv = (0.5 * rv).min(region.r).min(du.powf(1.0 / pf));
            (du, dv)
        });
        let m = if split.is_some() { n + cfg.series_extra } else { n + 1 };
        if let Some(mo) = jets.max_order() {
            if m > mo {
                return Err(ZetaError::Precondition(format!(
                    "order N = {n} needs derivatives up to {m} but the provider stops at {mo}"
                )));
            }
        }
        let origin = jets.taylor_batch(0.0, 0.0, if split.is_some() { m } else { n }, if split.is_some() { m } else { n }, ss);
        let (x, w) = gauss_legendre(cfg.kernel_nodes.max(2));
        let gl = (
            x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
            w.iter().map(|w| 0.5 * w).collect(),
        );
        Ok(Self {
            p: region.p,
            pf,
            r: region.r,
            big_r: region.big_r,
            a,
            b,
            jets,
            ss,
            n,
            m,
            cfg,
            split,
            origin,
            gl,
        })
    }

    fn bare(region: &RegionD, a: u32, b: u32, jets: &'a dyn JetProvider2D, ss: &'a [C64], cfg: &'a QuadratureConfig) -> Self {
        Self {
            p: region.p,
            pf: region.p as f64,
            r: region.r,
            big_r: region.big_r,
            a,
            b,
            jets,
            ss,
            n: 0,
            m: 0,
            cfg,
            split: None,
            origin: Vec::new(),
            gl: (Vec::new(), Vec::new()),
        }
    }

    fn c(&self, si: usize, i: usize, j: usize) -> C64 {
        self.origin[si].get(i, j)
    }

    /// `Σ c_{αβ} H_{αβ}(p, rr, bigr)` over the given index ranges, with the
    /// sum of absolute terms.
    fn h_sum(&self, si: usize, rr: f64, bigr: f64, alphas: (usize, usize), betas: (usize, usize)) -> (C64, f64) {
        let s = self.ss[si];
        let (af, bf, pf) = (self.a as f64, self.b as f64, self.pf);
        let (lr, lbig) = (rr.ln(), bigr.ln());
        let base1 = s * af + 1.0;
        let base2 = s * bf + 1.0;
        let base3 = s * (af * pf + bf) + pf + 1.0;
        let w12 = (base1 * lbig + base2 * lr).exp();
        let w3 = (base3 * lr).exp();
        let pu = powers(bigr, alphas.1);
        let pv = powers(rr, betas.1);
        let pvp = powers(rr.powf(pf), alphas.1);
        let mut acc = ZERO;
        let mut mag = 0.0;
        for al in alphas.0..=alphas.1 {
            let e1 = base1 + al as f64;
            for be in betas.0..=betas.1 {
                let c = self.c(si, al, be);
                if c == ZERO {
                    continue;
                }
                let e2 = base2 + be as f64;
                let e3 = base3 + (al as f64 * pf + be as f64);
                let h = (w12 * (pu[al] * pv[be]) / e2 - w3 * (pvp[al] * pv[be]) / e3) / e1;
                let t = c * h;
                acc += t;
                mag += t.norm();
            }
        }
        (acc, mag)
    }

    fn poly_part(&self) -> Vec<(C64, f64)> {
        (0..self.ss.len())
            .map(|si| self.h_sum(si, self.r, self.big_r, (0, self.n), (0, self.n)))
            .collect()
    }

    /// `Ã_α(v)` for `α ∈ [lo, hi]`, indexed `[si][α - lo]`.
    fn a_tilde(&self, v: f64, lo: usize, hi: usize) -> Vec<Vec<C64>> {
        let n = self.n;
        match self.split {
            Some(_) => {
                let g = self.jets.taylor_batch(0.0, v, hi, 0, self.ss);
                let pv = powers(v, n);
                let scale = v.powi(n as i32 + 1);
                (0..self.ss.len())
                    .map(|si| {
                        (lo..=hi)
                            .map(|al| {
                                let poly: C64 = (0..=n).map(|be| self.c(si, al, be) * pv[be]).sum();
                                (g[si].get(al, 0) - poly) / scale
                            })
                            .collect()
                    })
                    .collect()
            }
            None => {
                let mut acc = vec![vec![ZERO; hi - lo + 1]; self.ss.len()];
                for (t, w) in self.gl.0.iter().zip(&self.gl.1) {
                    let jets = self.jets.taylor_batch(0.0, t * v, hi, n + 1, self.ss);
                    let wt = w * (1.0 - t).powi(n as i32) * (n + 1) as f64;
                    for (si, j) in jets.iter().enumerate() {
                        for al in lo..=hi {
                            acc[si][al - lo] += j.get(al, n + 1) * wt;
                        }
                    }
                }
                acc
            }
        }
    }

    /// `B̃_β(u)` for `β ∈ [lo, hi]`, indexed `[si][β - lo]`.
    fn b_tilde(&self, u: f64, lo: usize, hi: usize) -> Vec<Vec<C64>> {
        let n = self.n;
        match self.split {
            Some(_) => {
                let h = self.jets.taylor_batch(u, 0.0, 0, hi, self.ss);
                let pu = powers(u, n);
                let scale = u.powi(n as i32 + 1);
                (0..self.ss.len())
                    .map(|si| {
                        (lo..=hi)
                            .map(|be| {
                                let poly: C64 = (0..=n).map(|al| self.c(si, al, be) * pu[al]).sum();
                                (h[si].get(0, be) - poly) / scale
                            })
                            .collect()
                    })
                    .collect()
            }
            None => {
                let mut acc = vec![vec![ZERO; hi - lo + 1]; self.ss.len()];
                for (t, w) in self.gl.0.iter().zip(&self.gl.1) {
                    let jets = self.jets.taylor_batch(t * u, 0.0, n + 1, hi, self.ss);
                    let wt = w * (1.0 - t).powi(n as i32) * (n + 1) as f64;
                    for (si, j) in jets.iter().enumerate() {
                        for be in lo..=hi {
                            acc[si][be - lo] += j.get(n + 1, be) * wt;
                        }
                    }
                }
                acc
            }
        }
    }

    /// `C̃(u, v)` in integral form.
    fn c_tilde_integral(&self, u: f64, v: f64) -> Vec<C64> {
        let n = self.n;
        let (x, w) = gauss_legendre((self.cfg.kernel_nodes / 2).max(2));
        let nodes: Vec<(f64, f64)> = x
            .iter()
            .zip(&w)
            .map(|(t, w)| {
                let t = 0.5 * (t + 1.0);
                (t, 0.5 * w * (1.0 - t).powi(n as i32) * (n + 1) as f64)
            })
            .collect();
        let mut acc = vec![ZERO; self.ss.len()];
        for &(t1, w1) in &nodes {
            for &(t2, w2) in &nodes {
                let jets = self.jets.taylor_batch(t1 * u, t2 * v, n + 1, n + 1, self.ss);
                for (o, j) in acc.iter_mut().zip(&jets) {
                    *o += j.get(n + 1, n + 1) * (w1 * w2);
                }
            }
        }
        acc
    }

    /// Series `d_k = c_{α, N+1+k}` of `Ã_α` at the origin.
    fn a_series(&self, si: usize, al: usize) -> Vec<C64> {
        if self.split.is_none() {
            return Vec::new();
        }
        (self.n + 1..=self.m).map(|be| self.c(si, al, be)).collect()
    }

    fn b_series(&self, si: usize, be: usize) -> Vec<C64> {
        if self.split.is_none() {
            return Vec::new();
        }
        (self.n + 1..=self.m).map(|al| self.c(si, al, be)).collect()
    }

    /// `A_α` for each requested `α ≤ N`, indexed `[si][k]`.
    fn a_group(&self, alphas: &[usize]) -> (Vec<Vec<C64>>, f64) {
        let ns = self.ss.len();
        let (af, bf, pf, nf) = (self.a as f64, self.b as f64, self.pf, self.n as f64);
        let hi = alphas.iter().copied().max().unwrap_or(0);
        let mut exps = Vec::new();
        let mut series = Vec::new();
        for &al in alphas {
            for (si, &s) in self.ss.iter().enumerate() {
                exps.push(s * bf + nf + 1.0);
                exps.push(s * (af * pf + bf) + al as f64 * pf + pf + nf + 1.0);
                let d = self.a_series(si, al);
                series.push(d.clone());
                series.push(d);
            }
        }
        let delta = self.split.map_or(0.0, |(_, dv)| dv);
        let (vals, err) = split_power_multi(
            &exps,
            0.0,
            self.r,
            delta,
            &series,
            |v| {
                let at = self.a_tilde(v, 0, hi);
                let mut out = Vec::with_capacity(exps.len());
                for &al in alphas {
                    for row in at.iter() {
                        out.push(row[al]);
                        out.push(row[al]);
                    }
                }
                out
            },
            self.cfg,
        );
        let lbig = self.big_r.ln();
        let mut out = vec![vec![ZERO; alphas.len()]; ns];
        for (k, &al) in alphas.iter().enumerate() {
            for (si, &s) in self.ss.iter().enumerate() {
                let idx = 2 * (k * ns + si);
                let e = s * af + (al + 1) as f64;
                out[si][k] = ((e * lbig).exp() * vals[idx] - vals[idx + 1]) / e;
            }
        }
        (out, err)
    }

    /// `B_β` for each requested `β ≤ N`, indexed `[si][k]`.
    fn b_group(&self, betas: &[usize]) -> (Vec<Vec<C64>>, f64) {
        let ns = self.ss.len();
        let (af, bf, pf, nf) = (self.a as f64, self.b as f64, self.pf, self.n as f64);
        let hi = betas.iter().copied().max().unwrap_or(0);
        let rp = self.r.powf(pf);
        let delta = self.split.map_or(0.0, |(du, _)| du);
        let mut e_near = Vec::new();
        let mut e_far = Vec::new();
        let mut series = Vec::new();
        for &be in betas {
            for (si, &s) in self.ss.iter().enumerate() {
                e_near.push((s * (af * pf + bf) + pf * nf + pf + be as f64 + 1.0) / pf);
                e_far.push(s * af + nf + 1.0);
                series.push(self.b_series(si, be));
            }
        }
        let kernel = |u: f64| {
            let bt = self.b_tilde(u, 0, hi);
            let mut out = Vec::with_capacity(betas.len() * ns);
            for &be in betas {
                for row in bt.iter() {
                    out.push(row[be]);
                }
            }
            out
        };
        let (near, e1) = split_power_multi(&e_near, 0.0, rp, delta, &series, kernel, self.cfg);
        let (far, e2) = if self.big_r > rp {
            split_power_multi(&e_far, rp, self.big_r, delta, &series, kernel, self.cfg)
        } else {
            (vec![ZERO; e_far.len()], 0.0)
        };
        let lr = self.r.ln();
        let mut out = vec![vec![ZERO; betas.len()]; ns];
        for (k, &be) in betas.iter().enumerate() {
            for (si, &s) in self.ss.iter().enumerate() {
                let idx = k * ns + si;
                let e = s * bf + (be + 1) as f64;
                out[si][k] = (near[idx] + (e * lr).exp() * far[idx]) / e;
            }
        }
        (out, e1 + e2)
    }

    /// `∬ u^{as+ku} v^{bs+kv} K(u, v)` over `D ∩ {u > ulo, vlo < v ≤ vhi}`.
    /// `prep(v)` is evaluated once per outer node and handed to `kernel`.
    fn region_integral<T, P, F>(&self, ulo: f64, vlo: f64, vhi: f64, ku: usize, kv: usize, prep: P, kernel: F) -> (Vec<C64>, f64)
    where
        P: Fn(f64) -> T,
        F: Fn(f64, f64, &T) -> Vec<C64>,
    {
        let ns = self.ss.len();
        if vhi <= vlo || ulo >= self.big_r {
            return (vec![ZERO; ns], 0.0);
        }
        let ea: Vec<C64> = self.ss.iter().map(|&s| s * self.a as f64 + (ku + 1) as f64).collect();
        let eb: Vec<C64> = self.ss.iter().map(|&s| s * self.b as f64 + kv as f64).collect();
        let lbig = self.big_r.ln();
        let eb_min = eb.iter().map(|e| e.re).fold(f64::INFINITY, f64::min);
        // the last component carries the inner error, integrated with the weight |v^{eb_min}|
        let inner = |v: f64| -> Vec<C64> {
            let lo = ulo.max(v.powi(self.p as i32));
            if lo >= self.big_r {
                return vec![ZERO; ns + 1];
            }
            let t = prep(v);
            let res = integrate(
                |w: f64| {
                    let k = kernel(w.exp(), v, &t);
                    k.iter()
                        .zip(&ea)
                        .map(|(&k, &e)| if k == ZERO { ZERO } else { k * (e * w).exp() })
                        .collect::<Vec<C64>>()
                },
                lo.max(f64::MIN_POSITIVE).ln(),
                lbig,
                self.cfg.tol,
            );
            let mut out = res.value;
            out.push(C64::new(res.error, 0.0));
            out
        };
        let weighted = |k: Vec<C64>, ln_v: f64, ln_jac: f64| -> Vec<C64> {
            let mut out: Vec<C64> = k[..ns]
                .iter()
                .zip(&eb)
                .map(|(&k, &e)| if k == ZERO { ZERO } else { k * (e * ln_v + ln_jac).exp() })
                .collect();
            out.push(k[ns] * (eb_min * ln_v + ln_jac).exp());
            out
        };
        let res = if vlo > 0.0 {
            integrate(|v: f64| weighted(inner(v), v.ln(), 0.0), vlo, vhi, self.cfg.tol)
        } else {
            let hint = ea
                .iter()
                .zip(&eb)
                .map(|(a, b)| b.re + self.pf * a.re.min(0.0))
                .fold(f64::INFINITY, f64::min);
            integrate_graded(
                |pt: &GradedPoint| weighted(inner(pt.x), pt.ln_dist, pt.ln_jac),
                0.0,
                vhi,
                Toward::Lo,
                grading_power(hint),
                self.cfg.tol,
            )
        };
        let mut value = res.value;
        let inner_err = value.pop().map_or(0.0, |z| z.re.abs());
        (value, res.error + inner_err)
    }

    /// The `C` remainder group, per `s`.
    fn c_group(&self) -> (Vec<(C64, f64)>, f64) {
        let ns = self.ss.len();
        let n = self.n;
        let (af, bf, pf, nf) = (self.a as f64, self.b as f64, self.pf, self.n as f64);
        let Some((du, dv)) = self.split else {
            let (v, e) = self.region_integral(0.0, 0.0, self.r, n + 1, n + 1, |_| (), |u, v, _| self.c_tilde_integral(u, v));
            return (v.into_iter().map(|z| (z, z.norm())).collect(), e);
        };
        let m = self.m;
        let mut out: Vec<(C64, f64)> = (0..ns)
            .map(|si| self.h_sum(si, dv, du, (n + 1, m), (n + 1, m)))
            .collect();
        let mut err = 0.0;
        let mut add = |vals: Vec<C64>, e: f64, out: &mut Vec<(C64, f64)>| {
            for (o, v) in out.iter_mut().zip(vals) {
                o.0 += v;
                o.1 += v.norm();
            }
            err += e;
        };
        if du < self.big_r {
            // u > δ_u, v ≤ δ_v: expand in v
            let wv: Vec<Vec<C64>> = self
                .ss
                .iter()
                .map(|&s| {
                    (n + 1..=m)
                        .map(|be| {
                            let e = s * bf + (be + 1) as f64;
                            (e * dv.ln()).exp() / e
                        })
                        .collect()
                })
                .collect();
            let exps: Vec<C64> = self.ss.iter().map(|&s| s * af + nf + 1.0).collect();
            let (vals, e) = split_power_multi(
                &exps,
                du,
                self.big_r,
                du,
                &vec![Vec::new(); ns],
                |u| {
                    self.b_tilde(u, n + 1, m)
                        .iter()
                        .zip(&wv)
                        .map(|(bt, w)| bt.iter().zip(w).map(|(x, y)| x * y).sum())
                        .collect()
                },
                self.cfg,
            );
            add(vals, e, &mut out);
        }
        let vmax = self.r.min(du.powf(1.0 / pf));
        if vmax > dv {
            // v > δ_v, v^p < u ≤ δ_u: expand in u
            let exps: Vec<C64> = self.ss.iter().map(|&s| s * bf + nf + 1.0).collect();
            let ldu = du.ln();
            let (vals, e) = split_power_multi(
                &exps,
                dv,
                vmax,
                dv,
                &vec![Vec::new(); ns],
                |v| {
                    let at = self.a_tilde(v, n + 1, m);
                    let lv = v.ln();
                    self.ss
                        .iter()
                        .zip(&at)
                        .map(|(&s, row)| {
                            let mut acc = ZERO;
                            for (k, &x) in row.iter().enumerate() {
                                if x == ZERO {
                                    continue;
                                }
                                let e = s * af + (n + 1 + k + 1) as f64;
                                acc += x * ((e * ldu).exp() - (e * pf * lv).exp()) / e;
                            }
                            acc
                        })
                        .collect()
                },
                self.cfg,
            );
            add(vals, e, &mut out);
        }
        if du < self.big_r && self.r > dv {
            // both away from the axes: full subtraction
            let (vals, e) = self.region_integral(
                du,
                dv,
                self.r,
                0,
                0,
                |v| {
                    let g = self.jets.taylor_batch(0.0, v, n, 0, self.ss);
                    let pv = powers(v, n);
                    (0..ns)
                        .map(|si| {
                            (0..=n)
                                .map(|al| {
                                    let poly: C64 = (0..=n).map(|be| self.c(si, al, be) * pv[be]).sum();
                                    g[si].get(al, 0) - poly
                                })
                                .collect::<Vec<C64>>()
                        })
                        .collect::<Vec<_>>()
                },
                |u, v, ga| {
                    let psi = self.jets.value_batch(u, v, self.ss);
                    let h = self.jets.taylor_batch(u, 0.0, 0, n, self.ss);
                    let (pu, pv) = (powers(u, n), powers(v, n));
                    (0..ns)
                        .map(|si| {
                            let mut acc = psi[si];
                            for k in 0..=n {
                                acc -= ga[si][k] * pu[k] + h[si].get(0, k) * pv[k];
                            }
                            acc
                        })
                        .collect()
                },
            );
            add(vals, e, &mut out);
        }
        (out, err)
    }
}

fn check_inputs(a: u32, b: u32, ss: &[C64]) -> Result<()> {
    if a == 0 || b == 0 {
        return Err(ZetaError::Precondition("need a, b ≥ 1".into()));
    }
    if ss.is_empty() {
        return Err(ZetaError::Precondition("no evaluation points".into()));
    }
    Ok(())
}

fn check_poles(a: u32, b: u32, p: u32, bound: f64, ss: &[C64], cfg: &QuadratureConfig) -> Result<()> {
    let radius = exclusion(cfg, a, b);
    let poles = candidate_poles(a, b, p, bound - radius);
    for &s in ss {
        for c in &poles {
            if (s - c.location).norm() < radius {
                return Err(ZetaError::PoleProximity { s, pole: c.location, radius });
            }
        }
    }
    Ok(())
}

fn nearest_candidate(a: u32, b: u32, p: u32, s: C64) -> Option<f64> {
    candidate_poles(a, b, p, s.re.min(0.0) - 1.0)
        .into_iter()
        .map(|c| c.location)
        .min_by(|x, y| (s - x).norm().total_cmp(&(s - y).norm()))
}

/// Continue `H` at every point of `ss` with a common order `N`
/// (`None` picks [`default_order_2d`] for the leftmost point).
pub fn continue_h_batch(
    region: &RegionD,
    a: u32,
    b: u32,
    jets: &dyn JetProvider2D,
    ss: &[C64],
    order: Option<usize>,
    cfg: &QuadratureConfig,
) -> Result<Vec<ContinuationResult>> {
    check_inputs(a, b, ss)?;
    let p = region.p;
    let min_re = ss.iter().map(|s| s.re).fold(f64::INFINITY, f64::min);
    let n = order.unwrap_or_else(|| default_order_2d(a, b, p, min_re));
    let (bound, binding) = half_plane(a, b, p, n);
    if min_re <= bound {
        return Err(ZetaError::HalfPlaneExceeded {
            re: min_re,
            bound,
            detail: binding,
        });
    }
    check_poles(a, b, p, bound, ss, cfg)?;
    let eng = Engine::new(region, a, b, jets, ss, n, cfg)?;
    let poly = eng.poly_part();
    let all: Vec<usize> = (0..=n).collect();
    let (ag, ea) = eng.a_group(&all);
    let (bg, eb) = eng.b_group(&all);
    let (cg, ec) = eng.c_group();
    let quad_err = ea + eb + ec;
    Ok(ss
        .iter()
        .enumerate()
        .map(|(si, &s)| {
            let mut value = poly[si].0 + cg[si].0;
            let mut mag = poly[si].1 + cg[si].1;
            for z in ag[si].iter().chain(&bg[si]) {
                value += z;
                mag += z.norm();
            }
            ContinuationResult {
                value,
                order_used: n,
                half_plane: bound,
                nearest_pole: nearest_candidate(a, b, p, s),
                remainder_estimate: quad_err + 64.0 * f64::EPSILON * mag,
                binding: binding.clone(),
            }
        })
        .collect())
}

/// Continue `H` to `s`. `order = None` picks [`default_order_2d`].
pub fn continue_h(
    region: &RegionD,
    a: u32,
    b: u32,
    jets: &dyn JetProvider2D,
    s: C64,
    order: Option<usize>,
    cfg: &QuadratureConfig,
) -> Result<ContinuationResult> {
    Ok(continue_h_batch(region, a, b, jets, &[s], order, cfg)?.remove(0))
}

/// The remainder `A_α^{(N)}(s)`.
#[allow(clippy::too_many_arguments)]
pub fn remainder_a(
    region: &RegionD,
    a: u32,
    b: u32,
    jets: &dyn JetProvider2D,
    alpha: usize,
    n: usize,
    s: C64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    check_inputs(a, b, &[s])?;
    if alpha > n {
        return Err(ZetaError::Precondition("need α ≤ N".into()));
    }
    let radius = exclusion(cfg, a, b);
    let pole = -((alpha + 1) as f64) / a as f64;
    if (s - pole).norm() < radius {
        return Err(ZetaError::PoleProximity { s, pole, radius });
    }
    let ss = [s];
    let eng = Engine::new(region, a, b, jets, &ss, n, cfg)?;
    Ok(eng.a_group(&[alpha]).0[0][0])
}

/// The remainder `B_β^{(N)}(s)`.
#[allow(clippy::too_many_arguments)]
pub fn remainder_b(
    region: &RegionD,
    a: u32,
    b: u32,
    jets: &dyn JetProvider2D,
    beta: usize,
    n: usize,
    s: C64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    check_inputs(a, b, &[s])?;
    if beta > n {
        return Err(ZetaError::Precondition("need β ≤ N".into()));
    }
    let radius = exclusion(cfg, a, b);
    let pole = -((beta + 1) as f64) / b as f64;
    if (s - pole).norm() < radius {
        return Err(ZetaError::PoleProximity { s, pole, radius });
    }
    let ss = [s];
    let eng = Engine::new(region, a, b, jets, &ss, n, cfg)?;
    Ok(eng.b_group(&[beta]).0[0][0])
}

/// The remainder `C^{(N)}(s)`, defined for `Re s > -(N+2)/b`.
pub fn remainder_c(
    region: &RegionD,
    a: u32,
    b: u32,
    jets: &dyn JetProvider2D,
    n: usize,
    s: C64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    check_inputs(a, b, &[s])?;
    let bound = -((n + 2) as f64) / b as f64;
    if s.re <= bound {
        return Err(ZetaError::HalfPlaneExceeded {
            re: s.re,
            bound,
            detail: "C remainder: -(N+2)/b".into(),
        });
    }
    let ss = [s];
    let eng = Engine::new(region, a, b, jets, &ss, n, cfg)?;
    Ok(eng.c_group().0[0].0)
}

/// Direct quadrature of `H` at every point of `ss`, valid for
/// `Re s > -1/b` and `Re s > -(p+1)/(ap+b)`.
pub fn direct_h_batch(
    region: &RegionD,
    a: u32,
    b: u32,
    jets: &dyn JetProvider2D,
    ss: &[C64],
    cfg: &QuadratureConfig,
) -> Result<(Vec<C64>, f64)> {
    check_inputs(a, b, ss)?;
    let pf = region.p as f64;
    let bound = (-1.0 / b as f64).max(-(pf + 1.0) / (a as f64 * pf + b as f64));
    if let Some(s) = ss.iter().find(|s| s.re <= bound) {
        return Err(ZetaError::HalfPlaneExceeded {
            re: s.re,
            bound,
            detail: "direct integral diverges".into(),
        });
    }
    let eng = Engine::bare(region, a, b, jets, ss, cfg);
    Ok(eng.region_integral(0.0, 0.0, region.r, 0, 0, |_| (), |u, v, _| jets.value_batch(u, v, ss)))
}

pub fn direct_h(region: &RegionD, a: u32, b: u32, jets: &dyn JetProvider2D, s: C64, cfg: &QuadratureConfig) -> Result<C64> {
    Ok(direct_h_batch(region, a, b, jets, &[s], cfg)?.0[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Tolerance;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn close(x: C64, y: C64, tol: f64) -> bool {
        (x - y).norm() <= tol * y.norm().max(1e-300)
    }

    #[test]
    fn triangle_area() {
        let d = RegionD::new(1, 1.0, 1.0).unwrap();
        assert!((h_monomial(&d, 1, 1, 0, 0, c(0.0)).unwrap() - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn region_rejects_large_r() {
        assert!(RegionD::new(2, 1.5, 1.0).is_err());
        assert!(RegionD::new(2, 0.5, 0.25).is_ok());
    }

    #[test]
    fn monomial_against_direct() {
        let d = RegionD::new(2, 0.5, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        for s in [c(1.0), c(-0.4), C64::new(-0.2, 0.7)] {
            let closed = h_monomial(&d, 1, 2, 0, 0, s).unwrap();
            let direct = direct_h(&d, 1, 2, &ConstJet2(c(1.0)), s, &cfg).unwrap();
            assert!(close(closed, direct, 1e-9), "{s}: {closed} vs {direct}");
        }
    }

    #[test]
    fn candidate_lattice() {
        let poles = candidate_poles(2, 3, 1, -0.55);
        let locs: Vec<(i64, i64)> = poles.iter().map(|c| (c.numer, c.denom)).collect();
        assert_eq!(locs, vec![(-1, 3), (-2, 5), (-1, 2)]);
        let merged = candidate_poles(1, 1, 1, -1.01);
        let one = merged.iter().find(|c| c.numer == -1 && c.denom == 1).unwrap();
        assert_eq!(one.sources, vec![PoleLattice::U, PoleLattice::V, PoleLattice::Mixed]);
    }

    #[test]
    fn half_plane_binding() {
        let (bound, _) = half_plane(1, 2, 2, 6);
        assert!((bound - (-2.5)).abs() < 1e-15);
        assert!(default_order_2d(1, 2, 2, -0.7) >= 2);
    }

    #[test]
    fn constant_and_monomial_exactness() {
        let d = RegionD::new(2, 0.5, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let s = C64::new(-0.9, 0.3);
        let r = continue_h(&d, 1, 2, &ConstJet2(c(1.0)), s, Some(2), &cfg).unwrap();
        assert!(close(r.value, h_monomial(&d, 1, 2, 0, 0, s).unwrap(), 1e-13));
        let mono = PolyJet2(Polynomial::new([(2, 1, 1.0)]));
        for n in [2, 3, 5] {
            let r = continue_h(&d, 1, 2, &mono, s, Some(n), &cfg).unwrap();
            assert!(close(r.value, h_monomial(&d, 1, 2, 2, 1, s).unwrap(), 1e-12));
        }
    }

    #[test]
    fn exponential_against_direct() {
        let d = RegionD::new(2, 0.5, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let psi = ExpJet2 { ku: 1.0, kv: 1.0 };
        let ss = [c(0.3), C64::new(-0.3, 0.5), c(-0.42)];
        let cont = continue_h_batch(&d, 1, 2, &psi, &ss, None, &cfg).unwrap();
        let (direct, _) = direct_h_batch(&d, 1, 2, &psi, &ss, &cfg).unwrap();
        for (x, y) in cont.iter().zip(&direct) {
            assert!(close(x.value, *y, 1e-9), "{} vs {y}", x.value);
        }
    }

    fn claimed(radii: Option<(f64, f64)>) -> FnJet2<impl Fn(f64, f64, usize, usize, C64) -> Jet2 + Sync> {
        FnJet2 {
            f: |u, v, nu, nv, s| ExpJet2 { ku: 1.0, kv: 1.0 }.taylor(u, v, nu, nv, s),
            radii,
        }
    }

    #[test]
    fn split_and_integral_forms_agree() {
        let d = RegionD::new(2, 0.5, 1.0).unwrap();
        let cfg = QuadratureConfig {
            tol: Tolerance::new(1e-13, 1e-10),
            ..QuadratureConfig::default()
        };
        let s = C64::new(-0.7, 0.2);
        let full = continue_h(&d, 1, 2, &ExpJet2 { ku: 1.0, kv: 1.0 }, s, Some(3), &cfg).unwrap();
        let split = continue_h(&d, 1, 2, &claimed(Some((0.6, 0.3))), s, Some(3), &cfg).unwrap();
        let integral = continue_h(&d, 1, 2, &claimed(None), s, Some(3), &cfg).unwrap();
        assert!(close(split.value, full.value, 1e-9), "{} vs {}", split.value, full.value);
        assert!(close(integral.value, full.value, 1e-8), "{} vs {}", integral.value, full.value);
    }

    #[test]
    fn order_stability() {
        let d = RegionD::new(2, 0.5, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let psi = claimed(Some((0.8, 0.4)));
        let s = c(-0.7);
        let r6 = continue_h(&d, 1, 2, &psi, s, Some(6), &cfg).unwrap();
        let r8 = continue_h(&d, 1, 2, &psi, s, Some(8), &cfg).unwrap();
        assert!(close(r6.value, r8.value, 1e-10));
    }

    #[test]
    fn remainder_a_against_direct_oracle() {
        // ψ = e^{u+v}: Ã_α(v) = (e^v - Σ_{β≤N} v^β/β!) / (α! v^{N+1})
        let d = RegionD::new(2, 0.5, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let (n, s) = (2usize, c(0.2));
        let got = remainder_a(&d, 1, 2, &claimed(Some((0.6, 0.3))), 0, n, s, &cfg).unwrap();
        let a_tilde = |v: f64| {
            let mut t = 0.0;
            let mut f = 1.0;
            for k in 0..=n {
                if k > 0 {
                    f *= k as f64;
                }
                t += v.powi(k as i32) / f;
            }
            (v.exp() - t) / v.powi(n as i32 + 1)
        };
        let tol = Tolerance::new(1e-14, 1e-12);
        let oracle = integrate(
            |v: f64| {
                let inner = integrate(|u: f64| (s * u.ln()).exp(), v * v, 1.0, tol).value;
                inner * (s * 2.0 * v.ln()).exp() * v.powi(n as i32 + 1) * a_tilde(v)
            },
            0.0,
            0.5,
            tol,
        )
        .value;
        assert!(close(got, oracle, 1e-8), "{got} vs {oracle}");
    }

    #[test]
    fn remainder_b_vanishes_for_constants_and_flags_poles() {
        let d = RegionD::new(2, 0.5, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let one = ConstJet2(c(1.0));
        assert_eq!(remainder_b(&d, 1, 2, &one, 0, 2, c(0.1), &cfg).unwrap(), c(0.0));
        assert!(matches!(
            remainder_b(&d, 1, 2, &one, 1, 2, c(-1.0 + 1e-6), &cfg),
            Err(ZetaError::PoleProximity { .. })
        ));
        assert!(matches!(
            remainder_c(&d, 1, 2, &one, 1, c(-1.6), &cfg),
            Err(ZetaError::HalfPlaneExceeded { .. })
        ));
    }

    #[test]
    fn finite_difference_jets_2d() {
        let fd = FiniteDifferenceJet2::new(|u: f64, v: f64, _s: C64| c((u + 2.0 * v).exp()));
        let exact = ExpJet2 { ku: 1.0, kv: 2.0 }.taylor(0.1, 0.2, 3, 3, c(0.0));
        let approx = fd.taylor(0.1, 0.2, 3, 3, c(0.0));
        for i in 0..=3 {
            for j in 0..=3 {
                assert!(close(approx.get(i, j), exact.get(i, j), 1e-5), "({i},{j})");
            }
        }
    }
}
