//! The smooth factor `Ψ(x, y; s) = v(x, y)^s φ(x, y) χ_m(y)` of the region
//! near the `x`-axis, its jets, and the radii that make its series usable.

use crate::error::{Result, ZetaError};
use crate::funcmodel::{BumpFunction, Polynomial, Profile, SignedLog, SmoothModelFunction};
use crate::model2d::JetProvider2D;
use crate::series::{pow_coeffs, Jet2};
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Jets of `v^s φ χ` for a unit `v` that is positive on the support.
#[derive(Debug, Clone)]
pub struct PsiProvider {
    pub unit: Polynomial,
    pub bump: BumpFunction,
    pub chi: Profile,
    pub radii: Option<(f64, f64)>,
}

impl PsiProvider {
    fn weight_jet(&self, u: f64, v: f64, nu: usize, nv: usize) -> Jet2 {
        self.bump.taylor(u, v, nu, nv).mul_v(&self.chi.taylor(v, nv))
    }
}

impl JetProvider2D for PsiProvider {
    fn taylor(&self, u: f64, v: f64, nu: usize, nv: usize, s: C64) -> Jet2 {
        self.taylor_batch(u, v, nu, nv, &[s]).remove(0)
    }

    fn taylor_batch(&self, u: f64, v: f64, nu: usize, nv: usize, ss: &[C64]) -> Vec<Jet2> {
        let w = self.weight_jet(u, v, nu, nv);
        if w.data.iter().all(|&z| z == ZERO) {
            return vec![Jet2::zeros(nu, nv); ss.len()];
        }
        let unit = self.unit.taylor(u, v, nu, nv);
        let v0 = unit.data[0];
        let basis: Vec<Vec<(usize, C64)>> = unit
            .shifted_powers(nu + nv)
            .iter()
            .map(|p| {
                p.mul(&w)
                    .data
                    .iter()
                    .enumerate()
                    .filter(|(_, &z)| z != ZERO)
                    .map(|(k, &z)| (k, z))
                    .collect()
            })
            .collect();
        ss.iter()
            .map(|&s| {
                let g = pow_coeffs(v0, s, basis.len() - 1);
                let mut out = Jet2::zeros(nu, nv);
                for (b, gk) in basis.iter().zip(g) {
                    for &(k, z) in b {
                        out.data[k] += gk * z;
                    }
                }
                out
            })
            .collect()
    }

    fn value_batch(&self, u: f64, v: f64, ss: &[C64]) -> Vec<C64> {
        let w = self.bump.eval(u, v) * self.chi.eval(v);
        if w == 0.0 {
            return vec![ZERO; ss.len()];
        }
        let lv = C64::new(self.unit.eval(u, v), 0.0).ln();
        ss.iter().map(|&s| (s * lv).exp() * w).collect()
    }

    fn value(&self, u: f64, v: f64, s: C64) -> C64 {
        self.value_batch(u, v, &[s])[0]
    }

    fn expansion_radii(&self) -> Option<(f64, f64)> {
        self.radii
    }
}

/// Largest `ρ` with `Σ_{(i,j)≠0} |c_ij| ρ^{i+j} ≤ |c_00| / 2` for the
/// expansions of `unit` at every sampled point of `[0, xmax] × {0}` and
/// `{0} × [0, ymax]`, so that `unit^s` is analytic on those polydiscs.
pub fn unit_radius(unit: &Polynomial, xmax: f64, ymax: f64) -> f64 {
    let (dx, dy) = unit.degree();
    if dx == 0 && dy == 0 {
        return f64::INFINITY;
    }
    let mut pts = Vec::new();
    for i in 0..=32 {
        let t = i as f64 / 32.0;
        pts.push((t * xmax, 0.0));
        pts.push((0.0, t * ymax));
    }
    let mut best = f64::INFINITY;
    for (x0, y0) in pts {
        let j = unit.taylor(x0, y0, dx as usize, dy as usize);
        let c00 = j.get(0, 0).norm();
        let excess = |rho: f64| -> f64 {
            let mut acc = 0.0;
            for i in 0..=dx as usize {
                for k in 0..=dy as usize {
                    if i + k > 0 {
                        acc += j.get(i, k).norm() * rho.powi((i + k) as i32);
                    }
                }
            }
            acc - 0.5 * c00
        };
        if excess(0.0) > 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, 1e3);
        if excess(hi) <= 0.0 {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if excess(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.min(lo);
    }
    best
}

/// Smallest value of `|unit|` on a grid of `[0, X] × [0, Y]`; an error if the
/// unit changes sign there.
pub fn unit_minimum(unit: &Polynomial, xmax: f64, ymax: f64) -> Result<f64> {
    let sign = unit.constant_term().signum();
    let mut min = f64::INFINITY;
    for i in 0..=40 {
        for k in 0..=40 {
            let v = sign * unit.eval(xmax * i as f64 / 40.0, ymax * k as f64 / 40.0);
            min = min.min(v);
        }
    }
    if min <= 0.0 || sign == 0.0 {
        return Err(ZetaError::Precondition(format!(
            "unit vanishes on [0, {xmax}] × [0, {ymax}] (min {min:.3e})"
        )));
    }
    Ok(min)
}

/// `ln` of a root bound for `x ↦ v x^a + Σ_j x^j h_j(y) / y^b` on `0 < x ≤ 1`.
/// A single lower term gives the exact root modulus; several use Fujiwara's bound.
pub(crate) fn ln_root_bound(f: &SmoothModelFunction, v_min: f64, y: f64) -> f64 {
    let (a, b) = (f.a as i32, f.b as i32);
    let ly = y.ln();
    let mut lower = Vec::new();
    let mut lead = v_min;
    for t in &f.h_terms {
        if t.factor.is_zero() {
            continue;
        }
        let mut terms = Vec::new();
        t.factor.push_log_terms(ly, 1.0, SignedLog::ONE, &mut terms);
        let l = SignedLog::sum(&terms);
        if l.sign == 0.0 {
            continue;
        }
        let ln_c = l.ln - b as f64 * ly;
        if (t.j as i32) < a {
            lower.push((ln_c, a - t.j as i32));
        } else {
            lead -= ln_c.exp();
        }
    }
    if lower.is_empty() {
        return f64::NEG_INFINITY;
    }
    if lead <= 0.0 {
        return f64::INFINITY;
    }
    let ll = lead.ln();
    let worst = lower
        .iter()
        .map(|&(ln_c, k)| (ln_c - ll) / k as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    if lower.len() == 1 {
        worst
    } else {
        worst + std::f64::consts::LN_2
    }
}

/// Largest dyadic `r ≤ 1/2` such that the zeros of `f(·, y)` stay below
/// `y^m / 2` for all `0 < y ≤ r`; `1/2` when `f` has no flat terms in `y`.
pub fn compute_r_m(f: &SmoothModelFunction, m: u32) -> Result<f64> {
    if f.h_terms.iter().all(|t| t.factor.is_zero()) {
        return Ok(0.5);
    }
    let v_min = unit_minimum(&f.unit, 1.0, 0.5)?;
    let mf = m as f64;
    for k in 1..=60 {
        let r = 0.5f64.powi(k);
        let ok = (0..=240).all(|i| {
            let y = r * 2f64.powf(-40.0 * i as f64 / 240.0);
            ln_root_bound(f, v_min, y) <= mf * y.ln() - std::f64::consts::LN_2
        });
        if ok {
            return Ok(r);
        }
    }
    Err(ZetaError::Diagnostic(format!(
        "no dyadic r ≥ 2^-60 keeps the zeros below y^{m}/2"
    )))
}

/// Build `Ψ = |v|^s φ χ_m` for the first-orthant function `f` and weight `phi`.
pub fn build_psi_i1(f: &SmoothModelFunction, phi: &BumpFunction, r_m: f64) -> Result<PsiProvider> {
    let sign = f.unit.constant_term().signum();
    let unit = f.unit.scale(sign);
    let [[_, xh], _] = phi.support_box();
    unit_minimum(&unit, xh.max(0.0), r_m)?;
    let chi = Profile::new(0.0, 0.5 * r_m, r_m);
    let ur = unit_radius(&unit, xh.max(0.0), r_m);
    let rx = phi.px.inner - phi.px.center.abs();
    let ry = (phi.py.inner - phi.py.center.abs()).min(0.5 * r_m);
    let (ru, rv) = (ur.min(rx), ur.min(ry));
    let radii = (ru > 0.0 && rv > 0.0).then_some((ru, rv));
    Ok(PsiProvider {
        unit,
        bump: phi.clone(),
        chi,
        radii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::FlatFactor;

    #[test]
    fn r_m_for_exponential_flat_term() {
        // zeros of x² + e^{-1/y²}/y³ sit at |x| = e^{-1/(2y²)} y^{-3/2}
        let f = SmoothModelFunction::monomial(2, 3).with_h(0, FlatFactor::pure(2));
        let r = compute_r_m(&f, 6).unwrap();
        let oracle = (1..=60)
            .map(|k| 0.5f64.powi(k))
            .find(|&r| {
                (0..=2000).all(|i| {
                    let y = r * (1.0 - i as f64 / 2001.0);
                    (-0.5 / (y * y)).exp() * y.powf(-1.5) <= 0.5 * y.powi(6)
                })
            })
            .unwrap();
        assert_eq!(r, oracle);
        assert_eq!(r, 0.125);
        assert_eq!(compute_r_m(&SmoothModelFunction::monomial(2, 3), 6).unwrap(), 0.5);
    }

    #[test]
    fn unit_radius_of_affine_unit() {
        // 1 + x + y at the origin: 2ρ ≤ 1/2
        let u = Polynomial::new([(0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0)]);
        assert!((unit_radius(&u, 0.0, 0.0) - 0.25).abs() < 1e-12);
        assert!(unit_radius(&u, 1.0, 0.1) >= 0.25 - 1e-12);
        assert_eq!(unit_radius(&Polynomial::one(), 1.0, 1.0), f64::INFINITY);
    }

    #[test]
    fn psi_jets_match_values() {
        let f = SmoothModelFunction::monomial(1, 2).with_unit(Polynomial::new([(0, 0, 1.0), (1, 0, 0.5), (0, 1, 1.0)]));
        let phi = BumpFunction::product([1.0, 1.0], [0.5, 0.5]);
        let psi = build_psi_i1(&f, &phi, 0.25).unwrap();
        let s = C64::new(-0.3, 0.7);
        for (u, v) in [(0.0, 0.0), (0.6, 0.0), (0.0, 0.2)] {
            let j = psi.taylor(u, v, 16, 16, s);
            let (du, dv) = (0.004, 0.003);
            let want = psi.value(u + du, v + dv, s);
            assert!((j.eval(du, dv) - want).norm() < 1e-12, "{u} {v}");
        }
        let (ru, rv) = psi.radii.unwrap();
        assert!(ru > 0.2 && rv <= 0.125);
    }
}
