//! Local zeta functions `Z_f(φ)(s) = ∫ |f|^s φ` of model functions: direct
//! evaluation, meromorphic continuation for functions with flat terms in `y`,
//! pole detection and the divergence threshold.

mod h0;
mod logquad;
mod poles;
mod psi;

pub use h0::{h0_estimate, H0Estimate};
pub use poles::{detect_poles, DetectionConfig, PoleReport, Window};
pub use psi::{build_psi_i1, compute_r_m, unit_minimum, unit_radius, PsiProvider};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::funcmodel::{BumpFunction, Case, Expr, Profile, SmoothModelFunction};
use crate::model2d::{continue_h_batch, half_plane, RegionD};
use crate::quad::{integrate, integrate_with_breaks, QuadratureConfig};
use crate::vdc::sublevel_constant;
use crate::C64;

use logquad::{box_integral, BoxSpec, Powers};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Sign patterns of the four open quadrants.
pub const ORTHANTS: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)];

/// `f` and `φ` pulled back to the first quadrant by `(x, y) ↦ (θx x, θy y)`.
#[derive(Debug, Clone)]
pub struct Orthant {
    pub theta: (f64, f64),
    pub f: SmoothModelFunction,
    pub phi: BumpFunction,
}

/// `Z = Σ_θ Z̃(f_θ, φ_θ)` over the four quadrants.
pub fn orthant_decompose(f: &SmoothModelFunction, phi: &BumpFunction) -> Vec<Orthant> {
    ORTHANTS
        .iter()
        .map(|&(tx, ty)| Orthant {
            theta: (tx, ty),
            f: f.reflect(tx, ty),
            phi: phi.reflect(tx, ty),
        })
        .collect()
}

/// Result of a direct quadrature.
#[derive(Debug, Clone, Serialize)]
pub struct DirectValue {
    pub value: C64,
    pub error: f64,
    /// Set when `Re s ≤ 0`, where the integrand is unbounded.
    pub approximate: bool,
}

fn min_re(ss: &[C64]) -> f64 {
    ss.iter().map(|s| s.re).fold(f64::INFINITY, f64::min)
}

fn check_direct(f: &SmoothModelFunction, ss: &[C64]) -> Result<f64> {
    if ss.is_empty() {
        return Err(ZetaError::Precondition("no evaluation points".into()));
    }
    let sigma = min_re(ss);
    let bound = -1.0 / f.a.max(f.b) as f64;
    if sigma <= bound {
        return Err(ZetaError::DivergenceSuspected(format!(
            "Re s = {sigma} is at or left of -1/max(a, b) = {bound}"
        )));
    }
    Ok(sigma)
}

fn direct_box(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    ss: &[C64],
    xr: (f64, f64),
    yr: (f64, f64),
    cfg: &QuadratureConfig,
) -> (Vec<C64>, f64) {
    if xr.1 <= xr.0 || yr.1 <= yr.0 {
        return (vec![ZERO; ss.len()], 0.0);
    }
    let expr = f.to_expr();
    let pw = Powers::new(ss);
    let spec = BoxSpec {
        expr: &expr,
        weight: &|x, y| phi.eval(x, y),
        x_range: &|_| xr,
        y_breaks: vec![yr.0, yr.1],
        x_hint: f.a as f64 * pw.sigma,
        y_hint: f.b as f64 * pw.sigma,
    };
    box_integral(&spec, &pw, cfg.tol)
}

/// `∫_{R²} |f|^s φ` by direct quadrature over the support of `φ`, for every `s`.
pub fn eval_zeta_direct(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    ss: &[C64],
    cfg: &QuadratureConfig,
) -> Result<Vec<DirectValue>> {
    let sigma = check_direct(f, ss)?;
    let [[xl, xh], [yl, yh]] = phi.support_box();
    let (v, e) = direct_box(f, phi, ss, (xl, xh), (yl, yh), cfg);
    Ok(v.into_iter()
        .map(|value| DirectValue {
            value,
            error: e,
            approximate: sigma <= 0.0,
        })
        .collect())
}

/// First-quadrant integral `Z̃ = ∫_{x,y>0} |f|^s φ` by direct quadrature.
pub fn eval_zeta_direct_orthant(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    ss: &[C64],
    cfg: &QuadratureConfig,
) -> Result<Vec<DirectValue>> {
    let sigma = check_direct(f, ss)?;
    let [[xl, xh], [yl, yh]] = phi.support_box();
    let (v, e) = direct_box(f, phi, ss, (xl.max(0.0), xh), (yl.max(0.0), yh), cfg);
    Ok(v.into_iter()
        .map(|value| DirectValue {
            value,
            error: e,
            approximate: sigma <= 0.0,
        })
        .collect())
}

/// Left edge of the strip on which the pieces of the first-quadrant
/// decomposition are holomorphic apart from the poles of the `x`-axis part.
pub fn decomposition_bound(a: u32, b: u32, m: u32) -> f64 {
    let (af, bf, mf) = (a as f64, b as f64, m as f64);
    (-(mf + 1.0) / (af * mf + bf)).max(-1.0 / af)
}

/// Smallest `m ≤ 400` whose strip reaches `re - 0.05`; when no `m` can (the
/// strip never passes `-1/a`), the smallest reaching half way from `re` to `-1/a`.
pub fn default_m(a: u32, b: u32, re: f64) -> u32 {
    let want = |margin: f64| (1..=400).find(|&m| decomposition_bound(a, b, m) < re - margin);
    want(0.05)
        .or_else(|| want(0.5 * (re + 1.0 / a as f64)))
        .unwrap_or(400)
}

/// Tunables of the continuation pipeline.
#[derive(Debug, Clone)]
pub struct ZetaOptions {
    pub quad: QuadratureConfig,
    /// Exponent of the curve `x = y^m` separating the regions; `None` uses [`default_m`].
    pub m: Option<u32>,
    /// Taylor order of the `x`-axis part; `None` uses the 2-D default.
    pub order: Option<usize>,
    /// Points `s` processed together; chunks run in parallel.
    pub chunk: usize,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            m: None,
            order: None,
            chunk: 256,
        }
    }
}

/// The pieces of the first-quadrant decomposition: the region `x > y^m`
/// near the axis, the cusp `x ≤ y^m`, and the rest `y ≥ r_m / 2`.
#[derive(Debug, Clone, Serialize)]
pub struct DomainDecomposition {
    pub m: u32,
    pub r_m: f64,
    pub big_r: f64,
    pub y_max: f64,
    pub a: u32,
    pub b: u32,
    /// Valid strip for the direct pieces.
    pub strip: f64,
}

impl DomainDecomposition {
    /// The cutoff `χ_m`: 1 for `|y| ≤ r_m / 2`, 0 for `|y| ≥ r_m`.
    pub fn chi(&self) -> BumpFunction {
        BumpFunction::cutoff(self.r_m)
    }
}

/// One continued value with its parts.
#[derive(Debug, Clone, Serialize)]
pub struct ZetaValue {
    pub s: C64,
    pub value: C64,
    /// Continued `x`-axis part with unit `|v|^s`.
    pub axis: C64,
    /// Entire correction from the flat terms on the same region.
    pub correction: C64,
    pub cusp: C64,
    pub rest: C64,
    pub order_used: usize,
    pub half_plane: f64,
    pub error_estimate: f64,
}

fn first_orthant_setup(f: &SmoothModelFunction, phi: &BumpFunction, sigma: f64, opts: &ZetaOptions) -> Result<DomainDecomposition> {
    match f.classify() {
        Case::A | Case::C => {}
        case => {
            return Err(ZetaError::UnsupportedCase {
                case,
                reason: "continuation needs a function without flat terms in x".into(),
            })
        }
    }
    let m = opts.m.unwrap_or_else(|| default_m(f.a, f.b, sigma));
    if m == 0 {
        return Err(ZetaError::Precondition("need m ≥ 1".into()));
    }
    let r_m = compute_r_m(f, m)?;
    let [[_, xh], [_, yh]] = phi.support_box();
    Ok(DomainDecomposition {
        m,
        r_m,
        big_r: xh,
        y_max: yh,
        a: f.a,
        b: f.b,
        strip: decomposition_bound(f.a, f.b, m),
    })
}

/// `f` with the sign fixed so that `v(0, 0) > 0`; `|f|` is unchanged.
fn positive_unit(f: &SmoothModelFunction) -> SmoothModelFunction {
    if f.unit.constant_term() >= 0.0 {
        return f.clone();
    }
    let mut g = f.clone();
    g.unit = g.unit.scale(-1.0);
    for t in g.g_terms.iter_mut().chain(g.h_terms.iter_mut()) {
        t.factor = t.factor.scale(-1.0);
    }
    g
}

/// `∬_{x > y^m} x^{as} y^{bs} (|f̃|^s - |v|^s) φ χ_m`, an entire function of `s`.
fn flat_correction(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    dd: &DomainDecomposition,
    ss: &[C64],
    cfg: &QuadratureConfig,
) -> Result<(Vec<C64>, f64)> {
    let ns = ss.len();
    let ft = f.f_tilde()?;
    if ft.y_flat.is_empty() || dd.big_r <= 0.0 {
        return Ok((vec![ZERO; ns], 0.0));
    }
    let tail = Expr {
        y_flat: ft.y_flat.clone(),
        ..Expr::default()
    };
    let chi = Profile::new(0.0, 0.5 * dd.r_m, dd.r_m);
    let (af, bf) = (f.a as f64, f.b as f64);
    let lbig = dd.big_r.ln();
    let mut inner_err = 0.0f64;
    let res = integrate_with_breaks(
        |y: f64| {
            let lo = y.powi(dd.m as i32).max(f64::MIN_POSITIVE);
            let w0 = chi.eval(y);
            if y <= 0.0 || lo >= dd.big_r || w0 == 0.0 {
                return vec![ZERO; ns];
            }
            let ly = y.ln();
            let r = integrate(
                |t: f64| {
                    let x = t.exp();
                    let d = tail.eval(x, y);
                    let ph = phi.eval(x, y);
                    if d == 0.0 || ph == 0.0 {
                        return vec![ZERO; ns];
                    }
                    let v = f.unit.eval(x, y);
                    let w = d / v;
                    let lv = v.abs().ln();
                    let l1 = w.ln_1p();
                    let lw = (ph * w0).ln() + t;
                    ss.iter()
                        .map(|&s| {
                            let base = (s * (af * t + bf * ly + lv) + lw).exp();
                            let z = s * l1;
                            let em1 = if z.norm() < 1e-5 {
                                z * (1.0 + z * (0.5 + z / 6.0))
                            } else {
                                z.exp() - 1.0
                            };
                            base * em1
                        })
                        .collect()
                },
                lo.ln(),
                lbig,
                cfg.tol,
            );
            inner_err = inner_err.max(r.error);
            r.value
        },
        &[0.0, 0.5 * dd.r_m, dd.r_m],
        cfg.tol,
    );
    Ok((res.value, res.error + inner_err * dd.r_m))
}

/// Direct quadrature of the cusp `{0 < x ≤ y^m, y ≤ r_m}` and of the rest
/// `{y ≥ r_m / 2}` with weights `φ χ_m` and `φ (1 - χ_m)`.
fn direct_pieces(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    dd: &DomainDecomposition,
    ss: &[C64],
    cfg: &QuadratureConfig,
) -> ((Vec<C64>, f64), (Vec<C64>, f64)) {
    let ns = ss.len();
    let expr = f.to_expr();
    let pw = Powers::new(ss);
    let chi = Profile::new(0.0, 0.5 * dd.r_m, dd.r_m);
    let (af, bf, mf) = (f.a as f64, f.b as f64, dd.m as f64);
    let big_r = dd.big_r;
    let m = dd.m as i32;
    let cusp_range = move |y: f64| (0.0, y.powi(m).min(big_r));
    let cusp_weight = |x: f64, y: f64| phi.eval(x, y) * chi.eval(y);
    let cusp = if big_r > 0.0 {
        box_integral(
            &BoxSpec {
                expr: &expr,
                weight: &cusp_weight,
                x_range: &cusp_range,
                y_breaks: vec![0.0, 0.5 * dd.r_m, dd.r_m],
                x_hint: af * pw.sigma,
                y_hint: bf * pw.sigma + mf * (af * pw.sigma + 1.0),
            },
            &pw,
            cfg.tol,
        )
    } else {
        (vec![ZERO; ns], 0.0)
    };
    let rest_weight = |x: f64, y: f64| phi.eval(x, y) * (1.0 - chi.eval(y));
    let rest_range = move |_: f64| (0.0, big_r);
    let lo = 0.5 * dd.r_m;
    let rest = if dd.y_max > lo && big_r > 0.0 {
        let mut breaks = vec![lo];
        if dd.r_m < dd.y_max {
            breaks.push(dd.r_m);
        }
        breaks.push(dd.y_max);
        box_integral(
            &BoxSpec {
                expr: &expr,
                weight: &rest_weight,
                x_range: &rest_range,
                y_breaks: breaks,
                x_hint: af * pw.sigma,
                y_hint: 0.0,
            },
            &pw,
            cfg.tol,
        )
    } else {
        (vec![ZERO; ns], 0.0)
    };
    (cusp, rest)
}

fn continue_chunk(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    dd: &DomainDecomposition,
    ss: &[C64],
    opts: &ZetaOptions,
) -> Result<Vec<ZetaValue>> {
    let cfg = &opts.quad;
    let ns = ss.len();
    let axis = if dd.big_r > 0.0 && dd.y_max > 0.0 {
        let region = RegionD::new(dd.m, dd.r_m, dd.big_r)?;
        let psi = build_psi_i1(f, phi, dd.r_m)?;
        continue_h_batch(&region, f.a, f.b, &psi, ss, opts.order, cfg)?
            .into_iter()
            .map(|r| (r.value, r.order_used, r.half_plane, r.remainder_estimate))
            .collect()
    } else {
        vec![(ZERO, 0, f64::NEG_INFINITY, 0.0); ns]
    };
    let (corr, ec) = flat_correction(f, phi, dd, ss, cfg)?;
    let ((cusp, e2), (rest, ej)) = direct_pieces(f, phi, dd, ss, cfg);
    Ok((0..ns)
        .map(|k| ZetaValue {
            s: ss[k],
            value: axis[k].0 + corr[k] + cusp[k] + rest[k],
            axis: axis[k].0,
            correction: corr[k],
            cusp: cusp[k],
            rest: rest[k],
            order_used: axis[k].1,
            half_plane: axis[k].2.max(dd.strip),
            error_estimate: axis[k].3 + ec + e2 + ej,
        })
        .collect())
}

/// The decomposition that [`continue_zeta_case_c`] would use for `ss`.
pub fn plan_first_orthant(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    ss: &[C64],
    opts: &ZetaOptions,
) -> Result<DomainDecomposition> {
    if ss.is_empty() {
        return Err(ZetaError::Precondition("no evaluation points".into()));
    }
    first_orthant_setup(&positive_unit(f), phi, min_re(ss), opts)
}

/// Continue the first-quadrant integral `Z̃(s) = ∫_{x,y>0} |f|^s φ` of a
/// function with flat terms in `y` only (cases A and C).
///
/// `Z̃` splits into the part near the `x`-axis, continued through the 2-D
/// engine with unit `|v|^s` plus an entire correction for the flat terms,
/// and two pieces that are holomorphic on the strip and are integrated directly.
pub fn continue_zeta_case_c(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    ss: &[C64],
    opts: &ZetaOptions,
) -> Result<Vec<ZetaValue>> {
    let f = positive_unit(f);
    let dd = plan_first_orthant(&f, phi, ss, opts)?;
    let sigma = min_re(ss);
    if sigma <= dd.strip {
        return Err(ZetaError::HalfPlaneExceeded {
            re: sigma,
            bound: dd.strip,
            detail: format!("direct pieces need Re s > max(-(m+1)/(am+b), -1/a) with m = {}", dd.m),
        });
    }
    let chunk = opts.chunk.max(1);
    let parts: Vec<Vec<ZetaValue>> = ss
        .par_chunks(chunk)
        .map(|c| continue_chunk(&f, phi, &dd, c, opts))
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Continue `Z(s)` over the whole plane as the sum over the four quadrants.
pub fn continue_zeta(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    ss: &[C64],
    opts: &ZetaOptions,
) -> Result<Vec<C64>> {
    let mut out = vec![ZERO; ss.len()];
    for o in orthant_decompose(f, phi) {
        let [[_, xh], [_, yh]] = o.phi.support_box();
        if xh <= 0.0 || yh <= 0.0 {
            continue;
        }
        for (acc, z) in out.iter_mut().zip(continue_zeta_case_c(&o.f, &o.phi, ss, opts)?) {
            *acc += z.value;
        }
    }
    Ok(out)
}

/// `(1/2πi) ∮ piece(s) ds` over the circle `|s - center| = radius`, per piece.
#[derive(Debug, Clone, Serialize)]
pub struct PieceResidues {
    pub center: C64,
    pub radius: f64,
    pub axis: C64,
    pub correction: C64,
    pub cusp: C64,
    pub rest: C64,
}

impl PieceResidues {
    /// Name of the piece with the largest contour integral.
    pub fn dominant(&self) -> &'static str {
        [
            ("axis", self.axis),
            ("correction", self.correction),
            ("cusp", self.cusp),
            ("rest", self.rest),
        ]
        .into_iter()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|p| p.0)
        .unwrap_or("axis")
    }
}

/// Trapezoidal contour integrals of every piece of [`continue_zeta_case_c`]
/// around `center`.
pub fn piece_residues(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    center: C64,
    radius: f64,
    nodes: usize,
    opts: &ZetaOptions,
) -> Result<PieceResidues> {
    let zs: Vec<C64> = (0..nodes)
        .map(|i| C64::from_polar(radius, 2.0 * std::f64::consts::PI * i as f64 / nodes as f64))
        .collect();
    let ss: Vec<C64> = zs.iter().map(|z| center + z).collect();
    let vals = continue_zeta_case_c(f, phi, &ss, opts)?;
    let k = nodes as f64;
    let sum = |g: &dyn Fn(&ZetaValue) -> C64| -> C64 { vals.iter().zip(&zs).map(|(v, z)| g(v) * z).sum::<C64>() / k };
    Ok(PieceResidues {
        center,
        radius,
        axis: sum(&|v| v.axis),
        correction: sum(&|v| v.correction),
        cusp: sum(&|v| v.cusp),
        rest: sum(&|v| v.rest),
    })
}

/// Poles of `Z̃` predicted in case C: `-k/b` for `1 ≤ k < b/a`.
pub fn predicted_poles_case_c(a: u32, b: u32) -> Vec<f64> {
    (1..b).filter(|&k| k * a < b).map(|k| -(k as f64) / b as f64).collect()
}

/// Majorant for a direct piece and its quadrature value at real `σ`.
#[derive(Debug, Clone, Serialize)]
pub struct PieceBound {
    pub sigma: f64,
    pub admissible: bool,
    pub bound: f64,
    pub direct: f64,
    /// Lower bound `μ` of `|∂_x^a F|` used in the majorant.
    pub mu: f64,
}

/// `∫_I |F|^σ ≤ (a/(1+aσ) · C_sub − 1/σ) μ^σ |I|^{1+aσ}` with the sharp sublevel
/// constant `C_sub = 2^{2-1/a} (a!)^{1/a}` for `|∂^a F| ≥ μ`.
fn vdc_factor(a: u32, sigma: f64, mu: f64) -> f64 {
    let af = a as f64;
    let c_sub = sublevel_constant(a as usize);
    (af / (1.0 + af * sigma) * c_sub - 1.0 / sigma) * mu.powf(sigma)
}

fn sup_abs(f: &SmoothModelFunction, xmax: f64, ymax: f64) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..=60 {
        for k in 0..=60 {
            m = m.max(f.evaluate(xmax * i as f64 / 60.0, ymax * k as f64 / 60.0).abs());
        }
    }
    m
}

fn piece_bound(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    m: u32,
    sigma: f64,
    cusp: bool,
    cfg: &QuadratureConfig,
) -> Result<PieceBound> {
    let f = positive_unit(f);
    let opts = ZetaOptions {
        m: Some(m),
        quad: cfg.clone(),
        ..ZetaOptions::default()
    };
    let dd = first_orthant_setup(&f, phi, sigma, &opts)?;
    let (af, bf, mf) = (f.a as f64, f.b as f64, m as f64);
    let r = dd.big_r.max(dd.r_m);
    let (mu, _) = f.check_f_derivative_bound(r)?;
    let sup_phi = 1.0;
    let admissible = if cusp { sigma > dd.strip } else { sigma > -1.0 / af };
    let (ylo, yhi) = if cusp { (0.0, dd.r_m) } else { (0.5 * dd.r_m, dd.y_max) };
    let power_int = |e: f64| -> f64 {
        if e <= -1.0 && ylo == 0.0 {
            f64::INFINITY
        } else if (e + 1.0).abs() < 1e-14 {
            (yhi / ylo).ln()
        } else {
            (yhi.powf(e + 1.0) - if ylo == 0.0 { 0.0 } else { ylo.powf(e + 1.0) }) / (e + 1.0)
        }
    };
    let bound = if !admissible {
        f64::INFINITY
    } else if sigma >= 0.0 {
        let top = sup_abs(&f, dd.big_r, yhi).powf(sigma);
        if cusp {
            sup_phi * top * power_int(mf)
        } else {
            sup_phi * top * dd.big_r * (yhi - ylo)
        }
    } else if mu <= 0.0 {
        f64::INFINITY
    } else {
        let k = vdc_factor(f.a, sigma, mu);
        if cusp {
            sup_phi * k * power_int((af * mf + bf) * sigma + mf)
        } else {
            sup_phi * k * dd.big_r.powf(1.0 + af * sigma) * power_int(bf * sigma)
        }
    };
    let direct = if admissible {
        let ss = [C64::new(sigma, 0.0)];
        let ((c, _), (j, _)) = direct_pieces(&f, phi, &dd, &ss, cfg);
        if cusp {
            c[0].re
        } else {
            j[0].re
        }
    } else {
        f64::NAN
    };
    Ok(PieceBound {
        sigma,
        admissible,
        bound,
        direct,
        mu,
    })
}

/// Bound on the cusp piece `{0 < x ≤ y^m, y ≤ r_m}` at real `σ`.
pub fn bound_cusp(f: &SmoothModelFunction, phi: &BumpFunction, m: u32, sigma: f64, cfg: &QuadratureConfig) -> Result<PieceBound> {
    piece_bound(f, phi, m, sigma, true, cfg)
}

/// Bound on the piece `{y ≥ r_m / 2}` at real `σ`.
pub fn bound_rest(f: &SmoothModelFunction, phi: &BumpFunction, m: u32, sigma: f64, cfg: &QuadratureConfig) -> Result<PieceBound> {
    piece_bound(f, phi, m, sigma, false, cfg)
}

/// Binding constraint and value of the strip for the axis part at order `n`.
pub fn axis_half_plane(a: u32, b: u32, m: u32, n: usize) -> (f64, String) {
    half_plane(a, b, m, n)
}
