use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use smoothzeta::funcmodel::{BumpFunction, SmoothModelFunction};
use smoothzeta::model1d::{continue_l, ConstJet, ExpJet, JetProvider1D};
use smoothzeta::model2d::{candidate_poles, continue_h_batch, ConstJet2, ExpJet2, JetProvider2D, RegionD};
use smoothzeta::newton::{
    adapted_sufficient, build_polyhedron, gamma_part, in_class_e_hat, is_convenient, newton_distance,
    polyhedron_of, principal_face, Face, MonomialSupport, NewtonPolyhedron,
};
use smoothzeta::quad::QuadratureConfig;
use smoothzeta::vdc::{sublevel_bound_fit, sublevel_constant, vdc_bound_check, SublevelProfile, VdcReport};
use smoothzeta::zeta::{
    continue_zeta_case_c, detect_poles, eval_zeta_direct, eval_zeta_direct_orthant, h0_estimate,
    orthant_decompose, piece_residues, plan_first_orthant, predicted_poles_case_c, DomainDecomposition,
    H0Estimate, PoleReport, Window, ZetaOptions,
};
use smoothzeta::{ZetaError, C64};

use crate::manifest::{load_config, manifest_path_for, LoadedConfig, RunManifest, StageTolerance, CONFIG_ENV};
use crate::output::{
    parse_grid, parse_line, parse_points, parse_window, to_csv, ContinuationRow, DirectRow, UsageError,
};
use crate::spec::{parse_spec, ParsedSpec, SpecError};

#[derive(Parser, Debug)]
#[command(name = "smoothzeta", version, about = "Local zeta functions of smooth model functions")]
pub struct Cli {
    /// Config file with [quadrature], [detection] and [continuation] sections.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,

    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    /// Manifest path; defaults to `<out>.manifest.json` when --out is given.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Points {
    /// Comma-separated points `re[:im]`.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    /// `re0,re1,n,im`: n points on a horizontal line.
    #[arg(long, allow_hyphen_values = true)]
    pub line: Option<String>,
    /// `re0,re1,nre,im0,im1,nim`: rectangular grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

impl Points {
    fn resolve(&self) -> Result<Vec<C64>, UsageError> {
        let mut out = Vec::new();
        if let Some(t) = &self.s {
            out.extend(parse_points(t)?);
        }
        if let Some(t) = &self.line {
            out.extend(parse_line(t)?);
        }
        if let Some(t) = &self.grid {
            out.extend(parse_grid(t)?);
        }
        if out.is_empty() {
            return Err(UsageError("no points: give --s, --line or --grid".into()));
        }
        Ok(out)
    }
}

#[derive(clap::ValueEnum, Debug, Clone, Copy, Serialize)]
pub enum Weight {
    /// `ψ ≡ 1`
    One,
    /// `ψ = e^u` (1-D) or `e^{u+v}` (2-D)
    Exp,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Case, Newton data and γ-part admission of a spec.
    Classify { spec: PathBuf },
    /// Newton polyhedron of a spec or of explicit exponents.
    Newton {
        spec: Option<PathBuf>,
        /// Exponent pair `a,b`; repeatable.
        #[arg(long = "point")]
        points: Vec<String>,
    },
    /// Direct quadrature of `∫ |f|^s φ` (CSV).
    Eval {
        spec: PathBuf,
        #[command(flatten)]
        points: Points,
        /// First quadrant only.
        #[arg(long)]
        orthant: bool,
    },
    /// Continued zeta function with its pieces (CSV).
    Continue {
        spec: PathBuf,
        #[command(flatten)]
        points: Points,
        /// Curve exponent `m` of the decomposition.
        #[arg(long)]
        m: Option<u32>,
        /// Taylor order of the axis part.
        #[arg(long)]
        order: Option<usize>,
        /// Sum over all four quadrants instead of the first.
        #[arg(long)]
        full: bool,
    },
    /// `∫_0^r u^{As+B} ψ(u) du` continued (CSV).
    Continue1d {
        #[arg(long = "A")]
        a: u32,
        #[arg(long = "B", default_value_t = 0)]
        b: u32,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, value_enum, default_value_t = Weight::One)]
        psi: Weight,
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        points: Points,
    },
    /// `∬_{v^p < u ≤ R, v ≤ r} u^{as} v^{bs} ψ` continued (CSV).
    Continue2d {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long = "big-r", default_value_t = 1.0)]
        big_r: f64,
        #[arg(long, value_enum, default_value_t = Weight::One)]
        psi: Weight,
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        points: Points,
    },
    /// Poles and residues of the continued zeta function in a window (JSON).
    Poles {
        spec: PathBuf,
        /// `re0,re1,im0,im1`.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        order: Option<usize>,
        /// Extra real candidates, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        candidates: Option<String>,
        #[arg(long)]
        full: bool,
    },
    /// Divergence threshold from shell sums, against the Newton distance (JSON).
    H0 { spec: PathBuf },
    /// Van der Corput bound for a real polynomial on an interval (JSON).
    VdcCheck {
        /// Coefficients `c0,c1,...` of `Σ c_i x^i`.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        /// `lo,hi`.
        #[arg(long, allow_hyphen_values = true, default_value = "0,1")]
        interval: String,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        /// Lower bound of `|f^{(k)}|`; default is its minimum on the interval.
        #[arg(long)]
        eta: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Newton { .. } => "newton",
            Command::Eval { .. } => "eval",
            Command::Continue { .. } => "continue",
            Command::Continue1d { .. } => "continue1d",
            Command::Continue2d { .. } => "continue2d",
            Command::Poles { .. } => "poles",
            Command::H0 { .. } => "h0",
            Command::VdcCheck { .. } => "vdc-check",
        }
    }
}

/// Exit status: 1 numerical diagnostic, 2 usage, 3 spec error.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<SpecError>().is_some() {
        3
    } else if err.downcast_ref::<UsageError>().is_some() {
        2
    } else {
        1
    }
}

struct Ctx {
    manifest: RunManifest,
    quad: QuadratureConfig,
}

impl Ctx {
    fn load_spec(&mut self, path: &Path) -> Result<ParsedSpec> {
        let p = parse_spec(path)?;
        for n in &p.notices {
            eprintln!("notice: {n}");
        }
        if let Some(q) = p.quadrature {
            self.quad = q;
            self.manifest.config.config.quadrature = q;
        }
        self.manifest.spec_path = Some(path.display().to_string());
        self.manifest.spec_sha256 = Some(p.sha256.clone());
        self.manifest.spec = Some(p.spec.clone());
        self.manifest.notices.extend(p.notices.iter().cloned());
        Ok(p)
    }

    fn options(&self, m: Option<u32>, order: Option<usize>) -> ZetaOptions {
        ZetaOptions {
            quad: self.quad,
            m,
            order,
            chunk: self.manifest.config.config.continuation.chunk,
        }
    }

    fn target(&self, scale: f64) -> f64 {
        self.quad.tol.abs + self.quad.tol.rel * scale
    }
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

pub fn run(cli: Cli, args: Vec<String>) -> Result<()> {
    let start = Instant::now();
    let loaded: LoadedConfig = load_config(cli.config.as_deref())?;
    let quad = loaded.config.quadrature;
    let mut ctx = Ctx {
        manifest: RunManifest::new(cli.command.name(), args, loaded),
        quad,
    };
    let bytes = dispatch(&cli.command, &mut ctx)?;
    ctx.manifest.wall_time_s = start.elapsed().as_secs_f64();
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?;
            ctx.manifest.record_output(path, &bytes);
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    let mpath = cli.manifest.clone().or_else(|| cli.out.as_deref().map(manifest_path_for));
    if let Some(mp) = mpath {
        std::fs::write(&mp, ctx.manifest.to_json()).with_context(|| format!("writing {}", mp.display()))?;
    }
    Ok(())
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Vec<u8>> {
    match cmd {
        Command::Classify { spec } => {
            let p = ctx.load_spec(spec)?;
            json(&classify(&p)?)
        }
        Command::Newton { spec, points } => {
            let support = match (spec, points.is_empty()) {
                (Some(path), true) => {
                    let p = ctx.load_spec(path)?;
                    MonomialSupport::from_u32(&p.function.taylor_support())
                }
                (None, false) => MonomialSupport::new(
                    points.iter().map(|t| parse_pair(t)).collect::<Result<Vec<_>, _>>()?,
                ),
                _ => return Err(UsageError("give either a spec or --point values".into()).into()),
            };
            json(&NewtonReport::new(&build_polyhedron(&support)?))
        }
        Command::Eval { spec, points, orthant } => {
            let p = ctx.load_spec(spec)?;
            let ss = points.resolve()?;
            let vals = if *orthant {
                eval_zeta_direct_orthant(&p.function, &p.bump, &ss, &ctx.quad)?
            } else {
                eval_zeta_direct(&p.function, &p.bump, &ss, &ctx.quad)?
            };
            let rows: Vec<DirectRow> = ss
                .iter()
                .zip(&vals)
                .map(|(s, v)| DirectRow {
                    s_re: s.re,
                    s_im: s.im,
                    value_re: v.value.re,
                    value_im: v.value.im,
                    error: v.error,
                    approximate: v.approximate,
                })
                .collect();
            let scale = vals.iter().map(|v| v.value.norm()).fold(0.0, f64::max);
            let err = vals.iter().map(|v| v.error).fold(0.0, f64::max);
            let target = ctx.target(scale);
            ctx.manifest.stages.push(StageTolerance::new("direct", target, err));
            to_csv(&rows)
        }
        Command::Continue {
            spec,
            points,
            m,
            order,
            full,
        } => {
            let p = ctx.load_spec(spec)?;
            let ss = points.resolve()?;
            let opts = ctx.options(*m, *order);
            let (rows, plans) = continue_rows(&p.function, &p.bump, &ss, &opts, *full)?;
            for (theta, dd) in plans {
                ctx.manifest.notices.push(format!(
                    "quadrant {theta:?}: m = {}, r_m = {}, strip Re s > {}",
                    dd.m, dd.r_m, dd.strip
                ));
            }
            record_rows(ctx, "continue", &rows);
            to_csv(&rows)
        }
        Command::Continue1d {
            a,
            b,
            r,
            psi,
            order,
            points,
        } => {
            let ss = points.resolve()?;
            let jets: Box<dyn JetProvider1D> = match psi {
                Weight::One => Box::new(ConstJet(C64::new(1.0, 0.0))),
                Weight::Exp => Box::new(ExpJet),
            };
            let rows = ss
                .iter()
                .map(|&s| {
                    let c = continue_l(*a, *b, *r, jets.as_ref(), s, *order, &ctx.quad)?;
                    Ok(ContinuationRow::single(s, c.value, c.remainder_estimate, c.order_used, c.half_plane))
                })
                .collect::<Result<Vec<_>, ZetaError>>()?;
            record_rows(ctx, "continue1d", &rows);
            to_csv(&rows)
        }
        Command::Continue2d {
            a,
            b,
            p,
            r,
            big_r,
            psi,
            order,
            points,
        } => {
            let ss = points.resolve()?;
            let region = RegionD::new(*p, *r, *big_r)?;
            let jets: Box<dyn JetProvider2D> = match psi {
                Weight::One => Box::new(ConstJet2(C64::new(1.0, 0.0))),
                Weight::Exp => Box::new(ExpJet2 { ku: 1.0, kv: 1.0 }),
            };
            let res = continue_h_batch(&region, *a, *b, jets.as_ref(), &ss, *order, &ctx.quad)?;
            let rows: Vec<ContinuationRow> = ss
                .iter()
                .zip(res)
                .map(|(&s, c)| ContinuationRow::single(s, c.value, c.remainder_estimate, c.order_used, c.half_plane))
                .collect();
            record_rows(ctx, "continue2d", &rows);
            to_csv(&rows)
        }
        Command::Poles {
            spec,
            window,
            m,
            order,
            candidates,
            full,
        } => {
            let p = ctx.load_spec(spec)?;
            let (re, im) = parse_window(window)?;
            let extra = match candidates {
                Some(t) => parse_points(t)?.into_iter().map(|z| z.re).collect(),
                None => Vec::new(),
            };
            let opts = ctx.options(*m, *order);
            let det = (&ctx.manifest.config.config.detection).into();
            let report = poles(&p.function, &p.bump, Window { re, im }, &extra, &opts, &det, *full)?;
            ctx.manifest.stages.push(StageTolerance::new(
                "poles",
                det.residue_threshold,
                report.worst_cell_ratio,
            ));
            json(&report)
        }
        Command::H0 { spec } => {
            let p = ctx.load_spec(spec)?;
            let e = h0_estimate(&p.function, &p.bump, &ctx.quad)?;
            let report = H0Report {
                b: p.function.b,
                inverse_b: 1.0 / p.function.b as f64,
                deviation: (e.h0 - 1.0 / p.function.b as f64).abs(),
                estimate: e,
            };
            ctx.manifest.stages.push(StageTolerance::new("h0", 0.05, report.deviation));
            json(&report)
        }
        Command::VdcCheck {
            coeffs,
            interval,
            k,
            sigma,
            eta,
        } => {
            let c: Vec<f64> = parse_points(coeffs)?.into_iter().map(|z| z.re).collect();
            let iv: Vec<f64> = parse_points(interval)?.into_iter().map(|z| z.re).collect();
            if iv.len() != 2 || !(iv[0] < iv[1]) {
                return Err(UsageError("--interval: need lo,hi with lo < hi".into()).into());
            }
            let report = vdc(&c, iv[0], iv[1], *k, *sigma, *eta)?;
            ctx.manifest.stages.push(StageTolerance::new(
                "vdc",
                report.bound.rhs,
                report.bound.lhs,
            ));
            json(&report)
        }
    }
}

fn parse_pair(t: &str) -> Result<(i64, i64), UsageError> {
    let v: Vec<i64> = t
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError(format!("--point `{t}`: expected two integers a,b")))?;
    match v.as_slice() {
        [a, b] if *a >= 0 && *b >= 0 => Ok((*a, *b)),
        _ => Err(UsageError(format!("--point `{t}`: expected two non-negative integers a,b"))),
    }
}

fn record_rows(ctx: &mut Ctx, stage: &str, rows: &[ContinuationRow]) {
    let scale = rows.iter().map(|r| r.value_re.hypot(r.value_im)).fold(0.0, f64::max);
    let err = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    let target = ctx.target(scale);
    ctx.manifest.stages.push(StageTolerance::new(stage, target, err));
}

type Plan = ((f64, f64), DomainDecomposition);

fn quadrants(f: &SmoothModelFunction, phi: &BumpFunction, full: bool) -> Vec<((f64, f64), SmoothModelFunction, BumpFunction)> {
    if !full {
        return vec![((1.0, 1.0), f.clone(), phi.clone())];
    }
    orthant_decompose(f, phi)
        .into_iter()
        .filter(|o| {
            let [[_, xh], [_, yh]] = o.phi.support_box();
            xh > 0.0 && yh > 0.0
        })
        .map(|o| (o.theta, o.f, o.phi))
        .collect()
}

/// Continued values summed over the selected quadrants, with I1 = axis part
/// plus its flat correction, I2 = cusp, J = rest.
pub fn continue_rows(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    ss: &[C64],
    opts: &ZetaOptions,
    full: bool,
) -> Result<(Vec<ContinuationRow>, Vec<Plan>), ZetaError> {
    let zero = C64::new(0.0, 0.0);
    let mut acc = vec![(zero, zero, zero, 0.0, 0usize, f64::NEG_INFINITY); ss.len()];
    let mut plans = Vec::new();
    for (theta, fq, pq) in quadrants(f, phi, full) {
        plans.push((theta, plan_first_orthant(&fq, &pq, ss, opts)?));
        for (a, v) in acc.iter_mut().zip(continue_zeta_case_c(&fq, &pq, ss, opts)?) {
            a.0 += v.axis + v.correction;
            a.1 += v.cusp;
            a.2 += v.rest;
            a.3 += v.error_estimate;
            a.4 = a.4.max(v.order_used);
            a.5 = a.5.max(v.half_plane);
        }
    }
    let rows = ss
        .iter()
        .zip(acc)
        .map(|(&s, a)| ContinuationRow::split(s, a.0, a.1, a.2, a.3, a.4, a.5))
        .collect();
    Ok((rows, plans))
}

#[derive(Debug, Serialize)]
pub struct GammaEntry {
    pub face: String,
    pub admitted: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub case: String,
    pub a: u32,
    pub b: u32,
    pub swapped: bool,
    pub taylor_support: Vec<(u32, u32)>,
    pub newton_distance: String,
    pub principal_face: String,
    pub adapted_sufficient: bool,
    pub convenient: bool,
    pub gamma_parts: Vec<GammaEntry>,
    pub class_e_hat: bool,
    /// Pole set of the continued first-quadrant integral in case C.
    pub predicted_poles: Vec<f64>,
    pub holomorphy_abscissa_lower: f64,
}

fn classify(p: &ParsedSpec) -> Result<ClassifyReport> {
    let f = &p.function;
    let poly = polyhedron_of(f)?;
    let gamma_parts = poly
        .edges
        .iter()
        .map(|face| match gamma_part(f, face) {
            Ok(_) => GammaEntry {
                face: face.to_string(),
                admitted: true,
                reason: None,
            },
            Err(e) => GammaEntry {
                face: face.to_string(),
                admitted: false,
                reason: Some(e.to_string()),
            },
        })
        .collect();
    Ok(ClassifyReport {
        case: format!("{:?}", f.classify()),
        a: f.a,
        b: f.b,
        swapped: p.swapped,
        taylor_support: f.taylor_support(),
        newton_distance: newton_distance(&poly).to_string(),
        principal_face: principal_face(&poly).to_string(),
        adapted_sufficient: adapted_sufficient(&poly),
        convenient: is_convenient(&poly),
        gamma_parts,
        class_e_hat: in_class_e_hat(f)?,
        predicted_poles: predicted_poles_case_c(f.a, f.b),
        holomorphy_abscissa_lower: -1.0 / f.b as f64,
    })
}

#[derive(Debug, Serialize)]
pub struct NewtonReport {
    pub vertices: Vec<(i64, i64)>,
    pub edges: Vec<Face>,
    pub distance: String,
    pub distance_value: f64,
    pub principal_face: Face,
    pub adapted_sufficient: bool,
    pub convenient: bool,
}

impl NewtonReport {
    fn new(poly: &NewtonPolyhedron) -> Self {
        let d = newton_distance(poly);
        Self {
            vertices: poly.vertices.clone(),
            edges: poly.edges.clone(),
            distance: d.to_string(),
            distance_value: *d.numer() as f64 / *d.denom() as f64,
            principal_face: principal_face(poly),
            adapted_sufficient: adapted_sufficient(poly),
            convenient: is_convenient(poly),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PoleEntry {
    #[serde(flatten)]
    pub report: PoleReport,
    /// Piece of the decomposition carrying the residue.
    pub source: String,
}

#[derive(Debug, Serialize)]
pub struct PolesReport {
    pub window: Window,
    pub m: u32,
    pub strip: f64,
    pub candidates: Vec<f64>,
    pub predicted: Vec<f64>,
    pub poles: Vec<PoleEntry>,
    pub flagged_cells: usize,
    /// Largest `|contour - expected| / scale` over the scan cells.
    pub worst_cell_ratio: f64,
    pub evaluations: usize,
}

fn poles(
    f: &SmoothModelFunction,
    phi: &BumpFunction,
    window: Window,
    extra: &[f64],
    opts: &ZetaOptions,
    det: &smoothzeta::zeta::DetectionConfig,
    full: bool,
) -> Result<PolesReport> {
    let left = [C64::new(window.re.0, 0.0)];
    let dd = plan_first_orthant(f, phi, &left, opts)?;
    let opts = ZetaOptions {
        m: Some(dd.m),
        ..opts.clone()
    };
    let in_window = |x: f64| x > window.re.0 && x < window.re.1 && window.im.0 < 0.0 && window.im.1 > 0.0;
    let mut candidates: Vec<f64> = candidate_poles(f.a, f.b, dd.m, dd.strip)
        .into_iter()
        .map(|c| c.location)
        .chain(extra.iter().copied())
        .filter(|&x| in_window(x))
        .collect();
    candidates.sort_by(|x, y| y.total_cmp(x));
    candidates.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let predicted: Vec<f64> = predicted_poles_case_c(f.a, f.b).into_iter().filter(|&x| in_window(x)).collect();
    let eval = |ss: &[C64]| -> smoothzeta::Result<Vec<C64>> {
        let (rows, _) = continue_rows(f, phi, ss, &opts, full)?;
        Ok(rows.iter().map(|r| C64::new(r.value_re, r.value_im)).collect())
    };
    let scan = detect_poles(eval, window, &candidates, &predicted, det)?;
    let mut entries = Vec::new();
    for r in scan.poles {
        let pr = piece_residues(f, phi, r.location, det.radius, det.nodes, &opts)?;
        entries.push(PoleEntry {
            source: pr.dominant().into(),
            report: r,
        });
    }
    let worst = scan
        .cells
        .iter()
        .map(|c| (c.contour - c.expected).norm() / c.scale.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(PolesReport {
        window,
        m: dd.m,
        strip: dd.strip,
        candidates,
        predicted,
        poles: entries,
        flagged_cells: scan.cells.iter().filter(|c| c.flagged).count(),
        worst_cell_ratio: worst,
        evaluations: scan.evaluations,
    })
}

#[derive(Debug, Serialize)]
pub struct H0Report {
    pub b: u32,
    pub inverse_b: f64,
    pub deviation: f64,
    pub estimate: H0Estimate,
}

#[derive(Debug, Serialize)]
pub struct VdcCheckReport {
    pub coeffs: Vec<f64>,
    pub interval: (f64, f64),
    pub k: usize,
    pub sigma: f64,
    pub eta: f64,
    pub sublevel_constant: f64,
    pub bound: VdcReport,
    pub sublevel_slope: f64,
    pub sublevel_fit_constant: f64,
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn poly_derivative(c: &[f64], k: usize) -> Vec<f64> {
    let mut d = c.to_vec();
    for _ in 0..k {
        d = d.iter().enumerate().skip(1).map(|(i, &ci)| i as f64 * ci).collect();
    }
    d
}

fn vdc(c: &[f64], lo: f64, hi: f64, k: usize, sigma: f64, eta: Option<f64>) -> Result<VdcCheckReport> {
    let dk = poly_derivative(c, k);
    let eta = match eta {
        Some(e) => e,
        None => {
            let min = (0..=4000)
                .map(|i| poly_eval(&dk, lo + (hi - lo) * i as f64 / 4000.0).abs())
                .fold(f64::INFINITY, f64::min);
            0.999 * min
        }
    };
    let f = |x: f64| poly_eval(c, x);
    let c_sub = sublevel_constant(k);
    let bound = vdc_bound_check(f, lo, hi, k, eta, sigma, c_sub)?;
    let profile = SublevelProfile::build(&f, lo, hi, k, eta, 60, 4000)?;
    let (slope, c_fit) = sublevel_bound_fit(&profile)?;
    Ok(VdcCheckReport {
        coeffs: c.to_vec(),
        interval: (lo, hi),
        k,
        sigma,
        eta,
        sublevel_constant: c_sub,
        bound,
        sublevel_slope: slope,
        sublevel_fit_constant: c_fit,
    })
}
