//! Pole detection for a batch evaluator `s ↦ F(s)`: circular contours
//! around candidate locations, then a cell scan of the window for poles
//! that no candidate accounts for.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::quad::gauss_legendre;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Rectangle `re.0 < Re s < re.1`, `im.0 < Im s < im.1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Window {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Window {
    pub fn contains(&self, s: C64) -> bool {
        s.re > self.re.0 && s.re < self.re.1 && s.im > self.im.0 && s.im < self.im.1
    }
}

#[derive(Debug, Clone)]
pub struct DetectionConfig {
    /// Contour radius around each candidate.
    pub radius: f64,
    /// Trapezoidal nodes per contour.
    pub nodes: usize,
    /// Width of a scan cell.
    pub cell_width: f64,
    /// Interior horizontal cuts of the scan grid, kept when inside the window.
    pub im_cuts: Vec<f64>,
    /// Gauss–Legendre nodes per cell edge.
    pub edge_nodes: usize,
    /// A contour integral below this multiple of its trivial bound counts as zero.
    pub residue_threshold: f64,
    /// Largest `|a_{-2}| / |a_{-1}|` still read as a simple pole.
    pub order_tolerance: f64,
    /// Distance at which a pole matches a predicted location.
    pub match_distance: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            radius: 1e-2,
            nodes: 128,
            cell_width: 0.1,
            im_cuts: vec![-0.05, 0.05],
            edge_nodes: 32,
            residue_threshold: 1e-6,
            order_tolerance: 1e-3,
            match_distance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleReport {
    /// Moment estimate `∮ s F / ∮ F`.
    pub location: C64,
    pub residue: C64,
    /// Residue from the contour of half the radius.
    pub residue_half_radius: C64,
    /// Highest negative Laurent index found significant (1 for a simple pole).
    pub order_estimate: u32,
    pub second_coefficient: f64,
    pub predicted: bool,
    /// Found by the cell scan rather than a candidate contour.
    pub from_scan: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub re: (f64, f64),
    pub im: (f64, f64),
    /// `(1/2πi) ∮ F` around the cell.
    pub contour: C64,
    /// Sum of the residues of reported poles inside the cell.
    pub expected: C64,
    /// Trivial bound `perimeter · max|F| / 2π`.
    pub scale: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleScan {
    pub poles: Vec<PoleReport>,
    pub cells: Vec<CellReport>,
    pub evaluations: usize,
}

struct Circle {
    center: f64,
    radius: f64,
    start: usize,
}

/// `(a_{-1}, a_{-2}, a_{-3}, a_{-4}, first moment, max|F|)` from trapezoidal sums.
fn laurent(vals: &[C64], center: f64, radius: f64) -> ([C64; 4], C64, f64) {
    let k = vals.len() as f64;
    let mut a = [ZERO; 4];
    let mut mom = ZERO;
    let mut mx: f64 = 0.0;
    for (i, &f) in vals.iter().enumerate() {
        let z = C64::from_polar(radius, 2.0 * PI * i as f64 / k);
        let mut zp = z;
        for c in a.iter_mut() {
            *c += f * zp;
            zp *= z;
        }
        mom += f * z * (center + z);
        mx = mx.max(f.norm());
    }
    for c in a.iter_mut() {
        *c /= k;
    }
    (a, mom / k, mx)
}

fn circle_points(c: &Circle, nodes: usize) -> Vec<C64> {
    (0..nodes)
        .map(|i| c.center + C64::from_polar(c.radius, 2.0 * PI * i as f64 / nodes as f64))
        .collect()
}

/// Segment from `from` to `to` with Gauss–Legendre nodes; returns nodes and `ds` weights.
fn segment(from: C64, to: C64, gl: &(Vec<f64>, Vec<f64>)) -> (Vec<C64>, Vec<C64>) {
    let mid = 0.5 * (from + to);
    let half = 0.5 * (to - from);
    (
        gl.0.iter().map(|&t| mid + half * t).collect(),
        gl.1.iter().map(|&w| half * w).collect(),
    )
}

fn cuts(lo: f64, hi: f64, inner: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v = vec![lo];
    v.extend(inner.filter(|&c| c > lo && c < hi));
    v.push(hi);
    v
}

/// Locate poles of `eval` in `window`. `candidates` are contour-checked
/// individually; `predicted` only labels the reports.
pub fn detect_poles<E>(eval: E, window: Window, candidates: &[f64], predicted: &[f64], cfg: &DetectionConfig) -> Result<PoleScan>
where
    E: Fn(&[C64]) -> Result<Vec<C64>>,
{
    if !(window.re.1 > window.re.0 && window.im.1 > window.im.0) {
        return Err(ZetaError::Precondition("empty window".into()));
    }
    let inside: Vec<f64> = candidates
        .iter()
        .copied()
        .filter(|&c| window.contains(C64::new(c, 0.0)))
        .collect();
    let mut pts: Vec<C64> = Vec::new();
    let mut circles = Vec::new();
    for &c in &inside {
        let near = inside
            .iter()
            .filter(|&&o| o != c)
            .map(|&o| (o - c).abs())
            .fold(f64::INFINITY, f64::min);
        let radius = cfg.radius.min(near / 3.0);
        for r in [radius, 0.5 * radius] {
            let circ = Circle {
                center: c,
                radius: r,
                start: pts.len(),
            };
            pts.extend(circle_points(&circ, cfg.nodes));
            circles.push(circ);
        }
    }
    // scan grid
    let ncol = ((window.re.1 - window.re.0) / cfg.cell_width - 1e-9).ceil().max(1.0) as usize;
    let cw = (window.re.1 - window.re.0) / ncol as f64;
    let mut xs: Vec<f64> = (0..=ncol).map(|i| window.re.0 + cw * i as f64).collect();
    // keep interior edges away from the candidates
    for x in xs.iter_mut().take(ncol).skip(1) {
        for &c in candidates {
            if (*x - c).abs() < 0.25 * cw {
                *x = if *x >= c { c + 0.25 * cw } else { c - 0.25 * cw };
            }
        }
    }
    let ys = cuts(window.im.0, window.im.1, cfg.im_cuts.iter().copied());
    let (gx, gw) = gauss_legendre(cfg.edge_nodes);
    let gl = (gx, gw);
    // horizontal[j][i]: along y = ys[j] from xs[i] to xs[i+1]
    let mut horiz = Vec::new();
    for &y in &ys {
        let mut row = Vec::new();
        for i in 0..ncol {
            let (nodes, w) = segment(C64::new(xs[i], y), C64::new(xs[i + 1], y), &gl);
            row.push((pts.len(), w));
            pts.extend(nodes);
        }
        horiz.push(row);
    }
    // vertical[i][j]: along x = xs[i] from ys[j] to ys[j+1]
    let mut vert = Vec::new();
    for &x in &xs {
        let mut col = Vec::new();
        for j in 0..ys.len() - 1 {
            let (nodes, w) = segment(C64::new(x, ys[j]), C64::new(x, ys[j + 1]), &gl);
            col.push((pts.len(), w));
            pts.extend(nodes);
        }
        vert.push(col);
    }
    let vals = eval(&pts)?;
    if vals.len() != pts.len() {
        return Err(ZetaError::Diagnostic("evaluator returned the wrong number of values".into()));
    }

    let mut poles = Vec::new();
    for pair in circles.chunks(2) {
        let (c1, c2) = (&pair[0], &pair[1]);
        let v1 = &vals[c1.start..c1.start + cfg.nodes];
        let v2 = &vals[c2.start..c2.start + cfg.nodes];
        let (a, mom, mx) = laurent(v1, c1.center, c1.radius);
        let (a2, _, _) = laurent(v2, c2.center, c2.radius);
        if a[0].norm() <= cfg.residue_threshold * c1.radius * mx.max(1e-300) {
            continue;
        }
        let mut order = 1;
        for (k, c) in a.iter().enumerate().skip(1) {
            if c.norm() > cfg.order_tolerance * a[0].norm() * c1.radius.powi(k as i32) {
                order = k as u32 + 1;
            }
        }
        let location = mom / a[0];
        poles.push(PoleReport {
            location,
            residue: a[0],
            residue_half_radius: a2[0],
            order_estimate: order,
            second_coefficient: a[1].norm(),
            predicted: predicted.iter().any(|&p| (location - p).norm() <= cfg.match_distance),
            from_scan: false,
        });
    }

    let seg_int = |start: usize, w: &[C64]| -> (C64, C64, f64) {
        let mut acc = ZERO;
        let mut mom = ZERO;
        let mut mx: f64 = 0.0;
        for (k, &wk) in w.iter().enumerate() {
            let f = vals[start + k];
            acc += f * wk;
            mom += f * pts[start + k] * wk;
            mx = mx.max(f.norm());
        }
        (acc, mom, mx)
    };
    let mut cells = Vec::new();
    let mut extra = Vec::new();
    for i in 0..ncol {
        for j in 0..ys.len() - 1 {
            let b = seg_int(horiz[j][i].0, &horiz[j][i].1);
            let t = seg_int(horiz[j + 1][i].0, &horiz[j + 1][i].1);
            let l = seg_int(vert[i][j].0, &vert[i][j].1);
            let r = seg_int(vert[i + 1][j].0, &vert[i + 1][j].1);
            let two_pi_i = C64::new(0.0, 2.0 * PI);
            let contour = (b.0 + r.0 - t.0 - l.0) / two_pi_i;
            let moment = (b.1 + r.1 - t.1 - l.1) / two_pi_i;
            let perim = 2.0 * ((xs[i + 1] - xs[i]) + (ys[j + 1] - ys[j]));
            let scale = perim * b.2.max(t.2).max(l.2).max(r.2) / (2.0 * PI);
            let in_cell = |s: C64| s.re > xs[i] && s.re < xs[i + 1] && s.im > ys[j] && s.im < ys[j + 1];
            let mut expected = ZERO;
            let mut expected_mom = ZERO;
            for p in poles.iter().filter(|p| in_cell(p.location)) {
                expected += p.residue;
                expected_mom += p.residue * p.location;
            }
            let diff = contour - expected;
            let flagged = diff.norm() > cfg.residue_threshold * scale.max(1e-300);
            if flagged {
                let location = (moment - expected_mom) / diff;
                extra.push(PoleReport {
                    location,
                    residue: diff,
                    residue_half_radius: diff,
                    order_estimate: 1,
                    second_coefficient: f64::NAN,
                    predicted: predicted.iter().any(|&p| (location - p).norm() <= cfg.match_distance),
                    from_scan: true,
                });
            }
            cells.push(CellReport {
                re: (xs[i], xs[i + 1]),
                im: (ys[j], ys[j + 1]),
                contour,
                expected,
                scale,
                flagged,
            });
        }
    }
    poles.extend(extra);
    Ok(PoleScan {
        poles,
        cells,
        evaluations: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window() -> Window {
        Window {
            re: (-0.95, -0.05),
            im: (-0.2, 0.2),
        }
    }

    #[test]
    fn finds_simple_poles_and_residues() {
        // 2/(s+0.4) - 1/(s+0.75) + e^s
        let f = |ss: &[C64]| -> Result<Vec<C64>> {
            Ok(ss.iter().map(|&s| 2.0 / (s + 0.4) - 1.0 / (s + 0.75) + s.exp()).collect())
        };
        let scan = detect_poles(f, window(), &[-0.4, -0.6, -0.75], &[-0.4], &DetectionConfig::default()).unwrap();
        assert_eq!(scan.poles.len(), 2, "{:?}", scan.poles);
        let p = &scan.poles[0];
        assert!((p.residue - 2.0).norm() < 1e-10 && (p.location + 0.4).norm() < 1e-10);
        assert!(p.predicted && p.order_estimate == 1);
        assert!(!scan.poles[1].predicted);
        assert!(scan.cells.iter().all(|c| !c.flagged));
    }

    #[test]
    fn scan_catches_unlisted_pole() {
        let f = |ss: &[C64]| -> Result<Vec<C64>> { Ok(ss.iter().map(|&s| 0.5 / (s + C64::new(0.52, 0.1))).collect()) };
        let scan = detect_poles(f, window(), &[], &[], &DetectionConfig::default()).unwrap();
        assert_eq!(scan.poles.len(), 1);
        let p = &scan.poles[0];
        assert!(p.from_scan && (p.location - C64::new(-0.52, -0.1)).norm() < 1e-6);
        assert!((p.residue - 0.5).norm() < 1e-6);
    }

    #[test]
    fn double_pole_order() {
        let f = |ss: &[C64]| -> Result<Vec<C64>> { Ok(ss.iter().map(|&s| 1.0 / ((s + 0.3) * (s + 0.3)) + 1.0 / (s + 0.3)).collect()) };
        let scan = detect_poles(f, window(), &[-0.3], &[], &DetectionConfig::default()).unwrap();
        assert_eq!(scan.poles[0].order_estimate, 2);
    }
}
