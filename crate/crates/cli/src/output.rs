//! Evaluation-point parsing and CSV emission.

use serde::Serialize;
use thiserror::Error;

use smoothzeta::C64;

#[derive(Debug, Error, PartialEq)]
#[error("{0}")]
pub struct UsageError(pub String);

/// `re` or `re:im`.
pub fn parse_point(text: &str) -> Result<C64, UsageError> {
    let bad = || UsageError(format!("cannot read `{text}` as a point re[:im]"));
    let mut parts = text.trim().splitn(2, ':');
    let re: f64 = parts.next().unwrap_or("").trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(t) => t.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    Ok(C64::new(re, im))
}

/// Comma-separated list of points.
pub fn parse_points(text: &str) -> Result<Vec<C64>, UsageError> {
    text.split(',').filter(|t| !t.trim().is_empty()).map(parse_point).collect()
}

fn numbers(text: &str, n: usize, what: &str) -> Result<Vec<f64>, UsageError> {
    let v: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError(format!("{what}: expected {n} comma-separated numbers")))?;
    if v.len() != n {
        return Err(UsageError(format!("{what}: expected {n} numbers, got {}", v.len())));
    }
    Ok(v)
}

fn count(x: f64, what: &str) -> Result<usize, UsageError> {
    if x >= 1.0 && x.fract() == 0.0 {
        Ok(x as usize)
    } else {
        Err(UsageError(format!("{what}: point count must be a positive integer")))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `re0,re1,n,im`: `n` points on a horizontal line.
pub fn parse_line(text: &str) -> Result<Vec<C64>, UsageError> {
    let v = numbers(text, 4, "--line")?;
    let n = count(v[2], "--line")?;
    Ok(linspace(v[0], v[1], n).into_iter().map(|re| C64::new(re, v[3])).collect())
}

/// `re0,re1,nre,im0,im1,nim`: a rectangular grid, real part fastest.
pub fn parse_grid(text: &str) -> Result<Vec<C64>, UsageError> {
    let v = numbers(text, 6, "--grid")?;
    let (nr, ni) = (count(v[2], "--grid")?, count(v[5], "--grid")?);
    let res = linspace(v[0], v[1], nr);
    Ok(linspace(v[3], v[4], ni)
        .into_iter()
        .flat_map(|im| res.iter().map(move |&re| C64::new(re, im)))
        .collect())
}

/// `re0,re1,im0,im1`.
pub fn parse_window(text: &str) -> Result<((f64, f64), (f64, f64)), UsageError> {
    let v = numbers(text, 4, "--window")?;
    if !(v[0] < v[1] && v[2] < v[3]) {
        return Err(UsageError("--window: need re0 < re1 and im0 < im1".into()));
    }
    Ok(((v[0], v[1]), (v[2], v[3])))
}

/// Row shared by `continue`, `continue1d` and `continue2d`. The engines
/// without a decomposition report their value as `i1` and zero for `i2`, `j`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ContinuationRow {
    pub s_re: f64,
    pub s_im: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub i1_re: f64,
    pub i1_im: f64,
    pub i2_re: f64,
    pub i2_im: f64,
    pub j_re: f64,
    pub j_im: f64,
    pub error: f64,
    pub order: usize,
    pub half_plane: f64,
}

impl ContinuationRow {
    pub fn single(s: C64, value: C64, error: f64, order: usize, half_plane: f64) -> Self {
        Self::split(s, value, C64::new(0.0, 0.0), C64::new(0.0, 0.0), error, order, half_plane)
    }

    pub fn split(s: C64, i1: C64, i2: C64, j: C64, error: f64, order: usize, half_plane: f64) -> Self {
        let v = i1 + i2 + j;
        Self {
            s_re: s.re,
            s_im: s.im,
            value_re: v.re,
            value_im: v.im,
            i1_re: i1.re,
            i1_im: i1.im,
            i2_re: i2.re,
            i2_im: i2.im,
            j_re: j.re,
            j_im: j.im,
            error,
            order,
            half_plane,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DirectRow {
    pub s_re: f64,
    pub s_im: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub error: f64,
    pub approximate: bool,
}

/// CSV with a header row; floats are written in shortest round-trip form.
pub fn to_csv<T: Serialize>(rows: &[T]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_and_ranges() {
        assert_eq!(parse_points("-0.3:0.1, 0.5").unwrap(), vec![C64::new(-0.3, 0.1), C64::new(0.5, 0.0)]);
        assert!(parse_point("x").is_err());
        let l = parse_line("-1,1,5,0.2").unwrap();
        assert_eq!(l.len(), 5);
        assert_eq!(l[2], C64::new(0.0, 0.2));
        let g = parse_grid("0,1,2,-1,1,3").unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[1], C64::new(1.0, -1.0));
        assert!(parse_line("0,1,2.5,0").is_err());
        assert!(parse_window("0,-1,0,1").is_err());
    }

    #[test]
    fn csv_keeps_full_precision() {
        let x = 0.1 + 0.2;
        let out = to_csv(&[DirectRow {
            s_re: x,
            s_im: 0.0,
            value_re: 1.0 / 3.0,
            value_im: -0.0,
            error: 1e-300,
            approximate: false,
        }])
        .unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "s_re,s_im,value_re,value_im,error,approximate");
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields[0].parse::<f64>().unwrap(), x);
        assert_eq!(fields[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(fields[4].parse::<f64>().unwrap(), 1e-300);
    }
}
