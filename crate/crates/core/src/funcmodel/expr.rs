use crate::series::{Jet2, Series1};
use crate::C64;

use super::flat::FlatFactor;
use super::poly::{int_pow_series, Polynomial};
use super::SignedLog;

/// `y^k · g(x)` with `g` flat in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct XFlat {
    pub y_pow: i32,
    pub factor: FlatFactor,
}

/// `x^k · h(y)` with `h` flat in `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct YFlat {
    pub x_pow: i32,
    pub factor: FlatFactor,
}

/// Element of the algebra spanned by polynomials and flat terms with
/// integer (possibly negative) powers of the other variable. Closed under
/// both partial derivatives.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expr {
    pub poly: Polynomial,
    pub x_flat: Vec<XFlat>,
    pub y_flat: Vec<YFlat>,
}

impl Expr {
    pub fn from_poly(poly: Polynomial) -> Self {
        Self {
            poly,
            ..Self::default()
        }
    }

    pub fn has_flat_terms(&self) -> bool {
        !self.x_flat.is_empty() || !self.y_flat.is_empty()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = self.poly.eval(x, y);
        for t in &self.x_flat {
            let g = t.factor.eval(x);
            if g != 0.0 {
                acc += y.powi(t.y_pow) * g;
            }
        }
        for t in &self.y_flat {
            let h = t.factor.eval(y);
            if h != 0.0 {
                acc += x.powi(t.x_pow) * h;
            }
        }
        acc
    }

    /// Evaluate at `x = sx e^{lx}`, `y = sy e^{ly}` in signed-log form.
    pub fn eval_log(&self, lx: f64, sx: f64, ly: f64, sy: f64) -> SignedLog {
        let mut terms = Vec::with_capacity(8);
        self.push_log_terms(lx, sx, ly, sy, &mut terms);
        SignedLog::sum(&terms)
    }

    pub fn push_log_terms(&self, lx: f64, sx: f64, ly: f64, sy: f64, terms: &mut Vec<SignedLog>) {
        self.poly.push_log_terms(lx, sx, ly, sy, terms);
        for t in &self.x_flat {
            let scale = SignedLog {
                sign: sy.powi(t.y_pow),
                ln: t.y_pow as f64 * ly,
            };
            t.factor.push_log_terms(lx, sx, scale, terms);
        }
        for t in &self.y_flat {
            let scale = SignedLog {
                sign: sx.powi(t.x_pow),
                ln: t.x_pow as f64 * lx,
            };
            t.factor.push_log_terms(ly, sy, scale, terms);
        }
    }

    pub fn dx(&self) -> Self {
        let x_flat = self
            .x_flat
            .iter()
            .map(|t| XFlat {
                y_pow: t.y_pow,
                factor: t.factor.derivative(),
            })
            .filter(|t| !t.factor.is_zero())
            .collect();
        let y_flat = self
            .y_flat
            .iter()
            .filter(|t| t.x_pow != 0)
            .map(|t| YFlat {
                x_pow: t.x_pow - 1,
                factor: t.factor.scale(t.x_pow as f64),
            })
            .collect();
        Self {
            poly: self.poly.partial(1, 0),
            x_flat,
            y_flat,
        }
    }

    pub fn dy(&self) -> Self {
        let y_flat = self
            .y_flat
            .iter()
            .map(|t| YFlat {
                x_pow: t.x_pow,
                factor: t.factor.derivative(),
            })
            .filter(|t| !t.factor.is_zero())
            .collect();
        let x_flat = self
            .x_flat
            .iter()
            .filter(|t| t.y_pow != 0)
            .map(|t| XFlat {
                y_pow: t.y_pow - 1,
                factor: t.factor.scale(t.y_pow as f64),
            })
            .collect();
        Self {
            poly: self.poly.partial(0, 1),
            x_flat,
            y_flat,
        }
    }

    pub fn partial(&self, da: usize, db: usize) -> Self {
        let mut e = self.clone();
        for _ in 0..da {
            e = e.dx();
        }
        for _ in 0..db {
            e = e.dy();
        }
        e
    }

    /// Scaled Taylor coefficients at `(x0, y0)`.
    pub fn taylor(&self, x0: f64, y0: f64, nu: usize, nv: usize) -> Jet2 {
        let mut j = self.poly.taylor(x0, y0, nu, nv);
        for t in &self.x_flat {
            let g = t.factor.taylor(x0, nu);
            if g.c.iter().all(|c| *c == C64::new(0.0, 0.0)) {
                continue;
            }
            j = j.add(&Jet2::outer(&g, &int_pow_series(y0, t.y_pow, nv), nu, nv));
        }
        for t in &self.y_flat {
            let h = t.factor.taylor(y0, nv);
            if h.c.iter().all(|c| *c == C64::new(0.0, 0.0)) {
                continue;
            }
            j = j.add(&Jet2::outer(&int_pow_series(x0, t.x_pow, nu), &h, nu, nv));
        }
        j
    }

    /// Taylor series in `x` at `(x0, y)` (fixed `y`).
    pub fn taylor_x(&self, x0: f64, y: f64, n: usize) -> Series1 {
        self.taylor(x0, y, n, 0).col_v(0)
    }
}
