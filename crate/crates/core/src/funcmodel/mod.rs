//! Structured model functions `f = v(x, y) x^a y^b + Σ y^j g_j(x) + Σ x^j h_j(y)`
//! with flat `g_j`, `h_j`, and the exact calculus on them.

mod bump;
mod expr;
mod flat;
mod poly;

pub use bump::{smoothstep, smoothstep_series, BumpFunction, BumpKind, Profile};
pub use expr::{Expr, XFlat, YFlat};
pub use flat::FlatFactor;
pub use poly::{int_pow_series, Polynomial};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};

/// A real number stored as `sign · e^{ln}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog { sign: 1.0, ln: 0.0 };
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        ln: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: x.signum(),
                ln: x.abs().ln(),
            }
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln.exp()
        }
    }

    pub fn sum(terms: &[SignedLog]) -> SignedLog {
        let m = terms
            .iter()
            .filter(|t| t.sign != 0.0)
            .map(|t| t.ln)
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let acc: f64 = terms
            .iter()
            .filter(|t| t.sign != 0.0)
            .map(|t| t.sign * (t.ln - m).exp())
            .sum();
        if acc == 0.0 {
            return Self::ZERO;
        }
        Self {
            sign: acc.signum(),
            ln: m + acc.abs().ln(),
        }
    }
}

/// The four shapes of a model function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// No flat terms.
    A,
    /// Flat terms in `x` only (`g_j`).
    B,
    /// Flat terms in `y` only (`h_j`).
    C,
    /// Both.
    D,
}

/// `y^j g_j(x)` (in the g-list) or `x^j h_j(y)` (in the h-list).
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTerm {
    pub j: u32,
    pub factor: FlatFactor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothModelFunction {
    pub a: u32,
    pub b: u32,
    pub unit: Polynomial,
    pub g_terms: Vec<FlatTerm>,
    pub h_terms: Vec<FlatTerm>,
}

impl SmoothModelFunction {
    /// Validating constructor; requires `a ≤ b`, `b ≥ 1`, `v(0,0) ≠ 0`,
    /// `j < b` for g-terms and `j < a` for h-terms.
    pub fn new(
        a: u32,
        b: u32,
        unit: Polynomial,
        g_terms: Vec<FlatTerm>,
        h_terms: Vec<FlatTerm>,
    ) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(ZetaError::Precondition(
                "a = b = 0: the zeta function is entire".into(),
            ));
        }
        if a > b {
            return Err(ZetaError::Precondition(format!(
                "a = {a} > b = {b}; swap the axes first"
            )));
        }
        if unit.constant_term() == 0.0 {
            return Err(ZetaError::Precondition("unit has zero constant term".into()));
        }
        if let Some(t) = g_terms.iter().find(|t| t.j >= b) {
            return Err(ZetaError::Precondition(format!("g-term index j = {} ≥ b", t.j)));
        }
        if let Some(t) = h_terms.iter().find(|t| t.j >= a) {
            return Err(ZetaError::Precondition(format!("h-term index j = {} ≥ a", t.j)));
        }
        Ok(Self {
            a,
            b,
            unit,
            g_terms,
            h_terms,
        })
    }

    /// Like [`SmoothModelFunction::new`] but swaps the axes when `a > b`.
    /// Returns whether a swap happened.
    pub fn normalized(
        a: u32,
        b: u32,
        unit: Polynomial,
        g_terms: Vec<FlatTerm>,
        h_terms: Vec<FlatTerm>,
    ) -> Result<(Self, bool)> {
        if a > b {
            Ok((Self::new(b, a, unit.swap(), h_terms, g_terms)?, true))
        } else {
            Ok((Self::new(a, b, unit, g_terms, h_terms)?, false))
        }
    }

    /// `x²y³`-style monomial with unit `v ≡ 1`.
    pub fn monomial(a: u32, b: u32) -> Self {
        Self {
            a,
            b,
            unit: Polynomial::one(),
            g_terms: vec![],
            h_terms: vec![],
        }
    }

    pub fn with_g(mut self, j: u32, factor: FlatFactor) -> Self {
        self.g_terms.push(FlatTerm { j, factor });
        self
    }

    pub fn with_h(mut self, j: u32, factor: FlatFactor) -> Self {
        self.h_terms.push(FlatTerm { j, factor });
        self
    }

    pub fn with_unit(mut self, unit: Polynomial) -> Self {
        self.unit = unit;
        self
    }

    /// The function with `x` and `y` exchanged (not normalized).
    pub fn swap_axes(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            unit: self.unit.swap(),
            g_terms: self.h_terms.clone(),
            h_terms: self.g_terms.clone(),
        }
    }

    pub fn to_expr(&self) -> Expr {
        Expr {
            poly: self.unit.shift(self.a, self.b),
            x_flat: self
                .g_terms
                .iter()
                .filter(|t| !t.factor.is_zero())
                .map(|t| XFlat {
                    y_pow: t.j as i32,
                    factor: t.factor.clone(),
                })
                .collect(),
            y_flat: self
                .h_terms
                .iter()
                .filter(|t| !t.factor.is_zero())
                .map(|t| YFlat {
                    x_pow: t.j as i32,
                    factor: t.factor.clone(),
                })
                .collect(),
        }
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.to_expr().eval(x, y)
    }

    pub fn partial(&self, da: usize, db: usize) -> Expr {
        self.to_expr().partial(da, db)
    }

    pub fn classify(&self) -> Case {
        let g = self.g_terms.iter().any(|t| !t.factor.is_zero());
        let h = self.h_terms.iter().any(|t| !t.factor.is_zero());
        match (g, h) {
            (false, false) => Case::A,
            (true, false) => Case::B,
            (false, true) => Case::C,
            (true, true) => Case::D,
        }
    }

    fn require_a_or_c(&self, what: &str) -> Result<()> {
        match self.classify() {
            Case::A | Case::C => Ok(()),
            case => Err(ZetaError::UnsupportedCase {
                case,
                reason: format!("{what} needs a function without flat terms in x"),
            }),
        }
    }

    /// `f̃ = v + Σ_j x^{j-a} h_j(y) / y^b`, so that `f = x^a y^b f̃` on `x, y ≠ 0`.
    pub fn f_tilde(&self) -> Result<Expr> {
        self.require_a_or_c("f_tilde")?;
        Ok(Expr {
            poly: self.unit.clone(),
            x_flat: vec![],
            y_flat: self
                .h_terms
                .iter()
                .filter(|t| !t.factor.is_zero())
                .map(|t| YFlat {
                    x_pow: t.j as i32 - self.a as i32,
                    factor: t.factor.shift(-(self.b as i32)),
                })
                .collect(),
        })
    }

    /// `F = v x^a + Σ_j x^j h_j(y) / y^b`, so that `f = y^b F`.
    pub fn f_part(&self) -> Result<Expr> {
        self.require_a_or_c("F_part")?;
        Ok(Expr {
            poly: self.unit.shift(self.a, 0),
            x_flat: vec![],
            y_flat: self
                .h_terms
                .iter()
                .filter(|t| !t.factor.is_zero())
                .map(|t| YFlat {
                    x_pow: t.j as i32,
                    factor: t.factor.shift(-(self.b as i32)),
                })
                .collect(),
        })
    }

    /// `(x, y) ↦ f(θx x, θy y)` for signs `θ ∈ {±1}`.
    pub fn reflect(&self, tx: f64, ty: f64) -> Self {
        let sgn = tx.powi(self.a as i32) * ty.powi(self.b as i32);
        let side = |t: &FlatTerm, own: f64, other: f64| FlatTerm {
            j: t.j,
            factor: {
                let f = if own < 0.0 { t.factor.reflect() } else { t.factor.clone() };
                f.scale(other.powi(t.j as i32))
            },
        };
        Self {
            a: self.a,
            b: self.b,
            unit: self.unit.reflect(tx, ty).scale(sgn),
            g_terms: self.g_terms.iter().map(|t| side(t, tx, ty)).collect(),
            h_terms: self.h_terms.iter().map(|t| side(t, ty, tx)).collect(),
        }
    }

    /// Exponents of the Taylor support at the origin (flat terms contribute none).
    pub fn taylor_support(&self) -> Vec<(u32, u32)> {
        self.unit.shift(self.a, self.b).support()
    }

    /// Sample `f̃` on a grid of `U₁ = {x > y^m} ∩ {0 < y ≤ r, x ≤ 1}` and
    /// report `(min ≥ c_target, min)`.
    pub fn check_ftilde_lower_bound(&self, m: u32, r: f64, c_target: f64) -> Result<(bool, f64)> {
        if self.a == 0 {
            return Err(ZetaError::Precondition("needs a ≥ 1".into()));
        }
        let ft = self.f_tilde()?;
        let n = 200;
        let mut min = f64::INFINITY;
        for iy in 1..=n {
            let y = r * iy as f64 / n as f64;
            let x0 = y.powi(m as i32);
            if x0 >= 1.0 {
                continue;
            }
            let lx0 = x0.ln();
            for ix in 1..=n {
                // log-spaced from just above y^m to 1
                let x = (lx0 * (1.0 - ix as f64 / n as f64)).exp().max(x0 * (1.0 + 1e-12));
                min = min.min(ft.eval(x, y));
            }
        }
        if !min.is_finite() {
            return Err(ZetaError::Diagnostic("f̃ grid produced no finite samples".into()));
        }
        Ok((min >= c_target, min))
    }

    /// Minimum of `∂_x^a F` over a grid of `[-R, R]²` and whether it is positive.
    pub fn check_f_derivative_bound(&self, r: f64) -> Result<(f64, bool)> {
        let d = self.f_part()?.partial(self.a as usize, 0);
        let n = 100;
        let mut min = f64::INFINITY;
        for i in 0..=n {
            let x = -r + 2.0 * r * i as f64 / n as f64;
            for k in 0..=n {
                let y = -r + 2.0 * r * k as f64 / n as f64;
                min = min.min(d.eval(x, y));
            }
        }
        Ok((min, min > 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_c() -> SmoothModelFunction {
        SmoothModelFunction::monomial(2, 3).with_h(0, FlatFactor::pure(2))
    }

    #[test]
    fn evaluate_examples() {
        let m = SmoothModelFunction::monomial(2, 3);
        assert_eq!(m.evaluate(2.0, 1.0), 4.0);
        let f = case_c();
        assert!((f.evaluate(0.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((f.evaluate(1.0, 0.1) - (0.001 + (-100.0f64).exp())).abs() < 1e-17);
    }

    #[test]
    fn classify_prunes_zero_factors() {
        let f = SmoothModelFunction::monomial(2, 3).with_h(0, FlatFactor::new(2, vec![(0.0, 1)]));
        assert_eq!(f.classify(), Case::A);
        assert_eq!(case_c().classify(), Case::C);
        let b = SmoothModelFunction::monomial(1, 2).with_g(0, FlatFactor::new(1, vec![(1.0, 1)]));
        assert_eq!(b.classify(), Case::B);
        assert_eq!(b.clone().with_h(0, FlatFactor::pure(2)).classify(), Case::D);
    }

    #[test]
    fn f_tilde_and_f_part_identities() {
        let f = case_c();
        let ft = f.f_tilde().unwrap();
        assert!((ft.eval(1.0, 1.0) - (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        let fp = f.f_part().unwrap();
        let (x, y): (f64, f64) = (0.3, 0.2);
        assert!((y.powi(3) * fp.eval(x, y) - f.evaluate(x, y)).abs() < 1e-12 * f.evaluate(x, y));
        assert_eq!(fp.partial(2, 0).eval(0.0, 0.0), 2.0);
    }

    #[test]
    fn f_tilde_rejects_case_b() {
        let b = SmoothModelFunction::monomial(1, 2).with_g(0, FlatFactor::pure(1));
        assert!(matches!(b.f_tilde(), Err(ZetaError::UnsupportedCase { .. })));
    }

    #[test]
    fn reflection_agrees_with_evaluation() {
        let f = SmoothModelFunction::monomial(2, 3)
            .with_unit(Polynomial::new([(0, 0, 1.0), (1, 0, 0.5), (0, 1, -0.25)]))
            .with_g(1, FlatFactor::new(1, vec![(1.0, 2)]))
            .with_h(1, FlatFactor::new(3, vec![(2.0, -1)]));
        for (tx, ty) in [(1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let r = f.reflect(tx, ty);
            for (x, y) in [(0.3, 0.4), (0.7, 0.2)] {
                assert!((r.evaluate(x, y) - f.evaluate(tx * x, ty * y)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn lower_bound_checks() {
        let (ok, min) = SmoothModelFunction::monomial(2, 3)
            .check_ftilde_lower_bound(3, 0.3, 1.0)
            .unwrap();
        assert!(ok && (min - 1.0).abs() < 1e-15);
        let (ok, _) = case_c().check_ftilde_lower_bound(3, 0.3, 0.5).unwrap();
        assert!(ok);
        let (mu, ok) = case_c().check_f_derivative_bound(0.2).unwrap();
        assert!(ok && (mu - 2.0).abs() < 0.2);
    }

    #[test]
    fn swap_normalizes() {
        let (f, swapped) = SmoothModelFunction::normalized(
            3,
            2,
            Polynomial::new([(0, 0, 1.0), (1, 0, 1.0)]),
            vec![],
            vec![FlatTerm {
                j: 0,
                factor: FlatFactor::pure(2),
            }],
        )
        .unwrap();
        assert!(swapped);
        assert_eq!((f.a, f.b), (2, 3));
        assert_eq!(f.classify(), Case::B);
    }
}
