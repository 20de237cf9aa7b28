use crate::series::{pow_coeffs, Jet2, Series1};
use crate::C64;

fn g(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step `S(t) = G(t) / (G(t) + G(1 - t))`, `G(t) = e^{-1/t}` for `t > 0`.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = g(t);
        a / (a + g(1.0 - t))
    }
}

/// Scaled Taylor coefficients of [`smoothstep`] at `t0`.
pub fn smoothstep_series(t0: f64, n: usize) -> Series1 {
    if t0 <= 0.0 {
        return Series1::zeros(n);
    }
    if t0 >= 1.0 {
        return Series1::constant(C64::new(1.0, 0.0), n);
    }
    let minus_recip = |c: f64, dir: f64| -> Series1 {
        let mut s = Series1 {
            c: pow_coeffs(C64::new(c, 0.0), C64::new(-1.0, 0.0), n),
        }
        .rescale(dir)
        .scale(C64::new(-1.0, 0.0));
        let s0 = s.c[0];
        s.c[0] = C64::new(0.0, 0.0);
        s.exp().scale(s0.exp())
    };
    let g1 = minus_recip(t0, 1.0);
    let g2 = minus_recip(1.0 - t0, -1.0);
    g1.div(&g1.add(&g2))
}

/// One-dimensional plateau profile: `1` on `|t - c| ≤ inner`, `0` on
/// `|t - c| ≥ outer`, smooth and monotone in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub center: f64,
    pub inner: f64,
    pub outer: f64,
}

impl Profile {
    pub fn new(center: f64, inner: f64, outer: f64) -> Self {
        assert!(inner >= 0.0 && outer > inner, "profile needs 0 <= inner < outer");
        Self { center, inner, outer }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let d = (t - self.center).abs();
        1.0 - smoothstep((d - self.inner) / (self.outer - self.inner))
    }

    pub fn taylor(&self, t0: f64, n: usize) -> Series1 {
        let w = self.outer - self.inner;
        let d = t0 - self.center;
        let one = Series1::constant(C64::new(1.0, 0.0), n);
        if d.abs() <= self.inner {
            return one;
        }
        let tau = (d.abs() - self.inner) / w;
        let dir = if d > 0.0 { 1.0 / w } else { -1.0 / w };
        one.sub(&smoothstep_series(tau, n).rescale(dir))
    }

    /// Support `[c - outer, c + outer]`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.outer, self.center + self.outer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpKind {
    /// `φ(x, y) = P_x(x) P_y(y)`.
    Product,
    /// `χ(y)`: a cutoff in `y` alone.
    Cutoff,
}

/// Smooth compactly supported weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFunction {
    pub kind: BumpKind,
    pub px: Profile,
    pub py: Profile,
}

impl BumpFunction {
    /// Product bump centred at the origin with plateau `inner` and support `radii`.
    pub fn product(radii: [f64; 2], inner: [f64; 2]) -> Self {
        Self::product_at([0.0, 0.0], radii, inner)
    }

    pub fn product_at(center: [f64; 2], radii: [f64; 2], inner: [f64; 2]) -> Self {
        Self {
            kind: BumpKind::Product,
            px: Profile::new(center[0], inner[0], radii[0]),
            py: Profile::new(center[1], inner[1], radii[1]),
        }
    }

    /// `χ_m`: equal to 1 for `|y| ≤ r/2` and 0 for `|y| ≥ r`.
    pub fn cutoff(r: f64) -> Self {
        Self {
            kind: BumpKind::Cutoff,
            px: Profile {
                center: 0.0,
                inner: f64::MAX,
                outer: f64::INFINITY,
            },
            py: Profile::new(0.0, 0.5 * r, r),
        }
    }

    pub fn radii(&self) -> [f64; 2] {
        [self.px.outer, self.py.outer]
    }

    pub fn inner_radii(&self) -> [f64; 2] {
        [self.px.inner, self.py.inner]
    }

    pub fn fx(&self, x: f64) -> f64 {
        match self.kind {
            BumpKind::Product => self.px.eval(x),
            BumpKind::Cutoff => 1.0,
        }
    }

    pub fn fy(&self, y: f64) -> f64 {
        self.py.eval(y)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let v = self.fy(y);
        if v == 0.0 {
            return 0.0;
        }
        v * self.fx(x)
    }

    pub fn taylor_x(&self, x0: f64, n: usize) -> Series1 {
        match self.kind {
            BumpKind::Product => self.px.taylor(x0, n),
            BumpKind::Cutoff => Series1::constant(C64::new(1.0, 0.0), n),
        }
    }

    pub fn taylor_y(&self, y0: f64, n: usize) -> Series1 {
        self.py.taylor(y0, n)
    }

    pub fn taylor(&self, x0: f64, y0: f64, nu: usize, nv: usize) -> Jet2 {
        Jet2::outer(&self.taylor_x(x0, nu), &self.taylor_y(y0, nv), nu, nv)
    }

    /// The reflected weight `(x, y) ↦ φ(θx x, θy y)`.
    pub fn reflect(&self, tx: f64, ty: f64) -> Self {
        let mut out = self.clone();
        out.px.center *= tx;
        out.py.center *= ty;
        out
    }

    /// Bounding box of the support, `[[x_lo, x_hi], [y_lo, y_hi]]`.
    pub fn support_box(&self) -> [[f64; 2]; 2] {
        let (xl, xh) = self.px.support();
        let (yl, yh) = self.py.support();
        [[xl, xh], [yl, yh]]
    }
}
