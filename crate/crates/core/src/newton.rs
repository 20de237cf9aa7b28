//! Two-dimensional Newton polyhedra in exact integer/rational arithmetic.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Result, ZetaError};
use crate::funcmodel::{Expr, Polynomial, SmoothModelFunction};

pub type Rational = Ratio<i64>;

/// Finite set of exponents `(α, β)`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialSupport {
    pub points: Vec<(i64, i64)>,
}

impl MonomialSupport {
    pub fn new<I: IntoIterator<Item = (i64, i64)>>(points: I) -> Self {
        let mut points: Vec<_> = points.into_iter().collect();
        points.sort_unstable();
        points.dedup();
        Self { points }
    }

    pub fn from_u32(points: &[(u32, u32)]) -> Self {
        Self::new(points.iter().map(|&(a, b)| (a as i64, b as i64)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FaceKind {
    Vertex,
    CompactEdge,
    NoncompactEdge,
}

/// A face `γ = {aα + bβ = l} ∩ Γ₊` with `gcd(a, b) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub kind: FaceKind,
    /// `(a, b, l)`.
    pub normal: (i64, i64, i64),
    pub endpoints: Vec<(i64, i64)>,
}

impl Face {
    fn edge(kind: FaceKind, n1: i64, n2: i64, p: (i64, i64), endpoints: Vec<(i64, i64)>) -> Self {
        let g = n1.gcd(&n2);
        let (n1, n2) = (n1 / g, n2 / g);
        Self {
            kind,
            normal: (n1, n2, n1 * p.0 + n2 * p.1),
            endpoints,
        }
    }

    pub fn contains(&self, p: (i64, i64)) -> bool {
        let (a, b, l) = self.normal;
        a * p.0 + b * p.1 == l
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, l) = self.normal;
        write!(f, "{:?} ({a},{b};{l}) {:?}", self.kind, self.endpoints)
    }
}

/// The staircase boundary of `Γ₊ = conv(∪ (α, β) + R₊²)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonPolyhedron {
    /// Vertices by increasing `α` (decreasing `β`).
    pub vertices: Vec<(i64, i64)>,
    /// Vertical noncompact edge, compact edges, horizontal noncompact edge.
    pub edges: Vec<Face>,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

pub fn build_polyhedron(support: &MonomialSupport) -> Result<NewtonPolyhedron> {
    if support.points.is_empty() {
        return Err(ZetaError::Flat);
    }
    // minimal elements under domination, by increasing α
    let mut stair: Vec<(i64, i64)> = Vec::new();
    for &p in &support.points {
        if stair.last().map_or(true, |q| p.1 < q.1) {
            stair.push(p);
        }
    }
    // lower convex hull (monotone chain); the staircase is already α-sorted
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in &stair {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let first = hull[0];
    let last = *hull.last().unwrap();
    let mut edges = vec![Face::edge(FaceKind::NoncompactEdge, 1, 0, first, vec![first])];
    for w in hull.windows(2) {
        let (p, q) = (w[0], w[1]);
        edges.push(Face::edge(FaceKind::CompactEdge, p.1 - q.1, q.0 - p.0, p, vec![p, q]));
    }
    edges.push(Face::edge(FaceKind::NoncompactEdge, 0, 1, last, vec![last]));
    Ok(NewtonPolyhedron {
        vertices: hull,
        edges,
    })
}

impl NewtonPolyhedron {
    /// Membership of a rational point in `Γ₊`.
    pub fn contains(&self, x: Rational, y: Rational) -> bool {
        self.edges.iter().all(|e| {
            let (a, b, l) = e.normal;
            Rational::from_integer(a) * x + Rational::from_integer(b) * y >= Rational::from_integer(l)
        })
    }

    pub fn is_convenient(&self) -> bool {
        self.vertices[0].0 == 0 && self.vertices.last().unwrap().1 == 0
    }
}

pub fn newton_distance(poly: &NewtonPolyhedron) -> Rational {
    poly.edges
        .iter()
        .map(|e| {
            let (a, b, l) = e.normal;
            Rational::new(l, a + b)
        })
        .max()
        .unwrap()
}

/// The smallest face containing `(d, d)`.
pub fn principal_face(poly: &NewtonPolyhedron) -> Face {
    let d = newton_distance(poly);
    if d.is_integer() {
        let t = d.to_integer();
        if poly.vertices.contains(&(t, t)) {
            let i = poly.vertices.iter().position(|&v| v == (t, t)).unwrap();
            // a normal strictly inside the cone of the adjacent edges
            let before = &poly.edges[i];
            let after = &poly.edges[i + 1];
            let (n1, n2) = (before.normal.0 + after.normal.0, before.normal.1 + after.normal.1);
            return Face::edge(FaceKind::Vertex, n1, n2, (t, t), vec![(t, t)]);
        }
    }
    poly.edges
        .iter()
        .find(|e| {
            let (a, b, l) = e.normal;
            d * Rational::from_integer(a + b) == Rational::from_integer(l)
        })
        .cloned()
        .expect("diagonal meets the boundary")
}

/// Sufficient condition for adapted coordinates; `false` means "unknown".
pub fn adapted_sufficient(poly: &NewtonPolyhedron) -> bool {
    principal_face(poly).kind != FaceKind::CompactEdge
}

pub fn is_convenient(poly: &NewtonPolyhedron) -> bool {
    poly.is_convenient()
}

pub fn polyhedron_of(f: &SmoothModelFunction) -> Result<NewtonPolyhedron> {
    build_polyhedron(&MonomialSupport::from_u32(&f.taylor_support()))
}

/// Why a γ-part does not exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotAdmitted {
    pub term: String,
}

impl fmt::Display for NotAdmitted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "γ-part not admitted: {}", self.term)
    }
}

/// The γ-part of `f` on `face`: the monomials of the Taylor polynomial on the
/// face, provided no flat term blows up under the face's weighted scaling.
pub fn gamma_part(f: &SmoothModelFunction, face: &Face) -> std::result::Result<Expr, NotAdmitted> {
    let (n1, n2, l) = face.normal;
    for t in &f.g_terms {
        // y^j g_j(x): only a pure y-scaling keeps g_j(x) alive
        if !t.factor.is_zero() && n1 == 0 && n2 * (t.j as i64) < l {
            return Err(NotAdmitted {
                term: format!("y^{} g_{}(x)", t.j, t.j),
            });
        }
    }
    for t in &f.h_terms {
        if !t.factor.is_zero() && n2 == 0 && n1 * (t.j as i64) < l {
            return Err(NotAdmitted {
                term: format!("x^{} h_{}(y)", t.j, t.j),
            });
        }
    }
    let taylor = f.unit.shift(f.a, f.b);
    Ok(Expr::from_poly(Polynomial::new(
        taylor
            .coeffs
            .iter()
            .filter(|(&(a, b), _)| n1 * a as i64 + n2 * b as i64 == l)
            .map(|(&(a, b), &c)| (a, b, c)),
    )))
}

/// The γ-part of a polynomial on a face.
pub fn gamma_part_poly(p: &Polynomial, face: &Face) -> Polynomial {
    let (n1, n2, l) = face.normal;
    Polynomial::new(
        p.coeffs
            .iter()
            .filter(|(&(a, b), _)| n1 * a as i64 + n2 * b as i64 == l)
            .map(|(&(a, b), &c)| (a, b, c)),
    )
}

/// Whether `f` admits the γ-part for every edge of its Newton polyhedron.
pub fn in_class_e_hat(f: &SmoothModelFunction) -> Result<bool> {
    let poly = polyhedron_of(f)?;
    Ok(poly.edges.iter().all(|e| gamma_part(f, e).is_ok()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::FlatFactor;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn single_vertex() {
        let p = build_polyhedron(&MonomialSupport::new([(2, 3)])).unwrap();
        assert_eq!(p.vertices, vec![(2, 3)]);
        assert_eq!(p.edges.len(), 2);
        assert_eq!(p.edges[0].normal, (1, 0, 2));
        assert_eq!(p.edges[1].normal, (0, 1, 3));
        assert_eq!(newton_distance(&p), q(3, 1));
        let pf = principal_face(&p);
        assert_eq!(pf.kind, FaceKind::NoncompactEdge);
        assert_eq!(pf.normal, (0, 1, 3));
        assert!(adapted_sufficient(&p));
        assert!(!p.is_convenient());
    }

    #[test]
    fn three_vertices() {
        let p = build_polyhedron(&MonomialSupport::new([(0, 4), (2, 1), (5, 0), (3, 3)])).unwrap();
        assert_eq!(p.vertices, vec![(0, 4), (2, 1), (5, 0)]);
        let compact: Vec<_> = p.edges.iter().filter(|e| e.kind == FaceKind::CompactEdge).collect();
        assert_eq!(compact.len(), 2);
        assert_eq!(compact[0].normal, (3, 2, 8));
        assert_eq!(compact[1].normal, (1, 3, 5));
    }

    #[test]
    fn compact_principal_edge() {
        let p = build_polyhedron(&MonomialSupport::new([(0, 4), (5, 0)])).unwrap();
        assert_eq!(newton_distance(&p), q(20, 9));
        assert_eq!(principal_face(&p).kind, FaceKind::CompactEdge);
        assert!(!adapted_sufficient(&p));
        assert!(p.is_convenient());
    }

    #[test]
    fn domination_and_vertex_face() {
        let p = build_polyhedron(&MonomialSupport::new([(1, 1), (2, 2)])).unwrap();
        assert_eq!(p.vertices, vec![(1, 1)]);
        assert_eq!(newton_distance(&p), q(1, 1));
        assert_eq!(principal_face(&p).kind, FaceKind::Vertex);
        assert!(adapted_sufficient(&p));
        let origin = build_polyhedron(&MonomialSupport::new([(0, 0)])).unwrap();
        assert!(origin.is_convenient());
    }

    #[test]
    fn empty_support_is_flat() {
        assert_eq!(build_polyhedron(&MonomialSupport::new([])), Err(ZetaError::Flat));
    }

    #[test]
    fn admission_table() {
        let a = SmoothModelFunction::monomial(2, 3);
        let g = FlatFactor::new(1, vec![(1.0, 2)]);
        let h = FlatFactor::pure(2);
        let b = a.clone().with_g(1, g.clone());
        let c = a.clone().with_h(0, h.clone());
        let d = b.clone().with_h(0, h);
        let poly = polyhedron_of(&a).unwrap();
        let (g2, g1) = (&poly.edges[0], &poly.edges[1]);
        let table = [(a, true, true), (b, false, true), (c, true, false), (d, false, false)];
        for (f, adm1, adm2) in table {
            assert_eq!(gamma_part(&f, g1).is_ok(), adm1);
            assert_eq!(gamma_part(&f, g2).is_ok(), adm2);
            assert_eq!(in_class_e_hat(&f).unwrap(), adm1 && adm2);
        }
    }

    #[test]
    fn gamma1_part_is_v_on_axis() {
        let f = SmoothModelFunction::monomial(2, 3)
            .with_unit(Polynomial::new([(0, 0, 1.0), (1, 0, 2.0), (0, 1, 5.0)]));
        let poly = polyhedron_of(&f).unwrap();
        let part = gamma_part(&f, &poly.edges[1]).unwrap();
        // v(x, 0) x^2 y^3 = x^2 y^3 + 2 x^3 y^3
        assert_eq!(part.poly, Polynomial::new([(2, 3, 1.0), (3, 3, 2.0)]));
    }
}
