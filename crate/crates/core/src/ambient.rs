//! Ambient Riemannian structure in a single chart: inner product, volume
//! form, metric cross product, Levi-Civita connection and sectional
//! curvature. The Euclidean chart short-circuits to the standard formulas.

use thiserror::Error;

use crate::expr::{Bindings, EvalError, Expr};
use crate::jet::{Axis, Dual, Jet2, Scalar};

pub type Vec3<T> = [T; 3];

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AmbientError {
    #[error("metric is not positive definite at {point:?} (leading minors {minors:?})")]
    NotPositiveDefinite { point: [f64; 3], minors: [f64; 3] },
    #[error("plane vectors are linearly dependent")]
    DegeneratePlane,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Metric chart: Euclidean, or a symmetric matrix of expressions in x1, x2, x3.
#[derive(Clone, Debug, PartialEq)]
pub enum AmbientChart {
    Euclidean,
    General { name: String, g: Box<[[Expr; 3]; 3]> },
}

fn conformal(name: &str, sign: f64) -> AmbientChart {
    // 4 / (1 ± |x|²)² δ
    let text = format!("4/(1 {} (x1^2 + x2^2 + x3^2))^2", if sign > 0.0 { "+" } else { "-" });
    let vocab = crate::expr::Vocabulary::new(crate::expr::AMBIENT_VARS, []);
    let c = Expr::parse(&text, &vocab).expect("built-in metric parses");
    let z = Expr::Num(0.0);
    let g = [
        [c.clone(), z.clone(), z.clone()],
        [z.clone(), c.clone(), z.clone()],
        [z.clone(), z, c],
    ];
    AmbientChart::General { name: name.to_string(), g: Box::new(g) }
}

impl AmbientChart {
    /// Stereographic chart of the unit 3-sphere (sectional curvature +1).
    pub fn sphere() -> Self {
        conformal("sphere", 1.0)
    }

    /// Poincaré ball chart of hyperbolic 3-space (sectional curvature −1).
    pub fn hyperbolic() -> Self {
        conformal("hyperbolic", -1.0)
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, AmbientChart::Euclidean)
    }

    pub fn name(&self) -> &str {
        match self {
            AmbientChart::Euclidean => "euclidean",
            AmbientChart::General { name, .. } => name,
        }
    }

    /// Substitute parameter values into the metric components.
    pub fn bind(&self, params: &Bindings) -> Result<Self, EvalError> {
        Ok(match self {
            AmbientChart::Euclidean => AmbientChart::Euclidean,
            AmbientChart::General { name, g } => {
                let mut out = g.clone();
                for (row, src) in out.iter_mut().zip(g.iter()) {
                    for (x, e) in row.iter_mut().zip(src.iter()) {
                        *x = e.bind(params)?;
                    }
                }
                AmbientChart::General { name: name.clone(), g: out }
            }
        })
    }

    fn eval_g<T: Scalar>(g: &[[Expr; 3]; 3], x: &Vec3<T>) -> Result<[[T; 3]; 3], EvalError> {
        let none = Bindings::new();
        let mut m: [[Option<T>; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in i..3 {
                let val = g[i][j].eval(x, &none)?;
                m[j][i] = Some(val.clone());
                m[i][j] = Some(val);
            }
        }
        Ok(m.map(|row| row.map(|x| x.expect("filled"))))
    }

    /// Metric data at `x`, with Christoffel symbols when `connection` is set.
    pub fn at<T: Scalar>(&self, x: &Vec3<T>, connection: bool) -> Result<Ambient<T>, AmbientError> {
        let g = match self {
            AmbientChart::Euclidean => return Ok(Ambient { metric: None, gamma: None }),
            AmbientChart::General { g, .. } => g,
        };
        let point = [x[0].value(), x[1].value(), x[2].value()];
        if !connection {
            let gm = Self::eval_g(g, x)?;
            return Ok(Ambient { metric: Some(MetricData::new(gm, point)?), gamma: None });
        }
        let xd: Vec3<Dual<T>> = std::array::from_fn(|k| Dual::seeded(x[k].clone(), k));
        let gd = Self::eval_g(g, &xd)?;
        let gm: [[T; 3]; 3] = gd.clone().map(|row| row.map(|e| e.v));
        // dg[a][b][c] = ∂_a g_bc
        let dg: [[[T; 3]; 3]; 3] =
            std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| gd[b][c].d[a].clone())));
        let metric = MetricData::new(gm, point)?;
        let gamma = christoffel(&metric.ginv, &dg);
        Ok(Ambient { metric: Some(metric), gamma: Some(gamma) })
    }

    /// Sectional curvature of the plane spanned by `a`, `b` at `x`.
    pub fn sectional_curvature(&self, x: [f64; 3], a: [f64; 3], b: [f64; 3]) -> Result<f64, AmbientError> {
        let amb = self.at(&x, false)?;
        let area2 = amb.inner(&a, &a) * amb.inner(&b, &b) - amb.inner(&a, &b).powi(2);
        let scale = amb.inner(&a, &a) * amb.inner(&b, &b);
        if area2 <= 1e-14 * scale || scale == 0.0 {
            return Err(AmbientError::DegeneratePlane);
        }
        let g = match self {
            AmbientChart::Euclidean => return Ok(0.0),
            AmbientChart::General { g, .. } => g,
        };
        // second derivatives of g through nested duals
        let xs: Vec3<Dual<Dual<f64>>> = std::array::from_fn(|k| Dual {
            v: Dual::seeded(x[k], k),
            d: std::array::from_fn(|m| Dual::constant(if m == k { 1.0 } else { 0.0 })),
        });
        let gdd = Self::eval_g(g, &xs)?;
        // Lift to first-order duals carrying the outer derivative ∂_m.
        let g1: [[Dual<f64>; 3]; 3] = std::array::from_fn(|i| {
            std::array::from_fn(|j| Dual { v: gdd[i][j].v.v, d: std::array::from_fn(|m| gdd[i][j].d[m].v) })
        });
        let dg1: [[[Dual<f64>; 3]; 3]; 3] = std::array::from_fn(|k| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| Dual {
                    v: gdd[i][j].v.d[k],
                    d: std::array::from_fn(|m| gdd[i][j].d[m].d[k]),
                })
            })
        });
        let ginv1 = inverse3(&g1);
        let gam = christoffel(&ginv1, &dg1);
        // R^l_{ijk} = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik
        let mut rxyyx = 0.0;
        let gm = amb.metric.as_ref().expect("general chart");
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let w = a[i] * b[j] * b[k];
                    if w == 0.0 {
                        continue;
                    }
                    for l in 0..3 {
                        let mut r = gam[l][j][k].d[i] - gam[l][i][k].d[j];
                        for m in 0..3 {
                            r += gam[l][i][m].v * gam[m][j][k].v - gam[l][j][m].v * gam[m][i][k].v;
                        }
                        let mut lower = 0.0;
                        for n in 0..3 {
                            lower += gm.g[l][n] * a[n];
                        }
                        rxyyx += w * r * lower;
                    }
                }
            }
        }
        Ok(rxyyx / area2)
    }
}

/// Γ^k_ij from the inverse metric and dg[a][b][c] = ∂_a g_bc.
pub fn christoffel<T: Scalar>(ginv: &[[T; 3]; 3], dg: &[[[T; 3]; 3]; 3]) -> [[[T; 3]; 3]; 3] {
    std::array::from_fn(|k| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc: Option<T> = None;
                for l in 0..3 {
                    let s = dg[i][j][l].clone() + dg[j][i][l].clone() - dg[l][i][j].clone();
                    let t = ginv[k][l].clone() * s;
                    acc = Some(match acc {
                        None => t,
                        Some(a) => a + t,
                    });
                }
                acc.expect("three terms").scale(0.5)
            })
        })
    })
}

fn det3<T: Scalar>(m: &[[T; 3]; 3]) -> T {
    m[0][0].clone() * (m[1][1].clone() * m[2][2].clone() - m[1][2].clone() * m[2][1].clone())
        - m[0][1].clone() * (m[1][0].clone() * m[2][2].clone() - m[1][2].clone() * m[2][0].clone())
        + m[0][2].clone() * (m[1][0].clone() * m[2][1].clone() - m[1][1].clone() * m[2][0].clone())
}

fn inverse3<T: Scalar>(m: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let inv_det = det3(m).recip();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            // cofactor of (j, i)
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = m[r0][c0].clone() * m[r1][c1].clone() - m[r0][c1].clone() * m[r1][c0].clone();
            let signed = if (i + j) % 2 == 0 { minor } else { -minor };
            signed * inv_det.clone()
        })
    })
}

#[derive(Clone, Debug)]
struct MetricData<T> {
    g: [[T; 3]; 3],
    ginv: [[T; 3]; 3],
    vol: T,
}

impl<T: Scalar> MetricData<T> {
    fn new(g: [[T; 3]; 3], point: [f64; 3]) -> Result<Self, AmbientError> {
        let c = g.clone().map(|r| r.map(|x| x.value()));
        let m1 = c[0][0];
        let m2 = c[0][0] * c[1][1] - c[0][1] * c[1][0];
        let m3 = det3(&c);
        let finite = c.iter().flatten().all(|x| x.is_finite());
        if !(finite && m1 > 0.0 && m2 > 0.0 && m3 > 0.0) {
            return Err(AmbientError::NotPositiveDefinite { point, minors: [m1, m2, m3] });
        }
        let ginv = inverse3(&g);
        let vol = det3(&g).sqrt();
        Ok(Self { g, ginv, vol })
    }
}

/// Metric (and optionally connection) data at a point or along a jet.
#[derive(Clone, Debug)]
pub struct Ambient<T> {
    metric: Option<MetricData<T>>,
    gamma: Option<[[[T; 3]; 3]; 3]>,
}

impl<T: Scalar> Ambient<T> {
    pub fn euclidean() -> Self {
        Ambient { metric: None, gamma: None }
    }

    pub fn is_euclidean(&self) -> bool {
        self.metric.is_none()
    }

    /// Metric components as plain numbers (constant terms).
    pub fn metric_values(&self) -> [[f64; 3]; 3] {
        match &self.metric {
            None => [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            Some(m) => m.g.clone().map(|r| r.map(|x| x.value())),
        }
    }

    pub fn inner(&self, a: &Vec3<T>, b: &Vec3<T>) -> T {
        match &self.metric {
            None => dot(a, b),
            Some(m) => {
                let mut acc: Option<T> = None;
                for i in 0..3 {
                    let gb = m.g[i][0].clone() * b[0].clone()
                        + m.g[i][1].clone() * b[1].clone()
                        + m.g[i][2].clone() * b[2].clone();
                    let t = a[i].clone() * gb;
                    acc = Some(match acc {
                        None => t,
                        Some(x) => x + t,
                    });
                }
                acc.expect("three terms")
            }
        }
    }

    pub fn norm2(&self, a: &Vec3<T>) -> T {
        self.inner(a, a)
    }

    pub fn norm(&self, a: &Vec3<T>) -> T {
        self.inner(a, a).sqrt()
    }

    /// Riemannian volume form √det g · det[a b c].
    pub fn det(&self, a: &Vec3<T>, b: &Vec3<T>, c: &Vec3<T>) -> T {
        let d = det_columns(a, b, c);
        match &self.metric {
            None => d,
            Some(m) => m.vol.clone() * d,
        }
    }

    /// The vector with ⟨a ×_g b, c⟩ = det_g(a, b, c) for all c.
    pub fn cross(&self, a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
        let e = cross(a, b);
        match &self.metric {
            None => e,
            Some(m) => std::array::from_fn(|i| {
                let raised = m.ginv[i][0].clone() * e[0].clone()
                    + m.ginv[i][1].clone() * e[1].clone()
                    + m.ginv[i][2].clone() * e[2].clone();
                m.vol.clone() * raised
            }),
        }
    }

    /// Γ(a, b)^k = Γ^k_ij a^i b^j, or `None` when the connection is flat in
    /// this chart.
    pub fn gamma_apply(&self, a: &Vec3<T>, b: &Vec3<T>) -> Option<Vec3<T>> {
        let gam = self.gamma.as_ref()?;
        Some(std::array::from_fn(|k| {
            let mut acc: Option<T> = None;
            for i in 0..3 {
                for j in 0..3 {
                    let t = gam[k][i][j].clone() * a[i].clone() * b[j].clone();
                    acc = Some(match acc {
                        None => t,
                        Some(x) => x + t,
                    });
                }
            }
            acc.expect("nine terms")
        }))
    }

    /// Christoffel symbols `gamma[k][i][j]`, if computed.
    pub fn christoffel(&self) -> Option<&[[[T; 3]; 3]; 3]> {
        self.gamma.as_ref()
    }
}

/// Covariant derivative of a vector field along the map `f` in direction
/// `axis`: ∂field + Γ(f_axis, field). Order drops by one.
pub fn covariant_derivative(amb: &Ambient<Jet2>, f_dir: &Vec3<Jet2>, field: &Vec3<Jet2>, axis: Axis) -> Vec3<Jet2> {
    let d: Vec3<Jet2> = std::array::from_fn(|k| field[k].partial(axis));
    match amb.gamma_apply(f_dir, field) {
        None => d,
        Some(g) => add(&d, &g),
    }
}

// Plain vector helpers over any scalar.

pub fn dot<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

pub fn cross<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

pub fn det_columns<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>, c: &Vec3<T>) -> T {
    dot(&cross(a, b), c)
}

pub fn add<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    std::array::from_fn(|k| a[k].clone() + b[k].clone())
}

pub fn sub<T: Scalar>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    std::array::from_fn(|k| a[k].clone() - b[k].clone())
}

pub fn scale<T: Scalar>(a: &Vec3<T>, s: f64) -> Vec3<T> {
    std::array::from_fn(|k| a[k].scale(s))
}

pub fn mul<T: Scalar>(a: &Vec3<T>, s: &T) -> Vec3<T> {
    std::array::from_fn(|k| a[k].clone() * s.clone())
}

pub fn values<T: Scalar>(a: &Vec3<T>) -> [f64; 3] {
    [a[0].value(), a[1].value(), a[2].value()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Vocabulary, AMBIENT_VARS};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn chart(entries: [[&str; 3]; 3]) -> AmbientChart {
        let vocab = Vocabulary::new(AMBIENT_VARS, []);
        let g = entries.map(|r| r.map(|e| Expr::parse(e, &vocab).unwrap()));
        AmbientChart::General { name: "test".into(), g: Box::new(g) }
    }

    fn warped() -> AmbientChart {
        chart([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "(1+x1)^2"]])
    }

    fn e(k: usize) -> [f64; 3] {
        let mut v = [0.0; 3];
        v[k] = 1.0;
        v
    }

    #[test]
    fn euclidean_products() {
        let a = Ambient::<f64>::euclidean();
        assert_eq!(a.inner(&e(0), &e(1)), 0.0);
        assert_eq!(a.inner(&[0.0, 2.0, 0.0], &[0.0, 2.0, 0.0]), 4.0);
        assert_eq!(a.det(&e(0), &e(1), &e(2)), 1.0);
        assert_eq!(a.cross(&e(0), &e(1)), e(2));
    }

    #[test]
    fn warped_metric_inner_product() {
        let c = warped();
        let at0 = c.at(&[0.0, 0.0, 0.0], false).unwrap();
        assert_relative_eq!(at0.inner(&e(2), &e(2)), 1.0);
        let at1 = c.at(&[1.0, 0.0, 0.0], false).unwrap();
        assert_relative_eq!(at1.inner(&e(2), &e(2)), 4.0);
    }

    #[test]
    fn constant_metric_volume_and_cross() {
        let c = chart([["4", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
        let a = c.at(&[0.3, 0.1, 0.0], false).unwrap();
        assert_relative_eq!(a.det(&e(0), &e(1), &e(2)), 2.0);
        assert_relative_eq!(a.det(&e(0), &e(0), &e(2)), 0.0);
        let x = a.cross(&e(1), &e(2));
        assert_relative_eq!(x[0], 0.5);
        assert_relative_eq!(x[1], 0.0);
        assert_relative_eq!(a.inner(&x, &e(0)), 2.0);
        assert_eq!(a.cross(&e(1), &e(1)), [0.0; 3]);
    }

    #[test]
    fn rejects_indefinite_metric() {
        let c = chart([["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "1"]]);
        assert!(matches!(c.at(&[0.0; 3], false), Err(AmbientError::NotPositiveDefinite { .. })));
    }

    #[test]
    fn covariant_derivative_of_constant_field() {
        // field e3 along f(u,v) = (u, 0, 0) in the warped chart
        let base = [0.0, 0.0];
        let u = Jet2::variable(base, 3, Axis::U);
        let z = Jet2::zeros(base, 3);
        let one = Jet2::constant(base, 3, 1.0);
        let f = [u.clone(), z.clone(), z.clone()];
        let amb = warped().at(&f, true).unwrap();
        let fu = [u.partial(Axis::U), z.partial(Axis::U), z.partial(Axis::U)];
        let field = [z.clone(), z.clone(), one];
        let d = covariant_derivative(&amb, &fu, &field, Axis::U);
        assert_relative_eq!(d[0].value(), 0.0);
        assert_relative_eq!(d[2].value(), 1.0);
        // Γ³₁₃ = 1/(1+u) so the next coefficient is −1
        assert_relative_eq!(d[2].coeff(1, 0), -1.0, epsilon = 1e-12);
        let flat = Ambient::<Jet2>::euclidean();
        let d = covariant_derivative(&flat, &fu, &field, Axis::U);
        assert!(d.iter().all(|x| x.max_abs() == 0.0));
    }

    #[test]
    fn space_form_curvatures() {
        let pts = [[0.0, 0.0, 0.0], [0.2, -0.1, 0.3], [-0.4, 0.25, 0.1]];
        let planes = [(e(0), e(1)), ([1.0, 2.0, 0.5], [-0.3, 0.1, 1.0])];
        for p in pts {
            for (a, b) in planes {
                assert_relative_eq!(AmbientChart::Euclidean.sectional_curvature(p, a, b).unwrap(), 0.0);
                assert_relative_eq!(AmbientChart::sphere().sectional_curvature(p, a, b).unwrap(), 1.0, epsilon = 1e-10);
                assert_relative_eq!(
                    AmbientChart::hyperbolic().sectional_curvature(p, a, b).unwrap(),
                    -1.0,
                    epsilon = 1e-10
                );
            }
        }
        assert!(matches!(
            AmbientChart::sphere().sectional_curvature([0.0; 3], e(0), e(0)),
            Err(AmbientError::DegeneratePlane)
        ));
    }

    #[test]
    fn warped_product_curvature() {
        // dx1² + dx2² + (1+x1)² dx3²: plane (e1, e3) has K = −h''/h = 0, flat;
        // use exp(x1) warping instead: K(e1, e3) = −1
        let c = chart([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "exp(2*x1)"]]);
        assert_relative_eq!(c.sectional_curvature([0.1, 0.0, 0.0], e(0), e(2)).unwrap(), -1.0, epsilon = 1e-10);
        assert_relative_eq!(warped().sectional_curvature([0.1, 0.0, 0.0], e(0), e(2)).unwrap(), 0.0, epsilon = 1e-10);
    }

    fn random_field(base: [f64; 2], coeffs: &[f64]) -> Vec3<Jet2> {
        std::array::from_fn(|k| Jet2::from_fn(base, 3, |i, j| coeffs[(k * 10 + i * 4 + j) % coeffs.len()]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn cross_is_orthogonal(a in prop::array::uniform3(-2.0f64..2.0), b in prop::array::uniform3(-2.0f64..2.0), x in prop::array::uniform3(-0.5f64..0.5)) {
            for c in [AmbientChart::Euclidean, AmbientChart::sphere(), AmbientChart::hyperbolic(), warped()] {
                let amb = c.at(&x, false).unwrap();
                let n = amb.cross(&a, &b);
                let s = 1.0 + amb.norm(&a) * amb.norm(&b);
                prop_assert!(amb.inner(&n, &a).abs() < 1e-9 * s);
                prop_assert!(amb.inner(&n, &b).abs() < 1e-9 * s);
            }
        }

        #[test]
        fn volume_is_unimodular_invariant(
            a in prop::array::uniform3(-2.0f64..2.0), b in prop::array::uniform3(-2.0f64..2.0),
            c in prop::array::uniform3(-2.0f64..2.0), s in -2.0f64..2.0, t in -2.0f64..2.0,
        ) {
            let amb = AmbientChart::sphere().at(&[0.1, 0.2, -0.1], false).unwrap();
            // shear (a, b, c) → (a + s b, b + t c, c) has determinant one
            let a2: [f64; 3] = std::array::from_fn(|k| a[k] + s * b[k]);
            let b2: [f64; 3] = std::array::from_fn(|k| b[k] + t * c[k]);
            let d1 = amb.det(&a, &b, &c);
            let d2 = amb.det(&a2, &b2, &c);
            prop_assert!((d1 - d2).abs() < 1e-9 * (1.0 + d1.abs()));
        }

        #[test]
        fn connection_is_metric_compatible(coeffs in prop::collection::vec(-1.0f64..1.0, 40), ax in 0usize..2) {
            let base = [0.1, -0.2];
            let axis = if ax == 0 { Axis::U } else { Axis::V };
            let f: Vec3<Jet2> = std::array::from_fn(|k| Jet2::from_fn(base, 4, |i, j| if i + j == 0 { 0.1 * k as f64 } else { 0.3 * coeffs[(k * 7 + i * 3 + j) % 40] }));
            let fd: Vec3<Jet2> = std::array::from_fn(|k| f[k].partial(axis));
            let a = random_field(base, &coeffs);
            let b = random_field(base, &coeffs[5..]);
            for chart in [AmbientChart::sphere(), warped()] {
                let amb = chart.at(&f, true).unwrap();
                let lhs = amb.inner(&a, &b).partial(axis);
                let rhs = amb.inner(&covariant_derivative(&amb, &fd, &a, axis), &b)
                    + amb.inner(&a, &covariant_derivative(&amb, &fd, &b, axis));
                for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                    prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
                }
            }
        }

        #[test]
        fn connection_is_torsion_free(coeffs in prop::collection::vec(-1.0f64..1.0, 40)) {
            let base = [0.0, 0.0];
            let f: Vec3<Jet2> = std::array::from_fn(|k| Jet2::from_fn(base, 4, |i, j| if i + j == 0 { 0.1 } else { 0.4 * coeffs[(k * 11 + i * 5 + j) % 40] }));
            let fu: Vec3<Jet2> = std::array::from_fn(|k| f[k].partial(Axis::U));
            let fv: Vec3<Jet2> = std::array::from_fn(|k| f[k].partial(Axis::V));
            let amb = AmbientChart::hyperbolic().at(&f, true).unwrap();
            let uv = covariant_derivative(&amb, &fu, &fv, Axis::U);
            let vu = covariant_derivative(&amb, &fv, &fu, Axis::V);
            for k in 0..3 {
                for (x, y) in uv[k].coeffs().iter().zip(vu[k].coeffs()) {
                    prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
                }
            }
        }
    }
}
