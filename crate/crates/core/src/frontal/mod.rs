//! Frontal surfaces: unit normal resolution, the singular-set function λ,
//! null directions and implicit jets of the singular curve.
//!
//! All local quantities are Taylor jets at a base point, so derivatives of
//! any order up to the working order are exact.

mod trace;

use serde::Serialize;

use crate::ambient::{self, Ambient, AmbientChart, Vec3};
use crate::error::{GeometryError, Result};
use crate::expr::{evaluate_jet, Bindings, Expr};
use crate::jet::{Axis, Jet1, Jet2, Scalar, CANCELLATION_TOL};
use crate::spec::{Domain, SurfaceSpec};

pub use trace::{trace_both, trace_singular_curve, SingularSample, StopReason, Trace, TraceConfig};

/// Default jet order of the reported invariants.
pub const DEFAULT_JET_ORDER: usize = 5;
/// Largest jet order accepted from users.
pub const MAX_JET_ORDER: usize = 6;
/// Environment variable overriding the default jet order.
pub const ORDER_ENV: &str = "FRONTLAB_JET_ORDER";
/// Extra orders spent on f: one for f_u, one for the vanishing division of
/// the adjugate normal.
pub const ORDER_SLACK: usize = 2;

const EXPR_ORDER_CAP: usize = MAX_JET_ORDER + ORDER_SLACK + 1;
/// Relative threshold below which f_u ×_g f_v counts as vanishing.
const NORMAL_SINGULAR_TOL: f64 = 1e-10;
/// |∇λ| threshold (relative to |f_u|² + |f_v|²) for degeneracy.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// |λ| threshold (relative) for accepting a point as singular.
pub const SINGULAR_TOL: f64 = 1e-8;
/// Threshold on |det(γ', η)| / (|γ'||η|) for the second kind.
pub const KIND_TOL: f64 = 1e-8;
const SUPPLIED_NORMAL_TOL: f64 = 1e-8;

/// Jet order from `FRONTLAB_JET_ORDER`, clamped to [3, 6]; default 5.
pub fn jet_order_from_env() -> usize {
    std::env::var(ORDER_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .map(|n| n.clamp(3, MAX_JET_ORDER))
        .unwrap_or(DEFAULT_JET_ORDER)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalMode {
    Supplied,
    Adjugate,
}

/// Sign rule for the adjugate normal. Supplied normals keep their own sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Orientation {
    /// n/|n| at regular points; largest Cartesian component positive at
    /// singular points.
    Canonical,
    /// Agree with the given vector.
    Reference([f64; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    First,
    Second,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::First => "first",
            Kind::Second => "second",
        })
    }
}

/// A surface with a resolved unit normal.
#[derive(Clone, Debug)]
pub struct FrontalSurface {
    spec: SurfaceSpec,
    f: [Expr; 3],
    normal: Option<[Expr; 3]>,
    chart: AmbientChart,
    mode: NormalMode,
    order: usize,
}

/// Jets of everything the local theory needs at one base point.
#[derive(Clone, Debug)]
pub struct LocalJets {
    pub base: [f64; 2],
    pub f: Vec3<Jet2>,
    pub fu: Vec3<Jet2>,
    pub fv: Vec3<Jet2>,
    /// Covariant second derivatives ∇_u f_u, ∇_u f_v, ∇_v f_v.
    pub fuu: Vec3<Jet2>,
    pub fuv: Vec3<Jet2>,
    pub fvv: Vec3<Jet2>,
    pub nu: Vec3<Jet2>,
    /// Covariant derivatives of ν.
    pub nu_u: Vec3<Jet2>,
    pub nu_v: Vec3<Jet2>,
    pub lambda: Jet2,
    /// Function with the zero set and sign of λ, one order longer when the
    /// normal comes from the adjugate construction.
    pub phi: Jet2,
    pub amb: Ambient<Jet2>,
    /// The adjugate normal needed the vanishing division at this point.
    pub resolved_singular: bool,
}

fn zip3<T>(f: impl FnMut(usize) -> T) -> [T; 3] {
    std::array::from_fn(f)
}

/// `e[0]·a + e[1]·b` for jet coefficients `e`.
pub fn combine(e: &[Jet2; 2], a: &Vec3<Jet2>, b: &Vec3<Jet2>) -> Vec3<Jet2> {
    zip3(|k| e[0].clone() * a[k].clone() + e[1].clone() * b[k].clone())
}

/// `e[0]·a + e[1]·b` for numeric coefficients `e`.
pub fn combine_const(e: [f64; 2], a: &Vec3<Jet2>, b: &Vec3<Jet2>) -> Vec3<Jet2> {
    zip3(|k| a[k].scale(e[0]) + b[k].scale(e[1]))
}

fn norm2(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

impl LocalJets {
    pub fn order(&self) -> usize {
        self.f[0].order()
    }

    pub fn nu_value(&self) -> [f64; 3] {
        ambient::values(&self.nu)
    }

    pub fn lambda_grad(&self) -> [f64; 2] {
        self.lambda.gradient()
    }

    /// Inner product of numeric vectors with the metric at the base point.
    pub fn inner_at(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        let g = self.amb.metric_values();
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += a[i] * g[i][j] * b[j];
            }
        }
        s
    }

    pub fn norm_at(&self, a: [f64; 3]) -> f64 {
        self.inner_at(a, a).max(0.0).sqrt()
    }

    /// df(e) at the base point.
    pub fn df(&self, e: [f64; 2]) -> [f64; 3] {
        let (a, b) = (ambient::values(&self.fu), ambient::values(&self.fv));
        zip3(|k| e[0] * a[k] + e[1] * b[k])
    }

    /// |f_u|² + |f_v|² at the base point; the natural scale of λ.
    pub fn lambda_scale(&self) -> f64 {
        let a = ambient::values(&self.fu);
        let b = ambient::values(&self.fv);
        self.inner_at(a, a) + self.inner_at(b, b)
    }

    /// ∇_E X = E^u ∇_u X + E^v ∇_v X for a direction field E.
    pub fn cov(&self, e: &[Jet2; 2], x: &Vec3<Jet2>) -> Vec3<Jet2> {
        let du: Vec3<Jet2> = zip3(|k| x[k].partial(Axis::U));
        let dv: Vec3<Jet2> = zip3(|k| x[k].partial(Axis::V));
        let flat = combine(e, &du, &dv);
        let fe = combine(e, &self.fu, &self.fv);
        match self.amb.gamma_apply(&fe, x) {
            None => flat,
            Some(g) => ambient::add(&flat, &g),
        }
    }

    /// Covariant Hessian of f applied to constant directions a, b.
    pub fn hessian(&self, a: [f64; 2], b: [f64; 2]) -> Vec3<Jet2> {
        zip3(|k| {
            self.fuu[k].scale(a[0] * b[0])
                + self.fuv[k].scale(a[0] * b[1] + a[1] * b[0])
                + self.fvv[k].scale(a[1] * b[1])
        })
    }
}

impl FrontalSurface {
    /// Bind parameters and resolve the unit normal. Supplied normals are
    /// validated on a 9×9 grid; without one, the adjugate construction is
    /// checked for a vanishing direction on the same grid.
    pub fn resolve(spec: &SurfaceSpec) -> Result<FrontalSurface> {
        let bind3 = |e: &[Expr; 3], p: &Bindings| -> Result<[Expr; 3]> {
            Ok([e[0].bind(p)?, e[1].bind(p)?, e[2].bind(p)?])
        };
        let f = bind3(&spec.f, &spec.params)?;
        let normal = match &spec.normal {
            Some(n) => Some(bind3(n, &spec.params)?),
            None => None,
        };
        let chart = spec.chart.bind(&spec.params)?;
        let mode = if normal.is_some() { NormalMode::Supplied } else { NormalMode::Adjugate };
        let surface = FrontalSurface { spec: spec.clone(), f, normal, chart, mode, order: jet_order_from_env() };
        surface.validate_grid()?;
        Ok(surface)
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order.clamp(2, MAX_JET_ORDER);
        self
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn mode(&self) -> NormalMode {
        self.mode
    }

    pub fn chart(&self) -> &AmbientChart {
        &self.chart
    }

    pub fn domain(&self) -> &Domain {
        &self.spec.domain
    }

    /// Jet order of reported invariants.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Working order for f so that invariants come out at `order()`.
    pub fn working_order(&self) -> usize {
        self.order + ORDER_SLACK
    }

    fn validate_grid(&self) -> Result<()> {
        let d = self.spec.domain;
        let n = 9;
        for i in 0..n {
            for j in 0..n {
                let p = [
                    d.u[0] + (d.u[1] - d.u[0]) * (i as f64 + 0.5) / n as f64,
                    d.v[0] + (d.v[1] - d.v[0]) * (j as f64 + 0.5) / n as f64,
                ];
                // evaluation failures are reported where the point is used
                match self.local(p, 3, Orientation::Canonical) {
                    Ok(_) => {}
                    Err(e @ (GeometryError::InvalidNormal { .. } | GeometryError::NormalVanishes { .. })) => {
                        return Err(e)
                    }
                    Err(_) => {}
                }
            }
        }
        Ok(())
    }

    pub fn map_jet(&self, p: [f64; 2], order: usize) -> Result<Vec3<Jet2>> {
        let none = Bindings::new();
        Ok([
            evaluate_jet(&self.f[0], p, order, &none, EXPR_ORDER_CAP)?,
            evaluate_jet(&self.f[1], p, order, &none, EXPR_ORDER_CAP)?,
            evaluate_jet(&self.f[2], p, order, &none, EXPR_ORDER_CAP)?,
        ])
    }

    pub fn map_value(&self, p: [f64; 2]) -> Result<[f64; 3]> {
        let none = Bindings::new();
        Ok([self.f[0].eval(&p, &none)?, self.f[1].eval(&p, &none)?, self.f[2].eval(&p, &none)?])
    }

    /// Jets at `p` with f expanded to `order` (at least 2).
    pub fn local(&self, p: [f64; 2], order: usize, orient: Orientation) -> Result<LocalJets> {
        let order = order.max(2);
        let f = self.map_jet(p, order)?;
        let fu: Vec3<Jet2> = zip3(|k| f[k].partial(Axis::U));
        let fv: Vec3<Jet2> = zip3(|k| f[k].partial(Axis::V));
        let amb = self.chart.at(&f, true)?;

        let (nu, phi, resolved_singular) = match &self.normal {
            Some(exprs) => {
                let none = Bindings::new();
                let nu: Vec3<Jet2> = [
                    evaluate_jet(&exprs[0], p, order, &none, EXPR_ORDER_CAP)?,
                    evaluate_jet(&exprs[1], p, order, &none, EXPR_ORDER_CAP)?,
                    evaluate_jet(&exprs[2], p, order, &none, EXPR_ORDER_CAP)?,
                ];
                self.check_supplied(p, &amb, &fu, &fv, &nu)?;
                let lambda = amb.det(&fu, &fv, &nu);
                (nu, lambda, false)
            }
            None => adjugate_normal(p, &amb, &fu, &fv, orient)?,
        };

        let lambda = amb.det(&fu, &fv, &nu);
        let cov = |dir: &Vec3<Jet2>, x: &Vec3<Jet2>, axis| ambient::covariant_derivative(&amb, dir, x, axis);
        let fuu = cov(&fu, &fu, Axis::U);
        let fuv = cov(&fu, &fv, Axis::U);
        let fvv = cov(&fv, &fv, Axis::V);
        let nu_u = cov(&fu, &nu, Axis::U);
        let nu_v = cov(&fv, &nu, Axis::V);
        Ok(LocalJets { base: p, f, fu, fv, fuu, fuv, fvv, nu, nu_u, nu_v, lambda, phi, amb, resolved_singular })
    }

    fn check_supplied(
        &self,
        p: [f64; 2],
        amb: &Ambient<Jet2>,
        fu: &Vec3<Jet2>,
        fv: &Vec3<Jet2>,
        nu: &Vec3<Jet2>,
    ) -> Result<()> {
        let n2 = amb.inner(nu, nu).value();
        let bad = |reason: String| Err(GeometryError::InvalidNormal { point: p, reason });
        if !n2.is_finite() || (n2.sqrt() - 1.0).abs() > SUPPLIED_NORMAL_TOL {
            return bad(format!("|ν| = {:.12}", n2.sqrt()));
        }
        for (name, x) in [("f_u", fu), ("f_v", fv)] {
            let ip = amb.inner(nu, x).value();
            let len = amb.inner(x, x).value().max(0.0).sqrt();
            if ip.abs() > SUPPLIED_NORMAL_TOL * (1.0 + len) {
                return bad(format!("⟨ν, {name}⟩ = {ip:.3e}"));
            }
        }
        Ok(())
    }

    /// Jet of λ = det_g(f_u, f_v, ν) at `p` through `order`.
    pub fn lambda_jet(&self, p: [f64; 2], order: usize) -> Result<Jet2> {
        let l = self.local(p, order + ORDER_SLACK, Orientation::Canonical)?;
        Ok(l.lambda.truncate(order))
    }

    pub fn normal_at(&self, p: [f64; 2], orient: Orientation) -> Result<[f64; 3]> {
        Ok(self.local(p, 3, orient)?.nu_value())
    }

    /// Value and gradient of a function cutting out the singular set near
    /// `q`, plus the scale |f_u|² + |f_v|². With an adjugate normal the
    /// function is ⟨f_u ×_g f_v, ν_ref⟩, which avoids the division.
    pub fn defining_at(&self, q: [f64; 2], nu_ref: Option<[f64; 3]>) -> Result<(f64, [f64; 2], f64)> {
        if self.normal.is_some() {
            let l = self.local(q, 2, Orientation::Canonical)?;
            return Ok((l.lambda.value(), l.lambda.gradient(), l.lambda_scale()));
        }
        let r = match nu_ref {
            Some(r) => r,
            None => self.normal_at(q, Orientation::Canonical)?,
        };
        let f = self.map_jet(q, 2)?;
        let fu: Vec3<Jet2> = zip3(|k| f[k].partial(Axis::U));
        let fv: Vec3<Jet2> = zip3(|k| f[k].partial(Axis::V));
        let amb = self.chart.at(&f, false)?;
        let n = amb.cross(&fu, &fv);
        let rj: Vec3<Jet2> = zip3(|k| Jet2::constant(q, 1, r[k]));
        let phi = amb.inner(&n, &rj);
        let scale = amb.inner(&fu, &fu).value() + amb.inner(&fv, &fv).value();
        Ok((phi.value(), phi.gradient(), scale))
    }

    /// Unit kernel direction of df at a rank-one point, oriented so that
    /// {γ', η} is positive (equivalently dλ(η) > 0 at the first kind).
    pub fn null_direction(&self, p: [f64; 2]) -> Result<[f64; 2]> {
        let l = self.local(p, 3, Orientation::Canonical)?;
        let a = ambient::values(&l.fu);
        let b = ambient::values(&l.fv);
        let (g11, g12, g22) = (l.inner_at(a, a), l.inner_at(a, b), l.inner_at(b, b));
        // eigen-decomposition of the 2×2 Gram matrix
        let tr = g11 + g22;
        let disc = ((g11 - g22).powi(2) + 4.0 * g12 * g12).sqrt();
        let big = 0.5 * (tr + disc);
        let small = 0.5 * (tr - disc);
        if big <= 1e-24 {
            return Err(GeometryError::RankZero { point: p });
        }
        let _ = small;
        // eigenvector of the small eigenvalue
        let e = if (g11 - g22).abs() + g12.abs() == 0.0 {
            [1.0, 0.0]
        } else if g11 >= g22 {
            [-g12, g11 - 0.5 * (tr - disc)]
        } else {
            [g22 - 0.5 * (tr - disc), -g12]
        };
        let e = unit2(e);
        let grad = l.lambda_grad();
        Ok(orient_null(e, tangent_of(grad)))
    }

    /// Implicit jets of the singular curve through `p`.
    pub fn singular_curve_jets(&self, p: [f64; 2], order: usize) -> Result<SingularCurveJets> {
        let l = self.local(p, order + ORDER_SLACK, Orientation::Canonical)?;
        let sp = SingularPoint::from_local(l, &self.chart)?;
        let mut c = sp.curve;
        c.graph = c.graph.truncate(order);
        Ok(c)
    }

    /// Full jet bundle of a singular point at the default working order.
    pub fn singular_point(&self, p: [f64; 2], orient: Orientation) -> Result<SingularPoint> {
        self.singular_point_at_order(p, self.working_order(), orient)
    }

    pub fn singular_point_at_order(&self, p: [f64; 2], order: usize, orient: Orientation) -> Result<SingularPoint> {
        SingularPoint::from_local(self.local(p, order, orient)?, &self.chart)
    }

    /// A copy with the supplied normal negated (adjugate surfaces are
    /// flipped through `Orientation::Reference`).
    pub fn flipped_normal(&self) -> Option<FrontalSurface> {
        let n = self.normal.as_ref()?;
        let mut out = self.clone();
        out.normal = Some(n.clone().map(|e| Expr::Neg(Box::new(e))));
        if let Some(sn) = &self.spec.normal {
            out.spec.normal = Some(sn.clone().map(|e| Expr::Neg(Box::new(e))));
        }
        Some(out)
    }
}

fn unit2(v: [f64; 2]) -> [f64; 2] {
    let n = norm2(v);
    if n == 0.0 {
        v
    } else {
        [v[0] / n, v[1] / n]
    }
}

/// Unit tangent of {λ = 0} with det(t, ∇λ) > 0.
pub fn tangent_of(grad: [f64; 2]) -> [f64; 2] {
    unit2([grad[1], -grad[0]])
}

/// Flip `eta` so that det(t, η) > 0, or η·t > 0 when η ∥ t.
pub fn orient_null(eta: [f64; 2], t: [f64; 2]) -> [f64; 2] {
    let det = t[0] * eta[1] - t[1] * eta[0];
    let s = if det.abs() > KIND_TOL { det.signum() } else if t[0] * eta[0] + t[1] * eta[1] < 0.0 { -1.0 } else { 1.0 };
    [s * eta[0], s * eta[1]]
}

/// ν from f_u ×_g f_v. At singular points n = λ·ν* vanishes and is divided
/// exactly by μ = ⟨n, ν0⟩ where ν0 is the unit direction of the dominant of
/// n_u, n_v. Returns (ν, defining function, singular flag).
fn adjugate_normal(
    p: [f64; 2],
    amb: &Ambient<Jet2>,
    fu: &Vec3<Jet2>,
    fv: &Vec3<Jet2>,
    orient: Orientation,
) -> Result<(Vec3<Jet2>, Jet2, bool)> {
    let n = amb.cross(fu, fv);
    let g = amb.metric_values();
    let ip = |a: [f64; 3], b: [f64; 3]| -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += a[i] * g[i][j] * b[j];
            }
        }
        s
    };
    let n0 = ambient::values(&n);
    let nu_p: [f64; 3] = zip3(|k| n[k].coeff(1, 0));
    let nv_p: [f64; 3] = zip3(|k| n[k].coeff(0, 1));
    let (mag, mag_u, mag_v) = (ip(n0, n0).sqrt(), ip(nu_p, nu_p).sqrt(), ip(nv_p, nv_p).sqrt());

    let sign_for = |nu: [f64; 3], default: f64| -> f64 {
        match orient {
            Orientation::Reference(r) => {
                let d = ip(nu, r);
                if d < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
            Orientation::Canonical => default,
        }
    };

    if mag > NORMAL_SINGULAR_TOL * (mag_u + mag_v) && mag > 0.0 {
        let inv = amb.inner(&n, &n).sqrt().recip();
        let nu: Vec3<Jet2> = zip3(|k| n[k].clone() * inv.clone());
        let s = sign_for(ambient::values(&nu), 1.0);
        let nu = zip3(|k| nu[k].scale(s));
        let phi = amb.det(fu, fv, &nu);
        return Ok((nu, phi, false));
    }
    if mag_u + mag_v == 0.0 || !(mag_u + mag_v).is_finite() {
        return Err(GeometryError::NormalVanishes { point: p });
    }
    let v0 = if mag_u >= mag_v { nu_p.map(|x| x / mag_u) } else { nv_p.map(|x| x / mag_v) };
    let v0j: Vec3<Jet2> = zip3(|k| Jet2::constant(p, n[0].order(), v0[k]));
    // components that cancel identically leave residue the division would reject
    let size = |v: &Vec3<Jet2>| v.iter().map(Jet2::max_abs).fold(0.0, f64::max);
    let floor = CANCELLATION_TOL * size(fu) * size(fv);
    let n: Vec3<Jet2> = n.map(|c| c.chop(floor));
    let mu = amb.inner(&n, &v0j);
    let mut m: Vec<Jet2> = Vec::with_capacity(3);
    for k in 0..3 {
        m.push(n[k].div_vanishing(&mu).map_err(|_| GeometryError::NormalVanishes { point: p })?);
    }
    let m: Vec3<Jet2> = [m[0].clone(), m[1].clone(), m[2].clone()];
    let inv = amb.inner(&m, &m).sqrt().recip();
    let nu: Vec3<Jet2> = zip3(|k| m[k].clone() * inv.clone());
    let vals = ambient::values(&nu);
    let mut big = 0;
    for k in 1..3 {
        if vals[k].abs() > vals[big].abs() + 1e-12 {
            big = k;
        }
    }
    let s = sign_for(vals, if vals[big] < 0.0 { -1.0 } else { 1.0 });
    let nu = zip3(|k| nu[k].scale(s));
    // λ = s·μ·|m|, so s·μ has the zero set and sign of λ
    Ok((nu, mu.scale(s), true))
}

/// Solve φ(s, c(s)) = 0 (or φ(c(s), s) = 0) for the jet c with c(0) = 0.
/// The constant term of φ is treated as zero.
pub fn solve_graph(phi: &Jet2, dependent: Axis) -> Result<Jet1> {
    let n = phi.order();
    let d = phi.gradient()[dependent.index()];
    if d == 0.0 || !d.is_finite() {
        return Err(GeometryError::Degenerate { point: phi.base() });
    }
    let mut phi0 = phi.clone();
    phi0.set_coeff(0, 0, 0.0);
    let s = Jet1::variable(n, 0.0);
    let mut c = Jet1::zeros(n);
    // each sweep fixes one more coefficient
    for _ in 0..=n {
        let r = match dependent {
            Axis::V => phi0.compose_curve(&s, &c),
            Axis::U => phi0.compose_curve(&c, &s),
        };
        c = c - r.scale(1.0 / d);
    }
    Ok(c)
}

/// Graph jets of the singular curve and composed jets along it.
#[derive(Clone, Debug)]
pub struct SingularCurveJets {
    /// The independent coordinate; the other one is `graph(s)`.
    pub axis: Axis,
    pub graph: Jet1,
    /// Parameter-plane offsets (u − u0, v − v0) as functions of s.
    pub du: Jet1,
    pub dv: Jet1,
    pub f: Vec3<Jet1>,
    pub nu: Vec3<Jet1>,
    /// +1 when increasing s follows the canonical tangent, −1 otherwise.
    pub rho: f64,
}

impl SingularCurveJets {
    pub fn along(&self, j: &Jet2) -> Jet1 {
        j.compose_curve(&self.du, &self.dv)
    }

    pub fn along3(&self, v: &Vec3<Jet2>) -> Vec3<Jet1> {
        zip3(|k| self.along(&v[k]))
    }

    /// d(u, v)/ds along the curve.
    pub fn velocity(&self) -> [Jet1; 2] {
        [self.du.derivative(), self.dv.derivative()]
    }
}

/// Everything known about a non-degenerate singular point.
#[derive(Clone, Debug)]
pub struct SingularPoint {
    pub p: [f64; 2],
    pub local: LocalJets,
    pub curve: SingularCurveJets,
    /// Unit null field along the curve, oriented at s = 0.
    pub null_curve: [Jet1; 2],
    /// The null field extended constantly across the curve.
    pub eta_field: [Jet2; 2],
    pub eta: [f64; 2],
    /// Unit canonical tangent of the singular curve in the parameter plane.
    pub tangent: [f64; 2],
    pub lambda_grad: [f64; 2],
    pub kind: Kind,
    /// det(γ', η)/(|γ'||η|) at the point.
    pub kind_measure: f64,
    /// d/dt of det(γ', η)/(|γ'||η|) in the canonical direction.
    pub transversality: f64,
    /// Metric data along f∘γ.
    pub amb_curve: Ambient<Jet1>,
}

impl SingularPoint {
    pub fn from_local(local: LocalJets, chart: &AmbientChart) -> Result<SingularPoint> {
        let p = local.base;
        let scale = local.lambda_scale();
        let lam = local.lambda.value();
        if lam.abs() > SINGULAR_TOL * scale.max(1e-300) && lam.abs() > 1e-14 {
            return Err(GeometryError::NotSingular { point: p, lambda: lam });
        }
        let grad = local.lambda_grad();
        if !(norm2(grad) > DEGENERACY_TOL * scale.max(1.0)) {
            return Err(GeometryError::Degenerate { point: p });
        }
        let a = ambient::values(&local.fu);
        let b = ambient::values(&local.fv);
        let (la, lb) = (local.norm_at(a), local.norm_at(b));
        if la.max(lb) <= 1e-12 {
            return Err(GeometryError::RankZero { point: p });
        }
        let tangent = tangent_of(grad);

        // implicit curve from φ; the graph axis is the one with the smaller
        // gradient component
        let pg = local.phi.gradient();
        let (axis, dependent) = if pg[1].abs() >= pg[0].abs() { (Axis::U, Axis::V) } else { (Axis::V, Axis::U) };
        let graph = solve_graph(&local.phi, dependent)?;
        let n = graph.order();
        let s = Jet1::variable(n, 0.0);
        let (du, dv) = match axis {
            Axis::U => (s, graph.clone()),
            Axis::V => (graph.clone(), s),
        };
        let vel0 = [du.coeff(1), dv.coeff(1)];
        let rho = if vel0[0] * tangent[0] + vel0[1] * tangent[1] < 0.0 { -1.0 } else { 1.0 };
        let mut curve = SingularCurveJets {
            axis,
            graph,
            du,
            dv,
            f: zip3(|_| Jet1::zeros(0)),
            nu: zip3(|_| Jet1::zeros(0)),
            rho,
        };
        curve.f = curve.along3(&local.f);
        curve.nu = curve.along3(&local.nu);

        // null field N = (−⟨f_v, w⟩, ⟨f_u, w⟩) with w the dominant of f_u, f_v
        let w = if la >= lb { a } else { b };
        let wj: Vec3<Jet2> = zip3(|k| Jet2::constant(p, local.order(), w[k]));
        let nx = -local.amb.inner(&local.fv, &wj);
        let ny = local.amb.inner(&local.fu, &wj);
        let (nx, ny) = (curve.along(&nx), curve.along(&ny));
        let len = (nx.clone() * nx.clone() + ny.clone() * ny.clone()).sqrt();
        let inv = len.recip();
        let mut ncurve = [nx * inv.clone(), ny * inv];
        let raw = [ncurve[0].value(), ncurve[1].value()];
        let eta = orient_null(raw, tangent);
        if eta[0] * raw[0] + eta[1] * raw[1] < 0.0 {
            ncurve = [-ncurve[0].clone(), -ncurve[1].clone()];
        }
        let eta_field = [
            Jet2::lift_from(p, axis, &ncurve[0]),
            Jet2::lift_from(p, axis, &ncurve[1]),
        ];

        // D(s) = det(γ', η)/|γ'|; η is unit already
        let vel = curve.velocity();
        let speed = (vel[0].clone() * vel[0].clone() + vel[1].clone() * vel[1].clone()).sqrt();
        let nc = [ncurve[0].truncate(vel[0].order()), ncurve[1].truncate(vel[0].order())];
        let det = vel[0].clone() * nc[1].clone() - vel[1].clone() * nc[0].clone();
        let dfun = det * speed.recip();
        let kind_measure = dfun.value();
        let transversality = if dfun.order() >= 1 { rho * dfun.coeff(1) / speed.value() } else { f64::NAN };
        let kind = if kind_measure.abs() < KIND_TOL { Kind::Second } else { Kind::First };

        let amb_curve = chart.at(&curve.f, true)?;
        Ok(SingularPoint {
            p,
            local,
            curve,
            null_curve: ncurve,
            eta_field,
            eta,
            tangent,
            lambda_grad: grad,
            kind,
            kind_measure,
            transversality,
            amb_curve,
        })
    }

    pub fn nu_value(&self) -> [f64; 3] {
        self.local.nu_value()
    }

    /// Sign of dλ(η): +1 at the first kind by the orientation convention.
    pub fn sign_dlambda_eta(&self) -> f64 {
        match self.kind {
            Kind::First => (self.lambda_grad[0] * self.eta[0] + self.lambda_grad[1] * self.eta[1]).signum(),
            Kind::Second => 0.0,
        }
    }

    /// Conversion factor d/dt = chain · d/ds to arclength of f∘γ in the
    /// canonical direction; infinite at the second kind.
    pub fn arclength_chain(&self) -> f64 {
        let g1: [f64; 3] = zip3(|k| self.curve.f[k].coeff(1));
        self.curve.rho / self.local.norm_at(g1)
    }
}

#[cfg(test)]
mod tests;
