//! Orthogonal slices through cuspidal edges.
//!
//! The plane through f(p) orthogonal to the singular curve's image cuts the
//! surface in a planar 3/2-cusp whose cuspidal curvature equals κ_c(p).
//! Everything is computed on jets in the linear coordinates
//! q = p + a·t + b·η, with t the canonical tangent and η the null vector.

use serde::Serialize;

use crate::ambient::{self, Vec3};
use crate::error::{GeometryError, Result};
use crate::expr::evaluate_jet;
use crate::frontal::{solve_graph, FrontalSurface, Kind, Orientation, SingularPoint};
use crate::invariants;
use crate::jet::{Axis, Jet1, Jet2, Scalar};
use crate::spec::SurfaceSpec;

/// Relative size of det(f_t, f_ηη, f_tη) above which the map is a cross cap.
const WHITNEY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct SliceCurve {
    pub point: [f64; 2],
    /// Parameter-plane directions of the a and b coordinates.
    pub tangent: [f64; 2],
    pub null: [f64; 2],
    /// Unit normal of the slicing plane, along the image of the singular curve.
    pub normal: [f64; 3],
    /// Orthonormal basis of the plane: unit f_bb⊥ and unit f_a × f_bb.
    pub basis: [[f64; 3]; 2],
    /// a as a function of b on the slice.
    #[serde(skip)]
    pub graph: Jet1,
    /// f(a(b), b) − f(p) in ambient coordinates.
    #[serde(skip)]
    pub space: [Jet1; 3],
    /// The same curve in plane coordinates.
    #[serde(skip)]
    pub sigma: [Jet1; 2],
    /// f_a and f_bb, f_bbb at p in ambient coordinates.
    pub f_a: [f64; 3],
    pub f_bb: [f64; 3],
    pub f_bbb: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SliceCheck {
    pub point: [f64; 2],
    pub kappa_c_surface: f64,
    pub tau_slice: f64,
    pub rel_diff: f64,
}

/// f in the coordinates (a, b) around p.
fn linear_jets(surface: &FrontalSurface, p: [f64; 2], t: [f64; 2], e: [f64; 2], order: usize) -> Result<Vec3<Jet2>> {
    Ok(compose_linear(&surface.map_jet(p, order)?, t, e))
}

fn partial_value(f: &Vec3<Jet2>, i: usize, j: usize) -> [f64; 3] {
    std::array::from_fn(|k| f[k].partial_value(i, j))
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = ambient::dot(&v, &v).sqrt();
    v.map(|x| x / n)
}

/// Reject maps that are cross caps at p: there the image is not a frontal
/// and no cusp appears in the slice.
pub fn whitney_guard(surface: &FrontalSurface, p: [f64; 2]) -> Result<()> {
    whitney_check(&surface.map_jet(p, 2)?, p)
}

/// The same test straight from a spec. Cross caps admit no unit normal, so
/// they never resolve as a frontal surface and must be caught here.
pub fn whitney_guard_spec(spec: &SurfaceSpec, p: [f64; 2]) -> Result<()> {
    let f: Vec3<Jet2> = [
        evaluate_jet(&spec.f[0], p, 2, &spec.params, 4)?,
        evaluate_jet(&spec.f[1], p, 2, &spec.params, 4)?,
        evaluate_jet(&spec.f[2], p, 2, &spec.params, 4)?,
    ];
    whitney_check(&f, p)
}

fn compose_linear(f: &Vec3<Jet2>, t: [f64; 2], e: [f64; 2]) -> Vec3<Jet2> {
    let order = f[0].order();
    let a = Jet2::variable([0.0, 0.0], order, Axis::U);
    let b = Jet2::variable([0.0, 0.0], order, Axis::V);
    let du = a.scale(t[0]) + b.scale(e[0]);
    let dv = a.scale(t[1]) + b.scale(e[1]);
    std::array::from_fn(|k| f[k].compose(&du, &dv))
}

fn whitney_check(f: &Vec3<Jet2>, p: [f64; 2]) -> Result<()> {
    let fu = partial_value(f, 1, 0);
    let fv = partial_value(f, 0, 1);
    // null direction of df: smallest eigenvector of the Gram matrix
    let (g11, g12, g22) = (ambient::dot(&fu, &fu), ambient::dot(&fu, &fv), ambient::dot(&fv, &fv));
    let tr = g11 + g22;
    let disc = ((g11 - g22).powi(2) + 4.0 * g12 * g12).sqrt();
    let small = 0.5 * (tr - disc);
    if small > 1e-12 * tr.max(1.0) {
        return Err(GeometryError::NotSingular { point: p, lambda: small.sqrt() });
    }
    let e = if (g11 - small).abs() >= (g22 - small).abs() { [-g12, g11 - small] } else { [g22 - small, -g12] };
    let n = e[0].hypot(e[1]);
    if n == 0.0 {
        return Err(GeometryError::RankZero { point: p });
    }
    let e = [e[0] / n, e[1] / n];
    let lin = compose_linear(f, [e[1], -e[0]], e);
    let (ft, fee, fte) = (partial_value(&lin, 1, 0), partial_value(&lin, 0, 2), partial_value(&lin, 1, 1));
    let det = ambient::det_columns(&ft, &fee, &fte);
    let norm = |x: &[f64; 3]| ambient::dot(x, x).sqrt();
    let scale = norm(&ft) * norm(&fee).max(1.0) * norm(&fte).max(1.0);
    if det.abs() > WHITNEY_TOL * scale {
        return Err(GeometryError::Inapplicable(format!(
            "cross cap at {p:?}: det(f_t, f_ηη, f_tη) = {det:.3e} is nonzero, so the map is not a frontal there"
        )));
    }
    Ok(())
}

/// Slice the surface at the first-kind point p by the plane orthogonal to
/// the image of the singular curve.
pub fn orthogonal_slice(surface: &FrontalSurface, p: [f64; 2], order: usize) -> Result<SliceCurve> {
    if !surface.chart().is_euclidean() {
        return Err(GeometryError::NonEuclidean("orthogonal slices"));
    }
    whitney_guard(surface, p)?;
    let sp = surface.singular_point(p, Orientation::Canonical)?;
    slice_at(surface, &sp, order)
}

fn slice_at(surface: &FrontalSurface, sp: &SingularPoint, order: usize) -> Result<SliceCurve> {
    if sp.kind != Kind::First {
        return Err(GeometryError::Inapplicable("orthogonal slices need a singular point of the first kind".into()));
    }
    let order = order.max(3);
    let (t, e) = (sp.tangent, sp.eta);
    let f = linear_jets(surface, sp.p, t, e, order)?;
    let f_a = partial_value(&f, 1, 0);
    let faa = ambient::dot(&f_a, &f_a);
    if faa <= 1e-24 {
        return Err(GeometryError::Degenerate { point: sp.p });
    }

    // ⟨f(a, b) − f(p), f_a(p)⟩ = 0 defines a(b)
    let g = f[0].scale(f_a[0]) + f[1].scale(f_a[1]) + f[2].scale(f_a[2]);
    let graph = solve_graph(&g, Axis::U)?;
    let s = Jet1::variable(graph.order(), 0.0);
    let space: [Jet1; 3] = std::array::from_fn(|k| {
        let c = f[k].compose_curve(&graph, &s);
        let v = c.value();
        c.shift(-v)
    });

    let (f_bb, f_bbb) = (partial_value(&f, 0, 2), partial_value(&f, 0, 3));
    let normal = unit(f_a);
    let perp = ambient::sub(&f_bb, &ambient::scale(&normal, ambient::dot(&f_bb, &normal)));
    let e2 = ambient::cross(&f_a, &f_bb);
    if ambient::dot(&perp, &perp) <= 1e-24 || ambient::dot(&e2, &e2) <= 1e-24 {
        return Err(GeometryError::Degenerate { point: sp.p });
    }
    let basis = [unit(perp), unit(e2)];
    let sigma = basis.map(|b| space[0].scale(b[0]) + space[1].scale(b[1]) + space[2].scale(b[2]));
    Ok(SliceCurve { point: sp.p, tangent: t, null: e, normal, basis, graph, space, sigma, f_a, f_bb, f_bbb })
}

/// Compare κ_c(p) with the cuspidal curvature of the slice.
pub fn slice_cusp_check(surface: &FrontalSurface, p: [f64; 2]) -> Result<SliceCheck> {
    if !surface.chart().is_euclidean() {
        return Err(GeometryError::NonEuclidean("orthogonal slices"));
    }
    whitney_guard(surface, p)?;
    let sp = surface.singular_point(p, Orientation::Canonical)?;
    if sp.kind != Kind::First {
        return Err(GeometryError::Inapplicable("orthogonal slices need a singular point of the first kind".into()));
    }
    let kc = invariants::kappa_c_jet(&sp)?.value();
    let slice = slice_at(surface, &sp, surface.order())?;
    let scale = slice.f_bb.iter().chain(&slice.f_bbb).fold(1.0_f64, |m, x| m.max(x.abs()));
    if kc.abs() < 1e-8 * scale {
        return Err(GeometryError::Inapplicable(format!(
            "κ_c vanishes at {p:?}, so the slice is not a 3/2-cusp and the comparison is undefined"
        )));
    }
    let tau = invariants::planar_cusp_curvature(&slice.sigma)?;
    let rel_diff = (kc - tau).abs() / kc.abs().max(tau.abs());
    Ok(SliceCheck { point: p, kappa_c_surface: kc, tau_slice: tau, rel_diff })
}

/// Points of the slice curve for plotting: for each b in [−half, half] the
/// plane coordinates of f(a, b) with a found by Newton's method.
pub fn slice_polyline(surface: &FrontalSurface, p: [f64; 2], half: f64, n: usize) -> Result<Vec<[f64; 3]>> {
    let slice = orthogonal_slice(surface, p, 3)?;
    let f0 = surface.map_value(p)?;
    let (t, e) = (slice.tangent, slice.null);
    let n = n.max(2);
    let mut a = 0.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let b = -half + 2.0 * half * i as f64 / (n - 1) as f64;
        // start from the jet prediction, then polish on the exact map
        let mut guess = slice.graph.eval(b);
        if !guess.is_finite() {
            guess = a;
        }
        a = guess;
        let at = |a: f64| [p[0] + a * t[0] + b * e[0], p[1] + a * t[1] + b * e[1]];
        for _ in 0..30 {
            let q = at(a);
            let j = surface.map_jet(q, 1)?;
            let x: [f64; 3] = std::array::from_fn(|k| j[k].value() - f0[k]);
            let d: [f64; 3] = std::array::from_fn(|k| {
                let g = j[k].gradient();
                g[0] * t[0] + g[1] * t[1]
            });
            let gval = ambient::dot(&x, &slice.f_a);
            let gder = ambient::dot(&d, &slice.f_a);
            if gder.abs() < 1e-300 {
                break;
            }
            let step = gval / gder;
            a -= step;
            if step.abs() < 1e-14 * (1.0 + a.abs()) {
                break;
            }
        }
        let x = surface.map_value(at(a))?;
        let d: [f64; 3] = std::array::from_fn(|k| x[k] - f0[k]);
        out.push([b, ambient::dot(&d, &slice.basis[0]), ambient::dot(&d, &slice.basis[1])]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn surface(name: &str) -> FrontalSurface {
        FrontalSurface::resolve(&catalog::get(name).unwrap().spec()).unwrap()
    }

    #[test]
    fn standard_cuspidal_edge() {
        let s = surface("cuspidal_edge");
        let sl = orthogonal_slice(&s, [0.0, 0.0], 5).unwrap();
        assert!(sl.graph.max_abs() < 1e-14);
        // σ(t) = (t², ±t³) in the plane basis
        assert_abs_diff_eq!(sl.sigma[0].coeff(2), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sl.sigma[1].coeff(3).abs(), 1.0, epsilon = 1e-12);
        let c = slice_cusp_check(&s, [0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(c.kappa_c_surface, 3.0 * FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(c.tau_slice, 3.0 * FRAC_1_SQRT_2, epsilon = 1e-12);
        assert!(c.rel_diff < 1e-9);
    }

    #[test]
    fn swallowtail_edge_point() {
        let c = slice_cusp_check(&surface("sw2"), [0.1, 0.0]).unwrap();
        assert!(c.rel_diff < 1e-6, "{c:?}");
    }

    #[test]
    fn graph_starts_flat_with_the_implicit_second_derivative() {
        let s = surface("cuspidal_cross_cap");
        let sl = orthogonal_slice(&s, [0.1, 0.0], 5).unwrap();
        assert_abs_diff_eq!(sl.graph.coeff(1), 0.0, epsilon = 1e-13);
        let faa = ambient::dot(&sl.f_a, &sl.f_a);
        let expect = -ambient::dot(&sl.f_a, &sl.f_bb) / faa;
        assert_abs_diff_eq!(sl.graph.derivative_value(2), expect, epsilon = 1e-10);
        assert!(slice_cusp_check(&s, [0.1, 0.0]).unwrap().rel_diff < 1e-6);
    }

    #[test]
    fn numerator_and_denominator_identities() {
        for (name, p) in [("cuspidal_cross_cap", [0.1, 0.0]), ("sw2", [0.2, 0.0]), ("developable", [0.3, 0.0])] {
            let sl = orthogonal_slice(&surface(name), p, 5).unwrap();
            let d = |k| -> [f64; 3] { std::array::from_fn(|i| sl.space[i].derivative_value(k)) };
            let (s1, s2, s3) = (d(1), d(2), d(3));
            assert!(ambient::dot(&s1, &s1).sqrt() < 1e-12, "{name}");
            let lhs = ambient::det_columns(&sl.f_a, &s2, &s3);
            let rhs = ambient::det_columns(&sl.f_a, &sl.f_bb, &sl.f_bbb);
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0), "{name}: {lhs} vs {rhs}");
            let c = ambient::cross(&sl.f_a, &sl.f_bb);
            let bunbo = ambient::dot(&c, &c) / ambient::dot(&sl.f_a, &sl.f_a);
            assert!((ambient::dot(&s2, &s2) - bunbo).abs() <= 1e-9 * bunbo, "{name}");
        }
    }

    #[test]
    fn cuspidal_cross_cap_origin_is_rejected() {
        let e = slice_cusp_check(&surface("cuspidal_cross_cap"), [0.0, 0.0]).unwrap_err();
        assert!(matches!(e, GeometryError::Inapplicable(_)), "{e}");
    }

    #[test]
    fn whitney_cross_cap_is_rejected() {
        let spec = SurfaceSpec::from_map(["u", "v^2", "u*v"]).unwrap();
        let e = whitney_guard_spec(&spec, [0.0, 0.0]).unwrap_err();
        assert!(e.to_string().contains("cross cap"), "{e}");
        assert!(FrontalSurface::resolve(&spec).is_err());
        let edge = catalog::get("cuspidal_edge").unwrap().spec();
        assert!(whitney_guard_spec(&edge, [0.0, 0.0]).is_ok());
        assert!(whitney_guard(&surface("cuspidal_edge"), [0.2, 0.0]).is_ok());
    }

    #[test]
    fn non_euclidean_chart_is_refused() {
        let mut spec = catalog::get("cuspidal_edge").unwrap().spec();
        spec.chart = crate::ambient::AmbientChart::sphere();
        let s = FrontalSurface::resolve(&spec).unwrap();
        assert!(matches!(slice_cusp_check(&s, [0.0, 0.0]), Err(GeometryError::NonEuclidean(_))));
    }

    #[test]
    fn polyline_follows_the_cusp() {
        let pts = slice_polyline(&surface("cuspidal_edge"), [0.0, 0.0], 0.3, 31).unwrap();
        for [b, x, y] in pts {
            assert_abs_diff_eq!(x, b * b, epsilon = 1e-12);
            assert_abs_diff_eq!(y.abs(), (b * b * b).abs(), epsilon = 1e-12);
        }
    }
}
