//! Curvature invariants along singular curves.
//!
//! Everything is computed as a jet in the graph parameter s of the singular
//! curve and then converted to arclength of f∘γ where the definition asks
//! for it. The canonical direction (det(γ', ∇λ) > 0) is used throughout, so
//! sgn dλ(η) = +1 at points of the first kind.

use serde::Serialize;

use crate::ambient::{self, Vec3};
use crate::error::{GeometryError, Result};
use crate::frontal::{combine, FrontalSurface, Kind, LocalJets, Orientation, SingularPoint, SingularSample};
use crate::jet::{Axis, Jet1, Jet2, Scalar, CANCELLATION_TOL};
use crate::par::{self, Execution};

fn v3<T>(f: impl FnMut(usize) -> T) -> [T; 3] {
    std::array::from_fn(f)
}

fn lin(e: &[Jet1; 2], a: &Vec3<Jet1>, b: &Vec3<Jet1>) -> Vec3<Jet1> {
    v3(|k| e[0].clone() * a[k].clone() + e[1].clone() * b[k].clone())
}

fn deriv(x: &Vec3<Jet1>) -> Vec3<Jet1> {
    v3(|k| x[k].derivative())
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn unit2(a: [f64; 2]) -> [f64; 2] {
    let n = a[0].hypot(a[1]);
    [a[0] / n, a[1] / n]
}

fn first_kind_only(sp: &SingularPoint, what: &str) -> Result<()> {
    match sp.kind {
        Kind::First => Ok(()),
        Kind::Second => Err(GeometryError::Inapplicable(format!("{what} needs a singular point of the first kind"))),
    }
}

fn second_kind_only(sp: &SingularPoint, what: &str) -> Result<()> {
    match sp.kind {
        Kind::Second => Ok(()),
        Kind::First => Err(GeometryError::Inapplicable(format!("{what} needs a singular point of the second kind"))),
    }
}

/// Covariant derivatives of f∘γ in the graph parameter: γ̂', ∇γ̂', ∇∇γ̂'.
pub fn curve_derivatives(sp: &SingularPoint) -> [Vec3<Jet1>; 3] {
    let amb = &sp.amb_curve;
    let g1 = deriv(&sp.curve.f);
    let cov = |x: &Vec3<Jet1>| {
        let flat = deriv(x);
        match amb.gamma_apply(&g1, x) {
            None => flat,
            Some(g) => ambient::add(&flat, &g),
        }
    };
    let g2 = cov(&g1);
    let g3 = cov(&g2);
    [g1, g2, g3]
}

/// Covariant Hessian of f along the curve on direction fields a, b.
fn hessian_along(sp: &SingularPoint, a: &[Jet1; 2], b: &[Jet1; 2]) -> Vec3<Jet1> {
    let c = &sp.curve;
    let (huu, huv, hvv) = (c.along3(&sp.local.fuu), c.along3(&sp.local.fuv), c.along3(&sp.local.fvv));
    v3(|k| {
        a[0].clone() * b[0].clone() * huu[k].clone()
            + (a[0].clone() * b[1].clone() + a[1].clone() * b[0].clone()) * huv[k].clone()
            + a[1].clone() * b[1].clone() * hvv[k].clone()
    })
}

/// Singular curvature along the curve (first kind only).
pub fn kappa_s_jet(sp: &SingularPoint) -> Result<Jet1> {
    first_kind_only(sp, "singular curvature")?;
    let amb = &sp.amb_curve;
    let [g1, g2, _] = curve_derivatives(sp);
    let speed = amb.norm(&g1);
    Ok((amb.det(&g1, &g2, &sp.curve.nu) / speed.powi(3)).scale(sp.curve.rho))
}

/// Limiting normal curvature ⟨H(e, e), ν⟩/|f_e|² for a direction e
/// transversal to the null field. Defined at both kinds.
pub fn kappa_nu_jet(sp: &SingularPoint) -> Jet1 {
    let n = &sp.null_curve;
    let e = [-n[1].clone(), n[0].clone()];
    let c = &sp.curve;
    let fe = lin(&e, &c.along3(&sp.local.fu), &c.along3(&sp.local.fv));
    let h = hessian_along(sp, &e, &e);
    let amb = &sp.amb_curve;
    amb.inner(&h, &c.nu) / amb.inner(&fe, &fe)
}

/// Cuspidal curvature along the curve (first kind only).
pub fn kappa_c_jet(sp: &SingularPoint) -> Result<Jet1> {
    first_kind_only(sp, "cuspidal curvature")?;
    let l = &sp.local;
    let e = &sp.eta_field;
    let fe = combine(e, &l.fu, &l.fv);
    let fee = l.cov(e, &fe);
    let feee = l.cov(e, &fee);
    let c = &sp.curve;
    let (a, b) = (c.along3(&fee), c.along3(&feee));
    let amb = &sp.amb_curve;
    let g1 = deriv(&c.f);
    let num = amb.norm(&g1).powf(1.5) * amb.det(&g1, &a, &b);
    let den = amb.norm2(&amb.cross(&g1, &a)).powf(1.25);
    Ok((num / den).scale(c.rho))
}

/// det_g(γ̂'/|γ̂'|, ν, ∇_η ν) along the curve (first kind only).
pub fn psi_ccr_jet(sp: &SingularPoint) -> Result<Jet1> {
    first_kind_only(sp, "cuspidal cross roof test")?;
    let c = &sp.curve;
    let amb = &sp.amb_curve;
    let g1 = deriv(&c.f);
    let nu_eta = lin(&sp.null_curve, &c.along3(&sp.local.nu_u), &c.along3(&sp.local.nu_v));
    let speed = amb.norm(&g1);
    Ok((amb.det(&g1, &c.nu, &nu_eta) / speed).scale(c.rho))
}

/// Jets of λH and λK_ext, both smooth across the singular set.
pub fn shape_jets(l: &LocalJets) -> Result<(Jet2, Jet2)> {
    let amb = &l.amb;
    let size = |vs: &[&Vec3<Jet2>]| vs.iter().flat_map(|v| v.iter()).map(Jet2::max_abs).fold(0.0, f64::max);
    // both numerators can cancel identically; residue is judged against the inputs
    let (fs, hs) = (size(&[&l.fu, &l.fv]), size(&[&l.fuu, &l.fuv, &l.fvv]));
    let g11 = amb.inner(&l.fu, &l.fu);
    let g12 = amb.inner(&l.fu, &l.fv);
    let g22 = amb.inner(&l.fv, &l.fv);
    let h11 = amb.inner(&l.fuu, &l.nu).chop(CANCELLATION_TOL * hs);
    let h12 = amb.inner(&l.fuv, &l.nu).chop(CANCELLATION_TOL * hs);
    let h22 = amb.inner(&l.fvv, &l.nu).chop(CANCELLATION_TOL * hs);
    let nh = (g11 * h22.clone() - (g12 * h12.clone()).scale(2.0) + g22 * h11.clone()).chop(CANCELLATION_TOL * fs * fs * hs);
    let nk = (h11 * h22 - h12.clone() * h12).chop(CANCELLATION_TOL * hs * hs);
    // det(g_ij) = λ², so H = N_H/(2λ²) and K_ext = N_K/λ²
    let lh = nh.div_vanishing(&l.lambda)?.scale(0.5);
    let lk = nk.div_vanishing(&l.lambda)?;
    Ok((lh, lk))
}

/// Mean and Gaussian curvature at a regular point, with the ambient
/// sectional curvature of the tangent plane added to K.
pub fn regular_curvatures(surface: &FrontalSurface, q: [f64; 2], nu_ref: [f64; 3]) -> Result<(f64, f64)> {
    let l = surface.local(q, 2, Orientation::Reference(nu_ref))?;
    let amb = &l.amb;
    let g11 = amb.inner(&l.fu, &l.fu).value();
    let g12 = amb.inner(&l.fu, &l.fv).value();
    let g22 = amb.inner(&l.fv, &l.fv).value();
    let h11 = amb.inner(&l.fuu, &l.nu).value();
    let h12 = amb.inner(&l.fuv, &l.nu).value();
    let h22 = amb.inner(&l.fvv, &l.nu).value();
    let det = g11 * g22 - g12 * g12;
    let h = (g11 * h22 - 2.0 * g12 * h12 + g22 * h11) / (2.0 * det);
    let mut k = (h11 * h22 - h12 * h12) / det;
    if !surface.chart().is_euclidean() {
        let x = ambient::values(&l.f);
        k += surface.chart().sectional_curvature(x, ambient::values(&l.fu), ambient::values(&l.fv))?;
    }
    Ok((h, k))
}

/// Normalised mean and Gaussian curvature Ĥ = vH, K̂ = vK at a singular
/// point, with v the transversal coordinate of an adapted system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Hats {
    pub hat_h: f64,
    pub hat_k: f64,
    /// dλ(∂_v) of the adapted transversal direction.
    pub dlambda_dv: f64,
    /// ∂_v in the parameter plane.
    pub dv: [f64; 2],
}

/// Hats with the first-kind normalisation: ∂_v = η/|f_ηη^⊥|^{1/2}.
pub fn hats_first(sp: &SingularPoint) -> Result<Hats> {
    first_kind_only(sp, "first-kind normalisation")?;
    let l = &sp.local;
    let (lh, lk) = shape_jets(l)?;
    let t = l.df(sp.tangent);
    let tn = l.norm_at(t);
    let fee = ambient::values(&l.hessian(sp.eta, sp.eta));
    let along = l.inner_at(fee, t) / (tn * tn);
    let perp: [f64; 3] = v3(|k| fee[k] - along * t[k]);
    let w = l.norm_at(perp).sqrt();
    let dv = [sp.eta[0] / w, sp.eta[1] / w];
    let dl = dot2(sp.lambda_grad, dv);
    Ok(Hats { hat_h: lh.value() / dl, hat_k: lk.value() / dl, dlambda_dv: dl, dv })
}

/// Hats with the second-kind normalisation: ∂_v along ∇λ with |f_v| = 1.
/// Also usable at first-kind points, where it gives the continuation of
/// the second-kind values along the curve.
pub fn hats_second(sp: &SingularPoint) -> Result<Hats> {
    let l = &sp.local;
    let (lh, lk) = shape_jets(l)?;
    let e2 = unit2(sp.lambda_grad);
    let fe = l.norm_at(l.df(e2));
    if !(fe > 0.0) {
        return Err(GeometryError::Degenerate { point: sp.p });
    }
    let dv = [e2[0] / fe, e2[1] / fe];
    let dl = dot2(sp.lambda_grad, dv);
    Ok(Hats { hat_h: lh.value() / dl, hat_k: lk.value() / dl, dlambda_dv: dl, dv })
}

/// 2Ĥ along the curve in the second-kind normalisation, as a jet in the
/// graph parameter.
pub fn two_hat_h_jet(sp: &SingularPoint) -> Result<Jet1> {
    let l = &sp.local;
    let c = &sp.curve;
    let (lh, _) = shape_jets(l)?;
    let lu = c.along(&l.lambda.partial(Axis::U));
    let lv = c.along(&l.lambda.partial(Axis::V));
    let grad = [lu, lv];
    let fg = lin(&grad, &c.along3(&l.fu), &c.along3(&l.fv));
    let g2 = grad[0].clone() * grad[0].clone() + grad[1].clone() * grad[1].clone();
    let amb = &sp.amb_curve;
    Ok((c.along(&lh) * amb.norm(&fg) / g2).scale(2.0))
}

fn gram_area2(l: &LocalJets, a: [f64; 3], b: [f64; 3]) -> f64 {
    let (aa, ab, bb) = (l.inner_at(a, a), l.inner_at(a, b), l.inner_at(b, b));
    aa * bb - ab * ab
}

/// κ_H at a singular point of the second kind, in linear coordinates with
/// ∂_u = η and ∂_v along ∇λ.
pub fn kappa_h(sp: &SingularPoint) -> Result<f64> {
    second_kind_only(sp, "κ_H")?;
    let l = &sp.local;
    let e2 = unit2(sp.lambda_grad);
    let mut e1 = sp.eta;
    if e1[0] * e2[1] - e1[1] * e2[0] < 0.0 {
        e1 = [-e1[0], -e1[1]];
    }
    let fv = l.df(e2);
    let fuv = ambient::values(&l.hessian(e1, e2));
    let nu_u: [f64; 3] = v3(|k| e1[0] * l.nu_u[k].value() + e1[1] * l.nu_v[k].value());
    let fvn = l.norm_at(fv);
    Ok(-fvn.powi(3) * l.inner_at(fuv, nu_u) / gram_area2(l, fuv, fv))
}

/// |det_g(γ̂'', γ̂''', ν)|/|γ̂''|^{5/2} at a point where γ̂' vanishes.
pub fn tau_s(sp: &SingularPoint) -> Result<f64> {
    second_kind_only(sp, "τ_s")?;
    let [_, g2, g3] = curve_derivatives(sp);
    let l = &sp.local;
    let a = ambient::values(&g2);
    let na = l.norm_at(a);
    if !(na > 1e-12) {
        return Err(GeometryError::Inapplicable("γ̂'' vanishes".into()));
    }
    let d = sp.amb_curve.det(&g2, &g3, &sp.curve.nu).value();
    Ok(d.abs() / na.powf(2.5))
}

/// Curvature of a planar cusp σ(s) with σ'(0) = 0: det(σ'', σ''')/|σ''|^{5/2}.
pub fn planar_cusp_curvature(sigma: &[Jet1; 2]) -> Result<f64> {
    if sigma[0].order() < 3 || sigma[1].order() < 3 {
        return Err(GeometryError::Inapplicable("cusp curvature needs a 3-jet".into()));
    }
    let d = |k| [sigma[0].derivative_value(k), sigma[1].derivative_value(k)];
    let (d1, d2, d3) = (d(1), d(2), d(3));
    let n2 = d2[0].hypot(d2[1]);
    let scale = n2.max(d3[0].hypot(d3[1])).max(1e-300);
    if d1[0].hypot(d1[1]) > 1e-9 * scale {
        return Err(GeometryError::Inapplicable("curve is regular at the base point".into()));
    }
    let det = d2[0] * d3[1] - d2[1] * d3[0];
    if n2 <= 1e-12 || det.abs() <= 1e-9 * scale * scale {
        return Err(GeometryError::Inapplicable("not an ordinary cusp".into()));
    }
    Ok(det / n2.powf(2.5))
}

/// Value and arclength derivative of an invariant.
fn with_derivative(j: &Jet1, chain: f64) -> (f64, f64) {
    let d = if j.order() >= 1 { chain * j.coeff(1) } else { f64::NAN };
    (j.value(), d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstKindInvariants {
    pub kappa_s: f64,
    pub kappa_nu: f64,
    pub kappa_c: f64,
    pub kappa_pi: f64,
    pub d_kappa_s: f64,
    pub d_kappa_nu: f64,
    pub d_kappa_c: f64,
    pub d_kappa_pi: f64,
    /// Geodesic curvature |γ̂''| of f∘γ in the ambient space.
    pub curvature: f64,
    pub psi_ccr: f64,
    pub d_psi_ccr: f64,
    pub hat_h: f64,
    pub hat_k: f64,
}

pub fn first_kind(sp: &SingularPoint) -> Result<FirstKindInvariants> {
    let chain = sp.arclength_chain();
    let ks = kappa_s_jet(sp)?;
    let kn = kappa_nu_jet(sp);
    let kc = kappa_c_jet(sp)?;
    let kp = kn.clone() * kc.clone();
    let psi = psi_ccr_jet(sp)?;
    let hats = hats_first(sp)?;

    let (kappa_s, d_kappa_s) = with_derivative(&ks, chain);
    let (kappa_nu, d_kappa_nu) = with_derivative(&kn, chain);
    let (kappa_c, d_kappa_c) = with_derivative(&kc, chain);
    let (kappa_pi, d_kappa_pi) = with_derivative(&kp, chain);
    let (psi_ccr, d_psi_ccr) = with_derivative(&psi, chain);
    Ok(FirstKindInvariants {
        kappa_s,
        kappa_nu,
        kappa_c,
        kappa_pi,
        d_kappa_s,
        d_kappa_nu,
        d_kappa_c,
        d_kappa_pi,
        curvature: curvature_arclength(sp),
        psi_ccr,
        d_psi_ccr,
        hat_h: hats.hat_h,
        hat_k: hats.hat_k,
    })
}

/// |γ̂''| for the arclength parametrisation of f∘γ.
pub fn curvature_arclength(sp: &SingularPoint) -> f64 {
    let [g1, g2, _] = curve_derivatives(sp);
    let l = &sp.local;
    let (a, b) = (ambient::values(&g1), ambient::values(&g2));
    let n1 = l.norm_at(a);
    gram_area2(l, a, b).max(0.0).sqrt() / n1.powi(3)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecondKindInvariants {
    pub kappa_nu: f64,
    pub kappa_h: f64,
    /// d(2Ĥ)/d(parameter) along the curve.
    pub d_kappa_h: f64,
    /// dκ_ν/d(parameter); the coefficient of the covector ω_ν.
    pub d_kappa_nu: f64,
    /// The parameter coordinate of the singular curve (u or v).
    pub parameter: Axis,
    pub hat_h: f64,
    pub hat_k: f64,
    pub tau_s: Option<f64>,
    pub tau_c: Option<f64>,
}

/// Derivatives with respect to the graph coordinate, taken in its
/// increasing direction.
fn graph_slope(j: &Jet1) -> f64 {
    if j.order() >= 1 {
        j.coeff(1)
    } else {
        f64::NAN
    }
}

pub fn second_kind(sp: &SingularPoint) -> Result<SecondKindInvariants> {
    second_kind_only(sp, "second-kind invariants")?;
    let kn = kappa_nu_jet(sp);
    let kh = kappa_h(sp)?;
    let two_h = two_hat_h_jet(sp)?;
    let hats = hats_second(sp)?;
    let ts = tau_s(sp).ok();
    Ok(SecondKindInvariants {
        kappa_nu: kn.value(),
        kappa_h: kh,
        d_kappa_h: graph_slope(&two_h),
        d_kappa_nu: graph_slope(&kn),
        parameter: sp.curve.axis,
        hat_h: hats.hat_h,
        hat_k: hats.hat_k,
        tau_s: ts,
        tau_c: ts.map(|t| t.sqrt() * kh.abs()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    #[serde(flatten)]
    pub inv: FirstKindInvariants,
}

/// First-kind invariants at every sample of a trace. Each sample is
/// re-expanded with its traced normal as the sign reference.
pub fn first_kind_profile(
    surface: &FrontalSurface,
    samples: &[SingularSample],
    exec: Execution,
) -> Result<Vec<ProfileRow>> {
    if let Some(s) = samples.iter().find(|s| s.kind == Kind::Second) {
        return Err(GeometryError::Inapplicable(format!(
            "sample at ({:.6}, {:.6}) is of the second kind",
            s.p[0], s.p[1]
        )));
    }
    par::map(exec, samples, |s| {
        let sp = surface.singular_point(s.p, Orientation::Reference(s.nu))?;
        let inv = first_kind(&sp)?;
        Ok(ProfileRow { t: s.t, u: s.p[0], v: s.p[1], inv })
    })
    .into_iter()
    .collect()
}
