//! Recognition of cuspidal edges, swallowtails and cuspidal cross caps.
//!
//! The decision tree is: non-degeneracy, then the kind of the point, then
//! the front test ∇_η ν ≠ 0, then either the ψ_ccr test (first kind) or
//! the transversality of det(γ', η) (second kind).

use serde::Serialize;

use crate::ambient;
use crate::error::{GeometryError, Result};
use crate::frontal::{FrontalSurface, Kind, Orientation, SingularPoint};
use crate::invariants;
use crate::jet::{Jet1, Scalar};

/// Relative threshold for "zero" in the decision tree.
pub const ZERO_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Regular,
    CuspidalEdge,
    Swallowtail,
    CuspidalCrossCap,
    FirstKindNonFrontDegenerate,
    SecondKindFrontNonSwallowtail,
    SecondKindNonFront,
    DegenerateSingular,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Regular => "regular",
            Label::CuspidalEdge => "cuspidal_edge",
            Label::Swallowtail => "swallowtail",
            Label::CuspidalCrossCap => "cuspidal_cross_cap",
            Label::FirstKindNonFrontDegenerate => "first_kind_non_front_degenerate",
            Label::SecondKindFrontNonSwallowtail => "second_kind_front_non_swallowtail",
            Label::SecondKindNonFront => "second_kind_non_front",
            Label::DegenerateSingular => "degenerate_singular",
        }
    }

    pub fn is_front(self) -> bool {
        matches!(self, Label::CuspidalEdge | Label::Swallowtail | Label::SecondKindFrontNonSwallowtail)
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Raw values behind a classification.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Evidence {
    pub lambda: f64,
    pub lambda_grad: [f64; 2],
    pub kind: Option<Kind>,
    pub is_front: Option<bool>,
    /// |∇_η ν| at the point.
    pub nu_eta: Option<f64>,
    pub psi_ccr: Option<f64>,
    pub d_psi_ccr: Option<f64>,
    pub transversality: Option<f64>,
    /// Reason for a degenerate verdict.
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub point: [f64; 2],
    pub label: Label,
    pub evidence: Evidence,
}

/// |∇_η ν(p)| and the scale max(1, |ν_u|, |ν_v|) it is compared against.
pub fn nu_eta_norm(sp: &SingularPoint) -> (f64, f64) {
    let l = &sp.local;
    let nu_u = ambient::values(&l.nu_u);
    let nu_v = ambient::values(&l.nu_v);
    let e = sp.eta;
    let d: [f64; 3] = std::array::from_fn(|k| e[0] * nu_u[k] + e[1] * nu_v[k]);
    let scale = l.norm_at(nu_u).max(l.norm_at(nu_v)).max(1.0);
    (l.norm_at(d), scale)
}

pub fn is_front(sp: &SingularPoint) -> bool {
    let (n, scale) = nu_eta_norm(sp);
    n > ZERO_TOL * scale
}

/// Front test at a rank-one singular point.
pub fn is_front_at(surface: &FrontalSurface, p: [f64; 2]) -> Result<bool> {
    Ok(is_front(&surface.singular_point(p, Orientation::Canonical)?))
}

/// ψ_ccr along the singular curve through `p`, as a jet of the given order
/// in the graph parameter.
pub fn psi_ccr_jet(surface: &FrontalSurface, p: [f64; 2], order: usize) -> Result<Jet1> {
    let sp = surface.singular_point_at_order(p, order + crate::frontal::ORDER_SLACK + 1, Orientation::Canonical)?;
    Ok(invariants::psi_ccr_jet(&sp)?.truncate(order))
}

/// Classify a point that already resolved as singular.
pub fn classify_singular(sp: &SingularPoint) -> Classification {
    let (nu_eta, scale) = nu_eta_norm(sp);
    let front = nu_eta > ZERO_TOL * scale;
    let mut ev = Evidence {
        lambda: sp.local.lambda.value(),
        lambda_grad: sp.lambda_grad,
        kind: Some(sp.kind),
        is_front: Some(front),
        nu_eta: Some(nu_eta),
        ..Default::default()
    };
    let label = match sp.kind {
        Kind::First => {
            let psi = invariants::psi_ccr_jet(sp).ok();
            let (v, d) = match &psi {
                Some(j) => (j.value(), j.coeff(1) * sp.arclength_chain()),
                None => (f64::NAN, f64::NAN),
            };
            ev.psi_ccr = Some(v);
            ev.d_psi_ccr = Some(d);
            if front {
                Label::CuspidalEdge
            } else if d.abs() > ZERO_TOL * scale {
                Label::CuspidalCrossCap
            } else {
                Label::FirstKindNonFrontDegenerate
            }
        }
        Kind::Second => {
            ev.transversality = Some(sp.transversality);
            if !front {
                Label::SecondKindNonFront
            } else if sp.transversality.abs() > ZERO_TOL {
                Label::Swallowtail
            } else {
                Label::SecondKindFrontNonSwallowtail
            }
        }
    };
    Classification { point: sp.p, label, evidence: ev }
}

/// Classify the point `p` with the normal sign given by `orient`.
pub fn classify_with(surface: &FrontalSurface, p: [f64; 2], orient: Orientation) -> Result<Classification> {
    match surface.singular_point(p, orient) {
        Ok(sp) => Ok(classify_singular(&sp)),
        Err(GeometryError::NotSingular { lambda, .. }) => {
            let l = surface.local(p, 2, orient)?;
            let ev = Evidence { lambda, lambda_grad: l.lambda_grad(), ..Default::default() };
            Ok(Classification { point: p, label: Label::Regular, evidence: ev })
        }
        Err(e) if e.is_degenerate() => {
            let ev = Evidence { note: Some(e.to_string()), ..Default::default() };
            Ok(Classification { point: p, label: Label::DegenerateSingular, evidence: ev })
        }
        Err(e) => Err(e),
    }
}

pub fn classify_point(surface: &FrontalSurface, p: [f64; 2]) -> Result<Classification> {
    classify_with(surface, p, Orientation::Canonical)
}
