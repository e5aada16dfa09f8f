//! Boundedness, rational boundedness and rational continuity of K and H.
//!
//! Verdicts come from invariant predicates wherever a theorem covers the
//! point. A polar blow-up sampler serves as cross-check and as the only
//! method at second-kind points of non-fronts.

use serde::Serialize;

use crate::ambient;
use crate::classify::{Classification, Label};
use crate::error::{GeometryError, Result};
use crate::frontal::{FrontalSurface, Kind, Orientation, SingularPoint, SingularSample};
use crate::invariants::{self, Hats};
use crate::jet::{Jet1, Scalar};
use crate::par::{self, Execution};

/// Default absolute threshold for an invariant to count as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CurvatureVerdict {
    pub bounded_near: bool,
    pub rationally_bounded: bool,
    pub rationally_continuous: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Theorem,
    Empirical,
}

/// Invariant values a verdict was decided on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Witnesses {
    pub kappa_pi: Option<f64>,
    pub d_kappa_pi: Option<f64>,
    pub kappa_c: Option<f64>,
    pub d_kappa_c: Option<f64>,
    pub kappa_nu: Option<f64>,
    pub omega_nu: Option<f64>,
    pub kappa_h: Option<f64>,
    pub d_kappa_h: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessVerdict {
    #[serde(rename = "K")]
    pub k: CurvatureVerdict,
    #[serde(rename = "H")]
    pub h: CurvatureVerdict,
    pub method: Method,
    pub witnesses: Witnesses,
    pub note: Option<String>,
}

fn zero(x: f64, tol: f64) -> bool {
    x.abs() <= tol
}

/// The first two Taylor coefficients past the constant also vanish, so the
/// invariant vanishes to second order along the curve.
fn jet_flat(j: &Jet1, tol: f64) -> bool {
    (0..=j.order().min(2)).all(|k| j.coeff(k).abs() <= tol)
}

fn verdict(rb: bool, rc: bool, bn: bool) -> CurvatureVerdict {
    CurvatureVerdict { bounded_near: bn && rb, rationally_bounded: rb, rationally_continuous: rc && rb }
}

/// Decide boundedness at a classified singular point. `arc` holds traced
/// samples of the singular curve near the point; "bounded near" requires
/// the relevant invariant to vanish at all of them.
pub fn boundedness_report(
    surface: &FrontalSurface,
    sp: &SingularPoint,
    class: &Classification,
    arc: &[SingularSample],
    tol: f64,
) -> Result<BoundednessVerdict> {
    match class.label {
        Label::Regular | Label::DegenerateSingular => {
            Err(GeometryError::Inapplicable(format!("no boundedness verdict at a {} point", class.label)))
        }
        Label::SecondKindNonFront => empirical_report(surface, sp),
        _ => match sp.kind {
            Kind::First => first_kind_report(surface, sp, arc, tol),
            Kind::Second => second_kind_report(surface, sp, arc, tol),
        },
    }
}

fn arc_points<'a>(surface: &'a FrontalSurface, arc: &'a [SingularSample]) -> impl Iterator<Item = SingularPoint> + 'a {
    arc.iter().filter_map(move |s| surface.singular_point(s.p, Orientation::Reference(s.nu)).ok())
}

fn first_kind_report(
    surface: &FrontalSurface,
    sp: &SingularPoint,
    arc: &[SingularSample],
    tol: f64,
) -> Result<BoundednessVerdict> {
    let inv = invariants::first_kind(sp)?;
    let kc = invariants::kappa_c_jet(sp)?;
    let kp = invariants::kappa_nu_jet(sp) * kc.clone();

    let mut pi_flat = jet_flat(&kp, tol);
    let mut c_flat = jet_flat(&kc, tol);
    for q in arc_points(surface, arc).filter(|q| q.kind == Kind::First) {
        if let Ok(i) = invariants::first_kind(&q) {
            pi_flat &= zero(i.kappa_pi, tol);
            c_flat &= zero(i.kappa_c, tol);
        }
    }

    let k_rb = zero(inv.kappa_pi, tol);
    let h_rb = zero(inv.kappa_c, tol);
    Ok(BoundednessVerdict {
        k: verdict(k_rb, zero(inv.d_kappa_pi, tol), pi_flat),
        h: verdict(h_rb, zero(inv.d_kappa_c, tol), c_flat),
        method: Method::Theorem,
        witnesses: Witnesses {
            kappa_pi: Some(inv.kappa_pi),
            d_kappa_pi: Some(inv.d_kappa_pi),
            kappa_c: Some(inv.kappa_c),
            d_kappa_c: Some(inv.d_kappa_c),
            kappa_nu: Some(inv.kappa_nu),
            ..Default::default()
        },
        note: None,
    })
}

fn second_kind_report(
    surface: &FrontalSurface,
    sp: &SingularPoint,
    arc: &[SingularSample],
    tol: f64,
) -> Result<BoundednessVerdict> {
    let inv = invariants::second_kind(sp)?;
    let kn = invariants::kappa_nu_jet(sp);
    let two_h = invariants::two_hat_h_jet(sp)?;

    let mut nu_flat = jet_flat(&kn, tol);
    let mut h_flat = jet_flat(&two_h, tol);
    for q in arc_points(surface, arc) {
        nu_flat &= zero(invariants::kappa_nu_jet(&q).value(), tol);
        if let Ok(h) = invariants::hats_second(&q) {
            h_flat &= zero(2.0 * h.hat_h, tol);
        }
    }

    Ok(BoundednessVerdict {
        k: verdict(zero(inv.kappa_nu, tol), zero(inv.d_kappa_nu, tol), nu_flat),
        h: verdict(zero(inv.kappa_h, tol), zero(inv.d_kappa_h, tol), h_flat),
        method: Method::Theorem,
        witnesses: Witnesses {
            kappa_nu: Some(inv.kappa_nu),
            omega_nu: Some(inv.d_kappa_nu),
            kappa_h: Some(inv.kappa_h),
            d_kappa_h: Some(inv.d_kappa_h),
            ..Default::default()
        },
        note: None,
    })
}

fn empirical_report(surface: &FrontalSurface, sp: &SingularPoint) -> Result<BoundednessVerdict> {
    let cfg = ProbeConfig::default();
    let open = ProbeConfig { sector: 0.0, ..cfg };
    let probe = |s: ProbeScalar, c: &ProbeConfig| blowup_probe(surface, s, sp.p, c);
    let one = |s: ProbeScalar| -> Result<CurvatureVerdict> {
        let sectored = probe(s, &cfg)?;
        let full = probe(s, &open)?;
        Ok(verdict(sectored.stable, sectored.continuous, full.stable))
    };
    Ok(BoundednessVerdict {
        k: one(ProbeScalar::K)?,
        h: one(ProbeScalar::H)?,
        method: Method::Empirical,
        witnesses: Witnesses { kappa_nu: Some(invariants::kappa_nu_jet(sp).value()), ..Default::default() },
        note: Some("second-kind point of a frontal that is not a front: no theorem applies, verdict from the blow-up probe".into()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeScalar {
    K,
    H,
    /// v·K with v the linearised adapted transversal coordinate.
    #[serde(rename = "vK")]
    VK,
    #[serde(rename = "vH")]
    VH,
}

impl std::str::FromStr for ProbeScalar {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "K" | "k" => Ok(ProbeScalar::K),
            "H" | "h" => Ok(ProbeScalar::H),
            "vK" | "vk" => Ok(ProbeScalar::VK),
            "vH" | "vh" => Ok(ProbeScalar::VH),
            _ => Err(format!("unknown probe scalar `{s}` (expected K, H, vK or vH)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeConfig {
    /// Radii run from 10^-first_decade down to 10^-last_decade.
    pub first_decade: u32,
    pub last_decade: u32,
    pub per_decade: u32,
    pub thetas: usize,
    /// Half-width of the excluded sectors around the singular directions.
    pub sector: f64,
    pub exec: Execution,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { first_decade: 1, last_decade: 5, per_decade: 9, thetas: 720, sector: 0.05, exec: Execution::Parallel }
    }
}

impl ProbeConfig {
    pub fn radii(&self) -> Vec<f64> {
        let n = (self.last_decade - self.first_decade) * self.per_decade;
        (0..=n).map(|i| 10f64.powf(-(self.first_decade as f64) - i as f64 / self.per_decade as f64)).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        let n = self.thetas as f64;
        (0..self.thetas).map(|j| (j as f64 + 0.5) * std::f64::consts::TAU / n).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeSample {
    pub r: f64,
    pub theta: f64,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowupProbe {
    pub scalar: ProbeScalar,
    pub point: [f64; 2],
    pub radii: Vec<f64>,
    pub thetas: usize,
    pub sector: f64,
    /// Centres of the excluded sectors (directions of the singular curve).
    pub excluded: Vec<f64>,
    #[serde(skip)]
    pub samples: Vec<ProbeSample>,
    /// max |value| per radius.
    pub ring_max: Vec<f64>,
    /// max |value| per decade of radii, outermost first.
    pub decade_max: Vec<f64>,
    pub max: f64,
    /// No decade maximum exceeds the previous one by a factor 2 or more.
    pub stable: bool,
    /// max − min over θ at the outermost and innermost radius.
    pub spread_outer: f64,
    pub spread_inner: f64,
    /// The values converge to a θ-independent limit.
    pub continuous: bool,
    pub limit: Option<f64>,
    pub failures: usize,
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Sample a curvature scalar on circles around `p` with radii shrinking
/// geometrically, skipping sectors around the singular curve.
pub fn blowup_probe(surface: &FrontalSurface, scalar: ProbeScalar, p: [f64; 2], cfg: &ProbeConfig) -> Result<BlowupProbe> {
    let sp = surface.singular_point(p, Orientation::Canonical)?;
    let nu_p = sp.nu_value();
    let grad = sp.lambda_grad;
    let th0 = sp.tangent[1].atan2(sp.tangent[0]);
    let excluded = vec![th0.rem_euclid(std::f64::consts::TAU), (th0 + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)];

    let dl_dv = match scalar {
        ProbeScalar::K | ProbeScalar::H => 1.0,
        ProbeScalar::VK | ProbeScalar::VH => {
            let h: Hats = match sp.kind {
                Kind::First => invariants::hats_first(&sp)?,
                Kind::Second => invariants::hats_second(&sp)?,
            };
            h.dlambda_dv
        }
    };

    let radii = cfg.radii();
    let angles: Vec<f64> =
        cfg.angles().into_iter().filter(|&t| excluded.iter().all(|&c| angle_gap(t, c) >= cfg.sector)).collect();
    let grid: Vec<(f64, f64)> = radii.iter().flat_map(|&r| angles.iter().map(move |&t| (r, t))).collect();

    let samples = par::map(cfg.exec, &grid, |&(r, theta)| {
        let d = [r * theta.cos(), r * theta.sin()];
        let q = [p[0] + d[0], p[1] + d[1]];
        let value = invariants::regular_curvatures(surface, q, nu_p).ok().map(|(h, k)| {
            let w = (grad[0] * d[0] + grad[1] * d[1]) / dl_dv;
            match scalar {
                ProbeScalar::K => k,
                ProbeScalar::H => h,
                ProbeScalar::VK => w * k,
                ProbeScalar::VH => w * h,
            }
        });
        ProbeSample { r, theta, value: value.filter(|v| v.is_finite()) }
    });

    let per_ring = angles.len().max(1);
    let failures = samples.iter().filter(|s| s.value.is_none()).count();
    let ring = |i: usize| samples[i * per_ring..(i + 1) * per_ring].iter().filter_map(|s| s.value);
    let ring_max: Vec<f64> = (0..radii.len()).map(|i| ring(i).fold(0.0_f64, |m, v| m.max(v.abs()))).collect();
    let spread = |i: usize| {
        let (lo, hi) = ring(i).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if lo.is_finite() {
            hi - lo
        } else {
            f64::NAN
        }
    };

    let pd = cfg.per_decade.max(1) as usize;
    let decade_max: Vec<f64> =
        ring_max.chunks(pd).map(|c| c.iter().cloned().fold(0.0, f64::max)).collect::<Vec<_>>();
    // the last chunk holds only the final radius; fold it into its decade
    let decade_max = if decade_max.len() > 1 && ring_max.len() % pd == 1 {
        let mut d = decade_max[..decade_max.len() - 1].to_vec();
        let last = d.len() - 1;
        d[last] = d[last].max(*ring_max.last().unwrap());
        d
    } else {
        decade_max
    };
    let max = ring_max.iter().cloned().fold(0.0, f64::max);
    let floor = 1e-9;
    // shrinking maxima are bounded too; only growth counts against stability
    let stable = decade_max.windows(2).all(|w| (w[1] + floor) / (w[0] + floor) < 2.0);
    let (outer, inner) = (spread(0), spread(radii.len() - 1));
    let inner_mean = {
        let vals: Vec<f64> = ring(radii.len() - 1).collect();
        vals.iter().sum::<f64>() / vals.len().max(1) as f64
    };
    let continuous = stable && inner <= 0.01 * outer + 1e-9 * (1.0 + inner_mean.abs());
    Ok(BlowupProbe {
        scalar,
        point: p,
        radii,
        thetas: cfg.thetas,
        sector: cfg.sector,
        excluded,
        samples,
        ring_max,
        decade_max,
        max,
        stable,
        spread_outer: outer,
        spread_inner: inner,
        continuous,
        limit: continuous.then_some(inner_mean),
        failures,
    })
}

/// The three equivalent conditions at a rank-one singular point of a front.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussMapTest {
    pub point: [f64; 2],
    pub is_front: bool,
    /// Rank of dν below two; only defined in Euclidean space.
    pub gauss_singular: Option<bool>,
    pub kappa_nu_zero: bool,
    pub kda_zero: bool,
    pub sigma_ratio: f64,
    pub kappa_nu: f64,
    /// Coefficient of K dÂ at the point.
    pub kda: f64,
}

impl GaussMapTest {
    /// All computed predicates agree.
    pub fn agree(&self) -> bool {
        self.kappa_nu_zero == self.kda_zero && self.gauss_singular.is_none_or(|g| g == self.kappa_nu_zero)
    }
}

const GAUSS_TOL: f64 = 1e-8;

pub fn gauss_map_singular(surface: &FrontalSurface, p: [f64; 2]) -> Result<GaussMapTest> {
    gauss_map_test(surface, &surface.singular_point(p, Orientation::Canonical)?)
}

pub fn gauss_map_test(surface: &FrontalSurface, sp: &SingularPoint) -> Result<GaussMapTest> {
    let l = &sp.local;
    let a = ambient::values(&l.nu_u);
    let b = ambient::values(&l.nu_v);
    let (aa, ab, bb) = (l.inner_at(a, a), l.inner_at(a, b), l.inner_at(b, b));
    let tr = aa + bb;
    let disc = ((aa - bb).powi(2) + 4.0 * ab * ab).sqrt();
    let smax = (0.5 * (tr + disc)).max(0.0).sqrt();
    let smin = (0.5 * (tr - disc)).max(0.0).sqrt();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };

    let kappa_nu = invariants::kappa_nu_jet(sp).value();
    let e1 = [-sp.eta[1], sp.eta[0]];
    let fe = l.norm_at(l.df(e1));

    let euclid = surface.chart().is_euclidean();
    let kda = if euclid {
        ambient::det_columns(&l.nu_value(), &a, &b)
    } else {
        invariants::shape_jets(l)?.1.value()
    };
    let s = smax.max(f64::MIN_POSITIVE);
    Ok(GaussMapTest {
        point: sp.p,
        is_front: crate::classify::is_front(sp),
        gauss_singular: euclid.then_some(ratio < GAUSS_TOL),
        kappa_nu_zero: kappa_nu.abs() * fe / s < GAUSS_TOL,
        kda_zero: kda.abs() / (s * s) < GAUSS_TOL,
        sigma_ratio: ratio,
        kappa_nu,
        kda,
    })
}
