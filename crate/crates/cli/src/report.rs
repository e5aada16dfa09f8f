//! The full analysis pipeline: trace, classify, invariants, boundedness
//! and optional slices, assembled into one deterministic report.

use std::collections::BTreeMap;

use serde::Serialize;

use frontlab::boundedness::{self, BoundednessVerdict, GaussMapTest};
use frontlab::classify::{self, Classification, Label};
use frontlab::expr::SURFACE_VARS;
use frontlab::frontal::{jet_order_from_env, trace_both, trace_singular_curve, FrontalSurface, Kind, Orientation, StopReason, TraceConfig, ORDER_SLACK};
use frontlab::invariants::{self, FirstKindInvariants, SecondKindInvariants};
use frontlab::jet::Scalar;
use frontlab::par::{self, Execution};
use frontlab::slicing::{self, SliceCheck};
use frontlab::spec::{Domain, SurfaceSpec};
use frontlab::GeometryError;

/// Parameter-plane radius of the arc used for "bounded near" verdicts.
const ARC_RADIUS: f64 = 0.1;
/// Refined special points closer than this to a requested point are merged into it.
const MERGE_RADIUS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "by")]
pub enum SliceTarget {
    /// The traced first-kind point whose u coordinate is closest.
    U { u: f64 },
    Point { point: [f64; 2] },
}

impl std::str::FromStr for SliceTarget {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let nums: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad number `{x}` in `{s}`: {e}")))
            .collect::<Result<_, _>>()?;
        match nums[..] {
            [u] => Ok(SliceTarget::U { u }),
            [u, v] => Ok(SliceTarget::Point { point: [u, v] }),
            _ => Err(format!("expected `u` or `u,v`, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisConfig {
    /// Jet order override; the environment default applies otherwise.
    pub order: Option<usize>,
    pub seed: Option<[f64; 2]>,
    pub points: Vec<[f64; 2]>,
    pub tolerance: f64,
    pub step: Option<f64>,
    pub max_samples: Option<usize>,
    pub slice_at: Vec<SliceTarget>,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            order: None,
            seed: None,
            points: Vec::new(),
            tolerance: boundedness::DEFAULT_ZERO_TOL,
            step: None,
            max_samples: None,
            slice_at: Vec::new(),
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool { name: "frontlab", version: env!("CARGO_PKG_VERSION") };

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceInfo {
    pub name: Option<String>,
    pub description: Option<String>,
    pub f: [String; 3],
    pub normal: Option<[String; 3]>,
    pub params: BTreeMap<String, f64>,
    pub ambient: String,
    pub domain: Domain,
}

impl SurfaceInfo {
    pub fn of(spec: &SurfaceSpec) -> Self {
        SurfaceInfo {
            name: spec.name.clone(),
            description: spec.description.clone(),
            f: spec.f.each_ref().map(|e| e.render(SURFACE_VARS)),
            normal: spec.normal.as_ref().map(|n| n.each_ref().map(|e| e.render(SURFACE_VARS))),
            params: spec.params.clone(),
            ambient: spec.chart.name().to_string(),
            domain: spec.domain,
        }
    }
}

/// Everything needed to reproduce the run.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub seed: [f64; 2],
    pub points: Vec<[f64; 2]>,
    pub jet_order: usize,
    pub working_order: usize,
    pub tolerance: f64,
    pub step: f64,
    pub max_samples: usize,
    pub slice_at: Vec<SliceTarget>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceSummary {
    pub samples: usize,
    pub stop: Option<StopReason>,
    pub stop_backward: Option<StopReason>,
    /// Second-kind points located between samples.
    pub special: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ProfileSample {
    pub index: usize,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub kind: Option<Kind>,
    pub label: Option<Label>,
    pub kappa_nu: Option<f64>,
    pub kappa_s: Option<f64>,
    pub kappa_c: Option<f64>,
    pub kappa_pi: Option<f64>,
    #[serde(rename = "kappa_H")]
    pub kappa_h: Option<f64>,
    pub hat_h: Option<f64>,
    pub hat_k: Option<f64>,
    pub error: Option<String>,
}

impl ProfileSample {
    pub const HEADER: [&'static str; 13] =
        ["index", "t", "u", "v", "kind", "label", "kappa_nu", "kappa_s", "kappa_c", "kappa_pi", "kappa_H", "hat_H", "hat_K"];

    pub fn csv_row(&self) -> Vec<String> {
        use crate::output::cell;
        vec![
            self.index.to_string(),
            cell(Some(self.t)),
            cell(Some(self.u)),
            cell(Some(self.v)),
            self.kind.map(|k| format!("{k:?}").to_lowercase()).unwrap_or_default(),
            self.label.map(|l| l.to_string()).unwrap_or_default(),
            cell(self.kappa_nu),
            cell(self.kappa_s),
            cell(self.kappa_c),
            cell(self.kappa_pi),
            cell(self.kappa_h),
            cell(self.hat_h),
            cell(self.hat_k),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub point: [f64; 2],
    pub classification: Option<Classification>,
    pub first_kind: Option<FirstKindInvariants>,
    pub second_kind: Option<SecondKindInvariants>,
    pub boundedness: Option<BoundednessVerdict>,
    pub gauss_map: Option<GaussMapTest>,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceReport {
    pub target: SliceTarget,
    pub point: Option<[f64; 2]>,
    pub check: Option<SliceCheck>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Degenerate,
    NumericFailure,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub tool: Tool,
    pub surface: SurfaceInfo,
    pub config: ConfigEcho,
    pub trace: TraceSummary,
    pub points: Vec<PointReport>,
    pub profile: Vec<ProfileSample>,
    pub slices: Vec<SliceReport>,
    pub status: Status,
    pub errors: Vec<String>,
}

impl PointReport {
    /// Look up a reported quantity by the names used in catalog goldens.
    pub fn quantity(&self, name: &str) -> Option<f64> {
        if let Some(i) = &self.first_kind {
            let v = match name {
                "kappa_s" => i.kappa_s,
                "kappa_nu" => i.kappa_nu,
                "kappa_c" => i.kappa_c,
                "kappa_pi" => i.kappa_pi,
                "d_kappa_c" => i.d_kappa_c,
                "d_kappa_nu" => i.d_kappa_nu,
                "psi_ccr" => i.psi_ccr,
                "hat_H" => i.hat_h,
                "hat_K" => i.hat_k,
                _ => return None,
            };
            return Some(v);
        }
        let i = self.second_kind.as_ref()?;
        match name {
            "kappa_nu" => Some(i.kappa_nu),
            "kappa_H" => Some(i.kappa_h),
            "d_kappa_H" => Some(i.d_kappa_h),
            "d_kappa_nu_du" | "d_kappa_nu" => Some(i.d_kappa_nu),
            "hat_H" => Some(i.hat_h),
            "hat_K" => Some(i.hat_k),
            "tau_s" => i.tau_s,
            "tau_c" => i.tau_c,
            _ => None,
        }
    }
}

impl AnalysisReport {
    /// The report for the point closest to `p`.
    pub fn point(&self, p: [f64; 2]) -> Option<&PointReport> {
        self.points.iter().min_by(|a, b| dist(a.point, p).total_cmp(&dist(b.point, p)))
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn escalate(status: &mut Status, e: &GeometryError) {
    if e.is_degenerate() {
        if *status == Status::Ok {
            *status = Status::Degenerate;
        }
    } else if !matches!(e, GeometryError::Inapplicable(_) | GeometryError::NonEuclidean(_)) {
        *status = Status::NumericFailure;
    }
}

fn profile_sample(surface: &FrontalSurface, index: usize, s: &frontlab::frontal::SingularSample) -> ProfileSample {
    let mut row = ProfileSample { index, t: s.t, u: s.p[0], v: s.p[1], kind: Some(s.kind), ..Default::default() };
    let sp = match surface.singular_point(s.p, Orientation::Reference(s.nu)) {
        Ok(sp) => sp,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.label = Some(classify::classify_singular(&sp).label);
    row.kappa_nu = Some(invariants::kappa_nu_jet(&sp).value());
    let res = match sp.kind {
        Kind::First => invariants::first_kind(&sp).map(|i| {
            row.kappa_s = Some(i.kappa_s);
            row.kappa_c = Some(i.kappa_c);
            row.kappa_pi = Some(i.kappa_pi);
            row.hat_h = Some(i.hat_h);
            row.hat_k = Some(i.hat_k);
        }),
        Kind::Second => invariants::second_kind(&sp).map(|i| {
            row.kappa_h = Some(i.kappa_h);
            row.hat_h = Some(i.hat_h);
            row.hat_k = Some(i.hat_k);
        }),
    };
    if let Err(e) = res {
        row.error = Some(e.to_string());
    }
    row
}

fn analyze_point(
    surface: &FrontalSurface,
    p: [f64; 2],
    arc: &[frontlab::frontal::SingularSample],
    tol: f64,
    status: &mut Status,
) -> PointReport {
    let mut rep = PointReport {
        point: p,
        classification: None,
        first_kind: None,
        second_kind: None,
        boundedness: None,
        gauss_map: None,
        errors: Vec::new(),
    };
    let class = match classify::classify_point(surface, p) {
        Ok(c) => c,
        Err(e) => {
            escalate(status, &e);
            rep.errors.push(e.to_string());
            return rep;
        }
    };
    let label = class.label;
    rep.classification = Some(class.clone());
    if label == Label::DegenerateSingular && *status == Status::Ok {
        *status = Status::Degenerate;
    }
    if matches!(label, Label::Regular | Label::DegenerateSingular) {
        return rep;
    }
    let sp = match surface.singular_point(p, Orientation::Canonical) {
        Ok(sp) => sp,
        Err(e) => {
            escalate(status, &e);
            rep.errors.push(e.to_string());
            return rep;
        }
    };
    let mut note = |e: GeometryError, status: &mut Status| {
        escalate(status, &e);
        rep.errors.push(e.to_string());
    };
    match sp.kind {
        Kind::First => match invariants::first_kind(&sp) {
            Ok(i) => rep.first_kind = Some(i),
            Err(e) => note(e, status),
        },
        Kind::Second => match invariants::second_kind(&sp) {
            Ok(i) => rep.second_kind = Some(i),
            Err(e) => note(e, status),
        },
    }
    let near: Vec<_> = arc.iter().filter(|s| dist(s.p, p) <= ARC_RADIUS).cloned().collect();
    match boundedness::boundedness_report(surface, &sp, &class, &near, tol) {
        Ok(v) => rep.boundedness = Some(v),
        Err(e) => note(e, status),
    }
    match boundedness::gauss_map_test(surface, &sp) {
        Ok(g) => rep.gauss_map = Some(g),
        Err(e) => note(e, status),
    }
    rep
}

fn push_unique(list: &mut Vec<[f64; 2]>, p: [f64; 2]) {
    if !list.iter().any(|q| dist(*q, p) < 1e-9) {
        list.push(p);
    }
}

/// Run the whole pipeline. Failures are recorded in the report; the
/// status tells the caller how serious they were.
pub fn analyze(spec: &SurfaceSpec, cfg: &AnalysisConfig) -> Result<AnalysisReport, GeometryError> {
    let hints = &spec.trace;
    let d = spec.domain;
    let seed = cfg
        .seed
        .or(hints.seed)
        .or_else(|| hints.points.first().copied())
        .unwrap_or([0.5 * (d.u[0] + d.u[1]), 0.5 * (d.v[0] + d.v[1])]);
    let tcfg = TraceConfig {
        step: cfg.step.or(hints.step).unwrap_or(TraceConfig::default().step),
        max_samples: cfg.max_samples.or(hints.max_samples).unwrap_or(TraceConfig::default().max_samples),
        refine: true,
    };
    let echo = |focus: Vec<[f64; 2]>, order: usize| ConfigEcho {
        seed,
        points: focus,
        jet_order: order,
        working_order: order + ORDER_SLACK,
        tolerance: cfg.tolerance,
        step: tcfg.step,
        max_samples: tcfg.max_samples,
        slice_at: cfg.slice_at.clone(),
    };

    let surface = match FrontalSurface::resolve(spec) {
        Ok(s) => match cfg.order {
            Some(n) => s.with_order(n),
            None => s,
        },
        // a degenerate surface still gets a (nearly empty) report
        Err(e) if e.is_degenerate() => {
            let order = cfg.order.unwrap_or_else(jet_order_from_env);
            return Ok(AnalysisReport {
                tool: TOOL,
                surface: SurfaceInfo::of(spec),
                config: echo(hints.points.clone(), order),
                trace: TraceSummary { samples: 0, stop: None, stop_backward: None, special: Vec::new() },
                points: Vec::new(),
                profile: Vec::new(),
                slices: Vec::new(),
                status: Status::Degenerate,
                errors: vec![e.to_string()],
            });
        }
        Err(e) => return Err(e),
    };
    let mut status = Status::Ok;
    let mut errors = Vec::new();

    let trace = match trace_both(&surface, seed, &tcfg) {
        Ok(t) => Some(t),
        Err(e) => {
            escalate(&mut status, &e);
            if status == Status::Ok {
                status = Status::NumericFailure;
            }
            errors.push(format!("trace from {seed:?}: {e}"));
            None
        }
    };
    let samples = trace.as_ref().map(|t| t.samples.as_slice()).unwrap_or(&[]);
    let special: Vec<[f64; 2]> = samples.iter().filter(|s| s.refined).map(|s| s.p).collect();

    let mut focus = Vec::new();
    for &p in cfg.points.iter().chain(&hints.points) {
        push_unique(&mut focus, p);
    }
    // a refined point this close to a named one is the same point seen at
    // tracing resolution; double roots of the kind measure refine poorly
    for &p in &special {
        if !focus.iter().any(|q| dist(*q, p) < MERGE_RADIUS) {
            focus.push(p);
        }
    }
    if focus.is_empty() {
        if let Some(s) = samples.iter().min_by(|a, b| a.t.abs().total_cmp(&b.t.abs())) {
            focus.push(s.p);
        }
    }

    let indexed: Vec<(usize, &frontlab::frontal::SingularSample)> = samples.iter().enumerate().collect();
    let profile = par::map(cfg.exec, &indexed, |&(i, s)| profile_sample(&surface, i, s));

    // points are few and each runs its own parallel probes, so keep them in order here
    let points: Vec<PointReport> =
        focus.iter().map(|&p| analyze_point(&surface, p, samples, cfg.tolerance, &mut status)).collect();

    let slices = cfg.slice_at.iter().map(|&target| slice_report(&surface, samples, target, &tcfg)).collect();

    Ok(AnalysisReport {
        tool: TOOL,
        surface: SurfaceInfo::of(spec),
        config: echo(focus, surface.order()),
        trace: TraceSummary {
            samples: samples.len(),
            stop: trace.as_ref().map(|t| t.stop),
            stop_backward: trace.as_ref().and_then(|t| t.stop_backward),
            special,
        },
        points,
        profile,
        slices,
        status,
        errors,
    })
}

fn slice_report(
    surface: &FrontalSurface,
    samples: &[frontlab::frontal::SingularSample],
    target: SliceTarget,
    tcfg: &TraceConfig,
) -> SliceReport {
    let located = match target {
        SliceTarget::Point { point } => Ok(point),
        SliceTarget::U { u } => samples
            .iter()
            .filter(|s| s.kind == Kind::First)
            .min_by(|a, b| (a.p[0] - u).abs().total_cmp(&(b.p[0] - u).abs()))
            .ok_or_else(|| GeometryError::Inapplicable("no first-kind samples to slice at".into()))
            .and_then(|s| {
                let one = TraceConfig { max_samples: 1, refine: false, ..*tcfg };
                let t = trace_singular_curve(surface, [u, s.p[1]], &one)?;
                Ok(t.samples[0].p)
            }),
    };
    match located.and_then(|p| slicing::slice_cusp_check(surface, p).map(|c| (p, c))) {
        Ok((p, c)) => SliceReport { target, point: Some(p), check: Some(c), error: None },
        Err(e) => SliceReport { target, point: None, check: None, error: Some(e.to_string()) },
    }
}
