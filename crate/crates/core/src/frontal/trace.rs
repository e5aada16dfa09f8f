//! Predictor–corrector continuation of the singular curve {λ = 0}.
//!
//! The corrector solves λ(q) = 0 together with |q − p| = h, so a step from
//! p lands on the unique curve point at chord distance h. This makes the
//! walk reversible: stepping back from the new point returns to p.

use serde::Serialize;

use super::{FrontalSurface, Kind, Orientation, SingularPoint};
use crate::error::{GeometryError, Result};

const TRACE_ORDER: usize = 3;
const MIN_STEP: f64 = 1e-6;
const NEWTON_TOL: f64 = 1e-12;
const MAX_TURN_COS: f64 = 0.7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceConfig {
    /// Chord length between samples; the sign picks the direction.
    pub step: f64,
    pub max_samples: usize,
    /// Insert refined second-kind points between samples.
    pub refine: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig { step: 0.02, max_samples: 200, refine: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StopReason {
    Boundary,
    MaxSamples,
    /// The curve closed up on its first sample.
    Closed,
    Degenerate { at: [f64; 2] },
    StepUnderflow { at: [f64; 2] },
}

/// A traced point of the singular curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularSample {
    pub p: [f64; 2],
    pub lambda_grad: [f64; 2],
    pub eta: [f64; 2],
    pub kind: Kind,
    pub sign_dlambda_eta: f64,
    /// Signed arclength of f∘γ from the seed.
    pub t: f64,
    pub nu: [f64; 3],
    pub image: [f64; 3],
    /// det(γ', η)/(|γ'||η|) with η continued along the trace, so its sign
    /// changes across a swallowtail.
    pub kind_measure: f64,
    /// Inserted by the special-point search rather than by stepping.
    pub refined: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub samples: Vec<SingularSample>,
    pub stop: StopReason,
    /// Stop reason of the backward half for two-sided traces.
    pub stop_backward: Option<StopReason>,
}

impl Trace {
    /// The sample closest to `p` in the parameter plane.
    pub fn nearest(&self, p: [f64; 2]) -> Option<&SingularSample> {
        self.samples.iter().min_by(|a, b| {
            let da = (a.p[0] - p[0]).hypot(a.p[1] - p[1]);
            let db = (b.p[0] - p[0]).hypot(b.p[1] - p[1]);
            da.total_cmp(&db)
        })
    }
}

#[derive(Clone, Debug)]
struct Node {
    p: [f64; 2],
    tangent: [f64; 2],
    nu: [f64; 3],
    image: [f64; 3],
    eta: [f64; 2],
    eta_cont: [f64; 2],
    grad: [f64; 2],
    kind: Kind,
    measure: f64,
    speed: f64,
    refined: bool,
}

impl Node {
    fn new(sp: &SingularPoint, prev_eta: Option<[f64; 2]>) -> Node {
        let eta = sp.eta;
        let eta_cont = match prev_eta {
            Some(e) if e[0] * eta[0] + e[1] * eta[1] < 0.0 => [-eta[0], -eta[1]],
            _ => eta,
        };
        let t = sp.tangent;
        let df = sp.local.df(t);
        Node {
            p: sp.p,
            tangent: t,
            nu: sp.nu_value(),
            image: crate::ambient::values(&sp.local.f),
            eta,
            eta_cont,
            grad: sp.lambda_grad,
            kind: sp.kind,
            measure: t[0] * eta_cont[1] - t[1] * eta_cont[0],
            speed: sp.local.norm_at(df),
            refined: false,
        }
    }

    fn sample(&self, t: f64) -> SingularSample {
        let sign = match self.kind {
            Kind::First => (self.grad[0] * self.eta[0] + self.grad[1] * self.eta[1]).signum(),
            Kind::Second => 0.0,
        };
        SingularSample {
            p: self.p,
            lambda_grad: self.grad,
            eta: self.eta,
            kind: self.kind,
            sign_dlambda_eta: sign,
            t,
            nu: self.nu,
            image: self.image,
            kind_measure: self.measure,
            refined: self.refined,
        }
    }
}

fn tol(scale: f64) -> f64 {
    NEWTON_TOL * scale.max(1e-300)
}

fn correct_seed(surface: &FrontalSurface, seed: [f64; 2]) -> Result<[f64; 2]> {
    let mut q = seed;
    let fail = GeometryError::SeedNotConverged { point: seed };
    for _ in 0..60 {
        let (phi, g, scale) = surface.defining_at(q, None)?;
        if phi.abs() <= tol(scale) {
            return Ok(q);
        }
        let gg = g[0] * g[0] + g[1] * g[1];
        if !(gg > 0.0) {
            return Err(fail);
        }
        q = [q[0] - phi * g[0] / gg, q[1] - phi * g[1] / gg];
        if !q[0].is_finite() || !surface.domain().contains(q) {
            return Err(fail);
        }
    }
    Err(fail)
}

/// Newton on {φ = 0, |q − p|² = h²} from the predictor `q0`.
fn correct_chord(surface: &FrontalSurface, p: [f64; 2], q0: [f64; 2], h: f64, nu: [f64; 3]) -> Result<[f64; 2]> {
    let mut q = q0;
    let fail = GeometryError::SeedNotConverged { point: q0 };
    for _ in 0..30 {
        let (phi, g, scale) = surface.defining_at(q, Some(nu))?;
        let d = [q[0] - p[0], q[1] - p[1]];
        let c = d[0] * d[0] + d[1] * d[1] - h * h;
        if phi.abs() <= tol(scale) && c.abs() <= 1e-12 * h * h {
            return Ok(q);
        }
        let det = g[0] * 2.0 * d[1] - g[1] * 2.0 * d[0];
        if det == 0.0 || !det.is_finite() {
            return Err(fail);
        }
        let dq0 = (phi * 2.0 * d[1] - g[1] * c) / det;
        let dq1 = (g[0] * c - 2.0 * d[0] * phi) / det;
        q = [q[0] - dq0, q[1] - dq1];
        if !surface.domain().contains(q) {
            return Err(GeometryError::OutsideDomain { point: q });
        }
    }
    Err(fail)
}

fn evaluate(surface: &FrontalSurface, q: [f64; 2], nu: Option<[f64; 3]>) -> Result<SingularPoint> {
    let orient = match nu {
        Some(r) => Orientation::Reference(r),
        None => Orientation::Canonical,
    };
    surface.singular_point_at_order(q, TRACE_ORDER, orient)
}

/// The curve point at signed chord `h` from `a` (direction σ·sign(h) along
/// the tangent).
fn point_at(surface: &FrontalSurface, a: &Node, sigma: f64, h: f64) -> Result<Node> {
    if h == 0.0 {
        return Ok(a.clone());
    }
    let dir = sigma * h.signum();
    let q0 = [a.p[0] + dir * h.abs() * a.tangent[0], a.p[1] + dir * h.abs() * a.tangent[1]];
    let q = correct_chord(surface, a.p, q0, h.abs(), a.nu)?;
    let sp = evaluate(surface, q, Some(a.nu))?;
    Ok(Node::new(&sp, Some(a.eta_cont)))
}

fn walk(surface: &FrontalSurface, start: Node, sigma: f64, h: f64, max_samples: usize) -> (Vec<Node>, StopReason) {
    let domain = *surface.domain();
    let grad0 = start.grad[0].hypot(start.grad[1]);
    let mut nodes = vec![start];
    while nodes.len() < max_samples {
        let cur = nodes.last().expect("non-empty").clone();
        let mut hh = h;
        let next = loop {
            if hh < MIN_STEP {
                let g = cur.grad[0].hypot(cur.grad[1]);
                let stop = if g < 1e-3 * grad0 {
                    StopReason::Degenerate { at: cur.p }
                } else {
                    StopReason::StepUnderflow { at: cur.p }
                };
                return (nodes, stop);
            }
            let q0 = [cur.p[0] + sigma * hh * cur.tangent[0], cur.p[1] + sigma * hh * cur.tangent[1]];
            if !domain.contains(q0) {
                return (nodes, StopReason::Boundary);
            }
            let q = match correct_chord(surface, cur.p, q0, hh, cur.nu) {
                Ok(q) if (q[0] - q0[0]).hypot(q[1] - q0[1]) <= 0.5 * hh => q,
                _ => {
                    hh *= 0.5;
                    continue;
                }
            };
            match evaluate(surface, q, Some(cur.nu)) {
                Ok(sp) => {
                    let node = Node::new(&sp, Some(cur.eta_cont));
                    let turn = node.tangent[0] * cur.tangent[0] + node.tangent[1] * cur.tangent[1];
                    if turn >= MAX_TURN_COS {
                        break node;
                    }
                    hh *= 0.5;
                }
                Err(GeometryError::Degenerate { point }) | Err(GeometryError::NormalVanishes { point }) => {
                    return (nodes, StopReason::Degenerate { at: point });
                }
                Err(_) => hh *= 0.5,
            }
        };
        let first = nodes[0].p;
        if nodes.len() > 3 && (next.p[0] - first[0]).hypot(next.p[1] - first[1]) < 0.75 * h {
            return (nodes, StopReason::Closed);
        }
        nodes.push(next);
    }
    (nodes, StopReason::MaxSamples)
}

fn chord(a: &Node, b: &Node) -> f64 {
    (a.p[0] - b.p[0]).hypot(a.p[1] - b.p[1])
}

/// Bisection for a sign change of the continued kind measure between a
/// and b.
fn bisect(surface: &FrontalSurface, a: &Node, b: &Node, sigma: f64) -> Option<Node> {
    let (mut lo, mut hi) = (0.0, chord(a, b));
    let sa = a.measure.signum();
    let mut best: Option<Node> = None;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let n = point_at(surface, a, sigma, mid).ok()?;
        let done = n.kind == Kind::Second || hi - lo < 1e-14;
        if n.measure.signum() == sa {
            lo = mid;
        } else {
            hi = mid;
        }
        best = Some(n);
        if done {
            break;
        }
    }
    best.filter(|n| n.kind == Kind::Second)
}

/// Golden-section search for a tangential zero of the kind measure in the
/// chord window (−ha, hb) around m.
fn golden(surface: &FrontalSurface, m: &Node, sigma: f64, ha: f64, hb: f64) -> Option<Node> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let f = |h: f64| point_at(surface, m, sigma, h).ok().map(|n| (n.measure.abs(), n));
    let (mut a, mut b) = (-ha, hb);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..120 {
        if fc.1.kind == Kind::Second {
            return Some(fc.1);
        }
        if fd.1.kind == Kind::Second {
            return Some(fd.1);
        }
        if b - a < 1e-13 {
            break;
        }
        if fc.0 < fd.0 {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
        }
    }
    None
}

fn refine(surface: &FrontalSurface, nodes: Vec<Node>, sigma: f64) -> Vec<Node> {
    let n = nodes.len();
    let mut out: Vec<Node> = Vec::with_capacity(n + 4);
    for k in 0..n {
        // tangential zero at a local minimum of |measure|
        if k > 0 && k + 1 < n {
            let (a, m, b) = (&nodes[k - 1], &nodes[k], &nodes[k + 1]);
            let all_first = a.kind == Kind::First && m.kind == Kind::First && b.kind == Kind::First;
            let same = a.measure.signum() == m.measure.signum() && m.measure.signum() == b.measure.signum();
            if all_first && same && m.measure.abs() < a.measure.abs() && m.measure.abs() < b.measure.abs() {
                if let Some(mut x) = golden(surface, m, sigma, chord(a, m), chord(m, b)) {
                    x.refined = true;
                    // keep walk order: x lies before m when its offset is negative
                    let before = {
                        let d = [x.p[0] - m.p[0], x.p[1] - m.p[1]];
                        sigma * (d[0] * m.tangent[0] + d[1] * m.tangent[1]) < 0.0
                    };
                    if before {
                        out.push(x);
                        out.push(m.clone());
                    } else {
                        out.push(m.clone());
                        out.push(x);
                    }
                    continue;
                }
            }
        }
        out.push(nodes[k].clone());
        if k + 1 < n {
            let (a, b) = (&nodes[k], &nodes[k + 1]);
            if a.kind == Kind::First && b.kind == Kind::First && a.measure.signum() != b.measure.signum() {
                if let Some(mut x) = bisect(surface, a, b, sigma) {
                    x.refined = true;
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Signed arclength increments of f∘γ between consecutive nodes (Simpson).
fn arclengths(surface: &FrontalSurface, nodes: &[Node], sigma: f64) -> Vec<f64> {
    let mut t = vec![0.0; nodes.len()];
    for k in 1..nodes.len() {
        let (a, b) = (&nodes[k - 1], &nodes[k]);
        let c = chord(a, b);
        let mid = point_at(surface, a, sigma, 0.5 * c).map(|m| m.speed).unwrap_or(0.5 * (a.speed + b.speed));
        t[k] = t[k - 1] + sigma * c * (a.speed + 4.0 * mid + b.speed) / 6.0;
    }
    t
}

fn start_node(surface: &FrontalSurface, seed: [f64; 2]) -> Result<Node> {
    if !surface.domain().contains(seed) {
        return Err(GeometryError::OutsideDomain { point: seed });
    }
    let p0 = correct_seed(surface, seed)?;
    let sp = evaluate(surface, p0, None)?;
    Ok(Node::new(&sp, None))
}

fn one_side(surface: &FrontalSurface, start: Node, cfg: &TraceConfig, sigma: f64) -> (Vec<Node>, Vec<f64>, StopReason) {
    let (nodes, stop) = walk(surface, start, sigma, cfg.step.abs(), cfg.max_samples.max(1));
    let nodes = if cfg.refine { refine(surface, nodes, sigma) } else { nodes };
    let t = arclengths(surface, &nodes, sigma);
    (nodes, t, stop)
}

/// Trace from `seed` in the direction given by the sign of `cfg.step`.
pub fn trace_singular_curve(surface: &FrontalSurface, seed: [f64; 2], cfg: &TraceConfig) -> Result<Trace> {
    let start = start_node(surface, seed)?;
    let sigma = if cfg.step < 0.0 { -1.0 } else { 1.0 };
    let (nodes, t, stop) = one_side(surface, start, cfg, sigma);
    let samples = nodes.iter().zip(t).map(|(n, t)| n.sample(t)).collect();
    Ok(Trace { samples, stop, stop_backward: None })
}

/// Trace both ways from `seed`; samples are ordered along the canonical
/// tangent with t = 0 at the seed.
pub fn trace_both(surface: &FrontalSurface, seed: [f64; 2], cfg: &TraceConfig) -> Result<Trace> {
    let start = start_node(surface, seed)?;
    let (fwd, tf, stop) = one_side(surface, start.clone(), cfg, 1.0);
    let (bwd, tb, stop_b) = one_side(surface, start, cfg, -1.0);
    let mut samples: Vec<SingularSample> = bwd.iter().zip(tb).skip(1).map(|(n, t)| n.sample(t)).collect();
    samples.reverse();
    samples.extend(fwd.iter().zip(tf).map(|(n, t)| n.sample(t)));
    Ok(Trace { samples, stop, stop_backward: Some(stop_b) })
}
