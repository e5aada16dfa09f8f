use approx::assert_abs_diff_eq;

use super::*;
use crate::catalog;

fn surface(name: &str) -> FrontalSurface {
    FrontalSurface::resolve(&catalog::get(name).unwrap().spec()).unwrap()
}

fn map(f: [&str; 3]) -> FrontalSurface {
    FrontalSurface::resolve(&SurfaceSpec::from_map(f).unwrap()).unwrap()
}

#[test]
fn cone_normal_is_validated() {
    let s = surface("cone");
    assert_eq!(s.mode(), NormalMode::Supplied);
    let nu = s.normal_at([0.4, 0.0], Orientation::Canonical).unwrap();
    let r = 0.5f64.sqrt();
    assert_abs_diff_eq!(nu[0], -0.4f64.cos() * r, epsilon = 1e-14);
    assert_abs_diff_eq!(nu[2], r, epsilon = 1e-14);

    let mut bad = catalog::get("cone").unwrap().spec();
    bad.normal = Some(SurfaceSpec::from_map(["0", "0", "1"]).unwrap().f);
    assert!(matches!(FrontalSurface::resolve(&bad), Err(GeometryError::InvalidNormal { .. })));
}

#[test]
fn cuspidal_edge_adjugate_normal() {
    let s = map(["u", "v^2", "v^3"]);
    assert_eq!(s.mode(), NormalMode::Adjugate);
    for v in [-0.3, -1e-3, 0.0, 2e-4, 0.25] {
        let nu = s.normal_at([0.1, v], Orientation::Reference([0.0, 0.0, 1.0])).unwrap();
        let d = (9.0 * v * v + 4.0f64).sqrt();
        assert_abs_diff_eq!(nu[0], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(nu[1], -3.0 * v / d, epsilon = 1e-12);
        assert_abs_diff_eq!(nu[2], 2.0 / d, epsilon = 1e-12);
    }
}

#[test]
fn immersion_normal_and_lambda() {
    let s = map(["u", "v", "0"]);
    let nu = s.normal_at([0.2, -0.7], Orientation::Canonical).unwrap();
    assert_eq!(nu, [0.0, 0.0, 1.0]);
    let l = s.lambda_jet([0.2, -0.7], 4).unwrap();
    assert_abs_diff_eq!(l.value(), 1.0, epsilon = 1e-15);
    assert!(l.coeffs()[1..].iter().all(|c| c.abs() < 1e-15));
}

#[test]
fn cuspidal_edge_lambda_jet() {
    let s = map(["u", "v^2", "v^3"]);
    let l = s.lambda_jet([0.0, 0.0], 5).unwrap();
    assert_eq!(l.value(), 0.0);
    assert_abs_diff_eq!(l.gradient()[1], 2.0, epsilon = 1e-13);
    assert_abs_diff_eq!(l.gradient()[0], 0.0, epsilon = 1e-13);
    // λ = v sqrt(9v² + 4) = 2v + (9/4) v³ + ...
    assert_abs_diff_eq!(l.coeff(0, 3), 9.0 / 4.0, epsilon = 1e-12);
}

#[test]
fn peak_singular_set() {
    let s = surface("peak");
    let l = s.lambda_jet([0.0, 0.0], 4).unwrap();
    assert_abs_diff_eq!(l.value(), 0.0, epsilon = 1e-15);
    assert!(l.gradient()[1].abs() > 0.1);
    let c = s.singular_curve_jets([0.0, 0.0], 5).unwrap();
    assert_eq!(c.axis, Axis::U);
    assert_abs_diff_eq!(c.graph.coeff(1), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(c.graph.coeff(2), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(c.graph.coeff(3), -10.0, epsilon = 1e-10);
    assert_eq!(s.null_direction([0.0, 0.0]).unwrap().map(|x| x.abs()), [1.0, 0.0]);
}

#[test]
fn null_directions() {
    let s = map(["u", "v^2", "v^3"]);
    let e = s.null_direction([0.4, 0.0]).unwrap();
    assert_abs_diff_eq!(e[0], 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(e[1].abs(), 1.0, epsilon = 1e-14);

    let s = surface("frontal_non_front");
    for u in [-0.3, 0.1, 0.35] {
        let e = s.null_direction([u, 0.0]).unwrap();
        let want = [1.0, -u];
        let n = (1.0 + u * u).sqrt();
        let cross = e[0] * want[1] - e[1] * want[0];
        assert_abs_diff_eq!(cross / n, 0.0, epsilon = 1e-12);
    }
    let spec = SurfaceSpec::from_map(["u^2", "v^2", "u*v"]).unwrap();
    assert!(matches!(FrontalSurface::resolve(&spec), Err(GeometryError::NormalVanishes { .. })));
    let spec = SurfaceSpec::parse("[surface]\nf = [\"u^2\", \"v^2\", \"0\"]\nnormal = [\"0\", \"0\", \"1\"]\n").unwrap();
    let s = FrontalSurface::resolve(&spec).unwrap();
    assert!(matches!(s.null_direction([0.0, 0.0]), Err(GeometryError::RankZero { .. })));
}

#[test]
fn graph_jets_of_cusp_family_vanish() {
    for k in [2.0, 3.0, 4.0] {
        let spec = catalog::spec_with("cusp_k", &[("k", k)]).unwrap();
        let s = FrontalSurface::resolve(&spec).unwrap();
        let c = s.singular_curve_jets([0.0, 0.0], 5).unwrap();
        assert!(c.graph.max_abs() < 1e-12, "k = {k}: {}", c.graph);
    }
}

#[test]
fn graph_jets_annihilate_lambda() {
    for name in ["sw2", "peak", "developable", "cuspidal_cross_cap", "cuspidal_edge_s3", "swallowtail_family"] {
        let s = surface(name);
        let trace = trace_singular_curve(&s, catalog::get(name).unwrap().seed, &TraceConfig { max_samples: 6, ..Default::default() }).unwrap();
        for smp in &trace.samples {
            let sp = s.singular_point(smp.p, Orientation::Reference(smp.nu)).unwrap();
            let l = sp.curve.along(&sp.local.lambda);
            let scale = sp.local.lambda.max_abs();
            for k in 0..=l.order() {
                assert!(l.coeff(k).abs() < 1e-9 * scale, "{name} at {:?}: {l}", smp.p);
            }
        }
    }
}

#[test]
fn cusp_trace_from_offset_seed() {
    let s = map(["u", "v^2", "v^3"]);
    let cfg = TraceConfig { step: 0.05, max_samples: 10, refine: true };
    let t = trace_singular_curve(&s, [0.0, 0.1], &cfg).unwrap();
    assert_eq!(t.samples.len(), 10);
    assert_eq!(t.stop, StopReason::MaxSamples);
    for (k, smp) in t.samples.iter().enumerate() {
        assert!(smp.p[1].abs() < 1e-12);
        assert_eq!(smp.kind, Kind::First);
        assert_eq!(smp.sign_dlambda_eta, 1.0);
        assert_abs_diff_eq!(smp.p[0], 0.05 * k as f64, epsilon = 1e-12);
        // f∘γ(u) = (u, 0, 0) has unit speed
        assert_abs_diff_eq!(smp.t, smp.p[0], epsilon = 1e-12);
    }
}

#[test]
fn trace_stops_at_boundary() {
    let s = map(["u", "v^2", "v^3"]);
    let t = trace_singular_curve(&s, [0.9, 0.0], &TraceConfig { step: 0.05, max_samples: 100, refine: false }).unwrap();
    assert_eq!(t.stop, StopReason::Boundary);
    assert!(t.samples.last().unwrap().p[0] > 0.95);
}

#[test]
fn peak_second_kind_only_at_origin() {
    let s = surface("peak");
    let cfg = TraceConfig { step: 0.02, max_samples: 40, refine: true };
    let t = trace_both(&s, [0.2, -0.08], &cfg).unwrap();
    let second: Vec<_> = t.samples.iter().filter(|x| x.kind == Kind::Second).collect();
    assert_eq!(second.len(), 1, "{:?}", second);
    assert!(second[0].refined);
    assert!(second[0].p[0].abs() < 2e-5 && second[0].p[1].abs() < 1e-12, "{:?}", second[0].p);
    for smp in &t.samples {
        assert_abs_diff_eq!(smp.p[1], -10.0 * smp.p[0].powi(3), epsilon = 1e-10);
    }
    // t increases along the curve
    assert!(t.samples.windows(2).all(|w| w[1].t > w[0].t));
}

#[test]
fn sw2_second_kind_only_at_origin() {
    let s = surface("sw2");
    let cfg = TraceConfig { step: 0.02, max_samples: 60, refine: true };
    let t = trace_both(&s, [0.5, 0.0], &cfg).unwrap();
    let second: Vec<_> = t.samples.iter().filter(|x| x.kind == Kind::Second).collect();
    assert_eq!(second.len(), 1);
    assert!(second[0].p[0].abs() < 1e-8, "{:?}", second[0].p);
    for smp in &t.samples {
        assert!(smp.p[1].abs() < 1e-12);
    }
}

#[test]
fn reversed_trace_reproduces_samples() {
    for name in ["sw2", "peak", "developable"] {
        let s = surface(name);
        let e = catalog::get(name).unwrap();
        let fwd = trace_singular_curve(&s, e.seed, &TraceConfig { step: -0.03, max_samples: 25, refine: true }).unwrap();
        let last = fwd.samples.iter().rev().find(|x| !x.refined).unwrap().p;
        let back = trace_singular_curve(&s, last, &TraceConfig { step: 0.03, max_samples: 25, refine: true }).unwrap();
        let mut b: Vec<_> = back.samples.clone();
        b.reverse();
        assert_eq!(fwd.samples.len(), b.len(), "{name}");
        for (x, y) in fwd.samples.iter().zip(&b) {
            assert!((x.p[0] - y.p[0]).abs() < 1e-9 && (x.p[1] - y.p[1]).abs() < 1e-9, "{name}: {:?} vs {:?}", x.p, y.p);
            assert_eq!(x.kind, y.kind);
        }
    }
}

#[test]
fn adjugate_agrees_with_supplied_normal() {
    for name in ["sw2", "cone", "cuspidal_cross_cap", "five_halves", "ccr_bounded", "swallowtail_family"] {
        let supplied = surface(name);
        let mut spec = catalog::get(name).unwrap().spec();
        spec.normal = None;
        let adj = FrontalSurface::resolve(&spec).unwrap();
        for p in [[0.1, 0.0], [0.05, 0.1], [-0.2, 0.03], [0.0, 0.0]] {
            let a = supplied.normal_at(p, Orientation::Canonical).unwrap();
            let b = adj.normal_at(p, Orientation::Canonical).unwrap();
            let d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            assert_abs_diff_eq!(d.abs(), 1.0, epsilon = 1e-10);
        }
    }
}

#[test]
fn seed_far_from_curve_fails() {
    let s = map(["u", "v", "0"]);
    assert!(matches!(
        trace_singular_curve(&s, [0.0, 0.0], &TraceConfig::default()),
        Err(GeometryError::SeedNotConverged { .. })
    ));
}

#[test]
fn closed_curve_stops() {
    // cuspidal edge along the circle r = 1/2
    let r = "sqrt(u^2 + v^2)";
    let w = format!("(0.5 + ({r} - 0.5)^2)");
    let s = map([&format!("{w}*u/{r}"), &format!("{w}*v/{r}"), &format!("({r} - 0.5)^3")]);
    let t = trace_singular_curve(&s, [0.5, 0.01], &TraceConfig { step: 0.05, max_samples: 500, refine: false }).unwrap();
    assert_eq!(t.stop, StopReason::Closed);
    assert!(t.samples.len() > 55 && t.samples.len() < 70, "{}", t.samples.len());
    for smp in &t.samples {
        assert_abs_diff_eq!(smp.p[0].hypot(smp.p[1]), 0.5, epsilon = 1e-12);
        assert_eq!(smp.kind, Kind::First);
    }
}

#[test]
fn env_order_is_clamped() {
    assert!((3..=MAX_JET_ORDER).contains(&jet_order_from_env()));
}
