//! Randomized checks shared by the property and acceptance targets. Each
//! suite drives a proptest runner and reports the first failure as text.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use frontlab::ambient::{covariant_derivative, AmbientChart, Vec3};
use frontlab::boundedness::{boundedness_report, DEFAULT_ZERO_TOL};
use frontlab::catalog;
use frontlab::classify::{classify_point, classify_singular};
use frontlab::expr::{evaluate_jet, Bindings, Expr, Vocabulary, SURFACE_VARS};
use frontlab::frontal::{FrontalSurface, Kind, Orientation, SingularPoint};
use frontlab::invariants::{first_kind, kappa_nu_jet, second_kind};
use frontlab::jet::{Axis, Jet2, Scalar};
use frontlab::spec::SurfaceSpec;

pub const CASES: u32 = 100;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config::with_cases(cases))
}

fn finish<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn ok_or_fail<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// A first-kind point on one of two random families: cuspidal edges
/// (u, v² + a u², v³ + b u² + c u v² + d u³) along v = 0, and the cuspidal
/// cross cap catalog family with random curvatures.
#[derive(Clone, Debug)]
pub struct FirstKindCase {
    pub edge: bool,
    pub coeffs: [f64; 4],
    pub u: f64,
}

impl FirstKindCase {
    pub fn surface(&self) -> FrontalSurface {
        let [a, b, c, d] = self.coeffs;
        let spec = if self.edge {
            let f = [
                "u".to_string(),
                format!("v^2 + ({a})*u^2"),
                format!("v^3 + ({b})*u^2 + ({c})*u*v^2 + ({d})*u^3"),
            ];
            SurfaceSpec::from_map([&f[0], &f[1], &f[2]]).unwrap()
        } else {
            catalog::spec_with("cuspidal_cross_cap", &[("ks", 2.0 * a), ("kn", 2.0 * b), ("c", 3.0 + 3.0 * c)]).unwrap()
        };
        FrontalSurface::resolve(&spec).unwrap()
    }

    pub fn point(&self) -> [f64; 2] {
        [self.u, 0.0]
    }
}

pub fn first_kind_case() -> impl Strategy<Value = FirstKindCase> {
    (any::<bool>(), prop::array::uniform4(-1.0f64..1.0), -0.3f64..0.3).prop_map(|(edge, coeffs, u)| FirstKindCase {
        edge,
        coeffs,
        u,
    })
}

fn first_kind_point(c: &FirstKindCase) -> Result<(FrontalSurface, SingularPoint), TestCaseError> {
    let s = c.surface();
    let sp = ok_or_fail(s.singular_point(c.point(), Orientation::Canonical))?;
    prop_assert_eq!(sp.kind, Kind::First);
    Ok((s, sp))
}

/// κ_s² + κ_ν² equals the squared curvature of the image of the singular curve.
pub fn k3_identity(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&first_kind_case(), |c| {
        let (_, sp) = first_kind_point(&c)?;
        let i = ok_or_fail(first_kind(&sp))?;
        let lhs = i.kappa_s.powi(2) + i.kappa_nu.powi(2);
        let rhs = i.curvature.powi(2);
        prop_assert!(close(lhs, rhs, 1e-8), "{} vs {} for {:?}", lhs, rhs, c);
        Ok(())
    }))
}

/// 4Ĥ = κ_c and 2K̂ = κ_Π at first-kind points.
pub fn first_kind_hats(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&first_kind_case(), |c| {
        let (_, sp) = first_kind_point(&c)?;
        let i = ok_or_fail(first_kind(&sp))?;
        prop_assert!(close(4.0 * i.hat_h, i.kappa_c, 1e-7), "4Ĥ = {} κ_c = {} for {:?}", 4.0 * i.hat_h, i.kappa_c, c);
        prop_assert!(close(2.0 * i.hat_k, i.kappa_pi, 1e-7), "2K̂ = {} κ_Π = {} for {:?}", 2.0 * i.hat_k, i.kappa_pi, c);
        Ok(())
    }))
}

/// A second-kind point: the swallowtail families at the origin or a point
/// on the cone's circle of singular points.
#[derive(Clone, Debug)]
pub struct SecondKindCase {
    pub family: u8,
    pub a: f64,
    pub b: f64,
}

impl SecondKindCase {
    pub fn build(&self) -> (FrontalSurface, [f64; 2]) {
        let (spec, p) = match self.family {
            0 => (catalog::spec_with("sw2", &[("b", self.a), ("c", self.b)]).unwrap(), [0.0, 0.0]),
            1 => (catalog::spec_with("swallowtail_family", &[("a", self.a - 0.5), ("b", self.b)]).unwrap(), [0.0, 0.0]),
            _ => (catalog::get("cone").unwrap().spec(), [3.0 * (self.a - 1.25), 0.0]),
        };
        (FrontalSurface::resolve(&spec).unwrap(), p)
    }
}

pub fn second_kind_case() -> impl Strategy<Value = SecondKindCase> {
    (0u8..3, 0.5f64..2.0, 0.5f64..2.0).prop_map(|(family, a, b)| SecondKindCase { family, a, b })
}

/// K̂ = 2Ĥκ_ν at second-kind points.
pub fn second_kind_hats(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&second_kind_case(), |c| {
        let (s, p) = c.build();
        let sp = ok_or_fail(s.singular_point(p, Orientation::Canonical))?;
        prop_assert_eq!(sp.kind, Kind::Second);
        let i = ok_or_fail(second_kind(&sp))?;
        let rhs = 2.0 * i.hat_h * i.kappa_nu;
        prop_assert!(close(i.hat_k, rhs, 1e-7), "K̂ = {} vs 2Ĥκ_ν = {} for {:?}", i.hat_k, rhs, c);
        Ok(())
    }))
}

/// Catalog points whose verdicts come from theorem predicates.
const INVARIANCE_ENTRIES: [&str; 9] = [
    "cuspidal_edge",
    "sw2",
    "cuspidal_cross_cap",
    "five_halves",
    "cusp_k",
    "ccr_bounded",
    "swallowtail_family",
    "peak",
    "developable",
];

#[derive(Clone, Debug)]
pub struct Unimodular {
    pub entry: usize,
    /// (u, v) = (a s + b t, c s + d t) with ad − bc = 1.
    pub m: [f64; 4],
}

pub fn unimodular_case() -> impl Strategy<Value = Unimodular> {
    (0..INVARIANCE_ENTRIES.len(), 0.5f64..2.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(entry, a, b, c)| Unimodular {
        entry,
        m: [a, b, c, (1.0 + b * c) / a],
    })
}

fn reparametrized(spec: &SurfaceSpec, m: [f64; 4]) -> SurfaceSpec {
    let vocab = Vocabulary::new(SURFACE_VARS, spec.params.keys().cloned());
    let u = Expr::parse(&format!("({})*u + ({})*v", m[0], m[1]), &vocab).unwrap();
    let v = Expr::parse(&format!("({})*u + ({})*v", m[2], m[3]), &vocab).unwrap();
    let mut out = spec.reparametrize([&u, &v]);
    out.domain.u = [-0.2, 0.2];
    out.domain.v = [-0.2, 0.2];
    out
}

/// Labels, boundedness verdicts and κ_ν agree after a linear change of
/// coordinates with determinant one.
pub fn coordinate_invariance(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&unimodular_case(), |c| {
        let name = INVARIANCE_ENTRIES[c.entry];
        let spec = catalog::get(name).unwrap().spec();
        let s0 = ok_or_fail(FrontalSurface::resolve(&spec))?;
        let s1 = ok_or_fail(FrontalSurface::resolve(&reparametrized(&spec, c.m)))?;
        let p = [0.0, 0.0];
        let sp0 = ok_or_fail(s0.singular_point(p, Orientation::Canonical))?;
        let sp1 = ok_or_fail(s1.singular_point(p, Orientation::Canonical))?;
        let (c0, c1) = (classify_singular(&sp0), classify_singular(&sp1));
        prop_assert_eq!(c0.label, c1.label, "{} {:?}", name, c.m);
        let k0 = kappa_nu_jet(&sp0).value();
        let k1 = kappa_nu_jet(&sp1).value();
        prop_assert!(close(k0, k1, 1e-7), "{}: κ_ν {} vs {} for {:?}", name, k0, k1, c.m);
        let v0 = ok_or_fail(boundedness_report(&s0, &sp0, &c0, &[], DEFAULT_ZERO_TOL))?;
        let v1 = ok_or_fail(boundedness_report(&s1, &sp1, &c1, &[], DEFAULT_ZERO_TOL))?;
        prop_assert_eq!(v0.k, v1.k, "{} {:?}", name, c.m);
        prop_assert_eq!(v0.h, v1.h, "{} {:?}", name, c.m);
        Ok(())
    }))
}

/// Reversing ν keeps κ_c and negates κ_ν.
pub fn normal_flip(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&first_kind_case(), |c| {
        let (s, sp) = first_kind_point(&c)?;
        let flipped = match s.flipped_normal() {
            Some(f) => ok_or_fail(f.singular_point(c.point(), Orientation::Canonical))?,
            None => ok_or_fail(s.singular_point(c.point(), Orientation::Reference(sp.nu_value().map(|x| -x))))?,
        };
        let (a, b) = (ok_or_fail(first_kind(&sp))?, ok_or_fail(first_kind(&flipped))?);
        prop_assert!(close(a.kappa_c, b.kappa_c, 1e-9), "κ_c {} vs {}", a.kappa_c, b.kappa_c);
        prop_assert!(close(a.kappa_nu, -b.kappa_nu, 1e-9), "κ_ν {} vs {}", a.kappa_nu, b.kappa_nu);
        Ok(())
    }))
}

#[derive(Clone, Debug)]
pub struct Polynomial {
    /// Coefficient of u^i v^j at index (i, j), total degree at most 4.
    pub coeffs: Vec<((usize, usize), f64)>,
    pub base: [f64; 2],
}

impl Polynomial {
    pub fn text(&self) -> String {
        let terms: Vec<String> = self.coeffs.iter().map(|((i, j), c)| format!("({c})*u^{i}*v^{j}")).collect();
        terms.join(" + ")
    }

    /// Exact Taylor coefficient of u^i v^j at the base point.
    pub fn taylor(&self, i: usize, j: usize) -> f64 {
        let [u0, v0] = self.base;
        self.coeffs
            .iter()
            .filter(|((k, l), _)| *k >= i && *l >= j)
            .map(|((k, l), c)| c * binom(*k, i) * binom(*l, j) * u0.powi((k - i) as i32) * v0.powi((l - j) as i32))
            .sum()
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, m| acc * (n - m) as f64 / (m + 1) as f64)
}

pub fn polynomial() -> impl Strategy<Value = Polynomial> {
    let monomials: Vec<(usize, usize)> = (0..=4).flat_map(|d| (0..=d).map(move |j| (d - j, j))).collect();
    (prop::collection::vec(-2.0f64..2.0, monomials.len()), prop::array::uniform2(-1.0f64..1.0)).prop_map(
        move |(cs, base)| Polynomial { coeffs: monomials.iter().copied().zip(cs).collect(), base },
    )
}

/// Jet coefficients of random polynomials equal their exact Taylor
/// coefficients.
pub fn jets_match_polynomials(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&polynomial(), |poly| {
        let e = ok_or_fail(Expr::parse(&poly.text(), &Vocabulary::new(SURFACE_VARS, [])))?;
        let jet = ok_or_fail(evaluate_jet(&e, poly.base, 5, &Bindings::new(), 8))?;
        for d in 0..=5 {
            for j in 0..=d {
                let i = d - j;
                let (got, want) = (jet.coeff(i, j), poly.taylor(i, j));
                prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()) * 16.0, "c{}{}: {} vs {}", i, j, got, want);
            }
        }
        Ok(())
    }))
}

/// Sectional curvature of the three space forms at random points and planes.
pub fn space_forms(cases: u32) -> Result<(), String> {
    let strat = (
        prop::array::uniform3(-0.5f64..0.5),
        prop::array::uniform3(-1.0f64..1.0),
        prop::array::uniform3(-1.0f64..1.0),
    );
    finish(runner(cases).run(&strat, |(x, a, b)| {
        let cross = frontlab::ambient::cross(&a, &b);
        prop_assume!(frontlab::ambient::dot(&cross, &cross) > 1e-4);
        for (chart, k) in [(AmbientChart::Euclidean, 0.0), (AmbientChart::sphere(), 1.0), (AmbientChart::hyperbolic(), -1.0)] {
            let got = ok_or_fail(chart.sectional_curvature(x, a, b))?;
            prop_assert!((got - k).abs() < 1e-8, "{}: {} vs {}", chart.name(), got, k);
        }
        Ok(())
    }))
}

fn random_map(base: [f64; 2], coeffs: &[f64]) -> Vec3<Jet2> {
    std::array::from_fn(|k| {
        Jet2::from_fn(base, 4, |i, j| if i + j == 0 { 0.1 * k as f64 } else { 0.3 * coeffs[(k * 7 + i * 3 + j) % coeffs.len()] })
    })
}

fn random_field(base: [f64; 2], coeffs: &[f64]) -> Vec3<Jet2> {
    std::array::from_fn(|k| Jet2::from_fn(base, 3, |i, j| coeffs[(k * 10 + i * 4 + j) % coeffs.len()]))
}

/// The Levi-Civita connection of the curved charts is metric-compatible and
/// torsion-free along random jets of maps.
pub fn connection_identities(cases: u32) -> Result<(), String> {
    let strat = (prop::collection::vec(-1.0f64..1.0, 40), prop::array::uniform2(-0.3f64..0.3));
    finish(runner(cases).run(&strat, |(coeffs, base)| {
        let f = random_map(base, &coeffs);
        let fu: Vec3<Jet2> = std::array::from_fn(|k| f[k].partial(Axis::U));
        let fv: Vec3<Jet2> = std::array::from_fn(|k| f[k].partial(Axis::V));
        let a = random_field(base, &coeffs);
        let b = random_field(base, &coeffs[5..]);
        for chart in [AmbientChart::sphere(), AmbientChart::hyperbolic()] {
            let amb = ok_or_fail(chart.at(&f, true))?;
            for (axis, fd) in [(Axis::U, &fu), (Axis::V, &fv)] {
                let lhs = amb.inner(&a, &b).partial(axis);
                let rhs = amb.inner(&covariant_derivative(&amb, fd, &a, axis), &b)
                    + amb.inner(&a, &covariant_derivative(&amb, fd, &b, axis));
                for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                    prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "compatibility: {} vs {}", x, y);
                }
            }
            let uv = covariant_derivative(&amb, &fu, &fv, Axis::U);
            let vu = covariant_derivative(&amb, &fv, &fu, Axis::V);
            for k in 0..3 {
                for (x, y) in uv[k].coeffs().iter().zip(vu[k].coeffs()) {
                    prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "torsion: {} vs {}", x, y);
                }
            }
        }
        Ok(())
    }))
}

/// Classification of a catalog point, for quick checks.
pub fn label_of(name: &str, p: [f64; 2]) -> frontlab::classify::Label {
    let s = FrontalSurface::resolve(&catalog::get(name).unwrap().spec()).unwrap();
    classify_point(&s, p).unwrap().label
}
