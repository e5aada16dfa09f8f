//! Built-in surfaces with known singular behaviour and golden values.

use serde::Serialize;

use crate::spec::SurfaceSpec;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Golden {
    pub quantity: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Entry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Point whose classification and invariants are the headline result.
    pub point: [f64; 2],
    pub seed: [f64; 2],
    pub goldens: &'static [Golden],
    #[serde(skip)]
    pub toml: &'static str,
}

impl Entry {
    pub fn spec(&self) -> SurfaceSpec {
        SurfaceSpec::parse(self.toml).expect("catalog specs parse")
    }
}

const fn g(quantity: &'static str, value: f64, tolerance: f64) -> Golden {
    Golden { quantity, value, tolerance }
}

const SQRT2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

static ENTRIES: &[Entry] = &[
    Entry {
        name: "cuspidal_edge",
        summary: "standard cuspidal edge (u, v², v³)",
        point: [0.0, 0.0],
        seed: [0.3, 0.0],
        goldens: &[g("kappa_c", 3.0 * FRAC_1_SQRT2, 1e-9), g("kappa_s", 0.0, 1e-9), g("kappa_nu", 0.0, 1e-9)],
        toml: r#"name = "cuspidal_edge"
description = "standard cuspidal edge"

[surface]
f = ["u", "v^2", "v^3"]

[trace]
seed = [0.3, 0.0]
step = 0.05
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "cone",
        summary: "cone whose singular curve maps to the apex",
        point: [1.0, 0.0],
        seed: [1.0, 0.0],
        goldens: &[g("kappa_nu", FRAC_1_SQRT2, 1e-9)],
        toml: r#"name = "cone"
description = "cone with apex at the origin; every singular point is of the second kind"

[surface]
f = ["v*cos(u)", "v*sin(u)", "v^2 + v"]
normal = ["-(1 + 2*v)*cos(u)/sqrt((1 + 2*v)^2 + 1)", "-(1 + 2*v)*sin(u)/sqrt((1 + 2*v)^2 + 1)", "1/sqrt((1 + 2*v)^2 + 1)"]

[domain]
u = [-3.2, 3.2]
v = [-0.4, 0.4]

[trace]
seed = [1.0, 0.0]
step = 0.1
points = [[1.0, 0.0]]
"#,
    },
    Entry {
        name: "swallowtail_family",
        summary: "two-parameter family with a swallowtail at the origin",
        point: [0.0, 0.0],
        seed: [0.3, 0.0],
        goldens: &[g("kappa_nu", 4.0, 1e-8), g("d_kappa_nu_du", -64.0 / 3.0, 1e-4)],
        toml: r#"name = "swallowtail_family"
description = "swallowtail perturbed by (u^2 - 2v)^2 (a, b, 0)"

[surface]
f = ["u^4 - 4*u^2*v + a*(u^2 - 2*v)^2", "u^3 - 3*u*v + b*(u^2 - 2*v)^2", "u^2/2 - v"]
normal = ["3/sqrt(9 + 64*u^2 + 16*(3*(a - 1)*u^2 - 8*b*u^3 - 6*a*v + 16*b*u*v)^2)", "-8*u/sqrt(9 + 64*u^2 + 16*(3*(a - 1)*u^2 - 8*b*u^3 - 6*a*v + 16*b*u*v)^2)", "-4*(3*(a - 1)*u^2 - 8*b*u^3 - 6*a*v + 16*b*u*v)/sqrt(9 + 64*u^2 + 16*(3*(a - 1)*u^2 - 8*b*u^3 - 6*a*v + 16*b*u*v)^2)"]

[params]
a = 0.5
b = 1.0

[domain]
u = [-0.6, 0.6]
v = [-0.3, 0.3]

[trace]
seed = [0.3, 0.0]
step = 0.02
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "peak",
        summary: "front with a second-kind point that is not a swallowtail",
        point: [0.0, 0.0],
        seed: [0.2, -0.08],
        goldens: &[],
        toml: r#"name = "peak"
description = "front whose singular set is 10u^3 + v = 0 with a non-transversal second-kind point"

[surface]
f = ["5*u^4 + 2*u*v", "v", "4*u^5 + u^2*v - v^2"]

[domain]
u = [-0.5, 0.5]
v = [-1.0, 1.0]

[trace]
seed = [0.2, -0.08]
step = 0.02
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "frontal_non_front",
        summary: "frontal that fails to be a front at the origin",
        point: [0.0, 0.0],
        seed: [0.3, 0.0],
        goldens: &[g("kappa_H", 0.0, 1e-9)],
        toml: r#"name = "frontal_non_front"
description = "frontal with a second-kind point where dν vanishes"

[surface]
f = ["u^2 + 2*v", "u^3 + 3*u*v", "u^5 + 5*u^3*v"]

[domain]
u = [-0.6, 0.6]
v = [-0.5, 0.5]

[trace]
seed = [0.3, 0.0]
step = 0.02
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "cuspidal_cross_cap",
        summary: "cuspidal cross cap with prescribed singular and limiting normal curvature",
        point: [0.0, 0.0],
        seed: [0.2, 0.0],
        goldens: &[g("kappa_s", 2.0, 1e-8), g("kappa_nu", 0.0, 1e-8), g("kappa_c", 0.0, 1e-9)],
        toml: r#"name = "cuspidal_cross_cap"
description = "cuspidal cross cap with singular curvature ks and limiting normal curvature kn"

[surface]
f = ["u", "ks*u^2/2 + v^2/2", "c*u*v^3/6 + kn*u^2/2"]
normal = ["(3*c*ks*u^2*v - c*v^3 - 6*kn*u)/sqrt(9*c^2*u^2*v^2 + (c*v*(v^2 - 3*ks*u^2) + 6*kn*u)^2 + 36)", "-3*c*u*v/sqrt(9*c^2*u^2*v^2 + (c*v*(v^2 - 3*ks*u^2) + 6*kn*u)^2 + 36)", "6/sqrt(9*c^2*u^2*v^2 + (c*v*(v^2 - 3*ks*u^2) + 6*kn*u)^2 + 36)"]

[params]
ks = 2.0
kn = 0.0
c = 6.0

[domain]
u = [-0.5, 0.5]
v = [-0.5, 0.5]

[trace]
seed = [0.2, 0.0]
step = 0.02
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "five_halves",
        summary: "5/2-cuspidal edges along the u-axis",
        point: [0.0, 0.0],
        seed: [0.2, 0.0],
        goldens: &[g("kappa_s", 2.0, 1e-8), g("kappa_nu", 2.0, 1e-8)],
        toml: r#"name = "five_halves"
description = "frontal with 5/2-cuspidal edges; not a front on the singular curve"

[surface]
f = ["u", "a*u^2 + v^2", "c*u^2 + b*v^5"]
normal = ["(10*a*b*u*v^3 - 4*c*u)/sqrt((4*c*u - 10*a*b*u*v^3)^2 + 25*b^2*v^6 + 4)", "-5*b*v^3/sqrt((4*c*u - 10*a*b*u*v^3)^2 + 25*b^2*v^6 + 4)", "2/sqrt((4*c*u - 10*a*b*u*v^3)^2 + 25*b^2*v^6 + 4)"]

[params]
a = 1.0
b = 1.0
c = 1.0

[domain]
u = [-0.5, 0.5]
v = [-0.5, 0.5]

[trace]
seed = [0.2, 0.0]
step = 0.02
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "cusp_k",
        summary: "cuspidal edge (u, v², v³ + a u^k) with a tunable contact order",
        point: [0.0, 0.0],
        seed: [0.2, 0.0],
        goldens: &[],
        toml: r#"name = "cusp_k"
description = "cuspidal edge family; the product curvature vanishes to order k - 2 at the origin"

[surface]
f = ["u", "v^2", "v^3 + a*u^k"]

[params]
a = 1.0
k = 3

[domain]
u = [-0.5, 0.5]
v = [-0.5, 0.5]

[trace]
seed = [0.2, 0.0]
step = 0.02
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "ccr_bounded",
        summary: "cuspidal cross cap with nonzero limiting normal curvature",
        point: [0.0, 0.0],
        seed: [0.2, 0.0],
        goldens: &[g("kappa_nu", 2.0, 1e-8)],
        toml: r#"name = "ccr_bounded"
description = "cuspidal cross cap whose Gaussian curvature is rationally bounded but not rationally continuous"

[surface]
f = ["u", "v^2", "u*v^3 + u^2"]
normal = ["-2*(2*u + v^3)/sqrt(4 + 4*(2*u + v^3)^2 + 9*u^2*v^2)", "-3*u*v/sqrt(4 + 4*(2*u + v^3)^2 + 9*u^2*v^2)", "2/sqrt(4 + 4*(2*u + v^3)^2 + 9*u^2*v^2)"]

[domain]
u = [-0.5, 0.5]
v = [-0.5, 0.5]

[trace]
seed = [0.2, 0.0]
step = 0.02
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "developable",
        summary: "tangent developable built on a latitude circle of the unit sphere",
        point: [0.0, 0.0],
        seed: [0.2, 0.0],
        // latitude at polar angle phi = pi/3 has geodesic curvature cot(phi)
        goldens: &[g("kappa_c", -2.0 / 1.732_050_807_568_877_2, 1e-8)],
        toml: r#"name = "developable"
description = "v xi(u) + a * integral of xi, xi a unit-speed latitude circle at polar angle phi"

[surface]
f = ["v*sin(phi)*cos(u/sin(phi)) + a*sin(phi)^2*sin(u/sin(phi))", "v*sin(phi)*sin(u/sin(phi)) + a*sin(phi)^2*(1 - cos(u/sin(phi)))", "v*cos(phi) + a*u*cos(phi)"]

[params]
a = 1.0
phi = 1.0471975511965976

[domain]
u = [-1.0, 1.0]
v = [-0.5, 0.5]

[trace]
seed = [0.2, 0.0]
step = 0.05
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "sw2",
        summary: "front with a swallowtail at the origin and explicit second-kind invariants",
        point: [0.0, 0.0],
        seed: [0.3, 0.0],
        goldens: &[
            g("kappa_H", 1.0, 1e-6),
            g("tau_s", 2.0, 1e-6),
            g("tau_c", SQRT2, 1e-6),
            g("kappa_nu", -1.0, 1e-6),
            g("hat_K", -1.0, 1e-6),
        ],
        toml: r#"name = "sw2"
description = "swallowtail with null field d/du - u d/dv along the u-axis"

[surface]
f = ["v + u^2/2 - b^2*u^2*v/2 - b^2*u^4/8", "b*u^3/3 + b*u*v", "c*v^2/2"]
normal = ["2*b*c*(u^2 + v)/sqrt(b^6*u^4 + b^4*u^2*(c^2*(u^2 + 2*v)^2 + 4) + 4*b^2*(c^2*v^2 + 1) + 4*c^2*u^2)", "c*u*(b^2*(u^2 + 2*v) - 2)/sqrt(b^6*u^4 + b^4*u^2*(c^2*(u^2 + 2*v)^2 + 4) + 4*b^2*(c^2*v^2 + 1) + 4*c^2*u^2)", "-b*(b^2*u^2 + 2)/sqrt(b^6*u^4 + b^4*u^2*(c^2*(u^2 + 2*v)^2 + 4) + 4*b^2*(c^2*v^2 + 1) + 4*c^2*u^2)"]

[params]
b = 1.0
c = 1.0

[domain]
u = [-0.8, 0.8]
v = [-0.5, 0.5]

[trace]
seed = [0.3, 0.0]
step = 0.02
points = [[0.0, 0.0]]
"#,
    },
    Entry {
        name: "cuspidal_edge_s3",
        summary: "small cuspidal edge in the stereographic chart of the unit 3-sphere",
        point: [0.0, 0.0],
        seed: [0.2, 0.0],
        goldens: &[],
        toml: r#"name = "cuspidal_edge_s3"
description = "cuspidal edge placed in a curved ambient space"

[surface]
f = ["0.3*u", "0.3*v^2 + 0.1*u^2", "0.3*v^3 + 0.05*u^2"]

[metric]
type = "sphere"

[domain]
u = [-0.5, 0.5]
v = [-0.5, 0.5]

[trace]
seed = [0.2, 0.0]
step = 0.02
points = [[0.0, 0.0]]
"#,
    },
];

pub fn entries() -> &'static [Entry] {
    ENTRIES
}

pub fn get(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// Parsed spec of a catalog entry with parameter overrides applied.
pub fn spec_with(name: &str, params: &[(&str, f64)]) -> Option<SurfaceSpec> {
    let mut spec = get(name)?.spec();
    for (k, v) in params {
        spec.set_param(k, *v).ok()?;
    }
    Some(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses_and_round_trips() {
        assert!(entries().len() >= 11);
        for e in entries() {
            let spec = e.spec();
            assert_eq!(spec.name.as_deref(), Some(e.name));
            let again = SurfaceSpec::parse(&spec.to_toml()).unwrap();
            assert_eq!(again.params, spec.params, "{}", e.name);
            assert_eq!(again.trace, spec.trace, "{}", e.name);
            assert!(spec.trace.points.contains(&e.point), "{}", e.name);
            assert!(spec.domain.contains(e.seed), "{}", e.name);
            assert!(spec.domain.contains(e.point), "{}", e.name);
        }
    }

    #[test]
    fn overrides() {
        let s = spec_with("sw2", &[("b", 2.0)]).unwrap();
        assert_eq!(s.params["b"], 2.0);
        assert!(spec_with("sw2", &[("zz", 1.0)]).is_none());
        assert!(get("nope").is_none());
    }
}
