//! Surface spec documents.
//!
//! A spec is a TOML document whose string values are expressions:
//!
//! ```toml
//! name = "sw2"                       # optional
//! description = "..."                # optional
//!
//! [surface]
//! f = ["u", "v^2", "v^3"]            # required, expressions in u, v
//! normal = ["0", "-3*v", "2"]        # optional unit normal, unnormalized is rejected
//!
//! [params]                           # optional, name = number
//! a = 1.0
//!
//! [metric]                           # optional, defaults to euclidean
//! type = "euclidean"                 # euclidean | sphere | hyperbolic | general
//! g = [["1","0","0"], ["0","1","0"], ["0","0","(1+x1)^2"]]   # general only
//!
//! [domain]                           # optional, defaults to [-1, 1]²
//! u = [-1.0, 1.0]
//! v = [-1.0, 1.0]
//!
//! [trace]                            # optional hints for the analysis driver
//! seed = [0.3, 0.0]
//! step = 0.02
//! max_samples = 200
//! points = [[0.0, 0.0]]               # points given a full analysis
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;
use toml::Spanned;

use crate::ambient::AmbientChart;
use crate::expr::{
    is_reserved, Bindings, Expr, ParseError, ParseErrorKind, Vocabulary, AMBIENT_VARS, SURFACE_VARS,
};

/// Rectangle in the parameter plane.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Domain {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl Default for Domain {
    fn default() -> Self {
        Domain { u: [-1.0, 1.0], v: [-1.0, 1.0] }
    }
}

impl Domain {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.u[0] && p[0] <= self.u[1] && p[1] >= self.v[0] && p[1] <= self.v[1]
    }

    /// Largest side length; used as a length scale.
    pub fn size(&self) -> f64 {
        (self.u[1] - self.u[0]).max(self.v[1] - self.v[0])
    }
}

/// Optional tracing hints stored with a spec.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize)]
pub struct TraceHints {
    pub seed: Option<[f64; 2]>,
    pub step: Option<f64>,
    pub max_samples: Option<usize>,
    /// Points singled out for a full analysis.
    pub points: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub name: Option<String>,
    pub description: Option<String>,
    pub f: [Expr; 3],
    pub normal: Option<[Expr; 3]>,
    pub params: Bindings,
    pub chart: AmbientChart,
    pub domain: Domain,
    pub trace: TraceHints,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    name: Option<String>,
    description: Option<String>,
    surface: Option<RawSurface>,
    #[serde(default)]
    params: BTreeMap<String, Spanned<toml::Value>>,
    metric: Option<RawMetric>,
    domain: Option<RawDomain>,
    trace: Option<RawTrace>,
}

type SpannedList = Spanned<Vec<Spanned<String>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    f: Option<SpannedList>,
    normal: Option<SpannedList>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    #[serde(rename = "type")]
    kind: Option<Spanned<String>>,
    g: Option<Spanned<Vec<SpannedList>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    u: Option<[f64; 2]>,
    v: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrace {
    seed: Option<[f64; 2]>,
    step: Option<f64>,
    max_samples: Option<usize>,
    points: Option<Vec<[f64; 2]>>,
}

fn doc_err(text: &str, offset: usize, msg: impl Into<String>) -> ParseError {
    ParseError::at(ParseErrorKind::Document(msg.into()), text, offset)
}

/// Parse the expression held in a TOML string, reporting positions in the
/// enclosing document.
fn parse_in_doc(doc: &str, s: &Spanned<String>, vocab: &Vocabulary<'_>) -> Result<Expr, ParseError> {
    let start = s.span().start;
    let quote = if doc[start..].starts_with("\"\"\"") || doc[start..].starts_with("'''") { 3 } else { 1 };
    Expr::parse(s.get_ref(), vocab).map_err(|e| ParseError::at(e.kind, doc, start + quote + e.offset))
}

fn triple(doc: &str, list: &SpannedList, what: &str, vocab: &Vocabulary<'_>) -> Result<[Expr; 3], ParseError> {
    if list.get_ref().len() != 3 {
        return Err(doc_err(
            doc,
            list.span().start,
            format!("{what} needs exactly 3 components, found {}", list.get_ref().len()),
        ));
    }
    let v: Vec<Expr> = list.get_ref().iter().map(|s| parse_in_doc(doc, s, vocab)).collect::<Result<_, _>>()?;
    Ok([v[0].clone(), v[1].clone(), v[2].clone()])
}

impl SurfaceSpec {
    /// Parse a spec document.
    pub fn parse(text: &str) -> Result<SurfaceSpec, ParseError> {
        let raw: RawDoc = toml::from_str(text).map_err(|e| {
            let off = e.span().map(|s| s.start).unwrap_or(0);
            doc_err(text, off, e.message().to_string())
        })?;

        let mut params = Bindings::new();
        for (name, value) in &raw.params {
            if is_reserved(name) {
                return Err(doc_err(text, value.span().start, format!("parameter name '{name}' is reserved")));
            }
            let x = match value.get_ref() {
                toml::Value::Float(x) => *x,
                toml::Value::Integer(i) => *i as f64,
                _ => return Err(doc_err(text, value.span().start, format!("parameter '{name}' must be a number"))),
            };
            params.insert(name.clone(), x);
        }
        let names: Vec<String> = params.keys().cloned().collect();
        let surf_vocab = Vocabulary::new(SURFACE_VARS, names.clone());
        let amb_vocab = Vocabulary::new(AMBIENT_VARS, names);

        let surface = raw.surface.ok_or_else(|| doc_err(text, text.len(), "missing [surface] section"))?;
        let f_list = surface.f.ok_or_else(|| doc_err(text, text.len(), "missing f component in [surface]"))?;
        let f = triple(text, &f_list, "f", &surf_vocab)?;
        let normal = surface.normal.as_ref().map(|n| triple(text, n, "normal", &surf_vocab)).transpose()?;

        let chart = match raw.metric {
            None => AmbientChart::Euclidean,
            Some(m) => {
                let kind = m.kind.as_ref().map(|k| k.get_ref().as_str());
                let kind_at = m.kind.as_ref().map(|k| k.span().start).unwrap_or(0);
                match (kind, &m.g) {
                    (None | Some("euclidean"), None) => AmbientChart::Euclidean,
                    (Some("sphere"), None) => AmbientChart::sphere(),
                    (Some("hyperbolic"), None) => AmbientChart::hyperbolic(),
                    (None | Some("general"), Some(g)) => {
                        if g.get_ref().len() != 3 {
                            return Err(doc_err(text, g.span().start, "metric g must be 3x3"));
                        }
                        let rows: Vec<[Expr; 3]> =
                            g.get_ref().iter().map(|r| triple(text, r, "metric row", &amb_vocab)).collect::<Result<_, _>>()?;
                        let g3 = [rows[0].clone(), rows[1].clone(), rows[2].clone()];
                        for i in 0..3 {
                            for j in 0..i {
                                if g3[i][j] != g3[j][i] {
                                    return Err(doc_err(text, g.span().start, "metric g must be symmetric"));
                                }
                            }
                        }
                        AmbientChart::General { name: "general".into(), g: Box::new(g3) }
                    }
                    (Some("general"), None) => return Err(doc_err(text, kind_at, "general metric needs g")),
                    (Some(k), Some(_)) if k != "general" => {
                        return Err(doc_err(text, kind_at, format!("metric type '{k}' does not take g")))
                    }
                    (Some(k), _) => return Err(doc_err(text, kind_at, format!("unknown metric type '{k}'"))),
                }
            }
        };

        let mut domain = Domain::default();
        if let Some(d) = raw.domain {
            if let Some(u) = d.u {
                domain.u = u;
            }
            if let Some(v) = d.v {
                domain.v = v;
            }
        }
        if !(domain.u[0] < domain.u[1] && domain.v[0] < domain.v[1]) {
            return Err(doc_err(text, 0, "domain bounds must satisfy lo < hi"));
        }
        let trace = raw
            .trace
            .map(|t| TraceHints { seed: t.seed, step: t.step, max_samples: t.max_samples, points: t.points.unwrap_or_default() })
            .unwrap_or_default();

        Ok(SurfaceSpec { name: raw.name, description: raw.description, f, normal, params, chart, domain, trace })
    }

    /// Spec for a Euclidean surface given by three expressions in u, v.
    pub fn from_map(f: [&str; 3]) -> Result<SurfaceSpec, ParseError> {
        let vocab = Vocabulary::new(SURFACE_VARS, []);
        let f = [Expr::parse(f[0], &vocab)?, Expr::parse(f[1], &vocab)?, Expr::parse(f[2], &vocab)?];
        Ok(SurfaceSpec {
            name: None,
            description: None,
            f,
            normal: None,
            params: Bindings::new(),
            chart: AmbientChart::Euclidean,
            domain: Domain::default(),
            trace: TraceHints::default(),
        })
    }

    /// Override a declared parameter.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), ParseError> {
        match self.params.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(ParseError {
                kind: ParseErrorKind::Document(format!("unknown parameter '{name}'")),
                offset: 0,
                line: 0,
                column: 0,
            }),
        }
    }

    /// Replace the map (and normal) by their composition with
    /// `(u, v) ↦ (U(u,v), V(u,v))`.
    pub fn reparametrize(&self, uv: [&Expr; 2]) -> SurfaceSpec {
        let subs = [uv[0].clone(), uv[1].clone()];
        let mut out = self.clone();
        out.f = self.f.clone().map(|e| e.substitute(&subs));
        out.normal = self.normal.clone().map(|n| n.map(|e| e.substitute(&subs)));
        out
    }

    /// Serialize back to the document format.
    pub fn to_toml(&self) -> String {
        let q = |s: &str| toml::Value::String(s.to_string()).to_string();
        let list = |es: &[Expr], vars: &[&str]| {
            let items: Vec<String> = es.iter().map(|e| q(&e.render(vars))).collect();
            format!("[{}]", items.join(", "))
        };
        let mut out = String::new();
        if let Some(n) = &self.name {
            out += &format!("name = {}\n", q(n));
        }
        if let Some(d) = &self.description {
            out += &format!("description = {}\n", q(d));
        }
        if !out.is_empty() {
            out.push('\n');
        }
        out += "[surface]\n";
        out += &format!("f = {}\n", list(&self.f, SURFACE_VARS));
        if let Some(n) = &self.normal {
            out += &format!("normal = {}\n", list(n, SURFACE_VARS));
        }
        if !self.params.is_empty() {
            out += "\n[params]\n";
            for (k, v) in &self.params {
                out += &format!("{k} = {v:?}\n");
            }
        }
        match &self.chart {
            AmbientChart::Euclidean => {}
            AmbientChart::General { name, g } if name == "sphere" || name == "hyperbolic" => {
                let _ = g;
                out += &format!("\n[metric]\ntype = {}\n", q(name));
            }
            AmbientChart::General { g, .. } => {
                let rows: Vec<String> = g.iter().map(|r| list(r, AMBIENT_VARS)).collect();
                out += &format!("\n[metric]\ntype = \"general\"\ng = [{}]\n", rows.join(", "));
            }
        }
        out += &format!(
            "\n[domain]\nu = [{:?}, {:?}]\nv = [{:?}, {:?}]\n",
            self.domain.u[0], self.domain.u[1], self.domain.v[0], self.domain.v[1]
        );
        let t = &self.trace;
        if t.seed.is_some() || t.step.is_some() || t.max_samples.is_some() || !t.points.is_empty() {
            out += "\n[trace]\n";
            if let Some(s) = t.seed {
                out += &format!("seed = [{:?}, {:?}]\n", s[0], s[1]);
            }
            if let Some(s) = t.step {
                out += &format!("step = {s:?}\n");
            }
            if let Some(m) = t.max_samples {
                out += &format!("max_samples = {m}\n");
            }
            if !t.points.is_empty() {
                let pts: Vec<String> = t.points.iter().map(|p| format!("[{:?}, {:?}]", p[0], p[1])).collect();
                out += &format!("points = [{}]\n", pts.join(", "));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cuspidal_edge() {
        let s = SurfaceSpec::parse("[surface]\nf = [\"u\", \"v^2\", \"v^3\"]\n").unwrap();
        assert!(s.normal.is_none());
        assert!(s.chart.is_euclidean());
        assert_eq!(s.domain, Domain::default());
    }

    #[test]
    fn parses_cone_with_normal_and_params() {
        let text = r#"
name = "cone"
[surface]
f = ["v*cos(u)", "v*sin(u)", "v^2+v"]
normal = ["-(1+2*v)*cos(u)/sqrt((1+2*v)^2+1)", "-(1+2*v)*sin(u)/sqrt((1+2*v)^2+1)", "1/sqrt((1+2*v)^2+1)"]
[params]
k = 2
[domain]
u = [-3.2, 3.2]
v = [-0.4, 0.4]
[trace]
seed = [1.0, 0.0]
step = 0.05
"#;
        let s = SurfaceSpec::parse(text).unwrap();
        assert_eq!(s.name.as_deref(), Some("cone"));
        assert!(s.normal.is_some());
        assert_eq!(s.params["k"], 2.0);
        assert_eq!(s.domain.u, [-3.2, 3.2]);
        assert_eq!(s.trace.seed, Some([1.0, 0.0]));
    }

    #[test]
    fn non_smooth_function_is_rejected_with_position() {
        let text = "[surface]\nf = [\"abs(u)\", \"v\", \"0\"]\n";
        let err = SurfaceSpec::parse(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonSmooth("abs".into()));
        assert_eq!((err.line, err.column), (2, 7));
    }

    #[test]
    fn document_errors() {
        let missing = SurfaceSpec::parse("[surface]\nnormal = [\"0\",\"0\",\"1\"]\n").unwrap_err();
        assert!(matches!(missing.kind, ParseErrorKind::Document(ref m) if m.contains("missing f")));
        let short = SurfaceSpec::parse("[surface]\nf = [\"u\", \"v\"]\n").unwrap_err();
        assert_eq!(short.line, 2);
        let syntax = SurfaceSpec::parse("[surface\nf = 1").unwrap_err();
        assert_eq!(syntax.line, 1);
        let unknown = SurfaceSpec::parse("[surface]\nf = [\"u\", \"w\", \"0\"]\n").unwrap_err();
        assert_eq!(unknown.kind, ParseErrorKind::UnknownIdentifier("w".into()));
        assert_eq!((unknown.line, unknown.column), (2, 12));
        let reserved = SurfaceSpec::parse("[surface]\nf = [\"u\", \"v\", \"0\"]\n[params]\npi = 3\n").unwrap_err();
        assert!(matches!(reserved.kind, ParseErrorKind::Document(_)));
        let asym = "[surface]\nf = [\"u\",\"v\",\"0\"]\n[metric]\ng = [[\"1\",\"x1\",\"0\"],[\"0\",\"1\",\"0\"],[\"0\",\"0\",\"1\"]]\n";
        assert!(SurfaceSpec::parse(asym).is_err());
    }

    #[test]
    fn metric_sections() {
        let s = SurfaceSpec::parse("[surface]\nf = [\"u\",\"v\",\"0\"]\n[metric]\ntype = \"sphere\"\n").unwrap();
        assert_eq!(s.chart.name(), "sphere");
        let g = "[surface]\nf = [\"u\",\"v\",\"0\"]\n[metric]\ng = [[\"1\",\"0\",\"0\"],[\"0\",\"1\",\"0\"],[\"0\",\"0\",\"(1+x1)^2\"]]\n";
        let s = SurfaceSpec::parse(g).unwrap();
        assert!(!s.chart.is_euclidean());
    }

    #[test]
    fn param_override_and_round_trip() {
        let text = "[surface]\nf = [\"u\", \"v^2\", \"v^3 + a*u^k\"]\n[params]\na = 1\nk = 3\n[metric]\ntype = \"hyperbolic\"\n";
        let mut s = SurfaceSpec::parse(text).unwrap();
        s.set_param("k", 4.0).unwrap();
        assert!(s.set_param("zz", 1.0).is_err());
        let again = SurfaceSpec::parse(&s.to_toml()).unwrap();
        assert_eq!(again.params["k"], 4.0);
        assert_eq!(again.chart.name(), "hyperbolic");
        assert_eq!(again.f, s.f);
    }
}
