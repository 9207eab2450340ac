//! JSON file formats and machine-readable reports.
//!
//! Graph files:
//!
//! ```json
//! {
//!   "vertices": [{"id": "x1", "mu": 2.0}, {"id": "b1", "mu": 1.0}],
//!   "edges": [{"u": "x1", "v": "b1", "w": 1.0}],
//!   "omega": ["x1"]
//! }
//! ```
//!
//! Function files: `{"values": {"x1": 0.5, ...}}`, ids restricted to `Ω`,
//! missing ids read as zero. The `eigen` report (which nests the function
//! under `"u"`) is accepted as a function file as well.
//!
//! Numbers are written in the shortest form that reads back to the same
//! `f64`, so every report round-trips losslessly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cheeger::{CheegerReport, CutRecord};
use crate::continuation::SweepReport;
use crate::error::{Error, Result};
use crate::fig1::{CrossCheck, ReducedPair};
use crate::graph::{DirichletFunction, Domain, VertexSet, WeightedGraph};
use crate::one_laplacian::{Decomposition, Lambda11Report, StructureReport};
use crate::spectral::Eigenpair;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: String,
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub u: String,
    pub v: String,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
    pub omega: Vec<String>,
}

impl GraphFile {
    pub fn from_domain(d: &Domain) -> Self {
        let g = d.graph();
        GraphFile {
            vertices: (0..g.len())
                .map(|v| VertexEntry {
                    id: g.id(v).to_owned(),
                    mu: g.mu(v),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    u: g.id(e.u).to_owned(),
                    v: g.id(e.v).to_owned(),
                    w: e.w,
                })
                .collect(),
            omega: d.omega_ids(),
        }
    }

    pub fn into_domain(self) -> Result<Domain> {
        let mut b = WeightedGraph::builder();
        for v in self.vertices {
            b = b.vertex(v.id, v.mu);
        }
        for e in self.edges {
            b = b.edge(e.u, e.v, e.w);
        }
        let g = Arc::new(b.build()?);
        let mut seen = std::collections::HashSet::new();
        for id in &self.omega {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateVertex(id.clone()));
            }
        }
        Domain::from_ids(g, &self.omega)
    }
}

pub fn domain_from_json(text: &str) -> Result<Domain> {
    serde_json::from_str::<GraphFile>(text)?.into_domain()
}

pub fn domain_to_json(d: &Domain) -> String {
    to_json(&GraphFile::from_domain(d))
}

pub fn load_domain(path: impl AsRef<Path>) -> Result<Domain> {
    domain_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub values: BTreeMap<String, f64>,
}

impl FunctionFile {
    pub fn from_function(d: &Domain, u: &DirichletFunction) -> Self {
        FunctionFile {
            values: (0..d.len())
                .map(|k| (d.id(k).to_owned(), u.get(k)))
                .collect(),
        }
    }

    pub fn into_function(self, d: &Domain) -> Result<DirichletFunction> {
        let pairs: Vec<(String, f64)> = self.values.into_iter().collect();
        DirichletFunction::from_ids(d, &pairs)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FunctionInput {
    Plain(FunctionFile),
    Nested { u: FunctionFile },
}

pub fn function_from_json(d: &Domain, text: &str) -> Result<DirichletFunction> {
    let file = match serde_json::from_str::<FunctionInput>(text) {
        Ok(FunctionInput::Plain(f)) | Ok(FunctionInput::Nested { u: f }) => f,
        // re-parse as the plain form to surface a precise error location
        Err(_) => serde_json::from_str::<FunctionFile>(text)?,
    };
    file.into_function(d)
}

pub fn load_function(d: &Domain, path: impl AsRef<Path>) -> Result<DirichletFunction> {
    function_from_json(d, &std::fs::read_to_string(path)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CutJson {
    pub subset: Vec<String>,
    pub cut_weight: f64,
    pub volume: f64,
    pub ratio: f64,
}

impl CutJson {
    fn new(d: &Domain, c: &CutRecord) -> Self {
        CutJson {
            subset: d.graph().set_ids(&c.subset),
            cut_weight: c.cut_weight,
            volume: c.volume,
            ratio: c.ratio,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheegerJson {
    pub h: f64,
    pub h_exact: String,
    pub domain_size: usize,
    pub cuts: Vec<CutJson>,
}

impl CheegerJson {
    pub fn new(d: &Domain, r: &CheegerReport) -> Self {
        CheegerJson {
            h: r.h,
            h_exact: r.h_exact_string(),
            domain_size: r.domain_size,
            cuts: r.cuts.iter().map(|c| CutJson::new(d, c)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenJson {
    pub p: f64,
    pub lambda: f64,
    pub u: FunctionFile,
    pub residual: f64,
    pub iterations: usize,
}

impl EigenJson {
    pub fn new(d: &Domain, e: &Eigenpair) -> Self {
        EigenJson {
            p: e.p,
            lambda: e.lambda,
            u: FunctionFile::from_function(d, &e.u),
            residual: e.residual,
            iterations: e.iterations,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub coefficients: Vec<f64>,
    pub sets: Vec<Vec<String>>,
    pub levels: Vec<f64>,
}

impl DecompositionJson {
    pub fn new(d: &Domain, dec: &Decomposition) -> Self {
        DecompositionJson {
            coefficients: dec.coefficients.clone(),
            sets: dec.sets.iter().map(|s| d.graph().set_ids(s)).collect(),
            levels: dec.levels.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelJson {
    pub set: Vec<String>,
    pub ratio: f64,
    pub is_cheeger_cut: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lambda11Json {
    pub min_indicator_quotient: f64,
    pub indicator_exact: bool,
    pub samples: usize,
    pub min_sample_quotient: f64,
    pub holds: bool,
}

impl From<&Lambda11Report> for Lambda11Json {
    fn from(r: &Lambda11Report) -> Self {
        Lambda11Json {
            min_indicator_quotient: r.min_indicator_quotient,
            indicator_exact: r.indicator_exact,
            samples: r.samples,
            min_sample_quotient: r.min_sample_quotient,
            holds: r.holds,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyJson {
    pub passed: bool,
    pub h: f64,
    pub rayleigh_1: f64,
    pub rayleigh_matches_h: bool,
    pub nested: bool,
    pub levels: Vec<LevelJson>,
    pub decomposition: DecompositionJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda11: Option<Lambda11Json>,
}

impl VerifyJson {
    pub fn new(d: &Domain, s: &StructureReport, lambda11: Option<&Lambda11Report>) -> Self {
        let passed = s.holds() && lambda11.is_none_or(|l| l.holds);
        VerifyJson {
            passed,
            h: s.h,
            rayleigh_1: s.rayleigh,
            rayleigh_matches_h: s.rayleigh_matches,
            nested: s.nested,
            levels: s
                .levels
                .iter()
                .map(|l| LevelJson {
                    set: d.graph().set_ids(&l.set),
                    ratio: l.ratio,
                    is_cheeger_cut: l.is_cheeger_cut,
                })
                .collect(),
            decomposition: DecompositionJson::new(d, &s.decomposition),
            lambda11: lambda11.map(Lambda11Json::from),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRecordJson {
    pub p: f64,
    pub lambda: f64,
    pub u: FunctionFile,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepJson {
    pub schedule: Vec<f64>,
    pub h: Option<f64>,
    pub records: Vec<SweepRecordJson>,
    pub limit_estimate: FunctionFile,
    pub decomposition: DecompositionJson,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl SweepJson {
    pub fn new(r: &SweepReport) -> Self {
        let d = &r.domain;
        SweepJson {
            schedule: r.schedule.clone(),
            h: r.h(),
            records: r
                .records
                .iter()
                .map(|rec| SweepRecordJson {
                    p: rec.p,
                    lambda: rec.lambda,
                    u: FunctionFile::from_function(d, &rec.u),
                    residual: rec.residual,
                    iterations: rec.iterations,
                })
                .collect(),
            limit_estimate: FunctionFile::from_function(d, &r.limit_estimate),
            decomposition: DecompositionJson::new(d, &r.decomposition),
            converged: r.converged,
            warnings: r.warnings.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Flat CSV of a sweep: `p,lambda,residual,<one column per Ω vertex>`.
pub fn sweep_csv(r: &SweepReport) -> String {
    let d = &r.domain;
    let mut out = String::from("p,lambda,residual");
    for id in d.omega_ids() {
        out.push(',');
        out.push_str(&id);
    }
    out.push('\n');
    // same shortest round-trip spelling as the JSON output
    let num = |x: f64| serde_json::to_string(&x).expect("f64 serializes");
    for rec in &r.records {
        let _ = write!(out, "{},{},{}", num(rec.p), num(rec.lambda), num(rec.residual));
        for &x in rec.u.values() {
            let _ = write!(out, ",{}", num(x));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducedJson {
    pub p: f64,
    pub lambda: f64,
    pub t: f64,
    pub v: FunctionFile,
    pub normalized: FunctionFile,
}

impl ReducedJson {
    pub fn new(d: &Domain, r: &ReducedPair) -> Self {
        ReducedJson {
            p: r.p,
            lambda: r.lambda,
            t: r.t,
            v: FunctionFile::from_function(d, &r.v),
            normalized: FunctionFile::from_function(d, &r.normalized(d)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossCheckJson {
    pub p: f64,
    pub lambda_solver: f64,
    pub lambda_reduced: f64,
    pub u_distance: f64,
    pub residual: f64,
}

impl From<&CrossCheck> for CrossCheckJson {
    fn from(c: &CrossCheck) -> Self {
        CrossCheckJson {
            p: c.p,
            lambda_solver: c.lambda_solver,
            lambda_reduced: c.lambda_reduced,
            u_distance: c.u_distance,
            residual: c.residual,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExampleJson {
    pub xhat: f64,
    pub xhat_cubic_residual: f64,
    pub limit: FunctionFile,
    pub reduced: Vec<ReducedJson>,
    pub cross_validation: Vec<CrossCheckJson>,
}

impl ExampleJson {
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Ids of a vertex set, for callers assembling their own reports.
pub fn set_ids(d: &Domain, s: &VertexSet) -> Vec<String> {
    d.graph().set_ids(s)
}
