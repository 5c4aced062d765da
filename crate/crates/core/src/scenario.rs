//! Versioned JSON scenario files.
//!
//! A scenario bundles every input a command may need: sheaf surrogates and
//! candidate families, stability parameters, quiver representations,
//! intersection tensors and per-command parameters. Objects refer to each
//! other by label; [`Scenario::parse`] checks that every label resolves.

use std::collections::HashSet;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::cone::{example, ChernData, DivisorClass, IntersectionTensor};
use crate::field::{ExactField, Field, FieldName, FieldSpec, GaloisField};
use crate::kahler::ChTdPairing;
use crate::linalg::Mat;
use crate::quiver::{DimVector, QuiverSpec, Representation, Strategy};
use crate::sheaf::{FamilySpec, SheafClass, StabilityParameter};
use crate::Scalar;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("missing section: {0}")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRef {
    pub name: String,
    pub candidates: Vec<String>,
    #[serde(default)]
    pub relation: Vec<(String, String)>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpec {
    pub label: String,
    pub dims: DimVector,
    /// `maps[i][j][k]`: the `k`-th arrow `v_i → w_j` as rows of a
    /// `dim W_j × dim V_i` matrix.
    pub maps: Vec<Vec<Vec<Vec<Vec<Value>>>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum TensorSource {
    Bundled { example: String },
    Explicit(IntersectionTensor),
}

#[derive(Clone, Debug, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    #[serde(flatten)]
    pub source: TensorSource,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeParams {
    pub tensor: Option<String>,
    pub l: Option<DivisorClass>,
    pub beta: Option<DivisorClass>,
    pub gamma: Option<DivisorClass>,
    pub gamma0: Option<DivisorClass>,
    pub gamma_inf: Option<DivisorClass>,
    pub l1: Option<DivisorClass>,
    pub l2: Option<DivisorClass>,
    pub chern: Option<ChernData>,
    pub chern_a: Option<ChernData>,
    pub chern_b: Option<ChernData>,
    pub beta_const: Option<Scalar>,
    pub t_samples: Option<usize>,
    pub s_resolution: Option<u32>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaParams {
    pub tensor: Option<String>,
    pub omega: DivisorClass,
    pub candidates: Vec<DivisorClass>,
    /// Optional `ch·Todd` data for which `P^ω` is reported.
    #[serde(default)]
    pub pairing: Option<ChTdPairing>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub vertices: [Vec<Scalar>; 3],
    pub divisions: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VgitParams {
    pub start: Vec<Scalar>,
    pub end: Vec<Scalar>,
    #[serde(default)]
    pub steps: Option<usize>,
    /// Labels of the representations to trace; all when absent.
    #[serde(default)]
    pub samples: Option<Vec<String>>,
    /// Sub-dimension vectors whose walls are reported alongside the trace.
    #[serde(default)]
    pub candidates: Option<Vec<DimVector>>,
    #[serde(default)]
    pub grid: Option<GridParams>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub line_bundle_count: Option<usize>,
    #[serde(default)]
    pub sheaf_classes: Vec<SheafClass>,
    /// Label of the sheaf whose stability is tested.
    #[serde(default)]
    pub ambient: Option<String>,
    #[serde(default)]
    pub families: Vec<FamilyRef>,
    #[serde(default)]
    pub sigma: Option<StabilityParameter>,
    #[serde(default)]
    pub sigmas: Vec<StabilityParameter>,
    #[serde(default)]
    pub quiver: Option<QuiverSpec>,
    #[serde(default)]
    pub representations: Vec<RepSpec>,
    #[serde(default)]
    pub strategy: Option<Strategy>,
    #[serde(default)]
    pub tensors: Vec<NamedTensor>,
    #[serde(default)]
    pub cone: Option<ConeParams>,
    #[serde(default)]
    pub omega: Option<OmegaParams>,
    #[serde(default)]
    pub vgit: Option<VgitParams>,
}

/// A representation over whichever field the scenario declares.
pub enum AnyRep {
    Finite(Representation<GaloisField>),
    Exact(Representation<ExactField>),
}

impl AnyRep {
    pub fn dims(&self) -> &DimVector {
        match self {
            AnyRep::Finite(r) => &r.dims,
            AnyRep::Exact(r) => &r.dims,
        }
    }
}

fn unique<'a>(labels: impl IntoIterator<Item = &'a str>) -> Result<HashSet<&'a str>, ScenarioError> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(ScenarioError::DuplicateLabel(l.to_string()));
        }
    }
    Ok(seen)
}

fn resolve(known: &HashSet<&str>, label: &str) -> Result<(), ScenarioError> {
    if known.contains(label) {
        Ok(())
    } else {
        Err(ScenarioError::UnknownLabel(label.to_string()))
    }
}

impl Scenario {
    /// Parses and validates; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema != SCHEMA_VERSION {
            return Err(ScenarioError::Schema(self.schema));
        }
        let sheaves = unique(self.sheaf_classes.iter().map(|c| c.label.as_str()))?;
        if let Some(a) = &self.ambient {
            resolve(&sheaves, a)?;
        }
        unique(self.families.iter().map(|f| f.name.as_str()))?;
        for f in &self.families {
            for c in &f.candidates {
                resolve(&sheaves, c)?;
            }
        }
        for c in &self.sheaf_classes {
            c.validate().map_err(|e| ScenarioError::Invalid(format!("sheaf {:?}: {e}", c.label)))?;
            if let Some(j0) = self.line_bundle_count {
                if c.j0() != j0 {
                    return Err(ScenarioError::Invalid(format!(
                        "sheaf {:?} has data for {} bundles, line_bundle_count is {j0}",
                        c.label,
                        c.j0()
                    )));
                }
            }
        }
        let reps = unique(self.representations.iter().map(|r| r.label.as_str()))?;
        if let Some(v) = &self.vgit {
            for l in v.samples.iter().flatten() {
                resolve(&reps, l)?;
            }
        }
        let tensors = unique(self.tensors.iter().map(|t| t.name.as_str()))?;
        let tensor_refs = self
            .cone
            .iter()
            .filter_map(|c| c.tensor.as_deref())
            .chain(self.omega.iter().filter_map(|o| o.tensor.as_deref()));
        for t in tensor_refs {
            resolve(&tensors, t)?;
        }
        for t in &self.tensors {
            if let TensorSource::Bundled { example: name } = &t.source {
                if example(name).is_none() {
                    return Err(ScenarioError::Invalid(format!("no bundled example named {name:?}")));
                }
            }
        }
        if !self.representations.is_empty() {
            if self.quiver.is_none() {
                return Err(ScenarioError::Missing("quiver"));
            }
            self.representations()?;
        }
        Ok(())
    }

    pub fn sheaf(&self, label: &str) -> Result<&SheafClass, ScenarioError> {
        self.sheaf_classes
            .iter()
            .find(|c| c.label == label)
            .ok_or_else(|| ScenarioError::UnknownLabel(label.to_string()))
    }

    pub fn ambient_class(&self) -> Result<&SheafClass, ScenarioError> {
        let label = self.ambient.as_deref().ok_or(ScenarioError::Missing("ambient"))?;
        self.sheaf(label)
    }

    /// The named family, or the first one.
    pub fn family(&self, name: Option<&str>) -> Result<FamilySpec, ScenarioError> {
        let f = match name {
            Some(n) => self
                .families
                .iter()
                .find(|f| f.name == n)
                .ok_or_else(|| ScenarioError::UnknownLabel(n.to_string()))?,
            None => self.families.first().ok_or(ScenarioError::Missing("families"))?,
        };
        Ok(FamilySpec {
            candidates: f
                .candidates
                .iter()
                .map(|c| self.sheaf(c).cloned())
                .collect::<Result<_, _>>()?,
            relation: f.relation.clone(),
        })
    }

    /// The named tensor, or the first one.
    pub fn tensor(&self, name: Option<&str>) -> Result<IntersectionTensor, ScenarioError> {
        let t = match name {
            Some(n) => self
                .tensors
                .iter()
                .find(|t| t.name == n)
                .ok_or_else(|| ScenarioError::UnknownLabel(n.to_string()))?,
            None => self.tensors.first().ok_or(ScenarioError::Missing("tensors"))?,
        };
        match &t.source {
            TensorSource::Explicit(t) => Ok(t.clone()),
            TensorSource::Bundled { example: name } => example(name)
                .map(|e| e.tensor)
                .ok_or_else(|| ScenarioError::Invalid(format!("no bundled example named {name:?}"))),
        }
    }

    pub fn field_spec(&self) -> FieldSpec {
        self.field.unwrap_or_else(FieldSpec::rational)
    }

    /// Every declared representation, built over the scenario field.
    pub fn representations(&self) -> Result<Vec<(String, AnyRep)>, ScenarioError> {
        let spec = self.quiver.clone().ok_or(ScenarioError::Missing("quiver"))?;
        spec.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        let field = self.field_spec();
        self.representations
            .iter()
            .map(|r| {
                let rep = match field {
                    FieldSpec::Named(FieldName::Finite(q)) => {
                        let f = GaloisField::new(q).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
                        AnyRep::Finite(build(f, &spec, r)?)
                    }
                    other => {
                        let kind = other.exact_kind().expect("exact field");
                        AnyRep::Exact(build(ExactField(kind), &spec, r)?)
                    }
                };
                Ok((r.label.clone(), rep))
            })
            .collect()
    }
}

fn entry<F: Field>(f: &F, v: &Value, label: &str) -> Result<F::Elem, ScenarioError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => {
            return Err(ScenarioError::Invalid(format!(
                "representation {label:?}: matrix entry {other} is neither a number nor a string"
            )))
        }
    };
    f.parse_elem(&text)
        .map_err(|e| ScenarioError::Invalid(format!("representation {label:?}: {e}")))
}

fn build<F: Field>(f: F, spec: &QuiverSpec, r: &RepSpec) -> Result<Representation<F>, ScenarioError> {
    let bad = |msg: String| ScenarioError::Invalid(format!("representation {:?}: {msg}", r.label));
    if r.dims.j0() != spec.j0 || r.maps.len() != spec.j0 {
        return Err(bad(format!("expected data for j₀ = {}", spec.j0)));
    }
    let mut maps = Vec::with_capacity(spec.j0);
    for (i, row) in r.maps.iter().enumerate() {
        if row.len() != spec.j0 {
            return Err(bad(format!("maps[{i}] needs {} entries", spec.j0)));
        }
        let mut out_row = Vec::with_capacity(spec.j0);
        for (j, arrows) in row.iter().enumerate() {
            let mut out_arrows = Vec::with_capacity(arrows.len());
            for (k, m) in arrows.iter().enumerate() {
                let (rows, cols) = (r.dims.w[j], r.dims.v[i]);
                if m.len() != rows || m.iter().any(|x| x.len() != cols) {
                    return Err(bad(format!("maps[{i}][{j}][{k}] must be {rows}×{cols}")));
                }
                let parsed = m
                    .iter()
                    .map(|x| x.iter().map(|v| entry(&f, v, &r.label)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                out_arrows.push(Mat::from_rows(cols, parsed));
            }
            out_row.push(out_arrows);
        }
        maps.push(out_row);
    }
    Representation::new(f, spec.clone(), r.dims.clone(), maps).map_err(|e| bad(e.to_string()))
}
