//! JSON descriptors for norm spaces:
//! `{label, dim, kind, parameters, primal_vertices?, dual_vertices?, ...}`.
//! Vertex arrays are row-major lists of reals; sums and sections nest the
//! descriptors of their parts.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{Kind, NormSpace};
use crate::error::{Error, Result};
use crate::polytope::PolytopeBall;
use crate::sums;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    #[serde(default)]
    pub label: Option<String>,
    pub dim: usize,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub parameters: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primal_vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<Box<Descriptor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<Box<Descriptor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Descriptor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<Descriptor>>,
}

fn p_value(p: f64) -> Value {
    if p.is_infinite() {
        Value::String("inf".into())
    } else {
        serde_json::json!(p)
    }
}

fn read_p(params: &Map<String, Value>) -> Result<f64> {
    match params.get("p") {
        Some(Value::Number(n)) => n
            .as_f64()
            .ok_or_else(|| Error::Descriptor("parameter p is not a real".into())),
        Some(Value::String(s)) if matches!(s.as_str(), "inf" | "infinity" | "∞") => {
            Ok(f64::INFINITY)
        }
        Some(other) => Err(Error::Descriptor(format!("bad parameter p: {other}"))),
        None => Err(Error::Descriptor("missing parameter p".into())),
    }
}

impl Descriptor {
    fn bare(space: &NormSpace) -> Self {
        Self {
            label: Some(space.label().to_string()),
            dim: space.dim(),
            kind: space.kind().name().to_string(),
            parameters: Map::new(),
            primal_vertices: None,
            dual_vertices: None,
            parent: None,
            outer: None,
            components: None,
            inner: None,
        }
    }

    pub fn from_space(space: &NormSpace) -> Self {
        let mut d = Self::bare(space);
        match space.kind() {
            Kind::Lp { p } => {
                d.parameters.insert("p".into(), p_value(*p));
            }
            Kind::Lorentz { p } => {
                d.parameters.insert("p".into(), p_value(*p));
            }
            Kind::Polytope => {
                let ball = space.ball().expect("polytope kind has a ball");
                d.primal_vertices = Some(ball.primal_vertices().to_vec());
                d.dual_vertices = Some(ball.dual_vertices().to_vec());
            }
            Kind::Section { parent, coords } => {
                d.parameters
                    .insert("coords".into(), serde_json::json!(coords));
                d.parent = Some(Box::new(parent.descriptor()));
            }
            Kind::Sum(s) => {
                d.outer = Some(Box::new(s.outer().descriptor()));
                d.components = Some(s.components().iter().map(|c| c.descriptor()).collect());
            }
            Kind::KoetheDual { inner } => {
                d.inner = Some(Box::new(inner.descriptor()));
            }
            Kind::Euclidean | Kind::Example32 | Kind::Example33 | Kind::Example33P4 => {}
        }
        d
    }

    pub fn build(&self) -> Result<NormSpace> {
        if self.dim == 0 {
            return Err(Error::Descriptor("dim must be positive".into()));
        }
        let space = match self.kind.as_str() {
            "lp" => NormSpace::lp(self.dim, read_p(&self.parameters)?)?,
            "euclidean" => NormSpace::euclidean(self.dim),
            "example_3_2" => NormSpace::example_3_2(),
            "example_3_3" => NormSpace::example_3_3(),
            "example_3_3_p4" => NormSpace::example_3_3_p4(),
            "lorentz_xp" => NormSpace::lorentz(read_p(&self.parameters)?)?,
            "polytope" => {
                let ball = match (&self.primal_vertices, &self.dual_vertices) {
                    (Some(p), Some(d)) => PolytopeBall::from_generators(self.dim, p, d)?,
                    (None, Some(d)) => PolytopeBall::from_dual_generators(self.dim, d)?,
                    (Some(p), None) => PolytopeBall::from_primal_generators(self.dim, p)?,
                    (None, None) => {
                        return Err(Error::Descriptor("polytope needs vertex arrays".into()))
                    }
                };
                NormSpace::polytope(
                    ball,
                    self.label.clone().unwrap_or_else(|| "polytope".into()),
                )
            }
            "section" => {
                let parent = self
                    .parent
                    .as_ref()
                    .ok_or_else(|| Error::Descriptor("section needs a parent".into()))?
                    .build()?;
                let coords: Vec<usize> = serde_json::from_value(
                    self.parameters
                        .get("coords")
                        .cloned()
                        .ok_or_else(|| Error::Descriptor("section needs coords".into()))?,
                )?;
                parent.section(&coords)?
            }
            "sum" => {
                let outer = self
                    .outer
                    .as_ref()
                    .ok_or_else(|| Error::Descriptor("sum needs an outer norm".into()))?
                    .build()?;
                let comps = self
                    .components
                    .as_ref()
                    .ok_or_else(|| Error::Descriptor("sum needs components".into()))?
                    .iter()
                    .map(|c| c.build())
                    .collect::<Result<Vec<_>>>()?;
                sums::sum_space(&outer, comps)?.into_space()
            }
            "koethe_dual" => {
                let inner = self
                    .inner
                    .as_ref()
                    .ok_or_else(|| Error::Descriptor("koethe_dual needs inner".into()))?
                    .build()?;
                sums::koethe_dual(&inner)?
            }
            other => return Err(Error::Descriptor(format!("unknown kind `{other}`"))),
        };
        if space.dim() != self.dim {
            return Err(Error::Descriptor(format!(
                "declared dim {} but kind `{}` has dim {}",
                self.dim,
                self.kind,
                space.dim()
            )));
        }
        Ok(match &self.label {
            Some(l) if l != space.label() => space.with_label(l.clone()),
            _ => space,
        })
    }
}
