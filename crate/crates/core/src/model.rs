//! JSON model descriptions, e.g.
//! `{"type": "polytope", "polytope": {"vertices": [[0,0],[1,0],[0,1]]}}` or
//! `{"type": "halfline", "a": 0, "direction": 1}`. Every variant accepts an
//! optional `"d"` overriding the default exponent.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::rational::{self, Rational};
use crate::asymptotics::{cone_model, convolution_model, halfline_model, p1p1_model, partition_model, polytope_model, ThetaModel};
use crate::error::{Error, Result};
use crate::partition::VectorList;
use crate::polytope::LatticePolytope;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Polytope {
        polytope: Value,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<i64>,
    },
    Convolution {
        intervals: Vec<(Value, Value)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<i64>,
    },
    P1p1 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<i64>,
    },
    Halfline {
        a: Value,
        direction: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<i64>,
    },
    Cone {
        vertex: Vec<Value>,
        generators: Vec<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<i64>,
    },
    Partition {
        delta: Value,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<i64>,
    },
}

fn rat_field(v: &Value, field: &str) -> Result<Rational> {
    rational::from_json(v).map_err(|e| Error::Invalid(format!("field `{field}`: {e}")))
}

impl ModelSpec {
    pub fn from_json(v: &Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("model: {e}")))
    }

    /// Parses text; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("model: {e}")))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("model specs serialize")
    }

    fn d_override(&self) -> Option<i64> {
        match self {
            ModelSpec::Polytope { d, .. }
            | ModelSpec::Convolution { d, .. }
            | ModelSpec::P1p1 { d }
            | ModelSpec::Halfline { d, .. }
            | ModelSpec::Cone { d, .. }
            | ModelSpec::Partition { d, .. } => *d,
        }
    }

    pub fn build(&self) -> Result<ThetaModel> {
        let mut model = match self {
            ModelSpec::Polytope { polytope, .. } => polytope_model(&LatticePolytope::from_json(polytope)?)?,
            ModelSpec::Convolution { intervals, .. } => {
                let ivs = intervals
                    .iter()
                    .map(|(a, b)| Ok((rat_field(a, "intervals")?, rat_field(b, "intervals")?)))
                    .collect::<Result<Vec<_>>>()?;
                convolution_model(&ivs)?
            }
            ModelSpec::P1p1 { .. } => p1p1_model(),
            ModelSpec::Halfline { a, direction, .. } => halfline_model(rat_field(a, "a")?, *direction)?,
            ModelSpec::Cone { vertex, generators, .. } => {
                let v = vertex.iter().map(|x| rat_field(x, "vertex")).collect::<Result<Vec<_>>>()?;
                cone_model(v, generators.clone())?
            }
            ModelSpec::Partition { delta, .. } => partition_model(&VectorList::from_json(delta)?),
        };
        if let Some(d) = self.d_override() {
            model.d = d;
        }
        Ok(model)
    }
}

/// The compact models used by the bundled verification suites.
pub fn corpus() -> Vec<(&'static str, ModelSpec)> {
    let poly = |v: Value| ModelSpec::Polytope { polytope: v, d: None };
    vec![
        ("interval [0,1]", poly(serde_json::json!({"vertices": [[0], [1]]}))),
        ("interval [-2,0]", poly(serde_json::json!({"vertices": [[-2], [0]]}))),
        ("unit square", poly(serde_json::json!({"vertices": [[0, 0], [1, 0], [0, 1], [1, 1]]}))),
        ("2-simplex", poly(serde_json::json!({"vertices": [[0, 0], [1, 0], [0, 1]]}))),
        ("p1p1", ModelSpec::P1p1 { d: None }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_and_build() {
        let specs = [
            json!({"type": "polytope", "polytope": {"vertices": [[0, 0], [1, 0], [0, 1]]}}),
            json!({"type": "convolution", "intervals": [[-2, 0], [0, 2]], "d": 2}),
            json!({"type": "p1p1"}),
            json!({"type": "halfline", "a": "1/2", "direction": -1}),
            json!({"type": "cone", "vertex": [0, 0], "generators": [[1, 0], [0, 1]]}),
            json!({"type": "partition", "delta": [[1, 0], [0, 1], [1, 1]]}),
        ];
        for s in specs {
            let m = ModelSpec::from_json(&s).unwrap();
            assert_eq!(m.to_json(), s);
            assert_eq!(ModelSpec::from_json(&m.to_json()).unwrap(), m);
            m.build().unwrap();
        }
        assert_eq!(ModelSpec::from_json(&json!({"type": "p1p1"})).unwrap().build().unwrap().d, 2);
        assert_eq!(ModelSpec::from_json(&json!({"type": "p1p1", "d": 3})).unwrap().build().unwrap().d, 3);
    }

    #[test]
    fn corpus_builds() {
        let ds: Vec<i64> = corpus().iter().map(|(_, m)| m.build().unwrap().d).collect();
        assert_eq!(ds, vec![1, 1, 2, 2, 2]);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let e = ModelSpec::from_json(&json!({"type": "halfline", "a": 0, "direction": 1, "extra": 1})).unwrap_err();
        assert!(e.to_string().contains("extra"), "{e}");
        let e = ModelSpec::parse("{\"type\": \"sphere\"}").unwrap_err();
        assert!(e.to_string().contains("sphere"), "{e}");
        let e = ModelSpec::parse("{\"type\": \"p1p1\", \"d\": \"two\"}").unwrap_err();
        assert!(e.to_string().contains("\"two\""), "{e}");
        let e = ModelSpec::parse("{\n  \"type\": \"p1p1\",\n  \"d\": 2,\n}").unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
    }
}
