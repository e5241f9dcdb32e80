//! JSON documents for grid functions and profiles.
//!
//! ```json
//! {"kind": "grid_function", "domain": [{"lo": -1.0, "hi": 1.0, "nodes": 3}], "values": [1.0, 0.0, "inf"]}
//! {"kind": "profile", "knots": [[0.0, 0.0], [1.0, 1.0]], "terminal_slope": 3.0}
//! ```
//! Values are row-major with the last axis fastest; `"inf"` and `"-inf"`
//! encode the infinities.

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use super::grid::{Axis, Grid, GridFunction};
use super::profile::ConvexProfile;
use crate::error::{Error, Result};

/// An `f64` that serializes infinities as strings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JsonReal(pub f64);

impl Serialize for JsonReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for JsonReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(JsonReal(v)),
            Raw::Str(s) => match s.as_str() {
                "inf" | "+inf" => Ok(JsonReal(f64::INFINITY)),
                "-inf" => Ok(JsonReal(f64::NEG_INFINITY)),
                other => Err(de::Error::custom(format!("unknown real literal {other:?}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    GridFunction { domain: Vec<Axis>, values: Vec<JsonReal> },
    Profile { knots: Vec<[f64; 2]>, terminal_slope: f64 },
}

impl From<&GridFunction> for Document {
    fn from(f: &GridFunction) -> Self {
        Document::GridFunction {
            domain: f.grid().axes().to_vec(),
            values: f.values().iter().map(|&v| JsonReal(v)).collect(),
        }
    }
}

impl From<&ConvexProfile> for Document {
    fn from(p: &ConvexProfile) -> Self {
        Document::Profile {
            knots: p.radii().iter().zip(p.values()).map(|(&r, &v)| [r, v]).collect(),
            terminal_slope: p.terminal(),
        }
    }
}

impl Document {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn into_grid_function(self) -> Result<GridFunction> {
        match self {
            Document::GridFunction { domain, values } => {
                GridFunction::new(Grid::new(domain)?, values.into_iter().map(|v| v.0).collect())
            }
            Document::Profile { .. } => Err(Error::Serialization(
                "expected a grid_function document, found a profile".into(),
            )),
        }
    }

    pub fn into_profile(self) -> Result<ConvexProfile> {
        match self {
            Document::Profile { knots, terminal_slope } => ConvexProfile::new(
                knots.iter().map(|k| k[0]).collect(),
                knots.iter().map(|k| k[1]).collect(),
                terminal_slope,
            ),
            Document::GridFunction { .. } => Err(Error::Serialization(
                "expected a profile document, found a grid_function".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_function_round_trip_with_infinity() {
        let f = GridFunction::line(-1.0, 1.0, vec![1.0, 0.0, f64::INFINITY]).unwrap();
        let json = Document::from(&f).to_json().unwrap();
        assert!(json.contains("\"inf\""));
        let back = Document::from_json(&json).unwrap().into_grid_function().unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn profile_round_trip_and_kind_mismatch() {
        let p = ConvexProfile::new(vec![0.0, 1.0], vec![0.0, 1.0], 3.0).unwrap();
        let json = Document::from(&p).to_json().unwrap();
        let doc = Document::from_json(&json).unwrap();
        assert!(doc.clone().into_grid_function().is_err());
        assert_eq!(doc.into_profile().unwrap(), p);
    }

    #[test]
    fn malformed_literal_is_rejected() {
        let s = r#"{"kind":"grid_function","domain":[{"lo":0,"hi":1,"nodes":2}],"values":[0,"big"]}"#;
        assert!(Document::from_json(s).is_err());
    }
}
