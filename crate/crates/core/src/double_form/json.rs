use serde::{Deserialize, Serialize};

use super::{DoubleForm, MultiIndex};
use crate::error::{Error, Result};

/// Wire shape `{"n", "p", "q", "coeffs": [{"i": [..], "j": [..], "v": ..}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleFormJson {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffJson {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub v: f64,
}

impl From<&DoubleForm<f64>> for DoubleFormJson {
    fn from(a: &DoubleForm<f64>) -> Self {
        DoubleFormJson {
            n: a.n(),
            p: a.p(),
            q: a.q(),
            coeffs: a
                .entries()
                .filter(|(_, _, v)| **v != 0.0)
                .map(|(i, j, v)| CoeffJson {
                    i: i.axes(),
                    j: j.axes(),
                    v: *v,
                })
                .collect(),
        }
    }
}

impl TryFrom<DoubleFormJson> for DoubleForm<f64> {
    type Error = Error;

    fn try_from(w: DoubleFormJson) -> Result<Self> {
        let parse = |e: Error| Error::Parse(e.to_string());
        let mut out = DoubleForm::zeros(w.n, w.p, w.q).map_err(parse)?;
        let mut seen = std::collections::HashSet::new();
        for c in w.coeffs {
            let i = MultiIndex::new(&c.i, w.n).map_err(parse)?;
            let j = MultiIndex::new(&c.j, w.n).map_err(parse)?;
            if c.i.len() != w.p || c.j.len() != w.q {
                return Err(Error::Parse(format!(
                    "entry ({:?},{:?}) does not match bidegree ({},{})",
                    c.i, c.j, w.p, w.q
                )));
            }
            if !c.v.is_finite() {
                return Err(Error::Parse(format!("non-finite coefficient at ({:?},{:?})", c.i, c.j)));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Parse(format!("duplicate entry ({:?},{:?})", c.i, c.j)));
            }
            out.set(i, j, c.v);
        }
        Ok(out)
    }
}

impl DoubleForm<f64> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&DoubleFormJson::from(self)).expect("serializable")
    }

    /// Parses the JSON wire form; indices must already be canonical (strictly
    /// increasing).
    pub fn from_json(s: &str) -> Result<Self> {
        let w: DoubleFormJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        w.try_into()
    }
}

impl Serialize for DoubleForm<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DoubleFormJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DoubleForm<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = DoubleFormJson::deserialize(d)?;
        w.try_into().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_roundtrip() {
        let g = DoubleForm::<f64>::metric(3).unwrap();
        let s = g.to_json();
        assert_eq!(
            s,
            r#"{"n":3,"p":1,"q":1,"coeffs":[{"i":[0],"j":[0],"v":1.0},{"i":[1],"j":[1],"v":1.0},{"i":[2],"j":[2],"v":1.0}]}"#
        );
        assert_eq!(DoubleForm::from_json(&s).unwrap(), g);
    }

    #[test]
    fn unsorted_indices_are_rejected() {
        let s = r#"{"n":3,"p":2,"q":2,"coeffs":[{"i":[1,0],"j":[0,1],"v":1.0}]}"#;
        assert!(matches!(DoubleForm::from_json(s), Err(Error::Parse(_))));
    }

    #[test]
    fn wrong_length_and_duplicates_are_rejected() {
        let s = r#"{"n":3,"p":2,"q":2,"coeffs":[{"i":[0],"j":[0,1],"v":1.0}]}"#;
        assert!(DoubleForm::from_json(s).is_err());
        let s = r#"{"n":3,"p":1,"q":1,"coeffs":[{"i":[0],"j":[1],"v":1.0},{"i":[0],"j":[1],"v":2.0}]}"#;
        assert!(DoubleForm::from_json(s).is_err());
        let s = r#"{"n":3,"p":1,"q":1,"coeffs":[{"i":[3],"j":[1],"v":1.0}]}"#;
        assert!(DoubleForm::from_json(s).is_err());
    }
}
