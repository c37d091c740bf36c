//! Matrix literal format: a JSON array of rows, each entry an integer or a
//! `"p/q"` string in lowest terms. Symmetry is validated on load.

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::rational::{parse_rational, rational_to_json, Rational};
use super::symmat::SymMat;

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Str(String),
}

impl Entry {
    fn into_rational(self) -> Result<Rational, String> {
        match self {
            Entry::Int(v) => Ok(super::rational::int(v)),
            Entry::Str(s) => parse_rational(&s).map_err(|e| e.to_string()),
        }
    }
}

struct Row<'a>(&'a SymMat, usize);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = self.0.dim();
        let mut seq = s.serialize_seq(Some(n))?;
        for j in 0..n {
            seq.serialize_element(&rational_to_json(self.0.get(self.1, j)))?;
        }
        seq.end()
    }
}

impl Serialize for SymMat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.dim()))?;
        for i in 0..self.dim() {
            seq.serialize_element(&Row(self, i))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for SymMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<Vec<Entry>> = Vec::deserialize(d).map_err(|e| {
            de::Error::custom(format!("matrix literal must be an array of rows: {e}"))
        })?;
        let mut rows = Vec::with_capacity(raw.len());
        for (i, row) in raw.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, e) in row.into_iter().enumerate() {
                out.push(
                    e.into_rational()
                        .map_err(|msg| de::Error::custom(format!("entry ({i}, {j}): {msg}")))?,
                );
            }
            rows.push(out);
        }
        SymMat::from_rows(rows).map_err(de::Error::custom)
    }
}
