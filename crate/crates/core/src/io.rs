//! JSON interchange formats: window files, certificates, and structure
//! findings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::approximator::{ApproxCertificate, CertPeriod};
use crate::linalg::SymMat;
use crate::quasihom::{QuasiHomWindow, WindowError};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `n`: matrix dimension must be at least 1")]
    ZeroDimension,
    #[error("field `N`: window radius must be at least 1, got {0}")]
    RadiusTooSmall(i64),
    #[error("field `values`: missing entry for x = {0}")]
    MissingValue(i64),
    #[error("field `values`: key `{0}` is not an integer in [-N, N]")]
    UnexpectedKey(String),
    #[error("field `values.{x}`: expected a {expected}x{expected} matrix, got {got}x{got}")]
    DimensionMismatch { x: i64, expected: usize, got: usize },
    #[error("field `values.{x}`: {message}")]
    Matrix { x: i64, message: String },
    #[error("field `p`: expected an integer >= 2 or \"degenerate\"")]
    BadPeriod,
    #[error(transparent)]
    Window(#[from] WindowError),
}

/// Matrices stay raw until their key is known, so errors can name it.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowFile {
    n: usize,
    #[serde(rename = "N")]
    radius: i64,
    values: BTreeMap<String, serde_json::Value>,
}

pub fn window_from_json(text: &str) -> Result<QuasiHomWindow, FormatError> {
    let file: WindowFile = serde_json::from_str(text)?;
    if file.n == 0 {
        return Err(FormatError::ZeroDimension);
    }
    if file.radius < 1 {
        return Err(FormatError::RadiusTooSmall(file.radius));
    }
    let mut by_x = BTreeMap::new();
    for (key, raw) in file.values {
        let x: i64 = match key.parse() {
            Ok(x) if (-file.radius..=file.radius).contains(&x) && key == x.to_string() => x,
            _ => return Err(FormatError::UnexpectedKey(key)),
        };
        let m: SymMat = serde_json::from_value(raw).map_err(|e| FormatError::Matrix {
            x,
            message: e.to_string(),
        })?;
        if m.dim() != file.n {
            return Err(FormatError::DimensionMismatch {
                x,
                expected: file.n,
                got: m.dim(),
            });
        }
        by_x.insert(x, m);
    }
    let mut values = Vec::with_capacity(2 * file.radius as usize + 1);
    for x in -file.radius..=file.radius {
        values.push(by_x.remove(&x).ok_or(FormatError::MissingValue(x))?);
    }
    Ok(QuasiHomWindow::new(file.n, file.radius, values)?)
}

/// Output twin of [`WindowFile`]; integer keys keep `values` in numeric order.
#[derive(Serialize)]
struct WindowOut<'a> {
    n: usize,
    #[serde(rename = "N")]
    radius: i64,
    values: BTreeMap<i64, &'a SymMat>,
}

pub fn window_to_json(f: &QuasiHomWindow) -> String {
    let file = WindowOut {
        n: f.dim(),
        radius: f.radius(),
        values: f.iter().collect(),
    };
    serde_json::to_string_pretty(&file).expect("window serializes")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    #[serde(rename = "A")]
    pub a: SymMat,
    pub p: serde_json::Value,
    #[serde(rename = "window_N")]
    pub window_n: i64,
    pub ranks: BTreeMap<i64, usize>,
    pub max_rank: usize,
    pub bound_satisfied: bool,
}

pub fn certificate_to_json_value(c: &ApproxCertificate) -> CertificateJson {
    let p = match c.period {
        CertPeriod::Degenerate => serde_json::Value::from("degenerate"),
        CertPeriod::Period(p) => serde_json::Value::from(p),
        CertPeriod::Unspecified => serde_json::Value::Null,
    };
    CertificateJson {
        a: c.a.clone(),
        p,
        window_n: c.window_n,
        ranks: c.per_x_rank.clone(),
        max_rank: c.max_rank,
        bound_satisfied: c.bound_satisfied,
    }
}

pub fn certificate_to_json(c: &ApproxCertificate) -> String {
    serde_json::to_string_pretty(&certificate_to_json_value(c)).expect("certificate serializes")
}

pub fn certificate_from_json(text: &str) -> Result<ApproxCertificate, FormatError> {
    let raw: CertificateJson = serde_json::from_str(text)?;
    let period = match &raw.p {
        serde_json::Value::Null => CertPeriod::Unspecified,
        serde_json::Value::String(s) if s == "degenerate" => CertPeriod::Degenerate,
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(p) if p >= 2 => CertPeriod::Period(p),
            _ => return Err(FormatError::BadPeriod),
        },
        _ => return Err(FormatError::BadPeriod),
    };
    Ok(ApproxCertificate {
        a: raw.a,
        period,
        per_x_rank: raw.ranks,
        max_rank: raw.max_rank,
        window_n: raw.window_n,
        bound_satisfied: raw.bound_satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{"n": 1, "N": 1, "values": {"-1": [[-2]], "0": [[0]], "1": [["1/2"]]}}"#;

    #[test]
    fn parses_window() {
        let f = window_from_json(SMALL).unwrap();
        assert_eq!(f.radius(), 1);
        assert_eq!(window_from_json(&window_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn window_errors_name_the_field() {
        let missing = r#"{"n": 1, "N": 1, "values": {"-1": [[0]], "1": [[0]]}}"#;
        assert!(matches!(
            window_from_json(missing),
            Err(FormatError::MissingValue(0))
        ));
        let extra =
            r#"{"n": 1, "N": 1, "values": {"-1": [[0]], "0": [[0]], "1": [[0]], "2": [[0]]}}"#;
        assert!(matches!(window_from_json(extra), Err(FormatError::UnexpectedKey(k)) if k == "2"));
        let padded = r#"{"n": 1, "N": 1, "values": {"-1": [[0]], "00": [[0]], "1": [[0]]}}"#;
        assert!(matches!(
            window_from_json(padded),
            Err(FormatError::UnexpectedKey(_))
        ));
        let dims = r#"{"n": 2, "N": 1, "values": {"-1": [[0]], "0": [[0]], "1": [[0]]}}"#;
        assert!(matches!(
            window_from_json(dims),
            Err(FormatError::DimensionMismatch { .. })
        ));
        let unknown = r#"{"n": 1, "N": 1, "values": {}, "extra": 1}"#;
        assert!(matches!(
            window_from_json(unknown),
            Err(FormatError::Json(_))
        ));
        let asym = r#"{"n": 2, "N": 1, "values": {"-1": [[0,1],[2,0]], "0": [[0,0],[0,0]], "1": [[0,0],[0,0]]}}"#;
        let err = window_from_json(asym).unwrap_err();
        assert!(
            err.to_string().contains("values.-1") && err.to_string().contains("(0, 1)"),
            "{err}"
        );
        let syntax = "{\"n\": 1,\n \"N\": }";
        assert!(window_from_json(syntax)
            .unwrap_err()
            .to_string()
            .contains("line 2"));
    }
}
