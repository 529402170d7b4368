//! JSON matrix documents.
//!
//! ```json
//! {"label": "optional", "alpha": [re, im], "beta": [re, im],
//!  "C": [[[re, im], ...], ...], "D": [[[re, im], ...], ...]}
//! ```

use nrange_core::linalg::c;
use nrange_core::{BlockMatrix, Cplx, DenseMatrix};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDocument {
    pub label: Option<String>,
    pub matrix: BlockMatrix,
}

/// Parses a document into a validated block matrix.
pub fn parse_document(text: &str) -> Result<BlockMatrix, CliError> {
    parse_labeled(text).map(|d| d.matrix)
}

pub fn parse_labeled(text: &str) -> Result<MatrixDocument, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let obj = root.as_object().ok_or_else(|| invalid("$", "expected an object"))?;

    let label = match obj.get("label") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(invalid("label", "expected a string")),
    };
    let alpha = complex(field(obj, "alpha")?, "alpha")?;
    let beta = complex(field(obj, "beta")?, "beta")?;
    let cm = matrix(field(obj, "C")?, "C")?;
    let dm = matrix(field(obj, "D")?, "D")?;
    if dm.shape() != (cm.cols(), cm.rows()) {
        return Err(invalid(
            "D",
            &format!(
                "C is {}x{}, so D must be {}x{}, got {}x{}",
                cm.rows(),
                cm.cols(),
                cm.cols(),
                cm.rows(),
                dm.rows(),
                dm.cols()
            ),
        ));
    }
    let matrix = BlockMatrix::new(alpha, beta, cm, dm).map_err(|e| invalid("$", &e.to_string()))?;
    Ok(MatrixDocument { label, matrix })
}

fn invalid(path: &str, message: &str) -> CliError {
    CliError::Validation {
        path: path.to_string(),
        message: message.to_string(),
    }
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Result<&'a Value, CliError> {
    obj.get(key).ok_or_else(|| invalid(key, "missing field"))
}

fn complex(v: &Value, path: &str) -> Result<Cplx, CliError> {
    let pair = match v.as_array() {
        Some(p) if p.len() == 2 => p,
        _ => return Err(invalid(path, "expected a [re, im] pair")),
    };
    let mut parts = [0.0; 2];
    for (i, x) in pair.iter().enumerate() {
        let f = x.as_f64().ok_or_else(|| invalid(&format!("{path}[{i}]"), "expected a number"))?;
        if !f.is_finite() {
            return Err(invalid(&format!("{path}[{i}]"), "non-finite entry"));
        }
        parts[i] = f;
    }
    Ok(c(parts[0], parts[1]))
}

fn matrix(v: &Value, path: &str) -> Result<DenseMatrix, CliError> {
    let rows = v.as_array().ok_or_else(|| invalid(path, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(invalid(path, "matrix has no rows"));
    }
    let mut width = None;
    let mut entries = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}[{i}]");
        let row = row.as_array().ok_or_else(|| invalid(&rpath, "expected a row of [re, im] pairs"))?;
        match width {
            None if row.is_empty() => return Err(invalid(&rpath, "row is empty")),
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(invalid(&rpath, &format!("row has {} entries, expected {w}", row.len())))
            }
            Some(_) => {}
        }
        for (j, x) in row.iter().enumerate() {
            entries.push(complex(x, &format!("{rpath}[{j}]"))?);
        }
    }
    DenseMatrix::new(rows.len(), width.unwrap_or(0), entries).map_err(|e| invalid(path, &e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const COMMUTING: &str = r#"{"alpha":[0,0],"beta":[0,0],
        "C":[[[4,0],[-0.5,0]],[[-2,0],[0.5,0]]],
        "D":[[[1,0],[1,0]],[[1,0],[2,0]]]}"#;

    fn path_of(err: CliError) -> String {
        match err {
            CliError::Validation { path, .. } | CliError::Parse { path, .. } => path,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_commuting_pair() {
        let a = parse_document(COMMUTING).unwrap();
        assert_eq!(a.n(), 4);
        assert_eq!(a.k(), 2);
        assert_eq!(a.c_block()[(0, 1)], c(-0.5, 0.0));
        assert_eq!(a.d_block()[(1, 1)], c(2.0, 0.0));
    }

    #[test]
    fn scalars_and_label() {
        let text = COMMUTING.replacen(r#""alpha":[0,0],"beta":[0,0]"#, r#""label":"shifted","alpha":[1,2],"beta":[-1,-2]"#, 1);
        let doc = parse_labeled(&text).unwrap();
        assert_eq!(doc.label.as_deref(), Some("shifted"));
        assert_eq!(doc.matrix.alpha(), c(1.0, 2.0));
        assert_eq!(doc.matrix.beta(), c(-1.0, -2.0));
    }

    #[test]
    fn mismatched_blocks_are_rejected() {
        let text = r#"{"alpha":[0,0],"beta":[0,0],
            "C":[[[1,0],[0,0]],[[0,0],[1,0]]],
            "D":[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]}"#;
        let err = parse_document(text).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert_eq!(path_of(err), "D");
    }

    #[test]
    fn errors_point_at_the_entry() {
        let text = COMMUTING.replacen("[0.5,0]", "[0.5]", 1);
        assert_eq!(path_of(parse_document(&text).unwrap_err()), "C[1][1]");
        let text = COMMUTING.replacen("[2,0]", r#"["2",0]"#, 1);
        assert_eq!(path_of(parse_document(&text).unwrap_err()), "D[1][1][0]");
        let text = COMMUTING.replacen(r#","beta":[0,0]"#, "", 1);
        assert_eq!(path_of(parse_document(&text).unwrap_err()), "beta");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let text = COMMUTING.replacen("[[-2,0],[0.5,0]]", "[[-2,0]]", 1);
        assert!(path_of(parse_document(&text).unwrap_err()).starts_with("C[1]"));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_document("{\"alpha\": [0,").unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }));
        assert!(path_of(err).starts_with("line 1"));
    }

    #[test]
    fn overflowing_numbers_are_rejected() {
        let text = COMMUTING.replacen("[4,0]", "[4e400,0]", 1);
        assert_eq!(parse_document(&text).unwrap_err().exit_code(), 3);
    }
}
