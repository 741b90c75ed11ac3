//! The sampled-data document: nodes plus an m x s x t array of complex
//! values. Also used for `eval` output, where non-finite entries become
//! explicit nulls.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use ratfit::SampleSet;
use serde::{Deserialize, Serialize};

use crate::commands::CliError;

pub const PROBLEM_FORMAT: &str = "ratfit-problem";
pub const PROBLEM_VERSION: &str = "1.0";

/// Nodes and values of a sampling problem, as stored on disk. Complex
/// numbers are `[re, im]` pairs; a `null` value marks a non-finite entry
/// (only ever written by `eval`, never accepted as fit input).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemDocument {
    pub format: String,
    pub version: String,
    pub nodes: Vec<[f64; 2]>,
    pub values: Vec<Vec<Vec<Option<[f64; 2]>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<BTreeMap<String, String>>,
}

impl ProblemDocument {
    pub fn from_sample_set(
        samples: &SampleSet,
        metadata: Option<BTreeMap<String, String>>,
    ) -> Self {
        let values = samples.values().iter().map(matrix_to_rows).collect();
        ProblemDocument {
            format: PROBLEM_FORMAT.to_string(),
            version: PROBLEM_VERSION.to_string(),
            nodes: samples.nodes().iter().map(|x| [x.re, x.im]).collect(),
            values,
            metadata,
        }
    }

    /// Evaluation output: entries that came out non-finite are stored as
    /// explicit nulls.
    pub fn from_evaluated(
        nodes: &[Complex64],
        values: &[DMatrix<Complex64>],
        metadata: Option<BTreeMap<String, String>>,
    ) -> Self {
        ProblemDocument {
            format: PROBLEM_FORMAT.to_string(),
            version: PROBLEM_VERSION.to_string(),
            nodes: nodes.iter().map(|x| [x.re, x.im]).collect(),
            values: values.iter().map(matrix_to_rows).collect(),
            metadata,
        }
    }

    /// Validates the document and converts it to an in-memory sample set.
    pub fn to_sample_set(&self) -> Result<SampleSet, String> {
        if self.format != PROBLEM_FORMAT {
            return Err(format!(
                "not a problem document (format \"{}\", expected \"{PROBLEM_FORMAT}\")",
                self.format
            ));
        }
        if self.version != PROBLEM_VERSION {
            return Err(format!(
                "unsupported problem document version \"{}\"",
                self.version
            ));
        }
        if self.values.len() != self.nodes.len() {
            return Err(format!(
                "{} value matrices for {} nodes",
                self.values.len(),
                self.nodes.len()
            ));
        }
        let nodes: Vec<Complex64> = self
            .nodes
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        let mut matrices = Vec::with_capacity(self.values.len());
        for (l, rows) in self.values.iter().enumerate() {
            matrices.push(rows_to_matrix(rows, l)?);
        }
        SampleSet::new(nodes, matrices).map_err(|e| e.to_string())
    }
}

fn matrix_to_rows(matrix: &DMatrix<Complex64>) -> Vec<Vec<Option<[f64; 2]>>> {
    (0..matrix.nrows())
        .map(|i| {
            (0..matrix.ncols())
                .map(|j| {
                    let v = matrix[(i, j)];
                    (v.re.is_finite() && v.im.is_finite()).then_some([v.re, v.im])
                })
                .collect()
        })
        .collect()
}

fn rows_to_matrix(
    rows: &[Vec<Option<[f64; 2]>>],
    node: usize,
) -> Result<DMatrix<Complex64>, String> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(format!("empty value matrix at node {node}"));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(format!("ragged value matrix at node {node}"));
    }
    let mut matrix = DMatrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let Some(pair) = cell else {
                return Err(format!(
                    "null value at node {node}, entry ({i}, {j}); nulls are only \
                     valid in evaluation output"
                ));
            };
            matrix[(i, j)] = Complex64::new(pair[0], pair[1]);
        }
    }
    Ok(matrix)
}

/// Reads and parses a problem document, attaching the path and the line and
/// column of any syntax error.
pub fn read_problem(path: &Path) -> Result<ProblemDocument, CliError> {
    let text = crate::commands::read_file(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, format_json_error(&e)))
}

/// Writes a problem document with full-precision numbers.
pub fn write_problem(path: &Path, doc: &ProblemDocument) -> Result<(), CliError> {
    crate::commands::write_file(path, &crate::commands::to_json(doc))
}

/// Reads evaluation nodes: either a problem document (its nodes are used) or
/// a bare JSON array of `[re, im]` pairs.
pub fn read_nodes(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let text = crate::commands::read_file(path)?;
    if let Ok(doc) = serde_json::from_str::<ProblemDocument>(&text) {
        return Ok(doc
            .nodes
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect());
    }
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| {
        CliError::parse(
            path,
            format!(
                "expected a problem document or an array of [re, im] pairs: {}",
                format_json_error(&e)
            ),
        )
    })?;
    Ok(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

pub(crate) fn format_json_error(err: &serde_json::Error) -> String {
    format!("{err} (line {}, column {})", err.line(), err.column())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_samples() -> SampleSet {
        let nodes = vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0)];
        let values = vec![
            DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0)]),
            DMatrix::from_row_slice(
                1,
                2,
                &[Complex64::new(-1.0, 0.25), Complex64::new(0.0, 3.0)],
            ),
        ];
        SampleSet::new(nodes, values).unwrap()
    }

    #[test]
    fn round_trips_through_text_exactly() {
        let samples = demo_samples();
        let doc = ProblemDocument::from_sample_set(&samples, None);
        let text = crate::commands::to_json(&doc);
        let back: ProblemDocument = serde_json::from_str(&text).unwrap();
        let restored = back.to_sample_set().unwrap();
        assert_eq!(restored.nodes(), samples.nodes());
        for (a, b) in restored.values().iter().zip(samples.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn nulls_are_rejected_as_fit_input() {
        let mut doc = ProblemDocument::from_sample_set(&demo_samples(), None);
        doc.values[1][0][1] = None;
        let err = doc.to_sample_set().unwrap_err();
        assert!(err.contains("node 1, entry (0, 1)"), "got: {err}");
    }

    #[test]
    fn non_finite_evaluation_entries_become_nulls() {
        let nodes = vec![Complex64::new(0.0, 1.0)];
        let values = vec![DMatrix::from_row_slice(
            1,
            2,
            &[
                Complex64::new(f64::INFINITY, f64::INFINITY),
                Complex64::new(1.0, 0.0),
            ],
        )];
        let doc = ProblemDocument::from_evaluated(&nodes, &values, None);
        assert_eq!(doc.values[0][0][0], None);
        assert_eq!(doc.values[0][0][1], Some([1.0, 0.0]));
        let text = crate::commands::to_json(&doc);
        assert!(text.contains("null"), "null marker missing from {text}");
    }

    #[test]
    fn format_and_version_are_checked() {
        let mut doc = ProblemDocument::from_sample_set(&demo_samples(), None);
        doc.format = "something-else".into();
        assert!(doc.to_sample_set().unwrap_err().contains("format"));
        let mut doc = ProblemDocument::from_sample_set(&demo_samples(), None);
        doc.version = "9.9".into();
        assert!(doc.to_sample_set().unwrap_err().contains("version"));
    }
}
