//! Versioned JSON schema for approximant documents.
//!
//! Documents store the basis recurrences (Hessenberg matrix, breakout,
//! weight norm, active nodes) and the coefficient vectors. The orthonormal
//! basis columns are deliberately omitted: evaluation never touches them, so
//! a document is O(nodes + degree^2) instead of O(nodes * degree), and the
//! restored fit evaluates through exactly the same arithmetic as the
//! in-memory one. Complex numbers are `[re, im]` pairs throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approximant::{LoadedApproximant, RationalApproximant};
use crate::arnoldi::ArnoldiBasis;
use crate::error::Error;
use crate::json;
use crate::model::{find_duplicate, DegreeSpec, WeightVector};

const FORMAT: &str = "ratfit-approximant";
const CURRENT_VERSION: &str = "1.1";
/// The previous minor version lacked `fit_weights`; still readable.
const LEGACY_VERSION: &str = "1.0";

#[derive(Serialize, Deserialize)]
struct BasisDoc {
    degree: usize,
    weight_norm: f64,
    breakout: [f64; 2],
    /// Row-major `(degree+1) x (degree+1)`.
    hessenberg: Vec<Vec<[f64; 2]>>,
    active_nodes: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct DegreesDoc {
    numerator: Vec<Vec<usize>>,
    denominator: usize,
}

#[derive(Serialize, Deserialize)]
struct ApproximantDoc {
    format: String,
    version: String,
    degrees: DegreesDoc,
    denominator_coefficients: Vec<[f64; 2]>,
    /// Indexed `[i][j][coefficient]`.
    numerator_coefficients: Vec<Vec<Vec<[f64; 2]>>>,
    denominator_basis: BasisDoc,
    numerator_basis: BasisDoc,
    #[serde(default)]
    fit_weights: Option<Vec<f64>>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn basis_doc(basis: &ArnoldiBasis) -> BasisDoc {
    let k = basis.degree();
    let h = basis.hessenberg();
    BasisDoc {
        degree: k,
        weight_norm: basis.weight_norm(),
        breakout: pair(basis.breakout()),
        hessenberg: (0..=k)
            .map(|i| (0..=k).map(|j| pair(h[(i, j)])).collect())
            .collect(),
        active_nodes: basis.active_nodes().iter().copied().map(pair).collect(),
    }
}

pub(crate) fn write_approximant(approximant: &RationalApproximant) -> String {
    let doc = ApproximantDoc {
        format: FORMAT.into(),
        version: CURRENT_VERSION.into(),
        degrees: DegreesDoc {
            numerator: approximant.degrees().numerator_degrees().to_vec(),
            denominator: approximant.degrees().denominator_degree(),
        },
        denominator_coefficients: approximant
            .denom_coeffs()
            .iter()
            .copied()
            .map(pair)
            .collect(),
        numerator_coefficients: approximant
            .numer_coeffs()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.iter().copied().map(pair).collect())
                    .collect()
            })
            .collect(),
        denominator_basis: basis_doc(approximant.denom_basis()),
        numerator_basis: basis_doc(approximant.numer_basis()),
        fit_weights: Some(approximant.fit_weights().entries().to_vec()),
    };
    json::to_string(&doc).expect("approximant document serializes")
}

fn check_finite(value: f64, what: &str) -> Result<(), Error> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::malformed(format!("{what} is not finite")))
    }
}

fn restore_basis(doc: &BasisDoc, what: &str) -> Result<ArnoldiBasis, Error> {
    let k = doc.degree;
    if doc.hessenberg.len() != k + 1 || doc.hessenberg.iter().any(|row| row.len() != k + 1) {
        return Err(Error::malformed(format!(
            "{what}: recurrence matrix must be {0} x {0}",
            k + 1
        )));
    }
    if doc.active_nodes.len() < k + 1 {
        return Err(Error::malformed(format!(
            "{what}: {} active nodes cannot support degree {k}",
            doc.active_nodes.len()
        )));
    }
    check_finite(doc.weight_norm, &format!("{what}: weight_norm"))?;
    if doc.weight_norm <= 0.0 {
        return Err(Error::malformed(format!(
            "{what}: weight_norm must be positive"
        )));
    }
    for (label, value) in [("re", doc.breakout[0]), ("im", doc.breakout[1])] {
        check_finite(value, &format!("{what}: breakout {label}"))?;
    }
    for row in &doc.hessenberg {
        for entry in row {
            check_finite(entry[0], &format!("{what}: recurrence entry"))?;
            check_finite(entry[1], &format!("{what}: recurrence entry"))?;
        }
    }
    let nodes: Vec<Complex64> = doc.active_nodes.iter().copied().map(complex).collect();
    for (l, node) in nodes.iter().enumerate() {
        if !node.re.is_finite() || !node.im.is_finite() {
            return Err(Error::malformed(format!(
                "{what}: active node {l} is not finite"
            )));
        }
    }
    find_duplicate(&nodes)
        .map_err(|_| Error::malformed(format!("{what}: active nodes contain duplicates")))?;
    let hessenberg = DMatrix::from_fn(k + 1, k + 1, |i, j| complex(doc.hessenberg[i][j]));
    Ok(ArnoldiBasis::from_recurrence(
        hessenberg,
        complex(doc.breakout),
        doc.weight_norm,
        k,
        nodes,
    ))
}

pub(crate) fn read_approximant(text: &str) -> Result<LoadedApproximant, Error> {
    let doc: ApproximantDoc = serde_json::from_str(text).map_err(|e| Error::MalformedDocument {
        message: e.to_string(),
        location: Some(format!("line {}, column {}", e.line(), e.column())),
    })?;
    if doc.format != FORMAT {
        return Err(Error::malformed(format!(
            "expected format {FORMAT:?}, found {:?}",
            doc.format
        )));
    }
    let mut warnings = Vec::new();
    match doc.version.as_str() {
        CURRENT_VERSION => {}
        LEGACY_VERSION => warnings.push(format!(
            "document uses schema version {LEGACY_VERSION}; upgraded on load"
        )),
        other => {
            return Err(Error::malformed(format!(
            "unsupported schema version {other:?} (supported: {LEGACY_VERSION}, {CURRENT_VERSION})"
        )))
        }
    }

    let degrees = DegreeSpec::new(doc.degrees.numerator.clone(), doc.degrees.denominator)
        .map_err(|e| Error::malformed(format!("degree table: {e}")))?;
    let (s, t) = degrees.shape();

    if doc.denominator_coefficients.len() != degrees.denominator_degree() + 1 {
        return Err(Error::malformed(format!(
            "denominator coefficient count {} does not match degree {}",
            doc.denominator_coefficients.len(),
            degrees.denominator_degree()
        )));
    }
    if doc.numerator_coefficients.len() != s
        || doc.numerator_coefficients.iter().any(|row| row.len() != t)
    {
        return Err(Error::malformed(
            "numerator coefficient table does not match the degree table shape",
        ));
    }
    for i in 0..s {
        for j in 0..t {
            let expected = degrees.numerator_degree(i, j) + 1;
            let got = doc.numerator_coefficients[i][j].len();
            if got != expected {
                return Err(Error::malformed(format!(
                    "numerator coefficients for entry ({i}, {j}) have length {got}, expected {expected}"
                )));
            }
        }
    }

    let denom_basis = restore_basis(&doc.denominator_basis, "denominator basis")?;
    let numer_basis = restore_basis(&doc.numerator_basis, "numerator basis")?;

    let fit_weights = match (&doc.fit_weights, doc.version.as_str()) {
        (Some(w), _) => WeightVector::new(w.clone())
            .map_err(|e| Error::malformed(format!("fit_weights: {e}")))?,
        (None, LEGACY_VERSION) => {
            warnings.push(format!(
                "fit_weights missing; defaulted to uniform over the {} active nodes",
                denom_basis.node_count()
            ));
            WeightVector::uniform(denom_basis.node_count())
                .map_err(|e| Error::malformed(format!("fit_weights: {e}")))?
        }
        (None, _) => return Err(Error::malformed("fit_weights is required")),
    };

    let denom_coeffs = DVector::from_iterator(
        doc.denominator_coefficients.len(),
        doc.denominator_coefficients.iter().copied().map(complex),
    );
    let numer_coeffs: Vec<Vec<DVector<Complex64>>> = doc
        .numerator_coefficients
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| DVector::from_iterator(c.len(), c.iter().copied().map(complex)))
                .collect()
        })
        .collect();
    for c in denom_coeffs
        .iter()
        .chain(numer_coeffs.iter().flatten().flat_map(|v| v.iter()))
    {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::malformed("coefficients must be finite"));
        }
    }

    let approximant = RationalApproximant::from_parts(
        degrees,
        denom_coeffs,
        numer_coeffs,
        denom_basis,
        numer_basis,
        fit_weights,
    )
    .map_err(|e| Error::malformed(e.to_string()))?;
    Ok(LoadedApproximant {
        approximant,
        warnings,
    })
}
