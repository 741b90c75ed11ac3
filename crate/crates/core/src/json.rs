//! JSON encoding with full-precision floats.
//!
//! Finite doubles are written with 17 significant digits, which is always
//! enough to recover the exact bits on parse; the crate enables serde_json's
//! `float_roundtrip` feature so the read side holds up its end. Non-finite
//! doubles become `null` (serde_json's convention), which doubles as the
//! explicit marker for unbounded values in emitted documents.

use std::io;

use serde::Serialize;

/// serde_json formatter that writes every double with round-trip precision.
pub struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes a value to compact JSON with full-precision floats.
pub fn to_string<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut buffer = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut buffer, FullPrecision);
    value.serialize(&mut serializer)?;
    Ok(String::from_utf8(buffer).expect("JSON output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_round_trip_exactly() {
        let values = [
            0.0,
            -0.0,
            1.0 / 3.0,
            1.9455e-14,
            6.0453e-6,
            -std::f64::consts::E,
            1e-300,
            5e-324,
            f64::MAX,
            f64::MIN_POSITIVE,
            987654321.1234568,
        ];
        for &v in &values {
            let text = to_string(&v).unwrap();
            let back: f64 = serde_json::from_str(&text).unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} -> {text} -> {back}");
        }
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_string(&f64::NAN).unwrap(), "null");
        assert_eq!(to_string(&f64::INFINITY).unwrap(), "null");
        let wrapped = vec![1.0, f64::NEG_INFINITY];
        assert_eq!(to_string(&wrapped).unwrap(), "[1.0000000000000000e0,null]");
    }

    #[test]
    fn nested_structures_serialize() {
        #[derive(Serialize)]
        struct Doc {
            name: String,
            values: Vec<[f64; 2]>,
            count: usize,
        }
        let doc = Doc {
            name: "x".into(),
            values: vec![[0.5, -1.5]],
            count: 3,
        };
        assert_eq!(
            to_string(&doc).unwrap(),
            r#"{"name":"x","values":[[5.0000000000000000e-1,-1.5000000000000000e0]],"count":3}"#
        );
    }
}
