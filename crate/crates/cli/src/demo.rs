//! Built-in demo targets and the seeded noise generator.
//!
//! Three targets are available:
//! * `example1` — a symmetric 2x2 rational matrix function sampled at
//!   equispaced nodes on the imaginary segment from `1i` to `100i`;
//! * `example2` — a symmetric 2x2 matrix of transcendental functions (from a
//!   plate-buckling eigenvalue problem) sampled at logarithmically spaced
//!   nodes on the imaginary segment from `0.01i` to `10i`;
//! * `duplexer` — a 3x1 vector of scattering responses of a duplexer device,
//!   synthesized as ratios of monic polynomials built from tabulated roots,
//!   sampled at equispaced nodes on the imaginary segment from `-2i` to `-1i`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use ratfit::SampleSet;

use crate::args::{DegreesArg, DemoName};

/// A fully specified demo problem.
#[derive(Debug, Clone, Copy)]
pub struct DemoSpec {
    pub name: DemoName,
    pub sample_count: usize,
    pub noise_level: f64,
    pub seed: u64,
}

impl DemoSpec {
    pub fn new(
        name: DemoName,
        sample_count: Option<usize>,
        noise_level: f64,
        seed: u64,
    ) -> Result<Self, String> {
        let sample_count = sample_count.unwrap_or_else(|| default_sample_count(name));
        if sample_count < 2 {
            return Err(format!(
                "a demo needs at least 2 samples, got {sample_count}"
            ));
        }
        if !noise_level.is_finite() || noise_level < 0.0 {
            return Err(format!(
                "noise level must be finite and >= 0, got {noise_level}"
            ));
        }
        Ok(DemoSpec {
            name,
            sample_count,
            noise_level,
            seed,
        })
    }

    /// Synthesizes the sample set: exact target values, plus (when the noise
    /// level is positive) one complex Gaussian draw per node added to every
    /// entry at that node.
    pub fn synthesize(&self) -> Result<SampleSet, ratfit::Error> {
        let nodes = demo_nodes(self.name, self.sample_count);
        let mut values: Vec<DMatrix<Complex64>> =
            nodes.iter().map(|&x| target_value(self.name, x)).collect();
        if self.noise_level > 0.0 {
            let draws = noise_draws(self.seed, nodes.len(), self.noise_level);
            for (matrix, sigma) in values.iter_mut().zip(&draws) {
                for entry in matrix.iter_mut() {
                    *entry += sigma;
                }
            }
        }
        SampleSet::new(nodes, values)
    }

    /// Descriptive metadata embedded in emitted problem documents.
    pub fn metadata(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        map.insert("demo".to_string(), self.name.to_string());
        map.insert("samples".to_string(), self.sample_count.to_string());
        map.insert(
            "noise-level".to_string(),
            format!("{:.16e}", self.noise_level),
        );
        map.insert("noise-generator".to_string(), NOISE_GENERATOR.to_string());
        map.insert("seed".to_string(), self.seed.to_string());
        map
    }
}

/// Standard node count of each demo.
pub fn default_sample_count(name: DemoName) -> usize {
    match name {
        DemoName::Example1 => 1000,
        DemoName::Example2 => 500,
        DemoName::Duplexer => 401,
    }
}

/// Degrees used when the user does not pass `--degrees`.
pub fn default_degrees(name: DemoName) -> DegreesArg {
    match name {
        // The target is exactly a type (5,6) rational matrix.
        DemoName::Example1 => DegreesArg::Uniform {
            numerator: 5,
            denominator: 6,
        },
        DemoName::Example2 => DegreesArg::Uniform {
            numerator: 10,
            denominator: 10,
        },
        // Responses are p20/p20, p12/p20, p12/p20.
        DemoName::Duplexer => DegreesArg::Matrix {
            numerators: vec![vec![20], vec![12], vec![12]],
            denominator: 20,
        },
    }
}

/// Sample nodes of a demo, all on the imaginary axis.
pub fn demo_nodes(name: DemoName, count: usize) -> Vec<Complex64> {
    assert!(count >= 2, "demo node formulas need at least 2 samples");
    let step = |l: usize| l as f64 / (count - 1) as f64;
    (0..count)
        .map(|l| {
            let y = match name {
                DemoName::Example1 => 1.0 + 99.0 * step(l),
                DemoName::Example2 => 10f64.powf(-2.0 + 3.0 * step(l)),
                DemoName::Duplexer => -2.0 + step(l),
            };
            Complex64::new(0.0, y)
        })
        .collect()
}

/// Exact target value at one node (closed form, usable at fresh nodes too).
pub fn target_value(name: DemoName, x: Complex64) -> DMatrix<Complex64> {
    match name {
        DemoName::Example1 => {
            let f11 = Complex64::new(2.0, 0.0) / (x + 1.0);
            let f12 = (-x + 3.0) / (x * x + x - 5.0);
            let f22 = (x * x + 2.0) / (x * x * x + 3.0 * x * x - 1.0);
            DMatrix::from_row_slice(2, 2, &[f11, f12, f12, f22])
        }
        DemoName::Example2 => {
            let sin2 = (2.0 * x).sin();
            let cos2 = (2.0 * x).cos();
            let tan = x.tan();
            let base = x * (-2.0 * x * cos2 / sin2 + 1.0) / (tan - x);
            let off = x * (2.0 * x - sin2) / (sin2 * (tan - x));
            DMatrix::from_row_slice(2, 2, &[base + 10.0, off, off, base + 4.0])
        }
        DemoName::Duplexer => {
            let denom = monic_from_roots(x, &DUPLEXER_COMMON_POLE_ROOTS);
            DMatrix::from_column_slice(
                3,
                1,
                &[
                    monic_from_roots(x, &DUPLEXER_REFLECTION_ROOTS) / denom,
                    monic_from_roots(x, &DUPLEXER_TX_ROOTS) / denom,
                    monic_from_roots(x, &DUPLEXER_RX_ROOTS) / denom,
                ],
            )
        }
    }
}

fn monic_from_roots(x: Complex64, roots: &[[f64; 2]]) -> Complex64 {
    roots
        .iter()
        .map(|r| x - Complex64::new(r[0], r[1]))
        .product()
}

/// Name of the noise algorithm, embedded in document metadata so seeds stay
/// portable: ChaCha20 keyed by the 64-bit seed; each uniform takes the top
/// 53 bits of one 64-bit output, mapped to (0, 1]; each complex draw spends
/// two uniforms on one Box-Muller transform (cosine branch = real part, sine
/// branch = imaginary part), scaled by the noise level.
pub const NOISE_GENERATOR: &str = "chacha20-box-muller";

/// One complex Gaussian perturbation per node, in node order. Draw `k` of a
/// longer sequence equals draw `k` of a shorter one with the same seed.
pub fn noise_draws(seed: u64, count: usize, level: f64) -> Vec<Complex64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut unit = move || ((rng.next_u64() >> 11) as f64 + 1.0) * 2f64.powi(-53);
    (0..count)
        .map(|_| {
            let radius = (-2.0 * unit().ln()).sqrt();
            let angle = std::f64::consts::TAU * unit();
            Complex64::new(level * radius * angle.cos(), level * radius * angle.sin())
        })
        .collect()
}

/// Roots of the common denominator polynomial (degree 20) of the duplexer
/// responses.
const DUPLEXER_COMMON_POLE_ROOTS: [[f64; 2]; 20] = [
    [-0.0396, -1.0564],
    [-0.1099, -0.9971],
    [-0.1452, -0.8985],
    [-0.0349, 1.0418],
    [-0.0990, 0.9864],
    [-0.1481, -0.7199],
    [-0.1404, 0.8811],
    [-0.1637, 0.7315],
    [-0.1497, -0.5206],
    [-0.1668, 0.5697],
    [-0.1388, -0.3422],
    [-0.1484, 0.4140],
    [-0.1170, 0.2846],
    [-0.0999, -0.1895],
    [-0.0767, 0.1975],
    [-0.0386, 0.1414],
    [-0.0111, 0.1166],
    [-0.0636, -0.0772],
    [-0.0427, 0.0014],
    [-0.0200, -0.0024],
];

/// Roots of the reflection-response numerator (degree 20).
const DUPLEXER_REFLECTION_ROOTS: [[f64; 2]; 20] = [
    [-0.0050, -0.0173],
    [0.0404, 0.0037],
    [-0.0221, -0.0921],
    [-0.0009, 0.1261],
    [-0.0151, 0.1542],
    [-0.0217, -0.2031],
    [0.0231, 0.2331],
    [-0.0223, 0.2925],
    [-0.0621, -0.3582],
    [0.0310, 0.4292],
    [-0.0142, -0.5192],
    [-0.0309, 0.5772],
    [-0.0249, -0.7174],
    [0.0352, 0.7185],
    [-0.0281, 0.8746],
    [0.0049, -0.9350],
    [0.0957, -0.9407],
    [0.0497, 0.9520],
    [-0.0163, 1.0071],
    [-0.0299, -1.0232],
];

/// Roots of the first transmission-response numerator (degree 12).
const DUPLEXER_TX_ROOTS: [[f64; 2]; 12] = [
    [0.0130, -0.0070],
    [-0.0048, 0.0181],
    [-0.0309, -0.0016],
    [-0.0098, -0.0443],
    [-0.0501, -0.0915],
    [-0.0647, -0.2039],
    [-0.0994, -0.3527],
    [-0.0890, -0.5222],
    [-0.0858, -0.7178],
    [-0.0650, -0.9007],
    [-0.0527, -1.0230],
    [-0.0072, -1.1030],
];

/// Roots of the second transmission-response numerator (degree 12).
const DUPLEXER_RX_ROOTS: [[f64; 2]; 12] = [
    [-0.0071, 0.1128],
    [-0.0228, 0.1335],
    [0.0063, 0.1481],
    [-0.0461, 0.1752],
    [-0.0068, 0.2229],
    [-0.0740, 0.2899],
    [-0.0735, 0.4291],
    [-0.0954, 0.5850],
    [-0.0809, 0.7525],
    [-0.0765, 0.8988],
    [-0.0430, 1.0096],
    [-0.0053, 1.1038],
];
