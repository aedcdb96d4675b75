//! Data-driven Mamdani fuzzy inference: Gaussian membership banks, dense rule
//! tables, product t-norm, max aggregation and centroid defuzzification. All
//! parameters live in plain data structures so the genetic optimizer can tune
//! them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Membership functions per linguistic variable (Negative-Big .. Positive-Big).
pub const MF_COUNT: usize = 5;
/// Output discretization used by centroid defuzzification. Sized so the
/// discretized centroid tracks a fine-grid reference to better than 1e-3 of
/// the output range even at the narrowest admissible MF width.
pub const DEFUZZ_POINTS: usize = 1001;

/// Gaussian membership function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMf {
    pub mean: f64,
    pub sigma: f64,
}

impl GaussianMf {
    pub fn new(mean: f64, sigma: f64) -> Self {
        GaussianMf { mean, sigma }
    }

    /// Membership degree of `x`, in (0, 1].
    pub fn membership(&self, x: f64) -> f64 {
        let d = (x - self.mean) / self.sigma;
        (-0.5 * d * d).exp()
    }
}

/// One linguistic variable: its admissible range and five Gaussian MFs with
/// non-decreasing means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub lo: f64,
    pub hi: f64,
    pub mfs: [GaussianMf; MF_COUNT],
}

impl VariableSpec {
    pub fn new(lo: f64, hi: f64, mfs: [GaussianMf; MF_COUNT]) -> Result<Self> {
        let spec = VariableSpec { lo, hi, mfs };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) {
            return Err(Error::config("variable range must satisfy lo < hi"));
        }
        for (i, mf) in self.mfs.iter().enumerate() {
            if !(mf.sigma > 0.0) {
                return Err(Error::config(format!("membership function {i} has sigma <= 0")));
            }
            if mf.mean < self.lo || mf.mean > self.hi {
                return Err(Error::config(format!(
                    "membership function {i} mean {} outside [{}, {}]",
                    mf.mean, self.lo, self.hi
                )));
            }
            if i > 0 && mf.mean < self.mfs[i - 1].mean {
                return Err(Error::config("membership function means must be non-decreasing"));
            }
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Degrees of `x` against all five MFs, with `x` clamped into the range
    /// first.
    pub fn fuzzify(&self, x: f64) -> [f64; MF_COUNT] {
        let xc = x.clamp(self.lo, self.hi);
        let mut out = [0.0; MF_COUNT];
        for (d, mf) in out.iter_mut().zip(self.mfs.iter()) {
            *d = mf.membership(xc);
        }
        out
    }
}

/// Dense rule table mapping every combination of input MF indices to an
/// output MF index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleTable {
    /// Per-input MF counts (always 5 here).
    pub dims: Vec<usize>,
    /// Row-major entries, each in 0..MF_COUNT.
    pub entries: Vec<u8>,
}

impl RuleTable {
    pub fn new(dims: Vec<usize>, entries: Vec<u8>) -> Result<Self> {
        let table = RuleTable { dims, entries };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.iter().any(|&d| d != MF_COUNT) {
            return Err(Error::config("rule table dims must all equal the MF count"));
        }
        let expected: usize = self.dims.iter().product();
        if self.entries.len() != expected {
            return Err(Error::config(format!(
                "rule table has {} entries, expected {expected}",
                self.entries.len()
            )));
        }
        if self.entries.iter().any(|&e| e as usize >= MF_COUNT) {
            return Err(Error::config("rule table entry outside 0..5"));
        }
        Ok(())
    }

    /// Uniform table firing a single output MF for every input combination.
    pub fn uniform(n_inputs: usize, output_index: u8) -> Result<Self> {
        RuleTable::new(vec![MF_COUNT; n_inputs], vec![output_index; MF_COUNT.pow(n_inputs as u32)])
    }
}

/// Full parameterization of one fuzzy inference system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisParams {
    pub inputs: Vec<VariableSpec>,
    pub output: VariableSpec,
    pub rules: RuleTable,
}

impl FisParams {
    pub fn new(inputs: Vec<VariableSpec>, output: VariableSpec, rules: RuleTable) -> Result<Self> {
        let fis = FisParams { inputs, output, rules };
        fis.validate()?;
        Ok(fis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.inputs.len()) {
            return Err(Error::config("a FIS takes two or three inputs"));
        }
        for spec in &self.inputs {
            spec.validate()?;
        }
        self.output.validate()?;
        self.rules.validate()?;
        if self.rules.dims.len() != self.inputs.len() {
            return Err(Error::config("rule table dims inconsistent with input count"));
        }
        Ok(())
    }

    /// Aggregated rule strength per output MF: product t-norm across input
    /// degrees, max across rules firing the same consequent.
    fn output_strengths(&self, x: &[f64]) -> [f64; MF_COUNT] {
        assert_eq!(x.len(), self.inputs.len(), "input vector length mismatch");
        let degrees: Vec<[f64; MF_COUNT]> =
            self.inputs.iter().zip(x.iter()).map(|(spec, &xi)| spec.fuzzify(xi)).collect();
        let mut strengths = [0.0; MF_COUNT];
        let mut combo = vec![0usize; self.inputs.len()];
        for entry in &self.rules.entries {
            let mut strength = 1.0;
            for (axis, &mf_idx) in combo.iter().enumerate() {
                strength *= degrees[axis][mf_idx];
            }
            let out = *entry as usize;
            if strength > strengths[out] {
                strengths[out] = strength;
            }
            // Row-major odometer over input MF indices.
            for axis in (0..combo.len()).rev() {
                combo[axis] += 1;
                if combo[axis] < MF_COUNT {
                    break;
                }
                combo[axis] = 0;
            }
        }
        strengths
    }

    /// Crisp output: centroid of the clipped-and-aggregated output MFs over a
    /// uniform 201-point discretization of the output range.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let strengths = self.output_strengths(x);
        let step = self.output.width() / (DEFUZZ_POINTS - 1) as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..DEFUZZ_POINTS {
            let y = self.output.lo + i as f64 * step;
            let mut mu: f64 = 0.0;
            for (j, mf) in self.output.mfs.iter().enumerate() {
                mu = mu.max(strengths[j].min(mf.membership(y)));
            }
            num += y * mu;
            den += mu;
        }
        num / den
    }
}

/// Inference-ready form of [`FisParams`] with the output MF values cached on
/// the defuzzification grid. Same arithmetic as [`FisParams::evaluate`],
/// built once per episode instead of once per call.
#[derive(Debug, Clone)]
pub struct CompiledFis {
    params: FisParams,
    grid_y: Vec<f64>,
    grid_mf: Vec<[f64; MF_COUNT]>,
}

impl CompiledFis {
    pub fn new(params: &FisParams) -> Result<Self> {
        params.validate()?;
        let step = params.output.width() / (DEFUZZ_POINTS - 1) as f64;
        let grid_y: Vec<f64> =
            (0..DEFUZZ_POINTS).map(|i| params.output.lo + i as f64 * step).collect();
        let grid_mf = grid_y
            .iter()
            .map(|&y| {
                let mut row = [0.0; MF_COUNT];
                for (v, mf) in row.iter_mut().zip(params.output.mfs.iter()) {
                    *v = mf.membership(y);
                }
                row
            })
            .collect();
        Ok(CompiledFis { params: params.clone(), grid_y, grid_mf })
    }

    pub fn params(&self) -> &FisParams {
        &self.params
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let strengths = self.params.output_strengths(x);
        let mut num = 0.0;
        let mut den = 0.0;
        for (y, row) in self.grid_y.iter().zip(self.grid_mf.iter()) {
            let mut mu: f64 = 0.0;
            for j in 0..MF_COUNT {
                let clipped = strengths[j].min(row[j]);
                if clipped > mu {
                    mu = clipped;
                }
            }
            num += y * mu;
            den += mu;
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn symmetric_output() -> VariableSpec {
        VariableSpec::new(
            -1.0,
            1.0,
            [
                GaussianMf::new(-1.0, 0.3),
                GaussianMf::new(-0.5, 0.3),
                GaussianMf::new(0.0, 0.3),
                GaussianMf::new(0.5, 0.3),
                GaussianMf::new(1.0, 0.3),
            ],
        )
        .unwrap()
    }

    fn uniform_inputs(n: usize) -> Vec<VariableSpec> {
        (0..n)
            .map(|_| {
                VariableSpec::new(
                    -2.0,
                    2.0,
                    [
                        GaussianMf::new(-2.0, 0.8),
                        GaussianMf::new(-1.0, 0.8),
                        GaussianMf::new(0.0, 0.8),
                        GaussianMf::new(1.0, 0.8),
                        GaussianMf::new(2.0, 0.8),
                    ],
                )
                .unwrap()
            })
            .collect()
    }

    fn random_fis(rng: &mut ChaCha8Rng, n_inputs: usize) -> FisParams {
        let random_var = |rng: &mut ChaCha8Rng| {
            let lo = rng.random_range(-10.0..0.0);
            let hi = rng.random_range(1.0..10.0);
            let mut means: Vec<f64> = (0..MF_COUNT).map(|_| rng.random_range(lo..hi)).collect();
            means.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut mfs = [GaussianMf::new(0.0, 1.0); MF_COUNT];
            for (mf, mean) in mfs.iter_mut().zip(means) {
                *mf = GaussianMf::new(mean, rng.random_range(0.05..0.5) * (hi - lo));
            }
            VariableSpec::new(lo, hi, mfs).unwrap()
        };
        let inputs: Vec<VariableSpec> = (0..n_inputs).map(|_| random_var(rng)).collect();
        let output = random_var(rng);
        let entries: Vec<u8> =
            (0..MF_COUNT.pow(n_inputs as u32)).map(|_| rng.random_range(0..5) as u8).collect();
        FisParams::new(inputs, output, RuleTable::new(vec![MF_COUNT; n_inputs], entries).unwrap())
            .unwrap()
    }

    /// Fine-grid centroid oracle, deliberately independent of the
    /// DEFUZZ_POINTS discretization.
    fn fine_grid_centroid(fis: &FisParams, x: &[f64], points: usize) -> f64 {
        let degrees: Vec<[f64; MF_COUNT]> =
            fis.inputs.iter().zip(x.iter()).map(|(s, &xi)| s.fuzzify(xi)).collect();
        let mut strengths = [0.0f64; MF_COUNT];
        for (flat, entry) in fis.rules.entries.iter().enumerate() {
            let mut idx = flat;
            let mut strength = 1.0;
            for axis in (0..fis.inputs.len()).rev() {
                strength *= degrees[axis][idx % MF_COUNT];
                idx /= MF_COUNT;
            }
            strengths[*entry as usize] = strengths[*entry as usize].max(strength);
        }
        let step = fis.output.width() / (points - 1) as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..points {
            let y = fis.output.lo + i as f64 * step;
            let mu = (0..MF_COUNT)
                .map(|j| strengths[j].min(fis.output.mfs[j].membership(y)))
                .fold(0.0, f64::max);
            num += y * mu;
            den += mu;
        }
        num / den
    }

    #[test]
    fn membership_peak_and_inflection() {
        let mf = GaussianMf::new(2.0, 0.7);
        assert_eq!(mf.membership(2.0), 1.0);
        assert_relative_eq!(mf.membership(2.7), (-0.5f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(mf.membership(1.3), (-0.5f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn fuzzify_peaks_at_middle_mean() {
        let spec = uniform_inputs(1).pop().unwrap();
        let d = spec.fuzzify(0.0);
        assert_eq!(d[2], 1.0);
        assert!(d.iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn fuzzify_clamps_out_of_range() {
        let spec = uniform_inputs(1).pop().unwrap();
        assert_eq!(spec.fuzzify(-100.0), spec.fuzzify(-2.0));
        assert_eq!(spec.fuzzify(100.0), spec.fuzzify(2.0));
    }

    #[test]
    fn single_consequent_centroid_is_its_mean() {
        let fis = FisParams::new(
            uniform_inputs(3),
            symmetric_output(),
            RuleTable::uniform(3, 2).unwrap(),
        )
        .unwrap();
        let out = fis.evaluate(&[0.3, -0.7, 1.1]);
        assert_relative_eq!(out, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn symmetric_rules_cancel() {
        // Mirror-symmetric table: flipping the sign of the first input flips
        // the consequent, so evaluating at the symmetry point lands on zero.
        let mut entries = vec![2u8; 25];
        for i in 0..MF_COUNT {
            for j in 0..MF_COUNT {
                entries[i * MF_COUNT + j] = i as u8;
            }
        }
        let fis = FisParams::new(
            uniform_inputs(2),
            symmetric_output(),
            RuleTable::new(vec![5, 5], entries).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(fis.evaluate(&[0.0, 0.4]), 0.0, epsilon = 1e-9);
        let plus = fis.evaluate(&[0.8, 0.4]);
        let minus = fis.evaluate(&[-0.8, 0.4]);
        assert_relative_eq!(plus, -minus, epsilon = 1e-9);
    }

    #[test]
    fn matches_fine_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n_inputs = if rng.random_bool(0.5) { 2 } else { 3 };
            let fis = random_fis(&mut rng, n_inputs);
            let x: Vec<f64> =
                fis.inputs.iter().map(|s| rng.random_range(s.lo..s.hi)).collect();
            let got = fis.evaluate(&x);
            let oracle = fine_grid_centroid(&fis, &x, 100_000);
            assert!(
                (got - oracle).abs() <= 1e-3 * fis.output.width(),
                "defuzz {got} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn compiled_fis_is_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let fis = random_fis(&mut rng, 3);
            let compiled = CompiledFis::new(&fis).unwrap();
            let x: Vec<f64> =
                fis.inputs.iter().map(|s| rng.random_range((s.lo - 1.0)..(s.hi + 1.0))).collect();
            assert_eq!(fis.evaluate(&x), compiled.evaluate(&x));
        }
    }

    #[test]
    fn continuity_probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fis = random_fis(&mut rng, 3);
        for _ in 0..1000 {
            let x: Vec<f64> =
                fis.inputs.iter().map(|s| rng.random_range(s.lo..s.hi)).collect();
            let mut x2 = x.clone();
            for (xi, s) in x2.iter_mut().zip(fis.inputs.iter()) {
                *xi += 1e-6 * s.width();
            }
            let delta = (fis.evaluate(&x) - fis.evaluate(&x2)).abs();
            assert!(delta < 0.05 * fis.output.width(), "jump {delta}");
        }
    }

    #[test]
    fn permuting_identical_inputs_preserves_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let inputs = uniform_inputs(2);
        let entries: Vec<u8> = (0..25).map(|_| rng.random_range(0..5) as u8).collect();
        let fis = FisParams::new(
            inputs.clone(),
            symmetric_output(),
            RuleTable::new(vec![5, 5], entries.clone()).unwrap(),
        )
        .unwrap();
        // Transpose the rule table along with swapping the inputs.
        let mut transposed = vec![0u8; 25];
        for i in 0..5 {
            for j in 0..5 {
                transposed[j * 5 + i] = entries[i * 5 + j];
            }
        }
        let swapped = FisParams::new(
            inputs,
            symmetric_output(),
            RuleTable::new(vec![5, 5], transposed).unwrap(),
        )
        .unwrap();
        for _ in 0..20 {
            let a = rng.random_range(-2.0..2.0);
            let b = rng.random_range(-2.0..2.0);
            assert_relative_eq!(fis.evaluate(&[a, b]), swapped.evaluate(&[b, a]), epsilon = 1e-12);
        }
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mfs = [
            GaussianMf::new(-1.0, 0.3),
            GaussianMf::new(0.5, 0.3),
            GaussianMf::new(0.0, 0.3), // out of order
            GaussianMf::new(0.5, 0.3),
            GaussianMf::new(1.0, 0.3),
        ];
        assert!(VariableSpec::new(-1.0, 1.0, mfs).is_err());
        assert!(RuleTable::new(vec![5, 5], vec![0; 24]).is_err());
        assert!(RuleTable::new(vec![5, 5], vec![5; 25]).is_err());
    }

    proptest! {
        #[test]
        fn membership_is_symmetric(mean in -5.0f64..5.0, sigma in 0.01f64..3.0, delta in 0.0f64..10.0) {
            let mf = GaussianMf::new(mean, sigma);
            let a = mf.membership(mean + delta);
            let b = mf.membership(mean - delta);
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn output_stays_in_range(seed in 0u64..500, x0 in -20.0f64..20.0, x1 in -20.0f64..20.0, x2 in -20.0f64..20.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fis = random_fis(&mut rng, 3);
            let y = fis.evaluate(&[x0, x1, x2]);
            prop_assert!(y >= fis.output.lo && y <= fis.output.hi);
        }
    }
}
