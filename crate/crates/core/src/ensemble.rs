//! Monte Carlo study of how often `(AᵀA)⁻¹` turns out diagonally dominant
//! for random dictionaries. Trials are embarrassingly parallel and
//! deterministic: each trial draws from its own counter-derived stream, so
//! results do not depend on scheduling or worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{classify_dominance, gram, invert_spd, DenseMatrix};

/// Entry distributions of the study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixDistribution {
    /// Standard normal entries.
    Normal,
    /// Uniform on [0, 1].
    Uniform01,
    /// 1 with probability p, 0 otherwise; requires p in (0, 1).
    Bernoulli(f64),
}

impl MatrixDistribution {
    /// Name used in CSV output and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            MatrixDistribution::Normal => "normal",
            MatrixDistribution::Uniform01 => "uniform01",
            MatrixDistribution::Bernoulli(_) => "bernoulli",
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match self {
            MatrixDistribution::Bernoulli(p) => Some(*p),
            _ => None,
        }
    }
}

impl std::fmt::Display for MatrixDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatrixDistribution::Bernoulli(p) => write!(f, "bernoulli({p})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Parameters of one frequency study.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub distribution: MatrixDistribution,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(
        distribution: MatrixDistribution,
        m: usize,
        n: usize,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("m and n must be positive".into()));
        }
        if trials == 0 {
            return Err(Error::InvalidArgument("need at least one trial".into()));
        }
        if let MatrixDistribution::Bernoulli(p) = distribution {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "Bernoulli parameter must lie strictly inside (0, 1), got {p}"
                )));
            }
        }
        Ok(Self {
            distribution,
            m,
            n,
            trials,
            seed,
        })
    }
}

/// Outcome counts of a study. `frequency` is `dd_count / trials`.
#[derive(Debug, Clone)]
pub struct FrequencyReport {
    pub spec: EnsembleSpec,
    pub dd_count: usize,
    pub non_dd_count: usize,
    pub singular_count: usize,
    /// Set when the study ran with m < n despite the hypothesis refusal.
    pub caveat: Option<String>,
}

impl FrequencyReport {
    pub fn frequency(&self) -> f64 {
        self.dd_count as f64 / self.spec.trials as f64
    }
}

/// Draws the trial's matrix. Deterministic in `(spec.seed, trial_index)`:
/// the generator is seeded once from the seed and jumps to the stream
/// numbered by the trial, so any subset of trials can be reproduced in any
/// order.
pub fn sample_matrix(spec: &EnsembleSpec, trial_index: usize) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(trial_index as u64);
    let count = spec.m * spec.n;
    let entries: Vec<f64> = match spec.distribution {
        MatrixDistribution::Normal => (0..count)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect(),
        MatrixDistribution::Uniform01 => (0..count).map(|_| rng.random::<f64>()).collect(),
        MatrixDistribution::Bernoulli(p) => (0..count)
            .map(|_| if rng.random_bool(p) { 1.0 } else { 0.0 })
            .collect(),
    };
    DenseMatrix::new(spec.m, spec.n, entries).expect("sampled entries are finite")
}

enum TrialOutcome {
    Dominant,
    NotDominant,
    Singular,
}

fn classify_trial(a: &DenseMatrix) -> TrialOutcome {
    let g = gram(a);
    match invert_spd(&g) {
        Err(_) => TrialOutcome::Singular,
        Ok(h) => {
            if classify_dominance(&h).expect("square").is_dominant() {
                TrialOutcome::Dominant
            } else {
                TrialOutcome::NotDominant
            }
        }
    }
}

/// Runs the study with a caller-provided matrix source. This is the
/// engine behind [`run_frequency_study`]; tests use it to inject
/// deterministic dictionaries (e.g. exactly orthogonal ones).
pub fn run_frequency_study_with_sampler<F>(spec: &EnsembleSpec, sampler: F) -> FrequencyReport
where
    F: Fn(&EnsembleSpec, usize) -> DenseMatrix + Sync,
{
    let (dd, non_dd, singular) = (0..spec.trials)
        .into_par_iter()
        .map(|t| match classify_trial(&sampler(spec, t)) {
            TrialOutcome::Dominant => (1usize, 0usize, 0usize),
            TrialOutcome::NotDominant => (0, 1, 0),
            TrialOutcome::Singular => (0, 0, 1),
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    FrequencyReport {
        spec: spec.clone(),
        dd_count: dd,
        non_dd_count: non_dd,
        singular_count: singular,
        caveat: None,
    }
}

/// Monte Carlo frequency of `(AᵀA)⁻¹` being diagonally dominant. Singular
/// Gram matrices (duplicate or zero columns are common for sparse Bernoulli
/// draws) are counted in their own bucket, never as dominant. Refuses
/// m < n, where the dominance condition cannot hold.
pub fn run_frequency_study(spec: &EnsembleSpec) -> Result<FrequencyReport> {
    if spec.m < spec.n {
        return Err(Error::Hypothesis(format!(
            "m = {} < n = {}: the Gram matrix is singular for wide dictionaries; use the wide override to count anyway",
            spec.m, spec.n
        )));
    }
    Ok(run_frequency_study_with_sampler(spec, sample_matrix))
}

/// Like [`run_frequency_study`] but allowing m < n; such reports carry a
/// caveat marker since every trial is then necessarily singular.
pub fn run_frequency_study_allow_wide(spec: &EnsembleSpec) -> Result<FrequencyReport> {
    let mut report = run_frequency_study_with_sampler(spec, sample_matrix);
    if spec.m < spec.n {
        report.caveat = Some(format!(
            "m = {} < n = {}: dominance hypothesis not applicable",
            spec.m, spec.n
        ));
    }
    Ok(report)
}

/// The default sweep grid: all four distributions, n from 2 to 10,
/// m in {n, 2n, 4n}.
pub fn default_sweep_specs(trials: usize, seed: u64) -> Vec<EnsembleSpec> {
    let distributions = [
        MatrixDistribution::Normal,
        MatrixDistribution::Uniform01,
        MatrixDistribution::Bernoulli(0.1),
        MatrixDistribution::Bernoulli(0.5),
    ];
    let mut specs = Vec::new();
    for dist in distributions {
        for n in 2..=10 {
            for factor in [1, 2, 4] {
                specs.push(
                    EnsembleSpec::new(dist, factor * n, n, trials, seed)
                        .expect("valid sweep spec"),
                );
            }
        }
    }
    specs
}
