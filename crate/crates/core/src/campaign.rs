//! Seeded verification campaigns over randomly generated instances.
//!
//! Each campaign draws `trials` independent instances, checks the
//! advertised properties on every one, and aggregates a [`Report`]. The
//! per-trial seed is derived as `splitmix64(seed, index)`, so trials are
//! order-independent: parallel and sequential execution produce identical
//! reports, and any failing trial can be regenerated from its recorded
//! seed alone.
//!
//! With the `parallel` feature (on by default) trials run on a rayon work
//! pool; records are collected in index order either way. Without the
//! feature [`Execution::Parallel`] degrades to the sequential path.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::isotropic::{
    check_intersection_parity, random_isotropic_pair_detailed, GeneratedPair, GeneratorMode,
};
use crate::linalg::PolyMatrix;
use crate::report::{Report, Summary, TrialDetail, TrialRecord};
use crate::skew::{
    counterexample_matrix, random_plane_skew, rank_sequence_report, PlaneSkewMatrix, SkewFamily,
};
use crate::torsion::{
    check_base_change, fitting_profile_auto, minor_profile, model_complex, snf_exponents_auto,
    TwoTermComplex,
};

/// Ground field selection, serialized into every report.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldChoice {
    Prime { p: u64 },
    Rationals,
}

/// How trials are scheduled. Does not appear in reports: results are
/// identical either way.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// Shared configuration for all campaigns; each runner reads the fields it
/// needs. Ranges are inclusive `(lo, hi)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub field: FieldChoice,
    /// Matrix size range for skew-family campaigns.
    pub q_range: (usize, usize),
    /// Lattice rank range for isotropic and torsion campaigns.
    pub r_range: (usize, usize),
    /// Term-rank range for base-change campaigns.
    pub rank_range: (usize, usize),
    /// Entry degree bound for base-change campaigns.
    pub max_degree: usize,
    /// Truncation orders checked: `k = 1..=k_max` (also the working
    /// precision of generated instances).
    pub k_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: GeneratorMode,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            field: FieldChoice::Prime { p: 32003 },
            q_range: (1, 8),
            r_range: (1, 6),
            rank_range: (1, 6),
            max_degree: 4,
            k_max: 6,
            trials: 500,
            seed: 0,
            mode: GeneratorMode::MuParam,
        }
    }
}

/// The finalizing mix of the splitmix64 generator.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derived seed for one trial: position `index + 1` of the splitmix64
/// stream started at `seed`. Order-independent by construction.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Run `f` on `0..trials`, returning results in index order regardless of
/// scheduling.
pub fn map_trials<T, G>(execution: Execution, trials: usize, f: G) -> Vec<T>
where
    T: Send,
    G: Fn(usize) -> T + Sync + Send,
{
    match execution {
        Execution::Sequential => (0..trials).map(f).collect(),
        Execution::Parallel => {
            #[cfg(feature = "parallel")]
            {
                (0..trials).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..trials).map(f).collect()
            }
        }
    }
}

fn validate_common(config: &CampaignConfig) -> Result<()> {
    if config.trials < 1 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    if config.k_max < 1 {
        return Err(Error::Usage("k-max must be at least 1".into()));
    }
    Ok(())
}

fn validate_range(range: (usize, usize), name: &str) -> Result<()> {
    if range.0 < 1 {
        return Err(Error::Usage(format!("{name} range must start at 1 or above")));
    }
    if range.0 > range.1 {
        return Err(Error::Usage(format!(
            "{name} range {}..{} is empty",
            range.0, range.1
        )));
    }
    Ok(())
}

fn finish(
    campaign: &str,
    config: &CampaignConfig,
    trials: Vec<TrialRecord>,
    stats: BTreeMap<String, u64>,
    started: Instant,
) -> Report {
    let failures = trials.iter().filter(|t| !t.ok).count();
    Report {
        campaign: campaign.to_string(),
        config: config.clone(),
        summary: Summary {
            trials: trials.len(),
            failures,
            stats,
            wall_ms: started.elapsed().as_millis() as u64,
        },
        trials,
    }
}

/// Fuzz skew families and verify their rank sequences: every dimension
/// even, non-decreasing, and the block-matrix path agreeing with the
/// flattened-map oracle (the latter two are checked inside
/// [`rank_sequence_report`], which turns a disagreement into an error).
pub fn run_skew<F: Field>(
    field: F,
    config: &CampaignConfig,
    execution: Execution,
) -> Result<Report> {
    validate_common(config)?;
    validate_range(config.q_range, "q")?;
    let started = Instant::now();
    let records = map_trials(execution, config.trials, |i| {
        let seed = trial_seed(config.seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = rng.random_range(config.q_range.0..=config.q_range.1);
        let family = SkewFamily::random(field.clone(), q, config.k_max, &mut rng);
        match rank_sequence_report(&family, config.k_max) {
            Ok(rep) => {
                let ok = rep.all_hold();
                let failure = (!ok).then(|| {
                    format!(
                        "rank sequence violated: dims={:?} even={} non-decreasing={}",
                        rep.dims, rep.all_even, rep.non_decreasing
                    )
                });
                let kernel_dims = rep.kernel_dims();
                TrialRecord {
                    index: i,
                    seed,
                    ok,
                    failure,
                    detail: TrialDetail::Skew { q, dims: rep.dims, kernel_dims },
                }
            }
            Err(e) => TrialRecord {
                index: i,
                seed,
                ok: false,
                failure: Some(e.to_string()),
                detail: TrialDetail::Skew { q, dims: vec![], kernel_dims: vec![] },
            }
        }
    });
    let mut stats = BTreeMap::new();
    let max_dim = records
        .iter()
        .filter_map(|t| match &t.detail {
            TrialDetail::Skew { dims, .. } => dims.last().copied(),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    stats.insert("max-image-dim".into(), max_dim as u64);
    Ok(finish("skew", config, records, stats, started))
}

/// Instance stream shared by the isotropic and torsion campaigns, so the
/// torsion properties are checked on literally the same pairs.
fn pair_for_trial<F: Field>(
    field: &F,
    config: &CampaignConfig,
    index: usize,
) -> (u64, usize, Result<GeneratedPair<F>>) {
    let seed = trial_seed(config.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = rng.random_range(config.r_range.0..=config.r_range.1);
    let inner: u64 = rng.random();
    let pair = random_isotropic_pair_detailed(field.clone(), r, config.k_max, inner, config.mode);
    (seed, r, pair)
}

fn empty_isotropic_detail(r: usize) -> TrialDetail {
    TrialDetail::Isotropic {
        r,
        q_seq: vec![],
        d_seq: vec![],
        planted_matched: None,
        q_generic: 0,
        m1: 0,
        m1_even: false,
        transverse: false,
    }
}

fn isotropic_trial<F: Field>(field: &F, config: &CampaignConfig, i: usize) -> TrialRecord {
    let (seed, r, pair) = pair_for_trial(field, config, i);
    let pair = match pair {
        Ok(p) => p,
        Err(e) => {
            return TrialRecord {
                index: i,
                seed,
                ok: false,
                failure: Some(e.to_string()),
                detail: empty_isotropic_detail(r),
            }
        }
    };
    let parity = match check_intersection_parity(&pair.space, &pair.w1, &pair.w2, config.k_max) {
        Ok(p) => p,
        Err(e) => {
            return TrialRecord {
                index: i,
                seed,
                ok: false,
                failure: Some(e.to_string()),
                detail: empty_isotropic_detail(r),
            }
        }
    };
    let mut problems: Vec<String> = Vec::new();
    if !parity.all_even {
        problems.push(format!("some d_k is odd: {:?}", parity.d_seq));
    }
    if !parity.non_decreasing {
        problems.push(format!("d_k decreased: {:?}", parity.d_seq));
    }
    let planted_matched = pair.planted_q.as_ref().map(|p| p == &parity.q_seq);
    if planted_matched == Some(false) {
        problems.push(format!(
            "planted q-sequence {:?} but computed {:?}",
            pair.planted_q.as_ref().unwrap(),
            parity.q_seq
        ));
    }
    // generic intersection dimension = free rank of the intersection module
    let complex = model_complex(&pair.w1, &pair.w2);
    let q_generic = complex.rank0() - complex.d().generic_rank();
    let q1 = parity.q_seq[0];
    let m1 = match q1.checked_sub(q_generic) {
        Some(m) => m,
        None => {
            problems.push(format!("q_1 = {q1} below the generic dimension {q_generic}"));
            0
        }
    };
    let transverse = q1 == 0;
    if transverse && parity.q_seq.iter().any(|&x| x != 0) {
        problems.push(format!("transversality not persistent: {:?}", parity.q_seq));
    }
    let ok = problems.is_empty();
    TrialRecord {
        index: i,
        seed,
        ok,
        failure: (!ok).then(|| problems.join("; ")),
        detail: TrialDetail::Isotropic {
            r,
            q_seq: parity.q_seq,
            d_seq: parity.d_seq,
            planted_matched,
            q_generic,
            m1,
            m1_even: m1 % 2 == 0,
            transverse,
        },
    }
}

/// Fuzz isotropic lattice pairs and verify the intersection-parity
/// properties: the structural/oracle agreement and hyperbolic-frame
/// contracts (checked inside [`check_intersection_parity`]), `d_k` even and
/// non-decreasing, the planted ground truth when the generator provides
/// one, and persistence of transversality. The parity of
/// `m_1 = q_1 - q_generic` is recorded as a statistic, not asserted.
pub fn run_isotropic<F: Field>(
    field: F,
    config: &CampaignConfig,
    execution: Execution,
) -> Result<Report> {
    validate_common(config)?;
    validate_range(config.r_range, "r")?;
    let started = Instant::now();
    let records = map_trials(execution, config.trials, |i| isotropic_trial(&field, config, i));
    let mut m1_even = 0u64;
    let mut m1_odd = 0u64;
    let mut transverse_count = 0u64;
    let mut planted_checked = 0u64;
    for t in &records {
        if let TrialDetail::Isotropic { m1_even: e, transverse, planted_matched, .. } = &t.detail {
            if *e {
                m1_even += 1;
            } else {
                m1_odd += 1;
            }
            if *transverse {
                transverse_count += 1;
            }
            if planted_matched.is_some() {
                planted_checked += 1;
            }
        }
    }
    let stats = BTreeMap::from([
        ("m1-even".to_string(), m1_even),
        ("m1-odd".to_string(), m1_odd),
        // same count as m1-even: q_1 and the generic dimension share parity
        // exactly when m_1 is even
        ("q1-parity-matches-generic".to_string(), m1_even),
        ("transverse".to_string(), transverse_count),
        ("planted-checked".to_string(), planted_checked),
    ]);
    Ok(finish("isotropic", config, records, stats, started))
}

fn empty_torsion_detail(r: usize) -> TrialDetail {
    TrialDetail::Torsion {
        r,
        free_rank: 0,
        exponents: vec![],
        m_profile: vec![],
        split: false,
        snf_matches_rank_oracle: false,
        minor_oracle_checked: false,
        cohomology_matches_intersections: false,
        base_change_holds: false,
    }
}

/// Side of the intersection complex below which the literal minor oracle is
/// affordable (the minor count grows as binomial squares).
const MINOR_ORACLE_MAX_SIDE: usize = 4;

fn torsion_trial<F: Field>(field: &F, config: &CampaignConfig, i: usize) -> TrialRecord {
    let (seed, r, pair) = pair_for_trial(field, config, i);
    let fail = |failure: String| TrialRecord {
        index: i,
        seed,
        ok: false,
        failure: Some(failure),
        detail: empty_torsion_detail(r),
    };
    let pair = match pair {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    let complex = model_complex(&pair.w1, &pair.w2);
    let profile = match snf_exponents_auto(complex.d()) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    let fitting = match fitting_profile_auto(complex.d()) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    let snf_matches_rank_oracle = profile == fitting;
    let minors_feasible = complex.rank0().min(complex.rank1()) <= MINOR_ORACLE_MAX_SIDE;
    let minor_agrees = if minors_feasible {
        match minor_profile(complex.d()) {
            Ok(p) => p == profile,
            Err(e) => return fail(e.to_string()),
        }
    } else {
        true
    };
    let split = profile.is_split();
    let parity = match check_intersection_parity(&pair.space, &pair.w1, &pair.w2, config.k_max) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    let cohomology_matches = (1..=config.k_max).all(|k| {
        let (h0, h1) = complex.cohomology_dims(k);
        h0 == parity.q_seq[k - 1] && h1 == parity.q_seq[k - 1]
    });
    let base = match check_base_change(&complex, config.k_max) {
        Ok(b) => b,
        Err(e) => return fail(e.to_string()),
    };
    let mut problems: Vec<String> = Vec::new();
    if !snf_matches_rank_oracle {
        problems.push(format!(
            "elimination profile {:?} disagrees with rank oracle {:?}",
            profile, fitting
        ));
    }
    if !minor_agrees {
        problems.push("minor oracle disagrees with elimination profile".into());
    }
    if !split {
        problems.push(format!("torsion profile does not split: m = {:?}", profile.m_profile()));
    }
    if !cohomology_matches {
        problems.push("cohomology dimensions differ from intersection dimensions".into());
    }
    if !base.all_hold() {
        problems.push(format!(
            "base-change formula failed: h1 {:?} vs {:?}",
            base.h1_computed, base.h1_predicted
        ));
    }
    let ok = problems.is_empty();
    TrialRecord {
        index: i,
        seed,
        ok,
        failure: (!ok).then(|| problems.join("; ")),
        detail: TrialDetail::Torsion {
            r,
            free_rank: profile.free_rank,
            m_profile: profile.m_profile(),
            exponents: profile.exponents,
            split,
            snf_matches_rank_oracle,
            minor_oracle_checked: minors_feasible,
            cohomology_matches_intersections: cohomology_matches,
            base_change_holds: base.all_hold(),
        },
    }
}

/// Fuzz the intersection complexes of isotropic pairs — the same instance
/// stream as [`run_isotropic`] for the same config — and verify: the
/// elimination profile agrees with the rank oracle (and, on small
/// matrices, with the literal minor oracle), the torsion splits in pairs,
/// the complex's cohomology dimensions reproduce the intersection
/// dimensions, and the base-change formulas hold.
pub fn run_torsion<F: Field>(
    field: F,
    config: &CampaignConfig,
    execution: Execution,
) -> Result<Report> {
    validate_common(config)?;
    validate_range(config.r_range, "r")?;
    let started = Instant::now();
    let records = map_trials(execution, config.trials, |i| torsion_trial(&field, config, i));
    let mut split_count = 0u64;
    let mut minor_runs = 0u64;
    let mut torsion_free = 0u64;
    let mut max_exponent = 0u64;
    for t in &records {
        if let TrialDetail::Torsion { split, minor_oracle_checked, exponents, .. } = &t.detail {
            if *split {
                split_count += 1;
            }
            if *minor_oracle_checked {
                minor_runs += 1;
            }
            if exponents.is_empty() {
                torsion_free += 1;
            }
            max_exponent = max_exponent.max(exponents.iter().copied().max().unwrap_or(0) as u64);
        }
    }
    let stats = BTreeMap::from([
        ("split".to_string(), split_count),
        ("minor-oracle-runs".to_string(), minor_runs),
        ("torsion-free".to_string(), torsion_free),
        ("max-exponent".to_string(), max_exponent),
    ]);
    Ok(finish("torsion", config, records, stats, started))
}

/// Fuzz free two-term complexes and verify the base-change formulas: the
/// cokernel dimension over every `B_k` equals
/// `k * free_rank + sum min(r_i, k)`, and when the cokernel vanishes over
/// the local ring the kernel dimension is exactly `k * (rank0 - rho)`.
pub fn run_base_change<F: Field>(
    field: F,
    config: &CampaignConfig,
    execution: Execution,
) -> Result<Report> {
    validate_common(config)?;
    validate_range(config.rank_range, "rank")?;
    let started = Instant::now();
    let records = map_trials(execution, config.trials, |i| {
        let seed = trial_seed(config.seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank0 = rng.random_range(config.rank_range.0..=config.rank_range.1);
        let rank1 = rng.random_range(config.rank_range.0..=config.rank_range.1);
        let complex =
            TwoTermComplex::random(field.clone(), rank0, rank1, config.max_degree, &mut rng);
        match check_base_change(&complex, config.k_max) {
            Ok(rep) => {
                let ok = rep.all_hold();
                let failure = (!ok).then(|| {
                    format!(
                        "base-change formula failed: h1 {:?} vs predicted {:?}, h0 ok: {:?}",
                        rep.h1_computed, rep.h1_predicted, rep.h0_matches
                    )
                });
                TrialRecord {
                    index: i,
                    seed,
                    ok,
                    failure,
                    detail: TrialDetail::BaseChange {
                        rank0,
                        rank1,
                        free_rank: rep.profile.free_rank,
                        exponents: rep.profile.exponents.clone(),
                        h1_computed: rep.h1_computed,
                        h1_predicted: rep.h1_predicted,
                        h1_vanishes: rep.h1_vanishes,
                        h0_checked: rep.h0_matches,
                    },
                }
            }
            Err(e) => TrialRecord {
                index: i,
                seed,
                ok: false,
                failure: Some(e.to_string()),
                detail: TrialDetail::BaseChange {
                    rank0,
                    rank1,
                    free_rank: 0,
                    exponents: vec![],
                    h1_computed: vec![],
                    h1_predicted: vec![],
                    h1_vanishes: false,
                    h0_checked: None,
                },
            }
        }
    });
    let mut vanishing = 0u64;
    let mut with_torsion = 0u64;
    for t in &records {
        if let TrialDetail::BaseChange { h1_vanishes, exponents, .. } = &t.detail {
            if *h1_vanishes {
                vanishing += 1;
            }
            if !exponents.is_empty() {
                with_torsion += 1;
            }
        }
    }
    let stats = BTreeMap::from([
        ("h1-vanishes".to_string(), vanishing),
        ("with-torsion".to_string(), with_torsion),
    ]);
    Ok(finish("base-change", config, records, stats, started))
}

/// Which plane-ring instance [`run_counterexample`] evaluates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CounterexampleVariant {
    /// The fixed 3x3 showcase matrix; its image dimension must be 3.
    Fixed,
    /// The zero matrix; its image dimension must be 0.
    Zero,
    /// A random skew matrix over the plane ring; dimension and parity are
    /// reported, nothing is asserted — odd dimensions are the point.
    Random,
}

/// Evaluate one skew matrix over the square-zero plane ring and report its
/// image dimension and parity: the showcase that evenness genuinely needs
/// the one-variable ring.
pub fn run_counterexample<F: Field>(
    field: F,
    variant: CounterexampleVariant,
    config: &CampaignConfig,
) -> Result<Report> {
    let started = Instant::now();
    let seed = trial_seed(config.seed, 0);
    let (name, m) = match variant {
        CounterexampleVariant::Fixed => ("fixed", counterexample_matrix(field)),
        CounterexampleVariant::Zero => ("zero", PlaneSkewMatrix::zeros(field, 3)),
        CounterexampleVariant::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ("random", random_plane_skew(field, 3, &mut rng))
        }
    };
    let n = m.n();
    let dimension = m.image_dim();
    let parity = if dimension % 2 == 0 { "even" } else { "odd" };
    let (ok, failure) = match variant {
        CounterexampleVariant::Fixed if dimension != 3 => {
            (false, Some(format!("fixed instance has image dimension {dimension}, expected 3")))
        }
        CounterexampleVariant::Zero if dimension != 0 => {
            (false, Some(format!("zero matrix has image dimension {dimension}, expected 0")))
        }
        _ => (true, None),
    };
    let entries: Vec<String> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>().join(", "))
        .collect();
    let record = TrialRecord {
        index: 0,
        seed,
        ok,
        failure,
        detail: TrialDetail::Counterexample {
            variant: name.to_string(),
            n,
            dimension,
            parity: parity.to_string(),
            entries,
        },
    };
    let stats = BTreeMap::from([("dimension".to_string(), dimension as u64)]);
    Ok(finish("counterexample", config, vec![record], stats, started))
}

/// Torsion profile of an explicit polynomial matrix: the elimination route
/// cross-checked against the rank oracle, reported as a one-trial report.
pub fn matrix_profile_report<F: Field>(
    matrix: &PolyMatrix<F>,
    config: &CampaignConfig,
) -> Result<Report> {
    let started = Instant::now();
    let profile = snf_exponents_auto(matrix)?;
    let fitting = fitting_profile_auto(matrix)?;
    let ok = profile == fitting;
    let failure = (!ok).then(|| {
        format!("elimination profile {:?} disagrees with rank oracle {:?}", profile, fitting)
    });
    let split = profile.is_split();
    let record = TrialRecord {
        index: 0,
        seed: config.seed,
        ok,
        failure,
        detail: TrialDetail::MatrixProfile {
            rows: matrix.rows(),
            cols: matrix.cols(),
            free_rank: profile.free_rank,
            m_profile: profile.m_profile(),
            exponents: profile.exponents,
            split,
        },
    };
    let stats = BTreeMap::new();
    Ok(finish("torsion", config, vec![record], stats, started))
}
