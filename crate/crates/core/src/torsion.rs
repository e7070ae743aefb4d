//! Torsion invariants of polynomial matrices over the local ring at `s`,
//! and base change of two-term complexes to the truncations `K[s]/(s^k)`.
//!
//! For a matrix `d` over `K[s]` viewed over the localization at `(s)`, the
//! Smith form is `diag(s^{r_1}, ..., s^{r_rho})` (up to units) with
//! `r_1 <= ... <= r_rho` and `rho` the generic rank. Three independent ways
//! to reach the positive exponents are implemented:
//!
//! * [`snf_exponents`] — valuation-pivoted elimination on truncated-series
//!   entries with explicit precision bookkeeping;
//! * [`fitting_profile`] — ranks of the flattened truncations `d mod s^k`,
//!   which determine how many exponents are `>= k` for each `k`;
//! * [`minor_profile`] — the definition itself: minimum valuations of
//!   `j x j` minors (determinantal divisors). Cost is combinatorial, so this
//!   one is for small matrices and cross-checks.
//!
//! The *m-profile* of the exponent multiset is `m_j = #{ r_i >= j }`; the
//! torsion module splits off in equal pairs exactly when every `m_j` is
//! even, equivalently when the sorted exponents pair up
//! ([`TorsionProfile::is_split`]).
//!
//! A [`TwoTermComplex`] is a single map `d : B^{rank0} -> B^{rank1}`; its
//! base change to `B_k` has `h^0 = dim ker` and `h^1 = dim coker` over `K`,
//! and [`check_base_change`] verifies the closed formula
//! `h^1(k) = k * free_rank + sum_i min(r_i, k)` for every `k`, plus
//! `h^0(k) = k * (rank0 - rho)` whenever the cokernel vanishes over the
//! local ring.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::isotropic::IsotropicLattice;
use crate::linalg::{FlattenOrder, PolyMatrix};
use crate::series::{Poly, TruncSeries};

/// Invariant data of a matrix over the localization of `K[s]` at `(s)`:
/// the free rank of the cokernel and the positive Smith exponents, sorted
/// ascending.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TorsionProfile {
    pub free_rank: usize,
    pub exponents: Vec<usize>,
}

impl TorsionProfile {
    /// `m_j = #{ exponents >= j }` for `j = 1..=max(exponents)`.
    pub fn m_profile(&self) -> Vec<usize> {
        let max = self.exponents.iter().copied().max().unwrap_or(0);
        (1..=max)
            .map(|j| self.exponents.iter().filter(|&&e| e >= j).count())
            .collect()
    }

    /// Whether the torsion splits into equal pairs: every `m_j` is even.
    /// The equivalent pairing characterization (sorted exponents form equal
    /// consecutive pairs) is computed independently and asserted.
    pub fn is_split(&self) -> bool {
        let by_m = self.m_profile().iter().all(|m| m % 2 == 0);
        let mut sorted = self.exponents.clone();
        sorted.sort_unstable();
        let by_pairs = sorted.len() % 2 == 0 && sorted.chunks(2).all(|c| c[0] == c[1]);
        assert_eq!(by_m, by_pairs, "m-profile parity and exponent pairing disagree");
        by_m
    }

    /// Total torsion length `sum r_i`.
    pub fn torsion_length(&self) -> usize {
        self.exponents.iter().sum()
    }

    /// Predicted cokernel dimension after base change to `B_k`.
    pub fn h1_at(&self, k: usize) -> usize {
        k * self.free_rank + self.exponents.iter().map(|&e| e.min(k)).sum::<usize>()
    }
}

/// Safe default precision for [`snf_exponents`] and [`fitting_profile`]:
/// exponents are bounded by the valuation of the largest nonzero minor,
/// itself at most `min(rows, cols) * max_degree`.
pub fn default_precision_cap<F: Field>(d: &PolyMatrix<F>) -> usize {
    d.rows().min(d.cols()) * d.max_degree() + 1
}

/// Smith exponents over the local ring by valuation-pivoted elimination.
///
/// Entries are tracked modulo `s^p` where `p` starts at `precision_cap` and
/// drops by the pivot valuation at every step (dividing by the pivot loses
/// exactly that much precision). Runs for `generic_rank` pivots; if the
/// remaining precision cannot exhibit the next pivot the input was too
/// coarse and [`Error::PrecisionExhausted`] is returned. With the
/// [`default_precision_cap`] this cannot happen.
pub fn snf_exponents<F: Field>(d: &PolyMatrix<F>, precision_cap: usize) -> Result<TorsionProfile> {
    if precision_cap < 1 {
        return Err(Error::Usage("precision cap must be at least 1".into()));
    }
    let rho = d.generic_rank();
    let free_rank = d.rows() - rho;
    if rho == 0 {
        return Ok(TorsionProfile { free_rank, exponents: Vec::new() });
    }
    let (rows, cols) = (d.rows(), d.cols());
    let mut m: Vec<Vec<TruncSeries<F>>> = (0..rows)
        .map(|i| (0..cols).map(|j| d.get(i, j).truncate(precision_cap)).collect())
        .collect();
    let mut row_active = vec![true; rows];
    let mut col_active = vec![true; cols];
    let mut p = precision_cap;
    let mut pivots: Vec<usize> = Vec::new();

    while pivots.len() < rho {
        // minimum valuation over the active submatrix, row-major ties
        let mut best: Option<(usize, usize, usize)> = None;
        for i in (0..rows).filter(|&i| row_active[i]) {
            for j in (0..cols).filter(|&j| col_active[j]) {
                let v = m[i][j].valuation();
                if v < p && best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, i0, j0)) = best else {
            return Err(Error::PrecisionExhausted { cap: precision_cap });
        };
        if let Some(&prev) = pivots.last() {
            debug_assert!(v >= prev, "pivot valuations must be non-decreasing");
        }
        let pnew = p - v;
        let piv_inv = m[i0][j0]
            .shift_down(v)
            .inv()
            .expect("pivot is a unit after dividing by its valuation");
        // row factors at full precision, then one combined update; clearing
        // the pivot row afterwards is pure bookkeeping because its column
        // has already been zeroed
        let factors: Vec<Option<TruncSeries<F>>> = (0..rows)
            .map(|i| {
                if i == i0 || !row_active[i] || m[i][j0].is_zero() {
                    None
                } else {
                    Some(m[i][j0].shift_down(v).mul(&piv_inv))
                }
            })
            .collect();
        let pivot_row: Vec<TruncSeries<F>> =
            (0..cols).map(|j| m[i0][j].truncate(pnew)).collect();
        for i in (0..rows).filter(|&i| row_active[i] && i != i0) {
            if let Some(factor) = &factors[i] {
                for j in (0..cols).filter(|&j| col_active[j]) {
                    m[i][j] = m[i][j].truncate(pnew).sub(&factor.mul(&pivot_row[j]));
                }
            } else {
                for j in (0..cols).filter(|&j| col_active[j]) {
                    m[i][j] = m[i][j].truncate(pnew);
                }
            }
        }
        row_active[i0] = false;
        col_active[j0] = false;
        p = pnew;
        pivots.push(v);
    }

    // the residual must vanish identically: its generic rank is zero and
    // truncation is faithful on zero
    for i in (0..rows).filter(|&i| row_active[i]) {
        for j in (0..cols).filter(|&j| col_active[j]) {
            if m[i][j].truncate(p).valuation() < p {
                return Err(Error::Inconsistency(
                    "nonzero residual after exhausting the generic rank".into(),
                ));
            }
        }
    }
    let exponents: Vec<usize> = pivots.into_iter().filter(|&v| v > 0).collect();
    Ok(TorsionProfile { free_rank, exponents })
}

/// [`snf_exponents`] with an adaptive precision cap: start small and double
/// on [`Error::PrecisionExhausted`], falling back to the exact worst-case
/// bound of [`default_precision_cap`]. Sound because a successful run found
/// every pivot valuation strictly inside the working precision; the retry
/// only spends the worst-case cost when the torsion is actually deep.
pub fn snf_exponents_auto<F: Field>(d: &PolyMatrix<F>) -> Result<TorsionProfile> {
    let exact = default_precision_cap(d);
    let mut cap = 8.min(exact);
    loop {
        match snf_exponents(d, cap) {
            Err(Error::PrecisionExhausted { .. }) if cap < exact => cap = (cap * 2).min(exact),
            other => return other,
        }
    }
}

/// [`fitting_profile`] with the same adaptive cap policy as
/// [`snf_exponents_auto`].
pub fn fitting_profile_auto<F: Field>(d: &PolyMatrix<F>) -> Result<TorsionProfile> {
    let exact = default_precision_cap(d);
    let mut cap = 8.min(exact);
    loop {
        match fitting_profile(d, cap) {
            Err(Error::PrecisionExhausted { .. }) if cap < exact => cap = (cap * 2).min(exact),
            other => return other,
        }
    }
}

/// Smith exponents from ranks of flattened truncations: with `rho_k` the
/// `K`-rank of `d mod s^k` as a map on coefficient vectors,
/// `rho_k - rho_{k-1} = rho - #{ r_i >= k }`, so the counts `#{ r_i >= k }`
/// — and with them the exponents — are determined by rank computations that
/// never perform series division. Completely independent of
/// [`snf_exponents`].
pub fn fitting_profile<F: Field>(d: &PolyMatrix<F>, precision_cap: usize) -> Result<TorsionProfile> {
    if precision_cap < 1 {
        return Err(Error::Usage("precision cap must be at least 1".into()));
    }
    let rho = d.generic_rank();
    let free_rank = d.rows() - rho;
    if rho == 0 {
        return Ok(TorsionProfile { free_rank, exponents: Vec::new() });
    }
    let mut counts: Vec<usize> = Vec::new();
    let mut rho_prev = 0usize;
    for k in 1.. {
        if k > precision_cap {
            return Err(Error::PrecisionExhausted { cap: precision_cap });
        }
        let rho_k = d.to_bk(k).flatten(FlattenOrder::Domain).rank();
        let ge_k = rho - (rho_k - rho_prev);
        if let Some(&prev) = counts.last() {
            if ge_k > prev {
                return Err(Error::Inconsistency(
                    "exponent counts increased with k".into(),
                ));
            }
        }
        if ge_k == 0 {
            break;
        }
        counts.push(ge_k);
        rho_prev = rho_k;
    }
    let mut exponents = Vec::new();
    for k in 1..=counts.len() {
        let here = counts[k - 1];
        let above = counts.get(k).copied().unwrap_or(0);
        for _ in 0..here - above {
            exponents.push(k);
        }
    }
    exponents.sort_unstable();
    Ok(TorsionProfile { free_rank, exponents })
}

/// Smith exponents straight from the definition: the `j`-th determinantal
/// divisor is the minimum valuation over all `j x j` minors, and the
/// exponents are its successive differences. Enumerates all minors — use on
/// small matrices only.
pub fn minor_profile<F: Field>(d: &PolyMatrix<F>) -> Result<TorsionProfile> {
    let maxj = d.rows().min(d.cols());
    let mut deltas: Vec<usize> = Vec::new(); // delta_j for j = 1..
    for j in 1..=maxj {
        let floor = deltas.last().copied().unwrap_or(0);
        let mut best: Option<usize> = None;
        'scan: for rows in combinations(d.rows(), j) {
            for cols in combinations(d.cols(), j) {
                let det = d.submatrix_by_indices(&rows, &cols).det();
                if let Some(v) = det.valuation() {
                    best = Some(best.map_or(v, |b: usize| b.min(v)));
                    if best == Some(floor) {
                        break 'scan; // valuations cannot drop below delta_{j-1}
                    }
                }
            }
        }
        match best {
            Some(v) => deltas.push(v),
            None => break, // generic rank reached
        }
    }
    let rho = deltas.len();
    let mut exponents = Vec::new();
    let mut prev = 0usize;
    for (j, &dj) in deltas.iter().enumerate() {
        if dj < prev {
            return Err(Error::Inconsistency(format!(
                "determinantal divisors not convex at j={}",
                j + 1
            )));
        }
        if dj - prev > 0 {
            exponents.push(dj - prev);
        }
        prev = dj;
    }
    exponents.sort_unstable();
    Ok(TorsionProfile { free_rank: d.rows() - rho, exponents })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // next lexicographic k-subset of 0..n
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Recover a torsion profile from a sequence of cokernel dimensions
/// `h[k-1] = h^1` after base change to `B_k`, given the generic (free) rank
/// `q0`. Inverts `h_k = k q0 + m_1 + ... + m_k`; fails with
/// [`Error::InconsistentSequence`] when the resulting `m_j` are negative or
/// increase, which no torsion module produces.
pub fn profile_from_dims(h: &[usize], q0: usize) -> Result<TorsionProfile> {
    let mut m = Vec::with_capacity(h.len());
    let mut prev_h = 0usize;
    for (idx, &hk) in h.iter().enumerate() {
        let floor = prev_h + q0;
        if hk < floor {
            return Err(Error::InconsistentSequence(format!(
                "h[{}] = {} drops below the generic contribution {}",
                idx, hk, floor
            )));
        }
        let mk = hk - floor;
        if let Some(&prev_m) = m.last() {
            if mk > prev_m {
                return Err(Error::InconsistentSequence(format!(
                    "m_{} = {} exceeds m_{} = {}",
                    idx + 1,
                    mk,
                    idx,
                    prev_m
                )));
            }
        }
        m.push(mk);
        prev_h = hk;
    }
    let mut exponents = Vec::new();
    for j in 1..=m.len() {
        let here = m[j - 1];
        let above = m.get(j).copied().unwrap_or(0);
        for _ in 0..here - above {
            exponents.push(j);
        }
    }
    exponents.sort_unstable();
    Ok(TorsionProfile { free_rank: q0, exponents })
}

/// A complex concentrated in two terms: a single `B`-linear map
/// `d : B^{rank0} -> B^{rank1}` with `B = K[s]` (entries polynomial), to be
/// base-changed to the truncations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoTermComplex<F: Field> {
    d: PolyMatrix<F>,
}

impl<F: Field> TwoTermComplex<F> {
    pub fn new(d: PolyMatrix<F>) -> Self {
        TwoTermComplex { d }
    }

    pub fn d(&self) -> &PolyMatrix<F> {
        &self.d
    }

    /// Rank of the degree-0 term (the domain).
    pub fn rank0(&self) -> usize {
        self.d.cols()
    }

    /// Rank of the degree-1 term (the codomain).
    pub fn rank1(&self) -> usize {
        self.d.rows()
    }

    /// Random complex with entry degrees up to `max_degree` and a mix that
    /// actually produces torsion: roughly a quarter of the entries vanish,
    /// and a third of the rest carry a positive valuation (large fields
    /// would otherwise almost never show a cokernel with torsion, leaving
    /// the `min(r_i, k)` term of the base-change formula untested).
    pub fn random<R: Rng + ?Sized>(
        field: F,
        rank0: usize,
        rank1: usize,
        max_degree: usize,
        rng: &mut R,
    ) -> Self {
        let d = PolyMatrix::from_fn(field.clone(), rank1, rank0, |_, _| {
            if rng.random_range(0..4u8) == 0 {
                return Poly::zero(field.clone());
            }
            let deg = rng.random_range(0..=max_degree);
            let val = if rng.random_range(0..3u8) == 0 { rng.random_range(0..=deg) } else { 0 };
            let coeffs: Vec<F::Elem> = (0..=deg)
                .map(|d| if d < val { field.zero() } else { field.sample(rng) })
                .collect();
            Poly::new(field.clone(), coeffs)
        });
        TwoTermComplex { d }
    }

    /// `(h^0, h^1)` of the complex base-changed to `B_k`: kernel and
    /// cokernel dimensions over `K` of the flattened map.
    pub fn cohomology_dims(&self, k: usize) -> (usize, usize) {
        assert!(k >= 1, "precision must be at least 1");
        let rank = self.d.to_bk(k).flatten(FlattenOrder::Domain).rank();
        (k * self.rank0() - rank, k * self.rank1() - rank)
    }
}

/// The intersection complex of a lattice pair: `d = [W1^T | -W2^T]`, whose
/// kernel over `B_k` is the intersection `W_1 (x) B_k  meet  W_2 (x) B_k`
/// (the first block of a kernel vector gives coordinates in `W_1`, and
/// injectivity of `W1^T` makes the identification exact). Basis entries are
/// lifted verbatim to polynomials.
pub fn model_complex<F: Field>(
    w1: &IsotropicLattice<F>,
    w2: &IsotropicLattice<F>,
) -> TwoTermComplex<F> {
    let a = w1.basis().lift().transpose();
    let b = w2.basis().lift().transpose();
    let field = a.field().clone();
    let (rows, c1, c2) = (a.rows(), a.cols(), b.cols());
    let d = PolyMatrix::from_fn(field, rows, c1 + c2, |i, j| {
        if j < c1 {
            a.get(i, j).clone()
        } else {
            b.get(i, j - c1).neg()
        }
    });
    TwoTermComplex::new(d)
}

/// Per-`k` comparison of computed vs. predicted cohomology dimensions.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BaseChangeReport {
    pub profile: TorsionProfile,
    /// Generic rank of `d`.
    pub rho: usize,
    /// `h^1` after base change to `B_k`, `k = 1..=k_max`.
    pub h1_computed: Vec<usize>,
    /// `k * free_rank + sum min(r_i, k)`.
    pub h1_predicted: Vec<usize>,
    pub h1_matches: bool,
    /// Whether the cokernel vanishes over the local ring.
    pub h1_vanishes: bool,
    pub h0_computed: Vec<usize>,
    /// Checked only when the cokernel vanishes: `h^0(k) = k (rank0 - rho)`.
    pub h0_matches: Option<bool>,
    /// `h^0(k) - k (rank0 - rho)` when the cokernel does not vanish;
    /// recorded, never asserted.
    pub h0_discrepancies: Vec<i64>,
}

impl BaseChangeReport {
    pub fn all_hold(&self) -> bool {
        self.h1_matches && self.h0_matches.unwrap_or(true)
    }
}

/// Verify the base-change formulas for `k = 1..=k_max`.
pub fn check_base_change<F: Field>(c: &TwoTermComplex<F>, k_max: usize) -> Result<BaseChangeReport> {
    if k_max < 1 {
        return Err(Error::Usage("k_max must be at least 1".into()));
    }
    let profile = snf_exponents_auto(c.d())?;
    let rho = c.rank1() - profile.free_rank;
    let h1_vanishes = profile.free_rank == 0 && profile.exponents.is_empty();
    let h0_generic = c.rank0() - rho;
    let mut h1_computed = Vec::with_capacity(k_max);
    let mut h1_predicted = Vec::with_capacity(k_max);
    let mut h0_computed = Vec::with_capacity(k_max);
    let mut h0_discrepancies = Vec::new();
    for k in 1..=k_max {
        let (h0, h1) = c.cohomology_dims(k);
        h1_computed.push(h1);
        h1_predicted.push(profile.h1_at(k));
        h0_computed.push(h0);
        if !h1_vanishes {
            h0_discrepancies.push(h0 as i64 - (k * h0_generic) as i64);
        }
    }
    let h1_matches = h1_computed == h1_predicted;
    let h0_matches = if h1_vanishes {
        Some((1..=k_max).all(|k| h0_computed[k - 1] == k * h0_generic))
    } else {
        None
    };
    Ok(BaseChangeReport {
        profile,
        rho,
        h1_computed,
        h1_predicted,
        h1_matches,
        h1_vanishes,
        h0_computed,
        h0_matches,
        h0_discrepancies,
    })
}
