//! Rank sequences of skew-symmetric families over truncated scalars.
//!
//! A *skew family* is a finite sum `M = sum_j s^j M_j` of skew-symmetric
//! `q x q` layers over the ground field. For each precision `k` it induces a
//! `B_k`-linear map `B_k^q -> B_k^q`, `B_k = K[s]/(s^k)`, whose image has a
//! `K`-dimension `r_k`. Two independent computations of `r_k` are provided:
//!
//! * the **block path** ([`SkewFamily::block_matrix`]): the `kq x kq` matrix
//!   with block `(a, b)` equal to `M_{k-1-a-b}` (blocks vanish out of
//!   range), which is the flattening in the power-reversed codomain basis;
//! * the **oracle path** ([`image_dim_oracle`]): flatten the truncated
//!   series matrix in the plain ascending basis and take the rank.
//!
//! Over `K[s]/(s^k)` the sequence `r_k` is even and non-decreasing; the
//! block matrix is skew in a twisted sense that forces even rank. Evenness
//! genuinely uses that the scalars are `K[s]/(s^k)`: over the square-zero
//! plane ring `K[x,y]/(x,y)^2` the analogous image dimension can be odd, and
//! [`counterexample_image_dim`] pins down a 3 x 3 witness with image
//! dimension exactly 3.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{BkMatrix, FlattenOrder, KMatrix};
use crate::series::{SquareZero, TruncSeries};

/// Finite family of skew-symmetric layers `M_0, M_1, ...` representing
/// `M = sum_j s^j M_j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SkewFamily<F: Field> {
    field: F,
    q: usize,
    layers: Vec<KMatrix<F>>,
}

impl<F: Field> SkewFamily<F> {
    pub fn new(field: F, q: usize, layers: Vec<KMatrix<F>>) -> Result<Self> {
        if q == 0 {
            return Err(Error::Usage("family size q must be at least 1".into()));
        }
        for (j, layer) in layers.iter().enumerate() {
            if layer.rows() != q || layer.cols() != q {
                return Err(Error::Usage(format!("layer {j} is not {q} x {q}")));
            }
            if !layer.is_skew_symmetric() {
                return Err(Error::Usage(format!("layer {j} is not skew-symmetric")));
            }
        }
        Ok(SkewFamily { field, q, layers })
    }

    pub fn zero(field: F, q: usize) -> Self {
        assert!(q >= 1);
        SkewFamily { field, q, layers: Vec::new() }
    }

    /// Random family with `depth` layers.
    pub fn random<R: Rng + ?Sized>(field: F, q: usize, depth: usize, rng: &mut R) -> Self {
        let layers = (0..depth)
            .map(|_| {
                let mut m = KMatrix::zeros(field.clone(), q, q);
                for i in 0..q {
                    for j in 0..i {
                        let v = field.sample(rng);
                        m.set(j, i, field.neg(&v));
                        m.set(i, j, v);
                    }
                }
                m
            })
            .collect();
        SkewFamily { field, q, layers }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of stored layers; higher layers are zero.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, j: usize) -> KMatrix<F> {
        self.layers
            .get(j)
            .cloned()
            .unwrap_or_else(|| KMatrix::zeros(self.field.clone(), self.q, self.q))
    }

    /// The family as a single matrix over `K[s]/(s^k)`.
    pub fn series_matrix(&self, k: usize) -> BkMatrix<F> {
        assert!(k >= 1, "precision must be at least 1");
        BkMatrix::from_fn(self.field.clone(), self.q, self.q, k, |i, j| {
            let coeffs = (0..k)
                .map(|u| {
                    self.layers
                        .get(u)
                        .map_or_else(|| self.field.zero(), |m| m.get(i, j).clone())
                })
                .collect();
            TruncSeries::new(self.field.clone(), coeffs)
        })
    }

    /// The `kq x kq` block matrix with block `(a, b) = M_{k-1-a-b}`.
    pub fn block_matrix(&self, k: usize) -> KMatrix<F> {
        assert!(k >= 1, "precision must be at least 1");
        let q = self.q;
        KMatrix::from_fn(self.field.clone(), k * q, k * q, |fi, fj| {
            let (a, l) = (fi / q, fi % q);
            let (b, i) = (fj / q, fj % q);
            let deg = k as isize - 1 - a as isize - b as isize;
            if deg < 0 {
                return self.field.zero();
            }
            self.layers
                .get(deg as usize)
                .map_or_else(|| self.field.zero(), |m| m.get(l, i).clone())
        })
    }

    /// `r_k` through the block path.
    pub fn image_dim(&self, k: usize) -> usize {
        self.block_matrix(k).rank()
    }
}

/// `r_k` through the flattening oracle: rank of the truncated series matrix
/// as a `K`-linear map in the ascending coefficient basis.
pub fn image_dim_oracle<F: Field>(family: &SkewFamily<F>, k: usize) -> usize {
    family.series_matrix(k).flatten(FlattenOrder::Domain).rank()
}

/// Outcome of checking the rank sequence `r_1, ..., r_{k_max}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankSequenceReport {
    pub q: usize,
    pub k_max: usize,
    /// `dims[k-1] = r_k`.
    pub dims: Vec<usize>,
    pub all_even: bool,
    pub non_decreasing: bool,
}

impl RankSequenceReport {
    pub fn all_hold(&self) -> bool {
        self.all_even && self.non_decreasing
    }

    /// Kernel dimensions `k*q - r_k`.
    pub fn kernel_dims(&self) -> Vec<usize> {
        self.dims.iter().enumerate().map(|(i, r)| (i + 1) * self.q - r).collect()
    }
}

/// Compute `r_k` for `k = 1..=k_max` along both paths, cross-check them and
/// the nesting of successive block matrices, and report parity and
/// monotonicity of the sequence.
///
/// Path disagreement or a nesting failure is an internal error, not a
/// property violation: both are theorems of linear algebra regardless of the
/// family, so they can only fail if this crate is wrong.
pub fn rank_sequence_report<F: Field>(family: &SkewFamily<F>, k_max: usize) -> Result<RankSequenceReport> {
    if k_max < 1 {
        return Err(Error::Usage("k_max must be at least 1".into()));
    }
    let q = family.q();
    let mut dims = Vec::with_capacity(k_max);
    let mut prev_block: Option<KMatrix<F>> = None;
    for k in 1..=k_max {
        let block = family.block_matrix(k);
        let structural = block.rank();
        let oracle = image_dim_oracle(family, k);
        if structural != oracle {
            return Err(Error::Inconsistency(format!(
                "rank paths disagree at k={k}: block {structural}, oracle {oracle}"
            )));
        }
        if let Some(prev) = &prev_block {
            // the previous block matrix must reappear as the lower-left
            // corner: rows q.., columns ..(k-1)q
            let corner = block.submatrix(q..k * q, 0..(k - 1) * q);
            if corner != *prev {
                return Err(Error::Inconsistency(format!(
                    "block matrix at k={k} does not nest the one at k={}",
                    k - 1
                )));
            }
        }
        prev_block = Some(block);
        dims.push(structural);
    }
    let all_even = dims.iter().all(|r| r % 2 == 0);
    let non_decreasing = dims.windows(2).all(|w| w[0] <= w[1]);
    Ok(RankSequenceReport { q, k_max, dims, all_even, non_decreasing })
}

/// Square matrix over the plane ring `K[x,y]/(x,y)^2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlaneSkewMatrix<F: Field> {
    field: F,
    n: usize,
    entries: Vec<SquareZero<F>>,
}

impl<F: Field> PlaneSkewMatrix<F> {
    pub fn new(field: F, n: usize, entries: Vec<SquareZero<F>>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count mismatch");
        PlaneSkewMatrix { field, n, entries }
    }

    pub fn zeros(field: F, n: usize) -> Self {
        let entries = vec![SquareZero::zero(field.clone()); n * n];
        PlaneSkewMatrix { field, n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &SquareZero<F> {
        assert!(i < self.n && j < self.n, "index out of range");
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: SquareZero<F>) {
        assert!(i < self.n && j < self.n, "index out of range");
        self.entries[i * self.n + j] = v;
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            self.get(i, i).is_zero()
                && (0..i).all(|j| *self.get(i, j) == self.get(j, i).neg())
        })
    }

    /// Flatten the induced module map to a `3n x 3n` matrix over `K`, in the
    /// basis `e_i, x e_i, y e_i` (grouped by monomial: all plain, all `x`,
    /// all `y`).
    pub fn flatten(&self) -> KMatrix<F> {
        let n = self.n;
        KMatrix::from_fn(self.field.clone(), 3 * n, 3 * n, |fi, fj| {
            let (mr, l) = (fi / n, fi % n);
            let (mc, i) = (fj / n, fj % n);
            let e = self.get(l, i);
            // column basis vector carries monomial mc; entry multiplies it
            match (mc, mr) {
                (0, 0) => e.a.clone(),
                (0, 1) => e.b.clone(),
                (0, 2) => e.c.clone(),
                // x * (a + bx + cy) = a x ; y likewise
                (1, 1) | (2, 2) => e.a.clone(),
                _ => self.field.zero(),
            }
        })
    }

    /// `K`-dimension of the image of the induced map on `(K[x,y]/(x,y)^2)^n`.
    pub fn image_dim(&self) -> usize {
        self.flatten().rank()
    }
}

impl<F: Field> std::fmt::Display for PlaneSkewMatrix<F> {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(out, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The minimal witness that image dimensions of skew matrices need not be
/// even over a square-zero base:
///
/// ```text
///  [  0    0   x ]
///  [  0    0   y ]
///  [ -x   -y   0 ]
/// ```
pub fn counterexample_matrix<F: Field>(field: F) -> PlaneSkewMatrix<F> {
    let z = || SquareZero::zero(field.clone());
    let x = SquareZero::from_i64(field.clone(), 0, 1, 0);
    let y = SquareZero::from_i64(field.clone(), 0, 0, 1);
    let entries = vec![
        z(), z(), x.clone(),
        z(), z(), y.clone(),
        x.neg(), y.neg(), z(),
    ];
    PlaneSkewMatrix::new(field, 3, entries)
}

/// Image dimension of [`counterexample_matrix`]; equals 3, which is odd.
pub fn counterexample_image_dim<F: Field>(field: F) -> usize {
    counterexample_matrix(field).image_dim()
}

/// Random skew matrix over the plane ring with zero constant part (entries
/// in the maximal ideal), the regime where odd image dimensions occur.
pub fn random_plane_skew<F: Field, R: Rng + ?Sized>(field: F, n: usize, rng: &mut R) -> PlaneSkewMatrix<F> {
    let mut m = PlaneSkewMatrix::zeros(field.clone(), n);
    for i in 0..n {
        for j in 0..i {
            let v = SquareZero::new(field.clone(), field.zero(), field.sample(rng), field.sample(rng));
            m.set(j, i, v.neg());
            m.set(i, j, v);
        }
    }
    m
}
