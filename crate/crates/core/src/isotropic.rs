//! Intersection dimensions of totally isotropic lattice pairs.
//!
//! The ambient object is a free module `V` of rank `2r` over
//! `B_N = K[s]/(s^N)` with a symmetric bilinear form whose reduction mod `s`
//! is nondegenerate. A pair of totally isotropic rank-`r` direct summands
//! `W_1, W_2` determines, for every `1 <= k <= N`, the dimension
//!
//! ```text
//! q_k = dim_K ( W_1 (x) B_k  intersect  W_2 (x) B_k )
//! ```
//!
//! computed here along two independent routes:
//!
//! * an **oracle** ([`intersection_dim_oracle`]): flatten both truncated
//!   lattices to `K`-column-spans and intersect them directly;
//! * a **structural path** ([`intersection_dim_structural`]): align `W_1` to
//!   a hyperbolic frame adapted to the mod-`s` intersection, write the
//!   second lattice as a graph over the frame, extract the skew matrix `mu`
//!   of first-order corrections ([`align_and_extract_mu`]), and read `q_k`
//!   off the rank sequence of the family `s * mu` from [`crate::skew`].
//!
//! Both routes must agree; the resulting deviation sequence
//! `d_k = k q_1 - q_k` is even and non-decreasing, which is the parity
//! statement [`check_intersection_parity`] verifies instance by instance.
//!
//! Conventions: vectors are rows, the form of two rows `u, v` is
//! `u G v^T`, a frame is the `2r x 2r` matrix with rows
//! `e_1..e_r, f_1..f_r`, and hyperbolic means `Q(e_i, e_j) = Q(f_i, f_j) = 0`,
//! `Q(f_i, e_j) = delta_ij`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{subspace_intersection_dim, BkMatrix, FlattenOrder, KMatrix, PolyMatrix};
use crate::series::{Poly, TruncSeries};
use crate::skew::SkewFamily;

/// Free bilinear space of rank `2r` over `K[s]/(s^N)` with symmetric gram
/// matrix whose reduction is nondegenerate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BilinearSpace<F: Field> {
    r: usize,
    gram: BkMatrix<F>,
}

impl<F: Field> BilinearSpace<F> {
    pub fn new(gram: BkMatrix<F>) -> Result<Self> {
        let n = gram.rows();
        if n == 0 || n != gram.cols() || n % 2 != 0 {
            return Err(Error::Usage(format!(
                "gram matrix must be square of even positive size, got {} x {}",
                gram.rows(),
                gram.cols()
            )));
        }
        if !gram.is_symmetric() {
            return Err(Error::Usage("gram matrix is not symmetric".into()));
        }
        if gram.reduction().rank() != n {
            return Err(Error::Usage("gram matrix reduction is degenerate".into()));
        }
        Ok(BilinearSpace { r: n / 2, gram })
    }

    /// Standard hyperbolic space: gram `[[0, I], [I, 0]]` in the basis
    /// `e_1..e_r, f_1..f_r`.
    pub fn standard_hyperbolic(field: F, r: usize, precision: usize) -> Self {
        assert!(r >= 1, "rank must be at least 1");
        let gram = BkMatrix::from_constant(&standard_gram_k(field, r), precision);
        BilinearSpace { r, gram }
    }

    pub fn field(&self) -> &F {
        self.gram.field()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn precision(&self) -> usize {
        self.gram.precision()
    }

    pub fn gram(&self) -> &BkMatrix<F> {
        &self.gram
    }

    /// All pairings of the rows of `a` against the rows of `b`:
    /// `(i, j) -> a_i G b_j^T`.
    pub fn pairing(&self, a: &BkMatrix<F>, b: &BkMatrix<F>) -> BkMatrix<F> {
        a.mul(&self.gram).mul(&b.transpose())
    }
}

fn standard_gram_k<F: Field>(field: F, r: usize) -> KMatrix<F> {
    KMatrix::from_fn(field.clone(), 2 * r, 2 * r, |i, j| {
        if i + r == j || j + r == i {
            field.one()
        } else {
            field.zero()
        }
    })
}

/// Totally isotropic rank-`r` direct summand of a [`BilinearSpace`], stored
/// as an `r x 2r` matrix of basis rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IsotropicLattice<F: Field> {
    basis: BkMatrix<F>,
}

impl<F: Field> IsotropicLattice<F> {
    /// Validates total isotropy and the direct-summand condition (the
    /// reduction of the basis has full rank `r`).
    pub fn new(space: &BilinearSpace<F>, basis: BkMatrix<F>) -> Result<Self> {
        let r = space.r();
        assert_eq!((basis.rows(), basis.cols()), (r, 2 * r), "basis must be r x 2r");
        assert_eq!(basis.precision(), space.precision(), "precision mismatch with the space");
        if !space.pairing(&basis, &basis).is_zero() {
            return Err(Error::InvalidLattice("basis is not totally isotropic".into()));
        }
        if basis.reduction().rank() != r {
            return Err(Error::InvalidLattice(
                "basis reduction is rank-deficient: not a direct summand".into(),
            ));
        }
        Ok(IsotropicLattice { basis })
    }

    pub fn basis(&self) -> &BkMatrix<F> {
        &self.basis
    }
}

/// Extend the basis of `w` to a hyperbolic frame `e_1..e_r, f_1..f_r` of the
/// whole space with `e_i` the rows of `w`. Returns the `2r x 2r` frame.
///
/// Construction: solve `(E G) Y = I` for dual rows `w_i = (Y^T)_i` with
/// `Q(w_i, e_j) = delta_ij`, then correct `f_i = w_i - (1/2) sum_j
/// Q(w_i, w_j) e_j`, which kills the `f`-`f` pairings because the gram
/// matrix of the `w_i` is symmetric and halving is available.
pub fn hyperbolic_complete<F: Field>(
    space: &BilinearSpace<F>,
    w: &IsotropicLattice<F>,
) -> Result<BkMatrix<F>> {
    let r = space.r();
    let e = w.basis();
    let a = e.mul(space.gram());
    let id = BkMatrix::identity(space.field().clone(), r, space.precision());
    let y = a
        .solve_right(&id)
        .map_err(|_| Error::Inconsistency("dual solve failed for a valid lattice".into()))?;
    let wdual = y.transpose();
    let s = space.pairing(&wdual, &wdual);
    let f = wdual.sub(&s.halve().mul(e));
    let frame = e.clone().vstack(&f);
    // contracts: E G F^T = I would be Q(e_i, f_j); we check all three blocks
    if !space.pairing(&f, &f).is_zero() {
        return Err(Error::Inconsistency("completed frame has nonzero f-f pairings".into()));
    }
    if space.pairing(&f, e) != id {
        return Err(Error::Inconsistency("completed frame is not dual to the lattice".into()));
    }
    Ok(frame)
}

/// First-order data of an aligned pair: the mod-`s` intersection dimension
/// `q`, the skew `q x q` matrix `mu` and the `q x (r-q)` block `lambda` of
/// corrections (both at precision `N-1`), and the aligned hyperbolic frame.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MuData<F: Field> {
    pub q: usize,
    pub mu: BkMatrix<F>,
    pub lambda: BkMatrix<F>,
    pub frame: BkMatrix<F>,
}

/// Align `w1` to the mod-`s` intersection, complete it to a hyperbolic
/// frame, write `w2` as a graph over the frame and extract the first-order
/// correction matrix `mu`.
///
/// In frame coordinates the normalized basis of `w2` reads
/// `v_i = e_i + s z_i` for `i <= q` and `v_i = f_i + s z_i` for `i > q`,
/// with every `z_i` supported on the complementary coordinates
/// `e_{q+1}..e_r, f_1..f_q`. Reaching that form takes two passes: the first
/// normalization exposes a constant skew "shear" block (the `e`-components
/// of the reductions of `v_{q+1}..v_r`), which is folded into the `f`-rows
/// of the frame — legal exactly because it is skew — and a second pass then
/// leaves a residual divisible by `s`. For `i <= q`,
/// `z_i = sum_j lambda_ij e_j + sum_j mu_ij f_j`, and isotropy forces `mu`
/// to be skew-symmetric — that skewness is what powers every parity
/// statement downstream, so it is asserted here rather than assumed.
pub fn align_and_extract_mu<F: Field>(
    space: &BilinearSpace<F>,
    w1: &IsotropicLattice<F>,
    w2: &IsotropicLattice<F>,
) -> Result<MuData<F>> {
    let r = space.r();
    let n = space.precision();
    let field = space.field().clone();
    let a_red = w1.basis().reduction();
    let b_red = w2.basis().reduction();

    // mod-s intersection, as coordinates in the w1 basis
    let stacked = a_red.transpose().hstack(&b_red.transpose().neg());
    let ker = stacked.kernel_basis();
    let q = ker.cols();
    let in_w1_coords = ker.submatrix(0..r, 0..q);
    let ivecs = a_red.transpose().mul(&in_w1_coords);
    if ivecs.rank() != q {
        return Err(Error::Inconsistency("intersection generators are dependent".into()));
    }

    // adapt the w1 basis: first q rows become an intersection basis
    let e_new = if q == 0 {
        w1.basis().clone()
    } else {
        let (irows, _) = ivecs.transpose().rref();
        let irows = irows.submatrix(0..q, 0..2 * r);
        let coords = a_red
            .transpose()
            .solve(&irows.transpose())
            .ok_or_else(|| Error::Inconsistency("intersection does not lie in the lattice".into()))?;
        let c = coords.transpose();
        let t = c.complete_rows_to_basis();
        BkMatrix::from_constant(&t, n).mul(w1.basis())
    };
    let w1_adapted = IsotropicLattice::new(space, e_new)
        .map_err(|e| Error::Inconsistency(format!("adapted basis lost lattice invariants: {e}")))?;

    let mut frame = hyperbolic_complete(space, &w1_adapted)?;

    // write w2 as a graph over the summand spanned by e_1..e_q, f_{q+1}..f_r
    let resid = graph_residual(space, &frame, w2, q)?;

    // constant part of the residual: rows < q vanish (their reductions are
    // frame vectors), rows >= q carry the shear block on the e-tail columns
    let mut shear = KMatrix::zeros(field.clone(), r - q, r - q);
    for i in 0..r {
        for c in 0..2 * r {
            let c0 = resid.get(i, c).constant_term().clone();
            if field.is_zero(&c0) {
                continue;
            }
            if i >= q && (q..r).contains(&c) {
                shear.set(i - q, c - q, c0);
            } else {
                return Err(Error::Inconsistency(
                    "constant residual outside the shear block".into(),
                ));
            }
        }
    }
    if !shear.is_skew_symmetric() {
        return Err(Error::Inconsistency("shear block is not skew-symmetric".into()));
    }

    let resid = if (0..r - q).all(|i| (0..r - q).all(|j| field.is_zero(shear.get(i, j)))) {
        resid
    } else {
        // fold the shear into the f-rows: f_i += sum_j shear_ij e_j, which
        // preserves the hyperbolic contracts precisely because shear is skew
        let mut full = KMatrix::zeros(field.clone(), r, r);
        for i in 0..r - q {
            for j in 0..r - q {
                full.set(q + i, q + j, shear.get(i, j).clone());
            }
        }
        let e_rows = frame.submatrix(0..r, 0..2 * r);
        let f_rows = frame.submatrix(r..2 * r, 0..2 * r);
        let f_new = f_rows.add(&BkMatrix::from_constant(&full, n).mul(&e_rows));
        frame = e_rows.vstack(&f_new);
        if !space.pairing(&f_new, &f_new).is_zero()
            || space.pairing(&f_new, &e_rows)
                != BkMatrix::identity(field.clone(), r, n)
        {
            return Err(Error::Inconsistency("sheared frame lost the hyperbolic contracts".into()));
        }
        graph_residual(space, &frame, w2, q)?
    };

    for i in 0..r {
        for c in 0..2 * r {
            if resid.get(i, c).valuation() < 1 {
                return Err(Error::Inconsistency("residual is not divisible by s".into()));
            }
        }
    }

    // z_i = resid_i / s at precision N-1 (zero when N == 1)
    let zprec = (n - 1).max(1);
    let z = |i: usize, c: usize| -> TruncSeries<F> {
        if n == 1 {
            TruncSeries::zero(field.clone(), 1)
        } else {
            resid.get(i, c).shift_down(1)
        }
    };
    let mu = BkMatrix::from_fn(field.clone(), q, q, zprec, |i, j| z(i, r + j));
    let lambda = BkMatrix::from_fn(field.clone(), q, r - q, zprec, |i, j| z(i, q + j));
    if !mu.is_skew_symmetric() {
        return Err(Error::Inconsistency("extracted mu is not skew-symmetric".into()));
    }
    Ok(MuData { q, mu, lambda, frame })
}

/// Coordinates of `w2` over the frame, normalized so that the block on the
/// summand columns `e_1..e_q, f_{q+1}..f_r` is the identity; returns the
/// difference against the target unit rows. Fails when `w2` does not
/// project isomorphically onto that summand, which the intersection
/// alignment rules out for valid input.
fn graph_residual<F: Field>(
    space: &BilinearSpace<F>,
    frame: &BkMatrix<F>,
    w2: &IsotropicLattice<F>,
    q: usize,
) -> Result<BkMatrix<F>> {
    let r = space.r();
    let n = space.precision();
    let field = space.field().clone();
    let frame_inv = frame
        .inverse()
        .map_err(|_| Error::Inconsistency("frame is not invertible".into()))?;
    let coords = w2.basis().mul(&frame_inv);
    let u1_cols: Vec<usize> = (0..q).chain(r + q..2 * r).collect();
    let on_u1 = coords.select_columns(&u1_cols);
    let x = on_u1.inverse().map_err(|_| {
        Error::Inconsistency("w2 does not project onto the aligned summand".into())
    })?;
    let v = x.mul(&coords);
    let mut target = BkMatrix::zeros(field.clone(), r, 2 * r, n);
    for (i, &c) in u1_cols.iter().enumerate() {
        target.set(i, c, TruncSeries::one(field.clone(), n));
    }
    let resid = v.sub(&target);
    for i in 0..r {
        for &c in &u1_cols {
            if !resid.get(i, c).is_zero() {
                return Err(Error::Inconsistency("residual leaks onto the aligned summand".into()));
            }
        }
    }
    Ok(resid)
}

impl<F: Field> MuData<F> {
    /// The correction family `s * mu` as layers of a skew family: layer 0 is
    /// zero, layer `1 + j` is the degree-`j` coefficient of `mu`.
    pub fn correction_family(&self) -> SkewFamily<F> {
        let field = self.mu.field().clone();
        let mut layers = vec![KMatrix::zeros(field.clone(), self.q, self.q)];
        for j in 0..self.mu.precision() {
            layers.push(KMatrix::from_fn(field.clone(), self.q, self.q, |a, b| {
                self.mu.get(a, b).coeff(j).clone()
            }));
        }
        SkewFamily::new(field, self.q.max(1), if self.q == 0 { vec![] } else { layers })
            .expect("mu layers are skew by construction")
    }
}

/// `q_k` by direct intersection of the flattened truncated lattices.
pub fn intersection_dim_oracle<F: Field>(
    space: &BilinearSpace<F>,
    w1: &IsotropicLattice<F>,
    w2: &IsotropicLattice<F>,
    k: usize,
) -> Result<usize> {
    if k < 1 {
        return Err(Error::Usage("precision k must be at least 1".into()));
    }
    if k > space.precision() {
        return Err(Error::PrecisionExhausted { cap: space.precision() });
    }
    let a = w1.basis().truncate(k).transpose().flatten(FlattenOrder::Domain);
    let b = w2.basis().truncate(k).transpose().flatten(FlattenOrder::Domain);
    Ok(subspace_intersection_dim(&a, &b))
}

/// `q_k` from extracted first-order data: `q_k = k q - r_k(s mu)` where
/// `r_k` is the block-path rank from [`crate::skew`].
pub fn intersection_dim_structural<F: Field>(mu: &MuData<F>, k: usize) -> usize {
    assert!(k >= 1, "precision k must be at least 1");
    assert!(
        k == 1 || k - 1 <= mu.mu.precision() + 1,
        "structural path needs mu to precision k-2"
    );
    if mu.q == 0 {
        return 0;
    }
    let fam = mu.correction_family();
    k * mu.q - fam.image_dim(k)
}

/// Outcome of the parity check on one pair.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ParityReport {
    /// `q_seq[k-1] = q_k`, cross-checked between oracle and structural path.
    pub q_seq: Vec<usize>,
    /// `d_seq[k-1] = k q_1 - q_k`.
    pub d_seq: Vec<i64>,
    pub all_even: bool,
    pub non_decreasing: bool,
}

impl ParityReport {
    pub fn all_hold(&self) -> bool {
        self.all_even && self.non_decreasing
    }

    pub fn q1(&self) -> usize {
        self.q_seq[0]
    }
}

/// Compute `q_k` for `k = 1..=k_max` along both routes, insist they agree,
/// and report parity and monotonicity of `d_k = k q_1 - q_k`.
pub fn check_intersection_parity<F: Field>(
    space: &BilinearSpace<F>,
    w1: &IsotropicLattice<F>,
    w2: &IsotropicLattice<F>,
    k_max: usize,
) -> Result<ParityReport> {
    if k_max < 1 {
        return Err(Error::Usage("k_max must be at least 1".into()));
    }
    if k_max > space.precision() {
        return Err(Error::PrecisionExhausted { cap: space.precision() });
    }
    let mu = align_and_extract_mu(space, w1, w2)?;
    let mut q_seq = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let oracle = intersection_dim_oracle(space, w1, w2, k)?;
        let structural = intersection_dim_structural(&mu, k);
        if oracle != structural {
            return Err(Error::Inconsistency(format!(
                "intersection dims disagree at k={k}: oracle {oracle}, structural {structural}"
            )));
        }
        q_seq.push(oracle);
    }
    if q_seq[0] != mu.q {
        return Err(Error::Inconsistency(format!(
            "mod-s intersection {} disagrees with q_1 = {}",
            mu.q, q_seq[0]
        )));
    }
    let q1 = q_seq[0] as i64;
    let d_seq: Vec<i64> = q_seq
        .iter()
        .enumerate()
        .map(|(i, &qk)| (i as i64 + 1) * q1 - qk as i64)
        .collect();
    let all_even = d_seq.iter().all(|d| d % 2 == 0);
    let non_decreasing = d_seq.windows(2).all(|w| w[0] <= w[1]);
    Ok(ParityReport { q_seq, d_seq, all_even, non_decreasing })
}

/// How random pairs are produced.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorMode {
    /// Plant explicit first-order data `mu`, `lambda` in the standard
    /// hyperbolic space, then scramble both bases by constant invertible
    /// matrices. Ground truth `q_k` is known and returned.
    MuParam,
    /// Push standard lattices through random exact isometries built from
    /// Cayley transforms `(I - X)(I + X)^{-1}` of gram-skew `X` (constant
    /// dense ones and nilpotent polynomial ones), then rewrite everything in
    /// a random polynomial-unimodular basis. Blind: no ground truth.
    Cayley,
}

impl std::fmt::Display for GeneratorMode {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratorMode::MuParam => write!(out, "mu-param"),
            GeneratorMode::Cayley => write!(out, "cayley"),
        }
    }
}

/// A generated instance. Both generators produce lattices whose canonical
/// polynomial lifts are *exactly* isotropic over `K[s]` (degree budgets keep
/// every product inside the stored precision), so downstream torsion
/// invariants of the lifted pair are covered by the structure theory with no
/// truncation caveats.
#[derive(Clone, Debug)]
pub struct GeneratedPair<F: Field> {
    pub space: BilinearSpace<F>,
    pub w1: IsotropicLattice<F>,
    pub w2: IsotropicLattice<F>,
    /// `q_k` for `k = 1..=N` planted by [`GeneratorMode::MuParam`].
    pub planted_q: Option<Vec<usize>>,
}

/// Seeded random pair; see [`random_isotropic_pair_detailed`] for the
/// version that also reports planted ground truth.
pub fn random_isotropic_pair<F: Field>(
    field: F,
    r: usize,
    precision: usize,
    seed: u64,
    mode: GeneratorMode,
) -> Result<(BilinearSpace<F>, IsotropicLattice<F>, IsotropicLattice<F>)> {
    let pair = random_isotropic_pair_detailed(field, r, precision, seed, mode)?;
    Ok((pair.space, pair.w1, pair.w2))
}

pub fn random_isotropic_pair_detailed<F: Field>(
    field: F,
    r: usize,
    precision: usize,
    seed: u64,
    mode: GeneratorMode,
) -> Result<GeneratedPair<F>> {
    if r < 1 {
        return Err(Error::Usage("rank r must be at least 1".into()));
    }
    if precision < 1 {
        return Err(Error::Usage("precision must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match mode {
        GeneratorMode::MuParam => mu_param_pair(field, r, precision, &mut rng),
        GeneratorMode::Cayley => cayley_pair(field, r, precision, &mut rng),
    }
}

fn mu_param_pair<F: Field>(
    field: F,
    r: usize,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<GeneratedPair<F>> {
    let space = BilinearSpace::standard_hyperbolic(field.clone(), r, n);
    let qp = rng.random_range(0..=r);

    // first-order data as polynomials of degree < n-1 so that s*z stays
    // inside the stored precision exactly
    let zdeg = n.saturating_sub(2); // max degree of z entries
    let rand_poly = |rng: &mut ChaCha8Rng| -> Poly<F> {
        let coeffs: Vec<F::Elem> = (0..=zdeg).map(|_| field.sample(rng)).collect();
        Poly::new(field.clone(), coeffs)
    };
    let zero_poly = || Poly::zero(field.clone());

    // mu: r x qp, lambda: r x (r-qp); top blocks are rows < qp
    let mut mu = PolyMatrix::zeros(field.clone(), r, qp);
    let mut lambda = PolyMatrix::zeros(field.clone(), r, r - qp);
    if n >= 2 {
        // mu top block skew
        for i in 0..qp {
            for j in 0..i {
                let p = rand_poly(rng);
                mu.set(i, j, p.neg());
                mu.set(j, i, p);
            }
        }
        // mu bottom free; lambda top = -mu_bottom^T
        for i in qp..r {
            for j in 0..qp {
                let p = rand_poly(rng);
                mu.set(i, j, p.clone());
                lambda.set(j, i - qp, p.neg());
            }
        }
        // lambda bottom skew
        for i in qp..r {
            for j in qp..i {
                let p = rand_poly(rng);
                lambda.set(i, j - qp, p.neg());
                lambda.set(j, i - qp, p);
            }
        }
        let _ = zero_poly;
    }

    // w2 rows over K[s]: e_i + s z_i (i < qp), f_i + s z_i (i >= qp),
    // z_i = sum_{j >= qp} lambda_ij e_j + sum_{j < qp} mu_ij f_j
    let s_poly = Poly::monomial(field.clone(), field.one(), 1);
    let w2_poly = PolyMatrix::from_fn(field.clone(), r, 2 * r, |i, c| {
        let mut p = Poly::zero(field.clone());
        if c < r {
            // e-block
            if i < qp && c == i {
                p = p.add(&Poly::one(field.clone()));
            }
            if c >= qp {
                p = p.add(&s_poly.mul(lambda.get(i, c - qp)));
            }
        } else {
            let fc = c - r;
            if i >= qp && fc == i {
                p = p.add(&Poly::one(field.clone()));
            }
            if fc < qp {
                p = p.add(&s_poly.mul(mu.get(i, fc)));
            }
        }
        p
    });
    let w1_poly = PolyMatrix::from_fn(field.clone(), r, 2 * r, |i, c| {
        if c == i {
            Poly::one(field.clone())
        } else {
            Poly::zero(field.clone())
        }
    });
    debug_assert!(poly_pairing_is_zero(&standard_gram_poly(field.clone(), r), &w2_poly));

    // constant invertible scrambles hide the normal form without touching
    // exactness or the spanned lattices
    let u1 = random_invertible_k(field.clone(), r, rng)?;
    let u2 = random_invertible_k(field.clone(), r, rng)?;
    let w1_basis = BkMatrix::from_constant(&u1, n).mul(&w1_poly.to_bk(n));
    let w2_basis = BkMatrix::from_constant(&u2, n).mul(&w2_poly.to_bk(n));
    let w1 = IsotropicLattice::new(&space, w1_basis)
        .map_err(|e| Error::Inconsistency(format!("planted w1 invalid: {e}")))?;
    let w2 = IsotropicLattice::new(&space, w2_basis)
        .map_err(|e| Error::Inconsistency(format!("planted w2 invalid: {e}")))?;

    // ground truth q_k from the planted top block
    let planted = {
        let fam = if qp == 0 {
            SkewFamily::zero(field.clone(), 1)
        } else {
            let mut layers = vec![KMatrix::zeros(field.clone(), qp, qp)];
            let maxdeg = (0..qp)
                .flat_map(|i| (0..qp).map(move |j| (i, j)))
                .filter_map(|(i, j)| mu.get(i, j).degree())
                .max()
                .unwrap_or(0);
            for d in 0..=maxdeg {
                layers.push(KMatrix::from_fn(field.clone(), qp, qp, |a, b| mu.get(a, b).coeff(d)));
            }
            SkewFamily::new(field.clone(), qp, layers)
                .expect("planted mu top block is skew")
        };
        (1..=n)
            .map(|k| if qp == 0 { 0 } else { k * qp - fam.image_dim(k) })
            .collect::<Vec<_>>()
    };

    Ok(GeneratedPair { space, w1, w2, planted_q: Some(planted) })
}

fn cayley_pair<F: Field>(
    field: F,
    r: usize,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<GeneratedPair<F>> {
    let budget = n - 1; // max polynomial degree a lattice entry may reach
    let b_t = budget / 2; // per-isometry share
    let b_s = budget - b_t; // basis-change share

    let g0 = standard_gram_poly(field.clone(), r);
    let t1 = random_cayley_isometry(field.clone(), r, b_t, rng)?;
    let t2 = random_cayley_isometry(field.clone(), r, b_t, rng)?;
    debug_assert!(is_poly_isometry(&g0, &t1) && is_poly_isometry(&g0, &t2));

    let (s_mat, s_inv) = random_unimodular_pair(field.clone(), 2 * r, b_s, rng)?;
    let gram_poly = s_mat.transpose().mul(&g0).mul(&s_mat);

    let e_rows = PolyMatrix::from_fn(field.clone(), r, 2 * r, |i, c| {
        if c == i {
            Poly::one(field.clone())
        } else {
            Poly::zero(field.clone())
        }
    });
    let f_rows = PolyMatrix::from_fn(field.clone(), r, 2 * r, |i, c| {
        if c == r + i {
            Poly::one(field.clone())
        } else {
            Poly::zero(field.clone())
        }
    });
    // choosing e vs f for the second lattice flips the ruling family and
    // with it the parity class of q_1
    let base2 = if rng.random_range(0..2u8) == 0 { &e_rows } else { &f_rows };

    let w1_poly = e_rows.mul(&t1.transpose()).mul(&s_inv.transpose());
    let w2_poly = base2.mul(&t2.transpose()).mul(&s_inv.transpose());
    if !poly_pairing_is_zero(&gram_poly, &w1_poly) || !poly_pairing_is_zero(&gram_poly, &w2_poly) {
        return Err(Error::Inconsistency("cayley lattices are not exactly isotropic".into()));
    }
    if w1_poly.max_degree() > budget || w2_poly.max_degree() > budget {
        return Err(Error::Inconsistency("cayley degree budget overflowed".into()));
    }

    let space = BilinearSpace::new(gram_poly.to_bk(n))?;
    let w1 = IsotropicLattice::new(&space, w1_poly.to_bk(n))
        .map_err(|e| Error::Inconsistency(format!("cayley w1 invalid: {e}")))?;
    let w2 = IsotropicLattice::new(&space, w2_poly.to_bk(n))
        .map_err(|e| Error::Inconsistency(format!("cayley w2 invalid: {e}")))?;
    Ok(GeneratedPair { space, w1, w2, planted_q: None })
}

fn standard_gram_poly<F: Field>(field: F, r: usize) -> PolyMatrix<F> {
    PolyMatrix::from_fn(field.clone(), 2 * r, 2 * r, |i, j| {
        if i + r == j || j + r == i {
            Poly::one(field.clone())
        } else {
            Poly::zero(field.clone())
        }
    })
}

/// `rows G rows^T == 0` exactly over `K[s]`.
fn poly_pairing_is_zero<F: Field>(gram: &PolyMatrix<F>, rows: &PolyMatrix<F>) -> bool {
    rows.mul(gram).mul(&rows.transpose()).is_zero()
}

fn is_poly_isometry<F: Field>(gram: &PolyMatrix<F>, t: &PolyMatrix<F>) -> bool {
    t.transpose().mul(gram).mul(t) == *gram
}

fn random_invertible_k<F: Field>(field: F, n: usize, rng: &mut ChaCha8Rng) -> Result<KMatrix<F>> {
    for _ in 0..64 {
        let m = KMatrix::from_fn(field.clone(), n, n, |_, _| field.sample(rng));
        if m.rank() == n {
            return Ok(m);
        }
    }
    Err(Error::RetriesExhausted("invertible matrix sampling".into()))
}

/// Random exact isometry of the standard hyperbolic gram: a constant Cayley
/// transform `(I - X)(I + X)^{-1}` of a dense constant gram-skew `X`,
/// composed with Cayley transforms of nilpotent polynomial gram-skews
/// `[[0, A], [0, 0]]` and `[[0, 0], [B, 0]]` (`A, B` skew), for which
/// `(I + X)^{-1} = I - X` exactly and the transform is `I - 2X`. Polynomial
/// degrees of `A` and `B` together stay within `deg_budget`.
fn random_cayley_isometry<F: Field>(
    field: F,
    r: usize,
    deg_budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PolyMatrix<F>> {
    let n = 2 * r;
    let g0k = standard_gram_k(field.clone(), r);
    // constant part, with a retry budget for I + X singular
    let tc = 'search: {
        for _ in 0..64 {
            let mut zc = KMatrix::zeros(field.clone(), n, n);
            for i in 0..n {
                for j in 0..i {
                    let v = field.sample(rng);
                    zc.set(j, i, field.neg(&v));
                    zc.set(i, j, v);
                }
            }
            let x = g0k.mul(&zc);
            let id = KMatrix::identity(field.clone(), n);
            if let Some(inv) = id.add(&x).inverse() {
                break 'search id.sub(&x).mul(&inv);
            }
        }
        return Err(Error::RetriesExhausted("constant cayley sampling".into()));
    };
    let mut t = PolyMatrix::from_fn(field.clone(), n, n, |i, j| {
        Poly::constant(field.clone(), tc.get(i, j).clone())
    });

    let deg_a = rng.random_range(0..=deg_budget.min(2));
    let deg_b = rng.random_range(0..=(deg_budget - deg_a).min(2));
    let skew_poly = |deg: usize, rng: &mut ChaCha8Rng| -> PolyMatrix<F> {
        let mut a = PolyMatrix::zeros(field.clone(), r, r);
        for i in 0..r {
            for j in 0..i {
                let coeffs: Vec<F::Elem> = (0..=deg).map(|_| field.sample(rng)).collect();
                let p = Poly::new(field.clone(), coeffs);
                a.set(j, i, p.neg());
                a.set(i, j, p);
            }
        }
        a
    };
    // upper shear: I - 2 [[0, A], [0, 0]]
    let a = skew_poly(deg_a, rng);
    let upper = PolyMatrix::from_fn(field.clone(), n, n, |i, j| {
        if i == j {
            Poly::one(field.clone())
        } else if i < r && j >= r {
            a.get(i, j - r).scale(&field.from_i64(-2))
        } else {
            Poly::zero(field.clone())
        }
    });
    // lower shear: I - 2 [[0, 0], [B, 0]]
    let b = skew_poly(deg_b, rng);
    let lower = PolyMatrix::from_fn(field.clone(), n, n, |i, j| {
        if i == j {
            Poly::one(field.clone())
        } else if i >= r && j < r {
            b.get(i - r, j).scale(&field.from_i64(-2))
        } else {
            Poly::zero(field.clone())
        }
    });
    t = t.mul(&upper).mul(&lower);
    Ok(t)
}

/// Random `S` with an exact polynomial inverse: a constant invertible matrix
/// times elementary transvections `I + c(s) E_{ij}`, whose inverses are
/// `I - c(s) E_{ij}`. The number of degree-1 factors is capped by
/// `deg_budget`, bounding `deg S` and `deg S^{-1}`.
fn random_unimodular_pair<F: Field>(
    field: F,
    n: usize,
    deg_budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(PolyMatrix<F>, PolyMatrix<F>)> {
    let c_const = random_invertible_k(field.clone(), n, rng)?;
    let c_inv = c_const.inverse().expect("sampled matrix is invertible");
    let mut s_mat = PolyMatrix::from_fn(field.clone(), n, n, |i, j| {
        Poly::constant(field.clone(), c_const.get(i, j).clone())
    });
    let mut s_inv = PolyMatrix::from_fn(field.clone(), n, n, |i, j| {
        Poly::constant(field.clone(), c_inv.get(i, j).clone())
    });
    let factors = deg_budget.min(3);
    for _ in 0..factors {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = Poly::new(field.clone(), vec![field.sample(rng), field.sample(rng)]);
        let elem = |sign: bool| {
            PolyMatrix::from_fn(field.clone(), n, n, |a, b| {
                if a == b {
                    Poly::one(field.clone())
                } else if (a, b) == (i, j) {
                    if sign {
                        c.clone()
                    } else {
                        c.neg()
                    }
                } else {
                    Poly::zero(field.clone())
                }
            })
        };
        s_mat = s_mat.mul(&elem(true));
        s_inv = elem(false).mul(&s_inv);
    }
    debug_assert_eq!(s_mat.mul(&s_inv), PolyMatrix::identity(field, n));
    Ok((s_mat, s_inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn space_validation() {
        let f = f7();
        // not symmetric
        let g = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[0, 1], &[2, 0]]), 2);
        assert!(matches!(BilinearSpace::new(g), Err(Error::Usage(_))));
        // degenerate reduction
        let g = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[0, 0], &[0, 0]]), 2);
        assert!(BilinearSpace::new(g).is_err());
        // odd size
        let g = BkMatrix::identity(f, 3, 2);
        assert!(BilinearSpace::new(g).is_err());
        assert!(BilinearSpace::new(BkMatrix::identity(f, 4, 2)).is_ok());
    }

    #[test]
    fn lattice_validation() {
        let f = f7();
        let space = BilinearSpace::standard_hyperbolic(f, 1, 3);
        // e_1 is isotropic
        let good = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[1, 0]]), 3);
        assert!(IsotropicLattice::new(&space, good).is_ok());
        // e_1 + f_1 is not
        let bad = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[1, 1]]), 3);
        assert!(matches!(
            IsotropicLattice::new(&space, bad),
            Err(Error::InvalidLattice(_))
        ));
        // s * e_1 is not a direct summand
        let thin = BkMatrix::from_fn(f, 1, 2, 3, |_, j| {
            if j == 0 {
                TruncSeries::monomial(f, 1, 1, 3)
            } else {
                TruncSeries::zero(f, 3)
            }
        });
        assert!(matches!(
            IsotropicLattice::new(&space, thin),
            Err(Error::InvalidLattice(_))
        ));
    }

    #[test]
    fn hyperbolic_completion_of_offset_plane() {
        // rank 2 space with gram [[0,1],[1,1]]: e = (1,0) completes to
        // f = (-1/2, 1)
        let q = Rationals;
        let gram = BkMatrix::from_constant(&KMatrix::from_i64(q, &[&[0, 1], &[1, 1]]), 2);
        let space = BilinearSpace::new(gram).unwrap();
        let e = BkMatrix::from_constant(&KMatrix::from_i64(q, &[&[1, 0]]), 2);
        let w = IsotropicLattice::new(&space, e).unwrap();
        let frame = hyperbolic_complete(&space, &w).unwrap();
        assert_eq!(frame.get(1, 0).constant_term(), &big(-1, 2));
        assert_eq!(frame.get(1, 1).constant_term(), &big(1, 1));
    }

    #[test]
    fn planted_rotation_gives_constant_q() {
        // w2 = span(e1 + s f2, e2 - s f1): mu = [[0,1],[-1,0]], q_k = 2
        let f = f7();
        let space = BilinearSpace::standard_hyperbolic(f, 2, 3);
        let e = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]), 3);
        let w1 = IsotropicLattice::new(&space, e).unwrap();
        let v = BkMatrix::from_fn(f, 2, 4, 3, |i, j| match (i, j) {
            (0, 0) | (1, 1) => TruncSeries::one(f, 3),
            (0, 3) => TruncSeries::monomial(f, 1, 1, 3),
            (1, 2) => TruncSeries::monomial(f, 7 - 1, 1, 3),
            _ => TruncSeries::zero(f, 3),
        });
        let w2 = IsotropicLattice::new(&space, v).unwrap();

        let mu = align_and_extract_mu(&space, &w1, &w2).unwrap();
        assert_eq!(mu.q, 2);
        let expected_mu = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[0, 1], &[-1, 0]]), 2);
        assert_eq!(mu.mu, expected_mu);

        let rep = check_intersection_parity(&space, &w1, &w2, 3).unwrap();
        assert_eq!(rep.q_seq, vec![2, 2, 2]);
        assert_eq!(rep.d_seq, vec![0, 2, 4]);
        assert!(rep.all_hold());
    }

    #[test]
    fn transverse_pair_stays_transverse() {
        let f = f7();
        let space = BilinearSpace::standard_hyperbolic(f, 2, 4);
        let e = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]), 4);
        let fb = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[0, 0, 1, 0], &[0, 0, 0, 1]]), 4);
        let w1 = IsotropicLattice::new(&space, e).unwrap();
        let w2 = IsotropicLattice::new(&space, fb).unwrap();
        let rep = check_intersection_parity(&space, &w1, &w2, 4).unwrap();
        assert_eq!(rep.q_seq, vec![0, 0, 0, 0]);
        assert_eq!(rep.d_seq, vec![0, 0, 0, 0]);
    }

    #[test]
    fn identical_lattices_have_full_intersection() {
        let f = f7();
        let space = BilinearSpace::standard_hyperbolic(f, 2, 3);
        let e = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]), 3);
        let w1 = IsotropicLattice::new(&space, e.clone()).unwrap();
        let w2 = IsotropicLattice::new(&space, e).unwrap();
        let rep = check_intersection_parity(&space, &w1, &w2, 3).unwrap();
        assert_eq!(rep.q_seq, vec![2, 4, 6]);
        assert_eq!(rep.d_seq, vec![0, 0, 0]);
    }

    #[test]
    fn oracle_rejects_excess_precision() {
        let f = f7();
        let space = BilinearSpace::standard_hyperbolic(f, 1, 2);
        let e = BkMatrix::from_constant(&KMatrix::from_i64(f, &[&[1, 0]]), 2);
        let w = IsotropicLattice::new(&space, e).unwrap();
        assert!(matches!(
            intersection_dim_oracle(&space, &w, &w, 3),
            Err(Error::PrecisionExhausted { cap: 2 })
        ));
    }

    #[test]
    fn generated_pairs_are_deterministic() {
        let f = PrimeField::new(32003).unwrap();
        for mode in [GeneratorMode::MuParam, GeneratorMode::Cayley] {
            let a = random_isotropic_pair_detailed(f, 3, 4, 99, mode).unwrap();
            let b = random_isotropic_pair_detailed(f, 3, 4, 99, mode).unwrap();
            assert_eq!(a.space.gram(), b.space.gram());
            assert_eq!(a.w1.basis(), b.w1.basis());
            assert_eq!(a.w2.basis(), b.w2.basis());
            assert_eq!(a.planted_q, b.planted_q);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mu_param_matches_planted_ground_truth(seed in 0u64..5000, r in 1usize..5, n in 1usize..5) {
            let f = f7();
            let pair = random_isotropic_pair_detailed(f, r, n, seed, GeneratorMode::MuParam).unwrap();
            let rep = check_intersection_parity(&pair.space, &pair.w1, &pair.w2, n).unwrap();
            prop_assert_eq!(&rep.q_seq, pair.planted_q.as_ref().unwrap());
            prop_assert!(rep.all_hold());
        }

        #[test]
        fn cayley_pairs_satisfy_parity(seed in 0u64..5000, r in 1usize..4, n in 1usize..5) {
            let f = f7();
            let pair = random_isotropic_pair_detailed(f, r, n, seed, GeneratorMode::Cayley).unwrap();
            let rep = check_intersection_parity(&pair.space, &pair.w1, &pair.w2, n).unwrap();
            prop_assert!(rep.all_hold());
        }

        #[test]
        fn intersection_is_symmetric_in_the_lattices(seed in 0u64..2000, r in 1usize..4) {
            let f = f7();
            let pair = random_isotropic_pair_detailed(f, r, 3, seed, GeneratorMode::Cayley).unwrap();
            for k in 1..=3 {
                let a = intersection_dim_oracle(&pair.space, &pair.w1, &pair.w2, k).unwrap();
                let b = intersection_dim_oracle(&pair.space, &pair.w2, &pair.w1, k).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }
}
