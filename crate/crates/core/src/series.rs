//! Scalar rings built on a ground field: truncated power series `K[s]/(s^k)`,
//! plain polynomials `K[s]`, and the square-zero plane ring `K[x,y]/(x,y)^2`.
//!
//! A [`TruncSeries`] carries its precision explicitly: a value of precision
//! `k` is an element of `K[s]/(s^k)` and stores exactly `k` coefficients.
//! Mixed-precision arithmetic is a bug, not a feature — binary operations
//! panic on operands of different precision, and precision changes are
//! explicit ([`TruncSeries::truncate`], [`TruncSeries::shift_down`], ...).

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;

/// Element of `K[s]/(s^precision)`; `coeffs[j]` is the coefficient of `s^j`
/// and `coeffs.len()` is the precision (always at least 1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> TruncSeries<F> {
    pub fn new(field: F, coeffs: Vec<F::Elem>) -> Self {
        assert!(!coeffs.is_empty(), "precision must be at least 1");
        TruncSeries { field, coeffs }
    }

    pub fn zero(field: F, precision: usize) -> Self {
        assert!(precision >= 1, "precision must be at least 1");
        let coeffs = vec![field.zero(); precision];
        TruncSeries { field, coeffs }
    }

    pub fn one(field: F, precision: usize) -> Self {
        let mut t = Self::zero(field, precision);
        t.coeffs[0] = t.field.one();
        t
    }

    pub fn constant(field: F, c: F::Elem, precision: usize) -> Self {
        let mut t = Self::zero(field, precision);
        t.coeffs[0] = c;
        t
    }

    /// `c * s^power` truncated to the given precision.
    pub fn monomial(field: F, c: F::Elem, power: usize, precision: usize) -> Self {
        let mut t = Self::zero(field, precision);
        if power < precision {
            t.coeffs[power] = c;
        }
        t
    }

    pub fn from_i64(field: F, coeffs: &[i64], precision: usize) -> Self {
        assert!(coeffs.len() <= precision, "too many coefficients for precision");
        let mut t = Self::zero(field, precision);
        for (j, &c) in coeffs.iter().enumerate() {
            t.coeffs[j] = t.field.from_i64(c);
        }
        t
    }

    pub fn random<R: Rng + ?Sized>(field: F, precision: usize, rng: &mut R) -> Self {
        assert!(precision >= 1);
        let coeffs = (0..precision).map(|_| field.sample(rng)).collect();
        TruncSeries { field, coeffs }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, j: usize) -> &F::Elem {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &F::Elem {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.field.is_zero(c))
    }

    /// Units are the series with nonzero constant term.
    pub fn is_unit(&self) -> bool {
        !self.field.is_zero(&self.coeffs[0])
    }

    /// Index of the lowest nonzero coefficient; equals the precision when the
    /// element is zero (zero is "divisible by everything we can see").
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !self.field.is_zero(c))
            .unwrap_or_else(|| self.precision())
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(self.precision(), other.precision(), "precision mismatch");
        assert!(self.field == other.field, "field mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.field.add(a, b))
            .collect();
        TruncSeries { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.field.sub(a, b))
            .collect();
        TruncSeries { field: self.field.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.neg(a)).collect();
        TruncSeries { field: self.field.clone(), coeffs }
    }

    /// Truncated convolution.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let k = self.precision();
        let f = &self.field;
        let mut coeffs = vec![f.zero(); k];
        for i in 0..k {
            if f.is_zero(&self.coeffs[i]) {
                continue;
            }
            for j in 0..k - i {
                if f.is_zero(&other.coeffs[j]) {
                    continue;
                }
                let t = f.mul(&self.coeffs[i], &other.coeffs[j]);
                coeffs[i + j] = f.add(&coeffs[i + j], &t);
            }
        }
        TruncSeries { field: f.clone(), coeffs }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        TruncSeries { field: self.field.clone(), coeffs }
    }

    pub fn halve(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.halve(a)).collect();
        TruncSeries { field: self.field.clone(), coeffs }
    }

    /// Inverse of a unit by the standard coefficient recursion
    /// `b_0 = a_0^{-1}`, `b_n = -a_0^{-1} * sum_{i=1..=n} a_i b_{n-i}`.
    pub fn inv(&self) -> Result<Self> {
        let f = &self.field;
        let a0 = f.inv(&self.coeffs[0]).ok_or(Error::NotAUnit)?;
        let k = self.precision();
        let mut b = Vec::with_capacity(k);
        b.push(a0.clone());
        for n in 1..k {
            let mut acc = f.zero();
            for i in 1..=n {
                let t = f.mul(&self.coeffs[i], &b[n - i]);
                acc = f.add(&acc, &t);
            }
            b.push(f.neg(&f.mul(&a0, &acc)));
        }
        Ok(TruncSeries { field: f.clone(), coeffs: b })
    }

    /// Restriction `K[s]/(s^p) -> K[s]/(s^k)` for `k <= p`.
    pub fn truncate(&self, k: usize) -> Self {
        assert!(1 <= k && k <= self.precision(), "bad truncation precision");
        TruncSeries { field: self.field.clone(), coeffs: self.coeffs[..k].to_vec() }
    }

    /// Exact division by `s^v`; requires valuation at least `v` and drops the
    /// precision by `v`.
    pub fn shift_down(&self, v: usize) -> Self {
        assert!(v < self.precision(), "shift would leave no precision");
        assert!(self.valuation() >= v, "valuation too small for shift_down");
        TruncSeries { field: self.field.clone(), coeffs: self.coeffs[v..].to_vec() }
    }

    /// Multiplication by `s^v` at fixed precision (top coefficients fall off).
    pub fn shift_up(&self, v: usize) -> Self {
        let k = self.precision();
        let f = &self.field;
        let mut coeffs = vec![f.zero(); k];
        for j in 0..k.saturating_sub(v) {
            coeffs[j + v] = self.coeffs[j].clone();
        }
        TruncSeries { field: f.clone(), coeffs }
    }

    /// Reinterpret verbatim as a polynomial (the canonical lift).
    pub fn lift(&self) -> Poly<F> {
        Poly::new(self.field.clone(), self.coeffs.to_vec())
    }
}

impl<F: Field> std::fmt::Display for TruncSeries<F> {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write_poly_terms(out, &self.field, &self.coeffs)?;
        write!(out, " + O(s^{})", self.precision())
    }
}

/// Polynomial in `s` over the ground field; no trailing zero coefficients,
/// zero is the empty coefficient list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> Poly<F> {
    pub fn new(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        Poly { field, coeffs: vec![one] }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Poly::new(field, vec![c])
    }

    pub fn monomial(field: F, c: F::Elem, power: usize) -> Self {
        let mut coeffs = vec![field.zero(); power + 1];
        coeffs[power] = c;
        Poly::new(field, coeffs)
    }

    pub fn from_i64(field: F, coeffs: &[i64]) -> Self {
        let coeffs = coeffs.iter().map(|&c| field.from_i64(c)).collect();
        Poly::new(field, coeffs)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> F::Elem {
        self.coeffs.get(j).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.field.is_zero(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.field == other.field, "field mismatch");
        let n = self.coeffs.len().max(other.coeffs.len());
        let f = &self.field;
        let coeffs = (0..n)
            .map(|j| {
                let a = self.coeffs.get(j).cloned().unwrap_or_else(|| f.zero());
                let b = other.coeffs.get(j).cloned().unwrap_or_else(|| f.zero());
                f.add(&a, &b)
            })
            .collect();
        Poly::new(f.clone(), coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(self.field == other.field, "field mismatch");
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut coeffs = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = f.mul(a, b);
                coeffs[i + j] = f.add(&coeffs[i + j], &t);
            }
        }
        Poly::new(f.clone(), coeffs)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Poly::new(self.field.clone(), coeffs)
    }

    /// Exact division; `None` when the remainder is nonzero or `d` is zero.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(self.field == d.field, "field mismatch");
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(self.field.clone()));
        }
        if self.coeffs.len() < d.coeffs.len() {
            return None;
        }
        let f = self.field.clone();
        let lead_inv = f.inv(d.coeffs.last().unwrap())?;
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - d.coeffs.len() + 1;
        let mut quot = vec![f.zero(); qlen];
        for qi in (0..qlen).rev() {
            let top = rem[qi + d.coeffs.len() - 1].clone();
            if f.is_zero(&top) {
                continue;
            }
            let c = f.mul(&top, &lead_inv);
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = f.mul(&c, dc);
                rem[qi + j] = f.sub(&rem[qi + j], &t);
            }
            quot[qi] = c;
        }
        if rem.iter().any(|c| !f.is_zero(c)) {
            return None;
        }
        Some(Poly::new(f, quot))
    }

    /// Image in `K[s]/(s^k)`.
    pub fn truncate(&self, k: usize) -> TruncSeries<F> {
        assert!(k >= 1, "precision must be at least 1");
        let f = &self.field;
        let coeffs = (0..k).map(|j| self.coeff(j)).collect();
        TruncSeries::new(f.clone(), coeffs)
    }

    /// Parse a polynomial with integer coefficients, e.g. `1 + 2*s - s^3`.
    ///
    /// Grammar: terms joined by `+` / `-`; a term is `INT`, `INT*s`,
    /// `INT*s^EXP`, `s`, or `s^EXP`. Whitespace is free. The `*` after the
    /// coefficient is optional.
    pub fn parse(field: F, text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Usage(format!("cannot parse polynomial {text:?}: {msg}"));
        let mut acc = Poly::zero(field.clone());
        // drop whitespace, but refuse digit runs separated only by spaces
        let mut chars: Vec<char> = Vec::new();
        let mut gap = false;
        for c in text.chars() {
            if c.is_whitespace() {
                gap = true;
                continue;
            }
            if gap && c.is_ascii_digit() && chars.last().is_some_and(|p| p.is_ascii_digit()) {
                return Err(bad("missing operator between numbers"));
            }
            gap = false;
            chars.push(c);
        }
        if chars.is_empty() {
            return Err(bad("empty input"));
        }
        let mut i = 0usize;
        let mut first = true;
        while i < chars.len() {
            let mut sign = 1i64;
            if chars[i] == '+' || chars[i] == '-' {
                if chars[i] == '-' {
                    sign = -1;
                }
                i += 1;
            } else if !first {
                return Err(bad("expected '+' or '-' between terms"));
            }
            first = false;
            if i >= chars.len() {
                return Err(bad("dangling sign"));
            }
            // optional integer coefficient
            let mut coeff: Option<i64> = None;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i > start {
                let v: i64 = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| bad("coefficient out of range"))?;
                coeff = Some(v);
            }
            if i < chars.len() && chars[i] == '*' {
                if coeff.is_none() {
                    return Err(bad("'*' without coefficient"));
                }
                i += 1;
                if i >= chars.len() || chars[i] != 's' {
                    return Err(bad("expected 's' after '*'"));
                }
            }
            // optional variable part
            let mut power = 0usize;
            if i < chars.len() && chars[i] == 's' {
                i += 1;
                power = 1;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == start {
                        return Err(bad("expected exponent after '^'"));
                    }
                    power = chars[start..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| bad("exponent out of range"))?;
                }
            } else if coeff.is_none() {
                return Err(bad("expected coefficient or 's'"));
            }
            let c = field.from_i64(sign * coeff.unwrap_or(1));
            acc = acc.add(&Poly::monomial(field.clone(), c, power));
        }
        Ok(acc)
    }
}

impl<F: Field> std::fmt::Display for Poly<F> {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write_poly_terms(out, &self.field, &self.coeffs)
    }
}

fn write_poly_terms<F: Field>(
    out: &mut std::fmt::Formatter<'_>,
    field: &F,
    coeffs: &[F::Elem],
) -> std::fmt::Result {
    let mut wrote = false;
    for (j, c) in coeffs.iter().enumerate() {
        if field.is_zero(c) {
            continue;
        }
        if wrote {
            write!(out, " + ")?;
        }
        match j {
            0 => write!(out, "{c}")?,
            1 => write!(out, "{c}*s")?,
            _ => write!(out, "{c}*s^{j}")?,
        }
        wrote = true;
    }
    if !wrote {
        write!(out, "0")?;
    }
    Ok(())
}

/// Element `a + b*x + c*y` of the square-zero plane ring `K[x,y]/(x,y)^2`.
/// Products of two maximal-ideal elements vanish, which is what makes this
/// ring the minimal counterexample territory for rank-parity statements that
/// hold over `K[s]/(s^k)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareZero<F: Field> {
    field: F,
    pub a: F::Elem,
    pub b: F::Elem,
    pub c: F::Elem,
}

impl<F: Field> SquareZero<F> {
    pub fn new(field: F, a: F::Elem, b: F::Elem, c: F::Elem) -> Self {
        SquareZero { field, a, b, c }
    }

    pub fn zero(field: F) -> Self {
        let (a, b, c) = (field.zero(), field.zero(), field.zero());
        SquareZero { field, a, b, c }
    }

    pub fn from_i64(field: F, a: i64, b: i64, c: i64) -> Self {
        let (a, b, c) = (field.from_i64(a), field.from_i64(b), field.from_i64(c));
        SquareZero { field, a, b, c }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        let f = &self.field;
        f.is_zero(&self.a) && f.is_zero(&self.b) && f.is_zero(&self.c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = &self.field;
        SquareZero {
            field: f.clone(),
            a: f.add(&self.a, &other.a),
            b: f.add(&self.b, &other.b),
            c: f.add(&self.c, &other.c),
        }
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        SquareZero { field: f.clone(), a: f.neg(&self.a), b: f.neg(&self.b), c: f.neg(&self.c) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = &self.field;
        SquareZero {
            field: f.clone(),
            a: f.mul(&self.a, &other.a),
            b: f.add(&f.mul(&self.a, &other.b), &f.mul(&self.b, &other.a)),
            c: f.add(&f.mul(&self.a, &other.c), &f.mul(&self.c, &other.a)),
        }
    }
}

impl<F: Field> std::fmt::Display for SquareZero<F> {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "{} + {}*x + {}*y", self.a, self.b, self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn valuation_and_units() {
        let f = f7();
        let z = TruncSeries::zero(f, 4);
        assert_eq!(z.valuation(), 4);
        assert!(!z.is_unit());
        let s2 = TruncSeries::monomial(f, 1, 2, 4);
        assert_eq!(s2.valuation(), 2);
        let u = TruncSeries::from_i64(f, &[3, 1], 4);
        assert!(u.is_unit());
        assert_eq!(u.valuation(), 0);
    }

    #[test]
    fn inverse_of_non_unit_fails() {
        let f = f7();
        let s = TruncSeries::monomial(f, 1, 1, 3);
        assert_eq!(s.inv(), Err(Error::NotAUnit));
    }

    #[test]
    fn shift_down_undoes_shift_up() {
        let f = f7();
        let a = TruncSeries::from_i64(f, &[0, 0, 2, 5], 4);
        assert_eq!(a.valuation(), 2);
        let b = a.shift_down(2);
        assert_eq!(b.precision(), 2);
        assert_eq!(b.coeffs(), &[2, 5]);
    }

    #[test]
    fn poly_parse_round_trip() {
        let f = f7();
        let p = Poly::parse(f, "1 + 2*s - s^3").unwrap();
        assert_eq!(p, Poly::from_i64(f, &[1, 2, 0, -1]));
        let q = Poly::parse(f, "s^2").unwrap();
        assert_eq!(q, Poly::monomial(f, 1, 2));
        let r = Poly::parse(f, "-3").unwrap();
        assert_eq!(r, Poly::constant(f, f.from_i64(-3)));
        assert_eq!(Poly::parse(f, "0").unwrap(), Poly::zero(f));
        assert!(Poly::parse(f, "x + 1").is_err());
        assert!(Poly::parse(f, "1 +").is_err());
        assert!(Poly::parse(f, "2 3").is_err());
    }

    #[test]
    fn poly_div_exact() {
        let q = Rationals;
        let a = Poly::from_i64(q, &[-1, 0, 1]); // s^2 - 1
        let b = Poly::from_i64(q, &[1, 1]); // s + 1
        let c = a.div_exact(&b).unwrap();
        assert_eq!(c, Poly::from_i64(q, &[-1, 1]));
        assert!(Poly::from_i64(q, &[1, 1, 1]).div_exact(&b).is_none());
    }

    #[test]
    fn square_zero_products_vanish() {
        let f = f7();
        let x = SquareZero::from_i64(f, 0, 1, 0);
        let y = SquareZero::from_i64(f, 0, 0, 1);
        assert!(x.mul(&y).is_zero());
        assert!(x.mul(&x).is_zero());
        let u = SquareZero::from_i64(f, 2, 3, 4);
        let v = SquareZero::from_i64(f, 1, 5, 6);
        let w = u.mul(&v);
        assert_eq!((w.a, w.b, w.c), (2, 6, 2)); // (2, 2*5+3*1, 2*6+4*1) mod 7
    }

    fn arb_series(prec: usize) -> impl Strategy<Value = TruncSeries<PrimeField>> {
        proptest::collection::vec(0u64..7, prec)
            .prop_map(move |v| TruncSeries::new(f7(), v))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(5), b in arb_series(5), c in arb_series(5)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
            prop_assert_eq!(a.sub(&a), TruncSeries::zero(f7(), 5));
            prop_assert_eq!(a.halve().add(&a.halve()), a.clone());
        }

        #[test]
        fn valuation_of_product(a in arb_series(6), b in arb_series(6)) {
            let p = a.mul(&b);
            // truncation can only push the valuation up
            prop_assert!(p.valuation() >= (a.valuation() + b.valuation()).min(6));
        }

        #[test]
        fn unit_inverse_round_trip(prec in 1usize..8, seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = f7();
            let mut a = TruncSeries::random(f, prec, &mut rng);
            if !a.is_unit() {
                a = a.add(&TruncSeries::one(f, prec));
            }
            if a.is_unit() {
                let inv = a.inv().unwrap();
                prop_assert_eq!(a.mul(&inv), TruncSeries::one(f, prec));
            }
        }

        #[test]
        fn truncation_is_a_ring_map(a in arb_series(6), b in arb_series(6), k in 1usize..=6) {
            prop_assert_eq!(a.mul(&b).truncate(k), a.truncate(k).mul(&b.truncate(k)));
            prop_assert_eq!(a.add(&b).truncate(k), a.truncate(k).add(&b.truncate(k)));
        }

        #[test]
        fn square_zero_ideal_squared_is_zero(b1 in 0u64..7, c1 in 0u64..7, b2 in 0u64..7, c2 in 0u64..7) {
            let f = f7();
            let u = SquareZero::new(f, 0, b1, c1);
            let v = SquareZero::new(f, 0, b2, c2);
            prop_assert!(u.mul(&v).is_zero());
        }
    }
}
