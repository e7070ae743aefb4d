//! Ground fields: odd prime fields and arbitrary-precision rationals.
//!
//! Everything downstream is generic over [`Field`]. A field value is a small
//! context object (the modulus for a prime field, a unit struct for the
//! rationals); elements are plain data. Aggregates such as series and
//! matrices carry one copy of the context and hand it out on demand.
//!
//! Characteristic 2 is excluded by construction so that [`Field::halve`] is
//! total: the parity arguments in the higher layers repeatedly divide by 2.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub trait Field: Clone + PartialEq + Eq + std::fmt::Debug + Send + Sync + 'static {
    type Elem: Clone
        + PartialEq
        + Eq
        + std::hash::Hash
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Multiplicative inverse; `None` exactly for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// The unique `x` with `x + x = a`. Total: characteristic is never 2.
    fn halve(&self, a: &Self::Elem) -> Self::Elem;

    fn from_i64(&self, n: i64) -> Self::Elem;

    /// Uniform-ish random element; the distribution only needs to hit zero
    /// and plenty of distinct nonzero values.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let x = self.sample(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }

    /// Hook for a fraction-free rank routine. Fields where naive Gaussian
    /// elimination causes coefficient blow-up (the rationals) override this;
    /// `None` means "use plain elimination". Entries are row-major.
    fn fraction_free_rank(&self, rows: usize, cols: usize, entries: &[Self::Elem]) -> Option<usize> {
        let _ = (rows, cols, entries);
        None
    }
}

/// The field with `p` elements, `p` an odd prime. Elements are canonical
/// residues in `0..p`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Rejects 2 (halving must exist) and composites.
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::Usage("modulus 2 not supported: halving must be defined".into()));
        }
        if !is_prime_u64(p) {
            return Err(Error::Usage(format!("modulus {p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_i128(&self, n: i128) -> u64 {
        n.rem_euclid(self.p as i128) as u64
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(pow_mod(*a, self.p - 2, self.p))
        }
    }

    fn halve(&self, a: &u64) -> u64 {
        if a % 2 == 0 {
            a / 2
        } else {
            (a + self.p) / 2
        }
    }

    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i128(n as i128)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.p)
    }
}

/// The rational numbers with exact big-integer arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn halve(&self, a: &BigRational) -> BigRational {
        a / BigRational::from_integer(2.into())
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// Small numerators and denominators: keeps downstream minors exact but
    /// readable, and still exercises non-integral arithmetic.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let num: i64 = rng.random_range(-6..=6);
        let den: i64 = rng.random_range(1..=4);
        BigRational::new(num.into(), den.into())
    }

    /// Bareiss fraction-free elimination over the integers after clearing
    /// denominators row by row; intermediate entries stay minors of the
    /// original matrix instead of exploding as reduced fractions do.
    fn fraction_free_rank(&self, rows: usize, cols: usize, entries: &[BigRational]) -> Option<usize> {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
        for r in 0..rows {
            let row = &entries[r * cols..(r + 1) * cols];
            let mut l = BigInt::one();
            for e in row {
                l = l.lcm(e.denom());
            }
            m.push(row.iter().map(|e| e.numer() * (&l / e.denom())).collect());
        }

        let mut rank = 0usize;
        let mut prev = BigInt::one();
        let mut r = 0usize;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, pr);
            for i in r + 1..rows {
                for j in c + 1..cols {
                    let t = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                    m[i][j] = t / &prev; // exact by Sylvester's identity
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[r][c].clone();
            r += 1;
            rank += 1;
        }
        Some(rank)
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the listed bases decide primality for all u64.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_two_and_composites() {
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(91).is_err()); // 7 * 13
        assert!(PrimeField::new(7).is_ok());
        assert!(PrimeField::new(32003).is_ok());
    }

    #[test]
    fn halve_is_exact_division_by_two() {
        let f7 = PrimeField::new(7).unwrap();
        // 2 * 4 = 8 = 1 mod 7
        assert_eq!(f7.halve(&1), 4);
        for a in 0..7u64 {
            let h = f7.halve(&a);
            assert_eq!(f7.add(&h, &h), a);
        }
        let q = Rationals;
        let one = q.one();
        let h = q.halve(&one);
        assert_eq!(q.add(&h, &h), one);
    }

    #[test]
    fn prime_field_inverses() {
        let f = PrimeField::new(32003).unwrap();
        assert_eq!(f.inv(&0), None);
        for a in [1u64, 2, 5, 1234, 32002] {
            let i = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &i), 1);
        }
    }

    #[test]
    fn bareiss_rank_matches_plain_elimination() {
        // 3x3 of rank 2 with denominators.
        let q = Rationals;
        let half = BigRational::new(1.into(), 2.into());
        let e = |n: i64| q.from_i64(n);
        // rows: (1, 1/2, 0), (2, 1, 0), (0, 0, 3)
        let entries = vec![
            e(1),
            half.clone(),
            e(0),
            e(2),
            e(1),
            e(0),
            e(0),
            e(0),
            e(3),
        ];
        assert_eq!(q.fraction_free_rank(3, 3, &entries), Some(2));
    }

    proptest! {
        #[test]
        fn field_axioms_f32003(a in 0u64..32003, b in 0u64..32003, c in 0u64..32003) {
            let f = PrimeField::new(32003).unwrap();
            prop_assert_eq!(f.add(&a, &b), f.add(&b, &a));
            prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
            prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            prop_assert_eq!(f.sub(&f.add(&a, &b), &b), a);
            prop_assert_eq!(f.add(&f.halve(&a), &f.halve(&a)), a);
            if a != 0 {
                prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
            }
        }
    }
}
