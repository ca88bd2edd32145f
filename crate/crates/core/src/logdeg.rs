//! Exact representation of `Σ_v ln d(v)` as a prime-exponent vector of the
//! degree product.
//!
//! Two sums are equal exactly when their exponent vectors are equal, and the
//! float value depends only on the vector, so incremental updates and
//! from-scratch evaluation produce the same bits.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LogProduct {
    /// prime -> exponent; zero exponents are never stored.
    exponents: BTreeMap<u64, u32>,
}

fn factorize(mut d: u64, mut visit: impl FnMut(u64, u32)) {
    let mut p = 2;
    while p * p <= d {
        let mut k = 0;
        while d.is_multiple_of(p) {
            d /= p;
            k += 1;
        }
        if k > 0 {
            visit(p, k);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if d > 1 {
        visit(d, 1);
    }
}

impl LogProduct {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_degrees(degrees: impl IntoIterator<Item = usize>) -> Self {
        let mut out = Self::one();
        for d in degrees {
            out.mul(d);
        }
        out
    }

    /// Multiplies the product by `d`. `d = 0` is ignored by callers that
    /// already rejected invalid masks; here it is a bug.
    pub fn mul(&mut self, d: usize) {
        debug_assert!(d > 0, "ln 0 is undefined");
        factorize(d as u64, |p, k| *self.exponents.entry(p).or_insert(0) += k);
    }

    /// Divides the product by `d`, which must divide it.
    pub fn div(&mut self, d: usize) {
        debug_assert!(d > 0);
        factorize(d as u64, |p, k| {
            let slot = self
                .exponents
                .get_mut(&p)
                .expect("dividing by a factor that is not present");
            *slot -= k;
            if *slot == 0 {
                self.exponents.remove(&p);
            }
        });
    }

    /// Replaces one factor `from` by `to`.
    pub fn replace(&mut self, from: usize, to: usize) {
        if from != to {
            self.div(from);
            self.mul(to);
        }
    }

    /// `ln` of the product, summed over primes in ascending order.
    pub fn ln(&self) -> f64 {
        self.exponents
            .iter()
            .map(|(&p, &k)| k as f64 * (p as f64).ln())
            .sum()
    }

    pub fn to_biguint(&self) -> BigUint {
        self.exponents.iter().fold(BigUint::one(), |acc, (&p, &k)| {
            acc * BigUint::from(p).pow(k)
        })
    }

    /// Exact comparison of the two products (and hence of their logarithms).
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let a = self.ln();
        let b = other.ln();
        if (a - b).abs() > 1e-9 * (1.0 + a.abs().max(b.abs())) {
            return a.partial_cmp(&b).unwrap_or(Ordering::Equal);
        }
        self.to_biguint().cmp(&other.to_biguint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorisation_roundtrip() {
        let mut p = LogProduct::from_degrees([12, 7, 1, 9]);
        assert_eq!(p.to_biguint(), BigUint::from(12u32 * 7 * 9));
        p.replace(12, 13);
        assert_eq!(p.to_biguint(), BigUint::from(13u32 * 7 * 9));
        p.div(13);
        p.div(63);
        assert_eq!(p, LogProduct::one());
    }

    #[test]
    fn equal_products_equal_bits() {
        let a = LogProduct::from_degrees([4, 1, 6]);
        let b = LogProduct::from_degrees([2, 2, 3, 2]);
        assert_eq!(a, b);
        assert_eq!(a.ln().to_bits(), b.ln().to_bits());
        assert!((a.ln() - 24f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn exact_order() {
        let a = LogProduct::from_degrees([5, 5]);
        let b = LogProduct::from_degrees([24]);
        assert_eq!(a.cmp_exact(&b), Ordering::Greater);
        assert_eq!(b.cmp_exact(&a), Ordering::Less);
    }
}
