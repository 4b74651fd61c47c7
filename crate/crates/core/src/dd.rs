//! Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
//!
//! The convolution form of the dynamics sums binomial-weighted matrix terms
//! whose magnitudes can exceed the final result by ten orders of magnitude at
//! t = 50 near the edge of the stability region. Accumulating in ~31 decimal
//! digits keeps that oracle trustworthy at the tolerances the tests demand.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let lo = e + self.lo + rhs.lo;
        let (hi, lo) = two_sum(s, lo);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let lo = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = two_sum(p, lo);
        Dd { hi, lo }
    }
}

/// Dense row-major square-matrix product in double-double precision.
pub(crate) fn matmul(a: &[Dd], b: &[Dd], n: usize) -> Vec<Dd> {
    let mut out = vec![Dd::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.hi == 0.0 && aik.lo == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + aik * b[k * n + j];
            }
        }
    }
    out
}

/// `acc += w * m`, entrywise.
pub(crate) fn axpy(acc: &mut [Dd], w: f64, m: &[Dd]) {
    let w = Dd::from_f64(w);
    for (a, &v) in acc.iter_mut().zip(m.iter()) {
        *a = *a + w * v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_recovers_cancelled_bits() {
        let big = Dd::from_f64(1e16);
        let tiny = Dd::from_f64(1.0);
        let sum = big + tiny - big;
        assert_eq!(sum.to_f64(), 1.0);
    }

    #[test]
    fn product_carries_the_rounding_term() {
        let a = Dd::from_f64(1.0 + f64::EPSILON);
        let b = a * a;
        // (1 + eps)^2 = 1 + 2 eps + eps^2; plain f64 drops the eps^2 term.
        let exact_lo = f64::EPSILON * f64::EPSILON;
        assert!((b.hi - (1.0 + 2.0 * f64::EPSILON)).abs() < 1e-30);
        assert!((b.lo - exact_lo).abs() < 1e-40);
    }
}
