//! Certified enclosures of `tan(kπ/n)`.
//!
//! π comes from Machin's formula, the angle is reduced to `(0, π/4]` (using
//! `tan x = 1 / tan(π/2 - x)` above π/4), and sine and cosine are bounded by
//! their alternating Taylor series with the first omitted term as remainder.
//! Enclosures are computed on a fixed ladder of precisions and intersected,
//! so asking for a smaller width always returns a sub-interval.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::rational::{int, Rational};
use super::NumError;

pub const DEFAULT_TAN_WIDTH_BITS: u32 = 80;

const BASE_BITS: u64 = 64;
const STEP_BITS: u64 = 64;
const GUARD_BITS: u64 = 32;

pub fn pow2_neg(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits as usize)
}

pub fn default_tan_width() -> Rational {
    pow2_neg(DEFAULT_TAN_WIDTH_BITS)
}

/// Interval containing π with width below roughly `2^-bits`.
pub fn enclose_pi(bits: u64) -> Interval {
    let work = bits + GUARD_BITS;
    let a = arctan_recip(5, work);
    let b = arctan_recip(239, work);
    let sixteen = Interval::point(int(16));
    let four = Interval::point(int(4));
    (&(&sixteen * &a) - &(&four * &b)).round_outward(work)
}

/// arctan(1/q) for q ≥ 2 by its alternating series.
fn arctan_recip(q: u64, bits: u64) -> Interval {
    let q = BigInt::from(q);
    let q2 = &q * &q;
    let tol = Rational::new(BigInt::one(), BigInt::one() << (bits + 4) as usize);
    let mut sum = Rational::zero();
    let mut power = q.clone();
    let mut k: u64 = 0;
    loop {
        let term = Rational::new(BigInt::one(), &power * BigInt::from(2 * k + 1));
        if term < tol {
            // Remainder after k terms has the sign of this first omitted term.
            let bound = if k.is_multiple_of(2) {
                Interval::new(sum.clone(), &sum + &term)
            } else {
                Interval::new(&sum - &term, sum.clone())
            };
            return bound.round_outward(bits);
        }
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &q2;
        k += 1;
    }
}

/// Enclosures of sin(x) and cos(x) at a rational point `0 ≤ x < 1`.
fn sin_cos_at(x: &Rational, bits: u64) -> (Interval, Interval) {
    let x_iv = Interval::point(x.clone());
    let x2 = (&x_iv * &x_iv).round_outward(bits);
    let tol = Rational::new(BigInt::one(), BigInt::one() << (bits + 4) as usize);
    let series = |first: Interval, start: u64| -> Interval {
        // Terms t_k = t_{k-1} * (-x²) / ((start+2k-1)(start+2k)).
        let mut term = first;
        let mut sum = term.clone();
        let mut d = start;
        loop {
            let denom = int(((d + 1) * (d + 2)) as i64);
            term = (-(&term * &x2)).round_outward(bits);
            term = Interval::new(term.lo() / &denom, term.hi() / &denom).round_outward(bits);
            d += 2;
            if term.abs_max() < tol {
                let r = term.abs_max();
                let rem = Interval::new(-r.clone(), r);
                return (&sum + &rem).round_outward(bits);
            }
            sum = (&sum + &term).round_outward(bits);
        }
    };
    let sin = series(x_iv.clone(), 1);
    let cos = series(Interval::point(Rational::one()), 0);
    (sin, cos)
}

/// tan over an interval of angles inside (0, π/4 + tiny].
fn tan_reduced(x: &Interval, bits: u64) -> Interval {
    let (sin_lo, cos_lo) = sin_cos_at(x.lo(), bits);
    let (sin_hi, cos_hi) = sin_cos_at(x.hi(), bits);
    // sin increases and cos decreases on the range, so tan is bracketed by
    // the endpoint quotients.
    let lo = sin_lo.lo() / cos_lo.hi();
    let hi = sin_hi.hi() / cos_hi.lo();
    Interval::new(lo, hi).round_outward(bits)
}

type TanCache = Mutex<HashMap<(i64, i64, u64), Interval>>;

fn tan_at_precision(k: i64, n: i64, bits: u64) -> Interval {
    static CACHE: OnceLock<TanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(iv) = cache.lock().unwrap().get(&(k, n, bits)) {
        return iv.clone();
    }
    let iv = compute_tan(k, n, bits);
    cache.lock().unwrap().insert((k, n, bits), iv.clone());
    iv
}

fn compute_tan(k: i64, n: i64, bits: u64) -> Interval {
    let work = bits + GUARD_BITS;
    let pi = enclose_pi(work);
    let angle = |num: i64, den: i64| -> Interval {
        let f = Rational::new(num.into(), den.into());
        Interval::new(pi.lo() * &f, pi.hi() * &f)
    };
    if 4 * k <= n {
        tan_reduced(&angle(k, n), work)
    } else {
        let complement = angle(n - 2 * k, 2 * n);
        tan_reduced(&complement, work)
            .recip()
            .expect("tan of a positive reduced angle is positive")
            .round_outward(work)
    }
}

/// Interval containing `tan(kπ/n)` of width at most `width_bound`, for `1 ≤ k < n/2`.
pub fn enclose_tan(k: i64, n: i64, width_bound: &Rational) -> Result<Interval, NumError> {
    if n > 0 && 2 * k == n {
        return Err(NumError::PoleError { k, n });
    }
    if k < 1 || n < 1 || 2 * k > n {
        return Err(NumError::TanDomain { k, n });
    }
    if !width_bound.is_positive() {
        return Err(NumError::NonPositiveWidth);
    }
    let mut level = 0;
    let mut enclosure = tan_at_precision(k, n, BASE_BITS);
    while &enclosure.width() > width_bound {
        level += 1;
        let next = tan_at_precision(k, n, BASE_BITS + STEP_BITS * level);
        enclosure = enclosure
            .intersect(&next)
            .expect("two enclosures of the same value intersect");
    }
    Ok(enclosure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{parse_rational, rat};

    fn ten_pow_neg(e: u32) -> Rational {
        Rational::new(BigInt::one(), BigInt::from(10u32).pow(e))
    }

    #[test]
    fn pi_enclosure_is_tight() {
        let pi = enclose_pi(200);
        let lo = parse_rational("3.14159265358979323846264338327950288419").unwrap();
        let hi = parse_rational("3.14159265358979323846264338327950288420").unwrap();
        assert!(pi.lo() <= &hi && &lo <= pi.hi());
        assert!(pi.width() < pow2_neg(190));
    }

    #[test]
    fn tan_quarter_pi_contains_one() {
        let w = ten_pow_neg(30);
        let t = enclose_tan(1, 4, &w).unwrap();
        assert!(t.contains(&int(1)));
        assert!(t.width() <= w);
    }

    #[test]
    fn tan_eighty_degrees_matches_reference_digits() {
        // Reference digits from an independent 60-digit evaluation.
        let w = ten_pow_neg(25);
        let t = enclose_tan(8, 18, &w).unwrap();
        let reference = parse_rational("5.671281819617709530994418439863964421625").unwrap();
        let slack = ten_pow_neg(38);
        assert!(t.lo() <= &(&reference + &slack) && &(&reference - &slack) <= t.hi());
        assert!(t.width() <= w);
    }

    #[test]
    fn tan_thirty_degrees_squares_to_a_third() {
        let w = ten_pow_neg(25);
        let t = enclose_tan(3, 18, &w).unwrap();
        let reference = parse_rational("0.5773502691896257645091487805019574556476").unwrap();
        let slack = ten_pow_neg(38);
        assert!(t.lo() <= &(&reference + &slack) && &(&reference - &slack) <= t.hi());
        let squared = &t * &t;
        assert!(squared.contains(&rat(1, 3)));
    }

    #[test]
    fn poles_and_domain() {
        assert_eq!(
            enclose_tan(9, 18, &default_tan_width()),
            Err(NumError::PoleError { k: 9, n: 18 })
        );
        assert!(matches!(enclose_tan(0, 18, &default_tan_width()), Err(NumError::TanDomain { .. })));
        assert!(matches!(enclose_tan(10, 18, &default_tan_width()), Err(NumError::TanDomain { .. })));
        assert_eq!(enclose_tan(1, 18, &Rational::zero()), Err(NumError::NonPositiveWidth));
    }

    #[test]
    fn halving_the_width_nests() {
        let mut width = pow2_neg(40);
        let mut prev = enclose_tan(7, 18, &width).unwrap();
        for _ in 0..200 {
            width = &width / int(2);
            let next = enclose_tan(7, 18, &width).unwrap();
            assert!(next.is_subset_of(&prev));
            assert!(next.width() <= width);
            prev = next;
        }
    }
}
