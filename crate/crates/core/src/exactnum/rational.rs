//! Exact rationals: parsing of decimal and `p/q` literals, serialization, and
//! directed rounding to a bounded number of significant bits.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::NumError;

/// Reduced fraction with a positive denominator.
pub type Rational = num_rational::BigRational;

/// `p/q` as a rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// A decimal literal kept in its unreduced form `digits / 10^scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    pub digits: BigInt,
    pub scale: u32,
}

impl Decimal {
    pub fn parse(text: &str) -> Result<Self, NumError> {
        let malformed = || NumError::Parse(text.to_string());
        let t = text.trim();
        let (negative, body) = split_sign(t);
        let (mantissa, exponent) = match body.find(['e', 'E']) {
            Some(idx) => {
                let exp: i64 = body[idx + 1..].parse().map_err(|_| malformed())?;
                (&body[..idx], exp)
            }
            None => (body, 0),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(malformed());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(malformed());
        }
        let all: String = format!("{int_part}{frac_part}");
        let mut digits: BigInt = all.parse().map_err(|_| malformed())?;
        let mut scale = frac_part.len() as i64 - exponent;
        if scale < 0 {
            digits *= BigInt::from(10u32).pow((-scale) as u32);
            scale = 0;
        }
        if negative {
            digits = -digits;
        }
        Ok(Decimal { digits, scale: scale as u32 })
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.digits.clone(), BigInt::from(10u32).pow(self.scale))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.digits.is_negative() { "-" } else { "" };
        let mut s = self.digits.abs().to_string();
        let scale = self.scale as usize;
        if scale == 0 {
            return write!(f, "{sign}{s}");
        }
        if s.len() <= scale {
            s = format!("{}{}", "0".repeat(scale - s.len() + 1), s);
        }
        let (i, frac) = s.split_at(s.len() - scale);
        write!(f, "{sign}{i}.{frac}")
    }
}

fn split_sign(t: &str) -> (bool, &str) {
    if let Some(rest) = t.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = t.strip_prefix('\u{2212}') {
        (true, rest)
    } else if let Some(rest) = t.strip_prefix('+') {
        (false, rest)
    } else {
        (false, t)
    }
}

/// Parses `p/q`, integers, decimals (`-0.5781`) and scientific notation (`1e-12`).
pub fn parse_rational(text: &str) -> Result<Rational, NumError> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let (negative, p) = split_sign(p.trim());
        let p: BigInt = p.parse().map_err(|_| NumError::Parse(text.to_string()))?;
        let q: BigInt = q.trim().parse().map_err(|_| NumError::Parse(text.to_string()))?;
        if q.is_zero() {
            return Err(NumError::Parse(text.to_string()));
        }
        let r = Rational::new(p, q);
        return Ok(if negative { -r } else { r });
    }
    Ok(Decimal::parse(t)?.to_rational())
}

/// `p/q`, or just `p` for integers.
pub fn to_ratio_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Shortest exact decimal expansion, if the denominator is of the form 2^a 5^b.
pub fn to_decimal_string(r: &Rational) -> Option<String> {
    let mut q = r.denom().clone();
    let (two, five) = (BigInt::from(2u32), BigInt::from(5u32));
    let (mut twos, mut fives) = (0u32, 0u32);
    while q.is_even() {
        q /= &two;
        twos += 1;
    }
    while (&q % &five).is_zero() {
        q /= &five;
        fives += 1;
    }
    if !q.is_one() {
        return None;
    }
    let scale = twos.max(fives);
    let digits = r.numer() * BigInt::from(10u32).pow(scale) / r.denom();
    Some(Decimal { digits, scale }.to_string())
}

pub fn bit_len(x: &BigInt) -> u64 {
    x.bits()
}

/// Largest dyadic `k / 2^e` not above `r`, keeping about `bits` significant bits.
/// Returns `r` unchanged when numerator and denominator already fit.
pub fn round_down(r: &Rational, bits: u64) -> Rational {
    round_directed(r, bits, false)
}

/// Smallest dyadic not below `r` with about `bits` significant bits.
pub fn round_up(r: &Rational, bits: u64) -> Rational {
    round_directed(r, bits, true)
}

fn round_directed(r: &Rational, bits: u64, up: bool) -> Rational {
    let (p, q) = (r.numer(), r.denom());
    if p.bits() <= bits && q.bits() <= bits {
        return r.clone();
    }
    // r * 2^shift has roughly `bits` bits before the binary point.
    let shift = bits as i64 - (p.bits() as i64 - q.bits() as i64);
    let (num, den) = if shift >= 0 {
        (p << shift as usize, q.clone())
    } else {
        (p.clone(), q << (-shift) as usize)
    };
    let (quot, rem) = num.div_mod_floor(&den);
    let k = if up && !rem.is_zero() { quot + 1 } else { quot };
    let scaled = Rational::from_integer(k);
    if shift >= 0 {
        scaled / Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        scaled * Rational::from_integer(BigInt::one() << (-shift) as usize)
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents). `None` for non-finite input.
pub fn from_f64_bounded(x: f64, max_den: u64) -> Option<Rational> {
    Some(best_approximation(&Rational::from_float(x)?, max_den))
}

/// Last continued-fraction convergent of `x` whose denominator fits `max_den`.
pub fn best_approximation(x: &Rational, max_den: u64) -> Rational {
    let max_den = BigInt::from(max_den);
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    loop {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    if k1.is_zero() {
        return x.clone();
    }
    Rational::new(h1, k1)
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        if r.numer().sign() == Sign::Minus {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Serde adapter storing a [`Rational`] as its `p/q` string.
pub mod ratio_text {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::{parse_rational, to_ratio_string, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_ratio_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}

/// Serde adapter for a list of rationals stored as strings.
pub mod ratio_text_vec {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::{parse_rational, to_ratio_string, Rational};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(to_ratio_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literal_keeps_its_scale() {
        let d = Decimal::parse("\u{2212}0.578845642445838").unwrap();
        assert_eq!(d.scale, 15);
        assert_eq!(d.to_string(), "-0.578845642445838");
        let r = d.to_rational();
        assert_eq!(to_decimal_string(&r).unwrap(), "-0.578845642445838");
    }

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("1e-12").unwrap(), rat(1, 1_000_000_000_000));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("+2.5E1").unwrap(), int(25));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("-").is_err());
    }

    #[test]
    fn ratio_strings() {
        assert_eq!(to_ratio_string(&rat(6, -4)), "-3/2");
        assert_eq!(to_ratio_string(&int(7)), "7");
        assert_eq!(to_decimal_string(&rat(1, 3)), None);
        assert_eq!(to_decimal_string(&rat(1, 8)).unwrap(), "0.125");
    }

    #[test]
    fn directed_rounding_brackets_value() {
        let r = Rational::new(BigInt::from(7), BigInt::from(3).pow(30));
        assert_eq!(round_down(&rat(1, 3), 20), rat(1, 3));
        let lo = round_down(&r, 20);
        let hi = round_up(&r, 20);
        assert!(lo < r && r < hi);
        assert!(&hi - &lo <= &r * rat(1, 1 << 18));
        let neg = -r.clone();
        assert!(round_down(&neg, 20) < neg && neg < round_up(&neg, 20));
        assert_eq!(round_down(&rat(3, 4), 20), rat(3, 4));
    }

    #[test]
    fn bounded_denominator_approximation() {
        assert_eq!(from_f64_bounded(0.333333333333, 1000).unwrap(), rat(1, 3));
        assert_eq!(from_f64_bounded(-2.5, 10).unwrap(), rat(-5, 2));
        assert!(from_f64_bounded(f64::NAN, 10).is_none());
    }
}
