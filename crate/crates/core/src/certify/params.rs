use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::CertifyError;
use crate::arrangement::{NormalizedFamily, NormalizedLine};
use crate::exactnum::{
    best_approximation, enclose_tan, pow2_neg, ratio_text, ratio_text_vec, Bindings, Expr, Interval,
    Rational, DEFAULT_PRECISION_BITS, DEFAULT_TAN_WIDTH_BITS,
};

/// Symbolic root `a_i` of a line of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InterceptSpec {
    Tan { k: i64, n: i64, negative: bool },
    Eps { negative: bool },
}

impl InterceptSpec {
    pub fn is_negative(&self) -> bool {
        match *self {
            InterceptSpec::Tan { negative, .. } | InterceptSpec::Eps { negative } => negative,
        }
    }

    pub fn tan_var(k: i64, n: i64) -> String {
        format!("tan_{k}_{n}")
    }

    pub fn expr(&self) -> Expr {
        let base = match *self {
            InterceptSpec::Tan { k, n, .. } => Expr::var(Self::tan_var(k, n)),
            InterceptSpec::Eps { .. } => Expr::var(EPS_VAR),
        };
        if self.is_negative() {
            -base
        } else {
            base
        }
    }

    /// Enclosure of the value for the given `eps` range.
    pub fn resolve(&self, eps: &Interval, tan_width: &Rational) -> Result<Interval, CertifyError> {
        let v = match *self {
            InterceptSpec::Tan { k, n, .. } => enclose_tan(k, n, tan_width)?,
            InterceptSpec::Eps { .. } => eps.clone(),
        };
        Ok(if self.is_negative() { -v } else { v })
    }
}

impl fmt::Display for InterceptSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_negative() { '-' } else { '+' };
        match *self {
            InterceptSpec::Tan { k, n, .. } => write!(f, "{sign}tan({k}pi/{n})"),
            InterceptSpec::Eps { .. } => write!(f, "{sign}eps"),
        }
    }
}

impl FromStr for InterceptSpec {
    type Err = CertifyError;

    fn from_str(text: &str) -> Result<Self, CertifyError> {
        let bad = || CertifyError::Config(format!("bad intercept spec {text:?}"));
        let t = text.trim().replace('π', "pi").replace(' ', "");
        let (negative, body) = match t.chars().next() {
            Some('-') | Some('−') => (true, t.trim_start_matches(['-', '−'])),
            Some('+') => (false, &t[1..]),
            _ => (false, t.as_str()),
        };
        if body == "eps" || body == "ε" {
            return Ok(InterceptSpec::Eps { negative });
        }
        let inner = body
            .strip_prefix("tan(")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (k, n) = inner.split_once("pi/").ok_or_else(bad)?;
        let k: i64 = if k.is_empty() { 1 } else { k.parse().map_err(|_| bad())? };
        let n: i64 = n.parse().map_err(|_| bad())?;
        Ok(InterceptSpec::Tan { k, n, negative })
    }
}

impl Serialize for InterceptSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InterceptSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

pub const EPS_VAR: &str = "eps";

pub fn slope_var(i: usize) -> String {
    format!("m_{i}")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Maximum bisection depth per inequality.
    pub max_depth: u32,
    /// Initial width `2^-bits` of the tan enclosures.
    pub tan_width_bits: u32,
    /// Significant bits kept during interval evaluation.
    pub precision_bits: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            max_depth: 12,
            tan_width_bits: DEFAULT_TAN_WIDTH_BITS,
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

/// Slopes `m_i ∈ [c_i − δ, c_i + δ]`, symbolic roots, and an `eps` range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterBox {
    pub n: usize,
    #[serde(with = "ratio_text")]
    pub eps_lo: Rational,
    #[serde(with = "ratio_text")]
    pub eps_hi: Rational,
    #[serde(with = "ratio_text")]
    pub delta_m: Rational,
    #[serde(with = "ratio_text_vec")]
    pub slope_centers: Vec<Rational>,
    pub intercepts: Vec<InterceptSpec>,
    #[serde(default)]
    pub settings: Settings,
}

impl ParameterBox {
    pub fn from_toml(text: &str) -> Result<Self, CertifyError> {
        let b: ParameterBox = toml::from_str(text).map_err(|e| CertifyError::Config(e.to_string()))?;
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        let err = |m: String| Err(CertifyError::Config(m));
        if self.slope_centers.len() != self.n || self.intercepts.len() != self.n {
            return err(format!(
                "expected {} slope centers and intercepts, found {} and {}",
                self.n,
                self.slope_centers.len(),
                self.intercepts.len()
            ));
        }
        if self.eps_lo.is_negative() || self.eps_lo > self.eps_hi {
            return err("need 0 ≤ eps_lo ≤ eps_hi".into());
        }
        if self.delta_m.is_negative() {
            return err("delta_m must be non-negative".into());
        }
        for spec in &self.intercepts {
            if let InterceptSpec::Tan { k, n, .. } = *spec {
                if k < 1 || 2 * k >= n {
                    return err(format!("intercept {spec} outside 1 ≤ k < n/2"));
                }
            }
        }
        Ok(())
    }

    /// Number of lines including `Y0`.
    pub fn line_count(&self) -> usize {
        self.n + 1
    }

    pub fn eps_interval(&self) -> Interval {
        Interval::new(self.eps_lo.clone(), self.eps_hi.clone())
    }

    pub fn slope_interval(&self, i: usize) -> Interval {
        Interval::around(&self.slope_centers[i - 1], &self.delta_m)
    }

    pub fn tan_width(&self, bits: u32) -> Rational {
        pow2_neg(bits)
    }

    /// Variable bindings for slopes, tan constants and `eps`.
    pub fn bindings(&self, eps: &Interval, tan_bits: u32) -> Result<Bindings, CertifyError> {
        let mut b = Bindings::new();
        for i in 1..=self.n {
            b.insert(slope_var(i), self.slope_interval(i));
        }
        b.insert(EPS_VAR.to_string(), eps.clone());
        let width = self.tan_width(tan_bits);
        for spec in &self.intercepts {
            if let InterceptSpec::Tan { k, n, .. } = *spec {
                let name = InterceptSpec::tan_var(k, n);
                if let std::collections::btree_map::Entry::Vacant(e) = b.entry(name) {
                    e.insert(enclose_tan(k, n, &width)?);
                }
            }
        }
        Ok(b)
    }

    /// Indices of the lines with root `-eps` and `+eps`, when both occur once.
    pub fn eps_lines(&self) -> Option<(usize, usize)> {
        let find = |neg: bool| {
            let hits: Vec<usize> = self
                .intercepts
                .iter()
                .enumerate()
                .filter(|(_, s)| **s == InterceptSpec::Eps { negative: neg })
                .map(|(i, _)| i + 1)
                .collect();
            (hits.len() == 1).then(|| hits[0])
        };
        Some((find(true)?, find(false)?))
    }

    /// The family at exact slopes, with roots enclosed for one `eps` value.
    pub fn family_at(
        &self,
        slopes: &[Rational],
        eps: &Rational,
        tan_bits: u32,
    ) -> Result<NormalizedFamily, CertifyError> {
        let eps = Interval::point(eps.clone());
        let width = self.tan_width(tan_bits);
        let lines = self
            .intercepts
            .iter()
            .zip(slopes)
            .map(|(spec, m)| {
                Ok(NormalizedLine { m: Interval::point(m.clone()), a: spec.resolve(&eps, &width)? })
            })
            .collect::<Result<Vec<_>, CertifyError>>()?;
        Ok(NormalizedFamily::new(lines))
    }
}

/// Fixed roots for the linear stretching system: an `eps` value and the specs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterceptAssignment {
    #[serde(with = "ratio_text")]
    pub eps: Rational,
    pub intercepts: Vec<InterceptSpec>,
    #[serde(default = "default_tan_bits")]
    pub tan_width_bits: u32,
    /// Tan roots are replaced by their best approximation with at most this
    /// denominator; `0` keeps the exact enclosure midpoints.
    #[serde(default = "default_root_denominator")]
    pub root_denominator: u64,
}

fn default_root_denominator() -> u64 {
    1_000_000
}

fn default_tan_bits() -> u32 {
    DEFAULT_TAN_WIDTH_BITS
}

impl InterceptAssignment {
    pub fn from_toml(text: &str) -> Result<Self, CertifyError> {
        toml::from_str(text).map_err(|e| CertifyError::Config(e.to_string()))
    }

    /// Exact roots `a_1..a_n`: `±eps`, or a rational close to `±tan(kπ/n)`.
    pub fn resolve(&self) -> Result<Vec<Rational>, CertifyError> {
        let eps = Interval::point(self.eps.clone());
        let width = pow2_neg(self.tan_width_bits);
        self.intercepts
            .iter()
            .map(|s| {
                let mid = s.resolve(&eps, &width)?.midpoint();
                Ok(match s {
                    InterceptSpec::Tan { .. } if self.root_denominator > 0 => {
                        best_approximation(&mid, self.root_denominator)
                    }
                    _ => mid,
                })
            })
            .collect()
    }
}
