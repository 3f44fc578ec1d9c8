use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("bound needs at least 3 lines, got {0}")]
    TooFewLines(u64),
    #[error("no projective bound is stated for n = {n} (n mod 6 = {residue})")]
    NotCovered { n: u64, residue: u64 },
    #[error("series index {0} overflows")]
    Overflow(u32),
}

/// Largest possible number of triangles in a simple arrangement of `n` lines.
pub fn affine_upper_bound(n: u64) -> Result<u64, BoundError> {
    if n < 3 {
        return Err(BoundError::TooFewLines(n));
    }
    let base = n * (n - 2);
    Ok(if n % 6 == 1 { (base - 2) / 3 } else { base / 3 })
}

/// Projective bound, stated only for `n ≡ 2 (mod 6)`.
pub fn projective_upper_bound(n: u64) -> Result<u64, BoundError> {
    if n < 3 {
        return Err(BoundError::TooFewLines(n));
    }
    if n % 6 != 2 {
        return Err(BoundError::NotCovered { n, residue: n % 6 });
    }
    Ok((n * (n - 1) - 5) / 3)
}

/// Lines in step `t` of the doubling series: `18·2^t + 1`.
pub fn series_line_count(t: u32) -> Result<u128, BoundError> {
    1u128
        .checked_shl(t)
        .filter(|p| p.leading_zeros() > 6)
        .map(|p| 18 * p + 1)
        .ok_or(BoundError::Overflow(t))
}

/// Triangles in step `t` of the doubling series: `108·4^t − 1`.
pub fn series_value(t: u32) -> Result<u128, BoundError> {
    if 2 * t > 120 {
        return Err(BoundError::Overflow(t));
    }
    Ok(108 * (1u128 << (2 * t)) - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(affine_upper_bound(19), Ok(107));
        assert_eq!(affine_upper_bound(41), Ok(533));
        assert_eq!(affine_upper_bound(45), Ok(645));
        assert_eq!(affine_upper_bound(49), Ok(767));
        assert_eq!(affine_upper_bound(3), Ok(1));
        assert_eq!(projective_upper_bound(50), Ok(815));
        assert_eq!(
            projective_upper_bound(49),
            Err(BoundError::NotCovered { n: 49, residue: 1 })
        );
        assert_eq!(affine_upper_bound(2), Err(BoundError::TooFewLines(2)));
        assert_eq!(series_value(0), Ok(107));
        assert_eq!(series_value(1), Ok(431));
        assert_eq!(series_value(2), Ok(1727));
    }

    #[test]
    fn series_meets_affine_bound() {
        for t in 0..=20 {
            let n = series_line_count(t).unwrap() as u64;
            assert_eq!(series_value(t).unwrap(), affine_upper_bound(n).unwrap() as u128);
        }
    }
}
