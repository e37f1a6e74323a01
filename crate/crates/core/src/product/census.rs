use crate::error::{QlError, Result};

/// Number of block pairs above the diagonal of a `q`-bit product whose
/// label tuples differ in two or more positions: `(4^q - (q + 1) 2^q) / 2`.
pub fn zero_coupling_block_count(q: u32) -> Result<u64> {
    if q == 0 || q > 31 {
        return Err(QlError::invalid(format!("q must lie in 1..=31, got {q}")));
    }
    let p = 1u64 << q;
    Ok((p * p - (q as u64 + 1) * p) / 2)
}

/// The same count by enumerating every pair of binary tuples.
pub fn zero_coupling_block_count_brute(q: u32) -> Result<u64> {
    if q == 0 || q > 16 {
        return Err(QlError::invalid(format!("brute-force census needs q in 1..=16, got {q}")));
    }
    let p = 1u32 << q;
    let mut count = 0u64;
    for s in 0..p {
        for t in s + 1..p {
            if (s ^ t).count_ones() >= 2 {
                count += 1;
            }
        }
    }
    Ok(count)
}
