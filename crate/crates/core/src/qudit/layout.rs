//! Row-major index arithmetic for multi-party layouts. Party 0 varies slowest.

use crate::error::{Error, Result};

pub(crate) fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::Empty("party dimensions"));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidDimensions(dims.to_vec()));
    }
    Ok(())
}

/// Product of the party dimensions.
pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Per-party levels of a flat index.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Flat index of a per-party level assignment.
pub fn flat_index(levels: &[usize], dims: &[usize]) -> usize {
    levels
        .iter()
        .zip(dims)
        .fold(0, |acc, (&l, &d)| acc * d + l)
}

/// Number of flat-index steps between consecutive levels of `party`.
pub(crate) fn stride(dims: &[usize], party: usize) -> usize {
    dims[party + 1..].iter().product()
}

pub(crate) fn check_party(dims: &[usize], party: usize) -> Result<()> {
    if party >= dims.len() {
        return Err(Error::NoSuchParty {
            party,
            parties: dims.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let dims = [3, 2, 4];
        for i in 0..total_dim(&dims) {
            assert_eq!(flat_index(&digits(i, &dims), &dims), i);
        }
        assert_eq!(digits(5, &dims), vec![0, 1, 1]);
        assert_eq!(stride(&dims, 0), 8);
        assert_eq!(stride(&dims, 2), 1);
    }
}
