//! Complete enumeration of the up-sets of the boolean cube `{0,1}^k`.
//!
//! Indicators of up-sets generate all increasing `{0,1}`-valued functions, so
//! a complete family is enough to test positive association exhaustively.
//! The family size is the Dedekind number, which caps `k` at 5
//! (2, 3, 6, 20, 168, 7581 for k = 0..=5).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub const MAX_GROUND_SIZE: usize = 5;

/// Dedekind numbers M(0)..=M(5), used as a self-check.
pub const DEDEKIND: [usize; 6] = [2, 3, 6, 20, 168, 7581];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpSetError {
    GroundSizeCapped { requested: usize },
}

impl fmt::Display for UpSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpSetError::GroundSizeCapped { requested } => {
                write!(
                    f,
                    "up-set enumeration capped at {MAX_GROUND_SIZE} (requested {requested})"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for UpSetError {}

/// Every up-set of `{0,1}^ground_size`, each stored as a bitmask over the
/// `2^ground_size` points of the cube (bit `x` set means point `x` is in
/// the up-set).
#[derive(Clone, Debug)]
pub struct UpSetFamily {
    ground_size: usize,
    masks: Vec<u32>,
}

impl UpSetFamily {
    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    /// The points of an up-set mask, as coordinate bit-vectors.
    pub fn points(&self, mask: u32) -> Vec<u32> {
        (0..1u32 << self.ground_size)
            .filter(|&x| mask >> x & 1 == 1)
            .collect()
    }
}

/// Enumerate all up-sets of `{0,1}^ground_size`.
///
/// Recursion on the last coordinate: an up-set of the `k`-cube is exactly a
/// pair `(lo, hi)` of up-sets of the `(k-1)`-cube with `lo ⊆ hi`, where `lo`
/// is the slice with the last coordinate 0 and `hi` the slice with it 1.
pub fn enumerate_upsets(ground_size: usize) -> Result<UpSetFamily, UpSetError> {
    if ground_size > MAX_GROUND_SIZE {
        return Err(UpSetError::GroundSizeCapped { requested: ground_size });
    }
    let mut masks: Vec<u32> = vec![0b0, 0b1];
    for k in 1..=ground_size {
        let half = 1u32 << (k - 1);
        let mut next = Vec::new();
        for &hi in &masks {
            for &lo in &masks {
                if lo & !hi == 0 {
                    next.push(lo | hi << half);
                }
            }
        }
        masks = next;
    }
    masks.sort_unstable();
    Ok(UpSetFamily { ground_size, masks })
}

/// Whether `mask` is upward closed as a subset of `{0,1}^k`.
pub fn is_upward_closed(mask: u32, k: usize) -> bool {
    let points = 1u32 << k;
    for x in 0..points {
        if mask >> x & 1 == 1 {
            for c in 0..k {
                let y = x | 1 << c;
                if mask >> y & 1 == 0 {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_dedekind_numbers() {
        for k in 0..=MAX_GROUND_SIZE {
            let fam = enumerate_upsets(k).unwrap();
            assert_eq!(fam.len(), DEDEKIND[k], "ground size {k}");
        }
    }

    #[test]
    fn two_cube_family_is_the_hand_enumeration() {
        // Up-sets of {0,1}^2: {}, {11}, {01,11}, {10,11}, {01,10,11}, all.
        let fam = enumerate_upsets(2).unwrap();
        let mut expected = vec![
            0b0000u32,
            0b1000,
            0b1010,
            0b1100,
            0b1110,
            0b1111,
        ];
        expected.sort_unstable();
        assert_eq!(fam.masks(), &expected[..]);
    }

    #[test]
    fn every_member_is_upward_closed() {
        for k in 0..=MAX_GROUND_SIZE {
            let fam = enumerate_upsets(k).unwrap();
            for &m in fam.masks() {
                assert!(is_upward_closed(m, k));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(enumerate_upsets(6).is_err());
    }
}
