//! Tap-index subsets for partial-update schemes.
//!
//! Indices in the public API are 1-based where they name a subset or a filter
//! (`S_1..S_M`, filter `k = 1..M`) and 0-based where they index taps.

use std::fmt;

use crate::error::{Error, Result};

/// Diagonal of a 0/1 selection matrix over the taps of one filter.
#[derive(Clone, PartialEq, Eq)]
pub struct UpdateMask {
    bits: Vec<bool>,
}

impl UpdateMask {
    pub fn full(len: usize) -> Self {
        UpdateMask {
            bits: vec![true; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        UpdateMask { bits }
    }

    /// Mask selecting the given 0-based tap indices.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = vec![false; len];
        for i in indices {
            bits[i] = true;
        }
        UpdateMask { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of selected taps.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// 0-based indices of the selected taps.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }
}

impl fmt::Debug for UpdateMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based, matching the usual S_l notation
        f.debug_set().entries(self.indices().map(|i| i + 1)).finish()
    }
}

fn check_counts(len: usize, m: usize) -> Result<()> {
    if m < 1 || m > len {
        return Err(Error::contract(format!(
            "need 1 <= M <= L, got M = {m}, L = {len}"
        )));
    }
    Ok(())
}

/// `M` interleaved subsets: `S_i = {i, i+M, i+2M, ...}` (1-based). They partition the taps.
pub fn even_exclusive_masks(len: usize, m: usize) -> Result<Vec<UpdateMask>> {
    check_counts(len, m)?;
    Ok((0..m)
        .map(|i| UpdateMask::from_indices(len, (i..len).step_by(m)))
        .collect())
}

/// Smallest power of two `>= l`.
fn stride_for(l: usize) -> usize {
    l.next_power_of_two()
}

/// Uneven subsets `S_l = {l, l + D_l, l + 2 D_l, ...}` with `D_l` the smallest power of two
/// `>= l`. `S_1` is every tap, so the family overlaps.
pub fn uneven_masks(len: usize, m: usize) -> Result<Vec<UpdateMask>> {
    check_counts(len, m)?;
    Ok((1..=m)
        .map(|l| UpdateMask::from_indices(len, (l - 1..len).step_by(stride_for(l))))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleKind {
    /// Every filter updates every tap.
    FullUpdate,
    /// Even interleaved subsets, filter `k` gets `S_((n+k) mod M + 1)`.
    ExclusiveRotating,
    /// Even interleaved subsets, all filters share `S_(n mod M + 1)`.
    SameSubsetRotating,
    /// Power-of-two strided subsets rotated like `ExclusiveRotating`.
    UnevenRotating,
}

impl ScheduleKind {
    pub const ALL: [ScheduleKind; 4] = [
        ScheduleKind::FullUpdate,
        ScheduleKind::ExclusiveRotating,
        ScheduleKind::SameSubsetRotating,
        ScheduleKind::UnevenRotating,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::FullUpdate => "full",
            ScheduleKind::ExclusiveRotating => "exclusive",
            ScheduleKind::SameSubsetRotating => "same",
            ScheduleKind::UnevenRotating => "uneven",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// A schedule kind together with its precomputed mask family.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulePolicy {
    kind: ScheduleKind,
    filters: usize,
    masks: Vec<UpdateMask>,
}

impl SchedulePolicy {
    pub fn new(kind: ScheduleKind, filters: usize, len: usize) -> Result<Self> {
        let masks = match kind {
            ScheduleKind::FullUpdate => {
                check_counts(len, filters)?;
                vec![UpdateMask::full(len)]
            }
            ScheduleKind::ExclusiveRotating | ScheduleKind::SameSubsetRotating => {
                even_exclusive_masks(len, filters)?
            }
            ScheduleKind::UnevenRotating => uneven_masks(len, filters)?,
        };
        Ok(SchedulePolicy {
            kind,
            filters,
            masks,
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn filters(&self) -> usize {
        self.filters
    }

    pub fn masks(&self) -> &[UpdateMask] {
        &self.masks
    }

    /// 1-based subset index used by filter `k` (1-based) at iteration `n`.
    pub fn subset_index(&self, k: usize, n: usize) -> usize {
        debug_assert!((1..=self.filters).contains(&k));
        let m = self.filters;
        match self.kind {
            ScheduleKind::FullUpdate => 1,
            ScheduleKind::ExclusiveRotating | ScheduleKind::UnevenRotating => {
                (n % m + k % m) % m + 1
            }
            ScheduleKind::SameSubsetRotating => n % m + 1,
        }
    }

    /// The mask filter `k` (1-based) applies at iteration `n`.
    pub fn mask_for(&self, k: usize, n: usize) -> &UpdateMask {
        &self.masks[self.subset_index(k, n) - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn set(mask: &UpdateMask) -> BTreeSet<usize> {
        mask.indices().map(|i| i + 1).collect()
    }

    fn s(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn odd_even_split() {
        let m = even_exclusive_masks(6, 2).unwrap();
        assert_eq!(set(&m[0]), s(&[1, 3, 5]));
        assert_eq!(set(&m[1]), s(&[2, 4, 6]));
        let m = even_exclusive_masks(5, 2).unwrap();
        assert_eq!(set(&m[0]), s(&[1, 3, 5]));
        assert_eq!(set(&m[1]), s(&[2, 4]));
        let m = even_exclusive_masks(7, 1).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].count(), 7);
    }

    #[test]
    fn counts_out_of_range() {
        assert!(even_exclusive_masks(4, 5).is_err());
        assert!(even_exclusive_masks(4, 0).is_err());
        assert!(uneven_masks(4, 5).is_err());
        assert!(SchedulePolicy::new(ScheduleKind::FullUpdate, 3, 2).is_err());
    }

    #[test]
    fn uneven_examples() {
        // brute-force enumeration of j = l : D_l : L
        let brute = |len: usize, l: usize| -> BTreeSet<usize> {
            let mut d = 1;
            while d < l {
                d *= 2;
            }
            (1..=len).filter(|j| *j >= l && (j - l).is_multiple_of(d)).collect()
        };
        let m = uneven_masks(8, 4).unwrap();
        assert_eq!(set(&m[0]), s(&[1, 2, 3, 4, 5, 6, 7, 8]));
        assert_eq!(set(&m[1]), s(&[2, 4, 6, 8]));
        assert_eq!(set(&m[2]), s(&[3, 7]));
        assert_eq!(set(&m[3]), s(&[4, 8]));
        for (l, mask) in m.iter().enumerate() {
            assert_eq!(set(mask), brute(8, l + 1));
        }
        let m = uneven_masks(8, 2).unwrap();
        assert_eq!(set(&m[0]).len(), 8);
        assert_eq!(set(&m[1]), s(&[2, 4, 6, 8]));
        assert_eq!(uneven_masks(5, 1).unwrap()[0].count(), 5);
    }

    #[test]
    fn uneven_cardinalities() {
        for len in 1..=64 {
            for m in 1..=len.min(8) {
                let masks = uneven_masks(len, m).unwrap();
                assert_eq!(masks[0].count(), len);
                for (i, mask) in masks.iter().enumerate() {
                    let l = i + 1;
                    let d = stride_for(l);
                    assert_eq!(mask.count(), (len - l + 1).div_ceil(d));
                    if i > 0 {
                        assert!(mask.count() <= masks[i - 1].count());
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_examples() {
        let p = SchedulePolicy::new(ScheduleKind::ExclusiveRotating, 2, 6).unwrap();
        assert_eq!(p.subset_index(1, 0), 2);
        assert_eq!(p.subset_index(2, 0), 1);
        assert_eq!(p.subset_index(1, 1), 1);
        assert_eq!(p.subset_index(2, 1), 2);
        for n in 0..10 {
            let a = p.mask_for(1, n);
            let b = p.mask_for(2, n);
            assert!(a.indices().all(|i| !b.bits()[i]));
        }

        let p = SchedulePolicy::new(ScheduleKind::FullUpdate, 3, 6).unwrap();
        for k in 1..=3 {
            for n in 0..5 {
                assert_eq!(p.mask_for(k, n).count(), 6);
            }
        }

        let p = SchedulePolicy::new(ScheduleKind::SameSubsetRotating, 2, 6).unwrap();
        assert_eq!(set(p.mask_for(1, 0)), s(&[1, 3, 5]));
        assert_eq!(set(p.mask_for(2, 0)), s(&[1, 3, 5]));
        assert_eq!(set(p.mask_for(2, 1)), s(&[2, 4, 6]));
    }

    #[test]
    fn mask_for_is_pure() {
        let p = SchedulePolicy::new(ScheduleKind::UnevenRotating, 4, 16).unwrap();
        for n in 0..20 {
            for k in 1..=4 {
                assert_eq!(p.mask_for(k, n), p.mask_for(k, n));
            }
        }
    }

    #[test]
    fn debug_is_one_based() {
        let m = even_exclusive_masks(4, 2).unwrap();
        assert_eq!(format!("{:?}", m[1]), "{2, 4}");
    }
}
