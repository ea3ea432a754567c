//! Flat storage for heterogeneous-size secondary tables.
//!
//! Rows live back to back in one allocation; a cumulative-offset array
//! gives O(1) addressing. Offsets are stored in the map's index type so
//! the hot-path metadata stays small.

use alloc::vec::Vec;

use crate::error::BuildError;
use crate::hash::IndexWord;

/// `rows + 1` cumulative offsets over one flat buffer. Row `j` occupies
/// `storage[offsets[j]..offsets[j+1]]`; empty rows are fine.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RaggedArray<T, W: IndexWord> {
    offsets: Vec<W>,
    storage: Vec<T>,
}

impl<T, W: IndexWord> RaggedArray<T, W> {
    /// Prefix-sums `row_sizes` and fills the storage with `fill`.
    ///
    /// Fails if the total would not be addressable in `W`.
    pub fn build(row_sizes: &[u64], fill: T) -> Result<RaggedArray<T, W>, BuildError>
    where
        T: Clone,
    {
        let mut offsets = Vec::with_capacity(row_sizes.len() + 1);
        let mut total: u64 = 0;
        offsets.push(W::ZERO);
        for &size in row_sizes {
            total = total
                .checked_add(size)
                .filter(|&t| t <= W::MAX.widen_u64())
                .ok_or(BuildError::TableOverflow {
                    width: W::WIDTH,
                    total_slots: total.saturating_add(size),
                })?;
            offsets.push(W::truncate_u64(total));
        }
        let mut storage = Vec::new();
        storage.resize(total as usize, fill);
        Ok(RaggedArray { offsets, storage })
    }

    /// Reassemble from parts (deserialization path). Checks the offset
    /// invariants.
    pub fn from_parts(offsets: Vec<W>, storage: Vec<T>) -> Option<RaggedArray<T, W>> {
        let first = *offsets.first()?;
        if first != W::ZERO {
            return None;
        }
        if offsets.windows(2).any(|p| p[0] > p[1]) {
            return None;
        }
        if offsets.last()?.to_usize() != storage.len() {
            return None;
        }
        Some(RaggedArray { offsets, storage })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn total_slots(&self) -> usize {
        self.storage.len()
    }

    pub fn row_size(&self, row: usize) -> Option<usize> {
        if row >= self.rows() {
            return None;
        }
        Some(self.offsets[row + 1].to_usize() - self.offsets[row].to_usize())
    }

    /// Checked element access.
    pub fn at(&self, row: usize, col: usize) -> Option<&T> {
        if col < self.row_size(row)? {
            Some(&self.storage[self.offsets[row].to_usize() + col])
        } else {
            None
        }
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> Option<&mut T> {
        if col < self.row_size(row)? {
            Some(&mut self.storage[self.offsets[row].to_usize() + col])
        } else {
            None
        }
    }

    /// Flat position of `(row, col)`; the hot path indexes the storage
    /// slice directly with this. Bounds are the caller's obligation
    /// (debug-asserted).
    #[inline]
    pub fn flat_index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.rows());
        debug_assert!(col < self.row_size(row).unwrap_or(0).max(1));
        self.offsets[row].to_usize() + col
    }

    #[inline]
    pub fn offsets(&self) -> &[W] {
        &self.offsets
    }

    #[inline]
    pub fn storage(&self) -> &[T] {
        &self.storage
    }

    pub fn storage_mut(&mut self) -> &mut [T] {
        &mut self.storage
    }
}
