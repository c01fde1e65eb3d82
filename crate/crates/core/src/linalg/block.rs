use super::DenseMatrix;
use crate::error::{Error, Result};

/// Addressing for an `n x n` grid of `s x s` blocks inside an `ns x ns`
/// matrix. Block and in-block indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockIndex {
    pub block_size: usize,
    pub block_count: usize,
}

impl BlockIndex {
    pub fn new(block_count: usize, block_size: usize) -> Self {
        Self {
            block_size,
            block_count,
        }
    }

    pub fn dim(&self) -> usize {
        self.block_size * self.block_count
    }

    pub fn offset(&self, block: usize) -> usize {
        block * self.block_size
    }

    /// Entry position of `(r, c)` inside block `(i, j)`.
    pub fn locate(&self, i: usize, j: usize, r: usize, c: usize) -> (usize, usize) {
        debug_assert!(i < self.block_count && j < self.block_count);
        debug_assert!(r < self.block_size && c < self.block_size);
        (i * self.block_size + r, j * self.block_size + c)
    }

    /// Inverse of [`locate`](Self::locate).
    pub fn split(&self, row: usize, col: usize) -> (usize, usize, usize, usize) {
        let s = self.block_size;
        (row / s, col / s, row % s, col % s)
    }
}

/// Builds the `ns x ns` matrix whose block `(i, j)` is `provider(i, j)`.
pub fn assemble_blocks<F>(idx: BlockIndex, mut provider: F) -> Result<DenseMatrix>
where
    F: FnMut(usize, usize) -> DenseMatrix,
{
    let s = idx.block_size;
    let mut out = DenseMatrix::zeros(idx.dim(), idx.dim());
    for i in 0..idx.block_count {
        for j in 0..idx.block_count {
            let b = provider(i, j);
            if b.shape() != (s, s) {
                return Err(Error::ShapeMismatch(format!(
                    "block ({}, {}) is {}x{}, expected {s}x{s}",
                    i + 1,
                    j + 1,
                    b.rows(),
                    b.cols()
                )));
            }
            out.set_submatrix(idx.offset(i), idx.offset(j), &b);
        }
    }
    Ok(out)
}
