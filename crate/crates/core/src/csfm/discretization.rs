use crate::error::{param, Result};

/// Per-coordinate uniform grids `A_i : {0, .., k_i - 1} -> [lo_i, hi_i]`.
///
/// Consecutive levels differ by at most `delta`. A degenerate coordinate
/// (`lo_i == hi_i`) has a single effective level and contributes no entries
/// to the relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    delta: f64,
    levels: Vec<Vec<f64>>,
    offsets: Vec<usize>,
}

impl Discretization {
    pub fn uniform(lo: &[f64], hi: &[f64], delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(param("delta", format!("must be finite and > 0, got {delta}")));
        }
        if lo.len() != hi.len() {
            return Err(crate::Error::Dimension {
                what: "box upper bounds",
                expected: lo.len(),
                got: hi.len(),
            });
        }
        let mut levels = Vec::with_capacity(lo.len());
        for (i, (&l, &h)) in lo.iter().zip(hi).enumerate() {
            if !(l <= h) || !l.is_finite() || !h.is_finite() {
                return Err(param("box", format!("coordinate {i}: invalid interval [{l}, {h}]")));
            }
            if l == h {
                levels.push(vec![l]);
                continue;
            }
            let k = ((h - l) / delta).ceil() as usize + 1;
            let k = k.max(2);
            let step = (h - l) / (k - 1) as f64;
            let mut grid: Vec<f64> = (0..k - 1).map(|j| l + j as f64 * step).collect();
            grid.push(h);
            levels.push(grid);
        }
        Ok(Self::from_levels(delta, levels))
    }

    pub(crate) fn from_levels(delta: f64, levels: Vec<Vec<f64>>) -> Self {
        let mut offsets = Vec::with_capacity(levels.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for l in &levels {
            acc += l.len() - 1;
            offsets.push(acc);
        }
        Discretization { delta, levels, offsets }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Effective number of levels `k_i`.
    pub fn num_levels(&self, i: usize) -> usize {
        self.levels[i].len()
    }

    pub fn levels(&self, i: usize) -> &[f64] {
        &self.levels[i]
    }

    #[inline]
    pub fn level(&self, i: usize, j: usize) -> f64 {
        self.levels[i][j]
    }

    /// Total number of relaxation entries, `sum_i (k_i - 1)`.
    pub fn num_entries(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Start of coordinate `i` in flat (coordinate, level) layout; level `j >= 1`
    /// lives at `offset(i) + j - 1`.
    #[inline]
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Maps a lattice point to the continuous box.
    pub fn map(&self, x: &[usize]) -> Vec<f64> {
        x.iter().enumerate().map(|(i, &j)| self.levels[i][j]).collect()
    }

    pub fn lower_corner(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l[0]).collect()
    }

    pub fn top(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len() - 1).collect()
    }

    /// Coordinate owning each flat entry.
    pub(crate) fn entry_coords(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.num_entries());
        for i in 0..self.dim() {
            out.extend(std::iter::repeat_n(i as u32, self.num_levels(i) - 1));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_division() {
        let d = Discretization::uniform(&[0.0], &[1.0], 0.5).unwrap();
        assert_eq!(d.levels(0), &[0.0, 0.5, 1.0]);
        assert_eq!(d.num_entries(), 2);
    }

    #[test]
    fn inexact_division() {
        let d = Discretization::uniform(&[0.2], &[1.0], 0.3).unwrap();
        assert_eq!(d.num_levels(0), 4);
        let l = d.levels(0);
        assert_eq!(l[0], 0.2);
        assert_eq!(l[3], 1.0);
        for w in l.windows(2) {
            assert!(w[1] > w[0]);
            assert!(w[1] - w[0] <= 0.3);
            assert!((w[1] - w[0] - 0.8 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_coordinate() {
        let d = Discretization::uniform(&[0.7, 0.0], &[0.7, 1.0], 0.5).unwrap();
        assert_eq!(d.levels(0), &[0.7]);
        assert_eq!(d.num_entries(), 2);
        assert_eq!(d.offset(1), 0);
        assert_eq!(d.map(&[0, 2]), vec![0.7, 1.0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Discretization::uniform(&[0.0], &[1.0], 0.0).is_err());
        assert!(Discretization::uniform(&[0.0], &[1.0], -1.0).is_err());
        assert!(Discretization::uniform(&[1.0], &[0.0], 0.1).is_err());
    }
}
