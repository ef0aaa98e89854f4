//! Greedy linear oracle over the base polytope of a discretized submodular function.

use rayon::prelude::*;

use super::discretization::Discretization;
use super::oracle::{GreedyChain, SubmodularObjective};
use crate::error::{Error, Result};

/// Concatenated per-coordinate nonincreasing vectors `rho_i` of length `k_i - 1`,
/// stored in the flat layout of [`Discretization::offset`].
#[derive(Debug, Clone, PartialEq)]
pub struct RhoProfile {
    values: Vec<f64>,
    offsets: Vec<usize>,
}

impl RhoProfile {
    pub fn zeros(disc: &Discretization) -> Self {
        RhoProfile {
            values: vec![0.0; disc.num_entries()],
            offsets: disc.offsets().to_vec(),
        }
    }

    /// Wraps flat values; fails if any coordinate is not nonincreasing.
    pub fn new(disc: &Discretization, values: Vec<f64>) -> Result<Self> {
        if values.len() != disc.num_entries() {
            return Err(Error::Dimension {
                what: "rho entries",
                expected: disc.num_entries(),
                got: values.len(),
            });
        }
        let rho = RhoProfile {
            values,
            offsets: disc.offsets().to_vec(),
        };
        rho.check_monotone()?;
        Ok(rho)
    }

    pub(crate) fn from_parts_unchecked(values: Vec<f64>, offsets: Vec<usize>) -> Self {
        RhoProfile { values, offsets }
    }

    /// Indicator profile of a lattice point: `rho_i(j) = 1` for `j <= x_i`.
    pub fn indicator(disc: &Discretization, x: &[usize]) -> Self {
        let mut rho = Self::zeros(disc);
        for (i, &xi) in x.iter().enumerate() {
            let off = disc.offset(i);
            for j in 1..=xi {
                rho.values[off + j - 1] = 1.0;
            }
        }
        rho
    }

    pub fn dim(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn coord(&self, i: usize) -> &[f64] {
        &self.values[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_monotone(&self) -> Result<()> {
        for i in 0..self.dim() {
            let c = self.coord(i);
            for (j, w) in c.windows(2).enumerate() {
                if !(w[0] >= w[1]) {
                    return Err(Error::NonMonotoneRho { coord: i, level: j + 2 });
                }
            }
            if let Some(j) = c.iter().position(|v| v.is_nan()) {
                return Err(Error::NonMonotoneRho { coord: i, level: j + 1 });
            }
        }
        Ok(())
    }

    /// All entries sorted in decreasing order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_unstable_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Marginal gains `w_{i,j} = H(x + e_i) - H(x)` along a greedy chain, in flat layout.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseVertex(pub Vec<f64>);

impl BaseVertex {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, rho: &[f64]) -> f64 {
        dot(&self.0, rho)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const PAR_SORT_MIN: usize = 1 << 15;

/// Reusable buffers for repeated greedy passes over one discretization.
pub(crate) struct GreedyWorkspace {
    coords: Vec<u32>,
    order: Vec<u32>,
    level: Vec<usize>,
}

impl GreedyWorkspace {
    pub(crate) fn new(disc: &Discretization) -> Self {
        GreedyWorkspace {
            coords: disc.entry_coords(),
            order: (0..disc.num_entries() as u32).collect(),
            level: vec![0; disc.dim()],
        }
    }

    /// Writes the greedy vertex for `rho` into `w`; `rho` must be monotone.
    pub(crate) fn vertex_into<O: SubmodularObjective>(
        &mut self,
        obj: &O,
        disc: &Discretization,
        rho: &[f64],
        w: &mut [f64],
    ) {
        let cmp = |a: &u32, b: &u32| {
            rho[*b as usize]
                .partial_cmp(&rho[*a as usize])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(b))
        };
        if self.order.len() >= PAR_SORT_MIN {
            self.order.par_sort_unstable_by(cmp);
        } else {
            self.order.sort_unstable_by(cmp);
        }

        self.level.iter_mut().for_each(|l| *l = 0);
        let mut chain = obj.chain(&disc.lower_corner());
        let mut prev = chain.value();
        for &e in &self.order {
            let i = self.coords[e as usize] as usize;
            // Entries of one coordinate are visited in level order; the gain is
            // attributed to the level actually reached.
            self.level[i] += 1;
            let j = self.level[i];
            let next = chain.advance(i, disc.level(i, j));
            w[disc.offset(i) + j - 1] = next - prev;
            prev = next;
        }
    }
}

/// Greedy vertex of the base polytope maximizing `<rho, w>`.
///
/// Entries are visited by decreasing `rho` with ties broken by (coordinate,
/// level); returns the vertex and `<rho, w>`, which equals `h(rho) - H(lo)`.
pub fn greedy_base_vertex<O: SubmodularObjective>(
    obj: &O,
    disc: &Discretization,
    rho: &RhoProfile,
) -> Result<(BaseVertex, f64)> {
    if rho.len() != disc.num_entries() {
        return Err(Error::Dimension {
            what: "rho entries",
            expected: disc.num_entries(),
            got: rho.len(),
        });
    }
    rho.check_monotone()?;
    let mut ws = GreedyWorkspace::new(disc);
    let mut w = vec![0.0; disc.num_entries()];
    ws.vertex_into(obj, disc, rho.as_slice(), &mut w);
    let lin = dot(&w, rho.as_slice());
    Ok((BaseVertex(w), lin))
}

/// `H` on the lattice: `H(A(x))`.
pub fn lattice_value<O: SubmodularObjective>(obj: &O, disc: &Discretization, x: &[usize]) -> f64 {
    obj.value(&disc.map(x))
}
