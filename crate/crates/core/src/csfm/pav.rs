//! Weighted isotonic regression onto nonincreasing sequences by pooling
//! adjacent violators.

use crate::error::{param, Result};

/// `argmin_{rho nonincreasing} sum_j r_j (rho_j - z_j)^2`.
pub fn pav_isotonic(z: &[f64], r: &[f64]) -> Result<Vec<f64>> {
    if z.len() != r.len() {
        return Err(crate::Error::Dimension {
            what: "isotonic weights",
            expected: z.len(),
            got: r.len(),
        });
    }
    if let Some(w) = r.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(param("weights", format!("must be finite and > 0, got {w}")));
    }
    let mut out = vec![0.0; z.len()];
    let mut blocks = Vec::new();
    pav_into(z.iter().copied(), r, &mut out, &mut blocks);
    Ok(out)
}

#[derive(Clone, Copy)]
pub(crate) struct Block {
    mean: f64,
    weight: f64,
    len: usize,
}

/// Single left-to-right pass with a block stack; `blocks` is scratch space.
pub(crate) fn pav_into(z: impl Iterator<Item = f64>, r: &[f64], out: &mut [f64], blocks: &mut Vec<Block>) {
    blocks.clear();
    for (zj, &rj) in z.zip(r) {
        let mut cur = Block {
            mean: zj,
            weight: rj,
            len: 1,
        };
        while let Some(top) = blocks.last() {
            if top.mean >= cur.mean {
                break;
            }
            let weight = top.weight + cur.weight;
            cur = Block {
                mean: (top.mean * top.weight + cur.mean * cur.weight) / weight,
                weight,
                len: top.len + cur.len,
            };
            blocks.pop();
        }
        blocks.push(cur);
    }
    let mut pos = 0;
    for b in blocks.iter() {
        out[pos..pos + b.len].fill(b.mean);
        pos += b.len;
    }
}
