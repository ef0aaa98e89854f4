use rayon::prelude::*;

use crate::csfm::CsfmOptions;
use crate::error::Result;
use crate::model::{BudgetVector, InfluenceInstance, UncertaintyKind, UncertaintySet};
use crate::robust::adversary_best_response;

#[derive(Debug, Clone)]
pub struct Candidate {
    pub name: String,
    pub y: BudgetVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub kind: UncertaintyKind,
    pub gamma: f64,
    pub candidate: String,
    pub worst_case: f64,
    pub theory_gap: f64,
    pub bracket_gap: f64,
    pub lagrangian_gap: f64,
    pub certified_gap: f64,
}

/// Worst-case influence of each candidate for every set in `sets` rescaled
/// to every `gamma`. Rows come out in `(set, gamma, candidate)` order.
pub fn evaluate_allocations(
    inst: &InfluenceInstance,
    sets: &[UncertaintySet],
    gammas: &[f64],
    candidates: &[Candidate],
    opts: &CsfmOptions,
) -> Result<Vec<ComparisonRow>> {
    let mut cells = Vec::new();
    for set in sets {
        for &gamma in gammas {
            let scaled = set.with_gamma(gamma)?;
            for cand in candidates {
                cells.push((scaled.clone(), cand));
            }
        }
    }
    cells
        .par_iter()
        .map(|(set, cand)| {
            let r = adversary_best_response(inst, set, cand.y.as_slice(), opts, None)?;
            Ok(ComparisonRow {
                kind: set.kind(),
                gamma: set.gamma(),
                candidate: cand.name.clone(),
                worst_case: r.value,
                theory_gap: r.certificate.theory_gap,
                bracket_gap: r.certificate.bracket_gap,
                lagrangian_gap: r.certificate.lagrangian_gap,
                certified_gap: r.certificate.certified_gap,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{influence, Edge};

    #[test]
    fn zero_gamma_evaluates_at_center() {
        let inst = InfluenceInstance::new(
            vec!["a".into(), "b".into()],
            vec!["u".into()],
            vec![Edge::from_counts(0, 0, 3.0, 5.0), Edge::from_counts(1, 0, 2.0, 2.0)],
        )
        .unwrap();
        let cands = vec![
            Candidate {
                name: "p".into(),
                y: BudgetVector::new(vec![1.0, 0.0], 1.0).unwrap(),
            },
            Candidate {
                name: "q".into(),
                y: BudgetVector::new(vec![0.25, 0.75], 1.0).unwrap(),
            },
        ];
        let sets = [
            UncertaintySet::ellipsoidal(&inst, 1.0).unwrap(),
            UncertaintySet::dnorm_full(&inst, 1.0).unwrap(),
        ];
        let rows = evaluate_allocations(&inst, &sets, &[0.0, 0.5, 1.0], &cands, &CsfmOptions::default()).unwrap();
        assert_eq!(rows.len(), 12);
        for r in rows.iter().filter(|r| r.gamma == 0.0) {
            let c = cands.iter().find(|c| c.name == r.candidate).unwrap();
            assert_eq!(r.worst_case, influence(&inst, c.y.as_slice(), &inst.x_hat()).unwrap());
        }
        for set in 0..2 {
            for c in 0..2 {
                let vals: Vec<f64> = (0..3).map(|g| rows[set * 6 + g * 2 + c].worst_case).collect();
                assert!(vals[0] >= vals[1] - 1e-9 && vals[1] >= vals[2] - 1e-9);
            }
        }
    }
}
