//! Finite decision problems comparing two robustness criteria.

/// `values[a][s]` is the payoff of action `a` in scenario `s`.
#[derive(Debug, Clone)]
pub struct PayoffTable {
    values: Vec<Vec<f64>>,
}

impl PayoffTable {
    /// Rows must be non-empty and of equal length.
    pub fn new(values: Vec<Vec<f64>>) -> Option<Self> {
        let cols = values.first()?.len();
        if cols == 0 || values.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(PayoffTable { values })
    }

    pub fn worst_case_value(&self, action: usize) -> f64 {
        self.values[action].iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `min_s f(a; s) / max_a' f(a'; s)`.
    pub fn worst_case_ratio(&self, action: usize) -> f64 {
        (0..self.values[0].len())
            .map(|s| {
                let best = self.values.iter().map(|r| r[s]).fold(f64::NEG_INFINITY, f64::max);
                self.values[action][s] / best
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Action maximizing the worst-case payoff; ties go to the lower index.
    pub fn max_min_action(&self) -> usize {
        argmax((0..self.values.len()).map(|a| self.worst_case_value(a)))
    }

    /// Action maximizing the worst-case ratio to the per-scenario optimum.
    pub fn max_ratio_action(&self) -> usize {
        argmax((0..self.values.len()).map(|a| self.worst_case_ratio(a)))
    }
}

fn argmax(it: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in it.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_disagree() {
        // f(0; .) = (1, 1), f(1; .) = (0.6, 2)
        let t = PayoffTable::new(vec![vec![1.0, 1.0], vec![0.6, 2.0]]).unwrap();
        assert_eq!(t.max_min_action(), 0);
        assert_eq!(t.worst_case_value(0), 1.0);
        assert_eq!(t.max_ratio_action(), 1);
        assert_eq!(t.worst_case_ratio(1), 0.6);
        assert_eq!(t.worst_case_value(1), 0.6);
        assert_eq!(t.worst_case_ratio(0), 0.5);
    }

    #[test]
    fn rejects_ragged() {
        assert!(PayoffTable::new(vec![vec![1.0], vec![1.0, 2.0]]).is_none());
        assert!(PayoffTable::new(vec![]).is_none());
    }
}
