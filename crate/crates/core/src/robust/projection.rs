use crate::error::{param, Result};
use crate::model::BudgetVector;

/// Euclidean projection onto `{y >= 0, sum y <= cap}`.
pub fn project_budget(y_raw: &[f64], cap: f64) -> Result<BudgetVector> {
    if !(cap >= 0.0) || !cap.is_finite() {
        return Err(param("cap", format!("must be finite and >= 0, got {cap}")));
    }
    if let Some(v) = y_raw.iter().find(|v| !v.is_finite()) {
        return Err(param("y", format!("entries must be finite, got {v}")));
    }
    let mut y: Vec<f64> = y_raw.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = y.iter().sum();
    if total > cap {
        let tau = simplex_threshold(&y, cap);
        for v in &mut y {
            *v = (*v - tau).max(0.0);
        }
    }
    Ok(BudgetVector::from_projection(y, cap))
}

/// Shift `tau` such that `sum max(v - tau, 0) = cap`, for `sum v > cap`.
fn simplex_threshold(v: &[f64], cap: f64) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = sorted[0] - cap;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - cap) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    tau
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_point_is_fixed() {
        assert_eq!(project_budget(&[0.3, 0.5], 2.0).unwrap().as_slice(), &[0.3, 0.5]);
    }

    #[test]
    fn scaled_down_to_cap() {
        assert_eq!(project_budget(&[2.0, 2.0], 2.0).unwrap().as_slice(), &[1.0, 1.0]);
        assert_eq!(project_budget(&[-1.0, 3.0], 2.0).unwrap().as_slice(), &[0.0, 2.0]);
    }

    #[test]
    fn zero_cap() {
        assert_eq!(project_budget(&[1.0, 2.0], 0.0).unwrap().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn rejects_nan() {
        assert!(project_budget(&[f64::NAN], 1.0).is_err());
    }
}
