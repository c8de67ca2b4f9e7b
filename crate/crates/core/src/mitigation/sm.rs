use super::{MethodBreakdown, MitigatedEstimate};

/// Below this `|test_ideal|` the noise factor is not estimated.
pub const SM_DEAD_ZONE: f64 = 0.05;
/// Noise factors at or above this are refused.
pub const SM_P_MAX: f64 = 0.95;

/// `p = 1 − test_raw/test_ideal`, `mitigated = target_raw / (1 − p)`.
pub fn sm_mitigate(target_raw: f64, test_raw: f64, test_ideal: f64) -> MitigatedEstimate {
    sm_mitigate_with_errors((target_raw, 0.0), (test_raw, 0.0), test_ideal)
}

/// As [`sm_mitigate`], with standard errors `(value, σ)` on both
/// measurements propagated to first order.
pub fn sm_mitigate_with_errors(target: (f64, f64), test: (f64, f64), test_ideal: f64) -> MitigatedEstimate {
    let (t, st) = target;
    let (r, sr) = test;
    let mut est = MitigatedEstimate::unmitigated(t, st);
    est.breakdown = MethodBreakdown {
        sm_test_raw: Some(r),
        sm_test_ideal: Some(test_ideal),
        ..MethodBreakdown::default()
    };
    if test_ideal.abs() < SM_DEAD_ZONE {
        est.flags.push("sm_dead_zone".into());
        return est;
    }
    let p = 1.0 - r / test_ideal;
    est.breakdown.sm_p = Some(p);
    if p >= SM_P_MAX {
        est.flags.push("sm_snr_exhausted".into());
        return est;
    }
    let scale = test_ideal / r;
    est.mitigated = t * scale;
    est.std_error = ((scale * st).powi(2) + (t * scale / r * sr).powi(2)).sqrt();
    est
}
