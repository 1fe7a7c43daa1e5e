//! Small numeric helpers shared by the norm computations.

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// `(Σ |x|^q)^(1/q)` for `q > 0`, with compensated summation.
pub fn lp_norm(values: &[f64], q: f64) -> f64 {
    if q == 1.0 {
        return compensated_sum(values.iter().map(|v| v.abs()));
    }
    if q == 2.0 {
        return compensated_sum(values.iter().map(|v| v * v)).sqrt();
    }
    compensated_sum(values.iter().map(|v| v.abs().powf(q))).powf(1.0 / q)
}
