//! Small numeric helpers shared across modules.

/// Compensated (Neumaier) summation. Keeps long reductions accurate to a few
/// ulps independent of term count, which the tight norm-identity tolerances
/// rely on.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// True if `n` is a power of two and at least 4.
pub fn valid_point_count(n: usize) -> bool {
    n >= 4 && n.is_power_of_two()
}
