/// Euclidean projection onto the probability simplex `{x >= 0, sum x = 1}`.
///
/// Sort-and-threshold: with `u` sorted decreasingly, `rho` is the largest
/// index with `u_rho - (sum_{i<=rho} u_i - 1)/rho > 0`, and the projection is
/// `max(v - theta, 0)` for the corresponding threshold `theta`. O(n log n).
pub fn project_onto_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));

    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        // the condition holds on a prefix of the sorted sequence
        if ui - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    v.iter().map(|&vi| (vi - theta).max(0.0)).collect()
}
