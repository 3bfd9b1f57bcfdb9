use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq)]
pub struct LineSearchOutcome {
    pub iterate: Vec<f64>,
    pub theta: f64,
    pub residual: f64,
    /// Whether some step length strictly reduced the residual.
    pub decreased: bool,
}

/// Returns `prev + theta (candidate - prev)` for the largest
/// `theta = shrink^m`, `m <= max_halvings`, whose residual is strictly below
/// `prev_residual`. Without such a `theta` the smallest step is returned with
/// `decreased == false`. Non-finite residuals count as no decrease.
pub fn backtracking_search(
    prev: &[f64],
    prev_residual: f64,
    candidate: &[f64],
    mut residual: impl FnMut(&[f64]) -> f64,
    shrink: f64,
    max_halvings: usize,
) -> LineSearchOutcome {
    let mut theta = 1.0;
    let mut iterate = Vec::with_capacity(prev.len());
    let mut value = f64::INFINITY;
    for m in 0..=max_halvings {
        if m > 0 {
            theta *= shrink;
        }
        iterate.clear();
        iterate.extend(prev.iter().zip(candidate).map(|(a, b)| a + theta * (b - a)));
        value = residual(&iterate);
        if value < prev_residual {
            return LineSearchOutcome { iterate, theta, residual: value, decreased: true };
        }
    }
    LineSearchOutcome { iterate, theta, residual: value, decreased: false }
}
