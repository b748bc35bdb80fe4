//! Central finite-difference gradient checking.

/// Outcome of comparing analytic gradients against central differences.
#[derive(Debug, Clone, Copy)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub argmax_index: usize,
    pub h: f64,
}

impl GradCheckReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_error <= tol
    }
}

/// Compares `analytic` against `(f(p+h) - f(p-h)) / 2h` per coordinate.
///
/// The relative error denominator is `max(|analytic|, |numeric|, 1e-8)`, so
/// coordinates where both gradients vanish report zero error.
pub fn finite_difference_check<F>(
    mut params: Vec<f64>,
    analytic: &[f64],
    h: f64,
    mut f: F,
) -> GradCheckReport
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(h > 0.0, "perturbation size must be positive");
    assert_eq!(params.len(), analytic.len());
    let mut max_rel_error: f64 = 0.0;
    let mut argmax_index = 0;
    for i in 0..params.len() {
        let p0 = params[i];
        params[i] = p0 + h;
        let fp = f(&params);
        params[i] = p0 - h;
        let fm = f(&params);
        params[i] = p0;
        let numeric = (fp - fm) / (2.0 * h);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-8);
        let rel = (analytic[i] - numeric).abs() / denom;
        if rel > max_rel_error {
            max_rel_error = rel;
            argmax_index = i;
        }
    }
    GradCheckReport {
        max_rel_error,
        argmax_index,
        h,
    }
}
