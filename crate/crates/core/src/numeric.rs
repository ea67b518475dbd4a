//! Small floating-point helpers shared by the counting formulas.

/// `floor(x)` that absorbs rounding noise just below an integer, so that
/// e.g. `5.0 * 64.0 / 5.0` or `0.5 * 0.01 / 125e-6` land on the intended
/// integer. The slack is relative and far below any physical resolution.
pub(crate) fn floor_tol(x: f64) -> f64 {
    (x + 1e-9 * x.abs().max(1.0)).floor()
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
