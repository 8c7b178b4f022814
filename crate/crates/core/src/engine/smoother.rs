/// First-order lowpass with the coefficient recomputed on every step, so the
/// time constant can follow the loop period while it adapts.
#[derive(Debug, Clone, Copy, Default)]
pub struct Smoother {
    y: f64,
}

impl Smoother {
    /// Advance one update toward `x`. `tau_s` is the time constant in
    /// seconds and `rate` the update rate in Hz, giving
    /// `y' = a*y + (1-a)*x` with `a = exp(-1/(tau_s*rate))`.
    pub fn step(&mut self, x: f64, tau_s: f64, rate: f64) -> f64 {
        let a = (-1.0 / (tau_s * rate)).exp();
        self.y = a * self.y + (1.0 - a) * x;
        self.y
    }

    pub fn value(&self) -> f64 {
        self.y
    }
}
