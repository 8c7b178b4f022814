/// Phase accumulator that fires one strobe per oscillator period.
///
/// The normalized phase advances by `fc/fs` per sample; a wrap past 1 marks
/// the strobe and restarts the samples-since-strobe counter that indexes the
/// stabilized image. No strobe fires at sample 0: the counter starts at 0 and
/// the first strobe comes with the first wrap.
#[derive(Debug, Clone, Default)]
pub struct Strobe {
    phase_acc: f64,
    samples_since: usize,
    times: Vec<usize>,
    n: usize,
}

impl Strobe {
    pub fn new() -> Strobe {
        Strobe::default()
    }

    /// Advance one sample at oscillator frequency `fc`; true on a phase wrap.
    pub fn step(&mut self, fc: f64, fs: f64) -> bool {
        self.phase_acc += fc / fs;
        let fired = self.phase_acc >= 1.0;
        if fired {
            self.phase_acc -= 1.0;
            self.samples_since = 0;
            self.times.push(self.n);
        } else {
            self.samples_since += 1;
        }
        self.n += 1;
        fired
    }

    /// Offset into the current period, in samples.
    pub fn samples_since(&self) -> usize {
        self.samples_since
    }

    /// Sample indices of all strobes so far, strictly increasing.
    pub fn times(&self) -> &[usize] {
        &self.times
    }

    pub fn phase(&self) -> f64 {
        self.phase_acc
    }
}
