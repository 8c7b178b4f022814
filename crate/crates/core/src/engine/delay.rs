/// Ring buffer of recent input samples with fractional-delay reads.
///
/// The write index points at the newest sample. A read at delay `d` samples
/// linearly interpolates between the two stored samples bracketing `d`.
#[derive(Debug, Clone)]
pub struct DelayLine {
    buf: Vec<f64>,
    widx: usize,
}

impl DelayLine {
    /// Capacity sized so that any delay up to `1/fc_min` seconds is readable,
    /// with one extra slot for the interpolation neighbor.
    pub fn for_fc_min(fs: f64, fc_min: f64) -> DelayLine {
        DelayLine::with_capacity((fs / fc_min).ceil() as usize + 2)
    }

    pub fn with_capacity(capacity: usize) -> DelayLine {
        assert!(capacity >= 2, "delay line needs at least two slots");
        DelayLine {
            buf: vec![0.0; capacity],
            widx: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.buf.len()
    }

    /// Store the newest sample.
    pub fn push(&mut self, x: f64) {
        self.widx = (self.widx + 1) % self.buf.len();
        self.buf[self.widx] = x;
    }

    /// Read `d` samples behind the newest sample; `d = 0` returns the newest
    /// sample itself. Requires `d <= capacity - 2` so both interpolation
    /// neighbors are live.
    pub fn read_frac(&self, d: f64) -> f64 {
        debug_assert!(d >= 0.0 && d <= (self.buf.len() - 2) as f64);
        let i0 = d as usize;
        let frac = d - i0 as f64;
        let cap = self.buf.len();
        let s0 = self.buf[(self.widx + cap - i0) % cap];
        let s1 = self.buf[(self.widx + cap - i0 - 1) % cap];
        (1.0 - frac) * s0 + frac * s1
    }
}
