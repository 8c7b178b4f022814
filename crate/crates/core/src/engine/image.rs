/// Stabilized image: a per-period-offset running average of a signal.
///
/// Slot `k` averages the signal value seen `k` samples after each strobe, so
/// components matching the current period add up coherently while everything
/// else decays toward zero. Each slot is touched once per period pass, which
/// means the slot smoother runs at the oscillator frequency, not the sample
/// rate: with a time constant of `tau_mult` periods the per-update
/// coefficient is `exp(-1/tau_mult)`.
#[derive(Debug, Clone)]
pub struct StabilizedImage {
    slots: Vec<f64>,
}

impl StabilizedImage {
    pub fn new(len: usize) -> StabilizedImage {
        StabilizedImage {
            slots: vec![0.0; len],
        }
    }

    /// Update the slot at period offset `t_prime` toward `s_now` and return
    /// the new slot value, which is the ongoing image output. Offsets beyond
    /// the buffer wrap around so the engine stays total if strobes stall.
    pub fn update(&mut self, s_now: f64, t_prime: usize, tau_mult: f64) -> f64 {
        let slot = t_prime % self.slots.len();
        let a = (-1.0 / tau_mult).exp();
        self.slots[slot] = a * self.slots[slot] + (1.0 - a) * s_now;
        self.slots[slot]
    }

    pub fn slots(&self) -> &[f64] {
        &self.slots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngExt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn zero_input_stays_zero() {
        let mut img = StabilizedImage::new(8);
        for t in 0..100 {
            assert_eq!(img.update(0.0, t % 8, 1.0), 0.0);
        }
        assert!(img.slots().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn periodic_input_converges_to_the_waveform() {
        // period 8 input replayed into matching slots: each slot sees a
        // constant and converges to it
        let wave = [0.3, 1.0, -0.5, 0.2, -1.0, 0.7, 0.0, -0.2];
        let mut img = StabilizedImage::new(8);
        for _pass in 0..60 {
            for (t, &w) in wave.iter().enumerate() {
                img.update(w, t, 1.0);
            }
        }
        for (t, &w) in wave.iter().enumerate() {
            assert!((img.slots()[t] - w).abs() < 1e-10);
        }
    }

    #[test]
    fn overrun_offsets_wrap() {
        let mut img = StabilizedImage::new(4);
        img.update(1.0, 6, 1.0);
        assert!(img.slots()[2] > 0.0);
    }

    #[test]
    fn white_noise_slot_variance_matches_first_order_filter() {
        // stationary variance of y' = a*y + (1-a)*x for unit white x is
        // (1-a)/(1+a); estimate it from one slot driven by Gaussian draws
        let mut img = StabilizedImage::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        let n = 200_000;
        for _ in 0..n {
            let x: f64 = rng.sample(StandardNormal);
            let y = img.update(x, 0, 1.0);
            acc += y;
            acc2 += y * y;
        }
        let var = acc2 / n as f64 - (acc / n as f64).powi(2);
        let a = (-1.0f64).exp();
        let expect = (1.0 - a) / (1.0 + a);
        assert!(
            (var - expect).abs() < 0.05 * expect,
            "var {var} vs expected {expect}"
        );
    }
}
