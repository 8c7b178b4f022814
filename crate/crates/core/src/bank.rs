//! A set of loop instances advanced in lockstep over one shared delay line.
//! Used to scan a frequency band with one instance per cell, or to track the
//! tones of a chord with hand-picked starting frequencies.
//!
//! Sharing the line is an optimization only: each instance reads the line at
//! its own fractional delay, so a bank of M instances is bitwise identical
//! to M independent engines given the same delay capacity.

use crate::engine::{DelayLine, EngineConfig, LoopState, TickOutput};
use crate::error::{Error, Result};
use serde::Serialize;

/// Ratio between adjacent scan cells, one equal-tempered semitone.
pub fn semitone_ratio() -> f64 {
    2f64.powf(1.0 / 12.0)
}

/// Layout of a scanning bank.
#[derive(Debug, Clone, Serialize)]
pub struct BankConfig {
    /// Lowest instance seed frequency, Hz.
    pub f_low: f64,
    /// Upper bound for instance seeds, Hz, inclusive up to rounding.
    pub f_high: f64,
    /// Ratio between adjacent seeds, must exceed 1.
    pub spacing: f64,
    /// Clamp each instance to its own cell `[fc0/sqrt(spacing),
    /// fc0*sqrt(spacing)]`.
    pub confine: bool,
    /// Per-instance settings; `fc0` is overwritten by the seed grid.
    pub template: EngineConfig,
}

impl BankConfig {
    pub fn new(f_low: f64, f_high: f64, template: EngineConfig) -> BankConfig {
        BankConfig {
            f_low,
            f_high,
            spacing: semitone_ratio(),
            confine: true,
            template,
        }
    }
}

/// Outputs of all instances for one input sample.
#[derive(Debug, Clone)]
pub struct BankTick {
    /// Zero-based index of the input sample.
    pub index: usize,
    pub outputs: Vec<TickOutput>,
}

/// The lockstep runner.
#[derive(Debug, Clone)]
pub struct Bank {
    cfgs: Vec<EngineConfig>,
    states: Vec<LoopState>,
    cells: Vec<(f64, f64)>,
    confine: bool,
    delay: DelayLine,
    capacity: usize,
    ticks: usize,
}

impl Bank {
    /// Build a scan bank with instances at `f_low * spacing^k` up to
    /// `f_high`.
    pub fn new(cfg: &BankConfig) -> Result<Bank> {
        if !(cfg.f_low < cfg.f_high) {
            return Err(Error::config(format!(
                "need f_low < f_high, got {} and {}",
                cfg.f_low, cfg.f_high
            )));
        }
        if !(cfg.spacing > 1.0) {
            return Err(Error::config("cell spacing must exceed 1"));
        }
        let mut fc0s = Vec::new();
        let mut k = 0u32;
        loop {
            let f = cfg.f_low * cfg.spacing.powi(k as i32);
            if f > cfg.f_high * (1.0 + 1e-9) {
                break;
            }
            fc0s.push(f);
            k += 1;
        }
        let half = cfg.spacing.sqrt();
        let cells: Vec<(f64, f64)> = fc0s
            .iter()
            .map(|&f| {
                (
                    (f / half).max(cfg.template.fc_min),
                    (f * half).min(cfg.template.fc_max),
                )
            })
            .collect();
        Bank::assemble(&cfg.template, &fc0s, cells, cfg.confine)
    }

    /// Build a bank with explicit starting frequencies and no cell
    /// confinement, as used for chord tracking.
    pub fn with_instances(template: &EngineConfig, fc0s: &[f64]) -> Result<Bank> {
        if fc0s.is_empty() {
            return Err(Error::config("bank needs at least one instance"));
        }
        let cells = fc0s
            .iter()
            .map(|_| (template.fc_min, template.fc_max))
            .collect();
        Bank::assemble(template, fc0s, cells, false)
    }

    fn assemble(
        template: &EngineConfig,
        fc0s: &[f64],
        cells: Vec<(f64, f64)>,
        confine: bool,
    ) -> Result<Bank> {
        let mut cfgs = Vec::with_capacity(fc0s.len());
        for &f in fc0s {
            let mut c = template.clone();
            c.fc0 = f;
            c.validate()?;
            cfgs.push(c);
        }
        let capacity = (template.fs / template.fc_min).ceil() as usize + 2;
        let states = cfgs.iter().map(|c| LoopState::new(c, capacity)).collect();
        Ok(Bank {
            cfgs,
            states,
            cells,
            confine,
            delay: DelayLine::with_capacity(capacity),
            capacity,
            ticks: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Starting frequency of each instance, Hz.
    pub fn fc0s(&self) -> Vec<f64> {
        self.cfgs.iter().map(|c| c.fc0).collect()
    }

    /// Confinement cell of each instance.
    pub fn cells(&self) -> &[(f64, f64)] {
        &self.cells
    }

    /// Shared delay-line capacity in samples, for building an equivalent
    /// stand-alone engine.
    pub fn delay_capacity(&self) -> usize {
        self.capacity
    }

    /// Advance every instance by one input sample. The line is written
    /// once; each instance then reads it at its own delay.
    pub fn tick(&mut self, x: f64) -> Result<BankTick> {
        if !x.is_finite() {
            return Err(Error::numeric(format!("non-finite input sample {x}")));
        }
        self.delay.push(x);
        let fs = self.cfgs[0].fs;
        let mut outputs = Vec::with_capacity(self.states.len());
        for i in 0..self.states.len() {
            let xd = self.delay.read_frac(self.states[i].frac_delay(fs));
            let mut out = self.states[i].process(&self.cfgs[i], x, xd);
            if self.confine {
                let (lo, hi) = self.cells[i];
                self.states[i].clamp_fc(lo, hi);
                out.fc_hz = self.states[i].fc();
            }
            outputs.push(out);
        }
        let index = self.ticks;
        self.ticks += 1;
        Ok(BankTick { index, outputs })
    }

    /// Run a whole buffer, returning one trace per instance.
    pub fn run(&mut self, xs: &[f64]) -> Result<Vec<Vec<TickOutput>>> {
        let mut per = vec![Vec::with_capacity(xs.len()); self.states.len()];
        for &x in xs {
            let t = self.tick(x)?;
            for (trace, out) in per.iter_mut().zip(t.outputs) {
                trace.push(out);
            }
        }
        Ok(per)
    }
}
