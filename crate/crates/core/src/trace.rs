//! Per-step run traces for convergence analysis, exported as CSV.

use std::io::Write;

use serde::Serialize;

/// One annealed-sampler step.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VcaTraceRow {
    pub step: usize,
    pub temperature: f64,
    pub free_energy: f64,
    pub mean_energy: f64,
    pub entropy: f64,
    /// Lowest sampled energy seen up to and including this step. Not part of
    /// the CSV schema; used by benchmark summaries.
    pub best_energy: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VcaTrace {
    rows: Vec<VcaTraceRow>,
}

impl VcaTrace {
    pub fn new() -> Self {
        VcaTrace::default()
    }

    pub fn push(&mut self, row: VcaTraceRow) {
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[VcaTraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,temperature,free_energy,mean_energy,entropy")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.step, r.temperature, r.free_energy, r.mean_energy, r.entropy
            )?;
        }
        Ok(())
    }
}

/// One simulated-annealing step.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SaTraceRow {
    pub step: usize,
    pub temperature: f64,
    pub current_energy: f64,
    pub best_energy: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SaTrace {
    rows: Vec<SaTraceRow>,
}

impl SaTrace {
    pub fn new() -> Self {
        SaTrace::default()
    }

    pub fn push(&mut self, row: SaTraceRow) {
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[SaTraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,temperature,current_energy,best_energy")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{}",
                r.step, r.temperature, r.current_energy, r.best_energy
            )?;
        }
        Ok(())
    }
}
