use std::io::Write;
use std::path::Path;

use super::settings::SolverSettings;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{save_snapshot, Field};

/// Time-ordered snapshots, possibly on per-time grids.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    times: Vec<T>,
    fields: Vec<Field<T>>,
    pub settings: SolverSettings<T>,
    /// `sup_k |‖u(t_k)‖₂ − ‖u(t_0)‖₂| / ‖u(t_0)‖₂` over every step taken.
    pub max_mass_drift: T,
    pub steps: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn new(settings: SolverSettings<T>) -> Self {
        Trajectory { times: Vec::new(), fields: Vec::new(), settings, max_mass_drift: T::zero(), steps: 0 }
    }

    /// Builds a trajectory from samples; times must be strictly increasing.
    pub fn from_samples(times: Vec<T>, fields: Vec<Field<T>>, settings: SolverSettings<T>) -> Result<Self> {
        if times.len() != fields.len() {
            return Err(Error::InsufficientSamples("times and fields differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInterval("trajectory times must be strictly increasing".into()));
        }
        Ok(Trajectory { times, fields, settings, max_mass_drift: T::zero(), steps: 0 })
    }

    pub(crate) fn push(&mut self, t: T, f: Field<T>) {
        debug_assert!(self.times.last().map_or(true, |&l| t > l));
        self.times.push(t);
        self.fields.push(f.with_time(t));
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn fields(&self) -> &[Field<T>] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn field_at(&self, t: T) -> Option<&Field<T>> {
        self.times.iter().position(|&s| s == t).map(|k| &self.fields[k])
    }

    /// Pointwise map of every snapshot.
    pub fn map_fields<F: Fn(T, &Field<T>) -> Result<Field<T>>>(&self, f: F) -> Result<Self> {
        let fields = self.times.iter().zip(&self.fields).map(|(&t, u)| f(t, u)).collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { fields, times: self.times.clone(), ..self.clone() })
    }

    /// Writes the index CSV `k,t,l2_norm,linf_norm`.
    pub fn write_index<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,t,l2_norm,linf_norm")?;
        for (k, (t, f)) in self.times.iter().zip(&self.fields).enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                k,
                t.to_f64_lossy(),
                f.l2_norm().to_f64_lossy(),
                f.linf_norm().to_f64_lossy()
            )?;
        }
        Ok(())
    }

    /// Directory of snapshots `snap_NNNNN.tdho` plus `index.csv`.
    pub fn export(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (k, f) in self.fields.iter().enumerate() {
            save_snapshot(f, &dir.join(format!("snap_{k:05}.tdho")))?;
        }
        let file = std::fs::File::create(dir.join("index.csv"))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_index(&mut w)?;
        w.flush()?;
        Ok(())
    }
}
