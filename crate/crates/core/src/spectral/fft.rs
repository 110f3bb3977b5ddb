//! Unitary Fourier transform on uniform grids.
//!
//! Convention: `f̂(ξ) = (2π)^{-n/2} ∫ e^{-ix·ξ} f(x) dx`, discretised on the grid `x_j = x_min + j dx`
//! with the centred dual grid `ξ_m = -N/2·dξ + m dξ`, `dξ = 2π/(N dx)`. Every phase factor from the
//! grid origins is applied, so sampled analytic functions map to samples of their transforms.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::field::Field;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// FFT plans and twiddle table for one axis length.
pub struct AxisPlan<T: Real> {
    len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    /// `e^{2πi r/N}` for `r = 0..N`.
    roots: Vec<Complex<T>>,
}

impl<T: Real> AxisPlan<T> {
    fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft(len, FftDirection::Forward);
        let inverse = planner.plan_fft(len, FftDirection::Inverse);
        let two_pi = T::lit(2.0) * T::PI();
        let mut roots: Vec<Complex<T>> = (0..len)
            .map(|r| {
                let a = two_pi * T::from_usize_lossy(r) / T::from_usize_lossy(len);
                Complex::new(a.cos(), a.sin())
            })
            .collect();
        let (one, zero) = (T::one(), T::zero());
        roots[0] = Complex::new(one, zero);
        roots[len / 4] = Complex::new(zero, one);
        roots[len / 2] = Complex::new(-one, zero);
        roots[3 * len / 4] = Complex::new(zero, -one);
        AxisPlan { len, forward, inverse, roots }
    }

    /// `e^{s·2πi·x/N}` for an integer or fractional `x`.
    fn phase(&self, x: Origin<T>, s: i32) -> Complex<T> {
        let z = match x {
            Origin::Int(k) => self.roots[k.rem_euclid(self.len as i64) as usize],
            Origin::Frac(v) => {
                let n = T::from_usize_lossy(self.len);
                let r = v - n * (v / n).floor();
                let a = T::lit(2.0) * T::PI() * r / n;
                Complex::new(a.cos(), a.sin())
            }
        };
        if s < 0 {
            z.conj()
        } else {
            z
        }
    }
}

/// Shareable, read-only transform plans for one set of axis sizes.
pub struct SpectralPlan<T: Real> {
    axes: Vec<Arc<AxisPlan<T>>>,
}

type PlanCache = Mutex<HashMap<(TypeId, usize), Box<dyn Any + Send + Sync>>>;

fn axis_plan<T: Real>(len: usize) -> Arc<AxisPlan<T>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("plan cache poisoned");
    let entry = map
        .entry((TypeId::of::<T>(), len))
        .or_insert_with(|| Box::new(Arc::new(AxisPlan::<T>::new(len))));
    entry.downcast_ref::<Arc<AxisPlan<T>>>().expect("plan type").clone()
}

impl<T: Real> SpectralPlan<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        SpectralPlan { axes: grid.sizes().iter().map(|&n| axis_plan::<T>(n)).collect() }
    }

    pub fn fourier(&self, f: &Field<T>) -> Field<T> {
        let target = f.grid().dual();
        self.apply(f, &target, -1)
    }

    pub fn inverse_fourier(&self, f: &Field<T>) -> Field<T> {
        let target = f.grid().dual();
        self.apply(f, &target, 1)
    }

    /// Forward transform onto a caller-chosen frequency grid with `dξ = 2π/(N dx)`.
    pub fn fourier_to(&self, f: &Field<T>, target: &Grid<T>) -> Result<Field<T>> {
        check_dual(f.grid(), target)?;
        Ok(self.apply(f, target, -1))
    }

    /// Inverse transform onto a caller-chosen spatial grid with `dx = 2π/(N dξ)`.
    pub fn inverse_fourier_to(&self, f: &Field<T>, target: &Grid<T>) -> Result<Field<T>> {
        check_dual(f.grid(), target)?;
        Ok(self.apply(f, target, 1))
    }

    fn apply(&self, f: &Field<T>, target: &Grid<T>, sign: i32) -> Field<T> {
        let src = f.grid();
        assert_eq!(src.sizes().len(), self.axes.len());
        let mut data = f.values().to_vec();
        let root_two_pi = (T::lit(2.0) * T::PI()).sqrt();
        let mut line = Vec::new();
        let mut scratch = Vec::new();
        for (a, plan) in self.axes.iter().enumerate() {
            let n = plan.len;
            let stride = src.stride(a);
            let o_in = Origin::of(src, a);
            let o_out = Origin::of(target, a);
            let scale = src.dx()[a] / root_two_pi;
            let pre: Vec<Complex<T>> = (0..n).map(|i| plan.phase(o_out.times(i), sign)).collect();
            let post: Vec<Complex<T>> =
                (0..n).map(|p| plan.phase(o_in.times_shifted(o_out, p), sign) * scale).collect();
            let fft = if sign < 0 { &plan.forward } else { &plan.inverse };
            scratch.resize(fft.get_inplace_scratch_len(), Complex::new(T::zero(), T::zero()));
            line.resize(n, Complex::new(T::zero(), T::zero()));
            let outer = data.len() / (n * stride);
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    for i in 0..n {
                        line[i] = data[base + i * stride] * pre[i];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for p in 0..n {
                        data[base + p * stride] = line[p] * post[p];
                    }
                }
            }
        }
        Field::from_parts(target.clone(), data, f.time())
    }
}

fn check_dual<T: Real>(src: &Grid<T>, target: &Grid<T>) -> Result<()> {
    if src.sizes() != target.sizes() {
        return Err(Error::GridMismatch("transform target sizes differ".into()));
    }
    let two_pi = T::lit(2.0) * T::PI();
    for a in 0..src.dim() {
        let prod = src.dx()[a] * target.dx()[a] * T::from_usize_lossy(src.sizes()[a]);
        if (prod - two_pi).abs() > T::lit(1e-10) * two_pi {
            return Err(Error::GridMismatch(format!("axis {a}: dx·dξ·N = {prod}, expected 2π")));
        }
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Origin<T> {
    Int(i64),
    Frac(T),
}

impl<T: Real> Origin<T> {
    fn of(g: &Grid<T>, axis: usize) -> Self {
        let o = g.origin_index(axis);
        let r = o.round();
        if (o - r).abs() <= T::lit(1e-9) * o.abs().max(T::one()) {
            Origin::Int(r.to_i64().expect("grid origin index fits i64"))
        } else {
            Origin::Frac(o)
        }
    }

    fn times(self, i: usize) -> Self {
        match self {
            Origin::Int(k) => Origin::Int(k * i as i64),
            Origin::Frac(v) => Origin::Frac(v * T::from_usize_lossy(i)),
        }
    }

    /// `self · (other + p)`.
    fn times_shifted(self, other: Self, p: usize) -> Self {
        match (self, other) {
            (Origin::Int(a), Origin::Int(b)) => Origin::Int(a * (b + p as i64)),
            _ => Origin::Frac(self.value() * (other.value() + T::from_usize_lossy(p))),
        }
    }

    fn value(self) -> T {
        match self {
            Origin::Int(k) => T::from_i64(k).expect("i64 representable"),
            Origin::Frac(v) => v,
        }
    }
}

/// Unitary forward transform onto the centred dual grid.
pub fn fourier<T: Real>(f: &Field<T>) -> Field<T> {
    SpectralPlan::new(f.grid()).fourier(f)
}

/// Unitary inverse transform onto the centred dual grid.
pub fn inverse_fourier<T: Real>(f: &Field<T>) -> Field<T> {
    SpectralPlan::new(f.grid()).inverse_fourier(f)
}

pub fn fourier_to<T: Real>(f: &Field<T>, target: &Grid<T>) -> Result<Field<T>> {
    SpectralPlan::new(f.grid()).fourier_to(f, target)
}

pub fn inverse_fourier_to<T: Real>(f: &Field<T>, target: &Grid<T>) -> Result<Field<T>> {
    SpectralPlan::new(f.grid()).inverse_fourier_to(f, target)
}
