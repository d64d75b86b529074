//! Periodic spectral discretization of the box [-L, L)^n.
//!
//! Everything downstream (functionals, solvers, time stepping, spectra) sits
//! on top of this module: grids and wavenumber tables, unnormalized forward /
//! normalized inverse FFTs, rectangle-rule quadrature and spectral
//! derivatives. The box is a truncation of R^n; users are expected to choose
//! L large enough that fields decay below ~1e-10 at the seam (check with
//! [`boundary_sup`]).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// Transform direction for [`spectral_transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Periodic computational box: dimension, resolution and wavenumber table.
///
/// The box is [-L, L) per axis with `points` samples per axis, so the grid
/// spacing is 2L/points and the wavenumbers are k_m = pi m / L with integer
/// frequencies m in FFT order (0, 1, ..., N/2-1, -N/2, ..., -1); the Nyquist
/// frequency sits on the negative side.
#[derive(Debug, Clone)]
pub struct GridSpec {
    n: usize,
    points: usize,
    half_width: f64,
    spacing: f64,
    wavenumbers: Vec<f64>,
    coords: Vec<f64>,
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.points == other.points && self.half_width == other.half_width
    }
}

impl GridSpec {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Per-axis wavenumber table in FFT ordering.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Per-axis sample coordinates -L + j h.
    pub fn axis_coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn total_points(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    /// Quadrature weight of one sample, spacing^n.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.n as i32)
    }

    /// Decompose a flat row-major index into per-axis indices.
    /// Only the first `n` entries are meaningful.
    #[inline]
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rest = flat;
        for a in (0..self.n).rev() {
            idx[a] = rest % self.points;
            rest /= self.points;
        }
        idx
    }

    /// Coordinates of the sample at a flat index.
    #[inline]
    pub fn coord(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for a in 0..self.n {
            x[a] = self.coords[idx[a]];
        }
        x
    }

    /// |x|^2 of the sample at a flat index.
    #[inline]
    pub fn radius_sq(&self, flat: usize) -> f64 {
        let x = self.coord(flat);
        x[..self.n].iter().map(|c| c * c).sum()
    }

    /// |k|^2 of the mode at a flat index.
    #[inline]
    pub fn k_sq(&self, flat: usize) -> f64 {
        let idx = self.unravel(flat);
        let mut s = 0.0;
        for a in 0..self.n {
            let k = self.wavenumbers[idx[a]];
            s += k * k;
        }
        s
    }
}

/// Build a grid. `points` must be a power of two >= 16, `n` in 1..=3,
/// `half_width` positive.
pub fn make_grid(n: usize, points: usize, half_width: f64) -> Result<GridSpec> {
    if !(1..=3).contains(&n) {
        return Err(Error::DimensionOutOfRange(n));
    }
    if points < 16 || !points.is_power_of_two() {
        return Err(Error::BadPointCount(points));
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::BadHalfWidth(half_width));
    }
    let spacing = 2.0 * half_width / points as f64;
    let base = std::f64::consts::PI / half_width;
    let wavenumbers = (0..points)
        .map(|j| {
            let m = if j < points / 2 {
                j as i64
            } else {
                j as i64 - points as i64
            };
            base * m as f64
        })
        .collect();
    let coords = (0..points)
        .map(|j| -half_width + j as f64 * spacing)
        .collect();
    Ok(GridSpec {
        n,
        points,
        half_width,
        spacing,
        wavenumbers,
        coords,
    })
}

/// Complex-valued grid function: row-major samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl Field {
    /// Wrap samples, validating length and finiteness.
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: grid.total_points(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let len = grid.total_points();
        Field {
            grid,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Sample a complex-valued function of the coordinates.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Self {
        let n = grid.n();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.total_points()];
        values
            .par_iter_mut()
            .enumerate()
            .for_each(|(flat, v)| {
                let x = grid.coord(flat);
                *v = f(&x[..n]);
            });
        Field { grid, values }
    }

    /// Sample a real-valued function of the coordinates.
    pub fn from_real_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// True when every sample has exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// L2 norm with the quadrature weight, (spacing^n sum |f|^2)^(1/2).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume()
            * deterministic_sum(&self.values, |v| v.norm_sqr()))
        .sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        self.values.par_iter_mut().for_each(|v| *v *= c);
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// self += c * other (grids must match).
    pub fn axpy(&mut self, c: Complex64, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        self.values
            .par_iter_mut()
            .zip(other.values.par_iter())
            .for_each(|(a, b)| *a += c * b);
        Ok(())
    }
}

pub(crate) fn same_grid<'a>(a: &'a Field, b: &Field) -> Result<&'a GridSpec> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(a.grid())
}

/// Chunked sum with a fixed reduction order, so results are reproducible
/// run to run even when evaluated in parallel.
pub(crate) fn deterministic_sum<T: Sync>(items: &[T], f: impl Fn(&T) -> f64 + Sync) -> f64 {
    const CHUNK: usize = 4096;
    if items.len() <= CHUNK {
        return items.iter().map(&f).sum();
    }
    let partials: Vec<f64> = items
        .par_chunks(CHUNK)
        .map(|chunk| chunk.iter().map(&f).sum::<f64>())
        .collect();
    partials.iter().sum()
}

pub(crate) fn deterministic_sum_complex<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> Complex64 + Sync,
) -> Complex64 {
    const CHUNK: usize = 4096;
    if items.len() <= CHUNK {
        return items.iter().map(&f).sum();
    }
    let partials: Vec<Complex64> = items
        .par_chunks(CHUNK)
        .map(|chunk| chunk.iter().map(&f).sum::<Complex64>())
        .collect();
    partials.iter().sum()
}

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (len, dir == FftDirection::Forward);
    let mut map = cache.lock().unwrap();
    map.entry(key)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            planner.plan_fft(len, dir)
        })
        .clone()
}

/// In-place unnormalized n-dimensional FFT over row-major data.
/// The inverse pass is also unnormalized; callers divide by points^n.
pub(crate) fn fft_nd_unnormalized(
    values: &mut [Complex64],
    n: usize,
    points: usize,
    dir: FftDirection,
) {
    let total = values.len();
    debug_assert_eq!(total, points.pow(n as u32));
    let fft = plan(points, dir);
    for axis in 0..n {
        let stride = points.pow((n - 1 - axis) as u32);
        if stride == 1 {
            values
                .par_chunks_exact_mut(points)
                .for_each_init(
                    || vec![Complex64::default(); fft.get_inplace_scratch_len()],
                    |scratch, line| fft.process_with_scratch(line, scratch),
                );
        } else {
            let lines = total / points;
            let block = stride * points;
            // Gather strided lines into scratch, transform, scatter back.
            // Lines are disjoint, so the parallel pass is deterministic.
            let ptr = SendPtr(values.as_mut_ptr());
            (0..lines).into_par_iter().for_each_init(
                || {
                    (
                        vec![Complex64::default(); points],
                        vec![Complex64::default(); fft.get_inplace_scratch_len()],
                    )
                },
                |(line, scratch), li| {
                    let base = (li / stride) * block + (li % stride);
                    let p = ptr;
                    unsafe {
                        for j in 0..points {
                            line[j] = *p.0.add(base + j * stride);
                        }
                    }
                    fft.process_with_scratch(line, scratch);
                    unsafe {
                        for j in 0..points {
                            *p.0.add(base + j * stride) = line[j];
                        }
                    }
                },
            );
        }
    }
}

#[derive(Clone, Copy)]
struct SendPtr(*mut Complex64);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

/// Discrete Fourier transform of a field. Forward is the plain unnormalized
/// DFT; inverse carries the 1/points^n factor so that inverse(forward(f)) = f.
pub fn spectral_transform(f: &Field, direction: Direction) -> Field {
    let mut out = f.clone();
    spectral_transform_inplace(&mut out, direction);
    out
}

pub(crate) fn spectral_transform_inplace(f: &mut Field, direction: Direction) {
    let n = f.grid.n();
    let points = f.grid.points_per_axis();
    match direction {
        Direction::Forward => {
            fft_nd_unnormalized(&mut f.values, n, points, FftDirection::Forward)
        }
        Direction::Inverse => {
            fft_nd_unnormalized(&mut f.values, n, points, FftDirection::Inverse);
            let scale = 1.0 / f.grid.total_points() as f64;
            f.values.par_iter_mut().for_each(|v| *v *= scale);
        }
    }
}

/// Rectangle-rule integral spacing^n * sum of samples. Spectrally accurate
/// for smooth periodic data.
pub fn integrate(f: &Field) -> Complex64 {
    f.grid.cell_volume() * deterministic_sum_complex(&f.values, |v| *v)
}

/// Integral of |f|^2.
pub fn norm_sq(f: &Field) -> f64 {
    f.grid.cell_volume() * deterministic_sum(&f.values, |v| v.norm_sqr())
}

/// Integral of |grad f|^2, evaluated as spacing^n / points^n * sum |k|^2 |fhat|^2.
pub fn grad_norm_sq(f: &Field) -> f64 {
    let hat = spectral_transform(f, Direction::Forward);
    let grid = &hat.grid;
    let weight = grid.cell_volume() / grid.total_points() as f64;
    weight
        * deterministic_sum(
            &hat.values
                .iter()
                .enumerate()
                .map(|(i, v)| grid.k_sq(i) * v.norm_sqr())
                .collect::<Vec<_>>(),
            |x| *x,
        )
}

/// Spectral Laplacian (multiplier -|k|^2, Nyquist included).
pub fn laplacian(f: &Field) -> Field {
    let mut hat = spectral_transform(f, Direction::Forward);
    let grid = hat.grid.clone();
    hat.values
        .par_iter_mut()
        .enumerate()
        .for_each(|(i, v)| *v *= -grid.k_sq(i));
    spectral_transform_inplace(&mut hat, Direction::Inverse);
    hat
}

/// Spectral partial derivative along one axis (multiplier i k). The Nyquist
/// mode is zeroed, keeping derivatives of real fields real.
pub fn partial_derivative(f: &Field, axis: usize) -> Field {
    assert!(axis < f.grid.n(), "axis out of range");
    let mut hat = spectral_transform(f, Direction::Forward);
    let grid = hat.grid.clone();
    let points = grid.points_per_axis();
    hat.values.par_iter_mut().enumerate().for_each(|(i, v)| {
        let idx = grid.unravel(i);
        let j = idx[axis];
        if j == points / 2 {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= Complex64::new(0.0, grid.wavenumbers()[j]);
        }
    });
    spectral_transform_inplace(&mut hat, Direction::Inverse);
    hat
}

/// All n spectral partial derivatives.
pub fn gradient(f: &Field) -> Vec<Field> {
    (0..f.grid.n()).map(|a| partial_derivative(f, a)).collect()
}

/// L2 distance between two fields on the same grid.
pub fn l2_distance(a: &Field, b: &Field) -> f64 {
    assert_eq!(a.grid(), b.grid(), "l2_distance needs matching grids");
    let diffs: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm_sqr())
        .collect();
    (a.grid().cell_volume() * deterministic_sum(&diffs, |d| *d)).sqrt()
}

/// Largest |f| over the -L faces of the box; the decay sentinel for the
/// periodic truncation of R^n.
pub fn boundary_sup(f: &Field) -> f64 {
    let grid = f.grid();
    let n = grid.n();
    let mut sup: f64 = 0.0;
    for (flat, v) in f.values().iter().enumerate() {
        let idx = grid.unravel(flat);
        if (0..n).any(|a| idx[a] == 0) {
            sup = sup.max(v.norm());
        }
    }
    sup
}

/// Evaluate the periodic spectral interpolant of `f` at the scaled points
/// scale * x_j. Points that land outside the principal box are set to zero;
/// this is the right extension for fields that decay below the boundary
/// threshold, where the wrapped interpolant would otherwise alias the peak
/// back in.
pub fn sample_scaled(f: &Field, scale: f64) -> Field {
    assert!(scale > 0.0 && scale.is_finite());
    let grid = f.grid().clone();
    let points = grid.points_per_axis();
    let half_width = grid.half_width();

    // Per-axis evaluation matrix E[j][m] = exp(i k_m (scale x_j + L)) / N,
    // with rows for out-of-box targets zeroed.
    let mut eval = vec![Complex64::new(0.0, 0.0); points * points];
    for j in 0..points {
        let y = scale * grid.axis_coords()[j];
        if y.abs() > half_width {
            continue;
        }
        for m in 0..points {
            let phase = grid.wavenumbers()[m] * (y + half_width);
            eval[j * points + m] = Complex64::from_polar(1.0 / points as f64, phase);
        }
    }

    let n = grid.n();
    let mut data = f.values().to_vec();
    fft_nd_unnormalized(&mut data, n, points, FftDirection::Forward);
    // Apply E along each axis in turn (the chirp evaluation is separable).
    for axis in 0..n {
        let stride = points.pow((n - 1 - axis) as u32);
        let block = stride * points;
        let lines = data.len() / points;
        let src = data.clone();
        let ptr = SendPtr(data.as_mut_ptr());
        let eval = &eval;
        let src = &src;
        (0..lines).into_par_iter().for_each(move |li| {
            let p = ptr;
            let base = (li / stride) * block + (li % stride);
            for j in 0..points {
                let mut acc = Complex64::new(0.0, 0.0);
                let row = &eval[j * points..(j + 1) * points];
                for m in 0..points {
                    acc += row[m] * src[base + m * stride];
                }
                unsafe {
                    *p.0.add(base + j * stride) = acc;
                }
            }
        });
    }
    Field { grid, values: data }
}

/// Translate a field by `offset` (g(x) = f(x + offset)) through the spectral
/// phase shift; exact for band-limited data.
pub fn translate(f: &Field, offset: &[f64]) -> Field {
    let grid = f.grid().clone();
    assert_eq!(offset.len(), grid.n());
    let mut hat = spectral_transform(f, Direction::Forward);
    let g = grid.clone();
    hat.values.par_iter_mut().enumerate().for_each(|(i, v)| {
        let idx = g.unravel(i);
        let mut phase = 0.0;
        for a in 0..g.n() {
            phase += g.wavenumbers()[idx[a]] * offset[a];
        }
        *v *= Complex64::from_polar(1.0, phase);
    });
    spectral_transform_inplace(&mut hat, Direction::Inverse);
    hat
}
