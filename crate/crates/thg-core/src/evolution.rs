//! Time integration of the Cauchy problem
//!   i u_t + Lap u - u + (|u|^2/9 + 2|w|^2) u + conj(u)^2 w / 3 = 0,
//!   i sigma w_t + Lap w - mu w + (9|w|^2 + 2|u|^2) w + u^3 / 9 = 0,
//! by Strang splitting: the linear flow is an exact unitary Fourier
//! multiplier, the nonlinear flow is advanced pointwise by classical RK4
//! (the couplings conj(u)^2 w and u^3 rule out a closed-form phase rotation,
//! but the exact nonlinear flow still conserves the pointwise mass density
//! |u|^2 + 3 sigma |w|^2, so RK4 only contributes O(h^5) drift per step).
//!
//! Also here: the explicit pseudoconformal blow-up solution of the critical
//! 2d resonant system and the gauge transform u -> e^{it} u, w -> e^{3it} w
//! linking the problem to its zero-linear-coefficient form.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::functionals::DiagnosticSet;
use crate::grid::{fft_nd_unnormalized, sample_scaled, Field, GridSpec};
use crate::params::PhysParams;

/// The evolving Cauchy state: time plus the complex pair.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u: Field,
    pub w: Field,
    pub params: PhysParams,
}

impl SimState {
    pub fn new(t: f64, u: Field, w: Field, params: PhysParams) -> Result<Self> {
        if u.grid() != w.grid() {
            return Err(Error::GridMismatch);
        }
        if u.grid().n() != params.n {
            return Err(Error::WrongDimension {
                expected: params.n,
                got: u.grid().n(),
            });
        }
        Ok(SimState { t, u, w, params })
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.w.is_finite()
    }
}

/// Fixed-step integrator configuration.
#[derive(Debug, Clone)]
pub struct StepperConfig {
    pub dt: f64,
    pub t_end: f64,
    /// 2/3-rule mask applied to the nonlinear increment.
    pub dealias: bool,
    /// Absolute kinetic-energy threshold for blow-up detection.
    pub blowup_k_threshold: f64,
    /// Diagnostics are emitted every this many steps.
    pub output_stride: usize,
}

impl StepperConfig {
    /// Defaults: dealiasing on for n >= 2, off in 1d where cubic aliasing is
    /// mild at desk resolutions; threshold must be set by the caller
    /// (conventionally 1e6 x initial kinetic energy).
    pub fn new(n: usize, dt: f64, t_end: f64, blowup_k_threshold: f64) -> Self {
        StepperConfig {
            dt,
            t_end,
            dealias: n >= 2,
            blowup_k_threshold,
            output_stride: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::NonPositiveParam {
                name: "dt",
                value: self.dt,
            });
        }
        if !(self.blowup_k_threshold > 0.0) {
            return Err(Error::NonPositiveParam {
                name: "blowup_k_threshold",
                value: self.blowup_k_threshold,
            });
        }
        if self.output_stride == 0 {
            return Err(Error::NonPositiveParam {
                name: "output_stride",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Completed,
    /// Kinetic energy crossed the threshold or the state went non-finite.
    BlowupDetected { t: f64, kinetic: f64 },
}

/// Final state plus bookkeeping from [`evolve`].
#[derive(Debug)]
pub struct EvolveReport {
    pub state: SimState,
    pub outcome: Outcome,
    pub steps: usize,
    pub max_mass_drift: f64,
}

struct Propagator {
    mult_u: Vec<Complex64>,
    mult_w: Vec<Complex64>,
    mask: Option<Vec<f64>>,
    half: f64,
}

impl Propagator {
    /// Multiplier tables for one linear half step of size `h`:
    /// u-hat *= exp(-i (|k|^2 + 1) h), w-hat *= exp(-i (|k|^2 + mu) h / sigma).
    fn new(grid: &GridSpec, p: &PhysParams, h: f64, dealias: bool) -> Self {
        let total = grid.total_points();
        let mut mult_u = vec![Complex64::default(); total];
        let mut mult_w = vec![Complex64::default(); total];
        let g = grid.clone();
        let (mu, sigma) = (p.mu, p.sigma);
        mult_u
            .par_iter_mut()
            .zip(mult_w.par_iter_mut())
            .enumerate()
            .for_each(|(i, (a, b))| {
                let k2 = g.k_sq(i);
                *a = Complex64::from_polar(1.0, -(k2 + 1.0) * h);
                *b = Complex64::from_polar(1.0, -(k2 + mu) * h / sigma);
            });
        let mask = dealias.then(|| {
            let points = grid.points_per_axis();
            (0..total)
                .map(|i| {
                    let idx = grid.unravel(i);
                    let keep = (0..grid.n()).all(|a| {
                        let j = idx[a];
                        let m = if j < points / 2 {
                            j as i64
                        } else {
                            j as i64 - points as i64
                        };
                        3 * m.unsigned_abs() as usize <= points
                    });
                    if keep {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        });
        Propagator {
            mult_u,
            mult_w,
            mask,
            half: h,
        }
    }

    /// Apply the half step in place; returns the kinetic energy of the
    /// updated state, read off the spectral representation for free.
    fn linear_half(&self, state: &mut SimState) -> f64 {
        let grid = state.u.grid().clone();
        let n = grid.n();
        let points = grid.points_per_axis();
        let weight = grid.cell_volume() / grid.total_points() as f64;
        let mut kin = 0.0;
        for (field, mult) in [(&mut state.u, &self.mult_u), (&mut state.w, &self.mult_w)] {
            let vals = field.values_mut();
            fft_nd_unnormalized(vals, n, points, FftDirection::Forward);
            let partial: Vec<f64> = vals
                .par_chunks_mut(4096)
                .enumerate()
                .map(|(chunk_idx, chunk)| {
                    let base = chunk_idx * 4096;
                    let mut acc = 0.0;
                    for (off, v) in chunk.iter_mut().enumerate() {
                        *v *= mult[base + off];
                        acc += grid.k_sq(base + off) * v.norm_sqr();
                    }
                    acc
                })
                .collect();
            kin += weight * partial.iter().sum::<f64>();
            fft_nd_unnormalized(vals, n, points, FftDirection::Inverse);
            let scale = 1.0 / grid.total_points() as f64;
            vals.par_iter_mut().for_each(|v| *v *= scale);
        }
        state.t += self.half;
        kin
    }

    /// Pointwise RK4 for the nonlinear flow, increment-masked when
    /// dealiasing is on.
    fn nonlinear(&self, state: &mut SimState, h: f64) {
        let inv_sigma = 1.0 / state.params.sigma;
        let u0: Option<Vec<Complex64>> = self.mask.as_ref().map(|_| state.u.values().to_vec());
        let w0: Option<Vec<Complex64>> = self.mask.as_ref().map(|_| state.w.values().to_vec());
        {
            let (us, ws) = (state.u.values_mut(), state.w.values_mut());
            us.par_iter_mut().zip(ws.par_iter_mut()).for_each(|(u, w)| {
                let (nu, nw) = rk4_point(*u, *w, h, inv_sigma);
                *u = nu;
                *w = nw;
            });
        }
        if let (Some(mask), Some(u0), Some(w0)) = (self.mask.as_ref(), u0, w0) {
            let grid = state.u.grid().clone();
            let n = grid.n();
            let points = grid.points_per_axis();
            let scale = 1.0 / grid.total_points() as f64;
            for (field, old) in [(&mut state.u, u0), (&mut state.w, w0)] {
                let mut inc: Vec<Complex64> = field
                    .values()
                    .par_iter()
                    .zip(old.par_iter())
                    .map(|(a, b)| a - b)
                    .collect();
                fft_nd_unnormalized(&mut inc, n, points, FftDirection::Forward);
                inc.par_iter_mut()
                    .zip(mask.par_iter())
                    .for_each(|(v, m)| *v *= m * scale);
                fft_nd_unnormalized(&mut inc, n, points, FftDirection::Inverse);
                field
                    .values_mut()
                    .par_iter_mut()
                    .zip(old.par_iter())
                    .zip(inc.par_iter())
                    .for_each(|((v, o), d)| *v = o + d);
            }
        }
    }
}

#[inline]
fn nonlinear_rhs(u: Complex64, w: Complex64, inv_sigma: f64) -> (Complex64, Complex64) {
    let au = u.norm_sqr();
    let aw = w.norm_sqr();
    let i = Complex64::new(0.0, 1.0);
    let fu = i * ((au / 9.0 + 2.0 * aw) * u + u.conj() * u.conj() * w / 3.0);
    let fw = i * inv_sigma * ((9.0 * aw + 2.0 * au) * w + u * u * u / 9.0);
    (fu, fw)
}

#[inline]
fn rk4_point(u: Complex64, w: Complex64, h: f64, inv_sigma: f64) -> (Complex64, Complex64) {
    let (k1u, k1w) = nonlinear_rhs(u, w, inv_sigma);
    let (k2u, k2w) = nonlinear_rhs(u + 0.5 * h * k1u, w + 0.5 * h * k1w, inv_sigma);
    let (k3u, k3w) = nonlinear_rhs(u + 0.5 * h * k2u, w + 0.5 * h * k2w, inv_sigma);
    let (k4u, k4w) = nonlinear_rhs(u + h * k3u, w + h * k3w, inv_sigma);
    (
        u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
    )
}

/// Exact linear flow over time `h` (one half step of the splitting).
pub fn linear_halfstep(s: &SimState, h: f64) -> SimState {
    let mut out = s.clone();
    let prop = Propagator::new(s.grid(), &s.params, h, false);
    prop.linear_half(&mut out);
    out
}

/// One nonlinear RK4 step of size `h` (no dealiasing on this entry point;
/// time is not advanced, matching its role inside the splitting).
pub fn nonlinear_step(s: &SimState, h: f64) -> SimState {
    let mut out = s.clone();
    let prop = Propagator::new(s.grid(), &s.params, 0.0, false);
    prop.nonlinear(&mut out, h);
    out
}

/// One Strang step: linear(dt/2) then nonlinear(dt) then linear(dt/2).
pub fn step(s: &SimState, cfg: &StepperConfig) -> SimState {
    let mut out = s.clone();
    let prop = Propagator::new(s.grid(), &s.params, cfg.dt / 2.0, cfg.dealias);
    prop.linear_half(&mut out);
    prop.nonlinear(&mut out, cfg.dt);
    prop.linear_half(&mut out);
    out
}

/// March the state to `cfg.t_end`, emitting diagnostics every
/// `cfg.output_stride` steps, halting early with `BlowupDetected` when the
/// kinetic energy crosses the threshold or the state goes non-finite.
pub fn evolve(
    s0: SimState,
    cfg: &StepperConfig,
    mut sink: impl FnMut(&DiagnosticSet),
) -> Result<EvolveReport> {
    cfg.validate()?;
    let mut state = s0;
    let t0 = state.t;
    let n_steps = ((cfg.t_end - t0) / cfg.dt).round() as usize;
    let prop = Propagator::new(state.grid(), &state.params, cfg.dt / 2.0, cfg.dealias);

    let first = DiagnosticSet::from_complex_state(state.t, &state.u, &state.w, &state.params)?;
    let m0 = first.mass.unwrap_or(0.0);
    sink(&first);

    let mut max_drift = 0.0f64;
    let mut steps = 0usize;
    let mut outcome = Outcome::Completed;

    for step_idx in 1..=n_steps {
        prop.linear_half(&mut state);
        prop.nonlinear(&mut state, cfg.dt);
        let kinetic = prop.linear_half(&mut state);
        state.t = t0 + step_idx as f64 * cfg.dt;
        steps = step_idx;

        if !state.is_finite() {
            outcome = Outcome::BlowupDetected {
                t: state.t,
                kinetic: f64::INFINITY,
            };
            break;
        }
        if kinetic > cfg.blowup_k_threshold {
            outcome = Outcome::BlowupDetected {
                t: state.t,
                kinetic,
            };
            break;
        }
        if step_idx % cfg.output_stride == 0 {
            let diag =
                DiagnosticSet::from_complex_state(state.t, &state.u, &state.w, &state.params)?;
            if m0 > 0.0 {
                let drift = (diag.mass.unwrap_or(m0) - m0).abs() / m0;
                max_drift = max_drift.max(drift);
                if drift > 1e-6 {
                    log::warn!("mass drift {drift:.3e} at t = {}", state.t);
                }
            }
            sink(&diag);
        }
    }

    Ok(EvolveReport {
        state,
        outcome,
        steps,
        max_mass_drift: max_drift,
    })
}

/// The explicit blow-up solution of the critical resonant 2d system
/// (sigma = 3, mu = 9), in the gauge with no linear phase rotation:
///   u(x, t) = (1-t)^{-1} exp(i s (t - |x|^2/4)) P(s x),
///   w(x, t) = (1-t)^{-1} exp(3 i s (t - |x|^2/4)) Q(s x),   s = 1/(1-t),
/// where (P, Q) solves the stationary system with omega = 0. The profiles
/// are evaluated by spectral interpolation at the contracted points; compose
/// with [`gauge_transform`] to compare against states evolved under the
/// original system.
pub fn pseudoconformal_exact(
    p_prof: &Field,
    q_prof: &Field,
    p: &PhysParams,
    t: f64,
) -> Result<(Field, Field)> {
    if p.n != 2 || p_prof.grid().n() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: p.n,
        });
    }
    if p.sigma != 3.0 || p.mu != 9.0 {
        return Err(Error::RegimeViolation(
            "pseudoconformal solution needs sigma = 3, mu = 9".into(),
        ));
    }
    if t >= 1.0 {
        return Err(Error::BadTime(t));
    }
    let s = 1.0 / (1.0 - t);
    let grid = p_prof.grid().clone();
    let pe = if t == 0.0 {
        p_prof.clone()
    } else {
        sample_scaled(p_prof, s)
    };
    let qe = if t == 0.0 {
        q_prof.clone()
    } else {
        sample_scaled(q_prof, s)
    };
    let phase_at = |grid: &GridSpec, i: usize| s * (t - 0.25 * grid.radius_sq(i));
    let mut u = pe;
    let g = grid.clone();
    u.values_mut().par_iter_mut().enumerate().for_each(|(i, v)| {
        *v *= s * Complex64::from_polar(1.0, phase_at(&g, i));
    });
    let mut w = qe;
    let g = grid.clone();
    w.values_mut().par_iter_mut().enumerate().for_each(|(i, v)| {
        *v *= s * Complex64::from_polar(1.0, 3.0 * phase_at(&g, i));
    });
    Ok((u, w))
}

/// Gauge direction for [`gauge_transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    /// u -> e^{it} u, w -> e^{3it} w (to the zero-linear-coefficient system).
    Forward,
    /// The inverse phases.
    Inverse,
}

/// Multiply by the resonant phases e^{+-it}, e^{+-3it}; valid only at
/// mu = 3 sigma, where the two systems are equivalent.
pub fn gauge_transform(s: &SimState, direction: Gauge) -> Result<SimState> {
    if !s.params.at_resonance() {
        return Err(Error::RegimeViolation(
            "gauge transform needs mu = 3 sigma".into(),
        ));
    }
    let sign = match direction {
        Gauge::Forward => 1.0,
        Gauge::Inverse => -1.0,
    };
    let mut out = s.clone();
    let pu = Complex64::from_polar(1.0, sign * s.t);
    let pw = Complex64::from_polar(1.0, sign * 3.0 * s.t);
    out.u.scale(pu);
    out.w.scale(pw);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{energy, mass};
    use crate::grid::{l2_distance, make_grid, norm_sq};
    use crate::groundstate::scalar_ground_state_1d;

    fn gaussian_state(n: usize, points: usize, half_width: f64, p: PhysParams) -> SimState {
        let grid = make_grid(n, points, half_width).unwrap();
        let u = Field::from_real_fn(grid.clone(), |x| {
            0.8 * (-x.iter().map(|c| c * c).sum::<f64>()).exp()
        });
        let w = Field::from_real_fn(grid, |x| {
            0.4 * (-x.iter().map(|c| c * c).sum::<f64>() / 2.0).exp()
        });
        SimState::new(0.0, u, w, p).unwrap()
    }

    #[test]
    fn linear_halfstep_identity_and_unitarity() {
        let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
        let s = gaussian_state(1, 128, 12.0, p);
        let same = linear_halfstep(&s, 0.0);
        assert_eq!(same.u.values(), s.u.values());

        let moved = linear_halfstep(&s, 0.37);
        assert!((norm_sq(&moved.u) - norm_sq(&s.u)).abs() / norm_sq(&s.u) < 1e-12);
        assert!((norm_sq(&moved.w) - norm_sq(&s.w)).abs() / norm_sq(&s.w) < 1e-12);
    }

    #[test]
    fn linear_halfstep_plane_wave_phase() {
        let l = 8.0;
        let grid = make_grid(1, 64, l).unwrap();
        let p = PhysParams::new(1, 2.0, 5.0, 0.0).unwrap();
        let k0 = 3.0 * std::f64::consts::PI / l;
        let u = Field::from_fn(grid.clone(), |x| Complex64::from_polar(1.0, k0 * x[0]));
        let w = Field::zeros(grid);
        let s = SimState::new(0.0, u.clone(), w, p).unwrap();
        let h = 0.21;
        let moved = linear_halfstep(&s, h);
        let expect = Complex64::from_polar(1.0, -(k0 * k0 + 1.0) * h);
        for (a, b) in moved.u.values().iter().zip(u.values()) {
            assert!((a - expect * b).norm() < 1e-12);
        }
    }

    #[test]
    fn nonlinear_step_fixed_point_and_constant_phase() {
        let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
        let grid = make_grid(1, 64, 8.0).unwrap();
        let zero = SimState::new(
            0.0,
            Field::zeros(grid.clone()),
            Field::zeros(grid.clone()),
            p,
        )
        .unwrap();
        let stepped = nonlinear_step(&zero, 0.1);
        assert_eq!(stepped.u.values(), zero.u.values());

        // constant u, zero w: exact flow is the phase rotation e^{i |c|^2 h / 9}
        let c = Complex64::new(0.9, 0.3);
        let u = Field::from_fn(grid.clone(), |_| c);
        let s = SimState::new(0.0, u, Field::zeros(grid), p).unwrap();
        let h = 0.05;
        let stepped = nonlinear_step(&s, h);
        let expect = c * Complex64::from_polar(1.0, c.norm_sqr() * h / 9.0);
        for v in stepped.u.values() {
            assert!((v - expect).norm() < 1e-9, "rk4 phase error {}", (v - expect).norm());
            assert!((v.norm() - c.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn nonlinear_flow_conserves_pointwise_density() {
        // RK4 drift of |u|^2 + 3 sigma |w|^2 per step scales like h^5.
        let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
        let s = gaussian_state(1, 64, 8.0, p);
        let density = |st: &SimState| -> Vec<f64> {
            st.u.values()
                .iter()
                .zip(st.w.values())
                .map(|(a, b)| a.norm_sqr() + 9.0 * b.norm_sqr())
                .collect()
        };
        let d0 = density(&s);
        let drift = |h: f64| -> f64 {
            let stepped = nonlinear_step(&s, h);
            density(&stepped)
                .iter()
                .zip(&d0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        let (e1, e2) = (drift(0.2), drift(0.1));
        assert!(e1 / e2 > 20.0, "density drift order too low: {e1:.3e} / {e2:.3e}");
    }

    #[test]
    fn step_dt_zero_is_identity() {
        let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
        let s = gaussian_state(1, 64, 8.0, p);
        let cfg = StepperConfig {
            dt: 0.0,
            t_end: 0.0,
            dealias: false,
            blowup_k_threshold: 1e12,
            output_stride: 1,
        };
        let stepped = step(&s, &cfg);
        let err = l2_distance(&stepped.u, &s.u) + l2_distance(&stepped.w, &s.w);
        assert!(err < 1e-14);
    }

    #[test]
    fn strang_step_is_second_order() {
        let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
        let s = gaussian_state(1, 128, 10.0, p);
        let march = |dt: f64, t_end: f64| -> SimState {
            let cfg = StepperConfig {
                dt,
                t_end,
                dealias: false,
                blowup_k_threshold: 1e15,
                output_stride: 1 << 30,
            };
            let report = evolve(s.clone(), &cfg, |_| {}).unwrap();
            report.state
        };
        let reference = march(1.25e-4, 0.2);
        let coarse = march(4e-3, 0.2);
        let fine = march(2e-3, 0.2);
        let e_coarse = l2_distance(&coarse.u, &reference.u) + l2_distance(&coarse.w, &reference.w);
        let e_fine = l2_distance(&fine.u, &reference.u) + l2_distance(&fine.w, &reference.w);
        let ratio = e_coarse / e_fine;
        assert!(
            (3.0..5.5).contains(&ratio),
            "order-2 Richardson ratio {ratio}, errors {e_coarse:.3e}/{e_fine:.3e}"
        );
    }

    #[test]
    fn evolve_zero_data_completes_with_zero_diagnostics() {
        let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
        let grid = make_grid(1, 64, 8.0).unwrap();
        let s = SimState::new(
            0.0,
            Field::zeros(grid.clone()),
            Field::zeros(grid),
            p,
        )
        .unwrap();
        let cfg = StepperConfig {
            dt: 1e-2,
            t_end: 0.1,
            dealias: false,
            blowup_k_threshold: 1.0,
            output_stride: 2,
        };
        let mut rows = Vec::new();
        let report = evolve(s, &cfg, |d| rows.push(d.clone())).unwrap();
        assert_eq!(report.outcome, Outcome::Completed);
        for d in rows {
            assert_eq!(d.mass.unwrap(), 0.0);
            assert_eq!(d.energy.unwrap(), 0.0);
            assert_eq!(d.kinetic.unwrap(), 0.0);
        }
    }

    #[test]
    fn standing_wave_is_preserved() {
        // sigma = 1/3, mu = 1, omega = 0: (0, Q) is a static solution.
        let p = PhysParams::new(1, 1.0 / 3.0, 1.0, 0.0).unwrap();
        let grid = make_grid(1, 256, 16.0).unwrap();
        let q = scalar_ground_state_1d(&p, &grid).unwrap();
        let s = SimState::new(0.0, Field::zeros(grid), q.clone(), p).unwrap();
        let cfg = StepperConfig {
            dt: 1e-3,
            t_end: 1.0,
            dealias: false,
            blowup_k_threshold: 1e9,
            output_stride: 1 << 30,
        };
        let report = evolve(s, &cfg, |_| {}).unwrap();
        assert_eq!(report.outcome, Outcome::Completed);
        let dev = l2_distance(&report.state.w, &q);
        assert!(dev < 1e-6, "standing wave deviation {dev}");
        assert!(norm_sq(&report.state.u).sqrt() < 1e-8);
    }

    #[test]
    fn time_reversal_returns_initial_data() {
        let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
        let s0 = gaussian_state(1, 128, 12.0, p);
        let cfg_fwd = StepperConfig {
            dt: 1e-3,
            t_end: 0.5,
            dealias: false,
            blowup_k_threshold: 1e12,
            output_stride: 1 << 30,
        };
        let fwd = evolve(s0.clone(), &cfg_fwd, |_| {}).unwrap().state;
        // march backwards with the raw symmetric step
        let back_cfg = StepperConfig {
            dt: -1e-3,
            t_end: 0.0,
            dealias: false,
            blowup_k_threshold: 1e12,
            output_stride: 1,
        };
        let mut state = fwd;
        for _ in 0..500 {
            state = step(&state, &back_cfg);
        }
        let err = l2_distance(&state.u, &s0.u) + l2_distance(&state.w, &s0.w);
        assert!(err < 1e-7, "reversal error {err}");
    }

    #[test]
    fn gauge_transform_round_trip() {
        let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
        let mut s = gaussian_state(1, 64, 8.0, p);
        s.t = 0.0;
        let same = gauge_transform(&s, Gauge::Forward).unwrap();
        assert_eq!(same.u.values(), s.u.values());

        s.t = 0.83;
        let fwd = gauge_transform(&s, Gauge::Forward).unwrap();
        for (a, b) in fwd.u.values().iter().zip(s.u.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        let back = gauge_transform(&fwd, Gauge::Inverse).unwrap();
        let err = l2_distance(&back.u, &s.u) + l2_distance(&back.w, &s.w);
        assert!(err < 1e-13);

        let off = PhysParams::new(1, 3.0, 5.0, 0.0).unwrap();
        let bad = SimState::new(0.0, s.u.clone(), s.w.clone(), off).unwrap();
        assert!(gauge_transform(&bad, Gauge::Forward).is_err());
    }

    #[test]
    fn conservation_on_gaussian_data() {
        let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
        let s = gaussian_state(1, 256, 16.0, p);
        let m0 = mass(&s.u, &s.w, &s.params).unwrap();
        let e0 = energy(&s.u, &s.w, &s.params).unwrap();
        let cfg = StepperConfig {
            dt: 1e-3,
            t_end: 1.0,
            dealias: false,
            blowup_k_threshold: 1e12,
            output_stride: 100,
        };
        let report = evolve(s, &cfg, |_| {}).unwrap();
        let m1 = mass(&report.state.u, &report.state.w, &report.state.params).unwrap();
        let e1 = energy(&report.state.u, &report.state.w, &report.state.params).unwrap();
        assert!((m1 - m0).abs() / m0 < 1e-8, "mass drift {}", (m1 - m0).abs() / m0);
        assert!((e1 - e0).abs() / e0.abs() < 1e-6, "energy drift {}", (e1 - e0).abs() / e0.abs());
        assert!(report.max_mass_drift < 1e-8);
    }
}
