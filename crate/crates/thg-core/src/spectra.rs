//! Linearized operators around the semitrivial 1d ground state and their
//! spectra:
//!   L1 = -d2/dx2 + kappa - 27 Q^2,
//!   L2 = -d2/dx2 + kappa -  9 Q^2,
//!   L3 = -d2/dx2 + (omega+1) - 2 Q^2,
//! in the regime omega + 1 = kappa = mu + 3 sigma omega. The shift written
//! "alpha + 3 sigma omega" in the operator display is read with alpha = mu,
//! consistent with the rest of the system.
//!
//! Discretization: Fourier collocation of -d2/dx2 (a symmetric circulant)
//! plus the diagonal potential, diagonalized densely. With Q in closed form
//! the potentials are Poschl-Teller wells m(m+1) a^2 sech^2(a x) with
//! m = 2, 1, 1/3, whose bound states -a^2 (m - j)^2 + shift serve as exact
//! oracles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{laplacian, norm_sq, partial_derivative, Field, GridSpec};
use crate::groundstate::{scalar_ground_state_1d, GroundStatePair};
use crate::params::PhysParams;

/// -d2/dx2 + shift - potential(x) on a 1d periodic grid.
#[derive(Debug, Clone)]
pub struct SchrodingerOp1D {
    grid: GridSpec,
    pub shift: f64,
    potential: Vec<f64>,
}

impl SchrodingerOp1D {
    pub fn new(grid: GridSpec, shift: f64, potential: Vec<f64>) -> Result<Self> {
        if grid.n() != 1 {
            return Err(Error::WrongDimension {
                expected: 1,
                got: grid.n(),
            });
        }
        if potential.len() != grid.total_points() {
            return Err(Error::LengthMismatch {
                got: potential.len(),
                expected: grid.total_points(),
            });
        }
        Ok(SchrodingerOp1D {
            grid,
            shift,
            potential,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Apply spectrally: -f'' + (shift - v) f.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = laplacian(f);
        out.values_mut()
            .iter_mut()
            .zip(f.values())
            .zip(&self.potential)
            .for_each(|((o, v), pot)| {
                *o = -*o + (self.shift - pot) * v;
            });
        Ok(out)
    }

    /// Dense collocation matrix: the circulant Fourier second-derivative
    /// kernel plus the diagonal part. Symmetric by construction up to one
    /// FFT's rounding.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.grid.total_points();
        // Column zero of -d2/dx2 via one spectral application to the delta.
        let mut delta = Field::zeros(self.grid.clone());
        delta.values_mut()[0] = Complex64::new(1.0, 0.0);
        let lap_col = laplacian(&delta);
        let kernel: Vec<f64> = lap_col.values().iter().map(|v| -v.re).collect();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = kernel[(n + i - j) % n];
            }
            m[(i, i)] += self.shift - self.potential[i];
        }
        m
    }
}

/// Build (L1, L2, L3) around the scalar profile Q.
pub fn build_operators(
    q: &Field,
    p: &PhysParams,
) -> Result<(SchrodingerOp1D, SchrodingerOp1D, SchrodingerOp1D)> {
    if q.grid().n() != 1 || p.n != 1 {
        return Err(Error::WrongDimension {
            expected: 1,
            got: q.grid().n().max(p.n),
        });
    }
    if !q.is_real() {
        return Err(Error::ComplexInput);
    }
    let kappa = p.kappa();
    if kappa <= 0.0 {
        return Err(Error::RegimeViolation(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    let q2: Vec<f64> = q.values().iter().map(|v| v.re * v.re).collect();
    let l1 = SchrodingerOp1D::new(
        q.grid().clone(),
        kappa,
        q2.iter().map(|s| 27.0 * s).collect(),
    )?;
    let l2 = SchrodingerOp1D::new(
        q.grid().clone(),
        kappa,
        q2.iter().map(|s| 9.0 * s).collect(),
    )?;
    let l3 = SchrodingerOp1D::new(
        q.grid().clone(),
        p.omega + 1.0,
        q2.iter().map(|s| 2.0 * s).collect(),
    )?;
    Ok((l1, l2, l3))
}

/// The `count` smallest eigenvalues with L2-normalized eigenvectors
/// (sign fixed so the largest-magnitude entry is positive).
pub fn eigenpairs(op: &SchrodingerOp1D, count: usize) -> Result<Vec<(f64, Field)>> {
    let n = op.grid.total_points();
    if count > n {
        return Err(Error::Eigensolve(format!(
            "requested {count} eigenpairs from an order-{n} operator"
        )));
    }
    let m = op.matrix();
    // symmetrize away the FFT rounding before the solve
    let m = 0.5 * (&m + m.transpose());
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let h = op.grid.spacing();
    let mut out = Vec::with_capacity(count);
    for &idx in order.iter().take(count) {
        let col: DVector<f64> = eig.eigenvectors.column(idx).into();
        let norm = (h * col.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let sign = {
            let max = col
                .iter()
                .cloned()
                .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
                .unwrap_or(1.0);
            if max < 0.0 {
                -1.0
            } else {
                1.0
            }
        };
        let values = col
            .iter()
            .map(|x| Complex64::new(sign * x / norm, 0.0))
            .collect();
        out.push((eig.eigenvalues[idx], Field::new(op.grid.clone(), values)?));
    }
    Ok(out)
}

/// Eigenvalues and negative-mode count for one operator.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorSpectrum {
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
}

fn spectrum_of(op: &SchrodingerOp1D, count: usize, tol: f64) -> Result<(OperatorSpectrum, Vec<Field>)> {
    let pairs = eigenpairs(op, count)?;
    let eigenvalues: Vec<f64> = pairs.iter().map(|(e, _)| *e).collect();
    let negative_count = eigenvalues.iter().filter(|&&e| e < -tol).count();
    let vectors = pairs.into_iter().map(|(_, v)| v).collect();
    Ok((
        OperatorSpectrum {
            eigenvalues,
            negative_count,
        },
        vectors,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StabilityVerdict {
    Stable,
    Unstable,
    OutOfScope,
}

/// Spectral facts around the semitrivial state plus d''(omega).
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub l1: OperatorSpectrum,
    pub l2: OperatorSpectrum,
    pub l3: OperatorSpectrum,
    /// sup |L1 Q'| -- Q' spans the kernel of L1.
    pub kernel_residual_l1: f64,
    /// sup |L2 Q| -- Q spans the kernel of L2.
    pub kernel_residual_l2: f64,
    pub kernel_match_l1: bool,
    pub kernel_match_l2: bool,
    pub d_second: f64,
    pub verdict: StabilityVerdict,
}

/// d''(omega) from the mass scaling of the scalar family:
/// d'(omega) = (3 sigma / 2)(omega+1)^{1 - n/2} * q0_mass gives
/// d''(omega) = (3 sigma / 2)(1 - n/2)(omega+1)^{-n/2} * q0_mass.
/// (The displayed factor (n/2 - 1) contradicts the paper's own positivity
/// conclusion at n = 1; the differentiated form is implemented.)
pub fn d_second_formula(sigma: f64, omega: f64, n: usize, q0_mass: f64) -> f64 {
    1.5 * sigma * (1.0 - n as f64 / 2.0) * (omega + 1.0).powf(-(n as f64) / 2.0) * q0_mass
}

/// Build Q, the three operators and the stability verdict in the
/// omega + 1 = kappa regime (n = 1).
pub fn stability_report(p: &PhysParams, grid: &GridSpec) -> Result<SpectralReport> {
    p.require_admissible()?;
    if p.n != 1 || grid.n() != 1 {
        return Err(Error::WrongDimension {
            expected: 1,
            got: p.n.max(grid.n()),
        });
    }
    if !p.equal_coefficients() {
        return Err(Error::RegimeViolation(
            "stability theory needs omega + 1 = mu + 3 sigma omega".into(),
        ));
    }
    let kappa = p.kappa();
    let q = scalar_ground_state_1d(p, grid)?;
    let (l1, l2, l3) = build_operators(&q, p)?;
    let tol = 1e-6 * kappa;

    let (spec1, _) = spectrum_of(&l1, 6, tol)?;
    let (spec2, vecs2) = spectrum_of(&l2, 6, tol)?;
    let (spec3, _) = spectrum_of(&l3, 6, tol)?;

    let qprime = partial_derivative(&q, 0);
    let kernel_residual_l1 = l1.apply(&qprime)?.sup_norm();
    let kernel_residual_l2 = l2.apply(&q)?.sup_norm();

    // L2's lowest mode should be the zero mode spanned by Q itself.
    let l2_zero_aligned = {
        let v = &vecs2[0];
        let qn = norm_sq(&q).sqrt();
        let overlap: f64 = q.grid().spacing()
            * q.values()
                .iter()
                .zip(v.values())
                .map(|(a, b)| a.re * b.re)
                .sum::<f64>();
        (overlap.abs() / qn - 1.0).abs() < 1e-6
    };
    let kernel_match_l1 = kernel_residual_l1 < 1e-6 && spec1.eigenvalues[1].abs() <= tol;
    let kernel_match_l2 =
        kernel_residual_l2 < 1e-6 && spec2.eigenvalues[0].abs() <= tol && l2_zero_aligned;

    // q0_mass = mass of the kappa = 1 profile; 4/9 analytically. Evaluated
    // from the sampled closed form on this grid.
    let base = PhysParams::new(1, p.sigma, 1.0, 0.0)?;
    let q0 = scalar_ground_state_1d(&base, grid)?;
    let d_second = d_second_formula(p.sigma, p.omega, p.n, norm_sq(&q0));

    let facts_hold = spec1.negative_count == 1
        && kernel_match_l1
        && spec2.negative_count == 0
        && kernel_match_l2
        && spec3.negative_count == 0
        && spec3.eigenvalues[0] > tol;
    let verdict = if !facts_hold {
        StabilityVerdict::OutOfScope
    } else if d_second > 0.0 {
        StabilityVerdict::Stable
    } else {
        StabilityVerdict::Unstable
    };

    Ok(SpectralReport {
        l1: spec1,
        l2: spec2,
        l3: spec3,
        kernel_residual_l1,
        kernel_residual_l2,
        kernel_match_l1,
        kernel_match_l2,
        d_second,
        verdict,
    })
}

/// Coefficients of the instability quadratic form A0 a^2 + 2 B0 a l + C0 l^2
/// along the mass-preserving scaling curve, and its discriminant
/// D = A0 C0 - B0^2. For semitrivial states the P-dependent terms take their
/// P -> 0 limits (pure-Q integrals). For n = 3 the directional value at
/// (a, l) = (0, 1) is C0, which must equal -K(P, Q).
#[derive(Debug, Clone, Serialize)]
pub struct InstabilityForm {
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub d: f64,
}

pub fn instability_quadratic_form(gs: &GroundStatePair, p: &PhysParams) -> Result<InstabilityForm> {
    if !gs.converged {
        return Err(Error::RegimeViolation(
            "instability form needs a converged pair".into(),
        ));
    }
    let vol = gs.q.grid().cell_volume();
    let n = p.n as f64;
    let qv = gs.q.values();
    let pv = gs.p.values();
    let q2: f64 = vol * qv.iter().map(|v| v.re * v.re).sum::<f64>();
    let q4: f64 = vol * qv.iter().map(|v| v.re.powi(4)).sum::<f64>();

    let (a0, b0, c0);
    if gs.p_is_zero() {
        a0 = -18.0 * q4;
        b0 = 2.0 * (3.0 * p.sigma - p.mu) * q2 + (n - 2.0) * (-9.0 * q4);
        c0 = n * (2.0 - n) / 4.0 * 9.0 * q4;
    } else {
        let p2: f64 = vol * pv.iter().map(|v| v.re * v.re).sum::<f64>();
        let p4: f64 = vol * pv.iter().map(|v| v.re.powi(4)).sum::<f64>();
        let p2q2: f64 = vol
            * pv.iter()
                .zip(qv)
                .map(|(a, b)| a.re * a.re * b.re * b.re)
                .sum::<f64>();
        let p3q: f64 = vol
            * pv.iter()
                .zip(qv)
                .map(|(a, b)| a.re.powi(3) * b.re)
                .sum::<f64>();
        let k = p2 / (3.0 * p.sigma * q2);
        a0 = -2.0 / (k * k) * p4 + 8.0 / k * p2q2 - 18.0 * q4
            + (2.0 / (3.0 * k) + 1.0 / 9.0 - 1.0 / (3.0 * k * k)) * p3q;
        b0 = 2.0 * (3.0 * p.sigma - p.mu) * q2
            + (n - 2.0)
                * (p4 / (9.0 * k) - 9.0 * q4 + (2.0 / k - 2.0) * p2q2
                    + (1.0 / (3.0 * k) - 1.0 / 9.0) * p3q);
        c0 = n * (2.0 - n) / 4.0
            * (vol
                * pv.iter()
                    .zip(qv)
                    .map(|(a, b)| {
                        let pp = a.re;
                        let qq = b.re;
                        pp.powi(4) / 9.0
                            + 9.0 * qq.powi(4)
                            + 4.0 * pp * pp * qq * qq
                            + 4.0 / 9.0 * pp.powi(3) * qq
                    })
                    .sum::<f64>());
    }
    Ok(InstabilityForm {
        a0,
        b0,
        c0,
        d: a0 * c0 - b0 * b0,
    })
}
