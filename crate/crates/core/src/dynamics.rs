//! Single-excitation dynamics: exact unitary propagation, Lindblad evolution
//! with excitation loss and dephasing, and the closed-form three-qubit results.
//!
//! States live on the localized basis `|q_0>, ..., |q_{N-1}>` plus an explicit
//! vacuum level `|0...0>`. Density matrices are `(N + 1) x (N + 1)` with the
//! vacuum as the last index.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianEigen};

pub use crate::linalg::propagator;

/// Normalization tolerance on pure states.
pub const STATE_NORM_TOL: f64 = 1e-10;

/// Tolerance on trace, Hermiticity and positivity of evolved density matrices.
pub const LINDBLAD_INVARIANT_TOL: f64 = 1e-8;

/// Pure state in the single-excitation manifold plus vacuum.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<C64>,
    vacuum: C64,
}

impl QuantumState {
    pub fn new(amplitudes: DVector<C64>, vacuum: C64) -> Result<Self> {
        let state = QuantumState { amplitudes, vacuum };
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalizedState { norm_sqr });
        }
        Ok(state)
    }

    pub(crate) fn from_parts_unchecked(amplitudes: DVector<C64>, vacuum: C64) -> Self {
        QuantumState { amplitudes, vacuum }
    }

    /// Excitation on `site` of an `n`-site register.
    pub fn localized(n: usize, site: usize) -> Result<Self> {
        if site >= n {
            return Err(Error::InvalidInput(format!("site {site} out of range for {n} sites")));
        }
        let mut amplitudes = DVector::zeros(n);
        amplitudes[site] = C64::new(1.0, 0.0);
        Ok(QuantumState { amplitudes, vacuum: C64::new(0.0, 0.0) })
    }

    /// `|W_n>`, the uniform real superposition.
    pub fn w_state(n: usize) -> Self {
        let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        QuantumState { amplitudes: DVector::from_element(n, a), vacuum: C64::new(0.0, 0.0) }
    }

    pub fn sites(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn vacuum(&self) -> C64 {
        self.vacuum
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared() + self.vacuum.norm_sqr()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn vacuum_population(&self) -> f64 {
        self.vacuum.norm_sqr()
    }
}

/// Mixed state over the single-excitation manifold plus vacuum.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace to 1e-10 and positivity to -1e-9.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::InvalidInput("density matrix must be square with at least one site plus vacuum".into()));
        }
        let dm = DensityMatrix { matrix };
        let dev = linalg::hermitian_deviation(&dm.matrix);
        if dev > 1e-10 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = dm.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!("density matrix trace {tr} differs from 1")));
        }
        let min = dm.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::InvalidInput(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(dm)
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        DensityMatrix { matrix }
    }

    pub fn from_state(state: &QuantumState) -> Self {
        let n = state.sites();
        let mut v = DVector::zeros(n + 1);
        v.rows_mut(0, n).copy_from(state.amplitudes());
        v[n] = state.vacuum();
        DensityMatrix { matrix: &v * v.adjoint() }
    }

    /// Identity over the `n` single-excitation states, divided by `n`.
    pub fn maximally_mixed_single_excitation(n: usize) -> Self {
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0 / n as f64, 0.0);
        }
        DensityMatrix { matrix: m }
    }

    pub fn sites(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.sites()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn vacuum_population(&self) -> f64 {
        let n = self.sites();
        self.matrix[(n, n)].re
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        nalgebra::SymmetricEigen::new(sym).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// The `N x N` block on the single-excitation states.
    pub fn site_block(&self) -> DMatrix<C64> {
        let n = self.sites();
        self.matrix.view((0, 0), (n, n)).into_owned()
    }
}

/// Per-site relaxation and echo-dephasing times in ns.
///
/// Loss acts as `sqrt(g1) |vac><q_i|` with `g1 = 1/T1`; dephasing as
/// `sqrt(gphi) |q_i><q_i|` with `gphi = 1/T2 - 1/(2 T1)`, so the coherence
/// between sites `i` and `j` decays at `(gphi_i + gphi_j) / 2` on top of loss.
/// Infinite times switch a channel off.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    t1: Vec<f64>,
    t2: Vec<f64>,
}

impl NoiseModel {
    pub fn new(t1: Vec<f64>, t2: Vec<f64>) -> Result<Self> {
        if t1.len() != t2.len() {
            return Err(Error::LengthMismatch { expected: t1.len(), found: t2.len() });
        }
        for (site, (&a, &b)) in t1.iter().zip(&t2).enumerate() {
            if !(a > 0.0) || !(b > 0.0) {
                return Err(Error::InvalidInput(format!("coherence times on site {site} must be positive")));
            }
            if b > 2.0 * a {
                return Err(Error::NegativeRate { site });
            }
        }
        Ok(NoiseModel { t1, t2 })
    }

    pub fn uniform(n: usize, t1: f64, t2: f64) -> Result<Self> {
        Self::new(vec![t1; n], vec![t2; n])
    }

    pub fn noiseless(n: usize) -> Self {
        NoiseModel { t1: vec![f64::INFINITY; n], t2: vec![f64::INFINITY; n] }
    }

    pub fn sites(&self) -> usize {
        self.t1.len()
    }

    pub fn t1(&self) -> &[f64] {
        &self.t1
    }

    pub fn t2(&self) -> &[f64] {
        &self.t2
    }

    pub fn loss_rate(&self, site: usize) -> f64 {
        1.0 / self.t1[site]
    }

    pub fn dephasing_rate(&self, site: usize) -> f64 {
        (1.0 / self.t2[site] - 0.5 / self.t1[site]).max(0.0)
    }

    pub fn is_noiseless(&self) -> bool {
        (0..self.sites()).all(|i| self.loss_rate(i) == 0.0 && self.dephasing_rate(i) == 0.0)
    }
}

/// Site and vacuum populations sampled on a time grid (ns).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    /// `populations[t][site]`
    pub populations: Vec<Vec<f64>>,
    pub vacuum: Vec<f64>,
}

impl PopulationTrace {
    pub fn site_series(&self, site: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[site]).collect()
    }

    pub fn totals(&self) -> Vec<f64> {
        self.populations.iter().zip(&self.vacuum).map(|(p, v)| p.iter().sum::<f64>() + v).collect()
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("time grid contains non-finite values".into()));
    }
    Ok(())
}

/// Exact propagation on every grid point. Returns the populations and the
/// state at the last grid point.
pub fn evolve_unitary(h: &DMatrix<C64>, psi0: &QuantumState, times: &[f64]) -> Result<(PopulationTrace, QuantumState)> {
    check_grid(times)?;
    if h.nrows() != psi0.sites() {
        return Err(Error::LengthMismatch { expected: h.nrows(), found: psi0.sites() });
    }
    let norm_sqr = psi0.norm_sqr();
    if (norm_sqr - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::NotNormalizedState { norm_sqr });
    }
    let eig = HermitianEigen::new(h)?;
    let mut trace = PopulationTrace { times: times.to_vec(), populations: Vec::with_capacity(times.len()), vacuum: Vec::new() };
    let mut last = psi0.amplitudes().clone();
    for &t in times {
        last = eig.apply(psi0.amplitudes(), t);
        trace.populations.push(last.iter().map(|a| a.norm_sqr()).collect());
        trace.vacuum.push(psi0.vacuum_population());
    }
    Ok((trace, QuantumState::from_parts_unchecked(last, psi0.vacuum())))
}

/// Integrator settings for [`evolve_lindblad_with`].
#[derive(Clone, Copy, Debug)]
pub struct LindbladOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
    /// Integrate even when every rate vanishes (the exact path is used otherwise).
    pub force_integrator: bool,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        LindbladOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_steps: 2_000_000, force_integrator: false }
    }
}

/// Master-equation evolution with default tolerances.
pub fn evolve_lindblad(
    h: &DMatrix<C64>,
    noise: &NoiseModel,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    evolve_lindblad_with(h, noise, rho0, times, LindbladOptions::default())
}

struct MasterEquation {
    h: DMatrix<C64>,
    loss: Vec<f64>,
    /// pairwise decay of `rho_jk`, vacuum included with zero rates
    damping: DMatrix<f64>,
}

impl MasterEquation {
    fn new(h_sites: &DMatrix<C64>, noise: &NoiseModel) -> Self {
        let n = h_sites.nrows();
        let mut h = DMatrix::zeros(n + 1, n + 1);
        h.view_mut((0, 0), (n, n)).copy_from(h_sites);
        let loss: Vec<f64> = (0..n).map(|i| noise.loss_rate(i)).collect();
        let dephasing: Vec<f64> = (0..n).map(|i| noise.dephasing_rate(i)).collect();
        let rate = |k: usize| if k < n { (loss[k], dephasing[k]) } else { (0.0, 0.0) };
        let damping = DMatrix::from_fn(n + 1, n + 1, |j, k| {
            let (lj, dj) = rate(j);
            let (lk, dk) = rate(k);
            if j == k { lj } else { 0.5 * (lj + lk + dj + dk) }
        });
        MasterEquation { h, loss, damping }
    }

    fn rhs(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let i = C64::new(0.0, 1.0);
        let hr = &self.h * rho;
        let mut out = (&hr - hr.adjoint()) * (-i);
        let n = self.loss.len();
        for k in 0..=n {
            for j in 0..=n {
                out[(j, k)] -= rho[(j, k)] * self.damping[(j, k)];
            }
        }
        let feed: f64 = self.loss.iter().enumerate().map(|(s, g)| g * rho[(s, s)].re).sum();
        out[(n, n)] += C64::new(feed, 0.0);
        out
    }
}

// Dormand-Prince 5(4) tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stepper<'a> {
    eq: &'a MasterEquation,
    opts: LindbladOptions,
    h: f64,
    steps: usize,
}

impl Stepper<'_> {
    /// Advances `rho` from `t0` to `t1` with adaptive steps.
    fn advance(&mut self, rho: &mut DMatrix<C64>, t0: f64, t1: f64) -> Result<()> {
        let mut t = t0;
        while t < t1 {
            if self.steps >= self.opts.max_steps {
                return Err(Error::StepSizeFailure { time: t });
            }
            let h = self.h.min(t1 - t);
            let k1 = self.eq.rhs(rho);
            let k2 = self.eq.rhs(&(&*rho + &k1 * C64::from(h * A21)));
            let k3 = self.eq.rhs(&(&*rho + (k1.scale(A31) + k2.scale(A32)) * C64::from(h)));
            let k4 = self.eq.rhs(&(&*rho + (k1.scale(A41) + k2.scale(A42) + k3.scale(A43)) * C64::from(h)));
            let k5 = self.eq.rhs(&(&*rho + (k1.scale(A51) + k2.scale(A52) + k3.scale(A53) + k4.scale(A54)) * C64::from(h)));
            let k6 = self.eq.rhs(&(&*rho + (k1.scale(A61) + k2.scale(A62) + k3.scale(A63) + k4.scale(A64) + k5.scale(A65)) * C64::from(h)));
            let y5 = &*rho + (k1.scale(B1) + k3.scale(B3) + k4.scale(B4) + k5.scale(B5) + k6.scale(B6)) * C64::from(h);
            let k7 = self.eq.rhs(&y5);
            let err = (k1.scale(E1) + k3.scale(E3) + k4.scale(E4) + k5.scale(E5) + k6.scale(E6) + k7.scale(E7)) * C64::from(h);
            let mut ratio: f64 = 0.0;
            for ((e, a), b) in err.iter().zip(rho.iter()).zip(y5.iter()) {
                let sc = self.opts.abs_tol + self.opts.rel_tol * a.norm().max(b.norm());
                ratio = ratio.max(e.norm() / sc);
            }
            self.steps += 1;
            if ratio <= 1.0 {
                t = if h >= t1 - t { t1 } else { t + h };
                *rho = y5;
                let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).min(5.0) };
                // a clamped final step says nothing about the natural step size
                if h == self.h {
                    self.h *= grow;
                }
            } else {
                self.h = h * (0.9 * ratio.powf(-0.2)).max(0.2);
                if self.h < 1e-12 * t1.abs().max(1.0) {
                    return Err(Error::StepSizeFailure { time: t });
                }
            }
        }
        Ok(())
    }
}

fn check_invariants(rho: &DMatrix<C64>, t: f64) -> Result<()> {
    let dm = DensityMatrix::from_matrix_unchecked(rho.clone());
    let tr = dm.trace();
    if (tr - 1.0).abs() > LINDBLAD_INVARIANT_TOL {
        return Err(Error::InvariantBreach(format!("trace {tr} at t = {t}")));
    }
    let herm = linalg::hermitian_deviation(rho);
    if herm > LINDBLAD_INVARIANT_TOL {
        return Err(Error::InvariantBreach(format!("Hermiticity deviation {herm:e} at t = {t}")));
    }
    let min = dm.min_eigenvalue();
    if min < -LINDBLAD_INVARIANT_TOL {
        return Err(Error::InvariantBreach(format!("eigenvalue {min:e} at t = {t}")));
    }
    Ok(())
}

/// Master-equation evolution sampled at every grid point (non-decreasing,
/// starting at or after t = 0).
pub fn evolve_lindblad_with(
    h: &DMatrix<C64>,
    noise: &NoiseModel,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: LindbladOptions,
) -> Result<Vec<DensityMatrix>> {
    check_grid(times)?;
    linalg::check_hermitian(h)?;
    let n = h.nrows();
    if rho0.sites() != n {
        return Err(Error::LengthMismatch { expected: n, found: rho0.sites() });
    }
    if noise.sites() != n {
        return Err(Error::LengthMismatch { expected: n, found: noise.sites() });
    }
    if times[0] < 0.0 || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("time grid must be non-negative and non-decreasing".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    if noise.is_noiseless() && !opts.force_integrator {
        let mut hx = DMatrix::zeros(n + 1, n + 1);
        hx.view_mut((0, 0), (n, n)).copy_from(h);
        let eig = HermitianEigen::new(&hx)?;
        for &t in times {
            let u = eig.propagator(t);
            out.push(DensityMatrix::from_matrix_unchecked(&u * rho0.matrix() * u.adjoint()));
        }
        return Ok(out);
    }
    let eq = MasterEquation::new(h, noise);
    let scale = linalg::max_abs(&eq.h).max(eq.damping.max()).max(1e-12);
    let mut stepper = Stepper { eq: &eq, opts, h: 0.01 / scale, steps: 0 };
    let mut rho = rho0.matrix().clone();
    let mut t = 0.0;
    for &target in times {
        stepper.advance(&mut rho, t, target)?;
        t = target;
        check_invariants(&rho, t)?;
        out.push(DensityMatrix::from_matrix_unchecked(rho.clone()));
    }
    Ok(out)
}

/// Populations of a density-matrix trajectory.
pub fn lindblad_populations(times: &[f64], states: &[DensityMatrix]) -> PopulationTrace {
    PopulationTrace {
        times: times.to_vec(),
        populations: states.iter().map(|s| s.populations()).collect(),
        vacuum: states.iter().map(|s| s.vacuum_population()).collect(),
    }
}

/// Detuning profile of the three-qubit chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThreeQubitProfile {
    /// `Delta_{-1} = -Delta_1`
    Antisymmetric,
    /// `Delta_{-1} = Delta_1`
    Symmetric,
}

impl ThreeQubitProfile {
    fn k(self) -> f64 {
        match self {
            ThreeQubitProfile::Antisymmetric => 1.0,
            ThreeQubitProfile::Symmetric => 4.0,
        }
    }
}

/// Three-site Hamiltonian with outer detunings and a complex coupling `J`
/// below the diagonal (`J*` above).
pub fn three_qubit_hamiltonian(coupling: C64, delta_left: f64, delta_right: f64) -> DMatrix<C64> {
    let z = C64::new(0.0, 0.0);
    let c = coupling.conj();
    DMatrix::from_row_slice(3, 3, &[
        C64::from(delta_left), c, z,
        coupling, z, c,
        z, coupling, C64::from(delta_right),
    ])
}

/// Detuning magnitudes producing W3 at exactly half a period:
/// `(1 +- sqrt 3)|J|` (antisymmetric) or `2|J|` (symmetric).
pub fn three_qubit_half_period_detunings(coupling: f64, profile: ThreeQubitProfile) -> Vec<f64> {
    let j = coupling.abs();
    let r3 = 3f64.sqrt();
    match profile {
        ThreeQubitProfile::Antisymmetric => vec![(1.0 + r3) * j, (r3 - 1.0) * j],
        ThreeQubitProfile::Symmetric => vec![2.0 * j],
    }
}

/// Refocusing period `2 pi / sqrt(Delta^2 + 2 k |J|^2)` of the central excitation.
pub fn three_qubit_period(coupling: f64, detuning: f64, profile: ThreeQubitProfile) -> f64 {
    2.0 * PI / (detuning * detuning + 2.0 * profile.k() * coupling * coupling).sqrt()
}

/// Earliest W3 time of the resonant chain, `arctan(sqrt 2) / (|J| sqrt 2)`.
pub fn resonant_w3_time(coupling: f64) -> f64 {
    SQRT_2.atan() / (coupling.abs() * SQRT_2)
}

/// Removes relative phases with diagonal (virtual-Z) rotations so every site
/// amplitude becomes real and non-negative. Returns the applied phases.
pub fn phase_align(psi: &QuantumState) -> (QuantumState, Vec<f64>) {
    let phases: Vec<f64> = psi.amplitudes().iter().map(|a| if a.norm() > 0.0 { -a.arg() } else { 0.0 }).collect();
    (apply_phases(psi, &phases), phases)
}

/// Multiplies amplitude `i` by `exp(i phases[i])`.
pub fn apply_phases(psi: &QuantumState, phases: &[f64]) -> QuantumState {
    let amps = DVector::from_iterator(
        psi.sites(),
        psi.amplitudes().iter().zip(phases).map(|(a, p)| a * C64::from_polar(1.0, *p)),
    );
    QuantumState::from_parts_unchecked(amps, psi.vacuum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::w_fidelity_state;

    #[test]
    fn half_period_detunings() {
        let a = three_qubit_half_period_detunings(1.0, ThreeQubitProfile::Antisymmetric);
        assert!((a[0] - 2.7320508075688772).abs() < 1e-15);
        assert!((a[1] - 0.7320508075688772).abs() < 1e-15);
        assert_eq!(three_qubit_half_period_detunings(-1.0, ThreeQubitProfile::Symmetric), vec![2.0]);
    }

    #[test]
    fn periods_and_ratio() {
        let j = 1.3;
        let t0 = three_qubit_period(j, 0.0, ThreeQubitProfile::Antisymmetric);
        assert!((t0 - 2.0 * PI / (SQRT_2 * j)).abs() < 1e-14);
        let ts = three_qubit_period(j, 2.0 * j, ThreeQubitProfile::Symmetric);
        let ta = three_qubit_period(j, (1.0 + 3f64.sqrt()) * j, ThreeQubitProfile::Antisymmetric);
        assert!((ts / ta - 0.888).abs() < 5e-4);
    }

    #[test]
    fn resonant_time_value() {
        assert!((resonant_w3_time(1.0) - 0.6755108588560398).abs() < 1e-13);
        let ts = three_qubit_period(1.0, 2.0, ThreeQubitProfile::Symmetric);
        assert!(resonant_w3_time(1.0) < ts / 2.0);
    }

    #[test]
    fn symmetric_three_qubit_reaches_w() {
        let j = 0.7;
        let h = three_qubit_hamiltonian(C64::from(j), 2.0 * j, 2.0 * j);
        let t = three_qubit_period(j, 2.0 * j, ThreeQubitProfile::Symmetric) / 2.0;
        let (trace, psi) = evolve_unitary(&h, &QuantumState::localized(3, 1).unwrap(), &[0.0, t]).unwrap();
        for p in &trace.populations[1] {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        let (aligned, _) = phase_align(&psi);
        assert!(1.0 - w_fidelity_state(&aligned) < 1e-12);
    }

    #[test]
    fn eigenstate_populations_are_stationary() {
        let h = three_qubit_hamiltonian(C64::from(1.0), 0.0, 0.0);
        let eig = HermitianEigen::new(&h).unwrap();
        let psi = QuantumState::new(eig.vectors.column(0).into_owned(), C64::from(0.0)).unwrap();
        let p0 = psi.populations();
        let (trace, _) = evolve_unitary(&h, &psi, &[0.3, 1.7, 9.0]).unwrap();
        for row in &trace.populations {
            for (a, b) in row.iter().zip(&p0) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn phase_alignment_examples() {
        let s = 1.0 / 3f64.sqrt();
        let amps = DVector::from_vec(vec![
            C64::from(s),
            C64::from_polar(s, PI / 5.0),
            C64::from_polar(s, -PI / 3.0),
        ]);
        let psi = QuantumState::new(amps, C64::from(0.0)).unwrap();
        let (aligned, phases) = phase_align(&psi);
        assert!((w_fidelity_state(&aligned) - 1.0).abs() < 1e-14);
        assert!((phases[1] + PI / 5.0).abs() < 1e-14);
        let real = QuantumState::w_state(4);
        let (_, phases) = phase_align(&real);
        assert!(phases.iter().all(|p| *p == 0.0));
    }

    #[test]
    fn noise_model_validation() {
        assert!(matches!(NoiseModel::uniform(2, 10.0, 25.0), Err(Error::NegativeRate { site: 0 })));
        let m = NoiseModel::uniform(1, 86_400.0, 15_900.0).unwrap();
        assert!((m.dephasing_rate(0) - (1.0 / 15_900.0 - 0.5 / 86_400.0)).abs() < 1e-18);
        assert!(NoiseModel::noiseless(3).is_noiseless());
    }

    #[test]
    fn rejects_bad_grids_and_states() {
        let h = three_qubit_hamiltonian(C64::from(1.0), 0.0, 0.0);
        let psi = QuantumState::localized(3, 0).unwrap();
        assert!(matches!(evolve_unitary(&h, &psi, &[]), Err(Error::EmptyGrid)));
        let bad = DVector::from_vec(vec![C64::from(1.0), C64::from(1.0), C64::from(0.0)]);
        assert!(matches!(QuantumState::new(bad, C64::from(0.0)), Err(Error::NotNormalizedState { .. })));
    }
}
