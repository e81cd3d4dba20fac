//! Inverse design: family parameters that turn a localized excitation into a
//! W state (or any target population profile) at the synthesis time.
//!
//! Refinement runs quasi-Newton descent on the infidelity followed by
//! Levenberg-Marquardt on the amplitude residuals `|a_i| - sqrt(t_i)`, both in
//! logit coordinates so parameters stay inside `(0, 1)`. Derivatives are exact
//! (forward-mode through the spectral reconstruction).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dual::{Dual, Real};
use crate::dynamics::QuantumState;
use crate::error::{Error, Result};
use crate::lattice::{self, LatticeGraph, LayerPartition};
use crate::linalg::HermitianEigen;
use crate::spectral::{
    antisymmetric_log_weights, linear_eigenvalues, mirror_log_weights, resonant_eigenvalues, stieltjes,
    symmetric_eigenvalues, Family, FamilyParams, TridiagonalHamiltonian,
};

/// Residual infidelity below which a design counts as exact.
pub const EXACT_TOL: f64 = 1e-9;

/// The least-squares polish stops once every amplitude residual is below this.
const RESIDUAL_TOL: f64 = 1e-14;

/// Parameters closer than this to 0 or 1 are reported as boundary hits.
const BOUNDARY_TOL: f64 = 1e-9;

/// One synthesis task: chain length, initialized site, family and time (ns).
#[derive(Clone, Debug, PartialEq)]
pub struct DesignProblem {
    pub sites: usize,
    pub init: usize,
    pub family: Family,
    pub tau: f64,
    /// Optimize only `p_1..p_{(M-1)/2}` with `p_k = p_{M-k}`.
    pub symmetry_reduced: bool,
    targets: Option<Vec<f64>>,
}

impl DesignProblem {
    /// Symmetry reduction is switched on for the antisymmetric family when
    /// the chain is odd and initialized at its centre.
    pub fn new(sites: usize, init: usize, family: Family, tau: f64) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidInput(format!("design needs at least two sites, got {sites}")));
        }
        if init >= sites {
            return Err(Error::InvalidInput(format!("initial site {init} outside a chain of {sites}")));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::ParameterOutOfRange { name: "tau", value: tau, range: "(0, inf)" });
        }
        if family != Family::Antisymmetric && (sites % 2 == 0 || sites < 3) {
            return Err(Error::InvalidInput(format!("{} family needs an odd chain, got {sites}", family.name())));
        }
        let centred = sites % 2 == 1 && init == sites / 2;
        Ok(DesignProblem { sites, init, family, tau, symmetry_reduced: family == Family::Antisymmetric && centred, targets: None })
    }

    /// Initialization at site `M / 2` (rounded down).
    pub fn centered(sites: usize, family: Family, tau: f64) -> Result<Self> {
        Self::new(sites, sites / 2, family, tau)
    }

    /// Replaces the uniform W target by arbitrary populations.
    pub fn with_targets(mut self, targets: Vec<f64>) -> Result<Self> {
        if targets.len() != self.sites {
            return Err(Error::LengthMismatch { expected: self.sites, found: targets.len() });
        }
        if let Some(i) = targets.iter().position(|t| !(*t > 0.0)) {
            return Err(Error::InvalidInput(format!("target population {i} must be positive")));
        }
        let sum: f64 = targets.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("target populations sum to {sum}")));
        }
        self.targets = Some(targets);
        if !self.mirror_invariant() {
            self.symmetry_reduced = false;
        }
        Ok(self)
    }

    pub fn with_symmetry_reduction(mut self, on: bool) -> Result<Self> {
        if on && (self.family != Family::Antisymmetric || !self.mirror_invariant()) {
            return Err(Error::InvalidInput(
                "symmetry reduction needs the antisymmetric family on an odd, centred, mirror-symmetric problem".into(),
            ));
        }
        self.symmetry_reduced = on;
        Ok(self)
    }

    pub fn targets(&self) -> Vec<f64> {
        self.targets.clone().unwrap_or_else(|| vec![1.0 / self.sites as f64; self.sites])
    }

    /// Reflection about the chain centre maps the problem onto itself.
    pub fn mirror_invariant(&self) -> bool {
        let t = self.targets();
        self.sites % 2 == 1 && self.init == self.sites / 2 && (0..self.sites).all(|i| t[i] == t[self.sites - 1 - i])
    }

    /// Number of values the optimizer moves.
    pub fn free_dimension(&self) -> usize {
        if self.symmetry_reduced {
            (self.sites - 1) / 2
        } else {
            FamilyParams::dimension(self.family, self.sites)
        }
    }

    fn expand<T: Clone>(&self, free: &[T]) -> Vec<T> {
        if self.symmetry_reduced {
            expand_symmetric(free, self.sites)
        } else {
            free.to_vec()
        }
    }

    fn reduce(&self, full: &[f64]) -> Vec<f64> {
        if self.symmetry_reduced {
            full[..(self.sites - 1) / 2].to_vec()
        } else {
            full.to_vec()
        }
    }
}

fn expand_symmetric<T: Clone>(free: &[T], sites: usize) -> Vec<T> {
    let mut out = free.to_vec();
    out.extend(free.iter().rev().cloned());
    debug_assert_eq!(out.len(), sites - 1);
    out
}

/// `(p_1, ..., p_{M-1})` with `p_k = p_{M-k}` to its free half.
pub fn symmetry_reduce(p: &[f64], sites: usize) -> Result<Vec<f64>> {
    if sites % 2 == 0 || sites < 3 {
        return Err(Error::InvalidInput(format!("symmetry reduction needs an odd chain, got {sites}")));
    }
    if p.len() != sites - 1 {
        return Err(Error::LengthMismatch { expected: sites - 1, found: p.len() });
    }
    if let Some(k) = (0..p.len()).find(|&k| (p[k] - p[p.len() - 1 - k]).abs() > 1e-12) {
        return Err(Error::InvalidInput(format!("parameters are not reflection-symmetric at index {k}")));
    }
    Ok(p[..(sites - 1) / 2].to_vec())
}

/// Inverse of [`symmetry_reduce`]: `(a, b, c)` becomes `(a, b, c, c, b, a)`.
pub fn symmetry_expand(reduced: &[f64], sites: usize) -> Result<Vec<f64>> {
    if sites % 2 == 0 || sites < 3 {
        return Err(Error::InvalidInput(format!("symmetry reduction needs an odd chain, got {sites}")));
    }
    if reduced.len() != (sites - 1) / 2 {
        return Err(Error::LengthMismatch { expected: (sites - 1) / 2, found: reduced.len() });
    }
    Ok(expand_symmetric(reduced, sites))
}

/// A designed chain.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionRecord {
    pub params: FamilyParams,
    pub hamiltonian: TridiagonalHamiltonian,
    pub init: usize,
    /// Synthesis time (ns).
    pub tau: f64,
    /// Target-weighted phase-aligned infidelity from direct propagation.
    pub residual_infidelity: f64,
    pub jmax_tau: f64,
    pub converged: bool,
}

impl SolutionRecord {
    pub fn sites(&self) -> usize {
        self.hamiltonian.len()
    }

    /// `J_max` in rad/ns.
    pub fn jmax(&self) -> f64 {
        self.jmax_tau / self.tau
    }
}

/// `|<q_i| exp(-iH tau) |q_init>|` from the spectral data (real, imaginary parts).
fn amplitudes<T: Real>(problem: &DesignProblem, full: &[T]) -> Result<Vec<(T, T)>> {
    let m = problem.sites;
    let tau = problem.tau;
    let like = full[0].clone();
    let (lam, log_w): (Vec<T>, Vec<T>) = match problem.family {
        Family::Antisymmetric => {
            let lam = linear_eigenvalues(tau, m).into_iter().map(|l| T::cst(l, &like)).collect();
            (lam, antisymmetric_log_weights(full))
        }
        Family::Symmetric => {
            let lam = symmetric_eigenvalues(full, tau, m);
            let lw = mirror_log_weights(&lam);
            (lam, lw)
        }
        Family::Resonant => {
            let (scale, gaps) = full.split_last().expect("resonant parameters include the scale");
            let lam = resonant_eigenvalues(gaps, scale, tau, m);
            let lw = mirror_log_weights(&lam);
            (lam, lw)
        }
    };
    let top = log_w.iter().map(Real::value).fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<T> = log_w.iter().map(|l| (l.clone() - T::cst(top, &like)).exp()).collect();
    let total = e.iter().skip(1).fold(e[0].clone(), |a, b| a + b.clone());
    let w: Vec<T> = e.into_iter().map(|x| x / total.clone()).collect();
    let rec = stieltjes(&lam, &w)?;
    let phase: Vec<(T, T)> = lam.iter().map(|l| {
        let x = l.scale(tau);
        (x.cos(), x.sin())
    }).collect();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut re = T::cst(0.0, &like);
        let mut im = T::cst(0.0, &like);
        for k in 0..m {
            let c = w[k].clone() * rec.polys[i][k].clone() * rec.polys[problem.init][k].clone();
            re = re + c.clone() * phase[k].0.clone();
            im = im - c * phase[k].1.clone();
        }
        out.push((re, im));
    }
    Ok(out)
}

fn magnitude<T: Real>(z: &(T, T)) -> T {
    let tiny = T::cst(1e-300, &z.0);
    (z.0.clone() * z.0.clone() + z.1.clone() * z.1.clone() + tiny).sqrt()
}

fn objective_generic<T: Real>(problem: &DesignProblem, full: &[T]) -> Result<T> {
    let amps = amplitudes(problem, full)?;
    let like = full[0].clone();
    let mut s = T::cst(0.0, &like);
    for (a, t) in amps.iter().zip(problem.targets()) {
        s = s + magnitude(a).scale(t.sqrt());
    }
    Ok(T::cst(1.0, &like) - s.clone() * s)
}

fn check_params(params: &FamilyParams, problem: &DesignProblem) -> Result<Vec<f64>> {
    if params.family() != problem.family {
        return Err(Error::InvalidInput(format!(
            "parameters of the {} family given for a {} problem",
            params.family().name(),
            problem.family.name()
        )));
    }
    let values = params.values();
    let expected = FamilyParams::dimension(problem.family, problem.sites);
    if values.len() != expected {
        return Err(Error::LengthMismatch { expected, found: values.len() });
    }
    for &value in &values {
        if !(value > 0.0 && value < 1.0) && !(problem.family == Family::Resonant && value == 1.0) {
            return Err(Error::ParameterOutOfRange { name: "family parameter", value, range: "(0, 1)" });
        }
    }
    Ok(values)
}

/// `1 - (sum_i sqrt(t_i) |<q_i| exp(-iH tau) |q_init>|)^2`; for uniform targets
/// this is the phase-aligned W-state infidelity.
pub fn infidelity_objective(params: &FamilyParams, problem: &DesignProblem) -> Result<f64> {
    let values = check_params(params, problem)?;
    Ok(objective_generic(problem, &values)?.clamp(0.0, 1.0))
}

/// Exact gradient of [`infidelity_objective`] with respect to
/// [`FamilyParams::values`].
pub fn objective_gradient(params: &FamilyParams, problem: &DesignProblem) -> Result<Vec<f64>> {
    let values = check_params(params, problem)?;
    let n = values.len();
    let duals: Vec<Dual> = values.iter().enumerate().map(|(k, v)| Dual::variable(*v, k, n)).collect();
    Ok(objective_generic(problem, &duals)?.eps)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn dual_sigmoid(x: f64, index: usize, n: usize) -> Dual {
    let p = sigmoid(x);
    let mut d = Dual::variable(p, index, n);
    d.eps[index] = p * (1.0 - p);
    d
}

fn objective_at(problem: &DesignProblem, x: &[f64]) -> f64 {
    let full = problem.expand(&x.iter().map(|v| sigmoid(*v)).collect::<Vec<_>>());
    objective_generic(problem, &full).unwrap_or(f64::INFINITY)
}

fn objective_and_gradient(problem: &DesignProblem, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    let free: Vec<Dual> = x.iter().enumerate().map(|(k, v)| dual_sigmoid(*v, k, n)).collect();
    let f = objective_generic(problem, &problem.expand(&free))?;
    Ok((f.re, f.eps))
}

fn residuals_at(problem: &DesignProblem, x: &[f64]) -> Result<Vec<f64>> {
    let full = problem.expand(&x.iter().map(|v| sigmoid(*v)).collect::<Vec<_>>());
    let amps = amplitudes(problem, &full)?;
    Ok(amps.iter().zip(problem.targets()).map(|(a, t)| magnitude(a) - t.sqrt()).collect())
}

fn residuals_and_jacobian(problem: &DesignProblem, x: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = x.len();
    let free: Vec<Dual> = x.iter().enumerate().map(|(k, v)| dual_sigmoid(*v, k, n)).collect();
    let amps = amplitudes(problem, &problem.expand(&free))?;
    let targets = problem.targets();
    let mut r = DVector::zeros(amps.len());
    let mut jac = DMatrix::zeros(amps.len(), n);
    for (i, a) in amps.iter().enumerate() {
        let m = magnitude(a);
        r[i] = m.re - targets[i].sqrt();
        for k in 0..n {
            jac[(i, k)] = m.eps[k];
        }
    }
    Ok((r, jac))
}

/// Quasi-Newton descent on the objective until it is small enough for the
/// least-squares polish.
fn descend(problem: &DesignProblem, mut x: Vec<f64>, max_iter: usize) -> Vec<f64> {
    let n = x.len();
    let Ok((mut f, mut g)) = objective_and_gradient(problem, &x) else {
        return x;
    };
    let mut hinv = DMatrix::<f64>::identity(n, n);
    for _ in 0..max_iter {
        if f < 1e-6 {
            break;
        }
        let gv = DVector::from_vec(g.clone());
        let mut dir = -(&hinv * &gv);
        if dir.dot(&gv) >= 0.0 {
            hinv = DMatrix::identity(n, n);
            dir = -gv.clone();
        }
        // cap the step so one iteration never moves a logit by more than 2
        let cap = dir.amax();
        if cap > 2.0 {
            dir *= 2.0 / cap;
        }
        let slope = dir.dot(&gv);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(dir.iter()).map(|(a, d)| a + step * d).collect();
            let ft = objective_at(problem, &trial);
            if ft <= f + 1e-4 * step * slope {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        let Some(trial) = accepted else { break };
        let Ok((ft, gt)) = objective_and_gradient(problem, &trial) else { break };
        let s = DVector::from_iterator(n, trial.iter().zip(&x).map(|(a, b)| a - b));
        let y = DVector::from_iterator(n, gt.iter().zip(&g).map(|(a, b)| a - b));
        let sy = s.dot(&y);
        if sy > 1e-16 {
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(n, n);
            let left = &i - rho * &s * y.transpose();
            let right = &i - rho * &y * s.transpose();
            hinv = &left * &hinv * &right + rho * &s * s.transpose();
        }
        let converged = (f - ft).abs() < 1e-15 * f.max(1e-300);
        x = trial;
        f = ft;
        g = gt;
        if converged {
            break;
        }
    }
    x
}

/// Levenberg-Marquardt on the amplitude residuals.
fn polish(problem: &DesignProblem, mut x: Vec<f64>, max_iter: usize) -> Vec<f64> {
    let n = x.len();
    let mut mu = 1e-3;
    for _ in 0..max_iter {
        let Ok((r, jac)) = residuals_and_jacobian(problem, &x) else { break };
        if r.amax() < RESIDUAL_TOL {
            break;
        }
        let cost = r.norm_squared();
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * &r;
        let mut improved = false;
        while mu < 1e14 {
            let mut m = a.clone();
            for k in 0..n {
                m[(k, k)] += mu * a[(k, k)].max(1e-12);
            }
            let Some(chol) = m.cholesky() else {
                mu *= 4.0;
                continue;
            };
            let delta = chol.solve(&(-&g));
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            match residuals_at(problem, &trial) {
                Ok(rt) if rt.iter().map(|v| v * v).sum::<f64>() < cost => {
                    let tiny = delta.amax() < 1e-15 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                    x = trial;
                    mu = (mu / 3.0).max(1e-15);
                    improved = !tiny;
                    break;
                }
                _ => mu *= 4.0,
            }
        }
        if !improved {
            break;
        }
    }
    x
}

/// Direct check: propagate the chain densely and compare with the targets.
pub fn verify_chain(h: &TridiagonalHamiltonian, tau: f64, init: usize, targets: &[f64]) -> Result<f64> {
    let eig = HermitianEigen::new(&h.to_complex())?;
    let psi = QuantumState::localized(h.len(), init)?;
    let out = eig.apply(psi.amplitudes(), tau);
    let s: f64 = out.iter().zip(targets).map(|(a, t)| a.norm() * t.sqrt()).sum();
    Ok((1.0 - s * s).max(0.0))
}

fn record(problem: &DesignProblem, full: &[f64]) -> Result<SolutionRecord> {
    let params = FamilyParams::from_values(problem.family, full);
    let hamiltonian = params.hamiltonian(problem.sites, problem.tau)?;
    let residual_infidelity = verify_chain(&hamiltonian, problem.tau, problem.init, &problem.targets())?;
    let jmax_tau = hamiltonian.max_coupling() * problem.tau;
    Ok(SolutionRecord {
        params,
        hamiltonian,
        init: problem.init,
        tau: problem.tau,
        residual_infidelity,
        jmax_tau,
        converged: residual_infidelity < EXACT_TOL,
    })
}

/// Local refinement from `start` to an exact solution. Unconverged runs come
/// back with `converged == false`; runs that drift to the edge of `(0, 1)`
/// fail with [`Error::BoundaryHit`].
pub fn refine_exact(problem: &DesignProblem, start: &FamilyParams) -> Result<SolutionRecord> {
    refine_with(problem, start, 400)
}

fn refine_with(problem: &DesignProblem, start: &FamilyParams, max_iter: usize) -> Result<SolutionRecord> {
    let full = check_params(start, problem)?;
    if problem.symmetry_reduced {
        symmetry_reduce(&full, problem.sites)?;
    }
    let x0: Vec<f64> = problem.reduce(&full).iter().map(|p| logit(p.min(1.0 - 1e-16))).collect();
    let x = descend(problem, x0, max_iter);
    let x = polish(problem, x, max_iter);
    let free: Vec<f64> = x.iter().map(|v| sigmoid(*v)).collect();
    for (index, &value) in free.iter().enumerate() {
        if value < BOUNDARY_TOL || value > 1.0 - BOUNDARY_TOL {
            return Err(Error::BoundaryHit { index, value });
        }
    }
    record(problem, &problem.expand(&free))
}

/// A local minimum of the Krawtchouk scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptimum {
    pub p: f64,
    pub infidelity: f64,
}

impl ScanOptimum {
    pub fn fidelity(&self) -> f64 {
        1.0 - self.infidelity
    }
}

/// Objective along `p_k = p` on the grid `resolution, 2 resolution, ...`;
/// returns every strict local minimum in increasing `p`.
pub fn krawtchouk_scan(problem: &DesignProblem, resolution: f64) -> Result<Vec<ScanOptimum>> {
    if !(resolution > 0.0 && resolution <= 1e-3) {
        return Err(Error::ParameterOutOfRange { name: "resolution", value: resolution, range: "(0, 1e-3]" });
    }
    let kraw = DesignProblem { family: Family::Antisymmetric, symmetry_reduced: false, ..problem.clone() };
    let count = (1.0 / resolution).round() as usize;
    let values: Vec<f64> = (1..count)
        .into_par_iter()
        .map(|k| {
            let p = k as f64 * resolution;
            objective_generic(&kraw, &vec![p; kraw.sites - 1]).unwrap_or(f64::INFINITY)
        })
        .collect();
    let mut out = Vec::new();
    for k in 1..values.len().saturating_sub(1) {
        if values[k] < values[k - 1] && values[k] <= values[k + 1] {
            out.push(ScanOptimum { p: (k + 1) as f64 * resolution, infidelity: values[k].max(0.0) });
        }
    }
    Ok(out)
}

/// Drops optima that mirror another one (`p <-> 1 - p`) when the problem is
/// reflection-invariant.
pub fn unique_optima(problem: &DesignProblem, optima: &[ScanOptimum]) -> Vec<ScanOptimum> {
    if !problem.mirror_invariant() {
        return optima.to_vec();
    }
    optima.iter().copied().filter(|o| o.p <= 0.5).collect()
}

/// Settings for the multi-start search.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignOptions {
    /// `None` tries every half-period family that applies and keeps the cheapest.
    pub family: Option<Family>,
    pub seed: u64,
    /// Random interior starts in addition to the Krawtchouk optima.
    pub restarts: usize,
    pub resolution: f64,
    pub max_iterations: usize,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions { family: None, seed: 0, restarts: 256, resolution: 1e-3, max_iterations: 400 }
    }
}

fn starts(problem: &DesignProblem, options: &DesignOptions) -> Result<Vec<Vec<f64>>> {
    let dim = problem.free_dimension();
    let mut out = Vec::new();
    if problem.family == Family::Antisymmetric {
        for o in unique_optima(problem, &krawtchouk_scan(problem, options.resolution)?) {
            out.push(vec![o.p; dim]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for _ in 0..options.restarts {
        out.push((0..dim).map(|_| sigmoid(rng.random_range(-5.0..5.0))).collect());
    }
    Ok(out)
}

fn mirror_key(problem: &DesignProblem, full: &[f64]) -> Vec<f64> {
    if problem.family != Family::Antisymmetric || !problem.mirror_invariant() {
        return full.to_vec();
    }
    let mirrored: Vec<f64> = full.iter().rev().map(|p| 1.0 - p).collect();
    if mirrored.iter().zip(full).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()) == Some(std::cmp::Ordering::Less) {
        mirrored
    } else {
        full.to_vec()
    }
}

fn same_solution(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-6)
}

/// Sorted by cost, then parameters.
fn sort_records(records: &mut [SolutionRecord]) {
    records.sort_by(|a, b| {
        a.jmax_tau
            .total_cmp(&b.jmax_tau)
            .then_with(|| a.params.values().partial_cmp(&b.params.values()).unwrap_or(std::cmp::Ordering::Equal))
    });
}

fn dedup(problem: &DesignProblem, records: Vec<SolutionRecord>) -> Vec<SolutionRecord> {
    let mut out: Vec<(Vec<f64>, SolutionRecord)> = Vec::new();
    for r in records {
        let key = mirror_key(problem, &r.params.values());
        if !out.iter().any(|(k, _)| same_solution(k, &key)) {
            out.push((key, r));
        }
    }
    let mut recs: Vec<SolutionRecord> = out.into_iter().map(|(_, r)| r).collect();
    sort_records(&mut recs);
    recs
}

/// Refines from the Krawtchouk optima (antisymmetric family) and from seeded
/// random interior starts; returns the distinct exact solutions by cost.
/// Mirror images count once when the problem is reflection-invariant.
pub fn find_exact_solutions(problem: &DesignProblem, options: &DesignOptions) -> Result<Vec<SolutionRecord>> {
    let starts = starts(problem, options)?;
    let found: Vec<SolutionRecord> = starts
        .par_iter()
        .filter_map(|s| {
            let full = problem.expand(s);
            refine_with(problem, &FamilyParams::from_values(problem.family, &full), options.max_iterations).ok()
        })
        .filter(|r| r.converged)
        .collect();
    Ok(dedup(problem, found))
}

/// Closed-form two-site record: `J = pi / (4 tau)`, zero detuning.
pub fn sqrt_iswap_record(init: usize, tau: f64) -> Result<SolutionRecord> {
    let j = PI / (4.0 * tau);
    let hamiltonian = TridiagonalHamiltonian::new(vec![0.0, 0.0], vec![j])?;
    let residual_infidelity = verify_chain(&hamiltonian, tau, init, &[0.5, 0.5])?;
    Ok(SolutionRecord {
        params: FamilyParams::krawtchouk(0.5, 2),
        hamiltonian,
        init,
        tau,
        residual_infidelity,
        jmax_tau: PI / 4.0,
        converged: residual_infidelity < EXACT_TOL,
    })
}

fn candidate_families(sites: usize, init: usize, options: &DesignOptions) -> Vec<Family> {
    match options.family {
        Some(f) => vec![f],
        None if sites % 2 == 1 && init == sites / 2 => vec![Family::Symmetric, Family::Antisymmetric],
        None => vec![Family::Antisymmetric],
    }
}

/// Every converged solution over the candidate families, cheapest first.
pub fn explore_chain(sites: usize, init: usize, tau: f64, options: &DesignOptions) -> Result<Vec<SolutionRecord>> {
    if sites == 2 && options.family.is_none_or(|f| f == Family::Antisymmetric) {
        if init > 1 {
            return Err(Error::InvalidInput(format!("initial site {init} outside a chain of 2")));
        }
        return Ok(vec![sqrt_iswap_record(init, tau)?]);
    }
    let mut all = Vec::new();
    for family in candidate_families(sites, init, options) {
        let problem = DesignProblem::new(sites, init, family, tau)?;
        all.extend(find_exact_solutions(&problem, options)?);
    }
    sort_records(&mut all);
    Ok(all)
}

/// Exact design with the lowest `J_max tau`.
pub fn design_chain(sites: usize, init: usize, tau: f64, options: &DesignOptions) -> Result<SolutionRecord> {
    explore_chain(sites, init, tau, options)?
        .into_iter()
        .next()
        .ok_or(Error::Unconverged { residual: f64::NAN })
}

/// Two-dimensional design from commuting row and column chains.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDesign {
    pub rows: usize,
    pub cols: usize,
    /// Chain along each column (length `rows`); `None` for a single row.
    pub column: Option<SolutionRecord>,
    /// Chain along each row (length `cols`); `None` for a single column.
    pub row: Option<SolutionRecord>,
    pub graph: LatticeGraph,
    /// Initialized vertex `l * cols + m`.
    pub init: usize,
    pub tau: f64,
    pub residual_infidelity: f64,
}

impl GridDesign {
    pub fn jmax_tau(&self) -> f64 {
        [&self.column, &self.row].iter().filter_map(|r| r.as_ref().map(|r| r.jmax_tau)).fold(0.0, f64::max)
    }
}

fn trivial_chain() -> TridiagonalHamiltonian {
    TridiagonalHamiltonian::new(vec![0.0], vec![]).expect("single site")
}

/// Kronecker-sum composition of two chain designs sharing one synthesis time.
pub fn compose_grid(column: Option<&SolutionRecord>, row: Option<&SolutionRecord>) -> Result<GridDesign> {
    let tau = match (column, row) {
        (Some(c), Some(r)) => {
            if (c.tau - r.tau).abs() > 1e-12 * c.tau.max(r.tau) {
                return Err(Error::Incommensurate { row_tau: r.tau, col_tau: c.tau });
            }
            c.tau
        }
        (Some(c), None) => c.tau,
        (None, Some(r)) => r.tau,
        (None, None) => return Err(Error::InvalidInput("grid needs at least one non-trivial dimension".into())),
    };
    let col_h = column.map(|c| c.hamiltonian.clone()).unwrap_or_else(trivial_chain);
    let row_h = row.map(|r| r.hamiltonian.clone()).unwrap_or_else(trivial_chain);
    let (rows, cols) = (col_h.len(), row_h.len());
    let init = column.map_or(0, |c| c.init) * cols + row.map_or(0, |r| r.init);
    let graph = lattice::grid_from_chains(&col_h, &row_h)?;
    let n = rows * cols;
    let eig = HermitianEigen::new(&lattice::graph_hamiltonian(&graph))?;
    let out = eig.apply(QuantumState::localized(n, init)?.amplitudes(), tau);
    let s: f64 = out.iter().map(|a| a.norm()).sum();
    let residual_infidelity = (1.0 - s * s / n as f64).max(0.0);
    Ok(GridDesign { rows, cols, column: column.cloned(), row: row.cloned(), graph, init, tau, residual_infidelity })
}

/// `rows x cols` grid reaching the `rows * cols` W state at `tau`, each
/// dimension designed with [`design_chain`] from its centre.
pub fn design_grid(rows: usize, cols: usize, tau: f64, options: &DesignOptions) -> Result<GridDesign> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("grid dimensions must be at least 1".into()));
    }
    let column = if rows > 1 { Some(design_chain(rows, rows / 2, tau, options)?) } else { None };
    let row = if cols > 1 { Some(design_chain(cols, cols / 2, tau, options)?) } else { None };
    compose_grid(column.as_ref(), row.as_ref())
}

/// Design on a rooted distance-regular graph through its effective chain.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredDesign {
    pub partition: LayerPartition,
    pub chain: SolutionRecord,
    pub graph: LatticeGraph,
    /// Phase-aligned W infidelity of the full graph, by direct propagation.
    pub residual_infidelity: f64,
    /// Layer populations of the full graph at `tau`.
    pub layer_populations: Vec<f64>,
}

/// Chain from the root layer that puts `K_d / N` of the population on layer
/// `d` at `tau`, realized on `template`.
pub fn design_layered(template: &LatticeGraph, root: usize, tau: f64, options: &DesignOptions) -> Result<LayeredDesign> {
    let (_, partition) = lattice::layer_reduce(template, root)?;
    let n = partition.vertex_count() as f64;
    let targets: Vec<f64> = partition.sizes().iter().map(|k| *k as f64 / n).collect();
    let family = options.family.unwrap_or(Family::Antisymmetric);
    let problem = DesignProblem::new(targets.len(), 0, family, tau)?.with_targets(targets)?;
    let chain = find_exact_solutions(&problem, options)?
        .into_iter()
        .next()
        .ok_or(Error::Unconverged { residual: f64::NAN })?;
    let graph = partition.realize(template, &chain.hamiltonian)?;
    let eig = HermitianEigen::new(&lattice::graph_hamiltonian(&graph))?;
    let out = eig.apply(QuantumState::localized(graph.len(), root)?.amplitudes(), tau);
    let s: f64 = out.iter().map(|a| a.norm()).sum();
    let residual_infidelity = (1.0 - s * s / n).max(0.0);
    let pops: Vec<f64> = out.iter().map(C64::norm_sqr).collect();
    let layer_populations = partition.layer_populations(&pops);
    Ok(LayeredDesign { partition, chain, graph, residual_infidelity, layer_populations })
}
