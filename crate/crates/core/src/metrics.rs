//! Figures of merit: W fidelity, delocalization, entanglement witnesses with
//! their biseparable bounds, Monte-Carlo robustness and circuit-depth bounds.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, DensityMatrix, QuantumState};
use crate::error::{Error, Result};
use crate::linalg::HermitianEigen;
use crate::spectral::TridiagonalHamiltonian;

/// `|<W_N|psi>|^2`.
pub fn w_fidelity_state(psi: &QuantumState) -> f64 {
    let s: C64 = psi.amplitudes().iter().sum();
    s.norm_sqr() / psi.sites() as f64
}

/// `<W_N|rho|W_N>`.
pub fn w_fidelity(rho: &DensityMatrix) -> f64 {
    let n = rho.sites();
    let s: C64 = rho.site_block().iter().sum();
    s.re / n as f64
}

/// [`w_fidelity`] with an explicit register size.
pub fn w_fidelity_checked(rho: &DensityMatrix, n: usize) -> Result<f64> {
    if rho.sites() != n {
        return Err(Error::LengthMismatch { expected: n, found: rho.sites() });
    }
    Ok(w_fidelity(rho))
}

/// Fidelity after removing relative phases: `(sum_i |a_i|)^2 / N`.
pub fn aligned_w_fidelity(psi: &QuantumState) -> f64 {
    let s: f64 = psi.amplitudes().iter().map(|a| a.norm()).sum();
    s * s / psi.sites() as f64
}

/// Applies the frame change `|q_i> -> exp(i phases[i]) |q_i>` to a density matrix.
pub fn rotate_density(rho: &DensityMatrix, phases: &[f64]) -> Result<DensityMatrix> {
    let n = rho.sites();
    if phases.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: phases.len() });
    }
    let u: Vec<C64> = phases.iter().map(|p| C64::from_polar(1.0, *p)).chain([C64::from(1.0)]).collect();
    let m = DMatrix::from_fn(n + 1, n + 1, |i, j| u[i] * rho.matrix()[(i, j)] * u[j].conj());
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// `(N sum_n P_n^2)^-1` of the renormalized site populations.
pub fn delocalization(populations: &[f64]) -> Result<f64> {
    if populations.iter().any(|p| *p < 0.0 || !p.is_finite()) {
        return Err(Error::InvalidInput("populations must be non-negative".into()));
    }
    let total: f64 = populations.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidInput("populations are all zero".into()));
    }
    let ipr: f64 = populations.iter().map(|p| (p / total).powi(2)).sum();
    Ok(1.0 / (populations.len() as f64 * ipr))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Fidelity,
    Tailored,
}

/// `gamma I - |W><W| + beta sum_n |0_n><0_n| (x) |W_{N-1}><W_{N-1}|`.
///
/// Both projectors live in the single-excitation sector, so every expectation
/// reduces to the `(N + 1)`-dimensional site-plus-vacuum block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub sites: usize,
    pub beta: f64,
    pub gamma: f64,
}

/// Witness evaluated on a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub kind: WitnessKind,
    pub beta: f64,
    pub gamma: f64,
    pub expectation: f64,
    /// Expectation divided by that of `I / 2^N`.
    pub normalized: f64,
    /// False when the multistart bound did not reproduce its best value.
    pub bound_converged: bool,
}

impl WitnessResult {
    pub fn certifies(&self) -> bool {
        self.expectation < 0.0
    }
}

/// `|W_N><W_N| - beta sum_n P_n` on sites plus vacuum (vacuum row zero).
pub fn tailored_operator(n: usize, beta: f64) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(n + 1, n + 1);
    let w = 1.0 / n as f64;
    let p = beta / (n as f64 - 1.0);
    for i in 0..n {
        for j in 0..n {
            // sum_n |w_n><w_n| restricted to (i, j): N - 2 shared terms off the
            // diagonal, N - 1 on it
            let shared = if i == j { n as f64 - 1.0 } else { n as f64 - 2.0 };
            a[(i, j)] = C64::from(w - p * shared);
        }
    }
    a
}

impl Witness {
    pub fn fidelity(n: usize) -> Self {
        Witness { kind: WitnessKind::Fidelity, sites: n, beta: 0.0, gamma: (n as f64 - 1.0) / n as f64 }
    }

    fn operator(&self) -> DMatrix<C64> {
        tailored_operator(self.sites, self.beta)
    }

    /// `Tr(W I / 2^N)`.
    pub fn normalization(&self) -> f64 {
        self.gamma + (self.beta * self.sites as f64 - 1.0) / 2f64.powi(self.sites as i32)
    }

    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.sites() != self.sites {
            return Err(Error::LengthMismatch { expected: self.sites, found: rho.sites() });
        }
        let a = self.operator();
        let t: C64 = (a.component_mul(&rho.matrix().transpose())).iter().sum();
        Ok(self.gamma * rho.trace() - t.re)
    }

    /// Expectation on a pure state of the full `2^N` register (bit `n` of the
    /// index is qubit `n`).
    pub fn expectation_full(&self, psi: &DVector<C64>) -> Result<f64> {
        let v = project_low_sector(psi, self.sites)?;
        let a = self.operator();
        Ok(self.gamma * psi.norm_squared() - (v.adjoint() * &a * &v)[(0, 0)].re)
    }

    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<WitnessResult> {
        let expectation = self.expectation(rho)?;
        Ok(WitnessResult {
            kind: self.kind,
            beta: self.beta,
            gamma: self.gamma,
            expectation,
            normalized: expectation / self.normalization().abs(),
            bound_converged: true,
        })
    }
}

/// Sites-plus-vacuum components of a full-register state.
pub fn project_low_sector(psi: &DVector<C64>, n: usize) -> Result<DVector<C64>> {
    if psi.len() != 1 << n {
        return Err(Error::LengthMismatch { expected: 1 << n, found: psi.len() });
    }
    let mut v = DVector::zeros(n + 1);
    for i in 0..n {
        v[i] = psi[1 << i];
    }
    v[n] = psi[0];
    Ok(v)
}

/// `(N - 1)/N - F_W`.
pub fn witness_fidelity(rho: &DensityMatrix) -> WitnessResult {
    Witness::fidelity(rho.sites()).evaluate(rho).expect("dimensions agree by construction")
}

/// Largest expectation of an operator over biseparable pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct BiseparableBound {
    pub gamma: f64,
    /// Qubits on one side of the maximizing cut.
    pub subset: Vec<usize>,
    /// Factors of the maximizing product state (low-sector components for the
    /// sector path, full local states otherwise).
    pub maximizer: (DVector<C64>, DVector<C64>),
    /// At least two restarts on the best cut agree within 1e-6.
    pub converged: bool,
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng)));
    let norm = v.norm();
    v / C64::from(norm)
}

fn top_eigen(m: &DMatrix<C64>) -> (f64, DVector<C64>) {
    let eig = HermitianEigen::new(&(m + m.adjoint()).scale(0.5)).expect("symmetrized input");
    let k = m.nrows() - 1;
    (eig.values[k], eig.vectors.column(k).into_owned())
}

/// Every cut `S | S-bar` with qubit `N - 1` outside `S`, as sorted subsets.
pub fn bipartitions(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << (n - 1))).map(|mask| (0..n).filter(|q| mask >> q & 1 == 1).collect()).collect()
}

#[derive(Clone, Copy)]
enum Embedding {
    /// Operator on sites plus vacuum; factors keep vacuum and one-excitation parts.
    Sector,
    /// Operator on the full `2^N` register.
    Full,
}

impl Embedding {
    fn factor_dim(self, side: &[usize]) -> usize {
        match self {
            Embedding::Sector => side.len() + 1,
            Embedding::Full => 1 << side.len(),
        }
    }

    /// Linear map from the `free` factor to the joint state with the `fixed`
    /// factor held at `y`.
    fn map(self, n: usize, free: &[usize], fixed: &[usize], y: &DVector<C64>) -> DMatrix<C64> {
        match self {
            Embedding::Sector => {
                // factor layout: (vacuum, excitation on side[0], side[1], ...)
                let mut m = DMatrix::zeros(n + 1, free.len() + 1);
                m[(n, 0)] = y[0];
                for (k, &q) in fixed.iter().enumerate() {
                    m[(q, 0)] = y[k + 1];
                }
                for (k, &q) in free.iter().enumerate() {
                    m[(q, k + 1)] = y[0];
                }
                m
            }
            Embedding::Full => {
                let deposit = |bits: usize, side: &[usize]| {
                    side.iter().enumerate().fold(0usize, |acc, (k, &q)| acc | ((bits >> k & 1) << q))
                };
                let mut m = DMatrix::zeros(1 << n, 1 << free.len());
                for xb in 0..1usize << free.len() {
                    let base = deposit(xb, free);
                    for yb in 0..1usize << fixed.len() {
                        m[(base | deposit(yb, fixed), xb)] = y[yb];
                    }
                }
                m
            }
        }
    }
}

fn alternate(
    a: &DMatrix<C64>,
    n: usize,
    s: &[usize],
    sbar: &[usize],
    emb: Embedding,
    rng: &mut ChaCha8Rng,
) -> (f64, DVector<C64>, DVector<C64>) {
    let mut x = random_unit(rng, emb.factor_dim(s));
    let mut y = random_unit(rng, emb.factor_dim(sbar));
    let mut value = f64::NEG_INFINITY;
    for _ in 0..2000 {
        let my = emb.map(n, s, sbar, &y);
        x = top_eigen(&(my.adjoint() * a * &my)).1;
        let mx = emb.map(n, sbar, s, &x);
        let (v, ny) = top_eigen(&(mx.adjoint() * a * &mx));
        y = ny;
        let done = (v - value).abs() < 1e-15;
        value = v;
        if done {
            break;
        }
    }
    (value, x, y)
}

fn bound_over(a: &DMatrix<C64>, n: usize, cuts: &[Vec<usize>], restarts: usize, emb: Embedding) -> BiseparableBound {
    let per_cut: Vec<(f64, DVector<C64>, DVector<C64>, usize)> = cuts
        .par_iter()
        .enumerate()
        .map(|(ci, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_b15e);
            rng.set_stream(ci as u64);
            let sbar: Vec<usize> = (0..n).filter(|q| !s.contains(q)).collect();
            let runs: Vec<_> = (0..restarts.max(1)).map(|_| alternate(a, n, s, &sbar, emb, &mut rng)).collect();
            let best = runs.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
            let agree = runs.iter().filter(|r| best - r.0 < 1e-6).count();
            let (v, x, y) = runs.into_iter().find(|r| r.0 == best).expect("non-empty");
            (v, x, y, agree)
        })
        .collect();
    let (ci, best) = per_cut
        .iter()
        .enumerate()
        .fold((0, &per_cut[0]), |acc, (k, r)| if r.0 > acc.1 .0 { (k, r) } else { acc });
    let mut gamma = best.0;
    if matches!(emb, Embedding::Sector) {
        // factors can sit entirely outside the sector, which scores zero
        gamma = gamma.max(0.0);
    }
    BiseparableBound {
        gamma,
        subset: cuts[ci].clone(),
        maximizer: (best.1.clone(), best.2.clone()),
        converged: best.3 >= 2 || restarts < 2,
    }
}

/// Restarts per cut for biseparable bounds.
pub const BOUND_RESTARTS: usize = 32;

/// Maximum of `<a, b| A |a, b>` over all cuts and product states, by
/// alternating top-eigenvector iteration with multistart.
///
/// `A` is either `(N + 1) x (N + 1)` (sites then vacuum, zero outside that
/// sector) or the full `2^N x 2^N` operator with bit `n` of the index for
/// qubit `n`.
pub fn biseparable_bound(a: &DMatrix<C64>, n: usize) -> Result<BiseparableBound> {
    if !(2..=8).contains(&n) {
        return Err(Error::InvalidInput(format!("biseparable bounds need 2 <= N <= 8, got {n}")));
    }
    crate::linalg::check_hermitian(a)?;
    let emb = if a.nrows() == n + 1 {
        Embedding::Sector
    } else if a.nrows() == 1 << n {
        Embedding::Full
    } else {
        return Err(Error::LengthMismatch { expected: 1 << n, found: a.nrows() });
    };
    Ok(bound_over(a, n, &bipartitions(n), BOUND_RESTARTS, emb))
}

/// Cuts `{0..k} | rest` for `k = 1..N/2`; enough for permutation-symmetric operators.
fn representative_cuts(n: usize) -> Vec<Vec<usize>> {
    (1..=n / 2).map(|k| (0..k).collect()).collect()
}

/// `gamma(beta)` for the tailored witness operator.
pub fn tailored_gamma(n: usize, beta: f64) -> BiseparableBound {
    bound_over(&tailored_operator(n, beta), n, &bipartitions(n), BOUND_RESTARTS, Embedding::Sector)
}

/// Tailored witness with `beta` in `[0, 2]` minimizing the expectation
/// (golden-section search; the expectation is convex in `beta`).
pub fn witness_tailored(rho: &DensityMatrix) -> Result<WitnessResult> {
    let n = rho.sites();
    if n < 3 {
        return Err(Error::InvalidInput(format!("tailored witness needs N >= 3, got {n}")));
    }
    let (fast, all) = (representative_cuts(n), bipartitions(n));
    let eval = |beta: f64, restarts: usize| -> Result<(f64, Witness, bool)> {
        // the operator is permutation invariant, so the search only needs one
        // cut per size; the reported bound still scans every cut
        let cuts = if restarts < BOUND_RESTARTS { &fast } else { &all };
        let bound = bound_over(&tailored_operator(n, beta), n, cuts, restarts, Embedding::Sector);
        let w = Witness { kind: WitnessKind::Tailored, sites: n, beta, gamma: bound.gamma };
        Ok((w.expectation(rho)?, w, bound.converged))
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 2.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = eval(x1, 8)?.0;
    let mut f2 = eval(x2, 8)?.0;
    while hi - lo > 1e-6 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = eval(x1, 8)?.0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = eval(x2, 8)?.0;
        }
    }
    // the interval ends are candidates too (the optimum often sits at beta = 0)
    let mut best: Option<(f64, Witness, bool)> = None;
    for beta in [0.0, 0.5 * (lo + hi), 2.0] {
        let cand = eval(beta, BOUND_RESTARTS)?;
        if best.as_ref().is_none_or(|b| cand.0 < b.0) {
            best = Some(cand);
        }
    }
    let (expectation, w, converged) = best.expect("three candidates");
    Ok(WitnessResult {
        kind: WitnessKind::Tailored,
        beta: w.beta,
        gamma: w.gamma,
        expectation,
        normalized: expectation / w.normalization().abs(),
        bound_converged: converged,
    })
}

/// Monte-Carlo response of a design to Gaussian parameter noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub sigma_rel: f64,
    pub samples: usize,
    pub seed: u64,
    pub delocalization: Vec<f64>,
    pub mean_delocalization: f64,
    pub std_delocalization: f64,
    /// `F_W` of the sample average with per-sample phase alignment (slow drift).
    pub fidelity_drift: f64,
    /// `F_W` of the sample average with the nominal design phases (shot to shot).
    pub fidelity_shot: f64,
}

impl RobustnessReport {
    /// Standard error of the mean delocalization.
    pub fn standard_error(&self) -> f64 {
        self.std_delocalization / (self.samples as f64).sqrt()
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Adds `N(0, (sigma_rel J_max)^2)` to every on-site energy and coupling,
/// propagates to `tau` from `init`, and aggregates. Sample `k` draws from
/// stream `k` of a ChaCha generator seeded with `seed`.
pub fn robustness_mc(
    h: &TridiagonalHamiltonian,
    tau: f64,
    init: usize,
    sigma_rel: f64,
    samples: usize,
    seed: u64,
) -> Result<RobustnessReport> {
    if !(sigma_rel >= 0.0) || !sigma_rel.is_finite() {
        return Err(Error::ParameterOutOfRange { name: "sigma_rel", value: sigma_rel, range: "[0, inf)" });
    }
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sample is required".into()));
    }
    let n = h.len();
    let psi0 = QuantumState::localized(n, init)?;
    let nominal = HermitianEigen::new(&h.to_complex())?.apply(psi0.amplitudes(), tau);
    let nominal_phases: Vec<f64> = nominal.iter().map(|a| -a.arg()).collect();
    let sigma = sigma_rel * h.max_coupling();
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let per_sample: Vec<Result<(f64, f64, f64)>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let onsite = h.onsite().iter().map(|d| d + noise.sample(&mut rng)).collect();
            let couplings = h.couplings().iter().map(|j| j + noise.sample(&mut rng)).collect();
            let hp = TridiagonalHamiltonian::new(onsite, couplings)?;
            let out = HermitianEigen::new(&hp.to_complex())?.apply(psi0.amplitudes(), tau);
            let pops: Vec<f64> = out.iter().map(|a| a.norm_sqr()).collect();
            let aligned: f64 = out.iter().map(|a| a.norm()).sum();
            let shot: C64 = out.iter().zip(&nominal_phases).map(|(a, p)| a * C64::from_polar(1.0, *p)).sum();
            Ok((delocalization(&pops)?, aligned * aligned / n as f64, shot.norm_sqr() / n as f64))
        })
        .collect();
    let per_sample = per_sample.into_iter().collect::<Result<Vec<_>>>()?;
    let deloc: Vec<f64> = per_sample.iter().map(|s| s.0).collect();
    let (mean, std) = mean_std(&deloc);
    let fidelity_drift = per_sample.iter().map(|s| s.1).sum::<f64>() / samples as f64;
    let fidelity_shot = per_sample.iter().map(|s| s.2).sum::<f64>() / samples as f64;
    Ok(RobustnessReport {
        sigma_rel,
        samples,
        seed,
        delocalization: deloc,
        mean_delocalization: mean,
        std_delocalization: std,
        fidelity_drift,
        fidelity_shot,
    })
}

/// Register geometry for circuit-depth comparisons (centred initialization).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Geometry {
    Chain { sites: usize },
    /// `side x side` square grid.
    Grid { side: usize },
}

impl Geometry {
    pub fn sites(self) -> usize {
        match self {
            Geometry::Chain { sites } => sites,
            Geometry::Grid { side } => side * side,
        }
    }
}

/// Default per-layer gate angle cap.
pub const THETA_MAX: f64 = PI / 2.0;

/// Lower bound on a nearest-neighbour circuit preparing the W state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingModel {
    pub geometry: Geometry,
    /// rad/ns
    pub jmax: f64,
    pub theta_max: f64,
    /// Largest Manhattan distance from the initialized site.
    pub d1_max: usize,
    /// Largest Chebyshev distance from the initialized site.
    pub dinf_max: usize,
    /// Circuit layers `T_min`.
    pub layers: usize,
}

impl ScalingModel {
    /// `theta_max / (2 J_max)` per layer, in ns.
    pub fn layer_time(&self) -> f64 {
        self.theta_max / (2.0 * self.jmax)
    }

    pub fn circuit_time(&self) -> f64 {
        self.layers as f64 * self.layer_time()
    }

    /// Single-step synthesis time of a design with cost `J_max tau`.
    pub fn single_step_time(&self, jmax_tau: f64) -> f64 {
        jmax_tau / self.jmax
    }
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 { 0 } else { (usize::BITS - (n - 1).leading_zeros()) as usize }
}

/// Chains need `ceil(N / 2)` layers; `L x L` grids
/// `max(ceil(log2 L^2), 2 floor(L / 2))`.
pub fn circuit_lower_bound(geometry: Geometry, jmax: f64) -> Result<ScalingModel> {
    if !(jmax > 0.0) {
        return Err(Error::ParameterOutOfRange { name: "jmax", value: jmax, range: "(0, inf)" });
    }
    let (d1_max, dinf_max, layers) = match geometry {
        Geometry::Chain { sites } if sites >= 1 => (sites / 2, sites / 2, sites.div_ceil(2)),
        Geometry::Grid { side } if side >= 1 => {
            let half = side / 2;
            (2 * half, half, ceil_log2(side * side).max(2 * half))
        }
        _ => return Err(Error::InvalidInput("geometry must have at least one site".into())),
    };
    Ok(ScalingModel { geometry, jmax, theta_max: THETA_MAX, d1_max, dinf_max, layers })
}

/// One size in a scaling comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub geometry: Geometry,
    pub sites: usize,
    pub jmax_tau: f64,
    pub single_step_ns: f64,
    pub layers: usize,
    pub circuit_ns: f64,
}

/// Designed single-step times next to circuit bounds for chains `2..=chain_max`
/// and square grids `2..=grid_max`, at a shared `J_max` (rad/ns).
pub fn scaling_table(
    chain_max: usize,
    grid_max: usize,
    jmax: f64,
    options: &crate::designer::DesignOptions,
) -> Result<Vec<ScalingRow>> {
    let mut rows = Vec::new();
    for n in 2..=chain_max {
        let rec = crate::designer::design_chain(n, n / 2, 1.0, options)?;
        let model = circuit_lower_bound(Geometry::Chain { sites: n }, jmax)?;
        rows.push(ScalingRow {
            geometry: model.geometry,
            sites: n,
            jmax_tau: rec.jmax_tau,
            single_step_ns: model.single_step_time(rec.jmax_tau),
            layers: model.layers,
            circuit_ns: model.circuit_time(),
        });
    }
    for side in 2..=grid_max {
        let grid = crate::designer::design_grid(side, side, 1.0, options)?;
        let model = circuit_lower_bound(Geometry::Grid { side }, jmax)?;
        rows.push(ScalingRow {
            geometry: model.geometry,
            sites: side * side,
            jmax_tau: grid.jmax_tau(),
            single_step_ns: model.single_step_time(grid.jmax_tau()),
            layers: model.layers,
            circuit_ns: model.circuit_time(),
        });
    }
    Ok(rows)
}

/// Phase-aligned W fidelity of a Lindblad state, using the frame that aligns
/// the noiseless state `reference`.
pub fn aligned_mixed_fidelity(rho: &DensityMatrix, reference: &QuantumState) -> Result<f64> {
    let (_, phases) = dynamics::phase_align(reference);
    Ok(w_fidelity(&rotate_density(rho, &phases)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fidelity_examples() {
        let w = DensityMatrix::from_state(&QuantumState::w_state(5));
        assert!((w_fidelity(&w) - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed_single_excitation(4);
        assert!((w_fidelity(&mixed) - 0.25).abs() < 1e-15);
        let loc = QuantumState::localized(6, 0).unwrap();
        assert!((w_fidelity_state(&loc) - 1.0 / 6.0).abs() < 1e-15);
        assert!(w_fidelity_checked(&mixed, 5).is_err());
    }

    #[test]
    fn delocalization_examples() {
        assert!((delocalization(&[0.25; 4]).unwrap() - 1.0).abs() < 1e-15);
        assert!((delocalization(&[1.0, 0.0, 0.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((delocalization(&[0.5, 0.5, 0.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(delocalization(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn fidelity_witness_values() {
        let w6 = DensityMatrix::from_state(&QuantumState::w_state(6));
        assert!((witness_fidelity(&w6).expectation + 1.0 / 6.0).abs() < 1e-15);
        let loc = DensityMatrix::from_state(&QuantumState::localized(6, 2).unwrap());
        assert!(witness_fidelity(&loc).expectation >= 0.0);
    }

    #[test]
    fn bound_of_w_projector() {
        for n in 3..=5 {
            let b = biseparable_bound(&tailored_operator(n, 0.0), n).unwrap();
            assert!((b.gamma - (n as f64 - 1.0) / n as f64).abs() < 1e-6, "{n}: {}", b.gamma);
        }
    }

    #[test]
    fn bound_of_identity_and_ghz() {
        let n = 3;
        let b = biseparable_bound(&DMatrix::identity(8, 8), n).unwrap();
        assert!((b.gamma - 1.0).abs() < 1e-9);
        let mut ghz = DVector::<C64>::zeros(8);
        ghz[0] = C64::from(0.5f64.sqrt());
        ghz[7] = C64::from(0.5f64.sqrt());
        let b = biseparable_bound(&(&ghz * ghz.adjoint()), n).unwrap();
        assert!((b.gamma - 0.5).abs() < 1e-6, "{}", b.gamma);
    }

    #[test]
    fn tailored_witness_on_ideal_and_excluded_states() {
        let w7 = DensityMatrix::from_state(&QuantumState::w_state(7));
        let r = witness_tailored(&w7).unwrap();
        assert!(r.normalized < 0.0);
        // |0_1> (x) |W_6>
        let amps = DVector::from_fn(7, |i, _| if i == 0 { C64::from(0.0) } else { C64::from(1.0 / 6f64.sqrt()) });
        let sep = DensityMatrix::from_state(&QuantumState::new(amps, C64::from(0.0)).unwrap());
        assert!(witness_tailored(&sep).unwrap().expectation >= -1e-9);
    }

    #[test]
    fn circuit_bounds() {
        assert_eq!(circuit_lower_bound(Geometry::Chain { sites: 7 }, 1.0).unwrap().layers, 4);
        assert_eq!(circuit_lower_bound(Geometry::Grid { side: 7 }, 1.0).unwrap().layers, 6);
        let m = circuit_lower_bound(Geometry::Grid { side: 7 }, 1.0).unwrap();
        assert_eq!((m.d1_max, m.dinf_max), (6, 3));
        assert_eq!(circuit_lower_bound(Geometry::Chain { sites: 3 }, 1.0).unwrap().layers, 2);
    }

    #[test]
    fn zero_noise_is_deterministic() {
        let h = crate::spectral::krawtchouk_hamiltonian(0.5, 5, 1.0).unwrap();
        let r = robustness_mc(&h, 1.0, 2, 0.0, 8, 3).unwrap();
        assert!(r.std_delocalization < 1e-15);
        assert!(r.delocalization.windows(2).all(|w| w[0] == w[1]));
    }
}
