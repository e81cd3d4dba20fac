//! Jacobi-matrix synthesis from spectral data.
//!
//! A real symmetric tridiagonal chain Hamiltonian is fixed by its ordered
//! eigenvalues and by the squared first components of its eigenvectors (the
//! spectral weights). [`reconstruct_tridiagonal`] goes from spectral data to the
//! chain through a Stieltjes recurrence on the discrete measure
//! `sum_m w_m delta(lambda - lambda_m)`; [`spectral_data`] goes the other way.
//!
//! The three parametrized families used for W-state synthesis live here as
//! well: mirror-symmetric chains with a partly gridded spectrum, resonant
//! chains with a reflection-symmetric spectrum, and the generalized
//! Krawtchouk (antisymmetric) chains with a linear spectrum.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::{Error, Result};

/// Tolerance on the normalization of spectral weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Relative eigenvalue gap (against the spectral width) below which the
/// spectrum is rejected as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-9;

/// Ordered eigenvalues in rad/ns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidInput("spectrum must contain at least one eigenvalue".into()));
        }
        if let Some(i) = eigenvalues.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("eigenvalue {i} is not finite")));
        }
        if let Some(i) = eigenvalues.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotIncreasing { index: i + 1 });
        }
        Ok(Spectrum { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn width(&self) -> f64 {
        self.eigenvalues[self.len() - 1] - self.eigenvalues[0]
    }

    /// Rejects gaps smaller than [`DEGENERATE_GAP`] times the spectral width.
    pub fn check_nondegenerate(&self) -> Result<()> {
        let threshold = DEGENERATE_GAP * self.width();
        for (i, w) in self.eigenvalues.windows(2).enumerate() {
            let gap = w[1] - w[0];
            if gap < threshold {
                return Err(Error::DegenerateSpectrum { index: i + 1, gap, threshold });
            }
        }
        Ok(())
    }
}

/// Squared first eigenvector components, strictly positive and summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralWeights {
    weights: Vec<f64>,
}

impl SpectralWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::check_positive(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(SpectralWeights { weights })
    }

    /// Normalizes positive, unnormalized weights.
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        Self::check_positive(&weights)?;
        let sum: f64 = weights.iter().sum();
        Ok(SpectralWeights { weights: weights.into_iter().map(|w| w / sum).collect() })
    }

    fn check_positive(weights: &[f64]) -> Result<()> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("weights must not be empty".into()));
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        Ok(())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Chain Hamiltonian with on-site energies and nearest-neighbour couplings,
/// both in rad/ns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalHamiltonian {
    onsite: Vec<f64>,
    couplings: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(onsite: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if onsite.is_empty() {
            return Err(Error::InvalidInput("chain must have at least one site".into()));
        }
        if couplings.len() + 1 != onsite.len() {
            return Err(Error::LengthMismatch { expected: onsite.len() - 1, found: couplings.len() });
        }
        if onsite.iter().chain(&couplings).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite Hamiltonian entry".into()));
        }
        Ok(TridiagonalHamiltonian { onsite, couplings })
    }

    /// Uniform chain with constant coupling and zero detuning.
    pub fn uniform(sites: usize, coupling: f64) -> Result<Self> {
        Self::new(vec![0.0; sites], vec![coupling; sites.saturating_sub(1)])
    }

    pub fn len(&self) -> usize {
        self.onsite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsite.is_empty()
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// `max_n |J_n|`, zero for a single site.
    pub fn max_coupling(&self) -> f64 {
        self.couplings.iter().fold(0.0, |m, j| m.max(j.abs()))
    }

    /// The chain read back to front.
    pub fn mirrored(&self) -> Self {
        let mut onsite = self.onsite.clone();
        let mut couplings = self.couplings.clone();
        onsite.reverse();
        couplings.reverse();
        TridiagonalHamiltonian { onsite, couplings }
    }

    /// Same chain with every coupling replaced by its magnitude.
    pub fn with_positive_couplings(&self) -> Self {
        TridiagonalHamiltonian {
            onsite: self.onsite.clone(),
            couplings: self.couplings.iter().map(|j| j.abs()).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut h = DMatrix::zeros(n, n);
        for (i, d) in self.onsite.iter().enumerate() {
            h[(i, i)] = *d;
        }
        for (i, j) in self.couplings.iter().enumerate() {
            h[(i, i + 1)] = *j;
            h[(i + 1, i)] = *j;
        }
        h
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.to_dense().map(|v| Complex64::new(v, 0.0))
    }
}

/// Identifies one of the three parametrized solution families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Symmetric,
    Resonant,
    Antisymmetric,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Symmetric => "symmetric",
            Family::Resonant => "resonant",
            Family::Antisymmetric => "antisymmetric",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(Family::Symmetric),
            "resonant" => Ok(Family::Resonant),
            "antisymmetric" => Ok(Family::Antisymmetric),
            other => Err(Error::InvalidInput(format!("unknown family `{other}`"))),
        }
    }
}

/// Free parameters of a solution family for a chain of fixed length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilyParams {
    /// Gap ratios `gamma_m` of the odd-indexed eigenvalues.
    Symmetric { gaps: Vec<f64> },
    /// Gap ratios plus the global spectral scale `d`.
    Resonant { gaps: Vec<f64>, scale: f64 },
    /// Weight parameters `p_k` of the generalized Krawtchouk weights.
    Antisymmetric { p: Vec<f64> },
}

impl FamilyParams {
    /// Standard Krawtchouk point `p_k = p` for all `k`.
    pub fn krawtchouk(p: f64, sites: usize) -> Self {
        FamilyParams::Antisymmetric { p: vec![p; sites.saturating_sub(1)] }
    }

    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Symmetric { .. } => Family::Symmetric,
            FamilyParams::Resonant { .. } => Family::Resonant,
            FamilyParams::Antisymmetric { .. } => Family::Antisymmetric,
        }
    }

    /// Flattened parameter vector (`d` last for the resonant family).
    pub fn values(&self) -> Vec<f64> {
        match self {
            FamilyParams::Symmetric { gaps } => gaps.clone(),
            FamilyParams::Resonant { gaps, scale } => {
                let mut v = gaps.clone();
                v.push(*scale);
                v
            }
            FamilyParams::Antisymmetric { p } => p.clone(),
        }
    }

    /// Inverse of [`FamilyParams::values`].
    pub fn from_values(family: Family, values: &[f64]) -> Self {
        match family {
            Family::Symmetric => FamilyParams::Symmetric { gaps: values.to_vec() },
            Family::Resonant => {
                let (scale, gaps) = values.split_last().expect("resonant parameters include the scale");
                FamilyParams::Resonant { gaps: gaps.to_vec(), scale: *scale }
            }
            Family::Antisymmetric => FamilyParams::Antisymmetric { p: values.to_vec() },
        }
    }

    /// Number of free values for a chain of `sites` sites.
    pub fn dimension(family: Family, sites: usize) -> usize {
        match family {
            Family::Symmetric => sites.saturating_sub(1) / 2,
            Family::Resonant => sites.saturating_sub(1) / 4 + 1,
            Family::Antisymmetric => sites.saturating_sub(1),
        }
    }

    pub fn spectral_data(&self, sites: usize, tau: f64) -> Result<(Spectrum, SpectralWeights)> {
        match self {
            FamilyParams::Symmetric { gaps } => {
                let s = symmetric_spectrum(gaps, tau, sites)?;
                let w = mirror_symmetric_weights(&s)?;
                Ok((s, w))
            }
            FamilyParams::Resonant { gaps, scale } => {
                let s = resonant_spectrum(gaps, *scale, tau, sites)?;
                let w = mirror_symmetric_weights(&s)?;
                Ok((s, w))
            }
            FamilyParams::Antisymmetric { p } => antisymmetric_spectral_data(p, tau, sites),
        }
    }

    pub fn hamiltonian(&self, sites: usize, tau: f64) -> Result<TridiagonalHamiltonian> {
        let (s, w) = self.spectral_data(sites, tau)?;
        reconstruct_tridiagonal(&s, &w)
    }
}

/// Output of the Stieltjes procedure: recurrence coefficients plus the
/// orthonormal polynomials evaluated on the spectrum (`polys[n][m]`).
pub(crate) struct Recurrence<T> {
    pub onsite: Vec<T>,
    pub couplings: Vec<T>,
    pub polys: Vec<Vec<T>>,
}

fn weighted_dot<T: Real>(w: &[T], a: &[T], b: &[T]) -> T {
    let mut acc = T::cst(0.0, &w[0]);
    for ((wm, am), bm) in w.iter().zip(a).zip(b) {
        acc = acc + wm.clone() * am.clone() * bm.clone();
    }
    acc
}

/// Stieltjes recurrence with two passes of full reorthogonalization against
/// every earlier polynomial.
pub(crate) fn stieltjes<T: Real>(lam: &[T], w: &[T]) -> Result<Recurrence<T>> {
    let m = lam.len();
    let scale = lam.iter().fold(0.0f64, |a, l| a.max(l.value().abs())).max(f64::MIN_POSITIVE);
    let mut polys: Vec<Vec<T>> = vec![vec![T::cst(1.0, &w[0]); m]];
    let mut onsite = Vec::with_capacity(m);
    let mut couplings: Vec<T> = Vec::with_capacity(m.saturating_sub(1));
    for n in 0..m {
        let lp: Vec<T> = lam.iter().zip(&polys[n]).map(|(l, p)| l.clone() * p.clone()).collect();
        let d = weighted_dot(w, &lp, &polys[n]);
        onsite.push(d.clone());
        if n + 1 == m {
            break;
        }
        let mut r: Vec<T> = lp
            .iter()
            .zip(&polys[n])
            .map(|(a, p)| a.clone() - d.clone() * p.clone())
            .collect();
        if n > 0 {
            let j = couplings[n - 1].clone();
            for (ri, pi) in r.iter_mut().zip(&polys[n - 1]) {
                *ri = ri.clone() - j.clone() * pi.clone();
            }
        }
        for _ in 0..2 {
            for k in 0..=n {
                let c = weighted_dot(w, &r, &polys[k]);
                for (ri, pk) in r.iter_mut().zip(&polys[k]) {
                    *ri = ri.clone() - c.clone() * pk.clone();
                }
            }
        }
        let norm2 = weighted_dot(w, &r, &r);
        if !(norm2.value() > 1e-26 * scale * scale) {
            return Err(Error::RecurrenceBreakdown { index: n + 1 });
        }
        let norm = norm2.sqrt();
        polys.push(r.into_iter().map(|x| x / norm.clone()).collect());
        couplings.push(norm);
    }
    Ok(Recurrence { onsite, couplings, polys })
}

/// Rebuilds the chain whose eigenvalues are `spectrum` and whose first-site
/// spectral weights are `weights`. Couplings come out positive.
pub fn reconstruct_tridiagonal(
    spectrum: &Spectrum,
    weights: &SpectralWeights,
) -> Result<TridiagonalHamiltonian> {
    if spectrum.len() != weights.len() {
        return Err(Error::LengthMismatch { expected: spectrum.len(), found: weights.len() });
    }
    let sum: f64 = weights.weights().iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::NotNormalized { sum });
    }
    spectrum.check_nondegenerate()?;
    let rec = stieltjes(spectrum.eigenvalues(), weights.weights())?;
    TridiagonalHamiltonian::new(rec.onsite, rec.couplings)
}

/// Eigenvalues (increasing) and first-site weights of a chain.
pub fn spectral_data(h: &TridiagonalHamiltonian) -> Result<(Spectrum, SpectralWeights)> {
    if let Some(i) = h.couplings().iter().position(|j| *j == 0.0) {
        return Err(Error::InvalidInput(format!("coupling {i} vanishes; chain is disconnected")));
    }
    let eig = SymmetricEigen::new(h.to_dense());
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let weights: Vec<f64> = order
        .iter()
        .map(|&k| {
            let column = eig.eigenvectors.column(k);
            let peak = column.iamax();
            twisted_first_weight(h.onsite(), h.couplings(), eig.eigenvalues[k], peak)
        })
        .collect();
    Ok((Spectrum::new(values)?, SpectralWeights::from_unnormalized(weights)?))
}

// Squared first component of the unit eigenvector for `lambda`. The vector is
// grown by the three-term recurrence from both chain ends towards its peak, so
// small components near site 0 keep full relative accuracy.
fn twisted_first_weight(a: &[f64], b: &[f64], lambda: f64, peak: usize) -> f64 {
    let m = a.len();
    if m == 1 {
        return 1.0;
    }
    let mut v = vec![0.0; m];
    v[0] = 1.0;
    for k in 0..peak {
        let prev = if k > 0 { b[k - 1] * v[k - 1] } else { 0.0 };
        v[k + 1] = ((lambda - a[k]) * v[k] - prev) / b[k];
        let big = v[k + 1].abs();
        if big > 1e100 {
            v[..=k + 1].iter_mut().for_each(|x| *x /= big);
        }
    }
    let mut x = vec![0.0; m];
    x[m - 1] = 1.0;
    for k in (peak + 1..m).rev() {
        let next = if k + 1 < m { b[k] * x[k + 1] } else { 0.0 };
        x[k - 1] = ((lambda - a[k]) * x[k] - next) / b[k - 1];
        let big = x[k - 1].abs();
        if big > 1e100 {
            x[k - 1..].iter_mut().for_each(|y| *y /= big);
        }
    }
    let (left, right) = (v[peak], x[peak]);
    let mut norm = 0.0;
    for k in 0..m {
        let c = if k <= peak { v[k] / left } else { x[k] / right };
        norm += c * c;
    }
    (v[0] / left).powi(2) / norm
}

/// Weights that make the reconstructed chain mirror-symmetric:
/// `w_m` proportional to `1 / |prod_{i != m} (lambda_m - lambda_i)|`.
pub fn mirror_symmetric_weights(spectrum: &Spectrum) -> Result<SpectralWeights> {
    if spectrum.len() < 2 {
        return Err(Error::InvalidInput("mirror-symmetric weights need at least two eigenvalues".into()));
    }
    spectrum.check_nondegenerate()?;
    let log_w = mirror_log_weights(spectrum.eigenvalues());
    let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    SpectralWeights::from_unnormalized(log_w.iter().map(|l| (l - top).exp()).collect())
}

pub(crate) fn mirror_log_weights<T: Real>(lam: &[T]) -> Vec<T> {
    (0..lam.len())
        .map(|m| {
            let mut acc = T::cst(0.0, &lam[0]);
            for (i, li) in lam.iter().enumerate() {
                if i != m {
                    let gap = if i < m { lam[m].clone() - li.clone() } else { li.clone() - lam[m].clone() };
                    acc = acc - gap.ln();
                }
            }
            acc
        })
        .collect()
}

fn check_unit_interval(name: &'static str, values: &[f64]) -> Result<()> {
    for &value in values {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::ParameterOutOfRange { name, value, range: "(0, 1)" });
        }
    }
    Ok(())
}

fn check_odd(sites: usize) -> Result<()> {
    if sites < 3 || sites % 2 == 0 {
        return Err(Error::InvalidInput(format!("family requires an odd chain of at least 3 sites, got {sites}")));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::ParameterOutOfRange { name: "tau", value: tau, range: "(0, inf)" });
    }
    Ok(())
}

pub(crate) fn symmetric_eigenvalues<T: Real>(gaps: &[T], tau: f64, sites: usize) -> Vec<T> {
    let n = sites - 1;
    let like = &gaps[0];
    let step = PI / tau;
    let mut lam: Vec<T> = Vec::with_capacity(sites);
    lam.push(T::cst(step * (0.0 - n as f64 / 4.0), like));
    for (m, g) in gaps.iter().enumerate() {
        let upper = T::cst(step * ((m + 1) as f64 - n as f64 / 4.0), like);
        let lower = lam[2 * m].clone();
        let odd = g.clone() * upper.clone() + (T::cst(1.0, like) - g.clone()) * lower;
        lam.push(odd);
        lam.push(upper);
    }
    lam
}

/// Spectrum of the mirror-symmetric family: even-indexed eigenvalues on a grid
/// of spacing `pi / tau` centred on zero, odd-indexed ones at relative positions
/// `gamma_m` between their neighbours.
pub fn symmetric_spectrum(gaps: &[f64], tau: f64, sites: usize) -> Result<Spectrum> {
    check_odd(sites)?;
    check_tau(tau)?;
    if gaps.len() != (sites - 1) / 2 {
        return Err(Error::LengthMismatch { expected: (sites - 1) / 2, found: gaps.len() });
    }
    check_unit_interval("gamma", gaps)?;
    Spectrum::new(symmetric_eigenvalues(gaps, tau, sites))
}

pub(crate) fn resonant_eigenvalues<T: Real>(gaps: &[T], scale: &T, tau: f64, sites: usize) -> Vec<T> {
    let n = sites - 1;
    let half = n / 2;
    let zero = T::cst(0.0, scale);
    let grid = |k: usize| scale.clone() * T::cst(PI / tau * (k as f64 / 2.0 - n as f64 / 4.0), scale);
    let mut lower: Vec<T> = vec![zero.clone(); half + 1];
    for k in (0..=half).step_by(2) {
        lower[k] = grid(k);
    }
    if half % 2 == 1 {
        lower[half] = zero.clone();
    }
    for (m, g) in gaps.iter().enumerate() {
        let k = 2 * m + 1;
        lower[k] = g.clone() * lower[k + 1].clone() + (T::cst(1.0, scale) - g.clone()) * lower[k - 1].clone();
    }
    let mut lam = lower.clone();
    for k in (0..half).rev() {
        lam.push(-lower[k].clone());
    }
    lam
}

/// Reflection-symmetric spectrum of the resonant family with global scale `d`.
///
/// Only odd-indexed eigenvalues strictly below the centre carry a free gap
/// ratio; when the centre index is odd its eigenvalue is pinned to zero.
pub fn resonant_spectrum(gaps: &[f64], scale: f64, tau: f64, sites: usize) -> Result<Spectrum> {
    check_odd(sites)?;
    check_tau(tau)?;
    let expected = (sites - 1) / 4;
    if gaps.len() != expected {
        return Err(Error::LengthMismatch { expected, found: gaps.len() });
    }
    check_unit_interval("gamma", gaps)?;
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::ParameterOutOfRange { name: "d", value: scale, range: "(0, 1]" });
    }
    Spectrum::new(resonant_eigenvalues(gaps, &scale, tau, sites))
}

pub(crate) fn antisymmetric_log_weights<T: Real>(p: &[T]) -> Vec<T> {
    let sites = p.len() + 1;
    let like = &p[0];
    let mut out = Vec::with_capacity(sites);
    let mut acc = T::cst(0.0, like);
    for m in 0..sites {
        if m > 0 {
            let pk = p[m - 1].clone();
            acc = acc + pk.ln() - (T::cst(1.0, like) - pk).ln();
        }
        out.push(acc.clone() - T::cst(ln_factorial(m) + ln_factorial(sites - 1 - m), like));
    }
    out
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub(crate) fn linear_eigenvalues(tau: f64, sites: usize) -> Vec<f64> {
    (0..sites).map(|m| PI / tau * (m as f64 - (sites as f64 - 1.0) / 2.0)).collect()
}

/// Linear spectrum of spacing `pi / tau` with generalized Krawtchouk weights
/// `w_m ~ prod_{k <= m} (p_k / (1 - p_k)) / (m! (M - 1 - m)!)`.
pub fn antisymmetric_spectral_data(p: &[f64], tau: f64, sites: usize) -> Result<(Spectrum, SpectralWeights)> {
    if sites < 2 {
        return Err(Error::InvalidInput("antisymmetric family needs at least two sites".into()));
    }
    check_tau(tau)?;
    if p.len() != sites - 1 {
        return Err(Error::LengthMismatch { expected: sites - 1, found: p.len() });
    }
    check_unit_interval("p", p)?;
    let log_w = antisymmetric_log_weights(p);
    let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights = SpectralWeights::from_unnormalized(log_w.iter().map(|l| (l - top).exp()).collect())?;
    Ok((Spectrum::new(linear_eigenvalues(tau, sites))?, weights))
}

/// Closed-form Krawtchouk chain:
/// `|J_m| = (pi/tau) sqrt(p (1-p) m (M-m))`, `Delta_m = (pi/tau)(1-2p)(m-(M+1)/2)`.
pub fn krawtchouk_hamiltonian(p: f64, sites: usize, tau: f64) -> Result<TridiagonalHamiltonian> {
    check_unit_interval("p", &[p])?;
    check_tau(tau)?;
    if sites < 2 {
        return Err(Error::InvalidInput("Krawtchouk chain needs at least two sites".into()));
    }
    let k = PI / tau;
    let mf = sites as f64;
    let onsite = (1..=sites).map(|m| k * (1.0 - 2.0 * p) * (m as f64 - (mf + 1.0) / 2.0)).collect();
    let couplings = (1..sites)
        .map(|m| k * (p * (1.0 - p) * m as f64 * (mf - m as f64)).sqrt())
        .collect();
    TridiagonalHamiltonian::new(onsite, couplings)
}
