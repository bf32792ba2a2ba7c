//! Pushes a symmetric complex to a finite quotient level and computes
//! Laplacians, harmonic spaces, the middle-dimensional pairing, exact
//! inertia/signature, and normalized invariants.

use crate::chain::{FreeComplex, SymmetricComplex};
use crate::error::{CoreError, Result};
use crate::groups::{GroupTower, TowerLevel};
use crate::linalg::QMatrix;
use crate::ratio::{q_int, Q};
use num::Zero;
use rayon::prelude::*;

/// Everything computed at one tower level.
#[derive(Debug, Clone)]
pub struct QuotientSnapshot {
    pub k: usize,
    /// N_k = [Gamma : Gamma_k].
    pub index: usize,
    /// Pushed differentials c_p[k], p = 1..=dim.
    pub pushed_diffs: Vec<QMatrix>,
    /// Laplacians Delta_p[X_k] for p = 0..=dim.
    pub laplacians: Vec<QMatrix>,
    /// Columns span ker Delta_{2n}[X_k] exactly.
    pub harmonic_basis: QMatrix,
    /// Pairing M = B^T f_{2n}[k] B on the harmonic space.
    pub pairing: QMatrix,
    /// Exact counts (b+, b-, b0) of the pairing.
    pub inertia: (usize, usize, usize),
}

impl QuotientSnapshot {
    pub fn signature(&self) -> i64 {
        self.inertia.0 as i64 - self.inertia.1 as i64
    }

    pub fn sign_normalized(&self) -> Q {
        q_int(self.signature()) / q_int(self.index as i64)
    }

    pub fn row(&self, dim_mid: usize) -> ConvergenceRow {
        let n = q_int(self.index as i64);
        ConvergenceRow {
            k: self.k,
            index: self.index,
            dim_mid: q_int(dim_mid as i64),
            b_plus_norm: q_int(self.inertia.0 as i64) / &n,
            b_minus_norm: q_int(self.inertia.1 as i64) / &n,
            b_zero_norm: q_int(self.inertia.2 as i64) / &n,
            sign_norm: self.sign_normalized(),
        }
    }
}

/// One line of a convergence table, all entries exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceRow {
    pub k: usize,
    pub index: usize,
    /// dim_k C_{2n} = r_{2n}, constant in k.
    pub dim_mid: Q,
    pub b_plus_norm: Q,
    pub b_minus_norm: Q,
    pub b_zero_norm: Q,
    pub sign_norm: Q,
}

/// Pushed Laplacian Delta_p[X_k] = c_{p+1}[k] c_{p+1}[k]^T + c_p[k]^T c_p[k].
pub fn pushed_laplacian(c: &FreeComplex, p: usize, level: &TowerLevel) -> Result<QMatrix> {
    if p > c.dim() {
        return Err(CoreError::DegreeOutOfRange { p, top: c.dim() });
    }
    let up = c.diff(p + 1).push(level)?;
    let down = c.diff(p).push(level)?;
    let a = up.mul(&up.transpose())?;
    let b = down.transpose().mul(&down)?;
    a.add(&b)
}

fn check_compatible(c: &FreeComplex, tower_group: &crate::groups::GroupDescriptor) -> Result<()> {
    if c.group() != tower_group {
        return Err(CoreError::GroupMismatch(
            "complex and tower use different groups".into(),
        ));
    }
    Ok(())
}

/// Computes the full snapshot of a symmetric complex at one level: pushed
/// differentials, Laplacians, an exact harmonic basis in the middle degree,
/// the induced pairing, and its inertia.
///
/// The harmonic identification is the combinatorial Hodge isomorphism: the
/// homology pairing is pr . f . pr restricted to ker Delta_{2n}. Because
/// the Gram matrix B^T B of any kernel basis is positive definite, the
/// inertia of B^T f[k] B equals the inertia of the pairing operator itself,
/// so no orthonormalization is needed and everything stays rational.
pub fn snapshot(s: &SymmetricComplex, level: &TowerLevel) -> Result<QuotientSnapshot> {
    let mid = s.middle_degree()?;
    let base = s.base();
    let dim = base.dim();
    let mut pushed_diffs = Vec::with_capacity(dim);
    for p in 1..=dim {
        pushed_diffs.push(base.diff(p).push(level)?);
    }
    let mut laplacians = Vec::with_capacity(dim + 1);
    for p in 0..=dim {
        laplacians.push(pushed_laplacian(base, p, level)?);
    }
    let harmonic_basis = laplacians[mid].nullspace();
    let f_mid = s.duality(mid).push(level)?;
    let fb = f_mid.mul(&harmonic_basis)?;
    let pairing = harmonic_basis.transpose().mul(&fb)?;
    if let Some((i, j)) = pairing.first_asymmetry() {
        return Err(CoreError::InvariantViolation(format!(
            "harmonic pairing asymmetric at ({i},{j}) on level {}",
            level.k
        )));
    }
    let inertia = pairing.inertia()?;
    // conservation: b+ + b- + b0(pairing) = dim ker Delta_mid
    if inertia.0 + inertia.1 + inertia.2 != harmonic_basis.cols() {
        return Err(CoreError::InvariantViolation(
            "inertia counts do not exhaust the harmonic space".into(),
        ));
    }
    Ok(QuotientSnapshot {
        k: level.k,
        index: level.order(),
        pushed_diffs,
        laplacians,
        harmonic_basis,
        pairing,
        inertia,
    })
}

/// Exact inertia of a symmetric rational matrix (counts of positive,
/// negative, zero eigenvalues) by rational congruence reduction.
pub fn inertia(m: &QMatrix) -> Result<(usize, usize, usize)> {
    m.inertia()
}

/// Normalized Betti number dim_Q ker Delta_p[X_k] / [Gamma:Gamma_k].
pub fn betti_k(c: &FreeComplex, p: usize, level: &TowerLevel) -> Result<Q> {
    let lap = pushed_laplacian(c, p, level)?;
    Ok(q_int(lap.nullity() as i64) / q_int(level.order() as i64))
}

/// dim_k C_p = dim_Q C_p[k] / [Gamma:Gamma_k] = r_p, constant in k.
pub fn dim_k_chains(c: &FreeComplex, p: usize, level: &TowerLevel) -> Q {
    let rp = c.rank(p);
    q_int((rp * level.order()) as i64) / q_int(level.order() as i64)
}

/// Exact count of eigenvalues of a symmetric rational matrix in (a, b].
pub fn spectral_count(m: &QMatrix, a: &Q, b: &Q) -> Result<usize> {
    m.spectral_count(a, b)
}

/// Summary attached to a tower run.
#[derive(Debug, Clone)]
pub struct TowerSummary {
    pub last_sign: Option<Q>,
    /// sign_{k+1} - sign_k along the schedule.
    pub successive_diffs: Vec<Q>,
}

#[derive(Debug, Clone)]
pub struct TowerRun {
    pub rows: Vec<ConvergenceRow>,
    pub summary: TowerSummary,
}

/// Runs the signature driver over every level of the tower, in parallel,
/// with deterministic (schedule-ordered) output.
pub fn run_tower(s: &SymmetricComplex, tower: &GroupTower) -> Result<TowerRun> {
    check_compatible(s.base(), tower.descriptor())?;
    let mid = s.middle_degree()?;
    let dim_mid = s.base().rank(mid);
    let rows: Result<Vec<ConvergenceRow>> = tower
        .levels()
        .par_iter()
        .map(|level| snapshot(s, level).map(|snap| snap.row(dim_mid)))
        .collect();
    let rows = rows?;
    let successive_diffs = rows
        .windows(2)
        .map(|w| &w[1].sign_norm - &w[0].sign_norm)
        .collect();
    let last_sign = rows.last().map(|r| r.sign_norm.clone());
    Ok(TowerRun {
        rows,
        summary: TowerSummary {
            last_sign,
            successive_diffs,
        },
    })
}

/// One line of a Betti convergence table.
#[derive(Debug, Clone)]
pub struct BettiRow {
    pub k: usize,
    pub index: usize,
    /// dim_k C_p per requested degree.
    pub dims: Vec<Q>,
    /// Normalized Betti numbers per requested degree.
    pub betti: Vec<Q>,
}

/// Normalized Betti numbers of a free complex along the tower.
pub fn run_tower_betti(c: &FreeComplex, tower: &GroupTower, degrees: &[usize]) -> Result<Vec<BettiRow>> {
    check_compatible(c, tower.descriptor())?;
    for &p in degrees {
        if p > c.dim() {
            return Err(CoreError::DegreeOutOfRange { p, top: c.dim() });
        }
    }
    tower
        .levels()
        .par_iter()
        .map(|level| {
            let betti: Result<Vec<Q>> = degrees.iter().map(|&p| betti_k(c, p, level)).collect();
            Ok(BettiRow {
                k: level.k,
                index: level.order(),
                dims: degrees.iter().map(|&p| dim_k_chains(c, p, level)).collect(),
                betti: betti?,
            })
        })
        .collect()
}

/// Positive-semidefiniteness check used by diagnostics.
pub fn is_psd(m: &QMatrix) -> Result<bool> {
    let (_, neg, _) = m.inertia()?;
    Ok(neg == 0)
}

/// Convenience: true when the pushed middle pairing is exactly symmetric.
/// Exposed so drivers can distinguish invariant violations (exit code 3)
/// from input validation failures (exit code 2).
pub fn pairing_is_symmetric(s: &SymmetricComplex, level: &TowerLevel) -> Result<bool> {
    match snapshot(s, level) {
        Ok(_) => Ok(true),
        Err(CoreError::InvariantViolation(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Exact zero test helper for convergence assertions.
pub fn is_zero_q(x: &Q) -> bool {
    x.is_zero()
}
