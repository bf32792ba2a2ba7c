//! Based free QGamma-chain complexes, dual complexes, mapping cones,
//! suspensions, and symmetric Poincare duality data.

use crate::error::{CoreError, Result};
use crate::groupring::GroupRingMatrix;
use crate::groups::GroupDescriptor;

/// A finitely generated based free chain complex over QGamma.
///
/// `diffs[p-1]` is the differential c_p : C_p -> C_{p-1}, a matrix of shape
/// ranks[p-1] x ranks[p], for p in 1..=dim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeComplex {
    group: GroupDescriptor,
    dim: usize,
    ranks: Vec<usize>,
    diffs: Vec<GroupRingMatrix>,
}

impl FreeComplex {
    pub fn new(
        group: GroupDescriptor,
        ranks: Vec<usize>,
        diffs: Vec<GroupRingMatrix>,
    ) -> Result<Self> {
        if ranks.is_empty() {
            return Err(CoreError::InvalidComplex("no chain modules".into()));
        }
        let dim = ranks.len() - 1;
        if diffs.len() != dim {
            return Err(CoreError::InvalidComplex(format!(
                "expected {} differentials, got {}",
                dim,
                diffs.len()
            )));
        }
        for (p, d) in diffs.iter().enumerate() {
            let p = p + 1;
            if d.rows() != ranks[p - 1] || d.cols() != ranks[p] {
                return Err(CoreError::InvalidComplex(format!(
                    "differential c_{p} has shape {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    ranks[p - 1],
                    ranks[p]
                )));
            }
        }
        let c = FreeComplex {
            group,
            dim,
            ranks,
            diffs,
        };
        if let Some(p) = c.first_square_violation()? {
            return Err(CoreError::InvalidComplex(format!(
                "c_{} . c_{} != 0",
                p,
                p + 1
            )));
        }
        Ok(c)
    }

    /// A complex concentrated in a single degree.
    pub fn concentrated(group: GroupDescriptor, dim: usize, degree: usize, rank: usize) -> Self {
        let mut ranks = vec![0usize; dim + 1];
        ranks[degree] = rank;
        let diffs = (1..=dim)
            .map(|p| GroupRingMatrix::zeros(ranks[p - 1], ranks[p]))
            .collect();
        FreeComplex {
            group,
            dim,
            ranks,
            diffs,
        }
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, p: usize) -> usize {
        self.ranks.get(p).copied().unwrap_or(0)
    }

    /// Differential c_p (zero matrix outside 1..=dim).
    pub fn diff(&self, p: usize) -> GroupRingMatrix {
        if p >= 1 && p <= self.dim {
            self.diffs[p - 1].clone()
        } else if p == self.dim + 1 {
            GroupRingMatrix::zeros(self.rank(self.dim), 0)
        } else {
            GroupRingMatrix::zeros(0, if p == 0 { self.rank(0) } else { 0 })
        }
    }

    fn first_square_violation(&self) -> Result<Option<usize>> {
        for p in 1..self.dim {
            let prod = self.diffs[p - 1].mul(&self.diffs[p], &self.group)?;
            if !prod.is_zero() {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    /// The dual complex C^{N-*}: degree-p module is C_{N-p}, differentials
    /// are adjoints of the originals reindexed. An exact involution.
    pub fn dual(&self) -> Result<FreeComplex> {
        let n = self.dim;
        let ranks: Vec<usize> = (0..=n).map(|p| self.rank(n - p)).collect();
        let mut diffs = Vec::with_capacity(n);
        for p in 1..=n {
            // d_p : D_p = C_{N-p} -> D_{p-1} = C_{N-p+1} is (c_{N-p+1})*
            diffs.push(self.diff(n - p + 1).adjoint(&self.group)?);
        }
        Ok(FreeComplex {
            group: self.group.clone(),
            dim: n,
            ranks,
            diffs,
        })
    }

    /// Degree shift by one; differentials are negated (consistent with the
    /// cone sign convention).
    pub fn suspension(&self) -> FreeComplex {
        let mut ranks = vec![0usize];
        ranks.extend_from_slice(&self.ranks);
        let mut diffs = vec![GroupRingMatrix::zeros(0, self.rank(0))];
        diffs.extend(self.diffs.iter().map(|d| d.neg()));
        FreeComplex {
            group: self.group.clone(),
            dim: self.dim + 1,
            ranks,
            diffs,
        }
    }

    /// Laplacian Delta_p = c_{p+1} c_{p+1}* + c_p* c_p over QGamma.
    pub fn laplacian(&self, p: usize) -> Result<GroupRingMatrix> {
        if p > self.dim {
            return Err(CoreError::DegreeOutOfRange { p, top: self.dim });
        }
        let up = self.diff(p + 1);
        let down = self.diff(p);
        let a = up.mul(&up.adjoint(&self.group)?, &self.group)?;
        let b = down.adjoint(&self.group)?.mul(&down, &self.group)?;
        a.add(&b)
    }
}

/// A chain map f : C -> D, one matrix per degree (f_p of shape
/// rank_D(p) x rank_C(p)).
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub source: FreeComplex,
    pub target: FreeComplex,
    pub maps: Vec<GroupRingMatrix>,
}

impl ChainMap {
    pub fn new(source: FreeComplex, target: FreeComplex, maps: Vec<GroupRingMatrix>) -> Result<Self> {
        let top = source.dim().max(target.dim());
        if maps.len() != top + 1 {
            return Err(CoreError::InvalidComplex(format!(
                "expected {} chain map components, got {}",
                top + 1,
                maps.len()
            )));
        }
        let cm = ChainMap {
            source,
            target,
            maps,
        };
        cm.check()?;
        Ok(cm)
    }

    pub fn map(&self, p: usize) -> GroupRingMatrix {
        self.maps
            .get(p)
            .cloned()
            .unwrap_or_else(|| GroupRingMatrix::zeros(self.target.rank(p), self.source.rank(p)))
    }

    fn check(&self) -> Result<()> {
        let g = self.source.group().clone();
        for (p, f) in self.maps.iter().enumerate() {
            if f.rows() != self.target.rank(p) || f.cols() != self.source.rank(p) {
                return Err(CoreError::InvalidComplex(format!(
                    "chain map component {p} has wrong shape"
                )));
            }
        }
        let top = self.maps.len() - 1;
        for p in 1..=top {
            let lhs = self.target.diff(p).mul(&self.map(p), &g)?;
            let rhs = self.map(p - 1).mul(&self.source.diff(p), &g)?;
            if lhs != rhs {
                return Err(CoreError::InvalidComplex(format!(
                    "not a chain map in degree {p}"
                )));
            }
        }
        Ok(())
    }

    /// Mapping cone: cone_p = D_p + C_{p-1} with differential
    /// [[d_D, f], [0, -d_C]].
    pub fn cone(&self) -> Result<FreeComplex> {
        let g = self.source.group().clone();
        let n = self.source.dim().max(self.target.dim()) + 1;
        let ranks: Vec<usize> = (0..=n)
            .map(|p| self.target.rank(p) + if p > 0 { self.source.rank(p - 1) } else { 0 })
            .collect();
        let mut diffs = Vec::with_capacity(n);
        for p in 1..=n {
            let dd = self.target.diff(p);
            let f = self.map(p - 1);
            let dc = if p >= 2 {
                self.source.diff(p - 1).neg()
            } else {
                GroupRingMatrix::zeros(0, 0)
            };
            let rows = ranks[p - 1];
            let cols = ranks[p];
            let mut m = GroupRingMatrix::zeros(rows, cols);
            let top_rows = self.target.rank(p - 1);
            let left_cols = self.target.rank(p);
            for i in 0..dd.rows() {
                for j in 0..dd.cols() {
                    m.set(i, j, dd.get(i, j).clone());
                }
            }
            for i in 0..f.rows() {
                for j in 0..f.cols() {
                    m.set(i, left_cols + j, f.get(i, j).clone());
                }
            }
            for i in 0..dc.rows() {
                for j in 0..dc.cols() {
                    m.set(top_rows + i, left_cols + j, dc.get(i, j).clone());
                }
            }
            diffs.push(m);
        }
        FreeComplex::new(g, ranks, diffs)
    }
}

/// Symmetric duality data: a based free complex together with a chain map
/// f : C^{N-*} -> C_* . The homotopy f ~ f* is not required as input; its
/// testable shadow (exact symmetry of every harmonic pairing matrix) is
/// asserted wherever pairings are computed.
#[derive(Debug, Clone)]
pub struct SymmetricComplex {
    base: FreeComplex,
    duality: Vec<GroupRingMatrix>,
}

impl SymmetricComplex {
    pub fn new(base: FreeComplex, duality: Vec<GroupRingMatrix>) -> Result<Self> {
        let n = base.dim();
        if duality.len() != n + 1 {
            return Err(CoreError::InvalidComplex(format!(
                "expected {} duality components, got {}",
                n + 1,
                duality.len()
            )));
        }
        let s = SymmetricComplex { base, duality };
        let report = s.validate()?;
        if !report.ok() {
            return Err(CoreError::InvalidComplex(report.describe()));
        }
        Ok(s)
    }

    pub fn base(&self) -> &FreeComplex {
        &self.base
    }

    pub fn group(&self) -> &GroupDescriptor {
        self.base.group()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Middle degree 2n of a 4n-dimensional complex.
    pub fn middle_degree(&self) -> Result<usize> {
        if self.base.dim() % 4 != 0 || self.base.dim() == 0 {
            return Err(CoreError::InvalidComplex(format!(
                "signature requires dimension 4n >= 4, got {}",
                self.base.dim()
            )));
        }
        Ok(self.base.dim() / 2)
    }

    /// Duality component f_p : C^{N-p} -> C_p, shape rank(p) x rank(N-p).
    pub fn duality(&self, p: usize) -> &GroupRingMatrix {
        &self.duality[p]
    }

    /// Checks c.c = 0 and the chain-map condition
    /// c_p f_p = f_{p-1} (c_{N-p+1})* exactly; failures are collected per
    /// degree rather than aborting at the first one.
    pub fn validate(&self) -> Result<ValidationReport> {
        let mut report = ValidationReport::default();
        let g = self.base.group().clone();
        let n = self.base.dim();
        for p in 1..n {
            let prod = self.base.diff(p).mul(&self.base.diff(p + 1), &g)?;
            if !prod.is_zero() {
                report.square_violations.push(p);
            }
        }
        for p in 0..=n {
            let f = &self.duality[p];
            if f.rows() != self.base.rank(p) || f.cols() != self.base.rank(n - p) {
                report.shape_violations.push(p);
            }
        }
        if !report.shape_violations.is_empty() {
            return Ok(report);
        }
        for p in 1..=n {
            let lhs = self.base.diff(p).mul(&self.duality[p], &g)?;
            let dual_diff = self.base.diff(n - p + 1).adjoint(&g)?;
            let rhs = self.duality[p - 1].mul(&dual_diff, &g)?;
            if lhs != rhs {
                report.chain_map_violations.push(p);
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub square_violations: Vec<usize>,
    pub shape_violations: Vec<usize>,
    pub chain_map_violations: Vec<usize>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.square_violations.is_empty()
            && self.shape_violations.is_empty()
            && self.chain_map_violations.is_empty()
    }

    pub fn describe(&self) -> String {
        if self.ok() {
            return "ok".into();
        }
        let mut parts = Vec::new();
        if !self.square_violations.is_empty() {
            parts.push(format!("c.c != 0 at degrees {:?}", self.square_violations));
        }
        if !self.shape_violations.is_empty() {
            parts.push(format!("bad duality shapes at {:?}", self.shape_violations));
        }
        if !self.chain_map_violations.is_empty() {
            parts.push(format!(
                "chain-map condition fails at degrees {:?}",
                self.chain_map_violations
            ));
        }
        parts.join("; ")
    }
}

/// A middle-dimensional algebraic intersection form: a self-adjoint matrix
/// over QGamma, realized as a complex concentrated in degree 2n.
#[derive(Debug, Clone)]
pub struct AlgebraicForm {
    pub group: GroupDescriptor,
    pub matrix: GroupRingMatrix,
    pub n: usize,
}

impl AlgebraicForm {
    pub fn new(group: GroupDescriptor, matrix: GroupRingMatrix, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::InvalidComplex("form parameter n must be >= 1".into()));
        }
        if matrix.rows() != matrix.cols() {
            return Err(CoreError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if !matrix.is_self_adjoint(&group)? {
            return Err(CoreError::NotSelfAdjoint { i: 0, j: 0 });
        }
        Ok(AlgebraicForm { group, matrix, n })
    }

    /// The symmetric complex concentrated in degree 2n with duality given
    /// by the form itself.
    pub fn to_complex(&self) -> Result<SymmetricComplex> {
        let dim = 4 * self.n;
        let middle = 2 * self.n;
        let base = FreeComplex::concentrated(self.group.clone(), dim, middle, self.matrix.rows());
        let mut duality: Vec<GroupRingMatrix> = (0..=dim)
            .map(|p| GroupRingMatrix::zeros(base.rank(p), base.rank(dim - p)))
            .collect();
        duality[middle] = self.matrix.clone();
        SymmetricComplex::new(base, duality)
    }
}

/// from_form in one step.
pub fn from_form(group: &GroupDescriptor, matrix: GroupRingMatrix, n: usize) -> Result<SymmetricComplex> {
    AlgebraicForm::new(group.clone(), matrix, n)?.to_complex()
}
