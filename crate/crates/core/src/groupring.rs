//! Exact arithmetic for elements and matrices over the rational group ring
//! QGamma: the *-involution, the von Neumann trace, pushforward to finite
//! quotients, and a priori operator-norm bounds.

use crate::error::{CoreError, Result};
use crate::groups::{GroupDescriptor, GroupElement, TowerLevel};
use crate::linalg::QMatrix;
use crate::ratio::{ceil_sqrt, Q};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

/// An element of QGamma with finite support. Zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<GroupElement, Q>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(g: GroupElement, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g, c);
        }
        GroupRingElement { terms }
    }

    pub fn scalar(group: &GroupDescriptor, c: Q) -> Self {
        Self::monomial(group.identity(), c)
    }

    /// Convenience for tests and builders: sum of (element, coefficient).
    pub fn from_terms(terms: impl IntoIterator<Item = (GroupElement, Q)>) -> Self {
        let mut out = Self::zero();
        for (g, c) in terms {
            out.add_term(g, &c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &GroupElement) -> Q {
        self.terms.get(g).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, g: GroupElement, c: &Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(g) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        GroupRingElement {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GroupRingElement {
            terms: self.terms.iter().map(|(g, x)| (g.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self, group: &GroupDescriptor) -> Result<Self> {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            for (h, d) in &other.terms {
                let gh = group.mul(g, h)?;
                out.add_term(gh, &(c * d));
            }
        }
        Ok(out)
    }

    /// The *-involution: the coefficient of w in the result is the
    /// coefficient of w^-1 in the input. Involutive.
    pub fn involve(&self, group: &GroupDescriptor) -> Result<Self> {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(group.inv(g)?, c);
        }
        Ok(out)
    }

    /// Coefficient of the identity element (the von Neumann trace on 1x1
    /// matrices).
    pub fn identity_coeff(&self, group: &GroupDescriptor) -> Q {
        self.coeff(&group.identity())
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> Q {
        let mut s = Q::zero();
        for c in self.terms.values() {
            s += c.abs();
        }
        s
    }

    pub fn is_integer(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_one())
    }
}

/// A rows x cols matrix over QGamma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GroupRingElement>,
}

impl GroupRingMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GroupRingMatrix {
            rows,
            cols,
            entries: vec![GroupRingElement::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, group: &GroupDescriptor) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, GroupRingElement::scalar(group, Q::one()));
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<GroupRingElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(CoreError::DimensionMismatch {
                op: "from_entries",
                lhs: format!("{rows}x{cols}"),
                rhs: format!("{} entries", entries.len()),
            });
        }
        Ok(GroupRingMatrix { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: GroupRingElement) {
        self.entries[i * self.cols + j] = e;
    }

    pub fn add_to(&mut self, i: usize, j: usize, g: GroupElement, c: &Q) {
        self.entries[i * self.cols + j].add_term(g, c);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::DimensionMismatch {
                op: "add",
                lhs: format!("{}x{}", self.rows, self.cols),
                rhs: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = self.clone();
        for (d, s) in out.entries.iter_mut().zip(other.entries.iter()) {
            *d = d.add(s);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        GroupRingMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self, group: &GroupDescriptor) -> Result<Self> {
        if self.cols != other.rows {
            return Err(CoreError::DimensionMismatch {
                op: "mul",
                lhs: format!("{}x{}", self.rows, self.cols),
                rhs: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b, group)?;
                    let e = out.get(i, j).add(&prod);
                    out.set(i, j, e);
                }
            }
        }
        Ok(out)
    }

    /// The adjoint A*: transpose with involved entries. Satisfies
    /// (AB)* = B* A* and A** = A.
    pub fn adjoint(&self, group: &GroupDescriptor) -> Result<Self> {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).involve(group)?);
            }
        }
        Ok(out)
    }

    pub fn is_self_adjoint(&self, group: &GroupDescriptor) -> Result<bool> {
        Ok(self == &self.adjoint(group)?)
    }

    /// Von Neumann trace: sum over the diagonal of the identity-element
    /// coefficients. Linear, tracial, and positive on A*A.
    pub fn vn_trace(&self, group: &GroupDescriptor) -> Result<Q> {
        if self.rows != self.cols {
            return Err(CoreError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut t = Q::zero();
        for i in 0..self.rows {
            t += self.get(i, i).identity_coeff(group);
        }
        Ok(t)
    }

    /// Pushforward to the level-k quotient: every entry sum lambda_w w is
    /// replaced by sum lambda_w rep(project(w)), producing a rational
    /// matrix of size (rows*|G_k|) x (cols*|G_k|). Functorial in products
    /// and adjoints.
    pub fn push(&self, level: &TowerLevel) -> Result<QMatrix> {
        let n = level.order();
        let mut out = QMatrix::zeros(self.rows * n, self.cols * n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (w, c) in self.get(i, j).terms() {
                    let h = level.project(w)?;
                    let perm = level.rep_perm(h);
                    for (a, &b) in perm.iter().enumerate() {
                        out.add_to(i * n + a, j * n + b, c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Pushforward into the group ring of the finite quotient. The
    /// normalized trace of the pushed rational matrix equals the sum of
    /// identity coefficients of the diagonal here, which makes long
    /// products cheap (|G_k|-fold smaller objects).
    pub fn push_ring(&self, level: &TowerLevel) -> Result<LevelRingMatrix> {
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for e in &self.entries {
            let mut terms: BTreeMap<usize, Q> = BTreeMap::new();
            for (w, c) in e.terms() {
                let h = level.project(w)?;
                let t = terms.entry(h).or_insert_with(Q::zero);
                *t = &*t + c;
            }
            terms.retain(|_, v| !v.is_zero());
            entries.push(terms);
        }
        Ok(LevelRingMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Schur row/column bound K = ceil-sqrt(R*C) with R and C the maximal
    /// row and column sums of entrywise l1 norms. K dominates the operator
    /// norm on l2(Gamma)^cols and the norm of every pushforward and
    /// truncation.
    pub fn norm_bound(&self) -> Q {
        let mut row_max = Q::zero();
        for i in 0..self.rows {
            let mut s = Q::zero();
            for j in 0..self.cols {
                s += self.get(i, j).l1_norm();
            }
            if s > row_max {
                row_max = s;
            }
        }
        let mut col_max = Q::zero();
        for j in 0..self.cols {
            let mut s = Q::zero();
            for i in 0..self.rows {
                s += self.get(i, j).l1_norm();
            }
            if s > col_max {
                col_max = s;
            }
        }
        ceil_sqrt(&(row_max * col_max)).expect("product of non-negative sums")
    }

    /// First entry with a non-integer coefficient, if any.
    pub fn first_non_integer(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).is_integer() {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// A matrix over the group ring Q[G_k] of a finite quotient, entries keyed
/// by the level's element enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelRingMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BTreeMap<usize, Q>>,
}

impl LevelRingMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Self, level: &TowerLevel) -> Result<Self> {
        if self.cols != other.rows {
            return Err(CoreError::DimensionMismatch {
                op: "level ring mul",
                lhs: format!("{}x{}", self.rows, self.cols),
                rhs: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut entries = vec![BTreeMap::<usize, Q>::new(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.entries[i * self.cols + k];
                if a.is_empty() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.entries[k * other.cols + j];
                    if b.is_empty() {
                        continue;
                    }
                    let out = &mut entries[i * other.cols + j];
                    for (&g, c) in a {
                        for (&h, d) in b {
                            let gh = level.mul_index(g, h);
                            let e = out.entry(gh).or_insert_with(Q::zero);
                            *e = &*e + &(c * d);
                        }
                    }
                }
            }
        }
        for e in entries.iter_mut() {
            e.retain(|_, v| !v.is_zero());
        }
        Ok(LevelRingMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    /// (1/|G_k|) tr_Q of the corresponding pushed rational matrix.
    pub fn normalized_trace(&self, level: &TowerLevel) -> Result<Q> {
        if self.rows != self.cols {
            return Err(CoreError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let e = level.identity_index();
        let mut t = Q::zero();
        for i in 0..self.rows {
            if let Some(c) = self.entries[i * self.cols + i].get(&e) {
                t += c;
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupTower;
    use crate::ratio::{q_int, q_ratio};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn z() -> GroupDescriptor {
        GroupDescriptor::free_abelian(1).unwrap()
    }

    fn t_pow(e: i64) -> GroupElement {
        GroupElement::vector(&[e])
    }

    fn laurent(terms: &[(i64, i64)]) -> GroupRingElement {
        GroupRingElement::from_terms(terms.iter().map(|&(e, c)| (t_pow(e), q_int(c))))
    }

    fn mat1(e: GroupRingElement) -> GroupRingMatrix {
        GroupRingMatrix::from_entries(1, 1, vec![e]).unwrap()
    }

    #[test]
    fn involve_examples() {
        let g = z();
        // 3t -> 3t^-1
        assert_eq!(laurent(&[(1, 3)]).involve(&g).unwrap(), laurent(&[(-1, 3)]));
        // 5e fixed
        assert_eq!(laurent(&[(0, 5)]).involve(&g).unwrap(), laurent(&[(0, 5)]));
        // 2t + 7t^-2 -> 2t^-1 + 7t^2
        assert_eq!(
            laurent(&[(1, 2), (-2, 7)]).involve(&g).unwrap(),
            laurent(&[(-1, 2), (2, 7)])
        );
        // involutive
        let x = laurent(&[(2, 3), (-1, -4), (0, 7)]);
        assert_eq!(x.involve(&g).unwrap().involve(&g).unwrap(), x);
    }

    #[test]
    fn adjoint_examples() {
        let g = z();
        assert_eq!(
            mat1(laurent(&[(1, 1)])).adjoint(&g).unwrap(),
            mat1(laurent(&[(-1, 1)]))
        );
        let id = GroupRingMatrix::identity(2, &g);
        assert_eq!(id.adjoint(&g).unwrap(), id);
        // [[0, t],[1, 0]] -> [[0, 1],[t^-1, 0]]
        let m = GroupRingMatrix::from_entries(
            2,
            2,
            vec![
                GroupRingElement::zero(),
                laurent(&[(1, 1)]),
                laurent(&[(0, 1)]),
                GroupRingElement::zero(),
            ],
        )
        .unwrap();
        let exp = GroupRingMatrix::from_entries(
            2,
            2,
            vec![
                GroupRingElement::zero(),
                laurent(&[(0, 1)]),
                laurent(&[(-1, 1)]),
                GroupRingElement::zero(),
            ],
        )
        .unwrap();
        assert_eq!(m.adjoint(&g).unwrap(), exp);
        assert_eq!(m.adjoint(&g).unwrap().adjoint(&g).unwrap(), m);
    }

    #[test]
    fn vn_trace_examples() {
        let g = z();
        assert_eq!(mat1(laurent(&[(1, 1)])).vn_trace(&g).unwrap(), q_int(0));
        assert_eq!(
            mat1(laurent(&[(0, 3), (1, 1)])).vn_trace(&g).unwrap(),
            q_int(3)
        );
        // (t + t^-1)^2 = t^2 + 2 + t^-2 -> 2
        let x = laurent(&[(1, 1), (-1, 1)]);
        let sq = x.mul(&x, &g).unwrap();
        assert_eq!(mat1(sq).vn_trace(&g).unwrap(), q_int(2));
    }

    #[test]
    fn vn_trace_is_tracial_and_positive() {
        let g = z();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..40 {
            let a = random_matrix(&mut rng, 3, 3, 2);
            let b = random_matrix(&mut rng, 3, 3, 2);
            let ab = a.mul(&b, &g).unwrap().vn_trace(&g).unwrap();
            let ba = b.mul(&a, &g).unwrap().vn_trace(&g).unwrap();
            assert_eq!(ab, ba);
            // positivity: tr(A*A) > 0 for nonzero A
            if !a.is_zero() {
                let aa = a.adjoint(&g).unwrap().mul(&a, &g).unwrap();
                let t = aa.vn_trace(&g).unwrap();
                assert!(t.is_positive(), "vn_trace(A*A) must be positive");
            }
        }
    }

    #[test]
    fn push_examples() {
        let g = z();
        let tower = GroupTower::make_tower(&g, &[4]).unwrap();
        let l = &tower.levels()[0];
        // [[t]] at m=4: cyclic shift
        let p = mat1(laurent(&[(1, 1)])).push(l).unwrap();
        let expect = QMatrix::from_int_rows(&[
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![1, 0, 0, 0],
        ]);
        assert_eq!(p, expect);
        // identity pushes to identity
        let id = GroupRingMatrix::identity(2, &g);
        assert_eq!(id.push(l).unwrap(), QMatrix::identity(8));
        // [[2 - t - t^-1]] at m=3: circulant rows (2,-1,-1)
        let tower3 = GroupTower::quotient_sequence(&g, &[3]).unwrap();
        let l3 = &tower3.levels()[0];
        let p = mat1(laurent(&[(0, 2), (1, -1), (-1, -1)])).push(l3).unwrap();
        let expect = QMatrix::from_int_rows(&[
            vec![2, -1, -1],
            vec![-1, 2, -1],
            vec![-1, -1, 2],
        ]);
        assert_eq!(p, expect);
    }

    fn random_element(rng: &mut StdRng, width: i64, max_terms: usize) -> GroupRingElement {
        let mut e = GroupRingElement::zero();
        let terms = rng.gen_range(0..=max_terms);
        for _ in 0..terms {
            let exp = rng.gen_range(-width..=width);
            let num = rng.gen_range(-4i64..=4);
            let den = rng.gen_range(1i64..=3);
            e.add_term(t_pow(exp), &q_ratio(num, den));
        }
        e
    }

    fn random_matrix(rng: &mut StdRng, r: usize, c: usize, width: i64) -> GroupRingMatrix {
        let entries = (0..r * c).map(|_| random_element(rng, width, 3)).collect();
        GroupRingMatrix::from_entries(r, c, entries).unwrap()
    }

    #[test]
    fn push_respects_products_and_adjoints() {
        let g = z();
        let tower = GroupTower::make_tower(&g, &[2, 4, 8]).unwrap();
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 3, 2, 2);
            let b = random_matrix(&mut rng, 2, 4, 2);
            for l in tower.levels() {
                let pa = a.push(l).unwrap();
                let pb = b.push(l).unwrap();
                let pab = a.mul(&b, &g).unwrap().push(l).unwrap();
                assert_eq!(pa.mul(&pb).unwrap(), pab);
                let pastar = a.adjoint(&g).unwrap().push(l).unwrap();
                assert_eq!(pastar, pa.transpose());
            }
        }
    }

    #[test]
    fn push_ring_trace_agrees_with_matrix_trace() {
        let g = z();
        let tower = GroupTower::quotient_sequence(&g, &[3, 5]).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for l in tower.levels() {
            for _ in 0..10 {
                let a = random_matrix(&mut rng, 2, 2, 2);
                let b = random_matrix(&mut rng, 2, 2, 2);
                let dense = a.push(l).unwrap().mul(&b.push(l).unwrap()).unwrap();
                let normalized = dense.trace().unwrap() / crate::ratio::q_int(l.order() as i64);
                let ring = a
                    .push_ring(l)
                    .unwrap()
                    .mul(&b.push_ring(l).unwrap(), l)
                    .unwrap()
                    .normalized_trace(l)
                    .unwrap();
                assert_eq!(normalized, ring);
            }
        }
    }

    /// Trace stabilization: the normalized pushed trace of a monomial in
    /// matrices over Q[Z] equals the von Neumann trace exactly once the
    /// modulus exceeds twice the total support width.
    #[test]
    fn trace_stabilization_z() {
        let g = z();
        let mut rng = StdRng::seed_from_u64(11);
        let width = 2i64;
        let degree = 3usize;
        let tower = GroupTower::quotient_sequence(&g, &[13, 17]).unwrap(); // > 2*3*2
        for _ in 0..25 {
            let hs: Vec<GroupRingMatrix> =
                (0..degree).map(|_| random_matrix(&mut rng, 2, 2, width)).collect();
            let mut prod = hs[0].clone();
            for h in &hs[1..] {
                prod = prod.mul(h, &g).unwrap();
            }
            let vn = prod.vn_trace(&g).unwrap();
            for l in tower.levels() {
                let mut pr = hs[0].push_ring(l).unwrap();
                for h in &hs[1..] {
                    pr = pr.mul(&h.push_ring(l).unwrap(), l).unwrap();
                }
                assert_eq!(pr.normalized_trace(l).unwrap(), vn);
            }
        }
    }

    #[test]
    fn norm_bound_examples() {
        let g = z();
        assert_eq!(mat1(laurent(&[(1, 1)])).norm_bound(), q_int(1));
        assert_eq!(
            mat1(laurent(&[(0, 2), (1, -1), (-1, -1)])).norm_bound(),
            q_int(4)
        );
        assert_eq!(GroupRingMatrix::zeros(2, 3).norm_bound(), q_int(0));
        let _ = g;
    }

    #[test]
    fn norm_bound_dominates_push_spectrum() {
        // eigenvalues of push(2 - t - t^-1) are 2 - 2cos(2 pi j/m) <= 4
        let g = z();
        let a = mat1(laurent(&[(0, 2), (1, -1), (-1, -1)]));
        let k = a.norm_bound();
        let tower = GroupTower::quotient_sequence(&g, &[5, 7]).unwrap();
        for l in tower.levels() {
            let p = a.push(l).unwrap();
            // no eigenvalue beyond K: count of eigenvalues <= K is everything
            assert_eq!(p.eigenvalues_le(&k).unwrap(), l.order());
            let neg_k = -k.clone();
            let (_, below, _) = p.shift_diagonal(&neg_k).inertia().unwrap();
            assert_eq!(below, 0);
        }
    }
}
