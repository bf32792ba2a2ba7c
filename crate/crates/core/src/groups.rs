//! Deck groups, towers of finite quotients, and their regular
//! representations.
//!
//! Supported families: the trivial group, finite groups given by an
//! explicit multiplication table, and free abelian groups Z^n. These all
//! admit exactly computable finite quotients and an independent L2-oracle.
//! The representation is kept open so further residually finite families
//! can be added behind the same interface.

use crate::error::{CoreError, Result};
use crate::linalg::QMatrix;
use crate::ratio::Q;
use num::One;
use std::collections::VecDeque;

/// An element of a supported deck group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupElement {
    /// The unit of the trivial group.
    Unit,
    /// An element id into a finite multiplication table.
    Finite(usize),
    /// An integer exponent vector in Z^n.
    Vector(Vec<i64>),
}

impl GroupElement {
    pub fn vector(v: &[i64]) -> Self {
        GroupElement::Vector(v.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Trivial,
    FiniteExplicit {
        table: Vec<Vec<usize>>,
        identity: usize,
        inverses: Vec<usize>,
        generators: Vec<usize>,
        /// Word-length table computed once by breadth-first search.
        distances: Vec<u32>,
    },
    FreeAbelian {
        rank: usize,
    },
}

/// A supported deck group together with its declared generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescriptor {
    kind: GroupKind,
}

impl GroupDescriptor {
    pub fn trivial() -> Self {
        GroupDescriptor {
            kind: GroupKind::Trivial,
        }
    }

    pub fn free_abelian(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(CoreError::Schema("free abelian rank must be >= 1".into()));
        }
        Ok(GroupDescriptor {
            kind: GroupKind::FreeAbelian { rank },
        })
    }

    /// Builds a finite group from a multiplication table
    /// (`table[a][b] = a*b`). Checks the group axioms: identity, inverses,
    /// and associativity (exhaustively up to order 16, sampled beyond).
    pub fn finite_explicit(table: Vec<Vec<usize>>, generators: Option<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(CoreError::InvalidTable("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(CoreError::InvalidTable(format!("row {i} has wrong length")));
            }
            if row.iter().any(|&x| x >= n) {
                return Err(CoreError::InvalidTable(format!("row {i} has out-of-range id")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|j| table[e][j] == j && table[j][e] == j))
            .ok_or_else(|| CoreError::InvalidTable("no identity element".into()))?;
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| CoreError::InvalidTable(format!("element {a} has no inverse")))?;
            inverses[a] = inv;
        }
        if n <= 16 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if table[table[a][b]][c] != table[a][table[b][c]] {
                            return Err(CoreError::InvalidTable(format!(
                                "associativity fails at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut state = 0x9e3779b97f4a7c15u64;
            for _ in 0..512 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                let a = (state >> 33) as usize % n;
                let b = (state >> 17) as usize % n;
                let c = state as usize % n;
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(CoreError::InvalidTable(format!(
                        "associativity fails at ({a},{b},{c})"
                    )));
                }
            }
        }
        let generators = match generators {
            Some(g) => {
                if g.iter().any(|&x| x >= n) {
                    return Err(CoreError::InvalidTable("generator id out of range".into()));
                }
                g
            }
            None => (0..n).filter(|&x| x != identity).collect(),
        };
        let distances = bfs_distances(&table, identity, &generators, &inverses);
        if distances.iter().any(|&d| d == u32::MAX) {
            return Err(CoreError::InvalidTable(
                "declared generators do not generate the group".into(),
            ));
        }
        Ok(GroupDescriptor {
            kind: GroupKind::FiniteExplicit {
                table,
                identity,
                inverses,
                generators,
                distances,
            },
        })
    }

    /// The cyclic group Z/n as an explicit table.
    pub fn cyclic(n: usize) -> Result<Self> {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::finite_explicit(table, Some(vec![1 % n]))
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.kind, GroupKind::Trivial)
    }

    pub fn free_rank(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::FreeAbelian { rank } => Some(*rank),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            GroupKind::Trivial => GroupElement::Unit,
            GroupKind::FiniteExplicit { identity, .. } => GroupElement::Finite(*identity),
            GroupKind::FreeAbelian { rank } => GroupElement::Vector(vec![0; *rank]),
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (&self.kind, g) {
            (GroupKind::Trivial, GroupElement::Unit) => true,
            (GroupKind::FiniteExplicit { table, .. }, GroupElement::Finite(i)) => *i < table.len(),
            (GroupKind::FreeAbelian { rank }, GroupElement::Vector(v)) => v.len() == *rank,
            _ => false,
        }
    }

    fn member_err(&self, g: &GroupElement) -> CoreError {
        CoreError::ElementOutsideGroup(format!("{g:?}"))
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        if !self.contains(a) {
            return Err(self.member_err(a));
        }
        if !self.contains(b) {
            return Err(self.member_err(b));
        }
        Ok(match (&self.kind, a, b) {
            (GroupKind::Trivial, _, _) => GroupElement::Unit,
            (GroupKind::FiniteExplicit { table, .. }, GroupElement::Finite(x), GroupElement::Finite(y)) => {
                GroupElement::Finite(table[*x][*y])
            }
            (GroupKind::FreeAbelian { .. }, GroupElement::Vector(x), GroupElement::Vector(y)) => {
                GroupElement::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            _ => unreachable!(),
        })
    }

    pub fn inv(&self, a: &GroupElement) -> Result<GroupElement> {
        if !self.contains(a) {
            return Err(self.member_err(a));
        }
        Ok(match (&self.kind, a) {
            (GroupKind::Trivial, _) => GroupElement::Unit,
            (GroupKind::FiniteExplicit { inverses, .. }, GroupElement::Finite(x)) => {
                GroupElement::Finite(inverses[*x])
            }
            (GroupKind::FreeAbelian { .. }, GroupElement::Vector(x)) => {
                GroupElement::Vector(x.iter().map(|p| -p).collect())
            }
            _ => unreachable!(),
        })
    }

    /// Length of a shortest word in generators and their inverses. For
    /// free abelian groups with unit-vector generators this is the l1 norm.
    pub fn word_length(&self, g: &GroupElement) -> Result<u64> {
        if !self.contains(g) {
            return Err(self.member_err(g));
        }
        Ok(match (&self.kind, g) {
            (GroupKind::Trivial, _) => 0,
            (GroupKind::FiniteExplicit { distances, .. }, GroupElement::Finite(x)) => {
                distances[*x] as u64
            }
            (GroupKind::FreeAbelian { .. }, GroupElement::Vector(v)) => {
                v.iter().map(|x| x.unsigned_abs()).sum()
            }
            _ => unreachable!(),
        })
    }

    /// All elements of word length <= radius. Only meaningful for small
    /// radii on infinite groups.
    pub fn ball(&self, radius: u64) -> Vec<GroupElement> {
        match &self.kind {
            GroupKind::Trivial => vec![GroupElement::Unit],
            GroupKind::FiniteExplicit { distances, .. } => (0..distances.len())
                .filter(|&i| (distances[i] as u64) <= radius)
                .map(GroupElement::Finite)
                .collect(),
            GroupKind::FreeAbelian { rank } => {
                let mut out = Vec::new();
                let mut cur = vec![0i64; *rank];
                enumerate_l1_ball(*rank, radius as i64, 0, &mut cur, &mut out);
                out
            }
        }
    }

    /// Box {-k..k}^n for free abelian groups; the whole group otherwise.
    pub fn box_set(&self, k: i64) -> Vec<GroupElement> {
        match &self.kind {
            GroupKind::Trivial => vec![GroupElement::Unit],
            GroupKind::FiniteExplicit { table, .. } => {
                (0..table.len()).map(GroupElement::Finite).collect()
            }
            GroupKind::FreeAbelian { rank } => {
                let mut out = Vec::new();
                let mut cur = vec![0i64; *rank];
                enumerate_box(*rank, k, 0, &mut cur, &mut out);
                out
            }
        }
    }
}

fn enumerate_l1_ball(rank: usize, budget: i64, pos: usize, cur: &mut Vec<i64>, out: &mut Vec<GroupElement>) {
    if pos == rank {
        out.push(GroupElement::Vector(cur.clone()));
        return;
    }
    for v in -budget..=budget {
        cur[pos] = v;
        enumerate_l1_ball(rank, budget - v.abs(), pos + 1, cur, out);
    }
    cur[pos] = 0;
}

fn enumerate_box(rank: usize, k: i64, pos: usize, cur: &mut Vec<i64>, out: &mut Vec<GroupElement>) {
    if pos == rank {
        out.push(GroupElement::Vector(cur.clone()));
        return;
    }
    for v in -k..=k {
        cur[pos] = v;
        enumerate_box(rank, k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

fn bfs_distances(
    table: &[Vec<usize>],
    identity: usize,
    generators: &[usize],
    inverses: &[usize],
) -> Vec<u32> {
    let n = table.len();
    let mut dist = vec![u32::MAX; n];
    dist[identity] = 0;
    let mut queue = VecDeque::from([identity]);
    let mut step_set: Vec<usize> = generators.to_vec();
    step_set.extend(generators.iter().map(|&g| inverses[g]));
    while let Some(x) = queue.pop_front() {
        for &s in &step_set {
            let y = table[x][s];
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// One finite quotient in a tower, with a fixed lexicographic enumeration
/// of its elements so that pushed matrices are reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerLevel {
    pub k: usize,
    quotient: Quotient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Quotient {
    Trivial,
    ModVector { modulus: u64, rank: usize },
    Finite { table: Vec<Vec<usize>>, identity: usize },
}

impl TowerLevel {
    /// The index [Gamma : Gamma_k] = |G_k|.
    pub fn order(&self) -> usize {
        match &self.quotient {
            Quotient::Trivial => 1,
            Quotient::ModVector { modulus, rank } => (*modulus as usize).pow(*rank as u32),
            Quotient::Finite { table, .. } => table.len(),
        }
    }

    pub fn index_q(&self) -> Q {
        crate::ratio::q_int(self.order() as i64)
    }

    pub fn modulus(&self) -> Option<u64> {
        match &self.quotient {
            Quotient::ModVector { modulus, .. } => Some(*modulus),
            _ => None,
        }
    }

    pub fn identity_index(&self) -> usize {
        match &self.quotient {
            Quotient::Trivial => 0,
            Quotient::ModVector { .. } => 0,
            Quotient::Finite { identity, .. } => *identity,
        }
    }

    /// Projects a group element to the index of its image in G_k.
    pub fn project(&self, g: &GroupElement) -> Result<usize> {
        match (&self.quotient, g) {
            (Quotient::Trivial, GroupElement::Unit) => Ok(0),
            (Quotient::Finite { table, .. }, GroupElement::Finite(i)) if *i < table.len() => Ok(*i),
            (Quotient::ModVector { modulus, rank }, GroupElement::Vector(v)) if v.len() == *rank => {
                let m = *modulus as i64;
                let mut idx = 0usize;
                for &e in v {
                    idx = idx * (*modulus as usize) + e.rem_euclid(m) as usize;
                }
                Ok(idx)
            }
            _ => Err(CoreError::ElementOutsideGroup(format!("{g:?}"))),
        }
    }

    /// Product of quotient elements by enumeration index.
    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        match &self.quotient {
            Quotient::Trivial => 0,
            Quotient::Finite { table, .. } => table[a][b],
            Quotient::ModVector { modulus, rank } => {
                let m = *modulus as usize;
                let mut out = 0usize;
                let mut pa = a;
                let mut pb = b;
                let mut digits = vec![0usize; *rank];
                for d in (0..*rank).rev() {
                    digits[d] = (pa % m + pb % m) % m;
                    pa /= m;
                    pb /= m;
                }
                for d in 0..*rank {
                    out = out * m + digits[d];
                }
                out
            }
        }
    }

    pub fn inv_index(&self, a: usize) -> usize {
        match &self.quotient {
            Quotient::Trivial => 0,
            Quotient::Finite { table, identity } => {
                (0..table.len()).find(|&b| table[a][b] == *identity).unwrap()
            }
            Quotient::ModVector { modulus, rank } => {
                let m = *modulus as usize;
                let mut out = 0usize;
                let mut pa = a;
                let mut digits = vec![0usize; *rank];
                for d in (0..*rank).rev() {
                    digits[d] = (m - pa % m) % m;
                    pa /= m;
                }
                for d in 0..*rank {
                    out = out * m + digits[d];
                }
                out
            }
        }
    }

    /// Permutation of the right regular representation of the element with
    /// index `h`: perm[i] = index(g_i * h), i.e. the matrix with entry
    /// (i, perm[i]) = 1. This map is a homomorphism into permutation
    /// matrices, and rep(h^-1) = rep(h)^T.
    pub fn rep_perm(&self, h: usize) -> Vec<usize> {
        (0..self.order()).map(|i| self.mul_index(i, h)).collect()
    }

    pub fn rep_matrix(&self, h: usize) -> QMatrix {
        let perm = self.rep_perm(h);
        let n = perm.len();
        let mut m = QMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m.set(i, j, Q::one());
        }
        m
    }
}

/// A group with a chain of finite quotients.
///
/// `nested` towers satisfy the subgroup chain condition (divisibility of
/// moduli for Z^n); plain quotient sequences drop that requirement, which
/// the per-level computations never use.
#[derive(Debug, Clone)]
pub struct GroupTower {
    descriptor: GroupDescriptor,
    levels: Vec<TowerLevel>,
    nested: bool,
}

impl GroupTower {
    /// Builds a tower from a schedule of moduli. For free abelian groups
    /// the schedule must be a strictly increasing divisibility chain
    /// m_1 | m_2 | ...; for trivial/finite groups the tower is constant and
    /// only the schedule length is used.
    pub fn make_tower(descriptor: &GroupDescriptor, schedule: &[u64]) -> Result<Self> {
        if schedule.is_empty() {
            return Err(CoreError::InvalidSchedule("empty schedule".into()));
        }
        match descriptor.kind() {
            GroupKind::FreeAbelian { .. } => {
                for w in schedule.windows(2) {
                    if w[1] <= w[0] || w[1] % w[0] != 0 {
                        return Err(CoreError::InvalidSchedule(format!(
                            "{} does not divide {} strictly",
                            w[0], w[1]
                        )));
                    }
                }
                if schedule[0] == 0 {
                    return Err(CoreError::InvalidSchedule("zero modulus".into()));
                }
                Ok(Self::from_moduli(descriptor, schedule, true))
            }
            _ => Ok(Self::constant(descriptor, schedule.len())),
        }
    }

    /// A quotient sequence with strictly increasing moduli but no nesting
    /// requirement (e.g. m_k = k). Every per-level operation is identical
    /// to the nested case.
    pub fn quotient_sequence(descriptor: &GroupDescriptor, moduli: &[u64]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(CoreError::InvalidSchedule("empty schedule".into()));
        }
        match descriptor.kind() {
            GroupKind::FreeAbelian { .. } => {
                if moduli.iter().any(|&m| m == 0) {
                    return Err(CoreError::InvalidSchedule("zero modulus".into()));
                }
                for w in moduli.windows(2) {
                    if w[1] <= w[0] {
                        return Err(CoreError::InvalidSchedule("moduli must strictly increase".into()));
                    }
                }
                Ok(Self::from_moduli(descriptor, moduli, false))
            }
            _ => Ok(Self::constant(descriptor, moduli.len())),
        }
    }

    /// Default schedule m_k = 2^k, depth levels.
    pub fn default_pow2(descriptor: &GroupDescriptor, depth: usize) -> Result<Self> {
        let schedule: Vec<u64> = (1..=depth as u32).map(|k| 1u64 << k).collect();
        Self::make_tower(descriptor, &schedule)
    }

    fn from_moduli(descriptor: &GroupDescriptor, moduli: &[u64], nested: bool) -> Self {
        let rank = descriptor.free_rank().unwrap();
        let levels = moduli
            .iter()
            .enumerate()
            .map(|(i, &m)| TowerLevel {
                k: i + 1,
                quotient: Quotient::ModVector { modulus: m, rank },
            })
            .collect();
        GroupTower {
            descriptor: descriptor.clone(),
            levels,
            nested,
        }
    }

    fn constant(descriptor: &GroupDescriptor, depth: usize) -> Self {
        let quotient = match descriptor.kind() {
            GroupKind::Trivial => Quotient::Trivial,
            GroupKind::FiniteExplicit { table, identity, .. } => Quotient::Finite {
                table: table.clone(),
                identity: *identity,
            },
            GroupKind::FreeAbelian { .. } => unreachable!(),
        };
        let levels = (1..=depth.max(1))
            .map(|k| TowerLevel {
                k,
                quotient: quotient.clone(),
            })
            .collect();
        GroupTower {
            descriptor: descriptor.clone(),
            levels,
            nested: true,
        }
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> Option<&TowerLevel> {
        self.levels.get(k.checked_sub(1)?)
    }

    pub fn is_nested(&self) -> bool {
        self.nested
    }
}
