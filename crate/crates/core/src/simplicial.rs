//! Gamma-equivariant simplicial complexes and the PL constructions used by
//! the amenable driver: links, rational homology manifold validation,
//! stars, barycentric subdivision, and regular-neighborhood thickening.
//!
//! A cover simplex is a pair (orbit, g). Face maps carry group labels that
//! multiply on the left, `face_i(o, g) = (o_i, g_i * g)`, and the deck
//! action multiplies inverses on the right, so the two commute. The
//! fundamental domain is the set of pairs (o, e).

use crate::error::{CoreError, Result};
use crate::groups::{GroupDescriptor, GroupElement};
use crate::linalg::QMatrix;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A simplex of the cover: an orbit id and a deck translate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoverSimplex {
    pub orbit: usize,
    pub g: GroupElement,
}

impl CoverSimplex {
    pub fn new(orbit: usize, g: GroupElement) -> Self {
        CoverSimplex { orbit, g }
    }
}

/// One simplex orbit of the base, with labelled equivariant face maps.
#[derive(Debug, Clone)]
pub struct OrbitData {
    pub name: String,
    pub dim: usize,
    /// `faces[i]` is the face opposite local vertex i of the rep (o, e).
    pub faces: Vec<(usize, GroupElement)>,
    /// Whether the orbit lies in the boundary subcomplex L.
    pub in_boundary: bool,
    /// Orientation sign of a top orbit in the fundamental class.
    pub sign: Option<i64>,
}

/// A finite-orbit Gamma-complex: the cover is orbits x Gamma.
#[derive(Debug, Clone)]
pub struct EquivariantComplex {
    group: GroupDescriptor,
    orbits: Vec<OrbitData>,
    dim: usize,
    /// vertex_slots[o][j] = (vertex orbit, label h): the j-th vertex of
    /// (o, g) is (vo, h*g).
    vertex_slots: Vec<Vec<(usize, GroupElement)>>,
}

impl EquivariantComplex {
    pub fn new(group: GroupDescriptor, orbits: Vec<OrbitData>) -> Result<Self> {
        if orbits.is_empty() {
            return Err(CoreError::InvalidCover("no orbits".into()));
        }
        let dim = orbits.iter().map(|o| o.dim).max().unwrap();
        let mut e = EquivariantComplex {
            group,
            orbits,
            dim,
            vertex_slots: Vec::new(),
        };
        e.check_face_shapes()?;
        e.vertex_slots = e.compute_vertex_slots()?;
        e.check_simplicial_identities()?;
        e.check_vertex_distinctness()?;
        e.check_vertex_determination()?;
        e.check_boundary_closed()?;
        e.check_fundamental_class()?;
        Ok(e)
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn orbits(&self) -> &[OrbitData] {
        &self.orbits
    }

    pub fn orbit(&self, o: usize) -> &OrbitData {
        &self.orbits[o]
    }

    /// Total number of simplices of the base (= orbit count), the |X| of
    /// the normalization tr_k = tr * |X| / |X_k|.
    pub fn base_size(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbits_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.orbits.len()).filter(|&o| self.orbits[o].dim == d).collect()
    }

    /// Orbits of dimension d not contained in the boundary.
    pub fn interior_orbits_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.orbits.len())
            .filter(|&o| self.orbits[o].dim == d && !self.orbits[o].in_boundary)
            .collect()
    }

    pub fn face(&self, s: &CoverSimplex, i: usize) -> Result<CoverSimplex> {
        let od = &self.orbits[s.orbit];
        let (fo, fg) = od.faces.get(i).ok_or_else(|| {
            CoreError::InvalidCover(format!("face index {i} out of range on orbit {}", od.name))
        })?;
        Ok(CoverSimplex::new(*fo, self.group.mul(fg, &s.g)?))
    }

    pub fn simplex_dim(&self, s: &CoverSimplex) -> usize {
        self.orbits[s.orbit].dim
    }

    /// All proper faces (every codimension) plus the simplex itself.
    pub fn face_closure_of(&self, s: &CoverSimplex) -> Result<BTreeSet<CoverSimplex>> {
        let mut out = BTreeSet::new();
        let mut stack = vec![s.clone()];
        while let Some(t) = stack.pop() {
            if !out.insert(t.clone()) {
                continue;
            }
            for i in 0..=self.simplex_dim(&t) {
                if self.simplex_dim(&t) == 0 {
                    break;
                }
                stack.push(self.face(&t, i)?);
            }
        }
        Ok(out)
    }

    /// Deck translate: h acts by (o, g) -> (o, g * h^-1); a left action
    /// commuting with the face maps.
    pub fn translate(&self, s: &CoverSimplex, h: &GroupElement) -> Result<CoverSimplex> {
        let hinv = self.group.inv(h)?;
        Ok(CoverSimplex::new(s.orbit, self.group.mul(&s.g, &hinv)?))
    }

    /// Vertices of a cover simplex, in the local (Gamma-invariant) order.
    pub fn vertices_of(&self, s: &CoverSimplex) -> Result<Vec<CoverSimplex>> {
        self.vertex_slots[s.orbit]
            .iter()
            .map(|(vo, h)| Ok(CoverSimplex::new(*vo, self.group.mul(h, &s.g)?)))
            .collect()
    }

    /// Direct (codimension-one) cofaces of a cover simplex.
    pub fn cofaces_of(&self, s: &CoverSimplex) -> Result<Vec<CoverSimplex>> {
        let mut out = Vec::new();
        for (o, od) in self.orbits.iter().enumerate() {
            for (i, (fo, fg)) in od.faces.iter().enumerate() {
                let _ = i;
                if *fo == s.orbit {
                    // face_i(o, g) = s  <=>  g = fg^-1 * s.g
                    let g = self.group.mul(&self.group.inv(fg)?, &s.g)?;
                    out.push(CoverSimplex::new(o, g));
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// All cover simplices containing a given vertex.
    pub fn simplices_at_vertex(&self, v: &CoverSimplex) -> Result<Vec<CoverSimplex>> {
        if self.simplex_dim(v) != 0 {
            return Err(CoreError::InvalidCover("not a vertex".into()));
        }
        let mut out = Vec::new();
        for (o, slots) in self.vertex_slots.iter().enumerate() {
            for (vo, h) in slots {
                if *vo == v.orbit {
                    let g = self.group.mul(&self.group.inv(h)?, &v.g)?;
                    out.push(CoverSimplex::new(o, g));
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Front face [v_0..v_q]: repeatedly remove the last vertex.
    pub fn front_face(&self, s: &CoverSimplex, q: usize) -> Result<CoverSimplex> {
        let d = self.simplex_dim(s);
        if q > d {
            return Err(CoreError::DegreeOutOfRange { p: q, top: d });
        }
        let mut cur = s.clone();
        for _ in 0..(d - q) {
            let top = self.simplex_dim(&cur);
            cur = self.face(&cur, top)?;
        }
        Ok(cur)
    }

    /// Back face [v_{d-q}..v_d]: repeatedly remove the first vertex.
    pub fn back_face(&self, s: &CoverSimplex, q: usize) -> Result<CoverSimplex> {
        let d = self.simplex_dim(s);
        if q > d {
            return Err(CoreError::DegreeOutOfRange { p: q, top: d });
        }
        let mut cur = s.clone();
        for _ in 0..(d - q) {
            cur = self.face(&cur, 0)?;
        }
        Ok(cur)
    }

    fn compute_vertex_slots(&self) -> Result<Vec<Vec<(usize, GroupElement)>>> {
        let mut slots = Vec::with_capacity(self.orbits.len());
        for o in 0..self.orbits.len() {
            let d = self.orbits[o].dim;
            let mut per_orbit = Vec::with_capacity(d + 1);
            for j in 0..=d {
                let mut cur = CoverSimplex::new(o, self.group.identity());
                let mut cur_j = j;
                while self.simplex_dim(&cur) > 0 {
                    let top = self.simplex_dim(&cur);
                    if cur_j < top {
                        cur = self.face(&cur, top)?;
                    } else {
                        cur = self.face(&cur, 0)?;
                        cur_j -= 1;
                    }
                }
                per_orbit.push((cur.orbit, cur.g));
            }
            slots.push(per_orbit);
        }
        Ok(slots)
    }

    fn check_face_shapes(&self) -> Result<()> {
        for od in &self.orbits {
            let expected = if od.dim == 0 { 0 } else { od.dim + 1 };
            if od.faces.len() != expected {
                return Err(CoreError::InvalidCover(format!(
                    "orbit {} (dim {}) has {} faces, expected {}",
                    od.name,
                    od.dim,
                    od.faces.len(),
                    expected
                )));
            }
            for (fo, fg) in &od.faces {
                if *fo >= self.orbits.len() {
                    return Err(CoreError::InvalidCover(format!(
                        "orbit {} references missing face orbit {}",
                        od.name, fo
                    )));
                }
                if self.orbits[*fo].dim + 1 != od.dim {
                    return Err(CoreError::InvalidCover(format!(
                        "orbit {} face has wrong dimension",
                        od.name
                    )));
                }
                if !self.group.contains(fg) {
                    return Err(CoreError::InvalidCover(format!(
                        "orbit {} face label outside the group",
                        od.name
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_simplicial_identities(&self) -> Result<()> {
        for o in 0..self.orbits.len() {
            let d = self.orbits[o].dim;
            if d < 2 {
                continue;
            }
            let rep = CoverSimplex::new(o, self.group.identity());
            for j in 1..=d {
                for i in 0..j {
                    let a = self.face(&self.face(&rep, j)?, i)?;
                    let b = self.face(&self.face(&rep, i)?, j - 1)?;
                    if a != b {
                        return Err(CoreError::InvalidCover(format!(
                            "simplicial identity fails on orbit {} at ({i},{j})",
                            self.orbits[o].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_vertex_distinctness(&self) -> Result<()> {
        for o in 0..self.orbits.len() {
            let rep = CoverSimplex::new(o, self.group.identity());
            let vs = self.vertices_of(&rep)?;
            let set: BTreeSet<&CoverSimplex> = vs.iter().collect();
            if set.len() != vs.len() {
                return Err(CoreError::InvalidCover(format!(
                    "orbit {} has repeated vertices in the cover",
                    self.orbits[o].name
                )));
            }
        }
        Ok(())
    }

    /// Simplices of a simplicial complex are determined by their vertex
    /// sets; checked on representatives against all candidate translates.
    fn check_vertex_determination(&self) -> Result<()> {
        for o in 0..self.orbits.len() {
            let rep = CoverSimplex::new(o, self.group.identity());
            let vset: BTreeSet<CoverSimplex> = self.vertices_of(&rep)?.into_iter().collect();
            for o2 in 0..self.orbits.len() {
                if self.orbits[o2].dim != self.orbits[o].dim {
                    continue;
                }
                // candidate translates: align each vertex slot of o2 with
                // the first vertex of o
                let Some(first) = vset.iter().next() else { continue };
                for (vo, h) in &self.vertex_slots[o2] {
                    if vo != &first.orbit {
                        continue;
                    }
                    let g = self.group.mul(&self.group.inv(h)?, &first.g)?;
                    let cand = CoverSimplex::new(o2, g);
                    let cset: BTreeSet<CoverSimplex> =
                        self.vertices_of(&cand)?.into_iter().collect();
                    if cset == vset && cand != rep {
                        return Err(CoreError::InvalidCover(format!(
                            "orbits {} and {} share a vertex set in the cover",
                            self.orbits[o].name, self.orbits[o2].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_boundary_closed(&self) -> Result<()> {
        for od in &self.orbits {
            if od.in_boundary {
                for (fo, _) in &od.faces {
                    if !self.orbits[*fo].in_boundary {
                        return Err(CoreError::InvalidCover(format!(
                            "boundary orbit {} has a non-boundary face",
                            od.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// When signs are present, the signed sum of top orbits must be a
    /// cycle rel boundary: for every interior orbit of codimension one the
    /// incidence numbers cancel.
    fn check_fundamental_class(&self) -> Result<()> {
        let tops = self.orbits_of_dim(self.dim);
        let signed = tops.iter().filter(|&&o| self.orbits[o].sign.is_some()).count();
        if signed == 0 {
            return Ok(());
        }
        if signed != tops.len() {
            return Err(CoreError::InvalidCover(
                "fundamental class must sign every top orbit".into(),
            ));
        }
        for &t in &tops {
            let s = self.orbits[t].sign.unwrap();
            if s != 1 && s != -1 {
                return Err(CoreError::InvalidCover("signs must be +-1".into()));
            }
        }
        if self.dim == 0 {
            return Ok(());
        }
        // The coefficient of a concrete codim-1 simplex (tau, g0) in the
        // signed boundary sum is sum over incidences (top orbit, face slot)
        // with face orbit tau of (-1)^slot * sign: each incidence hits
        // every translate of tau exactly once, so the sum is independent
        // of g0 and of the face labels.
        let mut coeff: BTreeMap<usize, i64> = BTreeMap::new();
        for &t in &tops {
            let eps = self.orbits[t].sign.unwrap();
            for (i, (fo, _)) in self.orbits[t].faces.iter().enumerate() {
                if self.orbits[*fo].in_boundary {
                    continue;
                }
                let sign = if i % 2 == 0 { 1 } else { -1 };
                *coeff.entry(*fo).or_insert(0) += eps * sign;
            }
        }
        for (fo, c) in coeff {
            if c != 0 {
                return Err(CoreError::InvalidCover(format!(
                    "fundamental class is not a cycle rel boundary at orbit {}",
                    self.orbits[fo].name
                )));
            }
        }
        Ok(())
    }

    /// Solves for orientation signs making the top orbits a fundamental
    /// cycle rel boundary, by propagation across codimension-one faces.
    /// Fails if the complex is not orientable this way.
    pub fn orient(&mut self) -> Result<()> {
        let n = self.dim;
        let tops = self.orbits_of_dim(n);
        if tops.is_empty() {
            return Ok(());
        }
        // incidences per interior codim-1 orbit: (top orbit, (-1)^slot)
        let mut incidence: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
        for &t in &tops {
            for (i, (fo, _)) in self.orbits[t].faces.iter().enumerate() {
                if self.orbits[*fo].in_boundary {
                    continue;
                }
                let sign = if i % 2 == 0 { 1i64 } else { -1 };
                incidence.entry(*fo).or_default().push((t, sign));
            }
        }
        let mut sign: BTreeMap<usize, i64> = BTreeMap::new();
        for &start in &tops {
            if sign.contains_key(&start) {
                continue;
            }
            sign.insert(start, 1);
            let mut stack = vec![start];
            while let Some(t) = stack.pop() {
                let st = sign[&t];
                for pairs in incidence.values() {
                    // only pseudomanifold faces (two incidences) propagate
                    if pairs.len() != 2 {
                        continue;
                    }
                    let (a, sa) = pairs[0];
                    let (b, sb) = pairs[1];
                    let (other, needed) = if a == t && b == t {
                        // both incidences on the same orbit: the cycle
                        // condition there is sign-independent
                        continue;
                    } else if a == t {
                        (b, -st * sa * sb)
                    } else if b == t {
                        (a, -st * sa * sb)
                    } else {
                        continue;
                    };
                    match sign.get(&other) {
                        None => {
                            sign.insert(other, needed);
                            stack.push(other);
                        }
                        Some(&s) if s != needed => {
                            return Err(CoreError::InvalidCover(
                                "complex is not orientable".into(),
                            ));
                        }
                        _ => {}
                    }
                }
            }
        }
        for (&t, &s) in &sign {
            self.orbits[t].sign = Some(s);
        }
        self.check_fundamental_class()
    }
}

/// A finite set of cover simplices, closed under faces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiniteSubcomplex {
    simplices: BTreeSet<CoverSimplex>,
}

impl FiniteSubcomplex {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_simplices(
        e: &EquivariantComplex,
        simplices: impl IntoIterator<Item = CoverSimplex>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for s in simplices {
            set.extend(e.face_closure_of(&s)?);
        }
        Ok(FiniteSubcomplex { simplices: set })
    }

    pub fn simplices(&self) -> impl Iterator<Item = &CoverSimplex> {
        self.simplices.iter()
    }

    pub fn contains(&self, s: &CoverSimplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.simplices.is_subset(&other.simplices)
    }

    pub fn union(&self, other: &Self) -> Self {
        FiniteSubcomplex {
            simplices: self.simplices.union(&other.simplices).cloned().collect(),
        }
    }

    pub fn insert(&mut self, s: CoverSimplex) {
        self.simplices.insert(s);
    }

    pub fn of_dim(&self, e: &EquivariantComplex, d: usize) -> Vec<CoverSimplex> {
        self.simplices
            .iter()
            .filter(|s| e.simplex_dim(s) == d)
            .cloned()
            .collect()
    }

    /// Count of simplices in a given orbit.
    pub fn orbit_count(&self, orbit: usize) -> usize {
        self.simplices.iter().filter(|s| s.orbit == orbit).count()
    }

    pub fn vertices(&self, e: &EquivariantComplex) -> BTreeSet<CoverSimplex> {
        self.simplices
            .iter()
            .filter(|s| e.simplex_dim(s) == 0)
            .cloned()
            .collect()
    }

    pub fn translate(&self, e: &EquivariantComplex, h: &GroupElement) -> Result<Self> {
        let mut set = BTreeSet::new();
        for s in &self.simplices {
            set.insert(e.translate(s, h)?);
        }
        Ok(FiniteSubcomplex { simplices: set })
    }

    pub fn is_face_closed(&self, e: &EquivariantComplex) -> Result<bool> {
        for s in &self.simplices {
            let d = e.simplex_dim(s);
            if d == 0 {
                continue;
            }
            for i in 0..=d {
                if !self.simplices.contains(&e.face(s, i)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Star of a finite subcomplex inside the cover: the union of the closed
/// stars of its vertices.
pub fn star(e: &EquivariantComplex, x: &FiniteSubcomplex) -> Result<FiniteSubcomplex> {
    let mut out = BTreeSet::new();
    for v in x.vertices(e) {
        for s in e.simplices_at_vertex(&v)? {
            out.extend(e.face_closure_of(&s)?);
        }
    }
    Ok(FiniteSubcomplex { simplices: out })
}

/// Interned finite complex on plain vertex ids, for link computations.
pub struct PlainComplex {
    pub vertices: Vec<CoverSimplex>,
    /// Sorted vertex-id tuples, grouped by dimension.
    pub simplices: BTreeSet<Vec<usize>>,
}

pub fn plain_complex(e: &EquivariantComplex, s: &FiniteSubcomplex) -> Result<PlainComplex> {
    let mut vertex_ids: HashMap<CoverSimplex, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut simplices = BTreeSet::new();
    for sx in s.simplices() {
        let vs = e.vertices_of(sx)?;
        let mut ids = Vec::with_capacity(vs.len());
        for v in vs {
            let next = vertex_ids.len();
            let id = *vertex_ids.entry(v.clone()).or_insert(next);
            if id == vertices.len() {
                vertices.push(v);
            }
            ids.push(id);
        }
        ids.sort_unstable();
        simplices.insert(ids);
    }
    Ok(PlainComplex {
        vertices,
        simplices,
    })
}

impl PlainComplex {
    pub fn dim(&self) -> usize {
        self.simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }


    /// Link of a simplex: { tau \ sigma : sigma <= tau }.
    pub fn link(&self, sigma: &[usize]) -> PlainComplex {
        let sset: BTreeSet<usize> = sigma.iter().copied().collect();
        let mut simplices = BTreeSet::new();
        for tau in &self.simplices {
            let tset: BTreeSet<usize> = tau.iter().copied().collect();
            if sset.is_subset(&tset) && tau.len() > sigma.len() {
                let rest: Vec<usize> = tset.difference(&sset).copied().collect();
                simplices.insert(rest);
            }
        }
        PlainComplex {
            vertices: self.vertices.clone(),
            simplices,
        }
    }

    /// Reduced rational Betti numbers b~_0..b~_dim.
    pub fn reduced_betti(&self) -> Vec<usize> {
        if self.simplices.is_empty() {
            return Vec::new();
        }
        let dim = self.dim();
        // index simplices per dimension
        let mut index: Vec<BTreeMap<&Vec<usize>, usize>> = vec![BTreeMap::new(); dim + 1];
        for s in &self.simplices {
            let d = s.len() - 1;
            let n = index[d].len();
            index[d].insert(s, n);
        }
        // boundary matrices
        let mut boundaries: Vec<QMatrix> = Vec::with_capacity(dim + 1);
        for d in 0..=dim {
            let rows = if d == 0 { 0 } else { index[d - 1].len() };
            let cols = index[d].len();
            let mut m = QMatrix::zeros(rows, cols);
            if d > 0 {
                for (s, &j) in &index[d] {
                    for (i, _) in s.iter().enumerate() {
                        let mut f: Vec<usize> = (*s).clone();
                        f.remove(i);
                        let r = index[d - 1][&f];
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        m.set(r, j, crate::ratio::q_int(sign));
                    }
                }
            }
            boundaries.push(m);
        }
        let mut betti = Vec::with_capacity(dim + 1);
        for d in 0..=dim {
            let nd = index[d].len();
            let rank_d = if d == 0 { 0 } else { boundaries[d].rank() };
            let rank_up = if d < dim { boundaries[d + 1].rank() } else { 0 };
            let cycles = nd - rank_d;
            let mut b = cycles - rank_up;
            if d == 0 {
                b -= 1; // reduced homology
            }
            betti.push(b);
        }
        betti
    }

    pub fn is_rational_sphere(&self, sphere_dim: usize) -> bool {
        let betti = self.reduced_betti();
        if self.simplices.is_empty() {
            return false;
        }
        betti
            .iter()
            .enumerate()
            .all(|(i, &b)| if i == sphere_dim { b == 1 } else { b == 0 })
            && betti.len() > sphere_dim
    }

    pub fn is_rationally_trivial(&self) -> bool {
        !self.simplices.is_empty() && self.reduced_betti().iter().all(|&b| b == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexClass {
    Interior,
    Boundary,
}

/// Outcome of the rational-homology-manifold validation of a finite
/// subcomplex.
#[derive(Debug)]
pub struct ManifoldReport {
    pub ok: bool,
    pub dim: usize,
    pub failures: Vec<(CoverSimplex, String)>,
    pub derived_boundary: FiniteSubcomplex,
    pub classes: BTreeMap<CoverSimplex, SimplexClass>,
}

/// Checks that every simplex link has the rational homology of a sphere
/// (interior) or is rationally trivial (boundary), classifies simplices,
/// derives the boundary subcomplex, and compares to a declared boundary if
/// one is given.
pub fn validate_homology_manifold(
    e: &EquivariantComplex,
    s: &FiniteSubcomplex,
    declared_boundary: Option<&FiniteSubcomplex>,
) -> Result<ManifoldReport> {
    let mut failures = Vec::new();
    let mut classes = BTreeMap::new();
    let mut derived = FiniteSubcomplex::empty();
    if s.is_empty() {
        return Ok(ManifoldReport {
            ok: true,
            dim: 0,
            failures,
            derived_boundary: derived,
            classes,
        });
    }
    let n = s
        .simplices()
        .map(|x| e.simplex_dim(x))
        .max()
        .unwrap_or(0);
    let plain = plain_complex(e, s)?;
    // vertex-id tuples back to cover simplices
    let mut by_ids: HashMap<Vec<usize>, CoverSimplex> = HashMap::new();
    for sx in s.simplices() {
        let mut ids: Vec<usize> = Vec::new();
        for v in e.vertices_of(sx)? {
            let id = plain
                .vertices
                .iter()
                .position(|w| w == &v)
                .expect("vertex interned");
            ids.push(id);
        }
        ids.sort_unstable();
        by_ids.insert(ids, sx.clone());
    }
    for ids in &plain.simplices {
        let sx = by_ids[ids].clone();
        let d = ids.len() - 1;
        let link = plain.link(ids);
        if d == n {
            if !link.simplices.is_empty() {
                failures.push((sx.clone(), "top simplex has cofaces".into()));
                continue;
            }
            classes.insert(sx, SimplexClass::Interior);
            continue;
        }
        if link.simplices.is_empty() {
            failures.push((sx.clone(), "not pure: simplex has no coface".into()));
            continue;
        }
        // purity: link must reach dimension n - d - 1
        if link.dim() != n - d - 1 {
            failures.push((sx.clone(), "link has wrong dimension".into()));
            continue;
        }
        if link.is_rational_sphere(n - d - 1) {
            classes.insert(sx, SimplexClass::Interior);
        } else if link.is_rationally_trivial() {
            classes.insert(sx.clone(), SimplexClass::Boundary);
            derived.insert(sx);
        } else {
            failures.push((sx, "link is neither a rational sphere nor trivial".into()));
        }
    }
    // the derived boundary must be face-closed
    let boundary_closed = derived.is_face_closed(e)?;
    if !boundary_closed {
        if let Some(witness) = derived.simplices().next() {
            failures.push((witness.clone(), "derived boundary is not a subcomplex".into()));
        }
    }
    if let Some(decl) = declared_boundary {
        if decl != &derived {
            // report one witness from the symmetric difference
            let missing = decl
                .simplices()
                .find(|x| !derived.contains(x))
                .or_else(|| derived.simplices().find(|x| !decl.contains(x)));
            if let Some(w) = missing {
                failures.push((w.clone(), "declared boundary differs from derived".into()));
            }
        }
    }
    Ok(ManifoldReport {
        ok: failures.is_empty(),
        dim: n,
        failures,
        derived_boundary: derived,
        classes,
    })
}

/// Barycentric subdivision of the whole equivariant complex, with maps
/// between chains of cover simplices and subdivided cover simplices.
pub struct Subdivision {
    pub complex: EquivariantComplex,
    /// Orbit reps of the subdivision: normalized chains (top at identity).
    chains: Vec<Vec<CoverSimplex>>,
    chain_index: HashMap<Vec<CoverSimplex>, usize>,
}

impl Subdivision {
    /// Encodes a strictly increasing chain of cover simplices as a cover
    /// simplex of the subdivision.
    pub fn encode(&self, base: &EquivariantComplex, chain: &[CoverSimplex]) -> Result<CoverSimplex> {
        let top = chain.last().ok_or_else(|| {
            CoreError::InvalidCover("empty chain".into())
        })?;
        let gamma = top.g.clone();
        let ginv = base.group().inv(&gamma)?;
        let rep: Vec<CoverSimplex> = chain
            .iter()
            .map(|s| Ok(CoverSimplex::new(s.orbit, base.group().mul(&s.g, &ginv)?)))
            .collect::<Result<_>>()?;
        let orbit = *self.chain_index.get(&rep).ok_or_else(|| {
            CoreError::InvalidCover("chain does not name a subdivision orbit".into())
        })?;
        Ok(CoverSimplex::new(orbit, gamma))
    }

    /// Decodes a subdivision cover simplex back to its chain.
    pub fn decode(&self, base: &EquivariantComplex, s: &CoverSimplex) -> Result<Vec<CoverSimplex>> {
        let rep = &self.chains[s.orbit];
        rep.iter()
            .map(|c| Ok(CoverSimplex::new(c.orbit, base.group().mul(&c.g, &s.g)?)))
            .collect()
    }

    /// The subdivision of a finite subcomplex: all chains within it.
    pub fn subdivide(
        &self,
        base: &EquivariantComplex,
        s: &FiniteSubcomplex,
    ) -> Result<FiniteSubcomplex> {
        let all: Vec<CoverSimplex> = s.simplices().cloned().collect();
        let chains = chains_within(base, &all)?;
        let mut out = FiniteSubcomplex::empty();
        for c in chains {
            out.insert(self.encode(base, &c)?);
        }
        Ok(out)
    }
}

/// All strictly increasing face chains with every element in the given set.
fn chains_within(e: &EquivariantComplex, set: &[CoverSimplex]) -> Result<Vec<Vec<CoverSimplex>>> {
    let members: BTreeSet<&CoverSimplex> = set.iter().collect();
    // face relation: s covers t if t is in the face closure of s
    let mut out = Vec::new();
    for top in set {
        // chains ending at top: recursive over faces of top within the set
        let closure = e.face_closure_of(top)?;
        let candidates: Vec<&CoverSimplex> = closure
            .iter()
            .filter(|c| members.contains(*c) && *c != top)
            .collect();
        // is_face[a][b]: a < b in face order
        let mut below: HashMap<&CoverSimplex, BTreeSet<&CoverSimplex>> = HashMap::new();
        for &c in &candidates {
            let cl = e.face_closure_of(c)?;
            let deps: BTreeSet<&CoverSimplex> = candidates
                .iter()
                .filter(|&&d| d != c && cl.contains(d))
                .copied()
                .collect();
            below.insert(c, deps);
        }
        let mut stack: Vec<Vec<&CoverSimplex>> = vec![vec![top]];
        while let Some(chain) = stack.pop() {
            out.push(chain.iter().rev().map(|&s| s.clone()).collect());
            let lowest = *chain.last().unwrap();
            let lower_set: Vec<&CoverSimplex> = if lowest == top {
                candidates.clone()
            } else {
                below[&lowest].iter().copied().collect()
            };
            for next in lower_set {
                let mut c2 = chain.clone();
                c2.push(next);
                stack.push(c2);
            }
        }
    }
    Ok(out)
}

/// Barycentric subdivision of the full cover, orbit by orbit.
pub fn barycentric(e: &EquivariantComplex) -> Result<Subdivision> {
    let mut chains: Vec<Vec<CoverSimplex>> = Vec::new();
    let mut chain_index: HashMap<Vec<CoverSimplex>, usize> = HashMap::new();
    for o in 0..e.orbits().len() {
        let rep = CoverSimplex::new(o, e.group().identity());
        let closure: Vec<CoverSimplex> = e.face_closure_of(&rep)?.into_iter().collect();
        for chain in chains_within(e, &closure)? {
            // keep only chains ending exactly at this rep
            if chain.last() != Some(&rep) {
                continue;
            }
            if !chain_index.contains_key(&chain) {
                chain_index.insert(chain.clone(), chains.len());
                chains.push(chain);
            }
        }
    }
    // vertex subsets of each chain element relative to its top carrier
    let subset_of = |e: &EquivariantComplex, inner: &CoverSimplex, outer: &CoverSimplex| -> Result<Vec<usize>> {
        let vi = e.vertices_of(inner)?;
        let vo = e.vertices_of(outer)?;
        vi.iter()
            .map(|v| {
                vo.iter()
                    .position(|w| w == v)
                    .ok_or_else(|| CoreError::InvalidCover("not a face".into()))
            })
            .collect()
    };
    let mut orbits = Vec::with_capacity(chains.len());
    for chain in &chains {
        let q = chain.len() - 1;
        let top = chain.last().unwrap();
        let carrier = &e.orbits()[top.orbit];
        let mut faces = Vec::with_capacity(if q == 0 { 0 } else { q + 1 });
        if q > 0 {
            for j in 0..=q {
                let mut sub: Vec<CoverSimplex> = chain.clone();
                sub.remove(j);
                if j < q {
                    // top unchanged: already normalized
                    let orbit = chain_index[&sub];
                    faces.push((orbit, e.group().identity()));
                } else {
                    let new_top_g = sub.last().unwrap().g.clone();
                    let ginv = e.group().inv(&new_top_g)?;
                    let rep: Vec<CoverSimplex> = sub
                        .iter()
                        .map(|s| {
                            Ok(CoverSimplex::new(s.orbit, e.group().mul(&s.g, &ginv)?))
                        })
                        .collect::<Result<_>>()?;
                    let orbit = *chain_index.get(&rep).ok_or_else(|| {
                        CoreError::InvalidCover("missing subchain orbit".into())
                    })?;
                    faces.push((orbit, new_top_g));
                }
            }
        }
        // orientation: full flags inherit carrier sign times flag parity
        let sign = if q == e.dim() && carrier.dim == e.dim() {
            carrier.sign.map(|eps| {
                let mut perm = Vec::with_capacity(q + 1);
                let mut prev: Vec<usize> = Vec::new();
                for s in chain {
                    let cur = subset_of(e, s, top).expect("chain elements are faces");
                    let added = cur
                        .iter()
                        .find(|i| !prev.contains(i))
                        .copied()
                        .expect("chain strictly increases");
                    perm.push(added);
                    prev = cur;
                }
                let mut inversions = 0;
                for i in 0..perm.len() {
                    for j in (i + 1)..perm.len() {
                        if perm[i] > perm[j] {
                            inversions += 1;
                        }
                    }
                }
                if inversions % 2 == 0 {
                    eps
                } else {
                    -eps
                }
            })
        } else {
            None
        };
        let name = format!(
            "b[{}]",
            chain
                .iter()
                .map(|s| format!("{}@{:?}", e.orbits()[s.orbit].name, s.g))
                .collect::<Vec<_>>()
                .join("<")
        );
        orbits.push(OrbitData {
            name,
            dim: q,
            faces,
            in_boundary: carrier.in_boundary,
            sign,
        });
    }
    let complex = EquivariantComplex::new(e.group().clone(), orbits)?;
    Ok(Subdivision {
        complex,
        chains,
        chain_index,
    })
}

/// Per-orbit link validation of the whole (possibly infinite) cover: the
/// link of each orbit representative is computed inside its finite coface
/// patch and must be a rational sphere (interior orbits) or rationally
/// trivial (boundary orbits).
#[derive(Debug)]
pub struct CoverManifoldReport {
    pub ok: bool,
    pub failures: Vec<(usize, String)>,
}

pub fn validate_cover_manifold(e: &EquivariantComplex) -> Result<CoverManifoldReport> {
    let n = e.dim();
    let mut failures = Vec::new();
    for o in 0..e.orbits().len() {
        let rep = CoverSimplex::new(o, e.group().identity());
        let d = e.simplex_dim(&rep);
        // all iterated cofaces of the rep
        let mut patch: BTreeSet<CoverSimplex> = BTreeSet::new();
        let mut frontier = vec![rep.clone()];
        while let Some(cur) = frontier.pop() {
            if !patch.insert(cur.clone()) {
                continue;
            }
            if e.simplex_dim(&cur) < n {
                frontier.extend(e.cofaces_of(&cur)?);
            }
        }
        let sub = FiniteSubcomplex::from_simplices(e, patch)?;
        let plain = plain_complex(e, &sub)?;
        let mut ids: Vec<usize> = Vec::new();
        for v in e.vertices_of(&rep)? {
            ids.push(plain.vertices.iter().position(|w| w == &v).expect("interned"));
        }
        ids.sort_unstable();
        let link = plain.link(&ids);
        let in_boundary = e.orbit(o).in_boundary;
        if d == n {
            if !link.simplices.is_empty() {
                failures.push((o, "top orbit has cofaces".into()));
            }
            continue;
        }
        if link.simplices.is_empty() || link.dim() != n - d - 1 {
            failures.push((o, "link has wrong dimension (complex not pure)".into()));
            continue;
        }
        let interior_ok = link.is_rational_sphere(n - d - 1);
        let boundary_ok = link.is_rationally_trivial();
        match (in_boundary, interior_ok, boundary_ok) {
            (false, true, _) => {}
            (true, _, true) => {}
            (false, false, _) => {
                failures.push((o, "interior orbit link is not a rational sphere".into()))
            }
            (true, _, false) => {
                failures.push((o, "boundary orbit link is not rationally trivial".into()))
            }
        }
    }
    Ok(CoverManifoldReport {
        ok: failures.is_empty(),
        failures,
    })
}

/// Regular-neighborhood thickening: the full subcomplex of the barycentric
/// subdivision spanned by barycenters of simplices meeting X'. Returns the
/// thickening, its derived boundary, and the validation report.
pub struct Thickening {
    pub x: FiniteSubcomplex,
    pub y: FiniteSubcomplex,
    pub report: ManifoldReport,
}

pub fn thicken(
    e: &EquivariantComplex,
    sub: &Subdivision,
    x_prime: &FiniteSubcomplex,
) -> Result<Thickening> {
    if x_prime.is_empty() {
        let report = validate_homology_manifold(&sub.complex, &FiniteSubcomplex::empty(), None)?;
        return Ok(Thickening {
            x: FiniteSubcomplex::empty(),
            y: FiniteSubcomplex::empty(),
            report,
        });
    }
    if !x_prime.is_face_closed(e)? {
        return Err(CoreError::InvalidCover("X' must be a subcomplex".into()));
    }
    // W = simplices with a face in X' = iterated direct cofaces of X'
    let mut w: BTreeSet<CoverSimplex> = x_prime.simplices().cloned().collect();
    for _ in 0..e.dim() {
        let mut next = w.clone();
        for s in &w {
            for c in e.cofaces_of(s)? {
                next.insert(c);
            }
        }
        w = next;
    }
    let w_list: Vec<CoverSimplex> = w.into_iter().collect();
    let chains = chains_within(e, &w_list)?;
    let mut x = FiniteSubcomplex::empty();
    for c in chains {
        x.insert(sub.encode(e, &c)?);
    }
    let report = validate_homology_manifold(&sub.complex, &x, None)?;
    let y = report.derived_boundary.clone();
    Ok(Thickening { x, y, report })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The line as a Z-cover of the one-vertex circle: one vertex orbit,
    /// one edge orbit; edge (e, k) spans vertices k and k+1.
    pub fn line_cover() -> EquivariantComplex {
        let z = GroupDescriptor::free_abelian(1).unwrap();
        let t = GroupElement::vector(&[1]);
        let e0 = GroupElement::vector(&[0]);
        EquivariantComplex::new(
            z,
            vec![
                OrbitData {
                    name: "v".into(),
                    dim: 0,
                    faces: vec![],
                    in_boundary: false,
                    sign: None,
                },
                OrbitData {
                    name: "e".into(),
                    dim: 1,
                    faces: vec![(0, t), (0, e0)],
                    in_boundary: false,
                    sign: Some(1),
                },
            ],
        )
        .unwrap()
    }

    /// The plane as a Z^2-cover of the two-triangle torus: one vertex
    /// orbit, three edge orbits (horizontal, vertical, diagonal), two
    /// triangle orbits with opposite orientations.
    pub fn plane_cover() -> EquivariantComplex {
        let z2 = GroupDescriptor::free_abelian(2).unwrap();
        let g = |a: i64, b: i64| GroupElement::vector(&[a, b]);
        // vertices of the rep simplices (lexicographic local order):
        // lower triangle: (0,0), (1,0), (1,1); upper: (0,0), (0,1), (1,1)
        EquivariantComplex::new(
            z2,
            vec![
                // 0: vertex
                OrbitData {
                    name: "v".into(),
                    dim: 0,
                    faces: vec![],
                    in_boundary: false,
                    sign: None,
                },
                // 1: horizontal edge (0,0)-(1,0)
                OrbitData {
                    name: "eh".into(),
                    dim: 1,
                    faces: vec![(0, g(1, 0)), (0, g(0, 0))],
                    in_boundary: false,
                    sign: None,
                },
                // 2: vertical edge (0,0)-(0,1)
                OrbitData {
                    name: "ev".into(),
                    dim: 1,
                    faces: vec![(0, g(0, 1)), (0, g(0, 0))],
                    in_boundary: false,
                    sign: None,
                },
                // 3: diagonal edge (0,0)-(1,1)
                OrbitData {
                    name: "ed".into(),
                    dim: 1,
                    faces: vec![(0, g(1, 1)), (0, g(0, 0))],
                    in_boundary: false,
                    sign: None,
                },
                // 4: lower triangle [ (0,0), (1,0), (1,1) ]
                //    faces: opposite v0 = edge (1,0)-(1,1) = vertical +(1,0)
                //           opposite v1 = edge (0,0)-(1,1) = diagonal
                //           opposite v2 = edge (0,0)-(1,0) = horizontal
                OrbitData {
                    name: "tl".into(),
                    dim: 2,
                    faces: vec![(2, g(1, 0)), (3, g(0, 0)), (1, g(0, 0))],
                    in_boundary: false,
                    sign: Some(1),
                },
                // 5: upper triangle [ (0,0), (0,1), (1,1) ]
                //    faces: opposite v0 = edge (0,1)-(1,1) = horizontal +(0,1)
                //           opposite v1 = edge (0,0)-(1,1) = diagonal
                //           opposite v2 = edge (0,0)-(0,1) = vertical
                OrbitData {
                    name: "tu".into(),
                    dim: 2,
                    faces: vec![(1, g(0, 1)), (3, g(0, 0)), (2, g(0, 0))],
                    in_boundary: false,
                    sign: Some(-1),
                },
            ],
        )
        .unwrap()
    }

    /// Boundary of the 3-simplex (S^2) over the trivial group.
    pub fn sphere2() -> EquivariantComplex {
        finite_complex_from_tops(&[vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]])
            .unwrap()
    }

    /// Builds a trivial-group equivariant complex from top vertex tuples
    /// (faces generated automatically); orients it if possible.
    pub fn finite_complex_from_tops(tops: &[Vec<usize>]) -> Result<EquivariantComplex> {
        build_finite_complex(tops, &[])
    }

    pub fn build_finite_complex(
        tops: &[Vec<usize>],
        boundary: &[Vec<usize>],
    ) -> Result<EquivariantComplex> {
        let triv = GroupDescriptor::trivial();
        let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
        for t in tops {
            let mut t = t.clone();
            t.sort_unstable();
            // all subsets
            let n = t.len();
            for mask in 1..(1u32 << n) {
                let sub: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| t[i]).collect();
                simplices.insert(sub);
            }
        }
        let boundary_set: BTreeSet<Vec<usize>> = boundary
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort_unstable();
                b
            })
            .collect();
        let list: Vec<Vec<usize>> = simplices.iter().cloned().collect();
        let index: HashMap<Vec<usize>, usize> =
            list.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let orbits: Vec<OrbitData> = list
            .iter()
            .map(|s| {
                let dim = s.len() - 1;
                let faces = if dim == 0 {
                    vec![]
                } else {
                    (0..=dim)
                        .map(|i| {
                            let mut f = s.clone();
                            f.remove(i);
                            (index[&f], GroupElement::Unit)
                        })
                        .collect()
                };
                OrbitData {
                    name: format!("{s:?}"),
                    dim,
                    faces,
                    in_boundary: boundary_set.contains(s),
                    sign: None,
                }
            })
            .collect();
        let mut e = EquivariantComplex::new(triv, orbits)?;
        // orientation is optional for validation-only complexes
        let _ = e.orient();
        Ok(e)
    }

    pub fn whole_complex(e: &EquivariantComplex) -> FiniteSubcomplex {
        // for trivial group: every orbit at the unit
        let mut s = FiniteSubcomplex::empty();
        for o in 0..e.orbits().len() {
            s.insert(CoverSimplex::new(o, GroupElement::Unit));
        }
        s
    }

    #[test]
    fn line_cover_is_valid() {
        let e = line_cover();
        assert_eq!(e.dim(), 1);
        let edge = CoverSimplex::new(1, GroupElement::vector(&[0]));
        let vs = e.vertices_of(&edge).unwrap();
        assert_eq!(vs.len(), 2);
        assert_eq!(vs[0], CoverSimplex::new(0, GroupElement::vector(&[0])));
        assert_eq!(vs[1], CoverSimplex::new(0, GroupElement::vector(&[1])));
    }

    #[test]
    fn plane_cover_is_valid() {
        let e = plane_cover();
        assert_eq!(e.dim(), 2);
        assert_eq!(e.base_size(), 6);
    }

    #[test]
    fn sphere2_is_closed_homology_manifold() {
        let e = sphere2();
        let s = whole_complex(&e);
        let report = validate_homology_manifold(&e, &s, None).unwrap();
        assert!(report.ok, "{:?}", report.failures);
        assert!(report.derived_boundary.is_empty());
    }

    #[test]
    fn single_triangle_has_boundary() {
        let e = finite_complex_from_tops(&[vec![0, 1, 2]]).unwrap();
        let s = whole_complex(&e);
        let report = validate_homology_manifold(&e, &s, None).unwrap();
        assert!(report.ok, "{:?}", report.failures);
        // boundary = 3 edges + 3 vertices
        assert_eq!(report.derived_boundary.len(), 6);
    }

    #[test]
    fn wedge_fails_at_the_wedge_point() {
        // two triangles sharing exactly one vertex
        let e = finite_complex_from_tops(&[vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        let s = whole_complex(&e);
        let report = validate_homology_manifold(&e, &s, None).unwrap();
        assert!(!report.ok);
        assert!(report
            .failures
            .iter()
            .any(|(sx, _)| e.simplex_dim(sx) == 0));
    }

    #[test]
    fn line_segments_are_manifolds_with_boundary() {
        let e = line_cover();
        // segment [-2..2]: edges -2..1, vertices -2..2
        let edges = (-2..2).map(|k| CoverSimplex::new(1, GroupElement::vector(&[k])));
        let seg = FiniteSubcomplex::from_simplices(&e, edges).unwrap();
        assert_eq!(seg.len(), 9);
        let report = validate_homology_manifold(&e, &seg, None).unwrap();
        assert!(report.ok, "{:?}", report.failures);
        // boundary = the two endpoint vertices
        assert_eq!(report.derived_boundary.len(), 2);
    }

    #[test]
    fn star_of_vertex_in_triangle() {
        let e = finite_complex_from_tops(&[vec![0, 1, 2]]).unwrap();
        // orbit of the vertex [0]
        let v_orbit = (0..e.orbits().len())
            .find(|&o| e.orbits()[o].name == "[0]")
            .unwrap();
        let mut x = FiniteSubcomplex::empty();
        x.insert(CoverSimplex::new(v_orbit, GroupElement::Unit));
        let st = star(&e, &x).unwrap();
        // the whole triangle
        assert_eq!(st.len(), 7);
        let empty = star(&e, &FiniteSubcomplex::empty()).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn barycentric_subdivision_of_line() {
        let e = line_cover();
        let sub = barycentric(&e).unwrap();
        // orbits: [v], [e-bary], [v<e] x 2
        assert_eq!(sub.complex.orbits().len(), 4);
        assert_eq!(sub.complex.dim(), 1);
        // subdividing a segment doubles the edges
        let edges = (0..2).map(|k| CoverSimplex::new(1, GroupElement::vector(&[k])));
        let seg = FiniteSubcomplex::from_simplices(&e, edges).unwrap();
        let seg_b = sub.subdivide(&e, &seg).unwrap();
        // 2 edges -> 4 edges, 3 + 2 vertices
        assert_eq!(seg_b.len(), 9);
        let report = validate_homology_manifold(&sub.complex, &seg_b, None).unwrap();
        assert!(report.ok);
    }

    #[test]
    fn barycentric_subdivision_of_sphere() {
        let e = sphere2();
        let sub = barycentric(&e).unwrap();
        let whole = whole_complex(&e);
        let whole_b = sub.subdivide(&e, &whole).unwrap();
        // barycentric subdivision of S^2 with 4+6+4 simplices:
        // 14 vertices, 36 edges, 24 triangles
        assert_eq!(whole_b.len(), 74);
        let report = validate_homology_manifold(&sub.complex, &whole_b, None).unwrap();
        assert!(report.ok, "{:?}", report.failures);
        assert!(report.derived_boundary.is_empty());
    }

    #[test]
    fn star_identity_on_sphere() {
        // Star(X)_b = Star(Star(X_b)) for X = one vertex of S^2
        let e = sphere2();
        let sub = barycentric(&e).unwrap();
        let v_orbit = (0..e.orbits().len())
            .find(|&o| e.orbits()[o].name == "[0]")
            .unwrap();
        let mut x = FiniteSubcomplex::empty();
        x.insert(CoverSimplex::new(v_orbit, GroupElement::Unit));
        let lhs = sub.subdivide(&e, &star(&e, &x).unwrap()).unwrap();
        let x_b = sub.subdivide(&e, &x).unwrap();
        let rhs = star(&sub.complex, &star(&sub.complex, &x_b).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn thicken_vertex_of_sphere_is_disk() {
        let e = sphere2();
        let sub = barycentric(&e).unwrap();
        let v_orbit = (0..e.orbits().len())
            .find(|&o| e.orbits()[o].name == "[0]")
            .unwrap();
        let mut x_prime = FiniteSubcomplex::empty();
        x_prime.insert(CoverSimplex::new(v_orbit, GroupElement::Unit));
        let th = thicken(&e, &sub, &x_prime).unwrap();
        assert!(th.report.ok, "{:?}", th.report.failures);
        // closed star disk: 7 vertices, 12 edges, 6 triangles
        let counts: Vec<usize> = (0..=2).map(|d| th.x.of_dim(&sub.complex, d).len()).collect();
        assert_eq!(counts, vec![7, 12, 6]);
        // boundary = subdivided link hexagon: 6 vertices + 6 edges
        assert_eq!(th.y.len(), 12);
        // X'_b inside X inside Star(X')_b
        let xpb = sub.subdivide(&e, &x_prime).unwrap();
        assert!(xpb.is_subset(&th.x));
        let star_b = sub.subdivide(&e, &star(&e, &x_prime).unwrap()).unwrap();
        assert!(th.x.is_subset(&star_b));
    }

    #[test]
    fn thicken_whole_and_empty() {
        let e = sphere2();
        let sub = barycentric(&e).unwrap();
        let whole = whole_complex(&e);
        let th = thicken(&e, &sub, &whole).unwrap();
        assert_eq!(th.x, sub.subdivide(&e, &whole).unwrap());
        assert!(th.y.is_empty());
        let th = thicken(&e, &sub, &FiniteSubcomplex::empty()).unwrap();
        assert!(th.x.is_empty());
    }

    #[test]
    fn orient_plane_and_check_cycle() {
        // plane_cover ships signs; re-derive them with orient()
        let e = plane_cover();
        let mut unsigned = e.clone();
        for o in 0..unsigned.orbits.len() {
            unsigned.orbits[o].sign = None;
        }
        unsigned.orient().unwrap();
        let s4 = unsigned.orbits[4].sign.unwrap();
        let s5 = unsigned.orbits[5].sign.unwrap();
        assert_eq!(s4 * s5, -1, "triangle orientations must oppose");
    }

    #[test]
    fn cover_manifold_validation() {
        let line = line_cover();
        assert!(validate_cover_manifold(&line).unwrap().ok);
        let plane = plane_cover();
        assert!(validate_cover_manifold(&plane).unwrap().ok);
        let s2 = sphere2();
        assert!(validate_cover_manifold(&s2).unwrap().ok);
        // wedge of two triangles: the shared vertex fails
        let wedge = finite_complex_from_tops(&[vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        let rep = validate_cover_manifold(&wedge).unwrap();
        assert!(!rep.ok);
    }

    #[test]
    fn fundamental_class_cycle_violation_rejected() {
        // a single interval claimed closed: its signed boundary cannot
        // vanish without declaring the endpoints as boundary
        let triv = GroupDescriptor::trivial();
        let bad = EquivariantComplex::new(
            triv,
            vec![
                OrbitData {
                    name: "a".into(),
                    dim: 0,
                    faces: vec![],
                    in_boundary: false,
                    sign: None,
                },
                OrbitData {
                    name: "b".into(),
                    dim: 0,
                    faces: vec![],
                    in_boundary: false,
                    sign: None,
                },
                OrbitData {
                    name: "ab".into(),
                    dim: 1,
                    faces: vec![(1, GroupElement::Unit), (0, GroupElement::Unit)],
                    in_boundary: false,
                    sign: Some(1),
                },
            ],
        );
        assert!(bad.is_err());
    }
}
