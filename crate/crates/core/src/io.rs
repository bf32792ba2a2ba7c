//! JSON input formats and CSV output, shared by the CLI and the tests.
//!
//! Rationals travel as decimal-free "p/q" strings in every theorem-bearing
//! column; oracle columns are decimals with an explicit bound column.

use crate::amenable::{AmenableRow, OperatorRow};
use crate::chain::{FreeComplex, SymmetricComplex};
use crate::error::{CoreError, Result};
use crate::groupring::{GroupRingElement, GroupRingMatrix};
use crate::groups::{GroupDescriptor, GroupElement, GroupTower};
use crate::l2oracle::OracleResult;
use crate::quotient::{BettiRow, ConvergenceRow};
use crate::ratio::{format_q, parse_q, q_to_f64};
use crate::simplicial::{CoverSimplex, EquivariantComplex, FiniteSubcomplex, OrbitData};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeSet, HashMap};

/// Group descriptor wire format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupJson {
    Trivial {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schedule: Option<Vec<u64>>,
    },
    Finite {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schedule: Option<Vec<u64>>,
    },
    FreeAbelian {
        rank: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schedule: Option<Vec<u64>>,
    },
}

impl GroupJson {
    pub fn to_descriptor(&self) -> Result<GroupDescriptor> {
        match self {
            GroupJson::Trivial { .. } => Ok(GroupDescriptor::trivial()),
            GroupJson::Finite { table, generators, .. } => {
                GroupDescriptor::finite_explicit(table.clone(), generators.clone())
            }
            GroupJson::FreeAbelian { rank, .. } => GroupDescriptor::free_abelian(*rank),
        }
    }

    pub fn schedule(&self) -> Option<&[u64]> {
        match self {
            GroupJson::Trivial { schedule }
            | GroupJson::Finite { schedule, .. }
            | GroupJson::FreeAbelian { schedule, .. } => schedule.as_deref(),
        }
    }

    /// Builds the tower: a divisibility chain gives a nested tower, any
    /// other strictly increasing schedule a plain quotient sequence.
    /// `k_max` truncates (or, for absent schedules, sets the default
    /// depth).
    pub fn to_tower(&self, k_max: Option<usize>) -> Result<GroupTower> {
        let descriptor = self.to_descriptor()?;
        let schedule: Vec<u64> = match self.schedule() {
            Some(s) => {
                let take = k_max.unwrap_or(s.len()).min(s.len());
                s[..take].to_vec()
            }
            None => {
                let depth = k_max.unwrap_or(4);
                if descriptor.free_rank().is_some() {
                    (1..=depth as u32).map(|k| 1u64 << k).collect()
                } else {
                    vec![1; depth]
                }
            }
        };
        if descriptor.free_rank().is_some() {
            let is_chain = schedule.windows(2).all(|w| w[0] < w[1] && w[1] % w[0] == 0);
            if is_chain {
                GroupTower::make_tower(&descriptor, &schedule)
            } else {
                GroupTower::quotient_sequence(&descriptor, &schedule)
            }
        } else {
            GroupTower::make_tower(&descriptor, &schedule)
        }
    }
}

fn element_to_json(g: &GroupElement) -> Value {
    match g {
        GroupElement::Unit => Value::Null,
        GroupElement::Finite(i) => Value::from(*i),
        GroupElement::Vector(v) => Value::from(v.clone()),
    }
}

fn element_from_json(group: &GroupDescriptor, v: &Value) -> Result<GroupElement> {
    let bad = || CoreError::Schema(format!("bad group element {v}"));
    let g = match (group.free_rank(), v) {
        (_, Value::Null) if group.is_trivial() => GroupElement::Unit,
        (None, Value::Number(n)) => {
            if group.is_trivial() {
                GroupElement::Unit
            } else {
                GroupElement::Finite(n.as_u64().ok_or_else(bad)? as usize)
            }
        }
        (Some(_), Value::Array(a)) => {
            let mut out = Vec::with_capacity(a.len());
            for x in a {
                out.push(x.as_i64().ok_or_else(bad)?);
            }
            GroupElement::Vector(out)
        }
        (None, Value::Array(a)) if a.is_empty() && group.is_trivial() => GroupElement::Unit,
        _ => return Err(bad()),
    };
    if !group.contains(&g) {
        return Err(CoreError::ElementOutsideGroup(format!("{g:?}")));
    }
    Ok(g)
}

/// One term of a group-ring entry: a group element and a "p/q" coefficient.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub g: Value,
    pub c: String,
}

/// Row-major matrix over the group ring.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Vec<TermJson>>>,
}

impl MatrixJson {
    pub fn to_matrix(&self, group: &GroupDescriptor) -> Result<GroupRingMatrix> {
        if self.entries.len() != self.rows {
            return Err(CoreError::Schema("matrix row count mismatch".into()));
        }
        let mut out = GroupRingMatrix::zeros(self.rows, self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(CoreError::Schema(format!("matrix row {i} length mismatch")));
            }
            for (j, terms) in row.iter().enumerate() {
                for t in terms {
                    let g = element_from_json(group, &t.g)?;
                    let c = parse_q(&t.c)?;
                    out.add_to(i, j, g, &c);
                }
            }
        }
        Ok(out)
    }

    pub fn from_matrix(m: &GroupRingMatrix) -> MatrixJson {
        let entries = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| {
                        m.get(i, j)
                            .terms()
                            .map(|(g, c)| TermJson {
                                g: element_to_json(g),
                                c: format_q(c),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }
}

/// Chain complex wire format; `duality` present for symmetric complexes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub dim: usize,
    pub ranks: Vec<usize>,
    pub differentials: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duality: Option<Vec<MatrixJson>>,
}

impl ComplexJson {
    pub fn to_free_complex(&self, group: &GroupDescriptor) -> Result<FreeComplex> {
        if self.ranks.len() != self.dim + 1 {
            return Err(CoreError::Schema(format!(
                "dim {} needs {} ranks, got {}",
                self.dim,
                self.dim + 1,
                self.ranks.len()
            )));
        }
        let diffs = self
            .differentials
            .iter()
            .map(|m| m.to_matrix(group))
            .collect::<Result<Vec<_>>>()?;
        FreeComplex::new(group.clone(), self.ranks.clone(), diffs)
    }

    pub fn to_symmetric_complex(&self, group: &GroupDescriptor) -> Result<SymmetricComplex> {
        let base = self.to_free_complex(group)?;
        let duality = self
            .duality
            .as_ref()
            .ok_or_else(|| CoreError::Schema("missing duality block".into()))?
            .iter()
            .map(|m| m.to_matrix(group))
            .collect::<Result<Vec<_>>>()?;
        SymmetricComplex::new(base, duality)
    }

    pub fn from_symmetric(s: &SymmetricComplex) -> ComplexJson {
        let base = s.base();
        ComplexJson {
            dim: base.dim(),
            ranks: base.ranks().to_vec(),
            differentials: (1..=base.dim())
                .map(|p| MatrixJson::from_matrix(&base.diff(p)))
                .collect(),
            duality: Some(
                (0..=base.dim())
                    .map(|p| MatrixJson::from_matrix(s.duality(p)))
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaceJson {
    pub orbit: String,
    pub g: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitJson {
    pub name: String,
    pub dim: usize,
    #[serde(default)]
    pub faces: Vec<FaceJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignJson {
    pub orbit: String,
    pub sign: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FundamentalClassJson {
    /// "auto": solve for an orientation.
    Auto(String),
    Signs(Vec<SignJson>),
}

/// Equivariant complex wire format. General form: orbits with labelled
/// face maps. Trivial-group shorthand: top simplices as vertex tuples,
/// faces generated automatically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverJson {
    pub group: GroupJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbits: Option<Vec<OrbitJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplices: Option<Vec<Vec<usize>>>,
    /// Orbit names (general form) or vertex tuples rendered as names
    /// (shorthand) of the boundary subcomplex.
    #[serde(default)]
    pub boundary: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fundamental_class: Option<FundamentalClassJson>,
}

fn tuple_name(t: &[usize]) -> String {
    format!(
        "[{}]",
        t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
    )
}

impl CoverJson {
    pub fn to_complex(&self) -> Result<EquivariantComplex> {
        let group = self.group.to_descriptor()?;
        let boundary_names: BTreeSet<String> = self
            .boundary
            .iter()
            .map(|v| match v {
                Value::String(s) => Ok(s.clone()),
                Value::Array(a) => {
                    let mut t = Vec::with_capacity(a.len());
                    for x in a {
                        t.push(x.as_u64().ok_or_else(|| {
                            CoreError::Schema("boundary tuple must hold integers".into())
                        })? as usize);
                    }
                    t.sort_unstable();
                    Ok(tuple_name(&t))
                }
                _ => Err(CoreError::Schema("boundary entry must be a name or tuple".into())),
            })
            .collect::<Result<_>>()?;
        let mut orbit_jsons: Vec<OrbitJson> = Vec::new();
        match (&self.orbits, &self.simplices) {
            (Some(o), None) => orbit_jsons = o.clone(),
            (None, Some(tops)) => {
                if !group.is_trivial() {
                    return Err(CoreError::Schema(
                        "vertex-tuple shorthand requires the trivial group".into(),
                    ));
                }
                let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
                for t in tops {
                    let mut t = t.clone();
                    t.sort_unstable();
                    let n = t.len();
                    if n == 0 {
                        return Err(CoreError::Schema("empty simplex".into()));
                    }
                    for mask in 1u32..(1 << n) {
                        let sub: Vec<usize> =
                            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| t[i]).collect();
                        all.insert(sub);
                    }
                }
                for s in &all {
                    let faces = if s.len() == 1 {
                        vec![]
                    } else {
                        (0..s.len())
                            .map(|i| {
                                let mut f = s.clone();
                                f.remove(i);
                                FaceJson {
                                    orbit: tuple_name(&f),
                                    g: Value::Null,
                                }
                            })
                            .collect()
                    };
                    orbit_jsons.push(OrbitJson {
                        name: tuple_name(s),
                        dim: s.len() - 1,
                        faces,
                    });
                }
            }
            _ => {
                return Err(CoreError::Schema(
                    "provide exactly one of `orbits` or `simplices`".into(),
                ))
            }
        }
        let index: HashMap<&str, usize> = orbit_jsons
            .iter()
            .enumerate()
            .map(|(i, o)| (o.name.as_str(), i))
            .collect();
        if index.len() != orbit_jsons.len() {
            return Err(CoreError::Schema("duplicate orbit names".into()));
        }
        let mut signs: HashMap<String, i64> = HashMap::new();
        let mut auto = false;
        match &self.fundamental_class {
            Some(FundamentalClassJson::Auto(s)) if s == "auto" => auto = true,
            Some(FundamentalClassJson::Auto(s)) => {
                return Err(CoreError::Schema(format!(
                    "unknown fundamental_class directive {s:?}"
                )))
            }
            Some(FundamentalClassJson::Signs(list)) => {
                for s in list {
                    signs.insert(s.orbit.clone(), s.sign);
                }
            }
            None => {}
        }
        let mut orbits: Vec<OrbitData> = orbit_jsons
            .iter()
            .map(|o| {
                let faces = o
                    .faces
                    .iter()
                    .map(|f| {
                        let oi = *index.get(f.orbit.as_str()).ok_or_else(|| {
                            CoreError::Schema(format!("unknown face orbit {:?}", f.orbit))
                        })?;
                        Ok((oi, element_from_json(&group, &f.g)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(OrbitData {
                    name: o.name.clone(),
                    dim: o.dim,
                    faces,
                    in_boundary: boundary_names.contains(&o.name),
                    sign: signs.get(&o.name).copied(),
                })
            })
            .collect::<Result<_>>()?;
        // declared boundaries are face-closed automatically
        loop {
            let mut grew = false;
            for i in 0..orbits.len() {
                if !orbits[i].in_boundary {
                    continue;
                }
                let faces: Vec<usize> = orbits[i].faces.iter().map(|(fo, _)| *fo).collect();
                for fo in faces {
                    if !orbits[fo].in_boundary {
                        orbits[fo].in_boundary = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut e = EquivariantComplex::new(group, orbits)?;
        if auto {
            e.orient()?;
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplexRefJson {
    pub orbit: String,
    pub g: Value,
}

/// Exhaustion wire format: a box Folner recipe or explicit levels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExhaustionJson {
    Folner { folner: String, k_max: usize },
    Explicit { levels: Vec<Vec<SimplexRefJson>> },
}

impl ExhaustionJson {
    pub fn to_levels(&self, e: &EquivariantComplex) -> Result<Vec<FiniteSubcomplex>> {
        match self {
            ExhaustionJson::Folner { folner, k_max } => {
                if folner != "box" {
                    return Err(CoreError::Schema(format!(
                        "unknown folner recipe {folner:?}"
                    )));
                }
                if *k_max == 0 {
                    return Err(CoreError::InvalidExhaustion("k_max must be >= 1".into()));
                }
                crate::amenable::box_folner(e, *k_max)
            }
            ExhaustionJson::Explicit { levels } => {
                if levels.is_empty() {
                    return Err(CoreError::InvalidExhaustion("no levels".into()));
                }
                let by_name: HashMap<&str, usize> = e
                    .orbits()
                    .iter()
                    .enumerate()
                    .map(|(i, o)| (o.name.as_str(), i))
                    .collect();
                levels
                    .iter()
                    .map(|level| {
                        let simplices = level
                            .iter()
                            .map(|s| {
                                let orbit = *by_name.get(s.orbit.as_str()).ok_or_else(|| {
                                    CoreError::Schema(format!("unknown orbit {:?}", s.orbit))
                                })?;
                                Ok(CoverSimplex::new(
                                    orbit,
                                    element_from_json(e.group(), &s.g)?,
                                ))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        FiniteSubcomplex::from_simplices(e, simplices)
                    })
                    .collect()
            }
        }
    }
}

/// Operator-mode input: a self-adjoint matrix over the group ring.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub group: GroupJson,
    pub matrix: MatrixJson,
}

fn fmt_decimal(v: f64) -> String {
    format!("{v:.12e}")
}

fn oracle_cells(oracle: Option<&OracleResult>, value: &crate::ratio::Q) -> (String, String, String) {
    match oracle {
        Some(o) => {
            let gap = (q_to_f64(value) - o.value).abs();
            (fmt_decimal(o.value), fmt_decimal(o.tolerance), fmt_decimal(gap))
        }
        None => (String::new(), String::new(), String::new()),
    }
}

/// CSV for the tower signature driver.
pub fn tower_sign_csv(rows: &[ConvergenceRow], oracle: Option<&OracleResult>) -> String {
    let mut out = String::from(
        "k,index,dim_k,b_plus_norm,b_minus_norm,b_zero_norm,sign_norm,oracle,oracle_bound,gap\n",
    );
    for r in rows {
        let (ov, ob, gap) = oracle_cells(oracle, &r.sign_norm);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.k,
            r.index,
            format_q(&r.dim_mid),
            format_q(&r.b_plus_norm),
            format_q(&r.b_minus_norm),
            format_q(&r.b_zero_norm),
            format_q(&r.sign_norm),
            ov,
            ob,
            gap
        ));
    }
    out
}

/// CSV for the tower Betti driver, one dim/betti column pair per degree.
pub fn tower_betti_csv(
    rows: &[BettiRow],
    degrees: &[usize],
    oracles: &[Option<OracleResult>],
) -> String {
    let mut header = String::from("k,index");
    for &p in degrees {
        header.push_str(&format!(",dim_{p},b_{p}"));
    }
    for &p in degrees {
        header.push_str(&format!(",oracle_{p},bound_{p},gap_{p}"));
    }
    header.push('\n');
    let mut out = header;
    for r in rows {
        out.push_str(&format!("{},{}", r.k, r.index));
        for i in 0..degrees.len() {
            out.push_str(&format!(",{},{}", format_q(&r.dims[i]), format_q(&r.betti[i])));
        }
        for i in 0..degrees.len() {
            let (ov, ob, gap) = oracle_cells(oracles.get(i).and_then(|o| o.as_ref()), &r.betti[i]);
            out.push_str(&format!(",{ov},{ob},{gap}"));
        }
        out.push('\n');
    }
    out
}

/// CSV for the amenable simplicial driver.
pub fn amenable_csv(
    rows: &[AmenableRow],
    degrees: &[usize],
    oracle: Option<&OracleResult>,
) -> String {
    let mut header = String::from("k,size,valid");
    for &p in degrees {
        header.push_str(&format!(",b_{p}"));
    }
    header.push_str(",b_plus_norm,b_minus_norm,b_zero_norm,sign_norm,oracle,oracle_bound,gap\n");
    let mut out = header;
    for r in rows {
        out.push_str(&format!("{},{},{}", r.k, r.size, r.valid));
        for b in &r.betti {
            out.push_str(&format!(",{}", format_q(b)));
        }
        let opt = |x: &Option<crate::ratio::Q>| x.as_ref().map(format_q).unwrap_or_default();
        out.push_str(&format!(
            ",{},{},{},{}",
            opt(&r.b_plus_norm),
            opt(&r.b_minus_norm),
            opt(&r.b_zero_norm),
            opt(&r.sign_norm)
        ));
        match (&r.sign_norm, oracle) {
            (Some(s), Some(_)) => {
                let (ov, ob, gap) = oracle_cells(oracle, s);
                out.push_str(&format!(",{ov},{ob},{gap}\n"));
            }
            _ => out.push_str(",,,\n"),
        }
    }
    out
}

/// CSV for the operator diagnostic mode.
pub fn operator_csv(rows: &[OperatorRow], oracle: Option<&OracleResult>) -> String {
    let mut out = String::from(
        "k,size,b_plus_norm,b_minus_norm,b_zero_norm,sign_norm,oracle,oracle_bound,gap\n",
    );
    for r in rows {
        let (ov, ob, gap) = oracle_cells(oracle, &r.sign_norm);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.k,
            r.size,
            format_q(&r.b_plus_norm),
            format_q(&r.b_minus_norm),
            format_q(&r.b_zero_norm),
            format_q(&r.sign_norm),
            ov,
            ob,
            gap
        ));
    }
    out
}

/// The standard example: the middle-degree form complex of a self-adjoint
/// 1x1 matrix, serialized.
pub fn form_complex_json(entry: &GroupRingElement, group: &GroupDescriptor) -> Result<ComplexJson> {
    let m = GroupRingMatrix::from_entries(1, 1, vec![entry.clone()])?;
    let s = crate::chain::from_form(group, m, 1)?;
    Ok(ComplexJson::from_symmetric(&s))
}
