//! Independent computation of von Neumann traces, L2-Betti numbers, and
//! L2-signatures for the supported group families.
//!
//! Finite and trivial groups have exact closed forms (push to the constant
//! quotient and normalize). Free abelian groups are handled by evaluating
//! the complex at unitary characters of the torus and averaging fiberwise
//! invariants over a refining offset grid; this is the one place in the
//! crate where floating point is used, and every result carries its
//! refinement-derived error bound.

use crate::chain::{FreeComplex, SymmetricComplex};
use crate::error::{CoreError, Result};
use crate::groupring::GroupRingMatrix;
use crate::groups::{GroupDescriptor, GroupElement, GroupTower};
use crate::quotient;
use crate::ratio::Q;
use nalgebra::{Complex, DMatrix};

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    IdentityCoefficient,
    FiniteGroupClosedForm,
    TorusSampling,
}

/// An oracle value with its tolerance; exact methods carry tolerance 0 and
/// the exact rational alongside.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: f64,
    pub tolerance: f64,
    pub method: OracleMethod,
    pub exact: Option<Q>,
}

impl OracleResult {
    fn exact(value: Q, method: OracleMethod) -> Self {
        OracleResult {
            value: crate::ratio::q_to_f64(&value),
            tolerance: 0.0,
            method,
            exact: Some(value),
        }
    }
}

/// Sampling controls for the torus oracle.
#[derive(Debug, Clone, Copy)]
pub struct TorusOptions {
    /// Initial per-coordinate grid size.
    pub initial_n: usize,
    /// Stop when two successive refinements differ by less than this.
    pub tolerance: f64,
    /// Maximum number of doublings.
    pub refinement_limit: usize,
    /// Relative threshold separating zero fiber eigenvalues from nonzero.
    pub zero_threshold: f64,
}

impl Default for TorusOptions {
    fn default() -> Self {
        TorusOptions {
            initial_n: 64,
            tolerance: 1e-6,
            refinement_limit: 6,
            zero_threshold: 1e-9,
        }
    }
}

/// Ordinary signature of the fully pushed complex divided by |Gamma|;
/// exact, for finite or trivial deck groups.
pub fn l2_signature_finite(s: &SymmetricComplex) -> Result<Q> {
    let group = s.group();
    if group.free_rank().is_some() {
        return Err(CoreError::GroupMismatch(
            "finite-group oracle called on an infinite group".into(),
        ));
    }
    let tower = GroupTower::make_tower(group, &[1])?;
    let snap = quotient::snapshot(s, &tower.levels()[0])?;
    Ok(snap.sign_normalized())
}

fn unit_character(theta: &[f64], w: &GroupElement) -> Result<C64> {
    match w {
        GroupElement::Vector(v) => {
            let mut phase = 0.0;
            for (t, &e) in theta.iter().zip(v.iter()) {
                phase += t * e as f64;
            }
            Ok(C64::new(phase.cos(), phase.sin()))
        }
        _ => Err(CoreError::NotFreeAbelian("torus evaluation")),
    }
}

/// Evaluates a group-ring matrix at a character of the torus.
fn eval_at(m: &GroupRingMatrix, theta: &[f64]) -> Result<DMatrix<C64>> {
    let mut out = DMatrix::from_element(m.rows(), m.cols(), C64::new(0.0, 0.0));
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let mut v = C64::new(0.0, 0.0);
            for (w, c) in m.get(i, j).terms() {
                v += unit_character(theta, w)? * crate::ratio::q_to_f64(c);
            }
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues of the Hermitian part, ascending.
fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Orthonormal basis of the numerical kernel of a Hermitian PSD matrix.
fn kernel_basis(m: &DMatrix<C64>, threshold: f64) -> DMatrix<C64> {
    let n = m.nrows();
    if n == 0 {
        return DMatrix::from_element(0, 0, C64::new(0.0, 0.0));
    }
    let h = hermitian_part(m);
    let scale = 1.0f64.max(h.norm());
    let eig = nalgebra::SymmetricEigen::new(h);
    let cols: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i].abs() <= threshold * scale)
        .collect();
    let mut out = DMatrix::from_element(n, cols.len(), C64::new(0.0, 0.0));
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &eig.eigenvectors.column(i));
    }
    out
}

fn fiber_laplacian(c: &FreeComplex, p: usize, theta: &[f64]) -> Result<DMatrix<C64>> {
    let up = eval_at(&c.diff(p + 1), theta)?;
    let down = eval_at(&c.diff(p), theta)?;
    Ok(&up * up.adjoint() + down.adjoint() * &down)
}

/// Fiberwise signature of the middle homology pairing at one character.
fn fiber_signature(s: &SymmetricComplex, theta: &[f64], zero_threshold: f64) -> Result<f64> {
    let mid = s.middle_degree()?;
    let lap = fiber_laplacian(s.base(), mid, theta)?;
    let b = kernel_basis(&lap, zero_threshold);
    if b.ncols() == 0 {
        return Ok(0.0);
    }
    let f = eval_at(s.duality(mid), theta)?;
    let pairing = b.adjoint() * f * &b;
    let scale = 1.0f64.max(pairing.norm());
    let ev = hermitian_eigenvalues(&pairing);
    let mut sig = 0.0;
    for v in ev {
        if v > zero_threshold * scale {
            sig += 1.0;
        } else if v < -zero_threshold * scale {
            sig -= 1.0;
        }
    }
    Ok(sig)
}

fn fiber_nullity(c: &FreeComplex, p: usize, theta: &[f64], zero_threshold: f64) -> Result<f64> {
    let lap = fiber_laplacian(c, p, theta)?;
    if lap.nrows() == 0 {
        return Ok(0.0);
    }
    let scale = 1.0f64.max(lap.norm());
    let ev = hermitian_eigenvalues(&lap);
    Ok(ev.iter().filter(|&&v| v.abs() <= zero_threshold * scale).count() as f64)
}

/// Average of a fiber functional over the offset grid
/// theta_j = 2 pi (j + 1/2) / n per coordinate. The half-step offset keeps
/// rational multiples of pi (where fiber invariants can jump) off the grid.
fn grid_average(
    rank: usize,
    n: usize,
    f: &mut impl FnMut(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let total = n.pow(rank as u32);
    let mut sum = 0.0;
    let mut theta = vec![0.0f64; rank];
    for idx in 0..total {
        let mut rem = idx;
        for d in 0..rank {
            let j = rem % n;
            rem /= n;
            theta[d] = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / (n as f64);
        }
        sum += f(&theta)?;
    }
    Ok(sum / total as f64)
}

fn refine_until_stable(
    rank: usize,
    opts: &TorusOptions,
    mut f: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<OracleResult> {
    let mut n = opts.initial_n.max(2);
    let mut prev = grid_average(rank, n, &mut f)?;
    let mut delta = f64::INFINITY;
    for _ in 0..opts.refinement_limit {
        n *= 2;
        let cur = grid_average(rank, n, &mut f)?;
        delta = (cur - prev).abs();
        prev = cur;
        if delta < opts.tolerance {
            return Ok(OracleResult {
                value: prev,
                tolerance: delta + 1e-12,
                method: OracleMethod::TorusSampling,
                exact: None,
            });
        }
    }
    Err(CoreError::OracleNonConvergent {
        limit: opts.refinement_limit,
        delta,
    })
}

/// L2-signature of a symmetric complex over Z^m by fiberwise signatures
/// averaged over the character torus.
///
/// The fiberwise formula is the standard Fourier realization of the
/// von Neumann trace for Z^m; fiber invariants are locally constant off a
/// measure-zero jump set for rational inputs, which the offset grid avoids.
pub fn l2_signature_torus(s: &SymmetricComplex, opts: &TorusOptions) -> Result<OracleResult> {
    let rank = s
        .group()
        .free_rank()
        .ok_or(CoreError::NotFreeAbelian("l2_signature_torus"))?;
    refine_until_stable(rank, opts, |theta| {
        fiber_signature(s, theta, opts.zero_threshold)
    })
}

/// L2-Betti number of a free complex over Z^m: averaged fiber nullity of
/// the degree-p Laplacian.
pub fn l2_betti_torus(c: &FreeComplex, p: usize, opts: &TorusOptions) -> Result<OracleResult> {
    let rank = c
        .group()
        .free_rank()
        .ok_or(CoreError::NotFreeAbelian("l2_betti_torus"))?;
    if p > c.dim() {
        return Err(CoreError::DegreeOutOfRange { p, top: c.dim() });
    }
    refine_until_stable(rank, opts, |theta| {
        fiber_nullity(c, p, theta, opts.zero_threshold)
    })
}

/// Best available signature oracle for the complex's group.
pub fn signature_oracle(s: &SymmetricComplex, opts: &TorusOptions) -> Result<Option<OracleResult>> {
    if s.group().free_rank().is_some() {
        Ok(Some(l2_signature_torus(s, opts)?))
    } else {
        Ok(Some(OracleResult::exact(
            l2_signature_finite(s)?,
            OracleMethod::FiniteGroupClosedForm,
        )))
    }
}

/// Best available Betti oracle for the complex's group.
pub fn betti_oracle(c: &FreeComplex, p: usize, opts: &TorusOptions) -> Result<Option<OracleResult>> {
    if c.group().free_rank().is_some() {
        Ok(Some(l2_betti_torus(c, p, opts)?))
    } else {
        // constant tower: ordinary normalized Betti number, exact
        let tower = GroupTower::make_tower(c.group(), &[1])?;
        let b = quotient::betti_k(c, p, &tower.levels()[0])?;
        Ok(Some(OracleResult::exact(b, OracleMethod::IdentityCoefficient)))
    }
}

/// Expression tree over group-ring matrix leaves, evaluated exactly in
/// QGamma. Serves as the left side of the trace-stabilization test.
#[derive(Debug, Clone)]
pub enum Expr {
    Leaf(GroupRingMatrix),
    Mul(Box<Expr>, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Adjoint(Box<Expr>),
    Scale(Q, Box<Expr>),
}

impl Expr {
    pub fn leaf(m: GroupRingMatrix) -> Expr {
        Expr::Leaf(m)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    /// Left-to-right product of powers: leaf^e.
    pub fn power(m: GroupRingMatrix, e: usize) -> Expr {
        assert!(e >= 1);
        let mut out = Expr::leaf(m.clone());
        for _ in 1..e {
            out = Expr::mul(out, Expr::leaf(m.clone()));
        }
        out
    }

    pub fn eval(&self, group: &GroupDescriptor) -> Result<GroupRingMatrix> {
        Ok(match self {
            Expr::Leaf(m) => m.clone(),
            Expr::Mul(a, b) => a.eval(group)?.mul(&b.eval(group)?, group)?,
            Expr::Add(a, b) => a.eval(group)?.add(&b.eval(group)?)?,
            Expr::Neg(a) => a.eval(group)?.neg(),
            Expr::Adjoint(a) => a.eval(group)?.adjoint(group)?,
            Expr::Scale(c, a) => {
                let m = a.eval(group)?;
                let mut out = GroupRingMatrix::zeros(m.rows(), m.cols());
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        out.set(i, j, m.get(i, j).scale(c));
                    }
                }
                out
            }
        })
    }
}

/// Exact von Neumann trace of an expression in group-ring matrices.
pub fn vn_trace_expression(expr: &Expr, group: &GroupDescriptor) -> Result<Q> {
    expr.eval(group)?.vn_trace(group)
}

/// Normalized pushed trace of the same expression at a quotient level,
/// with products computed in the quotient group ring.
pub fn pushed_trace_expression(
    expr: &Expr,
    group: &GroupDescriptor,
    level: &crate::groups::TowerLevel,
) -> Result<Q> {
    expr.eval(group)?
        .push_ring(level)?
        .normalized_trace(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::from_form;
    use crate::groupring::GroupRingElement;
    use crate::ratio::{q_int, q_ratio};

    fn z() -> GroupDescriptor {
        GroupDescriptor::free_abelian(1).unwrap()
    }

    fn laurent(terms: &[(i64, i64)]) -> GroupRingElement {
        GroupRingElement::from_terms(
            terms
                .iter()
                .map(|&(e, c)| (GroupElement::vector(&[e]), q_int(c))),
        )
    }

    fn mat1(e: GroupRingElement) -> GroupRingMatrix {
        GroupRingMatrix::from_entries(1, 1, vec![e]).unwrap()
    }

    #[test]
    fn finite_oracle_examples() {
        let triv = GroupDescriptor::trivial();
        let unit = from_form(
            &triv,
            mat1(GroupRingElement::scalar(&triv, q_int(1))),
            1,
        )
        .unwrap();
        assert_eq!(l2_signature_finite(&unit).unwrap(), q_int(1));

        let z3 = GroupDescriptor::cyclic(3).unwrap();
        let unit3 = from_form(
            &z3,
            mat1(GroupRingElement::scalar(&z3, q_int(1))),
            1,
        )
        .unwrap();
        assert_eq!(l2_signature_finite(&unit3).unwrap(), q_int(1));

        let hyp = from_form(
            &triv,
            GroupRingMatrix::from_entries(
                2,
                2,
                vec![
                    GroupRingElement::scalar(&triv, q_int(1)),
                    GroupRingElement::zero(),
                    GroupRingElement::zero(),
                    GroupRingElement::scalar(&triv, q_int(-1)),
                ],
            )
            .unwrap(),
            1,
        )
        .unwrap();
        assert_eq!(l2_signature_finite(&hyp).unwrap(), q_int(0));
    }

    #[test]
    fn finite_oracle_equals_tower_at_every_level() {
        let z3 = GroupDescriptor::cyclic(3).unwrap();
        let s = from_form(&z3, mat1(GroupRingElement::scalar(&z3, q_int(2))), 1).unwrap();
        let oracle = l2_signature_finite(&s).unwrap();
        let tower = GroupTower::make_tower(&z3, &[1, 1, 1]).unwrap();
        let run = quotient::run_tower(&s, &tower).unwrap();
        for row in &run.rows {
            assert_eq!(row.sign_norm, oracle);
        }
    }

    fn fast_opts() -> TorusOptions {
        TorusOptions {
            initial_n: 32,
            tolerance: 1e-6,
            refinement_limit: 4,
            zero_threshold: 1e-9,
        }
    }

    #[test]
    fn torus_signature_hyperbolic_is_zero() {
        let s = from_form(&z(), mat1(laurent(&[(1, 1), (-1, 1)])), 1).unwrap();
        let r = l2_signature_torus(&s, &fast_opts()).unwrap();
        assert!(r.value.abs() <= 1e-9, "value {}", r.value);
    }

    #[test]
    fn torus_signature_positive_is_one() {
        let s = from_form(&z(), mat1(laurent(&[(0, 2), (1, 1), (-1, 1)])), 1).unwrap();
        let r = l2_signature_torus(&s, &fast_opts()).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-9, "value {}", r.value);
    }

    #[test]
    fn torus_signature_constant_fiber() {
        let s = from_form(&z(), mat1(laurent(&[(0, 1)])), 1).unwrap();
        let r = l2_signature_torus(&s, &fast_opts()).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn torus_betti_circle_is_zero() {
        let circle = crate::chain::tests::circle_complex();
        let r = l2_betti_torus(&circle, 0, &fast_opts()).unwrap();
        assert!(r.value.abs() <= 1e-12, "value {}", r.value);
    }

    #[test]
    fn torus_betti_zero_complex_is_rank() {
        let c = crate::chain::FreeComplex::concentrated(z(), 2, 1, 3);
        let r = l2_betti_torus(&c, 1, &fast_opts()).unwrap();
        assert!((r.value - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn torus_betti_two_circles() {
        // direct sum of two circle complexes: ranks (2,2), diagonal t-1
        let d = GroupRingMatrix::from_entries(
            2,
            2,
            vec![
                laurent(&[(1, 1), (0, -1)]),
                GroupRingElement::zero(),
                GroupRingElement::zero(),
                laurent(&[(1, 1), (0, -1)]),
            ],
        )
        .unwrap();
        let c = crate::chain::FreeComplex::new(z(), vec![2, 2], vec![d]).unwrap();
        let r = l2_betti_torus(&c, 0, &fast_opts()).unwrap();
        assert!(r.value.abs() <= 1e-12);
    }

    #[test]
    fn expression_examples() {
        let g = z();
        let h = mat1(laurent(&[(1, 1), (-1, 1)]));
        assert_eq!(
            vn_trace_expression(&Expr::power(h.clone(), 2), &g).unwrap(),
            q_int(2)
        );
        let zero = GroupRingMatrix::zeros(2, 2);
        assert_eq!(
            vn_trace_expression(&Expr::power(zero, 3), &g).unwrap(),
            q_int(0)
        );
        let a = mat1(laurent(&[(1, 1)]));
        let b = mat1(laurent(&[(-1, 1)]));
        assert_eq!(
            vn_trace_expression(&Expr::mul(Expr::leaf(a), Expr::leaf(b)), &g).unwrap(),
            q_int(1)
        );
    }

    #[test]
    fn expression_trace_matches_pushed_trace_beyond_bound() {
        let g = z();
        // support width 1, degree 3: stable once m > 6
        let h1 = mat1(laurent(&[(1, 1), (0, 2)]));
        let h2 = mat1(laurent(&[(-1, 3), (1, -1)]));
        let h3 = mat1(laurent(&[(0, 1), (-1, 2)]));
        let e = Expr::mul(
            Expr::mul(Expr::leaf(h1), Expr::leaf(h2)),
            Expr::leaf(h3),
        );
        let vn = vn_trace_expression(&e, &g).unwrap();
        let tower = GroupTower::quotient_sequence(&g, &[7, 9]).unwrap();
        for l in tower.levels() {
            assert_eq!(pushed_trace_expression(&e, &g, l).unwrap(), vn);
        }
    }

    #[test]
    fn scale_and_adjoint_in_expressions() {
        let g = z();
        let h = mat1(laurent(&[(1, 1)]));
        // tr( (1/2) (t* t) ) = 1/2
        let e = Expr::Scale(
            q_ratio(1, 2),
            Box::new(Expr::mul(
                Expr::Adjoint(Box::new(Expr::leaf(h.clone()))),
                Expr::leaf(h),
            )),
        );
        assert_eq!(vn_trace_expression(&e, &g).unwrap(), q_ratio(1, 2));
    }
}
