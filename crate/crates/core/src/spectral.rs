//! Polynomial spectral filters, the determinant-bound small-eigenvalue
//! inequality, and proof-replay diagnostics.
//!
//! The filters are diagnostics: the signature path uses exact kernels and
//! inertia, never filters. Replaying them exhibits the inequalities the
//! convergence proofs rest on, with every comparison done in exact
//! arithmetic (a logarithmic inequality between rationals is decided by an
//! exact power comparison, with a wide-margin float screen first).

use crate::chain::SymmetricComplex;
use crate::error::{CoreError, Result};
use crate::groupring::GroupRingMatrix;
use crate::groups::TowerLevel;
use crate::linalg::{power_sums, QMatrix};
use crate::quotient::pushed_laplacian;
use crate::ratio::{format_q, q_from_f64, q_int, q_pow, q_ratio, q_to_f64, Q};
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FilterKind {
    PEps,
    QEps,
}

/// Outcome of the exact constraint check of a filter on its sample grid.
#[derive(Debug, Clone, Serialize)]
pub struct GridCheckReport {
    pub points_checked: usize,
    pub ok: bool,
    pub first_violation: Option<(String, String)>,
}

/// A certified polynomial filter with rational coefficients (monomial
/// basis, ascending). Construction fails unless the defining constraints
/// hold at every point of a rational grid of step <= eps/8 on [-K, K],
/// endpoints included exactly.
#[derive(Debug, Clone)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub eps: Q,
    pub k_bound: Q,
    pub interval: Option<(Q, Q)>,
    pub coeffs: Vec<Q>,
    pub check: GridCheckReport,
}

impl FilterSpec {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Q) -> Q {
        eval_poly(&self.coeffs, x)
    }
}

pub fn eval_poly(coeffs: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn grid_points(k_bound: &Q, eps: &Q, extra: &[Q]) -> Vec<Q> {
    let step = eps / q_int(8);
    let two_k = k_bound * q_int(2);
    let count = (&two_k / &step).ceil().to_integer().to_usize().unwrap_or(0) + 1;
    let mut pts: Vec<Q> = (0..count)
        .map(|i| -k_bound.clone() + &step * q_int(i as i64))
        .filter(|x| x <= k_bound)
        .collect();
    pts.push(k_bound.clone());
    pts.extend_from_slice(extra);
    pts.sort();
    pts.dedup();
    pts
}

/// Bump filter p_eps(x) = (1 - (x/K)^2)^d with the minimal even degree 2d
/// such that p is <= eps outside [-eps, eps]. Satisfies p(0) = 1,
/// 0 <= p <= 1 on [-K, K], and p <= eps on eps <= |x| <= K.
pub fn build_p_eps(eps: &Q, k_bound: &Q) -> Result<FilterSpec> {
    if !(eps > &Q::zero() && eps < &Q::one()) {
        return Err(CoreError::FilterParameter(format!(
            "eps must be in (0,1), got {}",
            format_q(eps)
        )));
    }
    if k_bound < &Q::one() {
        return Err(CoreError::FilterParameter(format!(
            "K must be >= 1, got {}",
            format_q(k_bound)
        )));
    }
    // Minimal d with (1 - (eps/K)^2)^d <= eps: estimated by logs, then
    // adjusted exactly. The degree scales like (K/eps)^2 ln(1/eps), so a
    // cap keeps pathological parameter choices from exploding.
    let base = Q::one() - (eps / k_bound) * (eps / k_bound);
    let estimate = (q_to_f64(eps).ln() / q_to_f64(&base).ln()).ceil();
    const DEGREE_CAP: usize = 8192;
    if !(estimate.is_finite() && estimate <= DEGREE_CAP as f64) {
        return Err(CoreError::FilterConstruction {
            cap: 2 * DEGREE_CAP,
            detail: format!(
                "p_eps for eps={} K={} needs degree about {:.0}",
                format_q(eps),
                format_q(k_bound),
                2.0 * estimate
            ),
        });
    }
    let mut d = (estimate as usize).max(1);
    while q_pow(&base, d as u64) > *eps {
        d += 1;
    }
    while d > 1 && q_pow(&base, (d - 1) as u64) <= *eps {
        d -= 1;
    }
    // coefficients of (1 - x^2/K^2)^d
    let k2 = k_bound * k_bound;
    let mut coeffs = vec![Q::zero(); 2 * d + 1];
    let mut binom = BigInt::one();
    for i in 0..=d {
        if i > 0 {
            binom = &binom * BigInt::from(d - i + 1) / BigInt::from(i);
        }
        let sign = if i % 2 == 0 { 1 } else { -1 };
        coeffs[2 * i] = Q::from_integer(&binom * BigInt::from(sign)) / q_pow(&k2, i as u64);
    }
    // The closed form makes the dense grid check cheap; the expansion is
    // verified against it at a sample of points.
    let closed = |x: &Q| -> Q {
        let u = Q::one() - (x / k_bound) * (x / k_bound);
        q_pow(&u, d as u64)
    };
    let pts = grid_points(k_bound, eps, &[-eps.clone(), eps.clone(), Q::zero()]);
    let mut check = GridCheckReport {
        points_checked: pts.len(),
        ok: true,
        first_violation: None,
    };
    let one_plus = Q::one() + eps;
    for x in &pts {
        let v = closed(x);
        let abs_x = x.abs();
        let bad = if v < Q::zero() {
            Some("p < 0")
        } else if &abs_x <= eps && v > one_plus {
            Some("p > 1+eps on the core")
        } else if &abs_x >= eps && &v > eps {
            Some("p > eps on the tail")
        } else {
            None
        };
        if let Some(msg) = bad {
            check.ok = false;
            check.first_violation = Some((format_q(x), msg.into()));
            break;
        }
    }
    if eval_poly(&coeffs, &Q::zero()) != Q::one() {
        check.ok = false;
        check.first_violation = Some(("0".into(), "p(0) != 1".into()));
    }
    // expansion agrees with the closed form
    for i in 0..=16 {
        let x = -k_bound.clone() + (k_bound * q_int(2)) * q_ratio(i, 16);
        if eval_poly(&coeffs, &x) != closed(&x) {
            check.ok = false;
            check.first_violation = Some((format_q(&x), "expansion mismatch".into()));
            break;
        }
    }
    if !check.ok {
        return Err(CoreError::FilterConstruction {
            cap: 2 * d,
            detail: format!("{:?}", check.first_violation),
        });
    }
    Ok(FilterSpec {
        kind: FilterKind::PEps,
        eps: eps.clone(),
        k_bound: k_bound.clone(),
        interval: None,
        coeffs,
        check,
    })
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (u * (6.0 * u - 15.0) + 10.0)
}

/// Chebyshev coefficients (interpolation at n+1 nodes) of f on [-1, 1].
fn chebyshev_coeffs(f: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
    let m = n + 1;
    let vals: Vec<f64> = (0..m)
        .map(|k| {
            let t = (std::f64::consts::PI * (k as f64 + 0.5) / m as f64).cos();
            f(t)
        })
        .collect();
    (0..m)
        .map(|j| {
            let s: f64 = (0..m)
                .map(|k| {
                    vals[k] * (std::f64::consts::PI * j as f64 * (k as f64 + 0.5) / m as f64).cos()
                })
                .sum();
            let w = if j == 0 { 1.0 } else { 2.0 };
            w * s / m as f64
        })
        .collect()
}

/// Exact monomial coefficients in x of sum c_j T_j(x / K).
fn chebyshev_to_monomial(cheb: &[f64], k_bound: &Q) -> Result<Vec<Q>> {
    let n = cheb.len();
    let mut t_prev: Vec<Q> = vec![Q::one()];
    let mut t_cur: Vec<Q> = vec![Q::zero(), Q::one()];
    let mut out = vec![Q::zero(); n.max(1)];
    for (j, &cf) in cheb.iter().enumerate() {
        let c = q_from_f64(cf)?;
        let t: Vec<Q> = match j {
            0 => t_prev.clone(),
            1 => t_cur.clone(),
            _ => {
                // T_j = 2 t T_{j-1} - T_{j-2}
                let mut next = vec![Q::zero(); j + 1];
                for (i, v) in t_cur.iter().enumerate() {
                    if !v.is_zero() {
                        next[i + 1] = &next[i + 1] + &(v * q_int(2));
                    }
                }
                for (i, v) in t_prev.iter().enumerate() {
                    if !v.is_zero() {
                        next[i] = &next[i] - v;
                    }
                }
                t_prev = std::mem::replace(&mut t_cur, next);
                t_cur.clone()
            }
        };
        if !c.is_zero() {
            for (i, v) in t.iter().enumerate() {
                if !v.is_zero() {
                    out[i] = &out[i] + &(&c * v);
                }
            }
        }
    }
    // substitute t = x/K
    for (i, v) in out.iter_mut().enumerate() {
        if !v.is_zero() {
            *v = &*v / q_pow(k_bound, i as u64);
        }
    }
    Ok(out)
}

/// Indicator filter q_eps for the open interval (a, b): a polynomial with
/// -1 <= q <= chi_(a,b) on [-K, K] and q >= chi_(a,b) - eps off the
/// transition bands. Built by fitting a smoothed step and verifying the
/// constraints exactly on the grid; the degree is raised on failure up to
/// a cap, and failure at the cap is an error, never a silent acceptance.
pub fn build_q_eps(a: &Q, b: &Q, eps: &Q, k_bound: &Q) -> Result<FilterSpec> {
    if a >= b {
        return Err(CoreError::FilterParameter("need a < b".into()));
    }
    let half_gap = (b - a) / q_int(2);
    if !(eps > &Q::zero() && eps < &half_gap) {
        return Err(CoreError::FilterParameter("need 0 < eps < (b-a)/2".into()));
    }
    if k_bound < &Q::one() || k_bound < &a.abs() || k_bound < &b.abs() {
        return Err(CoreError::FilterParameter(
            "need K >= max(|a|, |b|, 1)".into(),
        ));
    }
    let (af, bf, ef, kf) = (q_to_f64(a), q_to_f64(b), q_to_f64(eps), q_to_f64(k_bound));
    // Target: -eps/2 outside, 1 - eps/2 on the plateau, quintic ramps well
    // inside the transition bands so that an interpolant within eps/4 of
    // the target satisfies every constraint.
    let lo = -ef / 2.0;
    let hi = 1.0 - ef / 2.0;
    let target = move |t: f64| -> f64 {
        let x = t * kf;
        let r0 = af + ef / 8.0;
        let r1 = af + 7.0 * ef / 8.0;
        let s0 = bf - 7.0 * ef / 8.0;
        let s1 = bf - ef / 8.0;
        let up = smoothstep((x - r0) / (r1 - r0));
        let down = smoothstep((s1 - x) / (s1 - s0));
        lo + (hi - lo) * up.min(down)
    };
    let extra = vec![
        a.clone(),
        b.clone(),
        a + eps,
        b - eps,
        (a + b) / q_int(2),
        -k_bound.clone(),
    ];
    let pts = grid_points(k_bound, eps, &extra);
    let cap = 512usize;
    let mut degree = 32usize;
    let mut last_violation = None;
    while degree <= cap {
        let cheb = chebyshev_coeffs(&target, degree);
        let coeffs = chebyshev_to_monomial(&cheb, k_bound)?;
        let mut check = GridCheckReport {
            points_checked: pts.len(),
            ok: true,
            first_violation: None,
        };
        let minus_one = -Q::one();
        for x in &pts {
            let v = eval_poly(&coeffs, x);
            let inside = x > a && x < b;
            let plateau = x >= &(a + eps) && x <= &(b - eps);
            let bad = if v < minus_one {
                Some("q < -1")
            } else if !inside && v > Q::zero() {
                Some("q > chi outside (a,b)")
            } else if inside && v > Q::one() {
                Some("q > 1 inside (a,b)")
            } else if !inside && v < -eps.clone() {
                Some("q < -eps outside")
            } else if plateau && v < Q::one() - eps {
                Some("q < 1 - eps on the plateau")
            } else {
                None
            };
            if let Some(msg) = bad {
                check.ok = false;
                check.first_violation = Some((format_q(x), msg.into()));
                break;
            }
        }
        if check.ok {
            return Ok(FilterSpec {
                kind: FilterKind::QEps,
                eps: eps.clone(),
                k_bound: k_bound.clone(),
                interval: Some((a.clone(), b.clone())),
                coeffs,
                check,
            });
        }
        last_violation = check.first_violation;
        degree *= 2;
    }
    Err(CoreError::FilterConstruction {
        cap,
        detail: format!("{last_violation:?}"),
    })
}

/// Product of the nonzero eigenvalues of a symmetric PSD rational matrix,
/// exact: up to sign it is the lowest nonzero coefficient of the
/// characteristic polynomial. The natural log is attached for display.
#[derive(Debug, Clone)]
pub struct LogDetPrime {
    pub product: Q,
    pub ln_value: f64,
    pub kernel_dim: usize,
}

pub fn log_det_prime(delta: &QMatrix) -> Result<LogDetPrime> {
    let (_, neg, zero) = delta.inertia()?;
    if neg > 0 {
        return Err(CoreError::NotPsd { negatives: neg });
    }
    let n = delta.rows();
    if n == 0 {
        return Ok(LogDetPrime {
            product: Q::one(),
            ln_value: 0.0,
            kernel_dim: 0,
        });
    }
    let char_poly = delta.charpoly()?;
    let i0 = char_poly
        .iter()
        .position(|c| !c.is_zero())
        .expect("monic polynomial has a nonzero coefficient");
    // char(x) = sum a_i x^i with a_i = (-1)^{n-i} e_{n-i}(eigenvalues);
    // the lowest nonzero index is the kernel dimension and e_{n-i0} is the
    // product of the nonzero eigenvalues.
    let sign_flip = (n - i0) % 2 == 1;
    let product = if sign_flip {
        -char_poly[i0].clone()
    } else {
        char_poly[i0].clone()
    };
    if i0 != zero {
        return Err(CoreError::InvariantViolation(format!(
            "char-poly kernel dim {i0} disagrees with inertia kernel dim {zero}"
        )));
    }
    if !product.is_positive() {
        return Err(CoreError::InvariantViolation(
            "nonzero-eigenvalue product of a PSD matrix must be positive".into(),
        ));
    }
    Ok(LogDetPrime {
        ln_value: q_to_f64(&product).ln(),
        product,
        kernel_dim: i0,
    })
}

/// Decides lhs * ln(1/eps) <= rhs * ln(K) exactly for positive rationals
/// eps < 1 <= K and non-negative rationals lhs, rhs. A wide-margin float
/// comparison screens the easy cases; near-ties fall back to the exact
/// integer power comparison (1/eps)^(lhs_num*rhs_den) <= K^(rhs_num*lhs_den).
pub fn log_inequality_holds(lhs: &Q, eps: &Q, rhs: &Q, k_bound: &Q) -> bool {
    debug_assert!(eps > &Q::zero() && eps < &Q::one());
    debug_assert!(k_bound >= &Q::one());
    if lhs.is_zero() || lhs.is_negative() {
        return true;
    }
    let inv_eps = Q::one() / eps;
    let lf = q_to_f64(lhs) * q_to_f64(&inv_eps).ln();
    let rf = q_to_f64(rhs) * q_to_f64(k_bound).ln();
    let margin = 1e-9 * (1.0 + lf.abs().max(rf.abs()));
    if lf <= rf - margin {
        return true;
    }
    if lf >= rf + margin {
        return false;
    }
    // exact fallback
    let e1 = lhs.numer() * rhs.denom();
    let e2 = rhs.numer() * lhs.denom();
    let e1 = e1.to_u64().expect("comparison exponent fits u64");
    let e2 = e2.to_u64().expect("comparison exponent fits u64");
    crate::ratio::pow_le(&inv_eps, e1, k_bound, e2)
}

/// One epsilon entry of the determinant-bound check.
#[derive(Debug, Clone, Serialize)]
pub struct DetBoundEntry {
    pub eps: String,
    /// Normalized count of eigenvalues in (0, eps], exact.
    pub lhs: String,
    /// d ln K / (-ln eps), for display.
    pub rhs_decimal: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetBoundReport {
    pub lemma: &'static str,
    pub k_bound: String,
    pub d_effective: String,
    pub integer_precondition: bool,
    pub entries: Vec<DetBoundEntry>,
    pub ok: bool,
}

/// Verifies the small-eigenvalue bound
/// normalized_count(0, eps] <= d ln(K) / (-ln eps) for each eps.
///
/// `delta` is the group-ring Laplacian the finite matrix came from (its
/// integrality is the lemma's precondition and its row count enters the
/// bound), `pushed` the finite rational matrix, and `scale` the
/// normalization (1/N_k for towers, |X|/|X_k| for exhaustions), so the
/// effective dimension is rows(pushed) * scale.
pub fn check_small_eigenvalue_bound(
    delta: &GroupRingMatrix,
    pushed: &QMatrix,
    scale: &Q,
    k_bound: &Q,
    eps_grid: &[Q],
) -> Result<DetBoundReport> {
    let integer_precondition = delta.first_non_integer().is_none();
    let d_eff = q_int(pushed.rows() as i64) * scale;
    let mut entries = Vec::with_capacity(eps_grid.len());
    let mut all_ok = integer_precondition;
    let k_eff = k_bound.clone().max(Q::one());
    for eps in eps_grid {
        if !(eps > &Q::zero() && eps < &Q::one()) {
            return Err(CoreError::FilterParameter(format!(
                "det bound eps must be in (0,1), got {}",
                format_q(eps)
            )));
        }
        let count = pushed.spectral_count(&Q::zero(), eps)?;
        let lhs = q_int(count as i64) * scale;
        let rhs_decimal = q_to_f64(&d_eff) * q_to_f64(&k_eff).ln() / -q_to_f64(eps).ln();
        let ok = integer_precondition && log_inequality_holds(&lhs, eps, &d_eff, &k_eff);
        all_ok &= ok;
        entries.push(DetBoundEntry {
            eps: format_q(eps),
            lhs: format_q(&lhs),
            rhs_decimal,
            ok,
        });
    }
    Ok(DetBoundReport {
        lemma: "small-eigenvalue determinant bound",
        k_bound: format_q(k_bound),
        d_effective: format_q(&d_eff),
        integer_precondition,
        entries,
        ok: all_ok,
    })
}

/// Report of one spectral-control replay: the exact trace distance between
/// the filtered Laplacian and the harmonic projection, against the
/// determinant-derived bound eps*d + d ln K / (-ln eps).
#[derive(Debug, Clone, Serialize)]
pub struct SpecControlReport {
    pub lemma: &'static str,
    pub level: usize,
    pub eps: String,
    pub filter_degree: usize,
    /// tr_k | p_eps(Delta) - pr |, exact.
    pub lhs: String,
    pub rhs_decimal: f64,
    pub integer_precondition: bool,
    pub non_negative: bool,
    pub ok: bool,
}

/// Computes tr_k | p_eps(Delta_mid[X_k]) - pr_mid[X_k] | exactly (the
/// operator is PSD, so the trace distance is a plain trace difference) and
/// checks it against the bound with the explicit detcontrol constant.
pub fn replay_spec_control(
    s: &SymmetricComplex,
    level: &TowerLevel,
    eps: &Q,
) -> Result<SpecControlReport> {
    let mid = s.middle_degree()?;
    let delta_ring = s.base().laplacian(mid)?;
    let integer_precondition = delta_ring.first_non_integer().is_none();
    let k_bound = delta_ring.norm_bound().max(Q::one());
    let filter = build_p_eps(eps, &k_bound)?;
    let pushed = pushed_laplacian(s.base(), mid, level)?;
    let n = pushed.rows();
    let trace_p = if n == 0 {
        Q::zero()
    } else {
        let cp = pushed.charpoly()?;
        let sums = power_sums(&cp, filter.coeffs.len() - 1);
        let mut t = Q::zero();
        for (j, c) in filter.coeffs.iter().enumerate() {
            if !c.is_zero() {
                t += c * &sums[j];
            }
        }
        t
    };
    let kernel_dim = q_int(pushed.nullity() as i64);
    let raw = trace_p - kernel_dim;
    let non_negative = !raw.is_negative();
    let nk = level.index_q();
    let lhs = &raw / &nk;
    let d = q_int(delta_ring.rows() as i64);
    let rhs_decimal =
        q_to_f64(&(&d * eps)) + q_to_f64(&d) * q_to_f64(&k_bound).ln() / -q_to_f64(eps).ln();
    // lhs <= eps d + d ln K/(-ln eps) <=> lhs - eps d <= d ln K/(-ln eps)
    let slack = &lhs - &(&d * eps);
    let bound_ok = log_inequality_holds(&slack, eps, &d, &k_bound);
    Ok(SpecControlReport {
        lemma: "spectral control of the filtered projection",
        level: level.k,
        eps: format_q(eps),
        filter_degree: filter.degree(),
        lhs: format_q(&lhs),
        rhs_decimal,
        integer_precondition,
        non_negative,
        ok: non_negative && integer_precondition && bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::from_form;
    use crate::groupring::GroupRingElement;
    use crate::groups::{GroupDescriptor, GroupElement, GroupTower};
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
    fn p_eps_minimal_degree() {
        // eps = 1/2, K = 1: minimal d with (3/4)^d <= 1/2 is 3, degree 6
        let f = build_p_eps(&q_ratio(1, 2), &q_int(1)).unwrap();
        assert_eq!(f.degree(), 6);
        assert_eq!(f.eval(&Q::zero()), q_int(1));
        // root at +-K
        let f = build_p_eps(&q_ratio(1, 4), &q_int(2)).unwrap();
        assert_eq!(f.eval(&q_int(2)), q_int(0));
        assert_eq!(f.eval(&q_int(-2)), q_int(0));
    }

    #[test]
    fn p_eps_rejects_bad_parameters() {
        assert!(build_p_eps(&q_int(1), &q_int(1)).is_err());
        assert!(build_p_eps(&q_ratio(1, 2), &q_ratio(1, 2)).is_err());
        assert!(build_p_eps(&q_int(0), &q_int(1)).is_err());
    }

    #[test]
    fn q_eps_symmetric_interval() {
        // chi_(-1,1) with eps = 1/4, K = 2
        let f = build_q_eps(&q_int(-1), &q_int(1), &q_ratio(1, 4), &q_int(2)).unwrap();
        // midpoint lands in [1-eps, 1]
        let v = f.eval(&Q::zero());
        assert!(v >= q_ratio(3, 4) && v <= q_int(1), "midpoint {v}");
        // outside: in [-eps, 0]
        let v = f.eval(&q_int(2));
        assert!(v <= Q::zero() && v >= -q_ratio(1, 4));
        assert!(f.check.ok);
    }

    #[test]
    fn q_eps_positive_halfline() {
        // chi_(0, K) truncated: q(-K) <= 0
        let f = build_q_eps(&q_int(0), &q_int(2), &q_ratio(1, 4), &q_int(2)).unwrap();
        assert!(f.eval(&q_int(-2)) <= Q::zero());
        let mid = f.eval(&q_int(1));
        assert!(mid >= q_ratio(3, 4) && mid <= q_int(1));
    }

    #[test]
    fn q_eps_rejects_degenerate() {
        // eps >= (b-a)/2
        assert!(build_q_eps(&q_int(0), &q_int(1), &q_ratio(1, 2), &q_int(1)).is_err());
        assert!(build_q_eps(&q_int(1), &q_int(0), &q_ratio(1, 8), &q_int(1)).is_err());
        // K too small
        assert!(build_q_eps(&q_int(-3), &q_int(3), &q_ratio(1, 4), &q_int(1)).is_err());
    }

    #[test]
    fn log_det_prime_examples() {
        use crate::linalg::QMatrix;
        let d = QMatrix::from_int_rows(&[vec![2, 0, 0], vec![0, 0, 0], vec![0, 0, 3]]);
        let r = log_det_prime(&d).unwrap();
        assert_eq!(r.product, q_int(6));
        assert_eq!(r.kernel_dim, 1);
        // circulant 2 - t - t^-1 mod 3: eigenvalues {0, 3, 3}: product 9
        let c = QMatrix::from_int_rows(&[vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]);
        let r = log_det_prime(&c).unwrap();
        assert_eq!(r.product, q_int(9));
        assert_eq!(r.kernel_dim, 1);
        let id = QMatrix::identity(4);
        assert_eq!(log_det_prime(&id).unwrap().product, q_int(1));
        // non-PSD rejected
        let neg = QMatrix::from_int_rows(&[vec![-1]]);
        assert!(matches!(log_det_prime(&neg), Err(CoreError::NotPsd { .. })));
    }

    #[test]
    fn det_bound_on_circle_laplacian() {
        // Laplacian of the circle complex over Z, pushed at m = 16
        let circle = crate::chain::tests::circle_complex();
        let delta = circle.laplacian(0).unwrap();
        assert_eq!(delta.norm_bound(), q_int(4));
        let tower = GroupTower::make_tower(&z(), &[16]).unwrap();
        let level = &tower.levels()[0];
        let pushed = pushed_laplacian(&circle, 0, level).unwrap();
        let scale = q_ratio(1, 16);
        let grid = vec![q_ratio(1, 10), q_ratio(1, 100), q_ratio(1, 1000)];
        let report =
            check_small_eigenvalue_bound(&delta, &pushed, &scale, &q_int(4), &grid).unwrap();
        assert!(report.integer_precondition);
        assert!(report.ok, "{report:?}");
    }

    #[test]
    fn det_bound_boundary_case_projection() {
        // K = 1 forces a zero right side; integer projections have no
        // spectrum in (0, eps] for eps < 1, so the count is zero.
        let triv = GroupDescriptor::trivial();
        let delta = GroupRingMatrix::identity(1, &triv);
        let pushed = QMatrix::identity(1);
        let report = check_small_eigenvalue_bound(
            &delta,
            &pushed,
            &q_int(1),
            &q_int(1),
            &[q_ratio(1, 2)],
        )
        .unwrap();
        assert!(report.ok);
    }

    #[test]
    fn det_bound_flags_non_integer() {
        let triv = GroupDescriptor::trivial();
        let delta = GroupRingMatrix::from_entries(
            1,
            1,
            vec![GroupRingElement::scalar(&triv, q_ratio(1, 2))],
        )
        .unwrap();
        let pushed = QMatrix::from_fn(1, 1, |_, _| q_ratio(1, 2));
        let report = check_small_eigenvalue_bound(
            &delta,
            &pushed,
            &q_int(1),
            &q_int(1),
            &[q_ratio(1, 10)],
        )
        .unwrap();
        assert!(!report.integer_precondition);
        assert!(!report.ok);
    }

    #[test]
    fn log_inequality_exact_fallback() {
        // 2 * ln(1/(1/4)) = ln 16 vs 4 * ln 2 = ln 16: equality holds
        assert!(log_inequality_holds(
            &q_int(2),
            &q_ratio(1, 4),
            &q_int(4),
            &q_int(2)
        ));
        // 2 + tiny fails
        assert!(!log_inequality_holds(
            &(q_int(2) + q_ratio(1, 1000000)),
            &q_ratio(1, 4),
            &q_int(4),
            &q_int(2)
        ));
    }

    #[test]
    fn replay_spec_control_form_complexes() {
        // form complexes have zero differentials: Delta = 0, p(0) = 1 = pr,
        // so the trace distance is exactly zero
        let s = from_form(&z(), mat1(laurent(&[(0, 2), (1, 1), (-1, 1)])), 1).unwrap();
        let tower = GroupTower::make_tower(&z(), &[4]).unwrap();
        let r = replay_spec_control(&s, &tower.levels()[0], &q_ratio(1, 4)).unwrap();
        assert_eq!(r.lhs, "0/1");
        assert!(r.ok);
        assert!(r.non_negative);
    }

    /// A 4-dimensional complex with ranks (0,1,1,0,0) and c_2 = [t-1]: the
    /// middle Laplacian pushes to the circulant of 2 - t - t^-1, so the
    /// filtered-projection trace is genuinely positive.
    #[test]
    fn replay_spec_control_nonzero_laplacian() {
        use crate::chain::{FreeComplex, SymmetricComplex};
        let g = z();
        let mut diffs = Vec::new();
        diffs.push(GroupRingMatrix::zeros(0, 1)); // c_1
        diffs.push(mat1(laurent(&[(1, 1), (0, -1)]))); // c_2
        diffs.push(GroupRingMatrix::zeros(1, 0)); // c_3
        diffs.push(GroupRingMatrix::zeros(0, 0)); // c_4
        let base = FreeComplex::new(g.clone(), vec![0, 1, 1, 0, 0], diffs).unwrap();
        let duality: Vec<GroupRingMatrix> = (0..=4)
            .map(|p| GroupRingMatrix::zeros(base.rank(p), base.rank(4 - p)))
            .collect();
        let s = SymmetricComplex::new(base, duality).unwrap();
        let tower = GroupTower::make_tower(&z(), &[8]).unwrap();
        let r = replay_spec_control(&s, &tower.levels()[0], &q_ratio(1, 4)).unwrap();
        assert!(r.non_negative);
        assert!(r.integer_precondition);
        assert!(r.ok, "{r:?}");
        // LHS is a positive rational here: the eight eigenvalues
        // 2 - 2cos(2 pi j/8) are not all in the filter's fixed locus
        assert_ne!(r.lhs, "0/1");
    }
}
