//! Dense matrices over arbitrary-precision rationals.
//!
//! All operations are exact. The elimination kernels skip zero entries, so
//! banded inputs (pushed circulants, truncated tridiagonals) cost far less
//! than their dense size suggests.

use crate::error::{CoreError, Result};
use crate::ratio::Q;
use num::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    /// Test/data helper: build from integer rows.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| crate::ratio::q_int(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: &Q) {
        let e = &mut self.data[i * self.cols + j];
        *e = &*e + v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> QMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    /// First (i, j) with a[i][j] != a[j][i], if any.
    pub fn first_asymmetry(&self) -> Option<(usize, usize)> {
        if self.rows != self.cols {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::DimensionMismatch {
                op: "add",
                lhs: format!("{}x{}", self.rows, self.cols),
                rhs: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(other.data.iter()) {
            if !s.is_zero() {
                *d = &*d + s;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::DimensionMismatch {
                op: "sub",
                lhs: format!("{}x{}", self.rows, self.cols),
                rhs: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(other.data.iter()) {
            if !s.is_zero() {
                *d = &*d - s;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> QMatrix {
        let mut out = self.clone();
        for d in out.data.iter_mut() {
            if !d.is_zero() {
                *d = &*d * c;
            }
        }
        out
    }

    pub fn neg(&self) -> QMatrix {
        self.scale(&-Q::one())
    }

    /// Zero-skipping product; cost O(nnz(self) * cols(other)).
    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(CoreError::DimensionMismatch {
                op: "mul",
                lhs: format!("{}x{}", self.rows, self.cols),
                rhs: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let bkj = other.get(k, j);
                    if bkj.is_zero() {
                        continue;
                    }
                    let prod = aik * bkj;
                    out.add_to(i, j, &prod);
                }
            }
        }
        Ok(out)
    }

    pub fn shift_diagonal(&self, s: &Q) -> QMatrix {
        let mut out = self.clone();
        let n = self.rows.min(self.cols);
        for i in 0..n {
            let e = out.get(i, i) - s;
            out.set(i, i, e);
        }
        out
    }

    pub fn trace(&self) -> Result<Q> {
        if self.rows != self.cols {
            return Err(CoreError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut t = Q::zero();
        for i in 0..self.rows {
            t += self.get(i, i);
        }
        Ok(t)
    }

    /// Rank over Q by forward elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0usize;
        for col in 0..m.cols {
            let Some(pr) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pr);
            let pivot = m.get(rank, col).clone();
            for r in (rank + 1)..m.rows {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col) / &pivot;
                m.row_sub_scaled(r, rank, &f, col);
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Exact basis of the kernel; columns of the returned matrix span
    /// { x : self * x = 0 }.
    pub fn nullspace(&self) -> QMatrix {
        let mut m = self.clone();
        // (pivot row, pivot col) pairs from a full reduced echelon form.
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut rank = 0usize;
        for col in 0..m.cols {
            let Some(pr) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pr);
            let inv = Q::one() / m.get(rank, col);
            m.row_scale(rank, &inv, col);
            for r in 0..m.rows {
                if r == rank || m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col).clone();
                m.row_sub_scaled(r, rank, &f, col);
            }
            pivots.push((rank, col));
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free_cols: Vec<usize> = (0..m.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = QMatrix::zeros(self.cols, free_cols.len());
        for (k, &fc) in free_cols.iter().enumerate() {
            basis.set(fc, k, Q::one());
            for &(pr, pc) in &pivots {
                let v = m.get(pr, fc);
                if !v.is_zero() {
                    basis.set(pc, k, -v.clone());
                }
            }
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn row_scale(&mut self, r: usize, f: &Q, from_col: usize) {
        for j in from_col..self.cols {
            let e = &mut self.data[r * self.cols + j];
            if !e.is_zero() {
                *e = &*e * f;
            }
        }
    }

    /// row r -= f * row src, skipping zero entries of the source row.
    fn row_sub_scaled(&mut self, r: usize, src: usize, f: &Q, from_col: usize) {
        for j in from_col..self.cols {
            let s = self.data[src * self.cols + j].clone();
            if s.is_zero() {
                continue;
            }
            let e = &mut self.data[r * self.cols + j];
            *e = &*e - &(f * &s);
        }
    }

    /// Inertia (positive, negative, zero eigenvalue counts) of an exactly
    /// symmetric matrix, by rational symmetric congruence reduction: diagonal
    /// pivots where available, hyperbolic 2x2 blocks (each contributing one
    /// positive and one negative eigenvalue) when the remaining diagonal
    /// vanishes. Correct by Sylvester's law of inertia.
    pub fn inertia(&self) -> Result<(usize, usize, usize)> {
        if self.rows != self.cols {
            return Err(CoreError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if let Some((i, j)) = self.first_asymmetry() {
            return Err(CoreError::NotSymmetric { i, j });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut active = vec![true; n];
        let mut remaining = n;
        let (mut pos, mut neg) = (0usize, 0usize);
        // Monotone cursor: indices below it are eliminated or start as zero
        // rows; keeps pivot scans cheap on banded inputs.
        let mut start = 0usize;
        while remaining > 0 {
            while start < n && !active[start] {
                start += 1;
            }
            // 1. diagonal pivot
            let diag = (start..n).find(|&i| active[i] && !a.get(i, i).is_zero());
            if let Some(i) = diag {
                if a.get(i, i).is_positive() {
                    pos += 1;
                } else {
                    neg += 1;
                }
                let pivot = a.get(i, i).clone();
                let others: Vec<usize> = (start..n)
                    .filter(|&l| active[l] && l != i && !a.get(l, i).is_zero())
                    .collect();
                let cols: Vec<(usize, Q)> = others
                    .iter()
                    .map(|&m| (m, a.get(i, m) / &pivot))
                    .collect();
                for &l in &others {
                    let ali = a.get(l, i).clone();
                    for (m, fim) in &cols {
                        let upd = &ali * fim;
                        let e = a.get(l, *m) - &upd;
                        a.set(l, *m, e);
                    }
                }
                for &l in &others {
                    a.set(l, i, Q::zero());
                    a.set(i, l, Q::zero());
                }
                active[i] = false;
                remaining -= 1;
                continue;
            }
            // 2. all remaining diagonal zero: hyperbolic pair if any entry left
            let mut pair = None;
            'scan: for i in start..n {
                if !active[i] {
                    continue;
                }
                for j in (i + 1)..n {
                    if active[j] && !a.get(i, j).is_zero() {
                        pair = Some((i, j));
                        break 'scan;
                    }
                }
            }
            let Some((i, j)) = pair else {
                // 3. remaining block is zero
                break;
            };
            pos += 1;
            neg += 1;
            let b = a.get(i, j).clone();
            let touched: Vec<usize> = (start..n)
                .filter(|&l| {
                    active[l] && l != i && l != j && (!a.get(l, i).is_zero() || !a.get(l, j).is_zero())
                })
                .collect();
            let coeffs: Vec<(usize, Q, Q)> = touched
                .iter()
                .map(|&l| (l, a.get(l, i).clone(), a.get(l, j).clone()))
                .collect();
            for &(l, ref cli, ref clj) in &coeffs {
                for &(m, ref cmi, ref cmj) in &coeffs {
                    // A'[l][m] = A[l][m] - (A[l][j] A[m][i] + A[l][i] A[m][j]) / b
                    let upd = (clj * cmi + cli * cmj) / &b;
                    if !upd.is_zero() {
                        let e = a.get(l, m) - &upd;
                        a.set(l, m, e);
                    }
                }
            }
            for &(l, _, _) in &coeffs {
                a.set(l, i, Q::zero());
                a.set(i, l, Q::zero());
                a.set(l, j, Q::zero());
                a.set(j, l, Q::zero());
            }
            active[i] = false;
            active[j] = false;
            remaining -= 2;
        }
        let zero = n - pos - neg;
        Ok((pos, neg, zero))
    }

    /// Signature b+ - b- of a symmetric matrix, as a plain integer.
    pub fn signature(&self) -> Result<i64> {
        let (p, m, _) = self.inertia()?;
        Ok(p as i64 - m as i64)
    }

    /// Number of eigenvalues of a symmetric matrix in the half line
    /// (-inf, s]: negatives plus zeros of the inertia of A - sI.
    pub fn eigenvalues_le(&self, s: &Q) -> Result<usize> {
        let (_, neg, zero) = self.shift_diagonal(s).inertia()?;
        Ok(neg + zero)
    }

    /// Exact count of eigenvalues in the interval (a, b].
    pub fn spectral_count(&self, a: &Q, b: &Q) -> Result<usize> {
        if a > b {
            return Err(CoreError::BadInterval {
                a: crate::ratio::format_q(a),
                b: crate::ratio::format_q(b),
            });
        }
        let le_b = self.eigenvalues_le(b)?;
        let le_a = self.eigenvalues_le(a)?;
        Ok(le_b - le_a)
    }

    /// Monic characteristic polynomial det(xI - A), coefficients by
    /// ascending degree. Computed by exact Hessenberg reduction followed by
    /// the Hessenberg determinant recurrence.
    pub fn charpoly(&self) -> Result<Vec<Q>> {
        if self.rows != self.cols {
            return Err(CoreError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(vec![Q::one()]);
        }
        let mut h = self.clone();
        // Similarity transforms to upper Hessenberg form.
        for j in 0..n.saturating_sub(2) {
            let Some(pr) = ((j + 1)..n).find(|&r| !h.get(r, j).is_zero()) else {
                continue;
            };
            if pr != j + 1 {
                h.swap_rows(j + 1, pr);
                for r in 0..n {
                    let tmp = h.get(r, j + 1).clone();
                    h.set(r, j + 1, h.get(r, pr).clone());
                    h.set(r, pr, tmp);
                }
            }
            let pivot = h.get(j + 1, j).clone();
            for l in (j + 2)..n {
                if h.get(l, j).is_zero() {
                    continue;
                }
                let f = h.get(l, j) / &pivot;
                // row l -= f * row (j+1), then col (j+1) += f * col l
                for c in j..n {
                    let s = h.get(j + 1, c).clone();
                    if !s.is_zero() {
                        let e = h.get(l, c) - &(&f * &s);
                        h.set(l, c, e);
                    }
                }
                for r in 0..n {
                    let s = h.get(r, l).clone();
                    if !s.is_zero() {
                        let e = h.get(r, j + 1) + &(&f * &s);
                        h.set(r, j + 1, e);
                    }
                }
            }
        }
        // p_k(x) = (x - h_kk) p_{k-1} - sum_m h_{m,k} (prod subdiag) p_{m-1}
        let mut polys: Vec<Vec<Q>> = Vec::with_capacity(n + 1);
        polys.push(vec![Q::one()]);
        for k in 1..=n {
            let mut p = poly_mul_linear(&polys[k - 1], &h.get(k - 1, k - 1).clone());
            let mut subdiag = Q::one();
            for m in (1..k).rev() {
                // product of h[l+1][l] for l = m .. k-2 (0-based)
                subdiag *= h.get(m, m - 1);
                let hmk = h.get(m - 1, k - 1);
                if hmk.is_zero() || subdiag.is_zero() {
                    if subdiag.is_zero() {
                        break;
                    }
                    continue;
                }
                let c = hmk * &subdiag;
                poly_sub_scaled(&mut p, &polys[m - 1], &c);
            }
            polys.push(p);
        }
        Ok(polys.pop().unwrap())
    }
}

/// p(x) * (x - a)
fn poly_mul_linear(p: &[Q], a: &Q) -> Vec<Q> {
    let mut out = vec![Q::zero(); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out[i + 1] = &out[i + 1] + c;
        out[i] = &out[i] - &(a * c);
    }
    out
}

/// p -= c * q (in place, p at least as long as q)
fn poly_sub_scaled(p: &mut Vec<Q>, q: &[Q], c: &Q) {
    if p.len() < q.len() {
        p.resize(q.len(), Q::zero());
    }
    for (i, qc) in q.iter().enumerate() {
        if !qc.is_zero() {
            p[i] = &p[i] - &(c * qc);
        }
    }
}

/// Power sums p_1..p_max of the roots of a monic polynomial (coefficients
/// ascending, leading 1), via Newton's identities. Exact.
pub fn power_sums(char_coeffs: &[Q], max: usize) -> Vec<Q> {
    let n = char_coeffs.len() - 1;
    // e_k with sign: a_{n-k} = (-1)^k e_k
    let e = |k: usize| -> Q {
        if k > n {
            return Q::zero();
        }
        let a = &char_coeffs[n - k];
        if k % 2 == 0 {
            a.clone()
        } else {
            -a.clone()
        }
    };
    let mut p: Vec<Q> = Vec::with_capacity(max + 1);
    p.push(crate::ratio::q_int(n as i64)); // p_0 = n
    for k in 1..=max {
        let mut s = Q::zero();
        for i in 1..=k.min(n) {
            let term = &e(i) * &p[k - i];
            if i % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        if k <= n {
            let ke = crate::ratio::q_int(k as i64) * e(k);
            if k % 2 == 1 {
                s += ke;
            } else {
                s -= ke;
            }
            // Newton: p_k = sum_{i=1}^{k-1} (-1)^{i-1} e_i p_{k-i} + (-1)^{k-1} k e_k
            // The loop above already added i=k term as e(k)*p_0; correct it.
            let extra = &e(k) * &p[0];
            if k % 2 == 1 {
                s -= extra;
            } else {
                s += extra;
            }
        }
        p.push(s);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{q_int, q_ratio};

    fn diag(entries: &[i64]) -> QMatrix {
        let n = entries.len();
        QMatrix::from_fn(n, n, |i, j| if i == j { q_int(entries[i]) } else { q_int(0) })
    }

    /// Circulant matrix of a symmetric integer "Laurent" mask over Z/m:
    /// entry (i, j) = sum of mask coefficients c_e with j - i = e mod m.
    fn circulant(mask: &[(i64, i64)], m: usize) -> QMatrix {
        QMatrix::from_fn(m, m, |i, j| {
            let mut v = 0i64;
            for &(e, c) in mask {
                if (j as i64 - i as i64 - e).rem_euclid(m as i64) == 0 {
                    v += c;
                }
            }
            q_int(v)
        })
    }

    #[test]
    fn inertia_diagonal() {
        assert_eq!(diag(&[2, -3]).inertia().unwrap(), (1, 1, 0));
        assert_eq!(diag(&[0, 0, 5]).inertia().unwrap(), (1, 0, 2));
    }

    #[test]
    fn inertia_hyperbolic_plane() {
        let m = QMatrix::from_int_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.inertia().unwrap(), (1, 1, 0));
    }

    #[test]
    fn inertia_circulant_examples() {
        // t + t^-1 mod 3: eigenvalues {2, -1, -1}
        let m = circulant(&[(1, 1), (-1, 1)], 3);
        assert_eq!(m.inertia().unwrap(), (1, 2, 0));
        // 2 + t + t^-1 mod 2: [[2,2],[2,2]], eigenvalues {4, 0}
        let m = circulant(&[(0, 2), (1, 1), (-1, 1)], 2);
        assert_eq!(m.inertia().unwrap(), (1, 0, 1));
        // 2 + t + t^-1 mod 3: eigenvalues {4, 1, 1}
        let m = circulant(&[(0, 2), (1, 1), (-1, 1)], 3);
        assert_eq!(m.inertia().unwrap(), (3, 0, 0));
        // t + t^-1 mod 4: eigenvalues {2, 0, -2, 0}
        let m = circulant(&[(1, 1), (-1, 1)], 4);
        assert_eq!(m.inertia().unwrap(), (1, 1, 2));
    }

    /// Independent float oracle for small circulants: eigenvalues of a
    /// symmetric integer circulant of mask q are q(e^{2 pi i j / m}).
    #[test]
    fn inertia_matches_fourier_oracle() {
        let masks: Vec<Vec<(i64, i64)>> = vec![
            vec![(0, 2), (1, 1), (-1, 1)],
            vec![(1, 1), (-1, 1)],
            vec![(0, 2), (1, -1), (-1, -1)],
            vec![(0, -1), (2, 3), (-2, 3)],
        ];
        for mask in &masks {
            for m in 2..=12usize {
                let mat = circulant(mask, m);
                let mut pos = 0;
                let mut neg = 0;
                let mut zero = 0;
                for j in 0..m {
                    let theta = 2.0 * std::f64::consts::PI * (j as f64) / (m as f64);
                    let v: f64 = mask
                        .iter()
                        .map(|&(e, c)| (c as f64) * (theta * e as f64).cos())
                        .sum();
                    if v > 1e-9 {
                        pos += 1;
                    } else if v < -1e-9 {
                        neg += 1;
                    } else {
                        zero += 1;
                    }
                }
                assert_eq!(mat.inertia().unwrap(), (pos, neg, zero), "mask {mask:?} m={m}");
            }
        }
    }

    #[test]
    fn nullspace_of_circulant_laplacian() {
        // 2 - t - t^-1 mod m has a one-dimensional kernel (constants)
        for m in 2..=8usize {
            let lap = circulant(&[(0, 2), (1, -1), (-1, -1)], m);
            let ns = lap.nullspace();
            assert_eq!(ns.cols(), 1);
            let prod = lap.mul(&ns).unwrap();
            assert!(prod.is_zero());
        }
    }

    #[test]
    fn nullspace_zero_and_full() {
        let z = QMatrix::zeros(3, 3);
        assert_eq!(z.nullspace().cols(), 3);
        let id = QMatrix::identity(3);
        assert_eq!(id.nullspace().cols(), 0);
        assert_eq!(id.rank(), 3);
    }

    #[test]
    fn spectral_count_circulant() {
        // 2 - t - t^-1 mod 4: eigenvalues {0, 2, 4, 2}
        let m = circulant(&[(0, 2), (1, -1), (-1, -1)], 4);
        assert_eq!(m.spectral_count(&q_int(0), &q_int(2)).unwrap(), 2);
        assert_eq!(m.spectral_count(&q_int(0), &q_ratio(1, 2)).unwrap(), 0);
        let id = QMatrix::identity(3);
        assert_eq!(id.spectral_count(&q_int(0), &q_int(1)).unwrap(), 3);
        assert!(id.spectral_count(&q_int(1), &q_int(0)).is_err());
    }

    #[test]
    fn charpoly_known_cases() {
        // diag(1, 2): (x-1)(x-2) = x^2 - 3x + 2
        let p = diag(&[1, 2]).charpoly().unwrap();
        assert_eq!(p, vec![q_int(2), q_int(-3), q_int(1)]);
        // companion-style: [[0,1],[1,0]]: x^2 - 1
        let m = QMatrix::from_int_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.charpoly().unwrap(), vec![q_int(-1), q_int(0), q_int(1)]);
        // 2 - t - t^-1 mod 3: eigenvalues {0, 3, 3}: x(x-3)^2 = x^3 - 6x^2 + 9x
        let m = circulant(&[(0, 2), (1, -1), (-1, -1)], 3);
        assert_eq!(
            m.charpoly().unwrap(),
            vec![q_int(0), q_int(9), q_int(-6), q_int(1)]
        );
    }

    #[test]
    fn charpoly_matches_trace_and_det() {
        let m = QMatrix::from_int_rows(&[vec![3, 1, 0], vec![1, -2, 5], vec![0, 5, 7]]);
        let p = m.charpoly().unwrap();
        // coefficient of x^2 is -trace
        assert_eq!(p[2], -m.trace().unwrap());
        // constant coefficient is (-1)^n det; det = 3*(-14-25) - 1*(7-0) = -124
        assert_eq!(p[0], q_int(124));
    }

    #[test]
    fn power_sums_from_charpoly() {
        // eigenvalues {1, 2, 3}: p1 = 6, p2 = 14, p3 = 36
        let m = diag(&[1, 2, 3]);
        let p = m.charpoly().unwrap();
        let s = power_sums(&p, 3);
        assert_eq!(s[0], q_int(3));
        assert_eq!(s[1], q_int(6));
        assert_eq!(s[2], q_int(14));
        assert_eq!(s[3], q_int(36));
    }

    #[test]
    fn mul_and_transpose() {
        let a = QMatrix::from_int_rows(&[vec![1, 2], vec![3, 4]]);
        let b = QMatrix::from_int_rows(&[vec![0, 1], vec![1, 0]]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, QMatrix::from_int_rows(&[vec![2, 1], vec![4, 3]]));
        assert_eq!(a.transpose().transpose(), a);
    }
}
