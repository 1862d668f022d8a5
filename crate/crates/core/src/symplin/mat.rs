//! Dense matrices over [`Scalar`] with the elimination routines used
//! everywhere else: column echelon form, kernels, linear solves, inverses,
//! and terminating exponentials of nilpotent matrices.
//!
//! Float-backend rank decisions use the threshold `eps * max|entry|` with
//! the global tolerance from [`crate::tol`]; exact-backend decisions are
//! exact.  A matrix keeps a single backend: mixing exact and float operands
//! promotes the result to float.

use super::scalar::{Backend, Scalar};
use crate::error::Error;
use crate::tol;

/// Row-major dense matrix.
#[derive(Clone, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize, backend: Backend) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![Scalar::zero(backend); rows * cols],
        }
    }

    pub fn identity(n: usize, backend: Backend) -> Mat {
        let mut m = Mat::zeros(n, n, backend);
        for i in 0..n {
            m.set(i, i, Scalar::one(backend));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat::new(rows, cols, data)
    }

    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Mat {
        assert_eq!(rows * cols, data.len(), "matrix data length mismatch");
        let mut m = Mat { rows, cols, data };
        if m.data.iter().any(|s| s.backend() == Backend::Float)
            && m.data.iter().any(|s| s.backend() == Backend::Exact)
        {
            m = m.to_float();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Column vector from integer entries.
    pub fn col_from_ints(vals: &[i64]) -> Mat {
        Mat::from_fn(vals.len(), 1, |r, _| Scalar::from_int(vals[r]))
    }

    /// Square matrix from integer entries, row-major.
    pub fn from_int_rows(rows: &[&[i64]]) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Mat::from_fn(r, c, |i, j| Scalar::from_int(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn backend(&self) -> Backend {
        if self.data.iter().any(|s| s.backend() == Backend::Float) {
            Backend::Float
        } else {
            Backend::Exact
        }
    }

    pub fn to_float(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::to_float).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn conj(&self) -> Mat {
        self.map(Scalar::conj)
    }

    pub fn conj_transpose(&self) -> Mat {
        self.transpose().conj()
    }

    pub fn col(&self, j: usize) -> Mat {
        Mat::from_fn(self.rows, 1, |r, _| self.get(r, j).clone())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                other.get(r, c - self.cols).clone()
            }
        })
    }

    pub fn scale(&self, s: &Scalar) -> Mat {
        self.map(|v| v * s)
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self.get(r, c) + o.get(r, c))
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat::from_fn(self.rows, self.cols, |r, c| self.get(r, c) - o.get(r, c))
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matmul shape mismatch");
        let backend = if self.backend() == Backend::Float || o.backend() == Backend::Float {
            Backend::Float
        } else {
            Backend::Exact
        };
        Mat::from_fn(self.rows, o.cols, |r, c| {
            let mut acc = Scalar::zero(backend);
            for k in 0..self.cols {
                acc = acc + self.get(r, k) * o.get(k, c);
            }
            acc
        })
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, o: &Mat) -> Mat {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn pow(&self, k: usize) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.rows, self.backend());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::abs_est).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        let t = self.float_thresh();
        self.data.iter().all(|s| s.is_zero_thresh(t))
    }

    /// Elimination threshold for this matrix (0 in exact mode).
    pub fn float_thresh(&self) -> f64 {
        match self.backend() {
            Backend::Exact => 0.0,
            Backend::Float => tol::eps() * self.max_abs(),
        }
    }

    pub fn approx_eq(&self, o: &Mat, tol_abs: f64) -> bool {
        self.rows == o.rows
            && self.cols == o.cols
            && self
                .data
                .iter()
                .zip(&o.data)
                .all(|(a, b)| a.approx_eq(b, tol_abs))
    }

    /// Smallest `k >= 1` with `M^k = 0`, if any (bounded by dim + 1).
    pub fn nilpotency_index(&self) -> Option<usize> {
        assert_eq!(self.rows, self.cols);
        let mut p = Mat::identity(self.rows, self.backend());
        for k in 0..=self.rows {
            if k > 0 && p.is_zero() {
                return Some(k);
            }
            if k == self.rows {
                break;
            }
            p = p.mul(self);
        }
        if p.is_zero() {
            Some(self.rows)
        } else {
            None
        }
    }

    /// Terminating power series `exp(M)` for nilpotent `M`.
    pub fn exp_nilpotent(&self) -> Result<Mat, Error> {
        assert_eq!(self.rows, self.cols);
        let idx = self.nilpotency_index().ok_or(Error::NotNilpotent)?;
        let mut acc = Mat::identity(self.rows, self.backend());
        let mut term = Mat::identity(self.rows, self.backend());
        for k in 1..idx {
            term = term.mul(self).scale(&Scalar::from_ratio(1, k as i64));
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Reduced column echelon form together with the pivot rows, computed by
    /// column elimination.  The result is a basis of the column span with
    /// pivot entries 1, pivot rows cleared elsewhere, and columns ordered by
    /// increasing pivot row; zero columns are dropped.  In exact mode the
    /// pivot of each step is the first nonzero row, which makes the output
    /// the canonical reduced form of the span.  In float mode the pivot is
    /// the largest remaining entry (complete pivoting): normalizing by the
    /// dominant entry keeps basis scales bounded, so spans whose generators
    /// mix very different magnitudes do not blow up and then lose genuine
    /// structure to the relative threshold downstream.
    pub fn column_echelon(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let thresh = m.float_thresh();
        let mut pivots = Vec::new();
        let mut c = 0usize;
        if m.backend() == Backend::Float {
            let mut used = vec![false; m.rows];
            while c < m.cols {
                let mut best: Option<(usize, usize)> = None;
                let mut best_mag = 0.0f64;
                for r in 0..m.rows {
                    if used[r] {
                        continue;
                    }
                    for j in c..m.cols {
                        let mag = m.get(r, j).abs_est();
                        if mag > best_mag {
                            best = Some((r, j));
                            best_mag = mag;
                        }
                    }
                }
                let Some((r, j)) = best else { break };
                if m.get(r, j).is_zero_thresh(thresh) {
                    break;
                }
                m.swap_cols(c, j);
                m.eliminate_at(r, c, thresh);
                used[r] = true;
                pivots.push(r);
                c += 1;
            }
        } else {
            for r in 0..m.rows {
                if c >= m.cols {
                    break;
                }
                let mut best = c;
                let mut best_mag = 0.0f64;
                for j in c..m.cols {
                    let mag = m.get(r, j).abs_est();
                    if mag > best_mag {
                        best = j;
                        best_mag = mag;
                    }
                }
                if m.get(r, best).is_zero_thresh(thresh) {
                    continue;
                }
                m.swap_cols(c, best);
                m.eliminate_at(r, c, thresh);
                pivots.push(r);
                c += 1;
            }
        }
        let mut order: Vec<usize> = (0..c).collect();
        order.sort_by_key(|&i| pivots[i]);
        let kept = Mat::from_fn(m.rows, c, |r, j| m.get(r, order[j]).clone());
        let pivots: Vec<usize> = order.iter().map(|&i| pivots[i]).collect();
        // In float mode, flush sub-threshold residue so canonical forms of
        // equal spans compare cleanly.
        let kept = if thresh > 0.0 {
            kept.map(|s| {
                if s.is_zero_thresh(thresh) {
                    Scalar::zero(Backend::Float)
                } else {
                    s.clone()
                }
            })
        } else {
            kept
        };
        (kept, pivots)
    }

    /// One elimination step: normalize column `c` so its entry at row `r`
    /// is 1, then clear row `r` from every other column.
    fn eliminate_at(&mut self, r: usize, c: usize, thresh: f64) {
        let inv = self.get(r, c).recip();
        for rr in 0..self.rows {
            let v = self.get(rr, c) * &inv;
            self.set(rr, c, v);
        }
        for j in 0..self.cols {
            if j != c && !self.get(r, j).is_zero_thresh(thresh) {
                let f = self.get(r, j).clone();
                for rr in 0..self.rows {
                    let v = self.get(rr, j) - &(self.get(rr, c) * &f);
                    self.set(rr, j, v);
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.column_echelon().1.len()
    }

    /// Basis of the right kernel `{x : Mx = 0}` as columns.
    pub fn null_space(&self) -> Mat {
        // Row-reduce (via column echelon of the transpose) and read off the
        // free coordinates.
        let (ech, pivots) = self.transpose().column_echelon();
        // ech: cols x r matrix whose columns are a canonical basis of the row
        // space; pivots are coordinate positions (columns of self).
        let n = self.cols;
        let backend = self.backend();
        let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
        let mut out = Mat::zeros(n, free.len(), backend);
        for (k, &fj) in free.iter().enumerate() {
            out.set(fj, k, Scalar::one(backend));
            // Each echelon column has a 1 at its pivot coordinate and zeros
            // at the other pivots, so x_{pivot_i} = -ech[fj, i].
            for (pi, &pj) in pivots.iter().enumerate() {
                out.set(pj, k, -ech.get(fj, pi));
            }
        }
        out
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let x = self.get(r, a).clone();
            let y = self.get(r, b).clone();
            self.set(r, a, y);
            self.set(r, b, x);
        }
    }

    /// Solve `A x = b` (b may have several columns).  Returns `None` when the
    /// system is inconsistent.  When under-determined, returns one solution
    /// (free variables set to zero).
    pub fn solve(&self, b: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, b.rows);
        let aug = self.hcat(b);
        let thresh = aug.float_thresh();
        let mut m = aug;
        let (rows, acols, bcols) = (self.rows, self.cols, b.cols);
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; acols];
        let mut row = 0usize;
        for col in 0..acols {
            if row >= rows {
                break;
            }
            let mut best = row;
            let mut best_mag = 0.0;
            for r in row..rows {
                let mag = m.get(r, col).abs_est();
                if mag > best_mag {
                    best = r;
                    best_mag = mag;
                }
            }
            if m.get(best, col).is_zero_thresh(thresh) {
                continue;
            }
            m.swap_rows(row, best);
            let inv = m.get(row, col).recip();
            for j in col..acols + bcols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..rows {
                if r != row && !m.get(r, col).is_zero_thresh(thresh) {
                    let f = m.get(r, col).clone();
                    for j in col..acols + bcols {
                        let v = m.get(r, j) - &(m.get(row, j) * &f);
                        m.set(r, j, v);
                    }
                }
            }
            pivot_of_col[col] = Some(row);
            row += 1;
        }
        // Consistency: rows beyond the pivot rows must have zero rhs.
        for r in row..rows {
            for j in 0..bcols {
                if !m.get(r, acols + j).is_zero_thresh(thresh) {
                    return None;
                }
            }
        }
        let backend = m.backend();
        let mut x = Mat::zeros(acols, bcols, backend);
        for (col, piv) in pivot_of_col.iter().enumerate() {
            if let Some(r) = piv {
                for j in 0..bcols {
                    x.set(col, j, m.get(*r, acols + j).clone());
                }
            }
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let x = self.get(a, c).clone();
            let y = self.get(b, c).clone();
            self.set(a, c, y);
            self.set(b, c, x);
        }
    }

    pub fn inverse(&self) -> Result<Mat, Error> {
        assert_eq!(self.rows, self.cols);
        let id = Mat::identity(self.rows, self.backend());
        let x = self.solve(&id).ok_or(Error::Singular)?;
        // Under-determined systems slip through `solve`; verify.
        if !self.mul(&x).approx_eq(&id, tol::eps() * (1.0 + self.max_abs())) {
            return Err(Error::Singular);
        }
        Ok(x)
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let thresh = m.float_thresh();
        let backend = m.backend();
        let mut det = Scalar::one(backend);
        for col in 0..m.cols {
            let mut best = col;
            let mut best_mag = 0.0;
            for r in col..m.rows {
                let mag = m.get(r, col).abs_est();
                if mag > best_mag {
                    best = r;
                    best_mag = mag;
                }
            }
            if m.get(best, col).is_zero_thresh(thresh) {
                return Scalar::zero(backend);
            }
            if best != col {
                m.swap_rows(col, best);
                det = -det;
            }
            let piv = m.get(col, col).clone();
            det = &det * &piv;
            let inv = piv.recip();
            for r in col + 1..m.rows {
                if !m.get(r, col).is_zero_thresh(thresh) {
                    let f = m.get(r, col) * &inv;
                    for j in col..m.cols {
                        let v = m.get(r, j) - &(m.get(col, j) * &f);
                        m.set(r, j, v);
                    }
                }
            }
        }
        det
    }

    /// Signature `(pos, neg, zero)` of a Hermitian matrix, by symmetric
    /// elimination.  Assumes `self` is Hermitian (checked loosely).
    pub fn hermitian_signature(&self) -> (usize, usize, usize) {
        self.hermitian_signature_floor(0.0)
    }

    /// Like [`Mat::hermitian_signature`], with an absolute floor added to
    /// the float threshold.  Callers that know the natural scale of the
    /// entries (e.g. a Gram matrix of a basis with known magnitude) pass
    /// it here so that a matrix consisting purely of roundoff noise is
    /// read as zero rather than as spurious nonzero eigenvalues.
    pub fn hermitian_signature_floor(&self, floor: f64) -> (usize, usize, usize) {
        assert_eq!(self.rows, self.cols);
        let thresh = match self.backend() {
            Backend::Exact => 0.0,
            Backend::Float => (tol::eps() * self.max_abs().max(1.0)).max(floor),
        };
        debug_assert!(
            self.approx_eq(&self.conj_transpose(), thresh.max(1e-8 * (1.0 + self.max_abs()))),
            "hermitian_signature on a non-Hermitian matrix"
        );
        let mut m = self.clone();
        let mut live: Vec<usize> = (0..self.rows).collect();
        let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
        while !live.is_empty() {
            // Prefer a diagonal pivot of largest magnitude.
            let mut best: Option<usize> = None;
            let mut best_mag = 0.0;
            for (k, &i) in live.iter().enumerate() {
                let mag = m.get(i, i).abs_est();
                if mag > best_mag {
                    best = Some(k);
                    best_mag = mag;
                }
            }
            match best {
                Some(k) if !m.get(live[k], live[k]).is_zero_thresh(thresh) => {
                    let i = live.remove(k);
                    let d = m.get(i, i).clone();
                    match d.real_sign_thresh(thresh) {
                        1 => pos += 1,
                        -1 => neg += 1,
                        _ => zero += 1,
                    }
                    let dinv = d.recip();
                    for &r in &live {
                        for &c in &live {
                            // H'_{rc} = H_{rc} - H_{ri} H_{ic} / d
                            let v = m.get(r, c) - &(&(m.get(r, i) * &dinv) * m.get(i, c));
                            m.set(r, c, v);
                        }
                    }
                    for &r in &live {
                        m.set(r, i, Scalar::zero(m.backend()));
                        m.set(i, r, Scalar::zero(m.backend()));
                    }
                }
                _ => {
                    // All diagonal entries vanish.  Look for an off-diagonal
                    // entry: a hyperbolic pair contributes (+1, -1).
                    let mut pair: Option<(usize, usize)> = None;
                    let mut best_mag = 0.0;
                    for (a_idx, &a) in live.iter().enumerate() {
                        for &b in &live[a_idx + 1..] {
                            let mag = m.get(a, b).abs_est();
                            if mag > best_mag {
                                pair = Some((a, b));
                                best_mag = mag;
                            }
                        }
                    }
                    match pair {
                        Some((a, b)) if !m.get(a, b).is_zero_thresh(thresh) => {
                            pos += 1;
                            neg += 1;
                            live.retain(|&x| x != a && x != b);
                            let hab = m.get(a, b).clone();
                            let hba = m.get(b, a).clone();
                            let inv_ab = hab.recip();
                            let inv_ba = hba.recip();
                            // Schur complement of the 2x2 block [[0, hab],[hba, 0]].
                            let updates: Vec<(usize, usize, Scalar)> = live
                                .iter()
                                .flat_map(|&r| live.iter().map(move |&c| (r, c)))
                                .map(|(r, c)| {
                                    let t1 = &(m.get(r, a) * &inv_ba) * m.get(b, c);
                                    let t2 = &(m.get(r, b) * &inv_ab) * m.get(a, c);
                                    (r, c, m.get(r, c) - &(&t1 + &t2))
                                })
                                .collect();
                            for (r, c, v) in updates {
                                m.set(r, c, v);
                            }
                        }
                        _ => {
                            zero += live.len();
                            live.clear();
                        }
                    }
                }
            }
        }
        (pos, neg, zero)
    }
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m4_nilpotent() -> Mat {
        // e3 -> e1, others -> 0 (the rank-one degeneration direction).
        let mut n = Mat::zeros(4, 4, Backend::Exact);
        n.set(0, 2, Scalar::from_int(1));
        n
    }

    #[test]
    fn echelon_canonicalizes() {
        // Span{(1,2,0,0),(2,4,1,0)} twice with different generators.
        let a = Mat::from_int_rows(&[&[1, 2], &[2, 4], &[0, 1], &[0, 0]]);
        let b = Mat::from_int_rows(&[&[3, 1], &[6, 2], &[1, 7], &[0, 0]]);
        let (ea, pa) = a.column_echelon();
        let (eb, pb) = b.column_echelon();
        assert_eq!(pa, pb);
        assert_eq!(ea, eb);
    }

    #[test]
    fn rank_and_null_space() {
        let m = Mat::from_int_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.null_space();
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).is_zero());
        // Kernel vector is proportional to (2, -1, 0).
        let v = k.col(0);
        let x = v.get(0, 0);
        let y = v.get(1, 0);
        assert_eq!(&(x * &Scalar::from_int(1)), &(&(-y) * &Scalar::from_int(2)));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = Mat::from_int_rows(&[&[1, 1], &[0, 1], &[1, 2]]);
        let b = Mat::col_from_ints(&[3, 1, 4]);
        let x = a.solve(&b).unwrap();
        assert!(a.mul(&x).approx_eq(&b, 0.0));
        let bad = Mat::col_from_ints(&[3, 1, 5]);
        assert!(a.solve(&bad).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Mat::from_int_rows(&[&[2, 1, 0], &[1, 1, 1], &[0, 3, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(3, Backend::Exact));
        assert!(Mat::zeros(2, 2, Backend::Exact).inverse().is_err());
    }

    #[test]
    fn det_small_cases() {
        let a = Mat::from_int_rows(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.det(), Scalar::from_int(1));
        let s = Mat::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.det(), Scalar::from_int(0));
    }

    #[test]
    fn nilpotent_exponential() {
        let n = m4_nilpotent();
        assert_eq!(n.nilpotency_index(), Some(2));
        let e = n.exp_nilpotent().unwrap();
        assert_eq!(*e.get(0, 2), Scalar::from_int(1));
        assert_eq!(e.mul(&e), n.scale(&Scalar::from_int(2)).exp_nilpotent().unwrap());
        assert!(Mat::identity(2, Backend::Exact).nilpotency_index().is_none());
    }

    #[test]
    fn hermitian_signature_cases() {
        // diag(2, -3, 0)
        let mut d = Mat::zeros(3, 3, Backend::Exact);
        d.set(0, 0, Scalar::from_int(2));
        d.set(1, 1, Scalar::from_int(-3));
        assert_eq!(d.hermitian_signature(), (1, 1, 1));
        // Hyperbolic block [[0, i],[-i, 0]] has eigenvalues +-1.
        let i = Scalar::i_unit(Backend::Exact);
        let h = Mat::from_rows(vec![
            vec![Scalar::from_int(0), i.clone()],
            vec![-&i, Scalar::from_int(0)],
        ]);
        assert_eq!(h.hermitian_signature(), (1, 1, 0));
        // Positive definite [[2,1],[1,2]].
        let p = Mat::from_int_rows(&[&[2, 1], &[1, 2]]);
        assert_eq!(p.hermitian_signature(), (2, 0, 0));
    }

    #[test]
    fn float_thresholding_matches_exact_rank() {
        let m = Mat::from_int_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]);
        assert_eq!(m.to_float().rank(), m.rank());
    }
}
