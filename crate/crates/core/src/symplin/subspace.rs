//! The ambient symplectic lattice and complex subspaces of it.
//!
//! A [`SympSpace`] is `Z^{2n}` with a nondegenerate alternating integer form.
//! A [`Subspace`] is a complex subspace of the complexification, stored as a
//! canonical reduced-column-echelon basis so that equal spans have equal
//! representations in exact mode.


use super::mat::Mat;
use super::scalar::{Backend, Scalar};
use crate::error::Error;
use crate::tol;
use crate::Result;

/// `Z^{2n}` with an alternating unimodular Gram matrix.
#[derive(Clone, Debug)]
pub struct SympSpace {
    n: usize,
    gram: Mat,
}

impl SympSpace {
    /// The standard form: `<e_j, e_{n+j}> = -1` for `j <= n`, block matrix
    /// `((0, -I), (I, 0))`.
    pub fn standard(n: usize) -> SympSpace {
        let dim = 2 * n;
        let gram = Mat::from_fn(dim, dim, |r, c| {
            if r < n && c == n + r {
                Scalar::from_int(-1)
            } else if r >= n && c == r - n {
                Scalar::from_int(1)
            } else {
                Scalar::from_int(0)
            }
        });
        SympSpace { n, gram }
    }

    /// A space with a custom integral Gram matrix (validated: antisymmetric,
    /// integer entries, determinant +-1).
    pub fn with_gram(gram: Mat) -> Result<SympSpace> {
        let dim = gram.rows();
        if gram.cols() != dim || dim % 2 != 0 || dim == 0 {
            return Err(Error::DimMismatch("Gram matrix must be 2n x 2n".into()));
        }
        if gram.backend() != Backend::Exact {
            return Err(Error::BadParam("Gram matrix must be exact".into()));
        }
        for r in 0..dim {
            for c in 0..dim {
                if let Scalar::Exact(g) = gram.get(r, c) {
                    if !g.im.is_zero() || !g.re.is_integer() {
                        return Err(Error::BadParam("Gram entries must be integers".into()));
                    }
                }
            }
        }
        if !gram.add(&gram.transpose()).is_zero() {
            return Err(Error::BadParam("Gram matrix must be antisymmetric".into()));
        }
        let det = gram.det();
        if det != Scalar::from_int(1) && det != Scalar::from_int(-1) {
            return Err(Error::BadParam("Gram matrix must be unimodular".into()));
        }
        Ok(SympSpace { n: dim / 2, gram })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank of the lattice, `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    /// The symplectic form `<x, y>` on column vectors.
    pub fn form(&self, x: &Mat, y: &Mat) -> Scalar {
        assert_eq!(x.rows(), self.dim());
        assert_eq!(y.rows(), self.dim());
        self::bilinear(&self.gram, x, y)
    }

    /// Gram matrix of the form on two bases: `A^T Q B`.
    pub fn form_gram(&self, a: &Mat, b: &Mat) -> Mat {
        a.transpose().mul(&self.gram).mul(b)
    }

    /// Is `m` in the symplectic Lie algebra: `m^T Q + Q m = 0`?
    pub fn is_infinitesimally_symplectic(&self, m: &Mat) -> bool {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return false;
        }
        m.transpose().mul(&self.gram).add(&self.gram.mul(m)).is_zero()
    }

    /// Is `g` an (exact, integral) automorphism of the form: `g^T Q g = Q`?
    pub fn is_symplectic(&self, g: &Mat) -> bool {
        if g.rows() != self.dim() || g.cols() != self.dim() {
            return false;
        }
        g.transpose().mul(&self.gram).mul(g) == self.gram
    }

    /// The zero subspace.
    pub fn zero_subspace(&self, backend: Backend) -> Subspace {
        Subspace {
            space: self.clone(),
            basis: Mat::zeros(self.dim(), 0, backend),
        }
    }

    /// The full space.
    pub fn full_subspace(&self, backend: Backend) -> Subspace {
        Subspace {
            space: self.clone(),
            basis: Mat::identity(self.dim(), backend),
        }
    }

    /// Span of the columns of `basis`.
    pub fn span(&self, basis: Mat) -> Result<Subspace> {
        if basis.rows() != self.dim() {
            return Err(Error::DimMismatch(format!(
                "basis has {} rows, ambient dimension is {}",
                basis.rows(),
                self.dim()
            )));
        }
        let (ech, _) = basis.column_echelon();
        Ok(Subspace {
            space: self.clone(),
            basis: ech,
        })
    }

    /// Span of integer column vectors.
    pub fn span_ints(&self, cols: &[&[i64]]) -> Subspace {
        let m = Mat::from_fn(self.dim(), cols.len(), |r, c| Scalar::from_int(cols[c][r]));
        self.span(m).expect("integer span in ambient space")
    }
}

impl PartialEq for SympSpace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.gram == other.gram
    }
}

fn bilinear(gram: &Mat, x: &Mat, y: &Mat) -> Scalar {
    let v = x.transpose().mul(gram).mul(y);
    v.get(0, 0).clone()
}

/// A complex subspace of the complexified lattice, with canonical basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    space: SympSpace,
    basis: Mat,
}

impl Subspace {
    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Canonical (reduced column echelon) basis, `2n x dim`.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn backend(&self) -> Backend {
        if self.basis.cols() == 0 {
            // Empty matrices carry no scalars; report exact.
            Backend::Exact
        } else {
            self.basis.backend()
        }
    }

    pub fn to_float(&self) -> Subspace {
        Subspace {
            space: self.space.clone(),
            basis: self.basis.to_float(),
        }
    }

    fn check_space(&self, other: &Subspace) -> Result<()> {
        if self.space != other.space {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    /// Sum of subspaces.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_space(other)?;
        self.space.span(self.basis.hcat(&other.basis))
    }

    /// Intersection, via the kernel of `[A | -B]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_space(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(self.space.zero_subspace(self.backend()));
        }
        let stacked = self.basis.hcat(&other.basis.scale(&Scalar::from_int(-1)));
        let ker = stacked.null_space();
        // Each kernel column (x; y) satisfies A x = B y; collect A x.
        let da = self.dim();
        let xs = Mat::from_fn(da, ker.cols(), |r, c| ker.get(r, c).clone());
        self.space.span(self.basis.mul(&xs))
    }

    /// Symplectic orthogonal complement `{x : <v, x> = 0 for v in self}`.
    pub fn perp(&self) -> Subspace {
        let system = self.basis.transpose().mul(self.space.gram());
        let ker = system.null_space();
        self.space.span(ker).expect("perp stays in ambient space")
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Subspace {
        self.space
            .span(self.basis.conj())
            .expect("conjugate stays in ambient space")
    }

    /// Image under a linear map (2n x 2n matrix).
    pub fn image(&self, m: &Mat) -> Result<Subspace> {
        if m.cols() != self.space.dim() {
            return Err(Error::DimMismatch("map does not fit ambient space".into()));
        }
        self.space.span(m.mul(&self.basis))
    }

    /// Does the subspace contain the column vector `v`?
    pub fn contains_vec(&self, v: &Mat) -> bool {
        assert_eq!(v.rows(), self.space.dim());
        if self.dim() == 0 {
            return v.is_zero();
        }
        // Containment <=> appending v does not raise the rank.  Scale-balance
        // the augmented matrix so the float threshold fits both operands.
        self.basis.hcat(v).rank() == self.dim()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        if self.space != other.space {
            return false;
        }
        (0..other.dim()).all(|j| self.contains_vec(&other.basis.col(j)))
    }

    /// Mutual containment.
    pub fn equals(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains(other) && other.contains(self)
    }

    /// Absolute float threshold for pairing values formed out of this
    /// basis: entries of a Gram matrix scale with the squared basis
    /// magnitude, so noise must be measured against that, not against the
    /// Gram matrix itself (which may consist of nothing but noise when
    /// the restricted form is degenerate).
    fn gram_floor(&self) -> f64 {
        match self.backend() {
            Backend::Exact => 0.0,
            Backend::Float => {
                let b = self.basis.max_abs();
                tol::eps() * (b * b).max(1.0)
            }
        }
    }

    /// Signature `(pos, neg, zero)` of the Hermitian form `-i<v, conj w>`.
    pub fn signature(&self) -> (usize, usize, usize) {
        let pairing = self.space.form_gram(&self.basis, &self.basis.conj());
        let h = pairing.scale(&-&Scalar::i_unit(
            if self.backend() == Backend::Float {
                Backend::Float
            } else {
                Backend::Exact
            },
        ));
        h.hermitian_signature_floor(self.gram_floor())
    }

    /// Is the form identically zero on this subspace?
    pub fn is_isotropic(&self) -> bool {
        let g = self.space.form_gram(&self.basis, &self.basis);
        g.max_abs() <= self.gram_floor() || g.is_zero()
    }

    /// Kernel of the Hermitian form `-i<v, conj w>` restricted to `self`,
    /// as a subspace of the ambient space.
    pub fn hermitian_kernel(&self) -> Subspace {
        let mut pairing = self.space.form_gram(&self.basis, &self.basis.conj());
        // Null-space elimination thresholds relative to the pairing matrix
        // itself; flush entries that are noise at the basis scale first so
        // a fully degenerate restriction yields the full kernel.
        let floor = self.gram_floor();
        if floor > 0.0 {
            pairing = pairing.map(|v| {
                if v.abs_est() <= floor {
                    Scalar::zero(Backend::Float)
                } else {
                    v.clone()
                }
            });
        }
        // x in kernel <=> pairing^T-applied coefficients vanish: rows index
        // basis vectors v_r, so solve pairing^H-style: <x, conj v_s> = 0 for
        // all s with x = B c: c in null(pairing^T)... the form matrix G_{rs} =
        // -i<v_r, conj v_s>; x = sum_r c_r v_r lies in the kernel iff
        // sum_r c_r G_{rs} = 0 for all s, i.e. G^T c = 0.
        let ker = pairing.transpose().null_space();
        self.space
            .span(self.basis.mul(&ker))
            .expect("kernel stays in ambient space")
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        if self.space != other.space || self.dim() != other.dim() {
            return false;
        }
        // Canonical form fast path in exact mode; mutual containment
        // otherwise.
        if self.backend() == Backend::Exact && other.backend() == Backend::Exact {
            return self.basis == other.basis;
        }
        self.equals(other)
    }
}

/// Distance-style check used by float tests: every basis vector of `a` is
/// within `tol_abs` (residual norm) of `b`, and dimensions agree.
pub fn subspace_close(a: &Subspace, b: &Subspace, tol_abs: f64) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let prev = tol::eps();
    // Reuse containment machinery at the requested tolerance.
    tol::with_eps(tol_abs.max(prev.min(tol_abs)), || a.equals(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp2() -> SympSpace {
        SympSpace::standard(2)
    }

    #[test]
    fn standard_gram_entries() {
        let s = sp2();
        let e1 = Mat::col_from_ints(&[1, 0, 0, 0]);
        let e3 = Mat::col_from_ints(&[0, 0, 1, 0]);
        assert_eq!(s.form(&e1, &e3), Scalar::from_int(-1));
        assert_eq!(s.form(&e3, &e1), Scalar::from_int(1));
        assert_eq!(s.form(&e1, &e1), Scalar::from_int(0));
    }

    #[test]
    fn perp_of_e1() {
        // perp(Span{e1}) = Span{e1, e2, e4} for the standard form, n = 2.
        let s = sp2();
        let v = s.span_ints(&[&[1, 0, 0, 0]]);
        let p = v.perp();
        let expected = s.span_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]]);
        assert!(p == expected);
    }

    #[test]
    fn sum_intersect_dimension_formula() {
        let s = sp2();
        let a = s.span_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let b = s.span_ints(&[&[0, 1, 0, 0], &[0, 0, 1, 0]]);
        let sum = a.sum(&b).unwrap();
        let int = a.intersect(&b).unwrap();
        assert_eq!(sum.dim(), 3);
        assert_eq!(int.dim(), 1);
        assert!(int == s.span_ints(&[&[0, 1, 0, 0]]));
        assert_eq!(sum.dim() + int.dim(), a.dim() + b.dim());
    }

    #[test]
    fn isotropic_and_signature() {
        let s = sp2();
        // Lagrangian Span{e1, e2} is isotropic with all-zero Hermitian form.
        let l = s.span_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert!(l.is_isotropic());
        assert_eq!(l.signature(), (0, 0, 2));
        assert_eq!(l.hermitian_kernel().dim(), 2);
        // Span{(i,0,1,0)} has -i<v, conj v> = -i * (-2i) = -2 < 0.
        let v = s
            .span(Mat::from_rows(vec![
                vec![Scalar::i_unit(Backend::Exact)],
                vec![Scalar::from_int(0)],
                vec![Scalar::from_int(1)],
                vec![Scalar::from_int(0)],
            ]))
            .unwrap();
        assert_eq!(v.signature(), (0, 1, 0));
    }

    #[test]
    fn conj_and_image() {
        let s = sp2();
        let i = Scalar::i_unit(Backend::Exact);
        let v = s
            .span(Mat::from_rows(vec![
                vec![i.clone()],
                vec![Scalar::from_int(0)],
                vec![Scalar::from_int(1)],
                vec![Scalar::from_int(0)],
            ]))
            .unwrap();
        let w = v.conj();
        assert!(v != w);
        assert!(v.sum(&w).unwrap().dim() == 2);
        let mut n = Mat::zeros(4, 4, Backend::Exact);
        n.set(0, 2, Scalar::from_int(1)); // e3 -> e1
        let img = v.image(&n).unwrap();
        assert!(img == s.span_ints(&[&[1, 0, 0, 0]]));
    }

    #[test]
    fn equality_float_vs_exact_representations() {
        let s = sp2();
        let a = s.span_ints(&[&[1, 2, 0, 0], &[0, 0, 1, 3]]);
        let af = a.to_float();
        assert!(af == a.to_float());
        assert!(a.contains(&a));
        assert_eq!(af.dim(), 2);
    }

    #[test]
    fn custom_gram_validation() {
        let bad = Mat::from_int_rows(&[&[0, 1], &[1, 0]]);
        assert!(SympSpace::with_gram(bad).is_err());
        let good = Mat::from_int_rows(&[&[0, -1], &[1, 0]]);
        assert!(SympSpace::with_gram(good).is_ok());
    }
}
