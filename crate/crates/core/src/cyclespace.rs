//! The cycle space attached to a period domain and its two boundary models.
//!
//! An interior point of the period domain splits the complexified lattice
//! into an even half `V` (the Hodge pieces with even `p`) and an odd half
//! `W`; the pair is a [`CyclePoint`].  Both halves are Lagrangian-like
//! complements, and the Hermitian form `h(x) = -i<x, conj x>` is negative
//! definite on `V` and positive definite on `W`.  The set of such pairs is
//! an open cell in a product of two flag manifolds — the cycle space —
//! and degenerating a Hodge structure along a nilpotent direction pushes
//! the base cycle to the closed cell where the two definiteness conditions
//! are only semidefinite.
//!
//! Two limit models are implemented:
//!
//! * [`SatakePoint`] — a single isotropic subspace `U` carrying a
//!   semidefinite Hermitian form whose kernel is a rational core.  The
//!   projections [`p_even`] and [`p_odd`] send a degeneration of matching
//!   parity to such a point, and the limit of base cycles computed by
//!   [`boundary_cycle`] recovers the same subspace independently.
//! * [`SiegelOrbit`] — a two-step isotropic degeneration (a nilpotent
//!   direction together with a Lagrangian `F^0`), the refined limit
//!   produced by [`f_tilde`].  The collapse map [`zeta`] forgets the
//!   two-step structure, and `zeta` after `f_tilde` agrees with the
//!   direct projections.
//!
//! All constructions are equivariant for integral symplectic substitutions,
//! exposed through [`gamma_act`].

use std::collections::BTreeMap;
use std::fmt;


use crate::degeneration::{
    classify_parity, deligne_bigrading, is_nilpotent_orbit, r_split_delta, sl2_complete,
    weight_filtration, NilDirection, OrbitReport, Parity,
};
use crate::error::Error;
use crate::hodge::{hodge_decomposition, Filtration, HodgeNumbers};
use crate::symplin::{Backend, Mat, Scalar, Subspace};
use crate::Result;

/// Promote a pair of subspaces to a common arithmetic backend.
fn common_backend(a: Subspace, b: Subspace) -> (Subspace, Subspace) {
    match (a.backend(), b.backend()) {
        (Backend::Exact, Backend::Float) => (a.to_float(), b),
        (Backend::Float, Backend::Exact) => (a, b.to_float()),
        _ => (a, b),
    }
}

/// An even/odd splitting of the complexified lattice: two complementary
/// isotropic-paired halves of middle dimension.
///
/// `V` and `W` are each `n`-dimensional, each isotropic for the alternating
/// form, and together they span.  Interior points of the cycle space have
/// `h = -i<., conj .>` negative definite on `V` and positive definite on
/// `W`; the constructor checks only the linear conditions, so limit points
/// with degenerate forms are representable.
#[derive(Clone, Debug)]
pub struct CyclePoint {
    v: Subspace,
    w: Subspace,
}

impl CyclePoint {
    pub fn new(v: Subspace, w: Subspace) -> Result<CyclePoint> {
        let (v, w) = common_backend(v, w);
        if v.space().dim() != w.space().dim() {
            return Err(Error::AmbientMismatch);
        }
        let n = v.space().n();
        if v.dim() != n || w.dim() != n {
            return Err(Error::DimMismatch(format!(
                "both halves of a cycle must have dimension {n}"
            )));
        }
        if !v.is_isotropic() || !w.is_isotropic() {
            return Err(Error::BadParam(
                "both halves of a cycle must be isotropic".into(),
            ));
        }
        if v.intersect(&w)?.dim() != 0 {
            return Err(Error::BadParam(
                "the two halves of a cycle must be complementary".into(),
            ));
        }
        Ok(CyclePoint { v, w })
    }

    /// The even half.
    pub fn v(&self) -> &Subspace {
        &self.v
    }

    /// The odd half.
    pub fn w(&self) -> &Subspace {
        &self.w
    }

    /// Transport the cycle by an invertible matrix.
    pub fn apply(&self, g: &Mat) -> Result<CyclePoint> {
        CyclePoint::new(self.v.image(g)?, self.w.image(g)?)
    }

    /// Span equality on both halves.
    pub fn equals(&self, other: &CyclePoint) -> bool {
        self.v.equals(&other.v) && self.w.equals(&other.w)
    }
}

/// Where a cycle point sits relative to the open cycle space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleLocation {
    /// Both definiteness conditions hold strictly.
    Interior,
    /// Both hold in the semidefinite sense, at least one degenerately.
    Closure,
    /// A definiteness condition fails in sign.
    Outside,
}

impl fmt::Display for CycleLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CycleLocation::Interior => "interior",
            CycleLocation::Closure => "closure",
            CycleLocation::Outside => "outside",
        };
        write!(f, "{s}")
    }
}

/// The even/odd splitting cut out by a period-domain point.
///
/// `V` collects the Hodge pieces `H^{p,-p-1}` with `p` even, `W` those with
/// `p` odd.  The polarization inequality `i^{2p+1} <v, conj v> > 0` makes
/// `h = -i<., conj .>` negative definite on `V` and positive definite on
/// `W`, so the result is an interior cycle.  Errors with
/// [`Error::NotInPeriodDomain`] when the filtration is not a domain point.
pub fn base_cycle(f: &Filtration) -> Result<CyclePoint> {
    let h = HodgeNumbers::from_filtration(f)?;
    if !crate::hodge::in_period_domain(f, &h)? {
        return Err(Error::NotInPeriodDomain);
    }
    let dec = hodge_decomposition(f, &h)?;
    let backend = f.backend();
    let mut v = f.space().zero_subspace(backend);
    let mut w = f.space().zero_subspace(backend);
    for (p, piece) in &dec {
        if p.rem_euclid(2) == 0 {
            v = v.sum(piece)?;
        } else {
            w = w.sum(piece)?;
        }
    }
    CyclePoint::new(v, w)
}

/// Locate a cycle point relative to the open cycle space.
///
/// The verdict reads the signature of `h = -i<., conj .>` on each half:
/// interior means `h < 0` on `V` and `h > 0` on `W`; the closure allows
/// degeneracy but no wrong-signed directions.
pub fn in_cycle_space(c: &CyclePoint) -> CycleLocation {
    let (v_pos, _, v_null) = c.v().signature();
    let (_, w_neg, w_null) = c.w().signature();
    if v_pos == 0 && w_neg == 0 {
        if v_null == 0 && w_null == 0 {
            CycleLocation::Interior
        } else {
            CycleLocation::Closure
        }
    } else {
        CycleLocation::Outside
    }
}

/// The limit of base cycles along `exp(z N) F` as `Im z` grows.
///
/// For the zero direction this is just [`base_cycle`] of `F` itself.
/// Otherwise the degeneration must be a polarizable limit structure with
/// `N^2 = 0`; the limit is computed at the distinguished representative:
/// split off `delta`, rotate the R-split partner to the interior point
/// `F_0 = exp(iN) F_hat`, and move its base cycle by `exp(X)` where `X`
/// comes from completing `N` to an sl(2)-triple.  The result lies on the
/// closure, with the degenerate directions of the even (or odd) half
/// spanned by the complexified image of `N`.
pub fn boundary_cycle(n: &NilDirection, f: &Filtration) -> Result<CyclePoint> {
    if n.is_zero() {
        return base_cycle(f);
    }
    let rs = r_split_delta(n, f)?;
    let sl2 = sl2_complete(n, &rs.f_hat)?;
    let backend = f.backend();
    let f0 = rs.f_hat.apply(&n.exp_scaled(&Scalar::i_unit(backend)))?;
    let c0 = base_cycle(&f0)?;
    // X^2 = 0 is verified by sl2_complete, so exp(X) = 1 + X.
    let ex = Mat::identity(f.space().dim(), backend).add(&sl2.x);
    c0.apply(&ex)
}

/// An isotropic limit subspace with its rational degenerate core.
///
/// `U` is `n`-dimensional and isotropic; the Hermitian form
/// `h = -i<., conj .>` restricted to `U` is negative semidefinite
/// (positive semidefinite on the conjugated side) and its kernel is
/// exactly the complexified `core`, a subspace defined over the reals.
#[derive(Clone, Debug)]
pub struct SatakePoint {
    u: Subspace,
    core: Subspace,
    conjugated: bool,
}

impl SatakePoint {
    pub fn new(u: Subspace, core: Subspace, conjugated: bool) -> Result<SatakePoint> {
        let (u, core) = common_backend(u, core);
        if u.space().dim() != core.space().dim() {
            return Err(Error::AmbientMismatch);
        }
        let n = u.space().n();
        if u.dim() != n {
            return Err(Error::DimMismatch(format!(
                "a limit subspace must have dimension {n}"
            )));
        }
        if !u.is_isotropic() {
            return Err(Error::BadParam("the limit subspace must be isotropic".into()));
        }
        if !u.contains(&core) {
            return Err(Error::BadParam("the core must sit inside U".into()));
        }
        if !core.conj().equals(&core) {
            return Err(Error::BadParam("the core must be defined over the reals".into()));
        }
        let (pos, neg, _) = u.signature();
        let wrong = if conjugated { neg } else { pos };
        if wrong != 0 {
            return Err(Error::BadParam(
                "the limit form has directions of the wrong sign".into(),
            ));
        }
        if !u.hermitian_kernel().equals(&core) {
            return Err(Error::BadParam(
                "the kernel of the limit form must be the complexified core".into(),
            ));
        }
        Ok(SatakePoint { u, core, conjugated })
    }

    pub fn u(&self) -> &Subspace {
        &self.u
    }

    pub fn core(&self) -> &Subspace {
        &self.core
    }

    pub fn conjugated(&self) -> bool {
        self.conjugated
    }

    pub fn equals(&self, other: &SatakePoint) -> bool {
        self.conjugated == other.conjugated
            && self.u.equals(&other.u)
            && self.core.equals(&other.core)
    }
}

/// Shared body of [`p_even`] and [`p_odd`].
fn satake_limit(n: &NilDirection, f: &Filtration, want: Parity) -> Result<SatakePoint> {
    if classify_parity(n, f)? != want {
        return Err(Error::WrongParity);
    }
    let rs = r_split_delta(n, f)?;
    let w = weight_filtration(n);
    let big = deligne_bigrading(&w, &rs.f_hat)?;
    let backend = f.backend();
    let want_rem = if want == Parity::Even { 0 } else { 1 };
    let n_mat = if backend == Backend::Float {
        n.mat().to_float()
    } else {
        n.mat().clone()
    };
    let core = f.space().span(n_mat)?;
    let mut u = core.clone();
    for (&(p, q), piece) in big.support() {
        if p + q == -1 && p.rem_euclid(2) == want_rem {
            u = u.sum(piece)?;
        }
    }
    SatakePoint::new(u, core, want == Parity::Odd)
}

/// Project an even-parity degeneration to its limit subspace.
///
/// `U` is the sum of the even level `-1` pieces of the R-split bigrading
/// and the complexified image of `N`; the core is the image of `N`.  The
/// answer does not change under rescaling `N` by a positive rational or
/// under moving `F` by `exp(cN)`, and it coincides with the even half of
/// [`boundary_cycle`].  Errors with [`Error::WrongParity`] unless the
/// degeneration classifies as even.
pub fn p_even(n: &NilDirection, f: &Filtration) -> Result<SatakePoint> {
    satake_limit(n, f, Parity::Even)
}

/// Project an odd-parity degeneration to its limit subspace (conjugated
/// side).  Mirror image of [`p_even`].
pub fn p_odd(n: &NilDirection, f: &Filtration) -> Result<SatakePoint> {
    satake_limit(n, f, Parity::Odd)
}

/// A two-step isotropic degeneration: a nilpotent direction together with
/// a Lagrangian zero piece, on the plain or conjugated side.
///
/// The pair encodes the weight `-1` filtration `F^0 subset F^{-1} = all`
/// with `F^0` Lagrangian, moving along `exp(z N)`.  When `conjugated` is
/// set the geometric filtration is the complex conjugate of the stored
/// one.
#[derive(Clone, Debug)]
pub struct SiegelOrbit {
    n: NilDirection,
    f0: Subspace,
    conjugated: bool,
}

impl SiegelOrbit {
    pub fn new(n: NilDirection, f0: Subspace, conjugated: bool) -> Result<SiegelOrbit> {
        if n.space().dim() != f0.space().dim() {
            return Err(Error::AmbientMismatch);
        }
        let half = f0.space().n();
        if f0.dim() != half {
            return Err(Error::DimMismatch(format!(
                "the zero piece must have dimension {half}"
            )));
        }
        if !f0.is_isotropic() {
            return Err(Error::BadParam("the zero piece must be Lagrangian".into()));
        }
        Ok(SiegelOrbit { n, f0, conjugated })
    }

    pub fn n(&self) -> &NilDirection {
        &self.n
    }

    pub fn f0(&self) -> &Subspace {
        &self.f0
    }

    pub fn conjugated(&self) -> bool {
        self.conjugated
    }

    /// The geometric two-step filtration (conjugated when flagged).
    pub fn filtration(&self) -> Result<Filtration> {
        let zero = if self.conjugated {
            self.f0.conj()
        } else {
            self.f0.clone()
        };
        let full = self.f0.space().full_subspace(zero.backend());
        let pieces: BTreeMap<i32, Subspace> = [(0, zero), (-1, full)].into_iter().collect();
        Filtration::new(pieces)
    }

    /// Check the degeneration condition: `exp(z N)` applied to the stored
    /// zero piece must enter the weight `-1` Siegel domain for large
    /// `Im z` — on the conjugate side when flagged.  Since
    /// `conj(exp(zN) F) = exp(conj(z) N) conj(F)`, the conjugated check
    /// runs the standard scan on the pair `(-N, conj F^0)`.
    pub fn validate(&self) -> Result<OrbitReport> {
        let dir = if self.conjugated {
            NilDirection::new(
                self.n.space().clone(),
                self.n.mat().scale(&Scalar::from_int(-1).with_backend(self.n.mat().backend())),
            )?
        } else {
            self.n.clone()
        };
        is_nilpotent_orbit(&dir, &self.filtration()?)
    }

    pub fn equals(&self, other: &SiegelOrbit) -> bool {
        self.conjugated == other.conjugated
            && self.n.mat().sub(other.n.mat()).is_zero()
            && self.f0.equals(&other.f0)
    }
}

/// Refine a degeneration of definite parity to a two-step limit.
///
/// The zero piece collects the level `-1` pieces of the matching parity
/// together with all level `0` pieces of the R-split bigrading, then is
/// moved back by `exp(i delta)` so that it is adapted to the original
/// filtration rather than its R-split partner.  Odd parity lands on the
/// conjugated side.  Errors with [`Error::WrongParity`] when the requested
/// parity does not match the degeneration.
pub fn f_tilde(n: &NilDirection, f: &Filtration, parity: Parity) -> Result<SiegelOrbit> {
    if parity == Parity::Neither {
        return Err(Error::BadParam(
            "a two-step limit needs a definite parity".into(),
        ));
    }
    if classify_parity(n, f)? != parity {
        return Err(Error::WrongParity);
    }
    let rs = r_split_delta(n, f)?;
    let w = weight_filtration(n);
    let big = deligne_bigrading(&w, &rs.f_hat)?;
    let backend = f.backend();
    let want_rem = if parity == Parity::Even { 0 } else { 1 };
    let mut zero_piece = f.space().zero_subspace(backend);
    for (&(p, q), piece) in big.support() {
        let take = p + q == 0 || (p + q == -1 && p.rem_euclid(2) == want_rem);
        if take {
            zero_piece = zero_piece.sum(piece)?;
        }
    }
    // delta^2 = 0, so exp(i delta) = 1 + i delta.
    let ed = Mat::identity(f.space().dim(), backend)
        .add(&rs.delta.scale(&Scalar::i_unit(backend)));
    SiegelOrbit::new(n.clone(), zero_piece.image(&ed)?, parity == Parity::Odd)
}

/// Collapse a two-step limit to its limit subspace.
///
/// The subspace is `W_{-2}` of the direction's weight filtration plus the
/// part of the zero piece lying in `W_{-1}`; the core is `W_{-2}` itself.
/// For the zero direction this returns the zero piece with trivial core,
/// so interior points collapse to their even (or odd) Hodge half.
/// Together with [`f_tilde`] it factors the direct projections:
/// `zeta(f_tilde(N, F, parity)) = p_parity(N, F)`.
pub fn zeta(s: &SiegelOrbit) -> Result<SatakePoint> {
    let w = weight_filtration(s.n());
    let mut w2 = w.piece(-2);
    let mut w1 = w.piece(-1);
    if s.f0().backend() == Backend::Float {
        w2 = w2.to_float();
        w1 = w1.to_float();
    }
    let u = w2.sum(&s.f0().intersect(&w1)?)?;
    SatakePoint::new(u, w2, s.conjugated())
}

/// Entries are Gaussian rationals with zero imaginary part and integer
/// real part.
fn is_integer_matrix(g: &Mat) -> bool {
    (0..g.rows()).all(|r| {
        (0..g.cols()).all(|c| match g.get(r, c) {
            Scalar::Exact(x) => x.im.is_zero() && x.re.is_integer(),
            Scalar::Float(_) => false,
        })
    })
}

/// Move a degeneration by an integral symplectic substitution.
///
/// Returns `(g N g^{-1}, g F)`.  Errors with [`Error::NotSymplectic`]
/// unless `g` has integer entries and preserves the alternating form; all
/// boundary projections are equivariant for this action.
pub fn gamma_act(g: &Mat, n: &NilDirection, f: &Filtration) -> Result<(NilDirection, Filtration)> {
    if !is_integer_matrix(g) || !n.space().is_symplectic(g) {
        return Err(Error::NotSymplectic);
    }
    Ok((n.conjugated(g)?, f.apply(g)?))
}

/// The period matrix of a middle-dimensional subspace in normalized
/// position: with the basis split into top and bottom square blocks
/// `[T; B]`, this is `T B^{-1}`.  Errors with [`Error::Singular`] when the
/// bottom block is singular, i.e. the subspace is not transverse to the
/// first coordinate Lagrangian.
pub fn period_matrix(v: &Subspace) -> Result<Mat> {
    let n = v.space().n();
    if v.dim() != n {
        return Err(Error::DimMismatch(format!(
            "a period matrix needs a subspace of dimension {n}"
        )));
    }
    let b = v.basis();
    let top = Mat::from_fn(n, n, |r, c| b.get(r, c).clone());
    let bottom = Mat::from_fn(n, n, |r, c| b.get(r + n, c).clone());
    let binv = bottom.inverse().map_err(|_| Error::Singular)?;
    Ok(top.mul(&binv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::{subspace_close, SympSpace};

    fn sp2() -> SympSpace {
        SympSpace::standard(2)
    }

    /// N e_3 = e_1, everything else to zero.
    fn type1_n() -> NilDirection {
        NilDirection::from_int_rows(
            sp2(),
            &[
                &[0, 0, 1, 0],
                &[0, 0, 0, 0],
                &[0, 0, 0, 0],
                &[0, 0, 0, 0],
            ],
        )
        .unwrap()
    }

    /// N e_3 = -e_1, N e_4 = -m e_2.
    fn type2_n(m: i64) -> NilDirection {
        NilDirection::from_int_rows(
            sp2(),
            &[
                &[0, 0, -1, 0],
                &[0, 0, 0, -m],
                &[0, 0, 0, 0],
                &[0, 0, 0, 0],
            ],
        )
        .unwrap()
    }

    /// F^1 spanned by (w, v, 0, 1), F^0 adding (0, w, 1, 0).
    fn type1_f(v: (i64, i64), w: (i64, i64)) -> Filtration {
        let s = sp2();
        let vv = Scalar::gauss(v.0, 1, v.1, 1);
        let ww = Scalar::gauss(w.0, 1, w.1, 1);
        let xi1 = Mat::from_rows(vec![
            vec![ww.clone()],
            vec![vv],
            vec![Scalar::from_int(0)],
            vec![Scalar::from_int(1)],
        ]);
        let xi0 = Mat::from_rows(vec![
            vec![Scalar::from_int(0)],
            vec![ww],
            vec![Scalar::from_int(1)],
            vec![Scalar::from_int(0)],
        ]);
        let f1 = s.span(xi1.clone()).unwrap();
        let f0 = s.span(xi1.hcat(&xi0)).unwrap();
        let fm1 = f1.perp();
        Filtration::new(
            [
                (1, f1),
                (0, f0),
                (-1, fm1),
                (-2, s.full_subspace(Backend::Exact)),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap()
    }

    /// F^1 spanned by (0, w, s i, 1) (the m = 1 member), F^0 adding
    /// (-1, s i, 0, 0).
    fn type2_f(sign: i64, w: (i64, i64)) -> Filtration {
        let s = sp2();
        let ww = Scalar::gauss(w.0, 1, w.1, 1);
        let si = Scalar::gauss(0, 1, sign, 1);
        let xi1 = Mat::from_rows(vec![
            vec![Scalar::from_int(0)],
            vec![ww],
            vec![si.clone()],
            vec![Scalar::from_int(1)],
        ]);
        let xi0 = Mat::from_rows(vec![
            vec![Scalar::from_int(-1)],
            vec![si],
            vec![Scalar::from_int(0)],
            vec![Scalar::from_int(0)],
        ]);
        let f1 = s.span(xi1.clone()).unwrap();
        let f0 = s.span(xi1.hcat(&xi0)).unwrap();
        let fm1 = f1.perp();
        Filtration::new(
            [
                (1, f1),
                (0, f0),
                (-1, fm1),
                (-2, s.full_subspace(Backend::Exact)),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap()
    }

    /// Interior point tau = diag(i, -i), lambda = 0.
    fn diag_interior() -> Filtration {
        let s = sp2();
        let i = Scalar::gauss(0, 1, 1, 1);
        let xi_b = Mat::from_rows(vec![
            vec![Scalar::from_int(0)],
            vec![-&i],
            vec![Scalar::from_int(0)],
            vec![Scalar::from_int(1)],
        ]);
        let xi_a = Mat::from_rows(vec![
            vec![i],
            vec![Scalar::from_int(0)],
            vec![Scalar::from_int(1)],
            vec![Scalar::from_int(0)],
        ]);
        let f1 = s.span(xi_b.clone()).unwrap();
        let f0 = s.span(xi_b.hcat(&xi_a)).unwrap();
        let fm1 = f1.perp();
        Filtration::new(
            [
                (1, f1),
                (0, f0),
                (-1, fm1),
                (-2, s.full_subspace(Backend::Exact)),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap()
    }

    /// Column vector with the given (re, im) integer entries.
    fn cvec(entries: &[(i64, i64)]) -> Mat {
        Mat::from_rows(
            entries
                .iter()
                .map(|&(re, im)| vec![Scalar::gauss(re, 1, im, 1)])
                .collect(),
        )
    }

    fn span2(a: &[(i64, i64)], b: &[(i64, i64)]) -> Subspace {
        sp2().span(cvec(a).hcat(&cvec(b))).unwrap()
    }

    #[test]
    fn base_cycle_splits_interior_point() {
        let c = base_cycle(&diag_interior()).unwrap();
        // Even half: H^{0,-1} = (i, 0, 1, 0) and H^{-2,1} = (0, i, 0, 1).
        assert!(c.v().equals(&span2(&[(0, 1), (0, 0), (1, 0), (0, 0)], &[
            (0, 0),
            (0, 1),
            (0, 0),
            (1, 0)
        ])));
        assert!(c.w().equals(&span2(&[(0, 0), (0, -1), (0, 0), (1, 0)], &[
            (0, -1),
            (0, 0),
            (1, 0),
            (0, 0)
        ])));
        assert_eq!(c.v().signature(), (0, 2, 0));
        assert_eq!(c.w().signature(), (2, 0, 0));
        assert_eq!(in_cycle_space(&c), CycleLocation::Interior);
        // The even half has period matrix i * Id.
        let tau = period_matrix(c.v()).unwrap();
        assert!(tau.sub(&Mat::identity(2, Backend::Exact).scale(&Scalar::gauss(0, 1, 1, 1)))
            .is_zero());
        // Swapping the halves lands outside: both signs are wrong.
        let swapped = CyclePoint::new(c.w().clone(), c.v().clone()).unwrap();
        assert_eq!(in_cycle_space(&swapped), CycleLocation::Outside);
    }

    #[test]
    fn base_cycle_rejects_non_domain_point() {
        let f = diag_interior().conj();
        assert!(matches!(base_cycle(&f), Err(Error::NotInPeriodDomain)));
    }

    #[test]
    fn cycle_point_validation() {
        let s = sp2();
        // e_1, e_3 pair nontrivially: not isotropic.
        let bad = s.span_ints(&[&[1, 0, 0, 0], &[0, 0, 1, 0]]);
        let good = s.span_ints(&[&[0, 1, 0, 0], &[0, 0, 0, 1]]);
        assert!(matches!(
            CyclePoint::new(bad, good.clone()),
            Err(Error::BadParam(_))
        ));
        // Overlapping halves.
        let a = s.span_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert!(matches!(
            CyclePoint::new(a.clone(), a),
            Err(Error::BadParam(_))
        ));
        // Wrong dimension.
        let thin = s.span_ints(&[&[1, 0, 0, 0]]);
        assert!(matches!(
            CyclePoint::new(thin, good),
            Err(Error::DimMismatch(_))
        ));
        // Period matrix of a non-transverse subspace.
        let flat = s.span_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert!(matches!(period_matrix(&flat), Err(Error::Singular)));
    }

    #[test]
    fn boundary_cycle_type1_lands_on_closure() {
        let n = type1_n();
        let f = type1_f((0, -1), (0, 0));
        let c = boundary_cycle(&n, &f).unwrap();
        // The rotation sends u_0 = e_3 + i e_1 to a multiple of e_1 and
        // fixes conj xi_1 = (0, i, 0, 1).
        assert!(c.v().equals(&span2(&[(1, 0), (0, 0), (0, 0), (0, 0)], &[
            (0, 0),
            (0, 1),
            (0, 0),
            (1, 0)
        ])));
        assert!(c.w().equals(&span2(&[(0, 0), (0, -1), (0, 0), (1, 0)], &[
            (0, -1),
            (0, 0),
            (1, 0),
            (0, 0)
        ])));
        assert_eq!(in_cycle_space(&c), CycleLocation::Closure);
        // The even half degenerates exactly along the image of N.
        assert_eq!(c.v().signature(), (0, 1, 1));
        assert!(c
            .v()
            .hermitian_kernel()
            .equals(&sp2().span_ints(&[&[1, 0, 0, 0]])));
        assert_eq!(c.w().signature(), (2, 0, 0));
    }

    #[test]
    fn boundary_cycle_agrees_with_even_projection() {
        for (v, w) in [((0, -1), (0, 0)), ((0, -1), (1, 2)), ((1, -3), (-2, 1))] {
            let n = type1_n();
            let f = type1_f(v, w);
            let c = boundary_cycle(&n, &f).unwrap();
            let p = p_even(&n, &f).unwrap();
            assert!(c.v().equals(p.u()), "at (v, w) = {v:?}, {w:?}");
            assert_eq!(in_cycle_space(&c), CycleLocation::Closure);
        }
        // Zero direction: the boundary cycle is the base cycle.
        let f = diag_interior();
        let z = NilDirection::zero(sp2());
        assert!(boundary_cycle(&z, &f)
            .unwrap()
            .equals(&base_cycle(&f).unwrap()));
    }

    #[test]
    fn boundary_cycle_type2_degenerates_odd_half() {
        let n = type2_n(1);
        let f = type2_f(1, (0, 0));
        let c = boundary_cycle(&n, &f).unwrap();
        assert_eq!(in_cycle_space(&c), CycleLocation::Closure);
        // The odd half collapses onto the complexified image of N, which
        // is what the odd projection reports as limit subspace.
        assert_eq!(c.v().signature(), (0, 2, 0));
        assert_eq!(c.w().signature(), (0, 0, 2));
        let p = p_odd(&n, &f).unwrap();
        assert!(c.w().equals(p.u()));
    }

    #[test]
    fn even_projection_type1_pins_satake_data() {
        let n = type1_n();
        let f = type1_f((0, -1), (1, 2));
        let p = p_even(&n, &f).unwrap();
        // U = span{e_1, conj(v) e_2 + e_4} with v = -i, independent of w.
        assert!(p.u().equals(&span2(&[(1, 0), (0, 0), (0, 0), (0, 0)], &[
            (0, 0),
            (0, 1),
            (0, 0),
            (1, 0)
        ])));
        assert!(p.core().equals(&sp2().span_ints(&[&[1, 0, 0, 0]])));
        assert!(!p.conjugated());

        // Invariance under rescaling the direction ...
        let n3 = NilDirection::new(sp2(), n.mat().scale(&Scalar::from_int(3))).unwrap();
        assert!(p_even(&n3, &f).unwrap().equals(&p));
        // ... and under sliding the filtration along exp(c N).
        for c in [2i64, -5] {
            let slid = f.apply(&n.exp_scaled(&Scalar::from_int(c))).unwrap();
            assert!(p_even(&n, &slid).unwrap().equals(&p));
        }
    }

    #[test]
    fn odd_projection_type2_pins_satake_data() {
        let n = type2_n(1);
        let f = type2_f(1, (3, 7));
        let p = p_odd(&n, &f).unwrap();
        let across = sp2().span_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert!(p.u().equals(&across));
        assert!(p.core().equals(&across));
        assert!(p.conjugated());
        assert_eq!(p.u().signature(), (0, 0, 2));

        // Parity gates.
        assert!(matches!(p_even(&n, &f), Err(Error::WrongParity)));
        assert!(matches!(
            p_odd(&type1_n(), &type1_f((0, -1), (0, 0))),
            Err(Error::WrongParity)
        ));
    }

    #[test]
    fn f_tilde_type1_matches_closed_form() {
        let n = type1_n();
        let f = type1_f((0, -1), (1, 2));
        let s = f_tilde(&n, &f, Parity::Even).unwrap();
        assert!(!s.conjugated());
        // Zero piece spanned by conj xi_1 = (1-2i, i, 0, 1) and the
        // level-zero representative e = (2+4i, 1, 1, 2).
        assert!(s.f0().equals(&span2(&[(1, -2), (0, 1), (0, 0), (1, 0)], &[
            (2, 4),
            (1, 0),
            (1, 0),
            (2, 0)
        ])));
        let report = s.validate().unwrap();
        assert!(report.verdict);
        assert!(!report.budget_exhausted);
    }

    #[test]
    fn f_tilde_type2_matches_closed_form() {
        let n = type2_n(1);
        let f = type2_f(1, (3, 7));
        let s = f_tilde(&n, &f, Parity::Odd).unwrap();
        assert!(s.conjugated());
        // Zero piece spanned by xi_1 = (0, 3+7i, i, 1) and
        // conj xi_1 - Im(w) conj xi_0 = (7, 3, -i, 1).
        assert!(s.f0().equals(&span2(&[(0, 0), (3, 7), (0, 1), (1, 0)], &[
            (7, 0),
            (3, 0),
            (0, -1),
            (1, 0)
        ])));
        let report = s.validate().unwrap();
        assert!(report.verdict);

        // Without conjugation the same data flows to the wrong side and
        // never enters the Siegel domain.
        let plain = SiegelOrbit::new(n.clone(), s.f0().clone(), false).unwrap();
        let report = plain.validate().unwrap();
        assert!(!report.verdict);
        assert!(report.budget_exhausted);
    }

    #[test]
    fn f_tilde_rejects_mismatched_parity() {
        let n1 = type1_n();
        let f1 = type1_f((0, -1), (0, 0));
        let n2 = type2_n(1);
        let f2 = type2_f(1, (0, 0));
        assert!(matches!(
            f_tilde(&n1, &f1, Parity::Odd),
            Err(Error::WrongParity)
        ));
        assert!(matches!(
            f_tilde(&n2, &f2, Parity::Even),
            Err(Error::WrongParity)
        ));
        assert!(matches!(
            f_tilde(&n1, &f1, Parity::Neither),
            Err(Error::BadParam(_))
        ));
    }

    #[test]
    fn zeta_factors_through_siegel_orbits() {
        let n1 = type1_n();
        let f1 = type1_f((0, -1), (1, 2));
        let via = zeta(&f_tilde(&n1, &f1, Parity::Even).unwrap()).unwrap();
        assert!(via.equals(&p_even(&n1, &f1).unwrap()));

        let n2 = type2_n(1);
        let f2 = type2_f(1, (3, 7));
        let via = zeta(&f_tilde(&n2, &f2, Parity::Odd).unwrap()).unwrap();
        assert!(via.equals(&p_odd(&n2, &f2).unwrap()));
    }

    #[test]
    fn zeta_of_interior_orbit_is_even_projection() {
        let f = diag_interior();
        let c = base_cycle(&f).unwrap();
        let s = SiegelOrbit::new(NilDirection::zero(sp2()), c.v().clone(), false).unwrap();
        let p = zeta(&s).unwrap();
        assert!(p.u().equals(c.v()));
        assert_eq!(p.core().dim(), 0);
        assert!(p.equals(&p_even(&NilDirection::zero(sp2()), &f).unwrap()));
    }

    #[test]
    fn rotated_orbit_projects_onto_moved_zero_piece() {
        // For Im z > 0 the parity half of the Hodge splitting of
        // exp(zN) F_hat is exp(zN) applied to the (untransported) zero
        // piece of the two-step limit.
        let z = Scalar::gauss(1, 1, 3, 1);

        let n = type1_n();
        let f = type1_f((0, -1), (1, 2));
        let rs = r_split_delta(&n, &f).unwrap();
        let big = deligne_bigrading(&weight_filtration(&n), &rs.f_hat).unwrap();
        let mut pre = sp2().zero_subspace(Backend::Exact);
        for (&(p, q), piece) in big.support() {
            if p + q == 0 || (p + q == -1 && p.rem_euclid(2) == 0) {
                pre = pre.sum(piece).unwrap();
            }
        }
        let rot = rs.f_hat.apply(&n.exp_scaled(&z)).unwrap();
        let c = base_cycle(&rot).unwrap();
        assert!(c.v().equals(&pre.image(&n.exp_scaled(&z)).unwrap()));

        let n = type2_n(1);
        let f = type2_f(1, (3, 7));
        let rs = r_split_delta(&n, &f).unwrap();
        let big = deligne_bigrading(&weight_filtration(&n), &rs.f_hat).unwrap();
        let mut pre = sp2().zero_subspace(Backend::Exact);
        for (&(p, q), piece) in big.support() {
            if p + q == 0 || (p + q == -1 && p.rem_euclid(2) == 1) {
                pre = pre.sum(piece).unwrap();
            }
        }
        let rot = rs.f_hat.apply(&n.exp_scaled(&z)).unwrap();
        let c = base_cycle(&rot).unwrap();
        assert!(c.w().equals(&pre.image(&n.exp_scaled(&z)).unwrap()));
    }

    #[test]
    fn symplectic_action_transports_boundary_data() {
        // Swap e_1 <-> e_2 and e_3 <-> e_4 (a symplectic permutation).
        let g = Mat::from_int_rows(&[
            &[0, 1, 0, 0],
            &[1, 0, 0, 0],
            &[0, 0, 0, 1],
            &[0, 0, 1, 0],
        ]);
        let n = type1_n();
        let f = type1_f((0, -1), (1, 2));
        let (gn, gf) = gamma_act(&g, &n, &f).unwrap();
        let before = p_even(&n, &f).unwrap();
        let after = p_even(&gn, &gf).unwrap();
        assert!(after.u().equals(&before.u().image(&g).unwrap()));
        assert!(after.core().equals(&before.core().image(&g).unwrap()));

        // Not symplectic at all.
        let bad = Mat::from_int_rows(&[
            &[2, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 1, 0],
            &[0, 0, 0, 1],
        ]);
        assert!(matches!(
            gamma_act(&bad, &n, &f),
            Err(Error::NotSymplectic)
        ));
        // Symplectic over the rationals but not integral.
        let half = Scalar::from_ratio(1, 2);
        let two = Scalar::from_int(2);
        let mut frac = Mat::identity(4, Backend::Exact);
        frac.set(0, 0, half);
        frac.set(2, 2, two);
        assert!(n.space().is_symplectic(&frac));
        assert!(matches!(
            gamma_act(&frac, &n, &f),
            Err(Error::NotSymplectic)
        ));
    }

    #[test]
    fn satake_point_validation_rejects_bad_data() {
        let s = sp2();
        let e1 = s.span_ints(&[&[1, 0, 0, 0]]);
        let u = span2(&[(1, 0), (0, 0), (0, 0), (0, 0)], &[
            (0, 0),
            (0, 1),
            (0, 0),
            (1, 0),
        ]);
        // Good data passes.
        assert!(SatakePoint::new(u.clone(), e1.clone(), false).is_ok());
        // Wrong sign side.
        assert!(matches!(
            SatakePoint::new(u.clone(), e1.clone(), true),
            Err(Error::BadParam(_))
        ));
        // Core larger than the kernel.
        let core2 = s.span_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert!(matches!(
            SatakePoint::new(u.clone(), core2, false),
            Err(Error::BadParam(_))
        ));
        // Core not defined over the reals: e_1 + i e_2 spans a line that
        // differs from its conjugate.
        let icore = s.span(cvec(&[(1, 0), (0, 1), (0, 0), (0, 0)])).unwrap();
        let flat = s.span_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        assert!(SatakePoint::new(flat.clone(), flat.clone(), true).is_ok());
        assert!(matches!(
            SatakePoint::new(flat.clone(), icore, true),
            Err(Error::BadParam(_))
        ));
        // Not isotropic.
        let mixed = s.span_ints(&[&[1, 0, 0, 0], &[0, 0, 1, 0]]);
        assert!(matches!(
            SatakePoint::new(mixed, e1.clone(), false),
            Err(Error::BadParam(_))
        ));
        // Wrong dimension.
        assert!(matches!(
            SatakePoint::new(e1.clone(), e1, false),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn siegel_orbit_requires_lagrangian_zero_piece() {
        let s = sp2();
        let mixed = s.span_ints(&[&[1, 0, 0, 0], &[0, 0, 1, 0]]);
        assert!(matches!(
            SiegelOrbit::new(type1_n(), mixed, false),
            Err(Error::BadParam(_))
        ));
        let thin = s.span_ints(&[&[1, 0, 0, 0]]);
        assert!(matches!(
            SiegelOrbit::new(type1_n(), thin, false),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn float_backend_agrees_for_even_projection() {
        let n = type1_n();
        let f = type1_f((0, -1), (1, 2));
        let exact = p_even(&n, &f).unwrap();

        let nf = NilDirection::new(sp2(), n.mat().to_float()).unwrap();
        let ff = f.to_float();
        let float = p_even(&nf, &ff).unwrap();
        assert!(subspace_close(float.u(), &exact.u().to_float(), 1e-9));
        assert!(subspace_close(float.core(), &exact.core().to_float(), 1e-9));

        let c = boundary_cycle(&nf, &ff).unwrap();
        assert_eq!(in_cycle_space(&c), CycleLocation::Closure);
        assert!(subspace_close(
            c.v(),
            &boundary_cycle(&n, &f).unwrap().v().to_float(),
            1e-9
        ));
    }
}
