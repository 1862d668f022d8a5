//! Hodge filtrations of weight -1: membership in the compact dual and the
//! period domain, Hodge decompositions, and dimension bookkeeping.
//!
//! Conventions: the weight is fixed at -1; Hodge numbers satisfy
//! `h(p) = h(-1-p)`; the first bilinear relation appears as the self-duality
//! `F^{-p} = (F^p)^perp`; positivity on `H^{p,-p-1}` is
//! `i^{2p+1} <v, conj v> > 0`, equivalently the Hermitian form `-i<., conj .>`
//! is negative definite on even-`p` pieces and positive definite on odd ones.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::symplin::{Backend, Mat, Scalar, Subspace, SympSpace};
use crate::Result;

/// `i^k` in the requested backend.
pub fn i_pow(k: i64, backend: Backend) -> Scalar {
    let i = Scalar::i_unit(backend);
    match k.rem_euclid(4) {
        0 => Scalar::one(backend),
        1 => i,
        2 => -Scalar::one(backend),
        _ => -i,
    }
}

/// Hodge numbers `h(p) = dim H^{p,-p-1}` for a weight -1 structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeNumbers {
    h: BTreeMap<i32, usize>,
}

impl HodgeNumbers {
    pub fn new(h: BTreeMap<i32, usize>) -> Result<HodgeNumbers> {
        let h: BTreeMap<i32, usize> = h.into_iter().filter(|(_, v)| *v > 0).collect();
        if h.is_empty() {
            return Err(Error::BadHodgeNumbers("no nonzero Hodge numbers".into()));
        }
        for (&p, &v) in &h {
            if h.get(&(-1 - p)) != Some(&v) {
                return Err(Error::BadHodgeNumbers(format!(
                    "h({p}) = {v} but h({}) differs",
                    -1 - p
                )));
            }
        }
        let total: usize = h.values().sum();
        if total % 2 != 0 {
            return Err(Error::BadHodgeNumbers("rank must be even".into()));
        }
        Ok(HodgeNumbers { h })
    }

    /// The rank-4 case with one-dimensional pieces in degrees 1, 0, -1, -2.
    pub fn case_1111() -> HodgeNumbers {
        HodgeNumbers::new([(1, 1), (0, 1), (-1, 1), (-2, 1)].into_iter().collect()).unwrap()
    }

    /// Siegel space shape: `h(0) = h(-1) = n`.
    pub fn siegel(n: usize) -> HodgeNumbers {
        HodgeNumbers::new([(0, n), (-1, n)].into_iter().collect()).unwrap()
    }

    /// Read the Hodge numbers off a filtration's dimension jumps,
    /// `h(p) = dim F^p - dim F^{p+1}`.  Fails if the jumps do not form a
    /// valid weight -1 profile.
    pub fn from_filtration(f: &Filtration) -> Result<HodgeNumbers> {
        let mut h = BTreeMap::new();
        for p in f.p_min()..=f.p_max() {
            let jump = f.piece(p).dim().saturating_sub(f.piece(p + 1).dim());
            if jump > 0 {
                h.insert(p, jump);
            }
        }
        let hn = HodgeNumbers::new(h)?;
        if hn.rank() != f.space().dim() {
            return Err(Error::BadHodgeNumbers(
                "dimension jumps do not fill the ambient space".into(),
            ));
        }
        Ok(hn)
    }

    pub fn n(&self) -> usize {
        self.rank() / 2
    }

    pub fn rank(&self) -> usize {
        self.h.values().sum()
    }

    pub fn h(&self, p: i32) -> usize {
        self.h.get(&p).copied().unwrap_or(0)
    }

    pub fn p_max(&self) -> i32 {
        *self.h.keys().next_back().unwrap()
    }

    pub fn p_min(&self) -> i32 {
        *self.h.keys().next().unwrap()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.h.iter().map(|(&p, &v)| (p, v))
    }

    /// `dim F^p = sum_{r >= p} h(r)`.
    pub fn f_dim(&self, p: i32) -> usize {
        self.h.iter().filter(|(&r, _)| r >= p).map(|(_, &v)| v).sum()
    }

    /// Even part of `f_dim`: only even `r` count.
    pub fn f_even(&self, p: i32) -> usize {
        self.h
            .iter()
            .filter(|(&r, _)| r >= p && r.rem_euclid(2) == 0)
            .map(|(_, &v)| v)
            .sum()
    }

    /// Odd part of `f_dim`.
    pub fn f_odd(&self, p: i32) -> usize {
        self.h
            .iter()
            .filter(|(&r, _)| r >= p && r.rem_euclid(2) == 1)
            .map(|(_, &v)| v)
            .sum()
    }
}

/// A decreasing filtration of the complexified lattice, keyed by degree.
///
/// `piece(p)` is the stored subspace for stored keys, the zero subspace above
/// the top key, and the full space below the bottom key.
#[derive(Clone, Debug)]
pub struct Filtration {
    pieces: BTreeMap<i32, Subspace>,
}

impl Filtration {
    pub fn new(pieces: BTreeMap<i32, Subspace>) -> Result<Filtration> {
        let mut iter = pieces.values();
        let first = iter.next().ok_or(Error::BadParam("empty filtration".into()))?;
        for s in iter.clone() {
            if s.space() != first.space() {
                return Err(Error::AmbientMismatch);
            }
        }
        Ok(Filtration { pieces })
    }

    pub fn space(&self) -> &SympSpace {
        self.pieces.values().next().unwrap().space()
    }

    pub fn backend(&self) -> Backend {
        if self.pieces.values().any(|s| s.backend() == Backend::Float) {
            Backend::Float
        } else {
            Backend::Exact
        }
    }

    pub fn p_min(&self) -> i32 {
        *self.pieces.keys().next().unwrap()
    }

    pub fn p_max(&self) -> i32 {
        *self.pieces.keys().next_back().unwrap()
    }

    pub fn pieces(&self) -> &BTreeMap<i32, Subspace> {
        &self.pieces
    }

    pub fn piece(&self, p: i32) -> Subspace {
        // The filtration jumps only at stored keys: F^p equals the piece at
        // the smallest stored key >= p, and is zero above the window.  The
        // bottom stored piece is expected to be the full space.
        match self.pieces.range(p..).next() {
            Some((_, s)) => s.clone(),
            None => self.space().zero_subspace(self.backend()),
        }
    }

    /// Apply an ambient linear map to every piece.
    pub fn apply(&self, m: &Mat) -> Result<Filtration> {
        let mut out = BTreeMap::new();
        for (&p, s) in &self.pieces {
            out.insert(p, s.image(m)?);
        }
        Filtration::new(out)
    }

    pub fn conj(&self) -> Filtration {
        Filtration {
            pieces: self.pieces.iter().map(|(&p, s)| (p, s.conj())).collect(),
        }
    }

    pub fn to_float(&self) -> Filtration {
        Filtration {
            pieces: self.pieces.iter().map(|(&p, s)| (p, s.to_float())).collect(),
        }
    }
}

impl PartialEq for Filtration {
    fn eq(&self, other: &Self) -> bool {
        self.pieces.len() == other.pieces.len()
            && self
                .pieces
                .iter()
                .zip(&other.pieces)
                .all(|((p, s), (q, t))| p == q && s == t)
    }
}

/// Why a filtration failed compact-dual membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualFailure {
    /// Ambient rank differs from the total of the Hodge numbers.
    Ambient { got: usize, want: usize },
    /// `dim F^p` does not match the Hodge numbers.
    Dimension { p: i32, got: usize, want: usize },
    /// `F^{p+1}` is not contained in `F^p`.
    NotDecreasing { p: i32 },
    /// `F^{-p} != (F^p)^perp`.
    NotSelfDual { p: i32 },
}

impl std::fmt::Display for DualFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DualFailure::Ambient { got, want } => {
                write!(f, "ambient rank {got}, expected {want}")
            }
            DualFailure::Dimension { p, got, want } => {
                write!(f, "dim F^{p} = {got}, expected {want}")
            }
            DualFailure::NotDecreasing { p } => write!(f, "F^{} not inside F^{p}", p + 1),
            DualFailure::NotSelfDual { p } => write!(f, "F^{} != perp(F^{p})", -p),
        }
    }
}

/// Compact-dual membership with reasons.
pub fn compact_dual_report(f: &Filtration, h: &HodgeNumbers) -> Vec<DualFailure> {
    let mut reasons = Vec::new();
    if f.space().dim() != h.rank() {
        reasons.push(DualFailure::Ambient {
            got: f.space().dim(),
            want: h.rank(),
        });
        return reasons;
    }
    let (lo, hi) = (h.p_min().min(f.p_min()), h.p_max().max(f.p_max()));
    for p in lo..=hi {
        let fp = f.piece(p);
        let want = h.f_dim(p);
        if fp.dim() != want {
            reasons.push(DualFailure::Dimension {
                p,
                got: fp.dim(),
                want,
            });
        }
        if !fp.contains(&f.piece(p + 1)) {
            reasons.push(DualFailure::NotDecreasing { p });
        }
    }
    if reasons.is_empty() {
        // Self-duality F^{-p} = (F^p)^perp; checking p >= 0 covers all pairs.
        for p in 0..=hi {
            if f.piece(-p) != f.piece(p).perp() {
                reasons.push(DualFailure::NotSelfDual { p });
            }
        }
    }
    reasons
}

pub fn in_compact_dual(f: &Filtration, h: &HodgeNumbers) -> bool {
    compact_dual_report(f, h).is_empty()
}

/// The Hodge pieces `H^{p,-p-1} = F^p intersect conj(F^{-p-1})` keyed by `p`.
fn hodge_pieces(f: &Filtration, h: &HodgeNumbers) -> Result<BTreeMap<i32, Subspace>> {
    let mut out = BTreeMap::new();
    for (p, _) in h.iter() {
        let piece = f.piece(p).intersect(&f.piece(-p - 1).conj())?;
        out.insert(p, piece);
    }
    Ok(out)
}

/// Period-domain membership: compact dual, plus each `H^{p,-p-1}` of the
/// right dimension and `i^{2p+1} <v, conj v>` positive definite on it, and
/// the pieces spanning the whole space.
pub fn in_period_domain(f: &Filtration, h: &HodgeNumbers) -> Result<bool> {
    let reasons = compact_dual_report(f, h);
    if !reasons.is_empty() {
        return Err(Error::NotInCompactDual(
            reasons
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let pieces = hodge_pieces(f, h)?;
    let mut total = 0usize;
    for (&p, sub) in &pieces {
        if sub.dim() != h.h(p) {
            return Ok(false);
        }
        total += sub.dim();
        // Gram of i^{2p+1} <b_r, conj b_s> must be positive definite.
        let gram = f
            .space()
            .form_gram(sub.basis(), &sub.basis().conj())
            .scale(&i_pow(2 * p as i64 + 1, sub.basis().backend()));
        let (pos, neg, zero) = gram.hermitian_signature();
        if neg != 0 || zero != 0 || pos != sub.dim() {
            return Ok(false);
        }
    }
    Ok(total == h.rank())
}

/// The Hodge decomposition of a filtration in the period domain.
pub fn hodge_decomposition(f: &Filtration, h: &HodgeNumbers) -> Result<BTreeMap<i32, Subspace>> {
    if !in_period_domain(f, h)? {
        return Err(Error::NotInPeriodDomain);
    }
    hodge_pieces(f, h)
}

/// Even and odd filtration dimensions `f_ev(p), f_od(p)` for every `p` in
/// the support window.
pub fn f_counts(h: &HodgeNumbers) -> (BTreeMap<i32, usize>, BTreeMap<i32, usize>) {
    let mut even = BTreeMap::new();
    let mut odd = BTreeMap::new();
    for p in h.p_min()..=h.p_max() {
        even.insert(p, h.f_even(p));
        odd.insert(p, h.f_odd(p));
    }
    (even, odd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::SympSpace;

    fn sp2() -> SympSpace {
        SympSpace::standard(2)
    }

    /// The diagonal chart point tau = diag(i, -i), lambda = 0.
    fn diag_point() -> Filtration {
        let s = sp2();
        let i = Scalar::i_unit(Backend::Exact);
        let xi_b = Mat::from_rows(vec![
            vec![Scalar::from_int(0)],
            vec![-&i],
            vec![Scalar::from_int(0)],
            vec![Scalar::from_int(1)],
        ]);
        let xi_a = Mat::from_rows(vec![
            vec![i.clone()],
            vec![Scalar::from_int(0)],
            vec![Scalar::from_int(1)],
            vec![Scalar::from_int(0)],
        ]);
        let f1 = s.span(xi_b.clone()).unwrap();
        let f0 = s.span(xi_b.hcat(&xi_a)).unwrap();
        let fm1 = f1.perp();
        let fm2 = s.full_subspace(Backend::Exact);
        Filtration::new(
            [(1, f1), (0, f0), (-1, fm1), (-2, fm2)].into_iter().collect(),
        )
        .unwrap()
    }

    #[test]
    fn hodge_number_validation() {
        assert!(HodgeNumbers::new([(1, 1), (0, 1)].into_iter().collect()).is_err());
        let h = HodgeNumbers::case_1111();
        assert_eq!(h.n(), 2);
        assert_eq!(h.f_dim(1), 1);
        assert_eq!(h.f_dim(-2), 4);
        assert_eq!(h.p_max(), 1);
    }

    #[test]
    fn f_count_values() {
        let h = HodgeNumbers::case_1111();
        let (even, odd) = f_counts(&h);
        assert_eq!(even[&0], 1);
        assert_eq!(even[&-2], 2);
        assert_eq!(odd[&1], 1);
        assert_eq!(odd[&-1], 2);
    }

    #[test]
    fn diag_point_is_in_domain() {
        let f = diag_point();
        let h = HodgeNumbers::case_1111();
        assert!(in_compact_dual(&f, &h));
        assert!(in_period_domain(&f, &h).unwrap());
        let dec = hodge_decomposition(&f, &h).unwrap();
        assert_eq!(dec.len(), 4);
        // H^{0,-1} is spanned by xi_a = (i, 0, 1, 0).
        let s = sp2();
        let xa = s
            .span(Mat::from_rows(vec![
                vec![Scalar::i_unit(Backend::Exact)],
                vec![Scalar::from_int(0)],
                vec![Scalar::from_int(1)],
                vec![Scalar::from_int(0)],
            ]))
            .unwrap();
        assert!(dec[&0] == xa);
        // Conjugation symmetry of the decomposition.
        assert!(dec[&-1] == dec[&0].conj());
        assert!(dec[&-2] == dec[&1].conj());
    }

    #[test]
    fn rank_mismatch_is_a_dual_failure() {
        let s = sp2();
        let f1 = s.span_ints(&[&[1, 0, 0, 0]]);
        let f = Filtration::new(
            [(1, f1.clone()), (0, f1.clone()), (-1, f1.perp()), (-2, s.full_subspace(Backend::Exact))]
                .into_iter()
                .collect(),
        )
        .unwrap();
        let h = HodgeNumbers::case_1111();
        let reasons = compact_dual_report(&f, &h);
        assert!(reasons
            .iter()
            .any(|r| matches!(r, DualFailure::Dimension { p: 0, got: 1, want: 2 })));
    }

    #[test]
    fn isotropic_flag_but_wrong_positivity_fails_domain() {
        // Swap the roles: conjugate of the good point sits in the compact
        // dual but violates positivity (det Im tau > 0 side).
        let f = diag_point().conj();
        let h = HodgeNumbers::case_1111();
        assert!(in_compact_dual(&f, &h));
        assert!(!in_period_domain(&f, &h).unwrap());
    }

    #[test]
    fn elliptic_curve_shape() {
        // n = 1: a weight -1 structure on Z^2, F^0 = Span{(tau, 1)}.
        let s = SympSpace::standard(1);
        let tau = Scalar::complex(0.3, 1.7);
        let f0 = s
            .span(Mat::from_rows(vec![vec![tau], vec![Scalar::from_f64(1.0)]]))
            .unwrap();
        let f = Filtration::new(
            [(0, f0), (-1, s.full_subspace(Backend::Float))].into_iter().collect(),
        )
        .unwrap();
        let h = HodgeNumbers::siegel(1);
        assert!(in_period_domain(&f, &h).unwrap());
        // Lower half plane fails.
        let g = f.conj();
        assert!(!in_period_domain(&g, &h).unwrap());
    }
}
