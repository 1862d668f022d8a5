//! Nilpotent degenerations of weight -1 structures: monodromy weight
//! filtrations, Deligne bigradings, limiting mixed Hodge structures,
//! canonical R-splittings, sl2 completions, and nilpotent-orbit tests.
//!
//! Throughout, the weight filtration is centered at -1, so a pure structure
//! sits entirely in graded level -1 and a rank-one degeneration with
//! `N^2 = 0` occupies levels 0, -1, -2.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::hodge::{compact_dual_report, i_pow, in_period_domain, Filtration, HodgeNumbers};
use crate::symplin::{Backend, Mat, Scalar, Subspace, SympSpace};
use crate::Result;

/// Start of the geometric grid used by [`is_nilpotent_orbit`].
pub const ORBIT_GRID_START: f64 = 1.0 / 16.0;
/// Number of doublings the grid scan performs before giving up.
pub const ORBIT_GRID_DOUBLINGS: u32 = 40;
/// Consecutive in-domain samples after which the scan settles early.  The
/// membership conditions along `exp(iyN) F` are polynomial in `y`, so once
/// a run of doublings this long (a 128-fold range of heights) stays inside,
/// later sign changes do not occur for the nilpotency indices at hand.
const ORBIT_STABLE_RUN: usize = 8;

/// Scale-aware zero test: exact matrices must vanish identically, float
/// matrices up to `eps` relative to a reference magnitude.
fn is_negligible(diff: &Mat, scale_ref: f64) -> bool {
    match diff.backend() {
        Backend::Exact => diff.is_zero(),
        Backend::Float => diff.max_abs() <= crate::tol::eps() * scale_ref.max(1.0),
    }
}

/// A rational nilpotent direction: a nilpotent matrix inside the symplectic
/// Lie algebra of the form.  Generates the rank-one cone `R_{>=0} N`.
#[derive(Clone, Debug, PartialEq)]
pub struct NilDirection {
    space: SympSpace,
    mat: Mat,
    index: usize,
}

impl NilDirection {
    pub fn new(space: SympSpace, mat: Mat) -> Result<NilDirection> {
        if mat.rows() != space.dim() || mat.cols() != space.dim() {
            return Err(Error::DimMismatch(format!(
                "direction is {}x{}, ambient rank {}",
                mat.rows(),
                mat.cols(),
                space.dim()
            )));
        }
        if !space.is_infinitesimally_symplectic(&mat) {
            return Err(Error::NotInfinitesimallySymplectic);
        }
        let index = mat.nilpotency_index().ok_or(Error::NotNilpotent)?;
        Ok(NilDirection { space, mat, index })
    }

    pub fn zero(space: SympSpace) -> NilDirection {
        let d = space.dim();
        NilDirection {
            space,
            mat: Mat::zeros(d, d, Backend::Exact),
            index: 1,
        }
    }

    /// Build from integer rows against the standard form on `Z^{2n}`.
    pub fn from_int_rows(space: SympSpace, rows: &[&[i64]]) -> Result<NilDirection> {
        NilDirection::new(space, Mat::from_int_rows(rows))
    }

    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    /// Smallest `m` with `N^m = 0`; the zero direction has index 1.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_zero(&self) -> bool {
        self.index == 1
    }

    /// `exp(z N)` as a matrix (terminating series).
    pub fn exp_scaled(&self, z: &Scalar) -> Mat {
        self.mat
            .scale(z)
            .exp_nilpotent()
            .expect("scaled nilpotent stays nilpotent")
    }

    /// Conjugate the direction by an invertible matrix: `g N g^{-1}`.
    pub fn conjugated(&self, g: &Mat) -> Result<NilDirection> {
        let gi = g.inverse()?;
        NilDirection::new(self.space.clone(), g.mul(&self.mat).mul(&gi))
    }
}

/// The monodromy weight filtration, increasing and centered at -1.
#[derive(Clone, Debug)]
pub struct WeightFiltration {
    pieces: BTreeMap<i32, Subspace>,
}

impl WeightFiltration {
    pub fn space(&self) -> &SympSpace {
        self.pieces.values().next().unwrap().space()
    }

    pub fn k_min(&self) -> i32 {
        *self.pieces.keys().next().unwrap()
    }

    pub fn k_max(&self) -> i32 {
        *self.pieces.keys().next_back().unwrap()
    }

    pub fn pieces(&self) -> &BTreeMap<i32, Subspace> {
        &self.pieces
    }

    /// `W_k`: jumps happen at stored keys; zero below the window, full above.
    pub fn piece(&self, k: i32) -> Subspace {
        match self.pieces.range(..=k).next_back() {
            Some((_, s)) => s.clone(),
            None => self.space().zero_subspace(Backend::Exact),
        }
    }

    /// `dim Gr_k = dim W_k - dim W_{k-1}`.
    pub fn gr_dim(&self, k: i32) -> usize {
        self.piece(k).dim() - self.piece(k - 1).dim()
    }

    /// Transport along an ambient isomorphism (each piece's image).
    pub fn apply(&self, g: &Mat) -> Result<WeightFiltration> {
        let mut pieces = BTreeMap::new();
        for (&k, s) in &self.pieces {
            pieces.insert(k, s.image(g)?);
        }
        Ok(WeightFiltration { pieces })
    }
}

impl PartialEq for WeightFiltration {
    fn eq(&self, other: &Self) -> bool {
        let lo = self.k_min().min(other.k_min());
        let hi = self.k_max().max(other.k_max());
        (lo..=hi).all(|k| self.piece(k) == other.piece(k))
    }
}

/// The weight filtration of a nilpotent direction, centered at -1:
/// the unique increasing filtration with `N W_k inside W_{k-2}` and
/// `N^k : Gr_{k-1} ~ Gr_{-k-1}`.  For `N^2 = 0` this is
/// `W_{-2} = im N, W_{-1} = ker N, W_0 = H`.
pub fn weight_filtration(n: &NilDirection) -> WeightFiltration {
    let m = n.index() as i32;
    let space = n.space().clone();
    let backend = n.mat().backend();
    // Cache kernels and images of the powers of N.
    let top_pow = (2 * m + 2) as usize;
    let mut kernels = Vec::new();
    let mut images = Vec::new();
    for j in 0..=top_pow {
        let pj = n.mat().pow(j);
        kernels.push(space.span(pj.null_space()).expect("kernel spans"));
        images.push(space.span(pj).expect("image spans"));
    }
    let mut pieces = BTreeMap::new();
    for k in -m..=(m - 2).max(-1) {
        let mut acc = space.zero_subspace(backend);
        for j in (k + 1).max(0)..=(m + k.abs() + 1) {
            let ker = &kernels[(j + 1).min(top_pow as i32) as usize];
            let im = &images[((j - k - 1) as usize).min(top_pow)];
            let term = ker.intersect(im).expect("same ambient");
            acc = acc.sum(&term).expect("same ambient");
        }
        pieces.insert(k, acc);
    }
    WeightFiltration { pieces }
}

/// The Deligne bigrading `I^{p,q}` of a pair (W, F), with its R-split flag.
#[derive(Clone, Debug)]
pub struct Bigrading {
    pieces: BTreeMap<(i32, i32), Subspace>,
    space: SympSpace,
    r_split: bool,
}

impl Bigrading {
    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    pub fn piece(&self, p: i32, q: i32) -> Subspace {
        match self.pieces.get(&(p, q)) {
            Some(s) => s.clone(),
            None => self.space.zero_subspace(Backend::Exact),
        }
    }

    /// Nonzero pieces, keyed by `(p, q)` in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = (&(i32, i32), &Subspace)> {
        self.pieces.iter()
    }

    /// Basis of the level `p + q = k` part, pieces concatenated in key order.
    pub fn level_basis(&self, k: i32) -> Mat {
        let mut out: Option<Mat> = None;
        for ((p, q), s) in &self.pieces {
            if p + q == k {
                out = Some(match out {
                    None => s.basis().clone(),
                    Some(m) => m.hcat(s.basis()),
                });
            }
        }
        out.unwrap_or_else(|| Mat::zeros(self.space.dim(), 0, Backend::Exact))
    }

    /// The level subspace `E_k = direct sum of I^{p,q} with p + q = k`.
    pub fn level(&self, k: i32) -> Subspace {
        self.space
            .span(self.level_basis(k))
            .expect("level basis spans")
    }

    /// `conj(I^{p,q}) = I^{q,p}` for every piece.
    pub fn is_r_split(&self) -> bool {
        self.r_split
    }
}

/// Deligne's construction
/// `I^{p,q} = F^p ∩ W_{p+q} ∩ (conj(F^q) ∩ W_{p+q} + Σ_{j>=2} conj(F^{q-j+1}) ∩ W_{p+q-j})`.
///
/// Errors with `NotDirectSum` when the pieces fail to decompose the space,
/// each graded piece of W, and each `F^p` — equivalently, when (W, F) is not
/// a mixed Hodge structure.
pub fn deligne_bigrading(w: &WeightFiltration, f: &Filtration) -> Result<Bigrading> {
    if w.space() != f.space() {
        return Err(Error::AmbientMismatch);
    }
    let space = f.space().clone();
    let mut pieces = BTreeMap::new();
    for p in f.p_min()..=f.p_max() {
        if f.piece(p).dim() == 0 {
            continue;
        }
        for k in w.k_min()..=w.k_max() {
            let q = k - p;
            let mut rhs = f.piece(q).conj().intersect(&w.piece(k))?;
            let mut j = 2;
            loop {
                let wk = w.piece(k - j);
                if wk.dim() == 0 {
                    break;
                }
                rhs = rhs.sum(&f.piece(q - j + 1).conj().intersect(&wk)?)?;
                j += 1;
            }
            let ipq = f.piece(p).intersect(&w.piece(k))?.intersect(&rhs)?;
            if ipq.dim() > 0 {
                pieces.insert((p, q), ipq);
            }
        }
    }
    let dim = space.dim();
    let total: usize = pieces.values().map(Subspace::dim).sum();
    if total != dim {
        return Err(Error::NotDirectSum);
    }
    let mut all = Mat::zeros(dim, 0, Backend::Exact);
    for s in pieces.values() {
        all = all.hcat(s.basis());
    }
    if all.rank() != dim {
        return Err(Error::NotDirectSum);
    }
    for k in w.k_min()..=w.k_max() {
        let level: usize = pieces
            .iter()
            .filter(|((p, q), _)| p + q == k)
            .map(|(_, s)| s.dim())
            .sum();
        if level != w.gr_dim(k) {
            return Err(Error::NotDirectSum);
        }
    }
    for p in f.p_min()..=f.p_max() {
        let above: usize = pieces
            .iter()
            .filter(|((r, _), _)| *r >= p)
            .map(|(_, s)| s.dim())
            .sum();
        if above != f.piece(p).dim() {
            return Err(Error::NotDirectSum);
        }
    }
    let r_split = pieces
        .iter()
        .all(|(&(p, q), s)| match pieces.get(&(q, p)) {
            Some(t) => s.conj() == *t,
            None => false,
        });
    Ok(Bigrading {
        pieces,
        space,
        r_split,
    })
}

/// Verdicts for the limiting-mixed-Hodge-structure test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LmhsReport {
    /// The Deligne pieces decompose the space: (W(N), F) is an MHS.
    pub mhs: bool,
    /// N maps `Gr_0` isomorphically to `Gr_{-2}` and shifts the bigrading
    /// by (-1,-1).
    pub morphism: bool,
    /// The `<., N^j conj .>` Hermitian forms on the (all-primitive) graded
    /// pieces `Gr_{j-1}`, j = 0, 1, are definite with sign pattern `i^{p-q}`.
    pub polarized: bool,
}

impl LmhsReport {
    pub fn holds(&self) -> bool {
        self.mhs && self.morphism && self.polarized
    }
}

/// Test whether (W(N), F) is a polarized limiting mixed Hodge structure.
/// Only defined for `N^2 = 0`; higher indices answer `IndexTooHigh`.
pub fn is_lmhs(n: &NilDirection, f: &Filtration) -> Result<LmhsReport> {
    if n.index() > 2 {
        return Err(Error::IndexTooHigh);
    }
    let w = weight_filtration(n);
    let big = match deligne_bigrading(&w, f) {
        Ok(b) => b,
        Err(Error::NotDirectSum) => {
            return Ok(LmhsReport {
                mhs: false,
                morphism: false,
                polarized: false,
            })
        }
        Err(e) => return Err(e),
    };
    let mut morphism = w.gr_dim(0) == w.gr_dim(-2);
    for (&(p, q), s) in big.support() {
        if p + q == 0 {
            let img = s.image(n.mat())?;
            morphism &= big.piece(p - 1, q - 1).contains(&img);
        }
    }
    let polarized = polarization_holds(n, &big)?;
    Ok(LmhsReport {
        mhs: true,
        morphism,
        polarized,
    })
}

/// Definiteness of `u, v -> i^{p-q} <u, N^j conj v>` on the level `j - 1`
/// pieces, j = 0, 1, with vanishing cross-blocks.  With `N^2 = 0` every
/// graded class is primitive, so the whole level is tested.
fn polarization_holds(n: &NilDirection, big: &Bigrading) -> Result<bool> {
    let space = big.space();
    for j in 0..=1i32 {
        let k = j - 1;
        let pieces: Vec<(&(i32, i32), &Subspace)> =
            big.support().filter(|((p, q), _)| p + q == k).collect();
        if pieces.is_empty() {
            continue;
        }
        let basis = big.level_basis(k);
        let twisted = n.mat().pow(j as usize).mul(&basis.conj());
        let gram = space.form_gram(&basis, &twisted);
        let thresh = gram.float_thresh();
        // Walk the block structure in the same order level_basis used.
        let mut row0 = 0usize;
        for (&(p, q), s) in &pieces {
            let d = s.dim();
            let mut col0 = 0usize;
            for (_, t) in &pieces {
                let e = t.dim();
                if col0 != row0 {
                    for r in 0..d {
                        for c in 0..e {
                            if !gram.get(row0 + r, col0 + c).is_zero_thresh(thresh) {
                                return Ok(false);
                            }
                        }
                    }
                }
                col0 += e;
            }
            let weight = i_pow((p - q) as i64, basis.backend());
            let block =
                Mat::from_fn(d, d, |r, c| gram.get(row0 + r, row0 + c) * &weight);
            // Hermiticity is judged against the scale of the block (and of
            // the full gram), not of the residue itself: a skew part made
            // purely of roundoff must read as zero.
            let skew = block.sub(&block.conj_transpose());
            let herm_ok = match block.backend() {
                Backend::Exact => skew.is_zero(),
                Backend::Float => skew.max_abs() <= thresh.max(block.float_thresh()),
            };
            if !herm_ok {
                return Ok(false);
            }
            let (pos, neg, zero) = block.hermitian_signature();
            if pos != d || neg != 0 || zero != 0 {
                return Ok(false);
            }
            row0 += d;
        }
    }
    Ok(true)
}

/// The canonical R-splitting of a limiting mixed Hodge structure.
#[derive(Clone, Debug)]
pub struct RSplitData {
    /// The real operator with `F_hat = exp(-i delta) F`; it kills levels -1
    /// and -2 and lowers level 0 into level -2, so `delta^2 = 0`.
    pub delta: Mat,
    /// The R-split partner filtration.
    pub f_hat: Filtration,
}

/// Compute the unique real `delta` with `(W(N), exp(-i delta) F)` R-split.
///
/// For the three-level situation (`N^2 = 0`) the conjugation defect sits
/// only in level 0: writing `conj(v) = u + phi` with `u` in level 0 and
/// `phi` in level -2 for each level-0 basis vector `v`, the splitting
/// operator is pinned by `delta(u) = (i/2) phi` and `delta = 0` on levels
/// -1, -2.  That linear system is solved directly; uniqueness of the
/// canonical splitting makes the answer independent of any solver path.
pub fn r_split_delta(n: &NilDirection, f: &Filtration) -> Result<RSplitData> {
    let report = is_lmhs(n, f)?;
    if !report.holds() {
        return Err(Error::BadParam(
            "input is not a polarized limiting mixed Hodge structure".into(),
        ));
    }
    let w = weight_filtration(n);
    let big = deligne_bigrading(&w, f)?;
    let dim = f.space().dim();
    let backend = f.backend();
    let b0 = big.level_basis(0);
    if b0.cols() == 0 {
        // Pure case: nothing to split.
        return Ok(RSplitData {
            delta: Mat::zeros(dim, dim, backend),
            f_hat: f.clone(),
        });
    }
    let bm1 = big.level_basis(-1);
    let bm2 = big.level_basis(-2);
    let full = b0.hcat(&bm1).hcat(&bm2);
    let full_inv = full.inverse()?;
    let (d0, d1, d2) = (b0.cols(), bm1.cols(), bm2.cols());
    let mut u = Mat::zeros(dim, 0, backend);
    let mut phi = Mat::zeros(dim, 0, backend);
    for jcol in 0..d0 {
        let coords = full_inv.mul(&b0.col(jcol).conj());
        let thresh = coords.float_thresh();
        for r in d0..d0 + d1 {
            if !coords.get(r, 0).is_zero_thresh(thresh) {
                return Err(Error::SolveFailed(
                    "conjugate of a level-0 vector has a level -1 component".into(),
                ));
            }
        }
        let mut ucol = Mat::zeros(dim, 1, backend);
        for r in 0..d0 {
            ucol = ucol.add(&b0.col(r).scale(coords.get(r, 0)));
        }
        let mut pcol = Mat::zeros(dim, 1, backend);
        for r in 0..d2 {
            pcol = pcol.add(&bm2.col(r).scale(coords.get(d0 + d1 + r, 0)));
        }
        u = u.hcat(&ucol);
        phi = phi.hcat(&pcol);
    }
    // delta * [U | B_{-1} | B_{-2}] = [(i/2) Phi | 0 | 0]
    let half_i = Scalar::i_unit(backend) * Scalar::from_ratio(1, 2).with_backend(backend);
    let lhs = u.hcat(&bm1).hcat(&bm2);
    let rhs = phi
        .scale(&half_i)
        .hcat(&Mat::zeros(dim, d1 + d2, backend));
    let delta = rhs.mul(&lhs.inverse()?);
    if !is_negligible(&delta.sub(&delta.conj()), delta.max_abs()) {
        return Err(Error::SolveFailed("splitting operator is not real".into()));
    }
    // exp(-i delta) = 1 - i delta since delta^2 = 0.
    let minus_i = -Scalar::i_unit(backend);
    let transport = Mat::identity(dim, backend).add(&delta.scale(&minus_i));
    let f_hat = f.apply(&transport)?;
    let hat_big = deligne_bigrading(&w, &f_hat)?;
    if !hat_big.is_r_split() {
        return Err(Error::SolveFailed(
            "computed splitting is not R-split".into(),
        ));
    }
    Ok(RSplitData { delta, f_hat })
}

/// An sl2 triple completed from a nilpotent direction and an R-split
/// filtration, together with the horizontal rotation X.
#[derive(Clone, Debug)]
pub struct Sl2Data {
    pub n: Mat,
    pub h: Mat,
    pub nplus: Mat,
    pub x: Mat,
}

/// Complete `N` to an sl2 triple using the R-split bigrading: `H` acts by
/// `p + q + 1` on `I^{p,q}`, `Nplus` is the unique solution of
/// `[H, Nplus] = 2 Nplus`, `[Nplus, N] = H`, and
/// `X = (1/2)(iN - H + i Nplus)`.
pub fn sl2_complete(n: &NilDirection, f_hat: &Filtration) -> Result<Sl2Data> {
    if n.index() > 2 {
        return Err(Error::IndexTooHigh);
    }
    let w = weight_filtration(n);
    let big = deligne_bigrading(&w, f_hat)?;
    if !big.is_r_split() {
        return Err(Error::NotRSplit);
    }
    let dim = f_hat.space().dim();
    let backend = f_hat.backend();
    let mut cols = Mat::zeros(dim, 0, backend);
    let mut eigen = Vec::new();
    for (&(p, q), s) in big.support() {
        cols = cols.hcat(s.basis());
        for _ in 0..s.dim() {
            eigen.push(p + q + 1);
        }
    }
    let diag = Mat::from_fn(dim, dim, |r, c| {
        if r == c {
            Scalar::from_int(eigen[r] as i64).with_backend(backend)
        } else {
            Scalar::zero(backend)
        }
    });
    let h = cols.mul(&diag).mul(&cols.inverse()?);
    let nm = if backend == Backend::Float {
        n.mat().to_float()
    } else {
        n.mat().clone()
    };
    let lower = h.commutator(&nm);
    let target = nm.scale(&Scalar::from_int(-2).with_backend(backend));
    if !is_negligible(&lower.sub(&target), h.max_abs() * nm.max_abs()) {
        return Err(Error::NoTriple);
    }
    let nplus = solve_raising(&h, &nm)?;
    let half = Scalar::from_ratio(1, 2).with_backend(backend);
    let i = Scalar::i_unit(backend);
    let x = nm
        .scale(&i)
        .sub(&h)
        .add(&nplus.scale(&i))
        .scale(&half);
    let xsq = x.mul(&x);
    if !is_negligible(&xsq, x.max_abs() * x.max_abs()) {
        return Err(Error::CheckFailed("X^2 = 0".into()));
    }
    Ok(Sl2Data {
        n: nm,
        h,
        nplus,
        x,
    })
}

/// Solve `[H, P] = 2P` and `[P, N] = H` for the raising element `P`.
/// The combined linear system has trivial kernel for an honest pair, so a
/// unique solution exists; inconsistency or non-uniqueness means the input
/// was not an sl2-adapted pair.
fn solve_raising(h: &Mat, n: &Mat) -> Result<Mat> {
    let d = h.rows();
    let unknowns = d * d;
    let backend = h.backend();
    let idx = |r: usize, c: usize| r * d + c;
    let mut a = Mat::zeros(2 * unknowns, unknowns, backend);
    let mut b = Mat::zeros(2 * unknowns, 1, backend);
    // Rows 0..d^2: (H P - P H - 2P)_{rc} = 0.
    for r in 0..d {
        for c in 0..d {
            let row = idx(r, c);
            for k in 0..d {
                let v = a.get(row, idx(k, c)) + h.get(r, k);
                a.set(row, idx(k, c), v);
                let v = a.get(row, idx(r, k)) - h.get(k, c);
                a.set(row, idx(r, k), v);
            }
            let v = a.get(row, idx(r, c)) - &Scalar::from_int(2).with_backend(backend);
            a.set(row, idx(r, c), v);
        }
    }
    // Rows d^2..2d^2: (P N - N P)_{rc} = H_{rc}.
    for r in 0..d {
        for c in 0..d {
            let row = unknowns + idx(r, c);
            for k in 0..d {
                let v = a.get(row, idx(r, k)) + n.get(k, c);
                a.set(row, idx(r, k), v);
                let v = a.get(row, idx(k, c)) - n.get(r, k);
                a.set(row, idx(k, c), v);
            }
            b.set(row, 0, h.get(r, c).clone());
        }
    }
    if a.rank() < unknowns {
        return Err(Error::NoTriple);
    }
    let sol = a.solve(&b).ok_or(Error::NoTriple)?;
    Ok(Mat::from_fn(d, d, |r, c| sol.get(idx(r, c), 0).clone()))
}

/// Report of the X-action identities at the core of the boundary cycle
/// construction.
#[derive(Clone, Debug)]
pub struct XActionReport {
    /// `X exp(iN) v = -exp(-iN) v` for every level-0 basis vector `v`.
    pub eigenvector_identity: bool,
    /// `|X u|^2 = |u|^2` in the Hodge norms of `exp(iN) F_hat`.
    pub norm_identity: bool,
    /// `i^{2p+1} <exp(zX) u, conj(exp(zX) u)> = (1 - |z|^2) |u|^2`.
    pub disk_identity: bool,
    /// The pairing between the flows of `<., N conj .>`-orthogonal level-0
    /// vectors vanishes identically.
    pub cross_pairing_zero: bool,
    /// Largest relative residual seen across all identities.
    pub max_deviation: f64,
}

impl XActionReport {
    pub fn holds(&self) -> bool {
        self.eigenvector_identity
            && self.norm_identity
            && self.disk_identity
            && self.cross_pairing_zero
    }
}

/// Verify the X-action identities for the given sl2 data on every level-0
/// basis vector, sampling `exp(zX)` at `z = 0`, `z = 1`, and the supplied
/// points.  Fails with `CheckFailed` naming the first broken identity.
pub fn x_action_check(
    data: &Sl2Data,
    n: &NilDirection,
    f_hat: &Filtration,
    zs: &[Scalar],
) -> Result<XActionReport> {
    let w = weight_filtration(n);
    let big = deligne_bigrading(&w, f_hat)?;
    if !big.is_r_split() {
        return Err(Error::NotRSplit);
    }
    let space = f_hat.space();
    let backend = f_hat.backend();
    let i = Scalar::i_unit(backend);
    let e_in = n.exp_scaled(&i);
    let e_out = n.exp_scaled(&-i.clone());
    let tol = match backend {
        Backend::Exact => 0.0,
        Backend::Float => crate::tol::eps(),
    };
    let mut max_dev = 0.0f64;
    let mut track = |dev: f64| {
        if dev > max_dev {
            max_dev = dev;
        }
        dev <= tol
    };
    let mut zlist: Vec<Scalar> = vec![Scalar::zero(backend), Scalar::one(backend)];
    zlist.extend(zs.iter().cloned());

    let mut vectors = Vec::new();
    for (&(p, q), s) in big.support() {
        if p + q == 0 {
            for c in 0..s.dim() {
                vectors.push((p, s.basis().col(c)));
            }
        }
    }
    let pairing = |a: &Mat, b: &Mat| -> Scalar {
        space.form_gram(a, &b.conj()).get(0, 0).clone()
    };
    let mut eigen_ok = true;
    let mut norm_ok = true;
    let mut disk_ok = true;
    let mut cross_ok = true;
    for (p, v) in &vectors {
        let u = e_in.mul(v);
        let xu = data.x.mul(&u);
        let target = e_out.mul(v).scale(&-Scalar::one(backend));
        let scale = u.max_abs().max(1.0);
        eigen_ok &= track(xu.sub(&target).max_abs() / scale);
        let nu = pairing(&u, &u) * i_pow(2 * *p as i64 + 1, backend);
        let nxu = pairing(&xu, &xu) * i_pow(2 * *p as i64 - 1, backend);
        let nscale = nu.abs_est().max(1.0);
        norm_ok &= track((&nxu - &nu).abs_est() / nscale);
        for z in &zlist {
            let flow = u.add(&data.x.mul(&u).scale(z));
            let val = pairing(&flow, &flow) * i_pow(2 * *p as i64 + 1, backend);
            let expect = &nu * &(Scalar::one(backend) - (z * &z.conj()));
            disk_ok &= track((&val - &expect).abs_est() / nscale);
        }
    }
    for (ia, (_, va)) in vectors.iter().enumerate() {
        for (_, vb) in vectors.iter().skip(ia + 1) {
            let cross = space.form_gram(va, &n.mat().mul(&vb.conj())).get(0, 0).clone();
            if !cross.is_zero() {
                continue;
            }
            let ua = e_in.mul(va);
            let ub = e_in.mul(vb);
            let scale = (ua.max_abs() * ub.max_abs()).max(1.0);
            for z in &zlist {
                let fa = ua.add(&data.x.mul(&ua).scale(z));
                let fb = ub.add(&data.x.mul(&ub).scale(z));
                cross_ok &= track(pairing(&fa, &fb).abs_est() / scale);
            }
        }
    }
    let report = XActionReport {
        eigenvector_identity: eigen_ok,
        norm_identity: norm_ok,
        disk_identity: disk_ok,
        cross_pairing_zero: cross_ok,
        max_deviation: max_dev,
    };
    if !report.holds() {
        let name = if !eigen_ok {
            "X exp(iN) v = -exp(-iN) v"
        } else if !norm_ok {
            "|X u| = |u|"
        } else if !disk_ok {
            "disk pairing 1 - |z|^2"
        } else {
            "orthogonal cross-pairing vanishes"
        };
        return Err(Error::CheckFailed(name.into()));
    }
    Ok(report)
}

/// The three-way splitting of each Hodge component of `exp(zN) F_hat`:
/// `H_1 = I^{p,-p-1}`, `H_2 = exp(zN) I^{p,-p}`, `H_3 = exp(conj z N) I^{p+1,-p-1}`.
pub fn split_123(
    n: &NilDirection,
    f_hat: &Filtration,
    z: &Scalar,
) -> Result<BTreeMap<i32, (Subspace, Subspace, Subspace)>> {
    if n.index() > 2 {
        return Err(Error::IndexTooHigh);
    }
    if z.im_part().real_sign() <= 0 {
        return Err(Error::BadParam("Im z must be positive".into()));
    }
    let w = weight_filtration(n);
    let big = deligne_bigrading(&w, f_hat)?;
    if !big.is_r_split() {
        return Err(Error::NotRSplit);
    }
    let h = HodgeNumbers::from_filtration(f_hat)?;
    let ezn = n.exp_scaled(z);
    let ezbar = n.exp_scaled(&z.conj());
    let mut out = BTreeMap::new();
    for (p, _) in h.iter() {
        let h1 = big.piece(p, -p - 1);
        let h2 = big.piece(p, -p).image(&ezn)?;
        let h3 = big.piece(p + 1, -p - 1).image(&ezbar)?;
        out.insert(p, (h1, h2, h3));
    }
    Ok(out)
}

/// Outcome of the nilpotent-orbit scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitReport {
    pub verdict: bool,
    /// Least sampled `y` from which every grid point stayed in the period
    /// domain (0 for the zero direction, infinity when the verdict is false).
    pub y_star: f64,
    /// True when the scan ran out of budget without finding a stable
    /// threshold; structural failures (horizontality) leave it false.
    pub budget_exhausted: bool,
}

/// Decide whether `(N, F)` generates a nilpotent orbit: horizontality
/// `N F^p inside F^{p-1}` plus `exp(iyN) F` in the period domain for all
/// sampled `y >= y_star` on the geometric grid `2^k / 16`, `k = 0..=40`.
pub fn is_nilpotent_orbit(n: &NilDirection, f: &Filtration) -> Result<OrbitReport> {
    let h = HodgeNumbers::from_filtration(f)?;
    let reasons = compact_dual_report(f, &h);
    if !reasons.is_empty() {
        return Err(Error::NotInCompactDual(
            reasons
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    for p in f.p_min()..=f.p_max() {
        let img = f.piece(p).image(n.mat())?;
        if !f.piece(p - 1).contains(&img) {
            return Ok(OrbitReport {
                verdict: false,
                y_star: f64::INFINITY,
                budget_exhausted: false,
            });
        }
    }
    if n.is_zero() {
        return Ok(OrbitReport {
            verdict: in_period_domain(f, &h)?,
            y_star: 0.0,
            budget_exhausted: false,
        });
    }
    let backend = f.backend();
    let i = Scalar::i_unit(backend);
    let mut in_domain = Vec::new();
    for k in 0..=ORBIT_GRID_DOUBLINGS {
        let y_val = ORBIT_GRID_START * (1u64 << k) as f64;
        // Precision horizon of the float backend: transporting by
        // exp(iyN) spreads the basis scales by a factor of y, so pairing
        // and elimination arithmetic carries an absolute noise floor of
        // about y^2 times the machine epsilon.  Once that floor reaches
        // the rank threshold, samples certify nothing, so the scan stops.
        if backend == Backend::Float && y_val * y_val * f64::EPSILON > 0.1 * crate::tol::eps() {
            break;
        }
        let y = Scalar::from_ratio(1i64 << k, 16).with_backend(backend);
        let ey = n.exp_scaled(&(&i * &y));
        let fy = f.apply(&ey)?;
        let ok = match in_period_domain(&fy, &h) {
            Ok(v) => v,
            // Transport by exp(iyN) preserves compact-dual membership, so a
            // float failure here is noise past usable precision: stop the
            // scan at this point, exactly as at the horizon.
            Err(Error::NotInCompactDual(_)) if backend == Backend::Float => break,
            Err(e) => return Err(e),
        };
        in_domain.push(ok);
        // A settled trailing run decides the verdict; skip the rest of the
        // grid.
        if in_domain.len() >= ORBIT_STABLE_RUN
            && in_domain[in_domain.len() - ORBIT_STABLE_RUN..].iter().all(|&v| v)
        {
            break;
        }
    }
    // Least k* whose tail is all-true.
    let mut kstar = None;
    for k in (0..in_domain.len()).rev() {
        if in_domain[k] {
            kstar = Some(k);
        } else {
            break;
        }
    }
    match kstar {
        Some(k) => Ok(OrbitReport {
            verdict: true,
            y_star: ORBIT_GRID_START * (1u64 << k) as f64,
            budget_exhausted: false,
        }),
        None => Ok(OrbitReport {
            verdict: false,
            y_star: f64::INFINITY,
            budget_exhausted: true,
        }),
    }
}

/// Parity of a rank-one degeneration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
            Parity::Neither => write!(f, "neither"),
        }
    }
}

/// Classify a nilpotent orbit as even (`I^{p,-p} = 0` for odd p), odd
/// (`I^{p,-p} = 0` for even p), or neither.  Directions with `N^2 != 0`
/// are always `Neither`; the zero direction counts as even (a pure
/// structure has no level-0 pieces at all).
pub fn classify_parity(n: &NilDirection, f: &Filtration) -> Result<Parity> {
    let orbit = is_nilpotent_orbit(n, f)?;
    if !orbit.verdict {
        return Err(Error::NotAnOrbit);
    }
    if n.index() > 2 {
        return Ok(Parity::Neither);
    }
    let w = weight_filtration(n);
    let big = deligne_bigrading(&w, f)?;
    let mut has_even = false;
    let mut has_odd = false;
    for (&(p, q), _) in big.support() {
        if p + q == 0 {
            if p.rem_euclid(2) == 0 {
                has_even = true;
            } else {
                has_odd = true;
            }
        }
    }
    Ok(match (has_even, has_odd) {
        (_, false) => Parity::Even,
        (false, true) => Parity::Odd,
        (true, true) => Parity::Neither,
    })
}

/// Equality of rank-one orbits: is there a complex `c` with
/// `exp(cN) F_1 = F_2`?  Linear in `c` because `N^2 = 0`.
pub fn orbits_equal(n: &NilDirection, f1: &Filtration, f2: &Filtration) -> Result<bool> {
    if n.index() > 2 {
        return Err(Error::IndexTooHigh);
    }
    if f1.space() != f2.space() {
        return Err(Error::AmbientMismatch);
    }
    if f1 == f2 {
        return Ok(true);
    }
    // Annihilator conditions: for every functional phi vanishing on F2^p and
    // every basis vector b of F1^p, phi(b) + c phi(Nb) = 0.
    let mut best: Option<(Scalar, Scalar)> = None; // (a, d) with max |d|
    let mut best_mag = 0.0f64;
    for p in f1.p_min().min(f2.p_min())..=f1.p_max().max(f2.p_max()) {
        let (s1, s2) = (f1.piece(p), f2.piece(p));
        if s1.dim() != s2.dim() {
            return Ok(false);
        }
        let functionals = s2.basis().transpose().null_space();
        let vals = functionals.transpose().mul(s1.basis());
        let dvals = functionals.transpose().mul(&n.mat().mul(s1.basis()));
        let thresh = vals.float_thresh().max(dvals.float_thresh());
        for r in 0..vals.rows() {
            for c in 0..vals.cols() {
                let (a, d) = (vals.get(r, c), dvals.get(r, c));
                if d.is_zero_thresh(thresh) {
                    if !a.is_zero_thresh(thresh) {
                        return Ok(false);
                    }
                } else if d.abs_est() > best_mag {
                    best_mag = d.abs_est();
                    best = Some((a.clone(), d.clone()));
                }
            }
        }
    }
    let c = match best {
        Some((a, d)) => -(&a / &d),
        None => return Ok(false), // all conditions trivial yet F1 != F2
    };
    let transported = f1.apply(&n.exp_scaled(&c))?;
    Ok(transported == *f2)
}
