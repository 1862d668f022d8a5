//! Closed-form boundary data for the rank-4 period domain whose four Hodge
//! numbers all equal one.
//!
//! At this rank the flag variety carries a global chart — a symmetric
//! complex 2x2 matrix plus one extra modulus — and rank-one nilpotent
//! directions fall into three conjugacy types: square-zero with a line as
//! image (even type), square-zero with a plane as image (odd type), and
//! index four (neither).  For the two square-zero types everything the
//! general machinery produces has an explicit formula: the R-split
//! partner, the limit subspace, the two-step boundary orbit, and its
//! Siegel period matrix.  This module provides the chart, the
//! classification, those formulas, and a numerical experiment that walks
//! shrinking multi-radius schedules toward a boundary point and records
//! how fast the boundary maps converge along them.

use std::collections::BTreeMap;
use std::fmt;

use crate::cyclespace::base_cycle;
use crate::degeneration::NilDirection;
use crate::error::Error;
use crate::hodge::Filtration;
use crate::symplin::{Backend, Mat, Scalar, Subspace, SympSpace};
use crate::Result;

/// The standard rank-4 symplectic space every object here lives in.
pub fn sp4() -> SympSpace {
    SympSpace::standard(2)
}

fn col4(entries: [Scalar; 4]) -> Mat {
    Mat::new(4, 1, entries.to_vec())
}

fn zero(b: Backend) -> Scalar {
    Scalar::zero(b)
}

fn one(b: Backend) -> Scalar {
    Scalar::one(b)
}

/// Assemble the full flag {F^1 ⊂ F^0 ⊂ F^{-1} ⊂ F^{-2}} from a generator
/// of the top line and a 4x2 basis of the middle plane; the bottom half is
/// forced by self-duality.
fn full_flag(top: &Mat, plane: &Mat) -> Filtration {
    let space = sp4();
    let backend = plane.backend();
    let f1 = space.span(top.clone()).expect("top line spans");
    let f0 = space.span(plane.clone()).expect("middle plane spans");
    let fm1 = f1.perp();
    let full = space.full_subspace(backend);
    Filtration::new(BTreeMap::from([(1, f1), (0, f0), (-1, fm1), (-2, full)]))
        .expect("flag pieces share the ambient space")
}

// ---------------------------------------------------------------------------
// The global chart of the flag variety.

/// A point of the flag variety in its global matrix chart: a symmetric
/// complex 2x2 block `tau` filling the top rows over an identity bottom,
/// plus one modulus `lambda` tilting the top line inside the middle plane.
#[derive(Clone, Debug)]
pub struct ChartPoint {
    tau: Mat,
    lambda: Scalar,
}

impl ChartPoint {
    pub fn new(tau: Mat, lambda: Scalar) -> Result<ChartPoint> {
        if tau.rows() != 2 || tau.cols() != 2 {
            return Err(Error::DimMismatch(format!(
                "chart matrix is {}x{}, want 2x2",
                tau.rows(),
                tau.cols()
            )));
        }
        let mut tau = tau;
        let mut lambda = lambda;
        if tau.backend() != lambda.backend() {
            tau = tau.to_float();
            lambda = lambda.to_float();
        }
        let skew = &(-tau.get(1, 0)) + tau.get(0, 1);
        let floor = crate::tol::eps() * tau.max_abs().max(1.0);
        let symmetric = match tau.backend() {
            Backend::Exact => skew.is_zero(),
            Backend::Float => skew.abs_est() <= floor,
        };
        if !symmetric {
            return Err(Error::BadParam("chart matrix must be symmetric".into()));
        }
        Ok(ChartPoint { tau, lambda })
    }

    /// Convenience constructor from the three independent entries.
    pub fn from_entries(t11: Scalar, t12: Scalar, t22: Scalar, lambda: Scalar) -> Result<ChartPoint> {
        let backend = [&t11, &t12, &t22, &lambda]
            .iter()
            .fold(Backend::Exact, |acc, s| {
                if s.backend() == Backend::Float {
                    Backend::Float
                } else {
                    acc
                }
            });
        let cast = |s: &Scalar| s.with_backend(backend);
        let tau = Mat::new(
            2,
            2,
            vec![cast(&t11), cast(&t12), cast(&t12), cast(&t22)],
        );
        ChartPoint::new(tau, cast(&lambda))
    }

    pub fn tau(&self) -> &Mat {
        &self.tau
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn backend(&self) -> Backend {
        self.tau.backend()
    }

    /// The two middle-plane columns: `xi_a` over `e_3` and `xi_b` over `e_4`.
    fn plane_cols(&self) -> (Mat, Mat) {
        let b = self.backend();
        let xi_a = col4([
            self.tau.get(0, 0).clone(),
            self.tau.get(1, 0).clone(),
            one(b),
            zero(b),
        ]);
        let xi_b = col4([
            self.tau.get(0, 1).clone(),
            self.tau.get(1, 1).clone(),
            zero(b),
            one(b),
        ]);
        (xi_a, xi_b)
    }

    /// Generator of the top filtration line, `xi_b + lambda xi_a`.
    pub fn top_vector(&self) -> Mat {
        let (xi_a, xi_b) = self.plane_cols();
        xi_b.add(&xi_a.scale(&self.lambda))
    }

    /// Strict interior membership: the imaginary part of `tau` has mixed
    /// signature (negative determinant) and the top line pairs positively
    /// with its conjugate under `-i<., conj .>`.
    pub fn in_domain(&self) -> bool {
        let im = self.tau.map(|s| s.im_part());
        let det = &(im.get(0, 0) * im.get(1, 1)) - &(im.get(0, 1) * im.get(1, 0));
        if det.real_sign() >= 0 {
            return false;
        }
        let om = self.top_vector();
        let pairing = sp4().form(&om, &om.conj());
        let val = -(Scalar::i_unit(self.backend())) * pairing;
        val.real_sign() > 0
    }
}

/// The flag of a chart point.  Every chart point lands in the compact
/// dual; membership in the open domain is the separate `in_domain` test.
pub fn chart_filtration(p: &ChartPoint) -> Filtration {
    let (xi_a, xi_b) = p.plane_cols();
    full_flag(&p.top_vector(), &xi_b.hcat(&xi_a))
}

// ---------------------------------------------------------------------------
// Classification of rank-one nilpotent directions.

/// Conjugacy type of a nilpotent direction at this rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilType {
    /// Square zero, one-dimensional image: even type.
    I,
    /// Square zero, two-dimensional image: odd type.
    II,
    /// Nonzero cube, vanishing fourth power: neither parity.
    III,
    /// Anything else, including the zero direction.
    Invalid,
}

impl fmt::Display for NilType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NilType::I => write!(f, "I"),
            NilType::II => write!(f, "II"),
            NilType::III => write!(f, "III"),
            NilType::Invalid => write!(f, "invalid"),
        }
    }
}

/// Classify a nilpotent direction by its nilpotency index and image rank.
/// Directions over an ambient space of the wrong rank are `Invalid`.
pub fn classify_1111(n: &NilDirection) -> NilType {
    if n.space().dim() != 4 {
        return NilType::Invalid;
    }
    match n.index() {
        2 => match n.mat().rank() {
            1 => NilType::I,
            2 => NilType::II,
            _ => NilType::Invalid,
        },
        4 => NilType::III,
        _ => NilType::Invalid,
    }
}

/// The even-type representative: `N e_3 = e_1`, everything else to zero.
pub fn type1_direction() -> NilDirection {
    NilDirection::from_int_rows(
        sp4(),
        &[&[0, 0, 1, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]],
    )
    .expect("representative is nilpotent and infinitesimally symplectic")
}

/// The odd-type representative: `N e_3 = -e_1`, `N e_4 = -m e_2`.
pub fn type2_direction(m: u32) -> NilDirection {
    let m = m as i64;
    NilDirection::from_int_rows(
        sp4(),
        &[&[0, 0, -1, 0], &[0, 0, 0, -m], &[0, 0, 0, 0], &[0, 0, 0, 0]],
    )
    .expect("representative is nilpotent and infinitesimally symplectic")
}

/// A representative with nonzero cube (index four).
pub fn type3_direction() -> NilDirection {
    NilDirection::from_int_rows(
        sp4(),
        &[&[0, 1, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0], &[0, 0, -1, 0]],
    )
    .expect("representative is nilpotent and infinitesimally symplectic")
}

/// Rebuild a direction over the requested scalar backend.
pub fn direction_with_backend(n: &NilDirection, backend: Backend) -> NilDirection {
    let mat = match backend {
        Backend::Exact => n.mat().clone(),
        Backend::Float => n.mat().to_float(),
    };
    NilDirection::new(n.space().clone(), mat).expect("backend change preserves validity")
}

// ---------------------------------------------------------------------------
// Family parameters.

/// Sign choice labelling the two components of the odd boundary family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignChoice {
    Plus,
    Minus,
}

impl SignChoice {
    pub fn factor(&self) -> f64 {
        match self {
            SignChoice::Plus => 1.0,
            SignChoice::Minus => -1.0,
        }
    }
}

impl fmt::Display for SignChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignChoice::Plus => write!(f, "+"),
            SignChoice::Minus => write!(f, "-"),
        }
    }
}

/// Parameters `(v, w)` of an even-family boundary filtration; `Im v < 0`.
#[derive(Clone, Debug)]
pub struct Type1Param {
    v: Scalar,
    w: Scalar,
}

impl Type1Param {
    pub fn new(v: Scalar, w: Scalar) -> Result<Type1Param> {
        let (v, w) = if v.backend() != w.backend() {
            (v.to_float(), w.to_float())
        } else {
            (v, w)
        };
        if v.im_part().real_sign() >= 0 {
            return Err(Error::BadParam(
                "even-family parameter v needs negative imaginary part".into(),
            ));
        }
        Ok(Type1Param { v, w })
    }

    pub fn v(&self) -> &Scalar {
        &self.v
    }

    pub fn w(&self) -> &Scalar {
        &self.w
    }

    pub fn backend(&self) -> Backend {
        self.v.backend()
    }

    pub fn to_float(&self) -> Type1Param {
        Type1Param {
            v: self.v.to_float(),
            w: self.w.to_float(),
        }
    }
}

fn square_free(m: u32) -> bool {
    let mut p = 2u32;
    while p.saturating_mul(p) <= m {
        if m % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Parameters `(m, sign, w)` of an odd-family boundary filtration; `m` a
/// square-free positive integer.
#[derive(Clone, Debug)]
pub struct Type2Param {
    m: u32,
    sign: SignChoice,
    w: Scalar,
}

impl Type2Param {
    pub fn new(m: u32, sign: SignChoice, w: Scalar) -> Result<Type2Param> {
        if m == 0 || !square_free(m) {
            return Err(Error::BadParam(format!(
                "odd-family modulus must be a square-free positive integer, got {m}"
            )));
        }
        Ok(Type2Param { m, sign, w })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn sign(&self) -> SignChoice {
        self.sign
    }

    pub fn w(&self) -> &Scalar {
        &self.w
    }
}

// ---------------------------------------------------------------------------
// Even family: closed forms.

/// The displayed boundary data of an even family point.
#[derive(Clone, Debug)]
pub struct Type1Data {
    /// The boundary filtration itself.
    pub f: Filtration,
    /// Its R-split partner `exp(gamma i Im(w) N) F`.
    pub f_hat: Filtration,
    /// The splitting slope `Im w / Im v` (a real scalar).
    pub gamma: Scalar,
    /// Generator of the level-0 piece of the limit bigrading of `f`.
    pub e_gen: Mat,
    /// The limit subspace of the even projection: `Span{e_1, conj(v) e_2 + e_4}`.
    pub p_even_subspace: Subspace,
    /// Columns spanning the zero piece of the two-step boundary orbit at
    /// the R-split point: `conj(xi_1)` and the transported generator.
    pub f_tilde_basis: Mat,
}

fn type1_xis(v: &Scalar, w: &Scalar) -> (Mat, Mat) {
    let b = v.backend();
    let xi0 = col4([zero(b), w.clone(), one(b), zero(b)]);
    let xi1 = col4([w.clone(), v.clone(), zero(b), one(b)]);
    (xi0, xi1)
}

/// All displayed closed forms for an even family point.
pub fn type1_closed_forms(p: &Type1Param) -> Type1Data {
    let backend = p.backend();
    let space = sp4();
    let (v, w) = (p.v().clone(), p.w().clone());
    let i = Scalar::i_unit(backend);
    let (xi0, xi1) = type1_xis(&v, &w);
    let f = full_flag(&xi1, &xi1.hcat(&xi0));
    let gamma = w.im_part() / v.im_part();
    let dir = direction_with_backend(&type1_direction(), backend);
    let shear = dir.exp_scaled(&(&(&gamma * &i) * &w.im_part()));
    let f_hat = f.apply(&shear).expect("shear is invertible");
    let e_gen = xi0.sub(&xi1.scale(&gamma));
    let e_hat = shear.mul(&e_gen);
    let p_even_subspace = space
        .span(
            col4([one(backend), zero(backend), zero(backend), zero(backend)]).hcat(&col4([
                zero(backend),
                v.conj(),
                zero(backend),
                one(backend),
            ])),
        )
        .expect("limit columns are independent");
    let f_tilde_basis = xi1.conj().hcat(&e_hat);
    Type1Data {
        f,
        f_hat,
        gamma,
        e_gen,
        p_even_subspace,
        f_tilde_basis,
    }
}

/// Siegel period matrix of the even two-step orbit at parameter `z`:
/// `[[z - gamma i Im w, conj w], [conj w, conj v]]`.  Requires `Im z > 0`;
/// the imaginary part is positive definite once `Im z` is large enough.
pub fn type1_p_tilde_matrix(p: &Type1Param, z: &Scalar) -> Result<Mat> {
    if z.im_part().real_sign() <= 0 {
        return Err(Error::BadParam(
            "orbit parameter needs positive imaginary part".into(),
        ));
    }
    let backend = if p.backend() == Backend::Float || z.backend() == Backend::Float {
        Backend::Float
    } else {
        Backend::Exact
    };
    let v = p.v().with_backend(backend);
    let w = p.w().with_backend(backend);
    let z = z.with_backend(backend);
    let gamma = w.im_part() / v.im_part();
    let corner = &z - &(&(&gamma * &Scalar::i_unit(backend)) * &w.im_part());
    Ok(Mat::new(
        2,
        2,
        vec![corner, w.conj(), w.conj(), v.conj()],
    ))
}

// ---------------------------------------------------------------------------
// Odd family: closed forms.

/// The displayed boundary data of an odd family point.  Odd-family data is
/// always produced over the float backend because the formulas involve
/// `sqrt(m)`.
#[derive(Clone, Debug)]
pub struct Type2Data {
    /// The boundary filtration itself.
    pub f: Filtration,
    /// Its R-split partner `exp((Im w / 2m) i N) F`.
    pub f_hat: Filtration,
    /// Generator of the `(1,-1)` piece of the R-split bigrading.
    pub xi_hat: Mat,
    /// Generator of the `(-1,1)` piece; proportional to `conj(xi_hat)`.
    pub omega_hat: Mat,
    /// The limit subspace of the odd projection, always `Span{e_1, e_2}`.
    pub p_odd_subspace: Subspace,
}

fn type2_xis(m: u32, sign: SignChoice, w: &Scalar) -> (Mat, Mat) {
    let b = Backend::Float;
    let root = (m as f64).sqrt();
    let si = Scalar::complex(0.0, sign.factor() * root);
    let w = w.to_float();
    let xi0 = col4([-one(b), si.clone(), zero(b), zero(b)]);
    let xi1 = col4([zero(b), w, si, one(b)]);
    (xi0, xi1)
}

/// All displayed closed forms for an odd family point.
pub fn type2_closed_forms(p: &Type2Param) -> Type2Data {
    let b = Backend::Float;
    let space = sp4();
    let (xi0, xi1) = type2_xis(p.m(), p.sign(), p.w());
    let f = full_flag(&xi1, &xi1.hcat(&xi0));
    let im_w = p.w().to_float().im_part();
    let dir = direction_with_backend(&type2_direction(p.m()), b);
    let coeff = &im_w / &Scalar::from_f64(2.0 * p.m() as f64);
    let shear = dir.exp_scaled(&(&coeff * &Scalar::i_unit(b)));
    let f_hat = f.apply(&shear).expect("shear is invertible");
    let xi_hat = shear.mul(&xi1);
    let root = (p.m() as f64).sqrt();
    let omega_hat = xi_hat
        .conj()
        .scale(&Scalar::complex(0.0, -2.0 * p.sign().factor() * root));
    let p_odd_subspace = space
        .span(
            col4([one(b), zero(b), zero(b), zero(b)])
                .hcat(&col4([zero(b), one(b), zero(b), zero(b)])),
        )
        .expect("limit columns are independent");
    Type2Data {
        f,
        f_hat,
        xi_hat,
        omega_hat,
        p_odd_subspace,
    }
}

/// Siegel period matrix of the odd two-step orbit at parameter `z`:
/// `[[-z, s Im w / 2 sqrt(m)], [s Im w / 2 sqrt(m), Re w - m z]]` with the
/// family sign `s`.  Requires `Im z > 0`; the imaginary part is negative
/// definite (the odd chart is the conjugated one).
pub fn type2_p_tilde_matrix(p: &Type2Param, z: &Scalar) -> Result<Mat> {
    if z.im_part().real_sign() <= 0 {
        return Err(Error::BadParam(
            "orbit parameter needs positive imaginary part".into(),
        ));
    }
    let z = z.to_float();
    let w = p.w().to_float();
    let root = (p.m() as f64).sqrt();
    let off = &w.im_part() * &Scalar::from_f64(p.sign().factor() / (2.0 * root));
    let corner = &w.re_part() - &(&Scalar::from_f64(p.m() as f64) * &z);
    Ok(Mat::new(2, 2, vec![-(&z), off.clone(), off, corner]))
}

// ---------------------------------------------------------------------------
// Continuity experiment.

/// A base point for the continuity experiment: one of the two families.
#[derive(Clone, Debug)]
pub enum FamilyPoint {
    TypeI(Type1Param),
    TypeII(Type2Param),
}

/// How the chart perturbations shrink against the orbit radius `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbationMode {
    /// Perturbations shrink like `t^n` (the lawful regime).
    PowerLaw,
    /// No chart perturbation at all; only the orbit coordinate moves.
    Zero,
    /// Perturbations shrink only like `1/sqrt(|log t|)`, slow enough that
    /// the product with `log t` diverges.
    SlowLog,
}

/// A shrinking schedule: exponents for the constrained chart coordinates,
/// the number of radius steps `t_k = 2^{-k}`, the perturbation mode, and
/// the fixed argument of the orbit coordinate.
#[derive(Clone, Debug)]
pub struct Schedule {
    n_exp: u32,
    m_exp: u32,
    steps: usize,
    mode: PerturbationMode,
    theta: f64,
    start: u32,
}

impl Schedule {
    pub fn new(n_exp: u32, m_exp: u32, steps: usize) -> Result<Schedule> {
        if n_exp < 1 || m_exp < 1 {
            return Err(Error::BadParam(
                "schedule exponents must be at least 1".into(),
            ));
        }
        if steps < 10 {
            return Err(Error::BadParam(
                "a schedule needs at least 10 steps".into(),
            ));
        }
        Ok(Schedule {
            n_exp,
            m_exp,
            steps,
            mode: PerturbationMode::PowerLaw,
            theta: 0.0,
            start: 1,
        })
    }

    pub fn with_mode(mut self, mode: PerturbationMode) -> Schedule {
        self.mode = mode;
        self
    }

    /// Fix the argument of the orbit coordinate; must avoid the branch cut,
    /// i.e. lie strictly inside `(-pi, pi)`.
    pub fn with_theta(mut self, theta: f64) -> Result<Schedule> {
        if !theta.is_finite() || theta.abs() >= std::f64::consts::PI {
            return Err(Error::BadParam(
                "orbit argument must lie strictly inside (-pi, pi)".into(),
            ));
        }
        self.theta = theta;
        Ok(self)
    }

    /// First radius exponent: the walk starts at `t = 2^{-start}`.
    pub fn with_start(mut self, start: u32) -> Result<Schedule> {
        if start < 1 {
            return Err(Error::BadParam(
                "schedules start strictly inside the unit disk".into(),
            ));
        }
        self.start = start;
        Ok(self)
    }

    pub fn n_exp(&self) -> u32 {
        self.n_exp
    }

    pub fn m_exp(&self) -> u32 {
        self.m_exp
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn mode(&self) -> PerturbationMode {
        self.mode
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Outcome of a continuity experiment.
#[derive(Clone, Debug)]
pub struct ContinuityReport {
    /// Per-step distance between the projected perturbed point and the
    /// projected unperturbed point, measured in the Siegel chart.
    pub deviations: Vec<f64>,
    /// Whether the tail of the deviation sequence is monotone within the
    /// tolerance and ends below it.
    pub converged: bool,
    /// Height `Im l(z_5)` of the deepest sample evaluated.
    pub y_star: f64,
}

impl ContinuityReport {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().cloned().fold(0.0, f64::max)
    }
}

/// How many trailing samples the convergence verdict inspects.
const CONVERGENCE_TAIL: usize = 5;

/// Multi-radius coordinates of one schedule step.
struct StepCoords {
    z1: Scalar,
    z2: Scalar,
    z3: Scalar,
    z4: Scalar,
}

fn step_coords(family_even: bool, schedule: &Schedule, t: f64) -> StepCoords {
    let b = Backend::Float;
    let zero = Scalar::zero(b);
    let power = |e: u32| Scalar::from_f64(t.powi(e as i32));
    let slow = Scalar::from_f64(0.5 / t.ln().abs().sqrt());
    match (family_even, schedule.mode) {
        (_, PerturbationMode::Zero) => StepCoords {
            z1: zero.clone(),
            z2: zero.clone(),
            z3: zero.clone(),
            z4: zero,
        },
        (true, PerturbationMode::PowerLaw) => StepCoords {
            z1: zero.clone(),
            z2: zero.clone(),
            z3: zero.clone(),
            z4: power(schedule.n_exp),
        },
        (false, PerturbationMode::PowerLaw) => StepCoords {
            z1: power(schedule.n_exp),
            z2: power(schedule.m_exp),
            z3: zero.clone(),
            z4: zero,
        },
        (true, PerturbationMode::SlowLog) => StepCoords {
            z1: zero.clone(),
            z2: zero.clone(),
            z3: zero.clone(),
            z4: slow,
        },
        (false, PerturbationMode::SlowLog) => StepCoords {
            z1: slow.clone(),
            z2: slow,
            z3: zero.clone(),
            z4: zero,
        },
    }
}

/// Walk a shrinking schedule toward the boundary point of `base` and
/// compare, step by step, the boundary projection of the perturbed chart
/// point against the projection of the unperturbed one; both are read off
/// as Siegel period matrices of the matching half of the interior cycle.
///
/// A step whose perturbed point leaves the period domain aborts the walk
/// with `ScheduleViolation` carrying the radius exponent.
pub fn continuity_experiment(
    base: &FamilyPoint,
    schedule: &Schedule,
    tol: f64,
) -> Result<ContinuityReport> {
    if !(tol > 0.0) {
        return Err(Error::BadParam("tolerance must be positive".into()));
    }
    let (dir, xi0, xi1, even_half) = match base {
        FamilyPoint::TypeI(p) => {
            let p = p.to_float();
            let (xi0, xi1) = type1_xis(p.v(), p.w());
            (
                direction_with_backend(&type1_direction(), Backend::Float),
                xi0,
                xi1,
                true,
            )
        }
        FamilyPoint::TypeII(p) => {
            let (xi0, xi1) = type2_xis(p.m(), p.sign(), p.w());
            (
                direction_with_backend(&type2_direction(p.m()), Backend::Float),
                xi0,
                xi1,
                false,
            )
        }
    };
    let base_f = full_flag(&xi1, &xi1.hcat(&xi0));
    let two_pi = std::f64::consts::TAU;
    let mut deviations = Vec::with_capacity(schedule.steps);
    let mut last_height = 0.0;
    for idx in 0..schedule.steps {
        let k = schedule.start as usize + idx;
        let t = 0.5f64.powi(k as i32);
        let coords = step_coords(even_half, schedule, t);
        // l(z_5) = log(z_5) / 2 pi i on the principal branch.
        let ell = Scalar::complex(schedule.theta / two_pi, -t.ln() / two_pi);
        last_height = -t.ln() / two_pi;
        let g = dir.exp_scaled(&ell);
        let theta0;
        let theta1;
        let b = Backend::Float;
        if even_half {
            theta0 = col4([coords.z1.clone(), coords.z2.clone(), zero(b), zero(b)]);
            theta1 = col4([coords.z2.clone(), coords.z3.clone(), zero(b), zero(b)]);
        } else {
            theta0 = col4([zero(b), coords.z2.clone(), coords.z1.clone(), zero(b)]);
            theta1 = col4([zero(b), coords.z3.clone(), coords.z2.clone(), zero(b)]);
        }
        let reference_f = base_f.apply(&g).expect("orbit transport is invertible");
        let reference = match base_cycle(&reference_f) {
            Ok(c) => c,
            Err(_) => return Err(Error::ScheduleViolation(k)),
        };
        // Below the float elimination floor the perturbation is not
        // representable: rank decisions on entries of that size are noise,
        // and flushing them yields exactly the unperturbed flag.  Measure
        // the step as coinciding with the reference instead of feeding the
        // threshold band to the pipeline.
        let z_peak = [&coords.z1, &coords.z2, &coords.z3, &coords.z4]
            .iter()
            .map(|z| z.abs_est())
            .fold(0.0f64, f64::max);
        if z_peak <= 10.0 * crate::tol::eps() {
            deviations.push(0.0);
            continue;
        }
        let a0 = xi0.add(&theta0);
        let a1 = xi1.add(&theta1);
        let top = a1.add(&a0.scale(&coords.z4));
        let fz = full_flag(&top, &a1.hcat(&a0));
        let moved = fz.apply(&g).expect("orbit transport is invertible");
        let perturbed = match base_cycle(&moved) {
            Ok(c) => c,
            Err(_) => return Err(Error::ScheduleViolation(k)),
        };
        let (half_p, half_r) = if even_half {
            (perturbed.v(), reference.v())
        } else {
            (perturbed.w(), reference.w())
        };
        let tau_p = crate::cyclespace::period_matrix(half_p)?;
        let tau_r = crate::cyclespace::period_matrix(half_r)?;
        deviations.push(tau_p.sub(&tau_r).max_abs());
    }
    let tail = CONVERGENCE_TAIL.min(deviations.len());
    let tail_slice = &deviations[deviations.len() - tail..];
    let monotone = tail_slice.windows(2).all(|p| p[1] <= p[0] + tol);
    let small = tail_slice.iter().all(|d| *d < tol);
    Ok(ContinuityReport {
        deviations,
        converged: monotone && small,
        y_star: last_height,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclespace::{f_tilde, p_even, p_odd, period_matrix};
    use crate::degeneration::{deligne_bigrading, r_split_delta, weight_filtration, Parity};
    use crate::hodge::{in_compact_dual, in_period_domain, HodgeNumbers};
    use crate::symplin::subspace_close;

    fn gauss(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Scalar {
        Scalar::gauss(re_n, re_d, im_n, im_d)
    }

    fn cvec(entries: &[(f64, f64)]) -> Mat {
        Mat::new(
            entries.len(),
            1,
            entries
                .iter()
                .map(|&(re, im)| Scalar::complex(re, im))
                .collect(),
        )
    }

    #[test]
    fn chart_points_classify_domain_membership() {
        let i = Scalar::i_unit(Backend::Exact);
        let zero = Scalar::zero(Backend::Exact);
        // tau = diag(i, -i): mixed imaginary part, positive top line.
        let inside = ChartPoint::from_entries(i.clone(), zero.clone(), -(&i), zero.clone()).unwrap();
        assert!(inside.in_domain());
        // tau = diag(i, i): definite imaginary part.
        let outside = ChartPoint::from_entries(i.clone(), zero.clone(), i.clone(), zero.clone()).unwrap();
        assert!(!outside.in_domain());
        // Both land in the compact dual, and the interior test matches the
        // full period-domain test on the flag.
        for (point, want) in [(&inside, true), (&outside, false)] {
            let f = chart_filtration(point);
            let h = HodgeNumbers::from_filtration(&f).unwrap();
            assert!(in_compact_dual(&f, &h));
            assert_eq!(in_period_domain(&f, &h).unwrap(), want);
            assert_eq!(point.in_domain(), want);
        }
        // A tilted float point agrees too.
        let tilted = ChartPoint::from_entries(
            Scalar::complex(0.3, 1.2),
            Scalar::complex(-0.4, 0.1),
            Scalar::complex(0.0, -0.9),
            Scalar::complex(0.25, -0.5),
        )
        .unwrap();
        let f = chart_filtration(&tilted);
        let h = HodgeNumbers::from_filtration(&f).unwrap();
        assert_eq!(tilted.in_domain(), in_period_domain(&f, &h).unwrap());
    }

    #[test]
    fn chart_point_rejects_asymmetric_matrix() {
        let tau = Mat::from_int_rows(&[&[0, 1], &[2, 0]]);
        let err = ChartPoint::new(tau, Scalar::zero(Backend::Exact)).unwrap_err();
        assert!(matches!(err, Error::BadParam(_)));
        let narrow = Mat::from_int_rows(&[&[0, 1, 2], &[1, 0, 3]]);
        let err = ChartPoint::new(narrow, Scalar::zero(Backend::Exact)).unwrap_err();
        assert!(matches!(err, Error::DimMismatch(_)));
    }

    #[test]
    fn classification_hits_all_types() {
        assert_eq!(classify_1111(&type1_direction()), NilType::I);
        assert_eq!(classify_1111(&type2_direction(1)), NilType::II);
        assert_eq!(classify_1111(&type2_direction(5)), NilType::II);
        assert_eq!(classify_1111(&type3_direction()), NilType::III);
        assert_eq!(
            classify_1111(&NilDirection::zero(sp4())),
            NilType::Invalid
        );
        let small = NilDirection::zero(SympSpace::standard(1));
        assert_eq!(classify_1111(&small), NilType::Invalid);
    }

    #[test]
    fn classification_is_conjugation_invariant() {
        // A symplectic coordinate swap: e1 <-> e2, e3 <-> e4.
        let g = Mat::from_int_rows(&[
            &[0, 1, 0, 0],
            &[1, 0, 0, 0],
            &[0, 0, 0, 1],
            &[0, 0, 1, 0],
        ]);
        assert!(sp4().is_symplectic(&g));
        for n in [type1_direction(), type2_direction(3), type3_direction()] {
            let moved = n.conjugated(&g).unwrap();
            assert_eq!(classify_1111(&moved), classify_1111(&n));
        }
    }

    #[test]
    fn family_parameters_validate_their_domains() {
        assert!(Type1Param::new(gauss(0, 1, -1, 1), Scalar::from_int(0)).is_ok());
        let err = Type1Param::new(Scalar::i_unit(Backend::Exact), Scalar::from_int(0)).unwrap_err();
        assert!(matches!(err, Error::BadParam(_)));
        let err = Type1Param::new(Scalar::from_int(1), Scalar::from_int(0)).unwrap_err();
        assert!(matches!(err, Error::BadParam(_)));
        assert!(Type2Param::new(6, SignChoice::Plus, Scalar::from_int(0)).is_ok());
        for bad in [0u32, 4, 12, 18] {
            let err = Type2Param::new(bad, SignChoice::Plus, Scalar::from_int(0)).unwrap_err();
            assert!(matches!(err, Error::BadParam(_)));
        }
    }

    #[test]
    fn even_closed_forms_match_pinned_values() {
        // (v, w) = (-i, 0): no splitting correction at all.
        let p = Type1Param::new(gauss(0, 1, -1, 1), Scalar::from_int(0)).unwrap();
        let d = type1_closed_forms(&p);
        assert!(d.gamma.is_zero());
        assert_eq!(d.f_hat, d.f);
        // The second limit column is i e_2 + e_4.
        let col = col4([
            Scalar::zero(Backend::Exact),
            Scalar::i_unit(Backend::Exact),
            Scalar::zero(Backend::Exact),
            Scalar::one(Backend::Exact),
        ]);
        let want_exact = sp4().span(Mat::col_from_ints(&[1, 0, 0, 0]).hcat(&col)).unwrap();
        assert!(d.p_even_subspace.equals(&want_exact));

        // (v, w) = (-i, 1+2i): slope -2, generator (2+4i, 1, 1, 2).
        let p = Type1Param::new(gauss(0, 1, -1, 1), gauss(1, 1, 2, 1)).unwrap();
        let d = type1_closed_forms(&p);
        assert!(d.gamma.eq_exact(&Scalar::from_int(-2)));
        let e_want = col4([
            gauss(2, 1, 4, 1),
            Scalar::one(Backend::Exact),
            Scalar::one(Backend::Exact),
            Scalar::from_int(2),
        ]);
        assert!(d.e_gen.sub(&e_want).is_zero());
        // F_hat = exp(-4 i N) F for these parameters.
        let shear = type1_direction().exp_scaled(&gauss(0, 1, -4, 1));
        assert_eq!(d.f_hat, d.f.apply(&shear).unwrap());
        // Real w collapses the slope.
        let p = Type1Param::new(gauss(3, 1, -2, 1), Scalar::from_int(7)).unwrap();
        assert!(type1_closed_forms(&p).gamma.is_zero());
    }

    #[test]
    fn even_closed_forms_match_general_pipeline() {
        let n = type1_direction();
        for (v, w) in [
            (gauss(0, 1, -1, 1), gauss(1, 1, 2, 1)),
            (gauss(1, 2, -2, 1), gauss(-1, 1, 1, 3)),
        ] {
            let p = Type1Param::new(v, w).unwrap();
            let d = type1_closed_forms(&p);
            let rs = r_split_delta(&n, &d.f).unwrap();
            assert_eq!(d.f_hat, rs.f_hat);
            // delta = -gamma Im(w) N.
            let want_delta = n
                .mat()
                .scale(&-(&(&d.gamma * &p.w().im_part())));
            assert!(rs.delta.sub(&want_delta).is_zero());
            // e generates the level-0 piece of the limit bigrading of F.
            let big = deligne_bigrading(&weight_filtration(&n), &d.f).unwrap();
            let piece = big.piece(0, 0);
            assert_eq!(piece.dim(), 1);
            assert!(piece.contains_vec(&d.e_gen));
            // The even projection reproduces the displayed subspace.
            let sat = p_even(&n, &d.f).unwrap();
            assert!(sat.u().equals(&d.p_even_subspace));
            // The displayed orbit basis spans the zero piece at the R-split
            // point, and its shear by (1 + i delta) is the zero piece at F.
            let span = sp4().span(d.f_tilde_basis.clone()).unwrap();
            let at_hat = f_tilde(&n, &d.f_hat, Parity::Even).unwrap();
            assert!(span.equals(at_hat.f0()));
            let transport = Mat::identity(4, Backend::Exact)
                .add(&rs.delta.scale(&Scalar::i_unit(Backend::Exact)));
            let at_f = f_tilde(&n, &d.f, Parity::Even).unwrap();
            assert!(span.image(&transport).unwrap().equals(at_f.f0()));
        }
    }

    #[test]
    fn even_period_matrix_matches_pinned_values() {
        let p = Type1Param::new(gauss(0, 1, -1, 1), Scalar::from_int(0)).unwrap();
        let m = type1_p_tilde_matrix(&p, &Scalar::i_unit(Backend::Exact)).unwrap();
        let want = Mat::identity(2, Backend::Exact).scale(&Scalar::i_unit(Backend::Exact));
        assert!(m.sub(&want).is_zero());
        // Real w leaves the corner entry at exactly z.
        let p = Type1Param::new(gauss(2, 1, -3, 1), Scalar::from_int(5)).unwrap();
        let z = gauss(1, 3, 2, 1);
        let m = type1_p_tilde_matrix(&p, &z).unwrap();
        assert!(m.get(0, 0).eq_exact(&z));
        // Imaginary part positive definite high on the orbit.
        let p = Type1Param::new(gauss(0, 1, -1, 1), gauss(1, 1, 1, 1)).unwrap();
        let m = type1_p_tilde_matrix(&p, &gauss(0, 1, 10, 1)).unwrap();
        let im = m.map(|s| s.im_part());
        let det = &(im.get(0, 0) * im.get(1, 1)) - &(im.get(0, 1) * im.get(1, 0));
        assert_eq!(im.get(0, 0).real_sign(), 1);
        assert_eq!(det.real_sign(), 1);
        // Lower half-plane parameters are rejected.
        let err = type1_p_tilde_matrix(&p, &gauss(0, 1, -1, 1)).unwrap_err();
        assert!(matches!(err, Error::BadParam(_)));
    }

    #[test]
    fn even_period_matrix_is_the_orbit_chart() {
        let p = Type1Param::new(gauss(0, 1, -1, 1), gauss(1, 1, 2, 1)).unwrap();
        let d = type1_closed_forms(&p);
        let z = gauss(1, 2, 3, 1);
        let matrix = type1_p_tilde_matrix(&p, &z).unwrap();
        let moved = sp4()
            .span(d.f_tilde_basis.clone())
            .unwrap()
            .image(&type1_direction().exp_scaled(&z))
            .unwrap();
        let tau = period_matrix(&moved).unwrap();
        assert!(tau.sub(&matrix).is_zero());
        // Moving along the orbit touches only the corner entry.
        let z2 = gauss(-1, 1, 1, 1);
        let other = type1_p_tilde_matrix(&p, &z2).unwrap();
        let diff = matrix.sub(&other);
        assert!(diff.get(0, 0).eq_exact(&(&z - &z2)));
        assert!(diff.get(0, 1).is_zero());
        assert!(diff.get(1, 0).is_zero());
        assert!(diff.get(1, 1).is_zero());
    }

    #[test]
    fn odd_closed_forms_match_pinned_values() {
        let p = Type2Param::new(1, SignChoice::Plus, Scalar::complex(3.0, 7.0)).unwrap();
        let d = type2_closed_forms(&p);
        let xi_want = cvec(&[(3.5, 0.0), (3.0, 3.5), (0.0, 1.0), (1.0, 0.0)]);
        assert!(d.xi_hat.approx_eq(&xi_want, 1e-12));
        let omega_want = cvec(&[(0.0, -7.0), (-7.0, -6.0), (-2.0, 0.0), (0.0, -2.0)]);
        assert!(d.omega_hat.approx_eq(&omega_want, 1e-12));
        let plane = sp4().span_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]).to_float();
        assert!(d.p_odd_subspace.equals(&plane));
        // Real w: no splitting correction.
        let p = Type2Param::new(3, SignChoice::Minus, Scalar::from_int(2)).unwrap();
        let d = type2_closed_forms(&p);
        for piece in [1, 0, -1, -2] {
            assert!(subspace_close(
                &d.f_hat.piece(piece),
                &d.f.piece(piece),
                1e-12
            ));
        }
        // (m, +, i): shear coefficient Im(w)/2m = 1/(2m).
        let m = 3u32;
        let p = Type2Param::new(m, SignChoice::Plus, Scalar::i_unit(Backend::Exact)).unwrap();
        let d = type2_closed_forms(&p);
        let coeff = Scalar::complex(0.0, 1.0 / (2.0 * m as f64));
        let shear = direction_with_backend(&type2_direction(m), Backend::Float).exp_scaled(&coeff);
        let want = d.f.apply(&shear).unwrap();
        for piece in [1, 0, -1, -2] {
            assert!(subspace_close(&d.f_hat.piece(piece), &want.piece(piece), 1e-12));
        }
    }

    #[test]
    fn odd_closed_forms_match_general_pipeline() {
        for (m, sign, w) in [
            (1u32, SignChoice::Plus, Scalar::complex(3.0, 7.0)),
            (5, SignChoice::Minus, Scalar::complex(2.0, -1.0)),
        ] {
            let p = Type2Param::new(m, sign, w).unwrap();
            let d = type2_closed_forms(&p);
            let n = direction_with_backend(&type2_direction(m), Backend::Float);
            let rs = r_split_delta(&n, &d.f).unwrap();
            for piece in [1, 0, -1, -2] {
                assert!(subspace_close(
                    &d.f_hat.piece(piece),
                    &rs.f_hat.piece(piece),
                    1e-9
                ));
            }
            let big = deligne_bigrading(&weight_filtration(&n), &d.f_hat).unwrap();
            let up = big.piece(1, -1);
            assert_eq!(up.dim(), 1);
            assert!(up.contains_vec(&d.xi_hat));
            let down = big.piece(-1, 1);
            assert_eq!(down.dim(), 1);
            assert!(down.contains_vec(&d.omega_hat));
            let sat = p_odd(&n, &d.f).unwrap();
            assert!(sat.u().equals(&d.p_odd_subspace));
            // The two generators span the zero piece of the boundary orbit
            // at the R-split point.
            let span = sp4().span(d.xi_hat.hcat(&d.omega_hat)).unwrap();
            let orbit = f_tilde(&n, &d.f_hat, Parity::Odd).unwrap();
            assert!(span.equals(orbit.f0()));
        }
    }

    #[test]
    fn odd_period_matrix_matches_pinned_values() {
        let p = Type2Param::new(1, SignChoice::Plus, Scalar::from_int(0)).unwrap();
        let m = type2_p_tilde_matrix(&p, &Scalar::i_unit(Backend::Exact)).unwrap();
        let want = Mat::identity(2, Backend::Float).scale(&Scalar::complex(0.0, -1.0));
        assert!(m.approx_eq(&want, 1e-12));
        // The orbit direction acts by -(z - z') diag(1, m).
        let p = Type2Param::new(5, SignChoice::Minus, Scalar::complex(1.0, 4.0)).unwrap();
        let z1 = Scalar::complex(0.0, 2.0);
        let z2 = Scalar::complex(0.5, 1.0);
        let diff = type2_p_tilde_matrix(&p, &z1)
            .unwrap()
            .sub(&type2_p_tilde_matrix(&p, &z2).unwrap());
        let step = &z1 - &z2;
        assert!(diff.get(0, 0).approx_eq(&-(&step), 1e-12));
        assert!(diff.get(1, 1).approx_eq(&(&Scalar::from_f64(-5.0) * &step), 1e-12));
        assert!(diff.get(0, 1).abs_est() < 1e-12);
        // Imaginary part negative definite: this is the conjugated chart.
        let p = Type2Param::new(3, SignChoice::Minus, Scalar::complex(1.0, 4.0)).unwrap();
        let m = type2_p_tilde_matrix(&p, &Scalar::complex(0.0, 2.0)).unwrap();
        assert!(m.get(0, 0).im_part().real_sign() < 0);
        assert!(m.get(1, 1).im_part().real_sign() < 0);
        assert!(m.get(0, 1).im_part().abs_est() < 1e-12);
        let err = type2_p_tilde_matrix(&p, &Scalar::complex(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::BadParam(_)));
    }

    #[test]
    fn odd_period_matrix_is_the_orbit_chart() {
        let p = Type2Param::new(3, SignChoice::Minus, Scalar::complex(2.0, -1.0)).unwrap();
        let d = type2_closed_forms(&p);
        let z = Scalar::complex(1.0, 2.0);
        let matrix = type2_p_tilde_matrix(&p, &z).unwrap();
        let n = direction_with_backend(&type2_direction(3), Backend::Float);
        let moved = sp4()
            .span(d.xi_hat.hcat(&d.omega_hat))
            .unwrap()
            .image(&n.exp_scaled(&z))
            .unwrap();
        let tau = period_matrix(&moved).unwrap();
        assert!(tau.approx_eq(&matrix, 1e-9));
    }

    #[test]
    fn schedules_validate_their_inputs() {
        assert!(Schedule::new(2, 1, 20).is_ok());
        assert!(matches!(
            Schedule::new(0, 1, 20).unwrap_err(),
            Error::BadParam(_)
        ));
        assert!(matches!(
            Schedule::new(1, 0, 20).unwrap_err(),
            Error::BadParam(_)
        ));
        assert!(matches!(
            Schedule::new(2, 2, 5).unwrap_err(),
            Error::BadParam(_)
        ));
        assert!(matches!(
            Schedule::new(2, 2, 20).unwrap().with_theta(4.0).unwrap_err(),
            Error::BadParam(_)
        ));
        assert!(matches!(
            Schedule::new(2, 2, 20).unwrap().with_start(0).unwrap_err(),
            Error::BadParam(_)
        ));
    }

    #[test]
    fn lawful_even_schedule_converges() {
        let base = FamilyPoint::TypeI(
            Type1Param::new(gauss(0, 1, -1, 1), Scalar::from_int(0)).unwrap(),
        );
        let schedule = Schedule::new(2, 1, 20)
            .unwrap()
            .with_theta(std::f64::consts::FRAC_PI_3)
            .unwrap();
        let report = continuity_experiment(&base, &schedule, 1e-6).unwrap();
        assert!(report.converged, "deviations: {:?}", report.deviations);
        assert!(*report.deviations.last().unwrap() < 1e-6);
        assert!(report.y_star > 2.0);
    }

    #[test]
    fn lawful_even_schedule_converges_with_split_defect() {
        // A base point whose R-split partner differs from itself.  The top
        // vector stays positive only once z4 < 1/(2 Im w) = 1/4, so the
        // walk starts one step in.
        let base = FamilyPoint::TypeI(
            Type1Param::new(gauss(0, 1, -1, 1), gauss(1, 1, 2, 1)).unwrap(),
        );
        let schedule = Schedule::new(2, 1, 15).unwrap().with_start(2).unwrap();
        let report = continuity_experiment(&base, &schedule, 1e-4).unwrap();
        assert!(report.converged, "deviations: {:?}", report.deviations);
    }

    #[test]
    fn lawful_odd_schedule_converges() {
        // The full-flag orbit of this point enters the domain once
        // Im l > Im w / (2m) = 1/4, i.e. from radius exponent 3 on.
        let base = FamilyPoint::TypeII(
            Type2Param::new(2, SignChoice::Plus, Scalar::complex(1.0, 1.0)).unwrap(),
        );
        let schedule = Schedule::new(2, 2, 20).unwrap().with_start(3).unwrap();
        let report = continuity_experiment(&base, &schedule, 1e-6).unwrap();
        assert!(report.converged, "deviations: {:?}", report.deviations);
    }

    #[test]
    fn zero_perturbation_gives_vanishing_deviation() {
        let base = FamilyPoint::TypeI(
            Type1Param::new(gauss(0, 1, -1, 1), Scalar::from_int(0)).unwrap(),
        );
        let schedule = Schedule::new(1, 1, 12)
            .unwrap()
            .with_mode(PerturbationMode::Zero);
        let report = continuity_experiment(&base, &schedule, 1e-9).unwrap();
        assert!(report.converged);
        assert!(report.max_deviation() < 1e-9, "deviations: {:?}", report.deviations);
    }

    #[test]
    fn slow_log_schedule_fails_to_converge() {
        let base = FamilyPoint::TypeI(
            Type1Param::new(gauss(0, 1, -1, 1), Scalar::from_int(0)).unwrap(),
        );
        let schedule = Schedule::new(1, 1, 20)
            .unwrap()
            .with_mode(PerturbationMode::SlowLog);
        let report = continuity_experiment(&base, &schedule, 1e-6).unwrap();
        assert!(!report.converged, "deviations: {:?}", report.deviations);
        // The drift genuinely grows toward the boundary.
        let first = report.deviations[0];
        let last = *report.deviations.last().unwrap();
        assert!(last > first);
    }
}
