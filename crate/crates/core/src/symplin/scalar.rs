//! Scalars: exact Gaussian rationals `Q(i)` and complex double floats.
//!
//! A [`Scalar`] is either `Exact` (a pair of exact rationals) or `Float`
//! (a `Complex64`).  Mixed arithmetic promotes to `Float`.  Exact parts are
//! [`Rat`] values: reduced word-sized fractions that spill into
//! arbitrary precision only when a result leaves the `i64` range.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::ToPrimitive;
use num::{BigInt, Signed, Zero};

use crate::error::Error;
use crate::tol;

/// Which arithmetic a scalar (or matrix) lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

/// An exact rational number.
///
/// Values are stored as reduced `i64` fractions with positive denominator
/// while they fit (the overwhelmingly common case here), and spill into a
/// boxed [`BigRational`] otherwise.  Every constructor canonicalizes — a
/// spilled value never fits back in the small form — so the derived
/// structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(Repr);

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Small { n: i64, d: i64 },
    Big(Box<BigRational>),
}

/// The small form excludes `i64::MIN` so negation can never overflow.
const SMALL_MAX: i128 = i64::MAX as i128;
const SMALL_MIN: i128 = -SMALL_MAX;

/// Reduce `n/d` (exact `i128` intermediates) and pick the storage form.
fn reduce128(mut n: i128, mut d: i128) -> Rat {
    assert!(d != 0, "division by zero rational");
    if d < 0 {
        n = -n;
        d = -d;
    }
    if n == 0 {
        return Rat::zero();
    }
    let g = num::integer::gcd(n.unsigned_abs(), d as u128) as i128;
    let (n, d) = (n / g, d / g);
    if (SMALL_MIN..=SMALL_MAX).contains(&n) && d <= SMALL_MAX {
        Rat(Repr::Small { n: n as i64, d: d as i64 })
    } else {
        Rat(Repr::Big(Box::new(BigRational::new(
            BigInt::from(n),
            BigInt::from(d),
        ))))
    }
}

impl Rat {
    pub fn zero() -> Self {
        Rat(Repr::Small { n: 0, d: 1 })
    }

    pub fn one() -> Self {
        Rat(Repr::Small { n: 1, d: 1 })
    }

    pub fn from_i64(n: i64) -> Self {
        Rat(Repr::Small { n, d: 1 })
    }

    /// Exact `n/d`; panics if `d == 0`.
    pub fn from_frac(n: i64, d: i64) -> Self {
        reduce128(n as i128, d as i128)
    }

    /// Canonicalize an arbitrary-precision rational (demoting if it fits).
    pub fn from_big(b: BigRational) -> Self {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) if n > i64::MIN => Rat(Repr::Small { n, d }),
            _ => Rat(Repr::Big(Box::new(b))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { n, d } => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { n: 0, .. })
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { d, .. } => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    /// -1, 0, +1.
    pub fn sign(&self) -> i32 {
        match &self.0 {
            Repr::Small { n, .. } => n.signum() as i32,
            Repr::Big(b) => {
                if b.is_zero() {
                    0
                } else if b.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    /// Best-effort conversion; magnitudes here stay far below f64 range.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { n, d } => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or_else(|| {
                if b.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
        }
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (&Repr::Small { n: n1, d: d1 }, &Repr::Small { n: n2, d: d2 }) => {
                let (n1, d1, n2, d2) = (n1 as i128, d1 as i128, n2 as i128, d2 as i128);
                reduce128(n1 * d2 + n2 * d1, d1 * d2)
            }
            _ => Rat::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (&Repr::Small { n: n1, d: d1 }, &Repr::Small { n: n2, d: d2 }) => {
                let (n1, d1, n2, d2) = (n1 as i128, d1 as i128, n2 as i128, d2 as i128);
                reduce128(n1 * d2 - n2 * d1, d1 * d2)
            }
            _ => Rat::from_big(self.to_big() - rhs.to_big()),
        }
    }
}

impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (&Repr::Small { n: n1, d: d1 }, &Repr::Small { n: n2, d: d2 }) => {
                reduce128(n1 as i128 * n2 as i128, d1 as i128 * d2 as i128)
            }
            _ => Rat::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero rational");
        match (&self.0, &rhs.0) {
            (&Repr::Small { n: n1, d: d1 }, &Repr::Small { n: n2, d: d2 }) => {
                reduce128(n1 as i128 * d2 as i128, d1 as i128 * n2 as i128)
            }
            _ => Rat::from_big(self.to_big() / rhs.to_big()),
        }
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            // Canonical small values never hold i64::MIN, so `-n` is safe,
            // and negating a reduced fraction keeps it reduced.
            &Repr::Small { n, d } => Rat(Repr::Small { n: -n, d }),
            Repr::Big(b) => Rat(Repr::Big(Box::new(-(**b).clone()))),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -(&self)
    }
}

impl FromStr for Rat {
    type Err = num::rational::ParseRatioError;
    /// Accepts the same `p/q` (or bare `p`) forms as [`BigRational`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BigRational::from_str(s).map(Rat::from_big)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { n, d } => {
                if *d == 1 {
                    write!(f, "{n}")
                } else {
                    write!(f, "{n}/{d}")
                }
            }
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

/// A Gaussian rational `re + im*i` with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussRational {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRational {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRational { re, im }
    }

    pub fn zero() -> Self {
        GaussRational::new(Rat::zero(), Rat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRational::new(self.re.clone(), -&self.im)
    }

    /// `|z|^2` as a rational.
    pub fn norm_sq(&self) -> Rat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn mul(&self, o: &GaussRational) -> GaussRational {
        GaussRational::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }

    fn div(&self, o: &GaussRational) -> GaussRational {
        let d = o.norm_sq();
        assert!(!d.is_zero(), "division by zero Gaussian rational");
        let num = self.mul(&o.conj());
        GaussRational::new(&num.re / &d, &num.im / &d)
    }
}

/// A scalar in one of the two arithmetic backends.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(GaussRational),
    Float(Complex64),
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(GaussRational::zero()),
            Backend::Float => Scalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(backend: Backend) -> Self {
        Scalar::from_int(1).with_backend(backend)
    }

    /// The imaginary unit.
    pub fn i_unit(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(GaussRational::new(Rat::zero(), Rat::one())),
            Backend::Float => Scalar::Float(Complex64::new(0.0, 1.0)),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(GaussRational::new(Rat::from_i64(v), Rat::zero()))
    }

    /// Exact rational `num/den`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Scalar::Exact(GaussRational::new(Rat::from_frac(num, den), Rat::zero()))
    }

    /// Exact Gaussian rational from integer pairs `(re_n/re_d, im_n/im_d)`.
    pub fn gauss(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Self {
        assert!(re_d != 0 && im_d != 0);
        Scalar::Exact(GaussRational::new(
            Rat::from_frac(re_n, re_d),
            Rat::from_frac(im_n, im_d),
        ))
    }

    /// Parse exact parts from `p/q` strings.
    pub fn exact_from_strs(re: &str, im: &str) -> Result<Self, Error> {
        let re = Rat::from_str(re.trim())
            .map_err(|e| Error::BadParam(format!("bad rational {re:?}: {e}")))?;
        let im = Rat::from_str(im.trim())
            .map_err(|e| Error::BadParam(format!("bad rational {im:?}: {e}")))?;
        Ok(Scalar::Exact(GaussRational::new(re, im)))
    }

    pub fn from_f64(re: f64) -> Self {
        Scalar::Float(Complex64::new(re, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Scalar::Float(z)
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_c64(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_c64())
    }

    pub fn with_backend(&self, backend: Backend) -> Scalar {
        match (backend, self) {
            (Backend::Float, s) => s.to_float(),
            (Backend::Exact, Scalar::Exact(_)) => self.clone(),
            (Backend::Exact, Scalar::Float(_)) => {
                panic!("cannot demote a float scalar to the exact backend")
            }
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// Real part, staying in the same backend.
    pub fn re_part(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussRational::new(g.re.clone(), Rat::zero())),
            Scalar::Float(z) => Scalar::Float(Complex64::new(z.re, 0.0)),
        }
    }

    /// Imaginary part (as a real scalar), staying in the same backend.
    pub fn im_part(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussRational::new(g.im.clone(), Rat::zero())),
            Scalar::Float(z) => Scalar::Float(Complex64::new(z.im, 0.0)),
        }
    }

    /// `|z|^2` as a real scalar in the same backend.
    pub fn norm_sq(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussRational::new(g.norm_sq(), Rat::zero())),
            Scalar::Float(z) => Scalar::Float(Complex64::new(z.norm_sqr(), 0.0)),
        }
    }

    /// Magnitude estimate used only for float pivoting/thresholds.
    pub fn abs_est(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Exact zero for the exact backend, `|z| <= thresh` for floats.
    pub fn is_zero_thresh(&self, thresh: f64) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(z) => z.norm() <= thresh,
        }
    }

    /// Zero test with the global tolerance as absolute float threshold.
    pub fn is_zero(&self) -> bool {
        self.is_zero_thresh(tol::eps())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Is this scalar (numerically) real?
    pub fn is_real(&self) -> bool {
        self.im_part().is_zero()
    }

    /// Sign of a real scalar: -1, 0, +1 (float: against the global eps).
    pub fn real_sign(&self) -> i32 {
        match self {
            Scalar::Exact(g) => {
                debug_assert!(g.im.is_zero(), "real_sign on a non-real scalar");
                g.re.sign()
            }
            Scalar::Float(z) => {
                if z.re > tol::eps() {
                    1
                } else if z.re < -tol::eps() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    /// Sign of a real scalar against an explicit threshold.
    pub fn real_sign_thresh(&self, thresh: f64) -> i32 {
        match self {
            Scalar::Exact(_) => self.real_sign(),
            Scalar::Float(z) => {
                if z.re > thresh {
                    1
                } else if z.re < -thresh {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn recip(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => {
                Scalar::Exact(GaussRational::new(Rat::one(), Rat::zero()).div(g))
            }
            Scalar::Float(z) => Scalar::Float(z.inv()),
        }
    }

    /// Structural equality in exact mode, `|a-b| <= tol` in float mode.
    pub fn approx_eq(&self, other: &Scalar, tol_abs: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_c64() - other.to_c64()).norm() <= tol_abs,
        }
    }

    pub fn eq_exact(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => panic!("eq_exact on float scalars"),
        }
    }
}

fn bin<FE, FF>(a: &Scalar, b: &Scalar, fe: FE, ff: FF) -> Scalar
where
    FE: Fn(&GaussRational, &GaussRational) -> GaussRational,
    FF: Fn(Complex64, Complex64) -> Complex64,
{
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(fe(x, y)),
        _ => Scalar::Float(ff(a.to_c64(), b.to_c64())),
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        bin(
            self,
            rhs,
            |a, b| GaussRational::new(&a.re + &b.re, &a.im + &b.im),
            |a, b| a + b,
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        bin(
            self,
            rhs,
            |a, b| GaussRational::new(&a.re - &b.re, &a.im - &b.im),
            |a, b| a - b,
        )
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        bin(self, rhs, GaussRational::mul, |a, b| a * b)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        bin(self, rhs, GaussRational::div, |a, b| a / b)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussRational::new(-&g.re, -&g.im)),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

macro_rules! owned_ops {
    ($($trait:ident, $m:ident);*) => {$(
        impl $trait for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add, add; Sub, sub; Mul, mul; Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(&self)
    }
}

/// Equality is exact structural equality for exact scalars and tolerance-free
/// bitwise equality for floats; use [`Scalar::approx_eq`] for fuzzy checks.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => write!(f, "{}+{}i", g.re, g.im),
            Scalar::Float(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}
