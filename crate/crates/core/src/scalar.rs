//! Coefficient fields for jets.
//!
//! Two instantiations are provided: [`GaussianRational`] (exact, pairs of
//! arbitrary-precision rationals) and [`Complex64`] (double precision).
//! A computation fixes one of them through the type parameter of [`Jet`].
//!
//! [`Jet`]: crate::jet::Jet

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Scalar field used for jet coefficients.
pub trait Coefficient:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    /// `true` when field operations are exact.
    const EXACT: bool;
    /// Short tag used in serialized output ("exact" or "float").
    const MODE: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn mul_ref(&self, other: &Self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn conj(&self) -> Self;
    fn imag_unit() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_big_ratio(re: &BigRational, im: &BigRational) -> Self;
    /// Float mode converts directly; exact mode uses a small-denominator
    /// rational approximation of each part.
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;
    fn exp(&self) -> Option<Self>;
    fn ln(&self) -> Option<Self>;
    /// Real and strictly positive (within rounding in float mode).
    fn is_positive_real(&self) -> bool;
    /// Pivot quality used by elimination; larger is better, 0 means unusable.
    fn pivot_weight(&self) -> f64;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Equality up to `tol` relative to the larger magnitude; exact mode
    /// ignores the tolerance.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            return self == other;
        }
        let a = self.to_c64();
        let b = other.to_c64();
        (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
    }
}

/// Exact complex rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

fn approx_rational(x: f64) -> BigRational {
    if x == 0.0 {
        return BigRational::zero();
    }
    if let Some(r) = Ratio::<i64>::approximate_float(x) {
        if (r.to_f64().unwrap_or(f64::NAN) - x).abs() <= 1e-15 * x.abs() {
            return BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
        }
    }
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "({} - {}i)", self.re, -&self.im)
        } else {
            write!(f, "({} + {}i)", self.re, self.im)
        }
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_ref(&o)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl<'a> AddAssign<&'a GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &'a GaussianRational) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl<'a> SubAssign<&'a GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &'a GaussianRational) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl<'a> MulAssign<&'a GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, o: &'a GaussianRational) {
        *self = self.mul_ref(o);
    }
}

impl Coefficient for GaussianRational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul_ref(&self, o: &Self) -> Self {
        // real operands are the common case; skip the cross terms
        match (self.im.is_zero(), o.im.is_zero()) {
            (true, true) => Self::real(&self.re * &o.re),
            (true, false) => Self::new(&self.re * &o.re, &self.re * &o.im),
            (false, true) => Self::new(&self.re * &o.re, &self.im * &o.re),
            (false, false) => Self::new(
                &self.re * &o.re - &self.im * &o.im,
                &self.re * &o.im + &self.im * &o.re,
            ),
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Self::new(&self.re / &norm, -&self.im / &norm))
    }

    fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    fn imag_unit() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(num.into(), den.into()))
    }

    fn from_big_ratio(re: &BigRational, im: &BigRational) -> Self {
        Self::new(re.clone(), im.clone())
    }

    fn from_c64(z: Complex64) -> Self {
        Self::new(approx_rational(z.re), approx_rational(z.im))
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn exp(&self) -> Option<Self> {
        self.is_zero().then(Self::one)
    }

    fn ln(&self) -> Option<Self> {
        (*self == Self::one()).then(Self::zero)
    }

    fn is_positive_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }

    fn pivot_weight(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

impl Coefficient for Complex64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }

    fn inv(&self) -> Option<Self> {
        (!Coefficient::is_zero(self)).then(|| Complex64::new(1.0, 0.0) / self)
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn from_big_ratio(re: &BigRational, im: &BigRational) -> Self {
        Complex64::new(
            re.to_f64().unwrap_or(f64::NAN),
            im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn from_c64(z: Complex64) -> Self {
        z
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn exp(&self) -> Option<Self> {
        Some(Complex64::exp(*self))
    }

    fn ln(&self) -> Option<Self> {
        (!Coefficient::is_zero(self)).then(|| Complex64::ln(*self))
    }

    fn is_positive_real(&self) -> bool {
        self.re > 0.0 && self.im.abs() <= 1e-12 * self.re.max(1.0)
    }

    fn pivot_weight(&self) -> f64 {
        self.norm()
    }
}
