//! Extended-precision scalars and complex numbers.
//!
//! All heavy numerics run on MPFR floats via `rug`. Precision is threaded
//! explicitly through a [`PrecisionContext`]; nothing in this crate depends on
//! a global rounding mode or precision default. Complex arithmetic is a thin
//! [`Cx`] struct over two `Float`s, kept deliberately small so hot loops can
//! fuse operations by hand where it matters.

use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::{NegAssign, Pow};
use rug::{Assign, Float, Rational};

/// Working-precision contract shared by quadrature, orthogonalization, and
/// eigenvalue extraction.
///
/// Invariants enforced by [`PrecisionContext::validate`]:
/// * `precision_bits >= 128`,
/// * `quad_degree >= 2 * requested polynomial degree + 2` (checked at use),
/// * both tolerances are at least `2^(-precision_bits/2)`.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    pub precision_bits: u32,
    pub quad_degree: u32,
    pub ortho_tol: Float,
    pub eig_tol: Float,
}

pub const MIN_PRECISION_BITS: u32 = 128;
pub const DEFAULT_PRECISION_BITS: u32 = 1024;

impl PrecisionContext {
    /// Context sized for building polynomials up to degree `n_max`:
    /// quadrature exactness degree `2*n_max + 8` and tolerances at the
    /// half-precision floor.
    pub fn for_degree(precision_bits: u32, n_max: usize) -> Result<Self> {
        let quad_degree = 2 * u32::try_from(n_max)
            .map_err(|_| Error::InvalidConfig("degree too large".into()))?
            + 8;
        Self::with_quad_degree(precision_bits, quad_degree)
    }

    /// Context with an explicit per-cell quadrature exactness degree.
    pub fn with_quad_degree(precision_bits: u32, quad_degree: u32) -> Result<Self> {
        let floor = Self::tolerance_floor(precision_bits);
        let ctx = PrecisionContext {
            precision_bits,
            quad_degree,
            ortho_tol: floor.clone(),
            eig_tol: floor,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    /// `2^(-bits/2)`, the smallest meaningful tolerance at `bits` of
    /// precision: squared conditioning of the discrete Gram inner products
    /// eats about half the mantissa.
    pub fn tolerance_floor(bits: u32) -> Float {
        Float::with_val(64, 1u32) >> (bits / 2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < MIN_PRECISION_BITS {
            return Err(Error::InvalidConfig(format!(
                "precision_bits {} below minimum {}",
                self.precision_bits, MIN_PRECISION_BITS
            )));
        }
        let floor = Self::tolerance_floor(self.precision_bits);
        if self.ortho_tol < floor || self.eig_tol < floor {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be at least 2^-{}",
                self.precision_bits / 2
            )));
        }
        if !self.ortho_tol.is_finite() || !self.eig_tol.is_finite() {
            return Err(Error::InvalidConfig("tolerances must be finite".into()));
        }
        Ok(())
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.precision_bits, v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.precision_bits, Constant::Pi)
    }

    pub fn cx(&self, re: f64, im: f64) -> Cx {
        Cx::from_f64(re, im, self.precision_bits)
    }

    pub fn cx_zero(&self) -> Cx {
        Cx::zero(self.precision_bits)
    }
}

/// Complex number over two MPFR floats of equal precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Cx {
    pub re: Float,
    pub im: Float,
}

impl Cx {
    pub fn zero(prec: u32) -> Self {
        Cx {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Cx {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        debug_assert_eq!(re.prec(), im.prec());
        Cx { re, im }
    }

    pub fn real(v: Float) -> Self {
        let prec = v.prec();
        Cx {
            re: v,
            im: Float::new(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Cx {
        let mut im = self.im.clone();
        im.neg_assign();
        Cx {
            re: self.re.clone(),
            im,
        }
    }

    pub fn neg(&self) -> Cx {
        let mut out = self.clone();
        out.re.neg_assign();
        out.im.neg_assign();
        out
    }

    pub fn add(&self, o: &Cx) -> Cx {
        let mut out = self.clone();
        out.re += &o.re;
        out.im += &o.im;
        out
    }

    pub fn sub(&self, o: &Cx) -> Cx {
        let mut out = self.clone();
        out.re -= &o.re;
        out.im -= &o.im;
        out
    }

    pub fn mul(&self, o: &Cx) -> Cx {
        let prec = self.prec();
        let mut re = Float::new(prec);
        let mut im = Float::new(prec);
        re.assign(self.re.mul_sub_mul_ref(&o.re, &self.im, &o.im));
        im.assign(self.re.mul_add_mul_ref(&o.im, &self.im, &o.re));
        Cx { re, im }
    }

    pub fn scale(&self, s: &Float) -> Cx {
        let mut out = self.clone();
        out.re *= s;
        out.im *= s;
        out
    }

    pub fn div(&self, o: &Cx) -> Cx {
        let prec = self.prec();
        let mut den = Float::new(prec);
        den.assign(o.re.mul_add_mul_ref(&o.re, &o.im, &o.im));
        let mut re = Float::new(prec);
        let mut im = Float::new(prec);
        re.assign(self.re.mul_add_mul_ref(&o.re, &self.im, &o.im));
        im.assign(self.im.mul_sub_mul_ref(&o.re, &self.re, &o.im));
        re /= &den;
        im /= &den;
        Cx { re, im }
    }

    /// |z| via hypot (no intermediate overflow).
    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    /// |z|^2.
    pub fn sqnorm(&self) -> Float {
        let mut out = Float::new(self.prec());
        out.assign(self.re.mul_add_mul_ref(&self.re, &self.im, &self.im));
        out
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Cx {
        let prec = self.prec();
        if self.is_zero() {
            return Cx::zero(prec);
        }
        let r = self.abs();
        if self.re.is_sign_positive() || self.re.is_zero() {
            // re >= 0: t = sqrt((r + re)/2), result (t, im/(2t))
            let mut t = r;
            t += &self.re;
            t /= 2u32;
            let t = t.sqrt();
            let mut im = self.im.clone();
            im /= &t;
            im /= 2u32;
            Cx { re: t, im }
        } else {
            // re < 0: u = sqrt((r - re)/2), result (|im|/(2u), sign(im)*u)
            let mut u = r;
            u -= &self.re;
            u /= 2u32;
            let u = u.sqrt();
            let mut re = self.im.clone().abs();
            re /= &u;
            re /= 2u32;
            let mut im = u;
            if self.im.is_sign_negative() && !self.im.is_zero() {
                im.neg_assign();
            }
            Cx { re, im }
        }
    }

    pub fn to_f64s(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn dist(&self, o: &Cx) -> Float {
        self.sub(o).abs()
    }
}

/// Unit complex number `e^(i*theta)`.
pub fn cis(theta: &Float) -> Cx {
    let prec = theta.prec();
    let (sin, cos) = theta.clone().sin_cos(Float::new(prec));
    Cx { re: cos, im: sin }
}

/// Decimal digits that guarantee exact round-trip of a `bits`-bit float.
pub fn decimal_digits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
}

/// Full-precision decimal string (round-trips exactly at the same precision).
pub fn float_to_decimal(x: &Float) -> String {
    x.to_string_radix(10, Some(decimal_digits(x.prec())))
}

pub fn float_from_decimal(s: &str, bits: u32) -> Result<Float> {
    let parsed =
        Float::parse(s).map_err(|e| Error::Parse(format!("bad decimal float {s:?}: {e}")))?;
    Ok(Float::with_val(bits, parsed))
}

/// Parse an exact rational from either `p/q` or a decimal string with an
/// optional exponent (`-1.25e-3` becomes `-1/800`). Used by the domain spec
/// reader so user coordinates stay exact.
pub fn rational_from_decimal(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if !s.contains('.') && !s.contains('e') && !s.contains('E') {
        return s
            .parse::<Rational>()
            .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")));
    }
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..]
                .parse()
                .map_err(|e| Error::Parse(format!("bad exponent in {s:?}: {e}")))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1i32, rest),
        None => (1i32, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("no digits in {s:?}")));
    }
    let all: String = format!("{int_part}{frac_part}");
    if !all.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad decimal {s:?}")));
    }
    let mut value = all
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = Rational::from(10u32);
    if shift > 0 {
        value *= ten.pow(u32::try_from(shift).map_err(|_| Error::Parse("exponent too large".into()))?);
    } else if shift < 0 {
        value /= ten.pow(u32::try_from(-shift).map_err(|_| Error::Parse("exponent too large".into()))?);
    }
    if sign < 0 {
        value = -value;
    }
    Ok(value)
}

pub fn rational_to_float(r: &Rational, bits: u32) -> Float {
    Float::with_val(bits, r)
}

/// SplitMix64 step, used to derive independent RNG keys and deterministic
/// probe indices from structured inputs.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Fixed-shape pairwise tree sum: the reduction order depends only on the
/// slice length, never on chunking or thread count, so accumulated f64
/// statistics are bit-reproducible.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 32;
    if values.len() <= BASE {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
