//! Truncated q-expansions with coefficients in `Q(sqrt(-3))`.
//!
//! Scalars are stored on the basis `{1, s}` with `s^2 = -3` (`s = i*sqrt(3)`).
//! Integrality is measured in `Z[zeta, 1/3]` with `zeta = (-1 + s)/2`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numtheory::{int, is_three_integral, Rat};

/// `re + im_s * s` with `s^2 = -3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QZeta {
    pub re: Rat,
    pub im_s: Rat,
}

impl QZeta {
    pub fn new(re: Rat, im_s: Rat) -> Self {
        QZeta { re, im_s }
    }

    pub fn from_rat(re: Rat) -> Self {
        QZeta { re, im_s: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        QZeta::from_rat(int(n))
    }

    pub fn zero() -> Self {
        QZeta::from_rat(Rat::zero())
    }

    pub fn one() -> Self {
        QZeta::from_rat(Rat::one())
    }

    /// `s = i*sqrt(3) = e^w - e^{-w}` for `w = 2 pi i / 3`.
    pub fn s() -> Self {
        QZeta::new(Rat::zero(), Rat::one())
    }

    /// Primitive cube root of unity `(-1 + s)/2`.
    pub fn zeta() -> Self {
        QZeta::new(Rat::new((-1).into(), 2.into()), Rat::new(1.into(), 2.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im_s.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im_s.is_zero()
    }

    pub fn conj(&self) -> Self {
        QZeta::new(self.re.clone(), -self.im_s.clone())
    }

    /// Field norm `a^2 + 3 b^2`.
    pub fn norm(&self) -> Rat {
        &self.re * &self.re + int(3) * &self.im_s * &self.im_s
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QZeta::new(&self.re / &n, -&self.im_s / &n))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        QZeta::new(&self.re * c, &self.im_s * c)
    }

    /// Coordinates `(u, v)` with `self = u + v * zeta`.
    pub fn zeta_coords(&self) -> (Rat, Rat) {
        (&self.re + &self.im_s, &self.im_s * int(2))
    }

    pub fn from_zeta_coords(u: &Rat, v: &Rat) -> Self {
        let im_s = v / int(2);
        QZeta::new(u - &im_s, im_s)
    }

    /// Membership in `Z[zeta, 1/3]`.
    pub fn is_integral(&self) -> bool {
        let (u, v) = self.zeta_coords();
        is_three_integral(&u) && is_three_integral(&v)
    }
}

impl From<Rat> for QZeta {
    fn from(r: Rat) -> Self {
        QZeta::from_rat(r)
    }
}

impl Add<&QZeta> for &QZeta {
    type Output = QZeta;
    fn add(self, o: &QZeta) -> QZeta {
        QZeta::new(&self.re + &o.re, &self.im_s + &o.im_s)
    }
}

impl Sub<&QZeta> for &QZeta {
    type Output = QZeta;
    fn sub(self, o: &QZeta) -> QZeta {
        QZeta::new(&self.re - &o.re, &self.im_s - &o.im_s)
    }
}

impl Mul<&QZeta> for &QZeta {
    type Output = QZeta;
    fn mul(self, o: &QZeta) -> QZeta {
        if self.im_s.is_zero() && o.im_s.is_zero() {
            return QZeta::from_rat(&self.re * &o.re);
        }
        let re = &self.re * &o.re - int(3) * &self.im_s * &o.im_s;
        let im = &self.re * &o.im_s + &self.im_s * &o.re;
        QZeta::new(re, im)
    }
}

impl Neg for &QZeta {
    type Output = QZeta;
    fn neg(self) -> QZeta {
        QZeta::new(-&self.re, -&self.im_s)
    }
}

macro_rules! forward_owned {
    ($ty:ty, $tr:ident, $m:ident) => {
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, o: $ty) -> $ty {
                (&self).$m(&o)
            }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, o: &$ty) -> $ty {
                (&self).$m(o)
            }
        }
    };
}

forward_owned!(QZeta, Add, add);
forward_owned!(QZeta, Sub, sub);
forward_owned!(QZeta, Mul, mul);

impl Neg for QZeta {
    type Output = QZeta;
    fn neg(self) -> QZeta {
        -&self
    }
}

impl AddAssign<&QZeta> for QZeta {
    fn add_assign(&mut self, o: &QZeta) {
        self.re += &o.re;
        self.im_s += &o.im_s;
    }
}

impl SubAssign<&QZeta> for QZeta {
    fn sub_assign(&mut self, o: &QZeta) {
        self.re -= &o.re;
        self.im_s -= &o.im_s;
    }
}

impl fmt::Display for QZeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im_s.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{} s", self.im_s),
            (false, false) => {
                let sign = if self.im_s.is_negative() { "-" } else { "+" };
                write!(f, "({} {} {} s)", self.re, sign, self.im_s.abs())
            }
        }
    }
}

/// Writes `c` as a summand, folding a leading minus sign into the separator.
pub(crate) fn write_summand(f: &mut fmt::Formatter<'_>, c: &QZeta, first: bool) -> fmt::Result {
    let negative = (c.im_s.is_zero() && c.re.is_negative()) || (c.re.is_zero() && c.im_s.is_negative());
    match (first, negative) {
        (true, _) => write!(f, "{c}"),
        (false, true) => write!(f, " - {}", -c.clone()),
        (false, false) => write!(f, " + {c}"),
    }
}

/// q-expansion known through `q^order`; the tail is `O(q^(order+1))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<QZeta>,
}

impl QSeries {
    pub fn from_coeffs(coeffs: Vec<QZeta>) -> Self {
        assert!(!coeffs.is_empty(), "a q-series needs at least the constant term");
        QSeries { coeffs }
    }

    pub fn from_rats(coeffs: impl IntoIterator<Item = Rat>) -> Self {
        QSeries::from_coeffs(coeffs.into_iter().map(QZeta::from_rat).collect())
    }

    pub fn zero(order: usize) -> Self {
        QSeries { coeffs: vec![QZeta::zero(); order + 1] }
    }

    pub fn constant(c: QZeta, order: usize) -> Self {
        let mut s = QSeries::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        QSeries::constant(QZeta::one(), order)
    }

    /// The series `q` itself.
    pub fn q(order: usize) -> Self {
        let mut s = QSeries::zero(order);
        if order >= 1 {
            s.coeffs[1] = QZeta::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[QZeta] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &QZeta {
        &self.coeffs[n]
    }

    pub fn set_coeff(&mut self, n: usize, c: QZeta) {
        self.coeffs[n] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(QZeta::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        QSeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn scale(&self, c: &QZeta) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }

    /// Same series with the constant term replaced by zero.
    pub fn without_constant(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = QZeta::zero();
        s
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = QSeries::one(self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Power with a possibly negative exponent; negative powers need a unit.
    pub fn int_pow(&self, e: i64) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u32))
        } else {
            Some(self.inverse()?.pow(e.unsigned_abs() as u32))
        }
    }

    /// Multiplicative inverse, defined when the constant term is nonzero.
    pub fn inverse(&self) -> Option<Self> {
        let c0_inv = self.coeffs[0].inv()?;
        let t = self.order();
        let mut out = vec![QZeta::zero(); t + 1];
        out[0] = c0_inv.clone();
        for n in 1..=t {
            let mut acc = QZeta::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &(&self.coeffs[k] * &out[n - k]);
                }
            }
            out[n] = -(&acc * &c0_inv);
        }
        Some(QSeries { coeffs: out })
    }

    /// `q -> q^m`.
    pub fn substitute_q_power(&self, m: usize) -> Self {
        assert!(m >= 1, "substitute_q_power needs m >= 1");
        let t = self.order();
        let mut out = QSeries::zero(t);
        for n in (0..=t).step_by(m) {
            out.coeffs[n] = self.coeffs[n / m].clone();
        }
        out
    }

    /// Every coefficient lies in `Z[zeta, 1/3]`.
    pub fn is_integral(&self) -> bool {
        self.first_non_integral().is_none()
    }

    pub fn first_non_integral(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_integral())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(QZeta::is_rational)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order(),
            "coeffs": self.coeffs.iter().map(qzeta_to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("QSeries JSON needs a `coeffs` array".into()))?;
        if coeffs.is_empty() {
            return Err(Error::Parse("QSeries JSON has no coefficients".into()));
        }
        let coeffs = coeffs.iter().map(qzeta_from_json).collect::<Result<Vec<_>>>()?;
        if let Some(order) = v.get("order") {
            let order = order
                .as_u64()
                .ok_or_else(|| Error::Parse("`order` must be a non-negative integer".into()))?;
            if order as usize + 1 != coeffs.len() {
                return Err(Error::Parse(format!(
                    "`order` is {order} but {} coefficients were given",
                    coeffs.len()
                )));
            }
        }
        Ok(QSeries { coeffs })
    }
}

pub fn bigint_to_json(x: &BigInt) -> Value {
    // arbitrary_precision keeps integers of any size exact
    let n: serde_json::Number = x.to_string().parse().expect("integer literal");
    Value::Number(n)
}

pub fn bigint_from_json(v: &Value) -> Result<BigInt> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Error::Parse(format!("expected an integer, got {v}"))),
    };
    text.parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("expected an integer, got {text}")))
}

pub fn rat_to_json_pair(r: &Rat) -> [Value; 2] {
    [bigint_to_json(r.numer()), bigint_to_json(r.denom())]
}

/// `[re_num, re_den, im_num, im_den]`
pub fn qzeta_to_json(c: &QZeta) -> Value {
    let [a, b] = rat_to_json_pair(&c.re);
    let [x, y] = rat_to_json_pair(&c.im_s);
    Value::Array(vec![a, b, x, y])
}

pub fn qzeta_from_json(v: &Value) -> Result<QZeta> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 4)
        .ok_or_else(|| Error::Parse(format!("coefficient must be [re_num, re_den, im_num, im_den], got {v}")))?;
    let parts = arr.iter().map(bigint_from_json).collect::<Result<Vec<_>>>()?;
    if parts[1].is_zero() || parts[3].is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(QZeta::new(
        Rat::new(parts[0].clone(), parts[1].clone()),
        Rat::new(parts[2].clone(), parts[3].clone()),
    ))
}

impl Add<&QSeries> for &QSeries {
    type Output = QSeries;
    fn add(self, o: &QSeries) -> QSeries {
        let t = self.order().min(o.order());
        QSeries { coeffs: (0..=t).map(|n| &self.coeffs[n] + &o.coeffs[n]).collect() }
    }
}

impl Sub<&QSeries> for &QSeries {
    type Output = QSeries;
    fn sub(self, o: &QSeries) -> QSeries {
        let t = self.order().min(o.order());
        QSeries { coeffs: (0..=t).map(|n| &self.coeffs[n] - &o.coeffs[n]).collect() }
    }
}

impl Mul<&QSeries> for &QSeries {
    type Output = QSeries;
    fn mul(self, o: &QSeries) -> QSeries {
        let t = self.order().min(o.order());
        let mut out = vec![QZeta::zero(); t + 1];
        for (i, a) in self.coeffs.iter().take(t + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(t + 1 - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        QSeries { coeffs: out }
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

forward_owned!(QSeries, Add, add);
forward_owned!(QSeries, Sub, sub);
forward_owned!(QSeries, Mul, mul);

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            write_summand(f, c, !wrote)?;
            match n {
                0 => {}
                1 => write!(f, " q")?,
                _ => write!(f, " q^{n}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}
