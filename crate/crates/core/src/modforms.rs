//! The graded ring `M*(Gamma1(3))`, free on `E1` (weight 1) and `E3` (weight 3).
//!
//! A weight-`k` form is stored by its coefficients on the monomials
//! `E1^(k-3b) E3^b`, indexed by `b = 0..=k/3`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::eisenstein::eisenstein_gamma3_odd;
use crate::error::{Error, Result};
use crate::numtheory::Rat;
use crate::qseries::{qzeta_from_json, qzeta_to_json, QSeries, QZeta};

/// Monomials `(a, b)` with `a + 3b = k`, ordered by `b` ascending.
pub fn basis(k: usize) -> Vec<(usize, usize)> {
    (0..=k / 3).map(|b| (k - 3 * b, b)).collect()
}

pub fn dim(k: usize) -> usize {
    k / 3 + 1
}

/// `1 + ceil(2k/3)`.
pub fn sturm_bound(k: usize) -> usize {
    1 + (2 * k).div_ceil(3)
}

/// Extra coefficients beyond the Sturm bound that `fit` insists on.
pub const FIT_MARGIN: usize = 3;

type MonomialKey = (usize, usize, usize);

static MONOMIALS: OnceLock<Mutex<HashMap<MonomialKey, Arc<QSeries>>>> = OnceLock::new();

/// q-expansion of `E1^a E3^b` to order `order`, memoized.
pub fn monomial(a: usize, b: usize, order: usize) -> Arc<QSeries> {
    let cache = MONOMIALS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(a, b, order)) {
        return Arc::clone(s);
    }
    let s = if a == 0 && b == 0 {
        QSeries::one(order)
    } else if b > 0 {
        let e3 = eisenstein_gamma3_odd(3, order).expect("weight 3 is odd");
        &*monomial(a, b - 1, order) * &e3
    } else {
        let e1 = eisenstein_gamma3_odd(1, order).expect("weight 1 is odd");
        &*monomial(a - 1, 0, order) * &e1
    };
    let s = Arc::new(s);
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert((a, b, order), Arc::clone(&s));
    s
}

/// Homogeneous form of weight `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModForm {
    weight: usize,
    coeffs: Vec<QZeta>,
}

impl ModForm {
    pub fn zero(weight: usize) -> Self {
        ModForm { weight, coeffs: vec![QZeta::zero(); dim(weight)] }
    }

    /// `coeffs[b]` multiplies `E1^(k-3b) E3^b`.
    pub fn new(weight: usize, coeffs: Vec<QZeta>) -> Result<Self> {
        if coeffs.len() != dim(weight) {
            return Err(Error::DimensionMismatch { expected: dim(weight), got: coeffs.len() });
        }
        Ok(ModForm { weight, coeffs })
    }

    pub fn from_rats(weight: usize, coeffs: Vec<Rat>) -> Result<Self> {
        ModForm::new(weight, coeffs.into_iter().map(QZeta::from_rat).collect())
    }

    pub fn monomial(a: usize, b: usize, c: QZeta) -> Self {
        let mut m = ModForm::zero(a + 3 * b);
        m.coeffs[b] = c;
        m
    }

    pub fn e1() -> Self {
        ModForm::monomial(1, 0, QZeta::one())
    }

    pub fn e3() -> Self {
        ModForm::monomial(0, 1, QZeta::one())
    }

    pub fn constant(c: QZeta) -> Self {
        ModForm::monomial(0, 0, c)
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn coeffs(&self) -> &[QZeta] {
        &self.coeffs
    }

    /// Coefficient of `E1^a E3^b`; zero off the basis.
    pub fn coeff(&self, a: usize, b: usize) -> QZeta {
        if a + 3 * b != self.weight {
            return QZeta::zero();
        }
        self.coeffs[b].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(QZeta::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(QZeta::is_rational)
    }

    /// Value at the cusp `q = 0`; every monomial has constant term 1.
    pub fn constant_term(&self) -> QZeta {
        let mut acc = QZeta::zero();
        for c in &self.coeffs {
            acc += c;
        }
        acc
    }

    pub fn scale(&self, c: &QZeta) -> Self {
        ModForm { weight: self.weight, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &ModForm) -> Result<Self> {
        if self.weight != other.weight {
            return Err(Error::InvalidArgument(format!(
                "cannot add forms of weights {} and {}",
                self.weight, other.weight
            )));
        }
        Ok(ModForm {
            weight: self.weight,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn mul(&self, other: &ModForm) -> Self {
        let mut out = ModForm::zero(self.weight + other.weight);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += &(a * b);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = ModForm::constant(QZeta::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn expand(&self, order: usize) -> QSeries {
        let mut acc = QSeries::zero(order);
        for ((a, b), c) in basis(self.weight).into_iter().zip(&self.coeffs) {
            if !c.is_zero() {
                acc = &acc + &monomial(a, b, order).scale(c);
            }
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let mut terms = Vec::new();
        for ((a, b), c) in basis(self.weight).into_iter().zip(&self.coeffs) {
            if !c.is_zero() {
                terms.push(json!({"e1": a, "e3": b, "coeff": qzeta_to_json(c)}));
            }
        }
        json!({"weight": self.weight, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let weight = v
            .get("weight")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("form JSON needs an integer `weight`".into()))? as usize;
        let mut m = ModForm::zero(weight);
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("form JSON needs a `terms` array".into()))?;
        for t in terms {
            let a = t.get("e1").and_then(Value::as_u64);
            let b = t.get("e3").and_then(Value::as_u64);
            let (Some(a), Some(b)) = (a, b) else {
                return Err(Error::Parse(format!("bad monomial {t}")));
            };
            if a as usize + 3 * b as usize != weight {
                return Err(Error::Parse(format!("monomial E1^{a} E3^{b} is not of weight {weight}")));
            }
            let c = qzeta_from_json(t.get("coeff").unwrap_or(&Value::Null))?;
            m.coeffs[b as usize] += &c;
        }
        Ok(m)
    }
}

impl fmt::Display for ModForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for ((a, b), c) in basis(self.weight).into_iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            crate::qseries::write_summand(f, c, !wrote)?;
            match a {
                0 => {}
                1 => write!(f, " E1")?,
                _ => write!(f, " E1^{a}")?,
            }
            match b {
                0 => {}
                1 => write!(f, " E3")?,
                _ => write!(f, " E3^{b}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Finite sum of homogeneous forms of different weights.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedForm {
    parts: BTreeMap<usize, ModForm>,
}

impl GradedForm {
    pub fn zero() -> Self {
        GradedForm::default()
    }

    pub fn constant(c: QZeta) -> Self {
        GradedForm::from(ModForm::constant(c))
    }

    pub fn parts(&self) -> &BTreeMap<usize, ModForm> {
        &self.parts
    }

    pub fn part(&self, weight: usize) -> Option<&ModForm> {
        self.parts.get(&weight)
    }

    pub fn top_weight(&self) -> Option<usize> {
        self.parts.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(ModForm::is_zero)
    }

    fn insert_sum(&mut self, m: ModForm) {
        let w = m.weight();
        let merged = match self.parts.remove(&w) {
            Some(old) => old.add(&m).expect("same weight"),
            None => m,
        };
        if !merged.is_zero() {
            self.parts.insert(w, merged);
        }
    }

    pub fn add(&self, other: &GradedForm) -> Self {
        let mut out = self.clone();
        for m in other.parts.values() {
            out.insert_sum(m.clone());
        }
        out
    }

    pub fn sub(&self, other: &GradedForm) -> Self {
        self.add(&other.scale(&-QZeta::one()))
    }

    pub fn scale(&self, c: &QZeta) -> Self {
        let mut out = GradedForm::zero();
        for m in self.parts.values() {
            out.insert_sum(m.scale(c));
        }
        out
    }

    pub fn mul(&self, other: &GradedForm) -> Self {
        let mut out = GradedForm::zero();
        for a in self.parts.values() {
            for b in other.parts.values() {
                out.insert_sum(a.mul(b));
            }
        }
        out
    }

    pub fn constant_term(&self) -> QZeta {
        let mut acc = QZeta::zero();
        for m in self.parts.values() {
            acc += &m.constant_term();
        }
        acc
    }

    pub fn expand(&self, order: usize) -> QSeries {
        let mut acc = QSeries::zero(order);
        for m in self.parts.values() {
            acc = &acc + &m.expand(order);
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (w, m) in &self.parts {
            map.insert(w.to_string(), m.to_json());
        }
        Value::Object(map)
    }
}

impl From<ModForm> for GradedForm {
    fn from(m: ModForm) -> Self {
        let mut g = GradedForm::zero();
        g.insert_sum(m);
        g
    }
}

impl fmt::Display for GradedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, m) in &self.parts {
            if !first {
                write!(f, " | ")?;
            }
            write!(f, "[{w}] {m}")?;
            first = false;
        }
        Ok(())
    }
}

/// Rational Gaussian elimination; returns a solution of the pivot rows.
/// Columns without a pivot get zero, and `None` if some column has no pivot.
fn solve_pivot_rows(rows: &[Vec<Rat>], rhs: &[Rat], ncols: usize) -> Option<Vec<Rat>> {
    let mut a: Vec<Vec<Rat>> = rows.iter().zip(rhs).map(|(r, b)| {
        let mut r = r.clone();
        r.push(b.clone());
        r
    }).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..a.len()).find(|&i| !a[i][col].is_zero()) else {
            return None;
        };
        a.swap(row, p);
        let inv = Rat::one() / &a[row][col];
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=ncols {
                    let delta = &f * &a[row][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Some((0..ncols).map(|i| a[i][ncols].clone()).collect())
}

/// The basis expansions as rational columns on `q^0..q^order`.
pub fn basis_matrix(k: usize, order: usize) -> Vec<Vec<Rat>> {
    let cols: Vec<Arc<QSeries>> = basis(k).into_iter().map(|(a, b)| monomial(a, b, order)).collect();
    (0..=order).map(|n| cols.iter().map(|c| c.coeff(n).re.clone()).collect()).collect()
}

/// Recover the weight-`k` form whose expansion is `f`.
///
/// Needs `f.order() >= sturm_bound(k) + FIT_MARGIN`; every available
/// coefficient must match.
pub fn fit(f: &QSeries, k: usize) -> Result<ModForm> {
    let needed = sturm_bound(k) + FIT_MARGIN;
    if f.order() < needed {
        return Err(Error::InsufficientOrder { needed, got: f.order() });
    }
    let rows = basis_matrix(k, f.order());
    let n = dim(k);
    let re: Vec<Rat> = f.coeffs().iter().map(|c| c.re.clone()).collect();
    let im: Vec<Rat> = f.coeffs().iter().map(|c| c.im_s.clone()).collect();
    let (Some(x), Some(y)) = (solve_pivot_rows(&rows, &re, n), solve_pivot_rows(&rows, &im, n)) else {
        return Err(Error::NoFit { weight: k, index: 0 });
    };
    let m = ModForm::new(k, x.into_iter().zip(y).map(|(a, b)| QZeta::new(a, b)).collect())?;
    let residual = f - &m.expand(f.order());
    if let Some(index) = residual.coeffs().iter().position(|c| !c.is_zero()) {
        return Err(Error::NoFit { weight: k, index });
    }
    Ok(m)
}
