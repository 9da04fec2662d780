//! f-invariant representatives of products, circle bundles and double
//! transfers, plus the complex e-invariant of a circle bundle.
//!
//! Representatives are q-expansions valued in `Dbar_k (x) Q/Z`; pass them to
//! [`crate::congruence::triviality_in_dbar`] at the reported top weight.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::congruence::{min_decide_order, modular_lift};
use crate::error::{Error, Result};
use crate::genus::ell_tilde;
use crate::modforms::GradedForm;
use crate::numtheory::{bernoulli, factorial, int, Rat};
use crate::qseries::{rat_to_json_pair, QSeries, QZeta};

/// A framed bordism class in odd dimension with its complex e-invariant mod Z.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramedElement {
    pub name: String,
    pub dim: usize,
    pub e: Rat,
}

impl FramedElement {
    pub fn new(name: impl Into<String>, dim: usize, e: Rat) -> Result<Self> {
        if dim % 2 == 0 {
            return Err(Error::InvalidArgument(format!("framed elements live in odd dimension, got {dim}")));
        }
        Ok(FramedElement { name: name.into(), dim, e })
    }

    /// Weight `(dim + 1)/2` of the modular lift of `e`.
    pub fn lift_weight(&self) -> usize {
        (self.dim + 1) / 2
    }

    pub fn to_json(&self) -> Value {
        json!({"name": self.name, "dim": self.dim, "e": rat_to_json_pair(&self.e)})
    }
}

/// `mu_k` in dimension `8k + 1`, with `e = 1/2`.
pub fn mu(k: usize) -> FramedElement {
    FramedElement { name: format!("mu{k}"), dim: 8 * k + 1, e: Rat::new(BigInt::one(), BigInt::from(2)) }
}

/// Image-of-J generator in dimension `4k - 1`.
///
/// Its e-invariant generates a cyclic group of order `d_{2k}` (k odd) or
/// `2 d_{2k}` (k even), `d_{2k}` the denominator of `B_{2k}/2k`. The sign is
/// chosen so that `k = 1, 2` give `nu` and `sigma`.
pub fn imj(k: usize) -> FramedElement {
    assert!(k >= 1);
    let denom = if k % 2 == 1 { 2 * k } else { 4 * k };
    FramedElement { name: format!("imj{}", 4 * k - 1), dim: 4 * k - 1, e: -bernoulli(2 * k) / int(denom as i64) }
}

pub fn builtin_elements() -> Vec<FramedElement> {
    let r = |p: i64, q: i64| Rat::new(BigInt::from(p), BigInt::from(q));
    vec![
        FramedElement { name: "eta".into(), dim: 1, e: r(1, 2) },
        FramedElement { name: "nu".into(), dim: 3, e: r(-1, 12) },
        FramedElement { name: "sigma".into(), dim: 7, e: r(1, 240) },
        mu(1),
        imj(1),
        imj(2),
        imj(3),
        imj(4),
    ]
}

/// Built-in by name; also accepts `muK` and `imjD` for any `K >= 1`, `D = 4k - 1`.
pub fn lookup(name: &str) -> Result<FramedElement> {
    if let Some(el) = builtin_elements().into_iter().find(|el| el.name == name) {
        return Ok(el);
    }
    let parse = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
    if let Some(k) = parse("mu").filter(|&k| k >= 1) {
        return Ok(mu(k));
    }
    if let Some(d) = parse("imj").filter(|&d| d >= 3 && d % 4 == 3) {
        return Ok(imj((d + 1) / 4));
    }
    Err(Error::UnknownElement(name.to_string()))
}

/// A q-expansion together with the filtration weight it lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representative {
    pub series: QSeries,
    pub weight: usize,
}

impl Representative {
    pub fn truncate(&self, order: usize) -> Representative {
        Representative { series: self.series.truncate(order), weight: self.weight }
    }
}

/// Order used for lifts: enough to decide triviality at `weight` and at least `order`.
pub fn working_order(weight: usize, order: usize) -> usize {
    order.max(min_decide_order(weight))
}

/// `f(Y1 x Y2) = (m(Y1) - e(Y1)) e(Y2)` with `m(Y1)` the modular lift of `e(Y1)`.
pub fn f_product(y1: &FramedElement, y2: &FramedElement, order: usize) -> Result<Representative> {
    for y in [y1, y2] {
        if y.dim % 2 == 0 {
            return Err(Error::InvalidArgument(format!("{} has even dimension {}", y.name, y.dim)));
        }
    }
    let weight = (y1.dim + y2.dim + 2) / 2;
    let lift = modular_lift(&y1.e, y1.lift_weight(), working_order(weight, order))?;
    let mbar = &lift.expand(order) - &QSeries::constant(QZeta::from_rat(y1.e.clone()), order);
    Ok(Representative { series: mbar.scale_rat(&y2.e), weight })
}

fn bernoulli_weight(k: usize) -> Rat {
    bernoulli(k + 1) / Rat::from_integer(factorial(k + 1))
}

/// `sum_{k=0}^{n} B_{k+1}/(k+1)! * integrals[k]`, where `integrals[k]` is the
/// base integral of `c1^k` against `Ell~`.
pub fn f_circle_bundle(integrals: &[GradedForm], n: usize, order: usize) -> Result<QSeries> {
    if integrals.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: integrals.len() });
    }
    let mut total = GradedForm::zero();
    for (k, g) in integrals.iter().enumerate() {
        total = total.add(&g.scale(&QZeta::from_rat(bernoulli_weight(k))));
    }
    Ok(total.expand(order))
}

/// Intersection numbers `<x^a y^{n-a}, [B']>` of a closed framed `2n`-manifold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferProblem {
    n: usize,
    inter: BTreeMap<usize, BigInt>,
}

fn divisible(x: &BigInt, d: i64) -> bool {
    x.is_multiple_of(&BigInt::from(d))
}

impl TransferProblem {
    /// `inter` maps `a` to `<x^a y^{n-a}>` and must cover `a = 0..=n`.
    pub fn new(n: usize, inter: BTreeMap<usize, BigInt>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("double transfers need n >= 2, got {n}")));
        }
        if let Some(&a) = inter.keys().find(|&&a| a > n) {
            return Err(Error::InvalidArgument(format!("x^{a} exceeds degree {n}")));
        }
        for a in 0..=n {
            if !inter.contains_key(&a) {
                return Err(Error::MissingIntersection { x_power: a, y_power: n - a });
            }
        }
        let p = TransferProblem { n, inter };
        p.validate()?;
        Ok(p)
    }

    /// Builds the problem from `(a, value)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, i64)]) -> Result<Self> {
        Self::new(n, pairs.iter().map(|&(a, v)| (a, BigInt::from(v))).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inter(&self, a: usize) -> &BigInt {
        &self.inter[&a]
    }

    /// Divisibility forced on closed framed bases; failures mean the data
    /// cannot come from one.
    fn validate(&self) -> Result<()> {
        let i = |a: usize| self.inter(a);
        let fail = |rule: &'static str, detail: String| Err(Error::ValidationFailure { rule, detail });
        match self.n {
            5 => {
                let v = BigInt::from(2) * i(3) + i(1);
                if !divisible(&v, 4) {
                    return fail("dim10_dirac", format!("4 must divide 2<x^3y^2> + <xy^4> = {v}"));
                }
                let v = BigInt::from(2) * i(2) + i(4);
                if !divisible(&v, 4) {
                    return fail("dim10_dirac", format!("4 must divide 2<x^2y^3> + <x^4y> = {v}"));
                }
                for a in [3, 2] {
                    if !divisible(i(a), 2) {
                        return fail("dim10_steenrod", format!("<x^{a}y^{}> = {} must be even", 5 - a, i(a)));
                    }
                }
            }
            6 => {
                for a in [3, 1, 5] {
                    if !divisible(i(a), 2) {
                        return fail("dim12_even", format!("<x^{a}y^{}> = {} must be even", 6 - a, i(a)));
                    }
                }
                let v = i(4) + i(2);
                if !divisible(&v, 8) {
                    return fail("dim12_dirac", format!("8 must divide <x^4y^2> + <x^2y^4> = {v}"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let inter: Vec<Value> = self
            .inter
            .iter()
            .map(|(a, v)| json!({"x": a, "y": self.n - a, "value": crate::qseries::bigint_to_json(v)}))
            .collect();
        json!({"n": self.n, "inter": inter})
    }
}

/// Which terms of the `k`-sum to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransferTerms {
    /// `k = 1..n-1`; the boundary terms vanish in `Dbar (x) Q/Z`.
    #[default]
    Interior,
    /// Also `k = 0` and `k = n`, for auditing the dropped terms.
    WithBoundary,
}

/// `sum_k B_{k+1}/(k+1)! <x^k y^{n-k}> Ell~_{n-k+1}`, top weight `n + 2`.
pub fn f_double_transfer(p: &TransferProblem, order: usize, terms: TransferTerms) -> Result<Representative> {
    let n = p.n;
    let tilde = ell_tilde(n + 1, 0)?;
    let ks: Vec<usize> = match terms {
        TransferTerms::Interior => (1..n).collect(),
        TransferTerms::WithBoundary => (0..=n).collect(),
    };
    let mut total = GradedForm::zero();
    for k in ks {
        let c = bernoulli_weight(k) * Rat::from_integer(p.inter(k).clone());
        if c.is_zero() {
            continue;
        }
        total = total.add(&tilde.coeff(n - k + 1).scale(&QZeta::from_rat(c)));
    }
    Ok(Representative { series: total.expand(order), weight: n + 2 })
}

/// `e_C` of the circle bundle of a line over a `2k`-dimensional base with
/// `<c1^k, [B]> = c1_top`: `B_{k+1}(1)/(k+1) * c1_top` in `[0, 1)`.
pub fn e_circle(k: usize, c1_top: &BigInt) -> Rat {
    let x = bernoulli(k + 1) / int(k as i64 + 1) * Rat::from_integer(c1_top.clone());
    let f = x.fract();
    if f.is_negative() {
        f + Rat::one()
    } else {
        f
    }
}
