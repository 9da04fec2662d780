//! Divided congruences: integrality, triviality in `Dbar_k (x) Q/Z`, and
//! modular lifts of e-invariants.
//!
//! Triviality of `r` asks for `m` in `M_k (x) Q(sqrt(-3))` and a constant `c0`
//! with `r - m - c0` integral. Coefficients `q^1..q^T` are written on the basis
//! `{1, zeta}`, giving a vector in `Q^{2T}`; the weight-`k` monomials `b` and
//! `s*b` give integer columns `G`. If the rows `K` of a unimodular `U` with
//! `U G` in echelon form span the left kernel of `G`, then `r` is trivial iff
//! every entry of `K r` lies in `Z[1/3]`, and a row with `(K r)_i` outside
//! `Z[1/3]` is a certificate valid at every order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{smith, z13_echelon, z13_reduce, IntMatrix, Smith};
use crate::modforms::{basis, monomial, sturm_bound, ModForm};
use crate::numtheory::{is_three_integral, val_p_int, Rat, Valuation};
use crate::qseries::{bigint_to_json, qzeta_to_json, rat_to_json_pair, QSeries, QZeta};

pub const DEFAULT_AMAX: usize = 8;

/// Coefficients past the Sturm bound required before deciding triviality.
pub const DECIDE_MARGIN: usize = 5;

pub fn min_decide_order(k: usize) -> usize {
    sturm_bound(k) + DECIDE_MARGIN
}

/// Which coordinate of `a + b*zeta` a certificate entry reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    One,
    Zeta,
}

impl Component {
    pub fn as_str(self) -> &'static str {
        match self {
            Component::One => "1",
            Component::Zeta => "zeta",
        }
    }
}

/// `[u_1..u_T, v_1..v_T]` with `coeff(q^n) = u_n + v_n zeta`.
pub fn zeta_vector(r: &QSeries, order: usize) -> Vec<Rat> {
    let mut u = Vec::with_capacity(2 * order);
    let mut v = Vec::with_capacity(order);
    for n in 1..=order {
        let (a, b) = r.coeff(n).zeta_coords();
        u.push(a);
        v.push(b);
    }
    u.extend(v);
    u
}

fn coordinate(order: usize, i: usize) -> (usize, Component) {
    if i < order {
        (i + 1, Component::One)
    } else {
        (i - order + 1, Component::Zeta)
    }
}

/// Sparse integer functional on `[u, v]` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// `(n, component, coefficient)` sorted by `n`.
    pub terms: Vec<(usize, Component, BigInt)>,
    /// Value on the candidate; never in `Z[1/3]`.
    pub value: Rat,
}

impl Certificate {
    pub fn q_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.iter().map(|t| t.0).collect();
        v.dedup();
        v
    }

    pub fn evaluate(&self, r: &QSeries) -> Rat {
        let mut acc = Rat::zero();
        for (n, comp, c) in &self.terms {
            let (u, v) = r.coeff(*n).zeta_coords();
            let x = match comp {
                Component::One => u,
                Component::Zeta => v,
            };
            acc += x * Rat::from_integer(c.clone());
        }
        acc
    }

    /// Vanishes on every `b` and `s*b` for weight-`k` monomials `b`, and is
    /// outside `Z[1/3]` on `r`.
    pub fn verify(&self, r: &QSeries, k: usize) -> bool {
        let top = self.terms.iter().map(|t| t.0).max().unwrap_or(0);
        if r.order() < top {
            return false;
        }
        for (a, b) in basis(k) {
            let m = monomial(a, b, top);
            if !self.evaluate(&m).is_zero() || !self.evaluate(&m.scale(&QZeta::s())).is_zero() {
                return false;
            }
        }
        let value = self.evaluate(r);
        value == self.value && !is_three_integral(&value)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(n, comp, c)| json!({"q": n, "component": comp.as_str(), "coeff": bigint_to_json(c)}))
            .collect();
        json!({"q_indices": self.q_indices(), "terms": terms, "value": rat_to_json_pair(&self.value)})
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub form: ModForm,
    pub c0: QZeta,
    /// `3^scaling` cleared the 3-power denominators of `K r`.
    pub scaling: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Nontrivial { weight: usize, order: usize, certificate: Certificate },
    TrivialToOrder { weight: usize, order: usize, witness: Witness },
}

impl Verdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Verdict::TrivialToOrder { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Nontrivial { .. } => "nontrivial",
            Verdict::TrivialToOrder { .. } => "trivial_to_order",
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Verdict::Nontrivial { order, .. } | Verdict::TrivialToOrder { order, .. } => *order,
        }
    }

    pub fn weight(&self) -> usize {
        match self {
            Verdict::Nontrivial { weight, .. } | Verdict::TrivialToOrder { weight, .. } => *weight,
        }
    }

    /// Re-check the verdict against `r` from scratch.
    pub fn verify(&self, r: &QSeries) -> bool {
        match self {
            Verdict::Nontrivial { weight, certificate, .. } => certificate.verify(r, *weight),
            Verdict::TrivialToOrder { order, witness, .. } => {
                if r.order() < *order {
                    return false;
                }
                let rest = &(&r.truncate(*order) - &witness.form.expand(*order))
                    - &QSeries::constant(witness.c0.clone(), *order);
                rest.is_integral() && rest.coeff(0).is_zero()
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Verdict::Nontrivial { weight, order, certificate } => json!({
                "kind": self.kind(), "weight": weight, "order": order,
                "certificate": certificate.to_json(),
            }),
            Verdict::TrivialToOrder { weight, order, witness } => json!({
                "kind": self.kind(), "weight": weight, "order": order,
                "witness": {
                    "form": witness.form.to_json(),
                    "c0": qzeta_to_json(&witness.c0),
                    "scaling": witness.scaling,
                },
            }),
        }
    }
}

/// Precomputed kernel data for one `(k, T)`.
pub struct TrivialityEngine {
    weight: usize,
    order: usize,
    smith: Smith,
}

static ENGINES: OnceLock<Mutex<HashMap<(usize, usize), Arc<TrivialityEngine>>>> = OnceLock::new();

impl TrivialityEngine {
    pub fn new(weight: usize, order: usize) -> Result<Self> {
        let needed = min_decide_order(weight);
        if order < needed {
            return Err(Error::InsufficientOrder { needed, got: order });
        }
        let gens = generator_matrix(weight, order);
        let smith = smith(&gens, true);
        Ok(TrivialityEngine { weight, order, smith })
    }

    /// Shared engine, built once per `(k, T)`.
    pub fn cached(weight: usize, order: usize) -> Result<Arc<Self>> {
        let cache = ENGINES.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(e) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(weight, order)) {
            return Ok(Arc::clone(e));
        }
        let e = Arc::new(TrivialityEngine::new(weight, order)?);
        cache.lock().unwrap_or_else(|e| e.into_inner()).insert((weight, order), Arc::clone(&e));
        Ok(e)
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn coordinates(&self, r: &QSeries) -> Result<Vec<Rat>> {
        if r.order() < self.order {
            return Err(Error::InsufficientOrder { needed: self.order, got: r.order() });
        }
        Ok(zeta_vector(r, self.order))
    }

    /// `K x` for the kernel rows `K`.
    pub fn kernel_values(&self, x: &[Rat]) -> Vec<Rat> {
        let den = x.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = x.iter().map(|c| (c * Rat::from_integer(den.clone())).to_integer()).collect();
        let rows = &self.smith.u[self.smith.rank..];
        rows.iter()
            .map(|row| {
                let s: BigInt = row.iter().zip(&ints).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum();
                Rat::new(s, den.clone())
            })
            .collect()
    }

    /// Fast yes/no answer without building a witness.
    pub fn is_trivial(&self, r: &QSeries) -> Result<bool> {
        let x = self.coordinates(r)?;
        Ok(self.kernel_values(&x).iter().all(is_three_integral))
    }

    pub fn decide(&self, r: &QSeries, amax: usize) -> Result<Verdict> {
        let x = self.coordinates(r)?;
        let t = self.kernel_values(&x);
        let rank = self.smith.rank;
        let bad: Vec<usize> = (0..t.len()).filter(|&i| !is_three_integral(&t[i])).collect();
        if !bad.is_empty() {
            let support = |i: usize| self.smith.u[rank + i].iter().filter(|c| !c.is_zero()).count();
            let i = *bad.iter().min_by_key(|&&i| (support(i), i)).expect("nonempty");
            let mut terms: Vec<(usize, Component, BigInt)> = self.smith.u[rank + i]
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| {
                    let (n, comp) = coordinate(self.order, j);
                    (n, comp, c.clone())
                })
                .collect();
            terms.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
            let certificate = Certificate { terms, value: t[i].clone() };
            return Ok(Verdict::Nontrivial { weight: self.weight, order: self.order, certificate });
        }

        let scaling = t
            .iter()
            .map(|c| match val_p_int(c.denom(), 3) {
                Valuation::Finite(v) => v as usize,
                Valuation::Infinite => 0,
            })
            .max()
            .unwrap_or(0);
        if scaling > amax {
            return Err(Error::ScalingLimit { needed: scaling, limit: amax });
        }
        let three_a = Rat::from_integer(num_traits::pow(BigInt::from(3), scaling));
        let target: Vec<BigInt> = t.iter().map(|c| (c * &three_a).to_integer()).collect();
        // l = U^{-1}[:, rank..] t' satisfies K l = t'
        let l: Vec<BigInt> = self
            .smith
            .u_inv
            .iter()
            .map(|row| row[rank..].iter().zip(&target).map(|(a, b)| a * b).sum())
            .collect();
        let w: Vec<Rat> = x.iter().zip(&l).map(|(xi, li)| xi * &three_a - Rat::from_integer(li.clone())).collect();
        let uw = crate::lattice::mat_vec_rat(&self.smith.u, &w);
        debug_assert!(uw[rank..].iter().all(Zero::is_zero));
        let mut y = vec![Rat::zero(); self.smith.v.len()];
        for i in 0..rank {
            y[i] = &uw[i] / Rat::from_integer(self.smith.diag[i].clone());
        }
        let c: Vec<Rat> = self
            .smith
            .v
            .iter()
            .map(|row| row.iter().zip(&y).map(|(a, b)| Rat::from_integer(a.clone()) * b).sum::<Rat>() / &three_a)
            .collect();
        let coeffs = c.chunks(2).map(|p| QZeta::new(p[0].clone(), p[1].clone())).collect();
        let form = ModForm::new(self.weight, coeffs)?;
        let c0 = r.coeff(0) - &form.constant_term();
        let verdict = Verdict::TrivialToOrder {
            weight: self.weight,
            order: self.order,
            witness: Witness { form, c0, scaling },
        };
        debug_assert!(verdict.verify(r));
        Ok(verdict)
    }
}

/// Integer columns `b` and `s*b` for each weight-`k` monomial `b`, rows on
/// `[u_1..u_T, v_1..v_T]`.
pub fn generator_matrix(k: usize, order: usize) -> IntMatrix {
    let mut rows = vec![Vec::new(); 2 * order];
    for (a, b) in basis(k) {
        let m = monomial(a, b, order);
        for n in 1..=order {
            let c = m.coeff(n).re.to_integer();
            rows[n - 1].push(c.clone());
            rows[n - 1].push(c.clone());
            rows[order + n - 1].push(BigInt::zero());
            rows[order + n - 1].push(c * 2);
        }
    }
    rows
}

/// Decide whether `r` vanishes in `Dbar_k (x) Q/Z` using coefficients up to `q^order`.
pub fn triviality_in_dbar(r: &QSeries, k: usize, order: usize, amax: usize) -> Result<Verdict> {
    TrivialityEngine::cached(k, order)?.decide(r, amax)
}

/// Integrality check that reports the first offending coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongruenceCheck {
    pub integral: bool,
    pub first_failure: Option<usize>,
}

pub fn verify_divided_congruence(expr: &QSeries) -> CongruenceCheck {
    let first_failure = expr.first_non_integral();
    CongruenceCheck { integral: first_failure.is_none(), first_failure }
}

/// Affine `Z[1/3]`-lattice of lifts on one monomial support.
struct LiftSpace {
    particular: Vec<Rat>,
    directions: Vec<Vec<Rat>>,
}

fn tail_columns(k: usize, support: &[usize], order: usize) -> Vec<Vec<BigInt>> {
    let mons = basis(k);
    support
        .iter()
        .map(|&j| {
            let (a, b) = mons[j];
            let m = monomial(a, b, order);
            (1..=order).map(|n| m.coeff(n).re.to_integer()).collect()
        })
        .collect()
}

/// Solutions `c` (indexed like `support`) of `sum c = e` with
/// `sum c_j (b_j - 1)` integral on `q^1..q^T`.
fn lift_space(e: &Rat, k: usize, support: &[usize], order: usize) -> Option<LiftSpace> {
    let s = support.len();
    let cols = tail_columns(k, support, order);
    // c = e * delta_0 + N w, N = [e_j - e_0]
    let r0: Vec<Rat> = cols[0].iter().map(|x| -(e * Rat::from_integer(x.clone()))).collect();
    let mut particular = vec![Rat::zero(); s];
    particular[0] = e.clone();
    if s == 1 {
        return r0.iter().all(is_three_integral).then_some(LiftSpace { particular, directions: Vec::new() });
    }
    let bn: IntMatrix = (0..order).map(|n| (1..s).map(|j| &cols[j][n] - &cols[0][n]).collect()).collect();
    let sm = smith(&bn, false);
    let ur = crate::lattice::mat_vec_rat(&sm.u, &r0);
    if !ur[sm.rank..].iter().all(is_three_integral) {
        return None;
    }
    let mut y = vec![Rat::zero(); s - 1];
    for i in 0..sm.rank {
        y[i] = &ur[i] / Rat::from_integer(sm.diag[i].clone());
    }
    let w: Vec<Rat> = sm.v.iter().map(|row| row.iter().zip(&y).map(|(a, b)| Rat::from_integer(a.clone()) * b).sum()).collect();
    let to_c = |w: &[Rat]| -> Vec<Rat> {
        let mut c = vec![Rat::zero(); s];
        for (j, wj) in w.iter().enumerate() {
            c[j + 1] += wj;
            c[0] -= wj;
        }
        c
    };
    for (ci, di) in particular.iter_mut().zip(to_c(&w)) {
        *ci += di;
    }
    let directions = (0..sm.rank)
        .map(|i| {
            let col: Vec<Rat> =
                sm.v.iter().map(|row| Rat::new(row[i].clone(), sm.diag[i].clone())).collect();
            to_c(&col)
        })
        .collect();
    Some(LiftSpace { particular, directions })
}

fn supports(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..(1 << n))
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// Weight-`w` form `m` with `m - e` integral to order `T` and `m(0) = e`.
///
/// Among all such forms the one with fewest monomials is chosen, ties broken
/// by the lexicographically first support; on that support the coefficients
/// are the canonical representative of the affine `Z[1/3]`-lattice of
/// solutions.
pub fn modular_lift(e: &Rat, w: usize, order: usize) -> Result<ModForm> {
    if w == 0 {
        return Err(Error::InvalidArgument("modular lifts need weight >= 1".into()));
    }
    if order == 0 {
        return Err(Error::InvalidArgument("modular lifts need order >= 1".into()));
    }
    for support in supports(basis(w).len()) {
        if support.is_empty() {
            if e.is_zero() {
                return Ok(ModForm::zero(w));
            }
            continue;
        }
        let Some(space) = lift_space(e, w, &support, order) else { continue };
        let c = if space.directions.is_empty() {
            space.particular
        } else {
            z13_reduce(&space.particular, &z13_echelon(&space.directions))
        };
        if c.iter().any(Zero::is_zero) {
            // a smaller support would have caught this
            continue;
        }
        let mut coeffs = vec![QZeta::zero(); basis(w).len()];
        for (&j, cj) in support.iter().zip(c) {
            coeffs[j] = QZeta::from_rat(cj);
        }
        return ModForm::new(w, coeffs);
    }
    Err(Error::NoLift { weight: w, e: e.to_string() })
}

/// Lattice directions of lifts on the support chosen by [`modular_lift`];
/// adding any `Z[1/3]` combination keeps `m - e` integral.
pub fn lift_directions(e: &Rat, w: usize, order: usize) -> Result<Vec<ModForm>> {
    let m = modular_lift(e, w, order)?;
    let support: Vec<usize> = (0..m.coeffs().len()).filter(|&j| !m.coeffs()[j].is_zero()).collect();
    if support.is_empty() {
        return Ok(Vec::new());
    }
    let space = lift_space(e, w, &support, order).expect("support admits the lift");
    Ok(space
        .directions
        .iter()
        .map(|d| {
            let mut coeffs = vec![QZeta::zero(); basis(w).len()];
            for (&j, dj) in support.iter().zip(d) {
                coeffs[j] = QZeta::from_rat(dj.clone());
            }
            ModForm::new(w, coeffs).expect("weight matches")
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{eisenstein_gamma3_odd, eisenstein_level1, normalized_tail};
    use crate::numtheory::{int, rat};

    const T: usize = 30;

    fn e1() -> QSeries {
        eisenstein_gamma3_odd(1, T).unwrap()
    }

    fn nu() -> QSeries {
        normalized_tail(&(&e1() * &e1()), &int(12))
    }

    #[test]
    fn nu_squared_is_nontrivial() {
        let r = (&nu() * &nu()).scale_rat(&rat(1, 2));
        let v = triviality_in_dbar(&r, 4, T, DEFAULT_AMAX).unwrap();
        assert_eq!(v.kind(), "nontrivial");
        assert!(v.verify(&r));
    }

    #[test]
    fn eta_squared_is_nontrivial() {
        let r = normalized_tail(&e1(), &int(2)).scale_rat(&rat(1, 2));
        let v = triviality_in_dbar(&r, 2, T, DEFAULT_AMAX).unwrap();
        assert!(!v.is_trivial());
        assert!(v.verify(&r));
    }

    #[test]
    fn e4_over_960_is_trivial_at_weight_6() {
        let r = normalized_tail(&eisenstein_level1(4, T).unwrap(), &int(960));
        let v = triviality_in_dbar(&r, 6, T, DEFAULT_AMAX).unwrap();
        assert!(v.is_trivial(), "{:?}", v.to_json());
        assert!(v.verify(&r));
    }

    #[test]
    fn insufficient_order() {
        let r = QSeries::zero(5);
        assert!(matches!(triviality_in_dbar(&r, 4, 5, 8), Err(Error::InsufficientOrder { .. })));
        let r = QSeries::zero(10);
        assert!(matches!(triviality_in_dbar(&r, 4, 20, 8), Err(Error::InsufficientOrder { .. })));
    }

    #[test]
    fn scaling_limit() {
        // (E4-1)/960 needs no 3-power; 3^-3 times it needs at least 3
        let r = normalized_tail(&eisenstein_level1(4, T).unwrap(), &int(960)).scale_rat(&rat(1, 27));
        match triviality_in_dbar(&r, 6, T, 0) {
            Err(Error::ScalingLimit { needed, limit: 0 }) => assert!(needed >= 1),
            Ok(v) => assert!(v.is_trivial()),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn lifts_match_known_choices() {
        let nu = modular_lift(&rat(-1, 12), 2, T).unwrap();
        assert_eq!(nu, ModForm::e1().pow(2).scale(&QZeta::from_rat(rat(-1, 12))));
        let sigma = modular_lift(&rat(1, 240), 4, T).unwrap();
        assert_eq!(sigma, ModForm::from_rats(4, vec![rat(3, 80), rat(-1, 30)]).unwrap());
        assert_eq!(sigma.expand(T), eisenstein_level1(4, T).unwrap().scale_rat(&rat(1, 240)));
        let eta = modular_lift(&rat(1, 2), 1, T).unwrap();
        assert_eq!(eta, ModForm::e1().scale(&QZeta::from_rat(rat(1, 2))));
        assert_eq!(modular_lift(&Rat::zero(), 3, T).unwrap(), ModForm::zero(3));
    }

    #[test]
    fn no_lift_for_wrong_weight() {
        // 1/240 needs weight 4; weight 2 forms only reach multiples of 1/12
        assert!(matches!(modular_lift(&rat(1, 240), 2, T), Err(Error::NoLift { weight: 2, .. })));
    }

    #[test]
    fn lift_directions_stay_integral() {
        let e = rat(1, 240);
        let m = modular_lift(&e, 4, T).unwrap();
        for d in lift_directions(&e, 4, T).unwrap() {
            let m2 = m.add(&d).unwrap();
            let tail = &m2.expand(T) - &QSeries::constant(QZeta::from_rat(e.clone()), T);
            assert!(tail.is_integral());
            assert_eq!(m2.constant_term(), QZeta::from_rat(e.clone()));
        }
    }

    #[test]
    fn divided_congruence_report() {
        let bad = normalized_tail(&eisenstein_level1(4, 10).unwrap(), &int(480));
        assert_eq!(verify_divided_congruence(&bad), CongruenceCheck { integral: false, first_failure: Some(1) });
        assert!(verify_divided_congruence(&nu()).integral);
    }
}
