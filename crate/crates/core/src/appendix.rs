//! Fixture suite reproducing the worked congruences and verdicts: integrality
//! identities among `E1`, `E3`, `E4`, f-invariants of products, and double
//! transfers over low-dimensional framed bases.

use serde_json::{json, Value};

use crate::congruence::{triviality_in_dbar, Verdict};
use crate::eisenstein::{eisenstein_gamma3_odd, eisenstein_level1, g_star, normalized_tail};
use crate::error::Result;
use crate::finv::{f_double_transfer, f_product, lookup, working_order, TransferProblem, TransferTerms};
use crate::numtheory::{int, rat, Rat};
use crate::qseries::{QSeries, QZeta};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub group: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(group: &'static str, name: impl Into<String>, outcome: Result<(bool, String)>) -> Self {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        Check { group, name: name.into(), passed, detail }
    }

    pub fn to_json(&self) -> Value {
        json!({"group": self.group, "name": self.name, "passed": self.passed, "detail": self.detail})
    }
}

/// Series shared by the checks, truncated at a common order.
pub struct Forms {
    pub order: usize,
    pub e1: QSeries,
    pub e3: QSeries,
    pub e4: QSeries,
    pub e5: QSeries,
    pub e8: QSeries,
}

impl Forms {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Forms {
            order,
            e1: eisenstein_gamma3_odd(1, order)?,
            e3: eisenstein_gamma3_odd(3, order)?,
            e4: eisenstein_level1(4, order)?,
            e5: eisenstein_gamma3_odd(5, order)?,
            e8: eisenstein_level1(8, order)?,
        })
    }

    pub fn one(&self) -> QSeries {
        QSeries::one(self.order)
    }

    /// `(E1^2 - 1)/12`.
    pub fn nu(&self) -> QSeries {
        normalized_tail(&(&self.e1 * &self.e1), &int(12))
    }

    /// `(E4 - 1)/240`.
    pub fn sigma(&self) -> QSeries {
        normalized_tail(&self.e4, &int(240))
    }
}

fn half(f: &QSeries) -> QSeries {
    f.scale_rat(&rat(1, 2))
}

fn integral(f: &QSeries) -> (bool, String) {
    match f.first_non_integral() {
        None => (true, "integral".into()),
        Some(n) => (false, format!("coefficient of q^{n} is {}", f.coeff(n))),
    }
}

fn verdict_at(f: &QSeries, weight: usize, amax: usize) -> Result<Verdict> {
    triviality_in_dbar(f, weight, f.order(), amax)
}

fn expect(f: &QSeries, weight: usize, amax: usize, trivial: bool) -> Result<(bool, String)> {
    let v = verdict_at(f, weight, amax)?;
    let ok = v.is_trivial() == trivial && v.verify(f);
    Ok((ok, format!("{} at weight {weight}, order {}", v.kind(), v.order())))
}

fn heads_match(f: &QSeries, want: &[Rat]) -> (bool, String) {
    let got: Vec<Rat> = (0..want.len()).map(|n| f.coeff(n).re.clone()).collect();
    let ok = got == want && (0..want.len()).all(|n| f.coeff(n).is_rational());
    let shown: Vec<String> = got.iter().map(ToString::to_string).collect();
    (ok, format!("head [{}]", shown.join(", ")))
}

fn both(a: (bool, String), b: (bool, String)) -> (bool, String) {
    (a.0 && b.0, format!("{}; {}", a.1, b.1))
}

/// Identities among `E1`, `E3`, `E4` that expand integrally or vanish in `Dbar_8`.
pub fn congruence_checks(f: &Forms, amax: usize) -> Vec<Check> {
    const G: &str = "congruences";
    let mut out = Vec::new();
    for (l, m) in [(1u32, 0u32), (2, 1), (6, 1), (4, 2)] {
        let s = normalized_tail(&f.e4.pow(l), &int(1 << (4 + m)));
        out.push(Check::new(G, format!("(E4^{l} - 1)/2^{} integral", 4 + m), Ok(integral(&s))));
    }
    let nu = f.nu();
    for k in 0..=4i64 {
        let s = half(&(&nu + &normalized_tail(&f.e3, &int(9)).scale_rat(&int(2 * k + 1))));
        out.push(Check::new(G, format!("1/2((E1^2 - 1)/12 + {}(E3 - 1)/9) integral", 2 * k + 1), Ok(integral(&s))));
    }
    let one = f.one();
    let e1sq = &f.e1 * &f.e1;
    let combo = &(&(&normalized_tail(&f.e4, &int(16)).scale_rat(&rat(1, 4))
        - &normalized_tail(&e1sq, &int(4)).scale_rat(&rat(1, 8)))
        + &(&(&f.e3 * &f.e3) - &one).scale_rat(&rat(1, 4)))
        + &(&(&e1sq * &(&f.e1 * &f.e3)) - &one).scale_rat(&rat(1, 8));
    out.push(Check::new(G, "(E4 - 1)/64 combination integral", Ok(integral(&combo))));
    let vanish = normalized_tail(&e1sq, &int(4)).scale_rat(&rat(1, 8));
    out.push(Check::new(G, "(E1^2 - 1)/32 trivial in weight 8", expect(&vanish, 8, amax, true)));
    out.push(Check::new(G, "G2/T remainder trivial in weight 8", expect(&g2_remainder(f), 8, amax, true)));
    out
}

/// `2 Ell6 / 2^7 ... + 18 E1^2/(2^7 3^4 5 7) - 1/2((E1^2 - 1)/4)^3`, reduced.
pub fn g2_remainder(f: &Forms) -> QSeries {
    let e1_3 = &(&f.e1 * &f.e1) * &f.e1;
    let e1_6 = &e1_3 * &e1_3;
    let e1_3e3 = &e1_3 * &f.e3;
    let e3_2 = &f.e3 * &f.e3;
    let sextic = &(&e1_6.scale_rat(&int(121)) - &e1_3e3.scale_rat(&int(152))) + &e3_2.scale_rat(&int(40));
    let d = 128 * 729 * 35;
    let a = sextic.scale_rat(&rat(2, d));
    let b = (&f.e1 * &f.e1).scale_rat(&rat(18, 128 * 81 * 35));
    let c = normalized_tail(&(&f.e1 * &f.e1), &int(4));
    &(&a + &b) - &half(&(&(&c * &c) * &c))
}

fn product(a: &str, b: &str, order: usize) -> Result<(QSeries, usize)> {
    let (y1, y2) = (lookup(a)?, lookup(b)?);
    let weight = (y1.dim + y2.dim + 2) / 2;
    let r = f_product(&y1, &y2, working_order(weight, order))?;
    Ok((r.series, r.weight))
}

/// f-invariants of products of low-dimensional framed elements.
pub fn product_checks(f: &Forms, amax: usize) -> Vec<Check> {
    const G: &str = "products";
    let t = f.order;
    let mut out = Vec::new();

    out.push(Check::new(G, "f(eta^2) = 1/2 q + 1/2 q^3 + ... nontrivial", (|| {
        let (r, k) = product("eta", "eta", t)?;
        let shown = half(&normalized_tail(&f.e1, &int(6)));
        let same = (&r.truncate(t) - &shown).is_integral();
        let head = heads_match(&shown, &[rat(0, 1), rat(1, 2), rat(0, 1), rat(1, 2)]);
        let v = expect(&r, k, amax, false)?;
        Ok(both((same && head.0, head.1), v))
    })()));

    let nu = f.nu();
    out.push(Check::new(G, "f(nu^2) = 1/2((E1^2 - 1)/12)^2 nontrivial", (|| {
        let (r, k) = product("nu", "nu", t)?;
        let shown = half(&(&nu * &nu));
        let head = heads_match(&shown, &[int(0), int(0), rat(1, 2), int(3), rat(11, 2)]);
        let same = expect(&(&r.truncate(t) - &shown), k, amax, true)?;
        let v = expect(&r, k, amax, false)?;
        Ok(both(both(head, same), v))
    })()));

    let sg = f.sigma();
    out.push(Check::new(G, "f(sigma^2) = 1/2((E4 - 1)/240)^2 nontrivial", (|| {
        let (r, k) = product("sigma", "sigma", t)?;
        let shown = half(&(&sg * &sg));
        let want = [int(0), int(0), rat(1, 2), int(9), rat(137, 2), int(325), int(1175)];
        let head = heads_match(&shown, &want);
        let same = expect(&(&r.truncate(t) - &shown), k, amax, true)?;
        let v = expect(&r, k, amax, false)?;
        Ok(both(both(head, same), v))
    })()));

    out.push(Check::new(G, "f(eta sigma) = q - 3q^2 + 29/2 q^3 + 157 q^4 nontrivial", (|| {
        let (r, k) = product("sigma", "eta", t)?;
        let shifted = &half(&sg) + &half(&normalized_tail(&f.e5, &int(3)));
        let head = heads_match(&shifted, &[int(0), int(1), int(-3), rat(29, 2), int(157)]);
        let same = expect(&(&r.truncate(t) - &shifted), k, amax, true)?;
        let (swapped, _) = product("eta", "sigma", t)?;
        let v1 = expect(&r, k, amax, false)?;
        let v2 = expect(&swapped, k, amax, false)?;
        Ok(both(both(head, same), both(v1, v2)))
    })()));

    for (a, b) in [("nu", "eta"), ("nu", "mu1"), ("imj11", "eta"), ("imj11", "mu1"), ("imj19", "eta")] {
        out.push(Check::new(G, format!("f({a} x {b}) trivial"), (|| {
            let (r, k) = product(a, b, t)?;
            expect(&r, k, amax, true)
        })()));
    }
    for a in ["sigma", "imj11", "imj15"] {
        out.push(Check::new(G, format!("f({a} x nu) trivial"), (|| {
            let (r, k) = product(a, "nu", t)?;
            expect(&r, k, amax, true)
        })()));
    }
    out.push(Check::new(G, "(E4 - 1)/960 trivial in weight 6", (|| {
        let r = normalized_tail(&f.e4, &int(960));
        expect(&r, 6, amax, true)
    })()));
    out
}

/// Intersection numbers on `SU(3)/T` with `x`, `y` the simple roots.
pub fn su3_inter() -> Vec<(usize, i64)> {
    vec![(0, -6), (1, 3), (2, 3), (3, -6)]
}

/// Intersection numbers on `G2/T` with `x = alpha`, `y = beta`.
pub fn g2_inter() -> Vec<(usize, i64)> {
    vec![(0, 0), (1, 2), (2, -6), (3, 12), (4, -18), (5, 18), (6, 0)]
}

fn transfer(n: usize, pairs: &[(usize, i64)], order: usize) -> Result<QSeries> {
    let p = TransferProblem::from_pairs(n, pairs)?;
    Ok(f_double_transfer(&p, working_order(n + 2, order), TransferTerms::Interior)?.series)
}

/// Double transfers over framed bases of dimension 4 to 12.
pub fn transfer_checks(f: &Forms, amax: usize) -> Vec<Check> {
    const G: &str = "transfers";
    let t = f.order;
    let mut out = Vec::new();
    out.push(Check::new(G, "dim 4: nontrivial iff <xy> odd", (|| {
        let mut ok = true;
        for xy in -3..=3i64 {
            let r = transfer(2, &[(0, 0), (1, xy), (2, 0)], t)?;
            ok &= verdict_at(&r, 4, amax)?.is_trivial() == (xy % 2 == 0);
        }
        Ok((ok, "<xy> in -3..=3".into()))
    })()));
    out.push(Check::new(G, "dim 6: SU(3)/T nontrivial", (|| {
        let r = transfer(3, &su3_inter(), t)?;
        expect(&r, 5, amax, false)
    })()));
    out.push(Check::new(G, "dim 8: trivial", (|| {
        let mut ok = true;
        for (a, b) in [(1, 0), (0, 1), (1, 1), (3, -5)] {
            let r = transfer(4, &[(0, 0), (1, a), (2, 0), (3, b), (4, 0)], t)?;
            ok &= verdict_at(&r, 6, amax)?.is_trivial();
        }
        Ok((ok, "<xy^3>, <x^3y> samples".into()))
    })()));
    out.push(Check::new(G, "dim 10: trivial", (|| {
        let mut ok = true;
        for (a, b) in [(4, 0), (0, 2), (4, 1), (-4, -2)] {
            // <x^3y^2> even and 4 | 2<x^3y^2> + <xy^4> force 4 | <xy^4>
            let r = transfer(5, &[(0, 0), (1, a), (2, 0), (3, 2 * b), (4, 0), (5, 0)], t)?;
            ok &= verdict_at(&r, 7, amax)?.is_trivial();
        }
        Ok((ok, "<xy^4>, <x^3y^2> samples".into()))
    })()));
    out.push(Check::new(G, "dim 12: G2/T nontrivial with class 1/2((E1^2 - 1)/12)^3", (|| {
        let r = transfer(6, &g2_inter(), t)?;
        let nu = f.nu();
        let cls = half(&(&(&nu * &nu) * &nu));
        let v = expect(&r, 8, amax, false)?;
        let same = expect(&(&r.truncate(t) - &cls), 8, amax, true)?;
        let sg = f.sigma();
        let differs = expect(&(&r.truncate(t) - &half(&(&sg * &sg))), 8, amax, false)?;
        Ok(both(both(v, same), differs))
    })()));
    out.push(Check::new(G, "dim 12: comparison series heads", (|| {
        let g8 = &g_star(8, t)? + &QSeries::constant(QZeta::from_rat(rat(1093, 240)), t);
        let a = heads_match(&g8, &[int(0), int(1), int(129), int(1), int(16513)]);
        let b = heads_match(&normalized_tail(&f.e8, &int(480)), &[int(0), int(1), int(129), int(2188), int(16513)]);
        let e1_8 = f.e1.pow(8);
        let c = heads_match(&normalized_tail(&e1_8, &int(48)), &[int(0), int(1), int(21), int(253), int(1933)]);
        let nu = f.nu();
        let d = heads_match(&half(&(&(&nu * &nu) * &nu)), &[int(0), int(0), int(0), rat(1, 2), rat(9, 2)]);
        let ok = a.0 && b.0 && c.0 && d.0;
        Ok((ok, "G8* + 1093/240, (E8 - 1)/480, (E1^8 - 1)/48".into()))
    })()));
    out
}

/// The full suite in a fixed order.
pub fn all_checks(order: usize, amax: usize) -> Result<Vec<Check>> {
    let f = Forms::new(order)?;
    let mut out = congruence_checks(&f, amax);
    out.extend(product_checks(&f, amax));
    out.extend(transfer_checks(&f, amax));
    Ok(out)
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
