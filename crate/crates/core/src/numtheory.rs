//! Exact number-theoretic helpers: Bernoulli numbers and polynomials,
//! divisor sums, the Legendre symbol mod 3, and p-adic valuations.
//!
//! **Bernoulli convention.** Throughout this crate `B_n` means `B_n(1)`, so
//! `B_1 = +1/2`. Most tables use `B_1 = -1/2` (that is `B_1(0)`); the two
//! conventions agree for every `n != 1`.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

static BERNOULLI_AT_ZERO: OnceLock<Mutex<Vec<Rat>>> = OnceLock::new();

/// `B_n(0)` from `sum_{k<=n} C(n+1,k) B_k(0) = 0`, memoized.
fn bernoulli_at_zero(n: usize) -> Rat {
    let cache = BERNOULLI_AT_ZERO.get_or_init(|| Mutex::new(vec![Rat::one()]));
    let mut table = cache.lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= n {
        let m = table.len();
        let mut acc = Rat::zero();
        for (k, b) in table.iter().enumerate() {
            acc += Rat::from_integer(binomial(m + 1, k)) * b;
        }
        let next = -acc / int(m as i64 + 1);
        table.push(next);
    }
    table[n].clone()
}

/// `B_n = B_n(1)`; in particular `bernoulli(1) == 1/2`.
pub fn bernoulli(n: usize) -> Rat {
    let b = bernoulli_at_zero(n);
    if n == 1 {
        -b
    } else {
        b
    }
}

/// Bernoulli polynomial `B_n(x) = sum_k C(n,k) B_k(0) x^(n-k)`.
pub fn bernoulli_poly(n: usize, x: &Rat) -> Rat {
    // Horner in x over the coefficients C(n,k) B_k(0), highest power first.
    let mut acc = Rat::zero();
    for k in 0..=n {
        acc = acc * x + Rat::from_integer(binomial(n, k)) * bernoulli_at_zero(k);
    }
    acc
}

/// Denominator `d_{2k}` of `B_{2k} / 2k` in lowest terms.
pub fn bernoulli_denominator(two_k: usize) -> Result<BigInt> {
    if two_k < 2 || two_k % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "bernoulli_denominator needs an even argument >= 2, got {two_k}"
        )));
    }
    let q = bernoulli(two_k) / int(two_k as i64);
    Ok(q.denom().clone())
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Legendre symbol `(d/3)`: `-1, 0, 1` for `d = -1, 0, 1 mod 3`.
pub fn legendre3(d: i64) -> i32 {
    match d.rem_euclid(3) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorFilter {
    /// `sigma_k(n) = sum_{d|n} d^k`
    All,
    /// `sum_{d|n} (d/3) d^k`
    Legendre3,
    /// `sum_{d|n, 3 !| d} d^k`
    PrimeTo3,
}

pub fn divisor_sum(k: u32, n: u64, filter: DivisorFilter) -> BigInt {
    assert!(n >= 1, "divisor_sum needs n >= 1");
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            let e = n / d;
            acc += weighted_power(d, k, filter);
            if e != d {
                acc += weighted_power(e, k, filter);
            }
        }
        d += 1;
    }
    acc
}

fn weighted_power(d: u64, k: u32, filter: DivisorFilter) -> BigInt {
    let p = num_traits::pow(BigInt::from(d), k as usize);
    match filter {
        DivisorFilter::All => p,
        DivisorFilter::Legendre3 => p * legendre3(d as i64),
        DivisorFilter::PrimeTo3 => {
            if d % 3 == 0 {
                BigInt::zero()
            } else {
                p
            }
        }
    }
}

/// p-adic valuation; zero has valuation `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

pub fn val_p_int(x: &BigInt, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        x = q;
        v += 1;
    }
    Valuation::Finite(v)
}

pub fn val_p(x: &Rat, p: u64) -> Valuation {
    match (val_p_int(x.numer(), p), val_p_int(x.denom(), p)) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        _ => Valuation::Infinite,
    }
}

/// Strip every factor of 3 from a nonzero integer.
pub fn three_free(x: &BigInt) -> BigInt {
    let three = BigInt::from(3);
    let mut x = x.clone();
    while !x.is_zero() && (&x % &three).is_zero() {
        x /= &three;
    }
    x
}

/// Membership in `Z[1/3]`: the reduced denominator is a power of 3.
pub fn is_three_integral(x: &Rat) -> bool {
    three_free(x.denom()).is_one()
}

/// Canonical representative of `x` modulo `Z[1/3]`: the unique `r/m` in
/// `[0, 1)` with `m` prime to 3 and `x - r/m` in `Z[1/3]`.
pub fn reduce_mod_three_integers(x: &Rat) -> Rat {
    let m = three_free(x.denom());
    if m.is_one() {
        return Rat::zero();
    }
    // x = a / (3^j m)
    let three_pow = x.denom() / &m;
    let inv = mod_inverse(&(three_pow % &m), &m).expect("3 is invertible modulo a 3-free modulus");
    let r = (x.numer() * inv).mod_floor(&m);
    Rat::new(r, m)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

pub fn to_i64(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn bernoulli_recurrence_oracle() {
        // sum_{k<n} C(n,k) B_k(0) = 0 for n >= 2, with B_k(0) = B_k except k = 1.
        for n in 2..30 {
            let mut acc = Rat::zero();
            for k in 0..n {
                let bk0 = if k == 1 { rat(-1, 2) } else { bernoulli(k) };
                acc += Rat::from_integer(binomial(n, k)) * bk0;
            }
            assert!(acc.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn bernoulli_poly_values() {
        assert_eq!(bernoulli_poly(3, &rat(1, 3)), rat(1, 27));
        assert_eq!(bernoulli_poly(2, &int(1)), rat(1, 6));
        assert_eq!(bernoulli_poly(1, &int(1)), rat(1, 2));
        assert_eq!(bernoulli_poly(1, &int(0)), rat(-1, 2));
        assert_eq!(bernoulli_poly(5, &rat(1, 3)), rat(-5, 243));
        // explicit cubic x^3 - 3/2 x^2 + 1/2 x
        let x = rat(2, 7);
        let cubic = &x * &x * &x - rat(3, 2) * &x * &x + rat(1, 2) * &x;
        assert_eq!(bernoulli_poly(3, &x), cubic);
    }

    #[test]
    fn bernoulli_poly_at_one_matches_convention() {
        for n in 0..20 {
            assert_eq!(bernoulli_poly(n, &int(1)), bernoulli(n));
        }
    }

    #[test]
    fn denominators() {
        assert_eq!(bernoulli_denominator(2).unwrap(), BigInt::from(12));
        assert_eq!(bernoulli_denominator(4).unwrap(), BigInt::from(120));
        let d8 = bernoulli_denominator(8).unwrap();
        assert_eq!(val_p_int(&d8, 2), Valuation::Finite(4));
        assert_eq!(d8, BigInt::from(240));
        assert!(bernoulli_denominator(3).is_err());
        assert!(bernoulli_denominator(0).is_err());
    }

    #[test]
    fn von_staudt_two_adic_sharpness() {
        for two_k in (2..=40).step_by(2) {
            let d = bernoulli_denominator(two_k).unwrap();
            let v2k = val_p_int(&BigInt::from(two_k), 2).finite().unwrap();
            assert_eq!(val_p_int(&d, 2), Valuation::Finite(v2k + 1), "2k = {two_k}");
        }
    }

    #[test]
    fn legendre() {
        assert_eq!(legendre3(1), 1);
        assert_eq!(legendre3(2), -1);
        assert_eq!(legendre3(6), 0);
        assert_eq!(legendre3(-1), -1);
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(divisor_sum(1, 2, DivisorFilter::PrimeTo3), BigInt::from(3));
        assert_eq!(divisor_sum(0, 2, DivisorFilter::Legendre3), BigInt::from(0));
        assert_eq!(divisor_sum(3, 4, DivisorFilter::All), BigInt::from(73));
        assert_eq!(divisor_sum(1, 9, DivisorFilter::PrimeTo3), BigInt::from(1));
        assert_eq!(divisor_sum(2, 4, DivisorFilter::Legendre3), BigInt::from(1 - 4 + 16));
    }

    #[test]
    fn legendre_weighted_parity() {
        for n in 1..=200u64 {
            let a = divisor_sum(2, n, DivisorFilter::Legendre3);
            let b = divisor_sum(1, n, DivisorFilter::PrimeTo3);
            assert!(((a - b) % BigInt::from(2)).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn valuations() {
        assert_eq!(val_p(&rat(1, 8), 2), Valuation::Finite(-3));
        assert_eq!(val_p(&int(9), 3), Valuation::Finite(2));
        assert_eq!(val_p(&int(0), 5), Valuation::Infinite);
        assert!(Valuation::Finite(1000) < Valuation::Infinite);
    }

    #[test]
    fn three_integral_reduction() {
        assert!(is_three_integral(&rat(5, 27)));
        assert!(!is_three_integral(&rat(1, 6)));
        assert_eq!(reduce_mod_three_integers(&rat(3, 80)), rat(3, 80));
        assert_eq!(reduce_mod_three_integers(&rat(83, 80)), rat(3, 80));
        assert_eq!(reduce_mod_three_integers(&rat(7, 9)), int(0));
        // 1/6 = 1/(3*2): 1/6 - r/2 in Z[1/3] needs r = 1
        assert_eq!(reduce_mod_three_integers(&rat(1, 6)), rat(1, 2));
        let x = rat(-17, 36);
        let r = reduce_mod_three_integers(&x);
        assert!(is_three_integral(&(x - &r)));
        assert!(r >= int(0) && r < int(1));
    }

    #[test]
    fn multiplication_theorem() {
        for n in 0..=12 {
            for m in [2usize, 3] {
                for x in [rat(1, 3), rat(1, 2), int(1)] {
                    let lhs = bernoulli_poly(n, &(&x * int(m as i64)));
                    let mut rhs = Rat::zero();
                    for k in 0..m {
                        rhs += bernoulli_poly(n, &(&x + rat(k as i64, m as i64)));
                    }
                    let scale = num_traits::pow(int(m as i64), n.saturating_sub(1));
                    let rhs = if n == 0 { rhs / int(m as i64) } else { rhs * scale };
                    assert_eq!(lhs, rhs, "n={n} m={m} x={x}");
                }
            }
        }
    }

    #[test]
    fn reflection() {
        for n in 0..=15 {
            for x in [rat(1, 3), rat(2, 5), rat(-3, 7), int(2)] {
                let lhs = bernoulli_poly(n, &(int(1) - &x));
                let rhs = bernoulli_poly(n, &x) * if n % 2 == 0 { int(1) } else { int(-1) };
                assert_eq!(lhs, rhs);
            }
        }
    }
}
