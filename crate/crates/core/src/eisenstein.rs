//! Eisenstein series: level one `E_k`, the odd `Gamma1(3)` series and `G*_{2n}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numtheory::{bernoulli, bernoulli_poly, divisor_sum, int, rat, DivisorFilter, Rat};
use crate::qseries::{QSeries, QZeta};

/// `E_2` is holomorphic but only quasi-modular.
pub fn is_modular_level1(k: usize) -> bool {
    k >= 4 && k % 2 == 0
}

fn series_from(constant: Rat, factor: &Rat, order: usize, coeff: impl Fn(u64) -> BigInt) -> QSeries {
    let mut c = Vec::with_capacity(order + 1);
    c.push(constant);
    for n in 1..=order {
        c.push(factor * Rat::from_integer(coeff(n as u64)));
    }
    QSeries::from_rats(c)
}

/// `E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n` for even `k >= 2`.
pub fn eisenstein_level1(k: usize, order: usize) -> Result<QSeries> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("level-1 Eisenstein series need even k >= 2, got {k}")));
    }
    let factor = -int(2 * k as i64) / bernoulli(k);
    Ok(series_from(Rat::one(), &factor, order, |n| divisor_sum(k as u32 - 1, n, DivisorFilter::All)))
}

/// Normalized odd Eisenstein series for `Gamma1(3)`:
/// `E_{2n+1} = 1 - (2n+1)/(3^{2n} B_{2n+1}(1/3)) sum_l (sum_{d|l} (d/3) d^{2n}) q^l`.
pub fn eisenstein_gamma3_odd(k: usize, order: usize) -> Result<QSeries> {
    if k % 2 != 1 {
        return Err(Error::InvalidArgument(format!("odd Gamma1(3) Eisenstein series need odd k >= 1, got {k}")));
    }
    let two_n = k - 1;
    let b = bernoulli_poly(k, &rat(1, 3));
    let factor = -int(k as i64) / (Rat::from_integer(num_traits::pow(BigInt::from(3), two_n)) * b);
    Ok(series_from(Rat::one(), &factor, order, |l| divisor_sum(two_n as u32, l, DivisorFilter::Legendre3)))
}

fn check_even(two_n: usize) -> Result<()> {
    if two_n < 2 || two_n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("G* needs an even weight >= 2, got {two_n}")));
    }
    Ok(())
}

/// `G*_{2n}(tau) = G_{2n}(tau) - 3^{2n-1} G_{2n}(3 tau)` with `G_{2n} = -(B_{2n}/4n) E_{2n}`.
pub fn g_star(two_n: usize, order: usize) -> Result<QSeries> {
    check_even(two_n)?;
    let g = eisenstein_level1(two_n, order)?.scale_rat(&(-bernoulli(two_n) / int(2 * two_n as i64)));
    let three_pow = Rat::from_integer(num_traits::pow(BigInt::from(3), two_n - 1));
    Ok(&g - &g.substitute_q_power(3).scale_rat(&three_pow))
}

/// Constant term of `G*_{2n}`: `-(B_{2n}/4n)(1 - 3^{2n-1})`.
pub fn g_star_constant(two_n: usize) -> Result<Rat> {
    check_even(two_n)?;
    let three_pow = Rat::from_integer(num_traits::pow(BigInt::from(3), two_n - 1));
    Ok(-bernoulli(two_n) / int(2 * two_n as i64) * (Rat::one() - three_pow))
}

/// `G*_{2n}` from prime-to-3 divisor sums.
pub fn g_star_direct(two_n: usize, order: usize) -> Result<QSeries> {
    let c = g_star_constant(two_n)?;
    Ok(series_from(c, &Rat::one(), order, |n| divisor_sum(two_n as u32 - 1, n, DivisorFilter::PrimeTo3)))
}

/// `(f - f(0)) / c` for rescaling displays like `(E_4 - 1)/240`.
pub fn normalized_tail(f: &QSeries, c: &Rat) -> QSeries {
    assert!(!c.is_zero());
    f.without_constant().scale_rat(&(Rat::one() / c))
}

/// Coefficients of a rational series as `Rat`s, for tests and displays.
pub fn rational_coeffs(f: &QSeries) -> Option<Vec<Rat>> {
    f.coeffs().iter().map(|c| if c.is_rational() { Some(c.re.clone()) } else { None }).collect()
}

pub fn constant(f: &QSeries) -> &QZeta {
    f.coeff(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(f: &QSeries, n: usize) -> Vec<Rat> {
        rational_coeffs(f).unwrap()[..n].to_vec()
    }

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn level_one_heads() {
        assert_eq!(ints(&eisenstein_level1(4, 5).unwrap(), 3), v(&[1, 240, 2160]));
        assert_eq!(ints(&eisenstein_level1(6, 5).unwrap(), 2), v(&[1, -504]));
        assert_eq!(ints(&eisenstein_level1(2, 5).unwrap(), 3), v(&[1, -24, -72]));
        assert!(eisenstein_level1(3, 5).is_err());
        assert!(!is_modular_level1(2));
    }

    #[test]
    fn odd_heads() {
        assert_eq!(ints(&eisenstein_gamma3_odd(1, 6).unwrap(), 5), v(&[1, 6, 0, 6, 6]));
        assert_eq!(ints(&eisenstein_gamma3_odd(3, 6).unwrap(), 3), v(&[1, -9, 27]));
        let e5 = eisenstein_gamma3_odd(5, 4).unwrap();
        assert_eq!(ints(&normalized_tail(&e5, &int(3)), 5), v(&[0, 1, -15, 1, 241]));
        assert!(eisenstein_gamma3_odd(4, 4).is_err());
    }

    #[test]
    fn e8_is_e4_squared() {
        let e4 = eisenstein_level1(4, 30).unwrap();
        assert_eq!(eisenstein_level1(8, 30).unwrap(), &e4 * &e4);
    }

    #[test]
    fn g_star_routes_agree() {
        for two_n in [2, 4, 6, 8] {
            assert_eq!(g_star(two_n, 40).unwrap(), g_star_direct(two_n, 40).unwrap(), "2n = {two_n}");
        }
        assert_eq!(g_star_constant(2).unwrap(), rat(1, 12));
        assert_eq!(g_star_constant(4).unwrap(), rat(-13, 120));
        assert_eq!(g_star_constant(6).unwrap(), rat(121, 252));
        assert_eq!(g_star_constant(8).unwrap(), rat(-1093, 240));
        assert!(g_star(3, 5).is_err());
    }

    #[test]
    fn e1_squared_congruence() {
        let e1 = eisenstein_gamma3_odd(1, 40).unwrap();
        let f = normalized_tail(&(&e1 * &e1), &int(12));
        assert!(f.is_integral());
        assert_eq!(ints(&f, 3), v(&[0, 1, 3]));
        assert!(normalized_tail(&e1, &int(6)).is_integral());
        assert!(!normalized_tail(&eisenstein_level1(4, 5).unwrap(), &int(480)).is_integral());
    }
}
