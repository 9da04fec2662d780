//! Level-3 Hirzebruch elliptic genus as a power series in `x` whose `x^m`
//! coefficient is a weight-`m` form in `E1`, `E3`, with `omega = 2 pi i / 3`.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::eisenstein::{eisenstein_gamma3_odd, g_star};
use crate::error::Result;
use crate::modforms::{fit, sturm_bound, GradedForm, ModForm, FIT_MARGIN};
use crate::numtheory::{bernoulli, bernoulli_poly, factorial, int, rat, Rat};
use crate::qseries::{QSeries, QZeta};

/// Truncated series `sum_{m<=D} c_m x^m` with form-valued coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XSeries {
    coeffs: Vec<GradedForm>,
}

impl XSeries {
    pub fn new(coeffs: Vec<GradedForm>) -> Self {
        XSeries { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, m: usize) -> &GradedForm {
        &self.coeffs[m]
    }

    pub fn coeffs(&self) -> &[GradedForm] {
        &self.coeffs
    }

    /// `q = 0` values of the coefficients.
    pub fn constant_terms(&self) -> Vec<QZeta> {
        self.coeffs.iter().map(GradedForm::constant_term).collect()
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, g)| json!({"degree": m, "form": g.to_json()}))
            .collect();
        json!({"degree": self.degree(), "coeffs": coeffs})
    }
}

fn inv_factorial(n: usize) -> Rat {
    Rat::new(BigInt::one(), factorial(n))
}

fn fit_order(order: usize, m: usize) -> usize {
    order.max(sturm_bound(m) + FIT_MARGIN)
}

/// `log Ell` with even coefficients `3 G*_{2n}/(2n)!` and odd coefficients
/// `-2 G^{(-omega)}_{2k+1}/(2k+1)!`, where
/// `G^{(-omega)}_{2k+1} = (s/2) 3^{2k} (B_{2k+1}(1/3)/(2k+1)) E_{2k+1}`.
pub fn ell_log_series(degree: usize, order: usize) -> Result<XSeries> {
    let mut coeffs = vec![GradedForm::zero()];
    for m in 1..=degree {
        let t = fit_order(order, m);
        let form = if m % 2 == 0 {
            fit(&g_star(m, t)?, m)?.scale(&QZeta::from_rat(int(3) * inv_factorial(m)))
        } else {
            let e = fit(&eisenstein_gamma3_odd(m, t)?, m)?;
            let three = Rat::from_integer(num_traits::pow(BigInt::from(3), m - 1));
            let g_coeff = QZeta::s().scale(&(rat(1, 2) * three * bernoulli_poly(m, &rat(1, 3)) / int(m as i64)));
            e.scale(&g_coeff.scale(&(int(-2) * inv_factorial(m))))
        };
        coeffs.push(GradedForm::from(form));
    }
    Ok(XSeries { coeffs })
}

/// `exp` of a series without constant term, via `m F_m = sum_j j L_j F_{m-j}`.
pub fn exp_series(log: &XSeries) -> XSeries {
    let d = log.degree();
    let mut f = vec![GradedForm::constant(QZeta::one())];
    for m in 1..=d {
        let mut acc = GradedForm::zero();
        for j in 1..=m {
            let term = log.coeffs[j].mul(&f[m - j]).scale(&QZeta::from_int(j as i64));
            acc = acc.add(&term);
        }
        f.push(acc.scale(&QZeta::from_rat(Rat::one() / int(m as i64))));
    }
    XSeries { coeffs: f }
}

/// `Ell(x)`; the `x^m` coefficient is homogeneous of weight `m`.
pub fn ell_series(degree: usize, order: usize) -> Result<XSeries> {
    Ok(exp_series(&ell_log_series(degree, order)?))
}

/// `Ell_0 = Ell|_{q=0}`, as weight-0 coefficients.
pub fn ell0_series(degree: usize) -> Result<XSeries> {
    let ell = ell_series(degree, 0)?;
    Ok(XSeries {
        coeffs: ell.coeffs.iter().map(|g| GradedForm::constant(g.constant_term())).collect(),
    })
}

/// `Ell~ = Ell - Ell_0`; each `x^m` coefficient has parts in weights `m` and `0`.
pub fn ell_tilde(degree: usize, order: usize) -> Result<XSeries> {
    let ell = ell_series(degree, order)?;
    let coeffs = ell
        .coeffs
        .iter()
        .map(|g| g.sub(&GradedForm::constant(g.constant_term())))
        .collect();
    Ok(XSeries { coeffs })
}

/// `x/(1 - e^{-x}) = sum B_k(1) x^k / k!`.
pub fn todd_series(degree: usize) -> Vec<Rat> {
    (0..=degree).map(|k| bernoulli(k) * inv_factorial(k)).collect()
}

/// `Ell~` coefficient of `x^m` as a q-expansion; its constant term is zero.
pub fn ell_tilde_expansion(tilde: &XSeries, m: usize, order: usize) -> QSeries {
    tilde.coeff(m).expand(order)
}

/// Polynomial in `E1`, `E3` of weight `m` with rational coefficients `c_b`.
pub fn rational_form(m: usize, c: &[(i64, i64)]) -> ModForm {
    ModForm::from_rats(m, c.iter().map(|&(p, q)| rat(p, q)).collect()).expect("weight matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::normalized_tail;
    use num_traits::Zero;

    fn s_times(m: ModForm) -> GradedForm {
        GradedForm::from(m.scale(&QZeta::s()))
    }

    #[test]
    fn genus_table() {
        let ell = ell_series(6, 20).unwrap();
        assert_eq!(ell.coeff(0), &GradedForm::constant(QZeta::one()));
        assert_eq!(ell.coeff(1), &s_times(rational_form(1, &[(1, 6)])));
        assert_eq!(ell.coeff(2), &GradedForm::from(rational_form(2, &[(1, 12)])));
        assert_eq!(ell.coeff(3), &s_times(rational_form(3, &[(1, 54), (-1, 54)])));
        assert_eq!(ell.coeff(4), &GradedForm::from(rational_form(4, &[(13, 2160), (-16, 2160)])));
        assert_eq!(ell.coeff(5), &s_times(rational_form(5, &[(1, 648), (-1, 648)])));
        assert_eq!(
            ell.coeff(6),
            &GradedForm::from(rational_form(6, &[(121, 272160), (-152, 272160), (40, 272160)]))
        );
    }

    #[test]
    fn log_coefficients() {
        let log = ell_log_series(3, 20).unwrap();
        assert_eq!(log.coeff(2), &GradedForm::from(rational_form(2, &[(1, 8)])));
        // c_3^{(-omega)} = (e^{-omega} - e^{omega}) 9 B_3(1/3) = -s/3
        let c3 = QZeta::s().scale(&(int(-9) * bernoulli_poly(3, &rat(1, 3))));
        assert_eq!(c3, QZeta::s().scale(&rat(-1, 3)));
    }

    #[test]
    fn todd_values() {
        let t = todd_series(6);
        assert_eq!(t[0], int(1));
        assert_eq!(t[1], rat(1, 2));
        assert_eq!(t[2], rat(1, 12));
        assert_eq!(t[4], rat(-1, 720));
        assert_eq!(t[6], rat(1, 30240));
        assert!(t[3].is_zero() && t[5].is_zero());
    }

    #[test]
    fn q_zero_matches_todd_in_even_degree() {
        let c = ell0_series(6).unwrap().constant_terms();
        let t = todd_series(6);
        for m in [2, 4, 6] {
            assert_eq!(c[m], QZeta::from_rat(t[m].clone()));
        }
        assert_eq!(c[4], QZeta::from_rat(rat(-1, 720)));
    }

    #[test]
    fn ell0_closed_form() {
        // Ell_0(x) = x/(1 - e^{-x}) + zeta/(1 - zeta) x
        let c = ell0_series(8).unwrap().constant_terms();
        let t = todd_series(8);
        let z = QZeta::zeta();
        let shift = &z * &(QZeta::one() - z.clone()).inv().unwrap();
        for (m, cm) in c.iter().enumerate() {
            let mut want = QZeta::from_rat(t[m].clone());
            if m == 1 {
                want += &shift;
            }
            assert_eq!(cm, &want, "x^{m}");
        }
    }

    #[test]
    fn tilde_coefficients() {
        let tilde = ell_tilde(4, 20).unwrap();
        let x2 = ell_tilde_expansion(&tilde, 2, 20);
        let e1 = eisenstein_gamma3_odd(1, 20).unwrap();
        assert_eq!(x2, normalized_tail(&(&e1 * &e1), &int(12)));
        for m in 0..=4 {
            assert!(ell_tilde_expansion(&tilde, m, 10).coeff(0).is_zero());
        }
        assert_eq!(tilde.coeff(4).part(0).unwrap().constant_term(), QZeta::from_rat(rat(1, 720)));
    }

    #[test]
    fn eta_hat_generating_series() {
        // e^t/(e^t - 1) - 1/t = (sum_{n>=2} (n-1)/n! t^n) / (sum_{n>=2} t^n/(n-1)!) after cancelling t^2
        let n = 22;
        let num: Vec<Rat> = (2..=n + 2).map(|k| int(k as i64 - 1) * inv_factorial(k)).collect();
        let den: Vec<Rat> = (2..=n + 2).map(|k| inv_factorial(k - 1)).collect();
        let num = QSeries::from_rats(num);
        let den = QSeries::from_rats(den);
        let quotient = &num * &den.inverse().unwrap();
        for k in 0..=20 {
            let want = bernoulli(k + 1) * inv_factorial(k + 1);
            assert_eq!(quotient.coeff(k), &QZeta::from_rat(want), "t^{k}");
        }
    }

    #[test]
    fn multiplicative_at_q_zero() {
        // exp(L0(x) + L0(y)) = Ell0(x) Ell0(y) through total degree 6
        let d = 6;
        let l0: Vec<QZeta> = ell_log_series(d, 0).unwrap().coeffs().iter().map(GradedForm::constant_term).collect();
        let e0 = ell0_series(d).unwrap().constant_terms();
        // bivariate truncated polynomials indexed [i][j]
        let mut log2 = vec![vec![QZeta::zero(); d + 1]; d + 1];
        for m in 1..=d {
            log2[m][0] += &l0[m];
            log2[0][m] += &l0[m];
        }
        let mul = |a: &Vec<Vec<QZeta>>, b: &Vec<Vec<QZeta>>| {
            let mut c = vec![vec![QZeta::zero(); d + 1]; d + 1];
            for i1 in 0..=d {
                for j1 in 0..=d - i1 {
                    if a[i1][j1].is_zero() {
                        continue;
                    }
                    for i2 in 0..=d - i1 - j1 {
                        for j2 in 0..=d - i1 - j1 - i2 {
                            c[i1 + i2][j1 + j2] += &(&a[i1][j1] * &b[i2][j2]);
                        }
                    }
                }
            }
            c
        };
        let mut exp = vec![vec![QZeta::zero(); d + 1]; d + 1];
        exp[0][0] = QZeta::one();
        let mut power = exp.clone();
        for k in 1..=d {
            power = mul(&power, &log2);
            let f = Rat::new(BigInt::one(), factorial(k));
            for i in 0..=d {
                for j in 0..=d - i {
                    exp[i][j] += &power[i][j].scale(&f);
                }
            }
        }
        for i in 0..=d {
            for j in 0..=d - i {
                assert_eq!(exp[i][j], &e0[i] * &e0[j], "x^{i} y^{j}");
            }
        }
    }
}
