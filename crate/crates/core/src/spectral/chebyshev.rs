//! Chebyshev polynomials and the extremal polynomials `p_n` built from them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// `T_n(x)` by the three-term recurrence.
pub fn chebyshev_recurrence(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        (prev, cur) = (cur, 2.0 * x * cur - prev);
    }
    cur
}

/// `T_n(x)` for `x >= 1` from `(x + sqrt(x^2-1))^n`, using
/// `x - sqrt(x^2-1) = 1 / (x + sqrt(x^2-1))` to avoid cancellation.
pub fn chebyshev_closed_form(n: u32, x: f64) -> f64 {
    debug_assert!(x >= 1.0);
    let root = x + (x * x - 1.0).sqrt();
    let up = root.powi(n as i32);
    0.5 * (up + 1.0 / up)
}

/// `T_n(x)` for any real `x`.
pub fn chebyshev(n: u32, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        chebyshev_recurrence(n, x)
    } else if x > 1.0 {
        chebyshev_closed_form(n, x)
    } else {
        let v = chebyshev_closed_form(n, -x);
        if n.is_multiple_of(2) {
            v
        } else {
            -v
        }
    }
}

/// `ln(T_n(x) + 1)`; finite for every `x >= 1` even when `T_n(x)` overflows.
pub fn ln_chebyshev_plus_one(n: u32, x: f64) -> f64 {
    if x > 1.0 {
        // T + 1 = (e^{L/2} + e^{-L/2})^2 / 2 with L = n ln(x + sqrt(x^2-1))
        let l = n as f64 * (x + (x * x - 1.0).sqrt()).ln();
        l + 2.0 * (-l).exp().ln_1p() - std::f64::consts::LN_2
    } else {
        (chebyshev(n, x) + 1.0).max(0.0).ln()
    }
}

/// Chebyshev polynomial `T_n` with exact coefficients.
pub fn chebyshev_polynomial(n: u32) -> Polynomial {
    let (mut prev, mut cur) = (Polynomial::from_integers(&[1]), Polynomial::x());
    if n == 0 {
        return prev;
    }
    let two_x = Polynomial::from_integers(&[0, 2]);
    for _ in 1..n {
        let next = two_x.mul(&cur).add(&prev.scale(&-BigRational::one()));
        prev = cur;
        cur = next;
    }
    cur
}

/// `p_n(x) = (T_n(l(x)) + 1) / (T_n(l(0)) + 1)` with
/// `l(x) = -2x/(1-z) + (1+z)/(1-z)`, so that `l(z) = 1`, `l(1) = -1`.
/// It has degree `n`, `p_n(0) = 1`, is nonnegative on `[0, 1]`, decreases on
/// `[0, z]` and is at most `p_n(z)` on `[z, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LuckPolynomial {
    pub n: u32,
    pub z: f64,
    ln_norm: f64,
}

pub fn luck_polynomial(n: u32, z: f64) -> Result<LuckPolynomial> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::DegenerateZ(z));
    }
    let l0 = (1.0 + z) / (1.0 - z);
    Ok(LuckPolynomial {
        n,
        z,
        ln_norm: ln_chebyshev_plus_one(n, l0),
    })
}

impl LuckPolynomial {
    pub fn l(&self, x: f64) -> f64 {
        -2.0 * x / (1.0 - self.z) + (1.0 + self.z) / (1.0 - self.z)
    }

    /// `ln p_n(x)`; `-inf` at zeros of `p_n`.
    pub fn ln_value(&self, x: f64) -> f64 {
        ln_chebyshev_plus_one(self.n, self.l(x)) - self.ln_norm
    }

    pub fn value(&self, x: f64) -> f64 {
        self.ln_value(x).exp()
    }

    /// `2 / T_n(l(0))`, the bound on `p_n(z)` used in the `J` estimate.
    pub fn tail_bound(&self) -> f64 {
        let l0 = self.l(0.0);
        2.0 / chebyshev(self.n, l0)
    }

    /// `p_n(a) / p_n(b)`.
    pub fn ratio(&self, a: f64, b: f64) -> f64 {
        (self.ln_value(a) - self.ln_value(b)).exp()
    }
}

/// `p_n` with exact rational coefficients, for rational `z` in `(0, 1)`.
pub fn luck_polynomial_exact(n: u32, z: &BigRational) -> Result<Polynomial> {
    let one = BigRational::one();
    if !(z > &BigRational::zero() && z < &one) {
        return Err(Error::DegenerateZ(num_traits::ToPrimitive::to_f64(z).unwrap_or(f64::NAN)));
    }
    let denom = &one - z;
    let l = Polynomial::new(vec![(&one + z) / &denom, BigRational::from_integer(BigInt::from(-2)) / &denom]);
    let numerator = chebyshev_polynomial(n).compose(&l).add(&Polynomial::constant(one.clone()));
    let at_zero = numerator.eval(&BigRational::zero());
    Ok(numerator.scale(&(one / at_zero)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_values() {
        assert!((chebyshev(2, 0.3) + 0.82).abs() < 1e-15);
        assert!((chebyshev(3, 0.5) - (4.0 * 0.125 - 1.5)).abs() < 1e-15);
        for n in 0..=30 {
            assert!((chebyshev(n, 1.0) - 1.0).abs() < 1e-12);
        }
        let theta = std::f64::consts::PI / 5.0;
        assert!((chebyshev(3, theta.cos()) - (3.0 * theta).cos()).abs() < 1e-12);
        assert!((chebyshev(3, -2.0) + chebyshev(3, 2.0)).abs() < 1e-9);
    }

    #[test]
    fn closed_form_matches_recurrence() {
        for n in 0..=40 {
            for k in 0..=90 {
                let x = 1.0 + k as f64 * 0.1;
                let a = chebyshev_recurrence(n, x);
                let b = chebyshev_closed_form(n, x);
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn first_luck_polynomial_is_linear() {
        let p = luck_polynomial(1, 0.5).unwrap();
        assert!((p.value(0.5) - 0.5).abs() < 1e-14);
        assert!((p.value(0.0) - 1.0).abs() < 1e-14);
        let exact = luck_polynomial_exact(1, &BigRational::new(1.into(), 2.into())).unwrap();
        assert_eq!(exact, Polynomial::from_integers(&[1, -1]));
    }

    #[test]
    fn luck_polynomial_shape() {
        let z = 0.25;
        let p = luck_polynomial(8, z).unwrap();
        let rz = z.sqrt();
        assert!(p.value(z) <= 4.0 * ((1.0 + rz) / (1.0 - rz)).powi(-8) + 1e-12);
        assert!(p.value(z) <= p.tail_bound() + 1e-15);
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            assert!(p.value(x) >= 0.0 && p.value(x) <= 1.0 + 1e-12);
            if x >= z {
                assert!(p.value(x) <= p.value(z) * (1.0 + 1e-9));
            }
        }
        assert!(matches!(luck_polynomial(3, 1.0), Err(Error::DegenerateZ(_))));
        assert!(matches!(luck_polynomial(3, 0.0), Err(Error::DegenerateZ(_))));
    }

    #[test]
    fn exact_luck_polynomial_is_normalised() {
        let z = BigRational::new(1.into(), 7.into());
        for n in [1, 2, 5, 12] {
            let p = luck_polynomial_exact(n, &z).unwrap();
            assert_eq!(p.eval(&BigRational::zero()), BigRational::one());
            assert_eq!(p.degree(), n as usize);
            let float = luck_polynomial(n, 1.0 / 7.0).unwrap();
            for x in [0.1, 0.4, 0.9] {
                assert!((p.eval_f64(x) - float.value(x)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn huge_degrees_stay_finite() {
        let p = luck_polynomial(5000, 0.3).unwrap();
        assert!(p.value(0.3) < 1e-200);
        assert!(p.ln_value(0.3).is_finite());
        assert!((p.value(0.0) - 1.0).abs() < 1e-12);
    }
}
