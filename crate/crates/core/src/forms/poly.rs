//! Invariant polynomials of curvature forms and their transgressions.
//!
//! Curvatures are anti-Hermitian (or real antisymmetric for frame
//! bundles), so each power of the curvature carries a factor `i / 2 pi`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{curvature, FormField};
use crate::linalg::{CMat, C64};
use crate::quadrature::Rule;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvariantPolynomial {
    /// `ch_k = (1/k!) tr (i F / 2 pi)^k`, a `2k`-form.
    Chern(usize),
    /// Degree-4 part of the A-hat genus, `-p_1 / 24` with
    /// `p_1 = -(1 / 8 pi^2) tr R^2`.
    AHat4,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn power(f: &FormField, k: usize) -> Result<FormField> {
    let mut out = f.clone();
    for _ in 1..k {
        out = out.wedge(f)?;
    }
    Ok(out)
}

fn one(like: &FormField, rank: usize) -> Result<FormField> {
    FormField::constant(like.lengths(), like.grid(), CMat::identity(rank, rank))
}

fn check_curvature(f: &FormField) -> Result<()> {
    if f.degree() != 2 {
        return Err(Error::Degree(format!("curvature must be a 2-form, got degree {}", f.degree())));
    }
    Ok(())
}

impl InvariantPolynomial {
    /// Form degree of the polynomial.
    pub fn degree(&self) -> usize {
        match self {
            InvariantPolynomial::Chern(k) => 2 * k,
            InvariantPolynomial::AHat4 => 4,
        }
    }

    /// Number of curvature factors.
    pub fn order(&self) -> usize {
        self.degree() / 2
    }

    /// Scalar prefactor `c` such that the polynomial is `c tr F^k`.
    fn prefactor(&self) -> C64 {
        match *self {
            InvariantPolynomial::Chern(k) => C64::new(0.0, 1.0 / (2.0 * PI)).powi(k as i32) / factorial(k),
            InvariantPolynomial::AHat4 => C64::new(1.0 / (192.0 * PI * PI), 0.0),
        }
    }

    /// Evaluates the polynomial on a curvature 2-form, giving a scalar form.
    pub fn evaluate(&self, f: &FormField) -> Result<FormField> {
        check_curvature(f)?;
        if self.degree() > f.dim() {
            return Err(Error::Degree(format!(
                "polynomial of degree {} on a {}-dimensional space",
                self.degree(),
                f.dim()
            )));
        }
        if self.order() == 0 {
            return one(f, 1).map(|o| o.scaled(C64::new(f.rank() as f64, 0.0)));
        }
        Ok(power(f, self.order())?.trace().scaled(self.prefactor()))
    }
}

/// `[ch_0, ch_1, ..., ch_max]` of a curvature 2-form.
pub fn chern_character(f: &FormField, max_degree: usize) -> Result<Vec<FormField>> {
    (0..=max_degree)
        .map(|k| InvariantPolynomial::Chern(k).evaluate(f))
        .collect()
}

/// Coefficients `c_j` of `log(x / sinh x) = sum_j c_j x^{2j}` for
/// `j = 0..=order`, from the power series of `sinh x / x`.
pub fn a_hat_series_coefficients(order: usize) -> Vec<f64> {
    let a: Vec<f64> = (0..=order).map(|j| 1.0 / factorial(2 * j + 1)).collect();
    // b = log a as a series in u = x^2, via u b' a = u a'
    let mut b = vec![0.0; order + 1];
    for j in 1..=order {
        let conv: f64 = (1..j).map(|k| k as f64 * b[k] * a[j - k]).sum();
        b[j] = (j as f64 * a[j] - conv) / j as f64;
    }
    b.iter().map(|v| -v).collect()
}

/// A-hat genus `det^{1/2}((X/2) / sinh(X/2))` with `X = i R / 2 pi`,
/// from the logarithm series; returns `[A_0]` on spaces of dimension
/// below 4 and `[A_0, A_4]` otherwise.
pub fn a_hat(r: &FormField) -> Result<Vec<FormField>> {
    check_curvature(r)?;
    let mut out = vec![one(r, 1)?];
    if r.dim() >= 4 {
        let c = a_hat_series_coefficients(1)[1];
        let half_x = r.scaled(C64::new(0.0, 1.0 / (4.0 * PI)));
        out.push(half_x.wedge(&half_x)?.trace().scaled(C64::new(0.5 * c, 0.0)));
    }
    Ok(out)
}

/// `T P(conn1, conn0) = k int_0^1 dt P(conn1 - conn0, F_t, ..., F_t)`,
/// a form of degree `deg P - 1` with `d T P = P(F_1) - P(F_0)`.
pub fn transgression(p: InvariantPolynomial, conn0: &FormField, conn1: &FormField) -> Result<FormField> {
    if conn0.degree() != 1 || conn1.degree() != 1 {
        return Err(Error::Degree("transgression needs two connection 1-forms".into()));
    }
    let k = p.order();
    if k == 0 {
        return Err(Error::Degree("the constant polynomial has no transgression".into()));
    }
    if p.degree() > conn0.dim() + 1 {
        return Err(Error::Degree(format!(
            "transgression of degree {} on a {}-dimensional space",
            p.degree() - 1,
            conn0.dim()
        )));
    }
    let alpha = conn1.minus(conn0)?;
    // the t-integrand is a polynomial of degree 2(k - 1)
    let rule = Rule::gauss_legendre(k + 1, 0.0, 1.0);
    let mut acc: Option<FormField> = None;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let mut term = alpha.clone();
        if k > 1 {
            let ft = curvature(&conn0.plus(&alpha.scaled(C64::new(t, 0.0)))?)?;
            term = term.wedge(&power(&ft, k - 1)?)?;
        }
        let term = term.trace().scaled(C64::new(w, 0.0));
        acc = Some(match acc {
            None => term,
            Some(a) => a.plus(&term)?,
        });
    }
    let acc = acc.expect("rule has nodes");
    Ok(acc.scaled(p.prefactor() * k as f64))
}

/// `int_Sigma T A-hat(gamma_deformed, gamma) ^ [ch(F^+) - ch(F^-)]`
/// keeping the top-degree part; `gamma` are frame connections on the
/// wall and `f_plus`, `f_minus` the one-sided gauge curvatures.
pub fn correction_term_ta(
    gamma: &FormField,
    gamma_deformed: &FormField,
    f_plus: &FormField,
    f_minus: &FormField,
) -> Result<f64> {
    let m = gamma.dim();
    if m % 2 == 0 {
        return Err(Error::Degree(format!("the wall must be odd-dimensional, got {m}")));
    }
    // T A-hat has degree 3 (the constant term of A-hat does not transgress)
    if m < 3 {
        return Ok(0.0);
    }
    let ta = transgression(InvariantPolynomial::AHat4, gamma, gamma_deformed)?;
    let j = (m - 3) / 2;
    let dch = InvariantPolynomial::Chern(j)
        .evaluate(f_plus)?
        .minus(&InvariantPolynomial::Chern(j).evaluate(f_minus)?)?;
    Ok(ta.wedge(&dch)?.integrate()?.re)
}
