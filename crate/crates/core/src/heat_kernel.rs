//! Smeared heat-kernel coefficients `a_0`, `a_2` on the flat wall torus and
//! the relative spectral asymmetry of a wall family.
//!
//! Conventions: `D(s)^2 = -nabla^2 + E(s)` with
//! `E = -(1/2) gh^a gh^b F_ab`; the smeared coefficients of
//! `Tr(Q exp(-tau D^2)) ~ (4 pi tau)^{-d/2} sum_k tau^k a_{2k}` are
//! `a_0(Q) = (4 pi)^{-d/2} int tr Q` and
//! `a_2(Q) = -(4 pi)^{-d/2} int tr(Q E)`. The sign of `a_2` is the one
//! reproduced by the spectral fit in the tests of this module.

use crate::clifford::standard_rep;
use crate::dirac::{assemble_wall_family, HermitianOperator, WallFamily};
use crate::forms::pontryagin_integral_range;
use crate::gauge::GaugeConfig;
use crate::error::{Error, Result};
use crate::gauge::{sigma_curvature_fourier, FourierField};
use crate::linalg::{hermitian_eigen, CMat, C64, I};
use crate::spectral::{eta_regularized, spectral_flow, EtaValue};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `gamma tensor X` for every Fourier coefficient of `x`.
pub fn spinor_tensor(gamma: &CMat, x: &FourierField) -> FourierField {
    let mut out = FourierField::zero(x.dim(), gamma.nrows() * x.rank());
    for (q, v) in x.terms() {
        out.insert(q.clone(), gamma.kronecker(v));
    }
    out
}

/// `i gh^a X_a` as a field on spinor tensor colour space.
pub fn clifford_field(gammas: &[CMat], xs: &[FourierField]) -> FourierField {
    let mut out = FourierField::zero(xs[0].dim(), gammas[0].nrows() * xs[0].rank());
    for (g, x) in gammas.iter().zip(xs) {
        out = out.plus(&spinor_tensor(&(g * I), x));
    }
    out
}

/// Endomorphism `E = -(1/2) gh^a gh^b F_ab` of the squared wall operator
/// for the wall connection `conn`.
pub fn lichnerowicz_e(gammas: &[CMat], conn: &[FourierField], lengths: &[f64]) -> FourierField {
    let d = conn.len();
    let sd = gammas[0].nrows();
    let mut e = FourierField::zero(d, sd * conn[0].rank());
    if d < 2 {
        return e;
    }
    let f = sigma_curvature_fourier(conn, lengths);
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            let gg = &gammas[a] * &gammas[b] * C64::new(-0.5, 0.0);
            e = e.plus(&spinor_tensor(&gg, &f[a][b]));
        }
    }
    e
}

/// `E(s)` along a wall family.
pub fn lichnerowicz_e_at(family: &WallFamily, s: f64) -> FourierField {
    lichnerowicz_e(
        family.gammas(),
        &family.connection_at(s),
        family.sigma_modes().lengths(),
    )
}

/// `int tr(X Y)` over the torus of volume `vol`.
pub fn integral_trace_product(x: &FourierField, y: &FourierField, vol: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (q, v) in x.terms() {
        let neg: Vec<i64> = q.iter().map(|k| -k).collect();
        acc += (v * y.coeff(&neg)).trace();
    }
    acc * vol
}

fn volume(lengths: &[f64]) -> f64 {
    lengths.iter().product()
}

/// `(4 pi)^{-d/2} int tr Q`.
pub fn a0_smeared(q: &FourierField, lengths: &[f64]) -> C64 {
    let d = lengths.len() as i32;
    q.mean_trace() * volume(lengths) * (4.0 * PI).powf(-0.5 * d as f64)
}

/// `-(4 pi)^{-d/2} int tr(Q E)`.
pub fn a2_smeared(q: &FourierField, e: &FourierField, lengths: &[f64]) -> C64 {
    let d = lengths.len() as f64;
    -integral_trace_product(q, e, volume(lengths)) * (4.0 * PI).powf(-0.5 * d)
}

/// `a_{n-2}(dD/ds, D(s)^2)` for the family at `s`.
pub fn eta_integrand(family: &WallFamily, s: f64) -> f64 {
    let w = C64::new(family.weight_deriv(s), 0.0);
    let b: Vec<FourierField> = family.jump().iter().map(|x| x.scaled(w)).collect();
    let dd = clifford_field(family.gammas(), &b);
    let lengths = family.sigma_modes().lengths();
    match family.sigma_dim() {
        1 => a0_smeared(&dd, lengths).re,
        3 => a2_smeared(&dd, &lichnerowicz_e_at(family, s), lengths).re,
        _ => f64::NAN,
    }
}

/// Relative spectral asymmetry with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaResult {
    pub eta_tilde: f64,
    /// `(s, a_{n-2}(dD/ds, D^2))` at the quadrature nodes.
    pub integrand: Vec<(f64, f64)>,
    /// `|eta_tilde(M) - eta_tilde(3M/2)|`.
    pub quadrature_error: f64,
    /// `None` when an endpoint operator has a kernel.
    pub spectral_flow: Option<i64>,
    pub eta_minus: Option<EtaValue>,
    pub eta_plus: Option<EtaValue>,
    /// Side labelling convention.
    pub convention: String,
}

fn quadrature(family: &WallFamily) -> (f64, Vec<(f64, f64)>) {
    let vals: Vec<f64> = family
        .samples()
        .par_iter()
        .map(|&s| eta_integrand(family, s))
        .collect();
    let sum: f64 = vals.iter().zip(family.weights()).map(|(v, w)| v * w).sum();
    let table = family.samples().iter().copied().zip(vals).collect();
    (-2.0 / PI.sqrt() * sum, table)
}

/// `-(2/sqrt(pi)) int_0^l ds a_{n-2}(dD/ds, D(s)^2)` by Gauss-Legendre
/// quadrature over the family samples; also computes, where defined, the
/// spectral flow and the endpoint eta invariants.
pub fn relative_eta(family: &WallFamily) -> Result<EtaResult> {
    if !matches!(family.sigma_dim(), 1 | 3) {
        return Err(Error::UnsupportedDimension(family.sigma_dim() + 1));
    }
    let (eta_tilde, integrand) = quadrature(family);
    let finer = family.with_samples(family.samples().len() * 3 / 2)?;
    let (eta_fine, _) = quadrature(&finer);
    let flow = spectral_flow(family).ok().map(|f| f.flow);
    let endpoint = |op: HermitianOperator| {
        crate::spectral::eigensolve(&op)
            .ok()
            .and_then(|s| eta_regularized(&s.eigenvalues).ok())
    };
    Ok(EtaResult {
        eta_tilde,
        integrand,
        quadrature_error: (eta_tilde - eta_fine).abs(),
        spectral_flow: flow,
        eta_minus: endpoint(family.minus()),
        eta_plus: endpoint(family.plus()),
        convention: "minus side is s < 0 along the transverse coordinate; D(0) = D^-, D(l) = D^+".into(),
    })
}

/// `Tr(Q exp(-tau D^2))` for each `tau` from the eigendecomposition of the
/// Hermitian `d` restricted to the decoupled blocks of `d + q`.
pub fn smeared_heat_trace(d: &HermitianOperator, q: &HermitianOperator, taus: &[f64]) -> Vec<f64> {
    let union = HermitianOperator::from_triplets(
        d.dim(),
        d.rows()
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
            .chain(
                q.rows()
                    .iter()
                    .enumerate()
                    .flat_map(|(i, r)| r.iter().map(move |&(j, _)| (i, j, C64::new(1.0, 0.0)))),
            ),
        None,
        d.basis().clone(),
    );
    let parts: Vec<Vec<f64>> = union
        .blocks()
        .par_iter()
        .map(|idx| {
            let (evals, evecs) = hermitian_eigen(&d.submatrix(idx));
            let qv = q.submatrix(idx) * &evecs;
            let diag: Vec<f64> = (0..idx.len())
                .map(|i| {
                    evecs
                        .column(i)
                        .iter()
                        .zip(qv.column(i).iter())
                        .map(|(a, b)| (a.conj() * b).re)
                        .sum()
                })
                .collect();
            taus.iter()
                .map(|&t| {
                    diag.iter()
                        .zip(evals.iter())
                        .map(|(qd, l)| qd * (-t * l * l).exp())
                        .sum()
                })
                .collect()
        })
        .collect();
    (0..taus.len()).map(|k| parts.iter().map(|p| p[k]).sum()).collect()
}

/// Least-squares fit of `(4 pi tau)^{d/2} Tr(Q e^{-tau D^2})` by a
/// polynomial of degree `degree` in `tau`; returns the coefficients
/// `[a_0, a_2, a_4, ...]`.
pub fn fit_heat_coefficients(taus: &[f64], traces: &[f64], d: usize, degree: usize) -> Vec<f64> {
    let n = taus.len();
    let y: Vec<f64> = taus
        .iter()
        .zip(traces)
        .map(|(t, tr)| tr * (4.0 * PI * t).powf(0.5 * d as f64))
        .collect();
    let a = nalgebra::DMatrix::from_fn(n, degree + 1, |i, j| taus[i].powi(j as i32));
    let b = nalgebra::DVector::from_vec(y);
    let sol = a.svd(true, true).solve(&b, 1e-14).expect("svd solve");
    sol.iter().copied().collect()
}

/// Both sides of the cylinder identity `int_C P = -(1/2) eta_tilde`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderCheck {
    /// `int_C P` over the pasted cylinder.
    pub bulk: f64,
    /// `-(1/2) eta_tilde` of the wall family.
    pub minus_half_eta: f64,
    pub residual: f64,
    pub eta: EtaResult,
}

/// Compares the bulk index density integrated over the pasted cylinder
/// `0 < t < l` with `-(1/2) eta_tilde` of the family `D(s)` on it.
pub fn check_cylinder_identity(cfg: &GaugeConfig, sigma_cutoffs: &[usize], samples: usize) -> Result<CylinderCheck> {
    let l = cfg.transverse().cylinder_length();
    if l <= 0.0 {
        return Err(Error::NotProduct("the identity needs a pasted cylinder profile".into()));
    }
    let rep = standard_rep(cfg.geometry().dim())?;
    let family = assemble_wall_family(cfg, &rep, sigma_cutoffs, samples)?;
    let eta = relative_eta(&family)?;
    let bulk = pontryagin_integral_range(cfg, 0.0, l)?;
    let minus_half_eta = -0.5 * eta.eta_tilde;
    Ok(CylinderCheck {
        bulk,
        minus_half_eta,
        residual: (bulk - minus_half_eta).abs(),
        eta,
    })
}

/// Finite differences of `eta(0, D(s))` against the local variation
/// `-(2/sqrt(pi)) a_{n-2}(dD/ds, D(s)^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DertauCheck {
    pub s: f64,
    pub local: f64,
    pub steps: Vec<f64>,
    pub finite_difference: Vec<f64>,
    pub relative_error: Vec<f64>,
}

impl DertauCheck {
    /// Error ratios between consecutive step sizes (about 4 for a second
    /// order difference under halving).
    pub fn refinement_ratios(&self) -> Vec<f64> {
        self.relative_error.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

/// Central differences `(eta(s + h/2) - eta(s - h/2)) / h` for each step
/// `h`; the interval must be free of eigenvalue crossings.
pub fn check_dertau(family: &WallFamily, s: f64, steps: &[f64]) -> Result<DertauCheck> {
    let local = -2.0 / PI.sqrt() * eta_integrand(family, s);
    let eta_at = |x: f64| -> Result<f64> {
        let spec = crate::spectral::eigensolve(&family.operator_at(x))?;
        Ok(eta_regularized(&spec.eigenvalues)?.value)
    };
    let finite_difference = steps
        .iter()
        .map(|&h| Ok((eta_at(s + 0.5 * h)? - eta_at(s - 0.5 * h)?) / h))
        .collect::<Result<Vec<f64>>>()?;
    let relative_error = finite_difference
        .iter()
        .map(|fd| (fd - local).abs() / local.abs().max(1e-300))
        .collect();
    Ok(DertauCheck {
        s,
        local,
        steps: steps.to_vec(),
        finite_difference,
        relative_error,
    })
}
