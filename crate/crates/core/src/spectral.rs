//! Eigenanalysis and spectral functionals: heat-trace index, regularized
//! eta invariant and spectral flow.

use crate::dirac::{HermitianOperator, WallFamily};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMat, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

/// Eigenvalues with chirality expectations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `<psi|gamma_*|psi>` per eigenvalue; exactly `+-1` on the kernel.
    pub chirality: Option<Vec<f64>>,
    /// Largest `|H psi - lambda psi|` relative to the operator norm bound.
    pub residual: f64,
}

/// Tolerances of the eigensolvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Eigenvalues below `zero_threshold * |H|` are treated as kernel.
    pub zero_threshold: f64,
    /// Maximal accepted relative residual.
    pub residual_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            zero_threshold: 1e-10,
            residual_tol: 1e-9,
        }
    }
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Count of eigenvalues with `|lambda| <= tol`, split by chirality sign.
    pub fn kernel_counts(&self, tol: f64) -> (usize, usize) {
        let Some(ch) = &self.chirality else {
            return (0, 0);
        };
        let mut r = (0, 0);
        for (l, c) in self.eigenvalues.iter().zip(ch) {
            if l.abs() <= tol {
                if *c > 0.0 {
                    r.0 += 1;
                } else {
                    r.1 += 1;
                }
            }
        }
        r
    }

    /// Largest mismatch between the sorted nonzero eigenvalues and their
    /// negatives.
    pub fn pairing_residual(&self, tol: f64) -> f64 {
        let nz: Vec<f64> = self.eigenvalues.iter().copied().filter(|l| l.abs() > tol).collect();
        let n = nz.len();
        let mut worst: f64 = if n % 2 == 1 { f64::INFINITY } else { 0.0 };
        for i in 0..n {
            worst = worst.max((nz[i] + nz[n - 1 - i]).abs());
        }
        worst
    }

    /// CSV table `index,eigenvalue,chirality`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,eigenvalue,chirality\n");
        for (i, l) in self.eigenvalues.iter().enumerate() {
            let c = self
                .chirality
                .as_ref()
                .map(|c| format!("{:.17e}", c[i]))
                .unwrap_or_default();
            s.push_str(&format!("{i},{l:.17e},{c}\n"));
        }
        s
    }
}

fn kernel_chirality(vecs: &CMat, kernel: &[usize], chir: &[f64]) -> Vec<f64> {
    if kernel.is_empty() {
        return Vec::new();
    }
    let k = CMat::from_fn(vecs.nrows(), kernel.len(), |i, j| vecs[(i, kernel[j])]);
    let gk = CMat::from_fn(k.nrows(), k.ncols(), |i, j| k[(i, j)] * chir[i]);
    let m = k.adjoint() * gk;
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let (vals, _) = hermitian_eigen(&m);
    let mut v: Vec<f64> = vals.iter().map(|x| x.signum()).collect();
    v.sort_by(f64::total_cmp);
    v
}

// eigenpairs of one dense block: (eigenvalues, chirality, residual)
fn solve_block(m: CMat, chir: Option<Vec<f64>>, thr: f64) -> (Vec<f64>, Option<Vec<f64>>, f64) {
    let n = m.nrows();
    let (vals, vecs) = hermitian_eigen(&m);
    let mut res: f64 = 0.0;
    for (i, &l) in vals.iter().enumerate() {
        let v = vecs.column(i);
        res = res.max((&m * v - v * C64::new(l, 0.0)).norm());
    }
    let chir = chir.map(|g| {
        let kernel: Vec<usize> = (0..n).filter(|&i| vals[i].abs() <= thr).collect();
        let ks = kernel_chirality(&vecs, &kernel, &g);
        let mut kpos = 0;
        (0..n)
            .map(|i| {
                if vals[i].abs() <= thr {
                    kpos += 1;
                    ks[kpos - 1]
                } else {
                    vecs.column(i).iter().zip(&g).map(|(z, gi)| z.norm_sqr() * gi).sum()
                }
            })
            .collect()
    });
    (vals, chir, res)
}

/// Full spectrum of `op` by dense diagonalization of its decoupled blocks.
pub fn eigensolve(op: &HermitianOperator) -> Result<Spectrum> {
    eigensolve_with(op, EigenOptions::default())
}

pub fn eigensolve_with(op: &HermitianOperator, opts: EigenOptions) -> Result<Spectrum> {
    let h = op.hermiticity_residual();
    if h > 1e-12 * op.norm_bound().max(1.0) {
        return Err(Error::NotHermitian(h));
    }
    let norm = op.norm_bound().max(f64::MIN_POSITIVE);
    let thr = opts.zero_threshold * norm.max(1.0);
    let blocks = op.blocks();
    let parts: Vec<(Vec<f64>, Option<Vec<f64>>, f64)> = blocks
        .par_iter()
        .map(|idx| {
            let m = op.submatrix(idx);
            let chir = op.chirality().map(|g| idx.iter().map(|&i| g[i]).collect());
            solve_block(m, chir, thr)
        })
        .collect();
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(op.dim());
    let mut res: f64 = 0.0;
    for (vals, chir, r) in parts {
        res = res.max(r);
        for (i, v) in vals.iter().enumerate() {
            pairs.push((*v, chir.as_ref().map_or(0.0, |c| c[i])));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let residual = res / norm.max(1.0);
    if residual > opts.residual_tol {
        return Err(Error::NoConvergence(residual));
    }
    Ok(Spectrum {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        chirality: op.chirality().map(|_| pairs.iter().map(|p| p.1).collect()),
        residual,
    })
}

/// Lowest `count` eigenvalues in modulus by block Lanczos with full
/// reorthogonalization on `H^2`; signed values and kernel chiralities come
/// from the Rayleigh-Ritz projection of `H` onto the converged subspace.
/// The block size bounds the kernel multiplicity that can be resolved.
pub fn lanczos_lowest(op: &HermitianOperator, count: usize, opts: EigenOptions) -> Result<Spectrum> {
    let n = op.dim();
    let count = count.min(n);
    let norm = op.norm_bound().max(1.0);
    let apply2 = |x: &[C64]| op.apply(&op.apply(x));
    let dot = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let block = 8.min(n);
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut current: Vec<Vec<C64>> = (0..block)
        .map(|_| (0..n).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect())
        .collect();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut images: Vec<Vec<C64>> = Vec::new();
    let mut cap = (4 * count + 40).min(n);
    loop {
        while basis.len() < cap {
            let mut fresh: Vec<Vec<C64>> = Vec::new();
            for mut v in current.drain(..) {
                let v0 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for _ in 0..2 {
                    for u in basis.iter().chain(&fresh) {
                        let p = dot(u, &v);
                        for (vi, ui) in v.iter_mut().zip(u) {
                            *vi -= p * ui;
                        }
                    }
                }
                let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if nv > 1e-10 * v0 && basis.len() + fresh.len() < n {
                    fresh.push(v.iter().map(|z| z / nv).collect());
                }
            }
            if fresh.is_empty() {
                break;
            }
            for v in fresh {
                let w = apply2(&v);
                current.push(w.clone());
                images.push(w);
                basis.push(v);
            }
        }
        let k = basis.len();
        let t = CMat::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
        let t = (&t + t.adjoint()) * C64::new(0.5, 0.0);
        let (theta, svec) = hermitian_eigen(&t);
        let order: Vec<usize> = (0..k).collect();
        let take = count.min(k);
        let combine = |vs: &[Vec<C64>], c: usize| -> Vec<C64> {
            let s = svec.column(c);
            (0..n).map(|i| (0..k).map(|j| vs[j][i] * s[j]).sum()).collect()
        };
        let mut worst: f64 = 0.0;
        let mut ritz = Vec::with_capacity(take);
        for &c in &order[..take] {
            let r = combine(&basis, c);
            let hr = combine(&images, c);
            let res = hr
                .iter()
                .zip(&r)
                .map(|(a, b)| (a - b * theta[c]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(res / (norm * norm));
            ritz.push(r);
        }
        let exhausted = k >= n || current.is_empty();
        if worst > opts.residual_tol && !exhausted {
            cap = (2 * cap).min(n);
            continue;
        }
        if worst > opts.residual_tol {
            return Err(Error::NoConvergence(worst));
        }
        // project H on the Ritz space
        let v = CMat::from_fn(n, take, |i, j| ritz[j][i]);
        let hv_cols: Vec<Vec<C64>> = ritz.iter().map(|r| op.apply(r)).collect();
        let hv = CMat::from_fn(n, take, |i, j| hv_cols[j][i]);
        let hp = v.adjoint() * hv;
        let hp = (&hp + hp.adjoint()) * C64::new(0.5, 0.0);
        let (evals, evecs) = hermitian_eigen(&hp);
        let idx: Vec<usize> = (0..take).collect();
        let thr = opts.zero_threshold * norm;
        let full = &v * &evecs;
        let chirality = op.chirality().map(|g| {
            let kernel: Vec<usize> = idx.iter().copied().filter(|&i| evals[i].abs() <= thr).collect();
            let ks = kernel_chirality(&full, &kernel, g);
            let mut kp = 0;
            idx.iter()
                .map(|&i| {
                    if evals[i].abs() <= thr {
                        kp += 1;
                        ks[kp - 1]
                    } else {
                        full.column(i).iter().zip(g).map(|(z, gi)| z.norm_sqr() * gi).sum()
                    }
                })
                .collect()
        });
        return Ok(Spectrum {
            eigenvalues: idx.iter().map(|&i| evals[i]).collect(),
            chirality,
            residual: worst,
        });
    }
}

/// Heat-trace evaluation of the index at several `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatTraceIndex {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Nearest integer to the value at the first `t`.
    pub index: i64,
    /// Largest `|value - index|` over all `t`.
    pub deviation: f64,
}

/// `sum_i <gamma_*>_i exp(-t lambda_i^2)` for each `t`.
pub fn index_heat_trace(spec: &Spectrum, times: &[f64]) -> Result<HeatTraceIndex> {
    let ch = spec.chirality.as_ref().ok_or(Error::NoChirality)?;
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Config("heat-trace times must be positive".into()));
    }
    let values: Vec<f64> = times
        .iter()
        .map(|&t| {
            spec.eigenvalues
                .iter()
                .zip(ch)
                .map(|(l, c)| c * (-t * l * l).exp())
                .sum()
        })
        .collect();
    let index = values[0].round() as i64;
    let deviation = values
        .iter()
        .map(|v| (v - index as f64).abs())
        .fold(0.0, f64::max);
    Ok(HeatTraceIndex {
        times: times.to_vec(),
        values,
        index,
        deviation,
    })
}

/// Regularized eta invariant with its extrapolation error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaValue {
    pub value: f64,
    pub error: f64,
}

/// `sum sign(lambda) erfc(|lambda| sqrt(tau))`; both signs are summed
/// separately in order of `|lambda|` so symmetric spectra cancel exactly.
pub fn eta_smoothed(eigenvalues: &[f64], tau: f64) -> f64 {
    let st = tau.sqrt();
    let side = |sign: f64| {
        let mut v: Vec<f64> = eigenvalues
            .iter()
            .filter(|&&l| l * sign > 0.0)
            .map(|l| l.abs())
            .collect();
        v.sort_by(f64::total_cmp);
        v.iter().rev().map(|&x| erfc(x * st)).sum::<f64>()
    };
    side(1.0) - side(-1.0)
}

// value at 0 of the interpolating polynomial through (x_i, y_i)
fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = x.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        }
    }
    p[0]
}

/// `eta(0)` from a complete truncated spectrum: smoothed signed sums on a
/// `tau` ladder starting where the truncation edge is invisible
/// (`tau >= (6 / lambda_max)^2`), extrapolated to `tau = 0`.
pub fn eta_regularized(eigenvalues: &[f64]) -> Result<EtaValue> {
    let min = eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
    if min < 1e-10 {
        return Err(Error::ZeroMode(min));
    }
    let lmax = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    if eigenvalues.is_empty() {
        return Ok(EtaValue { value: 0.0, error: 0.0 });
    }
    let tau0 = (6.0 / lmax).powi(2);
    let taus = [tau0, 2.0 * tau0, 4.0 * tau0, 8.0 * tau0];
    let vals: Vec<f64> = taus.iter().map(|&t| eta_smoothed(eigenvalues, t)).collect();
    let full = neville_at_zero(&taus, &vals);
    let lower = neville_at_zero(&taus[..3], &vals[..3]);
    Ok(EtaValue {
        value: full,
        error: (full - lower).abs(),
    })
}

/// Net number of eigenvalues of `D(s)` crossing zero upwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFlow {
    pub flow: i64,
    /// Located crossings `(s, net upward count)`.
    pub crossings: Vec<(f64, i64)>,
}

fn negative_count(family: &WallFamily, s: f64, thr: f64) -> Result<(usize, f64)> {
    let spec = eigensolve(&family.operator_at(s))?;
    let neg = spec.eigenvalues.iter().filter(|&&l| l < -thr).count();
    let min = spec.eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
    Ok((neg, min))
}

/// Spectral flow along the family using `samples` uniform samples and
/// bisection of every count change down to `l * 1e-6`.
pub fn spectral_flow(family: &WallFamily) -> Result<SpectralFlow> {
    spectral_flow_with(family, 64)
}

pub fn spectral_flow_with(family: &WallFamily, samples: usize) -> Result<SpectralFlow> {
    let l = family.length();
    let thr = 1e-10 * family.operator_at(0.0).norm_bound().max(1.0);
    let grid: Vec<f64> = (0..=samples).map(|i| l * i as f64 / samples as f64).collect();
    let counts: Vec<(usize, f64)> = grid
        .par_iter()
        .map(|&s| negative_count(family, s, thr))
        .collect::<Result<_>>()?;
    for (&s, c) in [(&0.0, counts[0]), (&l, counts[samples])] {
        if c.1 <= thr {
            return Err(Error::EndpointCrossing(s));
        }
    }
    let mut crossings = Vec::new();
    for i in 0..samples {
        if counts[i].0 == counts[i + 1].0 {
            continue;
        }
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        let (ca, cb) = (counts[i].0, counts[i + 1].0);
        // bisect towards the crossing nearest to the lower end
        while b - a > l * 1e-6 {
            let m = 0.5 * (a + b);
            let cm = negative_count(family, m, thr)?.0;
            if cm == ca {
                a = m;
            } else {
                b = m;
            }
        }
        crossings.push((0.5 * (a + b), ca as i64 - cb as i64));
    }
    Ok(SpectralFlow {
        flow: counts[0].0 as i64 - counts[samples].0 as i64,
        crossings,
    })
}
