//! Bulk operator of a twisted U(1) bundle on `T^2`.
//!
//! For wall data constant along the wall, momentum `k` along the wall is
//! conserved up to the clutching at the antipodal slice, which shifts
//! `k` by the flux `Q`. Following a momentum through the clutching
//! unrolls the transverse circle into `|Q|` lines `u = s + j T`,
//! `k = r + j Q`, on which the bulk operator reduces to
//! `[[0, -d_u + lambda], [d_u + lambda, 0]]` with
//! `lambda(u) = c (u - u_0) + w(u)`, `w` periodic with zero mean. Hermite
//! functions centred at `u_0` with width `1/sqrt|c|` diagonalize the
//! linear part exactly.

use super::{Basis, HermitianOperator};
use crate::error::{Error, Result};
use crate::gauge::GaugeConfig;
use crate::linalg::C64;
use crate::profile::TransverseProfile;
use crate::quadrature::composite;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct LandauBasis {
    pub chains: usize,
    pub levels_r: usize,
    pub levels_l: usize,
    /// Slope `c` of the chain eigenvalue.
    pub slope: f64,
    /// Centre `u_0` per chain.
    pub centres: Vec<f64>,
}

/// Scalar data of an abelian configuration with wall data constant along
/// the wall: `A_1 = i a(s)` with `a(s) = a^- + p(s) beta + ramp(s)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ChainData {
    tp: TransverseProfile,
    l1: f64,
    a_minus: f64,
    beta: f64,
    flux: i64,
}

impl ChainData {
    pub(crate) fn new(cfg: &GaugeConfig) -> Self {
        Self {
            tp: *cfg.transverse(),
            l1: cfg.sigma_lengths()[0],
            a_minus: cfg.a_minus()[0].coeff(&[0])[(0, 0)].im,
            beta: cfg.jump()[0].coeff(&[0])[(0, 0)].im,
            flux: cfg.flux(),
        }
    }

    /// `a(s)` for `s` inside one period.
    pub(crate) fn a(&self, s: f64) -> f64 {
        let ramp = if self.flux == 0 {
            0.0
        } else {
            2.0 * PI * self.flux as f64 / self.l1 * self.tp.original_coordinate(s) / self.tp.base_length
        };
        self.a_minus + self.tp.value(s) * self.beta + ramp
    }

    /// Eigenvalue of wall momentum `k` at transverse coordinate `s`.
    pub(crate) fn circle(&self, k: i64, s: f64) -> f64 {
        2.0 * PI * k as f64 / self.l1 + self.a(s)
    }

    /// Eigenvalue along chain `r` at unrolled coordinate `u`.
    pub(crate) fn chain(&self, r: i64, u: f64) -> f64 {
        let period = self.tp.period();
        let j = ((u - self.tp.start()) / period).floor();
        let s = u - j * period;
        let k = r as f64 + j * self.flux as f64;
        2.0 * PI * k / self.l1 + self.a(s)
    }
}

/// Normalized Hermite functions `h_0..h_n` at `x`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n >= 1 {
        h.push(2f64.sqrt() * x * h[0]);
    }
    for k in 1..n {
        let v = (2.0 / (k + 1) as f64).sqrt() * x * h[k] - (k as f64 / (k + 1) as f64).sqrt() * h[k - 1];
        h.push(v);
    }
    h
}

pub(crate) fn check_twisted(cfg: &GaugeConfig) -> Result<()> {
    if cfg.geometry().dim() != 2 || cfg.rank() != 1 {
        return Err(Error::Unsupported("twisted bundles need n = 2 and U(1)".into()));
    }
    if !cfg.is_sigma_constant() {
        return Err(Error::NotProduct(
            "twisted-bundle operator needs wall data constant along the wall".into(),
        ));
    }
    Ok(())
}

/// Mean of `lambda(u) - c u` over one period of chain `r`.
fn chain_centre(data: &ChainData, tp: &TransverseProfile, r: i64, slope: f64) -> f64 {
    let rule = tp.period_rule(8, 24);
    let mean = rule.integrate(|u| data.chain(r, u) - slope * u) / tp.period();
    -mean / slope
}

/// Assembles the twisted-bundle operator with `levels` Hermite levels on
/// the chirality carrying the extra (lowest) level, one fewer on the other.
pub fn assemble_twisted(cfg: &GaugeConfig, levels: usize) -> Result<HermitianOperator> {
    check_twisted(cfg)?;
    let q = cfg.flux();
    if q == 0 {
        return Err(Error::Unsupported("assemble_twisted needs nonzero flux".into()));
    }
    if levels == 0 {
        return Err(Error::InvalidCutoffs("need at least one Hermite level".into()));
    }
    let tp = cfg.transverse();
    let data = ChainData::new(cfg);
    let period = tp.period();
    let l1 = cfg.sigma_lengths()[0];
    let slope = 2.0 * PI * q as f64 / (l1 * period);
    let ell = 1.0 / slope.abs().sqrt();
    let chains = q.unsigned_abs() as usize;
    let big = levels + 1;
    let small = levels;
    let (n_r, n_l) = if q > 0 { (big, small) } else { (small, big) };
    let dim = chains * (n_r + n_l);
    let ladder = (2.0 * slope.abs()).sqrt() * if q > 0 { 1.0 } else { -1.0 };
    let xmax = (2.0 * levels as f64 + 1.0).sqrt() + 12.0;

    let mut centres = Vec::with_capacity(chains);
    let mut trip = Vec::new();
    for r in 0..chains {
        let u0 = chain_centre(&data, tp, r as i64, slope);
        centres.push(u0);
        // breakpoints of the profile mapped to the scaled coordinate
        let (ua, ub) = (u0 - xmax * ell, u0 + xmax * ell);
        let j0 = ((ua - tp.start()) / period).floor() as i64;
        let j1 = ((ub - tp.start()) / period).ceil() as i64;
        let mut bps = Vec::new();
        for j in j0..=j1 {
            for b in tp.breakpoints() {
                bps.push((b + j as f64 * period - u0) / ell);
            }
        }
        let panels = ((4 * levels).max(64) / (bps.len() + 1)).max(4);
        let rule = composite(-xmax, xmax, &bps, panels, 16);
        let mut w = vec![vec![0.0; big]; big];
        for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let u = u0 + ell * x;
            let wv = data.chain(r as i64, u) - slope * (u - u0);
            let h = hermite_functions(levels, x);
            for m in 0..big {
                let a = wt * wv * h[m];
                if a == 0.0 {
                    continue;
                }
                for n in m..big {
                    w[m][n] += a * h[n];
                }
            }
        }
        for m in 0..big {
            for n in 0..m {
                w[m][n] = w[n][m];
            }
        }
        // D maps the big side to the small side: D[m][n] = ladder sqrt(n) delta_{m,n-1} + W[m][n]
        let (big_off, small_off) = if q > 0 {
            (r * n_r, chains * n_r + r * n_l)
        } else {
            (chains * n_r + r * n_l, r * n_r)
        };
        for m in 0..small {
            for n in 0..big {
                let mut v = w[m][n];
                if n == m + 1 {
                    v += ladder * (n as f64).sqrt();
                }
                if v != 0.0 {
                    let v = C64::new(v, 0.0);
                    trip.push((small_off + m, big_off + n, v));
                    trip.push((big_off + n, small_off + m, v));
                }
            }
        }
    }
    let chir: Vec<f64> = (0..dim)
        .map(|i| if i < chains * n_r { 1.0 } else { -1.0 })
        .collect();
    Ok(HermitianOperator::from_triplets(
        dim,
        trip,
        Some(chir),
        Basis::Landau(LandauBasis {
            chains,
            levels_r: n_r,
            levels_l: n_l,
            slope,
            centres,
        }),
    ))
}
