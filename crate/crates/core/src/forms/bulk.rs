//! Bulk integral of the flat index density `P = sign * ch_{n/2}(F)`.
//!
//! Along the wall the density is a trigonometric polynomial, so a uniform
//! grid just above its bandwidth integrates it exactly. Across the wall
//! the connection is `A^- + p(t) B` with a closed-form profile `p`, which
//! is integrated piecewise between its breakpoints so that a sharp jump
//! splits the integral into the two one-sided pieces.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{standard_rep, wall_adapt};
use crate::gauge::GaugeConfig;
use crate::linalg::{signed_permutations, CMat, C64, I};
use crate::quadrature::composite;
use crate::Result;

/// `int P` split at the wall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkIntegral {
    pub value: f64,
    /// Contribution of `t < 0`.
    pub minus_side: f64,
    /// Contribution of `t > 0` (including a pasted cylinder).
    pub plus_side: f64,
    /// Wall grid points per direction.
    pub sigma_grid: usize,
    pub transverse_nodes: usize,
}

pub(super) fn density_sign(n: usize) -> Result<f64> {
    Ok(wall_adapt(&standard_rep(n)?).index_density_sign())
}

/// Top component `(1 / 2^k) sum_sigma sgn(sigma) tr F_{s1 s2} ... F_{s(n-1) sn}`
/// of `tr F^k`, coordinates in the order `x^1 .. x^{n-1}, s`.
fn trace_top_power(f: &[Vec<CMat>], perms: &[(Vec<usize>, f64)]) -> C64 {
    let n = f.len();
    let k = n / 2;
    let mut acc = C64::new(0.0, 0.0);
    for (p, sgn) in perms {
        let mut m = f[p[0]][p[1]].clone();
        for j in 1..k {
            m = m * &f[p[2 * j]][p[2 * j + 1]];
        }
        acc += m.trace() * *sgn;
    }
    acc / 2f64.powi(k as i32)
}

fn chern_prefactor(k: usize) -> C64 {
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    C64::new(0.0, 1.0 / (2.0 * PI)).powi(k as i32) / fact
}

/// Index density at a single point from the pointwise field strength.
pub fn index_density_at(cfg: &GaugeConfig, point: &[f64]) -> Result<f64> {
    let n = cfg.geometry().dim();
    let f = cfg.field_strength_at(point)?;
    let perms = signed_permutations(n);
    let v = trace_top_power(&f, &perms) * chern_prefactor(n / 2);
    Ok(density_sign(n)? * v.re)
}

// wall-direction data at one grid point
struct SlicePoint {
    am: Vec<CMat>,
    b: Vec<CMat>,
    // d_c A^-_a and d_c B_a, indexed [a][c]
    dam: Vec<Vec<CMat>>,
    db: Vec<Vec<CMat>>,
}

pub(super) struct Slice {
    points: Vec<SlicePoint>,
    cell: f64,
    grid: usize,
}

pub(super) fn build_slice(cfg: &GaugeConfig) -> Slice {
    let d = cfg.sigma_dim();
    let lengths = cfg.sigma_lengths();
    let k = (d + 1) / 2;
    let bw = cfg
        .a_minus()
        .iter()
        .chain(cfg.jump())
        .map(|a| a.bandwidth())
        .max()
        .unwrap_or(0);
    let grid = 2 * k * bw + 1;
    let total = grid.pow(d as u32);
    let deriv = |fs: &[crate::gauge::FourierField]| -> Vec<Vec<crate::gauge::FourierField>> {
        fs.iter()
            .map(|a| (0..d).map(|c| a.derivative(c, lengths)).collect())
            .collect()
    };
    let (dam_f, db_f) = (deriv(cfg.a_minus()), deriv(cfg.jump()));
    let points = (0..total)
        .map(|mut i| {
            let mut x = vec![0.0; d];
            for a in (0..d).rev() {
                x[a] = (i % grid) as f64 * lengths[a] / grid as f64;
                i /= grid;
            }
            let ev = |fs: &[crate::gauge::FourierField]| fs.iter().map(|a| a.eval(&x, lengths)).collect();
            let ev2 = |fs: &[Vec<crate::gauge::FourierField>]| {
                fs.iter()
                    .map(|row| row.iter().map(|a| a.eval(&x, lengths)).collect())
                    .collect()
            };
            SlicePoint {
                am: ev(cfg.a_minus()),
                b: ev(cfg.jump()),
                dam: ev2(&dam_f),
                db: ev2(&db_f),
            }
        })
        .collect();
    let cell = lengths.iter().map(|l| l / grid as f64).product();
    Slice { points, cell, grid }
}

/// Wall integral of `tr F^k` (top component) at transverse coordinate `t`.
pub(super) fn slice_integral(cfg: &GaugeConfig, slice: &Slice, perms: &[(Vec<usize>, f64)], t: f64) -> f64 {
    let d = cfg.sigma_dim();
    let n = d + 1;
    let rank = cfg.rank();
    let tp = cfg.transverse();
    let (p, dp) = (tp.value(t), tp.deriv(t));
    let (ramp, dramp) = if cfg.flux() != 0 {
        (cfg.flux_ramp(t), cfg.flux_ramp_deriv(t))
    } else {
        (0.0, 0.0)
    };
    let pc = C64::new(p, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    let zero = CMat::zeros(rank, rank);
    for sp in &slice.points {
        let a: Vec<CMat> = (0..d)
            .map(|i| {
                let mut v = &sp.am[i] + &sp.b[i] * pc;
                if i == 0 && ramp != 0.0 {
                    v += CMat::identity(rank, rank) * (I * ramp);
                }
                v
            })
            .collect();
        let mut f = vec![vec![zero.clone(); n]; n];
        for i in 0..d {
            let mut ds = &sp.b[i] * C64::new(dp, 0.0);
            if i == 0 && dramp != 0.0 {
                ds += CMat::identity(rank, rank) * (I * dramp);
            }
            f[i][d] = -&ds;
            f[d][i] = ds;
            for j in (i + 1)..d {
                let di_aj = &sp.dam[j][i] + &sp.db[j][i] * pc;
                let dj_ai = &sp.dam[i][j] + &sp.db[i][j] * pc;
                let fij = di_aj - dj_ai + &a[i] * &a[j] - &a[j] * &a[i];
                f[j][i] = -&fij;
                f[i][j] = fij;
            }
        }
        acc += trace_top_power(&f, perms);
    }
    (acc * chern_prefactor(n / 2) * slice.cell).re
}

fn integrate_pieces(cfg: &GaugeConfig, a: f64, b: f64, panels: usize) -> Result<(f64, f64, usize, usize)> {
    let n = cfg.geometry().dim();
    let sign = density_sign(n)? * cfg.geometry().orientation() as f64;
    let slice = build_slice(cfg);
    let perms = signed_permutations(n);
    let mut bps = cfg.transverse().breakpoints();
    bps.push(0.0);
    let rule = composite(a, b, &bps, panels, 16);
    let vals: Vec<f64> = rule
        .nodes
        .par_iter()
        .map(|&t| slice_integral(cfg, &slice, &perms, t))
        .collect();
    let (mut minus, mut plus) = (0.0, 0.0);
    for ((&t, &w), v) in rule.nodes.iter().zip(&rule.weights).zip(vals) {
        if t < 0.0 {
            minus += w * v;
        } else {
            plus += w * v;
        }
    }
    Ok((sign * minus, sign * plus, slice.grid, rule.len()))
}

/// `int_{M \ Sigma} P` over one transverse period.
pub fn pontryagin_bulk_integral(cfg: &GaugeConfig) -> Result<BulkIntegral> {
    let tp = cfg.transverse();
    let t0 = tp.start();
    let (minus_side, plus_side, sigma_grid, transverse_nodes) =
        integrate_pieces(cfg, t0, t0 + tp.period(), 8)?;
    Ok(BulkIntegral {
        value: minus_side + plus_side,
        minus_side,
        plus_side,
        sigma_grid,
        transverse_nodes,
    })
}

/// `int P` over the slab `a < t < b` (for instance the pasted cylinder
/// `0 < t < l`).
pub fn pontryagin_integral_range(cfg: &GaugeConfig, a: f64, b: f64) -> Result<f64> {
    let (m, p, _, _) = integrate_pieces(cfg, a, b, 8)?;
    Ok(m + p)
}
