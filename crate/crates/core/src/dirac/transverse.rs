//! Sharp-wall transverse problem in `n = 2`.
//!
//! With abelian wall data constant along the wall, each wall momentum `k`
//! gives a first-order system `psi' = [[-lambda, E], [-E, lambda]] psi` in
//! the transverse coordinate, with `lambda = 2 pi k / L_1 + a(s)`. The
//! spinor is continuous across the wall, so integrating the system
//! piecewise across the jump encodes both matching conditions. On a
//! periodic circle the eigenvalues are the roots of `2 - tr T(E)` for the
//! monodromy `T`; for a twisted bundle the momentum chains are lines, and
//! zero modes are counted by normalizability of `exp(-+ int lambda)` inside
//! the window allowed by the momentum cutoff.

use super::landau::{check_twisted, ChainData};
use crate::error::Result;
use crate::gauge::GaugeConfig;
use crate::quadrature::composite;

/// Decay (in units of `ln`) a zero mode must reach at both window ends to
/// count as normalizable, `ln(1e8)`.
pub const DECAY_THRESHOLD: f64 = 18.420680743952367;

#[derive(Debug, Clone)]
pub struct TransverseModeProblem {
    cfg: GaugeConfig,
    theta_cutoff: usize,
    /// Energy grid spacing for root bracketing.
    pub energy_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransverseSolution {
    /// Eigenvalues found in the window, ascending (double roots repeated).
    pub eigenvalues: Vec<f64>,
    pub zero_modes_r: usize,
    pub zero_modes_l: usize,
}

impl TransverseSolution {
    pub fn index(&self) -> i64 {
        self.zero_modes_r as i64 - self.zero_modes_l as i64
    }
}

impl TransverseModeProblem {
    /// Sets up the reduction; needs `n = 2`, U(1) and wall data constant
    /// along the wall. `theta_cutoff` bounds the wall momenta `|k|`.
    pub fn new(cfg: &GaugeConfig, theta_cutoff: usize) -> Result<Self> {
        check_twisted(cfg)?;
        Ok(Self {
            cfg: cfg.clone(),
            theta_cutoff,
            energy_step: 0.01,
        })
    }

    pub fn config(&self) -> &GaugeConfig {
        &self.cfg
    }


    fn cuts(&self, a: f64, b: f64) -> Vec<f64> {
        let tp = self.cfg.transverse();
        let p = tp.period();
        let j0 = ((a - tp.start()) / p).floor() as i64 - 1;
        let j1 = ((b - tp.start()) / p).ceil() as i64 + 1;
        let mut c = vec![a];
        for j in j0..=j1 {
            for x in tp.breakpoints() {
                let y = x + j as f64 * p;
                if y > a && y < b {
                    c.push(y);
                }
            }
        }
        c.push(b);
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }
}

// one RK4 step of psi' = M(u) psi
fn rk4(lam: &dyn Fn(f64) -> f64, e: f64, u: f64, h: f64, y: [f64; 2]) -> [f64; 2] {
    let f = |u: f64, y: [f64; 2]| {
        let l = lam(u);
        [-l * y[0] + e * y[1], -e * y[0] + l * y[1]]
    };
    let k1 = f(u, y);
    let k2 = f(u + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = f(u + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = f(u + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

// Integrates the columns of `y` across `cuts`; returns (log scale, columns).
fn propagate(
    lam: &dyn Fn(f64) -> f64,
    e: f64,
    cuts: &[f64],
    mut cols: Vec<[f64; 2]>,
    lam_max: f64,
    step: f64,
) -> (f64, Vec<[f64; 2]>) {
    let hmax = (0.25 / lam_max.max(e.abs()).max(1.0)).min(step);
    let mut log_scale = 0.0;
    for w in cuts.windows(2) {
        let n = ((w[1] - w[0]) / hmax).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / n as f64;
        for i in 0..n {
            let u = w[0] + i as f64 * h;
            for y in cols.iter_mut() {
                *y = rk4(lam, e, u, h, *y);
            }
            let m = cols
                .iter()
                .flat_map(|y| y.iter().map(|v| v.abs()))
                .fold(0.0, f64::max);
            if m > 1e100 {
                for y in cols.iter_mut() {
                    y[0] /= m;
                    y[1] /= m;
                }
                log_scale += m.ln();
            }
        }
    }
    (log_scale, cols)
}

// Roots of g on a grid. Where |g| has a local minimum without a sign
// change, `touch` (which vanishes linearly at a double root) is minimized
// and a double root is recorded if it drops below `touch_tol`.
fn find_roots(
    g: &dyn Fn(f64) -> f64,
    touch: Option<&dyn Fn(f64) -> f64>,
    lo: f64,
    hi: f64,
    step: f64,
    touch_tol: f64,
) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(2.0) as usize;
    let h = (hi - lo) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * h).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    let bisect = |mut a: f64, mut b: f64, mut ga: f64| {
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            let gm = g(m);
            if (gm < 0.0) == (ga < 0.0) {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    for i in 0..n {
        if gs[i] == 0.0 {
            roots.push(xs[i]);
        } else if (gs[i] < 0.0) != (gs[i + 1] < 0.0) && gs[i + 1] != 0.0 {
            roots.push(bisect(xs[i], xs[i + 1], gs[i]));
        }
    }
    if let Some(touch) = touch {
        for i in 1..n {
            let (a, b, c) = (gs[i - 1].abs(), gs[i].abs(), gs[i + 1].abs());
            let same = (gs[i - 1] < 0.0) == (gs[i] < 0.0) && (gs[i] < 0.0) == (gs[i + 1] < 0.0);
            if same && b <= a && b <= c {
                // golden-section search for the minimum of `touch`
                let (mut x0, mut x1) = (xs[i - 1], xs[i + 1]);
                let r = 0.5 * (5f64.sqrt() - 1.0);
                for _ in 0..60 {
                    let m1 = x1 - r * (x1 - x0);
                    let m2 = x0 + r * (x1 - x0);
                    if touch(m1) < touch(m2) {
                        x1 = m2;
                    } else {
                        x0 = m1;
                    }
                }
                let xm = 0.5 * (x0 + x1);
                if touch(xm) < touch_tol {
                    roots.push(xm);
                    roots.push(xm);
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Spectrum fragment in `window` and zero-mode counts per chirality.
pub fn solve_transverse(problem: &TransverseModeProblem, window: (f64, f64)) -> Result<TransverseSolution> {
    if problem.cfg.flux() == 0 {
        solve_circle(problem, window)
    } else {
        solve_line(problem, window)
    }
}

fn solve_circle(p: &TransverseModeProblem, window: (f64, f64)) -> Result<TransverseSolution> {
    let tp = p.cfg.transverse();
    let (a, b) = (tp.start(), tp.start() + tp.period());
    let cuts = p.cuts(a, b);
    let data = ChainData::new(&p.cfg);
    let rule = composite(a, b, &cuts, 8, 24);
    let lam_scale = |k: i64| {
        rule.nodes
            .iter()
            .map(|&t| data.circle(k, t).abs())
            .fold(0.0, f64::max)
    };
    let cut = p.theta_cutoff as i64;
    let mut eig = Vec::new();
    let (mut zr, mut zl) = (0, 0);
    for k in -cut..=cut {
        let lam = move |t: f64| data.circle(k, t);
        let phi = rule.integrate(lam);
        if phi.abs() < 1e-9 {
            zr += 1;
            zl += 1;
        }
        let lmax = lam_scale(k);
        let mono = |e: f64| {
            let (ls, cols) = propagate(&lam, e, &cuts, vec![[1.0, 0.0], [0.0, 1.0]], lmax, 0.01);
            (ls, cols)
        };
        let g = |e: f64| {
            let (ls, cols) = mono(e);
            let tr = cols[0][0] + cols[1][1];
            if ls > 600.0 {
                -tr.signum() * f64::MAX.sqrt()
            } else {
                2.0 - tr * ls.exp()
            }
        };
        let touch = |e: f64| {
            let (ls, cols) = mono(e);
            if ls > 0.0 {
                return f64::INFINITY;
            }
            (cols[0][0] - 1.0)
                .abs()
                .max((cols[1][1] - 1.0).abs())
                .max(cols[0][1].abs())
                .max(cols[1][0].abs())
        };
        eig.extend(find_roots(&g, Some(&touch), window.0, window.1, p.energy_step, 1e-5));
    }
    eig.sort_by(f64::total_cmp);
    Ok(TransverseSolution {
        eigenvalues: eig,
        zero_modes_r: zr,
        zero_modes_l: zl,
    })
}

fn solve_line(p: &TransverseModeProblem, window: (f64, f64)) -> Result<TransverseSolution> {
    let q = p.cfg.flux();
    let tp = p.cfg.transverse();
    let period = tp.period();
    let cut = p.theta_cutoff as i64;
    let mut eig = Vec::new();
    let (mut zr, mut zl) = (0, 0);
    for r in 0..q.abs() {
        // periods j with |r + j Q| <= cutoff
        let js: Vec<i64> = (-(cut + q.abs())..=(cut + q.abs()))
            .filter(|j| (r + j * q).abs() <= cut)
            .collect();
        let (Some(&j0), Some(&j1)) = (js.iter().min(), js.iter().max()) else {
            continue;
        };
        let ua = tp.start() + j0 as f64 * period;
        let ub = tp.start() + (j1 + 1) as f64 * period;
        let data = ChainData::new(&p.cfg);
        let lam = move |u: f64| data.chain(r, u);
        let cuts = p.cuts(ua, ub);

        // zero modes: running integral of lambda at panel ends
        let mut phi = vec![0.0];
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            let n = ((w[1] - w[0]) / (period / 64.0)).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / n as f64;
            for i in 0..n {
                let lo = w[0] + i as f64 * h;
                acc += composite(lo, lo + h, &[], 1, 8).integrate(lam);
                phi.push(acc);
            }
        }
        let (first, last) = (phi[0], *phi.last().unwrap());
        let lo = phi.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if first - lo > DECAY_THRESHOLD && last - lo > DECAY_THRESHOLD {
            zr += 1;
        }
        if hi - first > DECAY_THRESHOLD && hi - last > DECAY_THRESHOLD {
            zl += 1;
        }

        // shooting between decaying solutions at the window ends
        let (la, lb) = (lam(ua), lam(ub));
        let emax = 0.9 * la.abs().min(lb.abs());
        let (e_lo, e_hi) = (window.0.max(-emax), window.1.min(emax));
        if e_lo >= e_hi {
            continue;
        }
        let lmax = la.abs().max(lb.abs()) + 1.0;
        let grow = |l: f64, e: f64| {
            let k = (l * l - e * e).sqrt();
            if (l + k).abs() > (l - k).abs() {
                [e, l + k]
            } else {
                [l - k, e]
            }
        };
        let decay = |l: f64, e: f64| {
            let k = (l * l - e * e).sqrt();
            if (l - k).abs() > (l + k).abs() {
                [e, l - k]
            } else {
                [l + k, e]
            }
        };
        let mismatch = |e: f64| {
            let (_, cols) = propagate(&lam, e, &cuts, vec![grow(la, e)], lmax, 0.05);
            let y = cols[0];
            let v = decay(lb, e);
            (y[0] * v[1] - y[1] * v[0]) / ((y[0].hypot(y[1])) * v[0].hypot(v[1]))
        };
        eig.extend(find_roots(&mismatch, None, e_lo, e_hi, p.energy_step, 0.0));
    }
    eig.sort_by(f64::total_cmp);
    Ok(TransverseSolution {
        eigenvalues: eig,
        zero_modes_r: zr,
        zero_modes_l: zl,
    })
}
