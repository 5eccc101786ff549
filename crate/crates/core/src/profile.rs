//! Transverse interpolation profiles.
//!
//! * `f` - normalized bump integral, flat to all orders at 0 and 1.
//! * `chi^delta` - wall smoothing with one-sided values `delta/2` and
//!   `1 - delta/2` at `s = 0`, built from rescaled copies of `f`.
//! * `eta^delta` - reparameterization that produces a product collar.
//!
//! A [`TransverseProfile`] places a profile on the transverse circle and
//! adds the uniform ramp `-s/L_n` that brings the connection back to its
//! starting value at the antipodal slice, so the only jump sits on the wall.

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::quadrature::{composite, Rule};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

fn bump(v: f64) -> f64 {
    if v <= 0.0 || v >= 1.0 {
        0.0
    } else {
        (-1.0 / (v * (1.0 - v))).exp()
    }
}

fn bump_rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| Rule::gauss_legendre(48, 0.0, 1.0))
}

fn bump_norm() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| 2.0 * bump_integral(0.5))
}

// int_0^u bump, u in [0, 1/2], composite over 8 panels
fn bump_integral(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let rule = bump_rule();
    let panels = 8;
    let h = u / panels as f64;
    (0..panels)
        .map(|p| {
            let a = p as f64 * h;
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| w * h * bump(a + h * x))
                .sum::<f64>()
        })
        .sum()
}

/// The smearing function `f(u)`, extended by 0 below 0 and by 1 above 1.
pub fn smear(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else if u <= 0.5 {
        bump_integral(u) / bump_norm()
    } else {
        1.0 - bump_integral(1.0 - u) / bump_norm()
    }
}

/// `f'(u)` in closed form.
pub fn smear_deriv(u: f64) -> f64 {
    bump(u) / bump_norm()
}

/// `f''(u)` in closed form.
pub fn smear_second_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let q = u * (1.0 - u);
    smear_deriv(u) * (1.0 - 2.0 * u) / (q * q)
}

/// Scalar smearing function handle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SmearingFunction;

impl SmearingFunction {
    pub fn value(&self, u: f64) -> f64 {
        smear(u)
    }
    pub fn deriv(&self, u: f64) -> f64 {
        smear_deriv(u)
    }
}

pub fn make_profile_f() -> SmearingFunction {
    SmearingFunction
}

/// Which side of the wall a point at `s = 0` is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    Sharp,
    Smoothed { delta: f64, delta0: f64 },
    Cylinder { length: f64 },
}

/// Collar deformation `s -> eta^delta(s)` on `|s| <= eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    pub delta: f64,
    pub eps1: f64,
    pub eps: f64,
}

impl Deformation {
    pub fn new(delta: f64, eps1: f64, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidProfile(format!("delta {delta} outside [0,1]")));
        }
        if !(eps1 > 0.0 && eps1 < eps) {
            return Err(Error::InvalidProfile(format!(
                "need 0 < eps1 < eps, got {eps1}, {eps}"
            )));
        }
        Ok(Self { delta, eps1, eps })
    }

    /// `eta^1(s)`: 0 on `[0, eps1]`, `s` for `s >= eps`.
    pub fn eta_one(&self, s: f64) -> f64 {
        s * smear((s - self.eps1) / (self.eps - self.eps1))
    }

    fn eta_one_deriv(&self, s: f64) -> f64 {
        let w = self.eps - self.eps1;
        smear((s - self.eps1) / w) + s * smear_deriv((s - self.eps1) / w) / w
    }

    /// `eta^delta(s) = s (1 - delta) + delta eta^1(s)` for `s >= 0`.
    pub fn eta(&self, s: f64) -> f64 {
        s * (1.0 - self.delta) + self.delta * self.eta_one(s)
    }

    pub fn eta_deriv(&self, s: f64) -> f64 {
        (1.0 - self.delta) + self.delta * self.eta_one_deriv(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub kind: ProfileKind,
    #[serde(default)]
    pub deformation: Option<Deformation>,
}

impl Profile {
    pub fn sharp() -> Self {
        Profile {
            kind: ProfileKind::Sharp,
            deformation: None,
        }
    }

    pub fn cylinder(length: f64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::InvalidProfile(format!("cylinder length {length}")));
        }
        Ok(Profile {
            kind: ProfileKind::Cylinder { length },
            deformation: None,
        })
    }

    pub fn with_deformation(mut self, d: Deformation) -> Result<Self> {
        if matches!(self.kind, ProfileKind::Cylinder { .. }) {
            return Err(Error::InvalidProfile(
                "collar deformation applies to the original manifold only".into(),
            ));
        }
        self.deformation = Some(d);
        Ok(self)
    }

    pub fn is_sharp(&self) -> bool {
        matches!(self.kind, ProfileKind::Sharp)
    }

    /// True if the connection has no jump anywhere.
    pub fn is_continuous(&self) -> bool {
        match self.kind {
            ProfileKind::Sharp => false,
            ProfileKind::Smoothed { delta, .. } => delta == 1.0,
            ProfileKind::Cylinder { .. } => true,
        }
    }

    /// Size of the jump of `chi` at `s = 0`.
    pub fn jump(&self) -> f64 {
        match self.kind {
            ProfileKind::Sharp => 1.0,
            ProfileKind::Smoothed { delta, .. } => 1.0 - delta,
            ProfileKind::Cylinder { .. } => 0.0,
        }
    }

    /// Wall interpolation `chi(s)` near the wall (no ramp); for the cylinder
    /// this is `f(s / l)`.
    pub fn chi(&self, s: f64, side: Side) -> f64 {
        match self.kind {
            ProfileKind::Sharp => step(s, side),
            ProfileKind::Smoothed { delta, delta0 } => chi_delta(delta, delta0, s, side),
            ProfileKind::Cylinder { length } => smear(s / length),
        }
    }

    pub fn chi_deriv(&self, s: f64) -> f64 {
        match self.kind {
            ProfileKind::Sharp => 0.0,
            ProfileKind::Smoothed { delta, delta0 } => chi_delta_deriv(delta, delta0, s),
            ProfileKind::Cylinder { length } => smear_deriv(s / length) / length,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        match self.kind {
            ProfileKind::Sharp => {}
            ProfileKind::Smoothed { delta, delta0 } => {
                b.push(-delta0);
                if delta > 0.0 {
                    b.push(delta);
                }
            }
            ProfileKind::Cylinder { length } => b.push(length),
        }
        if let Some(d) = self.deformation {
            b.extend([d.eps1, d.eps, -d.eps1, -d.eps]);
        }
        b
    }
}

fn step(s: f64, side: Side) -> f64 {
    if s > 0.0 || (s == 0.0 && side == Side::Plus) {
        1.0
    } else {
        0.0
    }
}

fn chi_delta(delta: f64, delta0: f64, s: f64, side: Side) -> f64 {
    let plus = s > 0.0 || (s == 0.0 && side == Side::Plus);
    if plus {
        if s >= delta {
            1.0
        } else {
            1.0 - 0.5 * delta + 0.5 * delta * smear(s / delta)
        }
    } else if s <= -delta0 {
        0.0
    } else {
        0.5 * delta * smear((s + delta0) / delta0)
    }
}

fn chi_delta_deriv(delta: f64, delta0: f64, s: f64) -> f64 {
    if s > 0.0 {
        if s >= delta {
            0.0
        } else {
            0.5 * smear_deriv(s / delta)
        }
    } else if s <= -delta0 || s == 0.0 {
        0.0
    } else {
        0.5 * delta * smear_deriv((s + delta0) / delta0) / delta0
    }
}

/// `chi^delta` as a profile; `delta0` is the half-width on the minus side.
pub fn make_chi_delta(delta: f64, delta0: f64) -> Result<Profile> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidProfile(format!("delta {delta} outside [0,1]")));
    }
    if !(delta0 > 0.0) {
        return Err(Error::InvalidProfile(format!("delta0 {delta0} must be positive")));
    }
    Ok(Profile {
        kind: ProfileKind::Smoothed { delta, delta0 },
        deformation: None,
    })
}

/// A profile placed on the transverse circle of length `base_length`
/// (extended by `l` for the pasted cylinder), including the compensating
/// ramp.
///
/// Points are addressed by `t` in `(t0, t0 + period]` with
/// `t0 = -base_length / 2`; the wall (or the start of the cylinder) is at
/// `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseProfile {
    pub profile: Profile,
    pub base_length: f64,
}

impl TransverseProfile {
    pub fn new(profile: Profile, base_length: f64) -> Result<Self> {
        let half = 0.5 * base_length;
        match profile.kind {
            ProfileKind::Smoothed { delta, delta0 } => {
                if delta >= half || delta0 >= half {
                    return Err(Error::InvalidProfile(format!(
                        "smoothing widths ({delta0}, {delta}) exceed half the transverse period"
                    )));
                }
            }
            ProfileKind::Sharp | ProfileKind::Cylinder { .. } => {}
        }
        if let Some(d) = profile.deformation {
            if d.eps >= half {
                return Err(Error::InvalidProfile("collar wider than half period".into()));
            }
        }
        Ok(Self {
            profile,
            base_length,
        })
    }

    pub fn cylinder_length(&self) -> f64 {
        match self.profile.kind {
            ProfileKind::Cylinder { length } => length,
            _ => 0.0,
        }
    }

    pub fn period(&self) -> f64 {
        self.base_length + self.cylinder_length()
    }

    pub fn start(&self) -> f64 {
        -0.5 * self.base_length
    }

    /// Wraps an arbitrary coordinate into `[t0, t0 + period)`.
    pub fn wrap(&self, t: f64) -> f64 {
        let t0 = self.start();
        t0 + (t - t0).rem_euclid(self.period())
    }

    /// Coordinate on the original manifold for a point of the (possibly
    /// extended) circle; points on the cylinder map to the wall.
    pub fn original_coordinate(&self, t: f64) -> f64 {
        let t = self.wrap(t);
        let l = self.cylinder_length();
        if t < 0.0 {
            t
        } else if t <= l {
            0.0
        } else {
            t - l
        }
    }

    // collar reparameterization and its derivative; keeps the side of 0
    fn reparam(&self, t: f64) -> (f64, f64) {
        match self.profile.deformation {
            Some(d) if t.abs() <= d.eps => {
                let r = d.eta(t.abs());
                (t.signum() * r, d.eta_deriv(t.abs()))
            }
            _ => (t, 1.0),
        }
    }

    fn base_value(&self, x: f64, side: Side) -> f64 {
        self.profile.chi(x, side) - x / self.base_length
    }

    fn base_deriv(&self, x: f64) -> f64 {
        self.profile.chi_deriv(x) - 1.0 / self.base_length
    }

    /// Profile value `p(t)`; at the wall the `side` selects the limit.
    pub fn value_sided(&self, t: f64, side: Side) -> f64 {
        let t = self.wrap(t);
        if let ProfileKind::Cylinder { length } = self.profile.kind {
            return if t < 0.0 {
                -t / self.base_length
            } else if t <= length {
                smear(t / length)
            } else {
                1.0 - (t - length) / self.base_length
            };
        }
        let (x, _) = self.reparam(t);
        let side = if t > 0.0 {
            Side::Plus
        } else if t < 0.0 {
            Side::Minus
        } else {
            side
        };
        self.base_value(x, side)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.value_sided(t, Side::Plus)
    }

    /// `dp/dt` away from the jump.
    pub fn deriv(&self, t: f64) -> f64 {
        let t = self.wrap(t);
        if let ProfileKind::Cylinder { length } = self.profile.kind {
            return if t < 0.0 || t > length {
                -1.0 / self.base_length
            } else {
                smear_deriv(t / length) / length
            };
        }
        let (x, dx) = self.reparam(t);
        if x == 0.0 {
            return 0.0;
        }
        self.base_deriv(x) * dx
    }

    /// Values of `p` immediately on the minus and plus side of the wall
    /// (for the cylinder: at its two ends).
    pub fn wall_limits(&self) -> (f64, f64) {
        match self.profile.kind {
            ProfileKind::Cylinder { .. } => (0.0, 1.0),
            _ => (
                self.value_sided(0.0, Side::Minus),
                self.value_sided(0.0, Side::Plus),
            ),
        }
    }

    /// Points where `p` or one of its derivatives is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let t0 = self.start();
        let mut b: Vec<f64> = self.profile.breakpoints();
        b.push(t0);
        b.push(t0 + self.period());
        b.retain(|&x| x >= t0 && x <= t0 + self.period());
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Composite quadrature over one period avoiding all breakpoints.
    pub fn period_rule(&self, panels: usize, order: usize) -> Rule {
        let t0 = self.start();
        composite(t0, t0 + self.period(), &self.breakpoints(), panels, order)
    }

    /// Fourier coefficients `p_q = (1/T) int p(t) e^{-2 pi i q t / T} dt`,
    /// `q = -qmax ..= qmax`.
    pub fn fourier(&self, qmax: usize) -> Vec<C64> {
        let period = self.period();
        let rule = self.period_rule(24 + qmax, 16);
        let vals: Vec<f64> = rule.nodes.iter().map(|&t| self.value(t)).collect();
        let q = qmax as i64;
        (-q..=q)
            .map(|k| {
                let w = -2.0 * PI * k as f64 / period;
                let mut acc = C64::new(0.0, 0.0);
                for ((&t, &wt), &v) in rule.nodes.iter().zip(&rule.weights).zip(&vals) {
                    acc += C64::from_polar(wt * v, w * t);
                }
                acc / period
            })
            .collect()
    }
}
