//! Bulk connection with a wall jump.
//!
//! The tangential components are `A_a(x, t) = A_a^-(x) + p(t) B_a(x)`
//! (plus, for a twisted U(1) bundle, the uniform flux ramp), where `A^-`
//! and `B` are anti-Hermitian-valued trigonometric polynomials on the wall
//! torus and `p` is a [`TransverseProfile`]. The normal component vanishes
//! (axial gauge).

use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::linalg::{max_abs, CMat, C64, I};
use crate::profile::{Deformation, Profile, Side, TransverseProfile};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Matrix-valued trigonometric polynomial `X(x) = sum_q X_q e^{i p_q . x}`
/// on a torus.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    dim: usize,
    rank: usize,
    terms: BTreeMap<Vec<i64>, CMat>,
}

impl FourierField {
    pub fn zero(dim: usize, rank: usize) -> Self {
        Self {
            dim,
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, value: CMat) -> Self {
        let mut f = Self::zero(dim, value.nrows());
        f.insert(vec![0; dim], value);
        f
    }

    /// U(1) field `i * a` with constant real `a`.
    pub fn abelian_constant(dim: usize, a: f64) -> Self {
        Self::constant(dim, CMat::from_element(1, 1, I * a))
    }

    pub fn insert(&mut self, mode: Vec<i64>, value: CMat) {
        assert_eq!(mode.len(), self.dim, "mode dimension");
        assert_eq!(value.nrows(), self.rank, "matrix rank");
        if value.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            self.terms.remove(&mode);
            return;
        }
        *self
            .terms
            .entry(mode)
            .or_insert_with(|| CMat::zeros(value.nrows(), value.ncols())) += value;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &CMat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mode: &[i64]) -> CMat {
        self.terms
            .get(mode)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.rank, self.rank))
    }

    /// Largest `|q_mu|` present.
    pub fn bandwidth(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|k| k.iter().map(|x| x.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    /// True when only the zero mode is present.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|&x| x == 0))
    }

    /// `max |X_{-q} + X_q^dagger|`.
    pub fn anti_hermiticity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for (k, v) in &self.terms {
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            r = r.max(max_abs(&(self.coeff(&neg) + v.adjoint())));
        }
        r
    }

    pub fn eval(&self, x: &[f64], lengths: &[f64]) -> CMat {
        let mut acc = CMat::zeros(self.rank, self.rank);
        for (k, v) in &self.terms {
            let phase: f64 = k
                .iter()
                .zip(x)
                .zip(lengths)
                .map(|((&q, &xi), &l)| 2.0 * PI * q as f64 * xi / l)
                .sum();
            acc += v * C64::from_polar(1.0, phase);
        }
        acc
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = Self::zero(self.dim, self.rank);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v * s);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.insert(k.clone(), v.clone());
        }
        out
    }

    /// `d/dx^b`.
    pub fn derivative(&self, b: usize, lengths: &[f64]) -> Self {
        let mut out = Self::zero(self.dim, self.rank);
        for (k, v) in &self.terms {
            let p = 2.0 * PI * k[b] as f64 / lengths[b];
            out.insert(k.clone(), v * (I * p));
        }
        out
    }

    /// Pointwise matrix product (Fourier convolution).
    pub fn product(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim, self.rank);
        for (k1, v1) in &self.terms {
            for (k2, v2) in &other.terms {
                let k: Vec<i64> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                out.insert(k, v1 * v2);
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.product(other).plus(&other.product(self).scaled(C64::new(-1.0, 0.0)))
    }

    /// `(1/V) int tr X`.
    pub fn mean_trace(&self) -> C64 {
        self.coeff(&vec![0; self.dim]).trace()
    }
}

/// Structure group `U(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitaryGroup(pub usize);

/// Connection on `T^n` with a jump on the wall.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeConfig {
    geom: TorusGeometry,
    rank: usize,
    a_minus: Vec<FourierField>,
    jump: Vec<FourierField>,
    transverse: TransverseProfile,
    flux: i64,
}

/// Assembles a connection `A_a = A_a^- + p(s) B_a` on the given geometry.
/// `flux` is the Chern number of a twisted U(1) bundle (n = 2 only).
pub fn assemble_gauge(
    geom: &TorusGeometry,
    group: UnitaryGroup,
    a_minus: Vec<FourierField>,
    jump: Vec<FourierField>,
    profile: Profile,
    flux: i64,
) -> Result<GaugeConfig> {
    let d = geom.dim() - 1;
    let rank = group.0;
    if rank == 0 || rank > 3 {
        return Err(Error::InvalidGauge(format!("U({rank}) not supported (N <= 3)")));
    }
    if a_minus.len() != d || jump.len() != d {
        return Err(Error::InvalidGauge(format!(
            "expected {d} tangential components, got {} and {}",
            a_minus.len(),
            jump.len()
        )));
    }
    for f in a_minus.iter().chain(&jump) {
        if f.dim() != d || f.rank() != rank {
            return Err(Error::InvalidGauge("component has wrong dimension or rank".into()));
        }
        let r = f.anti_hermiticity_residual();
        if r > 1e-12 {
            return Err(Error::InvalidGauge(format!(
                "component not anti-Hermitian (residual {r:.2e})"
            )));
        }
    }
    if flux != 0 && (geom.dim() != 2 || rank != 1) {
        return Err(Error::InvalidGauge(
            "twisted bundles are supported for abelian n = 2 only".into(),
        ));
    }
    let transverse = TransverseProfile::new(profile, geom.transverse_length())?;
    Ok(GaugeConfig {
        geom: geom.clone(),
        rank,
        a_minus,
        jump,
        transverse,
        flux,
    })
}

/// U(1) configuration on `T^2` with constant wall data: `A_1^- = i a`,
/// `B_1 = i beta`, and Chern number `flux`.
pub fn abelian_wall_2d(
    geom: &TorusGeometry,
    a: f64,
    beta: f64,
    profile: Profile,
    flux: i64,
) -> Result<GaugeConfig> {
    assemble_gauge(
        geom,
        UnitaryGroup(1),
        vec![FourierField::abelian_constant(1, a)],
        vec![FourierField::abelian_constant(1, beta)],
        profile,
        flux,
    )
}

/// Field strength samples: `components[i][mu][nu]` at `points[i]`.
#[derive(Debug, Clone)]
pub struct FieldStrength {
    pub points: Vec<Vec<f64>>,
    pub components: Vec<Vec<Vec<CMat>>>,
}

impl FieldStrength {
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for f in &self.components {
            for mu in 0..f.len() {
                for nu in 0..f.len() {
                    r = r.max(max_abs(&(&f[mu][nu] + &f[nu][mu])));
                }
            }
        }
        r
    }
}

impl GaugeConfig {
    pub fn geometry(&self) -> &TorusGeometry {
        &self.geom
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn flux(&self) -> i64 {
        self.flux
    }

    pub fn profile(&self) -> &Profile {
        &self.transverse.profile
    }

    pub fn transverse(&self) -> &TransverseProfile {
        &self.transverse
    }

    pub fn a_minus(&self) -> &[FourierField] {
        &self.a_minus
    }

    /// Stored jump `B_a`.
    pub fn jump(&self) -> &[FourierField] {
        &self.jump
    }

    pub fn sigma_dim(&self) -> usize {
        self.geom.dim() - 1
    }

    pub fn sigma_lengths(&self) -> &[f64] {
        self.geom.sigma_lengths()
    }

    /// Transverse period (extended by the cylinder length if pasted).
    pub fn transverse_period(&self) -> f64 {
        self.transverse.period()
    }

    pub fn has_wall(&self) -> bool {
        self.jump.iter().any(|b| !b.is_zero())
    }

    /// All wall data constant along the wall.
    pub fn is_sigma_constant(&self) -> bool {
        self.a_minus.iter().chain(&self.jump).all(|f| f.is_constant())
    }

    /// Same connection with a different profile.
    pub fn with_profile(&self, profile: Profile) -> Result<GaugeConfig> {
        let mut out = self.clone();
        out.transverse = TransverseProfile::new(profile, self.geom.transverse_length())?;
        Ok(out)
    }

    /// Collar deformation `A^delta(s) = A(eta^delta(s))`.
    pub fn deformed(&self, d: Deformation) -> Result<GaugeConfig> {
        self.with_profile(self.transverse.profile.with_deformation(d)?)
    }

    // uniform flux ramp i (2 pi Q / L_1) (s / L_2) on the first component
    pub(crate) fn flux_ramp(&self, t: f64) -> f64 {
        if self.flux == 0 {
            return 0.0;
        }
        let s = self.transverse.original_coordinate(t);
        2.0 * PI * self.flux as f64 / self.geom.lengths()[0] * s / self.geom.transverse_length()
    }

    pub(crate) fn flux_ramp_deriv(&self, t: f64) -> f64 {
        if self.flux == 0 {
            return 0.0;
        }
        let t = self.transverse.wrap(t);
        let l = self.transverse.cylinder_length();
        if l > 0.0 && (0.0..=l).contains(&t) {
            return 0.0;
        }
        2.0 * PI * self.flux as f64 / (self.geom.lengths()[0] * self.geom.transverse_length())
    }

    /// Tangential components at a wall point `x` and transverse coordinate
    /// `t`; `side` picks the limit when `t` is exactly on the wall.
    pub fn tangential(&self, x: &[f64], t: f64, side: Side) -> Vec<CMat> {
        let p = self.transverse.value_sided(t, side);
        let lengths = self.sigma_lengths();
        let mut out: Vec<CMat> = self
            .a_minus
            .iter()
            .zip(&self.jump)
            .map(|(am, b)| am.eval(x, lengths) + b.eval(x, lengths) * C64::new(p, 0.0))
            .collect();
        if self.flux != 0 {
            out[0] += CMat::identity(1, 1) * (I * self.flux_ramp(t));
        }
        out
    }

    /// One-sided limits `A_a^pm` as Fourier data on the wall.
    pub fn wall_limit(&self, side: Side) -> Vec<FourierField> {
        let (pm, pp) = self.transverse.wall_limits();
        let p = match side {
            Side::Minus => pm,
            Side::Plus => pp,
        };
        self.a_minus
            .iter()
            .zip(&self.jump)
            .map(|(a, b)| a.plus(&b.scaled(C64::new(p, 0.0))))
            .collect()
    }

    /// Tangential components at transverse coordinate `t` as Fourier data.
    pub fn tangential_fourier(&self, t: f64, side: Side) -> Vec<FourierField> {
        let p = self.transverse.value_sided(t, side);
        let mut out: Vec<FourierField> = self
            .a_minus
            .iter()
            .zip(&self.jump)
            .map(|(a, b)| a.plus(&b.scaled(C64::new(p, 0.0))))
            .collect();
        if self.flux != 0 {
            out[0] = out[0].plus(&FourierField::abelian_constant(1, self.flux_ramp(t)));
        }
        out
    }

    /// Field strength `F_{mu nu}` at a single point (wall coordinates first,
    /// transverse coordinate last).
    pub fn field_strength_at(&self, point: &[f64]) -> Result<Vec<Vec<CMat>>> {
        let n = self.geom.dim();
        let d = n - 1;
        let t = point[d];
        let tw = self.transverse.wrap(t);
        if self.transverse.profile.jump() > 0.0 && tw == 0.0 {
            return Err(Error::OnJumpSlice);
        }
        let x = &point[..d];
        let lengths = self.sigma_lengths();
        let p = self.transverse.value(t);
        let dp = self.transverse.deriv(t);
        let zero = CMat::zeros(self.rank, self.rank);
        let a = self.tangential(x, t, Side::Plus);
        let mut f = vec![vec![zero.clone(); n]; n];
        // d_s A_a
        for ai in 0..d {
            let mut ds = self.jump[ai].eval(x, lengths) * C64::new(dp, 0.0);
            if ai == 0 && self.flux != 0 {
                ds += CMat::identity(1, 1) * (I * self.flux_ramp_deriv(t));
            }
            // F_{n a} = d_n A_a - d_a A_n = d_s A_a
            f[d][ai] = ds.clone();
            f[ai][d] = -ds;
        }
        for ai in 0..d {
            for bi in (ai + 1)..d {
                let da_b = self.a_minus[bi]
                    .derivative(ai, lengths)
                    .plus(&self.jump[bi].derivative(ai, lengths).scaled(C64::new(p, 0.0)))
                    .eval(x, lengths);
                let db_a = self.a_minus[ai]
                    .derivative(bi, lengths)
                    .plus(&self.jump[ai].derivative(bi, lengths).scaled(C64::new(p, 0.0)))
                    .eval(x, lengths);
                let comm = &a[ai] * &a[bi] - &a[bi] * &a[ai];
                let fab = da_b - db_a + comm;
                f[bi][ai] = -fab.clone();
                f[ai][bi] = fab;
            }
        }
        Ok(f)
    }
}

/// Samples `F_{mu nu}` at every point of `grid`.
pub fn field_strength(cfg: &GaugeConfig, grid: &[Vec<f64>]) -> Result<FieldStrength> {
    let components = grid
        .iter()
        .map(|p| cfg.field_strength_at(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldStrength {
        points: grid.to_vec(),
        components,
    })
}

/// Field strength `F_ab` on the wall from one-sided limits of the connection.
pub fn wall_field_strength(cfg: &GaugeConfig, x: &[f64], side: Side) -> Vec<Vec<CMat>> {
    let lim = cfg.wall_limit(side);
    sigma_curvature(&lim, cfg.sigma_lengths(), x)
}

/// Curvature of a connection given as Fourier data on the wall torus.
pub fn sigma_curvature(conn: &[FourierField], lengths: &[f64], x: &[f64]) -> Vec<Vec<CMat>> {
    let d = conn.len();
    let rank = conn[0].rank();
    let mut f = vec![vec![CMat::zeros(rank, rank); d]; d];
    let vals: Vec<CMat> = conn.iter().map(|c| c.eval(x, lengths)).collect();
    for a in 0..d {
        for b in (a + 1)..d {
            let fab = conn[b].derivative(a, lengths).eval(x, lengths)
                - conn[a].derivative(b, lengths).eval(x, lengths)
                + &vals[a] * &vals[b]
                - &vals[b] * &vals[a];
            f[b][a] = -fab.clone();
            f[a][b] = fab;
        }
    }
    f
}

/// Curvature components `F_ab` of a wall connection as Fourier data.
pub fn sigma_curvature_fourier(conn: &[FourierField], lengths: &[f64]) -> Vec<Vec<FourierField>> {
    let d = conn.len();
    let rank = conn[0].rank();
    let mut f = vec![vec![FourierField::zero(d, rank); d]; d];
    for a in 0..d {
        for b in (a + 1)..d {
            let fab = conn[b]
                .derivative(a, lengths)
                .plus(&conn[a].derivative(b, lengths).scaled(C64::new(-1.0, 0.0)))
                .plus(&conn[a].commutator(&conn[b]));
            f[b][a] = fab.scaled(C64::new(-1.0, 0.0));
            f[a][b] = fab;
        }
    }
    f
}
