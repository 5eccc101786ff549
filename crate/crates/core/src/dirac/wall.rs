//! The family `D(s) = i gh^a (d_a + A_a^- + f(s/l) B_a)` on the wall.

use super::{push_block, Basis, HermitianOperator};
use crate::clifford::{wall_adapt, GammaRep};
use crate::error::{Error, Result};
use crate::gauge::{FourierField, GaugeConfig};
use crate::geometry::FourierModeSet;
use crate::linalg::{CMat, C64, I};
use crate::profile::{smear, smear_deriv};
use crate::quadrature::Rule;

/// Wall operators along the interpolation `s in [0, l]`.
#[derive(Debug, Clone)]
pub struct WallFamily {
    length: f64,
    rule: Rule,
    modes: FourierModeSet,
    gammas: Vec<CMat>,
    a_minus: Vec<FourierField>,
    jump: Vec<FourierField>,
}

/// Builds the wall family of `cfg` with `samples` Gauss-Legendre nodes.
/// The interval length is the cylinder length for pasted configurations
/// and 1 otherwise (the relative asymmetry does not depend on it).
pub fn assemble_wall_family(
    cfg: &GaugeConfig,
    rep: &GammaRep,
    sigma_cutoffs: &[usize],
    samples: usize,
) -> Result<WallFamily> {
    if samples < 8 {
        return Err(Error::InsufficientSamples {
            needed: 8,
            have: samples,
        });
    }
    let rep = if rep.is_wall_adapted() { rep.clone() } else { wall_adapt(rep) };
    let modes = FourierModeSet::new(cfg.sigma_lengths(), sigma_cutoffs)?;
    let l = match cfg.transverse().cylinder_length() {
        x if x > 0.0 => x,
        _ => 1.0,
    };
    Ok(WallFamily {
        length: l,
        rule: Rule::gauss_legendre(samples, 0.0, l),
        modes,
        gammas: rep.reduced().to_vec(),
        a_minus: cfg.a_minus().to_vec(),
        jump: cfg.jump().to_vec(),
    })
}

impl WallFamily {
    /// Family from raw wall data.
    pub fn from_parts(
        modes: FourierModeSet,
        gammas: Vec<CMat>,
        a_minus: Vec<FourierField>,
        jump: Vec<FourierField>,
        length: f64,
        samples: usize,
    ) -> Result<Self> {
        if samples < 8 {
            return Err(Error::InsufficientSamples {
                needed: 8,
                have: samples,
            });
        }
        Ok(Self {
            length,
            rule: Rule::gauss_legendre(samples, 0.0, length),
            modes,
            gammas,
            a_minus,
            jump,
        })
    }

    /// Same family with a different number of quadrature samples.
    pub fn with_samples(&self, samples: usize) -> Result<Self> {
        Self::from_parts(
            self.modes.clone(),
            self.gammas.clone(),
            self.a_minus.clone(),
            self.jump.clone(),
            self.length,
            samples,
        )
    }

    /// Family traversed backwards (`A^-` and `A^+` exchanged).
    pub fn reversed(&self) -> Self {
        let a_plus: Vec<FourierField> = self
            .a_minus
            .iter()
            .zip(&self.jump)
            .map(|(a, b)| a.plus(b))
            .collect();
        let neg: Vec<FourierField> = self.jump.iter().map(|b| b.scaled(C64::new(-1.0, 0.0))).collect();
        Self {
            a_minus: a_plus,
            jump: neg,
            ..self.clone()
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn samples(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    pub fn sigma_modes(&self) -> &FourierModeSet {
        &self.modes
    }

    pub fn gammas(&self) -> &[CMat] {
        &self.gammas
    }

    pub fn a_minus(&self) -> &[FourierField] {
        &self.a_minus
    }

    pub fn jump(&self) -> &[FourierField] {
        &self.jump
    }

    pub fn sigma_dim(&self) -> usize {
        self.modes.dim()
    }

    pub fn rank(&self) -> usize {
        self.a_minus[0].rank()
    }

    pub fn spinor_dim(&self) -> usize {
        self.gammas[0].nrows()
    }

    /// Interpolation weight `f(s/l)`.
    pub fn weight(&self, s: f64) -> f64 {
        smear((s / self.length).clamp(0.0, 1.0))
    }

    /// `d/ds f(s/l)`.
    pub fn weight_deriv(&self, s: f64) -> f64 {
        smear_deriv((s / self.length).clamp(0.0, 1.0)) / self.length
    }

    /// Connection `A^- + f(s/l) B` on the wall.
    pub fn connection_at(&self, s: f64) -> Vec<FourierField> {
        let w = C64::new(self.weight(s), 0.0);
        self.a_minus
            .iter()
            .zip(&self.jump)
            .map(|(a, b)| a.plus(&b.scaled(w)))
            .collect()
    }

    pub fn operator_at(&self, s: f64) -> HermitianOperator {
        sigma_operator(&self.modes, &self.gammas, &self.connection_at(s))
    }

    /// Closed-form `dD/ds = f'(s/l)/l * i gh^a B_a`.
    pub fn deriv_at(&self, s: f64) -> HermitianOperator {
        let w = C64::new(self.weight_deriv(s), 0.0);
        let b: Vec<FourierField> = self.jump.iter().map(|b| b.scaled(w)).collect();
        clifford_multiplication(&self.modes, &self.gammas, &b)
    }

    /// `i gh^a B_a`, which equals `D^+ - D^-`.
    pub fn jump_operator(&self) -> HermitianOperator {
        clifford_multiplication(&self.modes, &self.gammas, &self.jump)
    }

    pub fn minus(&self) -> HermitianOperator {
        self.operator_at(0.0)
    }

    pub fn plus(&self) -> HermitianOperator {
        self.operator_at(self.length)
    }
}

/// Galerkin matrix of `i gh^a (d_a + A_a)` on the wall torus.
pub fn sigma_operator(
    modes: &FourierModeSet,
    gammas: &[CMat],
    conn: &[FourierField],
) -> HermitianOperator {
    build(modes, gammas, conn, true)
}

/// Galerkin matrix of the multiplication operator `i gh^a X_a`.
pub fn clifford_multiplication(
    modes: &FourierModeSet,
    gammas: &[CMat],
    fields: &[FourierField],
) -> HermitianOperator {
    build(modes, gammas, fields, false)
}

fn build(modes: &FourierModeSet, gammas: &[CMat], conn: &[FourierField], free: bool) -> HermitianOperator {
    let sd = gammas[0].nrows();
    let rank = conn[0].rank();
    let blk = sd * rank;
    let mut shifts: std::collections::BTreeMap<Vec<i64>, CMat> = Default::default();
    for (g, field) in gammas.iter().zip(conn) {
        for (q, v) in field.terms() {
            let e = shifts.entry(q.clone()).or_insert_with(|| CMat::zeros(blk, blk));
            *e += g.kronecker(v) * I;
        }
    }
    let mut trip = Vec::new();
    for (i, k) in modes.modes().iter().enumerate() {
        if free {
            let p = modes.momentum(i);
            let mut f = CMat::zeros(sd, sd);
            for (g, pa) in gammas.iter().zip(&p) {
                f -= g * C64::new(*pa, 0.0);
            }
            push_block(&mut trip, i * blk, i * blk, &f.kronecker(&CMat::identity(rank, rank)));
        }
        for (q, g) in &shifts {
            let kp: Vec<i64> = k.iter().zip(q).map(|(a, b)| a - b).collect();
            if let Some(j) = modes.index_of(&kp) {
                push_block(&mut trip, i * blk, j * blk, g);
            }
        }
    }
    HermitianOperator::from_triplets(
        modes.len() * blk,
        trip,
        None,
        Basis::Fourier {
            modes: modes.clone(),
            spinor_dim: sd,
            rank,
        },
    )
}
