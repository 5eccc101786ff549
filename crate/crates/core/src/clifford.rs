//! Euclidean gamma matrices in `n = 2, 4`, the chirality matrix and the
//! wall-adapted block basis with reduced matrices on the wall.

use crate::error::{Error, Result};
use crate::linalg::{c, kron, max_abs, pauli, signed_permutations, CMat, C64, I};

#[derive(Debug, Clone, PartialEq)]
pub struct GammaRep {
    dim: usize,
    gammas: Vec<CMat>,
    chirality: CMat,
    wall_adapted: bool,
    reduced: Vec<CMat>,
}

impl GammaRep {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_dim(&self) -> usize {
        self.dim / 2
    }

    pub fn spinor_dim(&self) -> usize {
        1 << (self.dim / 2)
    }

    pub fn gammas(&self) -> &[CMat] {
        &self.gammas
    }

    pub fn gamma(&self, mu: usize) -> &CMat {
        &self.gammas[mu]
    }

    pub fn chirality(&self) -> &CMat {
        &self.chirality
    }

    pub fn is_wall_adapted(&self) -> bool {
        self.wall_adapted
    }

    /// Reduced matrices on the wall; empty unless wall-adapted.
    pub fn reduced(&self) -> &[CMat] {
        &self.reduced
    }

    /// `max |g^mu g^nu + g^nu g^mu - 2 delta^{mu nu}|`.
    pub fn clifford_residual(&self) -> f64 {
        clifford_residual(&self.gammas)
    }

    /// Worst of `|g*^2 - 1|`, `|g* g^mu + g^mu g*|`, and the Hermiticity
    /// residuals of all matrices.
    pub fn chirality_residual(&self) -> f64 {
        let d = self.spinor_dim();
        let id = CMat::identity(d, d);
        let g = &self.chirality;
        let mut r = max_abs(&(g * g - &id)).max(max_abs(&(g - g.adjoint())));
        for gm in &self.gammas {
            r = r
                .max(max_abs(&(g * gm + gm * g)))
                .max(max_abs(&(gm - gm.adjoint())));
        }
        r
    }

    /// Deviation of the reduced matrices from the orientation constraint
    /// `eps_{a..c n} gh^a ... gh^c = -(n-1)! (-i)^{m-1}`.
    pub fn orientation_residual(&self) -> f64 {
        if !self.wall_adapted {
            return f64::NAN;
        }
        let lhs = epsilon_contraction(&self.reduced);
        let m = self.half_dim() as i32;
        let target = -(factorial(self.dim - 1) as f64) * (-I).powi(m - 1);
        let d = lhs.nrows();
        max_abs(&(lhs - CMat::identity(d, d) * target))
    }

    /// Ratio between the flat index density and the top-degree Chern
    /// character for this chirality convention: `tr(g* g^1...g^n) / (2i)^m`.
    pub fn index_density_sign(&self) -> f64 {
        let mut prod = self.chirality.clone();
        for g in &self.gammas {
            prod = prod * g;
        }
        let tr = prod.trace();
        let m = self.half_dim() as i32;
        let v = tr / (c(0.0, 2.0)).powi(m);
        v.re
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}

fn clifford_residual(gammas: &[CMat]) -> f64 {
    let d = gammas[0].nrows();
    let id = CMat::identity(d, d);
    let mut r: f64 = 0.0;
    for (i, a) in gammas.iter().enumerate() {
        for (j, b) in gammas.iter().enumerate() {
            let target = if i == j { &id * c(2.0, 0.0) } else { CMat::zeros(d, d) };
            r = r.max(max_abs(&(a * b + b * a - target)));
        }
    }
    r
}

/// `sum_perm sign * g^{p1} ... g^{pk}`.
fn epsilon_contraction(gammas: &[CMat]) -> CMat {
    let d = gammas[0].nrows();
    let mut acc = CMat::zeros(d, d);
    for (perm, sign) in signed_permutations(gammas.len()) {
        let mut prod = CMat::identity(d, d);
        for &p in &perm {
            prod *= &gammas[p];
        }
        acc += prod * c(sign, 0.0);
    }
    acc
}

/// Chirality matrix `g* = -(i^m / n!) eps_{mu..rho} g^mu ... g^rho`.
pub fn chirality_from(gammas: &[CMat]) -> CMat {
    let n = gammas.len();
    let m = (n / 2) as i32;
    let pref = -I.powi(m) / c(factorial(n) as f64, 0.0);
    epsilon_contraction(gammas) * pref
}

/// A Hermitian representation in the standard chiral form.
pub fn standard_rep(n: usize) -> Result<GammaRep> {
    let [s1, s2, s3] = pauli();
    let gammas = match n {
        2 => vec![s1, s2],
        4 => {
            let id2 = CMat::identity(2, 2);
            vec![
                kron(&s1, &s1),
                kron(&s1, &s2),
                kron(&s1, &s3),
                kron(&s2, &id2),
            ]
        }
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    let chirality = chirality_from(&gammas);
    Ok(GammaRep {
        dim: n,
        gammas,
        chirality,
        wall_adapted: false,
        reduced: Vec::new(),
    })
}

/// The wall-adapted representation
/// `g^a = sx (x) gh^a`, `g^n = [[0, i], [-i, 0]] (x) 1`, `g* = sz (x) 1`.
pub fn wall_adapt(rep: &GammaRep) -> GammaRep {
    if rep.wall_adapted {
        return rep.clone();
    }
    let [s1, s2, s3] = pauli();
    let reduced: Vec<CMat> = match rep.dim {
        // -(n-1)! (-i)^0 = -1 fixes the 1x1 matrix.
        2 => vec![CMat::from_element(1, 1, c(-1.0, 0.0))],
        // gh^1 gh^2 gh^3 = i, i.e. eps gh gh gh = 3! i = -(3!) (-i)^1.
        _ => vec![s1.clone(), s2.clone(), s3.clone()],
    };
    let h = reduced[0].nrows();
    let id = CMat::identity(h, h);
    let normal = &s2 * c(-1.0, 0.0);
    let mut gammas: Vec<CMat> = reduced.iter().map(|g| kron(&s1, g)).collect();
    gammas.push(kron(&normal, &id));
    GammaRep {
        dim: rep.dim,
        gammas,
        chirality: kron(&s3, &id),
        wall_adapted: true,
        reduced,
    }
}

/// `tr(gh^a gh^b gh^c)` style products are needed by the heat-kernel code.
pub fn product(ms: &[&CMat]) -> CMat {
    let d = ms[0].nrows();
    ms.iter().fold(CMat::identity(d, d), |acc, m| acc * *m)
}

/// Zero matrix helper of spinor size.
pub fn zeros_like(rep: &GammaRep) -> CMat {
    let d = rep.spinor_dim();
    CMat::from_element(d, d, C64::new(0.0, 0.0))
}
