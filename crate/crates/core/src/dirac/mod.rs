//! Finite Hermitian representations of the bulk operator, the wall family
//! `D(s)` and the sharp-wall transverse problem.

mod landau;
mod transverse;
mod wall;

pub use landau::{assemble_twisted, LandauBasis};
pub use transverse::{solve_transverse, TransverseModeProblem, TransverseSolution};
pub use wall::{assemble_wall_family, clifford_multiplication, sigma_operator, WallFamily};

use crate::clifford::{wall_adapt, GammaRep};
use crate::error::{Error, Result};
use crate::gauge::GaugeConfig;
use crate::geometry::FourierModeSet;
use crate::linalg::{CMat, C64, I};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// Basis description attached to an operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// Plane waves on a torus tensor spinor tensor colour, ordered with the
    /// colour index fastest.
    Fourier {
        modes: FourierModeSet,
        spinor_dim: usize,
        rank: usize,
    },
    /// Hermite functions on the unrolled momentum chains of a twisted bundle.
    Landau(LandauBasis),
    Generic,
}

impl Basis {
    pub fn describe(&self) -> String {
        match self {
            Basis::Fourier {
                modes,
                spinor_dim,
                rank,
            } => format!(
                "fourier modes={} cutoffs={:?} lengths={:?} spinor={} rank={} order=(mode,spinor,colour)",
                modes.len(),
                modes.cutoffs(),
                modes.lengths(),
                spinor_dim,
                rank
            ),
            Basis::Landau(b) => format!(
                "landau chains={} levels_r={} levels_l={} order=(R chains x levels, L chains x levels)",
                b.chains, b.levels_r, b.levels_l
            ),
            Basis::Generic => "generic".into(),
        }
    }
}

/// Sparse Hermitian matrix with an optional diagonal chirality.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    dim: usize,
    rows: Vec<Vec<(usize, C64)>>,
    chirality: Option<Vec<f64>>,
    basis: Basis,
    squared: bool,
}

impl HermitianOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
        chirality: Option<Vec<f64>>,
        basis: Basis,
    ) -> Self {
        let mut maps: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
        for (i, j, v) in triplets {
            *maps[i].entry(j).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let rows = maps
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| v.norm() > 0.0).collect())
            .collect();
        Self {
            dim,
            rows,
            chirality,
            basis,
            squared: false,
        }
    }

    pub fn from_dense(m: &CMat, chirality: Option<Vec<f64>>) -> Self {
        let n = m.nrows();
        let trip = (0..n).flat_map(|i| (0..n).map(move |j| (i, j, m[(i, j)])));
        Self::from_triplets(n, trip, chirality, Basis::Generic)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<(usize, C64)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Diagonal of the chirality matrix in this basis.
    pub fn chirality(&self) -> Option<&[f64]> {
        self.chirality.as_deref()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn is_squared(&self) -> bool {
        self.squared
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, v)| v * x[j]).sum())
            .collect()
    }

    fn entry(&self, i: usize, j: usize) -> C64 {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(p) => self.rows[i][p].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `max |H - H^dagger|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                r = r.max((v - self.entry(j, i).conj()).norm());
            }
        }
        r
    }

    /// `max |G H + H G|` for the diagonal chirality `G`.
    pub fn anticommutator_residual(&self) -> Option<f64> {
        self.chirality_residual(|a, b| a + b)
    }

    /// `max |G H - H G|`.
    pub fn commutator_residual(&self) -> Option<f64> {
        self.chirality_residual(|a, b| a - b)
    }

    fn chirality_residual(&self, op: impl Fn(f64, f64) -> f64) -> Option<f64> {
        let g = self.chirality.as_ref()?;
        let mut r: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                r = r.max((v * op(g[i], g[j])).norm());
            }
        }
        Some(r)
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|e| e.1.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Connected components of the coupling graph, each sorted.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.dim {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Dense submatrix on the given index set.
    pub fn submatrix(&self, idx: &[usize]) -> CMat {
        let pos: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let mut m = CMat::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for &(j, v) in &self.rows[i] {
                if let Some(&b) = pos.get(&j) {
                    m[(a, b)] = v;
                }
            }
        }
        m
    }

    /// Writes the dense matrix: a text header terminated by `end\n`, then
    /// row-major little-endian `(re, im)` f64 pairs.
    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "dwall-operator 1")?;
        writeln!(f, "dim {}", self.dim)?;
        writeln!(f, "basis {}", self.basis.describe())?;
        writeln!(f, "squared {}", self.squared)?;
        writeln!(f, "format row-major complex128 little-endian (re, im)")?;
        writeln!(f, "end")?;
        for i in 0..self.dim {
            let mut row = vec![C64::new(0.0, 0.0); self.dim];
            for &(j, v) in &self.rows[i] {
                row[j] = v;
            }
            for z in row {
                f.write_all(&z.re.to_le_bytes())?;
                f.write_all(&z.im.to_le_bytes())?;
            }
        }
        f.flush()?;
        Ok(())
    }
}

/// Reads a dump written by [`HermitianOperator::write_dump`].
pub fn read_dump(path: &Path) -> Result<CMat> {
    let bytes = std::fs::read(path)?;
    let marker = b"end\n";
    let pos = bytes
        .windows(marker.len())
        .position(|w| w == marker)
        .ok_or_else(|| Error::Io("dump header has no end marker".into()))?;
    let header = String::from_utf8_lossy(&bytes[..pos]);
    let dim: usize = header
        .lines()
        .find_map(|l| l.strip_prefix("dim "))
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| Error::Io("dump header has no dimension".into()))?;
    let body = &bytes[pos + marker.len()..];
    if body.len() != dim * dim * 16 {
        return Err(Error::Io(format!("dump body has {} bytes", body.len())));
    }
    let val = |k: usize| f64::from_le_bytes(body[8 * k..8 * k + 8].try_into().unwrap());
    Ok(CMat::from_fn(dim, dim, |i, j| {
        let k = 2 * (i * dim + j);
        C64::new(val(k), val(k + 1))
    }))
}

/// Fourier mode set for the bulk of a configuration: `cutoffs` per
/// direction on the (possibly cylinder-extended) torus.
pub fn bulk_modes(cfg: &GaugeConfig, cutoffs: &[usize]) -> Result<FourierModeSet> {
    let mut lengths = cfg.sigma_lengths().to_vec();
    lengths.push(cfg.transverse_period());
    FourierModeSet::new(&lengths, cutoffs)
}

/// Galerkin matrix of `i gamma^mu (d_mu + A_mu)`.
///
/// Periodic configurations use the plane-wave basis `modes`; a twisted
/// U(1) bundle uses Hermite chains with `2 * cutoffs[0]` levels.
pub fn assemble_bulk(
    modes: &FourierModeSet,
    rep: &GammaRep,
    cfg: &GaugeConfig,
) -> Result<HermitianOperator> {
    if cfg.profile().is_sharp() {
        return Err(Error::SharpProfile);
    }
    if rep.dim() != cfg.geometry().dim() {
        return Err(Error::InvalidGauge("gamma rep and geometry disagree".into()));
    }
    if cfg.flux() != 0 {
        return assemble_twisted(cfg, 2 * modes.cutoffs()[0]);
    }
    let n = rep.dim();
    if modes.dim() != n {
        return Err(Error::InvalidCutoffs("mode set dimension".into()));
    }
    if (modes.lengths()[n - 1] - cfg.transverse_period()).abs() > 1e-12 * cfg.transverse_period() {
        return Err(Error::InvalidCutoffs(
            "mode set transverse length differs from the profile period (use bulk_modes)".into(),
        ));
    }
    let rep = if rep.is_wall_adapted() { rep.clone() } else { wall_adapt(rep) };
    let chir_spin: Vec<f64> = (0..rep.spinor_dim()).map(|a| rep.chirality()[(a, a)].re).collect();
    let off = rep.chirality().iter().enumerate().any(|(k, z)| {
        let (i, j) = (k % rep.spinor_dim(), k / rep.spinor_dim());
        i != j && z.norm() > 0.0
    });
    if off {
        return Err(Error::Unsupported("chirality must be diagonal in the chosen rep".into()));
    }
    let sd = rep.spinor_dim();
    let rank = cfg.rank();
    let blk = sd * rank;
    let d = n - 1;
    let cut_s = modes.cutoffs()[d];
    let qmax = 2 * cut_s;
    let phat = cfg.transverse().fourier(qmax);

    // coupling blocks G(q) = i gamma^a A_a(q) tensor colour
    let mut shifts: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
    let colour_kron = |g: &CMat, a: &CMat| g.kronecker(a);
    for a in 0..d {
        for (qh, v) in cfg.a_minus()[a].terms() {
            let mut q = qh.clone();
            q.push(0);
            let e = shifts.entry(q).or_insert_with(|| CMat::zeros(blk, blk));
            *e += colour_kron(rep.gamma(a), v) * I;
        }
        for (qh, v) in cfg.jump()[a].terms() {
            for (iq, &pq) in phat.iter().enumerate() {
                if pq.norm() == 0.0 {
                    continue;
                }
                let mut q = qh.clone();
                q.push(iq as i64 - qmax as i64);
                let e = shifts.entry(q).or_insert_with(|| CMat::zeros(blk, blk));
                *e += colour_kron(rep.gamma(a), v) * (I * pq);
            }
        }
    }

    let mut trip = Vec::new();
    for (i, k) in modes.modes().iter().enumerate() {
        let p = modes.momentum(i);
        let mut free = CMat::zeros(sd, sd);
        for (mu, pm) in p.iter().enumerate() {
            free -= rep.gamma(mu) * C64::new(*pm, 0.0);
        }
        let free = free.kronecker(&CMat::identity(rank, rank));
        push_block(&mut trip, i * blk, i * blk, &free);
        for (q, g) in &shifts {
            let kp: Vec<i64> = k.iter().zip(q).map(|(a, b)| a - b).collect();
            if let Some(j) = modes.index_of(&kp) {
                push_block(&mut trip, i * blk, j * blk, g);
            }
        }
    }
    let chir: Vec<f64> = (0..modes.len() * blk).map(|r| chir_spin[(r % blk) / rank]).collect();
    let op = HermitianOperator::from_triplets(
        modes.len() * blk,
        trip,
        Some(chir),
        Basis::Fourier {
            modes: modes.clone(),
            spinor_dim: sd,
            rank,
        },
    );
    let h = op.hermiticity_residual();
    if h > 1e-12 {
        return Err(Error::NotHermitian(h));
    }
    Ok(op)
}

fn push_block(trip: &mut Vec<(usize, usize, C64)>, r0: usize, c0: usize, b: &CMat) {
    for i in 0..b.nrows() {
        for j in 0..b.ncols() {
            let v = b[(i, j)];
            if v.norm() > 0.0 {
                trip.push((r0 + i, c0 + j, v));
            }
        }
    }
}

/// Diagnostics of [`square`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareDiagnostics {
    /// Largest entry coupling opposite chiralities (the `w2` block
    /// structure demands zero).
    pub off_diagonal_chiral: Option<f64>,
}

/// Matrix square `H^2`.
pub fn square(op: &HermitianOperator) -> (HermitianOperator, SquareDiagnostics) {
    let mut trip = Vec::new();
    for (i, row) in op.rows.iter().enumerate() {
        let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
        for &(k, v) in row {
            for &(j, w) in &op.rows[k] {
                *acc.entry(j).or_insert(C64::new(0.0, 0.0)) += v * w;
            }
        }
        trip.extend(acc.into_iter().map(|(j, v)| (i, j, v)));
    }
    let mut sq = HermitianOperator::from_triplets(op.dim, trip, op.chirality.clone(), op.basis.clone());
    sq.squared = true;
    let diag = SquareDiagnostics {
        off_diagonal_chiral: sq.commutator_residual().map(|r| 0.5 * r),
    };
    (sq, diag)
}

#[cfg(test)]
mod tests;
