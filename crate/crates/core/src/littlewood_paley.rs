//! Discrete nonhomogeneous Littlewood–Paley decomposition and the Besov and
//! Triebel–Lizorkin norms built on it.
//!
//! The low-frequency profile `χ` is radial, equal to 1 on `|ξ| <= 3/4` and 0 on
//! `|ξ| >= 4/3`, with the `exp(-1/t)` smooth transition in between. Ring
//! profiles are `φ(ξ) = χ(ξ/2) − χ(ξ)`, so
//! `χ(ξ) + Σ_{j<J} φ(2^{-j}ξ) = χ(2^{-J}ξ)` telescopes exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{magnitude, Components, ScalarField, VectorField};
use crate::grid::PeriodicGrid;
use crate::ops::{check_exponent, lp_of_samples};

pub const CHI_PLATEAU: f64 = 3.0 / 4.0;
pub const CHI_SUPPORT: f64 = 4.0 / 3.0;

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Radial cutoff `χ(r)`.
pub fn chi(r: f64) -> f64 {
    let r = r.abs();
    if r <= CHI_PLATEAU {
        1.0
    } else if r >= CHI_SUPPORT {
        0.0
    } else {
        let a = smooth_step(CHI_SUPPORT - r);
        let b = smooth_step(r - CHI_PLATEAU);
        a / (a + b)
    }
}

/// Ring profile `φ(r) = χ(r/2) − χ(r)`, supported in `[3/4, 8/3]`.
pub fn phi(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// Sparse multiplier: nonzero weights and their flat spectral positions.
#[derive(Clone, Debug, Default)]
struct Profile {
    indices: Vec<usize>,
    weights: Vec<f64>,
}

impl Profile {
    fn from_dense(values: impl Iterator<Item = f64>) -> Self {
        let mut p = Profile::default();
        for (i, w) in values.enumerate() {
            if w != 0.0 {
                p.indices.push(i);
                p.weights.push(w);
            }
        }
        p
    }

    fn apply(&self, f: &ScalarField) -> ScalarField {
        let src = f.coefficients();
        let mut out = vec![Complex64::default(); src.len()];
        for (&i, &w) in self.indices.iter().zip(&self.weights) {
            out[i] = src[i] * w;
        }
        ScalarField::spectral_unchecked(f.grid(), out)
    }

    fn value_at(&self, flat: usize) -> f64 {
        match self.indices.binary_search(&flat) {
            Ok(pos) => self.weights[pos],
            Err(_) => 0.0,
        }
    }
}

/// `χ` and `φ(2^{-j}·)` tabulated on a grid's frequency lattice for
/// `j = 0..=j_max`, where `j_max` is the last block with nonempty discrete
/// support.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: PeriodicGrid,
    magnitudes: Vec<f64>,
    chi: Profile,
    rings: Vec<Profile>,
}

impl DyadicPartition {
    pub fn new(grid: &PeriodicGrid) -> Self {
        let magnitudes = grid.frequency_magnitudes();
        let chi_profile = Profile::from_dense(magnitudes.iter().map(|&r| chi(r)));
        let mut rings = Vec::new();
        for j in 0.. {
            let scale = 2f64.powi(-j);
            let ring = Profile::from_dense(magnitudes.iter().map(|&r| phi(r * scale)));
            if ring.indices.is_empty() {
                break;
            }
            rings.push(ring);
        }
        Self { grid: grid.clone(), magnitudes, chi: chi_profile, rings }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.rings.len() as i32 - 1
    }

    /// Block indices `-1..=j_max`.
    pub fn block_range(&self) -> std::ops::RangeInclusive<i32> {
        -1..=self.j_max()
    }

    fn profile(&self, j: i32) -> Option<&Profile> {
        match j {
            j if j <= -2 => None,
            -1 => Some(&self.chi),
            j => self.rings.get(j as usize),
        }
    }

    /// Multiplier value of block `j` at flat spectral position `flat`.
    pub fn weight(&self, j: i32, flat: usize) -> f64 {
        self.profile(j).map_or(0.0, |p| p.value_at(flat))
    }

    /// `χ(ξ) + Σ_j φ(2^{-j}ξ)` at every lattice point.
    pub fn partition_sum(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.grid.len()];
        for p in std::iter::once(&self.chi).chain(&self.rings) {
            for (&i, &w) in p.indices.iter().zip(&p.weights) {
                acc[i] += w;
            }
        }
        acc
    }

    fn check_grid(&self, f: &ScalarField) -> Result<()> {
        if f.grid() == &self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `Δ_j f`; zero for `j <= -2` and for blocks beyond `j_max`.
    pub fn block(&self, f: &ScalarField, j: i32) -> Result<ScalarField> {
        self.check_grid(f)?;
        Ok(match self.profile(j) {
            Some(p) => p.apply(f),
            None => ScalarField::spectral_unchecked(f.grid(), vec![Complex64::default(); f.grid().len()]),
        })
    }

    pub fn block_vector(&self, u: &VectorField, j: i32) -> Result<VectorField> {
        let comps = u.components().iter().map(|c| self.block(c, j)).collect::<Result<_>>()?;
        VectorField::new(comps)
    }

    /// `S_N f = Σ_{q=-1}^{N-1} Δ_q f`, applied through its telescoped symbol
    /// `χ(2^{-N}ξ)`.
    pub fn low_pass(&self, f: &ScalarField, n: i32) -> Result<ScalarField> {
        self.check_grid(f)?;
        if n <= -1 {
            return self.block(f, -2);
        }
        let scale = 2f64.powi(-n);
        let top = self.magnitudes.iter().fold(0.0, |m: f64, &r| m.max(r));
        if top * scale <= CHI_PLATEAU {
            return Ok(f.clone());
        }
        let src = f.coefficients();
        let out = src.iter().zip(&self.magnitudes).map(|(c, &r)| c * chi(r * scale)).collect();
        Ok(ScalarField::spectral_unchecked(f.grid(), out))
    }

    pub fn low_pass_vector(&self, u: &VectorField, n: i32) -> Result<VectorField> {
        let comps = u.components().iter().map(|c| self.low_pass(c, n)).collect::<Result<_>>()?;
        VectorField::new(comps)
    }

    /// Pointwise magnitudes `|Δ_j f|(x)` for every block `j = -1..=j_max`.
    fn block_magnitudes<F: Components + ?Sized>(&self, f: &F) -> Result<Vec<(i32, Vec<f64>)>> {
        self.block_range()
            .map(|j| {
                let comps = f.components().iter().map(|c| self.block(c, j)).collect::<Result<Vec<_>>>()?;
                Ok((j, magnitude(&comps)))
            })
            .collect()
    }

    /// `(j, ‖Δ_j f‖_{L^p})` for every block.
    pub fn block_norms<F: Components + ?Sized>(&self, f: &F, p: f64) -> Result<Vec<(i32, f64)>> {
        check_exponent(p)?;
        let cell = self.grid.cell_volume();
        Ok(self
            .block_magnitudes(f)?
            .into_iter()
            .map(|(j, m)| (j, lp_of_samples(&m, p, cell)))
            .collect())
    }

    /// Per-block spectrum rows for inspection.
    pub fn spectrum<F: Components + ?Sized>(&self, f: &F, sp: &SpaceParams) -> Result<Vec<SpectrumRow>> {
        Ok(self
            .block_norms(f, sp.p)?
            .into_iter()
            .map(|(j, norm)| SpectrumRow { j, block_lp: norm, weighted: 2f64.powf(j as f64 * sp.s) * norm })
            .collect())
    }

    /// `‖(2^{js}‖Δ_j f‖_{L^p})_{j>=-1}‖_{ℓ^q}`.
    pub fn besov_norm<F: Components + ?Sized>(&self, f: &F, sp: &SpaceParams) -> Result<f64> {
        if sp.kind != SpaceKind::Besov {
            return Err(Error::param("besov_norm needs Besov space parameters"));
        }
        let terms: Vec<f64> = self
            .block_norms(f, sp.p)?
            .into_iter()
            .map(|(j, n)| 2f64.powf(j as f64 * sp.s) * n)
            .collect();
        Ok(sequence_norm(&terms, sp.index))
    }

    /// Homogeneous part `‖(Σ_j 2^{jsr}|Δ_j f|^r)^{1/r}‖_{L^p}`.
    pub fn tl_seminorm<F: Components + ?Sized>(&self, f: &F, sp: &SpaceParams) -> Result<f64> {
        if sp.kind != SpaceKind::TriebelLizorkin {
            return Err(Error::param("tl_norm needs Triebel-Lizorkin space parameters"));
        }
        check_exponent(sp.p)?;
        let r = sp.index;
        let blocks = self.block_magnitudes(f)?;
        let mut stack = vec![0.0f64; self.grid.len()];
        // Rescale by the largest weighted magnitude so r-th powers stay finite.
        let scale = blocks
            .iter()
            .map(|(j, m)| 2f64.powf(*j as f64 * sp.s) * m.iter().fold(0.0f64, |a, &b| a.max(b)))
            .fold(0.0f64, f64::max);
        if scale == 0.0 {
            return Ok(0.0);
        }
        for (j, m) in &blocks {
            let w = 2f64.powf(*j as f64 * sp.s) / scale;
            for (acc, &v) in stack.iter_mut().zip(m) {
                *acc += (w * v).powf(r);
            }
        }
        stack.iter_mut().for_each(|v| *v = v.powf(1.0 / r));
        Ok(scale * lp_of_samples(&stack, sp.p, self.grid.cell_volume()))
    }

    /// `‖f‖_{L^p} + ‖f‖_{F^s_{p,r}}` (seminorm part summed over `j >= -1`).
    pub fn tl_norm<F: Components + ?Sized>(&self, f: &F, sp: &SpaceParams) -> Result<f64> {
        let semi = self.tl_seminorm(f, sp)?;
        Ok(crate::ops::lp_norm(f, sp.p)? + semi)
    }

    /// Norm selected by `sp.kind`.
    pub fn norm<F: Components + ?Sized>(&self, f: &F, sp: &SpaceParams) -> Result<f64> {
        match sp.kind {
            SpaceKind::Besov => self.besov_norm(f, sp),
            SpaceKind::TriebelLizorkin => self.tl_norm(f, sp),
        }
    }

    /// Checks `‖f‖_{B^s_{p,∞}} <= ‖f‖_{F^s_{p,r}}` on `f`.
    pub fn embedding_check<F: Components + ?Sized>(&self, f: &F, s: f64, p: f64, r: f64) -> Result<EmbeddingReport> {
        let besov = self.besov_norm(f, &SpaceParams::besov(s, p, f64::INFINITY)?)?;
        let tl = self.tl_norm(f, &SpaceParams::triebel_lizorkin(s, p, r)?)?;
        Ok(EmbeddingReport { besov_inf: besov, triebel_lizorkin: tl, holds: besov <= tl })
    }
}

fn sequence_norm(terms: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return terms.iter().fold(0.0, |m, &t| m.max(t));
    }
    let max = terms.iter().fold(0.0f64, |m, &t| m.max(t));
    if max == 0.0 {
        return 0.0;
    }
    max * terms.iter().map(|t| (t / max).powf(q)).sum::<f64>().powf(1.0 / q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    Besov,
    TriebelLizorkin,
}

/// Identifies `B^s_{p,q}` or `F^s_{p,r}`; `index` is `q` or `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub s: f64,
    pub p: f64,
    pub index: f64,
    pub kind: SpaceKind,
}

impl SpaceParams {
    pub fn new(s: f64, p: f64, index: f64, kind: SpaceKind) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::param(format!("regularity must be positive, got {s}")));
        }
        check_exponent(p)?;
        if !(index > 1.0) {
            return Err(Error::param(format!("summability index must exceed 1, got {index}")));
        }
        if kind == SpaceKind::TriebelLizorkin && index.is_infinite() {
            return Err(Error::param("Triebel-Lizorkin index must be finite"));
        }
        Ok(Self { s, p, index, kind })
    }

    pub fn besov(s: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(s, p, q, SpaceKind::Besov)
    }

    pub fn triebel_lizorkin(s: f64, p: f64, r: f64) -> Result<Self> {
        Self::new(s, p, r, SpaceKind::TriebelLizorkin)
    }

    /// Same space with regularity shifted by `ds`.
    pub fn with_s(self, s: f64) -> Result<Self> {
        Self::new(s, self.p, self.index, self.kind)
    }

    /// `s > max{3/2, 1 + d/p}`, the regime where the local theory applies.
    pub fn well_posed_regime(&self, dim: usize) -> bool {
        self.s > f64::max(1.5, 1.0 + dim as f64 / self.p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub j: i32,
    pub block_lp: f64,
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub besov_inf: f64,
    pub triebel_lizorkin: f64,
    pub holds: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::random_bandlimited;
    use crate::ops::lp_norm;
    use crate::testing::rel_err;

    fn part(dim: usize, n: usize) -> DyadicPartition {
        DyadicPartition::new(&PeriodicGrid::standard(dim, n).unwrap())
    }

    #[test]
    fn chi_profile_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.75), 1.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        let mut last = 1.0;
        for i in 0..200 {
            let v = chi(0.75 + i as f64 * (4.0 / 3.0 - 0.75) / 200.0);
            assert!(v <= last && (0.0..=1.0).contains(&v));
            last = v;
        }
    }

    #[test]
    fn partition_of_unity_on_lattice() {
        for (d, n) in [(1, 1024), (2, 64)] {
            let p = part(d, n);
            for v in p.partition_sum() {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_at_origin_and_ring_centres() {
        let p = part(1, 4096);
        assert_eq!(p.weight(-1, 0), 1.0);
        for j in 0..=p.j_max() {
            assert_eq!(p.weight(j, 0), 0.0);
        }
        let g = p.grid().clone();
        for j in 0..6 {
            let k = (2f64.powi(j) / g.frequency_unit()).round() as i64;
            let flat = g.index_of_wavenumber(k);
            let total: f64 = p.block_range().map(|q| p.weight(q, flat)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn supports_and_separation() {
        let p = part(2, 64);
        let g = p.grid();
        for flat in 0..g.len() {
            let r = g.frequency_sq(flat).sqrt();
            if p.weight(-1, flat) != 0.0 {
                assert!(r <= 4.0 / 3.0);
            }
            for j in 0..=p.j_max() {
                let w = p.weight(j, flat);
                if w != 0.0 {
                    let s = 2f64.powi(j);
                    assert!(r >= 0.75 * s && r <= 8.0 / 3.0 * s);
                }
                assert_eq!(w * p.weight(j + 2, flat), 0.0);
            }
            for j in 1..=p.j_max() {
                assert_eq!(p.weight(-1, flat) * p.weight(j, flat), 0.0);
            }
        }
    }

    #[test]
    fn reconstruction_and_low_pass() {
        let p = part(1, 512);
        let g = p.grid().clone();
        let f = random_bandlimited(&g, 255, 11);
        let mut acc = p.block(&f, -1).unwrap();
        for j in 0..=p.j_max() {
            acc = acc.add(&p.block(&f, j).unwrap()).unwrap();
        }
        assert!(rel_err(acc.samples(), f.samples()) < 1e-10);

        assert_eq!(lp_norm(&p.block(&f, -5).unwrap(), 2.0).unwrap(), 0.0);
        let s0 = p.low_pass(&f, 0).unwrap();
        assert!(rel_err(s0.samples(), p.block(&f, -1).unwrap().samples()) < 1e-14);
        let top = p.low_pass(&f, p.j_max() + 1).unwrap();
        assert_eq!(top.coefficients(), f.coefficients());

        for (m, n) in [(0, 3), (2, 5), (1, p.j_max() + 1)] {
            let diff = p.low_pass(&f, n).unwrap().sub(&p.low_pass(&f, m).unwrap()).unwrap();
            let mut sum = p.block(&f, m).unwrap();
            for q in m + 1..n {
                sum = sum.add(&p.block(&f, q).unwrap()).unwrap();
            }
            let scale = crate::ops::linf_norm(&f);
            let err = crate::ops::linf_norm(&diff.sub(&sum).unwrap());
            assert!(err <= 1e-12 * scale, "S_{n} - S_{m}: {err}");
        }
    }

    #[test]
    fn almost_orthogonality() {
        let p = part(1, 1024);
        let f = random_bandlimited(p.grid(), 511, 2);
        for j in -1..=p.j_max() {
            for k in j + 2..=p.j_max() {
                let b = p.block(&p.block(&f, j).unwrap(), k).unwrap();
                assert!(b.coefficients().iter().all(|c| c.norm() == 0.0));
            }
        }
    }

    #[test]
    fn zero_field_norms() {
        let p = part(1, 64);
        let z = ScalarField::zeros(p.grid());
        let b = SpaceParams::besov(1.0, 2.0, 2.0).unwrap();
        let t = SpaceParams::triebel_lizorkin(1.0, 2.0, 2.0).unwrap();
        assert_eq!(p.besov_norm(&z, &b).unwrap(), 0.0);
        assert_eq!(p.tl_norm(&z, &t).unwrap(), 0.0);
        let e = p.embedding_check(&z, 1.0, 2.0, 2.0).unwrap();
        assert!(e.holds && e.besov_inf == 0.0);
    }

    #[test]
    fn space_params_validation() {
        assert!(SpaceParams::besov(1.0, 2.0, f64::INFINITY).is_ok());
        assert!(SpaceParams::triebel_lizorkin(1.0, 2.0, f64::INFINITY).is_err());
        assert!(SpaceParams::besov(0.0, 2.0, 2.0).is_err());
        assert!(SpaceParams::besov(1.0, 1.0, 2.0).is_err());
        assert!(SpaceParams::besov(1.0, 2.0, 1.0).is_err());
        let sp = SpaceParams::triebel_lizorkin(2.0, 2.0, 2.0).unwrap();
        assert!(sp.well_posed_regime(1));
        assert!(!sp.well_posed_regime(2));
        let p = part(1, 64);
        let f = ScalarField::zeros(p.grid());
        assert!(p.besov_norm(&f, &sp).is_err());
    }

    #[test]
    fn kind_mismatch_and_grid_mismatch() {
        let p = part(1, 64);
        let other = ScalarField::zeros(&PeriodicGrid::standard(1, 128).unwrap());
        assert!(matches!(p.block(&other, 0), Err(Error::GridMismatch)));
    }
}
