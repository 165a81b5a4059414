//! Sparse state vectors for a few photons spread over dual-rail polarization modes.
//!
//! A [`FockVector`] stores amplitudes keyed by occupation tuples over an ordered
//! [`ModeRegistry`]. Passive optical elements act through creation-operator
//! substitution `a†_i -> Σ_j u_ji b†_j`, which is exact for the small photon numbers
//! handled here (at most [`MAX_PHOTONS`]).

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hard cap on the total photon number of any simulated state.
pub const MAX_PHOTONS: u32 = 3;

/// Amplitudes below this magnitude are dropped after every element application.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

pub(crate) const UNITARY_TOLERANCE: f64 = 1e-12;
const NORMALIZED_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

/// Identifier of a spatial path through the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathId(pub u8);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeLabel {
    pub path: PathId,
    pub pol: Polarization,
}

impl ModeLabel {
    pub const fn new(path: PathId, pol: Polarization) -> Self {
        Self { path, pol }
    }

    pub const fn h(path: PathId) -> Self {
        Self::new(path, Polarization::H)
    }

    pub const fn v(path: PathId) -> Self {
        Self::new(path, Polarization::V)
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}{}", self.path.0, self.pol)
    }
}

/// Ordered, duplicate-free list of modes. The order fixes the layout of every
/// [`Occupation`] built against it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeRegistry {
    modes: Vec<ModeLabel>,
}

impl ModeRegistry {
    pub fn new(modes: Vec<ModeLabel>) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::RegistryConflict(*m));
            }
        }
        Ok(Self { modes })
    }

    /// `(p, H), (p, V)` for every path, in the given path order.
    pub fn dual_rail(paths: &[PathId]) -> Result<Self> {
        Self::new(
            paths
                .iter()
                .flat_map(|&p| [ModeLabel::h(p), ModeLabel::v(p)])
                .collect(),
        )
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn index_of(&self, mode: ModeLabel) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| *m == mode)
            .ok_or(Error::UnknownMode(mode))
    }

    pub fn contains(&self, mode: ModeLabel) -> bool {
        self.modes.contains(&mode)
    }

    fn concat(&self, other: &Self) -> Result<Self> {
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        Self::new(modes)
    }

    fn indices_of(&self, modes: &[ModeLabel]) -> Result<Vec<usize>> {
        let idx = modes
            .iter()
            .map(|&m| self.index_of(m))
            .collect::<Result<Vec<_>>>()?;
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::RegistryConflict(*m));
            }
        }
        Ok(idx)
    }
}

/// Photon counts, one per registered mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(Vec<u8>);

impl Occupation {
    pub fn new(counts: Vec<u8>) -> Self {
        Self(counts)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| u32::from(n)).sum()
    }

    pub fn select(&self, idx: &[usize]) -> Occupation {
        Occupation(idx.iter().map(|&i| self.0[i]).collect())
    }
}

impl From<Vec<u8>> for Occupation {
    fn from(counts: Vec<u8>) -> Self {
        Self(counts)
    }
}

impl<const N: usize> From<[u8; N]> for Occupation {
    fn from(counts: [u8; N]) -> Self {
        Self(counts.to_vec())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("⟩")
    }
}

/// Result of a projective photon-counting measurement.
#[derive(Clone, Debug)]
pub struct Projection {
    pub probability: f64,
    /// Renormalized post-measurement state; `None` when the outcome cannot occur.
    pub conditional: Option<FockVector>,
}

/// Sparse superposition of occupation-number basis states.
#[derive(Clone, Debug)]
pub struct FockVector {
    registry: ModeRegistry,
    amps: BTreeMap<Occupation, C64>,
    norm_tracked: f64,
    mixed_sectors: bool,
}

impl FockVector {
    pub fn vacuum(registry: ModeRegistry) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(Occupation::zeros(registry.len()), C64::new(1.0, 0.0));
        Self {
            registry,
            amps,
            norm_tracked: 1.0,
            mixed_sectors: false,
        }
    }

    pub fn single_photon(registry: ModeRegistry, mode: ModeLabel) -> Result<Self> {
        let i = registry.index_of(mode)?;
        let mut occ = Occupation::zeros(registry.len());
        occ.0[i] = 1;
        Self::from_terms(registry, [(occ, C64::new(1.0, 0.0))])
    }

    /// Builds a state whose components all carry the same photon number.
    pub fn from_terms(
        registry: ModeRegistry,
        terms: impl IntoIterator<Item = (Occupation, C64)>,
    ) -> Result<Self> {
        Self::build(registry, terms, false)
    }

    /// Like [`FockVector::from_terms`] but allows a superposition of different
    /// photon-number sectors (signal photon present or absent).
    pub fn from_terms_mixed(
        registry: ModeRegistry,
        terms: impl IntoIterator<Item = (Occupation, C64)>,
    ) -> Result<Self> {
        Self::build(registry, terms, true)
    }

    fn build(
        registry: ModeRegistry,
        terms: impl IntoIterator<Item = (Occupation, C64)>,
        mixed_sectors: bool,
    ) -> Result<Self> {
        let mut amps: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != registry.len() {
                return Err(Error::OccupationLength {
                    expected: registry.len(),
                    got: occ.len(),
                });
            }
            let n = occ.total();
            if n > MAX_PHOTONS {
                return Err(Error::PhotonCap(n));
            }
            *amps.entry(occ).or_default() += amp;
        }
        prune(&mut amps);
        if !mixed_sectors {
            let mut totals = amps.keys().map(Occupation::total);
            if let Some(first) = totals.next() {
                if totals.any(|n| n != first) {
                    return Err(Error::MixedSectors);
                }
            }
        }
        let norm_tracked = squared_norm(&amps);
        Ok(Self {
            registry,
            amps,
            norm_tracked,
            mixed_sectors,
        })
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, occ: &Occupation) -> C64 {
        self.amps.get(occ).copied().unwrap_or_default()
    }

    /// Number of stored (non-pruned) components.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Tracked value of ⟨ψ|ψ⟩.
    pub fn norm_tracked(&self) -> f64 {
        self.norm_tracked
    }

    /// ⟨ψ|ψ⟩ recomputed from the stored amplitudes.
    pub fn norm_sq(&self) -> f64 {
        squared_norm(&self.amps)
    }

    pub fn is_mixed_sector(&self) -> bool {
        self.mixed_sectors
    }

    /// Common photon number of all components, if there is one.
    pub fn photon_number(&self) -> Option<u32> {
        let mut totals = self.amps.keys().map(Occupation::total);
        let first = totals.next()?;
        totals.all(|n| n == first).then_some(first)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sq();
        if n == 0.0 {
            return self.clone();
        }
        let scale = 1.0 / n.sqrt();
        Self {
            registry: self.registry.clone(),
            amps: self
                .amps
                .iter()
                .map(|(k, a)| (k.clone(), a * scale))
                .collect(),
            norm_tracked: 1.0,
            mixed_sectors: self.mixed_sectors,
        }
    }

    /// Tensor product over the concatenated registry `self ++ other`.
    pub fn tensor(&self, other: &FockVector) -> Result<FockVector> {
        let registry = self.registry.concat(&other.registry)?;
        let mut amps = BTreeMap::new();
        for (oa, aa) in &self.amps {
            for (ob, ab) in &other.amps {
                let mut counts = oa.0.clone();
                counts.extend_from_slice(&ob.0);
                let occ = Occupation(counts);
                let n = occ.total();
                if n > MAX_PHOTONS {
                    return Err(Error::PhotonCap(n));
                }
                amps.insert(occ, aa * ab);
            }
        }
        prune(&mut amps);
        Ok(FockVector {
            registry,
            amps,
            norm_tracked: self.norm_tracked * other.norm_tracked,
            mixed_sectors: self.mixed_sectors || other.mixed_sectors,
        })
    }

    /// Applies a passive linear element `u` acting on `modes` (column `i` of `u`
    /// is the image of `modes[i]`).
    pub fn apply_element(&self, modes: &[ModeLabel], u: &DMatrix<C64>) -> Result<FockVector> {
        self.apply_element_where(modes, u, |_| true)
    }

    /// Applies `u` only to the components selected by `condition`. With a condition
    /// that reads modes outside `modes` this is a classically controlled element, the
    /// coherent form of feed-forward.
    pub fn apply_element_where(
        &self,
        modes: &[ModeLabel],
        u: &DMatrix<C64>,
        condition: impl Fn(&Occupation) -> bool,
    ) -> Result<FockVector> {
        let k = modes.len();
        if u.nrows() != k || u.ncols() != k {
            return Err(Error::ElementShape {
                rows: u.nrows(),
                cols: u.ncols(),
                expected: k,
            });
        }
        let deviation = unitarity_deviation(u);
        if deviation > UNITARY_TOLERANCE {
            return Err(Error::NonUnitary(deviation));
        }
        let idx = self.registry.indices_of(modes)?;

        let mut out: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, &amp) in &self.amps {
            if !condition(occ) {
                *out.entry(occ.clone()).or_default() += amp;
                continue;
            }
            for (sub, c) in expand_creation_product(&occ.select(&idx), u) {
                let mut counts = occ.0.clone();
                for (slot, &i) in idx.iter().enumerate() {
                    counts[i] = sub[slot];
                }
                *out.entry(Occupation(counts)).or_default() += amp * c;
            }
        }
        prune(&mut out);
        Ok(FockVector {
            registry: self.registry.clone(),
            amps: out,
            norm_tracked: self.norm_tracked,
            mixed_sectors: self.mixed_sectors,
        })
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        Ok(self
            .amps
            .iter()
            .filter_map(|(occ, a)| other.amps.get(occ).map(|b| a.conj() * b))
            .sum())
    }

    /// Reduced density matrix on `keep`, tracing out every other mode.
    ///
    /// Basis labels are the occupations of `keep` that occur in the state, ordered
    /// with larger counts in earlier modes first (so `|H⟩` precedes `|V⟩`).
    pub fn reduce(&self, keep: &[ModeLabel]) -> Result<DensityMatrix> {
        let norm = self.norm_sq();
        if (norm - 1.0).abs() > NORMALIZED_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        let kept = self.registry.indices_of(keep)?;
        let traced: Vec<usize> = (0..self.registry.len())
            .filter(|i| !kept.contains(i))
            .collect();

        let mut labels: Vec<Occupation> = self.amps.keys().map(|o| o.select(&kept)).collect();
        labels.sort_by(|a, b| b.cmp(a));
        labels.dedup();

        let mut by_environment: BTreeMap<Occupation, Vec<(usize, C64)>> = BTreeMap::new();
        for (occ, &amp) in &self.amps {
            let row = labels
                .iter()
                .position(|l| *l == occ.select(&kept))
                .expect("label collected above");
            by_environment
                .entry(occ.select(&traced))
                .or_default()
                .push((row, amp));
        }

        let dim = labels.len();
        let mut rho = DMatrix::<C64>::zeros(dim, dim);
        for column in by_environment.values() {
            for &(i, ai) in column {
                for &(j, aj) in column {
                    rho[(i, j)] += ai * aj.conj();
                }
            }
        }
        rho /= C64::new(norm, 0.0);
        DensityMatrix::new(rho, labels)
    }

    /// Projects onto a definite photon count in each listed mode.
    pub fn project_counts(&self, pattern: &[(ModeLabel, u8)]) -> Result<Projection> {
        let modes: Vec<ModeLabel> = pattern.iter().map(|(m, _)| *m).collect();
        let idx = self.registry.indices_of(&modes)?;
        Ok(self.project(|occ| idx.iter().zip(pattern).all(|(&i, &(_, n))| occ.0[i] == n)))
    }

    /// Projects onto a definite total photon count per spatial path, summing over
    /// polarization (a detector region without polarization resolution).
    pub fn project_paths(&self, pattern: &[(PathId, u8)]) -> Result<Projection> {
        let groups = pattern
            .iter()
            .map(|&(p, n)| {
                let idx = self
                    .registry
                    .indices_of(&[ModeLabel::h(p), ModeLabel::v(p)])?;
                Ok((idx, u32::from(n)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.project(|occ| {
            groups
                .iter()
                .all(|(idx, n)| idx.iter().map(|&i| u32::from(occ.0[i])).sum::<u32>() == *n)
        }))
    }

    /// Distinct count patterns on `modes` that occur with nonzero amplitude, in
    /// ascending order. Together they form an exclusive and exhaustive outcome set.
    pub fn patterns(&self, modes: &[ModeLabel]) -> Result<Vec<Occupation>> {
        let idx = self.registry.indices_of(modes)?;
        let mut out: Vec<Occupation> = self.amps.keys().map(|o| o.select(&idx)).collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn project(&self, keep: impl Fn(&Occupation) -> bool) -> Projection {
        let amps: BTreeMap<Occupation, C64> = self
            .amps
            .iter()
            .filter(|(occ, _)| keep(occ))
            .map(|(o, a)| (o.clone(), *a))
            .collect();
        if amps.is_empty() {
            return Projection {
                probability: 0.0,
                conditional: None,
            };
        }
        let weight = squared_norm(&amps);
        let conditional = FockVector {
            registry: self.registry.clone(),
            amps,
            norm_tracked: weight,
            mixed_sectors: self.mixed_sectors,
        }
        .normalized();
        Projection {
            probability: weight / self.norm_sq(),
            conditional: Some(conditional),
        }
    }
}

fn squared_norm(amps: &BTreeMap<Occupation, C64>) -> f64 {
    amps.values().map(|a| a.norm_sqr()).sum()
}

fn prune(amps: &mut BTreeMap<Occupation, C64>) {
    amps.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
}

const FACTORIAL: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

fn factorial(n: u8) -> f64 {
    FACTORIAL[usize::from(n)]
}

/// Expands `Π_i (a†_i)^{n_i} / √(n_i!)` under `a†_i -> Σ_j u_ji b†_j` and returns
/// the normalized output occupations with their coefficients.
fn expand_creation_product(input: &Occupation, u: &DMatrix<C64>) -> Vec<(Vec<u8>, C64)> {
    let k = input.len();
    let mut terms: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
    terms.insert(vec![0; k], C64::new(1.0, 0.0));
    let mut input_weight = 1.0;
    for (i, &n) in input.counts().iter().enumerate() {
        input_weight *= factorial(n);
        for _ in 0..n {
            let mut next: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
            for (t, c) in &terms {
                for j in 0..k {
                    let uji = u[(j, i)];
                    if uji == C64::default() {
                        continue;
                    }
                    let mut t2 = t.clone();
                    t2[j] += 1;
                    *next.entry(t2).or_default() += c * uji;
                }
            }
            terms = next;
        }
    }
    terms
        .into_iter()
        .map(|(t, c)| {
            let output_weight: f64 = t.iter().map(|&m| factorial(m)).product();
            let scale = (output_weight / input_weight).sqrt();
            (t, c * scale)
        })
        .collect()
}

/// `max |(u†u - 1)_ij|`.
pub(crate) fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u - DMatrix::<C64>::identity(n, n);
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
