//! Information and disturbance measures for the weak-measurement regime.
//!
//! Every quantity comes in two forms: a closed-form expression in `|α|²`, `|β|²`
//! and the basis angle `φ`, and a value read off the simulated state. All entropies
//! are in bits with `0·log 0 = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::circuit::{self, Regime, SignalInput, SignalQubit};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::fock::{FockVector, C64};
use crate::par::Execution;

/// Eigenvalues below this are treated as exact zeros.
const EIGENVALUE_CUTOFF: f64 = 1e-12;
const DISTRIBUTION_TOLERANCE: f64 = 1e-12;

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// `h(p) = -p log₂ p - (1-p) log₂(1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    -plogp(p) - plogp(1.0 - p)
}

/// `S(ρ) = -Σ λ log₂ λ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    -rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > EIGENVALUE_CUTOFF)
        .map(plogp)
        .sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentInfo {
    pub lambda1: f64,
    pub lambda2: f64,
    pub d_value: f64,
    /// Bits.
    pub i_c: f64,
}

/// `D = 1 - 4|α|²|β|²(1 - sin⁴2φ)`, `λ₁,₂ = (1 ± √D)/2`, `I_c = -Σ λ log₂ λ`.
pub fn coherent_information_closed(signal: &SignalQubit, phi: f64) -> CoherentInfo {
    let s4 = (2.0 * phi).sin().powi(4);
    let d_value = (1.0 - 4.0 * signal.p_h() * signal.p_v() * (1.0 - s4)).clamp(0.0, 1.0);
    let lambda1 = 0.5 * (1.0 + d_value.sqrt());
    // lambda1 ∈ [1/2, 1], so 1 - lambda1 is exact and the pair sums to exactly 1.
    let lambda2 = 1.0 - lambda1;
    CoherentInfo {
        lambda1,
        lambda2,
        d_value,
        i_c: binary_entropy(lambda1),
    }
}

/// `S(ρ_out)` from the simulated, feed-forward-corrected state. The joint
/// signal-ancilla state is pure, so this is the coherent information.
pub fn coherent_information_simulated(signal: &SignalQubit, phi: f64) -> Result<f64> {
    let w = circuit::weak_measure(signal, phi)?;
    debug_assert!((w.corrected.norm_sq() - 1.0).abs() < 1e-10);
    Ok(von_neumann_entropy(&w.rho_out))
}

/// `F = |α|⁴ + |β|⁴ + 2|α|²|β|² sin²2φ`.
pub fn fidelity_closed(signal: &SignalQubit, phi: f64) -> f64 {
    let (a, b) = (signal.p_h(), signal.p_v());
    a * a + b * b + 2.0 * a * b * (2.0 * phi).sin().powi(2)
}

/// `⟨ψ_s|ρ_out|ψ_s⟩` from the simulation.
pub fn fidelity_simulated(signal: &SignalQubit, phi: f64) -> Result<f64> {
    Ok(circuit::weak_measure(signal, phi)?.fidelity())
}

/// `P[i][j]` for signal polarization `i` and first-ancilla outcome `j` (H = 0, V = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointDistribution {
    pub p: [[f64; 2]; 2],
}

impl JointDistribution {
    pub fn new(p: [[f64; 2]; 2]) -> Result<Self> {
        if p.iter().flatten().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "negative entry in {p:?}"
            )));
        }
        let total: f64 = p.iter().flatten().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self { p })
    }

    pub fn signal_marginal(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[0][1], self.p[1][0] + self.p[1][1]]
    }

    pub fn ancilla_marginal(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[1][0], self.p[0][1] + self.p[1][1]]
    }

    /// `T_zz = P_HH + P_VV - P_HV - P_VH`.
    pub fn tzz(&self) -> f64 {
        self.p[0][0] + self.p[1][1] - self.p[0][1] - self.p[1][0]
    }
}

/// `I = Σ P_ij log₂(P_ij / (P_i P_j))`.
pub fn mutual_information(joint: &JointDistribution) -> f64 {
    let ps = joint.signal_marginal();
    let pa = joint.ancilla_marginal();
    let mut total = 0.0;
    for (row, pi) in joint.p.iter().zip(ps) {
        for (&pij, pj) in row.iter().zip(pa) {
            if pij > 0.0 {
                total += pij * (pij / (pi * pj)).log2();
            }
        }
    }
    total
}

/// The four-term expression for `I` in `|α|²`, `|β|²` and `φ`.
pub fn mutual_information_closed(signal: &SignalQubit, phi: f64) -> f64 {
    let (a, b) = (signal.p_h(), signal.p_v());
    let (c2, s2) = (phi.cos().powi(2), phi.sin().powi(2));
    let term = |weight: f64, num: f64, den: f64| {
        if weight * num <= 0.0 {
            0.0
        } else {
            weight * num * (num / den).log2()
        }
    };
    term(a, c2, a * c2 + b * s2)
        + term(a, s2, a * s2 + b * c2)
        + term(b, c2, b * c2 + a * s2)
        + term(b, s2, b * s2 + a * c2)
}

/// Entropy of the ensemble `{|H⟩: |α|², |V⟩: |β|²}`.
pub fn holevo_bound(signal: &SignalQubit) -> f64 {
    binary_entropy(signal.p_h())
}

/// Amplitudes of a three-photon polarization state, index `4·s + 2·a1 + a2`
/// with H = 0 and V = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeQubitState(pub [C64; 8]);

impl ThreeQubitState {
    /// Reads a one-photon-per-path Fock state. `h_modes[k]` is the registry index
    /// of the H mode of the k-th path; its V mode must follow it.
    pub fn from_fock(state: &FockVector, h_modes: [usize; 3]) -> Option<Self> {
        let mut amps = [C64::default(); 8];
        for (occ, a) in state.amplitudes() {
            let c = occ.counts();
            let mut index = 0;
            for &h in &h_modes {
                let bit = match (c[h], c[h + 1]) {
                    (1, 0) => 0,
                    (0, 1) => 1,
                    _ => return None,
                };
                index = 2 * index + bit;
            }
            amps[index] += a;
        }
        Some(Self(amps))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationTensor {
    /// `t[m][n] = ⟨σ_m ⊗ σ_n ⊗ 1⟩`, axes ordered x, y, z.
    pub t: [[f64; 3]; 3],
}

impl CorrelationTensor {
    pub fn zz(&self) -> f64 {
        self.t[2][2]
    }
}

fn pauli(axis: usize) -> [[C64; 2]; 2] {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::default(), C64::new(0.0, 1.0));
    match axis {
        0 => [[z, o], [o, z]],
        1 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

/// Signal-ancilla correlation tensor of a three-qubit state, third qubit traced.
pub fn correlation_tensor(state: &ThreeQubitState) -> CorrelationTensor {
    let psi = &state.0;
    let mut t = [[0.0; 3]; 3];
    for (m, row) in t.iter_mut().enumerate() {
        let sm = pauli(m);
        for (n, entry) in row.iter_mut().enumerate() {
            let sn = pauli(n);
            let mut acc = C64::default();
            for s in 0..2 {
                for a in 0..2 {
                    for s2 in 0..2 {
                        for a2 in 0..2 {
                            let coeff = sm[s2][s] * sn[a2][a];
                            if coeff == C64::default() {
                                continue;
                            }
                            for b in 0..2 {
                                acc += psi[4 * s2 + 2 * a2 + b].conj()
                                    * coeff
                                    * psi[4 * s + 2 * a + b];
                            }
                        }
                    }
                }
            }
            *entry = acc.re;
        }
    }
    CorrelationTensor { t }
}

/// `T_zz = cos 2φ`, the same for every signal state.
pub fn tzz_closed(phi: f64) -> f64 {
    (2.0 * phi).cos()
}

/// Three-point Gauss-Legendre rule on `[0, 1]`, exact for polynomials up to degree 5.
const GAUSS_LEGENDRE_3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// Fidelity averaged over Haar-random inputs.
///
/// Under the Haar measure `|α|²` is uniform on `[0, 1]`, and both regimes' average
/// fidelity is a polynomial of degree at most 2 in `|α|²`; the simulated fidelity
/// is integrated exactly by [`GAUSS_LEGENDRE_3`]. For presence detection the
/// average is over heralded (retained) outcomes.
pub fn haar_average_fidelity(regime: Regime) -> Result<f64> {
    let integrand = |p: f64| -> Result<f64> {
        let q = SignalQubit::from_weights(p, 0.0);
        match regime {
            Regime::Deterministic => Ok(circuit::deterministic_run(&q)?.average_fidelity),
            Regime::Presence => {
                let rep = circuit::detect_presence(&SignalInput::Photon(q), true)?;
                let weighted: f64 = rep
                    .retained()
                    .map(|o| o.probability * o.fidelity.unwrap_or(0.0))
                    .sum();
                Ok(weighted / rep.success_probability)
            }
            Regime::Weak => Err(Error::UnsupportedInput(
                "the weak regime has no single average fidelity",
            )),
        }
    };
    GAUSS_LEGENDRE_3
        .iter()
        .map(|&(x, w)| integrand(x).map(|f| w * f))
        .sum()
}

/// Haar-random qubit from a normalized complex Gaussian vector.
pub fn haar_random_qubit<R: Rng + ?Sized>(rng: &mut R) -> SignalQubit {
    let g: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let (alpha, beta) = (C64::new(g[0], g[1]), C64::new(g[2], g[3]));
    let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    SignalQubit::new(alpha / n, beta / n).expect("normalized by construction")
}

/// Monte Carlo cross-check of [`haar_average_fidelity`]: draws Haar states as
/// normalized complex Gaussian vectors and averages the branch-table fidelity
/// `1/2 + (|α|⁴ + |β|⁴)/2` (deterministic) or 1 (presence). Samples are split into
/// fixed chunks with their own seeded streams, so the result does not depend on
/// the execution mode.
pub fn haar_average_fidelity_monte_carlo(
    regime: Regime,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    const CHUNK: usize = 16_384;
    if samples == 0 {
        return Err(Error::Sampling("no samples requested".into()));
    }
    let per_state = match regime {
        Regime::Deterministic => |a: f64, b: f64| 0.5 + 0.5 * (a * a + b * b),
        Regime::Presence => |_: f64, _: f64| 1.0,
        Regime::Weak => {
            return Err(Error::UnsupportedInput(
                "the weak regime has no single average fidelity",
            ))
        }
    };
    let chunks = samples.div_ceil(CHUNK);
    let sums = exec.map_range(chunks, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let n = CHUNK.min(samples - k * CHUNK);
        (0..n)
            .map(|_| {
                let q = haar_random_qubit(&mut rng);
                per_state(q.p_h(), q.p_v())
            })
            .sum::<f64>()
    });
    Ok(sums.iter().sum::<f64>() / samples as f64)
}

/// One row of the fidelity / information tradeoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffPoint {
    pub phi: f64,
    pub fidelity: f64,
    pub i_c: f64,
    pub i_mutual: f64,
    pub t_zz: f64,
}

impl TradeoffPoint {
    pub fn simulated(signal: &SignalQubit, phi: f64) -> Result<Self> {
        let w = circuit::weak_measure(signal, phi)?;
        Ok(Self {
            phi,
            fidelity: w.fidelity(),
            i_c: von_neumann_entropy(&w.rho_out),
            i_mutual: mutual_information(&w.joint),
            t_zz: w.joint.tzz(),
        })
    }

    pub fn closed(signal: &SignalQubit, phi: f64) -> Self {
        Self {
            phi,
            fidelity: fidelity_closed(signal, phi),
            i_c: coherent_information_closed(signal, phi).i_c,
            i_mutual: mutual_information_closed(signal, phi),
            t_zz: tzz_closed(phi),
        }
    }

    /// Largest absolute difference over the four metrics.
    pub fn max_deviation(&self, other: &TradeoffPoint) -> f64 {
        [
            self.fidelity - other.fidelity,
            self.i_c - other.i_c,
            self.i_mutual - other.i_mutual,
            self.t_zz - other.t_zz,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Simulated tradeoff points in grid order.
pub fn tradeoff_curve(
    signal: &SignalQubit,
    phi_grid: &[f64],
    exec: Execution,
) -> Result<Vec<TradeoffPoint>> {
    if phi_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    exec.map(phi_grid, |&phi| TradeoffPoint::simulated(signal, phi))
        .into_iter()
        .collect()
}

/// `n ≥ 2` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}
