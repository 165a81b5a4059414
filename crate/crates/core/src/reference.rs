//! Ideal nondemolition unitary on a minimal Hilbert space, used as an oracle for
//! the optical network.
//!
//! The signal lives in `span{|0⟩, |H⟩, |V⟩}` and the ancilla is a polarization
//! qubit. The ideal device is `U = |0⟩⟨0| ⊗ 1 + (|H⟩⟨H| + |V⟩⟨V|) ⊗ σx`: the
//! ancilla flips exactly when a photon is present and the photon is left alone.

use nalgebra::{Matrix3, Vector6};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{detect_presence, SignalInput, SignalQubit};
use crate::error::{Error, Result};
use crate::fock::C64;
use crate::metrics::haar_random_qubit;

const NORM_TOLERANCE: f64 = 1e-12;

/// Signal sector index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalLevel {
    Vacuum = 0,
    H = 1,
    V = 2,
}

/// Amplitudes on `{0, H, V} ⊗ {H, V}`, index `2·signal + ancilla`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealJointState(Vector6<C64>);

impl IdealJointState {
    pub fn new(amplitudes: [C64; 6]) -> Result<Self> {
        let v = Vector6::from(amplitudes);
        let n = v.norm_squared();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self(v))
    }

    /// Signal input with the ancilla in `|H⟩`.
    pub fn from_input(input: &SignalInput) -> Self {
        let one = C64::new(1.0, 0.0);
        let (vac, photon, q) = match input {
            SignalInput::Photon(q) => (C64::default(), one, Some(*q)),
            SignalInput::Vacuum => (one, C64::default(), None),
            SignalInput::Superposed {
                vacuum,
                photon,
                qubit,
            } => {
                let n = (vacuum.norm_sqr() + photon.norm_sqr()).sqrt();
                (vacuum / n, photon / n, Some(*qubit))
            }
        };
        let mut v = Vector6::zeros();
        v[0] = vac;
        if let Some(q) = q {
            v[2] = photon * q.alpha();
            v[4] = photon * q.beta();
        }
        Self(v)
    }

    pub fn amplitude(&self, signal: SignalLevel, ancilla_flipped: bool) -> C64 {
        self.0[2 * signal as usize + usize::from(ancilla_flipped)]
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.norm_squared()
    }

    /// Probability that the ancilla reads `|V⟩`.
    pub fn flip_probability(&self) -> f64 {
        (0..3).map(|s| self.0[2 * s + 1].norm_sqr()).sum()
    }

    /// Signal state conditional on a flipped ancilla, if that outcome is possible.
    pub fn signal_given_flip(&self) -> Option<SignalQubit> {
        if self.0[1].norm_sqr() > NORM_TOLERANCE {
            return None;
        }
        let (a, b) = (self.0[3], self.0[5]);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        (n > NORM_TOLERANCE).then(|| SignalQubit::new(a / n, b / n).expect("renormalized"))
    }

    /// Reduced signal state on `{0, H, V}`.
    pub fn signal_density(&self) -> Matrix3<C64> {
        Matrix3::from_fn(|i, j| {
            (0..2)
                .map(|k| self.0[2 * i + k] * self.0[2 * j + k].conj())
                .sum()
        })
    }
}

pub fn ideal_qnd(state: &IdealJointState) -> IdealJointState {
    let mut v = state.0;
    v.swap_rows(2, 3);
    v.swap_rows(4, 5);
    IdealJointState(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationCase {
    pub input: String,
    /// Ancilla-flip probability of the ideal device.
    pub flip_probability: f64,
    /// D1-D2 coincidence probability of the optical network.
    pub coincidence_probability: f64,
    /// Largest deviation over the herald rate and every retained branch.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub cases: Vec<VerificationCase>,
    pub max_deviation: f64,
    pub tolerance: f64,
}

/// Compares one input. The optical device heralds half of the photon-present runs,
/// so its coincidence rate must be half the ideal flip probability; conditional on
/// a herald, each feed-forward-corrected output must equal the ideal device's
/// signal state given a flip.
pub fn compare_input(name: &str, input: &SignalInput) -> Result<VerificationCase> {
    let ideal = ideal_qnd(&IdealJointState::from_input(input));
    let optical = detect_presence(input, true)?;
    let flip_probability = ideal.flip_probability();
    let mut deviation = (optical.coincidence_probability - 0.5 * flip_probability).abs();
    let expected = ideal.signal_given_flip();
    for o in optical.retained() {
        let d = match (&expected, &o.signal) {
            (Some(e), Some(s)) => max_density_diff(e, s),
            _ => f64::INFINITY,
        };
        deviation = deviation.max(d);
    }
    Ok(VerificationCase {
        input: name.to_string(),
        flip_probability,
        coincidence_probability: optical.coincidence_probability,
        deviation,
    })
}

fn max_density_diff(a: &SignalQubit, b: &SignalQubit) -> f64 {
    let (a, b) = (a.amplitudes(), b.amplitudes());
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i] * a[j].conj() - b[i] * b[j].conj()).norm());
        }
    }
    m
}

/// The fixed verification inputs: vacuum, both basis states, the diagonal state,
/// a complex superposition, and a vacuum-photon superposition.
pub fn standard_inputs() -> Vec<(String, SignalInput)> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        ("vacuum".into(), SignalInput::Vacuum),
        ("H".into(), SignalInput::Photon(SignalQubit::h())),
        ("V".into(), SignalInput::Photon(SignalQubit::v())),
        (
            "D".into(),
            SignalInput::Photon(SignalQubit::from_weights(0.5, 0.0)),
        ),
        (
            "0.8H+0.6iV".into(),
            SignalInput::Photon(
                SignalQubit::new(C64::new(0.8, 0.0), C64::new(0.0, 0.6)).expect("normalized"),
            ),
        ),
        (
            "(|0>+|R>)/sqrt2".into(),
            SignalInput::Superposed {
                vacuum: C64::new(r, 0.0),
                photon: C64::new(r, 0.0),
                qubit: SignalQubit::new(C64::new(r, 0.0), C64::new(0.0, r)).expect("normalized"),
            },
        ),
    ]
}

/// Runs [`standard_inputs`] plus `random` Haar-random photon inputs drawn from
/// `seed`, failing on the first input whose deviation reaches `tolerance`.
pub fn verify_with_random(tolerance: f64, random: usize, seed: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = standard_inputs();
    for k in 0..random {
        inputs.push((
            format!("random#{k}"),
            SignalInput::Photon(haar_random_qubit(&mut rng)),
        ));
    }
    let mut cases = Vec::with_capacity(inputs.len());
    for (name, input) in &inputs {
        let case = compare_input(name, input)?;
        if case.deviation.is_nan() || case.deviation >= tolerance {
            return Err(Error::VerificationFailure {
                input: case.input,
                deviation: case.deviation,
                tolerance,
            });
        }
        cases.push(case);
    }
    let max_deviation = cases.iter().map(|c| c.deviation).fold(0.0, f64::max);
    Ok(VerificationReport {
        cases,
        max_deviation,
        tolerance,
    })
}

pub fn verify_against_optical(tolerance: f64) -> Result<VerificationReport> {
    verify_with_random(tolerance, 0, 0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResourceComparison {
    /// Heralded success rate of the entanglement-assisted detector.
    pub entanglement_assisted_success: f64,
    /// Success rate of one heralded CNOT.
    pub single_cnot_success: f64,
    /// Two consecutive heralded CNOTs.
    pub consecutive_cnot_success: f64,
    pub ancilla_photons: u32,
}

impl ResourceComparison {
    pub fn ratio(&self) -> f64 {
        self.entanglement_assisted_success / self.consecutive_cnot_success
    }
}

pub fn resource_comparison() -> ResourceComparison {
    let single_cnot_success = 0.25;
    ResourceComparison {
        entanglement_assisted_success: 0.5,
        single_cnot_success,
        consecutive_cnot_success: single_cnot_success * single_cnot_success,
        ancilla_photons: 2,
    }
}
