//! The entanglement-assisted presence detector.
//!
//! A signal photon on path `s` meets a Bell pair `(|HH⟩ + |VV⟩)/√2` on paths `a1`,
//! `a2`. Four polarizing beam splitters and four half-wave plates at 45° route the
//! three photons so that path `s` becomes the signal output and paths `a1`, `a2`
//! end on the detector regions D1, D2. A D1-D2 coincidence heralds the presence of
//! the signal photon; its polarization is restored by a V -> -V plate whenever the
//! two ancilla clicks disagree.
//!
//! Three regimes run on top of the same network:
//! * presence detection, ancillas analysed in the diagonal basis,
//! * tunable weak measurement, ancillas analysed in a basis rotated by `φ`,
//! * deterministic operation, where the double-click events are kept as well and
//!   corrected with an H <-> V swap.

use std::f64::consts::FRAC_PI_4;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::fock::{FockVector, ModeLabel, ModeRegistry, Occupation, PathId, C64};
use crate::metrics::{JointDistribution, ThreeQubitState};
use crate::optics::{self, hwp, pbs, Element, JonesMatrix};

const SIGNAL_NORM_TOLERANCE: f64 = 1e-12;

/// Spatial paths. Each path keeps its id through the network; the exit port names
/// are aliases for the same ids.
pub mod ports {
    use crate::fock::PathId;

    pub const SIGNAL: PathId = PathId(0);
    pub const ANCILLA_1: PathId = PathId(1);
    pub const ANCILLA_2: PathId = PathId(2);

    pub const SIGNAL_OUT: PathId = SIGNAL;
    pub const DETECTOR_1: PathId = ANCILLA_1;
    pub const DETECTOR_2: PathId = ANCILLA_2;
}

const SO_H: usize = 0;
const SO_V: usize = 1;
const D1_H: usize = 2;
const D1_V: usize = 3;
const D2_H: usize = 4;
const D2_V: usize = 5;

/// `(s,H), (s,V), (a1,H), (a1,V), (a2,H), (a2,V)`.
pub fn input_registry() -> ModeRegistry {
    ModeRegistry::dual_rail(&[ports::SIGNAL, ports::ANCILLA_1, ports::ANCILLA_2])
        .expect("paths are distinct")
}

pub fn signal_out_modes() -> [ModeLabel; 2] {
    [
        ModeLabel::h(ports::SIGNAL_OUT),
        ModeLabel::v(ports::SIGNAL_OUT),
    ]
}

pub fn detector_modes() -> [ModeLabel; 4] {
    [
        ModeLabel::h(ports::DETECTOR_1),
        ModeLabel::v(ports::DETECTOR_1),
        ModeLabel::h(ports::DETECTOR_2),
        ModeLabel::v(ports::DETECTOR_2),
    ]
}

/// Polarization state `α|H⟩ + β|V⟩` of the signal photon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignalQubit {
    alpha: C64,
    beta: C64,
}

impl SignalQubit {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > SIGNAL_NORM_TOLERANCE {
            return Err(Error::SignalNorm(n));
        }
        Ok(Self { alpha, beta })
    }

    /// `α = cos(θ/2)`, `β = e^{i·phase} sin(θ/2)`.
    pub fn from_bloch(theta: f64, phase: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            alpha: C64::new(c, 0.0),
            beta: C64::from_polar(s, phase),
        }
    }

    /// State with `|α|² = p_h` and relative phase `phase`.
    pub fn from_weights(p_h: f64, phase: f64) -> Self {
        let p = p_h.clamp(0.0, 1.0);
        Self {
            alpha: C64::new(p.sqrt(), 0.0),
            beta: C64::from_polar((1.0 - p).sqrt(), phase),
        }
    }

    pub fn h() -> Self {
        Self::from_weights(1.0, 0.0)
    }

    pub fn v() -> Self {
        Self::from_weights(0.0, 0.0)
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    /// `|α|²`.
    pub fn p_h(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// `|β|²`.
    pub fn p_v(&self) -> f64 {
        self.beta.norm_sqr()
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.alpha, self.beta]
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &SignalQubit) -> f64 {
        (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta).norm_sqr()
    }

    pub fn transformed(&self, jones: &JonesMatrix) -> SignalQubit {
        let [alpha, beta] = jones.apply(self.amplitudes());
        SignalQubit { alpha, beta }
    }

    /// Amplitudes labelled by occupations of the two signal modes.
    pub fn labelled(&self) -> [(Occupation, C64); 2] {
        [
            (Occupation::from([1, 0]), self.alpha),
            (Occupation::from([0, 1]), self.beta),
        ]
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.labelled()).expect("normalized qubit")
    }

    fn from_unnormalized(alpha: C64, beta: C64) -> Option<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        (n > 0.0).then(|| Self {
            alpha: alpha / n,
            beta: beta / n,
        })
    }
}

/// What enters the signal port.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignalInput {
    Photon(SignalQubit),
    Vacuum,
    /// `vacuum·|0⟩ + photon·|ψ⟩`, amplitudes renormalized on preparation.
    Superposed {
        vacuum: C64,
        photon: C64,
        qubit: SignalQubit,
    },
}

impl SignalInput {
    pub fn qubit(&self) -> Option<&SignalQubit> {
        match self {
            SignalInput::Photon(q) | SignalInput::Superposed { qubit: q, .. } => Some(q),
            SignalInput::Vacuum => None,
        }
    }
}

/// Three-photon (or two-photon, without signal) input state: signal ⊗ Bell pair.
pub fn prepare_input(input: &SignalInput) -> Result<FockVector> {
    let signal_reg = ModeRegistry::dual_rail(&[ports::SIGNAL])?;
    let signal = match input {
        SignalInput::Photon(q) => FockVector::from_terms(signal_reg, q.labelled())?,
        SignalInput::Vacuum => FockVector::vacuum(signal_reg),
        SignalInput::Superposed {
            vacuum,
            photon,
            qubit,
        } => {
            let [(h, a), (v, b)] = qubit.labelled();
            FockVector::from_terms_mixed(
                signal_reg,
                [
                    (Occupation::from([0, 0]), *vacuum),
                    (h, photon * a),
                    (v, photon * b),
                ],
            )?
            .normalized()
        }
    };
    signal.tensor(&bell_pair()?)
}

/// `(|HH⟩ + |VV⟩)/√2` on the ancilla paths.
pub fn bell_pair() -> Result<FockVector> {
    let reg = ModeRegistry::dual_rail(&[ports::ANCILLA_1, ports::ANCILLA_2])?;
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    FockVector::from_terms(
        reg,
        [
            (Occupation::from([1, 0, 1, 0]), r),
            (Occupation::from([0, 1, 0, 1]), r),
        ],
    )
}

/// The optical network, in order of traversal.
pub fn network() -> Vec<Element> {
    use ports::{ANCILLA_1 as A1, ANCILLA_2 as A2, SIGNAL as S};
    let plate = |path: PathId| Element::Plate {
        path,
        jones: hwp(FRAC_PI_4),
    };
    let split = |a, b| Element::Pbs(pbs(a, b).expect("distinct paths"));
    vec![
        split(S, A1),
        split(S, A2),
        split(A1, A2),
        plate(S),
        plate(A1),
        split(S, A1),
        plate(S),
        plate(A1),
    ]
}

/// Sends a prepared input through [`network`].
pub fn propagate(state: &FockVector) -> Result<FockVector> {
    network().iter().try_fold(state.clone(), |s, e| e.apply(&s))
}

/// Rotates both detector regions into the measurement basis at `phi`.
pub fn analyze(state: &FockVector, phi: f64) -> Result<FockVector> {
    let a = optics::analyzer(phi).to_dmatrix();
    let [d1h, d1v, d2h, d2v] = detector_modes();
    state
        .apply_element(&[d1h, d1v], &a)?
        .apply_element(&[d2h, d2v], &a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Presence,
    Weak,
    Deterministic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitConfig {
    /// Ancilla measurement-basis angle in radians.
    pub phi: f64,
    pub feed_forward: bool,
    pub regime: Regime,
}

impl CircuitConfig {
    pub fn presence(feed_forward: bool) -> Self {
        Self {
            phi: FRAC_PI_4,
            feed_forward,
            regime: Regime::Presence,
        }
    }

    pub fn weak(phi: f64) -> Self {
        Self {
            phi,
            feed_forward: true,
            regime: Regime::Weak,
        }
    }

    pub fn deterministic() -> Self {
        Self {
            phi: FRAC_PI_4,
            feed_forward: true,
            regime: Regime::Deterministic,
        }
    }

    pub fn simulate(&self, input: &SignalInput) -> Result<RegimeReport> {
        if !self.phi.is_finite() {
            return Err(Error::NonFiniteAngle(self.phi));
        }
        match self.regime {
            Regime::Presence => {
                detect_presence(input, self.feed_forward).map(RegimeReport::Presence)
            }
            Regime::Weak | Regime::Deterministic => {
                let SignalInput::Photon(q) = input else {
                    return Err(Error::UnsupportedInput(
                        "this regime needs a signal photon in a definite sector",
                    ));
                };
                if self.regime == Regime::Weak {
                    weak_measure(q, self.phi).map(|w| RegimeReport::Weak(Box::new(w)))
                } else {
                    deterministic_run(q).map(RegimeReport::Deterministic)
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum RegimeReport {
    Presence(PresenceReport),
    Weak(Box<WeakMeasurement>),
    Deterministic(DeterministicReport),
}

/// Photon counts behind the analyzer: `[H clicks, V clicks]` per detector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetectionPattern {
    pub d1: [u8; 2],
    pub d2: [u8; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeClass {
    Coincidence,
    DoubleD1,
    DoubleD2,
    SingleD1,
    SingleD2,
    Other,
}

/// How click letters are printed: in the diagonal frame an H click is `A` and a V
/// click is `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClickFrame {
    Diagonal,
    Rotated,
}

impl DetectionPattern {
    fn from_occupation(o: &Occupation) -> Self {
        let c = o.counts();
        Self {
            d1: [c[0], c[1]],
            d2: [c[2], c[3]],
        }
    }

    pub fn class(&self) -> OutcomeClass {
        let n1 = self.d1[0] + self.d1[1];
        let n2 = self.d2[0] + self.d2[1];
        match (n1, n2) {
            (1, 1) => OutcomeClass::Coincidence,
            (2, 0) => OutcomeClass::DoubleD1,
            (0, 2) => OutcomeClass::DoubleD2,
            (1, 0) => OutcomeClass::SingleD1,
            (0, 1) => OutcomeClass::SingleD2,
            _ => OutcomeClass::Other,
        }
    }

    /// For a coincidence, whether the two clicks carry orthogonal outcomes.
    pub fn clicks_differ(&self) -> bool {
        self.class() == OutcomeClass::Coincidence && self.d1 != self.d2
    }

    pub fn label(&self, frame: ClickFrame) -> String {
        let letters = |counts: [u8; 2]| {
            let (h, v) = match frame {
                ClickFrame::Diagonal => ("A", "D"),
                ClickFrame::Rotated => ("H", "V"),
            };
            let s = v.repeat(usize::from(counts[1])) + &h.repeat(usize::from(counts[0]));
            if s.is_empty() {
                "-".to_string()
            } else {
                s
            }
        };
        format!("{}|{}", letters(self.d1), letters(self.d2))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Correction {
    None,
    /// V -> -V, half-wave plate with its axis along V.
    SignFlip,
    /// H <-> V, half-wave plate at 45°.
    PolarizationSwap,
}

impl Correction {
    pub fn jones(&self) -> Option<JonesMatrix> {
        match self {
            Correction::None => None,
            Correction::SignFlip => Some(optics::sign_flip()),
            Correction::PolarizationSwap => Some(optics::polarization_swap()),
        }
    }
}

/// One exclusive detection outcome.
#[derive(Clone, Debug)]
pub struct OutcomeRecord {
    pub pattern: DetectionPattern,
    pub label: String,
    pub class: OutcomeClass,
    pub probability: f64,
    /// Conditional signal-output state after any correction.
    pub signal: Option<SignalQubit>,
    pub correction: Correction,
    /// Whether the regime keeps this outcome as a success.
    pub retained: bool,
    /// Fidelity of `signal` with the input qubit, when both exist.
    pub fidelity: Option<f64>,
}

struct Branch {
    pattern: DetectionPattern,
    probability: f64,
    signal: Option<SignalQubit>,
}

fn branches(analyzed: &FockVector) -> Result<Vec<Branch>> {
    let modes = detector_modes();
    analyzed
        .patterns(&modes)?
        .iter()
        .map(|occ| {
            let pattern: Vec<(ModeLabel, u8)> = modes
                .iter()
                .copied()
                .zip(occ.counts().iter().copied())
                .collect();
            let proj = analyzed.project_counts(&pattern)?;
            Ok(Branch {
                pattern: DetectionPattern::from_occupation(occ),
                probability: proj.probability,
                signal: proj.conditional.as_ref().and_then(signal_of),
            })
        })
        .collect()
}

/// The single-photon state left in the signal output, if that is all that remains.
fn signal_of(conditional: &FockVector) -> Option<SignalQubit> {
    let (mut alpha, mut beta) = (C64::default(), C64::default());
    for (occ, amp) in conditional.amplitudes() {
        match (occ.counts()[SO_H], occ.counts()[SO_V]) {
            (1, 0) => alpha += amp,
            (0, 1) => beta += amp,
            _ => return None,
        }
    }
    SignalQubit::from_unnormalized(alpha, beta)
}

fn record(
    branch: Branch,
    frame: ClickFrame,
    correction: Correction,
    retained: bool,
    reference: Option<&SignalQubit>,
) -> OutcomeRecord {
    let signal = match correction.jones() {
        Some(j) => branch.signal.map(|q| q.transformed(&j)),
        None => branch.signal,
    };
    let fidelity = match (reference, &signal) {
        (Some(r), Some(s)) => Some(r.fidelity(s)),
        _ => None,
    };
    OutcomeRecord {
        label: branch.pattern.label(frame),
        class: branch.pattern.class(),
        pattern: branch.pattern,
        probability: branch.probability,
        signal,
        correction,
        retained,
        fidelity,
    }
}

#[derive(Clone, Debug)]
pub struct PresenceReport {
    pub feed_forward: bool,
    pub outcomes: Vec<OutcomeRecord>,
    /// Probability of a D1-D2 coincidence.
    pub coincidence_probability: f64,
    /// Probability of a retained (heralded and usable) outcome.
    pub success_probability: f64,
}

impl PresenceReport {
    pub fn retained(&self) -> impl Iterator<Item = &OutcomeRecord> {
        self.outcomes.iter().filter(|o| o.retained)
    }

    /// Smallest fidelity over retained outcomes.
    pub fn min_retained_fidelity(&self) -> Option<f64> {
        self.retained().filter_map(|o| o.fidelity).reduce(f64::min)
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

/// Presence detection with the ancillas analysed in the D/A basis.
///
/// Coincidences `DD`/`AA` leave the signal untouched; `DA`/`AD` leave
/// `α|H⟩ - β|V⟩`, which feed-forward corrects. Without feed-forward only `DD`/`AA`
/// are kept.
pub fn detect_presence(input: &SignalInput, feed_forward: bool) -> Result<PresenceReport> {
    let analyzed = analyze(&propagate(&prepare_input(input)?)?, FRAC_PI_4)?;
    let outcomes: Vec<OutcomeRecord> = branches(&analyzed)?
        .into_iter()
        .map(|b| {
            let coincidence = b.pattern.class() == OutcomeClass::Coincidence;
            let differ = b.pattern.clicks_differ();
            let correction = if differ && feed_forward {
                Correction::SignFlip
            } else {
                Correction::None
            };
            let retained = coincidence && (feed_forward || !differ);
            record(b, ClickFrame::Diagonal, correction, retained, input.qubit())
        })
        .collect();
    let coincidence_probability = outcomes
        .iter()
        .filter(|o| o.class == OutcomeClass::Coincidence)
        .map(|o| o.probability)
        .sum();
    let success_probability = outcomes
        .iter()
        .filter(|o| o.retained)
        .map(|o| o.probability)
        .sum();
    Ok(PresenceReport {
        feed_forward,
        outcomes,
        coincidence_probability,
        success_probability,
    })
}

#[derive(Clone, Debug)]
pub struct DeterministicReport {
    pub outcomes: Vec<OutcomeRecord>,
    /// `Σ p·F` over all outcomes.
    pub average_fidelity: f64,
    pub total_probability: f64,
}

impl DeterministicReport {
    pub fn class_probability(&self, class: OutcomeClass) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.class == class)
            .map(|o| o.probability)
            .sum()
    }
}

/// Keeps every outcome: coincidences are corrected as in presence detection, a
/// double click on either detector is followed by an H <-> V swap on the output.
pub fn deterministic_run(signal: &SignalQubit) -> Result<DeterministicReport> {
    let input = SignalInput::Photon(*signal);
    let analyzed = analyze(&propagate(&prepare_input(&input)?)?, FRAC_PI_4)?;
    let outcomes: Vec<OutcomeRecord> = branches(&analyzed)?
        .into_iter()
        .map(|b| {
            let correction = match b.pattern.class() {
                OutcomeClass::Coincidence if b.pattern.clicks_differ() => Correction::SignFlip,
                OutcomeClass::DoubleD1 | OutcomeClass::DoubleD2 => Correction::PolarizationSwap,
                _ => Correction::None,
            };
            record(b, ClickFrame::Diagonal, correction, true, Some(signal))
        })
        .collect();
    let average_fidelity = outcomes
        .iter()
        .map(|o| o.probability * o.fidelity.unwrap_or(0.0))
        .sum();
    let total_probability = outcomes.iter().map(|o| o.probability).sum();
    Ok(DeterministicReport {
        outcomes,
        average_fidelity,
        total_probability,
    })
}

/// Heralded weak measurement at basis angle `phi`.
#[derive(Clone, Debug)]
pub struct WeakMeasurement {
    pub phi: f64,
    pub coincidence_probability: f64,
    /// Renormalized state after the coincidence herald, `α|HHH⟩ + β|VVV⟩`.
    pub heralded: FockVector,
    /// Heralded state with both ancillas rotated into the measurement basis.
    pub analyzed: FockVector,
    /// `analyzed` with the V -> -V correction applied coherently on every
    /// component whose ancilla clicks differ.
    pub corrected: FockVector,
    /// Joint distribution of signal polarization and the first ancilla click,
    /// tabulated after correction.
    pub joint: JointDistribution,
    /// Signal output state averaged over all ancilla outcomes.
    pub rho_out: DensityMatrix,
    /// Per ancilla outcome, with the classical correction applied.
    pub branches: Vec<OutcomeRecord>,
    signal: SignalQubit,
}

impl WeakMeasurement {
    /// `⟨ψ_s|ρ_out|ψ_s⟩`.
    pub fn fidelity(&self) -> f64 {
        self.rho_out.expectation(&self.signal.labelled()).re
    }

    /// Three-qubit polarization state (signal, D1, D2) before correction.
    pub fn polarization_state(&self) -> ThreeQubitState {
        ThreeQubitState::from_fock(&self.analyzed, [SO_H, D1_H, D2_H])
            .expect("heralded state has one photon per path")
    }

    pub fn signal(&self) -> &SignalQubit {
        &self.signal
    }
}

pub fn weak_measure(signal: &SignalQubit, phi: f64) -> Result<WeakMeasurement> {
    if !phi.is_finite() {
        return Err(Error::NonFiniteAngle(phi));
    }
    let out = propagate(&prepare_input(&SignalInput::Photon(*signal))?)?;
    let herald = out.project_paths(&[(ports::DETECTOR_1, 1), (ports::DETECTOR_2, 1)])?;
    let heralded = herald
        .conditional
        .expect("a signal photon always has coincidence components");
    let analyzed = analyze(&heralded, phi)?;
    let corrected = analyzed.apply_element_where(
        &signal_out_modes(),
        &optics::sign_flip().to_dmatrix(),
        |o| {
            let c = o.counts();
            (c[D1_H] == 1 && c[D2_V] == 1) || (c[D1_V] == 1 && c[D2_H] == 1)
        },
    )?;

    let mut p = [[0.0; 2]; 2];
    for (occ, amp) in corrected.amplitudes() {
        let c = occ.counts();
        let i = if c[SO_H] == 1 { 0 } else { 1 };
        let j = if c[D1_H] == 1 { 0 } else { 1 };
        p[i][j] += amp.norm_sqr();
    }
    let joint = JointDistribution::new(p)?;
    let rho_out = corrected.reduce(&signal_out_modes())?;

    let branches = branches(&analyzed)?
        .into_iter()
        .map(|b| {
            let correction = if b.pattern.clicks_differ() {
                Correction::SignFlip
            } else {
                Correction::None
            };
            record(b, ClickFrame::Rotated, correction, true, Some(signal))
        })
        .collect();

    Ok(WeakMeasurement {
        phi,
        coincidence_probability: herald.probability,
        heralded,
        analyzed,
        corrected,
        joint,
        rho_out,
        branches,
        signal: *signal,
    })
}
