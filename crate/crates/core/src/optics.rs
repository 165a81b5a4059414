//! Jones matrices and mode unitaries for the passive components of the detector.
//!
//! All matrices act on amplitude column vectors `(H, V)`: column `i` is the image of
//! input polarization `i`. Reflection at a polarizing beam splitter carries phase +1,
//! which keeps every amplitude in the network real.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::fock::{FockVector, ModeLabel, PathId, C64, UNITARY_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesMatrix(Matrix2<C64>);

impl JonesMatrix {
    pub fn new(m: Matrix2<C64>) -> Result<Self> {
        let dev = (m.adjoint() * m - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NonUnitary(dev));
        }
        Ok(Self(m))
    }

    fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self(Matrix2::new(
            C64::new(a, 0.0),
            C64::new(b, 0.0),
            C64::new(c, 0.0),
            C64::new(d, 0.0),
        ))
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn apply(&self, amps: [C64; 2]) -> [C64; 2] {
        [
            self.0[(0, 0)] * amps[0] + self.0[(0, 1)] * amps[1],
            self.0[(1, 0)] * amps[0] + self.0[(1, 1)] * amps[1],
        ]
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &JonesMatrix) -> Self {
        Self(next.0 * self.0)
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(2, 2, |i, j| self.0[(i, j)])
    }

    pub fn max_abs_diff(&self, other: &JonesMatrix) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Half-wave plate with its axis at `theta`: `[[cos 2θ, sin 2θ], [sin 2θ, -cos 2θ]]`.
///
/// `hwp(π/4)` swaps H and V; `hwp(0)` maps V to -V.
pub fn hwp(theta: f64) -> JonesMatrix {
    let (s, c) = (2.0 * theta).sin_cos();
    JonesMatrix::real(c, s, s, -c)
}

/// `[[cos φ, sin φ], [-sin φ, cos φ]]`.
pub fn basis_rotation(phi: f64) -> JonesMatrix {
    let (s, c) = phi.sin_cos();
    JonesMatrix::real(c, s, -s, c)
}

/// Element placed in front of an H/V detector to measure in the basis rotated by
/// `phi`. It substitutes `|H⟩ -> cos φ|H⟩ + sin φ|V⟩`, `|V⟩ -> -sin φ|H⟩ + cos φ|V⟩`,
/// i.e. it is the transpose of [`basis_rotation`]. At `φ = π/4` an H click is an
/// antidiagonal outcome and a V click a diagonal one.
pub fn analyzer(phi: f64) -> JonesMatrix {
    basis_rotation(phi).transpose()
}

/// V -> -V correction.
pub fn sign_flip() -> JonesMatrix {
    hwp(0.0)
}

/// H <-> V correction.
pub fn polarization_swap() -> JonesMatrix {
    hwp(std::f64::consts::FRAC_PI_4)
}

/// Polarizing beam splitter between two paths: H is transmitted, V is reflected
/// into the other path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pbs {
    a: PathId,
    b: PathId,
}

pub fn pbs(a: PathId, b: PathId) -> Result<Pbs> {
    if a == b {
        return Err(Error::SamePath(a.0));
    }
    Ok(Pbs { a, b })
}

impl Pbs {
    /// `(aH, aV, bH, bV)`, the row and column order of [`Pbs::matrix`].
    pub fn modes(&self) -> [ModeLabel; 4] {
        [
            ModeLabel::h(self.a),
            ModeLabel::v(self.a),
            ModeLabel::h(self.b),
            ModeLabel::v(self.b),
        ]
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        let one = C64::new(1.0, 0.0);
        let mut u = DMatrix::zeros(4, 4);
        u[(0, 0)] = one; // aH -> aH
        u[(3, 1)] = one; // aV -> bV
        u[(2, 2)] = one; // bH -> bH
        u[(1, 3)] = one; // bV -> aV
        u
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    Pbs(Pbs),
    Plate { path: PathId, jones: JonesMatrix },
}

impl Element {
    pub fn apply(&self, state: &FockVector) -> Result<FockVector> {
        match self {
            Element::Pbs(p) => state.apply_element(&p.modes(), &p.matrix()),
            Element::Plate { path, jones } => state.apply_element(
                &[ModeLabel::h(*path), ModeLabel::v(*path)],
                &jones.to_dmatrix(),
            ),
        }
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Element::Pbs(p) => write!(f, "PBS(p{}, p{})", p.a.0, p.b.0),
            Element::Plate { path, .. } => write!(f, "plate(p{})", path.0),
        }
    }
}
