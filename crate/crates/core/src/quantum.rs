//! Two-level states, rank-one projectors and the four-term payoff operator.
//!
//! Each player owns two noncommuting yes/no observables. The first is the
//! fixed basis projector `A₁ = |0⟩⟨0|`; the second is the projector onto the
//! direction `(cos θ, e^{-iλ} sin θ)`. Their complements close the two
//! resolutions of identity `A₁ + A₃ = I` and `A₂ + A₄ = I`.
//!
//! Tensor products are always taken Alice-slot first: basis index
//! `2 * alice + bob`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::geometry::ProbabilityQuadruple;

/// Tolerance used for algebraic identities (hermiticity, idempotence, ...).
pub const IDENTITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A unit vector `e^{iω}(cos α, sin α)` in ℂ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    amplitudes: [Complex64; 2],
}

impl StateVector {
    pub fn new(alpha: f64, omega: f64) -> Self {
        let phase = Complex64::from_polar(1.0, omega);
        Self {
            amplitudes: [phase * alpha.cos(), phase * alpha.sin()],
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Product state in the Alice ⊗ Bob basis.
    pub fn tensor(&self, bob: &StateVector) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for i in 0..2 {
            for k in 0..2 {
                out[2 * i + k] = self.amplitudes[i] * bob.amplitudes[k];
            }
        }
        out
    }
}

/// The angle and relative phase fixing a player's second observable.
///
/// `theta` is kept in `[0, π)` and `lambda` in `[0, 2π)`; both maps leave the
/// projector unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableFrame {
    theta: f64,
    lambda: f64,
}

impl ObservableFrame {
    pub fn new(theta: f64, lambda: f64) -> Self {
        Self {
            theta: wrap(theta, PI),
            lambda: wrap(lambda, 2.0 * PI),
        }
    }

    /// Frame with zero phase (the real-amplitude case).
    pub fn real(theta: f64) -> Self {
        Self::new(theta, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `cos 2θ`: how much the second observable's weight follows the first.
    pub(crate) fn cos_2theta(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    /// `sin 2θ · cos λ`: the part of the second observable's weight that
    /// depends on `sin 2α`.
    pub(crate) fn cross_gain(&self) -> f64 {
        (2.0 * self.theta).sin() * self.lambda.cos()
    }
}

/// Reduce `x` into `[0, period)`, guarding the `rem_euclid` round-up to `period`.
pub(crate) fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// A 2×2 orthogonal projector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projector {
    entries: [[Complex64; 2]; 2],
}

impl Projector {
    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Largest entrywise deviation from `P = P†`.
    #[allow(clippy::needless_range_loop)]
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.entries;
        let mut worst = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((m[i][j] - m[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise deviation from `P² = P`.
    pub fn idempotence_defect(&self) -> f64 {
        let m = &self.entries;
        let mut worst = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                let sq = m[i][0] * m[0][j] + m[i][1] * m[1][j];
                worst = worst.max((sq - m[i][j]).norm());
            }
        }
        worst
    }
}

/// Rank-one projector onto `(cos θ, e^{-iλ} sin θ)`:
///
/// ```text
/// | cos²θ            sinθ cosθ e^{iλ} |
/// | sinθ cosθ e^{-iλ}   sin²θ         |
/// ```
///
/// `make_projector(0, λ)` is the basis projector `A₁` for every `λ`.
pub fn make_projector(theta: f64, lambda: f64) -> Projector {
    let (s, c) = theta.sin_cos();
    let off = Complex64::from_polar(s * c, lambda);
    Projector {
        entries: [
            [Complex64::new(c * c, 0.0), off],
            [off.conj(), Complex64::new(s * s, 0.0)],
        ],
    }
}

/// `I − P`.
pub fn complement(p: &Projector) -> Projector {
    let m = &p.entries;
    Projector {
        entries: [[ONE - m[0][0], -m[0][1]], [-m[1][0], ONE - m[1][1]]],
    }
}

/// `⟨φ|P|φ⟩`, the probability of a "yes" answer.
pub fn weight(state: &StateVector, p: &Projector) -> f64 {
    let v = state.amplitudes;
    let m = &p.entries;
    let mut acc = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            acc += v[i].conj() * m[i][j] * v[j];
        }
    }
    acc.re.clamp(0.0, 1.0)
}

/// The four projectors `(A₁, A₂, A₃, A₄)` of one player.
pub fn projector_family(frame: &ObservableFrame) -> [Projector; 4] {
    let first = make_projector(0.0, 0.0);
    let second = make_projector(frame.theta(), frame.lambda());
    [first, second, complement(&first), complement(&second)]
}

/// Weights `(p₁, p₂, p₃, p₄)` of a state against a player's projector family.
pub fn quadruple_from_state(state: &StateVector, frame: &ObservableFrame) -> ProbabilityQuadruple {
    let [a1, a2, a3, a4] = projector_family(frame);
    ProbabilityQuadruple::from_parts_unchecked(
        weight(state, &a1),
        weight(state, &a2),
        weight(state, &a3),
        weight(state, &a4),
    )
}

/// Payoff coefficients `c₁..c₄`.
///
/// On the odd desk Alice wins `c₃` for (1 vs 3) and `c₁` for (3 vs 1); on the
/// even desk `c₄` for (2 vs 4) and `c₂` for (4 vs 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl PayoffCoefficients {
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        Self { c1, c2, c3, c4 }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|c| c.is_finite())
    }

    /// `Σ|cᵢ|`, a Lipschitz constant of the payoff in either strategy angle.
    pub fn abs_sum(&self) -> f64 {
        self.as_array().iter().map(|c| c.abs()).sum()
    }

    /// Swap `c₁ ↔ c₃` and `c₂ ↔ c₄`.
    pub fn swapped(&self) -> Self {
        Self::new(self.c3, self.c4, self.c1, self.c2)
    }
}

/// The 4×4 Hermitian payoff operator
/// `H = c₃ A₁⊗B₃ + c₁ A₃⊗B₁ + c₄ A₂⊗B₄ + c₂ A₄⊗B₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffOperator {
    entries: [[Complex64; 4]; 4],
}

impl PayoffOperator {
    pub fn entries(&self) -> [[Complex64; 4]; 4] {
        self.entries
    }

    #[allow(clippy::needless_range_loop)]
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.entries;
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((m[i][j] - m[j][i].conj()).norm());
            }
        }
        worst
    }

    fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }
}

fn kron(a: &Projector, b: &Projector) -> [[Complex64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a.entries[i][j] * b.entries[k][l];
                }
            }
        }
    }
    out
}

pub fn build_payoff_operator(spec: &GameSpec) -> PayoffOperator {
    let [a1, a2, a3, a4] = projector_family(&spec.alice);
    let [b1, b2, b3, b4] = projector_family(&spec.bob);
    let c = spec.coefficients;
    let terms = [
        (c.c3, kron(&a1, &b3)),
        (c.c1, kron(&a3, &b1)),
        (c.c4, kron(&a2, &b4)),
        (c.c2, kron(&a4, &b2)),
    ];
    let mut entries = [[ZERO; 4]; 4];
    for (coef, m) in terms.iter() {
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] += m[i][j] * *coef;
            }
        }
    }
    PayoffOperator { entries }
}

/// `⟨φ⊗ψ| H |φ⊗ψ⟩`.
///
/// The imaginary part is discarded when it is below `1e-12` relative to the
/// operator scale; anything larger is reported as [`Error::NonHermitian`].
pub fn expectation(h: &PayoffOperator, alice: &StateVector, bob: &StateVector) -> Result<f64> {
    let v = alice.tensor(bob);
    let mut acc = ZERO;
    for (vi, hrow) in v.iter().zip(&h.entries) {
        let row: Complex64 = hrow.iter().zip(&v).map(|(h, x)| h * x).sum();
        acc += vi.conj() * row;
    }
    if acc.im.abs() > IDENTITY_TOL * (1.0 + h.max_abs()) {
        return Err(Error::NonHermitian { imag: acc.im });
    }
    Ok(acc.re)
}

/// Total payoff and its split across the two desks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payoff {
    pub total: f64,
    pub odd: f64,
    pub even: f64,
}

/// `c₃p₁q₃ + c₁p₃q₁` on the odd desk plus `c₄p₂q₄ + c₂p₄q₂` on the even desk.
pub fn scalar_payoff(
    c: &PayoffCoefficients,
    p: &ProbabilityQuadruple,
    q: &ProbabilityQuadruple,
) -> Payoff {
    let odd = c.c3 * p.p1 * q.p3 + c.c1 * p.p3 * q.p1;
    let even = c.c4 * p.p2 * q.p4 + c.c2 * p.p4 * q.p2;
    Payoff {
        total: odd + even,
        odd,
        even,
    }
}
