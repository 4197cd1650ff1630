//! The constraint tying a player's probabilities on the two desks together.
//!
//! A strategy angle `α` fixes both marginals at once:
//!
//! ```text
//! p₁ = cos²α
//! p₂ = cos²α cos²θ + sin²α sin²θ + 2 cosα sinα cosθ sinθ cosλ
//! ```
//!
//! With `U = 2p₁ − 1 = cos 2α` and `W = 2p₂ − 1 = U cos 2θ + sin 2α sin 2θ cos λ`,
//! eliminating `α` gives `(W − U cos 2θ)² = sin²2θ cos²λ (1 − U²)`. Expanded
//! and divided by four this is the conic
//!
//! ```text
//! (cos²2θ + sin²2θ cos²λ) p₁² + p₂² − 2 cos 2θ p₁p₂
//!     − (sin²2θ cos²λ − 2 sin²θ cos 2θ) p₁ − 2 sin²θ p₂ + sin⁴θ = 0
//! ```
//!
//! which is centred on `(½, ½)` for every frame. When `sin 2θ cos λ = 0` it
//! collapses to the doubled line `p₂ = p₁ cos 2θ + sin²θ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{wrap, ObservableFrame};

/// Default tolerance for curve membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Below this value of `sin²2θ cos²λ` the conic is treated as a line segment.
const DEGENERATE_EPS: f64 = 1e-20;

/// Marginal weights of one player: `p₁`/`p₃` on the odd desk, `p₂`/`p₄` on the
/// even desk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityQuadruple {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl ProbabilityQuadruple {
    /// Build from the two "first action" probabilities; `p₃ = 1 − p₁`, `p₄ = 1 − p₂`.
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbabilities(format!(
                    "{name} = {p} outside [0, 1]"
                )));
            }
        }
        Ok(Self::from_parts_unchecked(p1, p2, 1.0 - p1, 1.0 - p2))
    }

    /// Build from all four weights, checking ranges and both desk sums.
    pub fn from_parts(p1: f64, p2: f64, p3: f64, p4: f64, tol: f64) -> Result<Self> {
        let q = Self::from_parts_unchecked(p1, p2, p3, p4);
        if q.as_array().iter().any(|p| !(-tol..=1.0 + tol).contains(p)) {
            return Err(Error::InvalidProbabilities(format!(
                "{q:?} has entries outside [0, 1]"
            )));
        }
        if (p1 + p3 - 1.0).abs() > tol || (p2 + p4 - 1.0).abs() > tol {
            return Err(Error::InvalidProbabilities(format!(
                "{q:?} does not sum to 1 per desk"
            )));
        }
        Ok(q)
    }

    pub(crate) fn from_parts_unchecked(p1: f64, p2: f64, p3: f64, p4: f64) -> Self {
        Self { p1, p2, p3, p4 }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p1, self.p2, self.p3, self.p4]
    }
}

/// `a11 p₁² + a22 p₂² + 2 a12 p₁p₂ + b1 p₁ + b2 p₂ + c0`, normalised to `a22 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicCoefficients {
    pub a11: f64,
    pub a22: f64,
    pub a12: f64,
    pub b1: f64,
    pub b2: f64,
    pub c0: f64,
}

impl ConicCoefficients {
    pub fn eval(&self, p1: f64, p2: f64) -> f64 {
        self.a11 * p1 * p1
            + self.a22 * p2 * p2
            + 2.0 * self.a12 * p1 * p2
            + self.b1 * p1
            + self.b2 * p2
            + self.c0
    }

    pub fn gradient(&self, p1: f64, p2: f64) -> (f64, f64) {
        (
            2.0 * self.a11 * p1 + 2.0 * self.a12 * p2 + self.b1,
            2.0 * self.a22 * p2 + 2.0 * self.a12 * p1 + self.b2,
        )
    }

    /// `a11·a22 − a12²`: positive for an ellipse, zero for the degenerate line.
    pub fn discriminant(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }
}

/// Shape of the constraint curve in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    Ellipse,
    /// `p₂ = slope · p₁ + intercept` for `p₁ ∈ [0, 1]`.
    Segment {
        slope: f64,
        intercept: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conic {
    pub coefficients: ConicCoefficients,
    pub kind: CurveKind,
}

impl Conic {
    pub fn is_degenerate(&self) -> bool {
        matches!(self.kind, CurveKind::Segment { .. })
    }

    /// Distance-like membership residual: the quadratic form for an ellipse,
    /// the signed vertical offset from the line for a segment.
    pub fn membership_residual(&self, p1: f64, p2: f64) -> f64 {
        match self.kind {
            CurveKind::Ellipse => self.coefficients.eval(p1, p2),
            CurveKind::Segment { slope, intercept } => p2 - slope * p1 - intercept,
        }
    }
}

/// Marginals produced by strategy angle `alpha`. Periodic in `alpha` with period `π`.
pub fn probabilities_from_angle(alpha: f64, frame: &ObservableFrame) -> ProbabilityQuadruple {
    let alpha = wrap(alpha, PI);
    let (sa, ca) = alpha.sin_cos();
    let (st, ct) = frame.theta().sin_cos();
    let p1 = ca * ca;
    let p2 =
        (ca * ca * ct * ct + sa * sa * st * st + 2.0 * ca * sa * ct * st * frame.lambda().cos())
            .clamp(0.0, 1.0);
    ProbabilityQuadruple::from_parts_unchecked(p1, p2, 1.0 - p1, 1.0 - p2)
}

pub fn constraint_conic(frame: &ObservableFrame) -> Conic {
    let k = frame.cos_2theta();
    let sin_theta_sq = frame.theta().sin().powi(2);
    let s = frame.cross_gain().powi(2);
    let coefficients = ConicCoefficients {
        a11: k * k + s,
        a22: 1.0,
        a12: -k,
        b1: -(s - 2.0 * sin_theta_sq * k),
        b2: -2.0 * sin_theta_sq,
        c0: sin_theta_sq * sin_theta_sq,
    };
    let kind = if s <= DEGENERATE_EPS {
        CurveKind::Segment {
            slope: k,
            intercept: sin_theta_sq,
        }
    } else {
        CurveKind::Ellipse
    };
    Conic { coefficients, kind }
}

pub fn conic_coefficients(frame: &ObservableFrame) -> ConicCoefficients {
    constraint_conic(frame).coefficients
}

/// Signed value of the constraint quadratic form; zero on the curve,
/// negative inside the ellipse.
pub fn conic_residual(p1: f64, p2: f64, frame: &ObservableFrame) -> f64 {
    conic_coefficients(frame).eval(p1, p2)
}

/// `(x₁, x₂) = (p₁ + p₂ − 1, p₂ − p₁)`. For a real frame these satisfy
/// `x₁ = cos θ cos(2α − θ)` and `x₂ = sin θ sin(2α − θ)`, so the curve is the
/// axis-aligned ellipse `x₁²/cos²θ + x₂²/sin²θ = 1`.
pub fn axis_coordinates(p1: f64, p2: f64) -> (f64, f64) {
    (p1 + p2 - 1.0, p2 - p1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub alpha: f64,
    pub p1: f64,
    pub p2: f64,
}

/// `n` points at `α = kπ/n`, `k = 0..n`.
pub fn curve_points(frame: &ObservableFrame, n: usize) -> Result<Vec<CurvePoint>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 curve points, got {n}"
        )));
    }
    Ok((0..n)
        .map(|k| {
            let alpha = k as f64 * PI / n as f64;
            let q = probabilities_from_angle(alpha, frame);
            CurvePoint {
                alpha,
                p1: q.p1,
                p2: q.p2,
            }
        })
        .collect())
}

/// All `α ∈ [0, π)` mapping to `(p1, p2)` within `tol`, sorted ascending.
///
/// Candidates come in closed form: `±½ acos(2p₁ − 1)` from the odd desk, and
/// `½ atan2(sin 2α, cos 2α)` with `sin 2α` recovered from the even desk when
/// the frame is not degenerate.
pub fn angles_for_point(p1: f64, p2: f64, frame: &ObservableFrame, tol: f64) -> Result<Vec<f64>> {
    let conic = constraint_conic(frame);
    let residual = conic.membership_residual(p1, p2);
    let off_curve = || Error::NotOnCurve {
        p1,
        p2,
        residual,
        tol,
    };
    if !residual.is_finite() || residual.abs() > tol {
        return Err(off_curve());
    }

    let u = (2.0 * p1 - 1.0).clamp(-1.0, 1.0);
    let half = 0.5 * u.acos();
    let mut candidates = vec![half, PI - half];
    if !conic.is_degenerate() {
        let w = 2.0 * p2 - 1.0;
        let v = (w - u * frame.cos_2theta()) / frame.cross_gain();
        candidates.push(0.5 * v.atan2(u));
    }

    let mut hits: Vec<f64> = candidates
        .into_iter()
        .map(|a| wrap(a, PI))
        .filter(|&a| {
            let q = probabilities_from_angle(a, frame);
            (q.p1 - p1).abs() <= tol && (q.p2 - p2).abs() <= tol
        })
        .collect();
    hits.sort_by(f64::total_cmp);
    hits.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if hits.len() > 1 && PI - hits[hits.len() - 1] + hits[0] < 1e-9 {
        hits.pop();
    }
    if hits.is_empty() {
        return Err(off_curve());
    }
    Ok(hits)
}
