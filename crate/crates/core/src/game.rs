//! Classical view of the two desks as one 4×4 zero-sum game.
//!
//! A compound strategy is a pair (odd action, even action). Rows and columns
//! are always ordered `1-2, 1-4, 3-2, 3-4`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ProbabilityQuadruple;
use crate::quantum::{ObservableFrame, PayoffCoefficients};

pub const COMPOUND_LABELS: [&str; 4] = ["1-2", "1-4", "3-2", "3-4"];

/// Default tolerance for the product-form test.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

/// A full problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub coefficients: PayoffCoefficients,
    /// `(θ, λ)`.
    pub alice: ObservableFrame,
    /// `(τ, μ)`.
    pub bob: ObservableFrame,
}

impl GameSpec {
    pub fn new(
        coefficients: PayoffCoefficients,
        alice: ObservableFrame,
        bob: ObservableFrame,
    ) -> Self {
        Self {
            coefficients,
            alice,
            bob,
        }
    }
}

/// Joint distribution of one player's actions across both desks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub p12: f64,
    pub p14: f64,
    pub p32: f64,
    pub p34: f64,
}

impl JointDistribution {
    pub fn new(p12: f64, p14: f64, p32: f64, p34: f64) -> Result<Self> {
        let j = Self { p12, p14, p32, p34 };
        let w = j.as_array();
        if w.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidJoint(format!(
                "{j:?} has negative or non-finite weights"
            )));
        }
        if (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidJoint(format!("{j:?} does not sum to 1")));
        }
        Ok(j)
    }

    /// Weights in `1-2, 1-4, 3-2, 3-4` order.
    pub fn as_array(&self) -> [f64; 4] {
        [self.p12, self.p14, self.p32, self.p34]
    }
}

/// Which coefficient labels to print in the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelConvention {
    /// Entries follow the payoff operator's term-to-event rule.
    #[default]
    PayoffRule,
    /// The alternative labelling with `c₁ ↔ c₃` and `c₂ ↔ c₄` swapped.
    Table1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMatrix(pub [[f64; 4]; 4]);

impl ClassicalMatrix {
    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.0
    }

    pub fn min_entry(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Odd-desk action 1 is index bit 1 clear; even-desk action 2 is bit 0 clear.
fn actions(strategy: usize) -> (bool, bool) {
    (strategy & 0b10 == 0, strategy & 0b01 == 0)
}

pub fn classical_matrix(c: &PayoffCoefficients) -> ClassicalMatrix {
    let mut m = [[0.0; 4]; 4];
    for (a, row) in m.iter_mut().enumerate() {
        let (a_first, a_second) = actions(a);
        for (b, cell) in row.iter_mut().enumerate() {
            let (b_first, b_second) = actions(b);
            let odd = match (a_first, b_first) {
                (true, false) => c.c3,
                (false, true) => c.c1,
                _ => 0.0,
            };
            let even = match (a_second, b_second) {
                (true, false) => c.c4,
                (false, true) => c.c2,
                _ => 0.0,
            };
            *cell = odd + even;
        }
    }
    ClassicalMatrix(m)
}

pub fn classical_matrix_with(
    c: &PayoffCoefficients,
    convention: LabelConvention,
) -> ClassicalMatrix {
    match convention {
        LabelConvention::PayoffRule => classical_matrix(c),
        LabelConvention::Table1 => classical_matrix(&c.swapped()),
    }
}

/// `(p₁₂+p₁₄, p₁₂+p₃₂, p₃₂+p₃₄, p₁₄+p₃₄)`.
pub fn marginals(j: &JointDistribution) -> ProbabilityQuadruple {
    ProbabilityQuadruple::from_parts_unchecked(
        j.p12 + j.p14,
        j.p12 + j.p32,
        j.p32 + j.p34,
        j.p14 + j.p34,
    )
}

/// Product-form joint with the given marginals.
pub fn independent_joint(p: &ProbabilityQuadruple) -> JointDistribution {
    JointDistribution {
        p12: p.p1 * p.p2,
        p14: p.p1 * p.p4,
        p32: p.p3 * p.p2,
        p34: p.p3 * p.p4,
    }
}

/// A 2×2 joint factorises iff `p₁₂ p₃₄ = p₁₄ p₃₂`.
pub fn is_product_form(j: &JointDistribution, tol: f64) -> bool {
    (j.p12 * j.p34 - j.p14 * j.p32).abs() <= tol
}

pub fn bilinear_payoff(
    m: &ClassicalMatrix,
    alice: &JointDistribution,
    bob: &JointDistribution,
) -> f64 {
    let (x, y) = (alice.as_array(), bob.as_array());
    m.0.iter()
        .zip(x)
        .map(|(row, xs)| xs * row.iter().zip(y).map(|(e, yt)| e * yt).sum::<f64>())
        .sum()
}
