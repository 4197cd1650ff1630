//! Seeded Monte-Carlo play of the two desks.
//!
//! Randomness comes from xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). A uniform in `[0, 1)` is the top 53
//! bits of one 64-bit output times `2⁻⁵³`, and a Bernoulli draw with
//! probability `p` is `uniform < p`. Each round consumes four draws in the
//! fixed order Alice-odd, Alice-even, Bob-odd, Bob-even.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::equilibrium::payoff_surface;
use crate::error::{Error, Result};
use crate::game::{bilinear_payoff, classical_matrix, GameSpec, JointDistribution};
use crate::geometry::{probabilities_from_angle, ProbabilityQuadruple};
use crate::quantum::{scalar_payoff, PayoffCoefficients};

/// Reproducible generator state threaded through the simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CasinoRng(Xoshiro256PlusPlus);

impl CasinoRng {
    pub fn from_seed(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

/// Actions and payoffs of a single round. `true` means the first action of
/// a desk: 1 on the odd desk, 2 on the even desk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub alice: (bool, bool),
    pub bob: (bool, bool),
    pub payoff: f64,
    pub odd: f64,
    pub even: f64,
}

fn settle(c: &PayoffCoefficients, alice: (bool, bool), bob: (bool, bool)) -> RoundOutcome {
    let odd = match (alice.0, bob.0) {
        (true, false) => c.c3,
        (false, true) => c.c1,
        _ => 0.0,
    };
    let even = match (alice.1, bob.1) {
        (true, false) => c.c4,
        (false, true) => c.c2,
        _ => 0.0,
    };
    RoundOutcome {
        alice,
        bob,
        payoff: odd + even,
        odd,
        even,
    }
}

fn draw_round(
    c: &PayoffCoefficients,
    p: &ProbabilityQuadruple,
    q: &ProbabilityQuadruple,
    rng: &mut CasinoRng,
) -> RoundOutcome {
    let alice_odd = rng.bernoulli(p.p1);
    let alice_even = rng.bernoulli(p.p2);
    let bob_odd = rng.bernoulli(q.p1);
    let bob_even = rng.bernoulli(q.p2);
    settle(c, (alice_odd, alice_even), (bob_odd, bob_even))
}

/// One round with both players on their constraint curves.
pub fn play_round(
    spec: &GameSpec,
    alpha: f64,
    beta: f64,
    mut rng: CasinoRng,
) -> (RoundOutcome, CasinoRng) {
    let p = probabilities_from_angle(alpha, &spec.alice);
    let q = probabilities_from_angle(beta, &spec.bob);
    let out = draw_round(&spec.coefficients, &p, &q, &mut rng);
    (out, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub rounds: u64,
    pub empirical_mean: f64,
    /// Sample standard deviation over `√rounds`.
    pub std_error: f64,
    pub analytic_mean: f64,
    /// Empirical `(odd, even)` desk means.
    pub per_desk_means: (f64, f64),
    /// Analytic `(odd, even)` desk means.
    pub analytic_per_desk: (f64, f64),
    pub seed: u64,
}

impl SimReport {
    /// `|empirical − analytic|` in units of the standard error.
    pub fn z_score(&self) -> f64 {
        let d = (self.empirical_mean - self.analytic_mean).abs();
        if self.std_error == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.std_error
        }
    }
}

#[derive(Default)]
struct Running {
    n: u64,
    mean: f64,
    m2: f64,
    odd: f64,
    even: f64,
}

impl Running {
    fn push(&mut self, r: &RoundOutcome) {
        self.n += 1;
        let delta = r.payoff - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (r.payoff - self.mean);
        self.odd += (r.odd - self.odd) / self.n as f64;
        self.even += (r.even - self.even) / self.n as f64;
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64).sqrt() / (self.n as f64).sqrt()
    }
}

pub fn simulate(
    spec: &GameSpec,
    alpha: f64,
    beta: f64,
    rounds: u64,
    seed: u64,
) -> Result<SimReport> {
    simulate_with_trace(spec, alpha, beta, rounds, seed, |_, _, _| {})
}

/// As [`simulate`], calling `trace(round, payoff, running_mean)` after every
/// round (rounds numbered from 1).
pub fn simulate_with_trace(
    spec: &GameSpec,
    alpha: f64,
    beta: f64,
    rounds: u64,
    seed: u64,
    mut trace: impl FnMut(u64, f64, f64),
) -> Result<SimReport> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    let c = spec.coefficients;
    let p = probabilities_from_angle(alpha, &spec.alice);
    let q = probabilities_from_angle(beta, &spec.bob);
    let mut rng = CasinoRng::from_seed(seed);
    let mut acc = Running::default();
    for _ in 0..rounds {
        let r = draw_round(&c, &p, &q, &mut rng);
        acc.push(&r);
        trace(acc.n, r.payoff, acc.mean);
    }
    let analytic = scalar_payoff(&c, &p, &q);
    Ok(SimReport {
        rounds,
        empirical_mean: acc.mean,
        std_error: acc.std_error(),
        analytic_mean: payoff_surface(spec, alpha, beta),
        per_desk_means: (acc.odd, acc.even),
        analytic_per_desk: (analytic.odd, analytic.even),
        seed,
    })
}

/// Index into `1-2, 1-4, 3-2, 3-4` from one uniform draw.
fn draw_compound(j: &JointDistribution, rng: &mut CasinoRng) -> usize {
    let u = rng.uniform();
    let mut cum = 0.0;
    for (i, w) in j.as_array().iter().enumerate() {
        cum += w;
        if u < cum {
            return i;
        }
    }
    // rounding left u above the final cumulative sum; take the last supported strategy
    j.as_array().iter().rposition(|&w| w > 0.0).unwrap_or(3)
}

/// Classical play where each player draws a compound strategy from an
/// arbitrary joint distribution (one uniform per player, Alice first).
/// Correlation between desks is allowed here, unlike the curve-constrained game.
pub fn simulate_joint(
    c: &PayoffCoefficients,
    alice: &JointDistribution,
    bob: &JointDistribution,
    rounds: u64,
    seed: u64,
) -> Result<SimReport> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    let mut rng = CasinoRng::from_seed(seed);
    let mut acc = Running::default();
    let as_actions = |s: usize| (s & 0b10 == 0, s & 0b01 == 0);
    for _ in 0..rounds {
        let a = draw_compound(alice, &mut rng);
        let b = draw_compound(bob, &mut rng);
        acc.push(&settle(c, as_actions(a), as_actions(b)));
    }
    let pa = crate::game::marginals(alice);
    let pb = crate::game::marginals(bob);
    let analytic = scalar_payoff(c, &pa, &pb);
    Ok(SimReport {
        rounds,
        empirical_mean: acc.mean,
        std_error: acc.std_error(),
        analytic_mean: bilinear_payoff(&classical_matrix(c), alice, bob),
        per_desk_means: (acc.odd, acc.even),
        analytic_per_desk: (analytic.odd, analytic.even),
        seed,
    })
}
