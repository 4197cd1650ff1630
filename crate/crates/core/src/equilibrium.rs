//! Saddle points of the constrained quantum game and of its classical 4×4 embedding.
//!
//! Alice picks `α` and maximises, Bob picks `β` and minimises the payoff
//! `h(α, β)`. For a fixed opponent angle, `h` is a pure harmonic in twice
//! the player's own angle,
//!
//! ```text
//! h(α, β) = m + a cos 2α + b sin 2α,
//! ```
//!
//! so each best response is exact: the optimum is `m ± √(a² + b²)`. That makes
//! the lower envelope `f(α) = min_β h` and the upper envelope
//! `g(β) = max_α h` cheap to evaluate exactly. The refinement works on those
//! envelopes. The grid oracle evaluates `h` directly and never uses the
//! closed form.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ClassicalMatrix, GameSpec};
use crate::geometry::probabilities_from_angle;
use crate::quantum::{scalar_payoff, wrap, ObservableFrame};

pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Half-width of the window scanned around the current iterate in each
/// one-dimensional search.
const REFINE_BRACKET: f64 = PI / 64.0;
const REFINE_SCAN: usize = 33;
const MAX_ROUNDS: usize = 60;
const GOLDEN_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumFlag {
    /// `max_min < min_max`: no pure-angle saddle exists.
    NoSaddle,
    /// Refinement hit its round limit; the best iterate is reported.
    NoConvergence,
    /// A saddle was found but the payoff gradient there is not small.
    NotStationary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub alpha_star: f64,
    pub beta_star: f64,
    /// `h(α*, β*)`; always in `[max_min, min_max]`.
    pub value: f64,
    pub max_min: f64,
    pub min_max: f64,
    /// `max(0, max_α h(α, β*) − value, value − min_β h(α*, β))`.
    pub certificate: f64,
    pub flags: Vec<EquilibriumFlag>,
}

impl EquilibriumResult {
    pub fn has(&self, flag: EquilibriumFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn is_saddle(&self) -> bool {
        !self.has(EquilibriumFlag::NoSaddle)
    }
}

/// `h(α, β)` with both players on their constraint curves.
pub fn payoff_surface(spec: &GameSpec, alpha: f64, beta: f64) -> f64 {
    let p = probabilities_from_angle(alpha, &spec.alice);
    let q = probabilities_from_angle(beta, &spec.bob);
    scalar_payoff(&spec.coefficients, &p, &q).total
}

/// `(dp₁/dα, dp₂/dα)` along a player's curve.
fn marginal_derivatives(angle: f64, frame: &ObservableFrame) -> (f64, f64) {
    let (s2, c2) = (2.0 * angle).sin_cos();
    (-s2, -s2 * frame.cos_2theta() + c2 * frame.cross_gain())
}

/// Analytic `(∂h/∂α, ∂h/∂β)`.
pub fn payoff_gradient(spec: &GameSpec, alpha: f64, beta: f64) -> (f64, f64) {
    let c = spec.coefficients;
    let p = probabilities_from_angle(alpha, &spec.alice);
    let q = probabilities_from_angle(beta, &spec.bob);
    let (dp1, dp2) = marginal_derivatives(alpha, &spec.alice);
    let (dq1, dq2) = marginal_derivatives(beta, &spec.bob);
    let d_alpha = dp1 * (c.c3 * q.p3 - c.c1 * q.p1) + dp2 * (c.c4 * q.p4 - c.c2 * q.p2);
    let d_beta = dq1 * (c.c1 * p.p3 - c.c3 * p.p1) + dq2 * (c.c2 * p.p4 - c.c4 * p.p2);
    (d_alpha, d_beta)
}

/// `offset + cos_part · cos 2x + sin_part · sin 2x`.
#[derive(Debug, Clone, Copy)]
struct Harmonic {
    offset: f64,
    cos_part: f64,
    sin_part: f64,
}

impl Harmonic {
    /// Payoff as a function of the player's angle, given the coefficients
    /// `a` of `p₁` and `b` of `p₂` in an affine payoff `base + a p₁ + b p₂`.
    fn along(frame: &ObservableFrame, base: f64, a: f64, b: f64) -> Self {
        // p₁ = ½(1 + cos 2x),  p₂ = ½(1 + cos 2θ cos 2x + sin 2θ cos λ sin 2x)
        Self {
            offset: base + 0.5 * (a + b),
            cos_part: 0.5 * (a + b * frame.cos_2theta()),
            sin_part: 0.5 * b * frame.cross_gain(),
        }
    }

    fn amplitude(&self) -> f64 {
        self.cos_part.hypot(self.sin_part)
    }

    fn argmax(&self) -> f64 {
        wrap(0.5 * self.sin_part.atan2(self.cos_part), PI)
    }

    fn argmin(&self) -> f64 {
        wrap(0.5 * (-self.sin_part).atan2(-self.cos_part), PI)
    }
}

/// `h(α, ·)` as a harmonic in `β`.
fn bob_harmonic(spec: &GameSpec, alpha: f64) -> Harmonic {
    let c = spec.coefficients;
    let p = probabilities_from_angle(alpha, &spec.alice);
    // h = c₃p₁ + c₄p₂ + q₁(c₁p₃ − c₃p₁) + q₂(c₂p₄ − c₄p₂)
    Harmonic::along(
        &spec.bob,
        c.c3 * p.p1 + c.c4 * p.p2,
        c.c1 * p.p3 - c.c3 * p.p1,
        c.c2 * p.p4 - c.c4 * p.p2,
    )
}

/// `h(·, β)` as a harmonic in `α`.
fn alice_harmonic(spec: &GameSpec, beta: f64) -> Harmonic {
    let c = spec.coefficients;
    let q = probabilities_from_angle(beta, &spec.bob);
    // h = c₁q₁ + c₂q₂ + p₁(c₃q₃ − c₁q₁) + p₂(c₄q₄ − c₂q₂)
    Harmonic::along(
        &spec.alice,
        c.c1 * q.p1 + c.c2 * q.p2,
        c.c3 * q.p3 - c.c1 * q.p1,
        c.c4 * q.p4 - c.c2 * q.p2,
    )
}

/// Bob's exact best reply to `alpha` and the payoff it yields.
pub fn bob_best_response(spec: &GameSpec, alpha: f64) -> (f64, f64) {
    let h = bob_harmonic(spec, alpha);
    (h.argmin(), h.offset - h.amplitude())
}

/// Alice's exact best reply to `beta` and the payoff it yields.
pub fn alice_best_response(spec: &GameSpec, beta: f64) -> (f64, f64) {
    let h = alice_harmonic(spec, beta);
    (h.argmax(), h.offset + h.amplitude())
}

/// Exhaustive `n × n` evaluation of `h` on `[0, π)²`.
///
/// Returns the grid max-min and min-max, with `α*` the first row attaining
/// the max-min and `β*` the first column attaining the min-max.
pub fn grid_saddle_oracle(spec: &GameSpec, n: usize) -> Result<EquilibriumResult> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be >= 8, got {n}"
        )));
    }
    let step = PI / n as f64;
    let ps: Vec<_> = (0..n)
        .map(|i| probabilities_from_angle(i as f64 * step, &spec.alice))
        .collect();
    let qs: Vec<_> = (0..n)
        .map(|j| probabilities_from_angle(j as f64 * step, &spec.bob))
        .collect();
    let c = spec.coefficients;
    let grid: Vec<Vec<f64>> = ps
        .par_iter()
        .map(|p| qs.iter().map(|q| scalar_payoff(&c, p, q).total).collect())
        .collect();

    let row_min: Vec<f64> = grid
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let col_max: Vec<f64> = (0..n)
        .map(|j| {
            grid.iter()
                .map(|row| row[j])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let tie = 1e-12 * (1.0 + c.abs_sum());
    let i_star = first_within(&row_min, tie, |a, b| a > b);
    let j_star = first_within(&col_max, tie, |a, b| a < b);

    let max_min = row_min[i_star];
    let min_max = col_max[j_star];
    let value = grid[i_star][j_star];
    let certificate = (min_max - value).max(value - max_min).max(0.0);

    let mut flags = Vec::new();
    // On a grid a true saddle still shows a gap of up to one Lipschitz step.
    if min_max - max_min > c.abs_sum() * step + 1e-12 {
        flags.push(EquilibriumFlag::NoSaddle);
    }
    Ok(EquilibriumResult {
        alpha_star: i_star as f64 * step,
        beta_star: j_star as f64 * step,
        value,
        max_min,
        min_max,
        certificate,
        flags,
    })
}

/// First index whose value is within `tie` of the best one, so rounding
/// noise does not override the smallest-angle tie-break.
fn first_within(xs: &[f64], tie: f64, better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = xs[0];
    for &x in &xs[1..] {
        if better(x, best) {
            best = x;
        }
    }
    xs.iter()
        .position(|&x| (x - best).abs() <= tie)
        .unwrap_or(0)
}

/// Dense scan of `[center − half, center + half]` followed by golden-section
/// search around the best sample. Returns the best point seen.
fn local_maximize(f: impl Fn(f64) -> f64, center: f64, half: f64) -> (f64, f64) {
    let spacing = 2.0 * half / (REFINE_SCAN - 1) as f64;
    let mut best = (center, f(center));
    for k in 0..REFINE_SCAN {
        let x = center - half + k as f64 * spacing;
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best.0 - spacing, best.0 + spacing);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if hi - lo < 1e-14 * (1.0 + best.0.abs()) {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        for (x, fx) in [(x1, f1), (x2, f2)] {
            if fx > best.1 {
                best = (x, fx);
            }
        }
    }
    best
}

/// Alternating local searches from `seed`: `α` climbs the lower envelope
/// `min_β h(α, β)`, `β` descends the upper envelope `max_α h(α, β)`. Stops
/// once neither envelope value moves by more than `tol` in a round.
pub fn refine_saddle(spec: &GameSpec, seed: (f64, f64), tol: f64) -> EquilibriumResult {
    let lower = |a: f64| bob_best_response(spec, a).1;
    let upper = |b: f64| alice_best_response(spec, b).1;

    let (mut alpha, mut beta) = seed;
    let mut max_min = lower(alpha);
    let mut min_max = upper(beta);
    let mut converged = false;
    for round in 0..MAX_ROUNDS {
        let (prev_lo, prev_hi) = (max_min, min_max);

        let (a, fa) = local_maximize(lower, alpha, REFINE_BRACKET);
        if fa > max_min {
            alpha = a;
            max_min = fa;
        }
        let (b, neg_gb) = local_maximize(|b| -upper(b), beta, REFINE_BRACKET);
        if -neg_gb < min_max {
            beta = b;
            min_max = -neg_gb;
        }

        if round > 0 && (max_min - prev_lo).abs() < tol && (min_max - prev_hi).abs() < tol {
            converged = true;
            break;
        }
    }

    let alpha_star = wrap(alpha, PI);
    let beta_star = wrap(beta, PI);
    let value = payoff_surface(spec, alpha_star, beta_star);
    // min_β h(α*, ·) ≤ h(α*, β*) ≤ max_α h(·, β*); enforce it against rounding
    let max_min = max_min.min(value);
    let min_max = min_max.max(value);
    let certificate = (min_max - value).max(value - max_min).max(0.0);

    let scale = 1.0 + spec.coefficients.abs_sum();
    let mut flags = Vec::new();
    if min_max - max_min > 100.0 * tol * scale {
        flags.push(EquilibriumFlag::NoSaddle);
    } else {
        let (da, db) = payoff_gradient(spec, alpha_star, beta_star);
        if da.abs().max(db.abs()) > 1e-6 * scale {
            flags.push(EquilibriumFlag::NotStationary);
        }
    }
    if !converged {
        flags.push(EquilibriumFlag::NoConvergence);
    }
    EquilibriumResult {
        alpha_star,
        beta_star,
        value,
        max_min,
        min_max,
        certificate,
        flags,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleCertificate {
    pub bound: f64,
    pub certified: bool,
}

/// Saddle violation of `result` measured on an independent `n`-point grid
/// in each angle.
pub fn verify_saddle(
    spec: &GameSpec,
    result: &EquilibriumResult,
    n: usize,
    tol: f64,
) -> SaddleCertificate {
    let step = PI / n.max(1) as f64;
    let v = result.value;
    let mut best_alice = f64::NEG_INFINITY;
    let mut best_bob = f64::INFINITY;
    for k in 0..n {
        let x = k as f64 * step;
        best_alice = best_alice.max(payoff_surface(spec, x, result.beta_star));
        best_bob = best_bob.min(payoff_surface(spec, result.alpha_star, x));
    }
    let bound = (best_alice - v).max(v - best_bob).max(0.0);
    SaddleCertificate {
        bound,
        certified: bound <= tol,
    }
}

/// Grid oracle, then refinement from its saddle candidate.
pub fn find_equilibrium(spec: &GameSpec, grid_n: usize, tol: f64) -> Result<EquilibriumResult> {
    let coarse = grid_saddle_oracle(spec, grid_n)?;
    Ok(refine_saddle(
        spec,
        (coarse.alpha_star, coarse.beta_star),
        tol,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSolution {
    pub alice_mixed: Vec<f64>,
    pub bob_mixed: Vec<f64>,
    pub value: f64,
    /// More than one optimal support pair was found.
    pub degenerate: bool,
}

/// Optimal mixed strategies of the 4×4 game by support enumeration.
pub fn solve_classical(m: &ClassicalMatrix, tol: f64) -> Result<ClassicalSolution> {
    let rows: Vec<Vec<f64>> = m.rows().iter().map(|r| r.to_vec()).collect();
    solve_zero_sum(&rows, tol)
}

/// Value and optimal strategies of a zero-sum matrix game (row player
/// maximises) by enumerating equal-size support pairs.
///
/// Every finite game has an extreme optimal pair supported on a square
/// submatrix whose bordered system is nonsingular, so the enumeration always
/// finds one.
pub fn solve_zero_sum(m: &[Vec<f64>], tol: f64) -> Result<ClassicalSolution> {
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    if n_rows == 0 || n_cols == 0 || m.iter().any(|r| r.len() != n_cols) {
        return Err(Error::InvalidArgument(
            "payoff matrix must be non-empty and rectangular".into(),
        ));
    }
    if n_rows > 16 || n_cols > 16 {
        return Err(Error::InvalidArgument(
            "support enumeration is limited to 16 strategies".into(),
        ));
    }
    if m.iter().flatten().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("payoff matrix"));
    }
    let scale = m.iter().flatten().fold(1.0_f64, |acc, e| acc.max(e.abs()));
    let slack = tol * scale;

    let mut found: Option<ClassicalSolution> = None;
    let mut distinct = 0usize;
    for row_mask in 1u32..(1 << n_rows) {
        for col_mask in 1u32..(1 << n_cols) {
            if row_mask.count_ones() != col_mask.count_ones() {
                continue;
            }
            let rs = members(row_mask);
            let cs = members(col_mask);
            let Some((x_s, v)) = equalizer(&rs, &cs, |r, c| m[r][c]) else {
                continue;
            };
            let Some((y_t, _)) = equalizer(&cs, &rs, |c, r| m[r][c]) else {
                continue;
            };
            if x_s.iter().chain(&y_t).any(|&w| w < -slack) {
                continue;
            }
            let x = scatter(&rs, &x_s, n_rows);
            let y = scatter(&cs, &y_t, n_cols);
            let guaranteed = (0..n_cols)
                .map(|c| (0..n_rows).map(|r| x[r] * m[r][c]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            let conceded = (0..n_rows)
                .map(|r| (0..n_cols).map(|c| m[r][c] * y[c]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            if guaranteed < v - slack || conceded > v + slack {
                continue;
            }
            match &found {
                None => {
                    distinct = 1;
                    found = Some(ClassicalSolution {
                        alice_mixed: x,
                        bob_mixed: y,
                        value: v,
                        degenerate: false,
                    });
                }
                Some(first) => {
                    let same =
                        |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(u, w)| (u - w).abs() <= slack);
                    if !same(&first.alice_mixed, &x) || !same(&first.bob_mixed, &y) {
                        distinct += 1;
                    }
                }
            }
        }
    }
    let mut sol = found.ok_or_else(|| Error::InvalidArgument("no optimal support found".into()))?;
    sol.degenerate = distinct > 1;
    Ok(sol)
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

fn scatter(idx: &[usize], w: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (&i, &wi) in idx.iter().zip(w) {
        out[i] = wi.max(0.0);
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= total);
    out
}

/// Weights `w` on `own` that make every opponent strategy in `other` pay the
/// same `v`, with `Σw = 1`. `entry(own, other)` reads the payoff.
fn equalizer(
    own: &[usize],
    other: &[usize],
    entry: impl Fn(usize, usize) -> f64,
) -> Option<(Vec<f64>, f64)> {
    let k = own.len();
    let dim = k + 1;
    let mut a = vec![vec![0.0; dim + 1]; dim];
    for (eq, &o) in other.iter().enumerate() {
        for (var, &s) in own.iter().enumerate() {
            a[eq][var] = entry(s, o);
        }
        a[eq][k] = -1.0;
    }
    a[k][..k].fill(1.0);
    a[k][dim] = 1.0;
    let sol = gauss_solve(a)?;
    let v = sol[k];
    Some((sol[..k].to_vec(), v))
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn gauss_solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    let scale = a.iter().flatten().fold(1.0_f64, |acc, e| acc.max(e.abs()));
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let factor = row[col] / pivot_row[col];
                if factor != 0.0 {
                    for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= factor * p;
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}
