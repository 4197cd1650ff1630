//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p qcasino-core --test acceptance`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::process::ExitCode;

use qcasino_core::equilibrium::{find_equilibrium, DEFAULT_TOL};
use qcasino_core::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = std::result::Result<String, String>;

/// Marginals straight from the trigonometric formulas, independent of the
/// library's geometry module.
fn trig_marginals(alpha: f64, theta: f64, lambda: f64) -> (f64, f64) {
    let p1 = alpha.cos().powi(2);
    let p2 = alpha.cos().powi(2) * theta.cos().powi(2)
        + alpha.sin().powi(2) * theta.sin().powi(2)
        + 2.0 * alpha.cos() * alpha.sin() * theta.cos() * theta.sin() * lambda.cos();
    (p1, p2)
}

fn random_coefficients(rng: &mut StdRng) -> PayoffCoefficients {
    PayoffCoefficients::new(
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
    )
}

fn random_spec(rng: &mut StdRng) -> GameSpec {
    let c = random_coefficients(rng);
    GameSpec::new(
        c,
        ObservableFrame::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)),
        ObservableFrame::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)),
    )
}

fn decoupled() -> GameSpec {
    GameSpec::new(
        PayoffCoefficients::new(1.0, 1.0, 1.0, 1.0),
        ObservableFrame::real(0.0),
        ObservableFrame::real(0.0),
    )
}

fn check(cond: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn operator_scalar_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let spec = random_spec(&mut rng);
        let (alpha, beta) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let (wa, wb) = (
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..2.0 * PI),
        );
        let h = build_payoff_operator(&spec);
        let quantum = expectation(
            &h,
            &StateVector::new(alpha, wa),
            &StateVector::new(beta, wb),
        )
        .map_err(|e| e.to_string())?;
        let (p1, p2) = trig_marginals(alpha, spec.alice.theta(), spec.alice.lambda());
        let (q1, q2) = trig_marginals(beta, spec.bob.theta(), spec.bob.lambda());
        let c = spec.coefficients;
        let scalar = c.c3 * p1 * (1.0 - q1)
            + c.c1 * (1.0 - p1) * q1
            + c.c4 * p2 * (1.0 - q2)
            + c.c2 * (1.0 - p2) * q2;
        worst = worst.max((quantum - scalar).abs());
    }
    check(worst < 1e-10, || format!("max |<H> - scalar| = {worst:e}"))?;
    Ok(format!(
        "max |<H> - scalar| = {worst:.2e} < 1e-10 over 1000 draws"
    ))
}

fn constraint_curve_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let (alpha, theta, lambda) = (
            rng.random_range(-PI..2.0 * PI),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
        );
        let frame = ObservableFrame::new(theta, lambda);
        let q = probabilities_from_angle(alpha, &frame);
        worst = worst.max(conic_residual(q.p1, q.p2, &frame).abs());
    }
    check(worst < 1e-10, || {
        format!("max parametric residual {worst:e}")
    })?;

    let mut coef_err = 0.0_f64;
    for k in 0..200 {
        let theta = k as f64 * PI / 200.0;
        let c = conic_coefficients(&ObservableFrame::real(theta));
        // closed-form real-case conic, term by term
        let (s, c2, s2) = (theta.sin(), (2.0 * theta).cos(), (2.0 * theta).sin());
        let want = [
            (c.a11, 1.0),
            (c.a22, 1.0),
            (2.0 * c.a12, -2.0 * c2),
            (c.b1, -(s2 * s2 - 2.0 * s * s * c2)),
            (c.b2, -2.0 * s * s),
            (c.c0, s.powi(4)),
        ];
        for (got, w) in want {
            coef_err = coef_err.max((got - w).abs());
        }
    }
    check(coef_err < 1e-12, || {
        format!("lambda=0 coefficient mismatch {coef_err:e}")
    })?;
    Ok(format!(
        "residual {worst:.2e} < 1e-10; lambda=0 coefficients within {coef_err:.2e}"
    ))
}

fn degenerate_cases() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut line_err = 0.0_f64;
    let mut diag_err = 0.0_f64;
    let mut anti_err = 0.0_f64;
    for _ in 0..1000 {
        let alpha = rng.random_range(0.0..PI);
        let theta = rng.random_range(0.0..PI);
        let q = probabilities_from_angle(alpha, &ObservableFrame::new(theta, FRAC_PI_2));
        line_err = line_err.max((q.p2 - (q.p1 * (2.0 * theta).cos() + theta.sin().powi(2))).abs());
        let lambda = rng.random_range(0.0..2.0 * PI);
        let d = probabilities_from_angle(alpha, &ObservableFrame::new(0.0, lambda));
        diag_err = diag_err.max((d.p2 - d.p1).abs());
        let a = probabilities_from_angle(alpha, &ObservableFrame::new(FRAC_PI_2, lambda));
        anti_err = anti_err.max((a.p2 - (1.0 - a.p1)).abs());
    }
    check(line_err < 1e-12, || {
        format!("lambda=pi/2 line error {line_err:e}")
    })?;
    check(diag_err < 1e-12, || {
        format!("theta=0 diagonal error {diag_err:e}")
    })?;
    check(anti_err < 1e-12, || {
        format!("theta=pi/2 anti-diagonal error {anti_err:e}")
    })?;
    for theta in [0.0, FRAC_PI_2] {
        check(
            constraint_conic(&ObservableFrame::real(theta)).is_degenerate(),
            || format!("theta={theta} not flagged degenerate"),
        )?;
    }

    let mut grad = 0.0_f64;
    for k in 1..100 {
        let c = conic_coefficients(&ObservableFrame::real(k as f64 * PI / 100.0));
        let (gx, gy) = c.gradient(0.5, 0.5);
        grad = grad.max(gx.abs()).max(gy.abs());
    }
    check(grad < 1e-12, || format!("gradient at centre {grad:e}"))?;
    Ok(format!(
        "line {line_err:.1e}, diagonal {diag_err:.1e}, anti-diagonal {anti_err:.1e}, centre gradient {grad:.1e}"
    ))
}

fn corrected_forms() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut x_err = 0.0_f64;
    let mut n = 0;
    while n < 1000 {
        let (alpha, theta) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        if theta.cos().abs() < 1e-3 {
            continue;
        }
        n += 1;
        let (p1, p2) = trig_marginals(alpha, theta, 0.0);
        let (x1, _) = geometry::axis_coordinates(p1, p2);
        x_err = x_err.max((x1 / theta.cos() - (2.0 * alpha - theta).cos()).abs());
    }
    check(x_err < 1e-12, || format!("x1 identity error {x_err:e}"))?;

    // conic with cos²λ inside the p₁ bracket vs the bracket without it
    let lambda = FRAC_PI_3;
    let mut derived = 0.0_f64;
    let mut naive = 0.0_f64;
    for _ in 0..1000 {
        let (alpha, theta) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let (p1, p2) = trig_marginals(alpha, theta, lambda);
        derived = derived.max(conic_residual(p1, p2, &ObservableFrame::new(theta, lambda)).abs());
        let (s, c2, s2) = (theta.sin(), (2.0 * theta).cos(), (2.0 * theta).sin());
        let r = p1 * p1 * (c2 * c2 + s2 * s2 * lambda.cos().powi(2)) + p2 * p2
            - 2.0 * p1 * p2 * c2
            - p1 * (s2 * s2 - 2.0 * s * s * c2)
            - 2.0 * p2 * s * s
            + s.powi(4);
        naive = naive.max(r.abs());
    }
    check(derived < 1e-10, || {
        format!("derived conic residual {derived:e}")
    })?;
    check(naive > 1e-3, || {
        format!("bracket without cos^2 lambda unexpectedly fits ({naive:e})")
    })?;
    Ok(format!(
        "x1 identity {x_err:.1e}; corrected conic {derived:.1e}; bracket without cos^2 lambda reaches {naive:.3}"
    ))
}

fn equilibrium_sanity() -> Outcome {
    let spec = decoupled();
    let r = find_equilibrium(&spec, 256, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let grid_cert = verify_saddle(&spec, &r, 512, 1e-6);
    check((r.value - 1.0).abs() < 1e-6, || {
        format!("decoupled value {}", r.value)
    })?;
    check(r.certificate < 1e-6 && grid_cert.certified, || {
        format!("certificate {} / grid {}", r.certificate, grid_cert.bound)
    })?;
    check((r.min_max - r.max_min).abs() < 1e-6, || {
        format!("gap {}", r.min_max - r.max_min)
    })?;

    let mut rng = StdRng::seed_from_u64(5);
    let n = 512;
    let mut worst_ratio = 0.0_f64;
    let mut saddles = 0;
    for _ in 0..20 {
        let spec = random_spec(&mut rng);
        let grid = grid_saddle_oracle(&spec, n).map_err(|e| e.to_string())?;
        let refined = refine_saddle(&spec, (grid.alpha_star, grid.beta_star), DEFAULT_TOL);
        check(grid.max_min <= grid.min_max, || {
            format!("grid minimax violated {grid:?}")
        })?;
        check(refined.max_min <= refined.min_max, || {
            format!("refined minimax violated {refined:?}")
        })?;
        check(!refined.has(EquilibriumFlag::NoConvergence), || {
            format!("no convergence {refined:?}")
        })?;
        let bound = 2.0 * spec.coefficients.abs_sum() * PI / n as f64;
        let mut diffs = vec![
            (refined.max_min - grid.max_min).abs(),
            (refined.min_max - grid.min_max).abs(),
        ];
        if refined.is_saddle() {
            saddles += 1;
            diffs.push((refined.value - grid.value).abs());
        }
        for d in diffs {
            check(d <= bound, || {
                format!("refined vs grid differ by {d:e} > {bound:e} for {spec:?}")
            })?;
            worst_ratio = worst_ratio.max(d / bound);
        }
    }
    Ok(format!(
        "decoupled value {:.12}, cert {:.1e}; 20 random specs ({saddles} with saddles) within {:.0}% of the 2x Lipschitz bound",
        r.value,
        r.certificate,
        100.0 * worst_ratio
    ))
}

fn classical_embedding() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    let mut round_trip = 0.0_f64;
    for _ in 0..1000 {
        let c = random_coefficients(&mut rng);
        let p = ProbabilityQuadruple::new(rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0))
            .unwrap();
        let q = ProbabilityQuadruple::new(rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0))
            .unwrap();
        let classical = bilinear_payoff(
            &classical_matrix(&c),
            &independent_joint(&p),
            &independent_joint(&q),
        );
        worst = worst.max((classical - scalar_payoff(&c, &p, &q).total).abs());
        let back = marginals(&independent_joint(&p));
        for (a, b) in back.as_array().iter().zip(p.as_array()) {
            round_trip = round_trip.max((a - b).abs());
        }
    }
    check(worst < 1e-12, || format!("bilinear vs scalar {worst:e}"))?;
    check(round_trip <= 4.0 * f64::EPSILON, || {
        format!("marginal round trip {round_trip:e}")
    })?;

    // reference table cells as coefficient index sets, rows/cols 1-2, 1-4, 3-2, 3-4
    let reference: [[&[usize]; 4]; 4] = [
        [&[], &[2], &[1], &[1, 2]],
        [&[4], &[], &[1, 4], &[1]],
        [&[3], &[3, 2], &[], &[2]],
        [&[3, 4], &[3], &[4], &[]],
    ];
    let swap = |i: usize| [0, 3, 4, 1, 2][i];
    for _ in 0..100 {
        let c = random_coefficients(&mut rng);
        let cs = [0.0, c.c1, c.c2, c.c3, c.c4];
        let rule = classical_matrix_with(&c, LabelConvention::PayoffRule);
        let table = classical_matrix_with(&c, LabelConvention::Table1);
        #[allow(clippy::needless_range_loop)]
        for r in 0..4 {
            for col in 0..4 {
                let t: f64 = reference[r][col].iter().map(|&i| cs[i]).sum();
                let s: f64 = reference[r][col].iter().map(|&i| cs[swap(i)]).sum();
                check(table.0[r][col] == t && rule.0[r][col] == s, || {
                    format!(
                        "cell ({r},{col}): table {} vs {t}, rule {} vs {s}",
                        table.0[r][col], rule.0[r][col]
                    )
                })?;
            }
        }
    }
    Ok(format!(
        "bilinear vs scalar {worst:.1e}; marginal round trip {round_trip:.1e}; conventions differ by c1<->c3, c2<->c4"
    ))
}

fn monte_carlo() -> Outcome {
    let cases = [
        (decoupled(), FRAC_PI_4, FRAC_PI_4, 1u64),
        (
            GameSpec::new(
                PayoffCoefficients::new(1.0, 2.0, 3.0, 4.0),
                ObservableFrame::new(PI / 6.0, 0.5),
                ObservableFrame::real(FRAC_PI_3),
            ),
            0.4,
            1.1,
            2,
        ),
        (
            GameSpec::new(
                PayoffCoefficients::new(-1.0, 0.5, 2.0, -3.0),
                ObservableFrame::new(1.0, FRAC_PI_2),
                ObservableFrame::new(2.3, 4.0),
            ),
            2.0,
            0.7,
            3,
        ),
    ];
    let mut lines = Vec::new();
    for (spec, alpha, beta, seed) in cases {
        let a = simulate(&spec, alpha, beta, 1_000_000, seed).map_err(|e| e.to_string())?;
        let b = simulate(&spec, alpha, beta, 1_000_000, seed).map_err(|e| e.to_string())?;
        check(
            a.empirical_mean.to_bits() == b.empirical_mean.to_bits() && a == b,
            || format!("seed {seed}: reruns differ"),
        )?;
        let z = a.z_score();
        check(z <= 4.0, || {
            format!("seed {seed}: |mean - analytic| = {z:.2} SE")
        })?;
        lines.push(format!("{z:.2}SE"));
    }
    Ok(format!(
        "deviations {}; reruns bit-identical",
        lines.join(", ")
    ))
}

fn derivatives() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let step = 1e-6;
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let spec = random_spec(&mut rng);
        let (a, b) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let (da, db) = payoff_gradient(&spec, a, b);
        let fa = (payoff_surface(&spec, a + step, b) - payoff_surface(&spec, a - step, b))
            / (2.0 * step);
        let fb = (payoff_surface(&spec, a, b + step) - payoff_surface(&spec, a, b - step))
            / (2.0 * step);
        worst = worst.max((da - fa).abs()).max((db - fb).abs());
    }
    check(worst < 1e-6, || format!("max analytic vs FD {worst:e}"))?;
    Ok(format!(
        "max |analytic - central FD| = {worst:.1e} < 1e-6 at 100 points"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "1 payoff operator equals scalar payoff",
            operator_scalar_equivalence,
        ),
        ("2 constraint curve oracle", constraint_curve_oracle),
        ("3 degenerate curves", degenerate_cases),
        ("4 corrected axis and conic forms", corrected_forms),
        ("5 equilibrium sanity", equilibrium_sanity),
        ("6 classical embedding", classical_embedding),
        ("7 Monte-Carlo convergence", monte_carlo),
        ("8 analytic derivatives", derivatives),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
