use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use septic_bvp::analysis::{error_report, Sample};
use septic_bvp::assembly::Scheme;
use septic_bvp::basis::septic_eval;
use septic_bvp::linalg::{band_lu_solve, normal_solve, BandMatrix};
use septic_bvp::problem::{example1, manufactured, monomial, BOUNDARY_CONDITIONS};
use septic_bvp::solver::{eval_solution, solve, SolverChoice, SplineSolution};

/// `sum |alpha_j B_j^(d)(x)|`, the scale of rounding in `eval_solution`.
fn term_scale(s: &SplineSolution, x: f64, d: u32) -> f64 {
    s.alpha
        .iter()
        .enumerate()
        .map(|(c, a)| (a * septic_eval(c as i64 - 3, x, &s.grid, d).unwrap()).abs())
        .sum()
}

#[test]
fn monomials_are_reproduced() {
    for k in 0..=7 {
        let p = monomial(k).unwrap();
        for n in 8..=64 {
            let s = solve(&p, n, Scheme::LeastSquares, SolverChoice::BandLu).unwrap();
            let e = error_report(&s, &p, Sample::KnotsAndMidpoints).unwrap();
            assert!(e.max_abs_error <= 1e-6, "x^{k} n={n}: {}", e.max_abs_error);
        }
    }
}

#[test]
fn shifted_polynomial_on_wider_interval() {
    let p = manufactured(&[1.0, -2.0, 0.5, 0.0, 0.25, 0.0, -0.1, 0.01], -1.0, 2.0).unwrap();
    for scheme in [Scheme::LeastSquares, Scheme::SquareDropLast] {
        let s = solve(&p, 24, scheme, SolverChoice::BandLu).unwrap();
        let e = error_report(&s, &p, Sample::KnotsAndMidpoints).unwrap();
        assert!(e.max_abs_error <= 1e-6, "{scheme}: {}", e.max_abs_error);
    }
}

#[test]
fn boundary_values_are_reproduced() {
    let p = example1();
    for n in [16, 40, 80] {
        let s = solve(&p, n, Scheme::LeastSquares, SolverChoice::BandLu).unwrap();
        for (&(side, order), &k) in BOUNDARY_CONDITIONS.iter().zip(p.boundary_values()) {
            let v = eval_solution(&s, p.endpoint(side), order).unwrap();
            assert!(
                (v - k).abs() <= 1e-6 * k.abs().max(1.0),
                "n={n} {side:?} d={order}: {v} vs {k}"
            );
        }
    }
}

#[test]
fn solution_derivatives_are_consistent() {
    let p = example1();
    let s = solve(&p, 20, Scheme::LeastSquares, SolverChoice::BandLu).unwrap();
    let mut checked = 0;
    for &x in &[0.1234, 0.3771, 0.5555, 0.8123] {
        for d in 0..=5 {
            let exact = eval_solution(&s, x, d + 1).unwrap();
            let err = |step: f64| {
                let fd = (eval_solution(&s, x + step, d).unwrap()
                    - eval_solution(&s, x - step, d).unwrap())
                    / (2.0 * step);
                (fd - exact).abs()
            };
            let (e1, e2) = (err(4e-3), err(2e-3));
            // y^(5) is quadratic on the piece, so only rounding is left
            let noise = 1e3 * f64::EPSILON * term_scale(&s, x, d) / 2e-3;
            if e1 < noise {
                continue;
            }
            let order = (e1 / e2).log2();
            assert!(order >= 1.8, "x={x} d={d}: order {order}");
            checked += 1;
        }
    }
    assert!(checked >= 16, "{checked}");
}

#[test]
fn least_squares_and_drop_last_agree() {
    let p = example1();
    for n in [20, 40] {
        let ls = solve(&p, n, Scheme::LeastSquares, SolverChoice::BandLu).unwrap();
        let dl = solve(&p, n, Scheme::SquareDropLast, SolverChoice::BandLu).unwrap();
        let e = error_report(&ls, &p, Sample::Knots)
            .unwrap()
            .max_abs_error
            .max(error_report(&dl, &p, Sample::Knots).unwrap().max_abs_error);
        let diff = (0..=n)
            .map(|i| {
                let x = ls.grid.interior()[i];
                (eval_solution(&ls, x, 0).unwrap() - eval_solution(&dl, x, 0).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        assert!(diff <= 10.0 * e, "n={n}: {diff} vs {e}");
    }
}

#[test]
fn error_decreases_under_refinement() {
    let p = example1();
    let err = |n| {
        let s = solve(&p, n, Scheme::LeastSquares, SolverChoice::BandLu).unwrap();
        error_report(&s, &p, Sample::Knots).unwrap().max_abs_error
    };
    let (e20, e40, e80) = (err(20), err(40), err(80));
    assert!(e80 < e40 && e40 < e20, "{e20} {e40} {e80}");
}

#[test]
fn solves_are_bit_identical() {
    let p = example1();
    for solver in [SolverChoice::BandLu, SolverChoice::Dense] {
        let a = solve(&p, 40, Scheme::LeastSquares, solver).unwrap();
        let b = solve(&p, 40, Scheme::LeastSquares, solver).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.alpha), bits(&b.alpha));
    }
}

#[test]
fn normal_equations_match_band_lu_on_square_systems() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = rng.gen_range(1..=50);
        let (kl, ku) = (rng.gen_range(0..=8), rng.gen_range(0..=8));
        let mut a = BandMatrix::zeros(n, n, kl, ku);
        for i in 0..n {
            let mut off = 0.0;
            for j in a.row_span(i) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                off += v.abs();
                a.set(i, j, v).unwrap();
            }
            a.set(i, i, off + 1.0).unwrap();
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = band_lu_solve(&a, &b).unwrap();
        let y = normal_solve(&a, &b).unwrap().x;
        let norm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() <= 1e-8 * norm, "seed {seed}");
        }
    }
}
