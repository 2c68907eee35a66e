use proptest::prelude::*;

use odvp::cli::spec_file::SpecFile;
use odvp::existence::{check_b, check_qs, Means};
use odvp::freeboundary::{solve_qs, RootMethod, SolveOptions};
use odvp::ledger::{check_cauchy_product, check_green_profile, Relation, Verdict};
use odvp::model::{ProblemSpec, RadialProfile, Tolerances};
use odvp::poisson::solve_profile;

fn torsion_spec(n: usize, radius: f64, c: f64, rho_max: f64) -> ProblemSpec {
    ProblemSpec::new(
        n,
        radius,
        RadialProfile::constant(1.0, radius).unwrap(),
        RadialProfile::constant_everywhere(c),
        rho_max,
        Tolerances::default(),
    )
    .unwrap()
}

fn core_polynomial() -> impl Strategy<Value = (f64, Vec<f64>)> {
    (0.5f64..2.0, prop::collection::vec(0.05f64..2.0, 1..4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// With `f = 1` on `B_R` and `g = c`, the QS radius is
    /// `(R^N / (N c))^(1/(N-1))`, so dilating `R` and `c` together by `λ`
    /// dilates `R*` by `λ`.
    #[test]
    fn qs_radius_matches_closed_form_and_dilates(
        n in 2usize..=5,
        radius in 0.5f64..2.0,
        fraction in 0.2f64..0.9,
        lambda in 0.5f64..2.0,
    ) {
        let c = fraction * radius / n as f64;
        let closed = |r: f64, c: f64| (r.powi(n as i32) / (n as f64 * c)).powf(1.0 / (n as f64 - 1.0));
        let expected = closed(radius, c);
        let spec = torsion_spec(n, radius, c, 4.0 * expected);
        let got = solve_qs(&spec, SolveOptions::default()).unwrap().critical_radius;
        prop_assert!((got - expected).abs() < 1e-8 * expected, "{got} vs {expected}");

        let scaled = torsion_spec(n, lambda * radius, lambda * c, 4.0 * lambda * expected);
        let got_scaled = solve_qs(&scaled, SolveOptions::default()).unwrap().critical_radius;
        prop_assert!((got_scaled - lambda * got).abs() < 1e-8 * lambda * expected);
    }

    #[test]
    fn illinois_agrees_with_bisection(c in 0.02f64..0.3) {
        let spec = ProblemSpec::unit_ball_constant(c);
        let solve = |method| {
            solve_qs(&spec, SolveOptions { method, ..Default::default() }).unwrap().critical_radius
        };
        prop_assert!((solve(RootMethod::Bisection) - solve(RootMethod::Illinois)).abs() < 1e-10);
    }

    /// Raising `g` can only shrink the margin of either condition.
    #[test]
    fn margins_decrease_as_g_grows(
        n in 2usize..=4,
        (radius, coeffs) in core_polynomial(),
        base in 0.01f64..1.0,
        k1 in 0.1f64..5.0,
        k2 in 0.1f64..5.0,
    ) {
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let f = RadialProfile::polynomial(coeffs, radius).unwrap();
        let g = RadialProfile::polynomial_everywhere(vec![base, 0.3 * base]);
        let spec = ProblemSpec::new(n, radius, f, g, 3.0 * radius, Tolerances::default()).unwrap();
        let low = spec.with_g(spec.g.scaled(lo));
        let high = spec.with_g(spec.g.scaled(hi));
        prop_assert!(check_b(&low).unwrap().margin >= check_b(&high).unwrap().margin);
        prop_assert!(check_qs(&low).unwrap().margin >= check_qs(&high).unwrap().margin);
    }

    #[test]
    fn means_are_ordered(values in prop::collection::vec(1e-6f64..1e6, 1..12)) {
        let means = Means::of(&values).unwrap();
        prop_assert_eq!(means.order_violation(), 0.0, "{:?}", means);
    }

    #[test]
    fn cauchy_equality_exactly_for_proportional_inputs(
        n in 2usize..=4,
        radius in 0.5f64..2.0,
        a in 0.1f64..2.0,
        k in 0.1f64..10.0,
        s in 0.5f64..3.0,
    ) {
        let tol = 1e-10;
        let f1 = RadialProfile::constant(a, radius).unwrap();
        let proportional = RadialProfile::constant(k * a, radius).unwrap();
        let eq = check_cauchy_product(&f1, &proportional, radius, n, tol).unwrap();
        prop_assert_eq!(eq.relation, Relation::Equal);
        prop_assert_eq!(eq.verdict, Verdict::Pass);

        let varying = RadialProfile::polynomial(vec![1.0, 0.0, s / (radius * radius)], radius).unwrap();
        let strict = check_cauchy_product(&f1, &varying, radius, n, tol).unwrap();
        prop_assert_eq!(strict.relation, Relation::Greater);
        prop_assert_eq!(strict.verdict, Verdict::Pass);
    }

    #[test]
    fn poisson_solution_is_nonnegative_and_satisfies_green(
        n in 2usize..=5,
        (radius, coeffs) in core_polynomial(),
        stretch in 1.0f64..3.0,
    ) {
        let f = RadialProfile::polynomial(coeffs, radius).unwrap();
        let rho = stretch * radius;
        let sol = solve_profile(&f, n, rho).unwrap();
        prop_assert!(sol.eval(rho).abs() <= 1e-14 * sol.eval(0.0).abs().max(1.0));
        for i in 0..=40 {
            let r = rho * i as f64 / 40.0;
            prop_assert!(sol.eval(r) >= -1e-14 * sol.eval(0.0), "u({r}) = {}", sol.eval(r));
        }
        prop_assert!(check_green_profile(&f, n, rho, 1e-10).unwrap().passed());
    }

    #[test]
    fn spec_files_round_trip(
        n in 2usize..=6,
        (radius, coeffs) in core_polynomial(),
        g0 in 0.001f64..1.0,
        g1 in 0.0f64..1.0,
    ) {
        let spec = ProblemSpec::new(
            n,
            radius,
            RadialProfile::polynomial(coeffs, radius).unwrap(),
            RadialProfile::polynomial_everywhere(vec![g0, g1]),
            5.0 * radius,
            Tolerances::default(),
        )
        .unwrap();
        let text = SpecFile::from_spec(&spec).to_toml();
        let back = SpecFile::parse(&text, "p").unwrap().to_spec("p").unwrap();
        prop_assert_eq!(back, spec);
    }
}
