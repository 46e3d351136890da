use num_complex::Complex64;
use proptest::prelude::*;

use riemann_factor::boundary::{Piece, PiecewiseReal};
use riemann_factor::cauchy::AnalyticFactor;
use riemann_factor::factorization::{
    factorize, joukowski, joukowski_inverse, split_m, synthesize_n, JoukowskiProfile,
};
use riemann_factor::numbers::{Level, Point};
use riemann_factor::sets::{validate_sigma, Interval, RealSet};
use riemann_factor::verification::{certification_grid, residual_check};

// piecewise data with rational breakpoints and values that are multiples of π/6 or plain reals
fn line_data(max_pieces: usize) -> impl Strategy<Value = PiecewiseReal> {
    (
        prop::collection::btree_set(-48i64..48, 2..=max_pieces + 1),
        prop::collection::vec((-6i64..=6, -3.0f64..3.0, any::<bool>()), max_pieces),
    )
        .prop_map(|(cuts, vals)| {
            let cuts: Vec<i64> = cuts.into_iter().collect();
            let pieces = cuts
                .windows(2)
                .zip(vals)
                .map(|(w, (k, x, exact))| {
                    let v = if exact { Level::pi_frac(k, 6) } else { Level::Real(x) };
                    Piece::new(Point::ratio(w[0], 8), Point::ratio(w[1], 8), v)
                })
                .collect();
            PiecewiseReal::new(pieces).unwrap()
        })
}

fn off_line() -> impl Strategy<Value = Complex64> {
    (-5.0f64..5.0, 0.05f64..4.0, any::<bool>())
        .prop_map(|(x, y, up)| Complex64::new(x, if up { y } else { -y }))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn v_is_an_involution(g in line_data(5)) {
        prop_assert_eq!(g.v_func().unwrap().v_func().unwrap(), g);
    }

    #[test]
    fn line_factor_is_multiplicative(g in line_data(4), h in line_data(4), z in off_line()) {
        let lhs = AnalyticFactor::line(g.add(&h)).eval(z).unwrap();
        let rhs = AnalyticFactor::line(g).eval(z).unwrap() * AnalyticFactor::line(h).eval(z).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn line_factor_under_inversion_and_conjugation(g in line_data(5), z in off_line()) {
        let p = AnalyticFactor::line(g.clone());
        let q = AnalyticFactor::line(g.v_func().unwrap().neg());
        let w = z.inv();
        prop_assume!(w.im.abs() > 1e-3);
        prop_assert!(rel(p.eval(w).unwrap(), q.eval(z).unwrap()) < 1e-10);
        prop_assert!(rel(p.eval(z.conj()).unwrap(), p.eval(z).unwrap().conj()) < 1e-12);
    }

    #[test]
    fn synthesized_n_is_symmetric(eta in line_data(6), z in off_line(), scale in 0.1f64..10.0) {
        prop_assume!((z.norm() - 1.0).abs() > 1e-3);
        let n = synthesize_n(&eta, scale);
        let v = n.eval(z).unwrap();
        prop_assert!(rel(n.eval(z.inv()).unwrap(), v) < 1e-12);
        prop_assert!(rel(n.eval(z.conj()).unwrap(), v.conj()) < 1e-12);
    }

    #[test]
    fn joukowski_inverse_is_outer(z in off_line()) {
        let w = joukowski_inverse(z).unwrap();
        prop_assert!(w.norm() > 1.0);
        prop_assert!((joukowski(w) - z).norm() < 1e-12 * z.norm().max(1.0));
    }

    #[test]
    fn split_is_odd(eta in line_data(6)) {
        let s = split_m(&JoukowskiProfile::new(eta, 1.0).unwrap()).unwrap();
        prop_assert_eq!(s.nu.v_func().unwrap(), s.nu.neg());
        prop_assert!(s.nu_hat0.is_zero() || s.nu_hat0.is_odd());
    }
}

fn ratio_point(n: i64, d: i64) -> Point {
    Point::ratio(n, d)
}

// η compatible with Ω₁ = [1/2, 3/4], Ω₂ = [1/4, 1/3] ∪ [3, 4]: integer
// multiples of π on the images of the Δ components, anything in π/6 steps elsewhere
fn compatible_eta() -> impl Strategy<Value = PiecewiseReal> {
    (
        prop::collection::vec(-6i64..=6, 3),
        prop::collection::vec(-6i64..=6, 3),
        prop::collection::vec(-2i64..=2, 3),
        -6i64..=6,
    )
        .prop_map(|(cut, omega, plateau, extra)| {
            let k = |n: i64| Level::pi_frac(n, 6);
            let pieces = vec![
                Piece::new(Point::NegInf, ratio_point(-2, 1), Level::pi_int(plateau[2])),
                Piece::new(ratio_point(-3, 2), ratio_point(1, 2), k(cut[0])),
                Piece::new(ratio_point(1, 2), ratio_point(3, 2), k(cut[1])),
                Piece::new(ratio_point(3, 2), ratio_point(2, 1), k(cut[2])),
                Piece::new(ratio_point(2, 1), ratio_point(25, 12), Level::pi_int(plateau[0])),
                Piece::new(ratio_point(25, 12), ratio_point(5, 2), k(omega[0])),
                Piece::new(ratio_point(5, 2), ratio_point(10, 3), Level::pi_int(plateau[1])),
                Piece::new(ratio_point(10, 3), ratio_point(15, 4), k(omega[1])),
                Piece::new(ratio_point(15, 4), ratio_point(17, 4), k(omega[2] + extra)),
                Piece::new(ratio_point(17, 4), Point::PosInf, Level::pi_int(plateau[2])),
            ];
            PiecewiseReal::new(pieces).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn residual_on_random_compatible_data(eta in compatible_eta(), scale in 0.2f64..5.0) {
        let sigma = validate_sigma(
            RealSet::new(vec![Interval::ratio((1, 2), (3, 4))]).unwrap(),
            RealSet::new(vec![Interval::ratio((1, 4), (1, 3)), Interval::ratio((3, 1), (4, 1))]).unwrap(),
        )
        .unwrap();
        let profile = JoukowskiProfile::new(eta, scale).unwrap();
        let res = factorize(&profile, &sigma, &Default::default()).unwrap();
        let n = profile.n_factor();
        let grid = certification_grid(
            50, 11, (-4.0, 4.0), (-4.0, 4.0),
            &[res.assembled_r.singular_support(), n.singular_support()], 0.05,
        );
        let rep = residual_check(&n, &res.assembled_r, &grid, 1e-6).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
    }
}
