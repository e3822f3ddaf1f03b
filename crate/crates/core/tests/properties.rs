use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use numindex::numrange::{constraint_row, numerical_radius_hilbert};
use numindex::point::dot;
use numindex::{
    koethe_dual, lift_operator, numerical_radius_exact, numerical_radius_sampled, operator_norm,
    sum_space, NormSpace, OperatorMatrix,
};

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

fn op(n: usize) -> impl Strategy<Value = OperatorMatrix> {
    entries(n * n).prop_map(move |e| OperatorMatrix::new(n, e).unwrap())
}

fn nonzero(n: usize) -> impl Strategy<Value = Vec<f64>> {
    entries(n).prop_filter("nonzero", |v| v.iter().any(|a| a.abs() > 1e-3))
}

fn max_row_sum(t: &OperatorMatrix) -> f64 {
    t.rows()
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn max_col_sum(t: &OperatorMatrix) -> f64 {
    let n = t.size();
    (0..n)
        .map(|j| (0..n).map(|i| t.get(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest singular value of a 2×2 matrix.
fn sigma_max_2x2(t: &OperatorMatrix) -> f64 {
    let (a, b, c, d) = (t.get(0, 0), t.get(0, 1), t.get(1, 0), t.get(1, 1));
    let fro = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    ((fro + (fro * fro - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
}

fn spaces() -> Vec<NormSpace> {
    vec![
        NormSpace::lp(3, 1.0).unwrap(),
        NormSpace::lp(3, 2.5).unwrap(),
        NormSpace::lp(3, f64::INFINITY).unwrap(),
        NormSpace::example_3_2(),
        NormSpace::lorentz(6.0).unwrap(),
        sum_space(
            &NormSpace::lp(2, 3.0).unwrap(),
            vec![NormSpace::euclidean(2), NormSpace::lp(1, 1.0).unwrap()],
        )
        .unwrap()
        .into_space(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn radius_on_cubes_and_cross_polytopes_is_the_norm(t in op(3)) {
        let linf = NormSpace::lp(3, f64::INFINITY).unwrap();
        let l1 = NormSpace::lp(3, 1.0).unwrap();
        assert_abs_diff_eq!(numerical_radius_exact(&linf, &t).unwrap().value, max_row_sum(&t), epsilon = 1e-12);
        assert_abs_diff_eq!(numerical_radius_exact(&l1, &t).unwrap().value, max_col_sum(&t), epsilon = 1e-12);
        assert_abs_diff_eq!(operator_norm(&linf, &t).unwrap().value, max_row_sum(&t), epsilon = 1e-12);
        assert_abs_diff_eq!(operator_norm(&l1, &t).unwrap().value, max_col_sum(&t), epsilon = 1e-12);
    }

    #[test]
    fn euclidean_plane_against_angle_grid(t in op(2)) {
        let x = NormSpace::euclidean(2);
        let v = numerical_radius_hilbert(&x, &t).unwrap().value;
        let grid = (0..20_000)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 20_000.0;
                let u = [a.cos(), a.sin()];
                dot(&u, &t.apply(&u)).abs()
            })
            .fold(0.0, f64::max);
        prop_assert!(grid <= v + 1e-12);
        prop_assert!(v - grid <= 1e-6 * (1.0 + v));
        assert_abs_diff_eq!(operator_norm(&x, &t).unwrap().value, sigma_max_2x2(&t), epsilon = 1e-10);
    }

    #[test]
    fn sampled_radius_never_exceeds_exact(t in op(3), seed in 0u64..1000) {
        for x in [NormSpace::lp(3, 1.0).unwrap(), NormSpace::lp(3, f64::INFINITY).unwrap()] {
            let exact = numerical_radius_exact(&x, &t).unwrap().value;
            let sampled = numerical_radius_sampled(&x, &t, 200, seed).unwrap();
            prop_assert!(sampled.value <= exact + 1e-12);
            prop_assert!(sampled.witness.is_valid(&x, 1e-9).unwrap());
        }
    }

    #[test]
    fn radius_is_a_seminorm_below_the_norm(t in op(3), c in -4.0f64..4.0, seed in 0u64..100) {
        let x = NormSpace::example_3_3_p4();
        let t4 = OperatorMatrix::new(4, (0..16).map(|k| t.entries()[k % 9]).collect()).unwrap();
        let v = numerical_radius_exact(&x, &t4).unwrap().value;
        prop_assert!(v <= operator_norm(&x, &t4).unwrap().value + 1e-12);
        let vc = numerical_radius_exact(&x, &t4.scaled(c)).unwrap().value;
        assert_abs_diff_eq!(vc, c.abs() * v, epsilon = 1e-9 * (1.0 + v));
        let y = NormSpace::lp(3, 3.0).unwrap();
        let s = numerical_radius_sampled(&y, &t, 300, seed).unwrap().value;
        prop_assert!(s <= operator_norm(&y, &t).unwrap().value + 1e-9);
    }

    #[test]
    fn norms_are_absolute_and_monotone(v in entries(3), w in entries(3)) {
        for x in spaces() {
            let a: Vec<f64> = v.iter().map(|c| c.abs()).collect();
            let n = x.norm(&v).unwrap();
            assert_abs_diff_eq!(n, x.norm(&a).unwrap(), epsilon = 1e-12 * (1.0 + n));
            // |v| <= max(|v|, |w|) coordinatewise
            let m: Vec<f64> = v.iter().zip(&w).map(|(p, q)| p.abs().max(q.abs())).collect();
            prop_assert!(n <= x.norm(&m).unwrap() + 1e-12);
        }
    }

    #[test]
    fn closed_form_norms(v in entries(3), p in 1.0f64..20.0) {
        let [a, b, c] = [v[0], v[1], v[2]];
        let pairs = [(a * a + b * b).sqrt(), (a * a + c * c).sqrt(), (b * b + c * c).sqrt()];
        let max_pairs = pairs.iter().copied().fold(0.0, f64::max);
        assert_abs_diff_eq!(NormSpace::example_3_2().norm(&v).unwrap(), max_pairs, epsilon = 1e-12);
        let lorentz = 2f64.powf(-1.0 / p) * pairs.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p);
        let got = NormSpace::lorentz(p).unwrap().norm(&v).unwrap();
        assert_abs_diff_eq!(got, lorentz, epsilon = 1e-12 * (1.0 + lorentz));
    }

    #[test]
    fn duality_pairing(v in nonzero(3), f in nonzero(3)) {
        for x in spaces() {
            let d = x.dual_norm_estimate(&f).unwrap();
            if d.exact {
                prop_assert!(dot(&f, &v).abs() <= x.norm(&v).unwrap() * d.value * (1.0 + 1e-12));
            }
            let s = x.support_functional(&v).unwrap();
            assert_abs_diff_eq!(dot(&s.f, &s.x), 1.0, epsilon = 1e-9);
            prop_assert!(x.dual_norm(&s.f).unwrap() <= 1.0 + 1e-6);
        }
    }

    #[test]
    fn koethe_dual_of_lp_is_lq(f in nonzero(3), p in 1.1f64..8.0) {
        let q = p / (p - 1.0);
        let e = NormSpace::lp(3, p).unwrap();
        let d = koethe_dual(&e).unwrap();
        let want = f.iter().map(|c| c.abs().powf(q)).sum::<f64>().powf(1.0 / q);
        assert_abs_diff_eq!(d.norm(&f).unwrap(), want, epsilon = 1e-6 * (1.0 + want));
    }

    #[test]
    fn lifts_preserve_norm_on_polytopal_sums(t in op(2), k in 0usize..2) {
        let s = sum_space(
            &NormSpace::lp(2, 1.0).unwrap(),
            vec![NormSpace::lp(2, f64::INFINITY).unwrap(), NormSpace::lp(2, 1.0).unwrap()],
        )
        .unwrap();
        let z = s.clone().into_space();
        prop_assert!(z.is_polytopal());
        let comp = &s.components()[k];
        let lifted = lift_operator(&s, k, &t).unwrap();
        assert_abs_diff_eq!(
            operator_norm(&z, &lifted).unwrap().value,
            operator_norm(comp, &t).unwrap().value,
            epsilon = 1e-12
        );
        prop_assert!(
            numerical_radius_exact(&z, &lifted).unwrap().value
                <= numerical_radius_exact(comp, &t).unwrap().value + 1e-12
        );
    }

    #[test]
    fn constraint_rows_evaluate_the_pairing(t in op(3), v in entries(3), f in entries(3)) {
        let row = constraint_row(&v, &f);
        assert_abs_diff_eq!(dot(&row, t.entries()), dot(&f, &t.apply(&v)), epsilon = 1e-10);
    }

    #[test]
    fn serialization_round_trips(t in op(3), v in entries(3)) {
        prop_assert_eq!(OperatorMatrix::parse(&t.to_csv()).unwrap(), t);
        for x in spaces() {
            let back = NormSpace::from_json(&x.to_json().unwrap()).unwrap();
            prop_assert_eq!(back.norm(&v).unwrap(), x.norm(&v).unwrap());
        }
    }
}
