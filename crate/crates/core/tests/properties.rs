use approx::assert_abs_diff_eq;
use krawtchouk::composition::{composition_transition, CompositionProcess};
use krawtchouk::io::SpecFile;
use krawtchouk::mvk::{mvk_eval, mvk_eval_explicit, reproducing_kernel, Basis, BasisRecord, Composition, MultiIndex};
use krawtchouk::polys::{explicit, krawtchouk_eval, krawtchouk_norm, krawtchouk_symmetric, KrawtchoukParams, TrialSequence};
use krawtchouk::scalar::rat;
use krawtchouk::sim::generator_expm;
use krawtchouk::spectral::EigenForm;
use krawtchouk::{Rational, Scalar};
use proptest::prelude::*;

fn binomial(n: usize, k: usize) -> Rational {
    (0..k).fold(rat(1, 1), |acc, i| acc * rat((n - i) as i64, (i + 1) as i64))
}

/// A probability vector of `d` positive rationals with a common
/// denominator.
fn weights(d: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1i64..6, d).prop_map(|w| {
        let total: i64 = w.iter().sum();
        w.into_iter().map(|v| rat(v, total)).collect()
    })
}

fn composition(total: usize, parts: usize) -> impl Strategy<Value = Composition> {
    let all = Composition::all(total, parts);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn ehrenfest_pair(p: (i64, i64)) -> CompositionProcess<f64> {
    let text = format!(r#"{{"base": {{"family": "ehrenfest", "params": {{"N": 2, "p": "{}/{}"}}}}, "N": 2}}"#, p.0, p.1);
    match SpecFile::parse(&text).unwrap() {
        SpecFile::Composition(c) => c.build().unwrap(),
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn krawtchouk_series_matches_explicit(big_n in 1usize..9, a in 1i64..9, n in 0usize..9, x in 0usize..9) {
        let p = rat(a, 10);
        let params = KrawtchoukParams::new(big_n, p.clone()).unwrap();
        let (n, x) = (n.min(big_n), x.min(big_n));
        prop_assert_eq!(krawtchouk_eval(n, x, &params).unwrap(), explicit::krawtchouk(n, x, big_n, &p));
    }

    #[test]
    fn krawtchouk_orthogonality_exact(big_n in 1usize..7, a in 1i64..7, m in 0usize..7, n in 0usize..7) {
        let p = rat(a, 7);
        let q = rat(1, 1) - p.clone();
        let params = KrawtchoukParams::new(big_n, p.clone()).unwrap();
        let (m, n) = (m.min(big_n), n.min(big_n));
        let sum = (0..=big_n).fold(rat(0, 1), |acc, x| {
            let w = binomial(big_n, x) * p.powi(x as i32) * q.powi((big_n - x) as i32);
            acc + w * krawtchouk_eval(m, x, &params).unwrap() * krawtchouk_eval(n, x, &params).unwrap()
        });
        let want = if m == n { krawtchouk_norm(n, &params).unwrap() } else { rat(0, 1) };
        prop_assert_eq!(sum, want);
    }

    #[test]
    fn symmetric_representation(xi in prop::collection::vec(0u8..2, 1..8), a in 1i64..5, n in 0usize..8) {
        let p = rat(a, 5);
        let big_n = xi.len();
        let n = n.min(big_n);
        let x = xi.iter().map(|&v| v as usize).sum();
        let params = KrawtchoukParams::new(big_n, p.clone()).unwrap();
        let trials = TrialSequence::new(xi, p).unwrap();
        prop_assert_eq!(krawtchouk_symmetric(n, &trials).unwrap(), krawtchouk_eval(n, x, &params).unwrap());
    }

    #[test]
    fn mvk_series_matches_explicit(
        (p, x, n) in weights(3).prop_flat_map(|p| (Just(p), composition(4, 3), prop::collection::vec(0usize..3, 2)))
    ) {
        let basis = Basis::orthogonal_from(p).unwrap();
        let n = MultiIndex::new(n, x.total()).unwrap();
        prop_assert_eq!(mvk_eval(&n, &x, &basis).unwrap(), mvk_eval_explicit(&n, &x, &basis).unwrap());
    }

    #[test]
    fn kernel_ignores_rescaling(
        (p, x, y, c) in weights(3).prop_flat_map(|p| (Just(p), composition(3, 3), composition(3, 3), prop::collection::vec(1i64..5, 2)))
    ) {
        let basis = Basis::orthogonal_from(p).unwrap();
        let scale = [rat(1, 1), rat(c[0], 2), rat(-c[1], 3)];
        let scaled = basis.scaled(&scale).unwrap();
        for deg in 0..=3 {
            prop_assert_eq!(
                reproducing_kernel(deg, &x, &y, &basis).unwrap(),
                reproducing_kernel(deg, &x, &y, &scaled).unwrap()
            );
        }
    }

    #[test]
    fn basis_record_round_trip(p in weights(4)) {
        let basis = Basis::orthogonal_from(p).unwrap();
        let text = serde_json::to_string(&basis.to_record()).unwrap();
        let rec: BasisRecord = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(Basis::<Rational>::from_record(&rec).unwrap(), basis);
    }

    #[test]
    fn composition_rows_match_oracle(a in 1i64..5, t in 0.05f64..3.0) {
        let proc = ehrenfest_pair((a, 5));
        let oracle = generator_expm(&proc, t, 100).unwrap();
        let states = proc.states();
        for x in &states {
            let mut total = 0.0;
            for y in &states {
                let r = composition_transition(x, y, &t, &proc, EigenForm::Stationary, 1e-12).unwrap();
                prop_assert!(!r.flagged);
                assert_abs_diff_eq!(r.p, oracle.get(x, y), epsilon = 1e-10);
                total += r.p;
            }
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn float_and_exact_backends_agree() {
    let p = rat(2, 7);
    let params = KrawtchoukParams::new(6, p.clone()).unwrap();
    let fparams = KrawtchoukParams::new(6, p.to_f64()).unwrap();
    for n in 0..=6 {
        for x in 0..=6 {
            let exact = krawtchouk_eval(n, x, &params).unwrap().to_f64();
            assert_abs_diff_eq!(krawtchouk_eval(n, x, &fparams).unwrap(), exact, epsilon = 1e-9 * exact.abs().max(1.0));
        }
    }
}
