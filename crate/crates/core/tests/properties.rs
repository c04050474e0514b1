mod common;

use common::*;
use conal::factorization::{is_minimum_phase, minimum_phase_factor_scalar, FactorOptions};
use conal::metrics::{hilbert_distance, thompson_distance, MetricOptions};
use conal::rational::LaurentPolynomial;
use conal::speech::{levinson_durbin, ArModel};
use conal::{poly, FrequencyGrid, Spectrum, StateSpace};
use num_complex::Complex64;
use proptest::prelude::*;

fn laurent_strategy() -> impl Strategy<Value = Vec<f64>> {
    (0usize..4).prop_flat_map(|d| prop::collection::vec(-3.0f64..3.0, d + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factor_products_are_real_on_circle(q in laurent_strategy(), t in -3.14f64..3.14) {
        let p = LaurentPolynomial::from_factor(&q);
        prop_assert!(p.is_symmetric(0.0));
        let v = p.eval(t);
        prop_assert!(v.im.abs() <= 1e-12 * (1.0 + v.re.abs()));
        prop_assert!(v.re >= -1e-12);
    }

    #[test]
    fn symmetric_roots_pair_with_reciprocals(q in prop::collection::vec(-2.0f64..2.0, 2..5)) {
        prop_assume!(q[0].abs() > 0.1 && q[q.len() - 1].abs() > 0.1);
        let p = LaurentPolynomial::from_factor(&q);
        let roots = p.roots().unwrap();
        for r in &roots {
            prop_assume!((r.norm() - 1.0).abs() > 1e-3);
            let inv = Complex64::new(1.0, 0.0) / r.conj();
            let best = roots.iter().map(|s| (s - inv).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-6 * (1.0 + inv.norm()), "no partner for {r}");
        }
    }

    #[test]
    fn series_evaluates_as_product(seed in 0u64..1000, t in -3.1f64..3.1) {
        let mut r = rng(seed);
        let g1 = random_stable(&mut r, 2, 2, 3, 0.9);
        let g2 = random_stable(&mut r, 3, 3, 1, 0.9);
        let z = Complex64::from_polar(1.0, t);
        let lhs = g1.series(&g2).unwrap().evaluate(z).unwrap();
        let rhs = g1.evaluate(z).unwrap() * g2.evaluate(z).unwrap();
        prop_assert!((&lhs - &rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn levinson_output_is_minimum_phase(x in prop::collection::vec(-1.0f64..1.0, 40..120), p in 1usize..16) {
        let r = conal::speech::autocorrelation(&x, p.min(x.len() - 1));
        prop_assume!(r[0] > 1e-6);
        if let Ok(m) = levinson_durbin(&r) {
            let roots = poly::roots(&poly::reversed(&m.a)).unwrap_or_default();
            prop_assert!(roots.iter().all(|z| z.norm() < 1.0));
        }
    }

    #[test]
    fn scalar_factor_is_minimum_phase(seed in 0u64..1000) {
        let mut r = rng(seed);
        let tf = random_tf(&mut r, 2, 3);
        let f = minimum_phase_factor_scalar(&tf.spectrum(), &FactorOptions::default()).unwrap();
        let rep = is_minimum_phase(f.factor()).unwrap();
        prop_assert!(rep.minimum_phase);
        let g = FrequencyGrid::new(64).unwrap();
        for t in g.thetas() {
            let want = tf.power(t);
            let got = f.scalar().unwrap().power(t);
            prop_assert!((got - want).abs() <= 1e-8 * want);
        }
    }

    #[test]
    fn distances_are_filter_invariant_on_grid(seed in 0u64..1000) {
        let mut r = rng(seed);
        let a = random_factor(&mut r, 2);
        let b = random_factor(&mut r, 2);
        let t: StateSpace = random_stable(&mut r, 1, 2, 2, 0.7);
        let opts = MetricOptions::grid(256).unwrap();
        let d0 = thompson_distance(&a, &b, &opts).unwrap().value;
        let d1 = thompson_distance(&a.filter(&t).unwrap(), &b.filter(&t).unwrap(), &opts).unwrap().value;
        prop_assert!((d0 - d1).abs() <= 1e-8 * (1.0 + d0));
        let h0 = hilbert_distance(&a, &b, &opts).unwrap().value;
        prop_assert!(h0 <= 2.0 * d0 + 1e-12);
    }
}

#[test]
fn levinson_stable_over_random_pd_sequences() {
    let mut r = rng(77);
    let mut count = 0;
    for _ in 0..1000 {
        let a = random_poly(&mut r, 8, 0.97);
        let x = synthetic_vowel(&mut r, &a, 150.0, 16000, 0.02);
        let lags = conal::speech::autocorrelation(&x, 12);
        let m: ArModel = levinson_durbin(&lags).unwrap();
        let roots = poly::roots(&poly::reversed(&m.a)).unwrap();
        assert!(roots.iter().all(|z| z.norm() < 1.0));
        count += 1;
    }
    assert_eq!(count, 1000);
}

#[test]
fn scaled_copy_has_zero_hilbert_distance() {
    let (p1, _) = example_pair();
    let d = hilbert_distance(&p1, &p1.scale(3.0), &MetricOptions::default()).unwrap();
    assert!(d.value.abs() < 1e-10);
    let s: Spectrum = p1.scale(3.0);
    assert!((thompson_distance(&p1, &s, &MetricOptions::default()).unwrap().value - 3f64.ln()).abs() < 1e-10);
}
