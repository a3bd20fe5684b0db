use proptest::prelude::*;
use rand::Rng;
use reflectsim::stats::{kde_gaussian, ks_two_sample, linear_grid, mc_summary};
use reflectsim::streams::{stream, Purpose};
use reflectsim::Real;

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 1..60)
}

proptest! {
    #[test]
    fn ks_is_symmetric(a in sample(), b in sample()) {
        prop_assert_eq!(ks_two_sample(&a, &b).unwrap(), ks_two_sample(&b, &a).unwrap());
    }

    #[test]
    fn ks_ignores_increasing_transforms(a in sample(), b in sample()) {
        let t = |xs: &[f64]| xs.iter().map(|x| (x / 3.0).exp() * 2.0 - 1.0).collect::<Vec<_>>();
        let d = ks_two_sample(&a, &b).unwrap();
        prop_assert!((ks_two_sample(&t(&a), &t(&b)).unwrap() - d).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn kde_is_linear_in_sample_weights(a in sample(), b in sample()) {
        // the estimate on a ∪ b is the count-weighted average of the two estimates
        let grid = linear_grid(-8.0, 8.0, 65);
        let h = 0.4;
        let fa = kde_gaussian(&a, Some(h), Some(grid.clone())).unwrap();
        let fb = kde_gaussian(&b, Some(h), Some(grid.clone())).unwrap();
        let joint: Vec<f64> = a.iter().chain(&b).copied().collect();
        let fj = kde_gaussian(&joint, Some(h), Some(grid)).unwrap();
        let (na, nb) = (a.len() as f64, b.len() as f64);
        for i in 0..fj.values.len() {
            let mix = (na * fa.values[i] + nb * fb.values[i]) / (na + nb);
            prop_assert!((fj.values[i] - mix).abs() < 1e-12);
            prop_assert!(fj.values[i] >= 0.0);
        }
    }
}

#[test]
fn kde_integrates_to_one_on_the_default_grid() {
    let mut rng = stream(3, 0, Purpose::VDraw);
    let xs: Vec<f64> = (0..10_000).map(|_| f64::standard_normal(&mut rng)).collect();
    let d = kde_gaussian(&xs, None, None).unwrap();
    assert_eq!(d.points.len(), 512);
    let area = d.integral();
    assert!((area - 1.0).abs() < 0.01, "{area}");
}

#[test]
fn ks_of_two_uniform_samples_is_small() {
    let mut rng = stream(4, 0, Purpose::VDraw);
    let a: Vec<f64> = (0..20_000).map(|_| rng.gen()).collect();
    let b: Vec<f64> = (0..20_000).map(|_| rng.gen()).collect();
    let d = ks_two_sample(&a, &b).unwrap();
    assert!(d < reflectsim::stats::ks_critical_value(0.001, a.len(), b.len()), "{d}");
}

#[test]
fn summary_examples() {
    let s = mc_summary(&[0.0, 2.0]).unwrap();
    assert_eq!((s.mean, s.standard_error), (1.0, 1.0));
    assert!((s.sd - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(mc_summary(&[1.0, 2.0, 3.0]).unwrap().q50, 2.0);
}
