use num_bigint::BigInt;
use num_rational::BigRational;

use rnaenum::asymptotics::{analyze_class, limit_law, ratio_diagnostic, AsymptoticsConfig};
use rnaenum::models::{count_range, link_moments, Dangles, StructureClass};
use rnaenum::structures::{ModelParams, StructureFamily};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn with_p(family: StructureFamily, p: BigRational) -> StructureClass {
    StructureClass::new(family, Dangles::None, ModelParams::default().with_p(p)).unwrap()
}

#[test]
fn ratio_estimates_near_constants() {
    let general = StructureClass::plain(StructureFamily::General, 1, 0).unwrap();
    let coeffs = count_range(&general, 400).unwrap();
    let r = ratio_diagnostic(&coeffs, 400, 2.618034).unwrap();
    assert!((r.gamma_estimate / 2.618034 - 1.0).abs() < 0.01, "{r:?}");

    let saturated = StructureClass::plain(StructureFamily::Saturated, 1, 0).unwrap();
    let coeffs = count_range(&saturated, 400).unwrap();
    let r = ratio_diagnostic(&coeffs, 400, 2.3546736).unwrap();
    assert!((r.c_estimate / 1.07427 - 1.0).abs() < 0.05, "{r:?}");
}

#[test]
fn catalan_ratio() {
    // C_{n-1}, generating function of y = t + y^2
    let mut c = vec![BigRational::from_integer(0.into()), BigRational::from_integer(1.into())];
    for n in 2..=300usize {
        let s: BigRational = (1..n).map(|k| &c[k] * &c[n - k]).sum();
        c.push(s);
    }
    let r = ratio_diagnostic(&c, 300, 4.0).unwrap();
    assert!((r.gamma_estimate / 4.0 - 1.0).abs() < 0.01, "{r:?}");
}

#[test]
fn growth_increases_with_stickiness() {
    let config = AsymptoticsConfig::default();
    for family in StructureFamily::ALL {
        let gammas: Vec<f64> = [rat(3, 8), rat(1, 1), rat(2, 1)]
            .into_iter()
            .map(|p| analyze_class(&with_p(family, p), config).unwrap().gamma)
            .collect();
        assert!(gammas.windows(2).all(|w| w[0] < w[1]), "{} {gammas:?}", family.name());
    }
}

#[test]
fn singularity_inside_unit_disc() {
    let config = AsymptoticsConfig::default();
    for family in [StructureFamily::General, StructureFamily::GSaturated] {
        let est = analyze_class(&StructureClass::plain(family, 1, 0).unwrap(), config).unwrap();
        assert!(est.gamma > 1.0 && est.t0 < 1.0, "{est:?}");
        assert!((est.gamma * est.t0 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn mean_slope_matches_exact_means() {
    for family in StructureFamily::ALL {
        let class = StructureClass::plain(family, 1, 0).unwrap();
        let law = limit_law(&class, 1e-3).unwrap();
        assert!(law.sigma2 > 0.0);
        let m = link_moments(&class, 400).unwrap();
        let slope = (m[400].mean() - m[200].mean()) / 200.0;
        assert!((law.mu / slope - 1.0).abs() < 5e-4, "{}: mu {} slope {slope}", family.name(), law.mu);
        let (mu_i, _) = law.implicit;
        assert!((law.mu - mu_i).abs() < 1e-6);
    }
}
