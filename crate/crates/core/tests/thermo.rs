use num_bigint::BigInt;
use num_rational::BigRational;

use rnaenum::models::{count_range, link_moments, StructureClass};
use rnaenum::series::{Semiring, UPoly};
use rnaenum::structures::StructureFamily;
use rnaenum::thermo::{
    celsius_grid, melting_curve, melting_temperature, occupancy_table, structure_sums, EnergyKind, EnergyModel,
    MeltLevel, ThermoError,
};

#[test]
fn totals_match_series_counts() {
    for theta in [0, 1, 3] {
        let class = StructureClass::plain(StructureFamily::General, theta, 0).unwrap();
        let series = count_range(&class, 100).unwrap();
        let sums = structure_sums(100, theta, &BigInt::from(1), &BigInt::from(1));
        for n in 1..=100 {
            assert_eq!(BigRational::from_integer(sums[n].clone()), series[n], "theta {theta} n {n}");
        }
    }
}

#[test]
fn pair_table_matches_link_moments() {
    let class = StructureClass::plain(StructureFamily::General, 1, 0).unwrap();
    let moments = link_moments(&class, 100).unwrap();
    let x = UPoly::<BigInt>::var();
    let sums = structure_sums(100, 1, &x, &UPoly::one());
    for n in [1, 7, 40, 100] {
        let poly = &sums[n];
        let total: BigInt = poly.coeffs().iter().sum();
        let first: BigInt = poly.coeffs().iter().enumerate().map(|(k, c)| c * BigInt::from(k)).sum();
        assert_eq!(BigRational::from_integer(total), moments[n].total);
        assert_eq!(BigRational::from_integer(first), moments[n].link_sum);
        let table = occupancy_table(n, EnergyKind::Nussinov, 1);
        assert!((table.unweighted_mean() - moments[n].mean()).abs() < 1e-9);
    }
}

#[test]
fn curves_fall_with_temperature() {
    let grid = celsius_grid(-200.0, 200.0, 5.0);
    for kind in [EnergyKind::Nussinov, EnergyKind::BaseStacking] {
        let table = occupancy_table(60, kind, 1);
        let curve = melting_curve(&table, &EnergyModel::standard(kind), &grid, MeltLevel::Midpoint).unwrap();
        assert!(curve.is_nonincreasing(1e-9));
        assert!(curve.tm_celsius.is_some());
    }
}

#[test]
fn half_ground_state_has_no_nussinov_crossing() {
    let table = occupancy_table(100, EnergyKind::Nussinov, 1);
    let model = EnergyModel::standard(EnergyKind::Nussinov);
    let r = melting_temperature(&table, &model, MeltLevel::HalfGroundState);
    assert!(matches!(r, Err(ThermoError::NoCrossing { .. })), "{r:?}");
}

#[test]
fn too_short_for_any_transition() {
    let table = occupancy_table(2, EnergyKind::BaseStacking, 1);
    let model = EnergyModel::standard(EnergyKind::BaseStacking);
    assert!(melting_temperature(&table, &model, MeltLevel::Midpoint).is_err());
    assert!(EnergyModel::new(EnergyKind::Nussinov, 1.0, -1.0).is_err() || model.ln_weight(-5.0).is_err());
}
