//! Partition functions and melting curves for homopolymers under the
//! pair-counting and stacking energy models.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::series::{ln_abs_bigint, LogExpectation, Semiring, UPoly};

/// Gas constant in kcal/(mol·K).
pub const GAS_CONSTANT: f64 = 0.0019872;
/// The rounded value some melting studies use, 1.959 cal/(mol·K).
pub const ALTERNATE_GAS_CONSTANT: f64 = 0.001959;
pub const KELVIN_OFFSET: f64 = 273.15;

#[derive(Debug, Error, PartialEq)]
pub enum ThermoError {
    #[error("energy and gas constant must be positive")]
    InvalidModel,
    #[error("temperature must be positive (got {0} K)")]
    NonPositiveTemperature(f64),
    #[error("no melting transition: expected count is constant at {level}")]
    NoTransition { level: f64 },
    #[error("expected count never crosses {level} (range {low}..{high})")]
    NoCrossing { level: f64, low: f64, high: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyKind {
    /// `-ε` per base pair.
    Nussinov,
    /// `-ε` per stacked pair.
    BaseStacking,
}

impl FromStr for EnergyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nussinov" => Ok(EnergyKind::Nussinov),
            "base-stacking" | "stacking" => Ok(EnergyKind::BaseStacking),
            _ => Err(format!("unknown energy model '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    pub kind: EnergyKind,
    /// kcal/mol per counted unit.
    pub epsilon: f64,
    /// kcal/(mol·K).
    pub gas_constant: f64,
}

impl EnergyModel {
    pub fn new(kind: EnergyKind, epsilon: f64, gas_constant: f64) -> Result<Self, ThermoError> {
        if !(epsilon > 0.0 && gas_constant > 0.0) {
            return Err(ThermoError::InvalidModel);
        }
        Ok(EnergyModel {
            kind,
            epsilon,
            gas_constant,
        })
    }

    pub fn standard(kind: EnergyKind) -> Self {
        EnergyModel {
            kind,
            epsilon: 1.0,
            gas_constant: GAS_CONSTANT,
        }
    }

    /// `ln w = ε / (R T)`, the log Boltzmann weight of one counted unit.
    pub fn ln_weight(&self, kelvin: f64) -> Result<f64, ThermoError> {
        if !(kelvin > 0.0) {
            return Err(ThermoError::NonPositiveTemperature(kelvin));
        }
        Ok(self.epsilon / (self.gas_constant * kelvin))
    }
}

/// `A(m)` for `m = 0..=n`: the sum over structures on `m` bases of
/// `pair^{#pairs} · stack^{#stacked pairs}`, hairpins of at least `theta`.
///
/// `Cl(m)` covers intervals closed by a pair of their end bases, `Op(m)`
/// the rest; a pair enclosing a closed interval is stacked.
pub fn structure_sums<R: Semiring>(n: usize, theta: u32, pair: &R, stack: &R) -> Vec<R> {
    let theta = theta as usize;
    let mut op = vec![R::one(); n + 1];
    let mut cl = vec![R::zero(); n + 1];
    let mut all = vec![R::one(); n + 1];
    for m in 1..=n {
        let mut o = all[m - 1].clone();
        for k in 1..m.saturating_sub(1) {
            if !cl[m - k].is_zero() {
                o.add_mul_assign(&all[k], &cl[m - k]);
            }
        }
        op[m] = o;
        if m >= 2 && m - 2 >= theta {
            let inner = op[m - 2].add(&stack.mul(&cl[m - 2]));
            cl[m] = pair.mul(&inner);
        }
        all[m] = op[m].add(&cl[m]);
    }
    all
}

fn as_string_map<S: Serializer>(v: &BTreeMap<usize, BigInt>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(v.len()))?;
    for (k, c) in v {
        m.serialize_entry(k, &c.to_string())?;
    }
    m.end()
}

/// Exact number of structures of length `n` with `k` counted units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancyTable {
    pub n: usize,
    pub theta: u32,
    pub kind: EnergyKind,
    #[serde(serialize_with = "as_string_map")]
    pub counts: BTreeMap<usize, BigInt>,
}

impl OccupancyTable {
    pub fn total(&self) -> BigInt {
        self.counts.values().sum()
    }

    pub fn max_units(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Mean units at infinite temperature.
    pub fn unweighted_mean(&self) -> f64 {
        self.mean_at_ln_weight(0.0)
    }

    /// `Σ k N_k w^k / Σ N_k w^k`, summed in log space.
    pub fn mean_at_ln_weight(&self, ln_w: f64) -> f64 {
        self.counts
            .iter()
            .filter_map(|(k, c)| Some(LogExpectation::weighted(ln_abs_bigint(c)? + *k as f64 * ln_w, *k as f64)))
            .fold(LogExpectation::zero(), |acc, x| acc.add(&x))
            .mean
    }
}

fn table_from_poly(n: usize, theta: u32, kind: EnergyKind, poly: &UPoly<BigInt>) -> OccupancyTable {
    let counts = poly
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != BigInt::from(0))
        .map(|(k, c)| (k, c.clone()))
        .collect();
    OccupancyTable { n, theta, kind, counts }
}

/// `N_{k,n}`: structures with `k` pairs (Nussinov) or `k` stacked pairs.
pub fn occupancy_table(n: usize, kind: EnergyKind, theta: u32) -> OccupancyTable {
    let x = UPoly::<BigInt>::var();
    let one = UPoly::<BigInt>::one();
    let (pair, stack) = match kind {
        EnergyKind::Nussinov => (x, one),
        EnergyKind::BaseStacking => (one, x),
    };
    let sums = structure_sums(n, theta, &pair, &stack);
    table_from_poly(n, theta, kind, &sums[n])
}

/// Which count the expectation reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Pairs,
    StackedPairs,
}

/// Expected value of `statistic` over structures of length `n` under the
/// Boltzmann distribution of `model` at `kelvin`, in log space.
pub fn expected(n: usize, theta: u32, model: &EnergyModel, statistic: Statistic, kelvin: f64) -> Result<f64, ThermoError> {
    let beta = model.ln_weight(kelvin)?;
    let unit = |energy: bool, counted: bool| {
        LogExpectation::weighted(if energy { beta } else { 0.0 }, if counted { 1.0 } else { 0.0 })
    };
    let is_pairs = statistic == Statistic::Pairs;
    let (pair, stack) = match model.kind {
        EnergyKind::Nussinov => (unit(true, is_pairs), unit(false, !is_pairs)),
        EnergyKind::BaseStacking => (unit(false, is_pairs), unit(true, !is_pairs)),
    };
    Ok(structure_sums(n, theta, &pair, &stack)[n].mean)
}

/// Expected count of the energy-carrying unit (pairs for Nussinov, stacked
/// pairs for stacking).
pub fn expected_pairs(n: usize, theta: u32, model: &EnergyModel, kelvin: f64) -> Result<f64, ThermoError> {
    let stat = match model.kind {
        EnergyKind::Nussinov => Statistic::Pairs,
        EnergyKind::BaseStacking => Statistic::StackedPairs,
    };
    expected(n, theta, model, stat, kelvin)
}

/// Level defining the melting temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeltLevel {
    /// Halfway between the zero-temperature and infinite-temperature means.
    #[default]
    Midpoint,
    /// Half the zero-temperature (maximal) count.
    HalfGroundState,
}

impl FromStr for MeltLevel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "midpoint" => Ok(MeltLevel::Midpoint),
            "half-ground-state" => Ok(MeltLevel::HalfGroundState),
            _ => Err(format!("unknown melting level '{s}'")),
        }
    }
}

/// Temperature (K) where the expected count of the model's unit falls to
/// the chosen level, by bisection on `ln T`.
pub fn melting_temperature(table: &OccupancyTable, model: &EnergyModel, level: MeltLevel) -> Result<f64, ThermoError> {
    let high = table.max_units() as f64;
    let low = table.unweighted_mean();
    if high - low <= 1e-12 * high.max(1.0) {
        return Err(ThermoError::NoTransition { level: high });
    }
    let target = match level {
        MeltLevel::Midpoint => 0.5 * (high + low),
        MeltLevel::HalfGroundState => 0.5 * high,
    };
    if !(target > low && target < high) {
        return Err(ThermoError::NoCrossing { level: target, low, high });
    }
    let at = |ln_t: f64| -> Result<f64, ThermoError> { Ok(table.mean_at_ln_weight(model.ln_weight(ln_t.exp())?)) };
    let (mut a, mut b) = ((1e-3_f64).ln(), (1e7_f64).ln());
    if at(a)? < target || at(b)? > target {
        return Err(ThermoError::NoCrossing { level: target, low, high });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if at(mid)? > target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct MeltingCurve {
    pub n: usize,
    pub theta: u32,
    pub model: EnergyModel,
    pub temperatures_celsius: Vec<f64>,
    pub expected: Vec<f64>,
    /// `None` when the chosen level is never crossed.
    pub tm_celsius: Option<f64>,
    pub level: MeltLevel,
}

impl MeltingCurve {
    /// Largest `|Δ⟨k⟩/ΔT|` between neighbouring grid points.
    pub fn max_slope(&self) -> f64 {
        self.temperatures_celsius
            .windows(2)
            .zip(self.expected.windows(2))
            .map(|(t, e)| ((e[1] - e[0]) / (t[1] - t[0])).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.expected.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

/// Evenly spaced Celsius grid, both ends included.
pub fn celsius_grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && to >= from);
    let count = ((to - from) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| from + i as f64 * step).collect()
}

/// Expected-count curve over `grid` (Celsius) from an exact table.
pub fn melting_curve(
    table: &OccupancyTable,
    model: &EnergyModel,
    grid: &[f64],
    level: MeltLevel,
) -> Result<MeltingCurve, ThermoError> {
    let expected = grid
        .iter()
        .map(|c| Ok(table.mean_at_ln_weight(model.ln_weight(c + KELVIN_OFFSET)?)))
        .collect::<Result<Vec<_>, ThermoError>>()?;
    let tm_celsius = match melting_temperature(table, model, level) {
        Ok(t) => Some(t - KELVIN_OFFSET),
        Err(ThermoError::NoCrossing { .. }) | Err(ThermoError::NoTransition { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(MeltingCurve {
        n: table.n,
        theta: table.theta,
        model: *model,
        temperatures_celsius: grid.to_vec(),
        expected,
        tm_celsius,
        level,
    })
}

/// Both models side by side, plus total pairs under stacking weights.
#[derive(Debug, Clone, Serialize)]
pub struct MeltComparison {
    pub nussinov: MeltingCurve,
    pub stacking: MeltingCurve,
    pub stacking_total_pairs: Vec<f64>,
}

pub fn compare_models(
    n: usize,
    theta: u32,
    epsilon: f64,
    gas_constant: f64,
    grid: &[f64],
    level: MeltLevel,
) -> Result<MeltComparison, ThermoError> {
    let nm = EnergyModel::new(EnergyKind::Nussinov, epsilon, gas_constant)?;
    let sm = EnergyModel::new(EnergyKind::BaseStacking, epsilon, gas_constant)?;
    let nussinov = melting_curve(&occupancy_table(n, EnergyKind::Nussinov, theta), &nm, grid, level)?;
    let stacking = melting_curve(&occupancy_table(n, EnergyKind::BaseStacking, theta), &sm, grid, level)?;
    let stacking_total_pairs = grid
        .iter()
        .map(|c| expected(n, theta, &sm, Statistic::Pairs, c + KELVIN_OFFSET))
        .collect::<Result<_, _>>()?;
    Ok(MeltComparison {
        nussinov,
        stacking,
        stacking_total_pairs,
    })
}

impl MeltComparison {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("T_celsius,expected_pairs_nussinov,expected_pairs_stacking,expected_total_pairs_stacking\n");
        for (i, t) in self.nussinov.temperatures_celsius.iter().enumerate() {
            let _ = writeln!(
                out,
                "{t:.2},{:.9},{:.9},{:.9}",
                self.nussinov.expected[i], self.stacking.expected[i], self.stacking_total_pairs[i]
            );
        }
        out
    }
}
