//! A frozen matrix of regression fixtures: small, named parameter sets with
//! the expected sign of the coupled principal eigenvalue. The signs were
//! established with the truncation sweep at the recorded grids and sizes and
//! are pinned here so refactors cannot silently flip a verdict.

use crate::analysis::SignClass;
use crate::eigen::GridSpec;
use crate::error::Result;
use crate::model::{ModelParams, ReactionSpec};

/// One pinned regression case. All fixtures are drift-free with unit period.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub d_road: f64,
    pub d_field: f64,
    pub nu: f64,
    pub mu: f64,
    pub a0: f64,
    pub a1: f64,
    pub alpha: f64,
    pub grid: GridSpec,
    /// Half-widths for the truncation sweep, strictly increasing.
    pub sizes: &'static [f64],
    pub expected_sign: SignClass,
}

const SIZES_STD: &[f64] = &[2.0, 4.0, 8.0, 16.0];
const GRID_STD: GridSpec = GridSpec { hx: 0.25, hy: 0.25 };
const GRID_FINE: GridSpec = GridSpec { hx: 0.125, hy: 0.125 };

const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "favorable-homogeneous",
        d_road: 1.0,
        d_field: 1.0,
        nu: 1.0,
        mu: 1.0,
        a0: 1.0,
        a1: 0.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Negative,
    },
    Fixture {
        name: "hostile-homogeneous",
        d_road: 1.0,
        d_field: 1.0,
        nu: 1.0,
        mu: 1.0,
        a0: -1.0,
        a1: 0.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Positive,
    },
    Fixture {
        name: "favorable-periodic",
        d_road: 1.0,
        d_field: 1.0,
        nu: 1.0,
        mu: 1.0,
        a0: 0.5,
        a1: 1.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Negative,
    },
    Fixture {
        name: "hostile-periodic",
        d_road: 1.0,
        d_field: 1.0,
        nu: 1.0,
        mu: 1.0,
        a0: -1.0,
        a1: 0.5,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Positive,
    },
    Fixture {
        name: "fast-road-favorable",
        d_road: 10.0,
        d_field: 1.0,
        nu: 1.0,
        mu: 1.0,
        a0: 1.0,
        a1: 0.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Negative,
    },
    Fixture {
        name: "fast-road-hostile",
        d_road: 10.0,
        d_field: 1.0,
        nu: 1.0,
        mu: 1.0,
        a0: -1.0,
        a1: 0.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Positive,
    },
    Fixture {
        name: "mean-zero-oscillation",
        d_road: 1.0,
        d_field: 1.0,
        nu: 1.0,
        mu: 1.0,
        a0: 0.0,
        a1: 2.0,
        alpha: 1.0,
        grid: GRID_FINE,
        sizes: SIZES_STD,
        expected_sign: SignClass::Negative,
    },
    Fixture {
        name: "weak-mean-negative",
        d_road: 1.0,
        d_field: 1.0,
        nu: 1.0,
        mu: 1.0,
        a0: -0.5,
        a1: 1.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Positive,
    },
    Fixture {
        name: "eager-exchange",
        d_road: 1.0,
        d_field: 1.0,
        nu: 2.0,
        mu: 0.5,
        a0: 1.0,
        a1: 0.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Negative,
    },
    Fixture {
        name: "reluctant-exchange",
        d_road: 1.0,
        d_field: 1.0,
        nu: 0.5,
        mu: 2.0,
        a0: -1.0,
        a1: 0.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Positive,
    },
    Fixture {
        name: "slow-field-favorable",
        d_road: 1.0,
        d_field: 0.25,
        nu: 1.0,
        mu: 1.0,
        a0: 1.0,
        a1: 0.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Negative,
    },
    Fixture {
        name: "diffuse-field-hostile",
        d_road: 1.0,
        d_field: 4.0,
        nu: 1.0,
        mu: 1.0,
        a0: -1.0,
        a1: 0.0,
        alpha: 1.0,
        grid: GRID_STD,
        sizes: SIZES_STD,
        expected_sign: SignClass::Positive,
    },
];

impl Fixture {
    /// The full pinned matrix, in a stable order.
    pub fn all() -> &'static [Fixture] {
        FIXTURES
    }

    pub fn by_name(name: &str) -> Option<&'static Fixture> {
        FIXTURES.iter().find(|f| f.name == name)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.d_road, self.d_field, self.nu, self.mu, 0.0, 1.0)
    }

    pub fn reaction(&self) -> Result<ReactionSpec> {
        let m = (self.a0 + self.a1).max(0.5);
        ReactionSpec::logistic(self.a0, self.a1, self.alpha, m, 1.0)
    }
}
