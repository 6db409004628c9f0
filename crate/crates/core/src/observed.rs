//! Published urban scaling exponents used as comparison targets.
//!
//! Values are approximate averages from the US/SFI city studies and an
//! independent UK patent study. Ranges (GDP) keep both ends.

use crate::meanfield::ScalingClass;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedExponent {
    /// Short machine name, e.g. `wages`.
    pub key: &'static str,
    pub measure: &'static str,
    pub source: &'static str,
    pub beta: f64,
    /// Upper end when the published value is a range.
    pub beta_high: Option<f64>,
    pub uncertainty: f64,
    /// Dependency class whose exponent the measure is compared against.
    pub class: Option<ScalingClass>,
}

pub const OBSERVED: [ObservedExponent; 9] = [
    ObservedExponent {
        key: "wages",
        measure: "Wages",
        source: "USA",
        beta: 1.12,
        beta_high: None,
        uncertainty: 0.02,
        class: Some(ScalingClass::Interaction),
    },
    ObservedExponent {
        key: "gdp",
        measure: "GDP",
        source: "EU, Germany, China",
        beta: 1.13,
        beta_high: Some(1.26),
        uncertainty: 0.1,
        class: Some(ScalingClass::Interaction),
    },
    ObservedExponent {
        key: "patents_usa",
        measure: "Patents",
        source: "USA",
        beta: 1.27,
        beta_high: None,
        uncertainty: 0.02,
        class: Some(ScalingClass::ScarceDependency),
    },
    ObservedExponent {
        key: "private_rd_employment",
        measure: "Private R&D employment",
        source: "USA",
        beta: 1.34,
        beta_high: None,
        uncertainty: 0.05,
        class: Some(ScalingClass::ScarceDependency),
    },
    ObservedExponent {
        key: "rd_employment_china",
        measure: "R&D employment",
        source: "China",
        beta: 1.26,
        beta_high: None,
        uncertainty: 0.1,
        class: Some(ScalingClass::ScarceDependency),
    },
    ObservedExponent {
        key: "rd_establishments",
        measure: "R&D establishments",
        source: "USA",
        beta: 1.19,
        beta_high: None,
        uncertainty: 0.03,
        class: Some(ScalingClass::Interaction),
    },
    ObservedExponent {
        key: "aids_cases",
        measure: "AIDS cases",
        source: "USA",
        beta: 1.23,
        beta_high: None,
        uncertainty: 0.05,
        class: Some(ScalingClass::Interaction),
    },
    ObservedExponent {
        key: "patents_uk_all",
        measure: "Patents",
        source: "UK all cities",
        beta: 1.13,
        beta_high: None,
        uncertainty: 0.1,
        class: Some(ScalingClass::Interaction),
    },
    ObservedExponent {
        key: "patents_uk_small",
        measure: "Patents",
        source: "UK small cities",
        beta: 0.99,
        beta_high: None,
        uncertainty: 0.1,
        class: None,
    },
];

pub fn observed(key: &str) -> Option<&'static ObservedExponent> {
    OBSERVED.iter().find(|o| o.key == key)
}
