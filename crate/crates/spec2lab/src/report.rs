//! Named pass/fail checks shared by every certificate.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured quantity (residual, norm, distance, …).
    #[serde(with = "lossy_f64")]
    pub value: f64,
    /// Threshold it was compared against.
    #[serde(with = "lossy_f64")]
    pub bound: f64,
}

impl Check {
    /// Passes when `value < bound`.
    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed: value < bound, value, bound }
    }

    /// Passes when `value ≤ bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed: value <= bound, value, bound }
    }

    /// Passes when `value ≥ bound`.
    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed: value >= bound, value, bound }
    }

    pub fn flag(name: &str, passed: bool) -> Self {
        Self { name: name.into(), passed, value: if passed { 1.0 } else { 0.0 }, bound: 1.0 }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub fn failing(checks: &[Check]) -> Vec<&str> {
    checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
}

pub fn find<'a>(checks: &'a [Check], name: &str) -> Option<&'a Check> {
    checks.iter().find(|c| c.name == name)
}

/// JSON has no NaN or infinity; they round-trip through `null` and strings.
pub(crate) mod lossy_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_none()
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
            Null(()),
        }
        Ok(match Option::<Repr>::deserialize(d)? {
            Some(Repr::Num(x)) => x,
            Some(Repr::Text(t)) if t == "inf" => f64::INFINITY,
            Some(Repr::Text(t)) if t == "-inf" => f64::NEG_INFINITY,
            _ => f64::NAN,
        })
    }
}
