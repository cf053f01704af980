//! Decibel quantities.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A finite power ratio expressed in dB.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Decibel(f64);

impl Decibel {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::param("dB value", format!("{value} is not finite")))
        }
    }

    /// Const constructor for literals. Panics on a non-finite value.
    pub const fn lit(value: f64) -> Self {
        assert!(value.is_finite(), "dB literal must be finite");
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_linear(self) -> f64 {
        db_to_linear(self)
    }

    /// Amplitude ratio, i.e. the square root of the power ratio.
    pub fn to_amplitude(self) -> f64 {
        10f64.powf(self.0 / 20.0)
    }
}

impl TryFrom<f64> for Decibel {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Decibel> for f64 {
    fn from(d: Decibel) -> f64 {
        d.0
    }
}

pub fn db_to_linear(x: Decibel) -> f64 {
    10f64.powf(x.0 / 10.0)
}

pub fn linear_to_db(ratio: f64) -> Result<Decibel> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::param("ratio", format!("{ratio} must be positive and finite")));
    }
    Decibel::new(10.0 * ratio.log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn db(x: f64) -> Decibel {
        Decibel::new(x).unwrap()
    }

    #[test]
    fn reference_points() {
        assert_eq!(db_to_linear(db(0.0)), 1.0);
        assert!((db_to_linear(db(10.0)) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(db(-3.0103)) - 0.5).abs() < 1e-5);
        assert!((db(20.0).to_amplitude() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Decibel::new(f64::NAN).is_err());
        assert!(Decibel::new(f64::INFINITY).is_err());
        assert!(linear_to_db(0.0).is_err());
        assert!(linear_to_db(-1.0).is_err());
    }

    #[test]
    fn serde_is_a_bare_number() {
        let s = serde_json::to_string(&db(4.5)).unwrap();
        assert_eq!(s, "4.5");
        let back: Decibel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, db(4.5));
    }

    proptest! {
        #[test]
        fn round_trip(x in -100.0f64..100.0) {
            let back = linear_to_db(db_to_linear(db(x))).unwrap().value();
            let tol = 1e-12 * x.abs().max(1.0);
            prop_assert!((back - x).abs() <= tol, "{x} -> {back}");
        }
    }
}
