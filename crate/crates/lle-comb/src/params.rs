//! Model parameters and the choice of continuation parameter.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which control parameter varies along a constant-solution curve or a
/// continued branch.
///
/// The stationary model has two scalar controls besides the dispersion:
/// the detuning `zeta` and the forcing `f`.  Every curve in this crate
/// varies exactly one of them and freezes the other:
///
/// * [`Mode::Hat`] — detuning-swept: `f` is fixed, `zeta` is the active
///   parameter (the constant curve is parametrized by a coordinate
///   `t in (-1, 1)`).
/// * [`Mode::Bar`] — forcing-swept: `zeta` is fixed, `f` is the active
///   parameter (the constant curve is parametrized by the modulus `s > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Hat,
    Bar,
}

impl Mode {
    /// Name of the active (swept) parameter.
    pub fn active_name(self) -> &'static str {
        match self {
            Mode::Hat => "zeta",
            Mode::Bar => "f",
        }
    }

    /// Name of the frozen parameter.
    pub fn fixed_name(self) -> &'static str {
        match self {
            Mode::Hat => "f",
            Mode::Bar => "zeta",
        }
    }

    /// Name of the curve coordinate on the constant-solution curve.
    pub fn coord_name(self) -> &'static str {
        match self {
            Mode::Hat => "t",
            Mode::Bar => "s",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Hat => write!(fm, "hat"),
            Mode::Bar => write!(fm, "bar"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hat" => Ok(Mode::Hat),
            "bar" => Ok(Mode::Bar),
            other => Err(Error::Format(format!(
                "unknown mode {other:?} (expected \"hat\" or \"bar\")"
            ))),
        }
    }
}

/// A full parameter point `(d, zeta, f)` of the stationary equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Dispersion coefficient; `d > 0` is anomalous, `d < 0` normal.
    pub d: f64,
    /// Detuning.
    pub zeta: f64,
    /// Forcing amplitude.
    pub f: f64,
}

impl Parameters {
    /// Validated constructor: `d` must be nonzero and all entries finite.
    pub fn new(d: f64, zeta: f64, f: f64) -> Result<Self> {
        if !(d.is_finite() && zeta.is_finite() && f.is_finite()) {
            return Err(Error::Domain(format!(
                "parameters must be finite, got d={d}, zeta={zeta}, f={f}"
            )));
        }
        if d == 0.0 {
            return Err(Error::Domain(
                "dispersion d must be nonzero (the equation degenerates at d = 0)".into(),
            ));
        }
        Ok(Self { d, zeta, f })
    }

    /// Value of the active parameter in the given mode.
    pub fn active(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Hat => self.zeta,
            Mode::Bar => self.f,
        }
    }

    /// Value of the frozen parameter in the given mode.
    pub fn fixed(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Hat => self.f,
            Mode::Bar => self.zeta,
        }
    }

    /// Copy of `self` with the active parameter replaced.
    pub fn with_active(&self, mode: Mode, value: f64) -> Self {
        let mut p = *self;
        match mode {
            Mode::Hat => p.zeta = value,
            Mode::Bar => p.f = value,
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_rejects_degenerate_dispersion() {
        assert!(Parameters::new(0.0, 1.0, 1.0).is_err());
        assert!(Parameters::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(Parameters::new(0.1, 2.0, 1.6).is_ok());
    }

    #[test]
    fn active_fixed_roundtrip() {
        let p = Parameters::new(-0.2, 10.0, 4.0).unwrap();
        assert_eq!(p.active(Mode::Hat), 10.0);
        assert_eq!(p.fixed(Mode::Hat), 4.0);
        assert_eq!(p.active(Mode::Bar), 4.0);
        assert_eq!(p.fixed(Mode::Bar), 10.0);
        let q = p.with_active(Mode::Bar, 5.0);
        assert_eq!(q.f, 5.0);
        assert_eq!(q.zeta, 10.0);
    }

    #[test]
    fn mode_parses_and_prints() {
        assert_eq!("hat".parse::<Mode>().unwrap(), Mode::Hat);
        assert_eq!("bar".parse::<Mode>().unwrap(), Mode::Bar);
        assert!("baz".parse::<Mode>().is_err());
        assert_eq!(Mode::Hat.to_string(), "hat");
    }
}
