//! The JSON game file.
//!
//! ```json
//! {
//!   "c1": 1.0, "c2": 1.0, "c3": 1.0, "c4": 1.0,
//!   "alice": { "theta": 0.7853981633974483, "lambda": 0.0 },
//!   "bob":   { "tau": 0.0 },
//!   "degrees": false
//! }
//! ```
//!
//! Phases default to zero and angles are radians unless `"degrees": true`.

use std::fs;
use std::path::Path;

use qcasino_core::{GameSpec, ObservableFrame, PayoffCoefficients};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub alice: AliceFrame,
    pub bob: BobFrame,
    #[serde(default)]
    pub degrees: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AliceFrame {
    pub theta: f64,
    #[serde(default)]
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BobFrame {
    pub tau: f64,
    #[serde(default)]
    pub mu: f64,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed spec: {e}")))
    }

    /// Convert to radians, wrap the angles and reject non-finite input.
    pub fn to_game(&self) -> Result<GameSpec, CliError> {
        let all = [
            self.c1,
            self.c2,
            self.c3,
            self.c4,
            self.alice.theta,
            self.alice.lambda,
            self.bob.tau,
            self.bob.mu,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Numeric("spec contains a non-finite value".into()));
        }
        let unit = |x: f64| if self.degrees { x.to_radians() } else { x };
        Ok(GameSpec::new(
            PayoffCoefficients::new(self.c1, self.c2, self.c3, self.c4),
            ObservableFrame::new(unit(self.alice.theta), unit(self.alice.lambda)),
            ObservableFrame::new(unit(self.bob.tau), unit(self.bob.mu)),
        ))
    }
}

pub fn load(path: &Path) -> Result<GameSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read spec {}: {e}", path.display())))?;
    SpecFile::parse(&text)?.to_game()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;

    #[test]
    fn phases_default_to_zero() {
        let s = SpecFile::parse(
            r#"{"c1":1,"c2":2,"c3":3,"c4":4,"alice":{"theta":0.5},"bob":{"tau":0.25}}"#,
        )
        .unwrap();
        let g = s.to_game().unwrap();
        assert_eq!(g.alice.lambda(), 0.0);
        assert_eq!(g.bob.lambda(), 0.0);
        assert_eq!(g.coefficients.as_array(), [1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn degrees_are_converted_and_wrapped() {
        let s = SpecFile::parse(
            r#"{"c1":1,"c2":1,"c3":1,"c4":1,"alice":{"theta":270,"lambda":90},"bob":{"tau":-90},"degrees":true}"#,
        )
        .unwrap();
        let g = s.to_game().unwrap();
        assert!((g.alice.theta() - FRAC_PI_2).abs() < 1e-15);
        assert!((g.alice.lambda() - FRAC_PI_2).abs() < 1e-15);
        assert!((g.bob.theta() - FRAC_PI_2).abs() < 1e-15);
        assert!(g.alice.theta() < PI);
    }

    #[test]
    fn unknown_and_missing_fields_are_usage_errors() {
        for text in [
            r#"{"c1":1,"c2":1,"c3":1,"alice":{"theta":0},"bob":{"tau":0}}"#,
            r#"{"c1":1,"c2":1,"c3":1,"c4":1,"alice":{"theta":0,"phi":1},"bob":{"tau":0}}"#,
            "not json",
        ] {
            assert!(
                matches!(SpecFile::parse(text), Err(CliError::Usage(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn infinite_coefficient_is_numeric() {
        let s = SpecFile {
            c1: f64::INFINITY,
            c2: 0.0,
            c3: 0.0,
            c4: 0.0,
            alice: AliceFrame {
                theta: 0.0,
                lambda: 0.0,
            },
            bob: BobFrame { tau: 0.0, mu: 0.0 },
            degrees: false,
        };
        assert!(matches!(s.to_game(), Err(CliError::Numeric(_))));
    }
}
