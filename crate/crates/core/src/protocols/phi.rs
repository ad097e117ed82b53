//! Competitiveness functions used by the uniform protocol.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A named non-decreasing function family. All logarithms are base 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhiSpec {
    /// `Φ(x) = c`.
    Constant(u64),
    /// `Φ(x) = ⌈log^β max(x, 2)⌉`.
    PolyLog(f64),
    /// `Φ(x) = ⌈log x / 2^((log log x)^ε)⌉`, evaluated at `max(x, 4)`.
    LogOverSubLog(f64),
}

/// Threshold and ratio used for the relatively-slow check.
pub const SLOW_THRESHOLD: f64 = 16.0;
pub const SLOW_RATIO: f64 = 1.95;

impl PhiSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            PhiSpec::Constant(c) => c as f64,
            PhiSpec::PolyLog(beta) => ceil_tol(x.max(2.0).log2().powf(beta)),
            PhiSpec::LogOverSubLog(eps) => {
                let lx = x.max(4.0).log2();
                ceil_tol(lx / lx.log2().powf(eps).exp2())
            }
        }
    }

    /// `Φ(2^j)`.
    pub fn at_pow2(&self, j: u32) -> f64 {
        self.eval((j as f64).exp2())
    }

    /// Checks monotonicity and the relatively-slow ratio on `x = 2^0..2^40`.
    pub fn validate(&self) -> Result<()> {
        match *self {
            PhiSpec::Constant(0) => return Err(Error::config("phi", "constant must be >= 1")),
            PhiSpec::PolyLog(b) if !(b > 0.0 && b.is_finite()) => {
                return Err(Error::config("phi", "polylog exponent must be positive"))
            }
            PhiSpec::LogOverSubLog(e) if !(e > 0.0 && e <= 1.0) => {
                return Err(Error::config("phi", "log-over-sublog exponent must lie in (0, 1]"))
            }
            _ => {}
        }
        let samples: Vec<f64> = (0..=40).map(|j| self.at_pow2(j)).collect();
        for j in 1..samples.len() {
            if samples[j] < samples[j - 1] {
                return Err(Error::config("phi", format!("decreasing at 2^{j}")));
            }
            let x = ((j - 1) as f64).exp2();
            if x > SLOW_THRESHOLD && samples[j] >= SLOW_RATIO * samples[j - 1] {
                return Err(Error::config(
                    "phi",
                    format!("not relatively slow: Φ(2^{j}) >= {SLOW_RATIO}·Φ(2^{})", j - 1),
                ));
            }
        }
        Ok(())
    }
}

/// Ceiling that ignores rounding noise just above an integer.
fn ceil_tol(v: f64) -> f64 {
    (v - 1e-9).ceil().max(1.0)
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSpec::Constant(c) => write!(f, "constant:{c}"),
            PhiSpec::PolyLog(b) => write!(f, "polylog:{b}"),
            PhiSpec::LogOverSubLog(e) => write!(f, "log-over-sublog:{e}"),
        }
    }
}

impl FromStr for PhiSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::config("phi", format!("expected `family:param`, got `{s}`")))?;
        let phi = match name.trim() {
            "constant" => PhiSpec::Constant(parse_param(arg)?),
            "polylog" => PhiSpec::PolyLog(parse_param(arg)?),
            "log-over-sublog" => PhiSpec::LogOverSubLog(parse_param(arg)?),
            other => return Err(Error::config("phi", format!("unknown family `{other}`"))),
        };
        phi.validate()?;
        Ok(phi)
    }
}

fn parse_param<T: FromStr>(arg: &str) -> Result<T> {
    arg.trim()
        .parse()
        .map_err(|_| Error::config("phi", format!("bad parameter `{arg}`")))
}
