//! Exact rational charge `g = k/m`.
//!
//! Phases `2πg·n` for integer `n` are reduced modulo `m` before the
//! trigonometric call, so quantized fluxes that are multiples of `1/g`
//! map to exactly zero phase.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Charge parameter in lowest terms, restricted to `[0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Charge {
    num: u32,
    den: u32,
}

/// Charges suggested for typical motifs: triangles, 4-cycles, near-bipartite
/// graphs and the signed-Laplacian limit.
pub const PRESETS: [Charge; 4] = [
    Charge { num: 1, den: 3 },
    Charge { num: 1, den: 4 },
    Charge { num: 2, den: 5 },
    Charge { num: 1, den: 2 },
];

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Charge {
    pub const ZERO: Charge = Charge { num: 0, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::BadCharge(format!("{num}/{den}")));
        }
        // 2k <= m
        if 2 * u64::from(num) > u64::from(den) {
            return Err(Error::ChargeOutOfRange(format!("{num}/{den}")));
        }
        let g = gcd(num, den).max(1);
        Ok(Charge {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(&self) -> u32 {
        self.num
    }

    pub fn denominator(&self) -> u32 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn value(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    /// `(k·n) mod m`, the exact residue behind the phase `2πg·n`.
    pub fn residue(&self, n: i64) -> u32 {
        let m = i64::from(self.den);
        ((i64::from(self.num) * n).rem_euclid(m)) as u32
    }

    /// True when `exp(i2πg·n) == 1` exactly.
    pub fn is_trivial_flux(&self, n: i64) -> bool {
        self.residue(n) == 0
    }

    /// Angle `2πg·n` reduced to `[0, 2π)`.
    pub fn angle(&self, n: i64) -> f64 {
        TAU * f64::from(self.residue(n)) / f64::from(self.den)
    }

    /// Unit complex number `exp(i2πg·n)`.
    pub fn phasor(&self, n: i64) -> Complex64 {
        let r = self.residue(n);
        if r == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if 2 * r == self.den {
            return Complex64::new(-1.0, 0.0);
        }
        if 4 * r == self.den {
            return Complex64::new(0.0, 1.0);
        }
        if 4 * r == 3 * self.den {
            return Complex64::new(0.0, -1.0);
        }
        Complex64::from_polar(1.0, self.angle(n))
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Charge {
    type Err = Error;

    /// Accepts `k/m` or a plain integer (`0`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadCharge(s.to_string());
        match s.split_once('/') {
            Some((k, m)) => {
                let k: u32 = k.trim().parse().map_err(|_| bad())?;
                let m: u32 = m.trim().parse().map_err(|_| bad())?;
                Charge::new(k, m)
            }
            None => {
                let k: u32 = s.parse().map_err(|_| bad())?;
                Charge::new(k, 1)
            }
        }
    }
}

impl Serialize for Charge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Charge {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
