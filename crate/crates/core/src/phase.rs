//! Exact phase arithmetic.
//!
//! [`DyadicPhase`] is a phase measured in cycles, `numerator / 2^exponent`,
//! always reduced modulo one turn. Feedback phases of the semiclassical
//! transform live here so that chains of halvings and additions never round.
//!
//! [`Angle`] is a gate parameter in radians. Angles that are dyadic multiples
//! of π keep their exact form so they print as `pi/32` rather than a decimal.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg};

use num_complex::Complex64;

use serde::{Deserialize, Serialize};

use crate::error::PhaseError;

#[derive(Deserialize)]
struct RawPhase {
    numerator: u64,
    exponent: u32,
}

impl TryFrom<RawPhase> for DyadicPhase {
    type Error = PhaseError;

    fn try_from(raw: RawPhase) -> Result<Self, PhaseError> {
        DyadicPhase::new(raw.numerator, raw.exponent)
    }
}

/// Largest denominator exponent a [`DyadicPhase`] may carry.
pub const MAX_PHASE_EXPONENT: u32 = 62;

/// A phase of `numerator / 2^exponent` cycles, in `[0, 1)`.
///
/// Always stored in lowest terms: the numerator is odd, or the phase is zero
/// with exponent zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPhase")]
pub struct DyadicPhase {
    numerator: u64,
    exponent: u32,
}

impl DyadicPhase {
    pub const ZERO: DyadicPhase = DyadicPhase {
        numerator: 0,
        exponent: 0,
    };

    /// Builds `numerator / 2^exponent`, requiring the value to be below one cycle.
    pub fn new(numerator: u64, exponent: u32) -> Result<Self, PhaseError> {
        if exponent > MAX_PHASE_EXPONENT {
            return Err(PhaseError::ExponentTooLarge(exponent));
        }
        if numerator >= 1u64 << exponent {
            return Err(PhaseError::NotBelowOneCycle {
                numerator,
                exponent,
            });
        }
        Ok(Self::reduced(numerator, exponent))
    }

    /// Builds `numerator / 2^exponent` modulo one cycle.
    pub fn wrapping(numerator: u64, exponent: u32) -> Result<Self, PhaseError> {
        if exponent > MAX_PHASE_EXPONENT {
            return Err(PhaseError::ExponentTooLarge(exponent));
        }
        let mask = (1u64 << exponent) - 1;
        Ok(Self::reduced(numerator & mask, exponent))
    }

    fn reduced(mut numerator: u64, mut exponent: u32) -> Self {
        if numerator == 0 {
            return Self::ZERO;
        }
        let shift = numerator.trailing_zeros().min(exponent);
        numerator >>= shift;
        exponent -= shift;
        Self {
            numerator,
            exponent,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    /// `self / 2^k`.
    pub fn div_pow2(self, k: u32) -> Result<Self, PhaseError> {
        if self.is_zero() {
            return Ok(self);
        }
        Self::new(self.numerator, self.exponent + k)
    }

    /// `self * 2^k` modulo one cycle.
    pub fn mul_pow2(self, k: u32) -> Self {
        if k >= self.exponent {
            return Self::ZERO;
        }
        Self::reduced(
            self.numerator << k & ((1u64 << self.exponent) - 1),
            self.exponent,
        )
    }

    /// `self * m` modulo one cycle.
    pub fn mul_int(self, m: u64) -> Self {
        if self.is_zero() {
            return self;
        }
        let modulus = 1u128 << self.exponent;
        let product = (self.numerator as u128 * m as u128) % modulus;
        Self::reduced(product as u64, self.exponent)
    }

    /// Sum modulo one cycle.
    pub fn checked_add(self, other: Self) -> Result<Self, PhaseError> {
        let exponent = self.exponent.max(other.exponent);
        let a = (self.numerator as u128) << (exponent - self.exponent);
        let b = (other.numerator as u128) << (exponent - other.exponent);
        let sum = (a + b) % (1u128 << exponent);
        Self::new(sum as u64, exponent)
    }

    /// Value in cycles.
    pub fn cycles(&self) -> f64 {
        self.numerator as f64 / (1u64 << self.exponent) as f64
    }

    pub fn radians(&self) -> f64 {
        2.0 * PI * self.cycles()
    }

    /// `e^{2πi·phase}`.
    pub fn to_unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.radians())
    }

    /// The same rotation expressed as a gate angle.
    pub fn to_angle(&self) -> Angle {
        // p / 2^m cycles = p·π / 2^(m-1) radians
        if self.is_zero() {
            Angle::ZERO
        } else {
            Angle::pi_dyadic(self.numerator as i64, self.exponent - 1)
        }
    }
}

impl Add for DyadicPhase {
    type Output = DyadicPhase;

    /// Panics only when the combined exponent exceeds [`MAX_PHASE_EXPONENT`],
    /// which cannot happen for operands built through the checked constructors.
    fn add(self, other: Self) -> Self {
        self.checked_add(other)
            .expect("sum of in-range dyadic phases stays in range")
    }
}

impl Neg for DyadicPhase {
    type Output = DyadicPhase;

    fn neg(self) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::reduced((1u64 << self.exponent) - self.numerator, self.exponent)
    }
}

impl fmt::Display for DyadicPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.numerator, 1u64 << self.exponent)
        }
    }
}

/// A rotation angle in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    /// `numerator · π / 2^exponent`, in lowest terms.
    PiDyadic {
        numerator: i64,
        exponent: u32,
    },
    Radians(f64),
}

impl Angle {
    pub const ZERO: Angle = Angle::PiDyadic {
        numerator: 0,
        exponent: 0,
    };

    pub const PI: Angle = Angle::PiDyadic {
        numerator: 1,
        exponent: 0,
    };

    pub fn pi_dyadic(mut numerator: i64, mut exponent: u32) -> Angle {
        if numerator == 0 {
            return Angle::ZERO;
        }
        let shift = numerator.trailing_zeros().min(exponent);
        numerator >>= shift;
        exponent -= shift;
        Angle::PiDyadic {
            numerator,
            exponent,
        }
    }

    pub fn radians(&self) -> f64 {
        match *self {
            Angle::PiDyadic {
                numerator,
                exponent,
            } => numerator as f64 * PI / (1u64 << exponent) as f64,
            Angle::Radians(r) => r,
        }
    }

    /// Exact halving for dyadic angles.
    pub fn half(&self) -> Angle {
        self.scale(1, 1)
    }

    /// `self · m / 2^k`.
    pub fn scale(&self, m: i64, k: u32) -> Angle {
        match *self {
            Angle::PiDyadic {
                numerator,
                exponent,
            } if exponent + k <= MAX_PHASE_EXPONENT => {
                Angle::pi_dyadic(numerator * m, exponent + k)
            }
            _ => Angle::Radians(self.radians() * m as f64 / (1u64 << k) as f64),
        }
    }

    /// The phase `e^{i·angle}` as cycles, when the angle is a dyadic multiple of π.
    pub fn to_phase(&self) -> Option<DyadicPhase> {
        match *self {
            Angle::PiDyadic {
                numerator,
                exponent,
            } => {
                // n·π/2^e = n / 2^(e+1) cycles; rem_euclid keeps it in [0, 1)
                let exp = exponent + 1;
                if exp > MAX_PHASE_EXPONENT {
                    return None;
                }
                let modulus = 1i128 << exp;
                let num = (numerator as i128).rem_euclid(modulus) as u64;
                DyadicPhase::new(num, exp).ok()
            }
            Angle::Radians(_) => None,
        }
    }

    /// Renders the angle with `pi` as the symbol for π, e.g. `-3*pi/8`.
    pub fn format_with(&self, pi: &str) -> String {
        match *self {
            Angle::PiDyadic {
                numerator,
                exponent,
            } => {
                if numerator == 0 {
                    return "0".to_string();
                }
                let sign = if numerator < 0 { "-" } else { "" };
                let magnitude = numerator.unsigned_abs();
                let head = if magnitude == 1 {
                    format!("{sign}{pi}")
                } else {
                    format!("{sign}{magnitude}*{pi}")
                };
                if exponent == 0 {
                    head
                } else {
                    format!("{head}/{}", 1u64 << exponent)
                }
            }
            Angle::Radians(r) => format!("{r:.15}"),
        }
    }
}

impl Neg for Angle {
    type Output = Angle;

    fn neg(self) -> Angle {
        match self {
            Angle::PiDyadic {
                numerator,
                exponent,
            } => Angle::pi_dyadic(-numerator, exponent),
            Angle::Radians(r) => Angle::Radians(-r),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with("π"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phases_reduce_to_lowest_terms() {
        let p = DyadicPhase::new(4, 4).unwrap();
        assert_eq!((p.numerator(), p.exponent()), (1, 2));
        assert_eq!(DyadicPhase::new(0, 7).unwrap(), DyadicPhase::ZERO);
        assert!(DyadicPhase::new(8, 3).is_err());
    }

    #[test]
    fn addition_wraps_at_one_cycle() {
        let three_quarters = DyadicPhase::new(3, 2).unwrap();
        let half = DyadicPhase::new(1, 1).unwrap();
        assert_eq!(three_quarters + half, DyadicPhase::new(1, 2).unwrap());
        assert_eq!(
            -DyadicPhase::new(1, 3).unwrap(),
            DyadicPhase::new(7, 3).unwrap()
        );
    }

    #[test]
    fn angle_formatting() {
        assert_eq!(Angle::pi_dyadic(1, 5).format_with("pi"), "pi/32");
        assert_eq!(Angle::pi_dyadic(-1, 4).format_with("pi"), "-pi/16");
        assert_eq!(Angle::pi_dyadic(6, 4).format_with("pi"), "3*pi/8");
        assert_eq!(Angle::PI.format_with("pi"), "pi");
        assert_eq!(Angle::ZERO.format_with("pi"), "0");
        assert_eq!(Angle::pi_dyadic(1, 5).to_string(), "π/32");
    }

    #[test]
    fn angle_to_phase_is_mod_one_cycle() {
        assert_eq!(
            Angle::pi_dyadic(-1, 1).to_phase(),
            DyadicPhase::new(3, 2).ok()
        );
        assert_eq!(
            DyadicPhase::new(1, 4).unwrap().to_angle(),
            Angle::pi_dyadic(1, 3)
        );
    }

    proptest! {
        #[test]
        fn dyadic_sum_matches_float(a in 0u64..1024, b in 0u64..65536) {
            let x = DyadicPhase::new(a, 10).unwrap();
            let y = DyadicPhase::new(b, 16).unwrap();
            let expected = (x.cycles() + y.cycles()).fract();
            prop_assert!(((x + y).cycles() - expected).abs() < 1e-15);
        }

        #[test]
        fn halving_then_doubling_round_trips(a in 0u64..(1 << 20), k in 0u32..20) {
            let x = DyadicPhase::new(a, 20).unwrap();
            prop_assert_eq!(x.div_pow2(k).unwrap().mul_pow2(k), x);
        }
    }
}
