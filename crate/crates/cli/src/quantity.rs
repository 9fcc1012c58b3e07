//! Unit-annotated scalars such as `"350 m"` or `"55 dBm"`.
//!
//! A dimensioned field is a string holding a number and a unit separated by
//! whitespace. Each dimension accepts a fixed list of units and converts to
//! the linear SI value used by the core crate. Bare numbers are rejected.

use std::fmt;
use std::marker::PhantomData;

use aeris_core::units::{db_to_linear, dbm_to_watts};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

pub trait Dimension {
    const NAME: &'static str;
    const UNITS: &'static [&'static str];
    /// Linear SI value of `value` expressed in `unit`, if the unit belongs here.
    fn to_si(value: f64, unit: &str) -> Option<f64>;
}

/// Splits `"<number> <unit>"`.
pub fn split(text: &str) -> Result<(f64, &str), String> {
    let text = text.trim();
    let Some((num, unit)) = text.split_once(char::is_whitespace) else {
        return Err(format!("`{text}` has no unit annotation"));
    };
    let value: f64 = num
        .parse()
        .map_err(|_| format!("`{num}` in `{text}` is not a number"))?;
    if !value.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok((value, unit.trim()))
}

pub fn parse<D: Dimension>(text: &str) -> Result<f64, String> {
    let (value, unit) = split(text)?;
    D::to_si(value, unit).ok_or_else(|| {
        format!(
            "unit `{unit}` is not a {} unit (expected one of {})",
            D::NAME,
            D::UNITS.join(", ")
        )
    })
}

/// A deserialized quantity of dimension `D`, stored in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q<D> {
    pub si: f64,
    _dim: PhantomData<D>,
}

impl<D> Q<D> {
    pub fn new(si: f64) -> Self {
        Self { si, _dim: PhantomData }
    }
}

impl<'de, D: Dimension> Deserialize<'de> for Q<D> {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        struct V<D>(PhantomData<D>);
        impl<D: Dimension> Visitor<'_> for V<D> {
            type Value = Q<D>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a {} quantity string such as \"1 {}\"", D::NAME, D::UNITS[0])
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Q<D>, E> {
                parse::<D>(s).map(Q::new).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q<D>, E> {
                Err(E::custom(format!("`{v}` has no unit annotation ({})", D::NAME)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q<D>, E> {
                Err(E::custom(format!("`{v}` has no unit annotation ({})", D::NAME)))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q<D>, E> {
                Err(E::custom(format!("`{v}` has no unit annotation ({})", D::NAME)))
            }
        }
        deserializer.deserialize_any(V(PhantomData))
    }
}

macro_rules! dimension {
    ($name:ident, $label:literal, [$($unit:literal => $conv:expr),+ $(,)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name;

        impl Dimension for $name {
            const NAME: &'static str = $label;
            const UNITS: &'static [&'static str] = &[$($unit),+];

            fn to_si(value: f64, unit: &str) -> Option<f64> {
                let f: fn(f64) -> f64 = match unit {
                    $($unit => $conv,)+
                    _ => return None,
                };
                Some(f(value))
            }
        }
    };
}

dimension!(Length, "length", ["m" => |x| x, "km" => |x| x * 1e3]);
dimension!(Power, "power", [
    "W" => |x| x,
    "mW" => |x| x * 1e-3,
    "dBm" => dbm_to_watts,
    "dBW" => db_to_linear,
]);
dimension!(Frequency, "frequency", [
    "Hz" => |x| x,
    "kHz" => |x| x * 1e3,
    "MHz" => |x| x * 1e6,
    "GHz" => |x| x * 1e9,
]);
dimension!(PowerDensity, "power spectral density", [
    "W/Hz" => |x| x,
    "dBm/Hz" => |x| dbm_to_watts(x),
    "dBW/Hz" => db_to_linear,
]);
dimension!(Ratio, "ratio", ["dB" => db_to_linear, "linear" => |x| x]);
dimension!(Rate, "rate", [
    "bps" => |x| x,
    "kbps" => |x| x * 1e3,
    "Mbps" => |x| x * 1e6,
]);
dimension!(Energy, "energy", [
    "J" => |x| x,
    "kJ" => |x| x * 1e3,
    "Wh" => |x| x * 3600.0,
]);
dimension!(Mass, "mass", ["kg" => |x| x, "g" => |x| x * 1e-3]);
dimension!(Area, "area", ["m^2" => |x| x]);
dimension!(AngularSpeed, "angular speed", ["rad/s" => |x| x, "rpm" => |x| x * std::f64::consts::PI / 30.0]);
dimension!(MassDensity, "mass density", ["kg/m^3" => |x| x]);
dimension!(Acceleration, "acceleration", ["m/s^2" => |x| x]);

// `E_b/N₀` stays in dB; the core unit layer maps it to a system gain.
dimension!(Decibel, "decibel", ["dB" => |x| x]);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(parse::<Length>("2 km").unwrap(), 2000.0);
        assert!((parse::<Power>("30 dBm").unwrap() - 1.0).abs() < 1e-12);
        assert!((parse::<Ratio>("10 dB").unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(parse::<Frequency>("5 MHz").unwrap(), 5e6);
    }

    #[test]
    fn rejects_missing_or_foreign_units() {
        assert!(parse::<Length>("350").is_err());
        assert!(parse::<Length>("350 W").is_err());
        assert!(parse::<Power>("abc dBm").is_err());
    }
}
