//! Sweep axes and the Cartesian grid of scenario points they span.
//!
//! Ranges are stepped in the unit they are written in, so `"40 dBm"` to
//! `"60 dBm"` in `"5 dBm"` steps gives five points evenly spaced in dBm.

use std::fmt;

use aeris_core::environment::{LinkEnvironment, LinkParams};
use aeris_core::geometry::Point2;
use aeris_core::units::AngleUnit;
use aeris_core::Scenario;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::quantity::{self, Decibel, Dimension, Length, Power, Rate, Ratio};

const MAX_AXIS_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Height,
    UavX,
    Elements,
    ElementPower,
    /// Source and UAV transmit power together.
    TxPower,
    SnrThreshold,
    TargetRate,
    KFactor,
    ResidualSi,
    SystemGain,
    Ebn0,
    Environment,
}

impl Variable {
    pub const ALL: [Variable; 12] = [
        Variable::Height,
        Variable::UavX,
        Variable::Elements,
        Variable::ElementPower,
        Variable::TxPower,
        Variable::SnrThreshold,
        Variable::TargetRate,
        Variable::KFactor,
        Variable::ResidualSi,
        Variable::SystemGain,
        Variable::Ebn0,
        Variable::Environment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::Height => "height",
            Variable::UavX => "uav_x",
            Variable::Elements => "elements",
            Variable::ElementPower => "element_power",
            Variable::TxPower => "tx_power",
            Variable::SnrThreshold => "snr_threshold",
            Variable::TargetRate => "target_rate",
            Variable::KFactor => "k_factor",
            Variable::ResidualSi => "residual_si",
            Variable::SystemGain => "system_gain",
            Variable::Ebn0 => "ebn0",
            Variable::Environment => "environment",
        }
    }

    /// Output column, named after the SI unit the value is written in.
    pub fn column(self) -> &'static str {
        match self {
            Variable::Height => "height_m",
            Variable::UavX => "uav_x_m",
            Variable::Elements => "elements",
            Variable::ElementPower => "element_power_w",
            Variable::TxPower => "tx_power_w",
            Variable::SnrThreshold => "snr_threshold_linear",
            Variable::TargetRate => "target_rate_bps",
            Variable::KFactor => "k_factor_linear",
            Variable::ResidualSi => "residual_si_linear",
            Variable::SystemGain => "system_gain_linear",
            Variable::Ebn0 => "ebn0_db",
            Variable::Environment => "environment",
        }
    }

    /// Unit assumed for unannotated values given on the command line.
    fn default_unit(self) -> Option<&'static str> {
        match self {
            Variable::Height | Variable::UavX => Some("m"),
            Variable::ElementPower => Some("W"),
            Variable::TxPower => Some("dBm"),
            Variable::SnrThreshold | Variable::KFactor | Variable::ResidualSi | Variable::SystemGain => Some("dB"),
            Variable::Ebn0 => Some("dB"),
            Variable::TargetRate => Some("bps"),
            Variable::Elements | Variable::Environment => None,
        }
    }

    fn to_si(self, value: f64, unit: &str) -> Option<f64> {
        match self {
            Variable::Height | Variable::UavX => Length::to_si(value, unit),
            Variable::ElementPower | Variable::TxPower => Power::to_si(value, unit),
            Variable::SnrThreshold | Variable::KFactor | Variable::ResidualSi | Variable::SystemGain => {
                Ratio::to_si(value, unit)
            }
            Variable::Ebn0 => Decibel::to_si(value, unit),
            Variable::TargetRate => Rate::to_si(value, unit),
            Variable::Elements | Variable::Environment => None,
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

/// Published LoS S-curve fits, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Suburban,
    Urban,
    DenseUrban,
    HighriseUrban,
}

impl Preset {
    /// `(e, g)` of the fit.
    pub fn constants(self) -> (f64, f64) {
        match self {
            Preset::Suburban => LinkParams::SUBURBAN,
            Preset::Urban => LinkParams::URBAN,
            Preset::DenseUrban => (12.08, 0.11),
            Preset::HighriseUrban => (27.23, 0.08),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Suburban => "suburban",
            Preset::Urban => "urban",
            Preset::DenseUrban => "dense_urban",
            Preset::HighriseUrban => "highrise_urban",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        [
            Preset::Suburban,
            Preset::Urban,
            Preset::DenseUrban,
            Preset::HighriseUrban,
        ]
        .into_iter()
        .find(|p| p.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Level {
    Number(f64),
    Preset(Preset),
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Number(x) => write!(f, "{x}"),
            Level::Preset(p) => f.write_str(p.name()),
        }
    }
}

/// A TOML scalar as written in a sweep table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub variable: Variable,
    pub from: Option<Scalar>,
    pub to: Option<Scalar>,
    pub step: Option<Scalar>,
    pub values: Option<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub variable: Variable,
    pub levels: Vec<Level>,
}

/// Value and unit of one scalar, following the variable's annotation rules.
fn unit_value(variable: Variable, s: &Scalar, allow_default_unit: bool) -> Result<(f64, String), CliError> {
    let bad = |msg: String| CliError::Schema(format!("sweep `{}`: {msg}", variable.name()));
    match (variable, s) {
        (Variable::Environment, _) => Err(bad("environment takes a list of preset names".into())),
        (Variable::Elements, Scalar::Int(n)) => Ok((*n as f64, String::new())),
        (Variable::Elements, Scalar::Text(t)) => t
            .trim()
            .parse::<u32>()
            .map(|n| (f64::from(n), String::new()))
            .map_err(|_| bad(format!("`{t}` is not an element count"))),
        (Variable::Elements, Scalar::Float(x)) => Err(bad(format!("`{x}` is not an element count"))),
        (_, Scalar::Text(t)) => match quantity::split(t) {
            Ok((v, u)) => Ok((v, u.to_string())),
            Err(e) => {
                let default = variable.default_unit().filter(|_| allow_default_unit);
                match (default, t.trim().parse::<f64>()) {
                    (Some(u), Ok(v)) if v.is_finite() => Ok((v, u.to_string())),
                    _ => Err(bad(e)),
                }
            }
        },
        (_, Scalar::Int(_) | Scalar::Float(_)) => Err(bad("dimensioned values need a unit annotation".into())),
    }
}

fn to_level(variable: Variable, value: f64, unit: &str) -> Result<Level, CliError> {
    if variable == Variable::Elements {
        if value < 0.0 || value.fract() != 0.0 || value > f64::from(u32::MAX) {
            return Err(CliError::Schema(format!(
                "sweep `elements`: {value} is not an element count"
            )));
        }
        return Ok(Level::Number(value));
    }
    variable.to_si(value, unit).map(Level::Number).ok_or_else(|| {
        CliError::Schema(format!(
            "sweep `{}`: unit `{unit}` does not fit this variable",
            variable.name()
        ))
    })
}

fn range(
    variable: Variable,
    from: &Scalar,
    to: &Scalar,
    step: &Scalar,
    allow_default_unit: bool,
) -> Result<Axis, CliError> {
    let (lo, u_lo) = unit_value(variable, from, allow_default_unit)?;
    let (hi, u_hi) = unit_value(variable, to, allow_default_unit)?;
    let (dx, u_dx) = unit_value(variable, step, allow_default_unit)?;
    let name = variable.name();
    if u_lo != u_hi || u_lo != u_dx {
        return Err(CliError::Schema(format!(
            "sweep `{name}`: from, to and step must share one unit"
        )));
    }
    if !(dx > 0.0) || !(hi >= lo) {
        return Err(CliError::Schema(format!(
            "sweep `{name}`: needs from <= to and a positive step"
        )));
    }
    let count = ((hi - lo) / dx + 1e-9).floor() as usize + 1;
    if count > MAX_AXIS_POINTS {
        return Err(CliError::Schema(format!("sweep `{name}` has {count} points")));
    }
    let levels = (0..count)
        .map(|i| to_level(variable, lo + dx * i as f64, &u_lo))
        .collect::<Result<_, _>>()?;
    Ok(Axis { variable, levels })
}

impl SweepAxis {
    pub fn resolve(&self) -> Result<Axis, CliError> {
        let v = self.variable;
        let name = v.name();
        match (&self.from, &self.to, &self.step, &self.values) {
            (Some(f), Some(t), Some(s), None) => range(v, f, t, s, false),
            (None, None, None, Some(values)) => {
                if values.is_empty() {
                    return Err(CliError::Schema(format!("sweep `{name}` has no values")));
                }
                let levels = values
                    .iter()
                    .map(|s| match (v, s) {
                        (Variable::Environment, Scalar::Text(t)) => Preset::from_name(t.trim())
                            .map(Level::Preset)
                            .ok_or_else(|| CliError::Schema(format!("unknown environment preset `{t}`"))),
                        _ => {
                            let (x, u) = unit_value(v, s, false)?;
                            to_level(v, x, &u)
                        }
                    })
                    .collect::<Result<_, _>>()?;
                Ok(Axis { variable: v, levels })
            }
            _ => Err(CliError::Schema(format!(
                "sweep `{name}` needs either from/to/step or values"
            ))),
        }
    }
}

/// Parses a command-line axis `var=lo:hi:step`; an unannotated number is
/// read in the variable's customary unit (m, W, dBm, dB, bps).
pub fn parse_grid_arg(arg: &str) -> Result<Axis, CliError> {
    let (name, spec) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Schema(format!("grid `{arg}` is not of the form var=lo:hi:step")))?;
    let variable =
        Variable::from_name(name.trim()).ok_or_else(|| CliError::Schema(format!("unknown sweep variable `{name}`")))?;
    if variable == Variable::Environment {
        let levels = spec
            .split(',')
            .map(|p| {
                Preset::from_name(p.trim())
                    .map(Level::Preset)
                    .ok_or_else(|| CliError::Schema(format!("unknown environment preset `{p}`")))
            })
            .collect::<Result<_, _>>()?;
        return Ok(Axis { variable, levels });
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(CliError::Schema(format!(
            "grid `{arg}` is not of the form var=lo:hi:step"
        )));
    };
    let text = |s: &str| Scalar::Text(s.trim().to_string());
    range(variable, &text(lo), &text(hi), &text(step), true)
}

/// One scenario point together with the axis levels that produced it.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub index: usize,
    pub coordinates: Vec<(Variable, Level)>,
    pub scenario: Scenario,
}

/// Cartesian product in axis order, the first axis varying slowest.
pub fn expand(base: &Scenario, axes: &[Axis]) -> Result<Vec<GridPoint>, CliError> {
    let mut seen = Vec::new();
    for a in axes {
        if seen.contains(&a.variable) {
            return Err(CliError::Schema(format!(
                "sweep variable `{}` appears twice",
                a.variable.name()
            )));
        }
        seen.push(a.variable);
    }
    let mut combos: Vec<Vec<(Variable, Level)>> = vec![Vec::new()];
    for axis in axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.levels.iter().map(move |&l| {
                    let mut c = c.clone();
                    c.push((axis.variable, l));
                    c
                })
            })
            .collect();
    }
    combos
        .into_iter()
        .enumerate()
        .map(|(index, coordinates)| {
            let scenario = apply(base, &coordinates)?;
            Ok(GridPoint {
                index,
                coordinates,
                scenario,
            })
        })
        .collect()
}

fn with_links(s: &Scenario, f: impl Fn(&mut LinkParams)) -> Result<Scenario, CliError> {
    let env = &s.environment;
    let mut up = *env.params(aeris_core::Link::Up);
    let mut down = *env.params(aeris_core::Link::Down);
    f(&mut up);
    f(&mut down);
    let environment = LinkEnvironment::new(up, down, env.angle_unit()).map_err(CliError::from_load)?;
    Ok(s.with_environment(environment))
}

pub fn apply(base: &Scenario, coordinates: &[(Variable, Level)]) -> Result<Scenario, CliError> {
    let mut s = base.clone();
    for &(variable, level) in coordinates {
        let x = match level {
            Level::Number(x) => x,
            Level::Preset(p) => {
                if s.environment.angle_unit() != AngleUnit::Degrees {
                    return Err(CliError::Schema(format!(
                        "environment preset `{}` is a degree fit; set angle_unit = \"deg\"",
                        p.name()
                    )));
                }
                let (e, g) = p.constants();
                s = with_links(&s, |l| {
                    l.e = e;
                    l.g = g;
                })?;
                continue;
            }
        };
        let mut radio = s.radio;
        s = match variable {
            Variable::Height => s.with_height(x).map_err(CliError::from_load)?,
            Variable::UavX => {
                let y = s.geometry.uav().y;
                s.with_uav(Point2::new(x, y))
            }
            Variable::Elements => s.with_elements(x as u32),
            Variable::ElementPower => s.with_element_power(x),
            Variable::TxPower => {
                radio.p_u = x;
                radio.p_d = x;
                s.with_radio(radio)
            }
            Variable::SnrThreshold => {
                radio.snr_threshold = x;
                s.with_radio(radio)
            }
            Variable::TargetRate => s.with_radio(radio.with_target_rate(x)),
            Variable::KFactor => with_links(&s, |l| l.k_factor = x)?,
            Variable::ResidualSi => {
                radio.residual_si = x * radio.noise_power();
                s.with_radio(radio)
            }
            Variable::SystemGain => {
                radio.system_gain = x;
                s.with_radio(radio)
            }
            Variable::Ebn0 => {
                radio.system_gain = aeris_core::units::ebn0_db_to_system_gain(x, radio.noise_psd);
                s.with_radio(radio)
            }
            Variable::Environment => unreachable!("environment levels are presets"),
        };
    }
    Scenario::new(s.geometry, s.environment, s.radio, s.irs, s.power, s.conventions).map_err(CliError::from_load)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_step_in_their_own_unit() {
        let a = parse_grid_arg("tx_power=40:60:10").unwrap();
        let w: Vec<f64> = a
            .levels
            .iter()
            .map(|l| match l {
                Level::Number(x) => *x,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(w.len(), 3);
        assert!((w[0] - 10.0).abs() < 1e-12 && (w[2] - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn grid_arg_errors() {
        assert!(parse_grid_arg("height=50:10:5").is_err());
        assert!(parse_grid_arg("bogus=1:2:1").is_err());
        assert!(parse_grid_arg("height=50 m:100 km:5 m").is_err());
        assert_eq!(parse_grid_arg("elements=20:400:95").unwrap().levels.len(), 5);
    }
}
