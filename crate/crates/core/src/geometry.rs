//! Ground-node and UAV placement.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Hop of the relayed path: `Up` is source to UAV, `Down` is UAV to destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Up,
    Down,
}

impl Link {
    pub const BOTH: [Link; 2] = [Link::Up, Link::Down];

    pub fn index(self) -> usize {
        match self {
            Link::Up => 0,
            Link::Down => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Link::Up => "u",
            Link::Down => "d",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Elevation angle in radians seen from a ground node.
pub fn elevation_angle(h: f64, horizontal_offset: f64) -> Result<f64> {
    if !(h >= 0.0 && horizontal_offset >= 0.0) || !h.is_finite() || !horizontal_offset.is_finite() {
        return Err(Error::Geometry(format!(
            "height {h} and offset {horizontal_offset} must be finite and non-negative"
        )));
    }
    if h == 0.0 && horizontal_offset == 0.0 {
        return Err(Error::Geometry("UAV coincides with the ground node".into()));
    }
    Ok(h.atan2(horizontal_offset))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGeometry {
    source: Point2,
    dest: Point2,
    uav: Point2,
    height: f64,
    h_min: f64,
    h_max: f64,
}

impl ScenarioGeometry {
    pub fn new(source: Point2, dest: Point2, uav: Point2, height: f64, h_min: f64, h_max: f64) -> Result<Self> {
        require_positive("h_min", h_min)?;
        if !(h_max.is_finite() && h_max >= h_min) {
            return Err(Error::invalid(
                "h_max",
                format!("must be >= h_min ({h_min}), got {h_max}"),
            ));
        }
        let geometry = Self {
            source,
            dest,
            uav,
            height: h_min,
            h_min,
            h_max,
        };
        for p in [source, dest, uav] {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(Error::invalid("position", "coordinates must be finite"));
            }
        }
        geometry.with_height(height)
    }

    pub fn with_height(&self, height: f64) -> Result<Self> {
        if !(height >= self.h_min && height <= self.h_max) {
            return Err(Error::invalid(
                "height",
                format!("{height} outside [{}, {}]", self.h_min, self.h_max),
            ));
        }
        Ok(Self { height, ..self.clone() })
    }

    pub fn with_uav(&self, uav: Point2) -> Self {
        Self { uav, ..self.clone() }
    }

    pub fn source(&self) -> Point2 {
        self.source
    }

    pub fn dest(&self) -> Point2 {
        self.dest
    }

    pub fn uav(&self) -> Point2 {
        self.uav
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Horizontal offset `ẑ_i` between the UAV and the ground end of `link`.
    pub fn offset(&self, link: Link) -> f64 {
        match link {
            Link::Up => self.uav.distance(self.source),
            Link::Down => self.uav.distance(self.dest),
        }
    }

    /// Slant distance `d_i = sqrt(ẑ_i² + h²)`.
    pub fn slant_distance(&self, link: Link) -> f64 {
        self.offset(link).hypot(self.height)
    }

    pub fn elevation(&self, link: Link) -> Result<f64> {
        elevation_angle(self.height, self.offset(link))
    }
}
