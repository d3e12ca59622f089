//! Rink geometry, coordinate frames, and the label enumerations: direction
//! sectors, zone sections, deployment, and the winner/loser perspective flip.
//!
//! Coordinates are in feet, rink-centered. Dot identifiers are relative to
//! the home team's attacking direction; with `home_attack_sign = +1` the home
//! team attacks +x and "left" is +y. Resolving the opposite sign applies a
//! point reflection so left stays the taker-relative left.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// The center dot has no inside direction, so no taker frame exists.
    #[error("center dot has no taker frame")]
    CenterDotFrame,
    /// First-touch displacement of zero has no direction.
    #[error("zero displacement has no direction sector")]
    ZeroDisplacement,
    #[error("unknown dot identifier: {0}")]
    UnknownDot(String),
}

/// The 9 face-off dots, named in the home team's attacking frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DotId {
    /// Center ice.
    C,
    /// Neutral zone, left, north (home's attacking side of the red line).
    NzlN,
    /// Neutral zone, right, north.
    NzrN,
    /// Neutral zone, left, south.
    NzlS,
    /// Neutral zone, right, south.
    NzrS,
    /// Home offensive zone, left.
    Ozl,
    /// Home offensive zone, right.
    Ozr,
    /// Home defensive zone, left.
    Dzl,
    /// Home defensive zone, right.
    Dzr,
}

impl DotId {
    pub const ALL: [DotId; 9] = [
        DotId::C,
        DotId::NzlN,
        DotId::NzrN,
        DotId::NzlS,
        DotId::NzrS,
        DotId::Ozl,
        DotId::Ozr,
        DotId::Dzl,
        DotId::Dzr,
    ];

    pub fn parse(s: &str) -> Result<DotId, ModelError> {
        match s {
            "C" => Ok(DotId::C),
            "NZL_N" => Ok(DotId::NzlN),
            "NZR_N" => Ok(DotId::NzrN),
            "NZL_S" => Ok(DotId::NzlS),
            "NZR_S" => Ok(DotId::NzrS),
            "OZL" => Ok(DotId::Ozl),
            "OZR" => Ok(DotId::Ozr),
            "DZL" => Ok(DotId::Dzl),
            "DZR" => Ok(DotId::Dzr),
            other => Err(ModelError::UnknownDot(other.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DotId::C => "C",
            DotId::NzlN => "NZL_N",
            DotId::NzrN => "NZR_N",
            DotId::NzlS => "NZL_S",
            DotId::NzrS => "NZR_S",
            DotId::Ozl => "OZL",
            DotId::Ozr => "OZR",
            DotId::Dzl => "DZL",
            DotId::Dzr => "DZR",
        }
    }

    pub fn is_center(&self) -> bool {
        matches!(self, DotId::C)
    }
}

impl fmt::Display for DotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rink dimensions and dot positions, in feet. Dot positions are stored in
/// the home-attacks-+x frame and resolved against an attack sign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RinkSpec {
    pub length: f64,
    pub width: f64,
    pub dot_positions: BTreeMap<DotId, (f64, f64)>,
}

impl Default for RinkSpec {
    fn default() -> Self {
        let mut dots = BTreeMap::new();
        dots.insert(DotId::C, (0.0, 0.0));
        dots.insert(DotId::NzlN, (20.0, 22.0));
        dots.insert(DotId::NzrN, (20.0, -22.0));
        dots.insert(DotId::NzlS, (-20.0, 22.0));
        dots.insert(DotId::NzrS, (-20.0, -22.0));
        dots.insert(DotId::Ozl, (69.0, 22.0));
        dots.insert(DotId::Ozr, (69.0, -22.0));
        dots.insert(DotId::Dzl, (-69.0, 22.0));
        dots.insert(DotId::Dzr, (-69.0, -22.0));
        RinkSpec {
            length: 200.0,
            width: 85.0,
            dot_positions: dots,
        }
    }
}

impl RinkSpec {
    /// Absolute rink position of a dot given the home attacking direction.
    pub fn resolve(&self, dot: DotId, home_attack_sign: i8) -> Result<(f64, f64), ModelError> {
        let (x, y) = self
            .dot_positions
            .get(&dot)
            .copied()
            .ok_or_else(|| ModelError::UnknownDot(dot.to_string()))?;
        let s = f64::from(home_attack_sign.signum());
        Ok((x * s, y * s))
    }

    pub fn half_length(&self) -> f64 {
        self.length / 2.0
    }

    pub fn half_width(&self) -> f64 {
        self.width / 2.0
    }

    pub fn in_bounds(&self, x: f64, y: f64) -> bool {
        x.abs() <= self.half_length() && y.abs() <= self.half_width()
    }
}

/// The 8 45-degree bins in the taker's frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DirectionSector {
    Forward,
    ForwardInside,
    Inside,
    BackwardInside,
    Backward,
    BackwardOutside,
    Outside,
    ForwardOutside,
}

impl DirectionSector {
    pub const ALL: [DirectionSector; 8] = [
        DirectionSector::Forward,
        DirectionSector::ForwardInside,
        DirectionSector::Inside,
        DirectionSector::BackwardInside,
        DirectionSector::Backward,
        DirectionSector::BackwardOutside,
        DirectionSector::Outside,
        DirectionSector::ForwardOutside,
    ];

    /// Sector index counterclockwise from Forward (toward Inside).
    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|d| d == self).unwrap()
    }

    pub fn from_index(i: usize) -> DirectionSector {
        Self::ALL[i % 8]
    }

    /// 180-degree flip: forward family swaps with backward family while
    /// Inside and Outside map to themselves.
    pub fn reversed(&self) -> DirectionSector {
        match self {
            DirectionSector::Forward => DirectionSector::Backward,
            DirectionSector::ForwardInside => DirectionSector::BackwardInside,
            DirectionSector::Inside => DirectionSector::Inside,
            DirectionSector::BackwardInside => DirectionSector::ForwardInside,
            DirectionSector::Backward => DirectionSector::Forward,
            DirectionSector::BackwardOutside => DirectionSector::ForwardOutside,
            DirectionSector::Outside => DirectionSector::Outside,
            DirectionSector::ForwardOutside => DirectionSector::BackwardOutside,
        }
    }
}

impl fmt::Display for DirectionSector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DirectionSector::Forward => "Forward",
            DirectionSector::ForwardInside => "ForwardInside",
            DirectionSector::Inside => "Inside",
            DirectionSector::BackwardInside => "BackwardInside",
            DirectionSector::Backward => "Backward",
            DirectionSector::BackwardOutside => "BackwardOutside",
            DirectionSector::Outside => "Outside",
            DirectionSector::ForwardOutside => "ForwardOutside",
        };
        f.write_str(s)
    }
}

/// Zone sections from the taker's perspective. The neutral zone is split at
/// the red line: north is the attacking side, south the defending side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ZoneSection {
    OffensiveZone,
    DefensiveZone,
    NeutralNorth,
    NeutralSouth,
}

impl ZoneSection {
    pub const ALL: [ZoneSection; 4] = [
        ZoneSection::OffensiveZone,
        ZoneSection::DefensiveZone,
        ZoneSection::NeutralNorth,
        ZoneSection::NeutralSouth,
    ];

    pub fn reversed(&self) -> ZoneSection {
        match self {
            ZoneSection::OffensiveZone => ZoneSection::DefensiveZone,
            ZoneSection::DefensiveZone => ZoneSection::OffensiveZone,
            ZoneSection::NeutralNorth => ZoneSection::NeutralSouth,
            ZoneSection::NeutralSouth => ZoneSection::NeutralNorth,
        }
    }
}

impl fmt::Display for ZoneSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ZoneSection::OffensiveZone => "OffensiveZone",
            ZoneSection::DefensiveZone => "DefensiveZone",
            ZoneSection::NeutralNorth => "NeutralNorth",
            ZoneSection::NeutralSouth => "NeutralSouth",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Deployment {
    Strong,
    Weak,
}

impl fmt::Display for Deployment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Deployment::Strong => "Strong",
            Deployment::Weak => "Weak",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Handedness {
    Left,
    Right,
}

impl Handedness {
    pub fn parse(s: &str) -> Option<Handedness> {
        match s {
            "L" | "l" => Some(Handedness::Left),
            "R" | "r" => Some(Handedness::Right),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Handedness::Left => "L",
            Handedness::Right => "R",
        }
    }
}

/// A lateral side in the taker's own orientation (used both for the boards
/// side of a dot and for the L/R half of the ice in reports).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(&self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "Left",
            Side::Right => "Right",
        })
    }
}

/// The taker's local coordinate frame at a non-center dot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TakerFrame {
    pub origin: (f64, f64),
    /// Unit vector toward the taker's attacking net.
    pub forward: (f64, f64),
    /// Unit vector from the dot toward the rink's long axis (y = 0).
    pub inside: (f64, f64),
    pub boards_side: Side,
}

impl TakerFrame {
    /// Project a rink displacement onto (forward, inside) components.
    pub fn project(&self, dx: f64, dy: f64) -> (f64, f64) {
        let u = dx * self.forward.0 + dy * self.forward.1;
        let v = dx * self.inside.0 + dy * self.inside.1;
        (u, v)
    }
}

/// Build the taker frame for a non-center dot. `attack_sign` gives the
/// taker's attacking direction along x.
pub fn build_taker_frame(dot: (f64, f64), attack_sign: i8) -> Result<TakerFrame, ModelError> {
    if dot.1 == 0.0 {
        return Err(ModelError::CenterDotFrame);
    }
    let s = f64::from(attack_sign.signum());
    let forward = (s, 0.0);
    let inside = (0.0, -dot.1.signum());
    // Taker's left is forward rotated +90 degrees; boards_side is Left when
    // the outside direction (-inside) lies on that left.
    let left = (-forward.1, forward.0);
    let outside = (-inside.0, -inside.1);
    let boards_side = if outside.0 * left.0 + outside.1 * left.1 > 0.0 {
        Side::Left
    } else {
        Side::Right
    };
    Ok(TakerFrame {
        origin: dot,
        forward,
        inside,
        boards_side,
    })
}

/// Bin a taker-frame displacement into its 45-degree sector.
///
/// Sectors are half-open: Forward covers [-22.5, 22.5), ForwardInside
/// [22.5, 67.5), and so on counterclockwise, with Backward owning 180.
pub fn direction_sector(u: f64, v: f64) -> Result<DirectionSector, ModelError> {
    if u == 0.0 && v == 0.0 {
        return Err(ModelError::ZeroDisplacement);
    }
    Ok(sector_from_degrees(v.atan2(u).to_degrees()))
}

/// Sector for an exact taker-frame angle in degrees. Boundaries are
/// half-open: each sector owns its counter-clockwise (lower) edge, so 22.5
/// is ForwardInside and -22.5 is Forward.
pub fn sector_from_degrees(theta: f64) -> DirectionSector {
    let idx = ((theta + 22.5).div_euclid(45.0) as i64).rem_euclid(8) as usize;
    DirectionSector::from_index(idx)
}

/// Zone section of a dot from the perspective of a taker attacking in
/// absolute direction `taker_attack_sign`, with dot ids resolved against
/// `home_attack_sign`. Center ice maps to no section.
pub fn zone_section(
    dot: DotId,
    taker_attack_sign: i8,
    home_attack_sign: i8,
) -> Option<ZoneSection> {
    // Sign of the dot's absolute x, and whether it is an end-zone dot.
    let (base_x_sign, end_zone) = match dot {
        DotId::C => return None,
        DotId::Ozl | DotId::Ozr => (1, true),
        DotId::Dzl | DotId::Dzr => (-1, true),
        DotId::NzlN | DotId::NzrN => (1, false),
        DotId::NzlS | DotId::NzrS => (-1, false),
    };
    let attacking_side = base_x_sign * home_attack_sign.signum() * taker_attack_sign.signum() > 0;
    Some(match (end_zone, attacking_side) {
        (true, true) => ZoneSection::OffensiveZone,
        (true, false) => ZoneSection::DefensiveZone,
        (false, true) => ZoneSection::NeutralNorth,
        (false, false) => ZoneSection::NeutralSouth,
    })
}

/// Strong iff the taker's handedness matches the boards side of the dot.
pub fn deployment(hand: Handedness, boards_side: Side) -> Deployment {
    let hand_side = match hand {
        Handedness::Left => Side::Left,
        Handedness::Right => Side::Right,
    };
    if hand_side == boards_side {
        Deployment::Strong
    } else {
        Deployment::Weak
    }
}

/// Flip a (zone, side, direction) triple from the winner's perspective to
/// the loser's. This is an involution.
pub fn reverse_perspective(
    zone: ZoneSection,
    side: Side,
    dir: DirectionSector,
) -> (ZoneSection, Side, DirectionSector) {
    (zone.reversed(), side.flipped(), dir.reversed())
}
