use super::grid::Grid;
use crate::error::{Error, Result};

/// Closed subinterval `[lo, hi]` of `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Node indicator; nodes on the boundary belong to the interval.
    pub fn mask(&self, grid: &Grid) -> Vec<f64> {
        grid.nodes()
            .iter()
            .map(|&x| if self.contains(x) { 1.0 } else { 0.0 })
            .collect()
    }
}

/// The leader region `ω`, follower regions `ω₁, ω₂` and the common
/// observation region `ω_d`, together with their node masks.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlLayout {
    pub omega: Interval,
    pub omega1: Interval,
    pub omega2: Interval,
    pub omega_d: Interval,
    masks: [Vec<f64>; 4],
}

/// Selects one of the four regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Leader,
    Follower1,
    Follower2,
    Observation,
}

impl Region {
    /// Region of follower `i`, counted from zero.
    pub fn follower(i: usize) -> Region {
        match i {
            0 => Region::Follower1,
            1 => Region::Follower2,
            _ => panic!("follower index must be 0 or 1, got {i}"),
        }
    }
}

impl ControlLayout {
    pub fn new(
        grid: &Grid,
        omega: Interval,
        omega1: Interval,
        omega2: Interval,
        omega_d: Interval,
    ) -> Result<Self> {
        let named = [
            ("omega", omega),
            ("omega1", omega1),
            ("omega2", omega2),
            ("omega_d", omega_d),
        ];
        for (key, iv) in named {
            if !(iv.lo > 0.0 && iv.hi < 1.0 && iv.lo < iv.hi) {
                return Err(Error::config(
                    format!("regions.{key}"),
                    format!("[{}, {}] is not a non-empty subinterval of (0,1)", iv.lo, iv.hi),
                ));
            }
        }
        let masks = [
            omega.mask(grid),
            omega1.mask(grid),
            omega2.mask(grid),
            omega_d.mask(grid),
        ];
        for ((key, _), m) in named.iter().zip(&masks) {
            if m.iter().all(|&v| v == 0.0) {
                return Err(Error::config(
                    format!("regions.{key}"),
                    "contains no grid node",
                ));
            }
        }
        let overlap = |a: &[f64], b: &[f64]| a.iter().zip(b).any(|(x, y)| x * y > 0.0);
        for (i, key) in [(1, "omega1"), (2, "omega2")] {
            if overlap(&masks[0], &masks[i]) {
                return Err(Error::config(
                    format!("regions.{key}"),
                    "violates ωᵢ∩ω=∅ (follower region meets the leader region)",
                ));
            }
        }
        if !overlap(&masks[0], &masks[3]) {
            return Err(Error::config(
                "regions.omega_d",
                "violates ω_d∩ω≠∅ (observation region misses the leader region)",
            ));
        }
        Ok(ControlLayout {
            omega,
            omega1,
            omega2,
            omega_d,
            masks,
        })
    }

    pub fn mask(&self, region: Region) -> &[f64] {
        match region {
            Region::Leader => &self.masks[0],
            Region::Follower1 => &self.masks[1],
            Region::Follower2 => &self.masks[2],
            Region::Observation => &self.masks[3],
        }
    }

    pub fn interval(&self, region: Region) -> Interval {
        match region {
            Region::Leader => self.omega,
            Region::Follower1 => self.omega1,
            Region::Follower2 => self.omega2,
            Region::Observation => self.omega_d,
        }
    }

    /// Nodes of `ω_d ∩ ω`.
    pub fn observation_leader_overlap(&self) -> Vec<f64> {
        self.masks[0]
            .iter()
            .zip(&self.masks[3])
            .map(|(a, b)| a * b)
            .collect()
    }
}
