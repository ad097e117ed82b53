//! Geometry of the integer grid `Z²` under the Manhattan metric.
//!
//! Everything here is a pure function of its arguments. Random sampling
//! helpers take the caller's stream by `&mut` and never retain it.

mod leg;
mod path;
mod spiral;

use std::fmt;
use std::ops::{Add, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use leg::{Leg, LegSteps};
pub use path::{lpath, lpath_hit_index, lpath_position};
pub use spiral::{
    spiral_cover_radius, spiral_cover_steps, spiral_hit_index, spiral_hit_index_wide,
    spiral_position, SpiralWalk,
};

/// A node of the grid. The source sits at the origin.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Manhattan distance to the origin.
    pub fn norm1(self) -> u64 {
        self.x.unsigned_abs() + self.y.unsigned_abs()
    }

    /// Chebyshev (L∞) distance to the origin.
    pub fn norm_inf(self) -> u64 {
        self.x.unsigned_abs().max(self.y.unsigned_abs())
    }

    pub fn checked_sub(self, rhs: Point) -> Option<Point> {
        Some(Point::new(self.x.checked_sub(rhs.x)?, self.y.checked_sub(rhs.y)?))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn manhattan(u: Point, v: Point) -> u64 {
    u.x.abs_diff(v.x) + u.y.abs_diff(v.y)
}

/// Number of nodes at Manhattan distance at most `r` from a node.
pub fn ball_size(r: u64) -> u64 {
    2 * r * r + 2 * r + 1
}

/// The `idx`-th node (counterclockwise from `(d, 0)`) on the sphere of
/// radius `d` around the origin.
pub fn nth_node_at_distance(d: u64, idx: u64) -> Result<Point> {
    if d == 0 {
        return Err(Error::Precondition("sphere radius must be at least 1".into()));
    }
    let bound = d.checked_mul(4).ok_or_else(|| Error::Overflow("sphere size".into()))?;
    if idx >= bound {
        return Err(Error::Range { index: idx, bound });
    }
    let d = d as i64;
    let (quadrant, r) = ((idx / d as u64) as i64, (idx % d as u64) as i64);
    Ok(match quadrant {
        0 => Point::new(d - r, r),
        1 => Point::new(-r, d - r),
        2 => Point::new(r - d, -r),
        _ => Point::new(r, r - d),
    })
}

/// Uniform node on the sphere of radius `d >= 1`.
pub fn sample_sphere<R: Rng + ?Sized>(d: u64, rng: &mut R) -> Point {
    let idx = rng.random_range(0..4 * d);
    nth_node_at_distance(d, idx).expect("index drawn in range")
}

/// Exactly uniform node of the ball of radius `r`, by rejection from the
/// bounding square. Acceptance probability is above one half.
pub fn sample_uniform_ball<R: Rng + ?Sized>(r: u64, rng: &mut R) -> Point {
    if r == 0 {
        return Point::ORIGIN;
    }
    let r = r as i64;
    loop {
        let x = rng.random_range(-r..=r);
        let y = rng.random_range(-r..=r);
        if x.unsigned_abs() + y.unsigned_abs() <= r as u64 {
            return Point::new(x, y);
        }
    }
}
