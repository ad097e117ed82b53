//! A leg is a contiguous piece of an agent trajectory: either a canonical
//! shortest walk or a window of a spiral around some center. Every
//! trajectory produced by the search protocols is a concatenation of legs.

use super::{lpath_hit_index, lpath_position, manhattan, spiral_hit_index_wide, spiral_position};
use super::{Point, SpiralWalk};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    /// Canonical x-first walk; `from` itself is not revisited.
    Walk { from: Point, to: Point },
    /// Spiral steps `start+1 ..= end` around `center`. The agent stands on
    /// `center + spiral_position(start)` when the leg begins.
    Spiral { center: Point, start: u64, end: u64 },
}

impl Leg {
    pub fn len(&self) -> u64 {
        match *self {
            Leg::Walk { from, to } => manhattan(from, to),
            Leg::Spiral { start, end, .. } => end - start,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start_point(&self) -> Point {
        match *self {
            Leg::Walk { from, .. } => from,
            Leg::Spiral { center, start, .. } => center + spiral_position(start),
        }
    }

    pub fn end_point(&self) -> Point {
        match *self {
            Leg::Walk { to, .. } => to,
            Leg::Spiral { center, end, .. } => center + spiral_position(end),
        }
    }

    /// 1-based offset within the leg of the first visit to `target`.
    pub fn hit_offset(&self, target: Point) -> Option<u64> {
        match *self {
            Leg::Walk { from, to } => lpath_hit_index(from, to, target),
            Leg::Spiral { center, start, end } => {
                let offset = target.checked_sub(center)?;
                let ring = offset.norm_inf() as u128;
                if ring == 0 {
                    return None;
                }
                // the L∞ square of radius ring-1 uses indices 0..(2ring-1)²
                if (2 * ring - 1) * (2 * ring - 1) > end as u128 {
                    return None;
                }
                let idx = spiral_hit_index_wide(offset);
                (idx > start as u128 && idx <= end as u128).then(|| (idx - start as u128) as u64)
            }
        }
    }

    /// Splits after `steps` moves (`0 < steps < len`).
    pub fn split_at(&self, steps: u64) -> (Leg, Leg) {
        debug_assert!(steps > 0 && steps < self.len());
        match *self {
            Leg::Walk { from, to } => {
                let mid = lpath_position(from, to, steps);
                (Leg::Walk { from, to: mid }, Leg::Walk { from: mid, to })
            }
            Leg::Spiral { center, start, end } => {
                let mid = start + steps;
                (
                    Leg::Spiral { center, start, end: mid },
                    Leg::Spiral { center, start: mid, end },
                )
            }
        }
    }

    /// Node-by-node walk of the leg, independent of the closed forms.
    pub fn steps(&self) -> LegSteps {
        match *self {
            Leg::Walk { from, to } => LegSteps::Walk { pos: from, to },
            Leg::Spiral { center, start, end } => {
                let mut walk = SpiralWalk::new();
                for _ in 0..start {
                    walk.next();
                }
                LegSteps::Spiral {
                    center,
                    walk,
                    remaining: end - start,
                }
            }
        }
    }
}

pub enum LegSteps {
    Walk { pos: Point, to: Point },
    Spiral { center: Point, walk: SpiralWalk, remaining: u64 },
}

impl Iterator for LegSteps {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        match self {
            LegSteps::Walk { pos, to } => {
                if pos.x != to.x {
                    pos.x += (to.x - pos.x).signum();
                } else if pos.y != to.y {
                    pos.y += (to.y - pos.y).signum();
                } else {
                    return None;
                }
                Some(*pos)
            }
            LegSteps::Spiral { center, walk, remaining } => {
                if *remaining == 0 {
                    return None;
                }
                *remaining -= 1;
                walk.next().map(|o| *center + o)
            }
        }
    }
}
