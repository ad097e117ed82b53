//! Canonical shortest paths: all horizontal moves first, then vertical.

use super::{manhattan, Point};

/// Node reached after `step` moves along the canonical path from `from` to
/// `to`. `step` is clamped to the path length.
pub fn lpath_position(from: Point, to: Point, step: u64) -> Point {
    let dx = from.x.abs_diff(to.x);
    let step = step.min(manhattan(from, to));
    if step <= dx {
        let x = if to.x >= from.x {
            from.x + step as i64
        } else {
            from.x - step as i64
        };
        Point::new(x, from.y)
    } else {
        let s = (step - dx) as i64;
        let y = if to.y >= from.y { from.y + s } else { from.y - s };
        Point::new(to.x, y)
    }
}

/// The nodes visited walking from `from` to `to`, excluding `from`.
pub fn lpath(from: Point, to: Point) -> Vec<Point> {
    (1..=manhattan(from, to))
        .map(|s| lpath_position(from, to, s))
        .collect()
}

/// 1-based step at which the canonical path from `from` to `to` visits
/// `target`, if it does.
pub fn lpath_hit_index(from: Point, to: Point, target: Point) -> Option<u64> {
    let dx = from.x.abs_diff(to.x);
    // horizontal leg, excluding `from`
    if target.y == from.y && target.x != from.x && within(from.x, to.x, target.x) {
        return Some(from.x.abs_diff(target.x));
    }
    // vertical leg, excluding the corner
    if target.x == to.x && target.y != from.y && within(from.y, to.y, target.y) {
        return Some(dx + from.y.abs_diff(target.y));
    }
    None
}

fn within(a: i64, b: i64, v: i64) -> bool {
    a.min(b) <= v && v <= a.max(b)
}
