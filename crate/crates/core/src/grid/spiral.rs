//! The canonical counterclockwise square spiral.
//!
//! Runs are E1, N1, W2, S2, E3, N3, W4, S4, ... The runs of length `L`
//! form a "pair"; after all pairs up to `L` the walker has taken
//! `L(L+1)` steps and stands at `(m+1, m+1)` for `L = 2m+1` or at
//! `(-m, -m)` for `L = 2m`. After `(2R+1)² - 1` steps exactly the L∞ ball
//! of radius `R` has been visited.

use super::Point;

const EAST: (i64, i64) = (1, 0);
const NORTH: (i64, i64) = (0, 1);
const WEST: (i64, i64) = (-1, 0);
const SOUTH: (i64, i64) = (0, -1);

fn pair_corner(pairs: u64) -> Point {
    if pairs == 0 {
        Point::ORIGIN
    } else if pairs % 2 == 1 {
        let m = ((pairs - 1) / 2) as i64;
        Point::new(m + 1, m + 1)
    } else {
        let m = (pairs / 2) as i64;
        Point::new(-m, -m)
    }
}

/// Offset from the spiral origin after `n` steps.
pub fn spiral_position(n: u64) -> Point {
    let n = n as u128;
    // largest L with L(L+1) <= n
    let mut pairs = ((4 * n + 1).isqrt() - 1) / 2;
    while pairs * (pairs + 1) > n {
        pairs -= 1;
    }
    while (pairs + 1) * (pairs + 2) <= n {
        pairs += 1;
    }
    let start = pair_corner(pairs as u64);
    let rem = (n - pairs * (pairs + 1)) as i64;
    let len = (pairs + 1) as i64;
    let (first, second) = if len % 2 == 1 { (EAST, NORTH) } else { (WEST, SOUTH) };
    let (a, b) = if rem <= len { (rem, 0) } else { (len, rem - len) };
    Point::new(
        start.x + first.0 * a + second.0 * b,
        start.y + first.1 * a + second.1 * b,
    )
}

/// Inverse of [`spiral_position`] with a 128-bit result, valid for every
/// offset whose coordinates fit in `i64`.
pub fn spiral_hit_index_wide(offset: Point) -> u128 {
    let (x, y) = (offset.x as i128, offset.y as i128);
    if x == 0 && y == 0 {
        return 0;
    }
    // east run of pair 2m+1: y = -m, x in [-m+1, m+1]
    if y <= 0 && y < x && x <= 1 - y {
        let m = -y;
        return (2 * m * (2 * m + 1) + x + m) as u128;
    }
    // north run of pair 2m+1: x = m+1, y in [-m+1, m+1]
    if x >= 1 && 2 - x <= y && y <= x {
        let m = x - 1;
        return (2 * m * (2 * m + 1) + (2 * m + 1) + y + m) as u128;
    }
    // west run of pair 2m: y = m, x in [-m, m-1]
    if y >= 1 && -y <= x && x < y {
        let m = y;
        return ((2 * m - 1) * 2 * m + m - x) as u128;
    }
    // south run of pair 2m: x = -m, y in [-m, m-1]
    let m = -x;
    debug_assert!(m >= 1 && -m <= y && y < m);
    ((2 * m - 1) * 2 * m + 2 * m + m - y) as u128
}

/// Number of steps after which the spiral first stands on `offset`.
///
/// Panics if the index does not fit in `u64` (coordinates beyond ~2^31).
pub fn spiral_hit_index(offset: Point) -> u64 {
    u64::try_from(spiral_hit_index_wide(offset)).expect("spiral index exceeds u64")
}

/// Smallest `R` with `(2R)² >= budget`, i.e. `R = ⌈√budget / 2⌉`.
pub fn spiral_cover_radius(budget: u64) -> u64 {
    let mut root = budget.isqrt();
    if root * root < budget {
        root += 1;
    }
    root.div_ceil(2)
}

/// Steps actually run for a spiral search of length `budget`: the full
/// L∞ square of radius `⌈√budget / 2⌉`, so that every node within
/// Manhattan distance `√budget / 2` is visited. Saturates at `u64::MAX`.
pub fn spiral_cover_steps(budget: u64) -> u64 {
    let r = spiral_cover_radius(budget.max(1)) as u128;
    u64::try_from(4 * r * (r + 1)).unwrap_or(u64::MAX)
}

/// Step-by-step spiral walker; yields the offset after each step.
#[derive(Clone, Debug)]
pub struct SpiralWalk {
    pos: Point,
    dir: usize,
    run_len: u64,
    run_done: u64,
    second_run: bool,
}

impl SpiralWalk {
    pub fn new() -> Self {
        SpiralWalk {
            pos: Point::ORIGIN,
            dir: 0,
            run_len: 1,
            run_done: 0,
            second_run: false,
        }
    }
}

impl Default for SpiralWalk {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for SpiralWalk {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        let (dx, dy) = [EAST, NORTH, WEST, SOUTH][self.dir];
        self.pos = Point::new(self.pos.x + dx, self.pos.y + dy);
        self.run_done += 1;
        if self.run_done == self.run_len {
            self.run_done = 0;
            self.dir = (self.dir + 1) % 4;
            if self.second_run {
                self.run_len += 1;
            }
            self.second_run = !self.second_run;
        }
        Some(self.pos)
    }
}
