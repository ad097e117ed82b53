//! Oracle side: advice bit strings, the guess sets built from them and the
//! encodings used by each non-uniform protocol. Every agent of a run gets
//! the same advice.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Additive slack in the width `B(k) = Ψ(k) + C` of the two advice fields
/// of the Ψ scheme.
pub const PSI_SLACK: u32 = 2;

/// Finite advice string. Its length is the measured advice size.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct AdviceBits {
    bits: Vec<bool>,
}

impl AdviceBits {
    pub fn empty() -> Self {
        AdviceBits::default()
    }

    /// Minimal binary encoding (`0` encodes as a single `0` bit).
    pub fn minimal(value: u64) -> Self {
        let width = (u64::BITS - value.leading_zeros()).max(1);
        Self::fixed(value, width)
    }

    /// `value` written MSB-first in exactly `width` bits (zero padded on
    /// the most significant side).
    pub fn fixed(value: u64, width: u32) -> Self {
        debug_assert!(width >= 64 || value >> width == 0);
        let bits = (0..width)
            .rev()
            .map(|b| b < 64 && (value >> b) & 1 == 1)
            .collect();
        AdviceBits { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn concat(mut self, other: &AdviceBits) -> Self {
        self.bits.extend_from_slice(&other.bits);
        self
    }

    /// Reads the whole string as an unsigned MSB-first integer.
    pub fn value(&self) -> Result<u64> {
        read_uint(&self.bits)
    }
}

fn read_uint(bits: &[bool]) -> Result<u64> {
    let significant = bits.iter().skip_while(|b| !**b).count();
    if significant > 64 {
        return Err(Error::Decode(format!("{} significant bits exceed 64", significant)));
    }
    Ok(bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
}

impl fmt::Display for AdviceBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for AdviceBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Decode(format!("invalid advice character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(AdviceBits { bits })
    }
}

impl From<AdviceBits> for String {
    fn from(a: AdviceBits) -> String {
        a.to_string()
    }
}

impl TryFrom<String> for AdviceBits {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// `⌊log₂ k⌋` for `k >= 1`.
pub fn floor_log2(k: u64) -> u32 {
    debug_assert!(k >= 1);
    u64::BITS - 1 - k.leading_zeros()
}

/// `⌊log₂ log₂ k⌋` for `k >= 2`, computed exactly.
pub fn floor_loglog(k: u64) -> u32 {
    floor_log2(floor_log2(k) as u64)
}

/// `⌈log₂ log₂ k⌉` for `k >= 2`: the smallest `a` with `k <= 2^(2^a)`.
pub fn ceil_loglog(k: u64) -> u32 {
    debug_assert!(k >= 2);
    (0..)
        .find(|&a: &u32| {
            let e = 1u64 << a;
            e >= 64 || k <= 1u64 << e
        })
        .unwrap()
}

/// Guess set `S(α) = {2^i : 2^α <= i < 2^(α+1)}`, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessSet {
    pub alpha: u32,
    pub elements: Vec<u64>,
}

impl GuessSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: u64) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    /// 0-based position of the element `g` with `g <= k < 2g`, if present.
    pub fn two_approx_index(&self, k: u64) -> Option<usize> {
        self.elements.iter().position(|&g| g <= k && k / 2 < g)
    }
}

/// Builds `S(alpha)`. Elements must fit in `u64`, so `alpha <= 5`.
pub fn build_guess_set(alpha: u32) -> Result<GuessSet> {
    if alpha > 5 {
        return Err(Error::Overflow(format!("S({alpha}) has elements beyond 2^63")));
    }
    let elements = ((1u32 << alpha)..(1u32 << (alpha + 1)))
        .map(|i| 1u64 << i)
        .collect();
    Ok(GuessSet { alpha, elements })
}

/// Which advice an oracle hands out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AdviceScheme {
    /// No advice at all.
    None,
    /// `k` itself in minimal binary.
    KnownK,
    /// `max(⌊log k⌋, 1) - 1` in minimal binary, decoded as `k_a = 2^(v+1)`.
    RhoApprox,
    /// `α = ⌊log log k⌋` in minimal binary.
    LogK,
    /// Two `B(k)`-bit fields: `α` and the prefix of the index of the
    /// 2-approximation of `k` inside `S(α)`.
    Psi { epsilon: f64 },
}

impl AdviceScheme {
    pub fn min_agents(&self) -> u64 {
        match self {
            AdviceScheme::LogK | AdviceScheme::Psi { .. } => 4,
            _ => 1,
        }
    }
}

/// `Ψ(k) = ⌈(log log k)^ε⌉` for `k >= 4`.
pub fn psi_size(k: u64, epsilon: f64) -> u32 {
    let ll = (k as f64).log2().log2();
    (ll.powf(epsilon).ceil() as u32).max(1)
}

/// Field width `B(k) = Ψ(k) + C`.
pub fn psi_width(k: u64, epsilon: f64) -> u32 {
    psi_size(k, epsilon) + PSI_SLACK
}

/// Advice handed to every agent of a `k`-agent run.
pub fn oracle_assign(scheme: AdviceScheme, k: u64) -> Result<AdviceBits> {
    if k < scheme.min_agents() {
        return Err(Error::Precondition(format!(
            "{scheme:?} needs at least {} agents, got {k}",
            scheme.min_agents()
        )));
    }
    Ok(match scheme {
        AdviceScheme::None => AdviceBits::empty(),
        AdviceScheme::KnownK => AdviceBits::minimal(k),
        AdviceScheme::RhoApprox => AdviceBits::minimal(floor_log2(k).max(1) as u64 - 1),
        AdviceScheme::LogK => AdviceBits::minimal(floor_loglog(k) as u64),
        AdviceScheme::Psi { epsilon } => {
            if !(epsilon > 0.0 && epsilon <= 1.0) {
                return Err(Error::config("psi_epsilon", "must lie in (0, 1]"));
            }
            let alpha = floor_loglog(k);
            let width = psi_width(k, epsilon);
            if u32::BITS - alpha.leading_zeros() > width {
                return Err(Error::Overflow(format!("α = {alpha} does not fit in {width} bits")));
            }
            let set = build_guess_set(alpha)?;
            let idx = set
                .two_approx_index(k)
                .expect("S(⌊log log k⌋) always holds a 2-approximation of k") as u64;
            // index written in α bits, truncated or zero-extended to `width`
            let index_field = if width <= alpha {
                AdviceBits::fixed(idx >> (alpha - width), width)
            } else {
                AdviceBits::fixed(idx << (width - alpha), width)
            };
            AdviceBits::fixed(alpha as u64, width).concat(&index_field)
        }
    })
}

/// Decodes the assumed agent count carried by `KnownK` advice.
pub fn decode_known_k(advice: &AdviceBits) -> Result<u64> {
    if advice.is_empty() {
        return Err(Error::Decode("empty advice".into()));
    }
    let k = advice.value()?;
    if k == 0 {
        return Err(Error::Decode("agent count 0".into()));
    }
    Ok(k)
}

/// Decodes the approximate count `k_a` carried by `RhoApprox` advice.
pub fn decode_rho_approx(advice: &AdviceBits) -> Result<u64> {
    if advice.is_empty() {
        return Err(Error::Decode("empty advice".into()));
    }
    let v = advice.value()?;
    if v >= 63 {
        return Err(Error::Decode(format!("exponent {} too large", v + 1)));
    }
    Ok(1u64 << (v + 1))
}

/// Decodes the guess set carried by `LogK` advice.
pub fn decode_log_k(advice: &AdviceBits) -> Result<GuessSet> {
    if advice.is_empty() {
        return Err(Error::Decode("empty advice".into()));
    }
    let alpha = advice.value()?;
    build_guess_set(u32::try_from(alpha).map_err(|_| Error::Decode("α too large".into()))?)
}

/// Decodes `Ψ` advice of field width `width` into the block of `S(α)`
/// whose index prefix matches the second field.
pub fn decode_psi_subset(advice: &AdviceBits, width: u32) -> Result<GuessSet> {
    let width_usize = width as usize;
    if width == 0 || advice.len() != 2 * width_usize {
        return Err(Error::Decode(format!(
            "expected {} bits, got {}",
            2 * width_usize,
            advice.len()
        )));
    }
    let (alpha_field, index_field) = advice.bits().split_at(width_usize);
    let alpha = u32::try_from(read_uint(alpha_field)?)
        .map_err(|_| Error::Decode("α too large".into()))?;
    let full = build_guess_set(alpha).map_err(|e| Error::Decode(e.to_string()))?;
    let known = width.min(alpha);
    let prefix = read_uint(&index_field[..known as usize])?;
    let free = alpha - known;
    let lo = (prefix << free) as usize;
    let hi = ((prefix + 1) << free) as usize;
    Ok(GuessSet {
        alpha,
        elements: full.elements[lo..hi].to_vec(),
    })
}
