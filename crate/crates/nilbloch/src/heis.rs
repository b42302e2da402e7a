//! Integer arithmetic on the discrete Heisenberg group.
//!
//! An element `[n1, n2, n3]` is the unipotent matrix
//!
//! ```text
//! | 1 n3 n1 |
//! | 0  1 n2 |
//! | 0  0  1 |
//! ```
//!
//! so `n1` is the corner entry. In exponential-style `(z, y, x)` notation
//! this is `z = n1, y = n2, x = n3`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest radius accepted by [`ball`] and [`ball_sizes`].
pub const MAX_BALL_RADIUS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub n1: i64,
    pub n2: i64,
    pub n3: i64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement::new(0, 0, 0);
    /// `u = [0,0,1]`
    pub const U: GroupElement = GroupElement::new(0, 0, 1);
    /// `v = [0,1,0]`
    pub const V: GroupElement = GroupElement::new(0, 1, 0);
    /// `w = [1,0,0]`, the central commutator `u v u⁻¹ v⁻¹`.
    pub const W: GroupElement = GroupElement::new(1, 0, 0);

    pub const fn new(n1: i64, n2: i64, n3: i64) -> Self {
        GroupElement { n1, n2, n3 }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Group product, with overflow detection.
    pub fn checked_mul(&self, b: &GroupElement) -> Result<GroupElement> {
        let twist = self.n3.checked_mul(b.n2).ok_or(Error::Overflow)?;
        let n1 = self
            .n1
            .checked_add(b.n1)
            .and_then(|s| s.checked_add(twist))
            .ok_or(Error::Overflow)?;
        let n2 = self.n2.checked_add(b.n2).ok_or(Error::Overflow)?;
        let n3 = self.n3.checked_add(b.n3).ok_or(Error::Overflow)?;
        Ok(GroupElement { n1, n2, n3 })
    }

    pub fn checked_inverse(&self) -> Result<GroupElement> {
        let n1 = self
            .n2
            .checked_mul(self.n3)
            .and_then(|t| t.checked_sub(self.n1))
            .ok_or(Error::Overflow)?;
        let n2 = self.n2.checked_neg().ok_or(Error::Overflow)?;
        let n3 = self.n3.checked_neg().ok_or(Error::Overflow)?;
        Ok(GroupElement { n1, n2, n3 })
    }

    /// Group product. Panics on overflow; use [`checked_mul`](Self::checked_mul)
    /// when coordinates are not known to be small.
    pub fn mul(&self, b: &GroupElement) -> GroupElement {
        self.checked_mul(b).expect("Heisenberg product overflowed i64")
    }

    pub fn inverse(&self) -> GroupElement {
        self.checked_inverse().expect("Heisenberg inverse overflowed i64")
    }

    /// `g^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Result<GroupElement> {
        let base = if k < 0 { self.checked_inverse()? } else { *self };
        let mut acc = Self::IDENTITY;
        for _ in 0..k.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        Ok(acc)
    }

    /// Image under the abelianization parity `n2 + n3 mod 2`. Every generator maps to 1.
    pub fn parity(&self) -> u8 {
        (self.n2 + self.n3).rem_euclid(2) as u8
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.n1, self.n2, self.n3)
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param(format!("expected \"[n1,n2,n3]\", got {s:?}"));
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let parts: Vec<i64> = inner
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match parts[..] {
            [n1, n2, n3] => Ok(GroupElement::new(n1, n2, n3)),
            _ => Err(bad()),
        }
    }
}

/// The symmetric generating set `{u, u⁻¹, v, v⁻¹}`.
pub fn generators() -> [GroupElement; 4] {
    [
        GroupElement::U,
        GroupElement::U.inverse(),
        GroupElement::V,
        GroupElement::V.inverse(),
    ]
}

fn bfs_layers(radius: u32) -> Result<(FxHashSet<GroupElement>, Vec<usize>)> {
    if radius > MAX_BALL_RADIUS {
        return Err(Error::param(format!(
            "ball radius {radius} exceeds the supported maximum {MAX_BALL_RADIUS}"
        )));
    }
    let gens = generators();
    let mut seen = FxHashSet::default();
    seen.insert(GroupElement::IDENTITY);
    let mut frontier = VecDeque::from([GroupElement::IDENTITY]);
    let mut sizes = vec![1usize];
    for _ in 0..radius {
        let mut next = VecDeque::new();
        while let Some(g) = frontier.pop_front() {
            for s in &gens {
                let h = g.checked_mul(s)?;
                if seen.insert(h) {
                    next.push_back(h);
                }
            }
        }
        sizes.push(seen.len());
        frontier = next;
    }
    Ok((seen, sizes))
}

/// All elements at word distance at most `radius` from the identity, with
/// respect to `{u, u⁻¹, v, v⁻¹}`. Radii up to [`MAX_BALL_RADIUS`] are supported.
pub fn ball(radius: u32) -> Result<FxHashSet<GroupElement>> {
    bfs_layers(radius).map(|(set, _)| set)
}

/// `|ball(r)|` for `r = 0..=radius`, from a single breadth-first search.
pub fn ball_sizes(radius: u32) -> Result<Vec<usize>> {
    bfs_layers(radius).map(|(_, sizes)| sizes)
}

/// Ball elements in a deterministic (sorted) order.
pub fn ball_sorted(radius: u32) -> Result<Vec<GroupElement>> {
    let mut v: Vec<_> = ball(radius)?.into_iter().collect();
    v.sort();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_from_the_matrix_form() {
        let (u, v, w) = (GroupElement::U, GroupElement::V, GroupElement::W);
        assert_eq!(u.mul(&v), GroupElement::new(1, 1, 1));
        assert_eq!(v.mul(&u), GroupElement::new(0, 1, 1));
        let comm = u.mul(&v).mul(&u.inverse()).mul(&v.inverse());
        assert_eq!(comm, w);
    }

    #[test]
    fn inverses() {
        assert_eq!(GroupElement::IDENTITY.inverse(), GroupElement::IDENTITY);
        assert_eq!(GroupElement::U.inverse(), GroupElement::new(0, 0, -1));
        assert_eq!(GroupElement::new(1, 1, 1).inverse(), GroupElement::new(0, -1, -1));
    }

    #[test]
    fn overflow_is_reported() {
        let big = GroupElement::new(0, 0, i64::MAX);
        assert_eq!(big.checked_mul(&GroupElement::new(0, 2, 0)), Err(Error::Overflow));
        assert_eq!(GroupElement::new(0, i64::MIN, 0).checked_inverse(), Err(Error::Overflow));
    }

    #[test]
    fn small_balls() {
        assert_eq!(ball(0).unwrap().len(), 1);
        assert_eq!(ball(1).unwrap().len(), 5);
        assert!(ball(MAX_BALL_RADIUS + 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = GroupElement::new(-3, 4, 0);
        assert_eq!(g.to_string(), "[-3,4,0]");
        assert_eq!("[-3, 4,0]".parse::<GroupElement>().unwrap(), g);
        assert!("[1,2]".parse::<GroupElement>().is_err());
        assert!("1,2,3".parse::<GroupElement>().is_err());
    }
}
