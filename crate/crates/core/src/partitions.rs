//! Plane partitions colored by `(i1 - i2) mod r`, their diagonal slices,
//! the limit index, and the semigroup of realized color vectors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Box3 = [u32; 3];

/// A finite order ideal of boxes in `Z_{>=0}^3`, stored as a sorted box list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct PlanePartition {
    boxes: Vec<Box3>,
}

impl PlanePartition {
    pub fn empty() -> Self {
        PlanePartition { boxes: Vec::new() }
    }

    /// Build from boxes, checking the order-ideal property.
    pub fn from_boxes(mut boxes: Vec<Box3>) -> Result<Self> {
        boxes.sort_unstable();
        boxes.dedup();
        let p = PlanePartition { boxes };
        if !p.is_order_ideal() {
            return Err(Error::Domain(format!("{p} is not an order ideal")));
        }
        Ok(p)
    }

    pub fn boxes(&self) -> &[Box3] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, b: &Box3) -> bool {
        self.boxes.binary_search(b).is_ok()
    }

    pub fn is_order_ideal(&self) -> bool {
        self.boxes.iter().all(|b| {
            (0..3).all(|axis| {
                if b[axis] == 0 {
                    return true;
                }
                let mut below = *b;
                below[axis] -= 1;
                self.contains(&below)
            })
        })
    }

    /// Boxes whose addition keeps the order-ideal property.
    pub fn addable(&self) -> Vec<Box3> {
        let mut candidates: BTreeSet<Box3> = BTreeSet::new();
        if self.boxes.is_empty() {
            candidates.insert([0, 0, 0]);
        }
        for b in &self.boxes {
            for axis in 0..3 {
                let mut n = *b;
                n[axis] += 1;
                candidates.insert(n);
            }
        }
        candidates
            .into_iter()
            .filter(|n| {
                !self.contains(n)
                    && (0..3).all(|axis| {
                        n[axis] == 0 || {
                            let mut below = *n;
                            below[axis] -= 1;
                            self.contains(&below)
                        }
                    })
            })
            .collect()
    }

    fn with_box(&self, b: Box3) -> Self {
        let mut boxes = self.boxes.clone();
        let pos = boxes.binary_search(&b).unwrap_err();
        boxes.insert(pos, b);
        PlanePartition { boxes }
    }

    /// Height of the column over `(i1, i2)`.
    pub fn height(&self, i1: u32, i2: u32) -> u32 {
        self.boxes
            .iter()
            .filter(|b| b[0] == i1 && b[1] == i2)
            .count() as u32
    }
}

impl fmt::Display for PlanePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.boxes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({}{}{})", b[0], b[1], b[2])?;
        }
        f.write_str("}")
    }
}

/// All plane partitions with exactly `n` boxes, in sorted box-list order.
pub fn enumerate(n: usize) -> Vec<PlanePartition> {
    enumerate_up_to(n).pop().unwrap_or_default()
}

/// Level `k` of the result holds every plane partition with `k` boxes, `k = 0..=n`.
pub fn enumerate_up_to(n: usize) -> Vec<Vec<PlanePartition>> {
    let mut levels = vec![vec![PlanePartition::empty()]];
    for _ in 0..n {
        let next: BTreeSet<PlanePartition> = levels
            .last()
            .unwrap()
            .iter()
            .flat_map(|p| p.addable().into_iter().map(move |b| p.with_box(b)))
            .collect();
        levels.push(next.into_iter().collect());
    }
    levels
}

/// Count of box-colors: `alpha_j = #{boxes with (i1 - i2) mod r = j}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ColorVector(pub Vec<i64>);

impl ColorVector {
    pub fn zero(r: usize) -> Self {
        ColorVector(vec![0; r])
    }

    pub fn unit(r: usize, j: usize) -> Self {
        let mut v = vec![0; r];
        v[j] = 1;
        ColorVector(v)
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `b(alpha) = alpha_0`, the number of points on the coarse space.
    pub fn b(&self) -> i64 {
        self.0[0]
    }

    pub fn add(&self, other: &Self) -> Self {
        ColorVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        ColorVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

pub fn box_color(b: &Box3, r: usize) -> usize {
    (b[0] as i64 - b[1] as i64).rem_euclid(r as i64) as usize
}

pub fn color_vector(pi: &PlanePartition, r: usize) -> ColorVector {
    assert!(r >= 1, "group order must be positive");
    let mut v = vec![0; r];
    for b in pi.boxes() {
        v[box_color(b, r)] += 1;
    }
    ColorVector(v)
}

/// A weakly decreasing list of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Partition2D(Vec<u32>);

impl Partition2D {
    pub fn empty() -> Self {
        Partition2D(Vec::new())
    }

    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!("{parts:?} is not weakly decreasing")));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition2D(parts))
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]) && parts.last() != Some(&0));
        Partition2D(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// `self ≻ other`: `self_1 >= other_1 >= self_2 >= other_2 >= ...`.
    pub fn interlaces_above(&self, other: &Self) -> bool {
        let n = self.len().max(other.len()) + 1;
        (0..n).all(|i| self.part(i) >= other.part(i) && other.part(i) >= self.part(i + 1))
    }
}

impl fmt::Display for Partition2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Diagonal slices: slice `k` reads the column heights along `i1 - i2 = k`.
pub fn slices(pi: &PlanePartition) -> Result<BTreeMap<i64, Partition2D>> {
    let mut heights: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for b in pi.boxes() {
        *heights.entry((b[0], b[1])).or_default() += 1;
    }
    let mut out: BTreeMap<i64, Vec<u32>> = BTreeMap::new();
    for (&(i1, i2), &h) in &heights {
        let k = i1 as i64 - i2 as i64;
        let a = i1.min(i2) as usize;
        let row = out.entry(k).or_default();
        if row.len() <= a {
            row.resize(a + 1, 0);
        }
        row[a] = h;
    }
    let mut result = BTreeMap::new();
    for (k, row) in out {
        let lam = Partition2D::new(row).map_err(|_| Error::InvalidSlicing(pi.to_string()))?;
        result.insert(k, lam);
    }
    // moving away from the central slice, partitions shrink by interlacing
    let empty = Partition2D::empty();
    let lo = result.keys().next().copied().unwrap_or(0).min(0);
    let hi = result.keys().next_back().copied().unwrap_or(0).max(0);
    for k in lo..=hi {
        let cur = result.get(&k).unwrap_or(&empty);
        let outward = if k >= 0 { k + 1 } else { k - 1 };
        let next = result.get(&outward).unwrap_or(&empty);
        if !cur.interlaces_above(next) {
            return Err(Error::InvalidSlicing(pi.to_string()));
        }
    }
    Ok(result)
}

/// Rebuild a plane partition from its diagonal slices.
pub fn from_slices(slices: &BTreeMap<i64, Partition2D>) -> Result<PlanePartition> {
    let mut boxes = Vec::new();
    for (&k, lam) in slices {
        for (a, &h) in lam.parts().iter().enumerate() {
            let a = a as i64;
            let (i1, i2) = (a + k.max(0), a + (-k).max(0));
            for i3 in 0..h {
                boxes.push([i1 as u32, i2 as u32, i3]);
            }
        }
    }
    PlanePartition::from_boxes(boxes)
}

/// `s(x) = +1` for `x >= 0`, `-1` for `x < 0`.
fn diagonal_sign(x: i64) -> i64 {
    if x >= 0 {
        1
    } else {
        -1
    }
}

/// Sum over 0-colored boxes of `s(i2 - i1)`, with `s(0) = +1`.
pub fn index(pi: &PlanePartition, r: usize) -> i64 {
    pi.boxes()
        .iter()
        .filter(|b| box_color(b, r) == 0)
        .map(|b| diagonal_sign(b[1] as i64 - b[0] as i64))
        .sum()
}

/// Color vectors realized by nonempty partitions with at most `bound` boxes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSemigroup {
    r: usize,
    bound: usize,
    members: BTreeSet<ColorVector>,
}

impl IndexSemigroup {
    pub fn new(r: usize, bound: usize) -> Self {
        Self::from_levels(r, &enumerate_up_to(bound))
    }

    pub fn from_levels(r: usize, levels: &[Vec<PlanePartition>]) -> Self {
        let members = levels
            .iter()
            .skip(1)
            .flatten()
            .map(|p| color_vector(p, r))
            .collect();
        IndexSemigroup {
            r,
            bound: levels.len().saturating_sub(1),
            members,
        }
    }

    /// From the color vectors of all nonempty partitions with at most `bound` boxes.
    pub fn from_colors(r: usize, bound: usize, colors: impl IntoIterator<Item = ColorVector>) -> Result<Self> {
        let members: BTreeSet<ColorVector> = colors.into_iter().filter(|a| !a.is_zero()).collect();
        if let Some(a) = members.iter().find(|a| a.r() != r || a.total() > bound as i64 || !a.is_nonnegative()) {
            return Err(Error::Usage(format!("color vector {:?} does not fit r = {r}, bound = {bound}", a.0)));
        }
        Ok(IndexSemigroup { r, bound, members })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn members(&self) -> impl Iterator<Item = &ColorVector> {
        self.members.iter()
    }

    pub fn contains(&self, alpha: &ColorVector) -> Result<bool> {
        if alpha.r() != self.r {
            return Err(Error::Usage(format!("color vector {:?} has the wrong length", alpha.0)));
        }
        if alpha.total() > self.bound as i64 {
            return Err(Error::OutOfBound {
                alpha: alpha.0.clone(),
                bound: self.bound,
            });
        }
        Ok(self.members.contains(alpha))
    }

    /// Membership in the diagonal `N (1, ..., 1)`, positive multiples only.
    pub fn delta_member(alpha: &ColorVector) -> bool {
        let n = alpha.0[0];
        n > 0 && alpha.0.iter().all(|&a| a == n)
    }

    /// Whether `alpha + beta` lies in the set whenever both do and the sum is in range.
    pub fn closure_violations(&self) -> Vec<(ColorVector, ColorVector)> {
        let mut bad = Vec::new();
        for a in &self.members {
            for b in self.members.range(a.clone()..) {
                let s = a.add(b);
                if s.total() <= self.bound as i64 && !self.members.contains(&s) {
                    bad.push((a.clone(), b.clone()));
                }
            }
        }
        bad
    }

    /// All multisets of members summing to `alpha`, parts in non-increasing order.
    pub fn partitions_of(&self, alpha: &ColorVector) -> Result<Vec<Vec<ColorVector>>> {
        if !self.contains(alpha)? {
            return Err(Error::Domain(format!("{:?} is not in the index set", alpha.0)));
        }
        let parts: Vec<&ColorVector> = self.members.iter().rev().collect();
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(
            rest: &ColorVector,
            parts: &[&ColorVector],
            start: usize,
            current: &mut Vec<ColorVector>,
            out: &mut Vec<Vec<ColorVector>>,
        ) {
            if rest.is_zero() {
                out.push(current.clone());
                return;
            }
            for (i, p) in parts.iter().enumerate().skip(start) {
                let next = rest.sub(p);
                if next.is_nonnegative() {
                    current.push((*p).clone());
                    rec(&next, parts, i, current, out);
                    current.pop();
                }
            }
        }
        rec(alpha, &parts, 0, &mut current, &mut out);
        Ok(out)
    }
}

/// Coefficients of `prod_{k>=1} (1 - q^k)^{-k}` up to `q^n`.
pub fn macmahon_counts(n: usize) -> Vec<u64> {
    let mut c = vec![0u64; n + 1];
    c[0] = 1;
    for k in 1..=n {
        // multiply by (1 - q^k)^{-1}, k times
        for _ in 0..k {
            for d in k..=n {
                c[d] += c[d - k];
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pp(boxes: &[Box3]) -> PlanePartition {
        PlanePartition::from_boxes(boxes.to_vec()).unwrap()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate(0), vec![PlanePartition::empty()]);
        assert_eq!(
            enumerate(2),
            vec![
                pp(&[[0, 0, 0], [0, 0, 1]]),
                pp(&[[0, 0, 0], [0, 1, 0]]),
                pp(&[[0, 0, 0], [1, 0, 0]]),
            ]
        );
    }

    #[test]
    fn counts_match_macmahon() {
        let expected = macmahon_counts(8);
        assert_eq!(&expected[..7], &[1, 1, 3, 6, 13, 24, 48]);
        let levels = enumerate_up_to(8);
        for (n, level) in levels.iter().enumerate() {
            assert_eq!(level.len() as u64, expected[n], "n = {n}");
            assert!(level.iter().all(|p| p.is_order_ideal() && p.len() == n));
        }
    }

    #[test]
    fn rejects_non_ideals() {
        assert!(PlanePartition::from_boxes(vec![[1, 0, 0]]).is_err());
    }

    #[test]
    fn color_vectors() {
        assert_eq!(color_vector(&pp(&[[0, 0, 0], [0, 0, 1]]), 2).0, vec![2, 0]);
        assert_eq!(color_vector(&pp(&[[0, 0, 0], [1, 0, 0]]), 2).0, vec![1, 1]);
        // weight a*1 + b*(r-1) mod r for (0,1,0) with r = 3
        let oracle = |b: &Box3, r: i64| (b[0] as i64 + b[1] as i64 * (r - 1)).rem_euclid(r);
        assert_eq!(oracle(&[0, 1, 0], 3), 2);
        assert_eq!(color_vector(&pp(&[[0, 0, 0], [0, 1, 0]]), 3).0, vec![1, 0, 1]);
        for p in enumerate_up_to(5).iter().flatten() {
            for r in 1..=4 {
                for b in p.boxes() {
                    assert_eq!(box_color(b, r) as i64, oracle(b, r as i64));
                }
            }
        }
    }

    #[test]
    fn slice_examples() {
        let s = slices(&pp(&[[0, 0, 0]])).unwrap();
        assert_eq!(s, BTreeMap::from([(0, Partition2D(vec![1]))]));
        let s = slices(&pp(&[[0, 0, 0], [1, 0, 0], [0, 1, 0]])).unwrap();
        assert_eq!(
            s,
            BTreeMap::from([
                (-1, Partition2D(vec![1])),
                (0, Partition2D(vec![1])),
                (1, Partition2D(vec![1])),
            ])
        );
    }

    #[test]
    fn slices_round_trip() {
        for p in enumerate_up_to(6).iter().flatten() {
            let s = slices(p).unwrap();
            assert_eq!(&from_slices(&s).unwrap(), p);
        }
    }

    #[test]
    fn index_examples() {
        assert_eq!(index(&PlanePartition::empty(), 1), 0);
        assert_eq!(index(&pp(&[[0, 0, 0]]), 1), 1);
        assert_eq!(index(&pp(&[[0, 0, 0], [1, 0, 0]]), 1), 0);
        assert_eq!(index(&pp(&[[0, 0, 0], [0, 1, 0]]), 1), 2);
        assert_eq!(index(&pp(&[[0, 0, 0], [0, 0, 1]]), 1), 2);
    }

    #[test]
    fn index_counts_signed_zero_colored_boxes() {
        for p in enumerate_up_to(6).iter().flatten() {
            for r in 1..=3 {
                let zero: Vec<_> = p.boxes().iter().filter(|b| box_color(b, r) == 0).collect();
                let up = zero.iter().filter(|b| b[1] >= b[0]).count() as i64;
                let down = zero.len() as i64 - up;
                assert_eq!(index(p, r), up - down);
                assert_eq!(color_vector(p, r).total(), p.len() as i64);
            }
        }
    }

    #[test]
    fn semigroup_membership() {
        let i = IndexSemigroup::new(2, 8);
        assert!(i.contains(&ColorVector(vec![1, 0])).unwrap());
        assert!(i.contains(&ColorVector(vec![1, 1])).unwrap());
        assert!(!i.contains(&ColorVector(vec![0, 1])).unwrap());
        assert!(matches!(
            i.contains(&ColorVector(vec![5, 4])),
            Err(Error::OutOfBound { .. })
        ));
        assert!(IndexSemigroup::delta_member(&ColorVector(vec![2, 2])));
        assert!(!IndexSemigroup::delta_member(&ColorVector(vec![2, 1])));
        for r in 1..=3 {
            let i = IndexSemigroup::new(r, r + 1);
            assert!(i.contains(&ColorVector::unit(r, 0)).unwrap());
            assert!(i.contains(&ColorVector(vec![1; r])).unwrap());
        }
    }

    #[test]
    fn semigroup_closed_under_addition() {
        for r in [2, 3] {
            assert!(IndexSemigroup::new(r, 8).closure_violations().is_empty());
        }
    }

    #[test]
    fn i_partitions() {
        let i1 = IndexSemigroup::new(1, 3);
        let parts = i1.partitions_of(&ColorVector(vec![3])).unwrap();
        let as_ints: Vec<Vec<i64>> = parts.iter().map(|p| p.iter().map(|c| c.0[0]).collect()).collect();
        assert_eq!(as_ints, vec![vec![3], vec![2, 1], vec![1, 1, 1]]);

        let i2 = IndexSemigroup::new(2, 6);
        assert_eq!(
            i2.partitions_of(&ColorVector(vec![1, 1])).unwrap(),
            vec![vec![ColorVector(vec![1, 1])]]
        );
        let mut got = i2.partitions_of(&ColorVector(vec![2, 1])).unwrap();
        got.sort();
        let mut want = vec![
            vec![ColorVector(vec![2, 1])],
            vec![ColorVector(vec![1, 1]), ColorVector(vec![1, 0])],
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(i2.partitions_of(&ColorVector(vec![0, 1])).is_err());
    }

    proptest! {
        #[test]
        fn interlacing_of_generated_slices(n in 0usize..7, pick in any::<prop::sample::Index>(), r in 1usize..4) {
            let level = enumerate(n);
            let p = pick.get(&level);
            let s = slices(p).unwrap();
            // color of slice k is k mod r, so all boxes of a slice share a color
            for (k, lam) in &s {
                let c = k.rem_euclid(r as i64) as usize;
                let boxes = p.boxes().iter().filter(|b| b[0] as i64 - b[1] as i64 == *k);
                prop_assert!(boxes.clone().all(|b| box_color(b, r) == c));
                prop_assert_eq!(boxes.count() as u32, lam.size());
            }
        }
    }
}
