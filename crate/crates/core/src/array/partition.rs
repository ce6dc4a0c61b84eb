//! Virtual sub-array partitions: contiguous blocks, each holding `a × a`
//! interleaved sub-arrays, plus transitional sub-arrays that straddle a block
//! boundary.
//!
//! Blocks are numbered row-major (`A`, `B`, ... with `bx + blocks_x·by`).
//! Inside a block, element `(x, y)` belongs to local sub-array
//! `(x mod a) + a·(y mod a)`, so the global id is `block·a² + local`.

use serde::{Deserialize, Serialize};

use super::ArrayGeometry;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn swapped(self) -> Axis {
        match self {
            Axis::Horizontal => Axis::Vertical,
            Axis::Vertical => Axis::Horizontal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubarrayKind {
    Regular,
    TransitionalHorizontal,
    TransitionalVertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubarrayInfo {
    pub id: usize,
    pub label: String,
    pub kind: SubarrayKind,
    /// Owning block for regular sub-arrays.
    pub block: Option<usize>,
    /// Lattice offset `(x mod a, y mod a)`.
    pub offset: (usize, usize),
    /// Donor ids for transitional sub-arrays.
    pub donors: Option<(usize, usize)>,
    /// Set once the sub-array has donated its elements to a transitional one.
    pub consumed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayPartition {
    geometry: ArrayGeometry,
    blocks_x: usize,
    blocks_y: usize,
    interleave: usize,
    block_id: Vec<usize>,
    subarray_id: Vec<usize>,
    active: Vec<bool>,
    subarrays: Vec<SubarrayInfo>,
}

/// JSON form of a partition, for debugging and golden files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionDescription {
    pub nx: usize,
    pub ny: usize,
    pub spacing_m: f64,
    pub wavelength_m: f64,
    pub blocks_x: usize,
    pub blocks_y: usize,
    pub interleave: usize,
    /// Per element, flat index `x + nx·y`.
    pub block_id: Vec<usize>,
    pub subarray_id: Vec<usize>,
    pub active: Vec<bool>,
    pub subarrays: Vec<SubarrayInfo>,
}

/// Square multi-block partition: `blocks_per_side²` blocks, each with
/// `subarrays_per_block_side²` interleaved sub-arrays.
pub fn partition_multiblock(
    geometry: &ArrayGeometry,
    blocks_per_side: usize,
    subarrays_per_block_side: usize,
) -> Result<ArrayPartition> {
    ArrayPartition::with_blocks(geometry, blocks_per_side, blocks_per_side, subarrays_per_block_side)
}

fn block_letter(block: usize) -> String {
    if block < 26 {
        ((b'A' + block as u8) as char).to_string()
    } else {
        format!("B{block}")
    }
}

impl ArrayPartition {
    /// General form allowing a different block count per axis.
    pub fn with_blocks(
        geometry: &ArrayGeometry,
        blocks_x: usize,
        blocks_y: usize,
        interleave: usize,
    ) -> Result<Self> {
        if blocks_x == 0 || blocks_y == 0 || interleave == 0 {
            return Err(Error::InvalidPartition("block and interleave counts must be positive".into()));
        }
        for (n, b, name) in [(geometry.nx(), blocks_x, "x"), (geometry.ny(), blocks_y, "y")] {
            if n % (b * interleave) != 0 {
                return Err(Error::InvalidPartition(format!(
                    "{n} elements along {name} not divisible by {b} blocks × interleave {interleave}"
                )));
            }
        }
        let bw = geometry.nx() / blocks_x;
        let bh = geometry.ny() / blocks_y;
        let a = interleave;
        let mut block_id = Vec::with_capacity(geometry.len());
        let mut subarray_id = Vec::with_capacity(geometry.len());
        for idx in 0..geometry.len() {
            let (x, y) = geometry.coords(idx);
            let b = x / bw + blocks_x * (y / bh);
            block_id.push(b);
            subarray_id.push(b * a * a + (x % a) + a * (y % a));
        }
        let mut subarrays = Vec::with_capacity(blocks_x * blocks_y * a * a);
        for b in 0..blocks_x * blocks_y {
            for local in 0..a * a {
                subarrays.push(SubarrayInfo {
                    id: b * a * a + local,
                    label: format!("{}{}", block_letter(b), local + 1),
                    kind: SubarrayKind::Regular,
                    block: Some(b),
                    offset: (local % a, local / a),
                    donors: None,
                    consumed: false,
                });
            }
        }
        Ok(ArrayPartition {
            geometry: *geometry,
            blocks_x,
            blocks_y,
            interleave,
            block_id,
            subarray_id,
            active: vec![true; geometry.len()],
            subarrays,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }
    pub fn blocks(&self) -> (usize, usize) {
        (self.blocks_x, self.blocks_y)
    }
    pub fn interleave(&self) -> usize {
        self.interleave
    }
    pub fn block_ids(&self) -> &[usize] {
        &self.block_id
    }
    pub fn subarray_ids(&self) -> &[usize] {
        &self.subarray_id
    }
    pub fn active(&self) -> &[bool] {
        &self.active
    }
    pub fn subarrays(&self) -> &[SubarrayInfo] {
        &self.subarrays
    }
    pub fn subarray(&self, id: usize) -> Option<&SubarrayInfo> {
        self.subarrays.get(id)
    }
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    /// Spacing between neighbouring elements of one sub-array, `a·d`.
    pub fn effective_spacing(&self) -> f64 {
        self.interleave as f64 * self.geometry.spacing()
    }

    /// Elements per side of one regular sub-array (square blocks).
    pub fn subarray_side(&self) -> usize {
        self.geometry.nx() / (self.blocks_x * self.interleave)
    }

    /// `(bx, by)` of a block id.
    pub fn block_coords(&self, block: usize) -> (usize, usize) {
        (block % self.blocks_x, block / self.blocks_x)
    }

    /// Id of the regular sub-array at lattice offset `(sx, sy)` in block `(bx, by)`.
    pub fn regular_id(&self, block: (usize, usize), offset: (usize, usize)) -> usize {
        let a = self.interleave;
        (block.0 + self.blocks_x * block.1) * a * a + offset.0 + a * offset.1
    }

    /// Active element indices currently assigned to sub-array `id`.
    pub fn subarray_elements(&self, id: usize) -> Vec<usize> {
        (0..self.geometry.len())
            .filter(|&i| self.active[i] && self.subarray_id[i] == id)
            .collect()
    }

    /// Ids of sub-arrays that still own active elements, in id order.
    pub fn usable_subarrays(&self) -> Vec<usize> {
        self.subarrays
            .iter()
            .filter(|s| !s.consumed)
            .map(|s| s.id)
            .collect()
    }

    pub fn describe(&self) -> PartitionDescription {
        PartitionDescription {
            nx: self.geometry.nx(),
            ny: self.geometry.ny(),
            spacing_m: self.geometry.spacing(),
            wavelength_m: self.geometry.wavelength(),
            blocks_x: self.blocks_x,
            blocks_y: self.blocks_y,
            interleave: self.interleave,
            block_id: self.block_id.clone(),
            subarray_id: self.subarray_id.clone(),
            active: self.active.clone(),
            subarrays: self.subarrays.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.describe())?)
    }
}

/// Builds a transitional sub-array from two donors in adjacent blocks.
///
/// `first` is the donor with the lower block coordinate along `axis` (left
/// for horizontal, top row index for vertical). The half of each donor
/// farthest from the shared boundary is disabled; the remaining halves form a
/// new sub-array with the same element count as one donor.
pub fn make_transitional(
    part: &ArrayPartition,
    first: usize,
    second: usize,
    axis: Axis,
) -> Result<ArrayPartition> {
    let donor = |id: usize| -> Result<&SubarrayInfo> {
        let s = part
            .subarray(id)
            .ok_or_else(|| Error::InvalidDonors(format!("no sub-array {id}")))?;
        if s.consumed {
            return Err(Error::InvalidDonors(format!("sub-array {} already consumed", s.label)));
        }
        if s.kind != SubarrayKind::Regular {
            return Err(Error::InvalidDonors(format!("sub-array {} is not a regular sub-array", s.label)));
        }
        Ok(s)
    };
    let (d1, d2) = (donor(first)?, donor(second)?);
    let b1 = part.block_coords(d1.block.expect("regular sub-array has a block"));
    let b2 = part.block_coords(d2.block.expect("regular sub-array has a block"));
    let adjacent = match axis {
        Axis::Horizontal => b2.0 == b1.0 + 1 && b2.1 == b1.1,
        Axis::Vertical => b2.1 == b1.1 + 1 && b2.0 == b1.0,
    };
    if !adjacent {
        return Err(Error::InvalidDonors(format!(
            "{} and {} are not in adjacent blocks along the {axis:?} axis",
            d1.label, d2.label
        )));
    }
    if d1.offset != d2.offset {
        return Err(Error::InvalidDonors(format!(
            "{} and {} have different lattice offsets",
            d1.label, d2.label
        )));
    }

    let geom = part.geometry;
    let coord = |i: usize| {
        let (x, y) = geom.coords(i);
        match axis {
            Axis::Horizontal => x,
            Axis::Vertical => y,
        }
    };
    let lines = |id: usize| {
        let mut c: Vec<usize> = part.subarray_elements(id).into_iter().map(coord).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let (l1, l2) = (lines(first), lines(second));
    if l1.len() % 2 != 0 || l2.len() % 2 != 0 || l1.is_empty() {
        return Err(Error::InvalidDonors("donor sub-arrays need an even, nonzero line count".into()));
    }
    // First donor keeps its far-side half (nearest the boundary), second keeps its near half.
    let keep1 = l1[l1.len() / 2];
    let keep2_end = l2[l2.len() / 2];

    let new_id = part.subarrays.len();
    let mut next = part.clone();
    for i in 0..geom.len() {
        if !part.active[i] {
            continue;
        }
        let c = coord(i);
        if part.subarray_id[i] == first {
            if c >= keep1 {
                next.subarray_id[i] = new_id;
            } else {
                next.active[i] = false;
            }
        } else if part.subarray_id[i] == second {
            if c < keep2_end {
                next.subarray_id[i] = new_id;
            } else {
                next.active[i] = false;
            }
        }
    }
    next.subarrays[first].consumed = true;
    next.subarrays[second].consumed = true;
    let n_trans = part
        .subarrays
        .iter()
        .filter(|s| s.kind != SubarrayKind::Regular)
        .count();
    next.subarrays.push(SubarrayInfo {
        id: new_id,
        label: format!("T{}", n_trans + 1),
        kind: match axis {
            Axis::Horizontal => SubarrayKind::TransitionalHorizontal,
            Axis::Vertical => SubarrayKind::TransitionalVertical,
        },
        block: None,
        offset: d1.offset,
        donors: Some((first, second)),
        consumed: false,
    });
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::build_ura;
    use std::collections::BTreeSet;

    fn paper_120() -> ArrayPartition {
        let g = build_ura(64, 0.25, 1.0).unwrap();
        partition_multiblock(&g, 2, 2).unwrap()
    }

    #[test]
    fn multiblock_64_has_16_subarrays_of_16x16() {
        let p = paper_120();
        assert_eq!(p.subarrays().len(), 16);
        for s in p.subarrays() {
            assert_eq!(p.subarray_elements(s.id).len(), 256);
        }
        assert_eq!(p.subarray_side(), 16);
        assert_eq!(p.effective_spacing(), 0.5);
    }

    #[test]
    fn single_block_32_has_four_subarrays() {
        let g = build_ura(32, 0.25, 1.0).unwrap();
        let p = partition_multiblock(&g, 1, 2).unwrap();
        assert_eq!(p.subarrays().len(), 4);
        let labels: Vec<_> = p.subarrays().iter().map(|s| s.label.as_str()).collect();
        assert_eq!(labels, ["A1", "A2", "A3", "A4"]);
    }

    #[test]
    fn trivial_partition_is_one_subarray() {
        let g = build_ura(8, 0.5, 1.0).unwrap();
        let p = partition_multiblock(&g, 1, 1).unwrap();
        assert_eq!(p.subarrays().len(), 1);
        assert_eq!(p.subarray_elements(0).len(), 64);
    }

    #[test]
    fn divisibility_is_checked() {
        let g = build_ura(10, 0.5, 1.0).unwrap();
        assert!(partition_multiblock(&g, 2, 2).is_err());
    }

    #[test]
    fn interleaved_subarrays_are_translates() {
        let p = paper_120();
        let g = p.geometry();
        let base: BTreeSet<(usize, usize)> =
            p.subarray_elements(0).iter().map(|&i| g.coords(i)).collect();
        for local in 1..4 {
            let (ox, oy) = (local % 2, local / 2);
            let other: BTreeSet<(usize, usize)> = p
                .subarray_elements(local)
                .iter()
                .map(|&i| {
                    let (x, y) = g.coords(i);
                    (x - ox, y - oy)
                })
                .collect();
            assert_eq!(base, other);
        }
    }

    #[test]
    fn figure_six_transitional() {
        // 16×4 array, two 8×4 blocks of four 4×2 interleaved sub-arrays.
        let g = ArrayGeometry::rectangular(16, 4, 0.25, 1.0).unwrap();
        let p = ArrayPartition::with_blocks(&g, 2, 1, 2).unwrap();
        let a1 = p.regular_id((0, 0), (0, 0));
        let b1 = p.regular_id((1, 0), (0, 0));
        assert_eq!(p.subarray(a1).unwrap().label, "A1");
        assert_eq!(p.subarray(b1).unwrap().label, "B1");
        assert_eq!(p.subarray_elements(a1).len(), 8);
        let before = p.active_count();
        let t = make_transitional(&p, a1, b1, Axis::Horizontal).unwrap();
        let tid = t.subarrays().len() - 1;
        assert_eq!(t.subarray(tid).unwrap().label, "T1");
        let elems = t.subarray_elements(tid);
        assert_eq!(elems.len(), 8);
        assert_eq!(before - t.active_count(), 8);
        let xs: BTreeSet<usize> = elems.iter().map(|&i| g.coords(i).0).collect();
        assert_eq!(xs, BTreeSet::from([4, 6, 8, 10]));
        // Donors are consumed; reusing them fails.
        assert!(make_transitional(&t, a1, b1, Axis::Horizontal).is_err());
    }

    #[test]
    fn disjoint_transitionals_remove_two_subarrays_worth() {
        let p = paper_120();
        let before = p.active_count();
        let t = make_transitional(&p, p.regular_id((0, 0), (1, 1)), p.regular_id((1, 0), (1, 1)), Axis::Horizontal)
            .unwrap();
        let t = make_transitional(&t, p.regular_id((0, 1), (1, 1)), p.regular_id((1, 1), (1, 1)), Axis::Horizontal)
            .unwrap();
        assert_eq!(before - t.active_count(), 2 * 256);
    }

    #[test]
    fn non_adjacent_donors_rejected() {
        let p = paper_120();
        let a = p.regular_id((0, 0), (0, 0));
        let d = p.regular_id((1, 1), (0, 0));
        assert!(make_transitional(&p, a, d, Axis::Horizontal).is_err());
        assert!(make_transitional(&p, a, d, Axis::Vertical).is_err());
        let b = p.regular_id((1, 0), (0, 0));
        assert!(make_transitional(&p, a, b, Axis::Vertical).is_err());
    }

    #[test]
    fn vertical_transitional_is_transpose_of_horizontal() {
        let g = build_ura(32, 0.25, 1.0).unwrap();
        let p = partition_multiblock(&g, 2, 2).unwrap();
        let h = make_transitional(&p, p.regular_id((0, 0), (1, 0)), p.regular_id((1, 0), (1, 0)), Axis::Horizontal)
            .unwrap();
        let v = make_transitional(&p, p.regular_id((0, 0), (0, 1)), p.regular_id((0, 1), (0, 1)), Axis::Vertical)
            .unwrap();
        let hid = h.subarrays().len() - 1;
        let vid = v.subarrays().len() - 1;
        let hset: BTreeSet<(usize, usize)> =
            h.subarray_elements(hid).iter().map(|&i| g.coords(i)).collect();
        let vset: BTreeSet<(usize, usize)> = v
            .subarray_elements(vid)
            .iter()
            .map(|&i| {
                let (x, y) = g.coords(i);
                (y, x)
            })
            .collect();
        assert_eq!(hset, vset);
        let hoff: BTreeSet<(usize, usize)> = (0..g.len()).filter(|&i| !h.active()[i]).map(|i| g.coords(i)).collect();
        let voff: BTreeSet<(usize, usize)> = (0..g.len())
            .filter(|&i| !v.active()[i])
            .map(|i| {
                let (x, y) = g.coords(i);
                (y, x)
            })
            .collect();
        assert_eq!(hoff, voff);
    }

    #[test]
    fn partition_json_roundtrip() {
        let g = build_ura(8, 0.25, 1.0).unwrap();
        let p = partition_multiblock(&g, 2, 2).unwrap();
        let json = p.to_json().unwrap();
        let back: PartitionDescription = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p.describe());
    }
}
