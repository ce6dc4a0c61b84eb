//! Assignment of sub-arrays to sub-beams.
//!
//! Layouts are written for a horizontal trajectory on a 2 × 2 block partition
//! with interleave 2. Vertical trajectories use the transposed layout.
//! Blocks: `A = (0,0)`, `B = (1,0)`, `C = (0,1)`, `D = (1,1)`; lattice
//! offsets `(sx, sy)` count within a block.

use serde::{Deserialize, Serialize};

use super::trajectory::{Classification, Orientation, SlopeClass};
use crate::array::{make_transitional, ArrayPartition, Axis};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamType {
    /// Alternates sub-arrays between blocks so that neighbouring sub-beams
    /// come from different blocks.
    Tight,
    /// Keeps each block's sub-arrays together along the path.
    Loose,
}

impl BeamType {
    pub fn as_str(self) -> &'static str {
        match self {
            BeamType::Tight => "tight",
            BeamType::Loose => "loose",
        }
    }
}

impl std::fmt::Display for BeamType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BeamType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tight" => Ok(BeamType::Tight),
            "loose" => Ok(BeamType::Loose),
            other => Err(Error::InvalidArgument(format!("unknown beam type '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Regular { block: (usize, usize), offset: (usize, usize) },
    Transitional { axis: Axis, first: (usize, usize), second: (usize, usize), offset: (usize, usize) },
}

const A: (usize, usize) = (0, 0);
const B: (usize, usize) = (1, 0);
const C: (usize, usize) = (0, 1);
const D: (usize, usize) = (1, 1);
const O0: (usize, usize) = (0, 0);
const O1: (usize, usize) = (1, 0);
const O2: (usize, usize) = (0, 1);
const O3: (usize, usize) = (1, 1);

const fn r(block: (usize, usize), offset: (usize, usize)) -> Slot {
    Slot::Regular { block, offset }
}

const fn th(first: (usize, usize), second: (usize, usize), offset: (usize, usize)) -> Slot {
    Slot::Transitional { axis: Axis::Horizontal, first, second, offset }
}

const fn tv(first: (usize, usize), second: (usize, usize), offset: (usize, usize)) -> Slot {
    Slot::Transitional { axis: Axis::Vertical, first, second, offset }
}

const TIGHT: [Slot; 14] = [
    r(A, O0), r(C, O0), r(A, O1), r(C, O1), r(A, O2), r(C, O2),
    th(A, B, O3), th(C, D, O3),
    r(B, O0), r(D, O0), r(B, O1), r(D, O1), r(B, O2), r(D, O2),
];

const LOOSE_NON_DIAGONAL: [Slot; 14] = [
    r(A, O0), r(A, O1), r(A, O2), r(A, O3),
    r(B, O0), r(B, O1), tv(B, D, O2), tv(B, D, O3), r(D, O0), r(D, O1),
    r(C, O0), r(C, O1), r(C, O2), r(C, O3),
];

const LOOSE_SEMI_DIAGONAL: [Slot; 12] = [
    r(A, O0), r(A, O1), r(A, O2), th(A, B, O3),
    r(B, O0), tv(B, D, O1), tv(B, D, O2), r(D, O0),
    th(C, D, O3), r(C, O0), r(C, O1), r(C, O2),
];

const LOOSE_DIAGONAL: [Slot; 13] = [
    r(A, O0), r(A, O1), r(A, O2), th(A, B, O3),
    r(B, O0), r(B, O1), tv(B, D, O2), r(D, O0), r(D, O1),
    th(C, D, O3), r(C, O0), r(C, O1), r(C, O2),
];

fn swap(p: (usize, usize)) -> (usize, usize) {
    (p.1, p.0)
}

impl Slot {
    fn transposed(self) -> Slot {
        match self {
            Slot::Regular { block, offset } => Slot::Regular { block: swap(block), offset: swap(offset) },
            Slot::Transitional { axis, first, second, offset } => Slot::Transitional {
                axis: axis.swapped(),
                first: swap(first),
                second: swap(second),
                offset: swap(offset),
            },
        }
    }
}

/// Partition plus the ordered sub-array ids, one per sub-beam.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpec {
    pub beam_type: BeamType,
    pub classification: Classification,
    /// Partition after any transitional sub-arrays were formed.
    pub partition: ArrayPartition,
    /// Sub-array id per sub-beam, in trajectory order.
    pub assignment: Vec<usize>,
}

impl BeamSpec {
    pub fn subbeam_count(&self) -> usize {
        self.assignment.len()
    }

    /// Active element indices of every assigned sub-array, in assignment order.
    pub fn element_groups(&self) -> Vec<Vec<usize>> {
        let mut position = vec![usize::MAX; self.partition.subarrays().len()];
        for (k, &id) in self.assignment.iter().enumerate() {
            position[id] = k;
        }
        let mut groups = vec![Vec::new(); self.assignment.len()];
        for (i, (&id, &on)) in self
            .partition
            .subarray_ids()
            .iter()
            .zip(self.partition.active())
            .enumerate()
        {
            if on && position[id] != usize::MAX {
                groups[position[id]].push(i);
            }
        }
        groups
    }
}

fn ordered_slots(partition: &ArrayPartition, beam_type: BeamType, class: &Classification) -> Result<Vec<Slot>> {
    let (bx, by) = partition.blocks();
    let a = partition.interleave();
    let slots: Vec<Slot> = if (bx, by) == (1, 1) {
        // One block: no transitional sub-arrays, both beam types coincide.
        (0..a * a).map(|k| r((0, 0), (k % a, k / a))).collect()
    } else if (bx, by) == (2, 2) && a == 2 {
        match (beam_type, class.slope_class) {
            (BeamType::Tight, _) => TIGHT.to_vec(),
            (BeamType::Loose, SlopeClass::NonDiagonal) => LOOSE_NON_DIAGONAL.to_vec(),
            (BeamType::Loose, SlopeClass::SemiDiagonal) => LOOSE_SEMI_DIAGONAL.to_vec(),
            (BeamType::Loose, SlopeClass::Diagonal) => LOOSE_DIAGONAL.to_vec(),
        }
    } else {
        return Err(Error::UnsupportedPartition(format!(
            "no sub-array layout for {bx}×{by} blocks with interleave {a}"
        )));
    };
    Ok(match class.orientation {
        Orientation::Horizontal => slots,
        Orientation::Vertical => slots.into_iter().map(Slot::transposed).collect(),
    })
}

/// Builds the sub-array assignment for a classified trajectory.
pub fn assign(partition: &ArrayPartition, beam_type: BeamType, class: &Classification) -> Result<BeamSpec> {
    if !partition.geometry().is_square() {
        return Err(Error::UnsupportedPartition("beam layouts need a square array".into()));
    }
    let slots = ordered_slots(partition, beam_type, class)?;
    let mut part = partition.clone();
    let mut assignment = Vec::with_capacity(slots.len());
    for slot in slots {
        match slot {
            Slot::Regular { block, offset } => assignment.push(part.regular_id(block, offset)),
            Slot::Transitional { axis, first, second, offset } => {
                let (f, s) = (part.regular_id(first, offset), part.regular_id(second, offset));
                part = make_transitional(&part, f, s, axis)?;
                assignment.push(part.subarrays().len() - 1);
            }
        }
    }
    Ok(BeamSpec { beam_type, classification: *class, partition: part, assignment })
}

pub fn assign_tight(partition: &ArrayPartition, class: &Classification) -> Result<BeamSpec> {
    assign(partition, BeamType::Tight, class)
}

pub fn assign_loose(partition: &ArrayPartition, class: &Classification) -> Result<BeamSpec> {
    assign(partition, BeamType::Loose, class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{build_ura, partition_multiblock};
    use std::collections::HashSet;

    fn class(slope_class: SlopeClass, orientation: Orientation) -> Classification {
        Classification { slope_class, orientation, slope: 0.0 }
    }

    fn paper_partition() -> ArrayPartition {
        let g = build_ura(64, 0.25, 1.0).unwrap();
        partition_multiblock(&g, 2, 2).unwrap()
    }

    #[test]
    fn subbeam_counts() {
        let p = paper_partition();
        let h = Orientation::Horizontal;
        assert_eq!(assign_tight(&p, &class(SlopeClass::Diagonal, h)).unwrap().subbeam_count(), 14);
        assert_eq!(assign_loose(&p, &class(SlopeClass::NonDiagonal, h)).unwrap().subbeam_count(), 14);
        assert_eq!(assign_loose(&p, &class(SlopeClass::SemiDiagonal, h)).unwrap().subbeam_count(), 12);
        assert_eq!(assign_loose(&p, &class(SlopeClass::Diagonal, h)).unwrap().subbeam_count(), 13);
    }

    #[test]
    fn assignments_are_disjoint_and_equal_sized() {
        let p = paper_partition();
        for bt in [BeamType::Tight, BeamType::Loose] {
            for sc in [SlopeClass::NonDiagonal, SlopeClass::SemiDiagonal, SlopeClass::Diagonal] {
                for o in [Orientation::Horizontal, Orientation::Vertical] {
                    let spec = assign(&p, bt, &class(sc, o)).unwrap();
                    let ids: HashSet<usize> = spec.assignment.iter().copied().collect();
                    assert_eq!(ids.len(), spec.assignment.len());
                    let groups = spec.element_groups();
                    let mut seen = HashSet::new();
                    for g in &groups {
                        assert_eq!(g.len(), 256);
                        for e in g {
                            assert!(seen.insert(*e));
                        }
                    }
                    // Every active element belongs to an assigned sub-array.
                    assert_eq!(seen.len(), spec.partition.active_count());
                }
            }
        }
    }

    #[test]
    fn tight_alternates_blocks() {
        let p = paper_partition();
        let spec = assign_tight(&p, &class(SlopeClass::NonDiagonal, Orientation::Horizontal)).unwrap();
        let labels: Vec<&str> = spec
            .assignment
            .iter()
            .map(|&id| spec.partition.subarray(id).unwrap().label.as_str())
            .collect();
        assert_eq!(&labels[..6], &["A1", "C1", "A2", "C2", "A3", "C3"]);
        assert_eq!(&labels[8..], &["B1", "D1", "B2", "D2", "B3", "D3"]);
        assert!(labels[6].starts_with('T') && labels[7].starts_with('T'));
    }

    #[test]
    fn vertical_layout_is_transpose() {
        let p = paper_partition();
        let g = *p.geometry();
        for bt in [BeamType::Tight, BeamType::Loose] {
            let h = assign(&p, bt, &class(SlopeClass::SemiDiagonal, Orientation::Horizontal)).unwrap();
            let v = assign(&p, bt, &class(SlopeClass::SemiDiagonal, Orientation::Vertical)).unwrap();
            let (gh, gv) = (h.element_groups(), v.element_groups());
            for (a, b) in gh.iter().zip(&gv) {
                let mut t: Vec<usize> = a
                    .iter()
                    .map(|&i| {
                        let (x, y) = g.coords(i);
                        g.index(y, x)
                    })
                    .collect();
                t.sort_unstable();
                assert_eq!(&t, b);
            }
        }
    }

    #[test]
    fn single_block_uses_all_subarrays() {
        let g = build_ura(32, 0.25, 1.0).unwrap();
        let p = partition_multiblock(&g, 1, 2).unwrap();
        let t = assign_tight(&p, &class(SlopeClass::Diagonal, Orientation::Horizontal)).unwrap();
        let l = assign_loose(&p, &class(SlopeClass::Diagonal, Orientation::Horizontal)).unwrap();
        assert_eq!(t.assignment, vec![0, 1, 2, 3]);
        assert_eq!(t.assignment, l.assignment);
        let v = assign_tight(&p, &class(SlopeClass::Diagonal, Orientation::Vertical)).unwrap();
        assert_eq!(v.assignment, vec![0, 2, 1, 3]);
    }

    #[test]
    fn unsupported_partition() {
        let g = build_ura(48, 0.25, 1.0).unwrap();
        let p = partition_multiblock(&g, 3, 2).unwrap();
        assert!(matches!(
            assign_tight(&p, &class(SlopeClass::Diagonal, Orientation::Horizontal)),
            Err(Error::UnsupportedPartition(_))
        ));
    }
}
