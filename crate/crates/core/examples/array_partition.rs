//! A 64 x 64 quarter-wavelength array split into 2 x 2 blocks of four
//! interleaved sub-arrays, plus one transitional sub-array.

use covrage::array::{make_transitional, partition_multiblock, ArrayGeometry, Axis};

fn main() -> covrage::Result<()> {
    let geom = ArrayGeometry::from_frequency(64, 0.25, 120e9)?;
    let part = partition_multiblock(&geom, 2, 2)?;
    println!(
        "{} elements, {} sub-arrays of side {}, effective spacing {:.3} mm",
        geom.len(),
        part.subarrays().len(),
        part.subarray_side(),
        part.effective_spacing() * 1e3
    );
    for s in part.subarrays() {
        println!("  {:>3} {:<6} block {:?} offset {:?}", s.id, s.label, s.block, s.offset);
    }

    // Bridge block A and block B with their (1, 1) sub-arrays.
    let a = part.regular_id((0, 0), (1, 1));
    let b = part.regular_id((1, 0), (1, 1));
    let bridged = make_transitional(&part, a, b, Axis::Horizontal)?;
    let t = bridged.subarrays().last().unwrap();
    println!(
        "transitional {} from donors {:?}: {} active elements, array now has {} active",
        t.label,
        t.donors,
        bridged.subarray_elements(t.id).len(),
        bridged.active_count()
    );

    // Element map of the sub-array ids, top-left 8 x 8 corner.
    for y in 0..8 {
        let row: Vec<String> = (0..8).map(|x| format!("{:>2}", part.subarray_ids()[geom.index(x, y)])).collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
