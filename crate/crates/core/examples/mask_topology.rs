//! Betti numbers of binary masks, preprocessing and quadrant tiling.

use eulershape::imageops::{betti, mask_to_complex, preprocess_mask, tile, BinaryMask, TilePlacement};
use eulershape::synth::{gen_arm_masks, ArmShapeSpec};

fn main() {
    // two rings and a dot
    let ring = |x: usize, y: usize, cx: f64, cy: f64| {
        let r = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
        (5.0..8.0).contains(&r)
    };
    let img = BinaryMask::from_fn(60, 30, |x, y| {
        ring(x, y, 15.0, 15.0) || ring(x, y, 40.0, 15.0) || (x == 55 && y == 3)
    })
    .unwrap();
    let (b0, b1) = betti(&img);
    println!(
        "rings: b0 = {b0}, b1 = {b1}, chi = {}",
        mask_to_complex(&img).euler_characteristic()
    );

    let arm = &gen_arm_masks(&ArmShapeSpec::presets()[0], 1, true, 5).unwrap()[0];
    let clean = preprocess_mask(arm, 1500, 96).unwrap();
    println!(
        "tripod: area {} -> {}, betti {:?}",
        arm.area(),
        clean.area(),
        betti(&clean)
    );

    for t in tile(&clean, 48, &TilePlacement::Lattice).unwrap() {
        println!(
            "tile r{} c{} at ({}, {}): area {}, betti {:?}",
            t.row,
            t.col,
            t.x0,
            t.y0,
            t.mask.area(),
            betti(&t.mask)
        );
    }
}
