//! Vectorized SampEuler of an ellipse field: the rightmost window puts all
//! mass on the number of ellipses, and DETECT can be read back from the
//! histogram.

use eulershape::synth::{gen_ellipse_field, CenterSampler, EllipseFieldSpec};
use eulershape::transform::{detect_curves, detect_from_histogram, sampeuler, vectorize};
use eulershape::FiltrationGrid;

fn main() {
    for (count, centers) in [
        (50, CenterSampler::Square { side: 50.0 }),
        (40, CenterSampler::ThreeQuadrant { side: 50.0 }),
    ] {
        let spec = EllipseFieldSpec {
            centers,
            ..EllipseFieldSpec::square(count)
        };
        let field = gen_ellipse_field(&spec, 11).unwrap();
        let grid = FiltrationGrid::covering(&field, 300).unwrap();
        let measure = sampeuler(&field, 200, &grid, 3).unwrap();
        let hist = vectorize(&measure, 10, None).unwrap();

        let last = hist.windows.len() - 1;
        println!("{count} ellipses, chi = {}", field.euler_characteristic());
        println!(
            "  rightmost window mass at k = {count}: {}",
            hist.mass(last, count as i32)
        );
        let mid = hist.windows.len() / 2;
        let spread: Vec<(i32, f64)> = (-hist.chi_bound..=hist.chi_bound)
            .map(|k| (k, hist.mass(mid, k)))
            .filter(|&(_, m)| m > 0.0)
            .collect();
        println!("  middle window, (value, mass): {spread:?}");

        let full = vectorize(&measure, 1, None).unwrap();
        let a = detect_curves(&measure.curves).unwrap();
        let b = detect_from_histogram(&full).unwrap();
        let gap = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        println!("  DETECT recovered from the histogram, largest gap {gap:.2e}");
    }
}
