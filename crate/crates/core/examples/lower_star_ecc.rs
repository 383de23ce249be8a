//! Lower-star decomposition of a small complex and the ECC it produces.

use eulershape::complex::lower_stars;
use eulershape::transform::ecc;
use eulershape::{Direction, FiltrationGrid, GeometricComplex};

fn main() {
    // a filled triangle with a tail
    let k = GeometricComplex::new(
        vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.8], [1.5, 1.2]],
        vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1, 2], vec![2, 3]],
    )
    .unwrap();
    let v = Direction::new(0.0, 1.0).unwrap();

    for star in lower_stars(&k, &v) {
        println!("vertex {} (chi {:+}): {:?}", star.anchor, star.chi, star.members);
    }

    let grid = FiltrationGrid::covering(&k, 11).unwrap();
    let curve = ecc(&k, &v, &grid).unwrap();
    for (t, chi) in grid.points().zip(&curve.values) {
        println!("chi(t = {t:+.3}) = {chi}");
    }
    println!("chi(K) = {}", k.euler_characteristic());
}
