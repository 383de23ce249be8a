//! The boundary of an n-gon has Euler characteristic 0; filling it in gives 1.

use std::f64::consts::TAU;

use eulershape::transform::ecc;
use eulershape::{Direction, FiltrationGrid, GeometricComplex};

fn polygon(n: usize, filled: bool) -> GeometricComplex {
    let mut vertices: Vec<[f64; 2]> = (0..n)
        .map(|i| Direction::from_angle(TAU * i as f64 / n as f64).as_array())
        .collect();
    let mut simplices: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    if filled {
        vertices.push([0.0, 0.0]);
        for i in 0..n {
            simplices.push(vec![i, n]);
            simplices.push(vec![i, (i + 1) % n, n]);
        }
    }
    GeometricComplex::new(vertices, simplices).unwrap()
}

fn main() {
    for n in [3, 8, 50] {
        let ring = polygon(n, false);
        let disk = polygon(n, true);
        println!(
            "{n:>2}-gon: boundary chi = {}, filled chi = {}",
            ring.euler_characteristic(),
            disk.euler_characteristic()
        );
    }

    let grid = FiltrationGrid::new(1.2, 13).unwrap();
    let up = Direction::from_angle(TAU / 4.0);
    let ring = ecc(&polygon(12, false), &up, &grid).unwrap();
    let disk = ecc(&polygon(12, true), &up, &grid).unwrap();
    println!("\n{:>6} {:>5} {:>5}", "t", "ring", "disk");
    for (i, t) in grid.points().enumerate() {
        println!("{t:>6.2} {:>5} {:>5}", ring.values[i], disk.values[i]);
    }
}
