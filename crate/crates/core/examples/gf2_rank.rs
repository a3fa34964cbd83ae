//! Rank over GF(2) of random bit matrices, and the cut rank behind
//! entanglement entropies.

use mipt::gf2::{biadjacency, BitMatrix};
use mipt::rng::stream;
use rand::Rng;

fn main() {
    let mut rng = stream(1, 0);
    for (rows, cols, density) in [(8, 8, 0.5), (64, 64, 0.5), (64, 32, 0.1), (200, 300, 0.02)] {
        let bits: Vec<Vec<bool>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random::<f64>() < density).collect())
            .collect();
        let m = BitMatrix::from_rows(&bits).unwrap();
        println!("{rows:>4} x {cols:<4} density {density:<4} rank {}", m.rank());
    }

    // a ring of 8 vertices cut into two arcs of 4 has cut rank 2
    let adjacency: Vec<Vec<usize>> = (0..8).map(|i| vec![(i + 7) % 8, (i + 1) % 8]).collect();
    let a: Vec<usize> = (0..4).collect();
    let b: Vec<usize> = (4..8).collect();
    println!("ring cut rank: {}", biadjacency(&adjacency, &a, &b).unwrap().rank());
}
