//! Gate schedules: the brick wall on a ring and the eight-step pattern on a
//! torus, printed as the bonds touched at each step.

use mipt::lattice::{quarter_partition, Boundary, Lattice};

fn main() -> mipt::Result<()> {
    let ring = Lattice::ring(8)?;
    for step in 0..2 {
        let pairs: Vec<String> = ring.schedule(step)?.iter().map(|g| format!("{}-{}", g.control, g.partner)).collect();
        println!("ring step {step}: {}", pairs.join(" "));
    }

    let torus = Lattice::torus(4)?;
    for step in 0..8 {
        let layer = torus.schedule(step)?;
        let dir = layer.first().map(|g| format!("{:?}", g.direction)).unwrap_or_default();
        let pairs: Vec<String> = layer.iter().map(|g| format!("{}-{}", g.control, g.partner)).collect();
        println!("torus step {step} ({dir}): {}", pairs.join(" "));
    }

    let open = Lattice::new(2, 4, Boundary::Open)?;
    println!("open 4x4 step 0 keeps {} of {} gates", open.schedule(0)?.len(), torus.schedule(0)?.len());

    let q = quarter_partition(&torus)?;
    println!("quarters of the 4x4 torus: {q:?}");
    Ok(())
}
