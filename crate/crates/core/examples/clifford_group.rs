//! The 24-element local and 11,520-element two-qubit Clifford groups:
//! sizes, entangling classes and one decomposition into CZ and local gates.

use mipt::clifford::{LocalClifford, Pauli, Step, TwoQubitClifford, CLASS_SIZES};
use mipt::rng::stream;

fn main() {
    println!("local Clifford group: {} elements", LocalClifford::all().count());
    for g in [LocalClifford::H, LocalClifford::S] {
        for p in Pauli::ALL {
            let img = g.map_pauli(p);
            let sign = if img.sign < 0 { "-" } else { "+" };
            println!("  {} {p:?} {}† = {sign}{:?}", g.name(), g.name(), img.pauli);
        }
    }

    let mut classes = [0usize; 4];
    for c in TwoQubitClifford::all() {
        classes[c.entangling_class()] += 1;
    }
    println!(
        "two-qubit Clifford group: {} elements, by CZ count {classes:?} (expected {CLASS_SIZES:?})",
        TwoQubitClifford::all().count()
    );

    let mut rng = stream(3, 0);
    let c = TwoQubitClifford::sample(&mut rng);
    let steps: Vec<String> = c
        .decomposition()
        .iter()
        .map(|s| match s {
            Step::LocalA(g) => format!("{}(a)", g.name()),
            Step::LocalB(g) => format!("{}(b)", g.name()),
            Step::Cz => "CZ".into(),
        })
        .collect();
    println!("element {}: {}", c.id(), steps.join(" · "));
}
