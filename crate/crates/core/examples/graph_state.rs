//! Graph-state engine basics: a GHZ state from CZ gates, entropies of
//! regions, Pauli measurements and the JSON dump.

use mipt::clifford::{LocalClifford, Pauli};
use mipt::graph::GraphState;
use mipt::rng::stream;

fn main() -> mipt::Result<()> {
    let mut rng = stream(0, 0);

    // star graph = GHZ state up to Hadamards on the leaves
    let mut g = GraphState::new_plus_state(5)?;
    for leaf in 1..5 {
        g.apply_cz(0, leaf)?;
    }
    println!("star: {} edges, S(0) = {}, S(0,1) = {}", g.edge_count(), g.entanglement_entropy(&[0]), g.entanglement_entropy(&[0, 1]));

    // local complementation turns the star into a complete graph
    let mut lc = g.clone();
    lc.local_complement(0)?;
    println!("after LC at 0: {} edges, same state: {}", lc.edge_count(), lc.to_statevector()? .iter().zip(g.to_statevector()?).all(|(a, b)| (a - b).norm() < 1e-12));

    // measuring Z on the centre disentangles everything
    let out = g.measure_pauli(0, Pauli::Z, &mut rng)?;
    println!("Z on centre: outcome {:+} (deterministic: {}), edges left {}", out.value, out.deterministic, g.edge_count());

    // Bell pair and a deterministic parity check
    let mut bell = GraphState::new_plus_state(2)?;
    bell.apply_cz(0, 1)?;
    bell.apply_local(1, LocalClifford::H)?;
    let zz = bell.measure_parity_zz(0, 1, &mut rng)?;
    println!("Bell pair: S = {}, ZZ = {:+} (deterministic: {})", bell.entanglement_entropy(&[0]), zz.value, zz.deterministic);

    println!("{}", serde_json::to_string(&bell.dump())?);
    Ok(())
}
