//! Stabilizer-circuit simulation and measurement-induced entanglement (MIE)
//! analysis for random Clifford circuits on 2D grids.
//!
//! The crate is layered bottom-up:
//!
//! * [`pauli`], [`gf2`], [`gate`], [`tableau`]: bit-packed Pauli algebra,
//!   GF(2) elimination and the destabilizer/stabilizer tableau.
//! * [`sampling`]: uniform Clifford and Pauli sampling, small-group enumeration.
//! * [`arch`]: circuit templates (brickwork, coarse-grained, compiled), lightcones
//!   and the circuit text format.
//! * [`mie`], [`ghz`], [`cluster`], [`advantage`]: the entanglement criteria and
//!   the Monte Carlo / exhaustive checks built on them.
//! * [`dense`] and [`gbg`]: a small statevector oracle and the gate-by-gate
//!   classical sampler that uses it for lightcone marginals.
//!
//! Qubits are indexed from 0. On a grid with `cols` columns qubit `(r, c)` has
//! index `r * cols + c`.

pub mod advantage;
pub mod arch;
mod bits;
pub mod cluster;
pub mod dense;
pub mod dyadic;
pub mod error;
pub mod gate;
pub mod gbg;
pub mod gf2;
pub mod ghz;
pub mod mie;
pub mod pauli;
pub mod sampling;
pub mod seed;
pub mod stats;
pub mod tableau;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use gate::CliffordGate;
pub use pauli::PauliString;
pub use tableau::StabilizerTableau;
