//! Counting model for the toric code and the rotated planar surface code.
//!
//! Only counts are modelled; no lattice graph is built. The toric lattice
//! size is identified with the code distance `d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lattice distance of a code patch. Always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct CodeDistance(u32);

impl CodeDistance {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 {
            Err(Error::ZeroDistance)
        } else {
            Ok(Self(d))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 % 2 == 1
    }

    /// `d²` as a 64-bit count.
    pub fn squared(self) -> u64 {
        u64::from(self.0) * u64::from(self.0)
    }

    /// Doubles the distance; used by scaling checks.
    pub fn doubled(self) -> Self {
        Self(self.0 * 2)
    }
}

impl TryFrom<u32> for CodeDistance {
    type Error = Error;

    fn try_from(d: u32) -> Result<Self> {
        Self::new(d)
    }
}

impl From<CodeDistance> for u32 {
    fn from(d: CodeDistance) -> u32 {
        d.0
    }
}

impl std::fmt::Display for CodeDistance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Qubit and check counts of one code block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeCounts {
    pub data_qubits: u64,
    pub logical_qubits: u64,
    pub x_stabilizers: u64,
    pub z_stabilizers: u64,
    /// Rank of the stabilizer group.
    pub independent_checks: u64,
}

/// Toric code on a periodic `d × d` lattice with qubits on edges.
///
/// Each stabilizer type has one global constraint (the product of all stars,
/// resp. all plaquettes, is the identity), so the rank is `2d² − 2`.
pub fn toric_counts(d: CodeDistance) -> CodeCounts {
    let d2 = d.squared();
    CodeCounts {
        data_qubits: 2 * d2,
        logical_qubits: 2,
        x_stabilizers: d2,
        z_stabilizers: d2,
        independent_checks: 2 * d2 - 2,
    }
}

/// Rotated planar surface code. Only odd distances are laid out.
pub fn planar_counts(d: CodeDistance) -> Result<CodeCounts> {
    if !d.is_odd() {
        return Err(Error::EvenPlanarDistance(d.get()));
    }
    let d2 = d.squared();
    let per_type = (d2 - 1) / 2;
    Ok(CodeCounts {
        data_qubits: d2,
        logical_qubits: 1,
        x_stabilizers: per_type,
        z_stabilizers: per_type,
        independent_checks: d2 - 1,
    })
}

/// Physical qubits along one patch boundary: `d` data plus `d − 1` syndrome qubits.
pub fn seam_qubit_count(d: CodeDistance) -> u64 {
    2 * u64::from(d.get()) - 1
}
