//! Acceptance probability of projecting one four-qubit GHZ copy onto another
//! under independent single-qubit depolarizing noise.
//!
//! Copy `A` controls four CNOTs onto copy `B`, then `A` is read out in the X
//! basis and the product `S` of the four outcomes is kept when `S = +1`.
//! Noise acts on all eight qubits just before the CNOT layer. Measuring
//! `∏ X_{A_i}` after the CNOTs equals measuring `∏ X_{A_i} X_{B_i}` before
//! them, so an error flips `S` exactly when it carries a Z component.
//!
//! Phases are dropped everywhere: only the X and Z components of a Pauli are
//! tracked.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the physical depolarizing range.
pub const MAX_DEPOLARIZING_RATE: f64 = 0.75;

/// Qubits per GHZ copy.
pub const GHZ_SIZE: usize = 4;

/// Number of noisy qubits in the projection (two copies).
pub const NOISY_QUBITS: usize = 2 * GHZ_SIZE;

/// Single-qubit Pauli label, phase ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn from_components(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product up to phase.
    pub fn compose(self, other: Pauli) -> Pauli {
        Pauli::from_components(self.has_x() ^ other.has_x(), self.has_z() ^ other.has_z())
    }

    /// Whether the two single-qubit operators anticommute.
    pub fn anticommutes_with(self, other: Pauli) -> bool {
        (self.has_x() & other.has_z()) ^ (self.has_z() & other.has_x())
    }
}

impl std::fmt::Display for Pauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Conjugates `P_control ⊗ P_target` by a CNOT, dropping the phase.
///
/// X on the control spreads to the target, Z on the target spreads to the
/// control; everything else passes through.
pub fn cnot_conjugate(control: Pauli, target: Pauli) -> (Pauli, Pauli) {
    let control_out = Pauli::from_components(control.has_x(), control.has_z() ^ target.has_z());
    let target_out = Pauli::from_components(target.has_x() ^ control.has_x(), target.has_z());
    (control_out, target_out)
}

/// Where a Pauli error on the Bell pair of a teleported CNOT ends up.
///
/// The Z part lands on the control, the X part on the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeleportedCnotError {
    pub control: Pauli,
    pub target: Pauli,
}

pub fn teleported_cnot_error_map(bell_error: Pauli) -> TeleportedCnotError {
    TeleportedCnotError {
        control: Pauli::from_components(false, bell_error.has_z()),
        target: Pauli::from_components(bell_error.has_x(), false),
    }
}

/// Depolarizing parameters of the eight qubits, four per GHZ copy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingRates {
    copy_a: [f64; GHZ_SIZE],
    copy_b: [f64; GHZ_SIZE],
}

impl DepolarizingRates {
    /// Rejects rates outside `[0, 3/4]`, where the channel weights stop being a distribution.
    pub fn new(copy_a: [f64; GHZ_SIZE], copy_b: [f64; GHZ_SIZE]) -> Result<Self> {
        for &p in copy_a.iter().chain(copy_b.iter()) {
            check_rate(p)?;
        }
        Ok(Self { copy_a, copy_b })
    }

    pub fn symmetric(p: f64) -> Result<Self> {
        Self::new([p; GHZ_SIZE], [p; GHZ_SIZE])
    }

    pub fn noiseless() -> Self {
        Self {
            copy_a: [0.0; GHZ_SIZE],
            copy_b: [0.0; GHZ_SIZE],
        }
    }

    /// Builds rates from a flat array ordered `A1..A4, B1..B4`.
    pub fn from_flat(rates: [f64; NOISY_QUBITS]) -> Result<Self> {
        let mut a = [0.0; GHZ_SIZE];
        let mut b = [0.0; GHZ_SIZE];
        a.copy_from_slice(&rates[..GHZ_SIZE]);
        b.copy_from_slice(&rates[GHZ_SIZE..]);
        Self::new(a, b)
    }

    pub fn copy_a(&self) -> &[f64; GHZ_SIZE] {
        &self.copy_a
    }

    pub fn copy_b(&self) -> &[f64; GHZ_SIZE] {
        &self.copy_b
    }

    /// All eight rates ordered `A1..A4, B1..B4`.
    pub fn flat(&self) -> [f64; NOISY_QUBITS] {
        let mut out = [0.0; NOISY_QUBITS];
        out[..GHZ_SIZE].copy_from_slice(&self.copy_a);
        out[GHZ_SIZE..].copy_from_slice(&self.copy_b);
        out
    }
}

fn check_rate(p: f64) -> Result<f64> {
    if !(0.0..=MAX_DEPOLARIZING_RATE).contains(&p) {
        return Err(Error::OutOfRange {
            field: "depolarizing rate",
            value: p,
            range: "[0, 3/4]",
        });
    }
    Ok(p)
}

/// Probability that the depolarizing channel applies `pauli`.
pub fn pauli_weight(rate: f64, pauli: Pauli) -> f64 {
    match pauli {
        Pauli::I => 1.0 - rate,
        _ => rate / 3.0,
    }
}

/// Probability that one qubit's error flips the parity: `2p/3` (Y or Z).
pub fn flip_probability(rate: f64) -> f64 {
    2.0 * rate / 3.0
}

/// Mean and acceptance probability of the measured parity `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityOutcome {
    pub moment: f64,
    pub accept_probability: f64,
}

impl ParityOutcome {
    pub fn from_moment(moment: f64) -> Self {
        Self {
            moment,
            accept_probability: 0.5 * (1.0 + moment),
        }
    }
}

/// `E[S] = ∏ (1 − 4/3 · p)` over the eight qubits.
pub fn parity_moment(rates: &DepolarizingRates) -> f64 {
    rates.flat().iter().map(|&p| 1.0 - 4.0 / 3.0 * p).product()
}

pub fn parity_accept_probability(rates: &DepolarizingRates) -> ParityOutcome {
    ParityOutcome::from_moment(parity_moment(rates))
}

/// `½ [1 + (1 − 4p/3)^8]` for a common rate on all eight qubits.
pub fn symmetric_accept_probability(p: f64) -> Result<f64> {
    check_rate(p)?;
    Ok(0.5 * (1.0 + (1.0 - 4.0 / 3.0 * p).powi(NOISY_QUBITS as i32)))
}

/// Second-order expansion `1 − 16p/3 + 224p²/9` of the symmetric acceptance.
pub fn series_approx_accept(p: f64) -> Result<f64> {
    check_rate(p)?;
    Ok(1.0 - 16.0 / 3.0 * p + 224.0 / 9.0 * p * p)
}

/// One Pauli per noisy qubit, ordered `A1..A4, B1..B4`.
pub type ErrorPattern = [Pauli; NOISY_QUBITS];

/// Decodes pattern index `0..4^8` into Paulis, two bits per qubit.
pub fn pattern_from_index(index: u32) -> ErrorPattern {
    let mut out = [Pauli::I; NOISY_QUBITS];
    for (q, slot) in out.iter_mut().enumerate() {
        *slot = Pauli::ALL[((index >> (2 * q)) & 3) as usize];
    }
    out
}

pub const PATTERN_COUNT: u32 = 1 << (2 * NOISY_QUBITS);

/// Parity sign from the ζ rule: each qubit with a Z component contributes −1.
pub fn parity_sign_zeta(pattern: &ErrorPattern) -> i8 {
    let flips = pattern.iter().filter(|p| p.has_z()).count();
    if flips % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Parity sign by conjugating `∏ X_{A_i}` back through the CNOT layer and
/// testing anticommutation with the error pattern.
pub fn parity_sign_by_conjugation(pattern: &ErrorPattern) -> i8 {
    let mut anticommuting = false;
    for i in 0..GHZ_SIZE {
        // CNOT is self-inverse, so U† M U uses the same conjugation map.
        let (on_a, on_b) = cnot_conjugate(Pauli::X, Pauli::I);
        anticommuting ^= pattern[i].anticommutes_with(on_a);
        anticommuting ^= pattern[GHZ_SIZE + i].anticommutes_with(on_b);
    }
    if anticommuting {
        -1
    } else {
        1
    }
}

/// Probability weight of one error pattern.
pub fn pattern_weight(rates: &DepolarizingRates, pattern: &ErrorPattern) -> f64 {
    rates
        .flat()
        .iter()
        .zip(pattern)
        .map(|(&rate, &pauli)| pauli_weight(rate, pauli))
        .product()
}

/// Exact acceptance probability by summing over all `4^8` error patterns.
///
/// Patterns are visited in index order with compensated summation, so the
/// result is reproducible bit for bit.
pub fn exhaustive_parity_accept(rates: &DepolarizingRates) -> f64 {
    let mut accepted = NeumaierSum::default();
    for index in 0..PATTERN_COUNT {
        let pattern = pattern_from_index(index);
        if parity_sign_zeta(&pattern) == 1 {
            accepted.add(pattern_weight(rates, &pattern));
        }
    }
    accepted.total()
}

#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.compensation
    }
}
