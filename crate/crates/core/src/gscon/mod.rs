//! Ground-state connectivity: instances, unitary paths and their verification.

mod construction;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PinqError, Result};
use crate::linalg::{self, CVec};
use crate::pauli::{format_hamiltonian, parse_hamiltonian, HamiltonianSum, PauliOperator};

pub use construction::{
    build_stoquastic_gscon, middle_x_state, q_operator, r3_operator, witness_traversal,
    GsconConstruction, GsconParams, DEFAULT_ETA3, DEFAULT_PATH_LENGTH,
};

pub const INSTANCE_FORMAT: &str = "pinq-gscon-instance/1";
pub const PATH_FORMAT: &str = "pinq-gscon-path/1";

/// Unitarity tolerance for gates.
pub const UNITARY_TOL: f64 = 1e-10;
/// Absolute slack when comparing energies with thresholds.
pub const ENERGY_TOL: f64 = 1e-12;
/// Slack on the per-term norm bound.
const TERM_NORM_TOL: f64 = 1e-12;

/// A gate: a unitary on the listed qubits (first target is the most
/// significant bit of the matrix index).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryStep {
    pub targets: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
}

impl UnitaryStep {
    pub fn new(targets: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let step = UnitaryStep { targets, matrix };
        step.check().map_err(PinqError::Precondition)?;
        Ok(step)
    }

    /// Real single-qubit gate from row-major entries.
    pub fn real_1q(qubit: usize, m: [f64; 4]) -> Self {
        let matrix = DMatrix::from_row_slice(2, 2, &m.map(|v| Complex64::new(v, 0.0)));
        UnitaryStep {
            targets: vec![qubit],
            matrix,
        }
    }

    pub fn locality(&self) -> usize {
        self.targets.len()
    }

    pub fn adjoint(&self) -> UnitaryStep {
        UnitaryStep {
            targets: self.targets.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Structural problems, if any.
    fn check(&self) -> std::result::Result<(), String> {
        let k = self.targets.len();
        let mut sorted = self.targets.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != k {
            return Err("repeated target qubit".into());
        }
        let dim = 1usize << k;
        if self.matrix.shape() != (dim, dim) {
            return Err(format!(
                "matrix is {:?}, expected {dim}x{dim}",
                self.matrix.shape()
            ));
        }
        let defect = (self.matrix.adjoint() * &self.matrix - DMatrix::identity(dim, dim))
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if !(defect <= UNITARY_TOL) {
            return Err(format!("not unitary (defect {defect:.3e})"));
        }
        Ok(())
    }

    /// Applies the gate in place to an `n`-qubit state.
    pub fn apply(&self, state: &mut [Complex64], n: usize) {
        let k = self.targets.len();
        let shifts: Vec<usize> = self.targets.iter().map(|&q| n - 1 - q).collect();
        let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
        let offsets: Vec<usize> = (0..1usize << k)
            .map(|local| {
                (0..k)
                    .filter(|j| local >> (k - 1 - j) & 1 == 1)
                    .map(|j| 1usize << shifts[j])
                    .sum()
            })
            .collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); offsets.len()];
        for base in 0..state.len() {
            if base & mask != 0 {
                continue;
            }
            for (b, off) in buf.iter_mut().zip(&offsets) {
                *b = state[base + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                state[base + off] = (0..buf.len()).map(|c| self.matrix[(r, c)] * buf[c]).sum();
            }
        }
    }
}

/// Serialized gate: targets plus matrix rows of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateRecord {
    pub targets: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl From<&UnitaryStep> for GateRecord {
    fn from(s: &UnitaryStep) -> Self {
        GateRecord {
            targets: s.targets.clone(),
            matrix: s
                .matrix
                .row_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl GateRecord {
    /// Converts without validation; [`verify_path`] reports malformed steps by index.
    pub fn to_step(&self) -> Result<UnitaryStep> {
        let rows = self.matrix.len();
        if self.matrix.iter().any(|r| r.len() != rows) {
            return Err(PinqError::Precondition("gate matrix is not square".into()));
        }
        let matrix = DMatrix::from_fn(rows, rows, |r, c| {
            let [re, im] = self.matrix[r][c];
            Complex64::new(re, im)
        });
        Ok(UnitaryStep {
            targets: self.targets.clone(),
            matrix,
        })
    }
}

/// The tuple `(H, k, eta1..eta4, Delta, l, m, U_psi, U_phi)`.
#[derive(Debug, Clone)]
pub struct GsconInstance {
    pub hamiltonian: HamiltonianSum,
    pub k: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
    pub delta: f64,
    /// Largest gate support allowed on a path.
    pub l: usize,
    /// Largest path length.
    pub m: usize,
    pub u_psi: Vec<UnitaryStep>,
    pub u_phi: Vec<UnitaryStep>,
    pub metadata: InstanceMetadata,
}

/// Provenance of generated instances; not used by verification.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    /// Constant added to the source Hamiltonian before the construction.
    #[serde(default)]
    pub shift: Option<f64>,
    #[serde(default)]
    pub system_qubits: Option<usize>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceFile {
    format: String,
    hamiltonian: String,
    k: usize,
    eta1: f64,
    eta2: f64,
    eta3: f64,
    eta4: f64,
    delta: f64,
    l: usize,
    m: usize,
    u_psi: Vec<GateRecord>,
    u_phi: Vec<GateRecord>,
    #[serde(default)]
    metadata: InstanceMetadata,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PathFile {
    format: String,
    steps: Vec<GateRecord>,
}

fn prepare(n: usize, circuit: &[UnitaryStep]) -> CVec {
    let mut v = linalg::basis_state(1 << n, 0);
    for g in circuit {
        g.apply(&mut v, n);
    }
    v
}

impl GsconInstance {
    /// Checks the parameter inequalities, term norms, circuits and endpoint energies.
    pub fn validate(&self) -> Result<()> {
        let n = self.hamiltonian.n();
        if self.eta2 - self.eta1 < self.delta || self.eta4 - self.eta3 < self.delta {
            return Err(PinqError::Precondition(
                "need eta2 - eta1 >= Delta and eta4 - eta3 >= Delta".into(),
            ));
        }
        if let Some((i, t)) = self
            .hamiltonian
            .terms()
            .iter()
            .enumerate()
            .find(|(_, t)| t.norm() > 1.0 + TERM_NORM_TOL)
        {
            return Err(PinqError::Precondition(format!(
                "term {i} has norm {} > 1",
                t.norm()
            )));
        }
        for (name, circuit) in [("U_psi", &self.u_psi), ("U_phi", &self.u_phi)] {
            for (i, g) in circuit.iter().enumerate() {
                if let Err(reason) = g.check() {
                    return Err(PinqError::Precondition(format!(
                        "{name} gate {i}: {reason}"
                    )));
                }
                if g.targets.iter().any(|&q| q >= n) {
                    return Err(PinqError::Precondition(format!(
                        "{name} gate {i} acts outside {n} qubits"
                    )));
                }
            }
        }
        let op = PauliOperator::new(&self.hamiltonian)?;
        for (name, circuit) in [("start", &self.u_psi), ("target", &self.u_phi)] {
            let e = op.expectation(&prepare(n, circuit));
            if e > self.eta1 + ENERGY_TOL {
                return Err(PinqError::Precondition(format!(
                    "{name} state energy {e} exceeds eta1 = {}",
                    self.eta1
                )));
            }
        }
        Ok(())
    }

    pub fn start_state(&self) -> CVec {
        prepare(self.hamiltonian.n(), &self.u_psi)
    }

    pub fn target_state(&self) -> CVec {
        prepare(self.hamiltonian.n(), &self.u_phi)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = InstanceFile {
            format: INSTANCE_FORMAT.into(),
            hamiltonian: format_hamiltonian(&self.hamiltonian),
            k: self.k,
            eta1: self.eta1,
            eta2: self.eta2,
            eta3: self.eta3,
            eta4: self.eta4,
            delta: self.delta,
            l: self.l,
            m: self.m,
            u_psi: self.u_psi.iter().map(GateRecord::from).collect(),
            u_phi: self.u_phi.iter().map(GateRecord::from).collect(),
            metadata: self.metadata.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses and validates an instance file.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.format != INSTANCE_FORMAT {
            return Err(PinqError::Precondition(format!(
                "unknown instance format {:?}",
                file.format
            )));
        }
        let gates = |v: &[GateRecord]| {
            v.iter()
                .map(GateRecord::to_step)
                .collect::<Result<Vec<_>>>()
        };
        let inst = GsconInstance {
            hamiltonian: parse_hamiltonian(&file.hamiltonian)?,
            k: file.k,
            eta1: file.eta1,
            eta2: file.eta2,
            eta3: file.eta3,
            eta4: file.eta4,
            delta: file.delta,
            l: file.l,
            m: file.m,
            u_psi: gates(&file.u_psi)?,
            u_phi: gates(&file.u_phi)?,
            metadata: file.metadata,
        };
        inst.validate()?;
        Ok(inst)
    }
}

pub fn path_to_json(steps: &[UnitaryStep]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&PathFile {
        format: PATH_FORMAT.into(),
        steps: steps.iter().map(GateRecord::from).collect(),
    })?)
}

pub fn path_from_json(text: &str) -> Result<Vec<UnitaryStep>> {
    let file: PathFile = serde_json::from_str(text)?;
    if file.format != PATH_FORMAT {
        return Err(PinqError::Precondition(format!(
            "unknown path format {:?}",
            file.format
        )));
    }
    file.steps.iter().map(GateRecord::to_step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathOutcome {
    YesWitnessed,
    /// First state (0 = start) whose energy exceeds `eta1`.
    EnergyViolation {
        step: usize,
    },
    DistanceViolation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathVerdict {
    pub outcome: PathOutcome,
    /// Largest energy over the start state and every intermediate state.
    pub max_intermediate_energy: f64,
    pub final_distance: f64,
    /// Energy of the start state followed by each intermediate state.
    pub energies: Vec<f64>,
}

impl PathVerdict {
    pub fn is_yes(&self) -> bool {
        self.outcome == PathOutcome::YesWitnessed
    }
}

/// Runs the path from the start state, recording every intermediate energy
/// and the final distance to the target.
pub fn verify_path(inst: &GsconInstance, steps: &[UnitaryStep]) -> Result<PathVerdict> {
    let n = inst.hamiltonian.n();
    if steps.len() > inst.m {
        return Err(PinqError::MalformedStep {
            index: inst.m,
            reason: format!(
                "path has {} steps, at most m = {} allowed",
                steps.len(),
                inst.m
            ),
        });
    }
    for (index, s) in steps.iter().enumerate() {
        if s.locality() > inst.l {
            return Err(PinqError::MalformedStep {
                index,
                reason: format!("acts on {} qubits, l = {}", s.locality(), inst.l),
            });
        }
        if let Some(&q) = s.targets.iter().find(|&&q| q >= n) {
            return Err(PinqError::MalformedStep {
                index,
                reason: format!("qubit {q} outside {n} qubits"),
            });
        }
        s.check()
            .map_err(|reason| PinqError::MalformedStep { index, reason })?;
    }
    let op = PauliOperator::new(&inst.hamiltonian)?;
    let mut state = inst.start_state();
    let mut energies = vec![op.expectation(&state)];
    for s in steps {
        s.apply(&mut state, n);
        energies.push(op.expectation(&state));
    }
    let final_distance = linalg::distance(&state, &inst.target_state());
    let max_intermediate_energy = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let outcome = match energies.iter().position(|&e| e > inst.eta1 + ENERGY_TOL) {
        Some(step) => PathOutcome::EnergyViolation { step },
        None if final_distance > inst.eta3 => PathOutcome::DistanceViolation,
        None => PathOutcome::YesWitnessed,
    };
    Ok(PathVerdict {
        outcome,
        max_intermediate_energy,
        final_distance,
        energies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial_instance() -> GsconInstance {
        GsconInstance {
            hamiltonian: HamiltonianSum::from_pauli_strs(2, &[(0.5, "ZZ")]).unwrap(),
            k: 2,
            eta1: 0.5,
            eta2: 1.0,
            eta3: 1e-6,
            eta4: 0.5,
            delta: 0.4,
            l: 2,
            m: 4,
            u_psi: vec![],
            u_phi: vec![],
            metadata: InstanceMetadata::default(),
        }
    }

    #[test]
    fn gate_application_orders_targets() {
        let x = UnitaryStep::real_1q(1, [0.0, 1.0, 1.0, 0.0]);
        let mut v = linalg::basis_state(4, 0);
        x.apply(&mut v, 2);
        assert_eq!(v[1], Complex64::new(1.0, 0.0));
        // CNOT with control 1, target 0: |01> -> |11>
        let mut m = DMatrix::<Complex64>::identity(4, 4);
        m.swap_rows(2, 3);
        let cnot = UnitaryStep::new(vec![1, 0], m).unwrap();
        cnot.apply(&mut v, 2);
        assert_eq!(v[3], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn empty_path_between_equal_states() {
        let inst = trivial_instance();
        inst.validate().unwrap();
        let v = verify_path(&inst, &[]).unwrap();
        assert!(v.is_yes());
        assert_eq!(v.final_distance, 0.0);
    }

    #[test]
    fn over_local_step_is_rejected() {
        let mut inst = trivial_instance();
        inst.l = 1;
        let step = UnitaryStep::new(vec![0, 1], DMatrix::identity(4, 4)).unwrap();
        let e = verify_path(
            &inst,
            &[UnitaryStep::real_1q(0, [1.0, 0.0, 0.0, 1.0]), step],
        )
        .unwrap_err();
        assert!(matches!(e, PinqError::MalformedStep { index: 1, .. }));
    }

    #[test]
    fn energy_and_distance_violations() {
        let inst = trivial_instance();
        // |00> -> |10> raises <ZZ>/2 from 0.5 to -0.5, then back to |11> (0.5)
        let x0 = UnitaryStep::real_1q(0, [0.0, 1.0, 1.0, 0.0]);
        let v = verify_path(&inst, std::slice::from_ref(&x0)).unwrap();
        assert_eq!(v.outcome, PathOutcome::DistanceViolation);
        let mut hot = inst.clone();
        hot.eta1 = 0.0;
        hot.eta2 = 1.0;
        hot.hamiltonian = HamiltonianSum::from_pauli_strs(2, &[(-0.5, "ZZ")]).unwrap();
        let v = verify_path(&hot, &[x0]).unwrap();
        assert_eq!(v.outcome, PathOutcome::EnergyViolation { step: 1 });
    }

    #[test]
    fn instance_json_round_trip() {
        let mut inst = trivial_instance();
        inst.u_phi = vec![UnitaryStep::real_1q(0, [1.0, 0.0, 0.0, -1.0])];
        let text = inst.to_json().unwrap();
        let back = GsconInstance::from_json(&text).unwrap();
        assert_eq!(back.hamiltonian, inst.hamiltonian);
        assert_eq!(back.u_phi, inst.u_phi);
        let bad = text.replace("\"eta2\": 1.0", "\"eta2\": 0.6");
        assert!(GsconInstance::from_json(&bad).is_err());
    }
}
