use nalgebra::{DMatrix, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use super::givens::{givens_decompose, GivensRotation};
use super::{canonical_frame, energy, CovMatrix, HamMatrix, PURITY_TOL};
use crate::error::{PinqError, Result};

pub const PATH_FORMAT: &str = "pinq-ff-path/1";
/// Block values must reach their targets to this tolerance.
const TARGET_TOL: f64 = 1e-12;
/// End-point agreement tolerance.
const END_TOL: f64 = 1e-8;

/// One gate of a free-fermion path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PathGate {
    Givens(GivensRotation),
    /// Orthogonal matrix on the listed Majorana coordinates.
    Orthogonal {
        coords: Vec<usize>,
        matrix: Vec<Vec<f64>>,
    },
}

impl PathGate {
    /// Modes touched, sorted and deduplicated.
    pub fn modes(&self) -> Vec<usize> {
        let mut m: Vec<usize> = match self {
            PathGate::Givens(g) => vec![g.p / 2, g.q / 2],
            PathGate::Orthogonal { coords, .. } => coords.iter().map(|c| c / 2).collect(),
        };
        m.sort_unstable();
        m.dedup();
        m
    }

    fn apply(&self, gamma: &mut DMatrix<f64>) -> Result<()> {
        match self {
            PathGate::Givens(g) => {
                if g.q >= gamma.nrows() {
                    return Err(PinqError::Dimension(format!(
                        "rotation plane ({}, {}) out of range",
                        g.p, g.q
                    )));
                }
                g.conjugate(gamma);
            }
            PathGate::Orthogonal { coords, matrix } => {
                let d = gamma.nrows();
                let k = coords.len();
                if coords.iter().any(|&c| c >= d)
                    || matrix.len() != k
                    || matrix.iter().any(|r| r.len() != k)
                {
                    return Err(PinqError::Dimension(
                        "orthogonal gate does not match its coordinates".into(),
                    ));
                }
                let mut full = DMatrix::identity(d, d);
                for (a, &ca) in coords.iter().enumerate() {
                    for (b, &cb) in coords.iter().enumerate() {
                        full[(ca, cb)] = matrix[a][b];
                    }
                }
                let orth = (full.transpose() * &full - DMatrix::identity(d, d)).amax();
                if orth > 1e-8 {
                    return Err(PinqError::Precondition(format!(
                        "gate is not orthogonal (defect {orth:.3e})"
                    )));
                }
                *gamma = &full * &*gamma * full.transpose();
            }
        }
        Ok(())
    }
}

/// A sequence of Gaussian gates taking `start` to `end`, grouped into
/// macro-steps along a straight line in block-value space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FermionPath {
    pub format: String,
    pub modes: usize,
    pub macro_steps: usize,
    /// Gate count after each macro-step; the residual alignment follows.
    pub macro_ends: Vec<usize>,
    pub gates: Vec<PathGate>,
    /// Energy after macro-steps `0..=N`, then after the residual alignment.
    pub grid_energies: Vec<f64>,
    /// Linear ramp values at macro-steps `0..=N`.
    pub ramp: Vec<f64>,
    /// Largest distance of any intermediate energy from the ramp segment of
    /// its macro-step (or from the end energy during the residual).
    pub epsilon: f64,
    /// Largest `|grid energy - ramp|` over macro-step boundaries.
    pub max_grid_deviation: f64,
    /// Largest distance from the end energy during the residual alignment.
    pub residual_deviation: f64,
    pub start: Vec<Vec<f64>>,
    pub end: Vec<Vec<f64>>,
    /// `W` with the path written in `W`-conjugated coordinates, when `h` was
    /// block-diagonalized first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Vec<Vec<f64>>>,
}

impl FermionPath {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: FermionPath = serde_json::from_str(text)?;
        if p.format != PATH_FORMAT {
            return Err(PinqError::Precondition(format!(
                "unknown path format {:?}",
                p.format
            )));
        }
        Ok(p)
    }

    pub fn start_cov(&self) -> Result<CovMatrix> {
        CovMatrix::new(rows_to_matrix(&self.start)?)
    }

    pub fn end_cov(&self) -> Result<CovMatrix> {
        CovMatrix::new(rows_to_matrix(&self.end)?)
    }
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(PinqError::Dimension(
            "matrix rows have unequal length".into(),
        ));
    }
    Ok(DMatrix::from_fn(d, d, |r, c| rows[r][c]))
}

fn e4(i: usize, j: usize) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    m
}

/// Self-dual and anti-self-dual bases of 4x4 antisymmetric matrices. The
/// two triples commute with each other, so conjugating by `exp(t n.L)`
/// rotates the self-dual coordinates and fixes the anti-self-dual ones.
fn dual_bases() -> ([Matrix4<f64>; 3], [Matrix4<f64>; 3]) {
    (
        [
            e4(0, 1) + e4(2, 3),
            e4(0, 2) - e4(1, 3),
            e4(0, 3) + e4(1, 2),
        ],
        [
            e4(0, 1) - e4(2, 3),
            e4(0, 2) + e4(1, 3),
            e4(0, 3) - e4(1, 2),
        ],
    )
}

fn coords(m: &Matrix4<f64>, basis: &[Matrix4<f64>; 3]) -> Vector3<f64> {
    Vector3::from_fn(|a, _| m.component_mul(&basis[a]).sum() / 4.0)
}

/// Rotation taking `from` to `to` (equal norms) through the smallest angle.
fn rotation_between(
    from: &Vector3<f64>,
    to: &Vector3<f64>,
    basis: &[Matrix4<f64>; 3],
    probe: &Matrix4<f64>,
) -> Matrix4<f64> {
    let norm = from.norm();
    if norm < 1e-15 || (from - to).norm() <= 1e-15 * norm.max(1.0) {
        return Matrix4::identity();
    }
    let cross = from.cross(to);
    let theta = cross.norm().atan2(from.dot(to));
    let axis = if cross.norm() > 1e-14 * norm * norm {
        cross.normalize()
    } else {
        // antiparallel: any axis orthogonal to `from`
        let trial = if from.x.abs() < 0.9 * norm {
            Vector3::x()
        } else {
            Vector3::y()
        };
        from.cross(&trial).normalize()
    };
    let gen = basis[0] * axis.x + basis[1] * axis.y + basis[2] * axis.z;
    let candidate = |t: f64| Matrix4::identity() * t.cos() + gen * t.sin();
    // the half-angle sign depends on the basis orientation; pick the one that lands on `to`
    let plus = candidate(theta / 2.0);
    let minus = candidate(-theta / 2.0);
    let err = |o: &Matrix4<f64>| (coords(&(o * probe * o.transpose()), basis) - to).norm();
    if err(&plus) <= err(&minus) {
        plus
    } else {
        minus
    }
}

/// Rotation on the coordinates of modes `(k, k+1)` moving their block values
/// as close to `(want_p, want_q)` as the pair block allows, `want_p` first.
fn pair_step(gamma: &DMatrix<f64>, k: usize, want_p: f64, want_q: f64) -> Matrix4<f64> {
    let base = 2 * k;
    let m = Matrix4::from_fn(|r, c| gamma[(base + r, base + c)]);
    let (lb, rb) = dual_bases();
    let x = coords(&m, &lb);
    let y = coords(&m, &rb);
    let (xn, yn) = (x.norm(), y.norm());
    // c_p = x1 + y1, c_q = x1 - y1 with |x1| <= |x|, |y1| <= |y|
    let cp = want_p.clamp(-(xn + yn), xn + yn);
    let lo = (-2.0 * xn - cp).max(cp - 2.0 * yn);
    let hi = (2.0 * xn - cp).min(cp + 2.0 * yn);
    let cq = want_q.clamp(lo, hi.max(lo));
    let x1 = ((cp + cq) / 2.0).clamp(-xn, xn);
    let y1 = ((cp - cq) / 2.0).clamp(-yn, yn);
    let target = |v: &Vector3<f64>, n: f64, first: f64| {
        let perp = Vector3::new(0.0, v.y, v.z);
        let rest = (n * n - first * first).max(0.0).sqrt();
        let dir = if perp.norm() > 1e-15 {
            perp.normalize()
        } else {
            Vector3::y()
        };
        Vector3::new(first, 0.0, 0.0) + dir * rest
    };
    let ox = rotation_between(&x, &target(&x, xn, x1), &lb, &m);
    let m1 = ox * m * ox.transpose();
    let oy = rotation_between(&y, &target(&y, yn, y1), &rb, &m1);
    oy * ox
}

struct Walker<'a> {
    gamma: DMatrix<f64>,
    h: &'a HamMatrix,
    gates: Vec<PathGate>,
}

impl Walker<'_> {
    fn energy(&self) -> f64 {
        self.gamma.component_mul(&self.h.matrix().transpose()).sum()
    }

    fn block_values(&self) -> Vec<f64> {
        (0..self.h.n())
            .map(|j| self.gamma[(2 * j, 2 * j + 1)])
            .collect()
    }

    /// Applies `o` on coordinates `offset..offset+o.nrows()` as Givens factors,
    /// returning the energies after each factor.
    fn apply_local(&mut self, o: &DMatrix<f64>, offset: usize) -> Result<Vec<f64>> {
        let mut energies = Vec::new();
        for g in givens_decompose(o)? {
            let g = GivensRotation::new(g.p + offset, g.q + offset, g.theta);
            g.conjugate(&mut self.gamma);
            self.gates.push(PathGate::Givens(g));
            energies.push(self.energy());
        }
        Ok(energies)
    }

    fn transfer(&mut self, target: &[f64]) -> Result<Vec<f64>> {
        let n = target.len();
        let mut energies = Vec::new();
        let max_sweeps = 8 * n.max(1);
        for _ in 0..max_sweeps {
            let c = self.block_values();
            let off = c
                .iter()
                .zip(target)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if off <= TARGET_TOL {
                return Ok(energies);
            }
            for k in 0..n.saturating_sub(1) {
                let c = self.block_values();
                let want_q = if k + 2 == n {
                    target[k + 1]
                } else {
                    c[k + 1] + (c[k] - target[k])
                };
                let o4 = pair_step(&self.gamma, k, target[k], want_q);
                let o = DMatrix::from_fn(4, 4, |r, c| o4[(r, c)]);
                energies.extend(self.apply_local(&o, 2 * k)?);
            }
        }
        let c = self.block_values();
        let off = c
            .iter()
            .zip(target)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if off <= TARGET_TOL {
            Ok(energies)
        } else {
            Err(PinqError::Unreachable(format!(
                "block values {target:?} not reached (off by {off:.3e})"
            )))
        }
    }
}

/// Gaussian path from `start` to `end` whose energy follows the straight
/// line between the end-point energies in `macro_steps` steps.
///
/// `h` must be block diagonal; rotate it first with
/// [`HamMatrix::block_diagonalize`] and conjugate both states by the same `W`.
pub fn interpolation_path(
    start: &CovMatrix,
    end: &CovMatrix,
    h: &HamMatrix,
    macro_steps: usize,
) -> Result<FermionPath> {
    let n = h.n();
    if start.n() != n || end.n() != n {
        return Err(PinqError::Dimension(format!(
            "states have {} and {} modes, h has {n}",
            start.n(),
            end.n()
        )));
    }
    if macro_steps == 0 {
        return Err(PinqError::Precondition(
            "macro-step count must be positive".into(),
        ));
    }
    if !h.is_block_diagonal() {
        return Err(PinqError::Precondition("h must be block diagonal".into()));
    }
    for (name, g) in [("start", start), ("end", end)] {
        if !g.is_pure() {
            return Err(PinqError::Precondition(format!(
                "{name} state is not pure (defect {:.3e})",
                g.purity_defect()
            )));
        }
    }
    let parity = start.parity();
    if end.parity() != parity {
        return Err(PinqError::Unreachable(
            "start and end have different parity".into(),
        ));
    }
    let c0 = start.block_values();
    let c1 = end.block_values();
    let e0 = energy(start, h)?;
    let e1 = energy(end, h)?;
    let ramp: Vec<f64> = (0..=macro_steps)
        .map(|j| e0 + (e1 - e0) * j as f64 / macro_steps as f64)
        .collect();

    let mut w = Walker {
        gamma: start.matrix().clone(),
        h,
        gates: Vec::new(),
    };
    let mut grid = vec![w.energy()];
    let mut macro_ends = Vec::with_capacity(macro_steps);
    let mut epsilon = 0.0f64;
    for j in 1..=macro_steps {
        let t = j as f64 / macro_steps as f64;
        let target: Vec<f64> = c0.iter().zip(&c1).map(|(a, b)| a + (b - a) * t).collect();
        let (lo, hi) = (ramp[j - 1].min(ramp[j]), ramp[j - 1].max(ramp[j]));
        for e in w.transfer(&target)? {
            epsilon = epsilon.max((lo - e).max(e - hi).max(0.0));
        }
        macro_ends.push(w.gates.len());
        grid.push(w.energy());
    }
    let max_grid_deviation = grid
        .iter()
        .zip(&ramp)
        .fold(0.0f64, |m, (g, r)| m.max((g - r).abs()));
    epsilon = epsilon.max(max_grid_deviation);

    let mut residual_deviation = 0.0f64;
    let here = CovMatrix::new(w.gamma.clone())?;
    if (here.matrix() - end.matrix()).amax() > 1e-12 {
        let f_here = canonical_frame(&here, parity, None);
        let f_end = canonical_frame(end, parity, Some(&f_here));
        let o = f_end * f_here.transpose();
        for e in w.apply_local(&o, 0)? {
            residual_deviation = residual_deviation.max((e - e1).abs());
        }
    }
    epsilon = epsilon.max(residual_deviation);
    grid.push(w.energy());
    let miss = (&w.gamma - end.matrix()).amax();
    if miss > END_TOL {
        return Err(PinqError::Unreachable(format!(
            "path ends {miss:.3e} away from the end state"
        )));
    }
    Ok(FermionPath {
        format: PATH_FORMAT.to_string(),
        modes: n,
        macro_steps,
        macro_ends,
        gates: w.gates,
        grid_energies: grid,
        ramp,
        epsilon,
        max_grid_deviation,
        residual_deviation,
        start: matrix_to_rows(start.matrix()),
        end: matrix_to_rows(end.matrix()),
        frame: None,
    })
}

/// Outcome of replaying a path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FfVerdict {
    pub passed: bool,
    pub max_purity_defect: f64,
    /// First gate touching more than two modes.
    pub first_nonlocal_gate: Option<usize>,
    pub end_distance: f64,
    /// First macro-step boundary with energy above `eta1`.
    pub first_energy_violation: Option<usize>,
    pub max_grid_energy: f64,
    pub max_energy: f64,
}

/// Replays `path` from its start state: purity after every gate, gate
/// locality, arrival at the end state and `energy <= eta1` at every
/// macro-step boundary.
pub fn verify_ff_path(path: &FermionPath, h: &HamMatrix, eta1: f64) -> Result<FfVerdict> {
    let start = path.start_cov()?;
    let end = path.end_cov()?;
    if start.n() != h.n() || end.n() != h.n() {
        return Err(PinqError::Dimension(
            "path and h disagree on the mode count".into(),
        ));
    }
    if path.macro_ends.windows(2).any(|w| w[0] > w[1])
        || path
            .macro_ends
            .last()
            .is_some_and(|&e| e > path.gates.len())
    {
        return Err(PinqError::MalformedStep {
            index: 0,
            reason: "macro-step boundaries are not increasing".into(),
        });
    }
    let mut gamma = start.matrix().clone();
    let d = gamma.nrows();
    let en = |g: &DMatrix<f64>| g.component_mul(&h.matrix().transpose()).sum();
    let purity = |g: &DMatrix<f64>| (g.transpose() * g - DMatrix::identity(d, d)).amax();
    let mut max_purity_defect = purity(&gamma);
    let mut first_nonlocal_gate = None;
    let mut first_energy_violation = None;
    let mut max_grid_energy = en(&gamma);
    let mut max_energy = max_grid_energy;
    if max_grid_energy > eta1 {
        first_energy_violation = Some(0);
    }
    let mut boundary = path.macro_ends.iter().peekable();
    let mut macro_index = 0;
    for (i, gate) in path.gates.iter().enumerate() {
        if gate.modes().len() > 2 && first_nonlocal_gate.is_none() {
            first_nonlocal_gate = Some(i);
        }
        gate.apply(&mut gamma)
            .map_err(|e| PinqError::MalformedStep {
                index: i,
                reason: e.to_string(),
            })?;
        max_purity_defect = max_purity_defect.max(purity(&gamma));
        let e = en(&gamma);
        max_energy = max_energy.max(e);
        while boundary.peek().is_some_and(|&&b| b == i + 1) {
            boundary.next();
            macro_index += 1;
            max_grid_energy = max_grid_energy.max(e);
            if e > eta1 && first_energy_violation.is_none() {
                first_energy_violation = Some(macro_index);
            }
        }
    }
    // boundaries with no gates before them sit at the start state
    let end_distance = (&gamma - end.matrix()).amax();
    let final_energy = en(&gamma);
    max_grid_energy = max_grid_energy.max(final_energy);
    if final_energy > eta1 && first_energy_violation.is_none() {
        first_energy_violation = Some(path.macro_steps);
    }
    let passed = max_purity_defect <= PURITY_TOL
        && first_nonlocal_gate.is_none()
        && end_distance <= END_TOL
        && first_energy_violation.is_none();
    Ok(FfVerdict {
        passed,
        max_purity_defect,
        first_nonlocal_gate,
        end_distance,
        first_energy_violation,
        max_grid_energy,
        max_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffgauss::{canonical_gamma0, random_special_orthogonal, Parity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flipped(n: usize) -> CovMatrix {
        let g = canonical_gamma0(n, Parity::Even);
        CovMatrix::new(-g.matrix()).unwrap()
    }

    #[test]
    fn dual_bases_are_quaternionic_and_commute() {
        let (l, r) = dual_bases();
        for a in 0..3 {
            assert_eq!(l[a] * l[a], -Matrix4::identity());
            assert_eq!(r[a] * r[a], -Matrix4::identity());
            for rb in &r {
                assert_eq!(l[a] * rb, rb * l[a]);
            }
        }
    }

    #[test]
    fn two_mode_flip_follows_the_ramp() {
        let start = canonical_gamma0(2, Parity::Even);
        let end = flipped(2);
        let h = HamMatrix::from_block_weights(&[1.0, 1.0]);
        let path = interpolation_path(&start, &end, &h, 16).unwrap();
        assert_eq!(path.ramp[0], -4.0);
        assert_eq!(path.ramp[16], 4.0);
        assert!(path.max_grid_deviation < 1e-12);
        assert!(path.epsilon < 1.0);
        assert!(path.gates.iter().all(|g| g.modes().len() <= 2));
        let v = verify_ff_path(&path, &h, 4.0 + 1e-9).unwrap();
        assert!(v.passed, "{v:?}");
        let v = verify_ff_path(&path, &h, 0.0).unwrap();
        assert!(!v.passed);
        assert!(v.first_energy_violation.is_some());
    }

    #[test]
    fn three_modes_reach_a_vertex() {
        let start = canonical_gamma0(3, Parity::Even);
        // negate blocks 1 and 2; the Pfaffian sign is unchanged
        let mut e = start.matrix().clone();
        for j in 1..3 {
            e[(2 * j, 2 * j + 1)] = -1.0;
            e[(2 * j + 1, 2 * j)] = 1.0;
        }
        let end = CovMatrix::new(e).unwrap();
        let h = HamMatrix::from_block_weights(&[0.5, 1.0, 0.25]);
        let path = interpolation_path(&start, &end, &h, 8).unwrap();
        assert!(verify_ff_path(&path, &h, 10.0).unwrap().passed);
    }

    #[test]
    fn random_same_block_values_use_the_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let start =
            canonical_gamma0(2, Parity::Even).rotated(&random_special_orthogonal(4, &mut rng));
        let h = HamMatrix::from_block_weights(&[1.0, 0.5]);
        let path = interpolation_path(&start, &start, &h, 4).unwrap();
        assert!(path.gates.is_empty());
        let end =
            canonical_gamma0(2, Parity::Even).rotated(&random_special_orthogonal(4, &mut rng));
        let path = interpolation_path(&start, &end, &h, 4).unwrap();
        let v = verify_ff_path(&path, &h, f64::INFINITY).unwrap();
        assert!(v.end_distance < 1e-8 && v.max_purity_defect < 1e-10);
    }

    #[test]
    fn parity_mismatch_is_unreachable() {
        let h = HamMatrix::from_block_weights(&[1.0, 1.0]);
        let r = interpolation_path(
            &canonical_gamma0(2, Parity::Even),
            &canonical_gamma0(2, Parity::Odd),
            &h,
            4,
        );
        assert!(matches!(r, Err(PinqError::Unreachable(_))));
    }

    #[test]
    fn json_round_trip_and_nonlocal_gates() {
        let h = HamMatrix::from_block_weights(&[1.0, 1.0, 1.0]);
        let start = canonical_gamma0(3, Parity::Even);
        let mut path = interpolation_path(&start, &start, &h, 1).unwrap();
        let back = FermionPath::from_json(&path.to_json().unwrap()).unwrap();
        assert_eq!(back.gates, path.gates);
        path.gates.push(PathGate::Orthogonal {
            coords: vec![0, 2, 4],
            matrix: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        });
        let v = verify_ff_path(&path, &h, 10.0).unwrap();
        assert_eq!(v.first_nonlocal_gate, Some(0));
        assert!(!v.passed);
    }
}
