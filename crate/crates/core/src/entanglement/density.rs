use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Index of a two-qubit basis state in the order `|11>, |10>, |01>, |00>`.
pub fn basis_index(first_excited: bool, second_excited: bool) -> usize {
    3 - ((first_excited as usize) << 1 | second_excited as usize)
}

/// Two-qubit density matrix in the basis `|11>, |10>, |01>, |00>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitDensityMatrix {
    entries: [[Complex64; 4]; 4],
}

impl TwoQubitDensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: [[Complex64; 4]; 4]) -> Result<Self> {
        let rho = Self { entries };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(entries: [[Complex64; 4]; 4]) -> Self {
        Self { entries }
    }

    /// Pure state from four amplitudes in basis order.
    pub fn from_pure(psi: [Complex64; 4]) -> Result<Self> {
        let mut entries = [[ZERO; 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = psi[i] * psi[j].conj();
            }
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn to_matrix(&self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|i, j| self.entries[i][j])
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order. Assumes Hermiticity.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.to_matrix());
        let mut vals = [
            eig.eigenvalues[0],
            eig.eigenvalues[1],
            eig.eigenvalues[2],
            eig.eigenvalues[3],
        ];
        vals.sort_by(f64::total_cmp);
        vals
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.iter().flatten().any(|e| !(e.re.is_finite() && e.im.is_finite())) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} differs from 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// Density matrix of `n` qubits restricted to the single-excitation sector:
/// basis `|G>, |1_1>, ..., |1_n>` (index 0 is the all-ground state).
#[derive(Clone, Debug, PartialEq)]
pub struct SectorDensityMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl SectorDensityMatrix {
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("sector matrix needs at least two qubits"));
        }
        if entries.len() != (n + 1) * (n + 1) {
            return Err(Error::invalid(format!(
                "sector matrix for n = {n} needs {} entries, got {}",
                (n + 1) * (n + 1),
                entries.len()
            )));
        }
        Ok(Self { n, entries })
    }

    /// `|psi><psi| + (1 - <psi|psi>) |G><G|` for a single-excitation vector
    /// `psi` given by its amplitude on each qubit.
    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        let n = amps.len();
        let dim = n + 1;
        let mut entries = vec![ZERO; dim * dim];
        for (i, a) in amps.iter().enumerate() {
            for (j, b) in amps.iter().enumerate() {
                entries[(i + 1) * dim + (j + 1)] = a * b.conj();
            }
        }
        let excited: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        entries[0] = Complex64::new(1.0 - excited, 0.0);
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry between sector basis states `row` and `col` (0 = `|G>`).
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * (self.n + 1) + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..=self.n).map(|i| self.get(i, i)).sum()
    }
}

/// Excitation pattern of a sector basis state seen from a chosen pair of
/// qubits: the two kept bits plus which other qubit (if any) is excited.
fn split_basis_state(state: usize, a: usize, b: usize) -> (bool, bool, Option<usize>) {
    match state {
        0 => (false, false, None),
        s if s == a => (true, false, None),
        s if s == b => (false, true, None),
        s => (false, false, Some(s)),
    }
}

/// Reduced state of qubits `keep = (a, b)` (1-based labels) obtained by
/// tracing every other qubit out of a sector density matrix.
///
/// Works entry by entry: `|p><q|` contributes to `|kept_p><kept_q|` exactly
/// when `p` and `q` agree on every traced-out qubit.
pub fn partial_trace_oracle(full: &SectorDensityMatrix, keep: (usize, usize)) -> Result<TwoQubitDensityMatrix> {
    let (a, b) = keep;
    let n = full.n();
    if a == b || !(1..=n).contains(&a) || !(1..=n).contains(&b) {
        return Err(Error::invalid(format!("cannot keep qubits ({a}, {b}) of {n}")));
    }
    let mut reduced = [[ZERO; 4]; 4];
    for p in 0..=n {
        let (pa, pb, p_rest) = split_basis_state(p, a, b);
        for q in 0..=n {
            let (qa, qb, q_rest) = split_basis_state(q, a, b);
            if p_rest == q_rest {
                reduced[basis_index(pa, pb)][basis_index(qa, qb)] += full.get(p, q);
            }
        }
    }
    Ok(TwoQubitDensityMatrix::new_unchecked(reduced))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn basis_order() {
        assert_eq!(basis_index(true, true), 0);
        assert_eq!(basis_index(true, false), 1);
        assert_eq!(basis_index(false, true), 2);
        assert_eq!(basis_index(false, false), 3);
    }

    #[test]
    fn validation_catches_each_violation() {
        let mut e = [[ZERO; 4]; 4];
        e[3][3] = c(1.0);
        assert!(TwoQubitDensityMatrix::new(e).is_ok());

        let mut bad_trace = e;
        bad_trace[3][3] = c(0.9);
        assert!(TwoQubitDensityMatrix::new(bad_trace).is_err());

        let mut non_herm = e;
        non_herm[0][3] = Complex64::new(0.0, 0.1);
        assert!(TwoQubitDensityMatrix::new(non_herm).is_err());

        let mut negative = [[ZERO; 4]; 4];
        negative[0][0] = c(1.5);
        negative[3][3] = c(-0.5);
        assert!(TwoQubitDensityMatrix::new(negative).is_err());
    }

    #[test]
    fn two_qubit_sector_trace_is_relabeling() {
        // n = 2: the sector basis |G>, |1_1>, |1_2> is |00>, |10>, |01>.
        let amps = [Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.5)];
        let full = SectorDensityMatrix::from_amplitudes(&amps).unwrap();
        let red = partial_trace_oracle(&full, (1, 2)).unwrap();
        let map = [3, 1, 2];
        for p in 0..3 {
            for q in 0..3 {
                assert_eq!(red.get(map[p], map[q]), full.get(p, q));
            }
        }
        assert_eq!(red.get(0, 0), ZERO);
    }

    #[test]
    fn partial_trace_rejects_bad_indices() {
        let full = SectorDensityMatrix::from_amplitudes(&[c(0.5); 4]).unwrap();
        assert!(partial_trace_oracle(&full, (1, 1)).is_err());
        assert!(partial_trace_oracle(&full, (0, 2)).is_err());
        assert!(partial_trace_oracle(&full, (2, 5)).is_err());
        assert!(SectorDensityMatrix::new(3, vec![ZERO; 9]).is_err());
    }
}
