use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use super::{C0, C1};
use crate::{Error, Result};

/// Row-major 2×2 complex matrix.
pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Matrix2 {
        let i = Complex64::i();
        match self {
            Pauli::I => [[C1, C0], [C0, C1]],
            Pauli::X => [[C0, C1], [C1, C0]],
            Pauli::Y => [[C0, -i], [i, C0]],
            Pauli::Z => [[C1, C0], [C0, -C1]],
        }
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Whether the Pauli anticommutes with `Z`, i.e. flips a computational
    /// basis bit.
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    SqrtX,
    SqrtXDag,
    /// `diag(e^{-iθ/2}, e^{iθ/2})`.
    Rz(f64),
    /// Controlled-X; the first qubit is the control.
    CX,
    CZ,
    /// Pauli inserted by a mitigation transform (twirl frame).
    Pauli(Pauli),
    /// Arbitrary single-qubit unitary, validated on construction.
    Unitary(Matrix2),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ => 2,
            _ => 1,
        }
    }

    pub fn is_two_qubit_clifford(&self) -> bool {
        matches!(self, GateKind::CX | GateKind::CZ)
    }

    /// Single-qubit matrix; `None` for two-qubit kinds.
    pub fn matrix1(&self) -> Option<Matrix2> {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let half = |re: f64, im: f64| Complex64::new(re / 2.0, im / 2.0);
        Some(match *self {
            GateKind::H => [[s, s], [s, -s]],
            GateKind::X => Pauli::X.matrix(),
            GateKind::SqrtX => [[half(1.0, 1.0), half(1.0, -1.0)], [half(1.0, -1.0), half(1.0, 1.0)]],
            GateKind::SqrtXDag => {
                [[half(1.0, -1.0), half(1.0, 1.0)], [half(1.0, 1.0), half(1.0, -1.0)]]
            }
            GateKind::Rz(theta) => [
                [Complex64::from_polar(1.0, -theta / 2.0), C0],
                [C0, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            GateKind::Pauli(p) => p.matrix(),
            GateKind::Unitary(m) => m,
            GateKind::CX | GateKind::CZ => return None,
        })
    }

    /// 4×4 matrix in the local basis `index = bit(q_first) + 2·bit(q_second)`.
    pub fn matrix2(&self) -> Option<[[Complex64; 4]; 4]> {
        let mut m = [[C0; 4]; 4];
        match self {
            GateKind::CX => {
                for (col, row) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
                    m[row][col] = C1;
                }
            }
            GateKind::CZ => {
                for k in 0..4 {
                    m[k][k] = if k == 3 { -C1 } else { C1 };
                }
            }
            _ => return None,
        }
        Some(m)
    }

    pub fn inverse(&self) -> GateKind {
        match *self {
            GateKind::SqrtX => GateKind::SqrtXDag,
            GateKind::SqrtXDag => GateKind::SqrtX,
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::Unitary(m) => GateKind::Unitary(adjoint2(&m)),
            other => other,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::H => write!(f, "H"),
            GateKind::X => write!(f, "X"),
            GateKind::SqrtX => write!(f, "SX"),
            GateKind::SqrtXDag => write!(f, "SXdg"),
            GateKind::Rz(t) => write!(f, "RZ({t:.6})"),
            GateKind::CX => write!(f, "CX"),
            GateKind::CZ => write!(f, "CZ"),
            GateKind::Pauli(p) => write!(f, "P{}", p.label()),
            GateKind::Unitary(_) => write!(f, "U2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubits {
    One(usize),
    Two(usize, usize),
}

impl Qubits {
    pub fn contains(&self, q: usize) -> bool {
        match *self {
            Qubits::One(a) => a == q,
            Qubits::Two(a, b) => a == q || b == q,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Qubits::One(a) => (a, None),
            Qubits::Two(a, b) => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn max(&self) -> usize {
        self.iter().max().unwrap_or(0)
    }
}

/// A gate kind bound to the qubits it acts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Qubits,
}

impl Gate {
    fn one(kind: GateKind, q: usize) -> Gate {
        Gate { kind, qubits: Qubits::One(q) }
    }

    pub fn h(q: usize) -> Gate {
        Gate::one(GateKind::H, q)
    }
    pub fn x(q: usize) -> Gate {
        Gate::one(GateKind::X, q)
    }
    pub fn sx(q: usize) -> Gate {
        Gate::one(GateKind::SqrtX, q)
    }
    pub fn sxdg(q: usize) -> Gate {
        Gate::one(GateKind::SqrtXDag, q)
    }
    pub fn rz(q: usize, theta: f64) -> Gate {
        Gate::one(GateKind::Rz(theta), q)
    }
    pub fn pauli(q: usize, p: Pauli) -> Gate {
        Gate::one(GateKind::Pauli(p), q)
    }
    pub fn cx(control: usize, target: usize) -> Gate {
        Gate { kind: GateKind::CX, qubits: Qubits::Two(control, target) }
    }
    pub fn cz(a: usize, b: usize) -> Gate {
        Gate { kind: GateKind::CZ, qubits: Qubits::Two(a, b) }
    }

    /// Custom single-qubit unitary; rejects matrices that are not unitary to
    /// 1e-12.
    pub fn unitary(q: usize, m: Matrix2) -> Result<Gate> {
        let dev = unitarity_deviation(&m);
        if dev > 1e-12 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Gate::one(GateKind::Unitary(m), q))
    }

    pub fn inverse(&self) -> Gate {
        Gate { kind: self.kind.inverse(), qubits: self.qubits }
    }

    /// Checks arity, distinctness and range against an `n_qubits` register.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        match (self.kind.arity(), self.qubits) {
            (1, Qubits::One(_)) | (2, Qubits::Two(_, _)) => {}
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "gate {} given wrong number of qubits",
                    self.kind
                )))
            }
        }
        if let Qubits::Two(a, b) = self.qubits {
            if a == b {
                return Err(Error::DuplicateQubit(a));
            }
        }
        for q in self.qubits.iter() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qubits {
            Qubits::One(a) => write!(f, "{}({a})", self.kind),
            Qubits::Two(a, b) => write!(f, "{}({a},{b})", self.kind),
        }
    }
}

pub(crate) fn adjoint2(m: &Matrix2) -> Matrix2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub(crate) fn mul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[C0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn unitarity_deviation(m: &Matrix2) -> f64 {
    let p = mul2(&adjoint2(m), m);
    let mut dev: f64 = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { C1 } else { C0 };
            dev = dev.max((v - target).norm());
        }
    }
    dev
}

pub fn matrix2_is_unitary(m: &Matrix2, tol: f64) -> bool {
    unitarity_deviation(m) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixed_kind_is_unitary() {
        for kind in [
            GateKind::H,
            GateKind::X,
            GateKind::SqrtX,
            GateKind::SqrtXDag,
            GateKind::Rz(0.37),
            GateKind::Pauli(Pauli::Y),
        ] {
            assert!(matrix2_is_unitary(&kind.matrix1().unwrap(), 1e-12), "{kind}");
        }
    }

    #[test]
    fn sqrt_x_squares_to_x() {
        let sx = GateKind::SqrtX.matrix1().unwrap();
        let x = mul2(&sx, &sx);
        assert!((x[0][1] - C1).norm() < 1e-15 && x[0][0].norm() < 1e-15);
        let id = mul2(&sx, &GateKind::SqrtXDag.matrix1().unwrap());
        assert!((id[0][0] - C1).norm() < 1e-15 && id[1][0].norm() < 1e-15);
    }

    #[test]
    fn rejects_non_unitary_custom_matrix() {
        let m = [[C1, C1], [C0, C1]];
        assert!(matches!(Gate::unitary(0, m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn validate_catches_bad_indices() {
        assert_eq!(Gate::cx(1, 1).validate(3), Err(Error::DuplicateQubit(1)));
        assert_eq!(
            Gate::h(3).validate(3),
            Err(Error::QubitOutOfRange { index: 3, n_qubits: 3 })
        );
        assert!(Gate::cx(0, 2).validate(3).is_ok());
    }
}
