//! Single- and two-qubit unitaries with checked construction.

use num_complex::Complex64;

use super::QsimError;
use crate::rng::SimRng;
use crate::TOL_ALGEBRAIC;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2x2 unitary. Construction verifies U†U = I entrywise to 1e-12.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2 {
    m: [[Complex64; 2]; 2],
}

impl Unitary2 {
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self, QsimError> {
        if !is_unitary2(&m, TOL_ALGEBRAIC) {
            return Err(QsimError::NonUnitary);
        }
        Ok(Self { m })
    }

    /// Entries in row-major order; no unitarity check. Reserved for matrices
    /// that are unitary by construction.
    pub(crate) fn from_rows_unchecked(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn rows(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn dagger(&self) -> Self {
        Self {
            m: [
                [self.m[0][0].conj(), self.m[1][0].conj()],
                [self.m[0][1].conj(), self.m[1][1].conj()],
            ],
        }
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = self.m[r][0] * rhs.m[0][c] + self.m[r][1] * rhs.m[1][c];
            }
        }
        Self { m }
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn identity() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn x() -> Self {
        Self {
            m: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn y() -> Self {
        Self {
            m: [
                [ZERO, Complex64::new(0.0, -1.0)],
                [Complex64::new(0.0, 1.0), ZERO],
            ],
        }
    }

    pub fn z() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn h() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            m: [[s, s], [s, -s]],
        }
    }

    pub fn s() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, Complex64::new(0.0, 1.0)]],
        }
    }

    pub fn s_dagger() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, Complex64::new(0.0, -1.0)]],
        }
    }

    pub fn t() -> Self {
        let p = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        Self {
            m: [[ONE, ZERO], [ZERO, p]],
        }
    }

    pub fn t_dagger() -> Self {
        let p = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        Self {
            m: [[ONE, ZERO], [ZERO, p]],
        }
    }

    /// Haar-random unitary via Gram-Schmidt on Gaussian columns.
    pub fn random(rng: &mut SimRng) -> Self {
        use rand::Rng;
        let mut gauss = || {
            // Box-Muller.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let r = (-2.0 * u1.ln()).sqrt();
            Complex64::from_polar(r, 2.0 * std::f64::consts::PI * u2)
        };
        let mut c0 = [gauss(), gauss()];
        let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
        c0 = [c0[0] / n0, c0[1] / n0];
        let mut c1 = [gauss(), gauss()];
        let overlap = c0[0].conj() * c1[0] + c0[1].conj() * c1[1];
        c1 = [c1[0] - overlap * c0[0], c1[1] - overlap * c0[1]];
        let n1 = (c1[0].norm_sqr() + c1[1].norm_sqr()).sqrt();
        c1 = [c1[0] / n1, c1[1] / n1];
        Self::from_rows_unchecked([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    /// If `self = phase * other` with |phase| = 1, returns the phase.
    pub fn phase_relative_to(&self, other: &Self, tol: f64) -> Option<Complex64> {
        // phase = tr(other† self) / 2 when the two are proportional.
        let od = other.dagger();
        let prod = od.mul(self);
        let phase = (prod.m[0][0] + prod.m[1][1]) / 2.0;
        if (phase.norm() - 1.0).abs() > tol {
            return None;
        }
        for r in 0..2 {
            for c in 0..2 {
                if (self.m[r][c] - phase * other.m[r][c]).norm() > tol {
                    return None;
                }
            }
        }
        Some(phase)
    }
}

fn is_unitary2(m: &[[Complex64; 2]; 2], tol: f64) -> bool {
    for i in 0..2 {
        for j in 0..2 {
            let mut dot = ZERO;
            for k in 0..2 {
                dot += m[k][i].conj() * m[k][j];
            }
            let expect = if i == j { ONE } else { ZERO };
            if (dot - expect).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// A 4x4 unitary acting on an ordered qubit pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary4 {
    m: [[Complex64; 4]; 4],
}

impl Unitary4 {
    pub fn new(m: [[Complex64; 4]; 4]) -> Result<Self, QsimError> {
        for i in 0..4 {
            for j in 0..4 {
                let mut dot = ZERO;
                for k in 0..4 {
                    dot += m[k][i].conj() * m[k][j];
                }
                let expect = if i == j { ONE } else { ZERO };
                if (dot - expect).norm() > TOL_ALGEBRAIC {
                    return Err(QsimError::NonUnitary);
                }
            }
        }
        Ok(Self { m })
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    /// CNOT with the first tensor factor as control.
    pub fn cnot() -> Self {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][1] = ONE;
        m[2][3] = ONE;
        m[3][2] = ONE;
        Self { m }
    }

    /// Kronecker product `a ⊗ b` (a on the first factor).
    pub fn kron(a: &Unitary2, b: &Unitary2) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for ar in 0..2 {
            for ac in 0..2 {
                for br in 0..2 {
                    for bc in 0..2 {
                        m[ar * 2 + br][ac * 2 + bc] = a.entry(ar, ac) * b.entry(br, bc);
                    }
                }
            }
        }
        Self { m }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                for k in 0..4 {
                    *e += self.m[r][k] * rhs.m[k][c];
                }
            }
        }
        Self { m }
    }

    /// If `self = phase * other` with |phase| = 1, returns the phase.
    pub fn phase_relative_to(&self, other: &Self, tol: f64) -> Option<Complex64> {
        // Anchor the phase on the largest entry of `other`; a unitary's
        // largest entry has magnitude at least 1/4.
        let mut anchor = (0usize, 0usize);
        let mut largest = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                let mag = other.m[r][c].norm();
                if mag > largest {
                    largest = mag;
                    anchor = (r, c);
                }
            }
        }
        if largest < 0.25 {
            return None;
        }
        let phase = self.m[anchor.0][anchor.1] / other.m[anchor.0][anchor.1];
        if (phase.norm() - 1.0).abs() > tol {
            return None;
        }
        for r in 0..4 {
            for c in 0..4 {
                if (self.m[r][c] - phase * other.m[r][c]).norm() > tol {
                    return None;
                }
            }
        }
        Some(phase)
    }
}

/// The single-qubit Pauli operators, identity included.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Unitary2 {
        match self {
            Pauli::I => Unitary2::identity(),
            Pauli::X => Unitary2::x(),
            Pauli::Y => Unitary2::y(),
            Pauli::Z => Unitary2::z(),
        }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn named_gates_are_unitary() {
        for g in [
            Unitary2::identity(),
            Unitary2::x(),
            Unitary2::y(),
            Unitary2::z(),
            Unitary2::h(),
            Unitary2::s(),
            Unitary2::s_dagger(),
            Unitary2::t(),
            Unitary2::t_dagger(),
        ] {
            assert!(Unitary2::new(g.rows()).is_ok());
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let m = [[ONE, ONE], [ZERO, ONE]];
        assert!(matches!(Unitary2::new(m), Err(QsimError::NonUnitary)));
    }

    #[test]
    fn random_unitaries_pass_check() {
        let mut rng = seeded(7);
        for _ in 0..100 {
            let u = Unitary2::random(&mut rng);
            assert!(Unitary2::new(u.rows()).is_ok());
        }
    }

    #[test]
    fn kron_matches_hand_values() {
        let xz = Unitary4::kron(&Unitary2::x(), &Unitary2::z());
        // X⊗Z maps |00⟩ -> |10⟩, |01⟩ -> -|11⟩.
        assert_eq!(xz.entry(2, 0), ONE);
        assert_eq!(xz.entry(3, 1), -ONE);
    }

    #[test]
    fn phase_relative_detects_global_phase() {
        let u = Unitary2::h();
        let phased = {
            let p = Complex64::from_polar(1.0, 0.7);
            let m = u.rows();
            Unitary2::from_rows_unchecked([[m[0][0] * p, m[0][1] * p], [m[1][0] * p, m[1][1] * p]])
        };
        let got = phased.phase_relative_to(&u, 1e-12).expect("proportional");
        assert!((got - Complex64::from_polar(1.0, 0.7)).norm() < 1e-12);
        assert!(Unitary2::x()
            .phase_relative_to(&Unitary2::z(), 1e-12)
            .is_none());
    }
}
