use num_complex::Complex64;
use rand::Rng;

use super::gates::{Gate, Pauli};
use crate::error::{Error, Result};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 24;

/// Dense amplitudes of a q-qubit register. Bit k of a basis index holds qubit k.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `qubits` qubits.
    pub fn zero(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Domain(format!(
                "qubit count {qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    /// Normalizes the given amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(Error::Domain(format!("{len} amplitudes is not 2^q for 1 ≤ q ≤ {MAX_QUBITS}")));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("amplitudes have zero or non-finite norm".into()));
        }
        Ok(Self {
            qubits: len.trailing_zeros() as usize,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Haar-ish random state from Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        let dist = rand_distr::StandardNormal;
        let amps = (0..1usize << qubits)
            .map(|_| Complex64::new(rng.sample(dist), rng.sample(dist)))
            .collect();
        Self::from_amplitudes(amps)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.qubits {
            Ok(())
        } else {
            Err(Error::Index {
                index: q,
                len: self.qubits,
            })
        }
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::Pauli(p, q) => {
                self.check_qubit(q)?;
                self.apply_pauli(p, q, None);
            }
            Gate::Rotation { axis, qubit, angle } => {
                self.check_qubit(qubit)?;
                self.apply_rotation(axis, qubit, angle, None);
            }
            Gate::Controlled { pauli, control, target } => {
                self.check_pair(control, target)?;
                self.apply_pauli(pauli, target, Some(control));
            }
            Gate::ControlledRotation { axis, control, target, angle } => {
                self.check_pair(control, target)?;
                self.apply_rotation(axis, target, angle, Some(control));
            }
        }
        Ok(())
    }

    /// Applies the inverse of `gate` in place.
    pub fn apply_inverse(&mut self, gate: &Gate) -> Result<()> {
        self.apply(&gate.inverse())
    }

    fn check_pair(&self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::Domain(format!("control and target are both qubit {control}")));
        }
        Ok(())
    }

    fn apply_pauli(&mut self, p: Pauli, target: usize, control: Option<usize>) {
        let t = 1usize << target;
        let cmask = control.map_or(0, |c| 1usize << c);
        let i = Complex64::i();
        match p {
            Pauli::Z => {
                let mask = t | cmask;
                for (idx, a) in self.amps.iter_mut().enumerate() {
                    if idx & mask == mask {
                        *a = -*a;
                    }
                }
            }
            Pauli::X | Pauli::Y => {
                for lo in 0..self.amps.len() {
                    if lo & t != 0 || lo & cmask != cmask {
                        continue;
                    }
                    let hi = lo | t;
                    let (a, b) = (self.amps[lo], self.amps[hi]);
                    if p == Pauli::X {
                        self.amps[lo] = b;
                        self.amps[hi] = a;
                    } else {
                        self.amps[lo] = -i * b;
                        self.amps[hi] = i * a;
                    }
                }
            }
        }
    }

    fn apply_rotation(&mut self, axis: Pauli, target: usize, angle: f64, control: Option<usize>) {
        let (s, c) = (0.5 * angle).sin_cos();
        let t = 1usize << target;
        let cmask = control.map_or(0, |c| 1usize << c);
        match axis {
            Pauli::Z => {
                let lo_phase = Complex64::new(c, -s);
                let hi_phase = Complex64::new(c, s);
                for (idx, a) in self.amps.iter_mut().enumerate() {
                    if idx & cmask != cmask {
                        continue;
                    }
                    *a *= if idx & t == 0 { lo_phase } else { hi_phase };
                }
            }
            Pauli::Y => self.for_pairs(t, cmask, |a, b| (a * c - b * s, a * s + b * c)),
            Pauli::X => {
                let mis = Complex64::new(0.0, -s);
                self.for_pairs(t, cmask, |a, b| (a * c + b * mis, a * mis + b * c))
            }
        }
    }

    #[inline]
    fn for_pairs(
        &mut self,
        t: usize,
        cmask: usize,
        f: impl Fn(Complex64, Complex64) -> (Complex64, Complex64),
    ) {
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for lo in base..base + t {
                if lo & cmask != cmask {
                    continue;
                }
                let hi = lo + t;
                let (a, b) = f(self.amps[lo], self.amps[hi]);
                self.amps[lo] = a;
                self.amps[hi] = b;
            }
            base += 2 * t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn pauli_x_flips_zero() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply(&Gate::Pauli(Pauli::X, 0)).unwrap();
        assert_eq!(s.amplitudes()[1], Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitudes()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn ry_quarter_turn() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply(&Gate::Rotation { axis: Pauli::Y, qubit: 0, angle: FRAC_PI_2 }).unwrap();
        // exp(-iθY/2) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]
        assert!(close(s.amplitudes()[0], FRAC_PI_4.cos().into(), 1e-15));
        assert!(close(s.amplitudes()[1], FRAC_PI_4.sin().into(), 1e-15));
    }

    #[test]
    fn controlled_x_on_control_set() {
        // Qubit 0 = 1, qubit 1 = 0: basis index 0b01.
        let mut s = StateVector::zero(2).unwrap();
        s.apply(&Gate::Pauli(Pauli::X, 0)).unwrap();
        s.apply(&Gate::Controlled { pauli: Pauli::X, control: 0, target: 1 }).unwrap();
        assert!(close(s.amplitudes()[0b11], 1.0.into(), 1e-15));
    }

    #[test]
    fn rotations_match_matrix_exponential() {
        // Oracle: exp(-iθΓ/2) = cos(θ/2)·I − i·sin(θ/2)·Γ, applied as a 2×2 product.
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let paulis = [
            (Pauli::X, [[zero, one], [one, zero]]),
            (Pauli::Y, [[zero, -i], [i, zero]]),
            (Pauli::Z, [[one, zero], [zero, -one]]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (axis, m) in paulis {
            for &theta in &[0.3, -1.7, PI, 2.9] {
                let psi = StateVector::random(1, &mut rng).unwrap();
                let (a, b) = (psi.amplitudes()[0], psi.amplitudes()[1]);
                let (s, c) = (0.5f64 * theta).sin_cos();
                let r = |row: usize, col: usize| {
                    let id = if row == col { c } else { 0.0 };
                    Complex64::new(id, 0.0) - i * s * m[row][col]
                };
                let want = [r(0, 0) * a + r(0, 1) * b, r(1, 0) * a + r(1, 1) * b];
                let mut got = psi.clone();
                got.apply(&Gate::Rotation { axis, qubit: 0, angle: theta }).unwrap();
                assert!(close(got.amplitudes()[0], want[0], 1e-14));
                assert!(close(got.amplitudes()[1], want[1], 1e-14));
            }
        }
    }

    #[test]
    fn out_of_range_target() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(matches!(s.apply(&Gate::Pauli(Pauli::X, 2)), Err(Error::Index { index: 2, len: 2 })));
        assert!(s.apply(&Gate::Controlled { pauli: Pauli::Z, control: 1, target: 1 }).is_err());
        assert!(StateVector::zero(0).is_err());
        assert!(StateVector::zero(MAX_QUBITS + 1).is_err());
    }

    fn arb_gate(q: usize) -> impl Strategy<Value = Gate> {
        let axis = prop_oneof![Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)];
        (axis, 0..q, 0..q, -7.0f64..7.0, 0u8..4).prop_map(move |(axis, a, b, angle, kind)| {
            let b = if a == b { (b + 1) % q } else { b };
            match kind {
                0 => Gate::Pauli(axis, a),
                1 => Gate::Rotation { axis, qubit: a, angle },
                2 => Gate::Controlled { pauli: axis, control: a, target: b },
                _ => Gate::ControlledRotation { axis, control: a, target: b, angle },
            }
        })
    }

    proptest! {
        #[test]
        fn norm_preserved_after_every_gate(
            seed in any::<u64>(),
            gates in proptest::collection::vec(arb_gate(4), 1..40),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = StateVector::random(4, &mut rng).unwrap();
            for g in &gates {
                s.apply(g).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn paulis_square_to_identity(seed in any::<u64>(), q in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = StateVector::random(3, &mut rng).unwrap();
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let mut s = psi.clone();
                s.apply(&Gate::Pauli(p, q)).unwrap();
                s.apply(&Gate::Pauli(p, q)).unwrap();
                for (a, b) in s.amplitudes().iter().zip(psi.amplitudes()) {
                    prop_assert!((a - b).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn controlled_gate_idle_when_control_clear(seed in any::<u64>(), angle in -4.0f64..4.0) {
            // Random state on qubits 1,2 with qubit 0 (the control) in |0⟩.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = StateVector::zero(3).unwrap();
            for q in 1..3 {
                s.apply(&Gate::Rotation { axis: Pauli::Y, qubit: q, angle: rng.random_range(-3.0..3.0) }).unwrap();
                s.apply(&Gate::Rotation { axis: Pauli::Z, qubit: q, angle: rng.random_range(-3.0..3.0) }).unwrap();
            }
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let mut t = s.clone();
                t.apply(&Gate::Controlled { pauli: p, control: 0, target: 2 }).unwrap();
                t.apply(&Gate::ControlledRotation { axis: p, control: 0, target: 1, angle }).unwrap();
                prop_assert_eq!(&t, &s);
            }
        }

        #[test]
        fn inverse_undoes(seed in any::<u64>(), gates in proptest::collection::vec(arb_gate(3), 1..20)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = StateVector::random(3, &mut rng).unwrap();
            let mut s = psi.clone();
            for g in &gates { s.apply(g).unwrap(); }
            for g in gates.iter().rev() { s.apply_inverse(g).unwrap(); }
            for (a, b) in s.amplitudes().iter().zip(psi.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
