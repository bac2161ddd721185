use crate::C64;
use nalgebra::DMatrix;

/// Atom ⊗ Fock basis. Index = `atom · (n_max+1)^M + Σ n_i (n_max+1)^(M−1−i)`
/// with atom 0 = ground, 1 = excited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_modes: usize,
    levels: usize,
}

impl FockSpace {
    pub fn new(n_modes: usize, n_max: usize) -> Self {
        Self {
            n_modes,
            levels: n_max + 1,
        }
    }

    fn field_dim(&self) -> usize {
        self.levels.pow(self.n_modes as u32)
    }

    pub fn dim(&self) -> usize {
        2 * self.field_dim()
    }

    fn occupation(&self, field_index: usize, mode: usize) -> usize {
        let stride = self.levels.pow((self.n_modes - 1 - mode) as u32);
        (field_index / stride) % self.levels
    }

    /// Atomic lowering operator `σ = |g⟩⟨e|`.
    pub fn sigma(&self) -> DMatrix<C64> {
        let f = self.field_dim();
        let mut s = DMatrix::zeros(self.dim(), self.dim());
        for k in 0..f {
            s[(k, f + k)] = C64::new(1.0, 0.0);
        }
        s
    }

    /// Photon annihilation operator of `mode`.
    pub fn annihilation(&self, mode: usize) -> DMatrix<C64> {
        assert!(mode < self.n_modes);
        let f = self.field_dim();
        let stride = self.levels.pow((self.n_modes - 1 - mode) as u32);
        let mut a = DMatrix::zeros(self.dim(), self.dim());
        for atom in 0..2 {
            for k in 0..f {
                let n = self.occupation(k, mode);
                if n > 0 {
                    a[(atom * f + k - stride, atom * f + k)] = C64::new((n as f64).sqrt(), 0.0);
                }
            }
        }
        a
    }

    /// Largest population of the highest Fock level over all modes.
    pub fn top_fock_population(&self, rho: &DMatrix<C64>) -> f64 {
        let f = self.field_dim();
        (0..self.n_modes)
            .map(|mode| {
                (0..self.dim())
                    .filter(|idx| self.occupation(idx % f, mode) == self.levels - 1)
                    .map(|idx| rho[(idx, idx)].re)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutators_below_cutoff() {
        let s = FockSpace::new(2, 2);
        assert_eq!(s.dim(), 18);
        let a0 = s.annihilation(0);
        let a1 = s.annihilation(1);
        let comm01 = &a0 * &a1 - &a1 * &a0;
        assert!(comm01.camax() < 1e-15);
        let sig = s.sigma();
        let anti = &sig * sig.adjoint() + sig.adjoint() * &sig;
        assert!((anti - DMatrix::identity(18, 18)).camax() < 1e-15);
        let comm = &a0 * a0.adjoint() - a0.adjoint() * &a0;
        // [a, a†] = 1 except on the top level of mode 0
        for idx in 0..18 {
            let expected = if s.occupation(idx % 9, 0) == 2 {
                -2.0
            } else {
                1.0
            };
            assert!((comm[(idx, idx)].re - expected).abs() < 1e-14);
        }
    }
}
