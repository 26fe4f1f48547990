use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{check_dim, Error, Result};

/// Unnormalized pure state `chi`; never the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<Complex64>);

impl StateVector {
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("empty state vector"));
        }
        if components.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("non-finite state vector"));
        }
        if components.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(Error::domain("zero state vector"));
        }
        Ok(Self(components))
    }

    pub fn from_real(components: &[f64]) -> Result<Self> {
        Self::new(components.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self(self.0.iter().map(|z| z / n).collect())
    }

    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        Self::new(self.0.iter().map(|z| z * c).collect())
    }

    /// Chart coordinates `w_k = chi_k / chi_0`.
    pub fn to_projective(&self) -> Result<ProjectiveState> {
        let c0 = self.0[0];
        if c0.norm_sqr() == 0.0 {
            return Err(Error::ChartExit {
                norm: f64::INFINITY,
                guard: ProjectiveState::DEFAULT_GUARD,
            });
        }
        ProjectiveState::new(self.0[1..].iter().map(|z| z / c0).collect())
    }
}

/// Point of the affine chart `chi_0 != 0` of the projective space, `W = (1, w_1, ..., w_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveState(Vec<Complex64>);

impl ProjectiveState {
    /// Default bound on `|w|` beyond which a state is treated as having left the chart.
    pub const DEFAULT_GUARD: f64 = 1e8;

    pub fn new(w: Vec<Complex64>) -> Result<Self> {
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::ChartExit {
                norm: f64::INFINITY,
                guard: Self::DEFAULT_GUARD,
            });
        }
        Ok(Self(w))
    }

    pub fn origin(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Chart dimension `n` (the Hilbert space has dimension `n + 1`).
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `W = (1, w)`.
    pub fn lifted(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(Complex64::new(1.0, 0.0));
        v.extend_from_slice(&self.0);
        v
    }

    pub fn from_projective(&self) -> StateVector {
        StateVector(self.lifted())
    }

    /// Real coordinates `(x_1, y_1, ..., x_n, y_n)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_real(xy: &[f64]) -> Result<Self> {
        if xy.len() % 2 != 0 {
            return Err(Error::domain("odd number of real chart coordinates"));
        }
        Self::new(xy.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
    }

    pub fn check_guard(&self, guard: f64) -> Result<()> {
        let norm = self.norm();
        if norm.is_finite() && norm <= guard {
            Ok(())
        } else {
            Err(Error::ChartExit { norm, guard })
        }
    }
}

/// `<A>_v = (v, A v) / (v, v)`.
pub fn expectation(a: &ComplexMatrix, v: &StateVector) -> Result<Complex64> {
    check_dim(a.dim(), v.dim())?;
    Ok(raw_expectation(a, v.components()))
}

/// `<A>_W` at the lifted chart point `W = (1, w)`.
pub fn expectation_of_chart(a: &ComplexMatrix, w: &ProjectiveState) -> Result<Complex64> {
    check_dim(a.dim(), w.n() + 1)?;
    Ok(raw_expectation(a, &w.lifted()))
}

pub(crate) fn raw_expectation(a: &ComplexMatrix, v: &[Complex64]) -> Complex64 {
    let av = a.apply(v);
    let num: Complex64 = v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
    let den: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{sigma_x, sigma_z};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expectation_examples() {
        let up = StateVector::from_real(&[1.0, 0.0]).unwrap();
        assert_eq!(expectation(&sigma_z(), &up).unwrap(), c(1.0, 0.0));
        let s = 0.5f64.sqrt();
        let plus = StateVector::from_real(&[s, s]).unwrap();
        assert!(expectation(&sigma_z(), &plus).unwrap().norm() < 1e-15);

        // (v, sx v)/(v, v) for v = (1, a) is 2 Re(a) / (1 + |a|^2).
        let v = StateVector::new(vec![c(1.0, 0.0), c(0.3, 0.4)]).unwrap();
        let e = expectation(&sigma_x(), &v).unwrap();
        assert!((e - c(0.6 / 1.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn expectation_errors() {
        assert!(StateVector::from_real(&[0.0, 0.0]).is_err());
        let v = StateVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            expectation(&sigma_z(), &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn chart_examples() {
        let w = StateVector::from_real(&[1.0, 0.0]).unwrap().to_projective().unwrap();
        assert_eq!(w.coords(), &[c(0.0, 0.0)]);
        let w = StateVector::new(vec![c(2.0, 0.0), c(0.0, 2.0)])
            .unwrap()
            .to_projective()
            .unwrap();
        assert_eq!(w.coords(), &[c(0.0, 1.0)]);
        assert!(matches!(
            StateVector::from_real(&[0.0, 1.0]).unwrap().to_projective(),
            Err(Error::ChartExit { .. })
        ));
    }

    fn arb_c() -> impl Strategy<Value = Complex64> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn expectation_is_scale_invariant(
            v in proptest::collection::vec(arb_c(), 2),
            s in arb_c().prop_filter("nonzero", |z| z.norm() > 1e-2),
        ) {
            prop_assume!(v.iter().any(|z| z.norm() > 1e-3));
            let v = StateVector::new(v).unwrap();
            let e1 = expectation(&sigma_x(), &v).unwrap();
            let e2 = expectation(&sigma_x(), &v.scaled(s).unwrap()).unwrap();
            prop_assert!((e1 - e2).norm() < 1e-12);
            prop_assert!(e1.im.abs() < 1e-12);
        }

        #[test]
        fn chart_round_trip_and_scale_invariance(
            w in proptest::collection::vec(arb_c(), 1..4),
            s in arb_c().prop_filter("nonzero", |z| z.norm() > 1e-2),
        ) {
            let p = ProjectiveState::new(w).unwrap();
            let chi = p.from_projective();
            let back = chi.to_projective().unwrap();
            prop_assert_eq!(&back, &p);
            let scaled = chi.scaled(s).unwrap().to_projective().unwrap();
            for (a, b) in scaled.coords().iter().zip(p.coords()) {
                prop_assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
            }
        }
    }
}
