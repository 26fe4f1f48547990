use std::f64::consts::PI;

use num_complex::Complex64;

use super::spec::{GameSpec, TwoAtomSpec};
use crate::filtering::{PolicyState, SchemeKind};
use crate::pde::{Manifold, ManifoldGrid};
use crate::quantum::{raw_expectation, ComplexMatrix};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Index of the free Hamiltonian and of the two players' control directions.
pub const FREE: usize = 0;
pub const PLAYER_I: usize = 1;
pub const PLAYER_II: usize = 2;

#[derive(Debug, Clone, PartialEq)]
enum Geometry {
    /// Qubit under the Pauli scheme; entries `(h00, h01, h10, h11)` per field.
    Sphere { h: [[Complex64; 4]; 3] },
    /// Angle drift per field on a circle of fixed modulus.
    Circle { modulus: f64, speed: [f64; 3] },
    /// Angle drifts on a 2-torus; `product` lifts to `(1, w1) (x) (1, w2)`.
    Torus { moduli: [f64; 2], speed: [[f64; 2]; 3], product: bool },
}

/// Game dynamics reduced to one of the solver manifolds, with the diffusion scale of the
/// filtered process. Grid coordinates are those of [`ManifoldGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    geometry: Geometry,
    kappa: f64,
}

fn entries(h: &ComplexMatrix) -> [Complex64; 4] {
    [h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]]
}

fn require_diagonal(h: &ComplexMatrix, what: &str) -> Result<()> {
    if h.is_diagonal() {
        Ok(())
    } else {
        Err(Error::Capability(format!("{what} must be diagonal for a torus reduction")))
    }
}

impl Reduction {
    /// Pauli qubit to the sphere with `kappa = 2`; one or two equal-rate torus channels to
    /// the circle or the 2-torus with `kappa = r^2 / 2`.
    pub fn from_game(spec: &GameSpec) -> Result<Self> {
        let hs = [&spec.hamiltonian.h0, &spec.hamiltonian.h1, &spec.hamiltonian.h2];
        match spec.scheme.kind() {
            SchemeKind::PauliSphere => Ok(Self {
                geometry: Geometry::Sphere { h: [entries(hs[0]), entries(hs[1]), entries(hs[2])] },
                kappa: 2.0,
            }),
            SchemeKind::TorusDiagonal => {
                for (h, name) in hs.iter().zip(["H0", "H1", "H2"]) {
                    require_diagonal(h, name)?;
                }
                let rates = spec.scheme.torus_rates().unwrap_or_default();
                let speed = |h: &ComplexMatrix, k: usize| (h[(0, 0)] - h[(k + 1, k + 1)]).re;
                match rates.len() {
                    1 => Ok(Self {
                        geometry: Geometry::Circle {
                            modulus: spec.moduli[0],
                            speed: [speed(hs[0], 0), speed(hs[1], 0), speed(hs[2], 0)],
                        },
                        kappa: 0.5 * rates[0] * rates[0],
                    }),
                    2 if (rates[0].abs() - rates[1].abs()).abs() <= 1e-12 * rates[0].abs() => Ok(Self {
                        geometry: Geometry::Torus {
                            moduli: [spec.moduli[0], spec.moduli[1]],
                            speed: [0, 1, 2].map(|i| [speed(hs[i], 0), speed(hs[i], 1)]),
                            product: false,
                        },
                        kappa: 0.5 * rates[0] * rates[0],
                    }),
                    2 => Err(Error::Capability("torus channels with unequal rates give an anisotropic generator".into())),
                    n => Err(Error::Capability(format!("no solver grid for a {n}-torus"))),
                }
            }
            k => Err(Error::Capability(format!("no manifold reduction for the {k:?} scheme"))),
        }
    }

    /// Product-state reduction of two qubits under per-atom diagonal detection of rate `r`:
    /// `w_11 = w_10 w_01` is preserved when `H^I`, `H^II` and `A` are diagonal and
    /// `A_00 + A_11 = A_01 + A_10`.
    pub fn from_two_atom(spec: &TwoAtomSpec) -> Result<Self> {
        if spec.atom_dim() != 2 {
            return Err(Error::Capability("two-atom reduction needs qubits".into()));
        }
        require_diagonal(&spec.h_i, "H^I")?;
        require_diagonal(&spec.h_ii, "H^II")?;
        require_diagonal(&spec.interaction, "interaction")?;
        let a = |k: usize| spec.interaction[(k, k)].re;
        let defect = a(0) + a(3) - a(1) - a(2);
        if defect.abs() > 1e-12 * (1.0 + spec.interaction.max_abs()) {
            return Err(Error::Capability("entangling interaction leaves the product torus".into()));
        }
        if !(spec.rate.is_finite() && spec.rate > 0.0) {
            return Err(Error::domain("detection rate must be positive"));
        }
        let (hi, hii) = (&spec.h_i, &spec.h_ii);
        // Angles are arg w_10 (first atom) and arg w_01 (second atom).
        let speed = [
            [a(0) - a(2), a(0) - a(1)],
            [(hi[(0, 0)] - hi[(1, 1)]).re, 0.0],
            [0.0, (hii[(0, 0)] - hii[(1, 1)]).re],
        ];
        Ok(Self { geometry: Geometry::Torus { moduli: spec.moduli, speed, product: true }, kappa: 0.5 * spec.rate * spec.rate })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Modulus and per-field angular speeds `[free, I, II]` of a circle reduction.
    pub fn circle_speeds(&self) -> Option<(f64, [f64; 3])> {
        match self.geometry {
            Geometry::Circle { modulus, speed } => Some((modulus, speed)),
            _ => None,
        }
    }

    /// Solver grid; `resolution` is the node count per angle or the sphere's `lmax`.
    pub fn grid(&self, resolution: usize) -> Result<ManifoldGrid> {
        let m = match self.geometry {
            Geometry::Sphere { .. } => Manifold::Sphere2 { lmax: resolution },
            Geometry::Circle { .. } => Manifold::Circle { n: resolution },
            Geometry::Torus { .. } => Manifold::Torus2 { n: resolution },
        };
        ManifoldGrid::new(m, self.kappa)
    }

    /// State vector (unnormalised) at a grid point.
    pub fn lift(&self, x: [f64; 2]) -> Vec<Complex64> {
        match &self.geometry {
            Geometry::Sphere { .. } => {
                vec![Complex64::new((0.5 * x[0]).cos(), 0.0), Complex64::from_polar((0.5 * x[0]).sin(), x[1])]
            }
            Geometry::Circle { modulus, .. } => vec![Complex64::new(1.0, 0.0), Complex64::from_polar(*modulus, x[0])],
            Geometry::Torus { moduli, product: false, .. } => vec![
                Complex64::new(1.0, 0.0),
                Complex64::from_polar(moduli[0], x[0]),
                Complex64::from_polar(moduli[1], x[1]),
            ],
            Geometry::Torus { moduli, product: true, .. } => {
                let (a, b) = (Complex64::from_polar(moduli[0], x[0]), Complex64::from_polar(moduli[1], x[1]));
                vec![Complex64::new(1.0, 0.0), b, a, a * b]
            }
        }
    }

    /// `<M>` at a grid point.
    pub fn expectation(&self, m: &ComplexMatrix, x: [f64; 2]) -> f64 {
        raw_expectation(m, &self.lift(x)).re
    }

    /// Velocity in grid coordinates of the projective flow of field `i` (see [`FREE`],
    /// [`PLAYER_I`], [`PLAYER_II`]).
    pub fn tangent(&self, i: usize, x: [f64; 2]) -> [f64; 2] {
        match &self.geometry {
            Geometry::Sphere { h } => {
                let [h00, h01, h10, h11] = h[i];
                let (theta, phi) = (x[0], x[1]);
                // b / w, with b = i[w (HW)_0 - (HW)_1]; beyond |w| = 2 it is evaluated in
                // the antipodal chart 1/w, where b/w changes sign.
                let ratio = if theta <= 2.0 * 2f64.atan() {
                    let w = Complex64::from_polar((0.5 * theta).tan(), phi);
                    I * (h01 * w + (h00 - h11) - h10 / w)
                } else {
                    let z = Complex64::from_polar(1.0 / (0.5 * theta).tan(), -phi);
                    -(I * (h10 * z + (h11 - h00) - h01 / z))
                };
                [theta.sin() * ratio.re, ratio.im]
            }
            Geometry::Circle { speed, .. } => [speed[i], 0.0],
            Geometry::Torus { speed, .. } => speed[i],
        }
    }

    /// `<b_i, p>` for a coordinate covector `p`.
    pub fn pairing(&self, i: usize, x: [f64; 2], p: [f64; 2]) -> f64 {
        let t = self.tangent(i, x);
        t[0] * p[0] + t[1] * p[1]
    }

    /// Metric speed `|b_i|` at a point.
    pub fn speed(&self, i: usize, x: [f64; 2]) -> f64 {
        let t = self.tangent(i, x);
        match self.geometry {
            Geometry::Sphere { .. } => t[0].hypot(x[0].sin() * t[1]),
            _ => t[0].hypot(t[1]),
        }
    }

    /// Largest metric speed of field `i` over the grid nodes.
    pub fn max_speed(&self, i: usize, grid: &ManifoldGrid) -> f64 {
        grid.nodes().iter().fold(0.0, |m, x| m.max(self.speed(i, *x)))
    }

    /// Grid point of a filtering state.
    pub fn point(&self, state: &PolicyState<'_>) -> Result<[f64; 2]> {
        match (&self.geometry, state) {
            (Geometry::Circle { .. }, PolicyState::Angles { phi, .. }) => Ok([phi[0], 0.0]),
            (Geometry::Torus { product: false, .. }, PolicyState::Angles { phi, .. }) => Ok([phi[0], phi[1]]),
            (Geometry::Sphere { .. }, PolicyState::Chi(chi)) => {
                let c = chi.components();
                Ok([2.0 * c[1].norm().atan2(c[0].norm()), (c[1].arg() - c[0].arg()).rem_euclid(2.0 * PI)])
            }
            (Geometry::Sphere { .. }, PolicyState::Chart(w)) => Ok(crate::pde::stereographic_to_sphere(w.coords()[0])),
            (Geometry::Circle { .. } | Geometry::Torus { product: false, .. }, s) => {
                let w = s.to_chart()?;
                Ok([w.coords()[0].arg().rem_euclid(2.0 * PI), w.coords().get(1).map_or(0.0, |z| z.arg().rem_euclid(2.0 * PI))])
            }
            (Geometry::Torus { product: true, .. }, s) => {
                // chart order 01, 10, 11
                let w = s.to_chart()?;
                let c = w.coords();
                if c.len() != 3 {
                    return Err(Error::DimensionMismatch { expected: 3, got: c.len() });
                }
                Ok([c[1].arg().rem_euclid(2.0 * PI), c[0].arg().rem_euclid(2.0 * PI)])
            }
            _ => Err(Error::Capability("state representation does not match the reduction".into())),
        }
    }
}
