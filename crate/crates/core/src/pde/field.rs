use rand::Rng;
use rand_distr::StandardNormal;

use super::grid::ManifoldGrid;

/// A Hamiltonian `H(x, p)` on the cotangent bundle, `p` a coordinate covector.
pub trait HamiltonianField: Sync {
    fn eval(&self, x: [f64; 2], p: [f64; 2]) -> f64;

    /// Lipschitz constant in `p` with respect to the metric norm.
    fn lipschitz(&self) -> f64;
}

/// Pair of Hamiltonians depending on both players' gradients.
pub trait CoupledField: Sync {
    fn eval(&self, x: [f64; 2], p1: [f64; 2], p2: [f64; 2]) -> [f64; 2];

    fn lipschitz(&self) -> f64;
}

/// Closure-backed [`HamiltonianField`].
pub struct FnField<F> {
    f: F,
    lipschitz: f64,
}

pub fn field<F>(f: F, lipschitz: f64) -> FnField<F>
where
    F: Fn([f64; 2], [f64; 2]) -> f64 + Sync,
{
    FnField { f, lipschitz }
}

impl<F: Fn([f64; 2], [f64; 2]) -> f64 + Sync> HamiltonianField for FnField<F> {
    fn eval(&self, x: [f64; 2], p: [f64; 2]) -> f64 {
        (self.f)(x, p)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Closure-backed [`CoupledField`].
pub struct FnCoupled<F> {
    f: F,
    lipschitz: f64,
}

pub fn coupled<F>(f: F, lipschitz: f64) -> FnCoupled<F>
where
    F: Fn([f64; 2], [f64; 2], [f64; 2]) -> [f64; 2] + Sync,
{
    FnCoupled { f, lipschitz }
}

impl<F: Fn([f64; 2], [f64; 2], [f64; 2]) -> [f64; 2] + Sync> CoupledField for FnCoupled<F> {
    fn eval(&self, x: [f64; 2], p1: [f64; 2], p2: [f64; 2]) -> [f64; 2] {
        (self.f)(x, p1, p2)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Largest observed `|H(x,p1) - H(x,p2)| / |p1 - p2|_M` over random nodes and covectors
/// with standard normal entries of the given scale.
pub fn sampled_lipschitz(
    grid: &ManifoldGrid,
    h: &dyn HamiltonianField,
    samples: usize,
    scale: f64,
    rng: &mut impl Rng,
) -> f64 {
    let nodes = grid.nodes();
    let flat = matches!(grid.manifold(), super::Manifold::Circle { .. });
    let draw = |rng: &mut _| {
        let a: f64 = Rng::sample(rng, StandardNormal);
        let b: f64 = Rng::sample(rng, StandardNormal);
        [scale * a, if flat { 0.0 } else { scale * b }]
    };
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = nodes[rng.random_range(0..nodes.len())];
        let (p1, p2) = (draw(rng), draw(rng));
        let d = grid.metric_norm(x, [p1[0] - p2[0], p1[1] - p2[1]]);
        if d > 0.0 {
            worst = worst.max((h.eval(x, p1) - h.eval(x, p2)).abs() / d);
        }
    }
    worst
}
