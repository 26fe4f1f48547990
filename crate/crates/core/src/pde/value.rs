use super::grid::{GridFunction, ManifoldGrid};

/// Solution slices of a backward problem on `[0, T]`, in increasing time order.
#[derive(Debug, Clone)]
pub struct ValueFunction {
    pub(crate) times: Vec<f64>,
    pub(crate) slices: Vec<GridFunction>,
    pub(crate) iterations: usize,
    pub(crate) residuals: Vec<f64>,
}

impl ValueFunction {
    pub fn grid(&self) -> &ManifoldGrid {
        self.slices[0].grid()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn slices(&self) -> &[GridFunction] {
        &self.slices
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Slice at `t = 0`.
    pub fn initial(&self) -> &GridFunction {
        &self.slices[0]
    }

    /// Slice at `t = T`, equal to the terminal data.
    pub fn terminal(&self) -> &GridFunction {
        self.slices.last().unwrap()
    }

    /// Slice whose time is nearest to `t`.
    pub fn slice_at(&self, t: f64) -> &GridFunction {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap();
        &self.slices[i]
    }

    /// Total fixed-point iterations (0 for marching solvers).
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Sup-norm update of every fixed-point iteration, in order.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }
}
