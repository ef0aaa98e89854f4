//! Objective and regularizer interfaces consumed by the minimizer.

/// A continuous function on a box that the greedy algorithm can walk
/// coordinate by coordinate.
///
/// Implementations must be safe for concurrent read-only evaluation.
pub trait SubmodularObjective: Sync {
    type Chain<'a>: GreedyChain
    where
        Self: 'a;

    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Starts a greedy chain at `start`.
    fn chain(&self, start: &[f64]) -> Self::Chain<'_>;

    /// Upper bound on the l-infinity Lipschitz constant over `[lo, hi]`, i.e.
    /// on `sup ||grad H||_1`. Infinite when unknown.
    fn linf_lipschitz(&self, _lo: &[f64], _hi: &[f64]) -> f64 {
        f64::INFINITY
    }
}

/// Incremental evaluator along a monotone chain of points.
pub trait GreedyChain {
    fn value(&self) -> f64;

    /// Moves coordinate `i` to `to` and returns the new objective value.
    fn advance(&mut self, i: usize, to: f64) -> f64;
}

/// Separable regularizer `R(x) = sum_i R_i(x_i)`.
pub trait SeparableRegularizer {
    fn dim(&self) -> usize;

    fn term(&self, i: usize, x: f64) -> f64;

    fn total(&self, x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(i, &v)| self.term(i, v)).sum()
    }
}

impl SeparableRegularizer for crate::model::UncertaintySet {
    fn dim(&self) -> usize {
        self.len()
    }

    fn term(&self, i: usize, x: f64) -> f64 {
        crate::model::UncertaintySet::term(self, i, x)
    }
}

/// Objective given by a plain closure; chains re-evaluate from scratch.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
    lipschitz: f64,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnObjective {
            dim,
            f,
            lipschitz: f64::INFINITY,
        }
    }

    pub fn with_lipschitz(mut self, g: f64) -> Self {
        self.lipschitz = g;
        self
    }
}

pub struct FnChain<'a, F> {
    f: &'a F,
    x: Vec<f64>,
    value: f64,
}

impl<F: Fn(&[f64]) -> f64> GreedyChain for FnChain<'_, F> {
    fn value(&self) -> f64 {
        self.value
    }

    fn advance(&mut self, i: usize, to: f64) -> f64 {
        self.x[i] = to;
        self.value = (self.f)(&self.x);
        self.value
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> SubmodularObjective for FnObjective<F> {
    type Chain<'a>
        = FnChain<'a, F>
    where
        Self: 'a;

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn chain(&self, start: &[f64]) -> FnChain<'_, F> {
        FnChain {
            f: &self.f,
            x: start.to_vec(),
            value: (self.f)(start),
        }
    }

    fn linf_lipschitz(&self, _lo: &[f64], _hi: &[f64]) -> f64 {
        self.lipschitz
    }
}

/// Separable regularizer given by a closure `(coordinate, value) -> R_i(value)`.
pub struct FnRegularizer<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(usize, f64) -> f64> FnRegularizer<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnRegularizer { dim, f }
    }
}

impl<F: Fn(usize, f64) -> f64> SeparableRegularizer for FnRegularizer<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn term(&self, i: usize, x: f64) -> f64 {
        (self.f)(i, x)
    }
}
