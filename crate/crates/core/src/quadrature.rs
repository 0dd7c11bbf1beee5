//! Gauss–Legendre quadrature on the unit interval.

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Nodes per panel of the composite rule.
pub const PANEL_ORDER: usize = 16;

/// Minimum total number of nodes used for basis inner products.
pub const MIN_NODES: usize = 64;

/// Nodes and weights of an `order`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Roots of `P_order` are found by Newton iteration from the Chebyshev-like
/// initial guess `cos(pi (i + 3/4) / (order + 1/2))`. The iteration itself
/// runs in `f64` so `f32` rules are as accurate as the type allows.
pub fn gauss_legendre<T: Real>(order: usize) -> Result<(Vec<T>, Vec<T>)> {
    if order == 0 {
        return domain("quadrature order must be positive");
    }
    let n = order;
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((
        nodes.into_iter().map(T::lit).collect(),
        weights.into_iter().map(T::lit).collect(),
    ))
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> UnitRule<T> {
    /// Splits `[0, 1]` into `panels` equal panels with a `PANEL_ORDER`-point rule each.
    pub fn composite(panels: usize) -> Result<Self> {
        if panels == 0 {
            return domain("composite rule needs at least one panel");
        }
        let (x, w) = gauss_legendre::<T>(PANEL_ORDER)?;
        let width = T::one() / T::from_usize_lossy(panels);
        let half = width * T::lit(0.5);
        let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
        for p in 0..panels {
            let mid = width * T::from_usize_lossy(p) + half;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * *xi);
                weights.push(half * *wi);
            }
        }
        Ok(Self { nodes, weights })
    }

    /// Rule with at least `total` nodes, rounded up to whole panels.
    pub fn with_min_nodes(total: usize) -> Result<Self> {
        Self::composite(total.max(1).div_ceil(PANEL_ORDER))
    }

    /// Default rule for inner products of basis functions up to index `max_index`:
    /// `max(64, 8 * max_index)` nodes.
    pub fn for_basis_index(max_index: usize) -> Result<Self> {
        Self::with_min_nodes(MIN_NODES.max(8 * max_index))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same rule with twice as many panels.
    pub fn refined(&self) -> Result<Self> {
        Self::composite(2 * self.len() / PANEL_ORDER)
    }

    /// Integral over `[0, 1]` of `f`.
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (x, w)| acc + *w * f(*x))
    }
}
