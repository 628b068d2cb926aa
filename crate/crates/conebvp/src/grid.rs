//! Two-panel mesh on `[0, T]` joined exactly at `eta`, grid functions, and
//! the quadratures the linear kernel needs.
//!
//! Every integral in the boundary conditions splits at `eta`, so the mesh
//! places a node there exactly rather than snapping a uniform grid: the
//! first panel covers `[0, eta]` with `m` uniform subintervals, the second
//! `[eta, T]` with `n`. Both counts must be even so composite Simpson
//! applies per panel.
//!
//! Three kinds of quadrature live here:
//!
//! - `moments`: the weighted integrals `(eta - s) y`, `(eta - s)^2 y` over
//!   `[0, eta]` and `(T - s) y` over `[0, T]`, by local cubic reconstruction
//!   of `y` integrated exactly against the polynomial weights (Gauss points
//!   per subinterval). Exact for `y` of degree <= 3 per panel, O(h^4)
//!   otherwise. Plain Simpson on the folded integrand would lose the cubic
//!   exactness: the products reach degree five.
//! - `double_cumulative`: `V(t) = integral of (t - s) y(s)` at every node,
//!   via two cumulative trapezoid passes (`V' = integral of y`), O(h^2) and
//!   exact for constant `y`.
//! - composite Simpson per panel, used for the integral boundary condition
//!   and scalar quadratures of node-sampled integrands.

use std::fmt;

/// Hard cap on subintervals per panel; keeps downstream dense linear
/// algebra at desk scale.
pub const MAX_PANEL: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    PanelCount { which: &'static str, got: usize },
    PanelTooLarge { which: &'static str, got: usize },
    EtaOutOfRange { eta: f64, t_end: f64 },
    LengthMismatch { expected: usize, got: usize },
    NonFiniteValue { index: usize, value: f64 },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::PanelCount { which, got } => {
                write!(f, "panel count {which} = {got} must be even and at least 2")
            }
            GridError::PanelTooLarge { which, got } => {
                write!(f, "panel count {which} = {got} exceeds the cap of {MAX_PANEL}")
            }
            GridError::EtaOutOfRange { eta, t_end } => {
                write!(f, "eta = {eta} must lie strictly inside (0, {t_end})")
            }
            GridError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} node values, got {got}")
            }
            GridError::NonFiniteValue { index, value } => {
                write!(f, "non-finite value {value} at node {index}")
            }
        }
    }
}

impl std::error::Error for GridError {}

/// Two-panel mesh with `t_m = eta` and `t_{m+n} = T` exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    t_end: f64,
    eta: f64,
    m: usize,
    n: usize,
    nodes: Vec<f64>,
}

impl Mesh {
    pub fn build(t_end: f64, eta: f64, m: usize, n: usize) -> Result<Mesh, GridError> {
        if !(eta.is_finite() && t_end.is_finite() && eta > 0.0 && eta < t_end) {
            return Err(GridError::EtaOutOfRange { eta, t_end });
        }
        for (which, count) in [("m", m), ("n", n)] {
            if count < 2 || !count.is_multiple_of(2) {
                return Err(GridError::PanelCount { which, got: count });
            }
            if count > MAX_PANEL {
                return Err(GridError::PanelTooLarge { which, got: count });
            }
        }
        let h1 = eta / m as f64;
        let h2 = (t_end - eta) / n as f64;
        let mut nodes = Vec::with_capacity(m + n + 1);
        for i in 0..m {
            nodes.push(i as f64 * h1);
        }
        nodes.push(eta);
        for i in 1..n {
            nodes.push(eta + i as f64 * h2);
        }
        nodes.push(t_end);
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        Ok(Mesh {
            t_end,
            eta,
            m,
            n,
            nodes,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Subintervals on `[0, eta]`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Subintervals on `[eta, T]`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Index of the node sitting exactly at `eta`.
    pub fn eta_index(&self) -> usize {
        self.m
    }

    pub fn h1(&self) -> f64 {
        self.eta / self.m as f64
    }

    pub fn h2(&self) -> f64 {
        (self.t_end - self.eta) / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

/// Node samples of a function on a mesh. Values are immutable after
/// construction and always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    mesh: Mesh,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(mesh: Mesh, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != mesh.len() {
            return Err(GridError::LengthMismatch {
                expected: mesh.len(),
                got: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(GridError::NonFiniteValue { index, value });
        }
        Ok(GridFunction { mesh, values })
    }

    /// Samples a closure at the nodes. Panics on non-finite values; use
    /// `from_values` when the source can fail.
    pub fn from_fn(mesh: &Mesh, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = mesh.nodes().iter().map(|&t| f(t)).collect();
        Self::from_values(mesh.clone(), values).expect("sampled values must be finite")
    }

    pub fn constant(mesh: &Mesh, c: f64) -> Self {
        Self::from_fn(mesh, |_| c)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn min_value(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, v)| {
                if v < best.1 {
                    (i, v)
                } else {
                    best
                }
            })
    }

    pub fn max_value(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            })
    }
}

/// The three weighted moments of a forcing sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// integral over [0, eta] of (eta - s) y(s) ds
    pub i1: f64,
    /// integral over [0, eta] of (eta - s)^2 y(s) ds
    pub i2: f64,
    /// integral over [0, T] of (T - s) y(s) ds
    pub i3: f64,
}

// 4-point Gauss-Legendre on [-1, 1]: exact through degree 7, which covers
// weight (degree <= 2) times cubic reconstruction (degree 3).
const GAUSS_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_26,
    0.339_981_043_584_856_26,
    0.861_136_311_594_052_6,
];
const GAUSS_W: [f64; 4] = [
    0.347_854_845_137_453_86,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_86,
];

/// Lagrange value at `s` of the polynomial through `(nodes[k], values[k])`
/// for `k` in `stencil..stencil + len`.
fn lagrange_at(nodes: &[f64], values: &[f64], stencil: usize, len: usize, s: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..len {
        let xi = nodes[stencil + i];
        let mut basis = 1.0;
        for j in 0..len {
            if j != i {
                let xj = nodes[stencil + j];
                basis *= (s - xj) / (xi - xj);
            }
        }
        acc += values[stencil + i] * basis;
    }
    acc
}

/// Computes the three weighted moments of `y`. Exact (up to roundoff) when
/// `y` restricted to each panel is a polynomial of degree at most 3 and the
/// panel has at least four nodes.
pub fn moments(y: &GridFunction) -> Moments {
    let mesh = y.mesh();
    let nodes = mesh.nodes();
    let vals = y.values();
    let eta = mesh.eta();
    let t_end = mesh.t_end();
    let mi = mesh.eta_index();
    let last = mesh.len() - 1;

    let mut i1 = 0.0;
    let mut i2 = 0.0;
    let mut i3 = 0.0;

    let mut panel = |start: usize, end: usize, first_panel: bool| {
        let count = end - start + 1;
        let len = count.min(4);
        for j in start..end {
            let lo = nodes[j];
            let hi = nodes[j + 1];
            let stencil = j
                .saturating_sub(1)
                .clamp(start, end + 1 - len);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for g in 0..4 {
                let s = mid + half * GAUSS_X[g];
                let w = half * GAUSS_W[g];
                let p = lagrange_at(nodes, vals, stencil, len, s);
                if first_panel {
                    let d = eta - s;
                    i1 += w * d * p;
                    i2 += w * d * d * p;
                }
                i3 += w * (t_end - s) * p;
            }
        }
    };
    panel(0, mi, true);
    panel(mi, last, false);

    Moments { i1, i2, i3 }
}

/// `V(t) = integral over [0, t] of (t - s) y(s) ds` at every node, via two
/// cumulative trapezoid passes on `V' (t) = integral of y over [0, t]`.
pub fn double_cumulative(y: &GridFunction) -> GridFunction {
    let nodes = y.mesh().nodes();
    let vals = y.values();
    let len = vals.len();
    let mut first = vec![0.0; len];
    for i in 1..len {
        let h = nodes[i] - nodes[i - 1];
        first[i] = first[i - 1] + 0.5 * h * (vals[i - 1] + vals[i]);
    }
    let mut second = vec![0.0; len];
    for i in 1..len {
        let h = nodes[i] - nodes[i - 1];
        second[i] = second[i - 1] + 0.5 * h * (first[i - 1] + first[i]);
    }
    GridFunction::from_values(y.mesh().clone(), second).expect("cumulative values stay finite")
}

/// Composite Simpson weights over the first panel (`m + 1` entries).
pub fn simpson_weights_first_panel(mesh: &Mesh) -> Vec<f64> {
    simpson_weights(mesh.m(), mesh.h1())
}

fn simpson_weights(count: usize, h: f64) -> Vec<f64> {
    debug_assert!(count >= 2 && count.is_multiple_of(2));
    let scale = h / 3.0;
    let mut w = vec![0.0; count + 1];
    w[0] = scale;
    w[count] = scale;
    for (i, wi) in w.iter_mut().enumerate().skip(1).take(count - 1) {
        *wi = if i % 2 == 1 { 4.0 * scale } else { 2.0 * scale };
    }
    w
}

/// Simpson integral of the node values over `[0, eta]`.
pub fn simpson_first_panel(g: &GridFunction) -> f64 {
    let w = simpson_weights_first_panel(g.mesh());
    w.iter()
        .zip(g.values())
        .map(|(wi, vi)| wi * vi)
        .sum()
}

/// Simpson integral of the node values over `[eta, T]`.
pub fn simpson_second_panel(g: &GridFunction) -> f64 {
    let mesh = g.mesh();
    let w = simpson_weights(mesh.n(), mesh.h2());
    w.iter()
        .zip(&g.values()[mesh.eta_index()..])
        .map(|(wi, vi)| wi * vi)
        .sum()
}

/// Simpson integral of the node values over the whole of `[0, T]`.
pub fn simpson_full(g: &GridFunction) -> f64 {
    simpson_first_panel(g) + simpson_second_panel(g)
}
