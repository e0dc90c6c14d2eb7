//! Power iteration for the dominant eigenvalue of the polarization process.
//!
//! A score function `h` with `h(0) = h(1) = 0` and positive interior values
//! is iterated through the two-child average; the supremal ratio λ of update
//! to current value bounds the scaling exponent through μ ≤ 1/(−log₂ λ).
//! The classic mode carries one function; the two-state mode carries a pair
//! `(φ_s, φ_p)` scored by whether the channel was last produced by a serial
//! or a parallel combination, which lets a sharper serial-after-parallel
//! bound (the `diag` argument) enter the parallel state's update range.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::classic_bounds;
use crate::{Error, Result};

/// Node placement scheme for the 1-D grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Uniform,
    Chebyshev,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Scheme::Uniform),
            "chebyshev" => Ok(Scheme::Chebyshev),
            other => Err(Error::Domain(format!("unknown node scheme '{other}'"))),
        }
    }
}

/// `ℓ+1` ascending nodes in `[0, 1]`: `k/ℓ` (uniform) or `(1 − cos(kπ/ℓ))/2`
/// (Chebyshev, denser near both endpoints).
pub fn make_grid(ell: usize, scheme: Scheme) -> Result<Vec<f64>> {
    if ell < 2 {
        return Err(Error::Domain(format!("grid size {ell} < 2")));
    }
    let nodes = (0..=ell)
        .map(|k| match scheme {
            Scheme::Uniform => k as f64 / ell as f64,
            Scheme::Chebyshev => (1.0 - (k as f64 * std::f64::consts::PI / ell as f64).cos()) / 2.0,
        })
        .collect();
    Ok(nodes)
}

/// A piecewise-linear function on a 1-D node set.
#[derive(Clone, Debug)]
pub struct Grid1 {
    nodes: Vec<f64>,
    values: Vec<f64>,
    scheme: Scheme,
}

impl Grid1 {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, scheme: Scheme) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 3 {
            return Err(Error::Domain(
                "node and value lists must have equal length ≥ 3".into(),
            ));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::Domain("nodes must start at 0 and end at 1".into()));
        }
        Ok(Self {
            nodes,
            values,
            scheme,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the cell containing `x`, in O(1) using the inverse of the
    /// node map (the scheme's spacing is analytically invertible).
    #[inline]
    fn locate(&self, x: f64) -> usize {
        let ell = self.nodes.len() - 1;
        let guess = match self.scheme {
            Scheme::Uniform => x * ell as f64,
            Scheme::Chebyshev => {
                (1.0 - 2.0 * x).clamp(-1.0, 1.0).acos() * ell as f64 / std::f64::consts::PI
            }
        };
        let mut i = (guess as usize).min(ell - 1);
        // The analytic inverse can be off by one step in floating point.
        while i > 0 && x < self.nodes[i] {
            i -= 1;
        }
        while i + 1 < ell && x >= self.nodes[i + 1] {
            i += 1;
        }
        i
    }

    /// Linear interpolation; exact at nodes.
    #[inline]
    pub fn lin_eval(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        let i = self.locate(x);
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let t = (x - a) / (b - a);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Node index of the maximum value (smallest index on ties).
    pub fn argmax_node(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }
}

/// Checked interpolation with a domain error outside `[0, 1]`.
pub fn lin_eval(g: &Grid1, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{x} outside [0,1]")));
    }
    Ok(g.lin_eval(x))
}

/// The starting score function `h₀(x) = x^0.78 (1−x)^0.78 (2x² + 3)`,
/// sampled on the given nodes with exact zero endpoints.
pub fn init_h0(nodes: Vec<f64>, scheme: Scheme) -> Result<Grid1> {
    let values = nodes
        .iter()
        .map(|&x| x.powf(0.78) * (1.0 - x).powf(0.78) * (2.0 * x * x + 3.0))
        .collect();
    let mut g = Grid1::new(nodes, values, scheme)?;
    let last = g.values.len() - 1;
    g.values[0] = 0.0;
    g.values[last] = 0.0;
    Ok(g)
}

/// Clamp of the grid's maximizing node position into `[lo, hi]`:
/// the position itself when it lies inside, otherwise the nearer endpoint.
#[inline]
fn clamp_argmax(argmax_pos: f64, lo: f64, hi: f64) -> f64 {
    if lo >= argmax_pos {
        lo
    } else if hi <= argmax_pos {
        hi
    } else {
        argmax_pos
    }
}

/// Maximizing position of the serial-child range `[x√(2−x²), 2x−x²]`.
pub fn argmax_y(g: &Grid1, x: f64) -> f64 {
    let (lo, hi, _) = classic_bounds(x);
    clamp_argmax(g.nodes[g.argmax_node()], lo, hi)
}

/// Maximizing position with the range lower end replaced by `diag(x)`.
pub fn argmax_z(g: &Grid1, x: f64, diag: impl Fn(f64) -> f64) -> f64 {
    let hi = 2.0 * x - x * x;
    let lo = diag(x).min(hi);
    clamp_argmax(g.nodes[g.argmax_node()], lo, hi)
}

/// Eigenvalue extraction summary.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EigenReport {
    pub lambda_s: f64,
    pub lambda_p: f64,
    pub lambda: f64,
    pub mu_upper: f64,
    pub iterations: usize,
    pub final_delta: f64,
}

/// `μ = 1/(−log₂ λ)` for `λ ∈ (0, 1)`.
pub fn mu_from_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("lambda {lambda} outside (0,1)")));
    }
    Ok(1.0 / -lambda.log2())
}

/// Exact supremum of a piecewise-linear grid over subranges `[lo, hi]`.
///
/// The supremum is the larger of the interpolated endpoint values and the
/// maximum node value strictly inside. The inner maximum is bounded by
/// `min(prefix_max(hi index), suffix_max(lo index))`, which is exact for a
/// unimodal profile and an upper bound otherwise — an overestimate only ever
/// weakens λ, never breaks its validity as a bound.
struct RangeSup<'a> {
    g: &'a Grid1,
    prefix_max: Vec<f64>,
    suffix_max: Vec<f64>,
}

impl<'a> RangeSup<'a> {
    fn new(g: &'a Grid1) -> Self {
        let len = g.values.len();
        let mut prefix_max = vec![0.0; len];
        let mut suffix_max = vec![0.0; len];
        let mut run = f64::NEG_INFINITY;
        for i in 0..len {
            run = run.max(g.values[i]);
            prefix_max[i] = run;
        }
        run = f64::NEG_INFINITY;
        for i in (0..len).rev() {
            run = run.max(g.values[i]);
            suffix_max[i] = run;
        }
        Self {
            g,
            prefix_max,
            suffix_max,
        }
    }

    fn sup(&self, lo: f64, hi: f64) -> f64 {
        let mut best = self.g.lin_eval(lo).max(self.g.lin_eval(hi));
        let i1 = self.g.locate(lo) + 1; // first node with position > lo (or == lo)
        let i2 = self.g.locate(hi); // last node with position ≤ hi
        if i1 <= i2 {
            best = best.max(self.prefix_max[i2].min(self.suffix_max[i1]));
        }
        best
    }
}

/// The classic supremal quotient `max_x (h(x²) + sup h over [lo,hi]) / (2h(x))`
/// of a single score function, over interior nodes with positive value.
pub fn classic_lambda(g: &Grid1) -> f64 {
    let sup = RangeSup::new(g);
    let ell = g.nodes.len() - 1;
    (1..ell)
        .into_par_iter()
        .map(|i| {
            let x = g.nodes[i];
            let h = g.values[i];
            if h <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let (lo, hi, _) = classic_bounds(x);
            (g.lin_eval(x * x) + sup.sup(lo, hi.min(1.0))) / (2.0 * h)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Classic single-function power iteration.
///
/// Update: `H'[x] = (H(x²) + H(y*))/2` at interior nodes with pinned zero
/// endpoints, normalized by its maximum; `y*` clamps the maximizing node
/// into `[x√(2−x²), 2x−x²]`. Stops when the post-normalization change is at
/// most `tol`.
pub fn classic_iterate(
    nodes: Vec<f64>,
    scheme: Scheme,
    tol: f64,
    max_iter: usize,
) -> Result<(Grid1, EigenReport)> {
    let mut g = init_h0(nodes, scheme)?;
    normalize(&mut g.values);
    let ell = g.nodes.len() - 1;
    let mut delta = f64::INFINITY;
    for it in 1..=max_iter {
        let am = g.nodes[g.argmax_node()];
        let mut next: Vec<f64> = (0..=ell)
            .into_par_iter()
            .map(|i| {
                if i == 0 || i == ell {
                    return 0.0;
                }
                let x = g.nodes[i];
                let (lo, hi, _) = classic_bounds(x);
                let y = clamp_argmax(am, lo, hi);
                0.5 * (g.lin_eval(x * x) + g.lin_eval(y))
            })
            .collect();
        normalize(&mut next);
        delta = max_abs_diff(&g.values, &next);
        g.values = next;
        if delta <= tol {
            let lambda = classic_lambda(&g);
            let report = EigenReport {
                lambda_s: lambda,
                lambda_p: lambda,
                lambda,
                mu_upper: mu_from_lambda(lambda)?,
                iterations: it,
                final_delta: delta,
            };
            return Ok((g, report));
        }
    }
    Err(Error::IterationLimit {
        limit: max_iter,
        residual: delta,
    })
}

fn normalize(values: &mut [f64]) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max > 0.0 {
        values.iter_mut().for_each(|v| *v /= max);
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.par_iter()
        .zip(b.par_iter())
        .map(|(x, y)| (x - y).abs())
        .reduce(|| 0.0, f64::max)
}

/// Two-state power iteration.
///
/// Carries `φ_s` (last combination serial) and `φ_p` (last combination
/// parallel). Interior updates:
/// `Φ_s'[x] = (φ_p(x²) + φ_s(y*))/2` with `y* ∈ [x√(2−x²), 2x−x²]`, and
/// `Φ_p'[x] = (φ_p(x²) + φ_s(z*))/2` with `z* ∈ [diag(x), 2x−x²]`; both
/// arrays are normalized by `max Φ_s'` so their ratio is preserved. The
/// `diag` argument must be a valid lower bound on the serial child of any
/// parallel-combination channel.
pub fn twostate_iterate<D>(
    nodes: Vec<f64>,
    scheme: Scheme,
    diag: D,
    tol: f64,
    max_iter: usize,
) -> Result<(Grid1, Grid1, EigenReport)>
where
    D: Fn(f64) -> f64 + Sync,
{
    let ell = nodes.len() - 1;
    let mut phi_s = init_h0(nodes.clone(), scheme)?;
    let mut phi_p = phi_s.clone();
    normalize(&mut phi_s.values);
    phi_p.values = phi_s.values.clone();

    // The range ends are fixed across iterations; precompute them.
    let lo_y: Vec<f64> = phi_s.nodes.iter().map(|&x| classic_bounds(x).0).collect();
    let hi: Vec<f64> = phi_s.nodes.iter().map(|&x| 2.0 * x - x * x).collect();
    let lo_z: Vec<f64> = phi_s
        .nodes
        .iter()
        .zip(&hi)
        .map(|(&x, &h)| diag(x).min(h))
        .collect();

    let mut delta = f64::INFINITY;
    for it in 1..=max_iter {
        let am = phi_s.nodes[phi_s.argmax_node()];
        let (mut next_s, mut next_p): (Vec<f64>, Vec<f64>) = (0..=ell)
            .into_par_iter()
            .map(|i| {
                if i == 0 || i == ell {
                    return (0.0, 0.0);
                }
                let x = phi_s.nodes[i];
                let p_x2 = phi_p.lin_eval(x * x);
                let y = clamp_argmax(am, lo_y[i], hi[i]);
                let z = clamp_argmax(am, lo_z[i], hi[i]);
                (
                    0.5 * (p_x2 + phi_s.lin_eval(y)),
                    0.5 * (p_x2 + phi_s.lin_eval(z)),
                )
            })
            .unzip();
        let max_s = next_s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max_s > 0.0 {
            next_s.iter_mut().for_each(|v| *v /= max_s);
            next_p.iter_mut().for_each(|v| *v /= max_s);
        }
        delta = max_abs_diff(&phi_s.values, &next_s).max(max_abs_diff(&phi_p.values, &next_p));
        phi_s.values = next_s;
        phi_p.values = next_p;
        if delta <= tol {
            let report = extract_two_state(&phi_s, &phi_p, &lo_y, &lo_z, &hi, it, delta)?;
            return Ok((phi_s, phi_p, report));
        }
    }
    Err(Error::IterationLimit {
        limit: max_iter,
        residual: delta,
    })
}

fn extract_two_state(
    phi_s: &Grid1,
    phi_p: &Grid1,
    lo_y: &[f64],
    lo_z: &[f64],
    hi: &[f64],
    iterations: usize,
    final_delta: f64,
) -> Result<EigenReport> {
    let sup_s = RangeSup::new(phi_s);
    let ell = phi_s.nodes.len() - 1;
    let (lambda_s, lambda_p) = (1..ell)
        .into_par_iter()
        .map(|i| {
            let x = phi_s.nodes[i];
            let p_x2 = phi_p.lin_eval(x * x);
            let ls = if phi_s.values[i] > 0.0 {
                (p_x2 + sup_s.sup(lo_y[i], hi[i])) / (2.0 * phi_s.values[i])
            } else {
                f64::NEG_INFINITY
            };
            let lp = if phi_p.values[i] > 0.0 {
                (p_x2 + sup_s.sup(lo_z[i], hi[i])) / (2.0 * phi_p.values[i])
            } else {
                f64::NEG_INFINITY
            };
            (ls, lp)
        })
        .reduce(
            || (f64::NEG_INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.max(b.0), a.1.max(b.1)),
        );
    let lambda = lambda_s.max(lambda_p);
    Ok(EigenReport {
        lambda_s,
        lambda_p,
        lambda,
        mu_upper: mu_from_lambda(lambda)?,
        iterations,
        final_delta,
    })
}
