//! Discrete tri-convex lower envelopes on a uniform 3-D mesh.
//!
//! A mesh value array `G` on `M = {0, 1/n, …, 1}³` is *discretely tri-convex*
//! when `2G[mid] ≤ G[left] + G[right]` along each of the three axes. The
//! envelope program TC repeatedly lowers values until that holds everywhere;
//! its limit is the unique largest tri-convex minorant of the initial array,
//! independent of update order. Two implementations are provided: a
//! Jacobi-style averaging descent (slow, obviously correct) and a per-line
//! Graham-scan lower-hull convexifier (fast, the default).

use std::io::{BufReader, BufWriter, Read as _, Write as _};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Budget guard for mesh allocations (values only).
const MAX_MESH_BYTES: u64 = 2 << 30;

/// Pass caps for the two convexifier methods.
const MAX_PASSES_JACOBI: usize = 1_000_000;
const MAX_PASSES_GRAHAM: usize = 10_000;

/// A value array on the uniform mesh `{0, 1/n, …, 1}³`, indexed by
/// `(i, j, k) ↦ (i/n, j/n, k/n)` with `k` fastest in memory.
#[derive(Clone, PartialEq)]
pub struct Mesh3 {
    n: usize,
    values: Vec<f64>,
}

impl std::fmt::Debug for Mesh3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Mesh3")
            .field("n", &self.n)
            .field("values", &format_args!("[{} f64]", self.values.len()))
            .finish()
    }
}

/// One of the three mesh axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Convexifier selection for [`tc_converge`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcMethod {
    /// Per-point averaging descent; every sweep reads only the previous
    /// pass's array.
    JacobiDescend,
    /// Per-line lower convex hulls via Graham's scan, one axis at a time.
    GrahamAxes,
}

impl Mesh3 {
    fn check_budget(n: usize) -> Result<()> {
        let side = n as u64 + 1;
        let bytes = side * side * side * 8;
        if bytes > MAX_MESH_BYTES {
            return Err(Error::MemoryBudget { n, bytes });
        }
        Ok(())
    }

    /// An all-`fill` mesh at resolution `n`.
    pub fn filled(n: usize, fill: f64) -> Result<Self> {
        Self::check_budget(n)?;
        Ok(Self {
            n,
            values: vec![fill; (n + 1).pow(3)],
        })
    }

    /// Builds a mesh from a raw value vector (length must be `(n+1)³`).
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        Self::check_budget(n)?;
        if values.len() != (n + 1).pow(3) {
            return Err(Error::Domain(format!(
                "value vector length {} does not match resolution {n}",
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    /// Mesh resolution (step `1/n`).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw values, `k` fastest.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * (self.n + 1) + j) * (self.n + 1) + k
    }

    /// Value at mesh point `(i/n, j/n, k/n)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.idx(i, j, k)]
    }

    /// Overwrites the value at mesh point `(i/n, j/n, k/n)`.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let at = self.idx(i, j, k);
        self.values[at] = v;
    }
}

/// Populates a mesh at resolution `n` by evaluating `f` at every node.
pub fn init_mesh<F>(n: usize, f: F) -> Result<Mesh3>
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    if n < 2 {
        return Err(Error::Domain(format!("mesh resolution {n} < 2")));
    }
    Mesh3::check_budget(n)?;
    let side = n + 1;
    let mut values = vec![0.0; side * side * side];
    values
        .par_chunks_mut(side * side)
        .enumerate()
        .for_each(|(i, slab)| {
            let x = i as f64 / n as f64;
            for j in 0..side {
                let y = j as f64 / n as f64;
                for k in 0..side {
                    slab[j * side + k] = f(x, y, k as f64 / n as f64);
                }
            }
        });
    Ok(Mesh3 { n, values })
}

/// Trilinear interpolation of the mesh at `(x, y, z) ∈ [0,1]³`.
///
/// Exact at mesh points and piecewise linear along every cardinal line.
pub fn trilinear_eval(m: &Mesh3, x: f64, y: f64, z: f64) -> Result<f64> {
    for v in [x, y, z] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "point ({x}, {y}, {z}) outside the unit cube"
            )));
        }
    }
    let n = m.n;
    let locate = |v: f64| -> (usize, f64) {
        let scaled = v * n as f64;
        let cell = (scaled as usize).min(n - 1);
        (cell, scaled - cell as f64)
    };
    let (i, fx) = locate(x);
    let (j, fy) = locate(y);
    let (k, fz) = locate(z);
    let mut acc = 0.0;
    for (di, wx) in [(0, 1.0 - fx), (1, fx)] {
        for (dj, wy) in [(0, 1.0 - fy), (1, fy)] {
            for (dk, wz) in [(0, 1.0 - fz), (1, fz)] {
                let w = wx * wy * wz;
                if w != 0.0 {
                    acc += w * m.get(i + di, j + dj, k + dk);
                }
            }
        }
    }
    Ok(acc)
}

/// Maximum violation of the discrete tri-convexity criterion,
/// `max(2G[mid] − G[left] − G[right])` over interior points of all three
/// axes, with the axis and location where it is attained. A result `≤ 0`
/// means the mesh is discretely tri-convex.
pub fn convexity_residual(m: &Mesh3) -> (f64, Axis, [usize; 3]) {
    let side = m.n + 1;
    let mut best = (f64::NEG_INFINITY, Axis::X, [0usize; 3]);
    let mut consider = |r: f64, axis: Axis, at: [usize; 3]| {
        if r > best.0 {
            best = (r, axis, at);
        }
    };
    for i in 0..side {
        for j in 0..side {
            for k in 0..side {
                let v = 2.0 * m.get(i, j, k);
                if i > 0 && i < side - 1 {
                    consider(v - m.get(i - 1, j, k) - m.get(i + 1, j, k), Axis::X, [i, j, k]);
                }
                if j > 0 && j < side - 1 {
                    consider(v - m.get(i, j - 1, k) - m.get(i, j + 1, k), Axis::Y, [i, j, k]);
                }
                if k > 0 && k < side - 1 {
                    consider(v - m.get(i, j, k - 1) - m.get(i, j, k + 1), Axis::Z, [i, j, k]);
                }
            }
        }
    }
    if best.0 == f64::NEG_INFINITY {
        best.0 = 0.0;
    }
    best
}

/// One Jacobi-style descent sweep: every point is replaced by the minimum of
/// its current value and the three axis-neighbor averages, all reads from the
/// previous array. Returns the updated mesh and the number of lowered points.
pub fn descend_sweep(m: &Mesh3) -> (Mesh3, usize) {
    let side = m.n + 1;
    let mut next = vec![0.0; m.values.len()];
    let changed: usize = next
        .par_chunks_mut(side * side)
        .enumerate()
        .map(|(i, slab)| {
            let mut lowered = 0usize;
            for j in 0..side {
                for k in 0..side {
                    let v = m.get(i, j, k);
                    let mut best = v;
                    if i > 0 && i < side - 1 {
                        best = best.min(0.5 * (m.get(i - 1, j, k) + m.get(i + 1, j, k)));
                    }
                    if j > 0 && j < side - 1 {
                        best = best.min(0.5 * (m.get(i, j - 1, k) + m.get(i, j + 1, k)));
                    }
                    if k > 0 && k < side - 1 {
                        best = best.min(0.5 * (m.get(i, j, k - 1) + m.get(i, j, k + 1)));
                    }
                    if best < v {
                        lowered += 1;
                    }
                    slab[j * side + k] = best;
                }
            }
            lowered
        })
        .sum();
    (
        Mesh3 {
            n: m.n,
            values: next,
        },
        changed,
    )
}

/// Lower convex hull of the profile `(nodes[i], values[i])`, re-sampled at
/// the same nodes by linear interpolation. The output never exceeds the
/// input and agrees with it at both endpoints. Collinear support points are
/// dropped from the hull (values are unchanged by interpolation). `O(len)`.
pub fn convexify_axis_graham(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    assert_eq!(nodes.len(), values.len());
    assert!(nodes.len() >= 2, "need at least two nodes");
    let mut out = values.to_vec();
    let mut stack = Vec::with_capacity(nodes.len());
    convexify_line(nodes, values, &mut stack, &mut out);
    out
}

/// Monotone-chain lower hull + resample, writing into `out`. `stack` is
/// caller-provided scratch to avoid per-line allocation.
fn convexify_line(nodes: &[f64], values: &[f64], stack: &mut Vec<usize>, out: &mut [f64]) {
    stack.clear();
    for i in 0..nodes.len() {
        while stack.len() >= 2 {
            let a = stack[stack.len() - 2];
            let b = stack[stack.len() - 1];
            // Keep b only when (a → b → i) makes a strict convex (right) turn.
            let cross = (nodes[b] - nodes[a]) * (values[i] - values[a])
                - (values[b] - values[a]) * (nodes[i] - nodes[a]);
            if cross <= 0.0 {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(i);
    }
    let mut seg = 0;
    for i in 0..nodes.len() {
        while seg + 1 < stack.len() && nodes[stack[seg + 1]] <= nodes[i] {
            seg += 1;
        }
        let a = stack[seg];
        out[i] = if seg + 1 < stack.len() {
            let b = stack[seg + 1];
            let t = (nodes[i] - nodes[a]) / (nodes[b] - nodes[a]);
            values[a] * (1.0 - t) + values[b] * t
        } else {
            values[a]
        };
    }
}

/// Raw-pointer wrapper so parallel line workers can write disjoint strided
/// lines of one array. Soundness: every line index maps to a disjoint set of
/// elements.
struct SyncPtr(*mut f64);
unsafe impl Sync for SyncPtr {}
unsafe impl Send for SyncPtr {}

impl SyncPtr {
    fn get(&self) -> *mut f64 {
        self.0
    }
}

/// One Graham pass over all lines of all three axes; returns the maximum
/// lowering applied.
fn graham_pass(m: &mut Mesh3, nodes: &[f64]) -> f64 {
    let side = m.n + 1;
    let mut delta = 0.0f64;
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        // Strides for stepping along the axis and across lines.
        let (step, outer, inner) = match axis {
            Axis::X => (side * side, side, 1),
            Axis::Y => (side, side * side, 1),
            Axis::Z => (1, side * side, side),
        };
        let ptr = SyncPtr(m.values.as_mut_ptr());
        let axis_delta = (0..side * side)
            .into_par_iter()
            .map(move |line| {
                let base = (line / side) * outer + (line % side) * inner;
                let mut vals = vec![0.0; side];
                let mut out = vec![0.0; side];
                let mut stack = Vec::with_capacity(side);
                let p = ptr.get();
                // SAFETY: distinct `line` values address disjoint element
                // sets of the mesh, and the pass owns the mesh exclusively.
                unsafe {
                    for t in 0..side {
                        vals[t] = *p.add(base + t * step);
                    }
                    convexify_line(nodes, &vals, &mut stack, &mut out);
                    let mut d = 0.0f64;
                    for t in 0..side {
                        d = d.max(vals[t] - out[t]);
                        *p.add(base + t * step) = out[t];
                    }
                    d
                }
            })
            .reduce(|| 0.0, f64::max);
        delta = delta.max(axis_delta);
    }
    delta
}

/// Runs TC until the per-pass change drops to `tol`, returning the discrete
/// tri-convex envelope `ǦG ≤ G`. Both methods converge to the same limit;
/// `GrahamAxes` is the fast default. Exceeding the pass cap is an error that
/// carries the best mesh so far.
pub fn tc_converge(mut m: Mesh3, tol: f64, method: TcMethod) -> Result<Mesh3> {
    if tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let side = m.n + 1;
    let nodes: Vec<f64> = (0..side).map(|i| i as f64 / m.n as f64).collect();
    let cap = match method {
        TcMethod::JacobiDescend => MAX_PASSES_JACOBI,
        TcMethod::GrahamAxes => MAX_PASSES_GRAHAM,
    };
    let mut residual = f64::INFINITY;
    for _ in 0..cap {
        residual = match method {
            TcMethod::GrahamAxes => graham_pass(&mut m, &nodes),
            TcMethod::JacobiDescend => {
                let (next, _) = descend_sweep(&m);
                let d = m
                    .values
                    .par_iter()
                    .zip(next.values.par_iter())
                    .map(|(a, b)| a - b)
                    .reduce(|| 0.0, f64::max);
                m = next;
                d
            }
        };
        if residual <= tol {
            return Ok(m);
        }
    }
    Err(Error::EnvelopeIterationLimit {
        limit: cap,
        residual,
        best: Box::new(m),
    })
}

/// Identifier for cached mesh variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeshKind {
    /// Raw evaluations of `g`.
    G,
    /// Tri-convex envelope of the raw mesh (not a certified bound).
    Genv,
    /// Monotone-shift lower bound array.
    Gmono,
    /// Smoothness-corrected lower bound array.
    Gsmooth,
    /// Per-cell better-of-the-two merge.
    Gmerged,
    /// Tri-convex envelope of the merged array (the certified envelope).
    GenvRig,
}

impl MeshKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeshKind::G => "G",
            MeshKind::Genv => "Genv",
            MeshKind::Gmono => "Gmono",
            MeshKind::Gsmooth => "Gsmooth",
            MeshKind::Gmerged => "Gmerged",
            MeshKind::GenvRig => "GenvRig",
        }
    }
}

/// Header line of the mesh cache format.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub version: u32,
    pub n: usize,
    pub kind: MeshKind,
    pub tol: f64,
}

pub const CACHE_VERSION: u32 = 1;

/// Writes a mesh cache file atomically (temp file + rename): one JSON header
/// line, then `(n+1)³` little-endian f64 values with the z index fastest.
pub fn write_mesh(path: &Path, m: &Mesh3, kind: MeshKind, tol: f64) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let header = CacheHeader {
        version: CACHE_VERSION,
        n: m.n,
        kind,
        tol,
    };
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for v in &m.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
    }
    tmp.persist(path)
        .map_err(|e| Error::Cache(format!("persisting {}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Reads a mesh cache file, validating the header and payload size.
pub fn read_mesh(path: &Path) -> Result<(Mesh3, CacheHeader)> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut line = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        r.read_exact(&mut byte)
            .map_err(|_| Error::Cache(format!("{}: missing header line", path.display())))?;
        if byte[0] == b'\n' {
            break;
        }
        line.push(byte[0]);
        if line.len() > 4096 {
            return Err(Error::Cache(format!(
                "{}: header line too long",
                path.display()
            )));
        }
    }
    let header: CacheHeader = serde_json::from_slice(&line)
        .map_err(|e| Error::Cache(format!("{}: bad header: {e}", path.display())))?;
    if header.version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "{}: unsupported cache version {}",
            path.display(),
            header.version
        )));
    }
    let count = (header.n + 1).pow(3);
    let mut values = vec![0.0f64; count];
    let mut buf = [0u8; 8];
    for v in values.iter_mut() {
        r.read_exact(&mut buf)
            .map_err(|_| Error::Cache(format!("{}: truncated payload", path.display())))?;
        *v = f64::from_le_bytes(buf);
    }
    if r.read(&mut buf)? != 0 {
        return Err(Error::Cache(format!(
            "{}: trailing bytes after payload",
            path.display()
        )));
    }
    Ok((Mesh3::from_values(header.n, values)?, header))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::g_tri;
    use approx::assert_abs_diff_eq;

    #[test]
    fn init_mesh_corners() {
        let m = init_mesh(2, g_tri).unwrap();
        assert_eq!(m.values().len(), 27);
        assert_eq!(m.get(0, 0, 0), 0.0);
        assert_abs_diff_eq!(m.get(2, 2, 2), 1.0, epsilon = 1e-15);

        let z = init_mesh(4, |_, _, _| 0.0).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn residual_detects_concavity() {
        let z = init_mesh(2, |_, _, _| 0.0).unwrap();
        assert_eq!(convexity_residual(&z).0, 0.0);

        // 1-D bump along x embedded at j = k = 0.
        let mut m = Mesh3::filled(2, 0.0).unwrap();
        m.set(1, 0, 0, 1.0);
        let (r, axis, at) = convexity_residual(&m);
        assert_eq!(r, 2.0);
        assert_eq!(axis, Axis::X);
        assert_eq!(at, [1, 0, 0]);
    }

    #[test]
    fn descend_sweep_flattens_bump() {
        let mut m = Mesh3::filled(2, 0.0).unwrap();
        m.set(1, 0, 0, 1.0);
        let (next, changed) = descend_sweep(&m);
        assert_eq!(changed, 1);
        assert_eq!(next.get(1, 0, 0), 0.0);

        let (again, changed) = descend_sweep(&next);
        assert_eq!(changed, 0);
        assert_eq!(again, next);
    }

    #[test]
    fn graham_hull_examples() {
        let nodes = [0.0, 0.25, 0.5, 0.75, 1.0];
        let hulled = convexify_axis_graham(&nodes, &[0.0, 2.0, 1.0, 3.0, 0.0]);
        for v in hulled {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        }

        let nodes = [0.0, 0.5, 1.0];
        assert_eq!(
            convexify_axis_graham(&nodes, &[0.0, 0.25, 1.0]),
            vec![0.0, 0.25, 1.0]
        );
        assert_eq!(
            convexify_axis_graham(&nodes, &[1.0, 0.0, 1.0]),
            vec![1.0, 0.0, 1.0]
        );
    }

    #[test]
    fn tc_methods_agree_on_g() {
        let m = init_mesh(12, g_tri).unwrap();
        let a = tc_converge(m.clone(), 1e-13, TcMethod::GrahamAxes).unwrap();
        let b = tc_converge(m.clone(), 1e-13, TcMethod::JacobiDescend).unwrap();
        let max_diff = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(max_diff <= 1e-10, "methods disagree by {max_diff:.3e}");
        // Envelope is below the input and discretely tri-convex.
        assert!(a.values().iter().zip(m.values()).all(|(e, g)| e <= g));
        assert!(convexity_residual(&a).0 <= 1e-13);
        // Idempotence.
        let twice = tc_converge(a.clone(), 1e-13, TcMethod::GrahamAxes).unwrap();
        let drift = a
            .values()
            .iter()
            .zip(twice.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(drift <= 1e-12);
    }

    #[test]
    fn envelope_diagonal_tracks_closed_form() {
        // The raw-sample envelope is exact at nodes but its interpolant may
        // overshoot between nodes by O(1/n²) where the diagonal is concave —
        // which is precisely why the certified arrays exist.
        let n = 16;
        let m = init_mesh(n, g_tri).unwrap();
        let env = tc_converge(m, 1e-13, TcMethod::GrahamAxes).unwrap();
        let mut worst_over = 0.0f64;
        let mut worst_under = 0.0f64;
        for i in 0..=32 {
            let x = i as f64 / 32.0;
            let d = trilinear_eval(&env, x.sqrt(), x.sqrt(), x).unwrap();
            worst_over = worst_over.max(d - crate::scalar::g_diag_closed(x));
            worst_under = worst_under.max(crate::scalar::g_diag_closed(x) - d);
        }
        let slack = 2.0 / (n * n) as f64;
        assert!(worst_over < slack, "overshoot {worst_over} ≥ {slack}");
        assert!(worst_under < 0.01, "undershoot {worst_under}");
    }

    #[test]
    fn trilinear_basics() {
        let m = init_mesh(4, |x, y, z| x + 2.0 * y + 4.0 * z).unwrap();
        // Exact at nodes and linear inside cells.
        assert_abs_diff_eq!(
            trilinear_eval(&m, 0.25, 0.5, 0.75).unwrap(),
            0.25 + 1.0 + 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            trilinear_eval(&m, 0.1, 0.2, 0.3).unwrap(),
            0.1 + 0.4 + 1.2,
            epsilon = 1e-14
        );
        let ones = Mesh3::filled(3, 1.0).unwrap();
        assert_abs_diff_eq!(
            trilinear_eval(&ones, 0.5, 0.5, 0.5).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(trilinear_eval(&ones, 1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn trilinear_midpoint_convex_on_envelope() {
        let m = init_mesh(10, g_tri).unwrap();
        let env = tc_converge(m, 1e-13, TcMethod::GrahamAxes).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let (x, y, z) = (rnd(), rnd(), rnd());
            let h = 0.05 * rnd();
            for axis in 0..3 {
                let mut lo = [x, y, z];
                let mut hi = [x, y, z];
                lo[axis] = (lo[axis] - h).max(0.0);
                hi[axis] = (hi[axis] + h).min(1.0);
                let mid = [
                    0.5 * (lo[0] + hi[0]),
                    0.5 * (lo[1] + hi[1]),
                    0.5 * (lo[2] + hi[2]),
                ];
                let a = trilinear_eval(&env, lo[0], lo[1], lo[2]).unwrap();
                let b = trilinear_eval(&env, hi[0], hi[1], hi[2]).unwrap();
                let c = trilinear_eval(&env, mid[0], mid[1], mid[2]).unwrap();
                assert!(a + b >= 2.0 * c - 1e-12);
            }
        }
    }

    #[test]
    fn cache_round_trip_is_bit_exact() {
        let dir = std::env::temp_dir().join(format!("mesh-cache-test-{}", std::process::id()));
        let path = dir.join("g-n6.mesh3");
        let m = init_mesh(6, g_tri).unwrap();
        write_mesh(&path, &m, MeshKind::G, 1e-13).unwrap();
        let (back, header) = read_mesh(&path).unwrap();
        assert_eq!(header.n, 6);
        assert_eq!(header.kind, MeshKind::G);
        assert_eq!(header.version, CACHE_VERSION);
        assert!(m
            .values()
            .iter()
            .zip(back.values())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn cache_rejects_corruption() {
        let dir = std::env::temp_dir().join(format!("mesh-cache-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.mesh3");
        let m = init_mesh(3, g_tri).unwrap();
        write_mesh(&path, &m, MeshKind::G, 1e-13).unwrap();
        // Truncate the payload.
        let data = std::fs::read(&path).unwrap();
        std::fs::write(&path, &data[..data.len() - 5]).unwrap();
        assert!(matches!(read_mesh(&path), Err(Error::Cache(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
