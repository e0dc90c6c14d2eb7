//! Certified sub-gridpoint lower bounds on `g`.
//!
//! Mesh values sampled from `g` say nothing about `g` between mesh points,
//! so a certified mesh lower bound needs extra structure. Two complementary
//! constructions are provided:
//!
//! * `G_→` ([`build_g_monotone`]) exploits coordinatewise monotonicity of
//!   `g`: evaluating one mesh step down-left bounds `g` over every touching
//!   cell. Error `O(|∇g|/n)`.
//! * `G_↓` ([`build_g_smooth`]) subtracts `(m₁+m₂+m₃)/(8n²)` from the exact
//!   node value, where `mᵢ` bounds the positive part of the corresponding
//!   second derivative over the touching cells. Error `O(1/n²)` wherever the
//!   second derivatives are moderate.
//!
//! [`merge_better`] picks per cell whichever array is better, and the
//! tri-convex envelope of the merged array is the certified envelope used by
//! the headline bound.
//!
//! All real arithmetic that feeds a certified bound goes through [`Interval`]
//! with outward rounding, so every stored array entry is a true lower bound
//! of `g` at its node.

use rayon::prelude::*;

use crate::envelope::{trilinear_eval, Mesh3};
use crate::{Error, Result};

/// A closed interval with outward-rounded arithmetic. Every elementary
/// operation widens its result by one representable step per endpoint, so
/// results provably contain the exact value regardless of rounding mode.
/// Indeterminate forms collapse to the unbounded sentinel, never to a wrong
/// finite bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const UNBOUNDED: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Degenerate interval holding one exactly-representable value.
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo > hi || lo.is_nan() || hi.is_nan() {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn is_unbounded(self) -> bool {
        !self.lo.is_finite() || !self.hi.is_finite()
    }

    pub fn contains(self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn widen(lo: f64, hi: f64) -> Self {
        Self {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    pub fn add(self, o: Self) -> Self {
        if self.is_unbounded() || o.is_unbounded() {
            return Self::UNBOUNDED;
        }
        Self::widen(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(self, o: Self) -> Self {
        if self.is_unbounded() || o.is_unbounded() {
            return Self::UNBOUNDED;
        }
        Self::widen(self.lo - o.hi, self.hi - o.lo)
    }

    pub fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn mul(self, o: Self) -> Self {
        if self.is_unbounded() || o.is_unbounded() {
            return Self::UNBOUNDED;
        }
        let p = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        Self::widen(
            p.iter().copied().fold(f64::INFINITY, f64::min),
            p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// `x²` with the dependency between the factors resolved: an interval
    /// spanning zero squares to `[0, max]`, not to a sign-crossing product.
    pub fn sq(self) -> Self {
        if self.is_unbounded() {
            return Self::UNBOUNDED;
        }
        let (a, b) = (self.lo * self.lo, self.hi * self.hi);
        let lo = if self.lo <= 0.0 && self.hi >= 0.0 {
            0.0
        } else {
            a.min(b).next_down().max(0.0)
        };
        Self {
            lo,
            hi: a.max(b).next_up(),
        }
    }

    pub fn div(self, o: Self) -> Self {
        if self.is_unbounded() || o.is_unbounded() || (o.lo <= 0.0 && o.hi >= 0.0) {
            return Self::UNBOUNDED;
        }
        let r = Self::widen(1.0 / o.hi, 1.0 / o.lo);
        self.mul(r)
    }

    /// Square root; the lower endpoint is clamped at 0 first (sound whenever
    /// the exact value is nonnegative, which is how the crate uses it).
    pub fn sqrt(self) -> Self {
        if !self.hi.is_finite() {
            return Self::UNBOUNDED;
        }
        Self {
            lo: self.lo.max(0.0).sqrt().next_down().max(0.0),
            hi: self.hi.max(0.0).sqrt().next_up(),
        }
    }
}

/// Per-node upper bounds on the positive parts of `g_xx`, `g_yy`, `g_zz`
/// over the union of cells touching the node; `+∞` marks cells where no
/// finite bound was obtained.
#[derive(Clone, Copy, Debug)]
pub struct CellBounds {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl CellBounds {
    pub fn is_finite(&self) -> bool {
        self.m1.is_finite() && self.m2.is_finite() && self.m3.is_finite()
    }
}

/// Shared subexpressions of `g` and its second derivatives over a box.
///
/// With `E = x²y² + (2−x²−y²)z²` and `F = E² − 4(1−x²)(1−y²)z⁴`, both
/// polynomial in `(x, y, z)`, one has `g = √((E + √F)/2)`. This form avoids
/// the square roots of `1−x²` and `1−y²` that make naive interval bounds of
/// the derivatives blow up next to the `x = 1` and `y = 1` faces, where the
/// exact derivatives stay finite.
struct GParts {
    x: Interval,
    y: Interval,
    z: Interval,
    x2: Interval,
    y2: Interval,
    z2: Interval,
    cx: Interval,
    cy: Interval,
    e: Interval,
    f: Interval,
    q: Interval,
    w: Interval,
}

fn g_parts(x: Interval, y: Interval, z: Interval) -> GParts {
    let one = Interval::point(1.0);
    let four = Interval::point(4.0);
    let half = Interval::point(0.5);
    let x2 = x.sq();
    let y2 = y.sq();
    let z2 = z.sq();
    let cx = one.sub(x2);
    let cy = one.sub(y2);
    let z4 = z2.sq();
    let e = x2.mul(y2).add(cx.add(cy).mul(z2));
    let f = e.sq().sub(four.mul(cx.mul(cy).mul(z4)));
    let q = f.sqrt();
    let w = e.add(q).mul(half);
    GParts {
        x,
        y,
        z,
        x2,
        y2,
        z2,
        cx,
        cy,
        e,
        f,
        q,
        w,
    }
}

/// Interval enclosure of `g(x, y, z)` over the input box.
pub fn g_tri_interval(x: Interval, y: Interval, z: Interval) -> Interval {
    g_parts(x, y, z).w.sqrt()
}

/// Second derivative of `√W(t)` given enclosures of `E`, `F` and their first
/// and second derivatives along one coordinate:
/// `(√W)'' = (2W·W'' − W'²) / (4W^{3/2})` with `W = (E+√F)/2`.
fn sqrt_w_second(p: &GParts, e_d: Interval, e_dd: Interval, f_d: Interval, f_dd: Interval) -> Interval {
    let two = Interval::point(2.0);
    let four = Interval::point(4.0);
    let half = Interval::point(0.5);
    let q_d = f_d.div(two.mul(p.q));
    let q_dd = f_dd.div(two.mul(p.q)).sub(f_d.sq().div(four.mul(p.f.mul(p.q))));
    let w_d = e_d.add(q_d).mul(half);
    let w_dd = e_dd.add(q_dd).mul(half);
    let num = two.mul(p.w.mul(w_dd)).sub(w_d.sq());
    let den = four.mul(p.w.mul(p.w.sqrt()));
    num.div(den)
}

fn gxx_interval(p: &GParts) -> Interval {
    let two = Interval::point(2.0);
    let eight = Interval::point(8.0);
    let e_d = two.mul(p.x.mul(p.y2.sub(p.z2)));
    let e_dd = two.mul(p.y2.sub(p.z2));
    let z4 = p.z2.sq();
    let f_d = two.mul(p.e.mul(e_d)).add(eight.mul(p.x.mul(p.cy.mul(z4))));
    let f_dd = two
        .mul(e_d.sq())
        .add(two.mul(p.e.mul(e_dd)))
        .add(eight.mul(p.cy.mul(z4)));
    sqrt_w_second(p, e_d, e_dd, f_d, f_dd)
}

fn gyy_interval(p: &GParts) -> Interval {
    let two = Interval::point(2.0);
    let eight = Interval::point(8.0);
    let e_d = two.mul(p.y.mul(p.x2.sub(p.z2)));
    let e_dd = two.mul(p.x2.sub(p.z2));
    let z4 = p.z2.sq();
    let f_d = two.mul(p.e.mul(e_d)).add(eight.mul(p.y.mul(p.cx.mul(z4))));
    let f_dd = two
        .mul(e_d.sq())
        .add(two.mul(p.e.mul(e_dd)))
        .add(eight.mul(p.cx.mul(z4)));
    sqrt_w_second(p, e_d, e_dd, f_d, f_dd)
}

fn gzz_interval(p: &GParts) -> Interval {
    let two = Interval::point(2.0);
    let s = Interval::point(2.0).sub(p.x2.add(p.y2));
    let e_d = two.mul(p.z.mul(s));
    let e_dd = two.mul(s);
    let cxy = p.cx.mul(p.cy);
    let z3 = p.z.mul(p.z2);
    let f_d = two
        .mul(p.e.mul(e_d))
        .sub(Interval::point(16.0).mul(cxy.mul(z3)));
    let f_dd = two
        .mul(e_d.sq())
        .add(two.mul(p.e.mul(e_dd)))
        .sub(Interval::point(48.0).mul(cxy.mul(p.z2)));
    sqrt_w_second(p, e_d, e_dd, f_d, f_dd)
}

/// Upper bounds on `max(g_xx, 0)`, `max(g_yy, 0)`, `max(g_zz, 0)` over the
/// neighborhood `((i,j,k)/n + [−1/n, 1/n]³) ∩ [0,1]³` of a mesh node.
/// Components are `+∞` near singular loci of the derivatives rather than
/// wrong finite values.
pub fn second_derivative_bounds(n: usize, i: usize, j: usize, k: usize) -> CellBounds {
    let box_at = |t: usize| {
        let c = t as f64 / n as f64;
        Interval {
            lo: (c - 1.0 / n as f64).max(0.0),
            hi: (c + 1.0 / n as f64).min(1.0),
        }
    };
    let p = g_parts(box_at(i), box_at(j), box_at(k));
    let clamp_pos = |iv: Interval| if iv.hi.is_nan() { f64::INFINITY } else { iv.hi.max(0.0) };
    CellBounds {
        m1: clamp_pos(gxx_interval(&p)),
        m2: clamp_pos(gyy_interval(&p)),
        m3: clamp_pos(gzz_interval(&p)),
    }
}

/// Certified lower endpoint of `g` at an exact point.
fn g_lower_at(x: f64, y: f64, z: f64) -> f64 {
    g_tri_interval(Interval::point(x), Interval::point(y), Interval::point(z))
        .lo
        .max(0.0)
}

/// Builds `G_→[a,b,c] = g(a−1/n ∨ 0, b−1/n ∨ 0, c−1/n ∨ 0)` (rounded down).
///
/// Since `g` is nondecreasing in each coordinate, the shifted value bounds
/// `g` from below over every cell touching the node, so the trilinear
/// interpolant of the array is a pointwise lower bound of `g`.
pub fn build_g_monotone(n: usize) -> Result<Mesh3> {
    if n < 2 {
        return Err(Error::Domain(format!("mesh resolution {n} < 2")));
    }
    let shift = |t: usize| ((t as f64 - 1.0) / n as f64).max(0.0);
    let side = n + 1;
    let mut values = vec![0.0; side * side * side];
    values
        .par_chunks_mut(side * side)
        .enumerate()
        .for_each(|(i, slab)| {
            let x = shift(i);
            for j in 0..side {
                let y = shift(j);
                for k in 0..side {
                    slab[j * side + k] = g_lower_at(x, y, shift(k));
                }
            }
        });
    Mesh3::from_values(n, values)
}

/// Builds `G_↓[a,b,c] = g(a,b,c) − (m₁+m₂+m₃)/(8n²)` with the node value
/// rounded down and the penalty rounded up. Nodes whose derivative bounds
/// are unbounded become `−∞`, which makes the merge fall back to `G_→`.
pub fn build_g_smooth(n: usize) -> Result<Mesh3> {
    if n < 2 {
        return Err(Error::Domain(format!("mesh resolution {n} < 2")));
    }
    let side = n + 1;
    let denom = 8.0 * (n * n) as f64;
    let mut values = vec![0.0; side * side * side];
    values
        .par_chunks_mut(side * side)
        .enumerate()
        .for_each(|(i, slab)| {
            let x = i as f64 / n as f64;
            for j in 0..side {
                let y = j as f64 / n as f64;
                for k in 0..side {
                    let bounds = second_derivative_bounds(n, i, j, k);
                    slab[j * side + k] = if bounds.is_finite() {
                        let penalty =
                            ((bounds.m1 + bounds.m2 + bounds.m3).next_up() / denom).next_up();
                        let g = g_lower_at(x, y, k as f64 / n as f64);
                        (g - penalty).next_down()
                    } else {
                        f64::NEG_INFINITY
                    };
                }
            }
        });
    Mesh3::from_values(n, values)
}

/// Merges `G_→` (default) and `G_↓` into `G_↘`.
///
/// Cell rule: a cell switches to the smoothness array only when `G_↓ ≥ G_→`
/// at all eight of its corners. Point rule: a node keeps the `G_→` value if
/// any cell touching it kept the monotone approach, otherwise it takes the
/// `G_↓` value. The trilinear interpolant of the result is still a pointwise
/// lower bound of `g`.
pub fn merge_better(gm: &Mesh3, gs: &Mesh3) -> Result<Mesh3> {
    if gm.n() != gs.n() {
        return Err(Error::ResolutionMismatch(gm.n(), gs.n()));
    }
    let n = gm.n();
    let side = n + 1;
    // smooth_wins[p]: G_↓ is at least as good at this node.
    let smooth_wins: Vec<bool> = (0..side * side * side)
        .map(|p| gs.values()[p] >= gm.values()[p])
        .collect();
    let at = |i: usize, j: usize, k: usize| (i * side + j) * side + k;
    // cell_smooth[cell]: all eight corners prefer the smoothness array.
    let cell_smooth = |a: usize, b: usize, c: usize| -> bool {
        for di in 0..2 {
            for dj in 0..2 {
                for dk in 0..2 {
                    if !smooth_wins[at(a + di, b + dj, c + dk)] {
                        return false;
                    }
                }
            }
        }
        true
    };
    let mut values = vec![0.0; side * side * side];
    values
        .par_chunks_mut(side * side)
        .enumerate()
        .for_each(|(i, slab)| {
            for j in 0..side {
                for k in 0..side {
                    let mut any_mono = false;
                    'cells: for a in i.saturating_sub(1)..=i.min(n - 1) {
                        for b in j.saturating_sub(1)..=j.min(n - 1) {
                            for c in k.saturating_sub(1)..=k.min(n - 1) {
                                if !cell_smooth(a, b, c) {
                                    any_mono = true;
                                    break 'cells;
                                }
                            }
                        }
                    }
                    slab[j * side + k] = if any_mono {
                        gm.get(i, j, k)
                    } else {
                        gs.get(i, j, k)
                    };
                }
            }
        });
    Mesh3::from_values(n, values)
}

/// Evaluates a certified envelope mesh along the diagonal curve
/// `(√x, √x, x)`. For the tri-convexified merge this bounds `Z(Wˢ)` from
/// below for every channel `W` that is a parallel combination with
/// `Z(W) = x`.
pub fn rigorous_diag_bound(env_rig: &Mesh3, x: f64) -> Result<f64> {
    trilinear_eval(env_rig, x.sqrt(), x.sqrt(), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{g_diag_closed, g_tri};

    fn rnd_stream(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn interval_examples() {
        let a = Interval::new(1.0, 2.0).unwrap();
        let b = Interval::new(3.0, 4.0).unwrap();
        let s = a.add(b);
        assert!(s.lo <= 4.0 && s.hi >= 6.0);

        let x = Interval::new(0.0, 1.0).unwrap();
        let d = x.sub(x);
        assert!(d.lo <= -1.0 && d.hi >= 1.0);

        let p = Interval::new(0.1, 0.2)
            .unwrap()
            .mul(Interval::new(0.4, 0.5).unwrap())
            .sub(Interval::new(0.7, 0.8).unwrap());
        assert!(p.lo <= -0.76 && p.hi >= -0.60);
        assert!(p.lo >= -0.7601 && p.hi <= -0.5999);
    }

    #[test]
    fn interval_division_by_zero_is_unbounded() {
        let a = Interval::new(1.0, 2.0).unwrap();
        let z = Interval::new(-0.5, 0.5).unwrap();
        assert_eq!(a.div(z), Interval::UNBOUNDED);
        assert!(Interval::new(-1.0, 4.0).unwrap().sqrt().contains(2.0));
    }

    #[test]
    fn interval_ops_contain_sampled_values() {
        let mut rnd = rnd_stream(11);
        for _ in 0..200 {
            let mk = |r: &mut dyn FnMut() -> f64| {
                let a = 4.0 * r() - 2.0;
                let b = a + 2.0 * r();
                Interval::new(a, b).unwrap()
            };
            let x = mk(&mut rnd);
            let y = mk(&mut rnd);
            for _ in 0..50 {
                let u = x.lo + (x.hi - x.lo) * rnd();
                let v = y.lo + (y.hi - y.lo) * rnd();
                assert!(x.add(y).contains(u + v));
                assert!(x.sub(y).contains(u - v));
                assert!(x.mul(y).contains(u * v));
                assert!(x.sq().contains(u * u));
                let d = x.div(y);
                if !d.is_unbounded() {
                    assert!(d.contains(u / v));
                }
                if u >= 0.0 {
                    assert!(x.sqrt().contains(u.sqrt()));
                }
            }
        }
    }

    #[test]
    fn g_interval_encloses_scalar_g_tightly() {
        let mut rnd = rnd_stream(5);
        let mut tight = 0;
        let total = 2000;
        for _ in 0..total {
            let (x, y, z) = (rnd(), rnd(), rnd());
            let iv = g_tri_interval(Interval::point(x), Interval::point(y), Interval::point(z));
            let exact = g_tri(x, y, z);
            assert!(
                iv.lo <= exact + 1e-15 && exact <= iv.hi + 1e-15,
                "enclosure fails at ({x},{y},{z}): [{},{}] vs {exact}",
                iv.lo,
                iv.hi
            );
            // Near the surface where the radicand F cancels to ~0, the
            // enclosure widens to ~√ulp; everywhere else it is ulp-tight.
            assert!(iv.hi - iv.lo < 1e-6);
            if iv.hi - iv.lo < 1e-12 {
                tight += 1;
            }
        }
        assert!(tight * 10 >= total * 9, "only {tight}/{total} tight");
    }

    #[test]
    fn second_derivatives_match_finite_differences() {
        let mut rnd = rnd_stream(7);
        // Richardson-extrapolated central differences cancel the h² term,
        // leaving truncation and roundoff both well below the tolerance.
        let h = 1e-4;
        let fd2 = |f: &dyn Fn(f64) -> f64, t: f64, h: f64| {
            (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)
        };
        let richardson = |f: &dyn Fn(f64) -> f64, t: f64| {
            (16.0 * fd2(f, t, h) - fd2(f, t, 2.0 * h)) / 15.0
        };
        let mut checked = 0;
        while checked < 1000 {
            let (x, y, z) = (
                0.05 + 0.9 * rnd(),
                0.05 + 0.9 * rnd(),
                0.05 + 0.9 * rnd(),
            );
            let p = g_parts(Interval::point(x), Interval::point(y), Interval::point(z));
            let fd_xx = richardson(&|t| g_tri(t, y, z), x);
            let fd_zz = richardson(&|t| g_tri(x, y, t), z);
            let an_xx = gxx_interval(&p);
            let an_zz = gzz_interval(&p);
            if an_xx.is_unbounded() || an_zz.is_unbounded() {
                continue;
            }
            let mid = |iv: Interval| 0.5 * (iv.lo + iv.hi);
            // The 1e-2 floor absorbs double-precision noise in the reference
            // differences where C − D nearly cancels (≈1e-15/h² ≈ 1e-7).
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-2);
            assert!(
                rel(mid(an_xx), fd_xx) < 1e-4,
                "g_xx mismatch at ({x},{y},{z}): {} vs {fd_xx}",
                mid(an_xx)
            );
            assert!(
                rel(mid(an_zz), fd_zz) < 1e-4,
                "g_zz mismatch at ({x},{y},{z}): {} vs {fd_zz}",
                mid(an_zz)
            );
            checked += 1;
        }
    }

    #[test]
    fn cell_bounds_moderate_in_the_interior() {
        // The radicand F cancels to ≈0 on a surface through the cube, so a
        // coarse box straddling it gets no finite bound; a fine box at the
        // same center does.
        let coarse = second_derivative_bounds(50, 25, 25, 25);
        assert!(!coarse.is_finite());
        let b = second_derivative_bounds(200, 100, 100, 100);
        assert!(b.is_finite());
        assert!(b.m1 + b.m2 + b.m3 < 20.0, "interior bounds too large: {b:?}");
        // A cell touching the singular edge x = y = 0 is unbounded.
        let edge = second_derivative_bounds(200, 0, 0, 100);
        assert!(edge.m1.is_infinite() || edge.m2.is_infinite() || edge.m3.is_infinite());
    }

    #[test]
    fn monotone_array_is_a_lower_bound() {
        let n = 16;
        let gm = build_g_monotone(n).unwrap();
        assert_eq!(gm.get(0, 0, 0), 0.0);
        assert!(gm.get(n, n, n) < 1.0);
        let mut rnd = rnd_stream(23);
        for _ in 0..100_000 {
            let (x, y, z) = (rnd(), rnd(), rnd());
            assert!(trilinear_eval(&gm, x, y, z).unwrap() <= g_tri(x, y, z));
        }
    }

    #[test]
    fn monotone_array_tightens_with_resolution() {
        let coarse = build_g_monotone(8).unwrap();
        let fine = build_g_monotone(16).unwrap();
        for i in 0..=8 {
            for j in 0..=8 {
                for k in 0..=8 {
                    assert!(fine.get(2 * i, 2 * j, 2 * k) >= coarse.get(i, j, k));
                }
            }
        }
    }

    #[test]
    fn smooth_array_is_a_lower_bound() {
        let n = 20;
        let gs = build_g_smooth(n).unwrap();
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let v = gs.get(i, j, k);
                    let exact = g_tri(
                        i as f64 / n as f64,
                        j as f64 / n as f64,
                        k as f64 / n as f64,
                    );
                    assert!(v <= exact);
                }
            }
        }
        let mut rnd = rnd_stream(29);
        for _ in 0..100_000 {
            let (x, y, z) = (rnd(), rnd(), rnd());
            let v = trilinear_eval(&gs, x, y, z).unwrap();
            assert!(v == f64::NEG_INFINITY || v <= g_tri(x, y, z));
        }
    }

    #[test]
    fn merge_rules() {
        let n = 4;
        let gm = build_g_monotone(n).unwrap();
        let all_bad = Mesh3::filled(n, f64::NEG_INFINITY).unwrap();
        let merged = merge_better(&gm, &all_bad).unwrap();
        assert_eq!(merged, gm);

        let above: Vec<f64> = gm.values().iter().map(|v| v + 1.0).collect();
        let gs = Mesh3::from_values(n, above).unwrap();
        let merged = merge_better(&gm, &gs).unwrap();
        // Every cell switched, so every node takes the smooth value.
        assert_eq!(merged, gs);

        assert!(matches!(
            merge_better(&gm, &Mesh3::filled(5, 0.0).unwrap()),
            Err(Error::ResolutionMismatch(4, 5))
        ));
    }

    #[test]
    fn merged_envelope_is_sound_and_ordered() {
        use crate::envelope::{tc_converge, TcMethod};
        let n = 20;
        let gm = build_g_monotone(n).unwrap();
        let gs = build_g_smooth(n).unwrap();
        let merged = merge_better(&gm, &gs).unwrap();
        let env = tc_converge(merged.clone(), 1e-13, TcMethod::GrahamAxes).unwrap();
        let mut rnd = rnd_stream(31);
        for _ in 0..100_000 {
            let (x, y, z) = (rnd(), rnd(), rnd());
            let e = trilinear_eval(&env, x, y, z).unwrap();
            let m = trilinear_eval(&merged, x, y, z).unwrap();
            let exact = g_tri(x, y, z);
            assert!(e <= m + 1e-15 && m <= exact);
        }
        for i in 0..=40 {
            let x = i as f64 / 40.0;
            let d = rigorous_diag_bound(&env, x).unwrap();
            assert!(d <= g_diag_closed(x) + 1e-12);
        }
    }
}
