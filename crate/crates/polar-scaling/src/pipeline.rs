//! Batch orchestration: configuration, mesh caching, the five commands
//! (classic / envelope / mu / mono-only / verify), and serializable reports.
//!
//! Meshes are expensive to build and fully determined by `(kind, n, tol)`,
//! so every build goes through an on-disk cache keyed by those parameters.
//! The commands differ only in which diagonal lower bound feeds the
//! two-state power iteration:
//!
//! - `classic`  — no diagonal at all (single-function iteration, μ ≈ 4.695);
//! - `envelope` — the non-rigorous tri-convex envelope of raw `g` samples;
//! - `mono-only` — the certified monotone-shift array without
//!   convexification (μ ≈ 4.664);
//! - `mu` — the certified merged-and-convexified envelope (μ ≈ 4.621), or
//!   any other diagonal selected through [`DiagMode`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{bhattacharyya, canonicalize, make_bsc, parallel, serial, BscAtom, BscMix};
use crate::envelope::{
    init_mesh, read_mesh, tc_converge, trilinear_eval, write_mesh, Mesh3, MeshKind, TcMethod,
    CACHE_VERSION,
};
use crate::power::{classic_iterate, twostate_iterate, EigenReport, Grid1, Scheme};
use crate::rigor::{
    build_g_monotone, build_g_smooth, g_tri_interval, merge_better, rigorous_diag_bound, Interval,
};
use crate::scalar::{classic_bounds, f_serial, g_diag_closed, g_tri, g_tri_bsc};
use crate::{Error, Result};

/// Which diagonal lower bound the two-state iteration uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagMode {
    /// The classic serial lower bound `x√(2−x²)` (degenerates to the
    /// single-function result).
    Classic,
    /// The closed form `x(1 + √(5−4x))/2` — the non-rigorous limit of the
    /// method as the mesh resolution grows.
    ClosedForm,
    /// Tri-convex envelope of raw `g` samples (not a certified bound).
    Envelope,
    /// Certified envelope built from interval arithmetic (the headline
    /// rigorous result).
    RigorousEnvelope,
}

/// Everything a pipeline run needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Mesh resolution (the cube has `(n+1)³` nodes).
    pub n: usize,
    /// 1-D grid size (the grid has `ell+1` nodes).
    pub ell: usize,
    pub scheme: Scheme,
    pub diag: DiagMode,
    /// Per-pass convergence tolerance for the convexifier.
    pub tol_envelope: f64,
    /// Sup-norm convergence tolerance for the power iteration.
    pub tol_iter: f64,
    pub max_iter: usize,
    pub cache_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            n: 200,
            ell: 1_000_000,
            scheme: Scheme::Chebyshev,
            diag: DiagMode::RigorousEnvelope,
            tol_envelope: 1e-13,
            tol_iter: 1e-15,
            max_iter: 50_000,
            cache_dir: PathBuf::from("./mesh-cache"),
        }
    }
}

impl PipelineConfig {
    /// Small sizes for interactive runs: n = 100, ℓ = 10⁴.
    pub fn desk() -> Self {
        Self {
            n: 100,
            ell: 10_000,
            ..Self::default()
        }
    }

    /// Full production sizes: n = 200, ℓ = 10⁶.
    pub fn paper() -> Self {
        Self::default()
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(Self::desk()),
            "paper" => Ok(Self::paper()),
            other => Err(Error::Domain(format!("unknown preset '{other}'"))),
        }
    }
}

/// Result of one pipeline command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub mode: String,
    pub n: Option<usize>,
    pub ell: usize,
    pub scheme: Scheme,
    pub lambda_s: Option<f64>,
    pub lambda_p: Option<f64>,
    pub lambda: f64,
    pub mu_upper: f64,
    pub iterations: usize,
    pub final_delta: f64,
    pub cache_hits: usize,
    pub stage_seconds: BTreeMap<String, f64>,
}

impl PipelineReport {
    fn new(
        mode: &str,
        cfg: &PipelineConfig,
        n: Option<usize>,
        eig: &EigenReport,
        two_state: bool,
        cache_hits: usize,
        stage_seconds: BTreeMap<String, f64>,
    ) -> Self {
        Self {
            mode: mode.to_string(),
            n,
            ell: cfg.ell,
            scheme: cfg.scheme,
            lambda_s: two_state.then_some(eig.lambda_s),
            lambda_p: two_state.then_some(eig.lambda_p),
            lambda: eig.lambda,
            mu_upper: eig.mu_upper,
            iterations: eig.iterations,
            final_delta: eig.final_delta,
            cache_hits,
            stage_seconds,
        }
    }

    /// Two-line CSV (header + row) with stage timings flattened out.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.17e}"));
        let optn = |v: Option<usize>| v.map_or(String::new(), |x| x.to_string());
        let mut header = String::from(
            "mode,n,ell,scheme,lambda_s,lambda_p,lambda,mu_upper,iterations,final_delta,cache_hits",
        );
        let mut row = format!(
            "{},{},{},{:?},{},{},{:.17e},{:.17e},{},{:.3e},{}",
            self.mode,
            optn(self.n),
            self.ell,
            self.scheme,
            opt(self.lambda_s),
            opt(self.lambda_p),
            self.lambda,
            self.mu_upper,
            self.iterations,
            self.final_delta,
            self.cache_hits,
        );
        for (k, v) in &self.stage_seconds {
            header.push_str(&format!(",seconds_{k}"));
            row.push_str(&format!(",{v:.3}"));
        }
        header.push('\n');
        header.push_str(&row);
        header.push('\n');
        header
    }
}

/// A report plus the converged eigenfunction(s) for dumping or plotting.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: PipelineReport,
    /// Serial-state score function (the only one in classic mode).
    pub phi_s: Grid1,
    /// Parallel-state score function (two-state modes only).
    pub phi_p: Option<Grid1>,
}

fn cache_path(dir: &Path, kind: MeshKind, n: usize, tol: f64) -> PathBuf {
    dir.join(format!(
        "{}-n{}-tol{:e}-v{}.mesh3",
        kind.as_str(),
        n,
        tol,
        CACHE_VERSION
    ))
}

/// Loads a mesh from the cache or builds it (recursively building its
/// inputs), writing every fresh build back. Returns the mesh and whether it
/// was a cache hit.
pub fn ensure_mesh(cfg: &PipelineConfig, kind: MeshKind) -> Result<(Mesh3, bool)> {
    let path = cache_path(&cfg.cache_dir, kind, cfg.n, cfg.tol_envelope);
    if path.is_file() {
        match read_mesh(&path) {
            Ok((m, h)) if h.n == cfg.n && h.kind == kind => return Ok((m, true)),
            // A stale or corrupt file is rebuilt, not a fatal error.
            _ => {}
        }
    }
    let mesh = match kind {
        MeshKind::G => init_mesh(cfg.n, g_tri)?,
        MeshKind::Genv => {
            let (raw, _) = ensure_mesh(cfg, MeshKind::G)?;
            tc_converge(raw, cfg.tol_envelope, TcMethod::GrahamAxes)?
        }
        MeshKind::Gmono => build_g_monotone(cfg.n)?,
        MeshKind::Gsmooth => build_g_smooth(cfg.n)?,
        MeshKind::Gmerged => {
            let (gm, _) = ensure_mesh(cfg, MeshKind::Gmono)?;
            let (gs, _) = ensure_mesh(cfg, MeshKind::Gsmooth)?;
            merge_better(&gm, &gs)?
        }
        MeshKind::GenvRig => {
            let (merged, _) = ensure_mesh(cfg, MeshKind::Gmerged)?;
            tc_converge(merged, cfg.tol_envelope, TcMethod::GrahamAxes)?
        }
    };
    write_mesh(&path, &mesh, kind, cfg.tol_envelope)?;
    Ok((mesh, false))
}

/// Classic single-function iteration (no mesh, no diagonal).
pub fn cmd_classic(cfg: &PipelineConfig) -> Result<RunOutcome> {
    let t0 = Instant::now();
    let nodes = crate::power::make_grid(cfg.ell, cfg.scheme)?;
    let (phi, eig) = classic_iterate(nodes, cfg.scheme, cfg.tol_iter, cfg.max_iter)?;
    let mut secs = BTreeMap::new();
    secs.insert("iterate".into(), t0.elapsed().as_secs_f64());
    Ok(RunOutcome {
        report: PipelineReport::new("classic", cfg, None, &eig, false, 0, secs),
        phi_s: phi,
        phi_p: None,
    })
}

/// Every mesh diagonal is clamped from below by the always-valid classic
/// serial bound; without this, mesh slack near x = 1 (where the trilinear
/// diagonal dips under the curve) poisons the fixed point.
fn clamped_mesh_diag(mesh: Mesh3) -> impl Fn(f64) -> f64 + Sync {
    move |x: f64| {
        let lo = classic_bounds(x).0;
        trilinear_eval(&mesh, x.sqrt(), x.sqrt(), x)
            .map_or(lo, |v| v.max(lo))
    }
}

fn run_two_state<D>(
    mode: &str,
    cfg: &PipelineConfig,
    n: Option<usize>,
    diag: D,
    cache_hits: usize,
    mut secs: BTreeMap<String, f64>,
) -> Result<RunOutcome>
where
    D: Fn(f64) -> f64 + Sync,
{
    let t0 = Instant::now();
    let nodes = crate::power::make_grid(cfg.ell, cfg.scheme)?;
    let (phi_s, phi_p, eig) =
        twostate_iterate(nodes, cfg.scheme, diag, cfg.tol_iter, cfg.max_iter)?;
    secs.insert("iterate".into(), t0.elapsed().as_secs_f64());
    Ok(RunOutcome {
        report: PipelineReport::new(mode, cfg, n, &eig, true, cache_hits, secs),
        phi_s,
        phi_p: Some(phi_p),
    })
}

/// Two-state iteration with the non-rigorous tri-convex envelope diagonal.
pub fn cmd_envelope(cfg: &PipelineConfig) -> Result<RunOutcome> {
    let t0 = Instant::now();
    let (env, hit) = ensure_mesh(cfg, MeshKind::Genv)?;
    let mut secs = BTreeMap::new();
    secs.insert("mesh".into(), t0.elapsed().as_secs_f64());
    run_two_state(
        "envelope",
        cfg,
        Some(cfg.n),
        clamped_mesh_diag(env),
        hit as usize,
        secs,
    )
}

/// Two-state iteration with the certified monotone-shift array, deliberately
/// left un-convexified: it is a valid bound on its own, and convexifying it
/// alone (without the smoothness correction) propagates its edge slack
/// across the cube and weakens the result.
pub fn cmd_mono_only(cfg: &PipelineConfig) -> Result<RunOutcome> {
    let t0 = Instant::now();
    let (gm, hit) = ensure_mesh(cfg, MeshKind::Gmono)?;
    let mut secs = BTreeMap::new();
    secs.insert("mesh".into(), t0.elapsed().as_secs_f64());
    run_two_state(
        "mono-only",
        cfg,
        Some(cfg.n),
        clamped_mesh_diag(gm),
        hit as usize,
        secs,
    )
}

/// The main command: two-state iteration with the diagonal selected by
/// `cfg.diag` (certified envelope by default).
pub fn cmd_mu(cfg: &PipelineConfig) -> Result<RunOutcome> {
    match cfg.diag {
        DiagMode::Classic => run_two_state(
            "mu",
            cfg,
            None,
            |x| classic_bounds(x).0,
            0,
            BTreeMap::new(),
        ),
        DiagMode::ClosedForm => {
            run_two_state("mu", cfg, None, g_diag_closed, 0, BTreeMap::new())
        }
        DiagMode::Envelope => {
            let t0 = Instant::now();
            let (env, hit) = ensure_mesh(cfg, MeshKind::Genv)?;
            let mut secs = BTreeMap::new();
            secs.insert("mesh".into(), t0.elapsed().as_secs_f64());
            run_two_state(
                "mu",
                cfg,
                Some(cfg.n),
                clamped_mesh_diag(env),
                hit as usize,
                secs,
            )
        }
        DiagMode::RigorousEnvelope => {
            let t0 = Instant::now();
            let (env, hit) = ensure_mesh(cfg, MeshKind::GenvRig)?;
            let mut secs = BTreeMap::new();
            secs.insert("mesh".into(), t0.elapsed().as_secs_f64());
            let diag = move |x: f64| {
                let lo = classic_bounds(x).0;
                rigorous_diag_bound(&env, x).map_or(lo, |v| v.max(lo))
            };
            run_two_state("mu", cfg, Some(cfg.n), diag, hit as usize, secs)
        }
    }
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

const MAX_COUNTEREXAMPLES: usize = 10;

/// Result of one randomized suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    /// Up to ten offending inputs, formatted for humans.
    pub counterexamples: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Aggregate of all suites.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

struct Suite {
    result: SuiteResult,
}

impl Suite {
    fn new(name: &str) -> Self {
        Self {
            result: SuiteResult {
                name: name.to_string(),
                checks: 0,
                failures: 0,
                counterexamples: Vec::new(),
            },
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.result.checks += 1;
        if !ok {
            self.result.failures += 1;
            if self.result.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.result.counterexamples.push(describe());
            }
        }
    }
}

fn random_mix(rng: &mut ChaCha8Rng, max_atoms: usize) -> BscMix {
    let k = rng.random_range(1..=max_atoms);
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0f64)).collect();
    let total: f64 = raw.iter().sum();
    let atoms = raw.into_iter().map(|w| BscAtom {
        weight: w / total,
        crossover: rng.random_range(0.0..=1.0f64),
    });
    canonicalize(atoms)
}

/// BSC whose Bhattacharyya parameter is `z`.
fn bsc_from_z(z: f64) -> Result<BscMix> {
    make_bsc((1.0 - (1.0 - z * z).max(0.0).sqrt()) / 2.0)
}

/// Runs the six randomized suites. Each draws its inputs from a ChaCha8
/// stream seeded from `seed`, so runs are reproducible. The small rigorous
/// meshes (resolution `verify_n`) are built through the cache like any
/// other mesh.
pub fn cmd_verify(cfg: &PipelineConfig, seed: u64, verify_n: usize) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suites = Vec::new();

    // 1. Z is multiplicative under the parallel combination.
    let mut s = Suite::new("parallel-z-multiplicative");
    for _ in 0..10_000 {
        let a = random_mix(&mut rng, 4);
        let b = random_mix(&mut rng, 4);
        let z = bhattacharyya(&parallel(&a, &b));
        let prod = bhattacharyya(&a) * bhattacharyya(&b);
        s.check((z - prod).abs() <= 1e-10, || {
            format!("Z(a∥b)={z} vs Z(a)Z(b)={prod}")
        });
    }
    suites.push(s.result);

    // 2. Closed forms agree with the exact channel algebra on BSC triples.
    let mut s = Suite::new("closed-forms-vs-oracle");
    for _ in 0..10_000 {
        let (p, q, r) = (
            rng.random_range(0.0..=1.0f64),
            rng.random_range(0.0..=1.0f64),
            rng.random_range(0.0..=1.0f64),
        );
        let (a, b, c) = (make_bsc(p)?, make_bsc(q)?, make_bsc(r)?);
        let zf = bhattacharyya(&serial(&a, &b));
        let ff = f_serial(bhattacharyya(&a), bhattacharyya(&b));
        s.check((zf - ff).abs() <= 1e-12, || {
            format!("f({p},{q}): {ff} vs oracle {zf}")
        });
        let zg = bhattacharyya(&serial(&parallel(&a, &b), &c));
        let gg = g_tri_bsc(p, q, r);
        s.check((zg - gg).abs() <= 1e-12, || {
            format!("g({p},{q},{r}): {gg} vs oracle {zg}")
        });
    }
    for _ in 0..10_000 {
        let x = rng.random_range(0.0..=1.0f64);
        let (lhs, rhs) = (g_diag_closed(x), g_tri(x.sqrt(), x.sqrt(), x));
        s.check((lhs - rhs).abs() <= 1e-12, || {
            format!("diag({x}): {lhs} vs {rhs}")
        });
    }
    suites.push(s.result);

    // 3. The serial sandwich holds for arbitrary mixtures.
    let mut s = Suite::new("serial-sandwich");
    for _ in 0..10_000 {
        let w = random_mix(&mut rng, 4);
        let x = bhattacharyya(&w);
        let z = bhattacharyya(&serial(&w, &w));
        let (lo, hi, _) = classic_bounds(x);
        s.check(z >= lo - 1e-12 && z <= hi + 1e-12, || {
            format!("Z(W⋆W)={z} outside [{lo},{hi}] at x={x}")
        });
    }
    suites.push(s.result);

    // 4. The certified diagonal never exceeds the exact BSC diagonal.
    let small = PipelineConfig {
        n: verify_n,
        ..cfg.clone()
    };
    let (env_rig, _) = ensure_mesh(&small, MeshKind::GenvRig)?;
    let mut s = Suite::new("rigorous-diagonal-vs-oracle");
    for _ in 0..10_000 {
        let x = rng.random_range(0.0..=1.0f64);
        let v = bsc_from_z(x.sqrt())?;
        let oracle = bhattacharyya(&serial(&parallel(&v, &v), &bsc_from_z(x)?));
        let bound = rigorous_diag_bound(&env_rig, x)?;
        s.check(bound <= oracle + 1e-12, || {
            format!("diag bound {bound} > oracle {oracle} at x={x}")
        });
    }
    suites.push(s.result);

    // 5. The certified envelope never exceeds g anywhere in the cube.
    let mut s = Suite::new("envelope-soundness");
    for _ in 0..10_000 {
        let (x, y, z) = (
            rng.random_range(0.0..=1.0f64),
            rng.random_range(0.0..=1.0f64),
            rng.random_range(0.0..=1.0f64),
        );
        let env = trilinear_eval(&env_rig, x, y, z)?;
        let exact = g_tri(x, y, z);
        s.check(env <= exact + 1e-12, || {
            format!("envelope {env} > g {exact} at ({x},{y},{z})")
        });
    }
    suites.push(s.result);

    // 6. Interval evaluation contains the point evaluation.
    let mut s = Suite::new("interval-containment");
    for _ in 0..10_000 {
        let draw = |rng: &mut ChaCha8Rng| {
            let a = rng.random_range(0.0..=1.0f64);
            let b = (a + rng.random_range(0.0..0.05f64)).min(1.0);
            (Interval::new(a, b).unwrap(), rng.random_range(a..=b))
        };
        let (ix, px) = draw(&mut rng);
        let (iy, py) = draw(&mut rng);
        let (iz, pz) = draw(&mut rng);
        let enc = g_tri_interval(ix, iy, iz);
        let exact = g_tri(px, py, pz);
        s.check(enc.contains(exact), || {
            format!(
                "g({px},{py},{pz})={exact} outside [{},{}]",
                enc.lo, enc.hi
            )
        });
    }
    suites.push(s.result);

    Ok(VerifyReport { seed, suites })
}
