//! Sampling vectors and states of bounded Schmidt rank, and see-saw search
//! for block-positivity violations.
//!
//! A vector with `SR(ξ) ≤ (p,q,r)` is written in Tucker form
//! `ξ = Σ c_{xyz} U_x ⊗ V_y ⊗ W_z` with factor matrices `U (a x p)`,
//! `V (b x q)`, `W (c x r)` and a core `c`. The search minimizes the Rayleigh
//! quotient `<ξ|H|ξ> / <ξ|ξ>` one block at a time; `ξ` is linear in each
//! block, so every update is an exact generalized eigenproblem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::choi::ensure_hermitian_operator;
use crate::error::{Error, Result};
use crate::linalg::{min_gen_eig, orthonormalize, random_gaussian, random_isometry, CMat, Tolerance, C64, ZERO};
use crate::schmidt::PosTriple;
use crate::tensor::{TriDims, TriOperator, TriVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub convergence_eps: f64,
    pub seed: u64,
}

impl SeesawConfig {
    pub fn new(restarts: usize, max_sweeps: usize, convergence_eps: f64, seed: u64) -> Result<Self> {
        if restarts == 0 || max_sweeps == 0 {
            return Err(Error::InvalidInput("restarts and max_sweeps must be at least 1".into()));
        }
        if !(convergence_eps > 0.0) || !convergence_eps.is_finite() {
            return Err(Error::NonPositive(convergence_eps));
        }
        Ok(Self {
            restarts,
            max_sweeps,
            convergence_eps,
            seed,
        })
    }
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_sweeps: 200,
            convergence_eps: 1e-10,
            seed: 0,
        }
    }
}

/// A unit vector of bounded Schmidt rank on which `H` is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationCertificate {
    pub xi: TriVector,
    /// `<ξ|H|ξ>`.
    pub value: f64,
    pub target: PosTriple,
}

impl ViolationCertificate {
    /// `|ξ̄><ξ̄|`, the state whose pairing with the map of Choi matrix `H` is `value`.
    pub fn state(&self) -> TriOperator {
        self.xi.conj().projector()
    }

    /// Re-checks Schmidt rank, norm and value against `h`.
    pub fn verify(&self, h: &TriOperator, tol: &Tolerance) -> bool {
        let scale = h.mat().frobenius_norm().max(1.0);
        crate::schmidt::sr_leq(&self.xi, self.target, tol)
            && (self.xi.norm() - 1.0).abs() <= 1e-9
            && (rayleigh(h.mat(), self.xi.data()) - self.value).abs() <= 1e-9 * scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Violation(ViolationCertificate),
    /// No violation found. Not a proof of block positivity.
    NotFound { best_value: f64, best_xi: TriVector },
}

impl SearchOutcome {
    pub fn best_value(&self) -> f64 {
        match self {
            SearchOutcome::Violation(c) => c.value,
            SearchOutcome::NotFound { best_value, .. } => *best_value,
        }
    }
}

fn check_fits(dims: TriDims, t: PosTriple) -> Result<()> {
    if !t.fits(dims) {
        return Err(Error::DimMismatch(format!("Schmidt bound {t} exceeds dims {dims}")));
    }
    Ok(())
}

/// `ξ[i,k,m] = Σ c[x,y,z] U[i,x] V[k,y] W[m,z]` with the core flattened as `(x*q + y)*r + z`.
fn tucker(u: &CMat, v: &CMat, w: &CMat, core: &[C64], dims: TriDims) -> Vec<C64> {
    let (p, q, r) = (u.cols(), v.cols(), w.cols());
    // contract mode C, then B, then A
    let mut t1 = vec![ZERO; p * q * dims.c];
    for xy in 0..p * q {
        for m in 0..dims.c {
            t1[xy * dims.c + m] = (0..r).map(|z| core[xy * r + z] * w[(m, z)]).sum();
        }
    }
    let mut t2 = vec![ZERO; p * dims.b * dims.c];
    for x in 0..p {
        for k in 0..dims.b {
            for m in 0..dims.c {
                t2[(x * dims.b + k) * dims.c + m] = (0..q).map(|y| v[(k, y)] * t1[(x * q + y) * dims.c + m]).sum();
            }
        }
    }
    let bc = dims.b * dims.c;
    let mut out = vec![ZERO; dims.total()];
    for i in 0..dims.a {
        for km in 0..bc {
            out[i * bc + km] = (0..p).map(|x| u[(i, x)] * t2[x * bc + km]).sum();
        }
    }
    out
}

/// Draws random orthonormal factors and a Gaussian core; `sr_leq(ξ, t)` holds by construction.
pub fn sample_sr_vector<R: Rng + ?Sized>(dims: TriDims, t: PosTriple, rng: &mut R) -> Result<TriVector> {
    check_fits(dims, t)?;
    let [p, q, r] = t.as_array();
    loop {
        let u = random_isometry(dims.a, p, rng);
        let v = random_isometry(dims.b, q, rng);
        let w = random_isometry(dims.c, r, rng);
        let core = random_gaussian(p * q * r, 1, rng).into_data();
        let xi = TriVector::new(dims, tucker(&u, &v, &w, &core, dims))?;
        if let Ok(unit) = xi.normalized() {
            return Ok(unit);
        }
    }
}

/// Unit-trace mixture of `n_terms` projectors onto sampled vectors, so `SN ≤ t`.
pub fn sample_state<R: Rng + ?Sized>(dims: TriDims, t: PosTriple, n_terms: usize, rng: &mut R) -> Result<TriOperator> {
    if n_terms == 0 {
        return Err(Error::InvalidInput("n_terms must be at least 1".into()));
    }
    let n = dims.total();
    let mut acc = CMat::zeros(n, n);
    for _ in 0..n_terms {
        let xi = sample_sr_vector(dims, t, rng)?;
        let weight: f64 = rng.random_range(0.1..1.0);
        acc = &acc + &CMat::outer(xi.data(), xi.data()).scale_real(weight);
    }
    let tr = acc.trace().re;
    TriOperator::new(dims, acc.scale_real(1.0 / tr))
}

fn rayleigh(h: &CMat, xi: &[C64]) -> f64 {
    let nn: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
    h.quadratic_form(xi).re / nn
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    A,
    B,
    C,
    Core,
}

struct Tucker {
    dims: TriDims,
    u: CMat,
    v: CMat,
    w: CMat,
    core: Vec<C64>,
}

impl Tucker {
    fn random<R: Rng + ?Sized>(dims: TriDims, t: PosTriple, rng: &mut R) -> Self {
        let [p, q, r] = t.as_array();
        Self {
            dims,
            u: random_gaussian(dims.a, p, rng),
            v: random_gaussian(dims.b, q, rng),
            w: random_gaussian(dims.c, r, rng),
            core: random_gaussian(p * q * r, 1, rng).into_data(),
        }
    }

    fn vector(&self) -> Vec<C64> {
        tucker(&self.u, &self.v, &self.w, &self.core, self.dims)
    }

    fn block_len(&self, block: Block) -> usize {
        match block {
            Block::A => self.u.rows() * self.u.cols(),
            Block::B => self.v.rows() * self.v.cols(),
            Block::C => self.w.rows() * self.w.cols(),
            Block::Core => self.core.len(),
        }
    }

    fn set_block(&mut self, block: Block, x: &[C64]) {
        match block {
            Block::A => self.u = CMat::new(self.u.rows(), self.u.cols(), x.to_vec()).expect("shape"),
            Block::B => self.v = CMat::new(self.v.rows(), self.v.cols(), x.to_vec()).expect("shape"),
            Block::C => self.w = CMat::new(self.w.rows(), self.w.cols(), x.to_vec()).expect("shape"),
            Block::Core => self.core = x.to_vec(),
        }
    }

    /// Columns are `ξ` evaluated with the block set to each unit basis element.
    fn design(&self, block: Block) -> CMat {
        let n = self.block_len(block);
        let cols: Vec<Vec<C64>> = (0..n)
            .map(|e| {
                let mut probe = self.clone_shallow();
                let mut x = vec![ZERO; n];
                x[e] = C64::new(1.0, 0.0);
                probe.set_block(block, &x);
                probe.vector()
            })
            .collect();
        CMat::from_columns(self.dims.total(), &cols)
    }

    fn clone_shallow(&self) -> Self {
        Self {
            dims: self.dims,
            u: self.u.clone(),
            v: self.v.clone(),
            w: self.w.clone(),
            core: self.core.clone(),
        }
    }

    fn rerandomize<R: Rng + ?Sized>(&mut self, block: Block, rng: &mut R) {
        let n = self.block_len(block);
        let x = random_gaussian(n, 1, rng).into_data();
        self.set_block(block, &x);
    }

    /// Moves the triangular factors of the QR decompositions into the core; `ξ` is unchanged.
    fn orthonormalize_factors(&mut self) {
        let (p, q, r) = (self.u.cols(), self.v.cols(), self.w.cols());
        let (qu, ru) = orthonormalize(&self.u);
        let (qv, rv) = orthonormalize(&self.v);
        let (qw, rw) = orthonormalize(&self.w);
        let mut core = vec![ZERO; p * q * r];
        for x in 0..p {
            for y in 0..q {
                for z in 0..r {
                    let mut acc = ZERO;
                    for x0 in x..p {
                        for y0 in y..q {
                            for z0 in z..r {
                                acc += ru[(x, x0)] * rv[(y, y0)] * rw[(z, z0)] * self.core[(x0 * q + y0) * r + z0];
                            }
                        }
                    }
                    core[(x * q + y) * r + z] = acc;
                }
            }
        }
        self.u = qu;
        self.v = qv;
        self.w = qw;
        self.core = core;
    }
}

/// Outcome of a single see-saw run.
#[derive(Debug, Clone)]
pub struct RestartRun {
    pub value: f64,
    pub xi: TriVector,
    /// Objective after every successful block update.
    pub history: Vec<f64>,
    pub sweeps: usize,
}

/// One see-saw run from the deterministic seed `cfg.seed + restart`.
pub fn seesaw_restart(h: &TriOperator, t: PosTriple, cfg: &SeesawConfig, restart: usize, tol: &Tolerance) -> Result<RestartRun> {
    let dims = h.dims();
    check_fits(dims, t)?;
    let hm = h.mat();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let mut state = Tucker::random(dims, t, &mut rng);
    let mut history = Vec::new();
    let mut prev = f64::INFINITY;
    let mut sweeps = 0;
    for _ in 0..cfg.max_sweeps {
        sweeps += 1;
        for block in [Block::A, Block::B, Block::C, Block::Core] {
            let l = state.design(block);
            let lh = l.adjoint();
            let a = (&(&lh * hm) * &l).hermitian_part();
            let b = (&lh * &l).hermitian_part();
            match min_gen_eig(&a, &b, tol) {
                Ok(sol) => {
                    state.set_block(block, &sol.vector);
                    history.push(sol.value);
                }
                Err(Error::DegeneratePencil) => state.rerandomize(block, &mut rng),
                Err(e) => return Err(e),
            }
        }
        state.orthonormalize_factors();
        let current = history.last().copied().unwrap_or(f64::INFINITY);
        if prev - current < cfg.convergence_eps {
            break;
        }
        prev = current;
    }
    let xi = TriVector::new(dims, state.vector())?.normalized()?;
    let value = rayleigh(hm, xi.data());
    Ok(RestartRun {
        value,
        xi,
        history,
        sweeps,
    })
}

/// Minimizes `<ξ|H|ξ>` over unit `ξ` with `SR(ξ) ≤ t`, over `cfg.restarts` independent runs.
pub fn violation_search(h: &TriOperator, t: PosTriple, cfg: &SeesawConfig, tol: &Tolerance) -> Result<SearchOutcome> {
    ensure_hermitian_operator(h, tol)?;
    check_fits(h.dims(), t)?;
    let runs: Vec<Result<RestartRun>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| seesaw_restart(h, t, cfg, k, tol))
        .collect();
    let mut best: Option<RestartRun> = None;
    for run in runs {
        let run = run?;
        // ties resolve to the lowest restart index
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    if best.value < -tol.ineq_abs * h.mat().frobenius_norm() {
        Ok(SearchOutcome::Violation(ViolationCertificate {
            xi: best.xi,
            value: best.value,
            target: t,
        }))
    } else {
        Ok(SearchOutcome::NotFound {
            best_value: best.value,
            best_xi: best.xi,
        })
    }
}
