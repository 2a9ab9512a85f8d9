//! The anti-diagonal family of three-qubit witnesses.
//!
//! A member is fixed by nonnegative `s, t ∈ R^4` and complex `u ∈ C^4`; its
//! Choi matrix has diagonal `(s1,s2,s3,s4,t4,t3,t2,t1)` and anti-diagonal
//! `(u1,u2,u3,u4,ū4,ū3,ū2,ū1)`. Every positivity class of the family has a
//! closed-form test except `(1,1,1)`, which is checked one-sidedly.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::choi::{pair, BiLinearMap};
use crate::error::{Error, Result};
use crate::linalg::{CMat, Tolerance, C64, ZERO};
use crate::schmidt::PosTriple;
use crate::tensor::{TriDims, TriOperator, TriVector};

/// Diagonal positions of `s_i` and `t_i`; `u_i` sits at `(i, 7 - i)`.
const DIAG_S: [usize; 4] = [0, 1, 2, 3];
const DIAG_T: [usize; 4] = [7, 6, 5, 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitWitnessParams {
    s: [f64; 4],
    t: [f64; 4],
    u: [C64; 4],
}

impl QubitWitnessParams {
    pub fn new(s: [f64; 4], t: [f64; 4], u: [C64; 4]) -> Result<Self> {
        for (name, vals) in [("s", &s), ("t", &t)] {
            if let Some(bad) = vals.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::InvalidInput(format!("{name} entries must be finite and nonnegative, got {bad}")));
            }
        }
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("u entries must be finite".into()));
        }
        Ok(Self { s, t, u })
    }

    pub fn s(&self) -> [f64; 4] {
        self.s
    }

    pub fn t(&self) -> [f64; 4] {
        self.t
    }

    pub fn u(&self) -> [C64; 4] {
        self.u
    }

    /// `√(s_i t_i)` for each `i`.
    pub fn root_products(&self) -> [f64; 4] {
        std::array::from_fn(|i| (self.s[i] * self.t[i]).sqrt())
    }

    pub fn u_abs(&self) -> [f64; 4] {
        self.u.map(|z| z.norm())
    }

    /// Reads the parameters back from a Choi matrix of the family shape.
    ///
    /// Entries off the diagonal and anti-diagonal, imaginary parts of the
    /// diagonal, and the Hermitian mismatch of the anti-diagonal must all be
    /// within `psd_abs * ||C||_F`.
    pub fn from_choi(phi: &BiLinearMap, tol: &Tolerance) -> Result<Self> {
        if phi.dims() != TriDims::qubits() {
            return Err(Error::DimMismatch(format!("family maps act on qubits, got {}", phi.dims())));
        }
        let c = phi.choi_mat();
        let allowed = tol.psd_abs * c.frobenius_norm().max(1.0);
        for p in 0..8 {
            for q in 0..8 {
                if p != q && p + q != 7 && c[(p, q)].norm() > allowed {
                    return Err(Error::InvalidInput(format!(
                        "entry ({p},{q}) is outside the diagonal/anti-diagonal pattern"
                    )));
                }
            }
            if c[(p, p)].im.abs() > allowed {
                return Err(Error::NotHermitian {
                    asymmetry: c[(p, p)].im.abs(),
                    allowed,
                });
            }
        }
        for i in 0..4 {
            let mismatch = (c[(7 - i, i)] - c[(i, 7 - i)].conj()).norm();
            if mismatch > allowed {
                return Err(Error::NotHermitian {
                    asymmetry: mismatch,
                    allowed,
                });
            }
        }
        let clamp = |x: f64| if x < 0.0 && x > -allowed { 0.0 } else { x };
        let s = DIAG_S.map(|p| clamp(c[(p, p)].re));
        let t = DIAG_T.map(|p| clamp(c[(p, p)].re));
        let u = std::array::from_fn(|i| c[(i, 7 - i)]);
        Self::new(s, t, u)
    }
}

impl fmt::Display for QubitWitnessParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s={:?} t={:?} u=[", self.s, self.t)?;
        for (i, z) in self.u.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{:+}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}

pub fn family_choi(p: &QubitWitnessParams) -> BiLinearMap {
    let mut m = CMat::zeros(8, 8);
    for i in 0..4 {
        m[(DIAG_S[i], DIAG_S[i])] = C64::new(p.s[i], 0.0);
        m[(DIAG_T[i], DIAG_T[i])] = C64::new(p.t[i], 0.0);
        m[(i, 7 - i)] = p.u[i];
        m[(7 - i, i)] = p.u[i].conj();
    }
    let op = TriOperator::new(TriDims::qubits(), m).expect("8x8 matches qubit dims");
    BiLinearMap::from_choi(op)
}

/// `(2,2,2)`-positivity, i.e. positivity of the Choi matrix: `√(s_i t_i) ≥ |u_i|` for all `i`.
pub fn check_222(p: &QubitWitnessParams, tol: &Tolerance) -> bool {
    first_failed_index(p, tol).is_none()
}

fn first_failed_index(p: &QubitWitnessParams, tol: &Tolerance) -> Option<usize> {
    let (r, a) = (p.root_products(), p.u_abs());
    (0..4).find(|&i| r[i] < a[i] - tol.ineq_abs)
}

/// `√(s_i t_i) + √(s_j t_j) ≥ |u_i| + |u_j|` with 1-based indices.
pub fn pair_inequality(p: &QubitWitnessParams, i: usize, j: usize, tol: &Tolerance) -> bool {
    assert!((1..=4).contains(&i) && (1..=4).contains(&j), "pair indices are 1-based in 1..=4");
    let (r, a) = (p.root_products(), p.u_abs());
    r[i - 1] + r[j - 1] >= a[i - 1] + a[j - 1] - tol.ineq_abs
}

/// The three classes of `Σ_{2,2,2}` strictly between `(1,1,1)` and `(2,2,2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairClass {
    /// `(1,2,2)`: A against BC.
    A,
    /// `(2,1,2)`: B against CA.
    B,
    /// `(2,2,1)`: C against AB.
    C,
}

impl PairClass {
    pub const ALL: [PairClass; 3] = [PairClass::A, PairClass::B, PairClass::C];

    /// The two index pairs (1-based) whose inequalities characterize the class.
    pub fn pairs(self) -> [(usize, usize); 2] {
        match self {
            PairClass::A => [(1, 4), (2, 3)],
            PairClass::B => [(1, 3), (2, 4)],
            PairClass::C => [(1, 2), (3, 4)],
        }
    }

    pub fn triple(self) -> PosTriple {
        let t = match self {
            PairClass::A => [1, 2, 2],
            PairClass::B => [2, 1, 2],
            PairClass::C => [2, 2, 1],
        };
        PosTriple::from_array(t).expect("positive")
    }

    pub fn from_triple(t: PosTriple) -> Option<Self> {
        match t.as_array() {
            [1, 2, 2] => Some(PairClass::A),
            [2, 1, 2] => Some(PairClass::B),
            [2, 2, 1] => Some(PairClass::C),
            _ => None,
        }
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.triple())
    }
}

pub fn check_pair_class(p: &QubitWitnessParams, class: PairClass, tol: &Tolerance) -> bool {
    first_failed_pair(p, class, tol).is_none()
}

fn first_failed_pair(p: &QubitWitnessParams, class: PairClass, tol: &Tolerance) -> Option<(usize, usize)> {
    class.pairs().into_iter().find(|&(i, j)| !pair_inequality(p, i, j, tol))
}

/// All six pair inequalities hold: the map pairs nonnegatively with every
/// bi-separable state, so a negative pairing certifies genuine entanglement.
pub fn is_biseparability_witness(p: &QubitWitnessParams, tol: &Tolerance) -> bool {
    (1..=4).all(|i| (i + 1..=4).all(|j| pair_inequality(p, i, j, tol)))
}

/// `Σ √(s_i t_i) ≥ Σ |u_i|`, which implies `(1,1,1)`-positivity.
pub fn sufficient_111(p: &QubitWitnessParams, tol: &Tolerance) -> bool {
    p.root_products().iter().sum::<f64>() >= p.u_abs().iter().sum::<f64>() - tol.ineq_abs
}

/// Polar grid for the `(1,1,1)` scan over `α = r e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub radii: usize,
    pub angles: usize,
}

impl Grid {
    pub const R_MIN: f64 = 1e-3;
    pub const R_MAX: f64 = 1e3;

    pub fn new(radii: usize, angles: usize) -> Result<Self> {
        if radii == 0 || angles == 0 {
            return Err(Error::InvalidInput("grid counts must be at least 1".into()));
        }
        Ok(Self { radii, angles })
    }

    fn log_radius(&self, k: usize) -> f64 {
        if self.radii == 1 {
            return 0.0;
        }
        let (lo, hi) = (Self::R_MIN.ln(), Self::R_MAX.ln());
        lo + (hi - lo) * k as f64 / (self.radii - 1) as f64
    }

    fn angle(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.angles as f64
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self { radii: 64, angles: 64 }
    }
}

/// The `(1,1,1)` inequality at `α`, divided by `|α|` so slacks at different
/// radii are comparable with the other closed-form tests. `α = 0` gives `+∞`.
///
/// `√((s1+t4 r²)(s4+t1 r²))/r + √((s2+t3 r²)(s3+t2 r²))/r − |u1 e^{-iφ}+ū4 e^{iφ}| − |u2 e^{-iφ}+ū3 e^{iφ}|`.
pub fn slack_111(p: &QubitWitnessParams, alpha: C64) -> f64 {
    let r = alpha.norm();
    if r == 0.0 {
        // both sides vanish at α = 0
        return f64::INFINITY;
    }
    slack_polar(p, r.ln(), alpha.arg())
}

fn slack_polar(p: &QubitWitnessParams, log_r: f64, phi: f64) -> f64 {
    let (s, t, u) = (p.s, p.t, p.u);
    let r = log_r.exp();
    let inv = 1.0 / r;
    let lhs = ((s[0] * inv + t[3] * r) * (s[3] * inv + t[0] * r)).sqrt()
        + ((s[1] * inv + t[2] * r) * (s[2] * inv + t[1] * r)).sqrt();
    let e = C64::from_polar(1.0, phi);
    let rhs = (u[0] * e.conj() + u[3].conj() * e).norm() + (u[1] * e.conj() + u[2].conj() * e).norm();
    lhs - rhs
}

/// Compass search in `(ln r, φ)` from a grid point; returns the best point found.
fn refine(p: &QubitWitnessParams, mut x: f64, mut y: f64, step0: (f64, f64)) -> (f64, f64, f64) {
    let mut best = slack_polar(p, x, y);
    let (mut hx, mut hy) = step0;
    let (lo, hi) = (Grid::R_MIN.ln() - 2.0, Grid::R_MAX.ln() + 2.0);
    for _ in 0..400 {
        if hx < 1e-12 && hy < 1e-12 {
            break;
        }
        let mut moved = false;
        for (dx, dy) in [(hx, 0.0), (-hx, 0.0), (0.0, hy), (0.0, -hy)] {
            let nx = (x + dx).clamp(lo, hi);
            let ny = y + dy;
            let v = slack_polar(p, nx, ny);
            if v < best {
                best = v;
                x = nx;
                y = ny;
                moved = true;
                break;
            }
        }
        if !moved {
            hx *= 0.5;
            hy *= 0.5;
        }
    }
    (best, x, y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certification111 {
    SufficientCondition,
    /// Dominated by a certified pair class.
    PairClass(PairClass),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check111 {
    Certified(Certification111),
    Refuted { alpha: C64, slack: f64 },
    /// No violation on the refined grid; not a proof.
    NumericallySupported { alpha: C64, min_slack: f64 },
}

pub fn check_111(p: &QubitWitnessParams, grid: Grid, tol: &Tolerance) -> Check111 {
    if sufficient_111(p, tol) {
        return Check111::Certified(Certification111::SufficientCondition);
    }
    if let Some(class) = PairClass::ALL.into_iter().find(|&c| check_pair_class(p, c, tol)) {
        return Check111::Certified(Certification111::PairClass(class));
    }
    let (alpha, slack) = min_slack_111(p, grid);
    if slack < -tol.ineq_abs {
        Check111::Refuted { alpha, slack }
    } else {
        Check111::NumericallySupported { alpha, min_slack: slack }
    }
}

/// Least normalized slack over the grid, each point refined by local descent.
pub fn min_slack_111(p: &QubitWitnessParams, grid: Grid) -> (C64, f64) {
    let dx = if grid.radii > 1 {
        (Grid::R_MAX.ln() - Grid::R_MIN.ln()) / (grid.radii - 1) as f64
    } else {
        1.0
    };
    let dy = 2.0 * PI / grid.angles as f64;
    let (slack, _, x, y) = (0..grid.radii * grid.angles)
        .into_par_iter()
        .map(|idx| {
            let (kr, ka) = (idx / grid.angles, idx % grid.angles);
            let (v, x, y) = refine(p, grid.log_radius(kr), grid.angle(ka), (dx, dy));
            (v, idx, x, y)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("grid is nonempty");
    (C64::from_polar(x.exp(), y), slack)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Refuted,
    NumericallySupported,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "certified",
            Verdict::Refuted => "refuted",
            Verdict::NumericallySupported => "numerically-supported",
        })
    }
}

/// Why a verdict was reached. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evidence {
    /// `√(s_i t_i) ≥ |u_i|` for every `i`.
    AllDiagonalBlocks,
    FailedIndex(usize),
    /// Both pair inequalities of the class hold.
    PairsHold([(usize, usize); 2]),
    FailedPair(usize, usize),
    SufficientCondition,
    DominatedBy(PairClass),
    ViolatingAlpha { alpha: C64, slack: f64 },
    MinimumSlack { alpha: C64, slack: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassResult {
    pub class: PosTriple,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    /// In the order `(2,2,2), (1,2,2), (2,1,2), (2,2,1), (1,1,1)`.
    pub classes: [ClassResult; 5],
    pub biseparability_witness: bool,
}

impl PositivityReport {
    pub fn get(&self, class: PosTriple) -> Option<&ClassResult> {
        self.classes.iter().find(|c| c.class == class)
    }

    pub fn verdict(&self, class: PosTriple) -> Option<Verdict> {
        self.get(class).map(|c| c.verdict)
    }

    /// Whether each class is certified, in report order.
    pub fn certified_pattern(&self) -> [bool; 5] {
        self.classes.map(|c| c.verdict == Verdict::Certified)
    }
}

pub fn classify(p: &QubitWitnessParams, grid: Grid, tol: &Tolerance) -> PositivityReport {
    let full = match first_failed_index(p, tol) {
        None => ClassResult {
            class: PosTriple::from_array([2, 2, 2]).expect("positive"),
            verdict: Verdict::Certified,
            evidence: Evidence::AllDiagonalBlocks,
        },
        Some(i) => ClassResult {
            class: PosTriple::from_array([2, 2, 2]).expect("positive"),
            verdict: Verdict::Refuted,
            evidence: Evidence::FailedIndex(i + 1),
        },
    };
    let pair_result = |class: PairClass| match first_failed_pair(p, class, tol) {
        None => ClassResult {
            class: class.triple(),
            verdict: Verdict::Certified,
            evidence: Evidence::PairsHold(class.pairs()),
        },
        Some((i, j)) => ClassResult {
            class: class.triple(),
            verdict: Verdict::Refuted,
            evidence: Evidence::FailedPair(i, j),
        },
    };
    let (verdict, evidence) = match check_111(p, grid, tol) {
        Check111::Certified(Certification111::SufficientCondition) => (Verdict::Certified, Evidence::SufficientCondition),
        Check111::Certified(Certification111::PairClass(c)) => (Verdict::Certified, Evidence::DominatedBy(c)),
        Check111::Refuted { alpha, slack } => (Verdict::Refuted, Evidence::ViolatingAlpha { alpha, slack }),
        Check111::NumericallySupported { alpha, min_slack } => (
            Verdict::NumericallySupported,
            Evidence::MinimumSlack { alpha, slack: min_slack },
        ),
    };
    PositivityReport {
        classes: [
            full,
            pair_result(PairClass::A),
            pair_result(PairClass::B),
            pair_result(PairClass::C),
            ClassResult {
                class: PosTriple::from_array([1, 1, 1]).expect("positive"),
                verdict,
                evidence,
            },
        ],
        biseparability_witness: is_biseparability_witness(p, tol),
    }
}

/// The genuine entanglement witness `W` with `s t = 1`.
pub fn genuine_witness(s: f64) -> Result<QubitWitnessParams> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::NonPositive(s));
    }
    let t = 1.0 / s;
    QubitWitnessParams::new(
        [0.0, s, s, s],
        [0.0, t, t, t],
        [C64::new(-1.0, 0.0), ZERO, ZERO, ZERO],
    )
}

/// `λ0|000> + λ1 e^{iθ}|100> + λ2|101> + λ3|110> + λ4|111>`, unnormalized.
pub fn ghz_vector(lambdas: [f64; 5], theta: f64) -> TriVector {
    let d = TriDims::qubits();
    let mut data = vec![ZERO; 8];
    data[0] = C64::new(lambdas[0], 0.0);
    data[4] = C64::from_polar(lambdas[1], theta);
    data[5] = C64::new(lambdas[2], 0.0);
    data[6] = C64::new(lambdas[3], 0.0);
    data[7] = C64::new(lambdas[4], 0.0);
    TriVector::new(d, data).expect("8 entries")
}

/// `t(λ1²+λ2²+λ3²) − 2 λ0 λ4` with `t = 1/s`.
pub fn ghz_closed_form(s: f64, lambdas: [f64; 5]) -> f64 {
    let t = 1.0 / s;
    t * (lambdas[1].powi(2) + lambdas[2].powi(2) + lambdas[3].powi(2)) - 2.0 * lambdas[0] * lambdas[4]
}

/// Pairing of the GHZ-type projector with `W`, computed through the Choi
/// matrix and checked against the closed form.
pub fn ghz_value(s: f64, lambdas: [f64; 5], theta: f64) -> Result<f64> {
    if lambdas.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::InvalidInput("lambdas must be finite and nonnegative".into()));
    }
    let w = family_choi(&genuine_witness(s)?);
    let rho = ghz_vector(lambdas, theta).projector();
    let value = pair(&rho, &w)?;
    let closed = ghz_closed_form(s, lambdas);
    let scale = 1.0 + (1.0 / s + 2.0) * lambdas.iter().map(|l| l * l).sum::<f64>();
    assert!(
        (value.re - closed).abs() <= 1e-10 * scale && value.im.abs() <= 1e-10 * scale,
        "GHZ pairing {value} disagrees with closed form {closed}"
    );
    Ok(value.re)
}

/// The 2x2 matrix `[[a + d|α|², ω ᾱ + z̄ α], [ω̄ α + z ᾱ, c + b|α|²]]`.
pub fn twisted_block(a: f64, b: f64, c: f64, d: f64, omega: C64, z: C64, alpha: C64) -> CMat {
    let r2 = alpha.norm_sqr();
    let off = omega * alpha.conj() + z.conj() * alpha;
    CMat::new(
        2,
        2,
        vec![C64::new(a + d * r2, 0.0), off, off.conj(), C64::new(c + b * r2, 0.0)],
    )
    .expect("2x2")
}

/// Least eigenvalue of [`twisted_block`], in closed form.
pub fn twisted_block_min_eigenvalue(a: f64, b: f64, c: f64, d: f64, omega: C64, z: C64, alpha: C64) -> f64 {
    let r2 = alpha.norm_sqr();
    let (p, q) = (a + d * r2, c + b * r2);
    let off = (omega * alpha.conj() + z.conj() * alpha).norm();
    0.5 * (p + q - ((p - q).powi(2) + 4.0 * off * off).sqrt())
}

/// `√(ab) + √(cd) − |ω| − |z|`.
pub fn twisted_block_slack(a: f64, b: f64, c: f64, d: f64, omega: C64, z: C64) -> f64 {
    (a * b).sqrt() + (c * d).sqrt() - omega.norm() - z.norm()
}

/// `α0 = (ac/bd)^{1/4} e^{iθ/2}` with `θ = arg(ωz)`; `None` when `bd = 0`.
pub fn twisted_block_extremal_alpha(a: f64, b: f64, c: f64, d: f64, omega: C64, z: C64) -> Option<C64> {
    if b * d == 0.0 {
        return None;
    }
    let theta = (omega * z).arg();
    Some(C64::from_polar((a * c / (b * d)).powf(0.25), theta / 2.0))
}
