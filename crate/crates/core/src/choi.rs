//! Bi-linear maps `M_A × M_B -> M_C` represented by their Choi matrices.
//!
//! With `C = Σ |i><j| ⊗ |k><ℓ| ⊗ φ(|i><j|, |k><ℓ|)`, the `c x c` block
//! `C_{(i,k),(j,ℓ)}` sits at rows `(i,k,·)` and columns `(j,ℓ,·)` of the flat
//! lexicographic layout. Everything else (evaluation, Kraus form, the derived
//! maps `E_φ` and `D_φ`) is read off that matrix.

use crate::error::{Error, Result};
use crate::linalg::{ensure_hermitian, hermitian_eig, CMat, Tolerance, C64, ZERO};
use crate::tensor::{Flip, Permutation3, TriDims, TriOperator};

/// A bi-linear map, stored as its Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BiLinearMap {
    choi: TriOperator,
}

impl BiLinearMap {
    pub fn from_choi(choi: TriOperator) -> Self {
        Self { choi }
    }

    /// Populates the Choi matrix from `f(i, j, k, ℓ) = φ(|i><j|, |k><ℓ|)`.
    pub fn from_fn(dims: TriDims, mut f: impl FnMut(usize, usize, usize, usize) -> CMat) -> Result<Self> {
        let n = dims.total();
        let mut mat = CMat::zeros(n, n);
        for i in 0..dims.a {
            for j in 0..dims.a {
                for k in 0..dims.b {
                    for l in 0..dims.b {
                        let block = f(i, j, k, l);
                        if block.shape() != (dims.c, dims.c) {
                            return Err(Error::DimMismatch(format!(
                                "map values must be {}x{}, got {:?}",
                                dims.c,
                                dims.c,
                                block.shape()
                            )));
                        }
                        for m in 0..dims.c {
                            for nn in 0..dims.c {
                                mat[(dims.flat(i, k, m), dims.flat(j, l, nn))] = block[(m, nn)];
                            }
                        }
                    }
                }
            }
        }
        Ok(Self {
            choi: TriOperator::new(dims, mat)?,
        })
    }

    /// The Hadamard (entrywise) product on `M_n`, whose Choi matrix is the
    /// projector onto the unnormalized vector `Σ_i |iii>`.
    pub fn hadamard(n: usize) -> Result<Self> {
        let dims = TriDims::new(n, n, n)?;
        Self::from_fn(dims, |i, j, k, l| {
            let mut out = CMat::zeros(n, n);
            if i == k && j == l {
                out[(i, j)] = C64::new(1.0, 0.0);
            }
            out
        })
    }

    pub fn zero(dims: TriDims) -> Self {
        Self {
            choi: TriOperator::zeros(dims),
        }
    }

    pub fn dims(&self) -> TriDims {
        self.choi.dims()
    }

    pub fn choi(&self) -> &TriOperator {
        &self.choi
    }

    pub fn choi_mat(&self) -> &CMat {
        self.choi.mat()
    }

    /// The block `C_{(i,k),(j,ℓ)} = φ(|i><j|, |k><ℓ|)`.
    pub fn block(&self, i: usize, k: usize, j: usize, l: usize) -> CMat {
        let d = self.dims();
        let m = self.choi.mat();
        CMat::from_fn(d.c, d.c, |r, s| m[(d.flat(i, k, r), d.flat(j, l, s))])
    }
}

/// Nonempty list of `c x ab` matrices `V_i` with `φ = Σ_i V_i (x ⊗ y) V_i*`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dims: TriDims,
    ops: Vec<CMat>,
}

impl KrausSet {
    pub fn dims(&self) -> TriDims {
        self.dims
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `Σ_i φ_{V_i}`.
    pub fn to_map(&self) -> BiLinearMap {
        let n = self.dims.total();
        let mut sum = CMat::zeros(n, n);
        for v in &self.ops {
            let phi = elementary(v, self.dims).expect("kraus operators carry consistent shapes");
            sum = &sum + phi.choi_mat();
        }
        BiLinearMap::from_choi(TriOperator::new(self.dims, sum).expect("square"))
    }
}

fn check_square(x: &CMat, n: usize, what: &str) -> Result<()> {
    if x.shape() != (n, n) {
        return Err(Error::DimMismatch(format!("{what} must be {n}x{n}, got {:?}", x.shape())));
    }
    Ok(())
}

/// `φ(x, y) = Σ x_{ij} y_{kℓ} C_{(i,k),(j,ℓ)}`.
pub fn apply(phi: &BiLinearMap, x: &CMat, y: &CMat) -> Result<CMat> {
    let d = phi.dims();
    check_square(x, d.a, "first argument")?;
    check_square(y, d.b, "second argument")?;
    let c = phi.choi_mat();
    let mut out = CMat::zeros(d.c, d.c);
    for i in 0..d.a {
        for j in 0..d.a {
            let xij = x[(i, j)];
            if xij == ZERO {
                continue;
            }
            for k in 0..d.b {
                for l in 0..d.b {
                    let coeff = xij * y[(k, l)];
                    if coeff == ZERO {
                        continue;
                    }
                    for m in 0..d.c {
                        for n in 0..d.c {
                            out[(m, n)] += coeff * c[(d.flat(i, k, m), d.flat(j, l, n))];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The elementary map `φ_V(x, y) = V (x ⊗ y) V*` for a `c x ab` matrix `V`.
///
/// Its Choi matrix is the rank-one projector onto `Σ_{(i,k)} |i>|k>|V_{(i,k)}>`
/// where `V_{(i,k)}` is the `(i,k)`-th column of `V`.
pub fn elementary(v: &CMat, dims: TriDims) -> Result<BiLinearMap> {
    if v.shape() != (dims.c, dims.a * dims.b) {
        return Err(Error::DimMismatch(format!(
            "V must be {}x{}, got {:?}",
            dims.c,
            dims.a * dims.b,
            v.shape()
        )));
    }
    let psi: Vec<C64> = (0..dims.total())
        .map(|flat| {
            let [i, k, m] = dims.split(flat);
            v[(m, i * dims.b + k)]
        })
        .collect();
    Ok(BiLinearMap::from_choi(TriOperator::new(dims, CMat::outer(&psi, &psi))?))
}

/// Kraus form of a map with positive Choi matrix.
///
/// Factors come from the spectral decomposition of `C_φ`, ordered by
/// descending eigenvalue; eigenvalues at or below `psd_abs * ||C_φ||` are
/// dropped. A zero map yields the single factor `V = 0`.
pub fn kraus_decompose(phi: &BiLinearMap, tol: &Tolerance) -> Result<KrausSet> {
    let d = phi.dims();
    let eig = hermitian_eig(phi.choi_mat(), tol)?;
    let scale = eig.max_abs_value();
    if eig.min_value() < -tol.psd_abs * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min_value(),
        });
    }
    let mut ops = Vec::new();
    for k in (0..eig.values.len()).rev() {
        let lambda = eig.values[k];
        if lambda <= tol.psd_abs * scale {
            break;
        }
        let vec = eig.vector(k);
        let root = lambda.sqrt();
        ops.push(CMat::from_fn(d.c, d.a * d.b, |m, col| {
            let (i, kk) = (col / d.b, col % d.b);
            vec[d.flat(i, kk, m)] * root
        }));
    }
    if ops.is_empty() {
        ops.push(CMat::zeros(d.c, d.a * d.b));
    }
    Ok(KrausSet { dims: d, ops })
}

/// Whether `C_φ` is Hermitian and positive semidefinite within `psd_abs`.
pub fn is_completely_positive(phi: &BiLinearMap, tol: &Tolerance) -> bool {
    match hermitian_eig(phi.choi_mat(), tol) {
        Ok(eig) => eig.min_value() >= -tol.psd_abs * eig.max_abs_value(),
        Err(_) => false,
    }
}

/// The duality pairing `<ϱ, φ> = Tr(C_φ ϱᵗ) = Σ_{pq} C_{pq} ϱ_{pq}`.
pub fn pair(rho: &TriOperator, phi: &BiLinearMap) -> Result<C64> {
    if rho.dims() != phi.dims() {
        return Err(Error::DimMismatch(format!(
            "state dims {} differ from map dims {}",
            rho.dims(),
            phi.dims()
        )));
    }
    Ok(phi
        .choi_mat()
        .data()
        .iter()
        .zip(rho.mat().data())
        .map(|(c, r)| c * r)
        .sum())
}

/// Pairing with a product operator `u ⊗ v ⊗ w`, evaluated as `Tr(φ(u,v) wᵗ)`.
pub fn pair_product(u: &CMat, v: &CMat, w: &CMat, phi: &BiLinearMap) -> Result<C64> {
    check_square(w, phi.dims().c, "third factor")?;
    let val = apply(phi, u, v)?;
    Ok((&val * &w.transpose()).trace())
}

/// The map `φ^σ`, whose Choi matrix is `U C_φ U*` with `U` the flip unitary.
pub fn permute_dual(phi: &BiLinearMap, sigma: Permutation3) -> BiLinearMap {
    BiLinearMap::from_choi(phi.choi.flip(sigma))
}

/// `E_φ(x) = Σ_{ij} x_{ij} C_{i,j}` with `C_φ = Σ |i><j| ⊗ C_{i,j}`.
pub fn e_map(phi: &BiLinearMap, x: &CMat) -> Result<CMat> {
    let d = phi.dims();
    check_square(x, d.a, "argument")?;
    let bc = d.b * d.c;
    let c = phi.choi_mat();
    let mut out = CMat::zeros(bc, bc);
    for i in 0..d.a {
        for j in 0..d.a {
            let xij = x[(i, j)];
            if xij == ZERO {
                continue;
            }
            for r in 0..bc {
                for s in 0..bc {
                    out[(r, s)] += xij * c[(i * bc + r, j * bc + s)];
                }
            }
        }
    }
    Ok(out)
}

/// `D_φ(z) = Σ z_{(i,k),(j,ℓ)} C_{(i,k),(j,ℓ)}`.
pub fn d_map(phi: &BiLinearMap, z: &CMat) -> Result<CMat> {
    let d = phi.dims();
    let ab = d.a * d.b;
    check_square(z, ab, "argument")?;
    let c = phi.choi_mat();
    let mut out = CMat::zeros(d.c, d.c);
    for p in 0..ab {
        for q in 0..ab {
            let zpq = z[(p, q)];
            if zpq == ZERO {
                continue;
            }
            for m in 0..d.c {
                for n in 0..d.c {
                    out[(m, n)] += zpq * c[(p * d.c + m, q * d.c + n)];
                }
            }
        }
    }
    Ok(out)
}

/// Hermiticity gate for witness matrices.
pub fn ensure_hermitian_operator(w: &TriOperator, tol: &Tolerance) -> Result<()> {
    ensure_hermitian(w.mat(), tol)
}
