//! Schmidt-rank triplets of tri-partite vectors.
//!
//! `SR(ξ) = (α, β, γ)` is computed from the numerical ranks of the three mode
//! unfoldings. [`schmidt_rank_by_definition`] recomputes it from the nested
//! map `Λ_ξ : H_A -> L(H_B, H_C)` and serves as an independent oracle.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{singular_values, svd, svd_rank, CMat, Tolerance, C64, ZERO};
use crate::tensor::{multi_unfold, unfold, Flip, Party, Permutation3, TriDims, TriVector};

/// The triplet `(α, β, γ)` of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchmidtRank {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
}

impl SchmidtRank {
    pub fn new(alpha: usize, beta: usize, gamma: usize) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn from_array([alpha, beta, gamma]: [usize; 3]) -> Self {
        Self { alpha, beta, gamma }
    }

    /// `(s_{σA}, s_{σB}, s_{σC})`.
    pub fn permuted(&self, sigma: Permutation3) -> Self {
        Self::from_array(sigma.apply(self.as_array()))
    }

    pub fn leq(&self, t: PosTriple) -> bool {
        self.alpha <= t.p && self.beta <= t.q && self.gamma <= t.r
    }
}

impl fmt::Display for SchmidtRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.alpha, self.beta, self.gamma)
    }
}

/// A positivity / Schmidt-number class `(p, q, r)` with `p, q, r >= 1`,
/// partially ordered componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PosTriple {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl PosTriple {
    pub fn new(p: usize, q: usize, r: usize) -> Result<Self> {
        if p == 0 || q == 0 || r == 0 {
            return Err(Error::InvalidInput(format!(
                "positivity triple entries must be >= 1, got ({p}, {q}, {r})"
            )));
        }
        Ok(Self { p, q, r })
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.p, self.q, self.r]
    }

    pub fn from_array([p, q, r]: [usize; 3]) -> Result<Self> {
        Self::new(p, q, r)
    }

    /// Componentwise order.
    pub fn leq(&self, other: &PosTriple) -> bool {
        self.p <= other.p && self.q <= other.q && self.r <= other.r
    }

    pub fn permuted(&self, sigma: Permutation3) -> Self {
        let [p, q, r] = sigma.apply(self.as_array());
        Self { p, q, r }
    }

    /// Whether the triple fits inside the given dimensions.
    pub fn fits(&self, dims: TriDims) -> bool {
        self.p <= dims.a && self.q <= dims.b && self.r <= dims.c
    }
}

impl PartialOrd for PosTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.leq(other), other.leq(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

impl fmt::Display for PosTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.q, self.r)
    }
}

/// Singular values of the mode-A, mode-B and mode-C unfoldings.
pub fn mode_singular_values(xi: &TriVector) -> [Vec<f64>; 3] {
    Party::ALL.map(|p| singular_values(&unfold(xi, p)))
}

/// `SR(ξ)` from the numerical ranks of the three mode unfoldings.
pub fn schmidt_rank(xi: &TriVector, tol: &Tolerance) -> Result<SchmidtRank> {
    let [alpha, beta, gamma] = Party::ALL.map(|p| svd_rank(&unfold(xi, p), tol));
    if alpha == 0 {
        return Err(Error::ZeroVector);
    }
    Ok(SchmidtRank { alpha, beta, gamma })
}

/// `Λ_ξ(u)` as a `c x b` matrix, following the nested-map construction
/// literally: `Λ_ξ(u) = Σ_i <ē_i|u> λ_{η_i}` with `ξ = Σ_i e_i ⊗ η_i` and
/// `λ_η(v) = Σ_k <ē_k|v> w_k` for `η = Σ_k e_k ⊗ w_k`.
pub fn lambda_map(xi: &TriVector, u: &[C64]) -> CMat {
    let d = xi.dims();
    assert_eq!(u.len(), d.a, "Λ_ξ takes vectors of H_A");
    let mut t = CMat::zeros(d.c, d.b);
    for (i, ui) in u.iter().enumerate() {
        // <ē_i | u> with ē_i = e_i for the canonical basis
        let coeff = *ui;
        if coeff == ZERO {
            continue;
        }
        for k in 0..d.b {
            // λ_{η_i} sends e_k to w_k = Σ_m ξ_{i,k,m} e_m
            for m in 0..d.c {
                t[(m, k)] += coeff * xi.get(i, k, m);
            }
        }
    }
    t
}

/// `SR(ξ)` recomputed from its definition:
/// `α = rank Λ_ξ`, `β = dim ⋁ supp T`, `γ = dim ⋁ ran T` over `T ∈ ran Λ_ξ`.
pub fn schmidt_rank_by_definition(xi: &TriVector, tol: &Tolerance) -> Result<SchmidtRank> {
    let d = xi.dims();
    let images: Vec<CMat> = (0..d.a)
        .map(|i| {
            let mut e = vec![ZERO; d.a];
            e[i] = C64::new(1.0, 0.0);
            lambda_map(xi, &e)
        })
        .collect();

    // α: dimension of span{vec Λ_ξ(e_i)}
    let stacked = CMat::from_columns(d.c * d.b, &images.iter().map(|t| t.data().to_vec()).collect::<Vec<_>>());
    let alpha = svd_rank(&stacked, tol);
    if alpha == 0 {
        return Err(Error::ZeroVector);
    }

    // ran Λ_ξ is spanned by the images, and the supports (ranges) of any
    // combination lie in the join of the supports (ranges) of the images.
    // Singular vectors are weighted by their singular values: the spans are
    // unchanged, but directions from nearly-vanishing images no longer carry
    // O(eps/σ) noise into the joined rank.
    let decomps: Vec<_> = images.iter().map(svd).collect();
    let scale = decomps
        .iter()
        .filter_map(|s| s.s.first().copied())
        .fold(0.0, f64::max);
    let cutoff = tol.rank_rel * scale;
    let mut supports = Vec::new();
    let mut ranges = Vec::new();
    for dec in &decomps {
        for (k, &sk) in dec.s.iter().enumerate() {
            if sk > cutoff {
                supports.push(dec.v.column(k).into_iter().map(|z| z * sk).collect());
                ranges.push(dec.u.column(k).into_iter().map(|z| z * sk).collect());
            }
        }
    }
    let beta = svd_rank(&CMat::from_columns(d.b, &supports), tol);
    let gamma = svd_rank(&CMat::from_columns(d.c, &ranges), tol);
    Ok(SchmidtRank { alpha, beta, gamma })
}

/// Whether `SR(ξ) <= t` componentwise. The zero vector satisfies every bound.
pub fn sr_leq(xi: &TriVector, t: PosTriple, tol: &Tolerance) -> bool {
    let ranks = Party::ALL.map(|p| svd_rank(&unfold(xi, p), tol));
    ranks[0] <= t.p && ranks[1] <= t.q && ranks[2] <= t.r
}

/// Membership in `Σ_{a,b,c}`: `1 <= α <= a`, `1 <= β <= b`, `1 <= γ <= c`,
/// and each entry at most the product of the other two.
pub fn sigma_contains(t: [usize; 3], dims: TriDims) -> bool {
    let [alpha, beta, gamma] = t;
    (1..=dims.a).contains(&alpha)
        && (1..=dims.b).contains(&beta)
        && (1..=dims.c).contains(&gamma)
        && alpha <= beta * gamma
        && beta <= gamma * alpha
        && gamma <= alpha * beta
}

/// All of `Σ_{a,b,c}` in lexicographic order.
pub fn sigma_triplets(dims: TriDims) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for alpha in 1..=dims.a {
        for beta in 1..=dims.b {
            for gamma in 1..=dims.c {
                if sigma_contains([alpha, beta, gamma], dims) {
                    out.push([alpha, beta, gamma]);
                }
            }
        }
    }
    out
}

/// A vector with Schmidt rank exactly `t`, built from canonical basis vectors.
///
/// The parties are reordered so that `α <= β <= γ`, the vector
/// `Σ_{i<k} e_i ⊗ Σ_j e_j ⊗ e_{iβ+j} + e_k ⊗ Σ_{j<r} e_j ⊗ e_{kβ+j} + Σ_l e_{s+l} ⊗ e_l ⊗ e_l`
/// is assembled with `γ = kβ + r`, and the result is flipped back.
pub fn construct_state_with_sr(t: [usize; 3], dims: TriDims) -> Result<TriVector> {
    if !sigma_contains(t, dims) {
        let [x, y, z] = t;
        return Err(Error::NotAdmissible(x, y, z, dims.a, dims.b, dims.c));
    }
    let mut order = Party::ALL;
    order.sort_by_key(|p| t[p.index()]);
    let sort = Permutation3::new(order)?;
    let [alpha, beta, gamma] = sort.apply(t);
    let sorted_dims = dims.permuted(sort);

    let one = C64::new(1.0, 0.0);
    let mut xi = TriVector::zeros(sorted_dims);
    let (k, r) = (gamma / beta, gamma % beta);
    for i in 0..k {
        for j in 0..beta {
            xi.add_at(i, j, i * beta + j, one);
        }
    }
    for j in 0..r {
        xi.add_at(k, j, k * beta + j, one);
    }
    // u_k is used by the partial block only when r > 0
    let first_free = if r > 0 { k + 1 } else { k };
    for l in 0..alpha - first_free {
        xi.add_at(first_free + l, l, l, one);
    }
    Ok(xi.flip(sort.inverse()))
}

/// Mode-k unfolding ranks of an n-partite vector.
pub fn multirank(xi: &[C64], dims: &[usize], tol: &Tolerance) -> Result<Vec<usize>> {
    let ranks = (1..=dims.len())
        .map(|mode| multi_unfold(xi, dims, mode).map(|m| svd_rank(&m, tol)))
        .collect::<Result<Vec<_>>>()?;
    if ranks.first() == Some(&0) {
        return Err(Error::ZeroVector);
    }
    Ok(ranks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_gaussian_vec;
    use crate::tensor::product_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ghz(n: usize) -> TriVector {
        let d = TriDims::new(n, n, n).unwrap();
        let mut v = TriVector::zeros(d);
        for i in 0..n {
            v.add_at(i, i, i, C64::new(1.0, 0.0));
        }
        v
    }

    fn tri(t: [usize; 3]) -> PosTriple {
        PosTriple::from_array(t).unwrap()
    }

    #[test]
    fn basic_ranks() {
        let tol = Tolerance::default();
        let prod = TriVector::basis(TriDims::qubits(), 0, 0, 0);
        assert_eq!(schmidt_rank(&prod, &tol).unwrap(), SchmidtRank::new(1, 1, 1));
        for n in 1..=4 {
            assert_eq!(schmidt_rank(&ghz(n), &tol).unwrap(), SchmidtRank::new(n, n, n));
            assert_eq!(schmidt_rank_by_definition(&ghz(n), &tol).unwrap(), SchmidtRank::new(n, n, n));
        }
        assert_eq!(schmidt_rank(&TriVector::zeros(TriDims::qubits()), &tol), Err(Error::ZeroVector));
        assert_eq!(
            schmidt_rank_by_definition(&TriVector::zeros(TriDims::qubits()), &tol),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn one_party_product_forces_equal_ranks() {
        let tol = Tolerance::default();
        let d = TriDims::qubits();
        let mut v = TriVector::basis(d, 0, 0, 0);
        v.add_at(0, 1, 1, C64::new(1.0, 0.0));
        assert_eq!(schmidt_rank_by_definition(&v, &tol).unwrap(), SchmidtRank::new(1, 2, 2));
        assert_eq!(schmidt_rank(&v, &tol).unwrap(), SchmidtRank::new(1, 2, 2));
    }

    #[test]
    fn sr_leq_cases() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = product_vector(
            &random_gaussian_vec(2, &mut rng),
            &random_gaussian_vec(2, &mut rng),
            &random_gaussian_vec(2, &mut rng),
        )
        .unwrap();
        assert!(sr_leq(&p, tri([1, 1, 1]), &tol));
        assert!(!sr_leq(&ghz(2), tri([1, 2, 2]), &tol));
        assert!(sr_leq(&ghz(2), tri([2, 2, 2]), &tol));
    }

    #[test]
    fn sigma_membership() {
        let q = TriDims::qubits();
        assert!(sigma_contains([1, 2, 2], q));
        assert!(!sigma_contains([1, 2, 3], TriDims::new(3, 3, 3).unwrap()));
        assert!(!sigma_contains([1, 2, 3], TriDims::new(4, 4, 4).unwrap()));
        assert!(sigma_contains([2, 2, 4], TriDims::new(2, 2, 4).unwrap()));
        assert!(!sigma_contains([0, 1, 1], q));
        assert!(!sigma_contains([3, 1, 1], q));
        assert_eq!(
            sigma_triplets(q),
            vec![[1, 1, 1], [1, 2, 2], [2, 1, 2], [2, 2, 1], [2, 2, 2]]
        );
        assert_eq!(sigma_triplets(TriDims::new(3, 3, 3).unwrap()).len(), 15);
        assert_eq!(sigma_triplets(TriDims::new(4, 4, 4).unwrap()).len(), 37);
    }

    #[test]
    fn generator_is_exact_on_small_cubes() {
        let tol = Tolerance::default();
        for a in 1..=3 {
            for b in 1..=3 {
                for c in 1..=3 {
                    let d = TriDims::new(a, b, c).unwrap();
                    for t in sigma_triplets(d) {
                        let xi = construct_state_with_sr(t, d).unwrap();
                        assert_eq!(xi.dims(), d);
                        assert_eq!(schmidt_rank(&xi, &tol).unwrap().as_array(), t, "dims {d}");
                        assert_eq!(schmidt_rank_by_definition(&xi, &tol).unwrap().as_array(), t);
                    }
                }
            }
        }
        let xi = construct_state_with_sr([1, 1, 1], TriDims::qubits()).unwrap();
        assert_eq!(xi, TriVector::basis(TriDims::qubits(), 0, 0, 0));
    }

    #[test]
    fn generator_rejects_inadmissible() {
        assert!(matches!(
            construct_state_with_sr([1, 2, 3], TriDims::new(3, 3, 3).unwrap()),
            Err(Error::NotAdmissible(1, 2, 3, 3, 3, 3))
        ));
        assert!(construct_state_with_sr([3, 1, 1], TriDims::qubits()).is_err());
    }

    #[test]
    fn multirank_cases() {
        let tol = Tolerance::default();
        // bi-partite: Schmidt rank s appears in both modes
        for s in 1..=3 {
            let mut xi = vec![ZERO; 12];
            for i in 0..s {
                xi[i * 4 + i] = C64::new((i + 1) as f64, 0.0);
            }
            assert_eq!(multirank(&xi, &[3, 4], &tol).unwrap(), vec![s, s]);
        }
        let mut ghz4 = vec![ZERO; 16];
        ghz4[0] = C64::new(1.0, 0.0);
        ghz4[15] = C64::new(1.0, 0.0);
        assert_eq!(multirank(&ghz4, &[2, 2, 2, 2], &tol).unwrap(), vec![2; 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = TriDims::new(2, 3, 4).unwrap();
        let xi = TriVector::new(d, random_gaussian_vec(24, &mut rng)).unwrap();
        assert_eq!(
            multirank(xi.data(), &[2, 3, 4], &tol).unwrap(),
            schmidt_rank(&xi, &tol).unwrap().as_array().to_vec()
        );
        assert_eq!(multirank(&[ZERO; 8], &[2, 2, 2], &tol), Err(Error::ZeroVector));
        assert!(matches!(multirank(&[ZERO; 8], &[2, 3], &tol), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn pos_triple_order() {
        assert!(tri([1, 2, 2]) < tri([2, 2, 2]));
        assert_eq!(tri([1, 2, 2]).partial_cmp(&tri([2, 1, 2])), None);
        assert!(PosTriple::new(0, 1, 1).is_err());
    }
}
