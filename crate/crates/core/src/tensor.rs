//! Tri-partite index bookkeeping.
//!
//! Flat layout is lexicographic with party A slowest: the basis ket
//! `|i>|k>|m>` of `C^a ⊗ C^b ⊗ C^c` sits at `(i*b + k)*c + m`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{norm, CMat, C64, ZERO};

/// Subsystem dimensions `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TriDims {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl TriDims {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::InvalidInput(format!(
                "subsystem dimensions must be >= 1, got ({a}, {b}, {c})"
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn qubits() -> Self {
        Self { a: 2, b: 2, c: 2 }
    }

    pub fn total(&self) -> usize {
        self.a * self.b * self.c
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.a, self.b, self.c]
    }

    pub fn from_array(d: [usize; 3]) -> Result<Self> {
        Self::new(d[0], d[1], d[2])
    }

    pub fn of(&self, party: Party) -> usize {
        self.as_array()[party.index()]
    }

    pub fn flat(&self, i: usize, k: usize, m: usize) -> usize {
        (i * self.b + k) * self.c + m
    }

    pub fn split(&self, flat: usize) -> [usize; 3] {
        [flat / (self.b * self.c), (flat / self.c) % self.b, flat % self.c]
    }

    /// Dimensions after reordering the parties by `sigma`.
    pub fn permuted(&self, sigma: Permutation3) -> Self {
        Self::from_array(sigma.apply(self.as_array())).expect("permuted dims stay positive")
    }
}

impl fmt::Display for TriDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    A,
    B,
    C,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::A, Party::B, Party::C];

    pub fn index(self) -> usize {
        match self {
            Party::A => 0,
            Party::B => 1,
            Party::C => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

/// A reordering of the three parties.
///
/// `Permutation3::new([B, C, A])` is the permutation sending `(A,B,C)` to
/// `(B,C,A)`: after the flip, the first tensor slot holds party B, the second
/// C and the third A. On triplets it acts by `(s_A, s_B, s_C) -> (s_B, s_C, s_A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Permutation3 {
    order: [Party; 3],
}

impl Permutation3 {
    pub fn new(order: [Party; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for p in order {
            if seen[p.index()] {
                return Err(Error::InvalidInput(format!("{order:?} is not a permutation")));
            }
            seen[p.index()] = true;
        }
        Ok(Self { order })
    }

    pub fn identity() -> Self {
        Self {
            order: [Party::A, Party::B, Party::C],
        }
    }

    /// All six permutations, identity first.
    pub fn all() -> [Self; 6] {
        use Party::*;
        [[A, B, C], [A, C, B], [B, A, C], [B, C, A], [C, A, B], [C, B, A]].map(|order| Self { order })
    }

    pub fn order(&self) -> [Party; 3] {
        self.order
    }

    /// `(s_A, s_B, s_C) -> (s_{σA}, s_{σB}, s_{σC})`.
    pub fn apply<T: Copy>(&self, s: [T; 3]) -> [T; 3] {
        self.order.map(|p| s[p.index()])
    }

    pub fn inverse(&self) -> Self {
        let mut order = [Party::A; 3];
        for (slot, p) in self.order.iter().enumerate() {
            order[p.index()] = Party::from_index(slot).expect("slot < 3");
        }
        Self { order }
    }

    /// `self` applied after `first`: `x.flip(first).flip(self) == x.flip(self.after(first))`.
    pub fn after(&self, first: Permutation3) -> Self {
        Self {
            order: self.order.map(|p| first.order[p.index()]),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl fmt::Display for Permutation3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.order;
        write!(f, "(A,B,C)->({x:?},{y:?},{z:?})")
    }
}

/// Index map of the flip: old flat index -> new flat index.
fn flip_index_map(dims: TriDims, sigma: Permutation3) -> Vec<usize> {
    let new_dims = dims.permuted(sigma);
    (0..dims.total())
        .map(|flat| {
            let [x, y, z] = sigma.apply(dims.split(flat));
            new_dims.flat(x, y, z)
        })
        .collect()
}

/// The unitary `U` with `U|old> = |flipped>`.
pub fn flip_unitary(dims: TriDims, sigma: Permutation3) -> CMat {
    let map = flip_index_map(dims, sigma);
    let n = dims.total();
    let mut u = CMat::zeros(n, n);
    for (old, &new) in map.iter().enumerate() {
        u[(new, old)] = C64::new(1.0, 0.0);
    }
    u
}

/// Objects carrying a tri-partite structure that can be reordered.
pub trait Flip: Sized {
    fn flip(&self, sigma: Permutation3) -> Self;
}

/// A vector in `C^a ⊗ C^b ⊗ C^c`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriVector {
    dims: TriDims,
    data: Vec<C64>,
}

impl TriVector {
    pub fn new(dims: TriDims, data: Vec<C64>) -> Result<Self> {
        if data.len() != dims.total() {
            return Err(Error::DimMismatch(format!(
                "dims {dims} need {} amplitudes, got {}",
                dims.total(),
                data.len()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("amplitudes must be finite".into()));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: TriDims) -> Self {
        Self {
            dims,
            data: vec![ZERO; dims.total()],
        }
    }

    /// Basis ket `|i>|k>|m>`.
    pub fn basis(dims: TriDims, i: usize, k: usize, m: usize) -> Self {
        let mut v = Self::zeros(dims);
        v.data[dims.flat(i, k, m)] = C64::new(1.0, 0.0);
        v
    }

    pub fn dims(&self) -> TriDims {
        self.dims
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn get(&self, i: usize, k: usize, m: usize) -> C64 {
        self.data[self.dims.flat(i, k, m)]
    }

    pub fn add_at(&mut self, i: usize, k: usize, m: usize, z: C64) {
        let idx = self.dims.flat(i, k, m);
        self.data[idx] += z;
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Unit vector in the same direction; `ZeroVector` for the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn conj(&self) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// The projector `|self><self|` as a tri-partite operator.
    pub fn projector(&self) -> TriOperator {
        TriOperator {
            dims: self.dims,
            mat: CMat::outer(&self.data, &self.data),
        }
    }
}

impl Flip for TriVector {
    fn flip(&self, sigma: Permutation3) -> Self {
        let map = flip_index_map(self.dims, sigma);
        let mut data = vec![ZERO; self.data.len()];
        for (old, &new) in map.iter().enumerate() {
            data[new] = self.data[old];
        }
        Self {
            dims: self.dims.permuted(sigma),
            data,
        }
    }
}

/// An `(abc) x (abc)` matrix on `C^a ⊗ C^b ⊗ C^c`: states, witnesses and Choi
/// matrices all take this form.
#[derive(Debug, Clone, PartialEq)]
pub struct TriOperator {
    dims: TriDims,
    mat: CMat,
}

impl TriOperator {
    pub fn new(dims: TriDims, mat: CMat) -> Result<Self> {
        let n = dims.total();
        if mat.shape() != (n, n) {
            return Err(Error::DimMismatch(format!(
                "dims {dims} need a {n}x{n} matrix, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(Self { dims, mat })
    }

    pub fn zeros(dims: TriDims) -> Self {
        let n = dims.total();
        Self {
            dims,
            mat: CMat::zeros(n, n),
        }
    }

    pub fn identity(dims: TriDims) -> Self {
        Self {
            dims,
            mat: CMat::identity(dims.total()),
        }
    }

    pub fn dims(&self) -> TriDims {
        self.dims
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    /// Entrywise transpose.
    pub fn transpose_full(&self) -> Self {
        Self {
            dims: self.dims,
            mat: self.mat.transpose(),
        }
    }

    /// Hilbert-Schmidt inner product `Tr(self* other)`.
    pub fn hs_inner(&self, other: &TriOperator) -> C64 {
        self.mat
            .data()
            .iter()
            .zip(other.mat.data())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }
}

impl Flip for TriOperator {
    /// Conjugation `C -> U C U*` by the flip unitary.
    fn flip(&self, sigma: Permutation3) -> Self {
        let map = flip_index_map(self.dims, sigma);
        let n = self.dims.total();
        let mut mat = CMat::zeros(n, n);
        for (p, &np) in map.iter().enumerate() {
            for (q, &nq) in map.iter().enumerate() {
                mat[(np, nq)] = self.mat[(p, q)];
            }
        }
        Self {
            dims: self.dims.permuted(sigma),
            mat,
        }
    }
}

/// Entrywise transpose of a tri-partite operator.
pub fn transpose_full(rho: &TriOperator) -> TriOperator {
    rho.transpose_full()
}

/// `u ⊗ v ⊗ w`.
pub fn product_vector(u: &[C64], v: &[C64], w: &[C64]) -> Result<TriVector> {
    let dims = TriDims::new(u.len(), v.len(), w.len())?;
    let mut data = Vec::with_capacity(dims.total());
    for x in u {
        for y in v {
            for z in w {
                data.push(x * y * z);
            }
        }
    }
    TriVector::new(dims, data)
}

/// Mode matricization.
///
/// Mode A gives an `a x (bc)` matrix with entry `(i, (k,m))`, mode B a
/// `b x (ac)` matrix with entry `(k, (i,m))`, and mode C a `c x (ab)` matrix
/// with entry `(m, (i,k))`.
pub fn unfold(xi: &TriVector, mode: Party) -> CMat {
    let d = xi.dims();
    let (rows, cols) = match mode {
        Party::A => (d.a, d.b * d.c),
        Party::B => (d.b, d.a * d.c),
        Party::C => (d.c, d.a * d.b),
    };
    let mut out = CMat::zeros(rows, cols);
    for (flat, &z) in xi.data().iter().enumerate() {
        let [i, k, m] = d.split(flat);
        let (r, c) = match mode {
            Party::A => (i, k * d.c + m),
            Party::B => (k, i * d.c + m),
            Party::C => (m, i * d.b + k),
        };
        out[(r, c)] = z;
    }
    out
}

/// Inverse of [`unfold`].
pub fn refold(m: &CMat, dims: TriDims, mode: Party) -> Result<TriVector> {
    let expected = match mode {
        Party::A => (dims.a, dims.b * dims.c),
        Party::B => (dims.b, dims.a * dims.c),
        Party::C => (dims.c, dims.a * dims.b),
    };
    if m.shape() != expected {
        return Err(Error::DimMismatch(format!(
            "mode-{mode:?} unfolding for {dims} must be {expected:?}, got {:?}",
            m.shape()
        )));
    }
    let mut data = vec![ZERO; dims.total()];
    for (flat, slot) in data.iter_mut().enumerate() {
        let [i, k, mm] = dims.split(flat);
        *slot = match mode {
            Party::A => m[(i, k * dims.c + mm)],
            Party::B => m[(k, i * dims.c + mm)],
            Party::C => m[(mm, i * dims.b + k)],
        };
    }
    TriVector::new(dims, data)
}

/// Mode-`mode` matricization of an n-partite vector (`mode` is 1-based).
///
/// Rows are indexed by the chosen subsystem, columns lexicographically by
/// the remaining ones in their original order.
pub fn multi_unfold(xi: &[C64], dims: &[usize], mode: usize) -> Result<CMat> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimMismatch(format!("invalid dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != xi.len() {
        return Err(Error::DimMismatch(format!(
            "dims {dims:?} need {total} amplitudes, got {}",
            xi.len()
        )));
    }
    if mode == 0 || mode > dims.len() {
        return Err(Error::DimMismatch(format!(
            "mode {mode} out of range 1..={}",
            dims.len()
        )));
    }
    let k = mode - 1;
    let rows = dims[k];
    let cols = total / rows;
    let mut out = CMat::zeros(rows, cols);
    let mut idx = vec![0usize; dims.len()];
    for &z in xi {
        let mut col = 0;
        for (j, (&ij, &dj)) in idx.iter().zip(dims).enumerate() {
            if j != k {
                col = col * dj + ij;
            }
        }
        out[(idx[k], col)] = z;
        // odometer increment, last index fastest
        for j in (0..dims.len()).rev() {
            idx[j] += 1;
            if idx[j] < dims[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    Ok(out)
}
