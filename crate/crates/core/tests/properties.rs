use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use triwit_core::choi::{apply, kraus_decompose, pair, permute_dual, BiLinearMap};
use triwit_core::linalg::{kron, random_gaussian, random_unitary, Tolerance, C64};
use triwit_core::schmidt::{schmidt_rank, schmidt_rank_by_definition, sigma_contains, PosTriple};
use triwit_core::search::sample_sr_vector;
use triwit_core::tensor::{Flip, Permutation3, TriDims, TriOperator, TriVector};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn dims_strategy(max: usize) -> impl Strategy<Value = TriDims> {
    (1..=max, 1..=max, 1..=max).prop_map(|(a, b, c)| TriDims::new(a, b, c).unwrap())
}

/// A dims/bound pair with the bound fitting inside the dims.
fn bounded_strategy() -> impl Strategy<Value = (TriDims, PosTriple)> {
    dims_strategy(4).prop_flat_map(|d| {
        (Just(d), 1..=d.a, 1..=d.b, 1..=d.c).prop_map(|(d, p, q, r)| (d, PosTriple::new(p, q, r).unwrap()))
    })
}

fn random_vector(d: TriDims, seed: u64) -> TriVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TriVector::new(d, random_gaussian(d.total(), 1, &mut rng).into_data()).unwrap()
}

fn local_unitary(d: TriDims, seed: u64) -> triwit_core::linalg::CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ua = random_unitary(d.a, &mut rng);
    let ub = random_unitary(d.b, &mut rng);
    let uc = random_unitary(d.c, &mut rng);
    kron(&kron(&ua, &ub), &uc)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn schmidt_rank_is_permutation_covariant((d, t) in bounded_strategy(), seed in any::<u64>(), k in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = sample_sr_vector(d, t, &mut rng).unwrap();
        let sigma = Permutation3::all()[k];
        let sr = schmidt_rank(&xi, &tol()).unwrap();
        prop_assert_eq!(schmidt_rank(&xi.flip(sigma), &tol()).unwrap(), sr.permuted(sigma));
    }

    #[test]
    fn schmidt_rank_is_admissible_and_bounded((d, t) in bounded_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = sample_sr_vector(d, t, &mut rng).unwrap();
        let sr = schmidt_rank(&xi, &tol()).unwrap();
        prop_assert!(sigma_contains(sr.as_array(), d));
        prop_assert!(sr.leq(t));
        prop_assert_eq!(schmidt_rank_by_definition(&xi, &tol()).unwrap(), sr);
    }

    #[test]
    fn schmidt_rank_ignores_scaling_and_local_unitaries(d in dims_strategy(3), seed in any::<u64>(), re in -5.0f64..5.0, im in 0.1f64..5.0) {
        let xi = random_vector(d, seed);
        let sr = schmidt_rank(&xi, &tol()).unwrap();
        prop_assert_eq!(schmidt_rank(&xi.scaled(C64::new(re, im)), &tol()).unwrap(), sr);
        prop_assert_eq!(schmidt_rank(&xi.conj(), &tol()).unwrap(), sr);
        let u = local_unitary(d, seed ^ 0x5eed);
        let moved = TriVector::new(d, u.mat_vec(xi.data())).unwrap();
        prop_assert_eq!(schmidt_rank(&moved, &tol()).unwrap(), sr);
    }

    #[test]
    fn flips_compose(d in dims_strategy(3), seed in any::<u64>(), i in 0usize..6, j in 0usize..6) {
        let xi = random_vector(d, seed);
        let (s1, s2) = (Permutation3::all()[i], Permutation3::all()[j]);
        let twice = xi.flip(s1).flip(s2);
        prop_assert_eq!(twice, xi.flip(s2.after(s1)));
        prop_assert_eq!(xi.flip(s1).flip(s1.inverse()), xi);
    }

    #[test]
    fn pairing_is_permutation_invariant(d in dims_strategy(3), seed in any::<u64>(), k in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = d.total();
        let phi = BiLinearMap::from_choi(TriOperator::new(d, random_gaussian(n, n, &mut rng)).unwrap());
        let rho = TriOperator::new(d, random_gaussian(n, n, &mut rng)).unwrap();
        let sigma = Permutation3::all()[k];
        let lhs = pair(&rho, &phi).unwrap();
        let rhs = pair(&rho.flip(sigma), &permute_dual(&phi, sigma)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn kraus_form_reproduces_map(d in dims_strategy(3), seed in any::<u64>(), rank in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = d.total();
        let g = random_gaussian(n, rank.min(n), &mut rng);
        let phi = BiLinearMap::from_choi(TriOperator::new(d, &g * &g.adjoint()).unwrap());
        let kraus = kraus_decompose(&phi, &tol()).unwrap();
        prop_assert!(kraus.len() <= rank.min(n));
        let x = random_gaussian(d.a, d.a, &mut rng);
        let y = random_gaussian(d.b, d.b, &mut rng);
        let direct = apply(&phi, &x, &y).unwrap();
        let via = kraus.ops().iter().fold(triwit_core::linalg::CMat::zeros(d.c, d.c), |acc, v| {
            &acc + &(&(v * &kron(&x, &y)) * &v.adjoint())
        });
        prop_assert!(direct.max_abs_diff(&via) <= 1e-9 * (1.0 + direct.max_abs()));
    }
}

/// `Σ c_{x1..xn} u1_{x1} ⊗ ... ⊗ un_{xn}` with random factors of sizes `ranks`.
fn product_expansion(dims: &[usize], ranks: &[usize], seed: u64) -> Vec<C64> {
    use triwit_core::linalg::kron_vec;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors: Vec<_> = dims.iter().zip(ranks).map(|(&d, &r)| random_gaussian(d, r, &mut rng)).collect();
    let core_len: usize = ranks.iter().product();
    let core = random_gaussian(core_len, 1, &mut rng).into_data();
    let total: usize = dims.iter().product();
    let mut out = vec![C64::new(0.0, 0.0); total];
    for (flat, c) in core.iter().enumerate() {
        let mut rem = flat;
        let mut idx = vec![0; ranks.len()];
        for k in (0..ranks.len()).rev() {
            idx[k] = rem % ranks[k];
            rem /= ranks[k];
        }
        let term = (0..dims.len()).fold(vec![C64::new(1.0, 0.0)], |acc, k| kron_vec(&acc, &factors[k].column(idx[k])));
        for (o, t) in out.iter_mut().zip(term) {
            *o += c * t;
        }
    }
    out
}

#[test]
fn four_party_multirank_matches_product_expansion_sizes() {
    use triwit_core::schmidt::multirank;
    let dims = [2, 3, 2, 3];
    let mut checked = 0;
    for r0 in 1..=2 {
        for r1 in 1..=3 {
            for r2 in 1..=2 {
                for r3 in 1..=3 {
                    let ranks = [r0, r1, r2, r3];
                    let total: usize = ranks.iter().product();
                    // generic expansions attain r_k only if r_k <= Π_{j≠k} r_j
                    if ranks.iter().any(|&r| r * r > total) {
                        continue;
                    }
                    let xi = product_expansion(&dims, &ranks, checked as u64);
                    assert_eq!(multirank(&xi, &dims, &tol()).unwrap(), ranks.to_vec(), "{ranks:?}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 10);
}
