//! Seeded generators for test batteries: potentials, bundle metrics,
//! unitary coordinate changes and random jets. Coefficients are small
//! rationals, so exact and float runs see the same data.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::PotentialJet;
use crate::jet::{invert_scalar, Jet, JetMatrix, MultiIndex};
use crate::recursion::KExpansion;
use crate::scalar::Coefficient;
use crate::twisted::BundleMetricJet;

pub use rand::SeedableRng;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/den + i·q/den` with `p, q ∈ [−span, span]`.
fn small_complex<C: Coefficient>(rng: &mut Rng64, span: i64, den: i64, real: bool) -> C {
    let re = C::from_ratio(rng.random_range(-span..=span), den);
    if real {
        return re;
    }
    re + C::imag_unit().mul_ref(&C::from_ratio(rng.random_range(-span..=span), den))
}

/// All multi-indices in `n` variables of total degree `d`.
fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..=d)
        .flat_map(|e| {
            monomials(n - 1, d - e).into_iter().map(move |mut rest| {
                rest.insert(0, e);
                rest
            })
        })
        .collect()
}

fn pair_key(alpha: &[u32], beta: &[u32]) -> MultiIndex {
    let mut e = alpha.to_vec();
    e.extend_from_slice(beta);
    MultiIndex::from_exponents(&e)
}

/// Random Hermitian positive definite `n×n` matrix `AA* + I/2`.
pub fn random_hpd<C: Coefficient>(rng: &mut Rng64, n: usize) -> Vec<C> {
    let a: Vec<C> = (0..n * n).map(|_| small_complex(rng, 2, 4, false)).collect();
    (0..n * n)
        .map(|e| {
            let (i, j) = (e / n, e % n);
            let mut v = if i == j { C::from_ratio(1, 2) } else { C::zero() };
            for l in 0..n {
                v += &a[i * n + l].mul_ref(&a[j * n + l].conj());
            }
            v
        })
        .collect()
}

/// Adds `c·x^α x̄^β` and its conjugate mirror, keeping the jet real.
fn add_real_pair<C: Coefficient>(phi: &mut Jet<C>, alpha: &[u32], beta: &[u32], c: &C) {
    phi.add_term(pair_key(alpha, beta), c);
    phi.add_term(pair_key(beta, alpha), &c.conj());
}

/// Strictly plurisubharmonic polynomial potential of degree four:
/// a random positive Levi form plus random real cubic and quartic terms,
/// occasionally with pluriharmonic quadratic parts.
pub fn random_quartic_potential<C: Coefficient>(
    rng: &mut Rng64,
    n: usize,
    degree: u32,
) -> Result<PotentialJet<C>> {
    let mut phi = Jet::zero(2 * n, degree);
    let levi = random_hpd::<C>(rng, n);
    for i in 0..n {
        for j in 0..n {
            let mut a = vec![0; n];
            let mut b = vec![0; n];
            a[i] = 1;
            b[j] = 1;
            phi.add_term(pair_key(&a, &b), &levi[i * n + j]);
        }
    }
    if rng.random_bool(0.5) {
        let mut a = vec![0; n];
        a[rng.random_range(0..n)] = 2;
        let c = small_complex::<C>(rng, 2, 8, false);
        add_real_pair(&mut phi, &a, &vec![0; n], &c);
    }
    for total in 3..=4u32 {
        for p in 0..=total {
            for alpha in monomials(n, p) {
                for beta in monomials(n, total - p) {
                    // each unordered pair once; the mirror supplies the rest
                    if (p, &alpha) > (total - p, &beta) || !rng.random_bool(0.4) {
                        continue;
                    }
                    let c: C = small_complex(rng, 3, 8, alpha == beta);
                    if alpha == beta {
                        phi.add_term(pair_key(&alpha, &beta), &c);
                    } else {
                        add_real_pair(&mut phi, &alpha, &beta, &c);
                    }
                }
            }
        }
    }
    PotentialJet::new(n, phi)
}

/// Rank-`r` Hermitian bundle metric with random linear and quadratic terms.
pub fn random_bundle_metric<C: Coefficient>(
    rng: &mut Rng64,
    n: usize,
    rank: usize,
    degree: u32,
) -> Result<BundleMetricJet<C>> {
    let g0 = random_hpd::<C>(rng, rank);
    let mut entries: Vec<Jet<C>> = g0
        .iter()
        .map(|c| Jet::constant(2 * n, degree, c.clone()))
        .collect();
    for total in 1..=2u32 {
        for p in 0..=total {
            for alpha in monomials(n, p) {
                for beta in monomials(n, total - p) {
                    for i in 0..rank {
                        for j in i..rank {
                            if !rng.random_bool(0.5) {
                                continue;
                            }
                            let c: C = small_complex(rng, 2, 8, false);
                            entries[i * rank + j].add_term(pair_key(&alpha, &beta), &c);
                            entries[j * rank + i].add_term(pair_key(&beta, &alpha), &c.conj());
                        }
                    }
                }
            }
        }
    }
    BundleMetricJet::new(n, JetMatrix::new(rank, rank, entries)?)
}

/// Exact unitary `(I − A)(I + A)⁻¹` for a random skew-Hermitian `A`.
pub fn random_unitary<C: Coefficient>(rng: &mut Rng64, n: usize) -> Vec<C> {
    let mut a = vec![C::zero(); n * n];
    for i in 0..n {
        a[i * n + i] = C::imag_unit().mul_ref(&C::from_ratio(rng.random_range(-3..=3), 4));
        for j in i + 1..n {
            let c: C = small_complex(rng, 3, 4, false);
            a[j * n + i] = -c.conj();
            a[i * n + j] = c;
        }
    }
    let shifted = |sign: i64| -> Vec<C> {
        (0..n * n)
            .map(|e| {
                let v = a[e].mul_ref(&C::from_int(sign));
                if e / n == e % n {
                    v + C::one()
                } else {
                    v
                }
            })
            .collect()
    };
    let minus = shifted(-1);
    let plus_inv = invert_scalar(n, &shifted(1)).expect("I + A is invertible for skew-Hermitian A");
    (0..n * n)
        .map(|e| {
            let (i, j) = (e / n, e % n);
            (0..n).fold(C::zero(), |acc, l| acc + minus[i * n + l].mul_ref(&plus_inv[l * n + j]))
        })
        .collect()
}

/// Sparse random polynomial jet with integer coefficients.
pub fn random_jet<C: Coefficient>(
    rng: &mut Rng64,
    num_vars: usize,
    trunc: u32,
    max_degree: u32,
    terms: usize,
) -> Jet<C> {
    let mut j = Jet::zero(num_vars, trunc);
    for _ in 0..terms {
        let d = rng.random_range(0..=max_degree.min(trunc));
        let mut exps = vec![0u32; num_vars];
        for _ in 0..d {
            exps[rng.random_range(0..num_vars)] += 1;
        }
        let c = C::from_int(rng.random_range(-4..=4));
        j.add_term(MultiIndex::from_exponents(&exps), &c);
    }
    j
}

/// Random vector expansion `A` with `n` components in `(x, y, θ)`.
pub fn random_vector_expansion<C: Coefficient>(
    rng: &mut Rng64,
    n: usize,
    order: usize,
    trunc: u32,
) -> Vec<KExpansion<C>> {
    (0..n)
        .map(|_| KExpansion {
            coeffs: (0..=order)
                .map(|_| random_jet(rng, 3 * n, trunc, trunc, 8))
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::check_reality;
    use crate::scalar::GaussianRational as Q;

    #[test]
    fn potentials_are_real_psh_and_deterministic() {
        for seed in 0..10 {
            for n in [1, 2] {
                let p = random_quartic_potential::<Q>(&mut rng(seed), n, 6).unwrap();
                check_reality(p.phi(), 0.0).unwrap();
                let again = random_quartic_potential::<Q>(&mut rng(seed), n, 6).unwrap();
                assert_eq!(p, again);
                assert!(p.phi().max_degree().unwrap() <= 4);
            }
        }
    }

    #[test]
    fn unitary_is_exactly_unitary() {
        let n = 2;
        let u = random_unitary::<Q>(&mut rng(4), n);
        for i in 0..n {
            for j in 0..n {
                let dot = (0..n).fold(Q::zero(), |acc, l| acc + u[l * n + i].conj().mul_ref(&u[l * n + j]));
                assert_eq!(dot, if i == j { Q::one() } else { Q::zero() });
            }
        }
    }

    #[test]
    fn bundle_metrics_are_valid() {
        for seed in 0..5 {
            let g = random_bundle_metric::<Q>(&mut rng(seed), 2, 2, 6).unwrap();
            assert_eq!(g.rank(), 2);
        }
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(2, 3).len(), 4);
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(1, 0), vec![vec![0]]);
    }
}
