use crate::error::{Error, Result};
use crate::scalar::Coefficient;

use super::matrix::invert_scalar;
use super::{Jet, MultiIndex};

/// Formal inverse of a map `F: (Cᵐ,0) → (Cᵐ,0)` given by `m` jets in `m`
/// variables with zero constant terms.
///
/// The result satisfies `F∘G = id` and `G∘F = id` to the truncation degree
/// of `F`.
pub fn invert_map<C: Coefficient>(f: &[Jet<C>]) -> Result<Vec<Jet<C>>> {
    invert_map_with_params(f, 0)
}

/// Solves `F(p, G(p, w)) = w` for `G`, where `F` consists of `m` jets in
/// `(p₁…p_q, v₁…vₘ)` and `q = num_params`. The parameters pass through
/// unchanged; `G` lives in `(p, w)`.
///
/// Solved degree by degree: with `A = ∂F/∂v(0)`, iterate
/// `G ← G − A⁻¹(F(p, G) − w)` once per degree starting from `G = 0`; each
/// pass fixes the next homogeneous component.
pub fn invert_map_with_params<C: Coefficient>(
    f: &[Jet<C>],
    num_params: usize,
) -> Result<Vec<Jet<C>>> {
    let m = f.len();
    let nv = num_params + m;
    if m == 0 {
        return Ok(Vec::new());
    }
    for (index, fi) in f.iter().enumerate() {
        if fi.num_vars() != nv {
            return Err(Error::ArityMismatch {
                expected: nv,
                got: fi.num_vars(),
            });
        }
        if !fi.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm { index });
        }
    }
    let trunc = f.iter().map(|fi| fi.trunc_degree()).min().unwrap();
    if trunc == 0 {
        return Ok(vec![Jet::zero(nv, 0); m]);
    }

    let linear: Vec<C> = (0..m * m)
        .map(|k| f[k / m].coeff(&MultiIndex::unit(num_params + k % m)))
        .collect();
    let a_inv = invert_scalar(m, &linear).ok_or(Error::SingularJacobian)?;

    let w: Vec<Jet<C>> = (0..m).map(|i| Jet::var(nv, trunc, num_params + i)).collect();
    let mut g: Vec<Jet<C>> = vec![Jet::zero(nv, trunc); m];
    for t in 1..=trunc {
        let args: Vec<Jet<C>> = (0..num_params)
            .map(|i| Jet::var(nv, trunc, i))
            .chain(g.iter().cloned())
            .collect();
        let residual: Vec<Jet<C>> = f
            .iter()
            .zip(&w)
            .map(|(fi, wi)| Ok(&fi.compose_to(&args, t)? - &wi.truncate(t)))
            .collect::<Result<_>>()?;
        // only the degree-t component of the residual is nonzero
        for (i, gi) in g.iter_mut().enumerate() {
            let mut corr = Jet::zero(nv, t);
            for (j, rj) in residual.iter().enumerate() {
                let c = &a_inv[i * m + j];
                if !c.is_zero() {
                    corr = &corr + &rj.scale(c);
                }
            }
            *gi = (&*gi - &corr.with_trunc(trunc)).with_trunc(trunc);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn identity_inverts_to_identity() {
        let id: Vec<Jet<Q>> = (0..3).map(|i| Jet::var(3, 5, i)).collect();
        assert_eq!(invert_map(&id).unwrap(), id);
    }

    #[test]
    fn doubling_map_inverts_to_halving() {
        let f = vec![Jet::<Q>::var(1, 6, 0).scale(&q(2, 1))];
        let g = invert_map(&f).unwrap();
        assert_eq!(g[0], Jet::var(1, 6, 0).scale(&q(1, 2)));
    }

    #[test]
    fn nonlinear_roundtrip_both_ways() {
        let x = Jet::<Q>::var(2, 7, 0);
        let y = Jet::<Q>::var(2, 7, 1);
        let f = vec![
            &(&x + &(&y * &y)) + &(&x * &y).scale(&q(1, 3)),
            &(&y.scale(&q(2, 1)) - &(&x * &x)) + &(&x * &(&x * &y)),
        ];
        let g = invert_map(&f).unwrap();
        let fg: Vec<_> = f.iter().map(|fi| fi.compose(&g).unwrap()).collect();
        let gf: Vec<_> = g.iter().map(|gi| gi.compose(&f).unwrap()).collect();
        assert_eq!(fg, vec![x.clone(), y.clone()]);
        assert_eq!(gf, vec![x, y]);
    }

    #[test]
    fn parametric_inverse_solves_for_unknowns() {
        // f(p, v) = v + p·v + p² ; solve f(p, g(p, w)) = w
        let p = Jet::<Q>::var(2, 6, 0);
        let v = Jet::<Q>::var(2, 6, 1);
        let f = vec![&(&v + &(&p * &v)) + &(&p * &p)];
        let g = invert_map_with_params(&f, 1).unwrap();
        let back = f[0].compose(&[p.clone(), g[0].clone()]).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn singular_jacobian_is_rejected() {
        let x = Jet::<Q>::var(2, 4, 0);
        let f = vec![x.clone(), &x * &x];
        assert_eq!(invert_map(&f).unwrap_err(), Error::SingularJacobian);
    }
}
