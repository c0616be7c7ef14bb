//! Truncated multivariate power series.
//!
//! A [`Jet`] stores the coefficients of all monomials of total degree at
//! most its truncation degree. Every operation records the degree up to
//! which its result is guaranteed valid: products take the minimum of the
//! operand degrees, differentiation loses one, composition takes the
//! minimum over the chain.

mod map;
mod matrix;
mod multi_index;

pub use map::{invert_map, invert_map_with_params};
pub use matrix::JetMatrix;
pub(crate) use matrix::{det_scalar, invert_scalar};
pub use multi_index::MultiIndex;

use std::collections::{BTreeMap, HashMap};
use std::hash::{BuildHasherDefault, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Coefficient;

/// Multiplicative hasher for packed multi-indices.
#[derive(Default)]
pub(crate) struct WordHasher(u64);

impl Hasher for WordHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ b as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = (self.0.rotate_left(5) ^ v).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
    }
}

pub(crate) type IndexMap<V> = HashMap<MultiIndex, V, BuildHasherDefault<WordHasher>>;

/// Truncated power series in `num_vars` formal variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<C> {
    num_vars: usize,
    trunc: u32,
    terms: BTreeMap<MultiIndex, C>,
}

fn accumulate<C: Coefficient>(acc: &mut IndexMap<C>, key: MultiIndex, value: C) {
    match acc.get_mut(&key) {
        Some(slot) => *slot += &value,
        None => {
            acc.insert(key, value);
        }
    }
}

impl<C: Coefficient> Jet<C> {
    /// Fails when the dimensions exceed the packed multi-index capacity.
    pub fn check_dims(num_vars: usize, trunc: u32) -> Result<()> {
        if num_vars > MultiIndex::MAX_VARS {
            return Err(Error::TooManyVariables(num_vars));
        }
        if trunc > MultiIndex::MAX_EXPONENT {
            return Err(Error::DegreeTooLarge(trunc));
        }
        Ok(())
    }

    /// Panics if the dimensions fail [`Jet::check_dims`].
    pub fn zero(num_vars: usize, trunc: u32) -> Self {
        Self::check_dims(num_vars, trunc).expect("jet dimensions");
        Jet {
            num_vars,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, trunc: u32, c: C) -> Self {
        let mut j = Self::zero(num_vars, trunc);
        if !c.is_zero() {
            j.terms.insert(MultiIndex::zero(), c);
        }
        j
    }

    pub fn one(num_vars: usize, trunc: u32) -> Self {
        Self::constant(num_vars, trunc, C::one())
    }

    /// The coordinate function of variable `var` (zero if `trunc == 0`).
    pub fn var(num_vars: usize, trunc: u32, var: usize) -> Self {
        assert!(var < num_vars, "variable {var} out of range");
        let mut j = Self::zero(num_vars, trunc);
        if trunc >= 1 {
            j.terms.insert(MultiIndex::unit(var), C::one());
        }
        j
    }

    /// Sums duplicate keys; drops zeros and terms above `trunc`.
    pub fn from_terms(
        num_vars: usize,
        trunc: u32,
        terms: impl IntoIterator<Item = (MultiIndex, C)>,
    ) -> Self {
        let mut j = Self::zero(num_vars, trunc);
        for (k, c) in terms {
            if k.degree() > trunc {
                continue;
            }
            j.add_term(k, &c);
        }
        j
    }

    fn from_acc(num_vars: usize, trunc: u32, acc: IndexMap<C>) -> Self {
        Jet {
            num_vars,
            trunc,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Adds `c` to the coefficient of `key`, ignoring keys above the truncation.
    pub fn add_term(&mut self, key: MultiIndex, c: &C) {
        if key.degree() > self.trunc || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn trunc_degree(&self) -> u32 {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every stored coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &MultiIndex) -> C {
        self.terms.get(key).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeff_of(&self, exps: &[u32]) -> C {
        self.coeff(&MultiIndex::from_exponents(exps))
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&MultiIndex::zero())
    }

    /// Largest stored degree, `None` for the zero jet.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.degree()).max()
    }

    /// Smallest degree carrying a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.degree()).min()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Drops terms above `trunc` and lowers the truncation degree.
    pub fn truncate(&self, trunc: u32) -> Self {
        let trunc = trunc.min(self.trunc);
        Jet {
            num_vars: self.num_vars,
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() <= trunc)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Reinterprets the stored terms as an exact polynomial valid to `trunc`.
    pub fn with_trunc(&self, trunc: u32) -> Self {
        Self::check_dims(self.num_vars, trunc).expect("jet dimensions");
        let mut j = self.truncate(trunc);
        j.trunc = trunc;
        j
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars, self.trunc);
        }
        Jet {
            num_vars: self.num_vars,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.mul_ref(c)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(
            self.num_vars, other.num_vars,
            "jets live in different variable spaces"
        );
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        self.assert_compatible(other);
        let trunc = self.trunc.min(other.trunc);
        let mut out = self.truncate(trunc);
        for (k, c) in &other.terms {
            if k.degree() > trunc {
                continue;
            }
            if negate {
                out.add_term(*k, &-c.clone());
            } else {
                out.add_term(*k, c);
            }
        }
        out
    }

    /// Product truncated at `min(trunc, self.trunc, other.trunc)`.
    pub fn mul_truncated(&self, other: &Self, trunc: u32) -> Self {
        self.assert_compatible(other);
        let trunc = trunc.min(self.trunc).min(other.trunc);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.num_vars, trunc);
        }
        let mut rhs: Vec<(u32, MultiIndex, &C)> = other
            .terms
            .iter()
            .map(|(k, c)| (k.degree(), *k, c))
            .filter(|(d, _, _)| *d <= trunc)
            .collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc = IndexMap::default();
        for (ka, ca) in &self.terms {
            let da = ka.degree();
            if da > trunc {
                continue;
            }
            let room = trunc - da;
            for (db, kb, cb) in &rhs {
                if *db > room {
                    break;
                }
                accumulate(&mut acc, ka.add(*kb), ca.mul_ref(cb));
            }
        }
        Self::from_acc(self.num_vars, trunc, acc)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.num_vars, self.trunc);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative; the result is valid one degree lower.
    pub fn differentiate(&self, var: usize) -> Self {
        assert!(var < self.num_vars, "variable {var} out of range");
        let trunc = self.trunc.saturating_sub(1);
        let mut out = Self::zero(self.num_vars, trunc);
        for (k, c) in &self.terms {
            let e = k.get(var);
            if e == 0 {
                continue;
            }
            let key = k.lower(var).expect("nonzero exponent");
            if key.degree() <= trunc {
                out.terms.insert(key, c.mul_ref(&C::from_int(e as i64)));
            }
        }
        out
    }

    /// Checked variant of [`Jet::differentiate`].
    pub fn try_differentiate(&self, var: usize) -> Result<Self> {
        if var >= self.num_vars {
            return Err(Error::VarOutOfRange {
                var,
                num_vars: self.num_vars,
            });
        }
        Ok(self.differentiate(var))
    }

    /// Maps variable `i` to variable `map[i]` of a space with `num_vars`
    /// variables. Several variables may share a target, which realizes
    /// restrictions such as `y ↦ x`.
    pub fn relabel(&self, num_vars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.num_vars, "relabel map length");
        assert!(map.iter().all(|&t| t < num_vars));
        let mut out = Self::zero(num_vars, self.trunc);
        for (k, c) in &self.terms {
            let mut key = MultiIndex::zero();
            for (i, &target) in map.iter().enumerate() {
                let e = k.get(i);
                if e > 0 {
                    key = key.with(target, key.get(target) + e);
                }
            }
            out.add_term(key, c);
        }
        out
    }

    /// Truncated substitution `self(args[0], …, args[m-1])`.
    pub fn compose(&self, args: &[Jet<C>]) -> Result<Self> {
        self.compose_to(args, u32::MAX)
    }

    /// Composition computed only up to degree `trunc`.
    ///
    /// Arguments that are bare coordinate functions are handled as
    /// exponent shifts; the others go through a memoized power table.
    pub fn compose_to(&self, args: &[Jet<C>], trunc: u32) -> Result<Self> {
        if args.len() != self.num_vars {
            return Err(Error::ArityMismatch {
                expected: self.num_vars,
                got: args.len(),
            });
        }
        let Some(first) = args.first() else {
            return Ok(self.clone());
        };
        let out_vars = first.num_vars;
        let mut out_trunc = trunc.min(self.trunc);
        for (index, a) in args.iter().enumerate() {
            if a.num_vars != out_vars {
                return Err(Error::VarCountMismatch {
                    left: out_vars,
                    right: a.num_vars,
                });
            }
            if !a.constant_term().is_zero() {
                return Err(Error::NonzeroConstantTerm { index });
            }
            out_trunc = out_trunc.min(a.trunc);
        }

        let pure: Vec<Option<usize>> = args.iter().map(|a| a.as_coordinate()).collect();
        let general: Vec<usize> = (0..args.len()).filter(|&i| pure[i].is_none()).collect();

        // powers of the non-coordinate arguments, keyed by their exponent sub-vector
        let mut memo: HashMap<Vec<u32>, Jet<C>> = HashMap::new();
        memo.insert(vec![0; general.len()], Jet::one(out_vars, out_trunc));

        let mut acc = IndexMap::default();
        for (alpha, c) in &self.terms {
            if alpha.degree() > out_trunc {
                continue;
            }
            let mut shift = MultiIndex::zero();
            for (i, p) in pure.iter().enumerate() {
                if let Some(t) = p {
                    let e = alpha.get(i);
                    if e > 0 {
                        shift = shift.with(*t, shift.get(*t) + e);
                    }
                }
            }
            let shift_deg = shift.degree();
            let gamma: Vec<u32> = general.iter().map(|&i| alpha.get(i)).collect();
            let gamma_deg: u32 = gamma.iter().sum();
            if shift_deg + gamma_deg > out_trunc {
                continue;
            }
            let base = Self::memo_power(&mut memo, &gamma, &general, args, out_trunc);
            let room = out_trunc - shift_deg;
            for (beta, d) in &base.terms {
                if beta.degree() <= room {
                    accumulate(&mut acc, beta.add(shift), c.mul_ref(d));
                }
            }
        }
        Ok(Self::from_acc(out_vars, out_trunc, acc))
    }

    fn memo_power<'m>(
        memo: &'m mut HashMap<Vec<u32>, Jet<C>>,
        gamma: &[u32],
        general: &[usize],
        args: &[Jet<C>],
        trunc: u32,
    ) -> &'m Jet<C> {
        if !memo.contains_key(gamma) {
            let p = gamma.iter().position(|&e| e > 0).expect("nonzero exponent");
            let mut lower = gamma.to_vec();
            lower[p] -= 1;
            let prev = Self::memo_power(memo, &lower, general, args, trunc).clone();
            let next = prev.mul_truncated(&args[general[p]], trunc);
            memo.insert(gamma.to_vec(), next);
        }
        &memo[gamma]
    }

    /// `Some(v)` when this jet is exactly the coordinate function of variable `v`.
    pub fn as_coordinate(&self) -> Option<usize> {
        if self.terms.len() != 1 || self.trunc == 0 {
            return None;
        }
        let (k, c) = self.terms.iter().next()?;
        if k.degree() != 1 || *c != C::one() {
            return None;
        }
        (0..self.num_vars).find(|&v| k.get(v) == 1)
    }

    /// `Σ coeffs[j]·selfʲ` for a jet without constant term (Horner).
    pub fn apply_series(&self, coeffs: &[C]) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm { index: 0 });
        }
        let take = coeffs.len().min(self.trunc as usize + 1);
        let mut out = Self::zero(self.num_vars, self.trunc);
        for c in coeffs[..take].iter().rev() {
            out = &out * self;
            out.add_term(MultiIndex::zero(), c);
        }
        Ok(out)
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn invert_unit(&self) -> Result<Self> {
        let c = self.constant_term();
        let c_inv = c.inv().ok_or(Error::SingularDivision)?;
        // self = c(1 + h)  ⇒  self⁻¹ = c⁻¹ Σ (-h)ʲ
        let mut h = self.scale(&c_inv);
        h.terms.remove(&MultiIndex::zero());
        let alternating: Vec<C> = (0..=self.trunc)
            .map(|j| if j % 2 == 0 { C::one() } else { -C::one() })
            .collect();
        Ok(h.apply_series(&alternating)?.scale(&c_inv))
    }

    /// Exponential; exact mode requires a zero constant term.
    pub fn exp(&self) -> Result<Self> {
        let c = self.constant_term();
        let ec = c
            .exp()
            .ok_or_else(|| Error::NotExact("exp of a nonzero constant".into()))?;
        let mut h = self.clone();
        h.terms.remove(&MultiIndex::zero());
        let mut coeffs = Vec::with_capacity(self.trunc as usize + 1);
        let mut fact: C = C::one();
        for j in 0..=self.trunc as i64 {
            if j > 0 {
                fact = fact.mul_ref(&C::from_ratio(1, j));
            }
            coeffs.push(fact.clone());
        }
        Ok(h.apply_series(&coeffs)?.scale(&ec))
    }

    /// Natural logarithm; exact mode requires constant term one.
    pub fn log(&self) -> Result<Self> {
        let c = self.constant_term();
        let c_inv = c.inv().ok_or(Error::SingularDivision)?;
        let lc = c
            .ln()
            .ok_or_else(|| Error::NotExact("log of a constant other than one".into()))?;
        let mut u = self.scale(&c_inv);
        u.terms.remove(&MultiIndex::zero());
        let coeffs: Vec<C> = (0..=self.trunc as i64)
            .map(|j| match j {
                0 => C::zero(),
                _ if j % 2 == 1 => C::from_ratio(1, j),
                _ => C::from_ratio(-1, j),
            })
            .collect();
        let mut out = u.apply_series(&coeffs)?;
        out.add_term(MultiIndex::zero(), &lc);
        Ok(out)
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Jet<D> {
        Jet {
            num_vars: self.num_vars,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn to_float(&self) -> Jet<Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }

    pub fn conj_coeffs(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    /// Swaps the two variable blocks of a `2n`-variable jet and conjugates
    /// the coefficients. A jet in `(x, x̄)` is real-valued exactly when it is
    /// fixed by this map.
    pub fn hermitian_mirror(&self) -> Self {
        assert!(self.num_vars.is_multiple_of(2), "mirror needs an even variable count");
        let n = self.num_vars / 2;
        let mut out = Self::zero(self.num_vars, self.trunc);
        for (k, c) in &self.terms {
            let key = k.slice(0, n).shift(n).add(k.slice(n, n));
            out.terms.insert(key, c.conj());
        }
        out
    }

    /// Coefficient-wise comparison; exact equality in exact mode.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.num_vars != other.num_vars {
            return false;
        }
        if C::EXACT {
            let t = self.trunc.min(other.trunc);
            return self.truncate(t).terms == other.truncate(t).terms;
        }
        (self - other).max_abs_coeff() <= tol
    }

    /// Evaluates the truncated polynomial at a complex point.
    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.num_vars, "evaluation point dimension");
        let mut powers: Vec<Vec<Complex64>> = point
            .iter()
            .map(|p| {
                let mut v = vec![Complex64::new(1.0, 0.0)];
                for _ in 0..self.trunc {
                    let last = *v.last().unwrap();
                    v.push(last * p);
                }
                v
            })
            .collect();
        if powers.is_empty() {
            powers.push(vec![Complex64::new(1.0, 0.0)]);
        }
        self.terms
            .iter()
            .map(|(k, c)| {
                (0..self.num_vars).fold(c.to_c64(), |acc, v| acc * powers[v][k.get(v) as usize])
            })
            .sum()
    }

    /// Exact evaluation at a point of the coefficient field.
    pub fn eval(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.num_vars, "evaluation point dimension");
        let mut total = C::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for (v, p) in point.iter().enumerate() {
                for _ in 0..k.get(v) {
                    t *= p;
                }
            }
            total += &t;
        }
        total
    }
}

impl<C: Coefficient> Add for &Jet<C> {
    type Output = Jet<C>;
    fn add(self, o: &Jet<C>) -> Jet<C> {
        self.combine(o, false)
    }
}

impl<C: Coefficient> Sub for &Jet<C> {
    type Output = Jet<C>;
    fn sub(self, o: &Jet<C>) -> Jet<C> {
        self.combine(o, true)
    }
}

impl<C: Coefficient> Mul for &Jet<C> {
    type Output = Jet<C>;
    fn mul(self, o: &Jet<C>) -> Jet<C> {
        self.mul_truncated(o, u32::MAX)
    }
}

impl<C: Coefficient> Neg for &Jet<C> {
    type Output = Jet<C>;
    fn neg(self) -> Jet<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coefficient> Add for Jet<C> {
    type Output = Jet<C>;
    fn add(self, o: Jet<C>) -> Jet<C> {
        &self + &o
    }
}

impl<C: Coefficient> Sub for Jet<C> {
    type Output = Jet<C>;
    fn sub(self, o: Jet<C>) -> Jet<C> {
        &self - &o
    }
}

impl<C: Coefficient> Mul for Jet<C> {
    type Output = Jet<C>;
    fn mul(self, o: Jet<C>) -> Jet<C> {
        &self * &o
    }
}
