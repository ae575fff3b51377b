//! Sparse exterior forms on `ℝ^n` with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::blade::{Blade, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A (possibly inhomogeneous) form `Σ c_B e_B` with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    n: usize,
    terms: BTreeMap<Blade, Scalar>,
}

impl Form {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_DIM, "ambient dimension {n} exceeds {MAX_DIM}");
        Form { n, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, c: Scalar) -> Self {
        Self::term(n, Blade::SCALAR, c)
    }

    pub fn term(n: usize, blade: Blade, c: Scalar) -> Self {
        let mut f = Self::zero(n);
        f.add_term(blade, c);
        f
    }

    pub fn blade(n: usize, blade: Blade) -> Self {
        Self::term(n, blade, Scalar::one())
    }

    /// Basis 1-form `e_{i+1}`.
    pub fn basis_vector(n: usize, i: usize) -> Self {
        assert!(i < n);
        Self::blade(n, Blade::vector(i))
    }

    /// 1-form `Σ c_i e_{i+1}`.
    pub fn vector(coeffs: &[Scalar]) -> Self {
        let mut f = Self::zero(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            f.add_term(Blade::vector(i), c.clone());
        }
        f
    }

    /// `c · e_{i1} ∧ … ∧ e_{ip}` for arbitrary distinct zero-based indices.
    pub fn from_indices(n: usize, indices: &[usize], c: Scalar) -> Self {
        match Blade::from_indices(indices) {
            Some((s, b)) => Self::term(n, b, if s < 0 { -c } else { c }),
            None => Self::zero(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &Scalar)> + '_ {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn coefficient(&self, blade: Blade) -> Scalar {
        self.terms.get(&blade).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, blade: Blade, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert!(u64::from(blade.bits()) >> self.n == 0, "blade outside ambient dimension");
        match self.terms.entry(blade) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_signed(&mut self, sign: i8, blade: Blade, c: &Scalar) {
        self.add_term(blade, if sign < 0 { -c } else { c.clone() });
    }

    pub fn add_scaled(&mut self, other: &Form, c: &Scalar) {
        debug_assert_eq!(self.n, other.n);
        if c.is_zero() {
            return;
        }
        for (b, v) in other.terms() {
            self.add_term(b, v * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Form {
        let mut out = Form::zero(self.n);
        out.add_scaled(self, c);
        out
    }

    /// The common degree of all terms, or `None` if inhomogeneous.
    /// The zero form has no well-defined degree and returns `None`.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|b| b.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self, p: usize) -> bool {
        self.terms.keys().all(|b| b.degree() == p)
    }

    /// Homogeneous component of degree `p`.
    pub fn component(&self, p: usize) -> Form {
        Form {
            n: self.n,
            terms: self.terms.iter().filter(|(b, _)| b.degree() == p).map(|(b, c)| (*b, c.clone())).collect(),
        }
    }

    fn check_dim(&self, other: &Form) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    fn check_vector(&self) -> Result<()> {
        if !self.is_homogeneous(1) {
            return Err(match self.degree() {
                Some(d) => Error::DegreeMismatch { expected: 1, found: d },
                None => Error::NotHomogeneous,
            });
        }
        Ok(())
    }

    /// Exterior product `self ∧ other`.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check_dim(other)?;
        let mut out = Form::zero(self.n);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if let Some((s, ab)) = a.wedge(b) {
                    out.add_signed(s, ab, &(ca * cb));
                }
            }
        }
        Ok(out)
    }

    /// Wedge product `x ∧ self` with a 1-form `x`.
    pub fn wedge_vector(&self, x: &Form) -> Result<Form> {
        self.check_dim(x)?;
        x.check_vector()?;
        Ok(wedge_vector_unchecked(x, self))
    }

    /// Interior product `x ⌟ self` with a 1-form `x` (vectors and 1-forms identified).
    pub fn contract_vector(&self, x: &Form) -> Result<Form> {
        self.check_dim(x)?;
        x.check_vector()?;
        Ok(contract_vector_unchecked(x, self))
    }

    /// Orthonormal-blade inner product of two forms of the same degree.
    pub fn inner(&self, other: &Form) -> Result<Scalar> {
        self.check_dim(other)?;
        if let (Some(p), Some(q)) = (self.degree(), other.degree()) {
            if p != q {
                return Err(Error::DegreeMismatch { expected: p, found: q });
            }
        } else if !(self.is_zero() || other.is_zero()) {
            return Err(Error::NotHomogeneous);
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Form) -> Scalar {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.terms().filter_map(|(b, c)| large.terms.get(&b).map(|d| c * d)).sum()
    }

    /// Standard action `w • self` of a 2-form `w ∈ 𝔰𝔬(n)`, extending
    /// `(X ∧ Y) • = Y ∧ X ⌟ − X ∧ Y ⌟`.
    pub fn so_action(&self, w: &Form) -> Result<Form> {
        self.check_dim(w)?;
        if !w.is_homogeneous(2) {
            return Err(match w.degree() {
                Some(d) => Error::DegreeMismatch { expected: 2, found: d },
                None => Error::NotHomogeneous,
            });
        }
        Ok(so_action_unchecked(w, self))
    }

    pub fn squared_norm(&self) -> Scalar {
        self.terms.values().map(|c| c * c).sum()
    }
}

pub(crate) fn wedge_vector_unchecked(x: &Form, u: &Form) -> Form {
    let mut out = Form::zero(u.n);
    for (xb, xc) in x.terms() {
        let i = xb.bits().trailing_zeros() as usize;
        for (b, c) in u.terms() {
            if let Some((s, nb)) = b.wedge_vector(i) {
                out.add_signed(s, nb, &(xc * c));
            }
        }
    }
    out
}

pub(crate) fn contract_vector_unchecked(x: &Form, u: &Form) -> Form {
    let mut out = Form::zero(u.n);
    for (xb, xc) in x.terms() {
        let i = xb.bits().trailing_zeros() as usize;
        for (b, c) in u.terms() {
            if let Some((s, nb)) = b.contract_vector(i) {
                out.add_signed(s, nb, &(xc * c));
            }
        }
    }
    out
}

/// `(e_i ∧ e_j) •` applied to a single blade, accumulated into `out` with weight `c`.
pub(crate) fn so_pair_on_blade(i: usize, j: usize, b: Blade, c: &Scalar, out: &mut Form) {
    // e_j ∧ e_i ⌟ b
    if let Some((s1, b1)) = b.contract_vector(i) {
        if let Some((s2, b2)) = b1.wedge_vector(j) {
            out.add_signed(s1 * s2, b2, c);
        }
    }
    // − e_i ∧ e_j ⌟ b
    if let Some((s1, b1)) = b.contract_vector(j) {
        if let Some((s2, b2)) = b1.wedge_vector(i) {
            out.add_signed(-s1 * s2, b2, c);
        }
    }
}

pub(crate) fn so_action_unchecked(w: &Form, u: &Form) -> Form {
    let mut out = Form::zero(u.n);
    for (wb, wc) in w.terms() {
        let mut idx = wb.indices();
        let i = idx.next().expect("2-blade");
        let j = idx.next().expect("2-blade");
        for (b, c) in u.terms() {
            so_pair_on_blade(i, j, b, &(wc * c), &mut out);
        }
    }
    out
}

/// `x ∧ u` for a 1-form `x`.
pub fn wedge(x: &Form, u: &Form) -> Result<Form> {
    u.wedge_vector(x)
}

/// `x ⌟ u` for a 1-form `x`; zero on 0-forms.
pub fn contract(x: &Form, u: &Form) -> Result<Form> {
    u.contract_vector(x)
}

pub fn inner(u: &Form, v: &Form) -> Result<Scalar> {
    u.inner(v)
}

/// `w • u` for a 2-form `w`.
pub fn so_action(w: &Form, u: &Form) -> Result<Form> {
    u.so_action(w)
}

impl Add<&Form> for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        assert_eq!(self.n, rhs.n, "ambient dimension mismatch");
        let mut out = self.clone();
        for (b, c) in rhs.terms() {
            out.add_term(b, c.clone());
        }
        out
    }
}

impl Sub<&Form> for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        assert_eq!(self.n, rhs.n, "ambient dimension mismatch");
        let mut out = self.clone();
        for (b, c) in rhs.terms() {
            out.add_term(b, -c);
        }
        out
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scaled(&-Scalar::one())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (b, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}){b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn e(n: usize, idx: &[usize]) -> Form {
        let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        Form::from_indices(n, &zero_based, Scalar::one())
    }

    #[test]
    fn wedge_examples() {
        let n = 4;
        assert_eq!(e(n, &[2]).wedge_vector(&e(n, &[1])).unwrap(), e(n, &[1, 2]));
        assert!(e(n, &[1]).wedge_vector(&e(n, &[1])).unwrap().is_zero());
        let r = e(n, &[1, 3]).wedge_vector(&e(n, &[2])).unwrap();
        assert_eq!(r, -&e(n, &[1, 2, 3]));
    }

    #[test]
    fn contract_examples() {
        let n = 4;
        assert_eq!(e(n, &[1, 2]).contract_vector(&e(n, &[1])).unwrap(), e(n, &[2]));
        assert!(e(n, &[1, 2]).contract_vector(&e(n, &[3])).unwrap().is_zero());
        assert_eq!(e(n, &[1, 2, 3]).contract_vector(&e(n, &[2])).unwrap(), -&e(n, &[1, 3]));
        assert!(Form::scalar(n, rat(3, 1)).contract_vector(&e(n, &[1])).unwrap().is_zero());
    }

    #[test]
    fn inner_examples() {
        let n = 4;
        assert_eq!(e(n, &[1, 2]).inner(&e(n, &[1, 2])).unwrap(), Scalar::one());
        assert_eq!(e(n, &[1, 2]).inner(&e(n, &[1, 3])).unwrap(), Scalar::zero());
        assert!(matches!(e(n, &[1, 2]).inner(&e(n, &[1])), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn so_action_examples() {
        let n = 4;
        let w = e(n, &[1, 2]);
        assert_eq!(e(n, &[1]).so_action(&w).unwrap(), e(n, &[2]));
        assert_eq!(e(n, &[2]).so_action(&w).unwrap(), -&e(n, &[1]));
        assert!(e(n, &[3]).so_action(&w).unwrap().is_zero());
        assert!(e(n, &[1]).so_action(&e(n, &[1, 2, 3])).is_err());
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(e(4, &[1]).wedge_vector(&e(5, &[1])), Err(Error::DimensionMismatch { left: 4, right: 5 })));
        assert!(e(4, &[1]).wedge_vector(&e(4, &[1, 2])).is_err());
    }
}
