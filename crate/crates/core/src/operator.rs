//! Degree-homogeneous linear operators on forms.
//!
//! [`LinearOperator`] is the exact sparse matrix of a map `Λ^p → Λ^q` in the
//! canonical blade bases. [`Op`] is the abstract, degree-shifting operator that
//! can be materialized on any degree; composition and sums track the degree
//! bookkeeping so identities can be written the way they read on paper.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use crate::blade::{basis, form_dim, Blade};
use crate::error::{Error, Result};
use crate::form::{self, Form};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

type Column = Vec<(u32, Scalar)>;

/// Exact sparse matrix of a linear map `Λ^p(ℝ^n) → Λ^q(ℝ^n)`, stored by column.
///
/// The target degree may fall outside `[0, n]`, in which case the target
/// space is zero-dimensional and every column is empty.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearOperator {
    n: usize,
    source: usize,
    target: i32,
    cols: Vec<Column>,
}

fn sorted_column(acc: HashMap<u32, Scalar>) -> Column {
    let mut col: Column = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    col.sort_unstable_by_key(|(r, _)| *r);
    col
}

impl LinearOperator {
    pub fn zero(n: usize, source: usize, target: i32) -> Self {
        LinearOperator { n, source, target, cols: vec![Vec::new(); form_dim(n, source as i32)] }
    }

    pub fn identity(n: usize, p: usize) -> Self {
        Self::scalar(n, p, &Scalar::one())
    }

    pub fn scalar(n: usize, p: usize, c: &Scalar) -> Self {
        let dim = form_dim(n, p as i32);
        let cols =
            if c.is_zero() { vec![Vec::new(); dim] } else { (0..dim).map(|j| vec![(j as u32, c.clone())]).collect() };
        LinearOperator { n, source: p, target: p as i32, cols }
    }

    /// Matrix whose `j`-th column is `f` applied to the `j`-th canonical blade.
    /// `f` must return forms homogeneous of degree `p + shift`.
    pub fn from_blade_fn(n: usize, p: usize, shift: i32, f: impl Fn(Blade) -> Form) -> Self {
        let target = p as i32 + shift;
        let rows = form_dim(n, target);
        let cols = basis(n, p)
            .into_iter()
            .map(|b| {
                if rows == 0 {
                    return Vec::new();
                }
                let img = f(b);
                debug_assert!(img.is_homogeneous(target as usize));
                let mut col: Column = img.terms().map(|(bb, c)| (bb.rank() as u32, c.clone())).collect();
                col.sort_unstable_by_key(|(r, _)| *r);
                col
            })
            .collect();
        LinearOperator { n, source: p, target, cols }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn source_degree(&self) -> usize {
        self.source
    }

    pub fn target_degree(&self) -> i32 {
        self.target
    }

    pub fn nrows(&self) -> usize {
        form_dim(self.n, self.target)
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn entry(&self, row: usize, col: usize) -> Scalar {
        self.cols[col]
            .binary_search_by_key(&(row as u32), |(r, _)| *r)
            .map(|k| self.cols[col][k].1.clone())
            .unwrap_or_else(|_| Scalar::zero())
    }

    /// Largest absolute entry, zero for the zero matrix.
    pub fn max_abs(&self) -> Scalar {
        self.cols.iter().flatten().map(|(_, c)| c.abs()).max().unwrap_or_else(Scalar::zero)
    }

    /// Image of the `j`-th canonical blade.
    pub fn column(&self, j: usize) -> Form {
        let mut out = Form::zero(self.n);
        if self.target < 0 {
            return out;
        }
        let target_basis = basis(self.n, self.target as usize);
        for (r, c) in &self.cols[j] {
            out.add_term(target_basis[*r as usize], c.clone());
        }
        out
    }

    /// Apply to a form homogeneous of the source degree.
    pub fn apply(&self, u: &Form) -> Result<Form> {
        if u.dim() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: u.dim() });
        }
        if !u.is_homogeneous(self.source) {
            return Err(match u.degree() {
                Some(d) => Error::DegreeMismatch { expected: self.source, found: d },
                None => Error::NotHomogeneous,
            });
        }
        Ok(self.apply_unchecked(u))
    }

    pub(crate) fn apply_unchecked(&self, u: &Form) -> Form {
        let mut out = Form::zero(self.n);
        if self.target < 0 || self.target as usize > self.n {
            return out;
        }
        let t = self.target as usize;
        for (b, c) in u.terms() {
            for (r, v) in &self.cols[b.rank()] {
                out.add_term(Blade::unrank(*r as usize, t), v * c);
            }
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearOperator) -> LinearOperator {
        assert_eq!(self.n, inner.n, "ambient dimension mismatch");
        let target = inner.target + (self.target - self.source as i32);
        if inner.nrows() == 0 {
            return LinearOperator::zero(self.n, inner.source, target);
        }
        assert_eq!(inner.target, self.source as i32, "composition degree mismatch");
        let cols = inner
            .cols
            .iter()
            .map(|col| {
                let mut acc: HashMap<u32, Scalar> = HashMap::new();
                for (k, a) in col {
                    for (r, b) in &self.cols[*k as usize] {
                        *acc.entry(*r).or_insert_with(Scalar::zero) += a * b;
                    }
                }
                sorted_column(acc)
            })
            .collect();
        LinearOperator { n: self.n, source: inner.source, target, cols }
    }

    fn combine(&self, other: &LinearOperator, scale: &Scalar) -> LinearOperator {
        assert_eq!(
            (self.n, self.source, self.target),
            (other.n, other.source, other.target),
            "operator shape mismatch"
        );
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut acc: HashMap<u32, Scalar> = a.iter().cloned().collect();
                for (r, v) in b {
                    *acc.entry(*r).or_insert_with(Scalar::zero) += v * scale;
                }
                sorted_column(acc)
            })
            .collect();
        LinearOperator { n: self.n, source: self.source, target: self.target, cols }
    }

    pub fn scaled(&self, c: &Scalar) -> LinearOperator {
        if c.is_zero() {
            return LinearOperator::zero(self.n, self.source, self.target);
        }
        let cols = self.cols.iter().map(|col| col.iter().map(|(r, v)| (*r, v * c)).collect()).collect();
        LinearOperator { n: self.n, source: self.source, target: self.target, cols }
    }

    /// Transpose, i.e. the adjoint under the orthonormal-blade pairing.
    pub fn transpose(&self) -> LinearOperator {
        assert!(self.target >= 0 && self.target as usize <= self.n, "transpose of a map into a zero space");
        let rows = self.nrows();
        let mut cols: Vec<Column> = vec![Vec::new(); rows];
        for (j, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                cols[*r as usize].push((j as u32, v.clone()));
            }
        }
        LinearOperator { n: self.n, source: self.target as usize, target: self.source as i32, cols }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.nrows(), self.ncols());
        for (j, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                m[(*r as usize, j)] = v.clone();
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.to_dense().rank()
    }

    pub fn kernel_dim(&self) -> usize {
        self.ncols() - self.rank()
    }
}

impl Add<&LinearOperator> for &LinearOperator {
    type Output = LinearOperator;
    fn add(self, rhs: &LinearOperator) -> LinearOperator {
        self.combine(rhs, &Scalar::one())
    }
}

impl Sub<&LinearOperator> for &LinearOperator {
    type Output = LinearOperator;
    fn sub(self, rhs: &LinearOperator) -> LinearOperator {
        self.combine(rhs, &-Scalar::one())
    }
}

impl Mul<&LinearOperator> for &LinearOperator {
    type Output = LinearOperator;
    fn mul(self, rhs: &LinearOperator) -> LinearOperator {
        self.compose(rhs)
    }
}

impl fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LinearOperator(n={}, {}→{}, {}x{}, nnz={})",
            self.n,
            self.source,
            self.target,
            self.nrows(),
            self.ncols(),
            self.nnz()
        )
    }
}

/// Materialize an arbitrary linear map given by its action on forms.
///
/// The target degree is inferred from the images; an image that is not
/// homogeneous, or images of differing degrees, are rejected.
pub fn materialize(n: usize, p: usize, f: impl Fn(&Form) -> Form) -> Result<LinearOperator> {
    if p > n {
        return Err(Error::InvalidParameter(format!("degree {p} exceeds dimension {n}")));
    }
    let images: Vec<Form> = basis(n, p).into_iter().map(|b| f(&Form::blade(n, b))).collect();
    let mut target: Option<usize> = None;
    for img in &images {
        if img.is_zero() {
            continue;
        }
        let d = img.degree().ok_or(Error::NotHomogeneous)?;
        match target {
            None => target = Some(d),
            Some(t) if t != d => return Err(Error::NotHomogeneous),
            _ => {}
        }
    }
    // an identically zero map is taken as degree-preserving
    let target = target.unwrap_or(p);
    let cols = images
        .iter()
        .map(|img| {
            let mut col: Column = img.terms().map(|(b, c)| (b.rank() as u32, c.clone())).collect();
            col.sort_unstable_by_key(|(r, _)| *r);
            col
        })
        .collect();
    Ok(LinearOperator { n, source: p, target: target as i32, cols })
}

type Kernel = dyn Fn(usize) -> LinearOperator + Send + Sync;

/// An abstract linear operator on `Λ^•(ℝ^n)` shifting degree by a fixed amount.
#[derive(Clone)]
pub struct Op {
    n: usize,
    shift: i32,
    kernel: Arc<Kernel>,
}

impl Op {
    pub fn new(n: usize, shift: i32, kernel: impl Fn(usize) -> LinearOperator + Send + Sync + 'static) -> Self {
        Op { n, shift, kernel: Arc::new(kernel) }
    }

    /// Operator defined by its action on canonical blades.
    pub fn from_blade_fn(n: usize, shift: i32, f: impl Fn(Blade) -> Form + Send + Sync + 'static) -> Self {
        Op::new(n, shift, move |p| LinearOperator::from_blade_fn(n, p, shift, &f))
    }

    pub fn identity(n: usize) -> Self {
        Op::new(n, 0, move |p| LinearOperator::identity(n, p))
    }

    pub fn scalar(n: usize, c: Scalar) -> Self {
        Op::new(n, 0, move |p| LinearOperator::scalar(n, p, &c))
    }

    pub fn zero(n: usize, shift: i32) -> Self {
        Op::new(n, shift, move |p| LinearOperator::zero(n, p, p as i32 + shift))
    }

    /// `x ∧ ·` for a 1-form `x`.
    pub fn wedge(x: &Form) -> Self {
        assert!(x.is_homogeneous(1), "wedge operator needs a 1-form");
        let x = x.clone();
        let n = x.dim();
        Op::from_blade_fn(n, 1, move |b| form::wedge_vector_unchecked(&x, &Form::blade(n, b)))
    }

    /// `x ⌟ ·` for a 1-form `x`.
    pub fn contract(x: &Form) -> Self {
        assert!(x.is_homogeneous(1), "contraction operator needs a 1-form");
        let x = x.clone();
        let n = x.dim();
        Op::from_blade_fn(n, -1, move |b| form::contract_vector_unchecked(&x, &Form::blade(n, b)))
    }

    /// `w ∧ ·` for a homogeneous form `w`.
    pub fn wedge_form(w: &Form, degree: usize) -> Self {
        assert!(w.is_homogeneous(degree));
        let w = w.clone();
        let n = w.dim();
        Op::from_blade_fn(n, degree as i32, move |b| w.wedge(&Form::blade(n, b)).expect("same dimension"))
    }

    /// `w • ·` for a 2-form `w`.
    pub fn so_action(w: &Form) -> Self {
        assert!(w.is_homogeneous(2), "so_action needs a 2-form");
        let w = w.clone();
        let n = w.dim();
        Op::from_blade_fn(n, 0, move |b| form::so_action_unchecked(&w, &Form::blade(n, b)))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    /// Matrix of this operator on `Λ^p`.
    pub fn matrix(&self, p: usize) -> LinearOperator {
        if p > self.n {
            return LinearOperator::zero(self.n, p, p as i32 + self.shift);
        }
        (self.kernel)(p)
    }

    /// Memoize the matrix on every degree.
    pub fn cached(&self) -> Op {
        let inner = self.kernel.clone();
        let slots: Arc<Vec<OnceLock<LinearOperator>>> = Arc::new((0..=self.n).map(|_| OnceLock::new()).collect());
        Op::new(self.n, self.shift, move |p| slots[p].get_or_init(|| inner(p)).clone())
    }

    /// Apply to an arbitrary (possibly inhomogeneous) form.
    pub fn apply(&self, u: &Form) -> Form {
        assert_eq!(u.dim(), self.n, "ambient dimension mismatch");
        let mut out = Form::zero(self.n);
        for p in 0..=self.n {
            let part = u.component(p);
            if part.is_zero() {
                continue;
            }
            let img = self.matrix(p).apply_unchecked(&part);
            out.add_scaled(&img, &Scalar::one());
        }
        out
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Op) -> Op {
        assert_eq!(self.n, inner.n);
        let (outer, inner) = (self.clone(), inner.clone());
        let n = self.n;
        Op::new(n, outer.shift + inner.shift, move |p| {
            let mid = p as i32 + inner.shift;
            let mi = inner.matrix(p);
            if mid < 0 || mid as usize > n {
                return LinearOperator::zero(n, p, mid + outer.shift);
            }
            outer.matrix(mid as usize).compose(&mi)
        })
    }

    pub fn scaled(&self, c: Scalar) -> Op {
        let op = self.clone();
        Op::new(self.n, self.shift, move |p| op.matrix(p).scaled(&c))
    }

    fn combine(&self, other: &Op, c: Scalar) -> Op {
        assert_eq!(self.n, other.n);
        assert_eq!(self.shift, other.shift, "cannot add operators of different degree shift");
        let (a, b) = (self.clone(), other.clone());
        Op::new(self.n, self.shift, move |p| a.matrix(p).combine(&b.matrix(p), &c))
    }

    /// `[self, other] = self ∘ other − other ∘ self`.
    pub fn commutator(&self, other: &Op) -> Op {
        &self.after(other) - &other.after(self)
    }

    /// Sum of operators with the same shift; `None` for an empty list.
    pub fn sum<'a>(ops: impl IntoIterator<Item = &'a Op>) -> Option<Op> {
        let ops: Vec<Op> = ops.into_iter().cloned().collect();
        let first = ops.first()?;
        let (n, shift) = (first.n, first.shift);
        assert!(ops.iter().all(|o| o.shift == shift && o.n == n));
        Some(Op::new(n, shift, move |p| {
            let mut acc = LinearOperator::zero(n, p, p as i32 + shift);
            for o in &ops {
                acc = &acc + &o.matrix(p);
            }
            acc
        }))
    }
}

impl Add<&Op> for &Op {
    type Output = Op;
    fn add(self, rhs: &Op) -> Op {
        self.combine(rhs, Scalar::one())
    }
}

impl Sub<&Op> for &Op {
    type Output = Op;
    fn sub(self, rhs: &Op) -> Op {
        self.combine(rhs, -Scalar::one())
    }
}

impl Mul<&Op> for &Op {
    type Output = Op;
    fn mul(self, rhs: &Op) -> Op {
        self.after(rhs)
    }
}

impl Neg for &Op {
    type Output = Op;
    fn neg(self) -> Op {
        self.scaled(-Scalar::one())
    }
}

impl fmt::Debug for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Op(n={}, shift={})", self.n, self.shift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn identity_on_two_forms() {
        let id = materialize(8, 2, |u| u.clone()).unwrap();
        assert_eq!(id, LinearOperator::identity(8, 2));
        assert_eq!((id.nrows(), id.ncols()), (28, 28));
        assert_eq!(id.kernel_dim(), 0);
        assert_eq!(LinearOperator::zero(8, 2, 2).kernel_dim(), 28);
    }

    #[test]
    fn wedge_on_scalars_is_a_single_entry() {
        let e1 = Form::basis_vector(8, 0);
        let m = Op::wedge(&e1).matrix(0);
        assert_eq!((m.nrows(), m.ncols()), (8, 1));
        assert_eq!(m.column(0), e1);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn materialize_rejects_inhomogeneous() {
        let r = materialize(4, 1, |u| u + &Form::scalar(4, Scalar::one()));
        assert_eq!(r.unwrap_err(), Error::NotHomogeneous);
    }

    #[test]
    fn compose_tracks_degrees_and_boundaries() {
        let n = 4;
        let x = Form::vector(&[rat(1, 1), rat(-1, 2), Scalar::zero(), rat(3, 1)]);
        let w = Op::wedge(&x);
        let ww = w.after(&w);
        for p in 0..=n {
            assert!(ww.matrix(p).is_zero(), "x∧x∧ = 0 on degree {p}");
        }
        // wedge off the top degree is a zero map into a zero-dimensional space
        let top = w.matrix(n);
        assert_eq!((top.nrows(), top.ncols()), (0, 1));
    }

    #[test]
    fn transpose_of_wedge_is_contraction() {
        let n = 5;
        let x = Form::vector(&[rat(2, 1), Scalar::zero(), rat(1, 3), Scalar::zero(), rat(-1, 1)]);
        for p in 0..n {
            assert_eq!(Op::wedge(&x).matrix(p).transpose(), Op::contract(&x).matrix(p + 1));
        }
    }

    #[test]
    fn cached_matches_uncached() {
        let w = Form::from_indices(6, &[0, 3], rat(2, 3));
        let op = Op::so_action(&w);
        let c = op.cached();
        for p in 0..=6 {
            assert_eq!(op.matrix(p), c.matrix(p));
            assert_eq!(op.matrix(p), c.matrix(p));
        }
    }
}
