//! Matrix-level Casimir operators of `𝔰𝔭(m)`, `𝔰𝔭(1)` and `𝔰𝔬(4m)` acting on
//! forms, the projection onto `𝔰𝔭(m) ⊂ Λ²`, the curvature term `q(R)`, and
//! checks of the formulas expressing `J` and `C` through Casimirs.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::blade::{basis, Blade};
use crate::error::{Error, Result};
use crate::form::{
    contract_vector_unchecked as contract, so_action_unchecked as so, wedge_vector_unchecked as wedge, Form,
};
use crate::linalg::Matrix;
use crate::operator::{LinearOperator, Op};
use crate::quaternionic::{OperatorFamily, QuaternionicFrame};
use crate::report::{CheckRecord, Residual};
use crate::scalar::{rat, Scalar};

/// Coordinates of a 2-form in the canonical blade basis of `Λ²`.
pub fn two_form_coords(w: &Form) -> Vec<Scalar> {
    let n = w.dim();
    basis(n, 2).into_iter().map(|b| w.coefficient(b)).collect()
}

pub fn two_form_from_coords(n: usize, coords: &[Scalar]) -> Form {
    let mut w = Form::zero(n);
    for (b, c) in basis(n, 2).into_iter().zip(coords) {
        w.add_term(b, c.clone());
    }
    w
}

/// A basis of a Lie subalgebra of `𝔰𝔬(n) ≅ Λ²` with its Gram matrix.
#[derive(Clone, Debug)]
pub struct SubalgebraBasis {
    elements: Vec<Form>,
    gram: Matrix,
}

impl SubalgebraBasis {
    /// Fails if the elements are not 2-forms or are linearly dependent.
    pub fn new(elements: Vec<Form>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter("empty subalgebra basis".into()));
        }
        let n = elements[0].dim();
        if elements.iter().any(|w| w.dim() != n || !w.is_homogeneous(2)) {
            return Err(Error::InvalidParameter("subalgebra elements must be 2-forms of one dimension".into()));
        }
        let k = elements.len();
        let mut gram = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let g = elements[i].inner(&elements[j])?;
                gram[(i, j)] = g.clone();
                gram[(j, i)] = g;
            }
        }
        if gram.rank() < k {
            return Err(Error::Singular);
        }
        Ok(SubalgebraBasis { elements, gram })
    }

    pub fn elements(&self) -> &[Form] {
        &self.elements
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// The dual basis `Xⁱ = Σ_j (G⁻¹)_{ij} X_j`.
    pub fn dual(&self) -> Result<Vec<Form>> {
        let inv = self.gram.inverse()?;
        let n = self.dim();
        Ok((0..self.len())
            .map(|i| {
                let mut w = Form::zero(n);
                for (j, x) in self.elements.iter().enumerate() {
                    if !inv[(i, j)].is_zero() {
                        w.add_scaled(x, &inv[(i, j)]);
                    }
                }
                w
            })
            .collect())
    }

    /// `true` iff the bracket of any two elements lies in the span.
    pub fn is_closed(&self) -> bool {
        let rows: Vec<Vec<Scalar>> = self.elements.iter().map(two_form_coords).collect();
        let base = Matrix::from_rows(rows.clone());
        let r = base.rank();
        let mut all = rows;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                // [X, Y] in 𝔰𝔬(n) corresponds to X • Y on 2-forms
                all.push(two_form_coords(&so(&self.elements[i], &self.elements[j])));
            }
        }
        Matrix::from_rows(all).rank() == r
    }
}

/// The commutant of `J₁, J₂, J₃` inside `𝔰𝔬(4m)`, i.e. `𝔰𝔭(m)`, as an exact
/// nullspace basis of the linear conditions `X • ω_α = 0`.
pub fn spm_basis(frame: &QuaternionicFrame) -> Result<SubalgebraBasis> {
    let n = frame.n();
    let m = frame.m();
    let blades = basis(n, 2);
    let omegas: Vec<Form> = (0..3).map(|a| frame.fundamental_form(a)).collect();
    let nb = blades.len();
    let mut cond = Matrix::zeros(3 * nb, nb);
    for (col, &b) in blades.iter().enumerate() {
        let x = Form::blade(n, b);
        for (a, w) in omegas.iter().enumerate() {
            for (row, c) in two_form_coords(&so(&x, w)).into_iter().enumerate() {
                cond[(a * nb + row, col)] = c;
            }
        }
    }
    let elements: Vec<Form> = cond.nullspace().iter().map(|v| two_form_from_coords(n, v)).collect();
    if elements.len() != m * (2 * m + 1) {
        return Err(Error::Internal(format!(
            "commutant has dimension {}, expected m(2m+1) = {}",
            elements.len(),
            m * (2 * m + 1)
        )));
    }
    SubalgebraBasis::new(elements)
}

/// `{ω₁, ω₂, ω₃}`.
pub fn sp1_basis(frame: &QuaternionicFrame) -> SubalgebraBasis {
    SubalgebraBasis::new((0..3).map(|a| frame.fundamental_form(a)).collect()).expect("fundamental forms are orthogonal")
}

/// All canonical 2-blades: an orthonormal basis of `𝔰𝔬(n)`.
pub fn so_basis(n: usize) -> SubalgebraBasis {
    SubalgebraBasis::new(basis(n, 2).into_iter().map(|b| Form::blade(n, b)).collect()).expect("orthonormal")
}

/// `Σ_i π(X_i) π(Xⁱ)` on `Λ^p`, with `Xⁱ` dual to `X_i` under the `Λ²` inner
/// product.
pub fn dual_basis_casimir(b: &SubalgebraBasis, p: usize) -> Result<LinearOperator> {
    let dual = b.dual()?;
    let n = b.dim();
    let terms: Vec<LinearOperator> = b
        .elements()
        .par_iter()
        .zip(dual.par_iter())
        .map(|(x, xd)| Op::so_action(x).matrix(p).compose(&Op::so_action(xd).matrix(p)))
        .collect();
    Ok(terms.iter().fold(LinearOperator::zero(n, p, p as i32), |acc, t| &acc + t))
}

/// `pr(X ∧ Y) = ¼(X ∧ Y + Σ_α J_α X ∧ J_α Y)` on `Λ²`.
pub fn projection_pr(frame: &QuaternionicFrame) -> LinearOperator {
    let n = frame.n();
    LinearOperator::from_blade_fn(n, 2, 0, |b| pr_blade(frame, b))
}

fn pr_blade(frame: &QuaternionicFrame, b: Blade) -> Form {
    let n = frame.n();
    let mut idx = b.indices();
    let (i, j) = (idx.next().expect("2-blade"), idx.next().expect("2-blade"));
    let (ei, ej) = (Form::basis_vector(n, i), Form::basis_vector(n, j));
    let mut out = Form::blade(n, b);
    for a in 0..3 {
        out.add_scaled(&wedge(&frame.apply_j(a, &ei), &frame.apply_j(a, &ej)), &Scalar::one());
    }
    out.scaled(&rat(1, 4))
}

/// An element of `Sym²(Λ²)`, stored as a symmetric matrix on the 2-blade basis.
#[derive(Clone, Debug)]
pub struct CurvatureElement {
    n: usize,
    r: Matrix,
}

impl CurvatureElement {
    pub fn new(n: usize, r: Matrix) -> Result<Self> {
        let nb = basis(n, 2).len();
        if r.nrows() != nb || r.ncols() != nb {
            return Err(Error::DimensionMismatch { left: r.nrows(), right: nb });
        }
        if r.transpose() != r {
            return Err(Error::InvalidParameter("curvature element must be symmetric".into()));
        }
        Ok(CurvatureElement { n, r })
    }

    pub fn identity(n: usize) -> Self {
        CurvatureElement { n, r: Matrix::identity(basis(n, 2).len()) }
    }

    /// `R(w)` for a 2-form `w`.
    pub fn apply(&self, w: &Form) -> Form {
        let v = self.r.mul_vec(&two_form_coords(w));
        two_form_from_coords(self.n, &v)
    }

    fn of_pair(&self, i: usize, j: usize) -> Form {
        match Blade::from_indices(&[i, j]) {
            Some((s, b)) => self.apply(&Form::blade(self.n, b)).scaled(&Scalar::from(s as i64)),
            None => Form::zero(self.n),
        }
    }
}

/// `q(R) = Σ_{i,j} e_j ∧ e_i ⌟ R(e_i ∧ e_j)•`, summed over ordered pairs.
pub fn q_r(r: &CurvatureElement, p: usize) -> LinearOperator {
    let n = r.n;
    LinearOperator::from_blade_fn(n, p, 0, |b| {
        let u = Form::blade(n, b);
        let mut out = Form::zero(n);
        for i in 0..n {
            for j in 0..n {
                let rij = r.of_pair(i, j);
                if rij.is_zero() {
                    continue;
                }
                let t = so(&rij, &u);
                out.add_scaled(
                    &wedge(&Form::basis_vector(n, j), &contract(&Form::basis_vector(n, i), &t)),
                    &Scalar::one(),
                );
            }
        }
        out
    })
}

/// `q(R) = Σ_{i<j} (e_i ∧ e_j)• R(e_i ∧ e_j)•`.
pub fn q_r_so(r: &CurvatureElement, p: usize) -> LinearOperator {
    let n = r.n;
    LinearOperator::from_blade_fn(n, p, 0, |b| {
        let u = Form::blade(n, b);
        let mut out = Form::zero(n);
        for eij in basis(n, 2) {
            let w = Form::blade(n, eij);
            let rw = r.apply(&w);
            out.add_scaled(&so(&w, &so(&rw, &u)), &Scalar::one());
        }
        out
    })
}

/// Both expressions for `q(R)`; errors if they disagree.
pub fn q_r_checked(r: &CurvatureElement, p: usize) -> Result<LinearOperator> {
    let a = q_r(r, p);
    let b = q_r_so(r, p);
    if a != b {
        return Err(Error::Internal("the two expressions for q(R) disagree".into()));
    }
    Ok(a)
}

/// `Σ_α Σ_{i<j} (e_i∧e_j)•(J_α e_i ∧ J_α e_j)•`.
fn j_twisted_so_sum(frame: &QuaternionicFrame, p: usize) -> LinearOperator {
    let n = frame.n();
    LinearOperator::from_blade_fn(n, p, 0, |b| {
        let u = Form::blade(n, b);
        let mut out = Form::zero(n);
        for eij in basis(n, 2) {
            let mut idx = eij.indices();
            let (i, j) = (idx.next().unwrap(), idx.next().unwrap());
            let w = Form::blade(n, eij);
            for a in 0..3 {
                let jw =
                    wedge(&frame.apply_j(a, &Form::basis_vector(n, i)), &frame.apply_j(a, &Form::basis_vector(n, j)));
                out.add_scaled(&so(&w, &so(&jw, &u)), &Scalar::one());
            }
        }
        out
    })
}

/// `Σ_{α,i,j} A(e_i, e_j, J_α e_i, J_α e_j)(u)` for a four-vector expression `A`.
fn quad_sum(
    frame: &QuaternionicFrame,
    p: usize,
    f: impl Fn(&Form, &Form, &Form, &Form, &Form) -> Form + Sync,
) -> LinearOperator {
    let n = frame.n();
    let e: Vec<Form> = (0..n).map(|i| Form::basis_vector(n, i)).collect();
    let je: Vec<Vec<Form>> = (0..3).map(|a| e.iter().map(|x| frame.apply_j(a, x)).collect()).collect();
    LinearOperator::from_blade_fn(n, p, 0, |b| {
        let u = Form::blade(n, b);
        let mut out = Form::zero(n);
        for jea in &je {
            for i in 0..n {
                for j in 0..n {
                    out.add_scaled(&f(&u, &e[i], &e[j], &jea[i], &jea[j]), &Scalar::one());
                }
            }
        }
        out
    })
}

fn record(id: &str, anchor: &str, m: usize, p: usize, lhs: &LinearOperator, rhs: &LinearOperator) -> CheckRecord {
    CheckRecord::from_residual(id, anchor, Residual::of_operator(&(lhs - rhs))).param("m", m).param("p", p)
}

/// The chain of formulas for `4C`, the `𝔰𝔬(4m)` Casimir value, and
/// `C = Cas^{Λ²}_{𝔰𝔭(m)} + ¼p(4m−p) + ¼J + (3/2)p`, on `Λ^p`.
pub fn verify_c_decomposition(frame: &QuaternionicFrame, p: usize) -> Result<Vec<CheckRecord>> {
    let n = frame.n();
    let m = frame.m();
    let fam = OperatorFamily::new(frame);
    let c = fam.c().matrix(p);
    let j = fam.j().matrix(p);
    let four_c = c.scaled(&Scalar::from(4));
    let id = |s: Scalar| LinearOperator::scalar(n, p, &s);
    let pp = p as i64;
    let nn = n as i64;
    let mut out = Vec::new();

    let lambda_l = Op::sum(&(0..3).map(|a| fam.lambda_alpha(a).after(fam.l_alpha(a))).collect::<Vec<_>>())
        .expect("three terms")
        .matrix(p)
        .scaled(&Scalar::from(4));
    let mut printed = record("cas.4c-lambda-l", "4C = 4 Σ_α Λ_α ∘ L_α", m, p, &four_c, &lambda_l);
    if !printed.passed() {
        printed = printed.detail("operator order as written; the expansion that follows equals 4 Σ_α L_α ∘ Λ_α");
    }
    out.push(printed);

    let line1 = quad_sum(frame, p, |u, ei, ej, jei, jej| -&wedge(ei, &wedge(jei, &contract(ej, &contract(jej, u)))));
    out.push(record("cas.4c-line1", "4C = −Σ e_i ∧ J_α(e_i) ∧ e_j ⌟ J_α(e_j) ⌟", m, p, &four_c, &line1));

    let three_p = id(Scalar::from(3 * pp));
    let line2 =
        &quad_sum(frame, p, |u, ei, ej, jei, jej| wedge(ej, &contract(ei, &wedge(jej, &contract(jei, u))))) + &three_p;
    out.push(record(
        "cas.4c-line2",
        "4C = Σ (e_j ∧ e_i ⌟)(J_α e_j ∧ J_α e_i ⌟) + 3 Σ e_j ∧ e_j ⌟",
        m,
        p,
        &four_c,
        &line2,
    ));

    let line3 = &(&quad_sum(frame, p, |u, ei, ej, jei, jej| {
        let w = wedge(ei, ej);
        let jw = wedge(jei, jej);
        so(&w, &so(&jw, u)).scaled(&rat(1, 2))
    }) + &quad_sum(frame, p, |u, ei, ej, jei, jej| {
        wedge(ej, &contract(ei, &wedge(jei, &contract(jej, u))))
    })) + &three_p;
    out.push(record(
        "cas.4c-line3",
        "4C = ½ Σ (e_i∧e_j)•(J_α e_i∧J_α e_j)• + Σ (e_j ∧ e_i ⌟)(J_α e_i ∧ J_α e_j ⌟) + 3p",
        m,
        p,
        &four_c,
        &line3,
    ));

    let twisted = j_twisted_so_sum(frame, p);
    let six_p = id(Scalar::from(6 * pp));
    let line4 = &(&twisted + &j) + &six_p;
    out.push(record("cas.4c-line4", "4C = Σ_{i<j} (e_i∧e_j)•(J_α e_i∧J_α e_j)• + J + 6p", m, p, &four_c, &line4));

    let so_cas = dual_basis_casimir(&so_basis(n), p)?;
    out.push(record(
        "cas.so-casimir",
        "Σ_{i<j} (e_i∧e_j)•(e_i∧e_j)• = −p(4m−p) id",
        m,
        p,
        &so_cas,
        &id(Scalar::from(-pp * (nn - pp))),
    ));

    let pr = projection_pr(frame);
    let pr_sum = LinearOperator::from_blade_fn(n, p, 0, |b| {
        let u = Form::blade(n, b);
        let mut acc = Form::zero(n);
        for eij in basis(n, 2) {
            let w = Form::blade(n, eij);
            let pw = pr.apply(&w).expect("2-form");
            acc.add_scaled(&so(&w, &so(&pw, &u)), &Scalar::from(4));
        }
        acc
    });
    let line5 = &(&(&pr_sum - &so_cas) + &j) + &six_p;
    out.push(record(
        "cas.4c-line5",
        "4C = 4 Σ_{i<j} (e_i∧e_j)• pr(e_i∧e_j)• − Σ_{i<j} (e_i∧e_j)•(e_i∧e_j)• + J + 6p",
        m,
        p,
        &four_c,
        &line5,
    ));

    let spm = dual_basis_casimir(&spm_basis(frame)?, p)?;
    let rhs = &(&(&spm + &id(rat(pp * (nn - pp), 4))) + &j.scaled(&rat(1, 4))) + &id(rat(3 * pp, 2));
    out.push(record("cas.c-decomposition", "C = Cas^{Λ²}_{𝔰𝔭(m)} + ¼p(4m−p) + ¼J + (3/2)p", m, p, &c, &rhs));
    Ok(out)
}

/// `J = 2m · Cas^{Λ²}_{𝔰𝔭(1)}` on `Λ^p`.
pub fn verify_j_casimir(frame: &QuaternionicFrame, p: usize) -> Result<CheckRecord> {
    let fam = OperatorFamily::new(frame);
    let m = frame.m();
    let cas = dual_basis_casimir(&sp1_basis(frame), p)?.scaled(&Scalar::from(2 * m));
    Ok(record("cas.j-sp1", "J = 2m Cas^{Λ²}_{𝔰𝔭(1)}", m, p, &fam.j().matrix(p), &cas))
}

/// Idempotency, self-adjointness, rank `m(2m+1)`, image equal to `𝔰𝔭(m)`,
/// and `pr(ω_α) = 0`.
pub fn verify_projection(frame: &QuaternionicFrame) -> Result<Vec<CheckRecord>> {
    let m = frame.m();
    let pr = projection_pr(frame);
    let mut out = vec![
        CheckRecord::from_residual("pr.idempotent", "pr² = pr", Residual::of_operator(&(&(&pr * &pr) - &pr)))
            .param("m", m),
        CheckRecord::from_residual("pr.self-adjoint", "prᵀ = pr", Residual::of_operator(&(&pr.transpose() - &pr)))
            .param("m", m),
    ];
    let rank = pr.rank();
    out.push(
        CheckRecord::check("pr.rank", "rank pr = m(2m+1)", rank == m * (2 * m + 1)).param("m", m).param("rank", rank),
    );
    let spm = spm_basis(frame)?;
    let pr_cols = pr.to_dense().transpose();
    let spm_rows = Matrix::from_rows(spm.elements().iter().map(two_form_coords).collect());
    let joint = pr_cols.vstack(&spm_rows).rank();
    out.push(CheckRecord::check("pr.image", "image pr = 𝔰𝔭(m)", joint == rank && joint == spm.len()).param("m", m));
    for a in 0..3 {
        let w = frame.fundamental_form(a);
        let img = pr.apply(&w).expect("2-form");
        out.push(CheckRecord::check(format!("pr.kills-omega.{}", a + 1), "pr(ω_α) = 0", img.is_zero()).param("m", m));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(m: usize) -> QuaternionicFrame {
        QuaternionicFrame::new(m).unwrap()
    }

    #[test]
    fn spm_dimensions_and_commutation() {
        for m in [2, 3] {
            let f = frame(m);
            let b = spm_basis(&f).unwrap();
            assert_eq!(b.len(), m * (2 * m + 1));
            assert!(b.is_closed());
            let fam = OperatorFamily::new(&f);
            for x in b.elements() {
                let xm = Op::so_action(x).matrix(1);
                for a in 0..3 {
                    let ja = fam.j_alpha(a).matrix(1);
                    assert!((&(&xm * &ja) - &(&ja * &xm)).is_zero());
                }
            }
        }
    }

    #[test]
    fn casimir_on_scalars_vanishes() {
        let f = frame(2);
        assert!(dual_basis_casimir(&spm_basis(&f).unwrap(), 0).unwrap().is_zero());
        assert!(dual_basis_casimir(&sp1_basis(&f), 0).unwrap().is_zero());
    }

    #[test]
    fn sp1_casimir_on_vectors() {
        let f = frame(2);
        let cas = dual_basis_casimir(&sp1_basis(&f), 1).unwrap();
        assert_eq!(cas, LinearOperator::scalar(8, 1, &rat(-3, 4)));
    }

    #[test]
    fn casimir_is_basis_independent() {
        let f = frame(2);
        let b = spm_basis(&f).unwrap();
        let mut shuffled: Vec<Form> = b.elements().to_vec();
        shuffled.reverse();
        for i in 0..shuffled.len() - 1 {
            let next = shuffled[i + 1].scaled(&rat(2, 3));
            shuffled[i] = &shuffled[i] + &next;
        }
        let b2 = SubalgebraBasis::new(shuffled).unwrap();
        for p in 0..=4 {
            assert_eq!(dual_basis_casimir(&b, p).unwrap(), dual_basis_casimir(&b2, p).unwrap());
        }
    }

    #[test]
    fn projection_properties() {
        for r in verify_projection(&frame(2)).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn q_r_expressions_agree() {
        let n = 8;
        let nb = 28;
        assert!(q_r_checked(&CurvatureElement::new(n, Matrix::zeros(nb, nb)).unwrap(), 2).unwrap().is_zero());
        let id = CurvatureElement::identity(n);
        assert_eq!(q_r_checked(&id, 1).unwrap(), dual_basis_casimir(&so_basis(n), 1).unwrap());
        let mut r = Matrix::zeros(nb, nb);
        for i in 0..nb {
            for j in i..nb {
                let v = rat(((i * 7 + j * 3) % 5) as i64 - 2, 1 + (i + j) as i64 % 3);
                r[(i, j)] = v.clone();
                r[(j, i)] = v;
            }
        }
        let q = q_r_checked(&CurvatureElement::new(n, r.clone()).unwrap(), 2).unwrap();
        assert_eq!(q.transpose(), q);
        r[(0, 1)] = Scalar::from(99);
        assert!(CurvatureElement::new(n, r).is_err());
    }
}
