//! Decomposition of `Λ^p(ℝ^{4m})` into joint eigenspaces of `J` and `C`, with
//! multiplicities of the candidate summands `Sym^k H ⊗ Λ^{a,b}₀E`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::blade::{basis, binomial};
use crate::casimir_matrix::{dual_basis_casimir, sp1_basis, spm_basis};
use crate::error::{Error, Result};
use crate::form::Form;
use crate::linalg::Matrix;
use crate::operator::LinearOperator;
use crate::quaternionic::{OperatorFamily, QuaternionicFrame};
use crate::rep_theory::{
    admissible_labels, casimir_label, excluded_by_rank, weyl_dimension, ClosedForm, EigenPair, RepLabel,
};
use crate::report::{CheckRecord, Status};
use crate::scalar::{rat, Scalar};

/// Largest ambient dimension `4m` handled by default.
pub const DEFAULT_MATRIX_CAP: usize = 16;

/// Upper bound on enumerated multiplicity solutions per eigenpair class.
const MAX_SOLUTIONS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionEntry {
    pub k: usize,
    pub a: usize,
    pub b: usize,
    pub j: Scalar,
    pub c: Scalar,
    pub weyl_dim: u64,
    /// `None` when the multiplicity system has several solutions.
    pub multiplicity: Option<u64>,
    pub eigenspace_dim: usize,
}

impl DecompositionEntry {
    pub fn label(&self) -> RepLabel {
        RepLabel::new(self.k, self.a, self.b)
    }

    /// Complex dimension `(k+1) · weyl_dim` of one copy of the summand.
    pub fn summand_dim(&self) -> u64 {
        (self.k as u64 + 1) * self.weyl_dim
    }
}

/// The labels sharing one eigenpair, the joint eigenspace dimension, and all
/// non-negative integer multiplicity vectors consistent with it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenClass {
    pub pair: EigenPair,
    pub labels: Vec<RepLabel>,
    pub eigenspace_dim: usize,
    pub solutions: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub m: usize,
    pub p: usize,
    pub entries: Vec<DecompositionEntry>,
    pub classes: Vec<EigenClass>,
    pub total: usize,
    pub expected_total: usize,
}

impl Decomposition {
    pub fn is_complete(&self) -> bool {
        self.total == self.expected_total
    }

    pub fn status(&self) -> Status {
        if !self.is_complete() || self.classes.iter().any(|c| c.solutions.is_empty()) {
            Status::Fail
        } else if self.classes.iter().any(|c| c.solutions.len() > 1) {
            Status::Ambiguous
        } else {
            Status::Pass
        }
    }

    /// Entries with a known positive multiplicity.
    pub fn present(&self) -> impl Iterator<Item = &DecompositionEntry> {
        self.entries.iter().filter(|e| e.multiplicity.is_some_and(|x| x > 0))
    }

    pub fn record(&self) -> CheckRecord {
        let table: Vec<_> = self.entries.iter().map(|e| serde_json::to_value(e).expect("serializable")).collect();
        let mut rec = CheckRecord::new(
            format!("decompose.m{}.p{}", self.m, self.p),
            "Λ^p(H⊗E) = ⊕ Sym^kH ⊗ Λ^{a,b}₀E, with J = −k(k+2) and C = P(k,a,b,p) on each summand",
            self.status(),
        )
        .param("m", self.m)
        .param("p", self.p)
        .param("total", self.total)
        .param("expected_total", self.expected_total)
        .param("entries", json!(table));
        let excluded: Vec<String> = excluded_by_rank(self.p, self.m).iter().map(ToString::to_string).collect();
        if !excluded.is_empty() {
            rec = rec.param("absent_since_a_exceeds_m", json!(excluded));
        }
        let ambiguous: Vec<_> = self.classes.iter().filter(|c| c.solutions.len() > 1).collect();
        if !ambiguous.is_empty() {
            rec = rec.param("ambiguous_classes", serde_json::to_value(&ambiguous).expect("serializable"));
        }
        if !self.is_complete() {
            rec = rec.detail("eigenspaces of the candidate labels do not exhaust Λ^p");
        } else if let Some(c) = self.classes.iter().find(|c| c.solutions.is_empty()) {
            rec = rec.detail(format!(
                "no multiplicities fit eigenspace dimension {} at eigenpair {}",
                c.eigenspace_dim, c.pair
            ));
        }
        rec
    }
}

fn shifted(m: &LinearOperator, s: &Scalar) -> Matrix {
    let mut d = m.to_dense();
    for i in 0..d.nrows() {
        d[(i, i)] = &d[(i, i)] - s;
    }
    d
}

/// `[J − jI ; C − cI]` on `Λ^p`.
fn stacked(j: &LinearOperator, c: &LinearOperator, pair: &EigenPair) -> Matrix {
    shifted(j, &pair.j).vstack(&shifted(c, &pair.c))
}

/// All non-negative integer vectors `x` with `Σ x_i d_i = target`.
fn solve_multiplicities(dims: &[u64], target: u64) -> Vec<Vec<u64>> {
    fn go(dims: &[u64], target: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if out.len() >= MAX_SOLUTIONS {
            return;
        }
        match dims.split_first() {
            None => {
                if target == 0 {
                    out.push(prefix.clone());
                }
            }
            Some((&d, rest)) => {
                for x in 0..=target / d {
                    prefix.push(x);
                    go(rest, target - x * d, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(dims, target, &mut Vec::new(), &mut out);
    out
}

fn check_cap(m: usize, cap: usize) -> Result<()> {
    if 4 * m > cap {
        return Err(Error::MatrixCap { n: 4 * m, cap });
    }
    Ok(())
}

/// Joint eigenspaces of `J` and `C` for every candidate label, solved for
/// multiplicities, with a completeness check against `C(4m, p)`.
pub fn joint_eigenspaces(fam: &OperatorFamily, p: usize, cap: usize) -> Result<Decomposition> {
    let frame = fam.frame();
    let m = frame.m();
    check_cap(m, cap)?;
    let n = frame.n();
    if p > n {
        return Err(Error::InvalidParameter(format!("degree p = {p} exceeds 4m = {n}")));
    }
    let j = fam.j().matrix(p);
    let c = fam.c().matrix(p);
    let mut groups: BTreeMap<EigenPair, Vec<RepLabel>> = BTreeMap::new();
    for l in admissible_labels(p, m) {
        groups.entry(EigenPair::of_label(l, p, m)).or_default().push(l);
    }
    let mut classes = Vec::new();
    let mut entries = Vec::new();
    for (pair, labels) in groups {
        let dim = binomial(n, p) - stacked(&j, &c, &pair).rank();
        let weyl: Vec<u64> = labels.iter().map(|l| weyl_dimension(&l.weight(m)?, m)).collect::<Result<_>>()?;
        let dims: Vec<u64> = labels.iter().zip(&weyl).map(|(l, w)| (l.k as u64 + 1) * w).collect();
        let solutions = solve_multiplicities(&dims, dim as u64);
        for (i, l) in labels.iter().enumerate() {
            entries.push(DecompositionEntry {
                k: l.k,
                a: l.a,
                b: l.b,
                j: pair.j.clone(),
                c: pair.c.clone(),
                weyl_dim: weyl[i],
                multiplicity: (solutions.len() == 1).then(|| solutions[0][i]),
                eigenspace_dim: dim,
            });
        }
        classes.push(EigenClass { pair, labels, eigenspace_dim: dim, solutions });
    }
    entries.sort_by_key(|e| (e.k, e.a, e.b));
    let total = classes.iter().map(|c| c.eigenspace_dim).sum();
    Ok(Decomposition { m, p, entries, classes, total, expected_total: binomial(n, p) })
}

/// Basis of the joint eigenspace for `pair`, as forms.
pub fn eigenspace(fam: &OperatorFamily, p: usize, pair: &EigenPair) -> Vec<Form> {
    let n = fam.n();
    let j = fam.j().matrix(p);
    let c = fam.c().matrix(p);
    let blades = basis(n, p);
    stacked(&j, &c, pair)
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut f = Form::zero(n);
            for (b, x) in blades.iter().zip(v) {
                f.add_term(*b, x);
            }
            f
        })
        .collect()
}

/// `Π_λ (A − λ)` applied to `v`.
fn annihilated(a: &LinearOperator, lambdas: &[Scalar], v: &Form) -> bool {
    let mut w = v.clone();
    for l in lambdas {
        let aw = a.apply(&w).expect("degree preserved");
        w = &aw - &w.scaled(l);
    }
    w.is_zero()
}

/// On every joint eigenspace with a determined decomposition, the
/// `Λ²`-normalized `𝔰𝔭(m)` Casimir acts by `−2(m+1)·c_π` and the
/// `𝔰𝔭(1)` Casimir by `−(4/m)·k(k+2)/8`.
pub fn verify_normalizations(fam: &OperatorFamily, p: usize, cap: usize) -> Result<Vec<CheckRecord>> {
    let frame: &QuaternionicFrame = fam.frame();
    let m = frame.m();
    let dec = joint_eigenspaces(fam, p, cap)?;
    let spm = dual_basis_casimir(&spm_basis(frame)?, p)?;
    let sp1 = dual_basis_casimir(&sp1_basis(frame), p)?;
    let mut out = Vec::new();
    for class in &dec.classes {
        if class.eigenspace_dim == 0 || class.solutions.len() != 1 {
            continue;
        }
        let present: Vec<RepLabel> =
            class.labels.iter().zip(&class.solutions[0]).filter(|(_, &x)| x > 0).map(|(l, _)| *l).collect();
        let mut spm_values: Vec<Scalar> = present
            .iter()
            .map(|l| {
                casimir_label(ClosedForm::Cartan { a: l.a, b: l.b }, m).map(|c| -&(&c * &Scalar::from(2 * (m + 1))))
            })
            .collect::<Result<_>>()?;
        spm_values.sort();
        spm_values.dedup();
        let k = present[0].k;
        let sp1_value = -&(&casimir_label(ClosedForm::SymH(k), 1)? * &rat(4, m as i64));
        let basis = eigenspace(fam, p, &class.pair);
        let spm_ok = basis.iter().all(|v| annihilated(&spm, &spm_values, v));
        let sp1_ok = basis.iter().all(|v| annihilated(&sp1, std::slice::from_ref(&sp1_value), v));
        let chain_ok = &sp1_value * &Scalar::from(2 * m) == class.pair.j;
        let labels: Vec<String> = present.iter().map(ToString::to_string).collect();
        let values: Vec<String> = spm_values.iter().map(ToString::to_string).collect();
        out.push(
            CheckRecord::check("norm.spm", "Cas^{Λ²}_{𝔰𝔭(m)} = 2(m+1) Cas^{g_B}_{𝔰𝔭(m)}", spm_ok)
                .param("m", m)
                .param("p", p)
                .param("labels", json!(labels))
                .param("eigenvalues", json!(values)),
        );
        out.push(
            CheckRecord::check(
                "norm.sp1",
                "Cas^{Λ²}_{𝔰𝔭(1)} = (8/2m) Cas^{g_B}_{𝔰𝔭(1)} and J = 2m Cas^{Λ²}_{𝔰𝔭(1)}",
                sp1_ok && chain_ok,
            )
            .param("m", m)
            .param("p", p)
            .param("labels", json!(labels))
            .param("eigenvalue", sp1_value.to_string()),
        );
    }
    Ok(out)
}

/// The Killing-normalized `𝔰𝔭(m)` Casimir of `Λ^{a,b}₀E` and the `𝔰𝔭(1)`
/// Casimir of `Sym^k H` from their closed forms, compared with the matrix
/// value `−Cas^{Λ²}_{𝔰𝔭(m)} / 2(m+1)` on the first degree where the label
/// alone spans a joint eigenspace of `J` and `C`.
pub fn label_casimir(fam: &OperatorFamily, label: RepLabel, cap: usize) -> Result<Vec<CheckRecord>> {
    let frame = fam.frame();
    let m = frame.m();
    label.validate(m)?;
    check_cap(m, cap)?;
    let formula = casimir_label(ClosedForm::Cartan { a: label.a, b: label.b }, m)?;
    let sp1 = casimir_label(ClosedForm::SymH(label.k), 1)?;
    let mut out =
        vec![CheckRecord::new("casimir.formula", "c_π = (λ, λ+2ρ) in the Killing normalization", Status::Info)
            .param("m", m)
            .param("label", label.to_string())
            .param("spm_value", formula.to_string())
            .param("sp1_value", sp1.to_string())
            .param("weight", format!("{:?}", label.weight(m)?.entries()))];
    let spm = spm_basis(frame)?;
    for p in 0..=4 * m {
        let dec = joint_eigenspaces(fam, p, cap)?;
        let Some(class) = dec.classes.iter().find(|c| {
            c.solutions.len() == 1 && c.labels.iter().zip(&c.solutions[0]).all(|(l, &x)| (*l == label) == (x > 0))
        }) else {
            continue;
        };
        let v = eigenspace(fam, p, &class.pair).into_iter().next().expect("nonempty eigenspace");
        let cv = dual_basis_casimir(&spm, p)?.apply(&v)?;
        let (b, x) = v.terms().next().expect("nonzero vector");
        let eigen = &cv.coefficient(b) / x;
        let is_eigen = cv == v.scaled(&eigen);
        let matrix_value = -&(&eigen / &Scalar::from(2 * (m + 1)));
        out.push(
            CheckRecord::check(
                "casimir.matrix",
                "−Cas^{Λ²}_{𝔰𝔭(m)} / 2(m+1) on the summand equals c_π",
                is_eigen && matrix_value == formula,
            )
            .param("m", m)
            .param("p", p)
            .param("label", label.to_string())
            .param("matrix_value", matrix_value.to_string())
            .param("formula_value", formula.to_string()),
        );
        return Ok(out);
    }
    out.push(
        CheckRecord::new("casimir.matrix", "−Cas^{Λ²}_{𝔰𝔭(m)} / 2(m+1) on the summand equals c_π", Status::Info)
            .param("m", m)
            .param("label", label.to_string())
            .detail("label does not span a joint eigenspace of J and C on its own in any degree"),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(m: usize) -> OperatorFamily {
        OperatorFamily::new(&QuaternionicFrame::new(m).unwrap())
    }

    #[test]
    fn solver_enumerates_all() {
        assert_eq!(solve_multiplicities(&[10, 5], 10), vec![vec![0, 2], vec![1, 0]]);
        assert!(solve_multiplicities(&[3], 4).is_empty());
        assert_eq!(solve_multiplicities(&[], 0), vec![Vec::<u64>::new()]);
    }

    #[test]
    fn vectors_and_scalars() {
        let f = fam(2);
        let d0 = joint_eigenspaces(&f, 0, DEFAULT_MATRIX_CAP).unwrap();
        assert_eq!(d0.present().count(), 1);
        let d1 = joint_eigenspaces(&f, 1, DEFAULT_MATRIX_CAP).unwrap();
        let present: Vec<_> = d1.present().collect();
        assert_eq!(present.len(), 1);
        assert_eq!((present[0].k, present[0].a, present[0].b), (1, 1, 0));
        assert_eq!(present[0].j, Scalar::from(-3));
        assert_eq!(present[0].eigenspace_dim, 8);
        let recs = label_casimir(&f, RepLabel::new(0, 1, 1), DEFAULT_MATRIX_CAP).unwrap();
        assert_eq!(recs[1].status, Status::Pass, "{recs:?}");
        assert_eq!(recs[1].params["matrix_value"], "1");
    }

    #[test]
    fn cap_is_enforced() {
        let f = fam(2);
        assert!(matches!(joint_eigenspaces(&f, 2, 4), Err(Error::MatrixCap { .. })));
    }
}
