//! The standard quaternionic structure on `ℝ^{4m}` and the natural algebraic
//! operators built from it.
//!
//! Coordinates are grouped in quadruples `(4r+1, …, 4r+4) ≅ (1, i, j, k)` and
//! `J₁, J₂, J₃` act as left multiplication by `i, j, k`, so `J₁J₂ = J₃`.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::blade::Blade;
use crate::error::{Error, Result};
use crate::form::Form;
use crate::linalg::Matrix;
use crate::operator::{LinearOperator, Op};
use crate::report::{CheckRecord, Residual};
use crate::scalar::{rat, Scalar};

/// A signed permutation of the basis: `e_i ↦ sign · e_{target}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPerm {
    image: Vec<(usize, i8)>,
}

impl SignedPerm {
    pub fn identity(n: usize) -> Self {
        SignedPerm { image: (0..n).map(|i| (i, 1)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.image.len()
    }

    pub fn image_of(&self, i: usize) -> (usize, i8) {
        self.image[i]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        SignedPerm {
            image: other
                .image
                .iter()
                .map(|&(j, s)| {
                    let (k, t) = self.image[j];
                    (k, s * t)
                })
                .collect(),
        }
    }

    pub fn negated(&self) -> SignedPerm {
        SignedPerm { image: self.image.iter().map(|&(j, s)| (j, -s)).collect() }
    }

    pub fn apply(&self, x: &Form) -> Form {
        let mut out = Form::zero(x.dim());
        for (b, c) in x.terms() {
            let i = b.bits().trailing_zeros() as usize;
            let (j, s) = self.image[i];
            out.add_signed(s, Blade::vector(j), c);
        }
        out
    }

    /// Matrix with `J e_i` as its `i`-th column.
    pub fn to_matrix(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, &(j, s)) in self.image.iter().enumerate() {
            m[(j, i)] = Scalar::from(s as i64);
        }
        m
    }
}

/// `ℝ^{4m}` with three complex structures satisfying the quaternion relations.
#[derive(Clone, Debug)]
pub struct QuaternionicFrame {
    m: usize,
    j: [SignedPerm; 3],
}

/// Left multiplication by `i`, `j`, `k` on `(1, i, j, k)`, as `(target, sign)`.
const LEFT_MULT: [[(usize, i8); 4]; 3] =
    [[(1, 1), (0, -1), (3, 1), (2, -1)], [(2, 1), (3, -1), (0, -1), (1, 1)], [(3, 1), (2, 1), (1, -1), (0, -1)]];

impl QuaternionicFrame {
    /// Standard frame for `m ≥ 2`.
    pub fn new(m: usize) -> Result<Self> {
        Self::with_override(m, false)
    }

    /// As [`new`](Self::new), but `allow_m1` admits the 4-dimensional case,
    /// where `Sp(1)·Sp(1) = SO(4)` and the quaternionic condition is empty.
    pub fn with_override(m: usize, allow_m1: bool) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParameter(format!("quaternionic dimension m = {m} must be at least 1")));
        }
        if m == 1 && !allow_m1 {
            return Err(Error::InvalidParameter(
                "m = 1 is excluded: Sp(1)·Sp(1) = SO(4) is not a proper holonomy reduction (assumption m ≥ 2); \
                 pass the m = 1 override for algebra-only experiments"
                    .into(),
            ));
        }
        if 4 * m > crate::blade::MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "m = {m} exceeds the blade width (4m ≤ {})",
                crate::blade::MAX_DIM
            )));
        }
        let j = std::array::from_fn(|a| SignedPerm {
            image: (0..4 * m)
                .map(|i| {
                    let (q, r) = (i / 4, i % 4);
                    let (t, s) = LEFT_MULT[a][r];
                    (4 * q + t, s)
                })
                .collect(),
        });
        Ok(QuaternionicFrame { m, j })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        4 * self.m
    }

    /// `J_α` for `α ∈ {0, 1, 2}` (i.e. `J₁, J₂, J₃`).
    pub fn j(&self, alpha: usize) -> &SignedPerm {
        &self.j[alpha]
    }

    pub fn apply_j(&self, alpha: usize, x: &Form) -> Form {
        self.j[alpha].apply(x)
    }

    /// `ω_α = ½ Σ_i e_i ∧ J_α e_i`.
    pub fn fundamental_form(&self, alpha: usize) -> Form {
        let n = self.n();
        let mut w = Form::zero(n);
        for i in 0..n {
            let ei = Form::basis_vector(n, i);
            let jei = self.apply_j(alpha, &ei);
            let t = jei.wedge(&ei).expect("same dimension"); // e_i ∧ J e_i = (J e_i) ∧ e_i with a sign
            w.add_scaled(&t, &rat(-1, 2));
        }
        w
    }

    /// The Kraines form `Σ_α ω_α ∧ ω_α`.
    pub fn kraines_form(&self) -> Form {
        let mut out = Form::zero(self.n());
        for a in 0..3 {
            let w = self.fundamental_form(a);
            out.add_scaled(&w.wedge(&w).expect("same dimension"), &Scalar::one());
        }
        out
    }
}

/// The natural algebraic operators of the quaternionic structure, memoized
/// per degree.
#[derive(Clone)]
pub struct OperatorFamily {
    frame: Arc<QuaternionicFrame>,
    l_alpha: [Op; 3],
    lambda_alpha: [Op; 3],
    j_alpha: [Op; 3],
    l: Op,
    l_minus: Op,
    j: Op,
    lambda: Op,
    lambda_plus: Op,
    c: Op,
}

fn sum_over_alpha(f: impl Fn(usize) -> Op) -> Op {
    let ops: Vec<Op> = (0..3).map(f).collect();
    Op::sum(&ops).expect("three terms")
}

impl OperatorFamily {
    pub fn new(frame: &QuaternionicFrame) -> Self {
        let frame = Arc::new(frame.clone());
        let n = frame.n();
        let l_alpha: [Op; 3] = std::array::from_fn(|a| {
            let fr = frame.clone();
            // ½ Σ_i e_i ∧ J_α(e_i) ∧
            Op::from_blade_fn(n, 2, move |b| {
                let u = Form::blade(n, b);
                let mut out = Form::zero(n);
                for i in 0..n {
                    let ei = Form::basis_vector(n, i);
                    let inner = u.wedge_vector(&fr.apply_j(a, &ei)).expect("1-form");
                    out.add_scaled(&inner.wedge_vector(&ei).expect("1-form"), &rat(1, 2));
                }
                out
            })
            .cached()
        });
        let lambda_alpha: [Op; 3] = std::array::from_fn(|a| {
            let fr = frame.clone();
            // −½ Σ_i e_i ⌟ J_α(e_i) ⌟
            Op::from_blade_fn(n, -2, move |b| {
                let u = Form::blade(n, b);
                let mut out = Form::zero(n);
                for i in 0..n {
                    let ei = Form::basis_vector(n, i);
                    let inner = u.contract_vector(&fr.apply_j(a, &ei)).expect("1-form");
                    out.add_scaled(&inner.contract_vector(&ei).expect("1-form"), &rat(-1, 2));
                }
                out
            })
            .cached()
        });
        let j_alpha: [Op; 3] = std::array::from_fn(|a| {
            let fr = frame.clone();
            // Σ_i J_α(e_i) ∧ e_i ⌟
            Op::from_blade_fn(n, 0, move |b| {
                let u = Form::blade(n, b);
                let mut out = Form::zero(n);
                for i in 0..n {
                    let ei = Form::basis_vector(n, i);
                    let inner = u.contract_vector(&ei).expect("1-form");
                    out.add_scaled(&inner.wedge_vector(&fr.apply_j(a, &ei)).expect("1-form"), &Scalar::one());
                }
                out
            })
            .cached()
        });
        let l = sum_over_alpha(|a| l_alpha[a].after(&l_alpha[a])).cached();
        let l_minus = sum_over_alpha(|a| l_alpha[a].after(&j_alpha[a])).cached();
        let j = sum_over_alpha(|a| j_alpha[a].after(&j_alpha[a])).cached();
        let lambda = sum_over_alpha(|a| lambda_alpha[a].after(&lambda_alpha[a])).cached();
        let lambda_plus = sum_over_alpha(|a| lambda_alpha[a].after(&j_alpha[a])).cached();
        let c = sum_over_alpha(|a| l_alpha[a].after(&lambda_alpha[a])).cached();
        OperatorFamily { frame, l_alpha, lambda_alpha, j_alpha, l, l_minus, j, lambda, lambda_plus, c }
    }

    pub fn frame(&self) -> &QuaternionicFrame {
        &self.frame
    }

    pub fn n(&self) -> usize {
        self.frame.n()
    }

    /// `L_α = ½ Σ e_i ∧ J_α(e_i) ∧`.
    pub fn l_alpha(&self, alpha: usize) -> &Op {
        &self.l_alpha[alpha]
    }

    /// `Λ_α = −½ Σ e_i ⌟ J_α(e_i) ⌟`.
    pub fn lambda_alpha(&self, alpha: usize) -> &Op {
        &self.lambda_alpha[alpha]
    }

    /// The derivation `J_α = Σ J_α(e_i) ∧ e_i ⌟`.
    pub fn j_alpha(&self, alpha: usize) -> &Op {
        &self.j_alpha[alpha]
    }

    /// `L = Σ L_α L_α`.
    pub fn l(&self) -> &Op {
        &self.l
    }

    /// `L⁻ = Σ L_α J_α`.
    pub fn l_minus(&self) -> &Op {
        &self.l_minus
    }

    /// `J = Σ J_α J_α`.
    pub fn j(&self) -> &Op {
        &self.j
    }

    /// `Λ = Σ Λ_α Λ_α`.
    pub fn lambda(&self) -> &Op {
        &self.lambda
    }

    /// `Λ⁺ = Σ Λ_α J_α`.
    pub fn lambda_plus(&self) -> &Op {
        &self.lambda_plus
    }

    /// `C = Σ L_α Λ_α`.
    pub fn c(&self) -> &Op {
        &self.c
    }
}

/// Options shared by the algebraic verification sweeps.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub seed: u64,
    /// Number of seeded random rational vectors added to the basis vectors.
    pub random_vectors: usize,
    /// Degrees to check; `None` means every degree `0..=4m`.
    pub degrees: Option<Vec<usize>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { seed: 0x5eed, random_vectors: 3, degrees: None }
    }
}

impl SweepConfig {
    fn degrees(&self, n: usize) -> Vec<usize> {
        match &self.degrees {
            Some(d) => d.iter().copied().filter(|&p| p <= n).collect(),
            None => (0..=n).collect(),
        }
    }
}

/// A rational vector with small random numerators and denominators.
pub fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Form {
    let coeffs: Vec<Scalar> = (0..n).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=5))).collect();
    Form::vector(&coeffs)
}

/// Test vectors `X`: every basis vector, `3e₁ − ½e₇` when `n ≥ 7`, and
/// `count` seeded random rational vectors.
pub fn test_vectors(n: usize, seed: u64, count: usize) -> Vec<(String, Form)> {
    let mut out: Vec<(String, Form)> = (0..n).map(|i| (format!("e{}", i + 1), Form::basis_vector(n, i))).collect();
    if n >= 7 {
        let mut x = Form::zero(n);
        x.add_term(Blade::vector(0), Scalar::from(3));
        x.add_term(Blade::vector(6), rat(-1, 2));
        out.push(("3e1-1/2e7".into(), x));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        out.push((format!("random{}", k + 1), random_vector(n, &mut rng)));
    }
    out
}

/// One side of an operator identity, built for a given test vector.
type Builder = Box<dyn Fn(&OperatorFamily, &Form) -> Op + Send + Sync>;

/// An identity `lhs = rhs` between operators depending on a vector `X`.
pub struct VectorIdentity {
    pub id: &'static str,
    pub anchor: &'static str,
    lhs: Builder,
    rhs: Builder,
}

impl VectorIdentity {
    fn new(
        id: &'static str,
        anchor: &'static str,
        lhs: impl Fn(&OperatorFamily, &Form) -> Op + Send + Sync + 'static,
        rhs: impl Fn(&OperatorFamily, &Form) -> Op + Send + Sync + 'static,
    ) -> Self {
        VectorIdentity { id, anchor, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn sides(&self, fam: &OperatorFamily, x: &Form) -> (Op, Op) {
        ((self.lhs)(fam, x), (self.rhs)(fam, x))
    }
}

fn wedge(x: &Form) -> Op {
    Op::wedge(x)
}

fn contract(x: &Form) -> Op {
    Op::contract(x)
}

/// `Σ_α A_α ∘ J_α(X)∧` or `Σ_α A_α ∘ J_α(X)⌟` with `A_α` chosen by `outer`.
fn sum_jx(fam: &OperatorFamily, x: &Form, outer: impl Fn(&OperatorFamily, usize) -> Op, use_wedge: bool) -> Op {
    sum_over_alpha(|a| {
        let jx = fam.frame().apply_j(a, x);
        let inner = if use_wedge { wedge(&jx) } else { contract(&jx) };
        outer(fam, a).after(&inner)
    })
}

fn lalpha(f: &OperatorFamily, a: usize) -> Op {
    f.l_alpha(a).clone()
}

fn lamalpha(f: &OperatorFamily, a: usize) -> Op {
    f.lambda_alpha(a).clone()
}

fn jalpha(f: &OperatorFamily, a: usize) -> Op {
    f.j_alpha(a).clone()
}

const BASIC_IDS: [[&str; 4]; 3] = [
    ["basic.wedge-lambda.1", "basic.wedge-j.1", "basic.contract-l.1", "basic.contract-j.1"],
    ["basic.wedge-lambda.2", "basic.wedge-j.2", "basic.contract-l.2", "basic.contract-j.2"],
    ["basic.wedge-lambda.3", "basic.wedge-j.3", "basic.contract-l.3", "basic.contract-j.3"],
];

/// The four basic commutation relations between `X∧`, `X⌟` and the local operators.
pub fn basic_identities() -> Vec<VectorIdentity> {
    let mut out = Vec::new();
    for a in 0..3 {
        let ids = BASIC_IDS[a];
        out.push(VectorIdentity::new(
            ids[0],
            "[X∧, Λ_α] = −J_α(X)⌟",
            move |f, x| wedge(x).commutator(f.lambda_alpha(a)),
            move |f, x| -&contract(&f.frame().apply_j(a, x)),
        ));
        out.push(VectorIdentity::new(
            ids[1],
            "[X∧, J_α] = −J_α(X)∧",
            move |f, x| wedge(x).commutator(f.j_alpha(a)),
            move |f, x| -&wedge(&f.frame().apply_j(a, x)),
        ));
        out.push(VectorIdentity::new(
            ids[2],
            "[X⌟, L_α] = J_α(X)∧",
            move |f, x| contract(x).commutator(f.l_alpha(a)),
            move |f, x| wedge(&f.frame().apply_j(a, x)),
        ));
        out.push(VectorIdentity::new(
            ids[3],
            "[X⌟, J_α] = −J_α(X)⌟",
            move |f, x| contract(x).commutator(f.j_alpha(a)),
            move |f, x| -&contract(&f.frame().apply_j(a, x)),
        ));
    }
    out
}

/// The ten commutators of `X∧` and `X⌟` with the global operators, exactly as
/// stated, with `Σ_α A_α ∘ J_α(X)∧` read as `(A_α) ∘ (J_α(X)∧)`.
pub fn alg_identities() -> Vec<VectorIdentity> {
    let three = || Scalar::from(3);
    vec![
        VectorIdentity::new(
            "alg.01",
            "[X∧, Λ] = −2 Σ_α Λ_α ∘ J_α(X)⌟",
            |f, x| wedge(x).commutator(f.lambda()),
            |f, x| sum_jx(f, x, lamalpha, false).scaled(Scalar::from(-2)),
        ),
        VectorIdentity::new(
            "alg.02",
            "[X⌟, L] = 2 Σ_α L_α ∘ J_α(X)∧",
            |f, x| contract(x).commutator(f.l()),
            |f, x| sum_jx(f, x, lalpha, true).scaled(Scalar::from(2)),
        ),
        VectorIdentity::new(
            "alg.03",
            "[X∧, L⁻] = −Σ_α L_α ∘ J_α(X)∧",
            |f, x| wedge(x).commutator(f.l_minus()),
            |f, x| -&sum_jx(f, x, lalpha, true),
        ),
        VectorIdentity::new(
            "alg.04",
            "[X⌟, Λ⁺] = Σ_α Λ_α ∘ J_α(X)⌟",
            |f, x| contract(x).commutator(f.lambda_plus()),
            |f, x| sum_jx(f, x, lamalpha, false),
        ),
        VectorIdentity::new(
            "alg.05",
            "[X∧, Λ⁺] = −3X⌟ − Σ_α (Λ_α ∘ J_α(X)∧ + J_α ∘ J_α(X)⌟)",
            |f, x| wedge(x).commutator(f.lambda_plus()),
            move |f, x| {
                let s = &sum_jx(f, x, lamalpha, true) + &sum_jx(f, x, jalpha, false);
                -&(&contract(x).scaled(three()) + &s)
            },
        ),
        VectorIdentity::new(
            "alg.06",
            "[X⌟, L⁻] = 3X∧ + Σ_α (J_α ∘ J_α(X)∧ − L_α ∘ J_α(X)⌟)",
            |f, x| contract(x).commutator(f.l_minus()),
            move |f, x| {
                let s = &sum_jx(f, x, jalpha, true) - &sum_jx(f, x, lalpha, false);
                &wedge(x).scaled(three()) + &s
            },
        ),
        VectorIdentity::new(
            "alg.07",
            "[X∧, J] = −3X∧ − 2 Σ_α J_α ∘ J_α(X)∧",
            |f, x| wedge(x).commutator(f.j()),
            move |f, x| -&(&wedge(x).scaled(three()) + &sum_jx(f, x, jalpha, true).scaled(Scalar::from(2))),
        ),
        VectorIdentity::new(
            "alg.08",
            "[X⌟, J] = −3X⌟ − 2 Σ_α J_α ∘ J_α(X)⌟",
            |f, x| contract(x).commutator(f.j()),
            move |f, x| -&(&contract(x).scaled(three()) + &sum_jx(f, x, jalpha, false).scaled(Scalar::from(2))),
        ),
        VectorIdentity::new(
            "alg.09",
            "[X∧, C] = Σ_α L_α ∘ J_α(X)∧",
            |f, x| wedge(x).commutator(f.c()),
            |f, x| sum_jx(f, x, lalpha, true),
        ),
        VectorIdentity::new(
            "alg.10",
            "[X⌟, C] = 3X⌟ + Σ_α Λ_α ∘ J_α(X)∧",
            |f, x| contract(x).commutator(f.c()),
            move |f, x| &contract(x).scaled(three()) + &sum_jx(f, x, lamalpha, true),
        ),
    ]
}

/// `[X⌟, Λ⁺]` as it follows from `[X⌟, J_α] = −J_α(X)⌟` (`X⌟` commutes with
/// `Λ_α`): `[X⌟, Λ⁺] = −Σ_α Λ_α ∘ J_α(X)⌟`.
pub fn alg_contract_lambda_plus_derived() -> VectorIdentity {
    VectorIdentity::new(
        "alg.04-derived",
        "[X⌟, Λ⁺] = −Σ_α Λ_α ∘ J_α(X)⌟",
        |f, x| contract(x).commutator(f.lambda_plus()),
        |f, x| -&sum_jx(f, x, lamalpha, false),
    )
}

/// The degree-consistent form of `[X∧, C]` obtained from `[X∧, Λ_α] = −J_α(X)⌟`
/// (`X∧` commutes with `L_α`): `[X∧, C] = −Σ_α L_α ∘ J_α(X)⌟`.
pub fn alg_wedge_c_derived() -> VectorIdentity {
    VectorIdentity::new(
        "alg.09-derived",
        "[X∧, C] = −Σ_α L_α ∘ J_α(X)⌟",
        |f, x| wedge(x).commutator(f.c()),
        |f, x| -&sum_jx(f, x, lalpha, false),
    )
}

/// Check every identity on every requested degree and test vector; one record
/// per (identity, degree), ordered by identity then degree.
pub fn sweep(fam: &OperatorFamily, identities: &[VectorIdentity], cfg: &SweepConfig) -> Vec<CheckRecord> {
    let n = fam.n();
    let vectors = test_vectors(n, cfg.seed, cfg.random_vectors);
    let degrees = cfg.degrees(n);
    let jobs: Vec<(usize, usize)> = (0..identities.len()).flat_map(|k| degrees.iter().map(move |&p| (k, p))).collect();
    jobs.par_iter()
        .map(|&(k, p)| {
            let ident = &identities[k];
            let mut residual = Residual::zero();
            let mut failing = Vec::new();
            let mut shift_mismatch = None;
            for (label, x) in &vectors {
                let (lhs, rhs) = ident.sides(fam, x);
                if lhs.shift() != rhs.shift() {
                    shift_mismatch = Some((lhs.shift(), rhs.shift()));
                    break;
                }
                let r = &lhs.matrix(p) - &rhs.matrix(p);
                if !r.is_zero() {
                    failing.push(label.clone());
                }
                residual.merge(&Residual::of_operator(&r));
            }
            let base = |rec: CheckRecord| {
                rec.param("m", fam.frame().m()).param("p", p).param("vectors", vectors.len()).param("seed", cfg.seed)
            };
            match shift_mismatch {
                Some((l, r)) => base(CheckRecord::check(ident.id, ident.anchor, false)).detail(format!(
                    "reading ambiguity: left side shifts degree by {l:+}, right side by {r:+}; \
                     the identity cannot hold as written"
                )),
                None => {
                    let mut rec = base(CheckRecord::from_residual(ident.id, ident.anchor, residual));
                    if !failing.is_empty() {
                        rec = rec.param("failing_vectors", json!(failing));
                    }
                    rec
                }
            }
        })
        .collect()
}

pub fn verify_basic_commutators(frame: &QuaternionicFrame, cfg: &SweepConfig) -> Vec<CheckRecord> {
    sweep(&OperatorFamily::new(frame), &basic_identities(), cfg)
}

/// All ten stated commutators plus the derived forms of `[X⌟, Λ⁺]` and `[X∧, C]`.
pub fn verify_alg_commutators(frame: &QuaternionicFrame, cfg: &SweepConfig) -> Vec<CheckRecord> {
    let mut ids = alg_identities();
    ids.insert(4, alg_contract_lambda_plus_derived());
    ids.push(alg_wedge_c_derived());
    sweep(&OperatorFamily::new(frame), &ids, cfg)
}

fn perm_check(id: &str, anchor: &str, lhs: &SignedPerm, rhs: &SignedPerm, m: usize) -> CheckRecord {
    CheckRecord::check(id, anchor, lhs == rhs).param("m", m)
}

/// Quaternion relations, orthogonality and skewness of each `J_α`, and the
/// Gram matrix of the fundamental 2-forms.
pub fn verify_frame(frame: &QuaternionicFrame) -> Vec<CheckRecord> {
    let m = frame.m();
    let n = frame.n();
    let id = SignedPerm::identity(n);
    let minus_id = id.negated();
    let mut out = Vec::new();
    for a in 0..3 {
        let ja = frame.j(a);
        out.push(perm_check(&format!("frame.square.{}", a + 1), "J_α² = −id", &ja.compose(ja), &minus_id, m));
        let mat = ja.to_matrix();
        let t = mat.transpose();
        let skew = (0..n).all(|i| (0..n).all(|k| t[(i, k)] == -&mat[(i, k)]));
        let orth = &t * &mat == Matrix::identity(n);
        out.push(
            CheckRecord::check(format!("frame.skew-orthogonal.{}", a + 1), "J_αᵀ = −J_α, J_αᵀJ_α = id", skew && orth)
                .param("m", m),
        );
    }
    let (j1, j2, j3) = (frame.j(0), frame.j(1), frame.j(2));
    out.push(perm_check("frame.product.12", "J₁J₂ = J₃", &j1.compose(j2), j3, m));
    out.push(perm_check("frame.product.23", "J₂J₃ = J₁", &j2.compose(j3), j1, m));
    out.push(perm_check("frame.product.31", "J₃J₁ = J₂", &j3.compose(j1), j2, m));
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        out.push(perm_check(
            &format!("frame.anticommute.{}{}", a + 1, b + 1),
            "J_αJ_β = −J_βJ_α",
            &frame.j(a).compose(frame.j(b)),
            &frame.j(b).compose(frame.j(a)).negated(),
            m,
        ));
    }
    let omegas: Vec<Form> = (0..3).map(|a| frame.fundamental_form(a)).collect();
    for a in 0..3 {
        for b in 0..3 {
            let g = omegas[a].inner(&omegas[b]).expect("2-forms");
            let expected = if a == b { Scalar::from(2 * m) } else { Scalar::zero() };
            out.push(
                CheckRecord::from_residual(
                    format!("frame.omega-gram.{}{}", a + 1, b + 1),
                    "⟨ω_α, ω_β⟩ = 2m δ_αβ",
                    Residual::of_scalar(&(&g - &expected)),
                )
                .param("m", m)
                .param("value", g.to_string()),
            );
        }
    }
    out
}

fn op_residual(a: &LinearOperator, b: &LinearOperator) -> Residual {
    Residual::of_operator(&(a - b))
}

/// Self-adjointness, adjoint pairs, `[J, C] = 0`, `J_α = ω_α •`, `L_α = ω_α ∧`,
/// and the degree-shift contracts, on every degree.
pub fn verify_structural(frame: &QuaternionicFrame, degrees: Option<&[usize]>) -> Vec<CheckRecord> {
    let fam = OperatorFamily::new(frame);
    let n = frame.n();
    let m = frame.m();
    let degrees: Vec<usize> =
        degrees.map(|d| d.iter().copied().filter(|&p| p <= n).collect()).unwrap_or_else(|| (0..=n).collect());
    let omegas: Vec<Form> = (0..3).map(|a| frame.fundamental_form(a)).collect();
    let mut out: Vec<CheckRecord> = degrees
        .par_iter()
        .flat_map_iter(|&p| {
            let mut recs = Vec::new();
            let rec = |id: &str, anchor: &str, r: Residual| {
                CheckRecord::from_residual(id, anchor, r).param("m", m).param("p", p)
            };
            let j = fam.j().matrix(p);
            let c = fam.c().matrix(p);
            recs.push(rec("struct.j-self-adjoint", "Jᵀ = J", op_residual(&j.transpose(), &j)));
            recs.push(rec("struct.c-self-adjoint", "Cᵀ = C", op_residual(&c.transpose(), &c)));
            recs.push(rec("struct.jc-commute", "[J, C] = 0", op_residual(&(&j * &c), &(&c * &j))));
            if p + 4 <= n {
                recs.push(rec(
                    "struct.l-adjoint-lambda",
                    "Lᵀ = Λ",
                    op_residual(&fam.l().matrix(p).transpose(), &fam.lambda().matrix(p + 4)),
                ));
            }
            if p + 2 <= n {
                let lt = fam.l_minus().matrix(p).transpose();
                let lp = fam.lambda_plus().matrix(p + 2);
                recs.push(rec("struct.lminus-adjoint-lambdaplus", "(L⁻)ᵀ = Λ⁺", op_residual(&lt, &lp)));
                // J_α is skew and commutes with Λ_α, so (L_α J_α)ᵀ = −Λ_α J_α
                recs.push(rec(
                    "struct.lminus-adjoint-lambdaplus-signed",
                    "(L⁻)ᵀ = −Λ⁺",
                    Residual::of_operator(&(&lt + &lp)),
                ));
            }
            for a in 0..3 {
                recs.push(rec(
                    &format!("struct.j-alpha-is-so-action.{}", a + 1),
                    "J_α = ω_α • as endomorphisms",
                    op_residual(&fam.j_alpha(a).matrix(p), &Op::so_action(&omegas[a]).matrix(p)),
                ));
                recs.push(rec(
                    &format!("struct.l-alpha-is-wedge-omega.{}", a + 1),
                    "L_α = ω_α ∧",
                    op_residual(&fam.l_alpha(a).matrix(p), &Op::wedge_form(&omegas[a], 2).matrix(p)),
                ));
            }
            let shifts_ok = [
                (fam.l(), 4),
                (fam.lambda(), -4),
                (fam.l_minus(), 2),
                (fam.lambda_plus(), -2),
                (fam.j(), 0),
                (fam.c(), 0),
            ]
            .iter()
            .all(|(op, s)| op.shift() == *s && op.matrix(p).target_degree() == p as i32 + s);
            recs.push(
                CheckRecord::check("struct.degree-shifts", "L: +4, Λ: −4, L⁻: +2, Λ⁺: −2, J, C: 0", shifts_ok)
                    .param("m", m)
                    .param("p", p),
            );
            recs
        })
        .collect();
    out.sort_by(|a, b| {
        a.id.cmp(&b.id).then_with(|| a.params.get("p").map(|v| v.as_u64()).cmp(&b.params.get("p").map(|v| v.as_u64())))
    });
    out
}

/// `J` on `Λ¹` and `C` on `Λ⁰`: the two closed-form spot values.
pub fn verify_spot_values(frame: &QuaternionicFrame) -> Vec<CheckRecord> {
    let fam = OperatorFamily::new(frame);
    let n = frame.n();
    let j1 = fam.j().matrix(1);
    let c0 = fam.c().matrix(0);
    vec![
        CheckRecord::from_residual(
            "spot.j-on-1-forms",
            "J = −3 id on 1-forms",
            op_residual(&j1, &LinearOperator::scalar(n, 1, &Scalar::from(-3))),
        )
        .param("m", frame.m()),
        CheckRecord::from_residual("spot.c-on-0-forms", "C = 0 on 0-forms", Residual::of_operator(&c0))
            .param("m", frame.m()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_construction_rules() {
        assert!(QuaternionicFrame::new(0).is_err());
        let err = QuaternionicFrame::new(1).unwrap_err();
        assert!(err.to_string().contains("m ≥ 2"));
        assert!(QuaternionicFrame::with_override(1, true).is_ok());
        let f = QuaternionicFrame::new(2).unwrap();
        // J₁ e₁ = e₂
        assert_eq!(f.apply_j(0, &Form::basis_vector(8, 0)), Form::basis_vector(8, 1));
    }

    #[test]
    fn frame_invariants_hold() {
        for m in [2, 3] {
            let f = QuaternionicFrame::new(m).unwrap();
            for r in verify_frame(&f) {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn fundamental_form_shape() {
        let f = QuaternionicFrame::new(2).unwrap();
        // ω₁ = e12 + e34 + e56 + e78
        let w = f.fundamental_form(0);
        let mut expected = Form::zero(8);
        for q in 0..4 {
            expected.add_term(Blade::from_indices(&[2 * q, 2 * q + 1]).unwrap().1, Scalar::one());
        }
        assert_eq!(w, expected);
        assert_eq!(w.squared_norm(), Scalar::from(4));
    }

    #[test]
    fn spot_values() {
        let f = QuaternionicFrame::new(2).unwrap();
        for r in verify_spot_values(&f) {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn named_examples() {
        let f = QuaternionicFrame::new(2).unwrap();
        let fam = OperatorFamily::new(&f);
        let n = 8;
        // [X∧, Λ₁] + J₁(X)⌟ on Λ³ with X = e5
        let x = Form::basis_vector(n, 4);
        let r = &Op::wedge(&x).commutator(fam.lambda_alpha(0)) + &Op::contract(&f.apply_j(0, &x));
        assert!(r.matrix(3).is_zero());
        // [X⌟, J₁] + J₁(X)⌟ on Λ² with X = e1
        let x = Form::basis_vector(n, 0);
        let r = &Op::contract(&x).commutator(fam.j_alpha(0)) + &Op::contract(&f.apply_j(0, &x));
        assert!(r.matrix(2).is_zero());
    }
}
