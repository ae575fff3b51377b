//! Differential forms with polynomial coefficients on flat `ℝ^{4m}` with
//! constant `J_α`, the first-order natural operators, and the twistor and
//! Killing equations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::blade::{basis, Blade};
use crate::error::{Error, Result};
use crate::form::Form;
use crate::operator::{LinearOperator, Op};
use crate::quaternionic::{OperatorFamily, QuaternionicFrame};
use crate::report::{CheckRecord, Residual};
use crate::scalar::{rat, Scalar};

/// Default total polynomial degree cap for samples.
pub const DEFAULT_DEGREE_CAP: usize = 3;

/// Exponent vector of a monomial `x₁^{e₁} ⋯ x_n^{e_n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u8>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `∂_i` as `(coefficient, monomial)`, or `None` if it vanishes.
    fn derivative(&self, i: usize) -> Option<(u8, Monomial)> {
        let e = self.0[i];
        (e > 0).then(|| {
            let mut v = self.0.clone();
            v[i] -= 1;
            (e, Monomial(v))
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A polynomial in `n` variables with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        Self::monomial(n, Monomial::one(n), c)
    }

    pub fn var(n: usize, i: usize) -> Self {
        Self::monomial(n, Monomial::var(n, i), Scalar::one())
    }

    pub fn monomial(n: usize, mono: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero(n);
        p.add_term(mono, c);
        p
    }

    pub fn add_term(&mut self, mono: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.derivative(i) {
                out.add_term(dm, c * &Scalar::from(e as i64));
            }
        }
        out
    }
}

/// A differential form `Σ_I f_I dx_I` with polynomial coefficients, stored as
/// a map from monomials to constant forms.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyForm {
    n: usize,
    terms: BTreeMap<Monomial, Form>,
}

impl PolyForm {
    pub fn zero(n: usize) -> Self {
        PolyForm { n, terms: BTreeMap::new() }
    }

    /// A constant-coefficient form.
    pub fn constant(u: &Form) -> Self {
        Self::term(Monomial::one(u.dim()), u.clone())
    }

    pub fn term(mono: Monomial, u: Form) -> Self {
        let mut p = Self::zero(u.dim());
        p.add(mono, &u, &Scalar::one());
        p
    }

    /// `f · e_B`.
    pub fn from_polynomial(f: &Polynomial, blade: Blade) -> Self {
        let mut p = Self::zero(f.n);
        for (m, c) in f.terms() {
            p.add(m.clone(), &Form::blade(f.n, blade), c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn add(&mut self, mono: Monomial, u: &Form, c: &Scalar) {
        if u.is_zero() || c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert_with(|| Form::zero(self.n));
        entry.add_scaled(u, c);
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn add_scaled(&mut self, other: &PolyForm, c: &Scalar) {
        for (m, u) in &other.terms {
            self.add(m.clone(), u, c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> PolyForm {
        let mut out = PolyForm::zero(self.n);
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Form)> {
        self.terms.iter()
    }

    /// Coefficient polynomial of `dx_B`.
    pub fn coefficient(&self, blade: Blade) -> Polynomial {
        let mut p = Polynomial::zero(self.n);
        for (m, u) in &self.terms {
            p.add_term(m.clone(), u.coefficient(blade));
        }
        p
    }

    /// Common form degree, `None` if zero or inhomogeneous.
    pub fn form_degree(&self) -> Option<usize> {
        let mut degs = self.terms.values().map(Form::degree);
        let first = degs.next()??;
        degs.all(|d| d == Some(first)).then_some(first)
    }

    pub fn poly_degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// `∂_i`, i.e. `∇_{e_i}` on flat space.
    pub fn derivative(&self, i: usize) -> PolyForm {
        let mut out = PolyForm::zero(self.n);
        for (m, u) in &self.terms {
            if let Some((e, dm)) = m.derivative(i) {
                out.add(dm, u, &Scalar::from(e as i64));
            }
        }
        out
    }

    /// Multiply by the monomial `mono`.
    pub fn times(&self, mono: &Monomial) -> PolyForm {
        PolyForm { n: self.n, terms: self.terms.iter().map(|(m, u)| (m.mul(mono), u.clone())).collect() }
    }

    /// Multiply by a polynomial.
    pub fn times_poly(&self, f: &Polynomial) -> PolyForm {
        let mut out = PolyForm::zero(self.n);
        for (mono, c) in f.terms() {
            out.add_scaled(&self.times(mono), c);
        }
        out
    }

    /// Apply a pointwise map to every coefficient form.
    pub fn map(&self, f: impl Fn(&Form) -> Form) -> PolyForm {
        let mut out = PolyForm::zero(self.n);
        for (m, u) in &self.terms {
            out.add(m.clone(), &f(u), &Scalar::one());
        }
        out
    }

    /// Size of this form regarded as a residual.
    pub fn residual(&self) -> Residual {
        let mut r = Residual::zero();
        for u in self.terms.values() {
            for (_, c) in u.terms() {
                r.merge(&Residual::of_scalar(c));
            }
        }
        r
    }
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, u)| format!("{m}·({u})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl std::ops::Sub<&PolyForm> for &PolyForm {
    type Output = PolyForm;
    fn sub(self, rhs: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

impl std::ops::Add<&PolyForm> for &PolyForm {
    type Output = PolyForm;
    fn add(self, rhs: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

/// A pointwise operator memoized as one matrix per form degree.
#[derive(Clone)]
pub struct Pointwise {
    op: Op,
    mats: Arc<Vec<OnceLock<LinearOperator>>>,
}

impl Pointwise {
    pub fn new(op: Op) -> Self {
        let mats = Arc::new((0..=op.dim()).map(|_| OnceLock::new()).collect());
        Pointwise { op, mats }
    }

    pub fn shift(&self) -> i32 {
        self.op.shift()
    }

    pub fn matrix(&self, p: usize) -> &LinearOperator {
        self.mats[p].get_or_init(|| self.op.matrix(p))
    }

    pub fn apply_form(&self, u: &Form) -> Form {
        match u.degree() {
            Some(p) => self.matrix(p).apply_unchecked(u),
            None if u.is_zero() => u.clone(),
            None => {
                let mut out = Form::zero(u.dim());
                for p in 0..=u.dim() {
                    let part = u.component(p);
                    if !part.is_zero() {
                        out.add_scaled(&self.matrix(p).apply_unchecked(&part), &Scalar::one());
                    }
                }
                out
            }
        }
    }

    pub fn apply(&self, u: &PolyForm) -> PolyForm {
        u.map(|f| self.apply_form(f))
    }
}

/// The first-order operators: `d`, `δ` and the six natural ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FirstOrder {
    D,
    Delta,
    DPlus,
    DMinus,
    DC,
    DeltaPlus,
    DeltaMinus,
    DeltaC,
}

impl FirstOrder {
    pub const ALL: [FirstOrder; 8] = [
        FirstOrder::D,
        FirstOrder::Delta,
        FirstOrder::DPlus,
        FirstOrder::DMinus,
        FirstOrder::DC,
        FirstOrder::DeltaPlus,
        FirstOrder::DeltaMinus,
        FirstOrder::DeltaC,
    ];

    pub fn shift(self) -> i32 {
        match self {
            FirstOrder::D | FirstOrder::DC | FirstOrder::DeltaPlus => 1,
            FirstOrder::Delta | FirstOrder::DMinus | FirstOrder::DeltaC => -1,
            FirstOrder::DPlus => 3,
            FirstOrder::DeltaMinus => -3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FirstOrder::D => "d",
            FirstOrder::Delta => "δ",
            FirstOrder::DPlus => "d⁺",
            FirstOrder::DMinus => "d⁻",
            FirstOrder::DC => "d^c",
            FirstOrder::DeltaPlus => "δ⁺",
            FirstOrder::DeltaMinus => "δ⁻",
            FirstOrder::DeltaC => "δ^c",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// The flat model: constant quaternionic frame on `ℝ^{4m}` and memoized
/// operator matrices.
#[derive(Clone)]
pub struct FlatModel {
    fam: OperatorFamily,
    /// `symbols[op][i]` is the pointwise operator `A_i` with `op = Σ_i A_i ∂_i`.
    symbols: Arc<Vec<Vec<Pointwise>>>,
    pub l: Pointwise,
    pub lambda: Pointwise,
    pub l_minus: Pointwise,
    pub lambda_plus: Pointwise,
    pub j: Pointwise,
    pub c: Pointwise,
}

impl FlatModel {
    pub fn new(frame: &QuaternionicFrame) -> Self {
        let fam = OperatorFamily::new(frame);
        let n = frame.n();
        let symbols =
            FirstOrder::ALL.iter().map(|&op| (0..n).map(|i| Pointwise::new(symbol(&fam, op, i))).collect()).collect();
        FlatModel {
            symbols: Arc::new(symbols),
            l: Pointwise::new(fam.l().clone()),
            lambda: Pointwise::new(fam.lambda().clone()),
            l_minus: Pointwise::new(fam.l_minus().clone()),
            lambda_plus: Pointwise::new(fam.lambda_plus().clone()),
            j: Pointwise::new(fam.j().clone()),
            c: Pointwise::new(fam.c().clone()),
            fam,
        }
    }

    pub fn family(&self) -> &OperatorFamily {
        &self.fam
    }

    pub fn n(&self) -> usize {
        self.fam.n()
    }

    /// The pointwise coefficient of `∂_i` in `op`.
    pub fn symbol(&self, op: FirstOrder, i: usize) -> &Pointwise {
        &self.symbols[op.index()][i]
    }

    pub fn apply(&self, op: FirstOrder, u: &PolyForm) -> PolyForm {
        let mut out = PolyForm::zero(self.n());
        for i in 0..self.n() {
            let du = u.derivative(i);
            if !du.is_zero() {
                out.add_scaled(&self.symbol(op, i).apply(&du), &Scalar::one());
            }
        }
        out
    }

    pub fn d(&self, u: &PolyForm) -> PolyForm {
        self.apply(FirstOrder::D, u)
    }

    pub fn delta(&self, u: &PolyForm) -> PolyForm {
        self.apply(FirstOrder::Delta, u)
    }
}

/// `A_i` for each first-order operator:
/// `d = Σ e_i∧∂_i`, `δ = −Σ e_i⌟∂_i`, `d⁺ = Σ L_α J_α(e_i)∧∂_i`,
/// `d⁻ = Σ Λ_α J_α(e_i)∧∂_i`, `d^c = Σ J_α J_α(e_i)∧∂_i`,
/// `δ⁺ = −Σ L_α J_α(e_i)⌟∂_i`, `δ⁻ = −Σ Λ_α J_α(e_i)⌟∂_i`,
/// `δ^c = −Σ J_α J_α(e_i)⌟∂_i`.
fn symbol(fam: &OperatorFamily, op: FirstOrder, i: usize) -> Op {
    let n = fam.n();
    let ei = Form::basis_vector(n, i);
    let twisted = |outer: &dyn Fn(usize) -> Op, wedge: bool| {
        let ops: Vec<Op> = (0..3)
            .map(|a| {
                let jei = fam.frame().apply_j(a, &ei);
                outer(a).after(&if wedge { Op::wedge(&jei) } else { Op::contract(&jei) })
            })
            .collect();
        Op::sum(&ops).expect("three terms")
    };
    let l = |a: usize| fam.l_alpha(a).clone();
    let lam = |a: usize| fam.lambda_alpha(a).clone();
    let j = |a: usize| fam.j_alpha(a).clone();
    match op {
        FirstOrder::D => Op::wedge(&ei),
        FirstOrder::Delta => -&Op::contract(&ei),
        FirstOrder::DPlus => twisted(&l, true),
        FirstOrder::DMinus => twisted(&lam, true),
        FirstOrder::DC => twisted(&j, true),
        FirstOrder::DeltaPlus => -&twisted(&l, false),
        FirstOrder::DeltaMinus => -&twisted(&lam, false),
        FirstOrder::DeltaC => -&twisted(&j, false),
    }
}

type Side = Box<dyn Fn(&FlatModel, &PolyForm) -> PolyForm + Send + Sync>;

/// An identity between differential operators on `PolyForm`s.
pub struct DiffIdentity {
    pub id: &'static str,
    pub anchor: &'static str,
    lhs: Side,
    rhs: Side,
}

impl DiffIdentity {
    fn new(
        id: &'static str,
        anchor: &'static str,
        lhs: impl Fn(&FlatModel, &PolyForm) -> PolyForm + Send + Sync + 'static,
        rhs: impl Fn(&FlatModel, &PolyForm) -> PolyForm + Send + Sync + 'static,
    ) -> Self {
        DiffIdentity { id, anchor, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn residual(&self, model: &FlatModel, u: &PolyForm) -> PolyForm {
        &(self.lhs)(model, u) - &(self.rhs)(model, u)
    }
}

fn comm(model: &FlatModel, op: FirstOrder, alg: &Pointwise, u: &PolyForm) -> PolyForm {
    &model.apply(op, &alg.apply(u)) - &alg.apply(&model.apply(op, u))
}

fn lin(terms: &[(i64, PolyForm)]) -> PolyForm {
    let mut out = PolyForm::zero(terms[0].1.dim());
    for (c, t) in terms {
        out.add_scaled(t, &Scalar::from(*c));
    }
    out
}

/// The ten commutators of `d`, `δ` with the algebraic operators, plus the
/// sign-corrected `[δ, Λ⁺] = −δ⁻` that follows from `[X⌟, Λ⁺] = −Σ Λ_α∘J_α(X)⌟`.
pub fn comfor_identities() -> Vec<DiffIdentity> {
    use FirstOrder::*;
    vec![
        DiffIdentity::new(
            "comfor.d-lambda",
            "[d, Λ] = 2δ⁻",
            |f, u| comm(f, D, &f.lambda, u),
            |f, u| f.apply(DeltaMinus, u).scaled(&Scalar::from(2)),
        ),
        DiffIdentity::new(
            "comfor.delta-l",
            "[δ, L] = −2d⁺",
            |f, u| comm(f, Delta, &f.l, u),
            |f, u| f.apply(DPlus, u).scaled(&Scalar::from(-2)),
        ),
        DiffIdentity::new(
            "comfor.d-lminus",
            "[d, L⁻] = −d⁺",
            |f, u| comm(f, D, &f.l_minus, u),
            |f, u| f.apply(DPlus, u).scaled(&Scalar::from(-1)),
        ),
        DiffIdentity::new(
            "comfor.delta-lminus",
            "[δ, L⁻] = −δ⁺ − d^c − 3d",
            |f, u| comm(f, Delta, &f.l_minus, u),
            |f, u| lin(&[(-1, f.apply(DeltaPlus, u)), (-1, f.apply(DC, u)), (-3, f.apply(D, u))]),
        ),
        DiffIdentity::new(
            "comfor.d-lambdaplus",
            "[d, Λ⁺] = −d⁻ + δ^c + 3δ",
            |f, u| comm(f, D, &f.lambda_plus, u),
            |f, u| lin(&[(-1, f.apply(DMinus, u)), (1, f.apply(DeltaC, u)), (3, f.apply(Delta, u))]),
        ),
        DiffIdentity::new(
            "comfor.delta-lambdaplus",
            "[δ, Λ⁺] = δ⁻",
            |f, u| comm(f, Delta, &f.lambda_plus, u),
            |f, u| f.apply(DeltaMinus, u),
        ),
        DiffIdentity::new(
            "comfor.d-j",
            "[d, J] = −2d^c − 3d",
            |f, u| comm(f, D, &f.j, u),
            |f, u| lin(&[(-2, f.apply(DC, u)), (-3, f.apply(D, u))]),
        ),
        DiffIdentity::new(
            "comfor.delta-j",
            "[δ, J] = −2δ^c − 3δ",
            |f, u| comm(f, Delta, &f.j, u),
            |f, u| lin(&[(-2, f.apply(DeltaC, u)), (-3, f.apply(Delta, u))]),
        ),
        DiffIdentity::new(
            "comfor.delta-lambdaplus-derived",
            "[δ, Λ⁺] = −δ⁻",
            |f, u| comm(f, Delta, &f.lambda_plus, u),
            |f, u| f.apply(DeltaMinus, u).scaled(&Scalar::from(-1)),
        ),
        DiffIdentity::new("comfor.d-c", "[d, C] = δ⁺", |f, u| comm(f, D, &f.c, u), |f, u| f.apply(DeltaPlus, u)),
        DiffIdentity::new(
            "comfor.delta-c",
            "[δ, C] = −d⁻ + 3δ",
            |f, u| comm(f, Delta, &f.c, u),
            |f, u| lin(&[(-1, f.apply(DMinus, u)), (3, f.apply(Delta, u))]),
        ),
    ]
}

/// Samples of form degree `p`: `e_B` and `x_i e_B` for every blade `B` and
/// every coordinate `i`, plus `random` seeded forms with random polynomial
/// coefficients of degree at most `degree_cap`.
///
/// Every operator compared here is first order with constant coefficients and
/// no zeroth-order part, so it is determined by its values on `x_i e_B`; the
/// random samples exercise higher-degree coefficients on top of that.
pub fn samples(n: usize, p: usize, degree_cap: usize, seed: u64, random: usize) -> Vec<PolyForm> {
    let mut out = Vec::new();
    let blades = basis(n, p);
    for &b in &blades {
        out.push(PolyForm::constant(&Form::blade(n, b)));
        if degree_cap >= 1 {
            for i in 0..n {
                out.push(PolyForm::term(Monomial::var(n, i), Form::blade(n, b)));
            }
        }
    }
    if blades.is_empty() {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((p as u64) << 32));
    for _ in 0..random {
        let mut u = PolyForm::zero(n);
        for _ in 0..4 {
            let deg = rng.gen_range(0..=degree_cap);
            let mut e = vec![0u8; n];
            for _ in 0..deg {
                e[rng.gen_range(0..n)] += 1;
            }
            let b = blades[rng.gen_range(0..blades.len())];
            u.add(Monomial(e), &Form::blade(n, b), &rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)));
        }
        out.push(u);
    }
    out
}

/// Options for the flat-model sweeps.
#[derive(Clone, Debug)]
pub struct FlatConfig {
    pub degree_cap: usize,
    pub seed: u64,
    pub random_samples: usize,
}

impl Default for FlatConfig {
    fn default() -> Self {
        FlatConfig { degree_cap: DEFAULT_DEGREE_CAP, seed: 0x5eed, random_samples: 4 }
    }
}

/// Check each identity on every sample of form degree `p`.
pub fn verify_diff_identities(model: &FlatModel, ids: &[DiffIdentity], p: usize, cfg: &FlatConfig) -> Vec<CheckRecord> {
    let n = model.n();
    let samples = samples(n, p, cfg.degree_cap, cfg.seed, cfg.random_samples);
    ids.par_iter()
        .map(|ident| {
            let mut res = Residual::zero();
            let mut first_bad = None;
            for u in &samples {
                let r = ident.residual(model, u).residual();
                if !r.is_zero() && first_bad.is_none() {
                    first_bad = Some(format!("{u:?}"));
                }
                res.merge(&r);
            }
            let mut rec = CheckRecord::from_residual(ident.id, ident.anchor, res)
                .param("m", n / 4)
                .param("p", p)
                .param("samples", samples.len())
                .param("degree_cap", cfg.degree_cap)
                .param("seed", cfg.seed);
            if let Some(s) = first_bad {
                rec = rec.detail(format!("first failing sample: {s}"));
            }
            rec
        })
        .collect()
}

pub fn verify_comfor(model: &FlatModel, p: usize, cfg: &FlatConfig) -> Vec<CheckRecord> {
    verify_diff_identities(model, &comfor_identities(), p, cfg)
}

/// `d² = 0` and `δ² = 0`.
pub fn verify_complex(model: &FlatModel, p: usize, cfg: &FlatConfig) -> Vec<CheckRecord> {
    let ids = vec![
        DiffIdentity::new("flat.d-squared", "d² = 0", |f, u| f.d(&f.d(u)), |f, _| PolyForm::zero(f.n())),
        DiffIdentity::new("flat.delta-squared", "δ² = 0", |f, u| f.delta(&f.delta(u)), |f, _| PolyForm::zero(f.n())),
    ];
    let mut cfg = cfg.clone();
    cfg.degree_cap = cfg.degree_cap.max(2);
    verify_diff_identities(model, &ids, p, &cfg)
}

fn homogeneous_degree(u: &PolyForm) -> Result<Option<usize>> {
    if u.is_zero() {
        return Ok(None);
    }
    u.form_degree().map(Some).ok_or(Error::NotHomogeneous)
}

/// `T(X)u = ∇_X u − 1/(p+1) X⌟du + 1/(n−p+1) X∧δu`.
pub fn twistor_apply(model: &FlatModel, u: &PolyForm, x: &Form) -> Result<PolyForm> {
    let n = model.n();
    let Some(p) = homogeneous_degree(u)? else {
        return Ok(PolyForm::zero(n));
    };
    if x.dim() != n || !x.is_homogeneous(1) {
        return Err(Error::InvalidParameter("X must be a constant vector".into()));
    }
    let mut nabla = PolyForm::zero(n);
    for (b, c) in x.terms() {
        nabla.add_scaled(&u.derivative(b.bits().trailing_zeros() as usize), c);
    }
    let du = model.d(u);
    let delta_u = model.delta(u);
    let xc = du.map(|f| f.contract_vector(x).expect("same dimension"));
    let xw = delta_u.map(|f| f.wedge_vector(x).expect("same dimension"));
    let mut out = nabla;
    out.add_scaled(&xc, &rat(-1, p as i64 + 1));
    out.add_scaled(&xw, &rat(1, (n - p) as i64 + 1));
    Ok(out)
}

/// `T(e_i)u = 0` for every basis vector.
pub fn is_twistor(model: &FlatModel, u: &PolyForm) -> Result<bool> {
    let n = model.n();
    for i in 0..n {
        if !twistor_apply(model, u, &Form::basis_vector(n, i))?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `∇_{e_i} u = 1/(p+1) e_i⌟du` for every basis vector.
pub fn satisfies_killing_equation(model: &FlatModel, u: &PolyForm) -> Result<bool> {
    let n = model.n();
    let Some(p) = homogeneous_degree(u)? else { return Ok(true) };
    let du = model.d(u);
    for i in 0..n {
        let ei = Form::basis_vector(n, i);
        let rhs = du.map(|f| f.contract_vector(&ei).expect("same dimension")).scaled(&rat(1, p as i64 + 1));
        if !(&u.derivative(i) - &rhs).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `X⌟∇_X u = 0` for `X = e_i` and `X = e_i + e_j`, which determines the
/// quadratic form `X ↦ X⌟∇_X u` at every point.
pub fn satisfies_symmetric_condition(model: &FlatModel, u: &PolyForm) -> Result<bool> {
    let n = model.n();
    homogeneous_degree(u)?;
    let q = |i: usize, j: usize| {
        let ej = Form::basis_vector(n, j);
        u.derivative(i).map(|f| f.contract_vector(&ej).expect("same dimension"))
    };
    for i in 0..n {
        if !q(i, i).is_zero() {
            return Ok(false);
        }
        for j in i + 1..n {
            if !(&q(i, j) + &q(j, i)).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `X⌟∇_X u = 0` for `count` seeded vector fields `X = Σ f_i e_i` with
/// random linear coefficients `f_i`.
pub fn satisfies_symmetric_condition_on_fields(
    model: &FlatModel,
    u: &PolyForm,
    seed: u64,
    count: usize,
) -> Result<bool> {
    let n = model.n();
    homogeneous_degree(u)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let partials: Vec<PolyForm> = (0..n).map(|i| u.derivative(i)).collect();
    for _ in 0..count {
        let fs: Vec<Polynomial> = (0..n)
            .map(|_| {
                let mut f = Polynomial::constant(n, Scalar::from(rng.gen_range(-3..=3i64)));
                for j in 0..n {
                    f.add_term(Monomial::var(n, j), Scalar::from(rng.gen_range(-3..=3i64)));
                }
                f
            })
            .collect();
        let mut acc = PolyForm::zero(n);
        for i in 0..n {
            for j in 0..n {
                let ej = Form::basis_vector(n, j);
                let t = partials[i].map(|f| f.contract_vector(&ej).expect("same dimension"));
                acc.add_scaled(&t.times_poly(&fs[i]).times_poly(&fs[j]), &Scalar::one());
            }
        }
        if !acc.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The Killing predicate, computed by the Killing equation, as co-closed plus
/// twistor, and as `X⌟∇_X u = 0`; errors if the routes disagree.
pub fn is_killing(model: &FlatModel, u: &PolyForm) -> Result<bool> {
    let direct = satisfies_killing_equation(model, u)?;
    let via_twistor = model.delta(u).is_zero() && is_twistor(model, u)?;
    let symmetric = satisfies_symmetric_condition(model, u)?;
    if direct != via_twistor || direct != symmetric {
        return Err(Error::Internal(format!(
            "Killing routes disagree: equation {direct}, co-closed twistor {via_twistor}, X⌟∇_X u {symmetric}"
        )));
    }
    Ok(direct)
}

/// The six projected Killing equations as algebraic identities in a
/// `(p+1)`-form `v` standing for `du`, with `∇_{e_i} u ↦ 1/(p+1) e_i⌟v`,
/// checked on every blade `v`; and again on the flat Killing form
/// `u = 1/(p+1) Σ x_i e_i⌟v`, whose differential is `v`.
pub fn verify_killing_projections(model: &FlatModel, p: usize) -> Vec<CheckRecord> {
    use FirstOrder::*;
    let n = model.n();
    let m = n / 4;
    let k = rat(1, p as i64 + 1);
    let eqs: [(&str, &str, FirstOrder, &Pointwise, Scalar); 6] = [
        ("proj.dplus", "d⁺u = 1/(p+1) L⁻du", DPlus, &model.l_minus, k.clone()),
        ("proj.dc", "d^cu = 1/(p+1) Jdu", DC, &model.j, k.clone()),
        ("proj.dminus", "d⁻u = 1/(p+1) Λ⁺du", DMinus, &model.lambda_plus, k.clone()),
        ("proj.deltaplus", "δ⁺u = −2/(p+1) Cdu", DeltaPlus, &model.c, &k * &Scalar::from(-2)),
        ("proj.deltac", "δ^cu = −2/(p+1) Λ⁺du", DeltaC, &model.lambda_plus, &k * &Scalar::from(-2)),
        ("proj.deltaminus", "δ⁻u = −2/(p+1) Λdu", DeltaMinus, &model.lambda, &k * &Scalar::from(-2)),
    ];
    let vs: Vec<Form> =
        if p < n { basis(n, p + 1).into_iter().map(|b| Form::blade(n, b)).collect() } else { Vec::new() };
    let mut out = Vec::new();
    for (id, anchor, op, alg, coeff) in eqs {
        let mut algebraic = Residual::zero();
        let mut realized = Residual::zero();
        let mut killing_ok = true;
        for v in &vs {
            // substitute ∇_{e_i}u ↦ 1/(p+1) e_i⌟v
            let mut lhs = Form::zero(n);
            for i in 0..n {
                let nab = v.contract_vector(&Form::basis_vector(n, i)).expect("same dimension").scaled(&k);
                lhs.add_scaled(&model.symbol(op, i).apply_form(&nab), &Scalar::one());
            }
            let rhs = alg.apply_form(v).scaled(&coeff);
            algebraic.merge(&Residual::of_form(&(&lhs - &rhs)));

            let mut u = PolyForm::zero(n);
            for i in 0..n {
                let w = v.contract_vector(&Form::basis_vector(n, i)).expect("same dimension").scaled(&k);
                u.add_scaled(&PolyForm::term(Monomial::var(n, i), w), &Scalar::one());
            }
            let du = model.d(&u);
            killing_ok &= du == PolyForm::constant(v) && satisfies_killing_equation(model, &u).unwrap_or(false);
            let r = &model.apply(op, &u) - &alg.apply(&du).scaled(&coeff);
            realized.merge(&r.residual());
        }
        out.push(
            CheckRecord::from_residual(id, anchor, algebraic).param("m", m).param("p", p).param("blades", vs.len()),
        );
        let mut rec = CheckRecord::from_residual(format!("{id}.realized"), anchor, realized)
            .param("m", m)
            .param("p", p)
            .param("blades", vs.len());
        if !killing_ok {
            rec.status = crate::report::Status::Fail;
            rec = rec.detail("sample u = 1/(p+1) Σ x_i e_i⌟v is not a Killing form with du = v");
        }
        out.push(rec);
    }
    out
}

/// The reindexing identities behind the projected equations:
/// `Σ_α L_α J_α = L⁻`, `Σ_α J_α J_α = J`, `Σ_α Λ_α J_α = Λ⁺`,
/// `Σ_i J_α(e_i)⌟e_i⌟ = 2Λ_α`, `[J_α, Λ_α] = 0`.
pub fn verify_reindexing(fam: &OperatorFamily, p: usize) -> Vec<CheckRecord> {
    let n = fam.n();
    let m = n / 4;
    let rec = |id: String, anchor: &str, a: &LinearOperator, b: &LinearOperator| {
        CheckRecord::from_residual(id, anchor, Residual::of_operator(&(a - b))).param("m", m).param("p", p)
    };
    let sum3 = |f: &dyn Fn(usize) -> Op| Op::sum(&(0..3).map(f).collect::<Vec<_>>()).expect("three terms").matrix(p);
    let mut out = vec![
        rec(
            "reindex.lminus".into(),
            "Σ_α L_α∘J_α = L⁻",
            &sum3(&|a| fam.l_alpha(a).after(fam.j_alpha(a))),
            &fam.l_minus().matrix(p),
        ),
        rec(
            "reindex.j".into(),
            "Σ_α J_α∘J_α = J",
            &sum3(&|a| fam.j_alpha(a).after(fam.j_alpha(a))),
            &fam.j().matrix(p),
        ),
        rec(
            "reindex.lambdaplus".into(),
            "Σ_α Λ_α∘J_α = Λ⁺",
            &sum3(&|a| fam.lambda_alpha(a).after(fam.j_alpha(a))),
            &fam.lambda_plus().matrix(p),
        ),
    ];
    for a in 0..3 {
        let ops: Vec<Op> = (0..n)
            .map(|i| {
                let ei = Form::basis_vector(n, i);
                Op::contract(&fam.frame().apply_j(a, &ei)).after(&Op::contract(&ei))
            })
            .collect();
        let lhs = Op::sum(&ops).expect("n terms").matrix(p);
        out.push(rec(
            format!("reindex.contraction.{}", a + 1),
            "Σ_i J_α(e_i)⌟e_i⌟ = 2Λ_α",
            &lhs,
            &fam.lambda_alpha(a).matrix(p).scaled(&Scalar::from(2)),
        ));
        out.push(rec(
            format!("reindex.j-lambda-commute.{}", a + 1),
            "[J_α, Λ_α] = 0",
            &fam.j_alpha(a).commutator(fam.lambda_alpha(a)).matrix(p),
            &LinearOperator::zero(n, p, p as i32 - 2),
        ));
    }
    out
}

/// Named examples of the twistor and Killing predicates on `ℝ^{4m}`.
pub fn verify_killing_examples(model: &FlatModel) -> Result<Vec<CheckRecord>> {
    let n = model.n();
    let m = n / 4;
    let x = |i: usize| Monomial::var(n, i);
    let e = |i: usize| Form::basis_vector(n, i);
    let mut out = Vec::new();
    let mut push = |id: &str, anchor: &str, ok: bool, detail: Option<String>| {
        let mut r = CheckRecord::check(id, anchor, ok).param("m", m);
        if let Some(d) = detail {
            r = r.detail(d);
        }
        out.push(r);
    };

    let mut constants_ok = true;
    for p in 0..=n.min(4) {
        for b in basis(n, p) {
            constants_ok &= is_killing(model, &PolyForm::constant(&Form::blade(n, b)))?;
        }
    }
    push("killing.constant", "constant forms are Killing", constants_ok, None);

    let rot = &PolyForm::term(x(0), e(1)) - &PolyForm::term(x(1), e(0));
    push(
        "killing.rotation",
        "x₁dx₂ − x₂dx₁ is Killing",
        is_killing(model, &rot)? && satisfies_symmetric_condition_on_fields(model, &rot, 0x5eed, 3)?,
        None,
    );

    let u = PolyForm::term(x(0), e(0));
    let killing = is_killing(model, &u)?;
    let twistor = is_twistor(model, &u)?;
    let delta = model.delta(&u);
    let t2 = twistor_apply(model, &u, &e(1))?;
    push(
        "killing.x1dx1-not-killing",
        "x₁dx₁ is not Killing",
        !killing && !satisfies_symmetric_condition_on_fields(model, &u, 0x5eed, 3)?,
        Some(format!("δu = {delta:?}")),
    );
    push(
        "killing.x1dx1-twistor",
        "x₁dx₁ is a twistor form",
        twistor,
        (!twistor).then(|| format!("T(e₂)u = {t2:?} ≠ 0")),
    );

    let mut radial = PolyForm::zero(n);
    for i in 0..n {
        radial.add_scaled(&PolyForm::term(x(i), e(i)), &Scalar::one());
    }
    push(
        "killing.radial-twistor",
        "Σ x_i dx_i is a twistor form but not Killing",
        is_twistor(model, &radial)? && !is_killing(model, &radial)?,
        Some(format!("δu = {:?}", model.delta(&radial))),
    );

    // a Killing 2-form from a constant 3-form
    let v = Form::from_indices(n, &[0, 1, 2], Scalar::one());
    let mut k2 = PolyForm::zero(n);
    for i in 0..n {
        k2.add_scaled(&PolyForm::term(x(i), v.contract_vector(&e(i)).expect("same dimension")), &rat(1, 3));
    }
    push(
        "killing.linear-2-form",
        "1/3 Σ x_i e_i⌟(e₁∧e₂∧e₃) is Killing",
        is_killing(model, &k2)? && satisfies_symmetric_condition_on_fields(model, &k2, 0x5eed, 3)?,
        None,
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> FlatModel {
        FlatModel::new(&QuaternionicFrame::new(2).unwrap())
    }

    #[test]
    fn d_and_delta_examples() {
        let f = model();
        let n = 8;
        let u = PolyForm::term(Monomial::var(n, 0), Form::basis_vector(n, 1));
        assert_eq!(f.d(&u), PolyForm::constant(&Form::from_indices(n, &[0, 1], Scalar::one())));
        let v = PolyForm::term(Monomial::var(n, 0), Form::basis_vector(n, 0));
        assert_eq!(f.delta(&v), PolyForm::constant(&Form::scalar(n, Scalar::from(-1))));
    }

    #[test]
    fn complexes_square_to_zero() {
        let f = model();
        let cfg = FlatConfig::default();
        for p in [1, 2, 5] {
            for r in verify_complex(&f, p, &cfg) {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn degree_shifts() {
        let f = model();
        let u = PolyForm::term(Monomial::var(8, 3), Form::from_indices(8, &[0, 1, 4], Scalar::one()));
        for op in FirstOrder::ALL {
            let img = f.apply(op, &u);
            if let Some(q) = img.form_degree() {
                assert_eq!(q as i32, 3 + op.shift(), "{op:?}");
            }
        }
    }

    #[test]
    fn natural_operators_on_simple_inputs() {
        let f = model();
        let n = 8;
        let constant = PolyForm::constant(&Form::from_indices(n, &[2, 5], Scalar::one()));
        for op in FirstOrder::ALL {
            assert!(f.apply(op, &constant).is_zero());
        }
        let low = PolyForm::term(Monomial::var(n, 2), Form::from_indices(n, &[0, 6], Scalar::one()));
        assert!(f.apply(FirstOrder::DeltaMinus, &low).is_zero());
        // d^c(x₁ dx₂) = Σ_α J_α(J_α e₁ ∧ e₂)
        let u = PolyForm::term(Monomial::var(n, 0), Form::basis_vector(n, 1));
        let mut expected = Form::zero(n);
        for a in 0..3 {
            let je1 = f.family().frame().apply_j(a, &Form::basis_vector(n, 0));
            let w = Form::basis_vector(n, 1).wedge_vector(&je1).unwrap();
            expected.add_scaled(&f.family().j_alpha(a).apply(&w), &Scalar::one());
        }
        assert_eq!(f.apply(FirstOrder::DC, &u), PolyForm::constant(&expected));
    }

    #[test]
    fn comfor_named_example() {
        let f = model();
        let n = 8;
        let u = PolyForm::term(Monomial::var(n, 2), Form::from_indices(n, &[0, 1], Scalar::one()));
        let id = &comfor_identities()[0];
        assert!(id.residual(&f, &u).is_zero());
    }

    #[test]
    fn killing_form_realization() {
        let f = model();
        for r in verify_killing_projections(&f, 2) {
            assert!(r.passed(), "{r:?}");
        }
    }
}
