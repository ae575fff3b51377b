use proptest::prelude::*;

use qkforms::blade::basis;
use qkforms::casimir_matrix::{q_r, q_r_so, CurvatureElement};
use qkforms::flat_model::{is_killing, FlatModel, Monomial, PolyForm};
use qkforms::form::{contract, inner, so_action, wedge};
use qkforms::operator::materialize;
use qkforms::quaternionic::{OperatorFamily, QuaternionicFrame};
use qkforms::rep_theory::{
    admissible_labels, casimir_label, casimir_spm_killing, eigenvalue_c, eigenvalue_c_simplified, ClosedForm, RepLabel,
};
use qkforms::theorem_checker::{candidate_pairs, solve_system};
use qkforms::{rat, Form, Matrix, Op, Scalar};

const N: usize = 8;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| rat(a, b))
}

fn vector() -> impl Strategy<Value = Form> {
    prop::collection::vec(scalar(), N).prop_map(|c| Form::vector(&c))
}

fn form(p: usize) -> impl Strategy<Value = Form> {
    let blades = basis(N, p);
    prop::collection::vec((0..blades.len(), scalar()), 1..6).prop_map(move |terms| {
        let mut u = Form::zero(N);
        for (i, c) in terms {
            u.add_term(blades[i], c);
        }
        u
    })
}

fn form_any() -> impl Strategy<Value = (usize, Form)> {
    (0usize..=N).prop_flat_map(|p| (Just(p), form(p)))
}

fn two_form() -> impl Strategy<Value = Form> {
    form(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_contract_anticommutator((_, u) in form_any(), x in vector(), y in vector()) {
        let lhs = &contract(&x, &wedge(&y, &u).unwrap()).unwrap() + &wedge(&y, &contract(&x, &u).unwrap()).unwrap();
        prop_assert_eq!(lhs, u.scaled(&inner(&x, &y).unwrap()));
    }

    #[test]
    fn contraction_is_adjoint_of_wedge((p, u) in (0usize..N).prop_flat_map(|p| (Just(p), form(p))), v in any::<u64>(), x in vector()) {
        let blades = basis(N, p + 1);
        let mut w = Form::zero(N);
        w.add_term(blades[(v as usize) % blades.len()], Scalar::from(1 + (v % 5) as i64));
        prop_assert_eq!(inner(&wedge(&x, &u).unwrap(), &w).unwrap(), inner(&u, &contract(&x, &w).unwrap()).unwrap());
    }

    #[test]
    fn so_action_is_skew((p, u) in form_any(), w in two_form(), s in any::<u64>()) {
        let blades = basis(N, p);
        let mut v = Form::zero(N);
        v.add_term(blades[(s as usize) % blades.len()], Scalar::from(1));
        let a = inner(&so_action(&w, &u).unwrap(), &v).unwrap();
        let b = inner(&u, &so_action(&w, &v).unwrap()).unwrap();
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn materialized_matrix_agrees_with_direct_application(w in two_form(), p in 0usize..=N) {
        let direct = |u: &Form| so_action(&w, u).unwrap();
        let m = materialize(N, p, direct).unwrap();
        for b in basis(N, p) {
            let e = Form::blade(N, b);
            prop_assert_eq!(m.apply(&e).unwrap(), direct(&e));
        }
        prop_assert_eq!(m, Op::so_action(&w).matrix(p));
    }

    #[test]
    fn q_r_expressions_agree(entries in prop::collection::vec(-3i64..=3, 6 * 7 / 2), p in 0usize..=3) {
        // random symmetric R on Λ²(ℝ⁴)
        let n = 4;
        let nb = 6;
        let mut rows = vec![vec![Scalar::from(0); nb]; nb];
        let mut it = entries.into_iter();
        for i in 0..nb {
            for j in i..nb {
                let v = Scalar::from(it.next().unwrap());
                rows[i][j] = v.clone();
                rows[j][i] = v;
            }
        }
        let r = CurvatureElement::new(n, Matrix::from_rows(rows)).unwrap();
        prop_assert_eq!(q_r(&r, p), q_r_so(&r, p));
    }

    #[test]
    fn killing_routes_agree(coeffs in prop::collection::vec((0usize..N, 0usize..N, scalar()), 1..4), p in 1usize..=3) {
        // linear coefficients x_i times constant p-forms
        let model = FlatModel::new(&QuaternionicFrame::new(2).unwrap());
        let blades = basis(N, p);
        let mut u = PolyForm::zero(N);
        for (i, b, c) in coeffs {
            u.add_scaled(&PolyForm::term(Monomial::var(N, i), Form::blade(N, blades[b % blades.len()])), &c);
        }
        prop_assert!(is_killing(&model, &u).is_ok());
        prop_assert!(model.d(&model.d(&u)).is_zero());
        prop_assert!(model.delta(&model.delta(&u)).is_zero());
    }
}

#[test]
fn omega_gram_over_supported_range() {
    for m in 2..=8 {
        let f = QuaternionicFrame::new(m).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let g = inner(&f.fundamental_form(a), &f.fundamental_form(b)).unwrap();
                let want = if a == b { Scalar::from(2 * m as i64) } else { Scalar::from(0) };
                assert_eq!(g, want, "m={m} α={a} β={b}");
            }
        }
    }
}

#[test]
fn degree_shifts_on_every_blade() {
    let fam = OperatorFamily::new(&QuaternionicFrame::new(2).unwrap());
    let ops =
        [(fam.l(), 4), (fam.lambda(), -4), (fam.l_minus(), 2), (fam.lambda_plus(), -2), (fam.j(), 0), (fam.c(), 0)];
    for p in 0..=N {
        for b in basis(N, p) {
            for (op, shift) in ops {
                let img = op.apply(&Form::blade(N, b));
                if let Some(q) = img.degree() {
                    assert_eq!(q as i32, p as i32 + shift);
                }
            }
        }
    }
}

#[test]
fn closed_forms_match_weight_formula() {
    for m in 1..=8 {
        for a in 0..=m {
            for b in 0..=a {
                let label = RepLabel::new(0, a, b);
                let via_weight = casimir_spm_killing(&label.weight(m).unwrap(), m).unwrap();
                assert_eq!(casimir_label(ClosedForm::Cartan { a, b }, m).unwrap(), via_weight);
            }
        }
    }
}

#[test]
fn simplification_on_grid() {
    for m in 2..=10 {
        for p in 0..=4 * m {
            for a in 0..=m {
                assert_eq!(eigenvalue_c(RepLabel::new(p, a, 0), p, m), eigenvalue_c_simplified(a, p, m));
            }
        }
    }
}

#[test]
fn admissibility_is_symmetric_under_complement() {
    for m in 2..=8 {
        for p in 0..=4 * m {
            let mut a = admissible_labels(p, m);
            let mut b = admissible_labels(4 * m - p, m);
            a.sort();
            b.sort();
            assert_eq!(a, b, "m={m} p={p}");
        }
    }
}

#[test]
fn enumeration_is_order_independent() {
    for m in 2..=6 {
        for p in 2..4 * m {
            let sols = solve_system(m, p).unwrap();
            let mut reversed: Vec<_> = candidate_pairs(m, p).into_iter().rev().collect();
            reversed.retain(|c| sols.iter().any(|s| s.pair == *c));
            reversed.sort();
            let pairs: Vec<_> = sols.iter().map(|s| s.pair).collect();
            assert_eq!(pairs, reversed);
        }
    }
}
