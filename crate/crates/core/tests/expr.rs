use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use statgeom::error::Error;
use statgeom::expr::ExprTree;
use statgeom::oracle::{fd_gradient, fd_jacobian, random_expression, relative_error};

fn coords() -> Vec<String> {
    ["x1", "x2", "x3"].iter().map(|s| s.to_string()).collect()
}

/// Exact derivatives against central differences on 500 seeded expressions.
#[test]
fn jets_agree_with_finite_differences() {
    let c = coords();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst_grad: f64 = 0.0;
    let mut worst_hess: f64 = 0.0;
    for _ in 0..500 {
        let src = random_expression(&mut rng, &c, 4);
        let e = ExprTree::parse(&src, &c).unwrap();
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.5..1.5)).collect();
        let jet = e.eval_jet(&p).unwrap();
        let fd = fd_gradient(|q| e.eval_value(q).unwrap(), &p, 1e-5);
        let fd_h = fd_jacobian(|q| e.eval_jet(q).unwrap().gradient, &p, 1e-5);
        for i in 0..3 {
            worst_grad = worst_grad.max(relative_error(jet.gradient[i], fd[i]));
            for j in 0..3 {
                worst_hess = worst_hess.max(relative_error(jet.hessian[i][j], fd_h[i][j]));
            }
        }
    }
    assert!(worst_grad < 1e-6, "gradient {worst_grad:e}");
    assert!(worst_hess < 1e-6, "hessian {worst_hess:e}");
}

#[test]
fn value_matches_hand_evaluation() {
    let c = coords();
    let e = ExprTree::parse("exp(-x1+x3)*sin(x2)^2 + sqrt(x3)", &c).unwrap();
    let p = [0.3, 0.7, 1.2];
    let want = (-0.3f64 + 1.2).exp() * 0.7f64.sin().powi(2) + 1.2f64.sqrt();
    assert!((e.eval_value(&p).unwrap() - want).abs() < 1e-14);
}

#[test]
fn parse_errors_carry_positions() {
    let c = coords();
    match ExprTree::parse("x1 + y", &c) {
        Err(Error::UnknownIdentifier { name, offset }) => {
            assert_eq!(name, "y");
            assert_eq!(offset, 5);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(ExprTree::parse("foo(x1)", &c), Err(Error::UnknownFunction { .. })));
    assert!(matches!(ExprTree::parse("(x1 + 2", &c), Err(Error::Syntax { .. })));
}

#[test]
fn domain_errors_name_the_subexpression() {
    let c = coords();
    let e = ExprTree::parse("1 + ln(x1)", &c).unwrap();
    assert!(matches!(e.eval_value(&[-1.0, 0.0, 0.0]), Err(Error::Domain { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hessian_is_symmetric(seed in any::<u64>(), x in prop::array::uniform3(-1.5f64..1.5)) {
        let c = coords();
        let src = random_expression(&mut ChaCha8Rng::seed_from_u64(seed), &c, 4);
        let jet = ExprTree::parse(&src, &c).unwrap().eval_jet(&x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((jet.hessian[i][j] - jet.hessian[j][i]).abs() <= 1e-12 * jet.hessian[i][j].abs().max(1.0));
            }
        }
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>(), x in prop::array::uniform3(-1.5f64..1.5)) {
        let c = coords();
        let src = random_expression(&mut ChaCha8Rng::seed_from_u64(seed), &c, 5);
        let e = ExprTree::parse(&src, &c).unwrap();
        let back = ExprTree::parse(&e.print(), &c).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.eval_value(&x).unwrap(), e.eval_value(&x).unwrap());
    }

    #[test]
    fn jet_value_matches_plain_evaluation(seed in any::<u64>(), x in prop::array::uniform3(-1.5f64..1.5)) {
        let c = coords();
        let src = random_expression(&mut ChaCha8Rng::seed_from_u64(seed), &c, 4);
        let e = ExprTree::parse(&src, &c).unwrap();
        let v = e.eval_value(&x).unwrap();
        prop_assert!((e.eval_jet(&x).unwrap().value - v).abs() <= 1e-12 * v.abs().max(1.0));
    }
}
