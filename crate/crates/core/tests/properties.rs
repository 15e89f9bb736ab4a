use proptest::prelude::*;
use wmlab_core::masa::{expectation_of_normal_form, rank_one_projection};
use wmlab_core::multi_index::enumerate_multi_indices;
use wmlab_core::order::precedes;
use wmlab_core::rewrite::{evaluate, rewrite};
use wmlab_core::verify::random_words;
use wmlab_core::{FockModel, GeneratorSymbol, MultiIndex, NormalForm, Scalar, SparseOp, TruncationParams, Word};

fn model(n: usize, d: usize) -> FockModel {
    FockModel::new(TruncationParams::new(n, d).unwrap())
}

fn word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..=n, any::<bool>()), 0..=max_len)
        .prop_map(|v| v.into_iter().map(|(i, s)| GeneratorSymbol::new(i, s)).collect())
}

fn multi_index(n: usize, max: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max, n).prop_map(MultiIndex::new)
}

proptest! {
    #[test]
    fn rewriting_preserves_the_operator(n in 2usize..=3, w in word(3, 8)) {
        let w: Word = w.symbols().iter().filter(|s| s.index <= n).copied().collect();
        let m = model(n, 8);
        let prefix = m.basis().guard_prefix(w.guard());
        let lhs = evaluate(&rewrite(&w, n).unwrap(), &m).unwrap();
        prop_assert_eq!(lhs.columns_agree(&w.matrix(&m).unwrap(), prefix), None);
    }

    #[test]
    fn normal_monomials_are_fixed_points(w in word(2, 8)) {
        for (mono, _) in rewrite(&w, 2).unwrap().terms() {
            prop_assert_eq!(rewrite(&mono.to_word(), 2).unwrap(), NormalForm::monomial(mono.clone()));
        }
    }

    #[test]
    fn order_is_antisymmetric(a in multi_index(3, 3), b in multi_index(3, 3)) {
        prop_assert!(!(precedes(&a, &b).unwrap() && precedes(&b, &a).unwrap()));
    }

    #[test]
    fn expectation_is_idempotent(w in word(3, 8)) {
        let e = expectation_of_normal_form(&rewrite(&w, 3).unwrap());
        prop_assert_eq!(expectation_of_normal_form(&e), e);
    }
}

#[test]
fn rewriting_terminates_on_long_words() {
    for w in random_words(3, 300, 16, 11) {
        let nf = rewrite(&w, 3).unwrap();
        assert!(nf.guard() <= w.creation_count(), "{w} -> {nf}");
    }
}

#[test]
fn expectation_of_squares_is_positive() {
    let m = model(3, 6);
    for t in random_words(3, 200, 3, 5) {
        let s = t.adjoint().concat(&t);
        let prefix = m.basis().guard_prefix(s.guard());
        let e = evaluate(&expectation_of_normal_form(&rewrite(&s, 3).unwrap()), &m).unwrap();
        assert!((0..prefix).all(|p| e.get(p, p) >= Scalar::from_integer(0)), "{t}");
    }
}

#[test]
fn rank_one_projections_sum_to_degree_cutoffs() {
    for n in [2, 3] {
        let m = model(n, 5);
        for d in 0..5 {
            let mut sum = SparseOp::zeros(m.dim());
            for mu in enumerate_multi_indices(n, d) {
                sum = sum.try_add(&evaluate(&rank_one_projection(&mu), &m).unwrap()).unwrap();
            }
            let cut = m.basis().prefix_len(d);
            let want = SparseOp::from_triples(m.dim(), (0..cut).map(|p| (p, p, Scalar::from_integer(1))));
            assert_eq!(sum, want, "n={n} d={d}");
        }
    }
}
