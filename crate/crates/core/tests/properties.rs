mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheetrace::report::analyze;
use sheetrace::{
    build_graph, eval_discrete, fixtures, trace_most_influential, verify_cell, CellAddress,
    CellContent, ExpectedSheet, Formula, Interval, MarkSheet, Reason, State, VerificationStatus,
};

use common::*;

#[test]
fn dependents_invert_precedents_on_random_dags() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let dag = MarkedDag::random(&mut rng, 40, 4, 0.0);
        let g = build_graph(&dag.workbook()).unwrap();
        for &a in g.nodes() {
            for &b in g.precedents(a) {
                assert!(g.dependents(b).contains(&a));
            }
            for &d in g.dependents(a) {
                assert!(g.precedents(d).contains(&a));
            }
        }
        // Precedents match the generator exactly.
        for (i, ps) in dag.prec.iter().enumerate() {
            let want: BTreeSet<CellAddress> = ps.iter().map(|&p| dag.pos[p]).collect();
            assert_eq!(g.precedents(dag.pos[i]), &want);
        }
    }
}

#[test]
fn backward_slice_is_the_precedent_fixpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let dag = MarkedDag::random(&mut rng, 40, 4, 0.0);
        let g = build_graph(&dag.workbook()).unwrap();
        for &c in g.nodes() {
            let mut union: BTreeSet<CellAddress> = g.precedents(c).clone();
            for &p in g.precedents(c) {
                union.extend(g.backward_slice(p));
            }
            assert_eq!(g.backward_slice(c), union, "at {c}");
            for &d in &g.forward_slice(c) {
                assert!(g.backward_slice(d).contains(&c));
            }
        }
    }
}

#[test]
fn topological_order_is_a_linear_extension() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let wb = MarkedDag::random(&mut rng, 50, 4, 0.0).workbook();
        let g = build_graph(&wb).unwrap();
        let pos: BTreeMap<CellAddress, usize> = g
            .evaluation_order()
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i))
            .collect();
        assert_eq!(pos.len(), wb.formulas().count());
        for (cell, _) in wb.formulas() {
            for p in g.precedents(cell) {
                if let Some(&pi) = pos.get(p) {
                    assert!(pi < pos[&cell]);
                }
            }
        }
    }
}

/// Demand-driven evaluation needs no ordering at all, so agreement with it
/// shows the computed values do not depend on the order chosen.
fn eval_on_demand(
    wb: &sheetrace::Workbook,
    cell: CellAddress,
    memo: &mut BTreeMap<CellAddress, f64>,
) -> f64 {
    if let Some(&v) = memo.get(&cell) {
        return v;
    }
    let v = match wb.get(cell) {
        CellContent::Number(v) => *v,
        CellContent::Formula(f) => {
            let refs = f.ast().referenced_cells();
            let vals: BTreeMap<CellAddress, f64> = refs
                .iter()
                .map(|&r| (r, eval_on_demand(wb, r, memo)))
                .collect();
            eval_point(f.ast(), &|c| vals[&c]).unwrap()
        }
        _ => 0.0,
    };
    memo.insert(cell, v);
    v
}

#[test]
fn discrete_values_are_order_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut books = vec![fixtures::fig2_workbook()];
    books.extend((0..100).map(|_| MarkedDag::random(&mut rng, 30, 3, 0.0).workbook()));
    books.extend((0..100).map(|_| random_numeric_workbook(&mut rng)));
    for wb in books {
        let g = build_graph(&wb).unwrap();
        let values = eval_discrete(&wb, &g);
        let mut memo = BTreeMap::new();
        for (cell, _) in wb.formulas() {
            if values.error(cell).is_some() {
                continue;
            }
            // Text cells read as 0 in the oracle; the fixture only sums them.
            let want = eval_on_demand(&wb, cell, &mut memo);
            assert_eq!(values.get(cell), Some(want), "{cell}");
        }
    }
}

fn symptom() -> VerificationStatus {
    VerificationStatus::symptom([Reason::ValueOutsideExpected])
}

#[test]
fn trace_paths_climb_precedents_and_are_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..300 {
        let dag = MarkedDag::random(&mut rng, 50, 4, 0.5);
        let g = build_graph(&dag.workbook()).unwrap();
        let marks: MarkSheet = (0..dag.pos.len())
            .map(|i| {
                (
                    dag.pos[i],
                    if dag.faulty[i] {
                        symptom()
                    } else {
                        VerificationStatus::unchecked()
                    },
                )
            })
            .collect();
        for i in (0..dag.pos.len()).filter(|&i| dag.faulty[i]) {
            let q = dag.pos[i];
            let r = trace_most_influential(&g, &marks, q).unwrap();
            assert_eq!(r, trace_most_influential(&g, &marks, q).unwrap());
            assert_eq!(r.path[0], q);
            assert_eq!(*r.path.last().unwrap(), r.most_influential);
            for w in r.path.windows(2) {
                assert!(g.precedents(w[0]).contains(&w[1]));
            }
            assert!(r.most_influential == q || g.backward_slice(q).contains(&r.most_influential));
            assert!(marks.is_symptom(r.most_influential));
            // The final step is always a stop with nothing faulty above.
            let last = r.steps.last().unwrap();
            assert!(last.faulty_precedents.is_empty());
            for s in &r.steps {
                assert!(s.precedent_leaders.is_subset(&s.faulty_precedents));
                assert!(s.dependent_leaders.is_subset(&s.precedent_leaders));
                assert!(s.faulty_precedents.iter().all(|&c| marks.is_symptom(c)));
            }
        }
    }
}

#[test]
fn linear_faulty_chain_resolves_to_its_top() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..100 {
        let len = rng.random_range(1..20u32);
        let top = rng.random_range(1..=len);
        let mut wb = sheetrace::Workbook::new();
        wb.set(addr(1, 1), CellContent::Number(1.0)).unwrap();
        for r in 2..=len + 1 {
            let src = format!("=A{}*2", r - 1);
            wb.set(
                addr(1, r),
                CellContent::Formula(Formula::parse(&src).unwrap()),
            )
            .unwrap();
        }
        let g = build_graph(&wb).unwrap();
        // Faulty from row `top + 1` down to the end of the chain.
        let marks: MarkSheet = (1..=len + 1)
            .map(|r| {
                (
                    addr(1, r),
                    if r > top {
                        symptom()
                    } else {
                        VerificationStatus::no_symptom()
                    },
                )
            })
            .collect();
        let r = trace_most_influential(&g, &marks, addr(1, len + 1)).unwrap();
        assert_eq!(r.most_influential, addr(1, top + 1));
        assert!(!r.tie_broken);
    }
}

#[test]
fn reports_match_the_published_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/analysis-report.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);

    let mut corpus = vec![
        (fixtures::fig2_workbook(), fixtures::fig2_intervals()),
        (fixtures::fig2_workbook(), ExpectedSheet::new()),
    ];
    for _ in 0..30 {
        let wb = random_numeric_workbook(&mut rng);
        let g = build_graph(&wb).unwrap();
        let values = eval_discrete(&wb, &g);
        let e = random_intervals(&mut rng, &wb, values.values());
        corpus.push((wb, e));
    }
    let mut cyclic = sheetrace::Workbook::new();
    cyclic
        .set(
            addr(1, 1),
            CellContent::Formula(Formula::parse("=A2").unwrap()),
        )
        .unwrap();
    cyclic
        .set(
            addr(1, 2),
            CellContent::Formula(Formula::parse("=A1/0").unwrap()),
        )
        .unwrap();
    corpus.push((cyclic, ExpectedSheet::new()));

    for (wb, e) in corpus {
        let report = analyze(&wb, &e).stamped("2026-10-16T00:00:00Z");
        let json = serde_json::to_value(&report).unwrap();
        let errors: Vec<String> = validator
            .iter_errors(&json)
            .map(|e| e.to_string())
            .collect();
        assert!(errors.is_empty(), "{errors:?}");
    }

    let mut bad = serde_json::to_value(analyze(
        &fixtures::fig2_workbook(),
        &fixtures::fig2_intervals(),
    ))
    .unwrap();
    bad["cells"][0]["color"] = "red".into();
    assert!(!validator.is_valid(&bad));
}

fn interval() -> impl Strategy<Value = Interval> {
    (-1e6f64..1e6, 0.0f64..1e4).prop_map(|(lo, w)| Interval::new(lo, lo + w).unwrap())
}

proptest! {
    #[test]
    fn consistent_expectation_is_never_a_symptom(bound in interval(), s in 0.0f64..=1.0, t in 0.0f64..=1.0, u in 0.0f64..=1.0) {
        // expected ⊆ bounding, value ∈ expected.
        let lo = bound.lo() + s * bound.width();
        let hi = (lo + t * (bound.hi() - lo)).min(bound.hi());
        let expected = Interval::new(lo, hi).unwrap();
        let value = (lo + u * expected.width()).clamp(lo, hi);
        let f = CellContent::Formula(Formula::parse("=A1").unwrap());
        let st = verify_cell(&f, Some(value), Some(expected), Some(bound));
        prop_assert_eq!(st.state, State::NoSymptom);
        prop_assert!(st.reasons.is_empty());
    }

    #[test]
    fn status_reasons_follow_state(
        value in -1e3f64..1e3, e in interval(), b in proptest::option::of(interval()), attach in any::<bool>(),
    ) {
        let f = CellContent::Formula(Formula::parse("=A1").unwrap());
        let st = verify_cell(&f, Some(value), attach.then_some(e), b);
        let visible: BTreeSet<_> = st.reasons.iter().filter(|r| **r != Reason::BoundingError).collect();
        prop_assert_eq!(st.state == State::Symptom, !visible.is_empty());
        prop_assert_eq!(st.state == State::Unchecked, !attach);
        prop_assert_eq!(st.reasons.contains(&Reason::BoundingError), b.is_none());
    }
}
