mod support;

use std::collections::BTreeSet;

use mapt_core::layers::{self, next_border, CutSpec, Stats, Visit, Visitor};
use mapt_core::mc::{self, CheckOptions, Query, Strategy};
use mapt_core::model::fixtures;
use mapt_core::semantics::{Bound, Semantics, State, System};
use mapt_core::{Model, Rational};

use support::*;

struct Plain;

impl Visitor<()> for Plain {
    fn visit(&mut self, _: &State, _: &()) -> mapt_core::Result<Visit<()>> {
        Ok(Visit::Continue(()))
    }

    fn on_final(&mut self, _: &State, _: &()) -> mapt_core::Result<bool> {
        Ok(false)
    }
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

#[test]
fn brute_force_border_of_ex1_at_four() {
    let m = fixtures::ex1();
    let vals = border_valuations(&m, 4, &[1, 1]);
    let expected: BTreeSet<Vec<Rational>> = ["0.5", "2", "1.55", "3.6", "2.3"]
        .iter()
        .map(|x| vec![q(x), q("1")])
        .collect();
    let got: BTreeSet<Vec<Rational>> = vals.into_iter().map(|v| v.0).collect();
    assert_eq!(got, expected);
}

#[test]
fn emitted_cuts_are_crossed_by_every_run() {
    for m in [fixtures::ex1(), fixtures::intervals()] {
        let cuts = layers::find_cuts(&m, false).unwrap();
        assert!(!cuts.is_empty());
        for cut in &cuts {
            assert!(every_run_crosses(&m, cut), "{}", cut.display(&m));
            assert!(!inside_virtual_interval(&m, cut.t), "{}", cut.display(&m));
        }
    }
}

#[test]
fn rejected_intervals_times_are_not_cuts() {
    // t = 7 is inside (6, 11) for the second agent; a cut built there by
    // hand is not crossed by every run.
    let m = fixtures::intervals();
    assert!(inside_virtual_interval(&m, 7));
    for locs in [vec![1, 1], vec![2, 1], vec![1, 2], vec![2, 3]] {
        let cut = CutSpec {
            t: 7,
            localities: locs,
            clocks: vec![7, 7],
        };
        assert!(!every_run_crosses(&m, &cut));
    }
}

#[test]
fn next_border_matches_enumeration_in_both_semantics() {
    let m = fixtures::ex1();
    let cut = layers::find_cuts(&m, false)
        .unwrap()
        .into_iter()
        .find(|c| c.t == 4)
        .unwrap();
    let expected = border_valuations(&m, 4, &cut.localities);
    for sem in [Semantics::Original, Semantics::Accelerated] {
        let sys = System::new(&m, sem, Bound::none());
        let mut stats = Stats::default();
        let out = next_border(&sys, std::slice::from_ref(&cut), vec![(sys.initial(), ())], &mut Plain, &mut stats, 100_000).unwrap();
        let got: BTreeSet<_> = out.border.iter().map(|(s, _)| s.valuation.clone()).collect();
        assert_eq!(got, expected, "{sem}");
        assert_eq!(stats.cut_unclassified, 0);
    }
}

fn bounded(m: &Model, sem: Semantics) -> System<'_> {
    let bound = match m.component_names()[0].as_str() {
        "x" => "y=2",
        "n" => "n=2",
        _ => "pos_a=2",
    };
    System::new(m, sem, Bound::parse(m, &[bound.to_string()]).unwrap())
}

#[test]
fn checker_agrees_with_labelling_oracle() {
    for m in fixtures::all() {
        for sem in [Semantics::Original, Semantics::Accelerated] {
            let sys = bounded(&m, sem);
            let g = full_graph(&sys, 200_000);
            let preds = generated_predicates(&m, &g);
            assert!(preds.len() >= 10);
            for (i, p) in preds.iter().enumerate() {
                let other = &preds[(i * 7 + 3) % preds.len()];
                for query in seven_forms(p, other) {
                    let want = oracle_holds(&sys, &g, &query);
                    for strategy in [Strategy::Width, Strategy::Layered] {
                        let opts = CheckOptions {
                            strategy,
                            ..CheckOptions::default()
                        };
                        let got = mc::check(&sys, &query, &opts).unwrap().holds;
                        assert_eq!(got, want, "{query} ({sem}, {strategy:?})");
                    }
                }
            }
        }
    }
}

#[test]
fn ex1_regression_queries() {
    let m = fixtures::ex1();
    let sys = bounded(&m, Semantics::Original);
    let g = full_graph(&sys, 200_000);
    for (src, expected) in [
        ("EG x > 0", true),
        ("EF (x = 3.6 && EF x = 7.2)", true),
        ("EF (x = 3.6 && EF x = 7.1)", false),
    ] {
        let query = Query::parse(&m, src).unwrap();
        assert_eq!(oracle_holds(&sys, &g, &query), expected, "{src}");
        assert_eq!(mc::check(&sys, &query, &CheckOptions::default()).unwrap().holds, expected, "{src}");
    }
}

#[test]
fn bounded_prefixes_are_acyclic() {
    for m in fixtures::all() {
        for sem in [Semantics::Original, Semantics::Accelerated] {
            assert!(full_graph(&bounded(&m, sem), 200_000).is_acyclic());
        }
    }
}
