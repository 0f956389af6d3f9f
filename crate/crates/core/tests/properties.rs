mod common;

use ctxhier_core::classifier::{classify, Tier};
use ctxhier_core::model::{glue, marginalize, restrict, Distribution, EmpiricalModel, Scenario};
use ctxhier_core::rational::{int, Rational};
use ctxhier_core::violation::{logical_vm_violation, strong_vm_violation, vm_additivity_violation};
use ctxhier_core::workbench::report::hierarchy_report;
use ctxhier_core::workbench::{catalog, random};
use ctxhier_core::wps::*;
use proptest::prelude::*;

use common::*;

fn scenarios() -> Vec<Scenario> {
    vec![
        catalog::bell_scenario(),
        catalog::specker().unwrap().scenario().clone(),
        Scenario::new(
            ["x", "y", "z"],
            ["0", "1", "2"],
            [vec!["x", "y"], vec!["y", "z"]],
        )
        .unwrap(),
        catalog::ghz_scenario(),
    ]
}

fn distribution(sc: &Scenario, raw: &[u8]) -> Distribution {
    let g = sc.global_context();
    let n = sc.num_sections(&g).unwrap();
    let raw: Vec<i64> = (0..n).map(|k| raw[k % raw.len()] as i64).collect();
    let total: i64 = raw.iter().sum::<i64>().max(1);
    let mut w: Vec<Rational> = raw
        .iter()
        .map(|v| Rational::new((*v).into(), total.into()))
        .collect();
    if raw.iter().all(|v| *v == 0) {
        w[0] = int(1);
    }
    Distribution::new(sc, g, w).unwrap()
}

/// The model whose tables are the marginals of one global distribution.
fn marginal_model(sc: &Scenario, d: &Distribution) -> EmpiricalModel {
    let tables = sc
        .maximal_contexts()
        .iter()
        .map(|c| marginalize(sc, d, c).unwrap())
        .collect();
    EmpiricalModel::new(sc.clone(), tables).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sheaf_laws(k in 0usize..4, index in any::<usize>()) {
        let sc = &scenarios()[k];
        let g = sc.global_context();
        let s = sc.section_at(&g, index % sc.num_sections(&g).unwrap());
        for v in sc.contexts() {
            let sv = restrict(&s, &v).unwrap();
            for u in v.subsets() {
                prop_assert_eq!(restrict(&sv, &u).unwrap(), restrict(&s, &u).unwrap());
            }
        }
        let parts: Vec<_> = sc.maximal_contexts().iter().map(|c| restrict(&s, c).unwrap()).collect();
        prop_assert_eq!(glue(sc, &parts).unwrap(), s.clone());

        // Changing one outcome inside one part breaks compatibility with a
        // part sharing that measurement.
        let c0 = &sc.maximal_contexts()[0];
        let x = c0.measurements()[0];
        if sc.maximal_contexts()[1..].iter().any(|c| c.contains(x)) {
            let flipped = ctxhier_core::model::Section::from_pairs(
                parts[0].pairs().map(|(m, o)| (m, if m == x { (o + 1) % sc.num_outcomes() } else { o })),
            ).unwrap();
            let mut bad = parts.clone();
            bad[0] = flipped;
            prop_assert!(glue(sc, &bad).is_err());
        }
    }

    #[test]
    fn marginalization_is_functorial(k in 0usize..3, raw in prop::collection::vec(0u8..6, 1..30)) {
        let sc = &scenarios()[k];
        let d = distribution(sc, &raw);
        for v in sc.contexts() {
            let dv = marginalize(sc, &d, &v).unwrap();
            prop_assert!(dv.is_valid());
            for u in v.subsets() {
                prop_assert_eq!(
                    marginalize(sc, &dv, &u).unwrap(),
                    marginalize(sc, &d, &u).unwrap()
                );
            }
        }
    }

    #[test]
    fn marginal_models_are_noncontextual(k in 0usize..3, raw in prop::collection::vec(0u8..6, 1..30)) {
        let sc = &scenarios()[k];
        let m = marginal_model(sc, &distribution(sc, &raw));
        prop_assert_eq!(classify(&m).unwrap().tier, Tier::Noncontextual);
        let r = build_combinatorial_rep(&m).unwrap();
        prop_assert!(verify_rep(&r).unwrap().passed());
        let g = sc.section_at(&sc.global_context(), 0);
        let pads = [PadPoint::contradictory("d1", &g, 0, 1), PadPoint::missing("d2", &g, 1)];
        let p = build_padded_rep(&m, &pads).unwrap();
        prop_assert!(verify_rep(&p).unwrap().passed());
    }

    #[test]
    fn lemma_on_padded_reps(seed in any::<u64>(), k in 0usize..4) {
        let sc = &scenarios()[k];
        let m = random::deterministic_mixture(&mut rng(seed), sc, 2).unwrap();
        let g = sc.section_at(&sc.global_context(), (seed as usize) % 4);
        let x = (seed as usize / 4) % sc.num_measurements();
        let pads = [
            PadPoint::contradictory("d1", &g, x, (g.get(x).unwrap() + 1) % sc.num_outcomes()),
            PadPoint::missing("d2", &g, x),
        ];
        let r = build_padded_rep(&m, &pads).unwrap();
        let ex = excise(&r).unwrap();
        prop_assert_eq!(ex.z.count(), r.num_points() - 2);
        for (p, s) in &ex.lemma {
            for mx in 0..sc.num_measurements() {
                for o in 0..sc.num_outcomes() {
                    prop_assert_eq!(r.singleton_image(mx, o).contains(*p), s.get(mx) == Some(o));
                }
            }
        }
    }

    #[test]
    fn hierarchy_is_monotone_on_perturbed_models(seed in any::<u64>()) {
        let bases = [
            catalog::bell().unwrap(),
            catalog::hardy().unwrap(),
            catalog::pr_box().unwrap(),
            catalog::specker().unwrap(),
        ];
        let m = random::perturbed_model(&mut rng(seed), &bases).unwrap();
        let h = hierarchy_report(&m).unwrap();
        prop_assert!(h.consistent());
        let t = h.verdict.tier;
        prop_assert_eq!(t, oracle_tier(&m, false));
        for weaker in [Tier::Strong, Tier::Logical, Tier::Probabilistic] {
            if t.implies(weaker) {
                for w in [Tier::Strong, Tier::Logical, Tier::Probabilistic] {
                    if weaker.implies(w) {
                        prop_assert!(t.implies(w));
                    }
                }
            }
        }
    }

    #[test]
    fn vm_verdicts_survive_relabelling(seed in any::<u64>(), k in 0usize..5) {
        let e = &catalog_models()[k];
        let r = build_combinatorial_rep(&e.model).unwrap();
        let mut order: Vec<usize> = (0..r.num_points()).collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng(seed));
        let p = r.permuted(&order).unwrap();
        prop_assert!(verify_rep(&p).unwrap().passed());
        prop_assert_eq!(strong_vm_violation(&p).unwrap().0, strong_vm_violation(&r).unwrap().0);
        prop_assert_eq!(
            logical_vm_violation(&p).unwrap().is_some(),
            logical_vm_violation(&r).unwrap().is_some()
        );
        prop_assert_eq!(
            vm_additivity_violation(&p).unwrap().is_some(),
            vm_additivity_violation(&r).unwrap().is_some()
        );
    }
}
