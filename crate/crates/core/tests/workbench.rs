mod common;

use ctxhier_core::classifier::{classify, Tier};
use ctxhier_core::dutch_book::find_dutch_book;
use ctxhier_core::rational::{self, ratio, Rational};
use ctxhier_core::violation::{
    has_classical_extension, sample_monotone_extension, theorem1_witness, Extension, ExtensionKind,
};
use ctxhier_core::workbench::export::{bundle_diagram, nerve};
use ctxhier_core::workbench::io::{self, Document};
use ctxhier_core::workbench::quantum::*;
use ctxhier_core::workbench::{catalog, random};
use ctxhier_core::wps::build_combinatorial_rep;
use ctxhier_core::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;

use common::*;

/// Singlet joint probabilities for projectors at Bloch angles `ta`, `tb`:
/// `(1 − σ_i σ_j cos(ta − tb))/4` with `σ = +1` for outcome 1.
fn singlet_oracle(ta: f64, tb: f64, i: usize, j: usize) -> f64 {
    let s = |o: usize| if o == 1 { 1.0 } else { -1.0 };
    (1.0 - s(i) * s(j) * (ta - tb).cos()) / 4.0
}

#[test]
fn singlet_born_rule_matches_oracle() {
    let m = quantum_to_empirical(&singlet_experiment(), SnapSettings::default()).unwrap();
    let sc = m.scenario();
    let angles = [
        ("a", 0.0),
        ("b", std::f64::consts::PI),
        ("a'", std::f64::consts::PI / 3.0),
        ("b'", 2.0 * std::f64::consts::PI / 3.0),
    ];
    for (x, tx) in &angles[..] {
        for (y, ty) in &angles[..] {
            let Ok(s) = sc.section(&[(x, "0"), (y, "0")]) else {
                continue;
            };
            if x >= y || !sc.is_context(s.domain()) {
                continue;
            }
            for i in 0..2 {
                for j in 0..2 {
                    let s = sc
                        .section(&[(x, ["0", "1"][i]), (y, ["0", "1"][j])])
                        .unwrap();
                    let p = rational::to_f64(&m.probability(&s).unwrap());
                    assert!(
                        (p - singlet_oracle(*tx, *ty, i, j)).abs() < 1e-9,
                        "{x}{y} {i}{j}"
                    );
                }
            }
        }
    }
    assert_eq!(classify(&m).unwrap().tier, Tier::Probabilistic);
}

#[test]
fn ghz_experiment_is_strongly_contextual() {
    let m = quantum_to_empirical(&ghz_experiment(), SnapSettings::default()).unwrap();
    assert_eq!(classify(&m).unwrap().tier, Tier::Strong);
    assert_eq!(m.scenario().maximal_contexts().len(), 8);
}

#[test]
fn irrational_probabilities_do_not_snap() {
    let mut q = singlet_experiment();
    let id = DMatrix::<Complex64>::identity(2, 2);
    q.projectors[2].matrix = qubit_projector(std::f64::consts::PI / 4.0).kronecker(&id);
    assert!(matches!(
        quantum_to_empirical(&q, SnapSettings::default()),
        Err(Error::Snap { .. })
    ));
    // Snapping entries one by one is not renormalized, so a loose tolerance
    // surfaces as a table that does not sum to one.
    let loose = SnapSettings {
        tolerance: 1e-3,
        denominator_bound: 4096,
    };
    assert!(matches!(
        quantum_to_empirical(&q, loose),
        Err(Error::InvalidDistribution { .. })
    ));
}

#[test]
fn weak_hv_checks() {
    let q = singlet_experiment();
    let m = quantum_to_empirical(&q, SnapSettings::default()).unwrap();
    let r = build_combinatorial_rep(&m).unwrap();
    assert!(is_weak_hv_representation(&r, &q, 1e-9).unwrap().passed());

    let sc = m.scenario();
    let e = r.image(&sc.section(&[("a", "0"), ("b", "0")]).unwrap());
    let off = r.clone().with_mu(&e, ratio(1, 7));
    assert!(!is_weak_hv_representation(&off, &q, 1e-9).unwrap().passed());

    let other = build_combinatorial_rep(&catalog::pr_box().unwrap()).unwrap();
    assert!(!is_weak_hv_representation(&other, &q, 1e-9)
        .unwrap()
        .passed());

    let ghz = build_combinatorial_rep(&catalog::ghz().unwrap()).unwrap();
    assert!(!is_weak_hv_representation(&ghz, &q, 1e-9).unwrap().passed());
}

#[test]
fn invalid_experiments_are_rejected() {
    let mut q = singlet_experiment();
    q.projectors[0].matrix[(0, 1)] = Complex64::new(0.3, 0.0);
    assert!(matches!(q.validate(), Err(Error::Quantum(_))));
    let mut q = singlet_experiment();
    q.state[1] = Complex64::new(0.0, 0.0);
    assert!(matches!(q.validate(), Err(Error::Quantum(_))));
    let mut q = singlet_experiment();
    q.dimension = 3;
    assert!(q.validate().is_err());
}

fn round_trip(doc: &Document) -> Document {
    let text = io::save(doc);
    let back = io::load(&text).unwrap();
    assert_eq!(io::save(&back), text, "{}", doc.kind());
    back
}

#[test]
fn every_document_kind_round_trips_and_verifies() {
    let snap = SnapSettings::default();
    let mut docs = Vec::new();
    for e in catalog_models() {
        let m = e.model.clone();
        let r = build_combinatorial_rep(&m).unwrap();
        docs.push(Document::Model(m.clone()));
        docs.push(Document::TierReport {
            model: m.clone(),
            verdict: classify(&m).unwrap(),
        });
        docs.push(Document::Certificate {
            model: m.clone(),
            certificate: find_dutch_book(&r).unwrap().unwrap(),
        });
        for t in [Tier::Strong, Tier::Logical, Tier::Probabilistic] {
            if e.expected.implies(t) {
                docs.push(Document::WitnessReport {
                    model: m.clone(),
                    witness: theorem1_witness(&r, t).unwrap(),
                });
            }
        }
        if e.name == "bell" {
            let ext = sample_monotone_extension(&r, &mut rng(1)).unwrap();
            docs.push(Document::Extension {
                model: m.clone(),
                kind: ExtensionKind::Monotonic,
                extension: ext,
            });
        }
    }
    let mix = random::deterministic_mixture(&mut rng(2), &catalog::bell_scenario(), 3).unwrap();
    let r = build_combinatorial_rep(&mix).unwrap();
    let p = has_classical_extension(&r).unwrap().unwrap();
    docs.push(Document::Extension {
        model: mix.clone(),
        kind: ExtensionKind::Classical,
        extension: Extension::from_point_weights(&r, &p).unwrap(),
    });
    docs.push(Document::TierReport {
        model: mix.clone(),
        verdict: classify(&mix).unwrap(),
    });
    docs.push(Document::Quantum(singlet_experiment()));
    docs.push(Document::Quantum(ghz_experiment()));

    for d in &docs {
        let back = round_trip(d);
        if let Document::Quantum(q) = &back {
            assert_eq!(
                quantum_to_empirical(q, snap).unwrap(),
                quantum_to_empirical(
                    match d {
                        Document::Quantum(q) => q,
                        _ => unreachable!(),
                    },
                    snap
                )
                .unwrap()
            );
        } else {
            assert_eq!(&back, d);
        }
        let (ok, what) = io::verify_document(&back, snap).unwrap();
        assert!(ok, "{} {what}", d.kind());
    }
}

#[test]
fn tampered_documents_fail_verification() {
    let m = catalog::pr_box().unwrap();
    let r = build_combinatorial_rep(&m).unwrap();
    let mut c = find_dutch_book(&r).unwrap().unwrap();
    c.stakes[0].1 = ratio(1, 1);
    let doc = io::load(&io::save(&Document::Certificate {
        model: m.clone(),
        certificate: c,
    }))
    .unwrap();
    assert!(
        !io::verify_document(&doc, SnapSettings::default())
            .unwrap()
            .0
    );

    let mut v = classify(&catalog::bell().unwrap()).unwrap();
    v.tier = Tier::Noncontextual;
    let text = io::save(&Document::TierReport {
        model: catalog::bell().unwrap(),
        verdict: v,
    });
    let verified = io::load(&text).and_then(|d| io::verify_document(&d, SnapSettings::default()));
    assert!(!matches!(verified, Ok((true, _))));
}

#[test]
fn schema_errors_name_their_location() {
    let mut text = io::model_to_json(&catalog::bell().unwrap());
    text = text.replacen("\"1/2\"", "\"-1/2\"", 1);
    match io::load(&text) {
        Err(Error::Schema { location, .. }) => {
            assert!(location.starts_with("tables[0]"), "{location}")
        }
        Err(e) => assert!(e.to_string().contains("tables[0]"), "{e}"),
        Ok(_) => panic!("negative weight accepted"),
    }
    assert!(matches!(
        io::load("{\"schema_version\": 1, \"kind\": \"nope\"}"),
        Err(Error::Schema { .. })
    ));
    assert!(matches!(io::load("not json"), Err(Error::Schema { .. })));
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hardy.json");
    let doc = Document::Model(catalog::hardy().unwrap());
    io::save_file(&path, &doc).unwrap();
    assert_eq!(io::load_file(&path).unwrap(), doc);
    assert!(io::load_file(&dir.path().join("missing.json")).is_err());
}

#[test]
fn exports_follow_supports() {
    for e in catalog_models() {
        let m = &e.model;
        let sc = m.scenario();
        let b = bundle_diagram(m).unwrap();
        // One edge per support section of each pair inside a context.
        let mut edges = 0;
        for c in sc.maximal_contexts() {
            let ms = c.measurements();
            for (k, x) in ms.iter().enumerate() {
                for y in &ms[k + 1..] {
                    let pair = ctxhier_core::model::Context::new([*x, *y]);
                    edges += sc
                        .sections_over(&pair)
                        .unwrap()
                        .iter()
                        .filter(|s| {
                            !m.probability(s)
                                .unwrap()
                                .eq(&Rational::from_integer(0.into()))
                        })
                        .count();
                }
            }
        }
        assert_eq!(b.support_edges.len(), edges, "{}", e.name);
        assert_eq!(
            b.global_sections.is_empty(),
            e.expected == Tier::Strong,
            "{}",
            e.name
        );
        assert_eq!(b.to_dot(sc), bundle_diagram(m).unwrap().to_dot(sc));

        let r = build_combinatorial_rep(m).unwrap();
        let n = nerve(&r).unwrap();
        for s in n.of_dimension(0) {
            assert!(!m
                .probability(s)
                .unwrap()
                .eq(&Rational::from_integer(0.into())));
        }
        serde_json::from_str::<serde_json::Value>(&n.to_json(sc)).unwrap();
        serde_json::from_str::<serde_json::Value>(&b.to_json(sc)).unwrap();
    }
}
