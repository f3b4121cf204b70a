//! Acceptance suite: every criterion below is exact (zero tolerance on
//! integers) and several carry wall-clock budgets. Each test prints one
//! PASS line (visible with `cargo test -- --nocapture`).

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use proptest::prelude::*;

use polygon_sandpile::graph::{MultiGraph, PolygonSpec, Topology};
use polygon_sandpile::group::{
    closed_form_ring, closed_form_wheel, sandpile_group, spanning_trees, AbelianGroup, GroupMethod,
    TreeMethod,
};
use polygon_sandpile::int;
use polygon_sandpile::matrix::IntegerMatrix;
use polygon_sandpile::relations::{transfer_matrix, transfer_power_closed_form};
use polygon_sandpile::sandpile::{
    enumerate_recurrent, stabilize, stabilize_shuffled, Configuration,
};
use polygon_sandpile::sequences::{check_identities, primed, SequenceParams};
use polygon_sandpile::Error;

fn uniform(topology: Topology, n: usize, a: u64, b: u64) -> PolygonSpec {
    PolygonSpec::uniform(topology, n, a, b).unwrap()
}

fn assert_within(elapsed: Duration, budget: Duration, what: &str) {
    assert!(
        elapsed <= budget,
        "{what} took {elapsed:?}, budget {budget:?}"
    );
}

/// Criterion 1: the wheel family matches the Fibonacci description
/// `(F_n, 5 F_n)` for even n and `(F_{n+1} + F_{n-1})` twice for odd n,
/// for n = 2..=8, in under a second.
#[test]
fn wheel_family_matches_fibonacci_formula() {
    let start = Instant::now();
    let mut fib = vec![int(0); 11];
    fib[1] = int(1);
    for i in 2..=10 {
        fib[i] = &fib[i - 1] + &fib[i - 2];
    }
    for n in 2..=8usize {
        let expected = if n % 2 == 0 {
            AbelianGroup::from_factors(vec![fib[n].clone(), int(5) * &fib[n]])
        } else {
            let lucas_like = &fib[n + 1] + &fib[n - 1];
            AbelianGroup::from_factors(vec![lucas_like.clone(), lucas_like])
        };
        let spec = uniform(Topology::Ring, n, 1, 0);
        for method in [GroupMethod::Closed, GroupMethod::Laplacian] {
            let got = sandpile_group(&spec, method, false).unwrap().group;
            assert_eq!(got, expected, "wheel n={n} via {method:?}");
        }
    }
    let spot4 = sandpile_group(&uniform(Topology::Ring, 4, 1, 0), GroupMethod::Auto, true)
        .unwrap()
        .group;
    assert_eq!(spot4.invariant_factors(), &[int(3), int(15)]);
    let spot5 = sandpile_group(&uniform(Topology::Ring, 5, 1, 0), GroupMethod::Auto, true)
        .unwrap()
        .group;
    assert_eq!(spot5.invariant_factors(), &[int(11), int(11)]);
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(1), "wheel family");
    println!("PASS wheel family n=2..8 matches the Fibonacci formula ({elapsed:?})");
}

/// Criterion 2: every applicable method returns identical invariant factors
/// over the grid n in [2,10], a in [0,4], b in [0,a], both closed
/// topologies, in under 60 seconds.
#[test]
fn cross_method_agreement_grid() {
    let start = Instant::now();
    let mut instances = 0usize;
    let mut runs = 0usize;
    for topology in [Topology::Ring, Topology::Twisted] {
        for n in 2..=10usize {
            for a in 0..=4u64 {
                for b in 0..=a {
                    let spec = uniform(topology, n, a, b);
                    let reference = sandpile_group(&spec, GroupMethod::Laplacian, false)
                        .unwrap()
                        .group;
                    instances += 1;
                    runs += 1;
                    for method in [
                        GroupMethod::Edge,
                        GroupMethod::Relation,
                        GroupMethod::Closed,
                    ] {
                        match sandpile_group(&spec, method, false) {
                            Ok(outcome) => {
                                runs += 1;
                                assert_eq!(
                                    outcome.group, reference,
                                    "{topology} n={n} ({a},{b}) via {method:?}"
                                );
                            }
                            Err(Error::Unsupported { .. }) => {}
                            Err(e) => panic!("{topology} n={n} ({a},{b}) via {method:?}: {e}"),
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(60), "agreement grid");
    println!(
        "PASS cross-method agreement on {instances} instances ({runs} method runs, {elapsed:?})"
    );
}

/// Criterion 3: spot tree counts, and the twisted-minus-planar gap 2na for
/// equal arcs across the grid.
#[test]
fn tree_count_identities() {
    let cases = [
        (uniform(Topology::Ring, 3, 1, 1), 75i64),
        (uniform(Topology::Twisted, 3, 1, 1), 81),
        (uniform(Topology::Twisted, 2, 1, 1), 16),
        (uniform(Topology::Ring, 4, 1, 0), 45),
    ];
    for (spec, expected) in cases {
        for method in [TreeMethod::Auto, TreeMethod::Laplacian, TreeMethod::Closed] {
            let got = spanning_trees(&spec, method).unwrap();
            assert_eq!(got.count, int(expected), "{spec:?} via {method:?}");
        }
    }
    for n in 2..=10usize {
        for a in 1..=4u64 {
            let ring = spanning_trees(&uniform(Topology::Ring, n, a, a), TreeMethod::Laplacian)
                .unwrap()
                .count;
            let twisted =
                spanning_trees(&uniform(Topology::Twisted, n, a, a), TreeMethod::Laplacian)
                    .unwrap()
                    .count;
            assert_eq!(
                &twisted - &ring,
                int((2 * n as u64 * a) as i64),
                "gap at n={n}, a={a}"
            );
        }
    }
    println!("PASS tree-count identities (spot values and the 2na gap)");
}

/// Criterion 4: the whole sequence identity suite holds exactly for
/// (a, b) in [0,5]^2 with a+b >= 1 and n <= 40, in under 5 seconds.
#[test]
fn sequence_identity_suite() {
    let start = Instant::now();
    let mut checked = 0usize;
    for a in 0..=5u64 {
        for b in 0..=5u64 {
            if a + b == 0 {
                continue;
            }
            let p = SequenceParams::new(a, b);
            for n in 1..=40i64 {
                for check in check_identities(n, &p).unwrap() {
                    assert!(check.holds, "({a},{b}) n={n}: {} failed", check.name);
                    checked += 1;
                }
                // Integrality of all four primed quotients.
                primed(n, &p).unwrap();
            }
        }
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(5), "sequence suite");
    println!("PASS sequence identity suite ({checked} identity checks, {elapsed:?})");
}

/// Criterion 5: the closed form of the n-th transfer-matrix power equals
/// repeated multiplication entrywise for n <= 12 and arcs in [1,4]^2.
#[test]
fn transfer_power_closed_form_matches_products() {
    for a in 1..=4u64 {
        for b in 1..=4u64 {
            let step = transfer_matrix(a, b).unwrap();
            let mut power = IntegerMatrix::identity(3);
            for n in 0..=12usize {
                assert_eq!(
                    power,
                    transfer_power_closed_form(n, a, b).unwrap(),
                    "({a},{b})^{n}"
                );
                power = step.multiply(&power).unwrap();
            }
        }
    }
    println!("PASS transfer-power closed form for n<=12, arcs in [1,4]^2");
}

/// Criterion 6: chip-firing enumeration matches the reduced-Laplacian
/// determinant on the tiny instances, and randomized stabilization agrees
/// with the deterministic one over 100 seeds per instance.
#[test]
fn chip_firing_oracle() {
    let triangle = MultiGraph::new(
        vec!["q".into(), "v1".into(), "v2".into()],
        vec![
            ("c0".to_string(), 0, 1),
            ("c1".to_string(), 1, 2),
            ("c2".to_string(), 2, 0),
        ],
    )
    .unwrap();
    let instances: Vec<(String, MultiGraph)> = vec![
        ("triangle".into(), triangle),
        ("banana".into(), uniform(Topology::Ring, 2, 0, 0).build()),
        (
            "doubled square".into(),
            uniform(Topology::Ring, 2, 1, 1).build(),
        ),
        (
            "wheel, 3 spokes".into(),
            uniform(Topology::Ring, 3, 1, 0).build(),
        ),
        (
            "twisted 2-ring".into(),
            uniform(Topology::Twisted, 2, 1, 1).build(),
        ),
    ];
    for (name, graph) in &instances {
        let recurrent = enumerate_recurrent(graph, 0, 1_000_000).unwrap();
        let det = graph.reduced_laplacian(0).unwrap().determinant().unwrap();
        assert_eq!(BigInt::from(recurrent.len() as u64), det, "{name}");

        // A tall pile on every vertex forces a long cascade.
        let heights = (0..graph.vertex_count())
            .map(|v| if v == 0 { 0 } else { 3 * graph.degree(v) + 2 })
            .collect();
        let config = Configuration::new(graph, 0, heights).unwrap();
        let reference = stabilize(graph, &config);
        for seed in 0..100u64 {
            let shuffled = stabilize_shuffled(graph, &config, seed);
            assert_eq!(shuffled.config, reference.config, "{name} seed {seed}");
            assert_eq!(shuffled.topples, reference.topples, "{name} seed {seed}");
        }
    }
    println!(
        "PASS chip-firing oracle on {} instances (counts + 100-seed stabilization)",
        instances.len()
    );
}

/// Criterion 7a: at most three invariant factors for every ring and twisted
/// ring in the grid.
#[test]
fn closed_topology_generator_bound() {
    for topology in [Topology::Ring, Topology::Twisted] {
        for n in 2..=10usize {
            for a in 0..=4u64 {
                for b in 0..=a {
                    let spec = uniform(topology, n, a, b);
                    let group = sandpile_group(&spec, GroupMethod::Auto, false)
                        .unwrap()
                        .group;
                    assert!(
                        group.generator_count() <= 3,
                        "{topology} n={n} ({a},{b}): {group}"
                    );
                }
            }
        }
    }
    println!("PASS at most 3 invariant factors on the closed-topology grid");
}

/// Criterion 7b: the sandpile group of every chain is cyclic
/// (property-based over chains with up to 6 polygons of girth up to 6).
#[test]
fn chain_groups_are_cyclic_property() {
    let arcs = (0u64..=4).prop_flat_map(|a| (Just(a), 0u64..=(4 - a)));
    let strategy = proptest::collection::vec(arcs, 1..=6);
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(64));
    runner
        .run(&strategy, |pairs| {
            let (a, b): (Vec<u64>, Vec<u64>) = pairs.into_iter().unzip();
            let spec = PolygonSpec::new(Topology::Chain, a, b).unwrap();
            let group = sandpile_group(&spec, GroupMethod::Edge, false)
                .unwrap()
                .group;
            prop_assert!(group.generator_count() <= 1, "{}", group);
            Ok(())
        })
        .unwrap();
    println!("PASS chain sandpile groups are cyclic (property-based)");
}

/// Criterion 8: the even-index wheel closed form (with the half-index
/// sequence value) agrees with the Smith normal form oracle.
#[test]
fn wheel_even_case_agrees_with_oracle() {
    for n in [4usize, 6, 8] {
        for a in 1..=3u64 {
            let closed = closed_form_wheel(n, a).unwrap();
            let oracle = sandpile_group(
                &uniform(Topology::Ring, n, a, 0),
                GroupMethod::Laplacian,
                false,
            )
            .unwrap()
            .group;
            assert_eq!(closed, oracle, "wheel n={n}, a={a}");
        }
    }
    let spot = closed_form_wheel(4, 2).unwrap();
    assert_eq!(spot.invariant_factors(), &[int(8), int(24)]);
    assert_eq!(spot.order(), &int(192));
    println!("PASS even-index wheel closed form vs oracle (n in {{4,6,8}}, a in {{1,2,3}})");
}

/// Criterion 9: scale sanity. The closed form handles n = 10^4 (sequence
/// values with thousands of digits) in under 2 seconds, and the reduced
/// Laplacian SNF of the 50-polygon (3,2)-ring (249x249) lands in under 30
/// seconds with the same group order.
#[test]
fn scale_sanity() {
    let start = Instant::now();
    let big = closed_form_ring(10_000, 3, 2).unwrap();
    let closed_elapsed = start.elapsed();
    assert_within(
        closed_elapsed,
        Duration::from_secs(2),
        "closed form at n=10^4",
    );
    assert!(big.order().to_string().len() > 1_000);

    let spec = uniform(Topology::Ring, 50, 3, 2);
    let graph = spec.build();
    assert_eq!(graph.vertex_count(), 250);
    let start = Instant::now();
    let reduced = graph.reduced_laplacian(0).unwrap();
    let snf = reduced.snf();
    let snf_elapsed = start.elapsed();
    assert_within(snf_elapsed, Duration::from_secs(30), "249x249 SNF");
    let snf_group = AbelianGroup::from_factors(snf.invariant_factors);
    let closed = closed_form_ring(50, 3, 2).unwrap();
    assert_eq!(snf_group, closed);
    println!(
        "PASS scale sanity (closed n=10^4 in {closed_elapsed:?}, 249x249 SNF in {snf_elapsed:?})"
    );
}
