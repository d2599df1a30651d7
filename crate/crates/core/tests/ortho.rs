mod common;

use std::time::{Duration, Instant};

use fcn_core::layout::EnergyTable;
use fcn_core::network::{parse_verilog, random_network, LogicNetwork, Op, RandomSpec};
use fcn_core::ortho::{color_edges, ortho_layout, Color, OrthoError, OrthoParams, ORTHO_OPS};
use fcn_core::techmap::QCA_ONE_OPS;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prepared(seed: u64, pis: usize, gates: usize) -> LogicNetwork {
    random_network(&mut ChaCha8Rng::seed_from_u64(seed), &RandomSpec::new(pis, gates))
        .lower_to(&QCA_ONE_OPS)
        .substitute_fanouts(2)
        .unwrap()
}

#[test]
fn coloring_separates_shared_endpoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..50 {
        let gates = rng.gen_range(1..=300);
        let net = prepared(i, rng.gen_range(1..12), gates);
        let c = color_edges(&net).unwrap();
        assert_eq!(c.color.len(), net.edge_count());
        for v in net.vertices() {
            for group in [net.fanin_edges(v.id), net.fanout_edges(v.id)] {
                if let [a, b] = group {
                    assert_ne!(c.get(*a), c.get(*b), "vertex {:?}", v.id);
                }
            }
        }
    }
}

#[test]
fn c17_with_and_without_pins() {
    let net = parse_verilog(include_str!("fixtures/c17.v"))
        .unwrap()
        .lower_to(&QCA_ONE_OPS)
        .substitute_fanouts(2)
        .unwrap();
    let vs = common::vectors(5, &mut rand::thread_rng());
    for params in [
        OrthoParams::default(),
        OrthoParams {
            io_pins: true,
            border: false,
        },
        OrthoParams {
            io_pins: true,
            border: true,
        },
    ] {
        let l = ortho_layout(&net, &params).unwrap();
        assert_eq!(l.check_validity(), vec![], "{params:?}");
        common::equivalent(&l, &net, &vs).unwrap();
        let s = l.statistics(&EnergyTable::qca_one()).unwrap();
        let io = if params.io_pins { 7 } else { 0 };
        assert_eq!(s.gates, net.vertex_count() - 7 + io);
        if params.border {
            assert!(l.po_tiles().iter().all(|t| l.is_border(*t)));
        }
    }
}

#[test]
fn area_is_bounded_by_graph_size() {
    for seed in 0..40 {
        let net = prepared(seed, 4, 40);
        let n = (net.vertex_count() + net.edge_count()) as u64;
        let l = ortho_layout(
            &net,
            &OrthoParams {
                io_pins: true,
                border: true,
            },
        )
        .unwrap();
        assert!(l.area() <= n * n, "{} > {}", l.area(), n * n);
        let vs = common::vectors(net.pis().len(), &mut ChaCha8Rng::seed_from_u64(seed));
        common::equivalent(&l, &net, &vs).unwrap();
    }
}

#[test]
fn validity_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..100 {
        let gates = rng.gen_range(1..40);
        let net = prepared(seed, rng.gen_range(1..8), gates);
        let params = OrthoParams {
            io_pins: rng.gen_bool(0.5),
            border: false,
        };
        let l = match ortho_layout(&net, &params) {
            Ok(l) => l,
            Err(OrthoError::DirectPinEdge) => {
                assert!(!params.io_pins);
                continue;
            }
            Err(e) => panic!("{e}"),
        };
        assert_eq!(l.check_validity(), vec![]);
        let vs = common::vectors(net.pis().len(), &mut rng);
        common::equivalent(&l, &net, &vs).unwrap();
    }
}

#[test]
fn two_hundred_nodes_in_a_second() {
    let net = prepared(5, 16, 130);
    assert!(net.vertex_count() >= 200, "{} vertices", net.vertex_count());
    let t = Instant::now();
    let l = ortho_layout(
        &net,
        &OrthoParams {
            io_pins: true,
            border: false,
        },
    )
    .unwrap();
    assert!(t.elapsed() < Duration::from_secs(1), "{:?}", t.elapsed());
    assert!(l.is_valid());
}

#[test]
fn majority_needs_lowering() {
    let net = random_network(
        &mut ChaCha8Rng::seed_from_u64(1),
        &RandomSpec {
            pis: 3,
            gates: 1,
            ops: vec![Op::Maj],
        },
    );
    assert!(matches!(
        ortho_layout(&net, &OrthoParams::default()),
        Err(OrthoError::InDegree { degree: 3, .. })
    ));
    let low = net.lower_to(&ORTHO_OPS).substitute_fanouts(2).unwrap();
    assert!(ortho_layout(&low, &OrthoParams::default()).unwrap().is_valid());
}

#[test]
fn colors_are_used_on_both_sides() {
    let net = prepared(2, 3, 20);
    let c = color_edges(&net).unwrap();
    assert!(c.color.contains(&Color::East) && c.color.contains(&Color::South));
}
