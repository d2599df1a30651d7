mod common;

use std::sync::Arc;

use fcn_core::clocking::ClockingScheme;
use fcn_core::layout::{Dir, EnergyTable, GateLayout, Layer, Tile};
use fcn_core::network::{random_network, LogicNetwork, NetworkBuilder, Op, RandomSpec};
use fcn_core::ortho::{ortho_layout, OrthoParams};
use fcn_core::techmap::QCA_ONE_OPS;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn json(l: &GateLayout) -> String {
    serde_json::to_string(&l.to_data()).unwrap()
}

fn prepared(net: &LogicNetwork) -> LogicNetwork {
    net.lower_to(&QCA_ONE_OPS).substitute_fanouts(2).unwrap()
}

fn arb_ortho() -> impl Strategy<Value = (LogicNetwork, GateLayout)> {
    (1usize..6, 1usize..30, any::<bool>(), any::<u64>()).prop_map(|(pis, gates, pins, seed)| {
        let net = prepared(&random_network(
            &mut ChaCha8Rng::seed_from_u64(seed),
            &RandomSpec::new(pis, gates),
        ));
        // a PI wired straight to a PO needs pins
        let layout = ortho_layout(
            &net,
            &OrthoParams {
                io_pins: pins,
                ..OrthoParams::default()
            },
        )
        .or_else(|_| {
            ortho_layout(
                &net,
                &OrthoParams {
                    io_pins: true,
                    ..OrthoParams::default()
                },
            )
        })
        .unwrap();
        (net, layout)
    })
}

#[test]
fn two_d_d_wave_is_diagonal() {
    let s = ClockingScheme::two_d_d_wave(4);
    for y in 0..9 {
        for x in 0..9 {
            assert_eq!(s.clock_number(Tile::new(x, y)), Some(((x + y) % 4) as u8));
        }
    }
    assert_eq!(ClockingScheme::open(4).clock_number(Tile::new(0, 0)), None);
}

#[test]
fn use_flows_in_every_direction() {
    let s = ClockingScheme::from_name("use").unwrap();
    let mut dirs = std::collections::BTreeSet::new();
    for y in 0..4 {
        for x in 0..4 {
            let t = Tile::new(x, y);
            let z = s.clock_number(t).unwrap();
            for d in [Dir::N, Dir::E, Dir::S, Dir::W] {
                if let Some(n) = t.step(d) {
                    if s.clock_number(n) == Some((z + 1) % 4) {
                        dirs.insert(d);
                    }
                }
            }
        }
    }
    assert_eq!(dirs.len(), 4);
}

/// x -> AND(x, y) -> o, with y routed around through two wires.
fn skewed() -> GateLayout {
    let mut b = NetworkBuilder::new("skewed");
    let x = b.add_pi("x");
    let y = b.add_pi("y");
    let g = b.add_gate(Op::And, &[x, y]).unwrap();
    b.add_po("o", g).unwrap();
    let net = Arc::new(b.build());
    let mut l = GateLayout::new(3, 3, ClockingScheme::two_d_d_wave(4), net.clone());
    l.assign_logic_vertex(Tile::new(0, 0), y).unwrap();
    l.assign_logic_vertex(Tile::new(0, 2), x).unwrap();
    l.assign_logic_vertex(Tile::new(1, 2), g).unwrap();
    l.assign_logic_vertex(Tile::new(2, 2), net.pos()[0]).unwrap();
    let ey = net.fanin_edges(g)[1];
    l.assign_wire(Tile::new(1, 0), ey, Layer::Ground, Dir::W, Dir::S)
        .unwrap();
    l.assign_wire(Tile::new(1, 1), ey, Layer::Ground, Dir::N, Dir::S)
        .unwrap();
    l
}

#[test]
fn skewed_layout_statistics() {
    let l = skewed();
    assert_eq!(l.check_validity(), vec![]);
    let s = l.statistics(&EnergyTable::qca_one()).unwrap();
    assert_eq!(
        (s.width, s.height, s.gates, s.wires, s.crossings, s.latches),
        (3, 3, 4, 2, 0, 0)
    );
    assert_eq!(s.critical_path, 5);
    // y is applied two phases before x, which makes up for its detour
    assert_eq!(s.throughput, 1);
    assert_eq!(l.min_safe_interval(8, 1).unwrap(), Some(1));
}

#[test]
fn throughput_agrees_with_wave_simulation_on_unbalanced_layouts() {
    let layouts = common::unbalanced_layouts(12, 5);
    assert_eq!(layouts.len(), 12);
    for l in layouts {
        assert_eq!(l.check_validity(), vec![]);
        let tp = l.throughput().unwrap().denominator;
        assert_eq!(l.min_safe_interval(tp + 4, 11).unwrap(), Some(tp), "{}", l.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ortho_layouts_are_valid((net, l) in arb_ortho()) {
        prop_assert_eq!(l.check_validity(), vec![]);
        let vs = common::vectors(net.pis().len(), &mut ChaCha8Rng::seed_from_u64(0));
        prop_assert_eq!(common::equivalent(&l, &net, &vs), Ok(()));
    }

    #[test]
    fn transpose_keeps_function((net, l) in arb_ortho()) {
        let t = l.transpose();
        prop_assert_eq!((t.width(), t.height()), (l.height(), l.width()));
        prop_assert_eq!(t.check_validity(), vec![]);
        let vs = common::vectors(net.pis().len(), &mut ChaCha8Rng::seed_from_u64(0));
        prop_assert_eq!(common::equivalent(&t, &net, &vs), Ok(()));
        prop_assert_eq!(json(&t.transpose()), json(&l));
        prop_assert_eq!(t.critical_path().unwrap(), l.critical_path().unwrap());
    }

    #[test]
    fn file_round_trip((_net, l) in arb_ortho()) {
        let back = GateLayout::from_json(&serde_json::to_string(&l.to_data()).unwrap()).unwrap();
        prop_assert_eq!(json(&back), json(&l));
    }

    #[test]
    fn statistics_count_tiles((net, l) in arb_ortho()) {
        let s = l.statistics(&EnergyTable::qca_one()).unwrap();
        prop_assert_eq!(s.gates, l.placed_vertices().count());
        prop_assert_eq!(s.gates, net.vertex_count() - if l.pi_tiles().is_empty() { net.pis().len() + net.pos().len() } else { 0 });
        prop_assert!(s.bounding_box.0 <= s.width && s.bounding_box.1 <= s.height);
        prop_assert!(s.energy.0 >= 0.0 && s.energy.1 >= s.energy.0);
    }

    #[test]
    fn throughput_agrees_with_wave_simulation((_net, l) in arb_ortho()) {
        let tp = l.throughput().unwrap().denominator;
        prop_assert_eq!(l.min_safe_interval(tp + 4, 7).unwrap(), Some(tp));
    }
}
