mod common;

use std::path::Path;
use std::time::Duration;

use fcn_core::clocking::ClockingScheme;
use fcn_core::exact::{dimension_sequence, exact_layout, ExactError, ExactParams, Status};
use fcn_core::layout::{EnergyTable, GateLayout};
use fcn_core::network::{parse_verilog, random_network, LogicNetwork, RandomSpec};
use fcn_core::ortho::{ortho_layout, OrthoParams};
use fcn_core::techmap::QCA_ONE_OPS;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c17() -> LogicNetwork {
    parse_verilog(include_str!("fixtures/c17.v"))
        .unwrap()
        .lower_to(&QCA_ONE_OPS)
        .substitute_fanouts(2)
        .unwrap()
}

fn stats_line(l: &GateLayout) -> String {
    l.statistics(&EnergyTable::qca_one()).unwrap().to_string()
}

/// Checks every guarantee a found layout must give under `p`.
fn check(net: &LogicNetwork, l: &GateLayout, p: &ExactParams) -> Result<(), String> {
    let v = l.check_validity();
    if !v.is_empty() {
        return Err(format!("invalid: {v:?}"));
    }
    let vs = common::vectors(net.pis().len(), &mut ChaCha8Rng::seed_from_u64(1));
    common::equivalent(l, net, &vs)?;
    let s = l.statistics(&EnergyTable::qca_one()).map_err(|e| e.to_string())?;
    if !p.crossings && s.crossings > 0 {
        return Err(format!("{} crossings with crossings off", s.crossings));
    }
    if !p.latches && s.latches > 0 {
        return Err(format!("{} latches with latches off", s.latches));
    }
    if !p.desync && s.throughput != 1 {
        return Err(format!("TP 1/{} in balanced mode", s.throughput));
    }
    if p.io_pins && p.border_io {
        if let Some(t) = l.pi_tiles().iter().chain(l.po_tiles()).find(|t| !l.is_border(**t)) {
            return Err(format!("pin at {t:?} off the border"));
        }
    }
    if let Some(limit) = p.wire_limit {
        let routes = l.routes().map_err(|v| format!("{v:?}"))?;
        if let Some(r) = routes.iter().find(|r| r.wires.len() > limit) {
            return Err(format!("edge {:?} uses {} wires", r.edge, r.wires.len()));
        }
    }
    Ok(())
}

#[test]
fn c17_fixtures() {
    let want = [
        (
            "c17_a",
            "2ddwave4",
            "c17: 5 x 7, #G: 18, #W: 18, #C: 3, #L: 0, CP: 11, TP: 1/1",
        ),
        (
            "c17_b",
            "use",
            "c17: 4 x 5, #G: 11, #W: 7, #C: 0, #L: 0, CP: 13, TP: 1/3",
        ),
    ];
    let reference = parse_verilog(include_str!("fixtures/c17.v")).unwrap();
    for (file, scheme, line) in want {
        let l = GateLayout::load(Path::new(&format!(
            "{}/tests/fixtures/{file}.json",
            env!("CARGO_MANIFEST_DIR")
        )))
        .unwrap();
        assert_eq!(l.scheme().name, scheme);
        assert_eq!(l.check_validity(), vec![]);
        assert_eq!(stats_line(&l), line);
        let vs = common::vectors(5, &mut rand::thread_rng());
        common::equivalent(&l, &reference, &vs).unwrap();
        let tp = l.throughput().unwrap().denominator;
        assert_eq!(l.min_safe_interval(tp + 3, 2).unwrap(), Some(tp));
    }
}

#[test]
fn c17_balanced_with_border_pins() {
    let net = c17();
    let p = ExactParams {
        io_pins: true,
        border_io: true,
        crossings: true,
        ..ExactParams::default()
    };
    let r = exact_layout(&net, &p).unwrap();
    assert_eq!(r.status, Status::Found);
    let l = r.layout.unwrap();
    check(&net, &l, &p).unwrap();
    let s = l.statistics(&EnergyTable::qca_one()).unwrap();
    assert_eq!((s.width * s.height, s.gates, s.latches, s.throughput), (35, 18, 0, 1));
    assert!(s.crossings <= 5 && s.wires <= 24);
    // every smaller grid was refuted
    assert!(r.explored.iter().filter(|e| u64::from(e.width * e.height) < 35).count() > 0);
}

#[test]
fn c17_desynchronized_on_use() {
    let net = c17();
    let p = ExactParams {
        scheme: ClockingScheme::from_name("use").unwrap(),
        desync: true,
        ..ExactParams::default()
    };
    let l = exact_layout(&net, &p).unwrap().layout.unwrap();
    check(&net, &l, &p).unwrap();
    let s = l.statistics(&EnergyTable::qca_one()).unwrap();
    assert_eq!((s.width * s.height, s.gates, s.crossings), (20, 11, 0));
    assert!((1..=3).contains(&s.throughput));
    assert_eq!(l.min_safe_interval(8, 3).unwrap(), Some(s.throughput));
}

#[test]
fn random_parameters_are_respected() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let schemes = ["2ddwave4", "use", "res"];
    let mut found = 0;
    for case in 0..30 {
        let gates = rng.gen_range(1..6);
        let pis = rng.gen_range(1..4);
        let net = random_network(&mut rng, &RandomSpec::new(pis, gates))
            .lower_to(&QCA_ONE_OPS)
            .substitute_fanouts(2)
            .unwrap();
        let io_pins = rng.gen_bool(0.5);
        let p = ExactParams {
            scheme: ClockingScheme::from_name(schemes[case % 3]).unwrap(),
            crossings: rng.gen_bool(0.5),
            io_pins,
            border_io: io_pins && rng.gen_bool(0.5),
            desync: rng.gen_bool(0.5),
            wire_limit: rng.gen_bool(0.3).then(|| rng.gen_range(1..4)),
            timeout: Some(Duration::from_secs(20)),
            upper_bound: Some(40),
            ..ExactParams::default()
        };
        match exact_layout(&net, &p) {
            Ok(r) => {
                if let Some(l) = r.layout {
                    found += 1;
                    if let Err(e) = check(&net, &l, &p) {
                        panic!("case {case} {p:?}: {e}");
                    }
                }
            }
            Err(ExactError::DirectPinEdge) => assert!(!p.io_pins),
            Err(e) => panic!("case {case}: {e}"),
        }
    }
    assert!(found >= 20, "only {found} layouts found");
}

#[test]
fn exact_never_loses_to_ortho() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..15 {
        let gates = rng.gen_range(1..7);
        let net = random_network(&mut rng, &RandomSpec::new(2, gates))
            .lower_to(&QCA_ONE_OPS)
            .substitute_fanouts(2)
            .unwrap();
        let io_pins = rng.gen_bool(0.5);
        let Ok(o) = ortho_layout(&net, &OrthoParams { io_pins, border: false }) else {
            continue;
        };
        let p = ExactParams {
            crossings: true,
            io_pins,
            desync: true,
            upper_bound: Some(o.area()),
            ..ExactParams::default()
        };
        let e = exact_layout(&net, &p)
            .unwrap()
            .layout
            .expect("ortho proves a layout fits");
        assert!(e.area() <= o.area(), "exact {} > ortho {}", e.area(), o.area());
    }
}

proptest! {
    #[test]
    fn dimension_sequence_covers_each_size_once(n in 1usize..30, extra in 0u64..30) {
        let bound = n as u64 + extra;
        let dims: Vec<(u32, u32)> = dimension_sequence(n, Some(bound)).collect();
        let areas: Vec<u64> = dims.iter().map(|&(w, h)| u64::from(w) * u64::from(h)).collect();
        prop_assert!(areas.windows(2).all(|a| a[0] <= a[1]));
        let mut want = Vec::new();
        for w in 1..=bound as u32 {
            for h in 1..=bound as u32 {
                let a = u64::from(w) * u64::from(h);
                if a >= n as u64 && a <= bound {
                    want.push((w, h));
                }
            }
        }
        let mut got = dims.clone();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }
}
