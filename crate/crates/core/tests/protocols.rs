//! Protocol behavior against independent oracles.

use std::collections::{BTreeMap, BTreeSet};

use lunes_core::engine::{run, EngineParams, Sequential};
use lunes_core::graph::{gen_erdos_renyi, Graph, NodeId};
use lunes_core::protocols::{Gossip, GossipParams, ProtocolKind};
use lunes_core::rng::{entity_rng_draw, Purpose};
use lunes_core::trace::{IntegrityChecker, MsgId, TraceEvent};
use proptest::prelude::*;

fn simulate(g: &Graph, gp: GossipParams, ep: EngineParams) -> Vec<TraceEvent> {
    let mut trace = Vec::new();
    run(&ep, g, &Gossip::new(gp).unwrap(), &Sequential, &mut trace).unwrap();
    trace
}

fn sorted_lines(trace: &[TraceEvent]) -> Vec<String> {
    let mut v: Vec<String> = trace.iter().filter(|e| e.is_protocol_level()).map(|e| e.to_string()).collect();
    v.sort();
    v
}

/// Straight-line model of fixed-probability gossip written without the
/// engine: a list of in-flight copies advanced one timestep at a time.
fn reference_fixed(g: &Graph, prob: f64, gen_prob: f64, ttl: u32, steps: u32, seed: u64) -> Vec<String> {
    // (origin, seq, sender, dest, ttl_left, hops)
    let mut flight: Vec<(u32, u32, u32, u32, u32, u32)> = Vec::new();
    let mut seen: Vec<BTreeSet<(u32, u32)>> = vec![BTreeSet::new(); g.node_count()];
    let mut next_seq = vec![0u32; g.node_count()];
    let mut lines = Vec::new();
    let forward = |node: u32, o: u32, s: u32, ttl_left: u32, hops: u32, skip: Option<u32>, out: &mut Vec<_>| {
        if ttl_left == 0 {
            return;
        }
        for (i, &w) in g.neighbors(node).iter().enumerate() {
            if Some(w) != skip && entity_rng_draw(seed, node, Purpose::Forward { origin: o, seq: s }, i as u64) < prob {
                out.push((o, s, node, w, ttl_left - 1, hops + 1));
            }
        }
    };
    for t in 0..steps {
        let mut arriving = std::mem::take(&mut flight);
        arriving.sort_by_key(|&(o, s, from, to, _, _)| (o, s, from, to));
        for (o, s, from, to, ttl_left, hops) in arriving {
            if seen[to as usize].insert((o, s)) {
                lines.push(format!("R {t} {to} {o}:{s} {hops}"));
                forward(to, o, s, ttl_left, hops, Some(from), &mut flight);
            } else {
                lines.push(format!("D {t} {to} {o}:{s}"));
            }
        }
        for x in 0..g.node_count() as u32 {
            if entity_rng_draw(seed, x, Purpose::Generate { t }, 0) < gen_prob {
                let s = next_seq[x as usize];
                next_seq[x as usize] += 1;
                seen[x as usize].insert((x, s));
                lines.push(format!("G {t} {x} {x}:{s}"));
                forward(x, x, s, ttl, 0, None, &mut flight);
            }
        }
    }
    lines.sort();
    lines
}

fn gossip(kind: ProtocolKind, prob: f64, ttl: u32) -> GossipParams {
    GossipParams { kind, prob, ttl, ..Default::default() }
}

#[test]
fn triangle_matches_hand_model() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    let ep = EngineParams { steps: 200, seed: 11, ..Default::default() };
    let gp = GossipParams { gen_prob: 0.1, ..gossip(ProtocolKind::Fixed, 0.8, 2) };
    let got = sorted_lines(&simulate(&g, gp, ep));
    assert!(got.iter().any(|l| l.starts_with('D')), "want some duplicates");
    assert_eq!(got, reference_fixed(&g, 0.8, 0.1, 2, 200, 11));
}

#[test]
fn ttl_zero_never_forwards() {
    let g = gen_erdos_renyi(30, 60, 2).unwrap();
    let ep = EngineParams { steps: 50, seed: 1, ..Default::default() };
    let trace = simulate(&g, gossip(ProtocolKind::Broadcast, 1.0, 0), ep);
    assert!(trace.iter().any(|e| e.kind() == 'G'));
    assert!(trace.iter().all(|e| e.kind() == 'G'));
}

#[test]
fn star_center_forwards_to_all_but_sender() {
    let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    let ep = EngineParams { steps: 3, seed: 0, verbosity: 2, ..Default::default() };
    let gp = GossipParams { gen_prob: 1.0, ..gossip(ProtocolKind::Broadcast, 1.0, 2) };
    let trace = simulate(&g, gp, ep);
    // leaf 1's first message, relayed by the center at t=1
    let relays: BTreeSet<NodeId> = trace
        .iter()
        .filter_map(|e| match *e {
            TraceEvent::Send { t: 1, node: 0, msg, dest } if msg == MsgId::new(1, 0) => Some(dest),
            _ => None,
        })
        .collect();
    assert_eq!(relays, BTreeSet::from([2, 3, 4]));
}

#[test]
fn path_hop_counts_and_lookahead() {
    let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
    let ep = EngineParams { steps: 10, seed: 4, ..Default::default() };
    let gp = GossipParams { gen_prob: 0.02, ..gossip(ProtocolKind::Broadcast, 1.0, 8) };
    let trace = simulate(&g, gp, ep);
    let gens: BTreeMap<MsgId, u32> = trace
        .iter()
        .filter_map(|e| match *e {
            TraceEvent::Generate { t, msg, .. } => Some((msg, t)),
            _ => None,
        })
        .collect();
    for e in &trace {
        if let TraceEvent::Receive { t, node, msg, hops } = *e {
            assert_eq!(hops, node.abs_diff(msg.origin));
            assert_eq!(t, gens[&msg] + hops);
        }
    }
}

fn adaptive(alpha: f64) -> GossipParams {
    GossipParams { alpha, recv_window: 20, stim_duration: 15, ..gossip(ProtocolKind::Adaptive, 0.5, 4) }
}

#[test]
fn adaptive_alpha_zero_equals_fixed() {
    let g = gen_erdos_renyi(40, 80, 8).unwrap();
    let ep = EngineParams { steps: 200, seed: 3, ..Default::default() };
    let a = simulate(&g, adaptive(0.0), ep.clone());
    let f = simulate(&g, gossip(ProtocolKind::Fixed, 0.5, 4), ep);
    assert_eq!(a, f);
}

#[test]
fn adaptive_with_stimuli_sends_control_and_raises_reach() {
    let g = gen_erdos_renyi(40, 80, 8).unwrap();
    let ep = EngineParams { steps: 300, seed: 3, ..Default::default() };
    let p = Gossip::new(adaptive(1.0)).unwrap();
    let mut ad = Vec::new();
    let out = run(&ep, &g, &p, &Sequential, &mut ad).unwrap();
    assert!(out.stats.control_messages > 0);
    let fixed = simulate(&g, gossip(ProtocolKind::Fixed, 0.5, 4), ep);
    let receptions = |t: &[TraceEvent]| t.iter().filter(|e| e.kind() == 'R').count();
    assert!(receptions(&ad) >= receptions(&fixed));
    assert!(ad.iter().filter(|e| e.kind() == 'G').eq(fixed.iter().filter(|e| e.kind() == 'G')));
}

#[test]
fn preboost_equals_broadcast() {
    let g = gen_erdos_renyi(40, 80, 5).unwrap();
    let ep = EngineParams { steps: 150, seed: 9, ..Default::default() };
    let gp = GossipParams { stim_prob: 1.0, stim_duration: 150, preboost: true, ..adaptive(0.5) };
    assert_eq!(simulate(&g, gp, ep.clone()), simulate(&g, gossip(ProtocolKind::Broadcast, 1.0, 4), ep));
}

#[test]
fn stimulus_sets_and_refreshes_boost() {
    let g = Graph::from_edges(2, [(0, 1)]).unwrap();
    let p = Gossip::new(adaptive(0.5)).unwrap();
    let mut s = lunes_core::engine::Protocol::init_state(&p, 0, &g);
    p.on_receive_stimulus(&mut s, 1, 1, 10);
    assert_eq!(s.adaptive.as_ref().unwrap().boost_expiry(1, 1), Some(25));
    assert_eq!(p.effective_probability(&mut s, 1, 1, 24), 1.0);
    p.on_receive_stimulus(&mut s, 1, 1, 20);
    assert_eq!(s.adaptive.as_ref().unwrap().boost_expiry(1, 1), Some(35));
    assert_eq!(p.effective_probability(&mut s, 1, 1, 35), 0.5);
    assert_eq!(s.adaptive.as_ref().unwrap().boost_expiry(1, 1), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engine_matches_reference_model(seed in any::<u64>(), n in 3usize..25, extra in 0usize..20, prob in 0.0f64..=1.0) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = gen_erdos_renyi(n, m, seed).unwrap();
        let ep = EngineParams { steps: 40, seed, ..Default::default() };
        let gp = GossipParams { gen_prob: 0.1, ..gossip(ProtocolKind::Fixed, prob, 3) };
        prop_assert_eq!(sorted_lines(&simulate(&g, gp, ep)), reference_fixed(&g, prob, 0.1, 3, 40, seed));
    }

    #[test]
    fn flooding_reaches_exactly_the_ttl_ball(seed in any::<u64>(), n in 2usize..=20, extra in 0usize..15, ttl in 1u32..6) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = gen_erdos_renyi(n, m, seed).unwrap();
        let ep = EngineParams { steps: 30, seed, ..Default::default() };
        let gp = GossipParams { gen_prob: 0.05, ..gossip(ProtocolKind::Fixed, 1.0, ttl) };
        let trace = simulate(&g, gp, ep);
        let mut receivers: BTreeMap<MsgId, BTreeSet<NodeId>> = BTreeMap::new();
        for e in &trace {
            match *e {
                TraceEvent::Generate { msg, .. } => { receivers.entry(msg).or_default(); }
                TraceEvent::Receive { node, msg, .. } => { receivers.get_mut(&msg).unwrap().insert(node); }
                _ => {}
            }
        }
        // all copies of a message generated before 30 - ttl have landed
        let last_complete = 30 - ttl;
        for e in &trace {
            if let TraceEvent::Generate { t, msg, .. } = *e {
                if t < last_complete {
                    let ball: BTreeSet<NodeId> = g.bfs_distances(msg.origin).iter().enumerate()
                        .filter(|(v, d)| *v as NodeId != msg.origin && d.is_some_and(|d| d <= ttl))
                        .map(|(v, _)| v as NodeId).collect();
                    prop_assert_eq!(&receivers[&msg], &ball);
                }
            }
        }
    }

    #[test]
    fn raising_probability_only_adds(seed in any::<u64>(), lo in 0.0f64..1.0, d in 0.0f64..0.5) {
        let hi = (lo + d).min(1.0);
        let g = gen_erdos_renyi(30, 60, seed).unwrap();
        let ep = EngineParams { steps: 60, seed, ..Default::default() };
        let r = |p| simulate(&g, gossip(ProtocolKind::Fixed, p, 4), ep.clone())
            .into_iter().filter(|e| e.kind() == 'R').map(|e| (e.msg().unwrap(), match e { TraceEvent::Receive { node, .. } => node, _ => 0 }))
            .collect::<BTreeSet<_>>();
        prop_assert!(r(lo).is_subset(&r(hi)));
    }

    #[test]
    fn generated_traces_pass_integrity(seed in any::<u64>(), kind in 0usize..3, lp in 1usize..4) {
        let g = gen_erdos_renyi(30, 60, seed).unwrap();
        let ep = EngineParams { steps: 50, seed, verbosity: 2, lp_count: lp, gaia: lp > 1, ..Default::default() };
        let gp = GossipParams { kind: ProtocolKind::ALL[kind], recv_window: 10, ..gossip(ProtocolKind::Fixed, 0.7, 4) };
        let mut checker = IntegrityChecker::new(Some(4), Some(50), None);
        simulate(&g, gp, ep).iter().for_each(|e| checker.feed(e));
        let report = checker.finish();
        prop_assert!(report.is_clean(), "{:?}", report.samples);
        prop_assert!(report.conservation_checked);
    }
}
