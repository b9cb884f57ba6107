//! Protocol-level trace is independent of the LP count, clustering and executor.

use lunes_core::engine::{run, EngineParams, Sequential};
use lunes_core::graph::{gen_barabasi_albert, gen_erdos_renyi};
use lunes_core::protocols::{Gossip, GossipParams, ProtocolKind};
use lunes_core::trace::TraceEvent;
use proptest::prelude::*;

fn protocol_lines(trace: Vec<TraceEvent>) -> Vec<TraceEvent> {
    trace.into_iter().filter(TraceEvent::is_protocol_level).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn same_trace_for_every_partitioning(seed in any::<u64>(), kind in 0usize..3, ba in any::<bool>(), k_mig in 1u32..6) {
        let g = if ba { gen_barabasi_albert(60, 3, 2, seed) } else { gen_erdos_renyi(60, 120, seed) }.unwrap();
        let gp = GossipParams { kind: ProtocolKind::ALL[kind], ttl: 5, recv_window: 15, ..Default::default() };
        let protocol = Gossip::new(gp).unwrap();
        let mut reference = None;
        for lp in [1usize, 2, 3, 4] {
            for gaia in [false, true] {
                let ep = EngineParams { steps: 80, lp_count: lp, gaia, k_mig, seed, ..Default::default() };
                let mut trace = Vec::new();
                run(&ep, &g, &protocol, &Sequential, &mut trace).unwrap();
                let lines = protocol_lines(trace);
                match &reference {
                    None => reference = Some(lines),
                    Some(r) => prop_assert_eq!(r, &lines, "lp={} gaia={}", lp, gaia),
                }
            }
        }
    }
}
