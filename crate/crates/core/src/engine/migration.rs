use alloc::vec::Vec;

use super::{LpId, LpMap};
use crate::graph::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Migration {
    pub entity: NodeId,
    pub from: LpId,
    pub to: LpId,
}

/// One clustering round.
///
/// `lp_counts[i][l]` is entity `i`'s recent traffic toward LP `l`. An entity
/// proposes to move to its busiest foreign LP (ties to the lower id) when
/// that traffic exceeds `theta` times its home traffic. Proposals are applied
/// to `map` by decreasing gain, ties by entity id, and only while the target
/// LP stays within the population cap. Returns the applied moves in order.
pub fn migration_round(lp_counts: &[Vec<u64>], map: &mut LpMap, delta: f64, theta: f64) -> Vec<Migration> {
    debug_assert_eq!(lp_counts.len(), map.entity_count());
    let mut proposals: Vec<(u64, Migration)> = Vec::new();
    for (entity, counts) in lp_counts.iter().enumerate() {
        let home = map.lp_of(entity as NodeId);
        let home_count = counts[home as usize];
        let best =
            counts.iter().enumerate().filter(|&(l, _)| l as LpId != home).fold(None::<(usize, u64)>, |acc, (l, &c)| {
                match acc {
                    Some((_, bc)) if bc >= c => acc,
                    _ => Some((l, c)),
                }
            });
        if let Some((to, best_count)) = best {
            if best_count as f64 > theta * home_count as f64 {
                proposals.push((
                    best_count - home_count,
                    Migration { entity: entity as NodeId, from: home, to: to as LpId },
                ));
            }
        }
    }
    proposals.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.entity.cmp(&b.1.entity)));

    let cap = map.cap(delta);
    let mut applied = Vec::new();
    for (_, m) in proposals {
        if map.populations()[m.to as usize] < cap {
            map.move_entity(m.entity, m.to);
            applied.push(m);
        }
    }
    applied
}
