//! Brute-force reference implementations used by the integration tests.
//!
//! Everything here works straight from the definitions: renamings are found
//! by trying every bijection, and `∼` classes are their orbits.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use coordsolve_core::rational::qi;
use coordsolve_core::symmetry::Renaming;
use coordsolve_core::{ChoiceId, Profile, Stage, WlcGame, Q};

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn image(swap: bool, perms: &[Vec<usize>; 2], t: &[usize]) -> Vec<usize> {
    let (a, b) = (perms[0][t[0]], perms[1][t[1]]);
    if swap {
        vec![b, a]
    } else {
        vec![a, b]
    }
}

/// All renamings of a two-player stage, by exhaustive search.
pub fn brute_renamings(stage: &Stage) -> Vec<Renaming> {
    let g = stage.game();
    let (l, r) = (g.counts()[0], g.counts()[1]);
    let winning: BTreeSet<Vec<usize>> = g.winning().iter().cloned().collect();
    let mut out = Vec::new();
    let swaps: &[bool] = if l == r { &[false, true] } else { &[false] };
    let (pl, pr) = (permutations(l), permutations(r));
    for &swap in swaps {
        for a in &pl {
            for b in &pr {
                let perms = [a.clone(), b.clone()];
                let keeps_w = g
                    .winning()
                    .iter()
                    .all(|t| winning.contains(&image(swap, &perms, t)));
                let keeps_h = stage
                    .history()
                    .iter()
                    .all(|p| image(swap, &perms, &p.0) == p.0);
                if keeps_w && keeps_h {
                    let target = |pl: usize| if swap { 1 - pl } else { pl };
                    let map = g
                        .all_choices()
                        .map(|c| ChoiceId::new(target(c.player), perms[c.player][c.local]))
                        .collect();
                    out.push(Renaming { swap, map });
                }
            }
        }
    }
    out.sort();
    out
}

/// Orbit classes as sorted blocks ordered by least member.
pub fn orbit_blocks(g: &WlcGame, renamings: &[Renaming]) -> Vec<Vec<ChoiceId>> {
    let all: Vec<ChoiceId> = g.all_choices().collect();
    let mut seen = BTreeSet::new();
    let mut blocks = Vec::new();
    for &c in &all {
        if seen.contains(&c) {
            continue;
        }
        let mut block: Vec<ChoiceId> = renamings.iter().map(|r| r.image(g, c)).collect();
        block.push(c);
        block.sort();
        block.dedup();
        seen.extend(block.iter().copied());
        blocks.push(block);
    }
    blocks.sort();
    blocks
}

/// Choices whose class contains nothing beyond themselves and one winning
/// partner.
pub fn brute_focal(g: &WlcGame, blocks: &[Vec<ChoiceId>]) -> Vec<ChoiceId> {
    let mut out = Vec::new();
    for c in g.all_choices() {
        let block = blocks.iter().find(|b| b.contains(&c)).unwrap();
        let partners: Vec<&ChoiceId> = block.iter().filter(|&&d| d != c).collect();
        let ok = match partners.as_slice() {
            [] => true,
            [d] => {
                d.player != c.player && {
                    let mut t = vec![0; 2];
                    t[c.player] = c.local;
                    t[d.player] = d.local;
                    g.is_winning(&t)
                }
            }
            _ => false,
        };
        if ok {
            out.push(c);
        }
    }
    out
}

/// Every stage reachable by losing profiles in at most `depth` rounds.
pub fn stages_to_depth(g: &WlcGame, depth: usize) -> Vec<Stage> {
    let arc = Arc::new(g.clone());
    let losing: Vec<Profile> = (0..g.counts()[0])
        .flat_map(|a| (0..g.counts()[1]).map(move |b| Profile::pair(a, b)))
        .filter(|p| !g.is_winning(&p.0))
        .collect();
    let mut layer = vec![Stage::initial(arc)];
    let mut out = layer.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for s in &layer {
            for p in &losing {
                next.push(s.play_round(p).unwrap());
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Exhaustive win probability of one round from two independent mixed
/// strategies given as weight vectors.
pub fn win_probability(g: &WlcGame, a: &[Q], b: &[Q]) -> Q {
    let mut total = qi(0);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if g.is_winning(&[i, j]) {
                total += x * y;
            }
        }
    }
    total
}
