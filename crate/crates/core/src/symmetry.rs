//! Renamings of two-player stages and the structure they induce.
//!
//! A renaming is a player permutation `β` plus a choice bijection `π` that
//! maps choice sets onto choice sets (following `β`), preserves the winning
//! relation, and maps every round's profile of the history to itself. The
//! renamings of a stage form a group; its orbits on choices are the
//! structural equivalence classes (`∼`).
//!
//! The group is computed as the automorphism group of a colored graph: two
//! side vertices (one per player), one vertex per choice colored by the
//! rounds it was played in, side-membership edges and winning edges. An
//! automorphism swapping the side vertices is a renaming with `β` = swap.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::canon::{canonicalize, group_closure, orbit_roots, CanonResult, ColoredGraph};
use crate::error::{Error, Result};
use crate::game::{ChoiceId, Profile, Stage, WlcGame};

const SIDE: u8 = 0;
const WIN: u8 = 1;
const MEMBER: u8 = 2;

/// A renaming of a two-player stage onto itself.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Renaming {
    /// Whether the players are exchanged.
    pub swap: bool,
    /// Image of every choice, indexed by player-major global index.
    pub map: Vec<ChoiceId>,
}

impl Renaming {
    pub fn identity(game: &WlcGame) -> Self {
        Self {
            swap: false,
            map: game.all_choices().collect(),
        }
    }

    /// The player permutation as an image list.
    pub fn beta(&self) -> [usize; 2] {
        if self.swap {
            [1, 0]
        } else {
            [0, 1]
        }
    }

    pub fn image(&self, game: &WlcGame, c: ChoiceId) -> ChoiceId {
        self.map[game.global(c)]
    }

    /// Image of a profile, re-sorted into player order.
    pub fn image_profile(&self, game: &WlcGame, p: &Profile) -> Profile {
        let mut out = vec![0; p.arity()];
        for c in p.choices() {
            let d = self.image(game, c);
            out[d.player] = d.local;
        }
        Profile(out)
    }

    pub fn compose(&self, game: &WlcGame, then: &Renaming) -> Renaming {
        Renaming {
            swap: self.swap != then.swap,
            map: self.map.iter().map(|&c| then.image(game, c)).collect(),
        }
    }

    pub fn inverse(&self, game: &WlcGame) -> Renaming {
        let mut map = self.map.clone();
        for c in game.all_choices() {
            map[game.global(self.image(game, c))] = c;
        }
        Renaming {
            swap: self.swap,
            map,
        }
    }

    /// Checks the defining conditions against a stage.
    pub fn is_renaming_of(&self, stage: &Stage) -> bool {
        let g = stage.game();
        let mut seen = vec![false; g.total_choices()];
        for c in g.all_choices() {
            let d = self.image(g, c);
            if d.player != self.beta()[c.player] || d.local >= g.choice_count(d.player) {
                return false;
            }
            let i = g.global(d);
            if seen[i] {
                return false;
            }
            seen[i] = true;
        }
        g.winning()
            .iter()
            .all(|t| g.is_winning(&self.image_profile(g, &Profile(t.clone())).0))
            && stage
                .history()
                .iter()
                .all(|p| self.image_profile(g, p) == *p)
    }
}

/// Partition of all choices of a stage into `∼` classes.
///
/// Blocks are sorted internally and ordered by their least member
/// (player-major), so equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EquivPartition {
    pub blocks: Vec<Vec<ChoiceId>>,
}

impl EquivPartition {
    pub fn from_blocks(mut blocks: Vec<Vec<ChoiceId>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort();
        }
        blocks.sort();
        Self { blocks }
    }

    pub fn block_of(&self, c: ChoiceId) -> &[ChoiceId] {
        self.blocks
            .iter()
            .find(|b| b.contains(&c))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn same_block(&self, a: ChoiceId, b: ChoiceId) -> bool {
        self.block_of(a).contains(&b)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks as sorted global-index lists.
    pub fn index_blocks(&self, game: &WlcGame) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&c| game.global(c)).collect())
            .collect()
    }
}

impl fmt::Display for EquivPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str("{")?;
            for (j, c) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Canonical encoding of a stage up to structural similarity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StageClassKey(pub Vec<u32>);

impl fmt::Display for StageClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{x:x}")?;
        }
        Ok(())
    }
}

/// Bare game graph: vertices 0 and 1 are the players, choice `g` is vertex
/// `2 + g`. Choice colors are supplied by the caller.
fn game_graph(game: &WlcGame, choice_color: impl Fn(ChoiceId) -> u32) -> ColoredGraph {
    let mut colors = vec![0u32, 0u32];
    colors.extend(game.all_choices().map(|c| 1 + choice_color(c)));
    let mut g = ColoredGraph::new(colors);
    for c in game.all_choices() {
        g.add_edge(c.player, 2 + game.global(c), SIDE);
    }
    let off = game.offset(1);
    for t in game.winning() {
        g.add_edge(2 + t[0], 2 + off + t[1], WIN);
    }
    g
}

/// Generators, order and orbit partition of a stage's renaming group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageSymmetry {
    pub generators: Vec<Renaming>,
    pub order: u128,
    pub partition: EquivPartition,
    pub has_swap: bool,
    canon: CanonResult,
}

impl StageSymmetry {
    /// Canonical position of each choice (global index) in the stage graph.
    pub fn canonical_positions(&self) -> Vec<usize> {
        let pos = self.canon.positions();
        pos[2..].to_vec()
    }
}

fn to_renaming(game: &WlcGame, gamma: &[usize]) -> Renaming {
    Renaming {
        swap: gamma[0] == 1,
        map: (0..game.total_choices())
            .map(|g| game.from_global(gamma[2 + g] - 2))
            .collect(),
    }
}

/// Per-choice color: rank of the set of rounds in which it was played.
fn round_colors(stage: &Stage) -> Vec<u32> {
    let game = stage.game();
    let mut rounds: Vec<Vec<usize>> = vec![Vec::new(); game.total_choices()];
    for (k, p) in stage.history().iter().enumerate() {
        for c in p.choices() {
            rounds[game.global(c)].push(k);
        }
    }
    let distinct: BTreeSet<&Vec<usize>> = rounds.iter().collect();
    let rank: BTreeMap<&Vec<usize>, u32> =
        distinct.into_iter().enumerate().map(|(i, r)| (r, i as u32)).collect();
    rounds.iter().map(|r| rank[r]).collect()
}

pub fn stage_symmetry(stage: &Stage) -> Result<StageSymmetry> {
    let game = stage.game();
    game.require_two_players()?;
    let colors = round_colors(stage);
    let graph = game_graph(game, |c| colors[game.global(c)]);
    let canon = canonicalize(&graph);
    let generators: Vec<Renaming> = canon
        .generators
        .iter()
        .map(|g| to_renaming(game, g))
        .collect();
    let has_swap = canon.orbits[1] == 0;
    let mut blocks: BTreeMap<usize, Vec<ChoiceId>> = BTreeMap::new();
    for c in game.all_choices() {
        blocks
            .entry(canon.orbits[2 + game.global(c)])
            .or_default()
            .push(c);
    }
    Ok(StageSymmetry {
        generators,
        order: canon.group_order,
        partition: EquivPartition::from_blocks(blocks.into_values().collect()),
        has_swap,
        canon,
    })
}

/// Every renaming of the stage. Fails with `LimitExceeded` past `limit`
/// elements.
pub fn renaming_group_limited(stage: &Stage, limit: usize) -> Result<Vec<Renaming>> {
    let game = stage.game();
    let sym = stage_symmetry(stage)?;
    let n = 2 + game.total_choices();
    let gens: Vec<Vec<usize>> = sym.canon.generators.clone();
    let all = group_closure(n, &gens, limit).ok_or_else(|| {
        Error::LimitExceeded(format!("renaming group has more than {limit} elements"))
    })?;
    let mut out: Vec<Renaming> = all.iter().map(|g| to_renaming(game, g)).collect();
    out.sort();
    Ok(out)
}

pub fn renaming_group(stage: &Stage) -> Result<Vec<Renaming>> {
    renaming_group_limited(stage, 1_000_000)
}

pub fn equiv_partition(stage: &Stage) -> Result<EquivPartition> {
    Ok(stage_symmetry(stage)?.partition)
}

/// Canonical key of (game, partition): equal exactly for structurally
/// similar stages.
pub fn partition_key(game: &WlcGame, partition: &EquivPartition) -> StageClassKey {
    let mut g = game_graph(game, |_| 0);
    for b in &partition.blocks {
        let v = g.add_vertex(2);
        for &c in b {
            g.add_edge(v, 2 + game.global(c), MEMBER);
        }
    }
    StageClassKey(canonicalize(&g).form)
}

pub fn canonical_key(stage: &Stage) -> Result<StageClassKey> {
    let p = equiv_partition(stage)?;
    Ok(partition_key(stage.game(), &p))
}

pub fn similar(a: &Stage, b: &Stage) -> Result<bool> {
    Ok(canonical_key(a)? == canonical_key(b)?)
}

/// Canonical key of a game together with a set of marked profiles, up to
/// renamings of the bare game (which may permute the profiles).
pub fn profile_set_key(game: &WlcGame, profiles: &[Profile]) -> StageClassKey {
    let mut g = game_graph(game, |_| 0);
    let off = game.offset(1);
    for p in profiles {
        let v = g.add_vertex(2);
        g.add_edge(v, 2 + p.0[0], MEMBER);
        g.add_edge(v, 2 + off + p.0[1], MEMBER);
    }
    StageClassKey(canonicalize(&g).form)
}

/// Profiles mapped to themselves by every renaming of the stage. The
/// renaming group is exactly the stabilizer of this set, profile by profile.
pub fn fixed_profiles(stage: &Stage, sym: &StageSymmetry) -> Vec<Profile> {
    let game = stage.game();
    let mut out = Vec::new();
    for a in 0..game.choice_count(0) {
        for b in 0..game.choice_count(1) {
            let p = Profile::pair(a, b);
            if sym.generators.iter().all(|r| r.image_profile(game, &p) == p) {
                out.push(p);
            }
        }
    }
    out
}

/// Choices that are equivalent to nothing outside one of their own
/// winning pairs.
pub fn focal_points_of(game: &WlcGame, partition: &EquivPartition) -> Vec<ChoiceId> {
    let mut out = Vec::new();
    for c in game.all_choices() {
        let block = partition.block_of(c);
        let focal = match block.len() {
            1 => true,
            2 => {
                let d = if block[0] == c { block[1] } else { block[0] };
                d.player != c.player && game.neighbors(c).contains(&d.local)
            }
            _ => false,
        };
        if focal {
            out.push(c);
        }
    }
    out
}

pub fn focal_points(stage: &Stage) -> Result<Vec<ChoiceId>> {
    let p = equiv_partition(stage)?;
    Ok(focal_points_of(stage.game(), &p))
}

/// Conjugate pairs of a choice matching stage: same-player `u`, `u′` on
/// winning pairs `(u,v)`, `(u′,v′)` with `u ∼ v′` and `u′ ∼ v`.
pub fn conjugates(stage: &Stage) -> Result<Vec<(ChoiceId, ChoiceId)>> {
    let game = stage.game();
    game.require_two_players()?;
    if !game.is_choice_matching() {
        return Err(Error::NotAChoiceMatchingGame);
    }
    let part = equiv_partition(stage)?;
    let w = game.winning();
    let mut out = Vec::new();
    for (i, e) in w.iter().enumerate() {
        for f in &w[i + 1..] {
            let (u, v) = (ChoiceId::new(0, e[0]), ChoiceId::new(1, e[1]));
            let (u2, v2) = (ChoiceId::new(0, f[0]), ChoiceId::new(1, f[1]));
            if part.same_block(u, v2) && part.same_block(u2, v) {
                out.push((u, u2));
                out.push((v.min(v2), v.max(v2)));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Side parts `(K₁, K₂)` of `∼` classes with `K₁ × K₂ ⊆ W`, if any: a
/// structural protocol can then guarantee coordination next round.
///
/// When some renaming swaps the players, both players' distributions are
/// tied through it, so both parts must come from one class.
pub fn one_round_solvable(stage: &Stage) -> Result<Option<(Vec<ChoiceId>, Vec<ChoiceId>)>> {
    let sym = stage_symmetry(stage)?;
    Ok(solvable_in(stage.game(), &sym))
}

pub(crate) fn solvable_in(
    game: &WlcGame,
    sym: &StageSymmetry,
) -> Option<(Vec<ChoiceId>, Vec<ChoiceId>)> {
    let side = |b: &[ChoiceId], p: usize| -> Vec<ChoiceId> {
        b.iter().copied().filter(|c| c.player == p).collect()
    };
    let complete = |k1: &[ChoiceId], k2: &[ChoiceId]| {
        k1.iter()
            .all(|a| k2.iter().all(|b| game.is_winning(&[a.local, b.local])))
    };
    let blocks = &sym.partition.blocks;
    if sym.has_swap {
        for b in blocks {
            let (k1, k2) = (side(b, 0), side(b, 1));
            if !k1.is_empty() && !k2.is_empty() && complete(&k1, &k2) {
                return Some((k1, k2));
            }
        }
        return None;
    }
    for b1 in blocks.iter().filter(|b| b[0].player == 0) {
        for b2 in blocks.iter().filter(|b| b[0].player == 1) {
            if complete(b1, b2) {
                return Some((b1.clone(), b2.clone()));
            }
        }
    }
    None
}

/// The same stage with choices permuted within each player and, if `swap`,
/// the players exchanged. `perms[p][l]` is the new local index of `(p, l)`.
pub fn relabel_stage(stage: &Stage, swap: bool, perms: &[Vec<usize>; 2]) -> Result<Stage> {
    let game = stage.game();
    game.require_two_players()?;
    let img = |t: &[usize]| -> Vec<usize> {
        let a = perms[0][t[0]];
        let b = perms[1][t[1]];
        if swap {
            vec![b, a]
        } else {
            vec![a, b]
        }
    };
    let counts = if swap {
        vec![game.counts()[1], game.counts()[0]]
    } else {
        game.counts().to_vec()
    };
    let g2 = WlcGame::new(counts, game.winning().iter().map(|t| img(t)))?;
    let hist = stage.history().iter().map(|p| Profile(img(&p.0))).collect();
    Stage::with_history(alloc::sync::Arc::new(g2), hist)
}

/// Orbits of a set of renamings, as a partition (used by tests and oracles).
pub fn orbits_of(game: &WlcGame, renamings: &[Renaming]) -> EquivPartition {
    let maps: Vec<Vec<usize>> = renamings
        .iter()
        .map(|r| r.map.iter().map(|&c| game.global(c)).collect())
        .collect();
    let roots = orbit_roots(game.total_choices(), &maps);
    let mut blocks: BTreeMap<usize, Vec<ChoiceId>> = BTreeMap::new();
    for c in game.all_choices() {
        blocks.entry(roots[game.global(c)]).or_default().push(c);
    }
    EquivPartition::from_blocks(blocks.into_values().collect())
}

/// Short text form of a stage's symmetry for diagnostics.
pub fn describe(stage: &Stage) -> Result<String> {
    let sym = stage_symmetry(stage)?;
    Ok(format!("|G| = {}, classes: {}", sym.order, sym.partition))
}
