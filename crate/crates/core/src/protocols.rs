//! Structural protocols: from a stage and a player to an exact distribution
//! over that player's choices.
//!
//! Built-ins are wait-or-move (WM), loop avoidance (LA), uniform play, and
//! the touched-edge family `TOUCHED(p)`. `TABLE` protocols assign
//! distributions per stage class and optionally fall back to a built-in.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{ChoiceId, Profile, Stage};
use crate::rational::{parse_q, qi, Q};
use crate::symmetry::{
    canonical_key, focal_points_of, partition_key, stage_symmetry, EquivPartition, StageSymmetry,
};

/// Exact distribution over one player's choices, indexed by local index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    pub player: usize,
    pub weights: Vec<Q>,
}

impl Distribution {
    pub fn uniform_over(player: usize, size: usize, support: &[usize]) -> Self {
        let mut weights = vec![Q::zero(); size];
        let w = Q::new(1.into(), (support.len() as i64).into());
        for &l in support {
            weights[l] = w.clone();
        }
        Self { player, weights }
    }

    pub fn uniform(player: usize, size: usize) -> Self {
        let all: Vec<usize> = (0..size).collect();
        Self::uniform_over(player, size, &all)
    }

    /// `mass_a` spread evenly over `a`, the rest evenly over `b`.
    fn split(player: usize, size: usize, a: &[usize], mass_a: &Q, b: &[usize]) -> Self {
        let mut weights = vec![Q::zero(); size];
        let mass_b = Q::one() - mass_a;
        for (set, mass) in [(a, mass_a), (b, &mass_b)] {
            if !set.is_empty() {
                let w = mass / qi(set.len() as i64);
                for &l in set {
                    weights[l] += w.clone();
                }
            }
        }
        Self { player, weights }
    }

    pub fn get(&self, local: usize) -> &Q {
        &self.weights[local]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&l| !self.weights[l].is_zero())
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.weights.iter().all(|w| *w >= Q::zero())
            && self.weights.iter().fold(Q::zero(), |a, w| a + w) == Q::one()
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in self.support() {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}:{}", ChoiceId::new(self.player, l), self.weights[l])?;
        }
        Ok(())
    }
}

/// Per-class distributions, keyed by the printed `StageClassKey` (or the
/// literal `"initial"` for the empty history), then player, then local
/// choice index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableProtocol {
    pub entries: BTreeMap<String, BTreeMap<usize, BTreeMap<usize, Q>>>,
    pub fallback: Option<Box<ProtocolSpec>>,
}

impl TableProtocol {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a row; weights are given as `"num/den"` strings or decimals.
    pub fn insert(&mut self, key: &str, player: usize, weights: &[(usize, &str)]) -> Result<()> {
        let row = self
            .entries
            .entry(key.to_string())
            .or_default()
            .entry(player)
            .or_default();
        for &(l, w) in weights {
            row.insert(l, parse_q(w)?);
        }
        Ok(())
    }

    pub fn insert_q(&mut self, key: &str, player: usize, weights: &[(usize, Q)]) {
        let row = self
            .entries
            .entry(key.to_string())
            .or_default()
            .entry(player)
            .or_default();
        for (l, w) in weights {
            row.insert(*l, w.clone());
        }
    }

    pub fn with_fallback(mut self, p: ProtocolSpec) -> Self {
        self.fallback = Some(Box::new(p));
        self
    }
}

/// Which stage features a protocol's behavior depends on. Used to choose
/// the Markov chain state abstraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dependence {
    /// Behavior is the same in every stage.
    Nothing,
    /// Behavior depends only on the renaming group of the stage.
    RenamingGroup,
    /// Behavior depends on the set of profiles played so far.
    ProfileSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProtocolSpec {
    Wm,
    La,
    Uniform,
    Touched(Q),
    Table(Arc<TableProtocol>),
}

impl ProtocolSpec {
    pub fn touched(p: Q) -> Result<Self> {
        if p < Q::zero() || p > Q::one() {
            return Err(Error::DomainError(format!("TOUCHED parameter {p} is outside [0,1]")));
        }
        Ok(ProtocolSpec::Touched(p))
    }

    /// Parses `wm`, `la`, `uniform` or `touched:p`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t.to_ascii_lowercase().as_str() {
            "wm" => Ok(ProtocolSpec::Wm),
            "la" => Ok(ProtocolSpec::La),
            "uniform" => Ok(ProtocolSpec::Uniform),
            lower => match lower.strip_prefix("touched:") {
                Some(p) => Self::touched(parse_q(p)?),
                None => Err(Error::InvalidArgument(format!("unknown protocol {t:?}"))),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            ProtocolSpec::Wm => "WM".into(),
            ProtocolSpec::La => "LA".into(),
            ProtocolSpec::Uniform => "UNIFORM".into(),
            ProtocolSpec::Touched(p) => format!("TOUCHED({p})"),
            ProtocolSpec::Table(t) => match &t.fallback {
                Some(f) => format!("TABLE+{}", f.name()),
                None => "TABLE".into(),
            },
        }
    }

    /// Whether the protocol claims to factor through the similarity
    /// quotient. The claim is verified during chain construction.
    pub fn similarity_invariant(&self) -> bool {
        true
    }

    pub fn dependence(&self) -> Dependence {
        match self {
            ProtocolSpec::Uniform => Dependence::Nothing,
            ProtocolSpec::La => Dependence::RenamingGroup,
            _ => Dependence::ProfileSet,
        }
    }
}

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A stage with lazily computed symmetry data, shared by both players'
/// evaluations.
#[derive(Debug)]
pub struct StageView<'a> {
    pub stage: &'a Stage,
    sym: OnceCell<StageSymmetry>,
}

impl<'a> StageView<'a> {
    pub fn new(stage: &'a Stage) -> Self {
        Self {
            stage,
            sym: OnceCell::new(),
        }
    }

    pub fn symmetry(&self) -> Result<&StageSymmetry> {
        if let Some(s) = self.sym.get() {
            return Ok(s);
        }
        let s = stage_symmetry(self.stage)?;
        Ok(self.sym.get_or_init(|| s))
    }

    pub fn partition(&self) -> Result<&EquivPartition> {
        Ok(&self.symmetry()?.partition)
    }
}

fn check_stage(stage: &Stage, player: usize) -> Result<()> {
    if stage.is_final() {
        return Err(Error::FinalStage);
    }
    if player >= stage.game().n_players() {
        return Err(Error::InvalidArgument(format!("no player {}", player + 1)));
    }
    Ok(())
}

pub fn evaluate(p: &ProtocolSpec, stage: &Stage, player: usize) -> Result<Distribution> {
    evaluate_in(p, &StageView::new(stage), player)
}

/// Both players' distributions, sharing symmetry computations.
pub fn evaluate_all(p: &ProtocolSpec, stage: &Stage) -> Result<Vec<Distribution>> {
    let view = StageView::new(stage);
    (0..stage.game().n_players())
        .map(|i| evaluate_in(p, &view, i))
        .collect()
}

pub fn evaluate_in(p: &ProtocolSpec, view: &StageView<'_>, player: usize) -> Result<Distribution> {
    let stage = view.stage;
    check_stage(stage, player)?;
    let size = stage.game().choice_count(player);
    if let ProtocolSpec::Uniform = p {
        return Ok(Distribution::uniform(player, size));
    }
    stage.game().require_two_players()?;
    match p {
        ProtocolSpec::Uniform => unreachable!(),
        ProtocolSpec::Wm => Ok(wait_or_move(stage, player)),
        ProtocolSpec::La => loop_avoidance(view, player),
        ProtocolSpec::Touched(q) => touched(view, player, q),
        ProtocolSpec::Table(t) => table(t, view, player),
    }
}

fn wait_or_move(stage: &Stage, player: usize) -> Distribution {
    let game = stage.game();
    let size = game.choice_count(player);
    if stage.rounds() == 0 {
        return Distribution::uniform(player, size);
    }
    let played = stage.played_sets();
    let other = 1 - player;
    match (played[player].len(), played[other].len()) {
        (1, 1) => {
            let own = played[player][0];
            let theirs = ChoiceId::new(other, played[other][0]);
            let movers = game.neighbors(theirs);
            Distribution::split(player, size, &[own], &Q::new(1.into(), 2.into()), movers)
        }
        (2, 2) => Distribution::uniform_over(player, size, &played[player]),
        // not reachable when both players follow WM
        _ => Distribution::uniform(player, size),
    }
}

/// Own choices that could, for some opponent reply, lead to a non-final
/// stage with the current partition.
pub fn la_avoided(view: &StageView<'_>, player: usize) -> Result<Vec<usize>> {
    let stage = view.stage;
    let game = stage.game();
    let current = view.partition()?;
    let other = 1 - player;
    let mut avoided = Vec::new();
    for c in 0..game.choice_count(player) {
        for d in 0..game.choice_count(other) {
            let mut prof = vec![0; 2];
            prof[player] = c;
            prof[other] = d;
            if game.is_winning(&prof) {
                continue;
            }
            let next = stage.play_round(&Profile(prof))?;
            if stage_symmetry(&next)?.partition == *current {
                avoided.push(c);
                break;
            }
        }
    }
    Ok(avoided)
}

fn loop_avoidance(view: &StageView<'_>, player: usize) -> Result<Distribution> {
    let size = view.stage.game().choice_count(player);
    let avoided = la_avoided(view, player)?;
    let allowed: Vec<usize> = (0..size).filter(|l| !avoided.contains(l)).collect();
    Ok(if allowed.is_empty() {
        Distribution::uniform(player, size)
    } else {
        Distribution::uniform_over(player, size, &allowed)
    })
}

/// Winning pairs both of whose endpoints are focal points whose classes lie
/// inside the pair. Each is listed with its player-1 choice first.
pub fn focal_edges(view: &StageView<'_>) -> Result<Vec<(ChoiceId, ChoiceId)>> {
    let game = view.stage.game();
    let part = view.partition()?;
    let focal = focal_points_of(game, part);
    let mut out = Vec::new();
    for &u in focal.iter().filter(|c| c.player == 0) {
        for &v in focal.iter().filter(|c| c.player == 1) {
            if !game.is_winning(&[u.local, v.local]) {
                continue;
            }
            let inside = |c: ChoiceId| part.block_of(c).iter().all(|&x| x == u || x == v);
            if inside(u) && inside(v) {
                out.push((u, v));
            }
        }
    }
    Ok(out)
}

fn touched(view: &StageView<'_>, player: usize, q: &Q) -> Result<Distribution> {
    let stage = view.stage;
    let game = stage.game();
    let size = game.choice_count(player);
    let edges = focal_edges(view)?;
    if !edges.is_empty() {
        let sym = view.symmetry()?;
        let pos = sym.canonical_positions();
        let rank = |c: ChoiceId| pos[game.global(c)];
        let &(u, v) = edges
            .iter()
            // edges may share an endpoint, so compare both ranks
            .min_by_key(|(u, v)| {
                let (a, b) = (rank(*u), rank(*v));
                (a.min(b), a.max(b))
            })
            .expect("nonempty");
        let mine = if player == 0 { u } else { v };
        return Ok(Distribution::uniform_over(player, size, &[mine.local]));
    }
    let mut on_touched = vec![false; size];
    for t in stage.touched_edges() {
        on_touched[t[player]] = true;
    }
    let t: Vec<usize> = (0..size).filter(|&l| on_touched[l]).collect();
    let u: Vec<usize> = (0..size).filter(|&l| !on_touched[l]).collect();
    Ok(match (t.is_empty(), u.is_empty()) {
        (true, _) => Distribution::uniform_over(player, size, &u),
        (_, true) => Distribution::uniform_over(player, size, &t),
        _ => Distribution::split(player, size, &t, q, &u),
    })
}

fn table(t: &TableProtocol, view: &StageView<'_>, player: usize) -> Result<Distribution> {
    let stage = view.stage;
    let size = stage.game().choice_count(player);
    let key = partition_key(stage.game(), view.partition()?).to_string();
    let row = t
        .entries
        .get(&key)
        .or_else(|| (stage.rounds() == 0).then(|| t.entries.get("initial")).flatten());
    let Some(row) = row else {
        return match &t.fallback {
            Some(f) => evaluate_in(f, view, player),
            None => Err(Error::TableMiss(key)),
        };
    };
    let Some(weights) = row.get(&player) else {
        return Err(Error::TableMiss(format!("{key} (player {})", player + 1)));
    };
    let mut d = Distribution {
        player,
        weights: vec![Q::zero(); size],
    };
    for (&l, w) in weights {
        if l >= size {
            return Err(Error::InvalidArgument(format!(
                "table entry for player {} names choice {l} of {size}",
                player + 1
            )));
        }
        d.weights[l] = w.clone();
    }
    if !d.is_valid() {
        return Err(Error::InvalidArgument(format!(
            "table distribution for player {} at {key} is not a probability distribution",
            player + 1
        )));
    }
    Ok(d)
}

/// Whether the protocol's distributions commute with every renaming of the
/// stage (checking generators suffices).
pub fn check_structurality(p: &ProtocolSpec, stage: &Stage) -> Result<bool> {
    let view = StageView::new(stage);
    let game = stage.game();
    let dists = match (0..2).map(|i| evaluate_in(p, &view, i)).collect::<Result<Vec<_>>>() {
        Ok(d) => d,
        Err(Error::TableMiss(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let sym = view.symmetry()?;
    for r in &sym.generators {
        for c in game.all_choices() {
            let d = r.image(game, c);
            if dists[c.player].get(c.local) != dists[d.player].get(d.local) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Positive-probability profiles of the next round under independent play.
pub fn support_profiles(p: &ProtocolSpec, stage: &Stage) -> Result<Vec<(Profile, Q)>> {
    let dists = evaluate_all(p, stage)?;
    Ok(product(&dists))
}

pub fn product(dists: &[Distribution]) -> Vec<(Profile, Q)> {
    let mut out = vec![(Vec::new(), Q::one())];
    for d in dists {
        let mut next = Vec::new();
        for (prefix, w) in &out {
            for l in d.support() {
                let mut p = prefix.clone();
                p.push(l);
                next.push((p, w * d.get(l)));
            }
        }
        out = next;
    }
    out.into_iter().map(|(p, w)| (Profile(p), w)).collect()
}

/// Stage-class key string used by table protocols for this stage.
pub fn table_key(stage: &Stage) -> Result<String> {
    Ok(canonical_key(stage)?.to_string())
}
