//! Win-lose coordination games and stages of their repeated play.
//!
//! Choices are identified positionally by `(player, local)`; labels are
//! cosmetic. Players are numbered from zero internally and printed from one
//! (`a1` is the first choice of the first player).

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChoiceId {
    pub player: usize,
    pub local: usize,
}

impl ChoiceId {
    pub const fn new(player: usize, local: usize) -> Self {
        Self { player, local }
    }
}

/// Bijective base-26 letters: 0 -> a, 25 -> z, 26 -> aa.
pub(crate) fn letters(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap_or_default()
}

impl fmt::Display for ChoiceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", letters(self.local), self.player + 1)
    }
}

/// One choice per player, as local indices in player order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile(pub Vec<usize>);

impl Profile {
    pub fn new(choices: impl Into<Vec<usize>>) -> Self {
        Self(choices.into())
    }

    pub fn pair(a: usize, b: usize) -> Self {
        Self(vec![a, b])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn choice(&self, player: usize) -> ChoiceId {
        ChoiceId::new(player, self.0[player])
    }

    pub fn choices(&self) -> impl Iterator<Item = ChoiceId> + '_ {
        self.0.iter().enumerate().map(|(p, &l)| ChoiceId::new(p, l))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.choices().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// An n-player win-lose coordination game.
///
/// Invariants (checked by every constructor): at least one player, every
/// choice set nonempty, the winning relation nonempty, and every choice
/// occurs in some winning tuple. Winning tuples are kept sorted so that
/// serialized output is reproducible.
#[derive(Clone, Debug)]
pub struct WlcGame {
    counts: Vec<usize>,
    winning: Vec<Vec<usize>>,
    labels: Option<Vec<Vec<String>>>,
    // two-player adjacency: adj[p][local] = sorted opponent locals
    adj: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for WlcGame {
    fn eq(&self, other: &Self) -> bool {
        self.counts == other.counts && self.winning == other.winning
    }
}

impl Eq for WlcGame {}

impl WlcGame {
    pub fn new(counts: Vec<usize>, winning: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut winning: Vec<Vec<usize>> = winning.into_iter().collect();
        winning.sort();
        winning.dedup();
        let spec = GameSpec::unlabeled(&counts, winning.clone());
        let report = validate(&spec);
        if let Some(v) = report.violations.into_iter().next() {
            return Err(v.into_error());
        }
        let adj = if counts.len() == 2 {
            let mut adj = vec![vec![Vec::new(); counts[0]], vec![Vec::new(); counts[1]]];
            for t in &winning {
                adj[0][t[0]].push(t[1]);
                adj[1][t[1]].push(t[0]);
            }
            for side in adj.iter_mut() {
                for list in side.iter_mut() {
                    list.sort_unstable();
                }
            }
            adj
        } else {
            Vec::new()
        };
        Ok(Self {
            counts,
            winning,
            labels: None,
            adj,
        })
    }

    /// Two-player game from a list of winning pairs.
    pub fn bipartite(left: usize, right: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(vec![left, right], edges.iter().map(|&(a, b)| vec![a, b]))
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        let spec = GameSpec {
            choices: labels.clone(),
            winning: self.winning.clone(),
        };
        let report = validate(&spec);
        if let Some(v) = report.violations.into_iter().next() {
            return Err(v.into_error());
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_players(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn choice_count(&self, player: usize) -> usize {
        self.counts[player]
    }

    pub fn total_choices(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Size of the larger choice set (an m-choice game has `max_choices() == m`).
    pub fn max_choices(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn winning(&self) -> &[Vec<usize>] {
        &self.winning
    }

    pub fn is_winning(&self, tuple: &[usize]) -> bool {
        self.winning.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok()
    }

    pub fn choices(&self, player: usize) -> impl Iterator<Item = ChoiceId> {
        (0..self.counts[player]).map(move |l| ChoiceId::new(player, l))
    }

    pub fn all_choices(&self) -> impl Iterator<Item = ChoiceId> + '_ {
        (0..self.n_players()).flat_map(move |p| self.choices(p))
    }

    pub fn offset(&self, player: usize) -> usize {
        self.counts[..player].iter().sum()
    }

    /// Player-major global index of a choice.
    pub fn global(&self, c: ChoiceId) -> usize {
        self.offset(c.player) + c.local
    }

    pub fn from_global(&self, mut g: usize) -> ChoiceId {
        for (p, &n) in self.counts.iter().enumerate() {
            if g < n {
                return ChoiceId::new(p, g);
            }
            g -= n;
        }
        panic!("global choice index out of range")
    }

    pub fn label(&self, c: ChoiceId) -> String {
        match &self.labels {
            Some(l) => l[c.player][c.local].clone(),
            None => c.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    /// Opponent choices that win together with `c` (two-player games).
    pub fn neighbors(&self, c: ChoiceId) -> &[usize] {
        &self.adj[c.player][c.local]
    }

    pub fn degree(&self, c: ChoiceId) -> usize {
        if self.n_players() == 2 {
            self.neighbors(c).len()
        } else {
            self.winning.iter().filter(|t| t[c.player] == c.local).count()
        }
    }

    /// Degree sequence per player, each sorted descending.
    pub fn degree_multiset(&self) -> Vec<Vec<usize>> {
        (0..self.n_players())
            .map(|p| {
                let mut d: Vec<usize> = self.choices(p).map(|c| self.degree(c)).collect();
                d.sort_unstable_by(|a, b| b.cmp(a));
                d
            })
            .collect()
    }

    pub fn require_two_players(&self) -> Result<()> {
        if self.n_players() == 2 {
            Ok(())
        } else {
            Err(Error::UnsupportedPlayerCount(self.n_players()))
        }
    }

    /// True for `CM(m)`: two players, equal choice counts, a perfect matching.
    pub fn is_choice_matching(&self) -> bool {
        self.n_players() == 2
            && self.counts[0] == self.counts[1]
            && self.winning.len() == self.counts[0]
            && self.all_choices().all(|c| self.degree(c) == 1)
    }

    /// Number of cells in the full product of the choice sets.
    pub fn product_size(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn validate(&self) -> ValidationReport {
        let choices = match &self.labels {
            Some(l) => l.clone(),
            None => default_labels(&self.counts),
        };
        validate(&GameSpec {
            choices,
            winning: self.winning.clone(),
        })
    }
}

fn default_labels(counts: &[usize]) -> Vec<Vec<String>> {
    counts
        .iter()
        .enumerate()
        .map(|(p, &n)| (0..n).map(|l| ChoiceId::new(p, l).to_string()).collect())
        .collect()
}

/// Complement: the full product minus the winning relation.
pub fn complement(g: &WlcGame) -> Result<WlcGame> {
    let mut all = Vec::new();
    let mut cur = vec![0usize; g.n_players()];
    'outer: loop {
        if !g.is_winning(&cur) {
            all.push(cur.clone());
        }
        for p in (0..cur.len()).rev() {
            cur[p] += 1;
            if cur[p] < g.counts[p] {
                continue 'outer;
            }
            cur[p] = 0;
        }
        break;
    }
    if all.is_empty() {
        return Err(Error::EmptyComplement);
    }
    let mut used: Vec<Vec<bool>> = g.counts.iter().map(|&n| vec![false; n]).collect();
    for t in &all {
        for (p, &l) in t.iter().enumerate() {
            used[p][l] = true;
        }
    }
    for (p, row) in used.iter().enumerate() {
        if let Some(l) = row.iter().position(|&u| !u) {
            return Err(Error::SurelyLosingChoice(ChoiceId::new(p, l)));
        }
    }
    WlcGame::new(g.counts.clone(), all)
}

/// An unchecked game description with named choices, as read from a file or
/// built by hand. Labels are the identities here, so a label shared by two
/// players violates disjointness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameSpec {
    pub choices: Vec<Vec<String>>,
    pub winning: Vec<Vec<usize>>,
}

impl GameSpec {
    pub fn unlabeled(counts: &[usize], winning: Vec<Vec<usize>>) -> Self {
        Self {
            choices: default_labels(counts),
            winning,
        }
    }

    pub fn build(&self) -> Result<WlcGame> {
        let counts = self.choices.iter().map(Vec::len).collect();
        WlcGame::new(counts, self.winning.clone())?.with_labels(self.choices.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoPlayers,
    EmptyChoiceSet { player: usize },
    DisjointnessViolation { label: String, players: (usize, usize) },
    EmptyWinningRelation,
    TupleArity { tuple: usize, expected: usize, got: usize },
    IndexOutOfRange { tuple: usize, player: usize, index: usize },
    SurelyLosingChoice(ChoiceId),
}

impl Violation {
    fn into_error(self) -> Error {
        match self {
            Violation::SurelyLosingChoice(c) => Error::SurelyLosingChoice(c),
            other => Error::InvalidGame(other.to_string()),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPlayers => f.write_str("game has no players"),
            Violation::EmptyChoiceSet { player } => {
                write!(f, "player {} has no choices", player + 1)
            }
            Violation::DisjointnessViolation { label, players } => write!(
                f,
                "choice {label:?} belongs to players {} and {}",
                players.0 + 1,
                players.1 + 1
            ),
            Violation::EmptyWinningRelation => f.write_str("winning relation is empty"),
            Violation::TupleArity { tuple, expected, got } => {
                write!(f, "winning tuple {tuple} has {got} entries, expected {expected}")
            }
            Violation::IndexOutOfRange { tuple, player, index } => write!(
                f,
                "winning tuple {tuple} uses choice {index} of player {}, which does not exist",
                player + 1
            ),
            Violation::SurelyLosingChoice(c) => write!(f, "choice {c} occurs in no winning tuple"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every game invariant and lists each violation found.
pub fn validate(spec: &GameSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let n = spec.choices.len();
    if n == 0 {
        violations.push(Violation::NoPlayers);
    }
    for (p, set) in spec.choices.iter().enumerate() {
        if set.is_empty() {
            violations.push(Violation::EmptyChoiceSet { player: p });
        }
    }
    let mut owner: alloc::collections::BTreeMap<&str, usize> = Default::default();
    let mut reported = BTreeSet::new();
    for (p, set) in spec.choices.iter().enumerate() {
        for label in set {
            match owner.get(label.as_str()) {
                Some(&q) if q != p => {
                    if reported.insert(label.as_str()) {
                        violations.push(Violation::DisjointnessViolation {
                            label: label.clone(),
                            players: (q, p),
                        });
                    }
                }
                Some(_) => {}
                None => {
                    owner.insert(label.as_str(), p);
                }
            }
        }
    }
    if spec.winning.is_empty() {
        violations.push(Violation::EmptyWinningRelation);
    }
    let mut used: Vec<Vec<bool>> = spec.choices.iter().map(|s| vec![false; s.len()]).collect();
    for (ti, t) in spec.winning.iter().enumerate() {
        if t.len() != n {
            violations.push(Violation::TupleArity {
                tuple: ti,
                expected: n,
                got: t.len(),
            });
            continue;
        }
        let mut ok = true;
        for (p, &l) in t.iter().enumerate() {
            if l >= spec.choices[p].len() {
                violations.push(Violation::IndexOutOfRange {
                    tuple: ti,
                    player: p,
                    index: l,
                });
                ok = false;
            }
        }
        if ok {
            for (p, &l) in t.iter().enumerate() {
                used[p][l] = true;
            }
        }
    }
    for (p, row) in used.iter().enumerate() {
        for (l, &u) in row.iter().enumerate() {
            if !u {
                violations.push(Violation::SurelyLosingChoice(ChoiceId::new(p, l)));
            }
        }
    }
    ValidationReport { violations }
}

/// A game together with the ordered history of profiles played so far.
///
/// Only the last profile of a history may be winning; a stage whose last
/// profile wins is final. Stages have value semantics: `play_round` returns
/// a new stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    game: Arc<WlcGame>,
    history: Vec<Profile>,
}

impl Stage {
    pub fn initial(game: Arc<WlcGame>) -> Self {
        Self {
            game,
            history: Vec::new(),
        }
    }

    pub fn with_history(game: Arc<WlcGame>, history: Vec<Profile>) -> Result<Self> {
        let mut stage = Self::initial(game);
        for p in history {
            stage = stage.play_round(&p)?;
        }
        Ok(stage)
    }

    pub fn game(&self) -> &WlcGame {
        &self.game
    }

    pub fn game_arc(&self) -> &Arc<WlcGame> {
        &self.game
    }

    pub fn history(&self) -> &[Profile] {
        &self.history
    }

    pub fn rounds(&self) -> usize {
        self.history.len()
    }

    pub fn is_final(&self) -> bool {
        self.history
            .last()
            .is_some_and(|p| self.game.is_winning(&p.0))
    }

    pub fn check_profile(&self, p: &Profile) -> Result<()> {
        if p.arity() != self.game.n_players() {
            return Err(Error::ProfileArityMismatch {
                expected: self.game.n_players(),
                got: p.arity(),
            });
        }
        for (player, &l) in p.0.iter().enumerate() {
            if l >= self.game.choice_count(player) {
                return Err(Error::InvalidArgument(format!(
                    "player {} has no choice {l}",
                    player + 1
                )));
            }
        }
        Ok(())
    }

    pub fn play_round(&self, p: &Profile) -> Result<Stage> {
        if self.is_final() {
            return Err(Error::StageAlreadyFinal);
        }
        self.check_profile(p)?;
        let mut history = self.history.clone();
        history.push(p.clone());
        Ok(Stage {
            game: self.game.clone(),
            history,
        })
    }

    /// Whether `c` was picked by its player in some round.
    pub fn was_played(&self, c: ChoiceId) -> bool {
        self.history.iter().any(|p| p.0[c.player] == c.local)
    }

    /// Distinct choices each player has used, sorted.
    pub fn played_sets(&self) -> Vec<Vec<usize>> {
        let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.game.n_players()];
        for p in &self.history {
            for (i, &l) in p.0.iter().enumerate() {
                sets[i].insert(l);
            }
        }
        sets.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Distinct profiles of the history, sorted.
    pub fn profile_set(&self) -> Vec<Profile> {
        let mut v = self.history.clone();
        v.sort();
        v.dedup();
        v
    }

    /// Winning tuples sharing a choice with some profile of the history.
    pub fn touched_edges(&self) -> Vec<Vec<usize>> {
        let played = self.played_sets();
        self.game
            .winning()
            .iter()
            .filter(|t| t.iter().enumerate().any(|(p, l)| played[p].binary_search(l).is_ok()))
            .cloned()
            .collect()
    }
}
