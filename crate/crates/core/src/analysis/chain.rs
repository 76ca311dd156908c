//! Finite Markov chains over classes of stages.
//!
//! States are canonical keys of stages under an abstraction fine enough to
//! determine the protocol's behavior up to renaming:
//!
//! * protocols that ignore the stage get a single state;
//! * LA depends only on the stage's renaming group, which is the stabilizer
//!   of its set of fixed profiles, so that set (up to renaming) is the key;
//! * everything else is keyed by the set of distinct profiles played.
//!
//! The claim is checked while expanding: a second stage reaching a known key
//! must produce the same successor distribution, else the protocol is
//! reported as not similarity-invariant.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::analysis::linsolve::expected_steps;
use crate::error::{Error, Result};
use crate::game::{Profile, Stage, WlcGame};
use crate::protocols::{support_profiles, Dependence, ProtocolSpec};
use crate::rational::Q;
use crate::symmetry::{fixed_profiles, profile_set_key, stage_symmetry, StageClassKey};

pub const DEFAULT_MAX_CLASSES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainOptions {
    pub max_classes: usize,
    /// Extra representatives per state whose transitions are recomputed
    /// and compared.
    pub verify_per_state: usize,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            max_classes: DEFAULT_MAX_CLASSES,
            verify_per_state: 1,
        }
    }
}

/// Outgoing distribution of one state, by successor key.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Successors {
    win: Q,
    next: BTreeMap<StageClassKey, (Q, Profile)>,
}

#[derive(Clone, Debug)]
struct StateInfo {
    rep: Stage,
    succ: Option<Successors>,
    checked: usize,
}

pub(crate) struct Expander<'a> {
    protocol: &'a ProtocolSpec,
    opts: ChainOptions,
    keys: BTreeMap<StageClassKey, usize>,
    states: Vec<StateInfo>,
    pending: Vec<(usize, Stage)>,
}

impl<'a> Expander<'a> {
    pub(crate) fn new(protocol: &'a ProtocolSpec, opts: ChainOptions) -> Self {
        Self {
            protocol,
            opts,
            keys: BTreeMap::new(),
            states: Vec::new(),
            pending: Vec::new(),
        }
    }

    fn key(&self, stage: &Stage) -> Result<StageClassKey> {
        let game = stage.game();
        Ok(match self.protocol.dependence() {
            Dependence::Nothing => StageClassKey(Vec::new()),
            Dependence::RenamingGroup => {
                let sym = stage_symmetry(stage)?;
                profile_set_key(game, &fixed_profiles(stage, &sym))
            }
            Dependence::ProfileSet => profile_set_key(game, &stage.profile_set()),
        })
    }

    fn intern(&mut self, stage: Stage) -> Result<usize> {
        let key = self.key(&stage)?;
        if let Some(&i) = self.keys.get(&key) {
            let st = &mut self.states[i];
            if st.checked < self.opts.verify_per_state && st.rep != stage {
                st.checked += 1;
                self.pending.push((i, stage));
            }
            return Ok(i);
        }
        if self.states.len() >= self.opts.max_classes {
            return Err(Error::ChainNotClosed(self.opts.max_classes));
        }
        let i = self.states.len();
        self.keys.insert(key, i);
        self.states.push(StateInfo {
            rep: stage,
            succ: None,
            checked: 0,
        });
        Ok(i)
    }

    fn successors_of(&self, stage: &Stage) -> Result<(Successors, Vec<Stage>)> {
        let mut win = Q::zero();
        let mut next: BTreeMap<StageClassKey, (Q, Profile)> = BTreeMap::new();
        let mut stages = Vec::new();
        for (prof, w) in support_profiles(self.protocol, stage)? {
            if stage.game().is_winning(&prof.0) {
                win += w;
                continue;
            }
            let s = stage.play_round(&prof)?;
            let k = self.key(&s)?;
            match next.get_mut(&k) {
                Some(e) => e.0 += w,
                None => {
                    next.insert(k, (w, prof));
                }
            }
            stages.push(s);
        }
        Ok((Successors { win, next }, stages))
    }

    /// Computes (once) the transitions of state `i`, interning successors.
    fn expand(&mut self, i: usize) -> Result<()> {
        if self.states[i].succ.is_some() {
            return Ok(());
        }
        let rep = self.states[i].rep.clone();
        let (succ, stages) = self.successors_of(&rep)?;
        for s in stages {
            self.intern(s)?;
        }
        self.states[i].succ = Some(succ);
        Ok(())
    }

    fn target(&self, key: &StageClassKey) -> usize {
        self.keys[key]
    }

    /// Re-derives transitions from queued alternative representatives.
    fn verify_pending(&mut self) -> Result<()> {
        while let Some((i, stage)) = self.pending.pop() {
            self.expand(i)?;
            let (alt, _) = self.successors_of(&stage)?;
            let base = self.states[i].succ.as_ref().expect("expanded");
            let same = alt.win == base.win
                && alt.next.len() == base.next.len()
                && alt
                    .next
                    .iter()
                    .zip(&base.next)
                    .all(|((k1, (p1, _)), (k2, (p2, _)))| k1 == k2 && p1 == p2);
            if !same {
                return Err(Error::NotSimilarityInvariant(format!(
                    "{} behaves differently after {} and after {}",
                    self.protocol,
                    history_text(&self.states[i].rep),
                    history_text(&stage)
                )));
            }
        }
        Ok(())
    }
}

fn history_text(s: &Stage) -> String {
    if s.history().is_empty() {
        return "the empty history".into();
    }
    let parts: Vec<String> = s.history().iter().map(|p| format!("{p}")).collect();
    parts.join(" ")
}

/// One transient state of the quotient chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRow {
    pub win: Q,
    pub next: Vec<(usize, Q)>,
}

/// Finite chain over stage classes, with an implicit absorbing WIN state.
#[derive(Clone, Debug)]
pub struct MarkovQuotient {
    pub keys: Vec<StageClassKey>,
    pub reps: Vec<Stage>,
    pub rows: Vec<ChainRow>,
    pub start: usize,
}

impl MarkovQuotient {
    pub fn build(start: &Stage, p: &ProtocolSpec, opts: ChainOptions) -> Result<Self> {
        if start.is_final() {
            return Err(Error::FinalStage);
        }
        start.game().require_two_players()?;
        let mut ex = Expander::new(p, opts);
        let s0 = ex.intern(start.clone())?;
        let mut i = 0;
        while i < ex.states.len() {
            ex.expand(i)?;
            i += 1;
        }
        ex.verify_pending()?;
        let mut keys = vec![StageClassKey(Vec::new()); ex.states.len()];
        for (k, &i) in &ex.keys {
            keys[i] = k.clone();
        }
        let rows = ex
            .states
            .iter()
            .map(|st| {
                let s = st.succ.as_ref().expect("expanded");
                ChainRow {
                    win: s.win.clone(),
                    next: s
                        .next
                        .iter()
                        .map(|(k, (w, _))| (ex.target(k), w.clone()))
                        .collect(),
                }
            })
            .collect();
        Ok(Self {
            keys,
            reps: ex.states.into_iter().map(|s| s.rep).collect(),
            rows,
            start: s0,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Every row sums to one (WIN included).
    pub fn is_stochastic(&self) -> bool {
        self.rows.iter().all(|r| {
            r.next.iter().fold(r.win.clone(), |a, (_, w)| a + w) == Q::one()
        })
    }

    /// States from which WIN is unreachable.
    fn trapped(&self) -> Vec<usize> {
        let n = self.len();
        let mut reach = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for (i, r) in self.rows.iter().enumerate() {
                if !reach[i] && (!r.win.is_zero() || r.next.iter().any(|(t, _)| reach[*t])) {
                    reach[i] = true;
                    changed = true;
                }
            }
        }
        (0..n).filter(|&i| !reach[i]).collect()
    }

    /// Expected rounds to coordination from every state.
    pub fn expected_times(&self) -> Result<Vec<Q>> {
        if !self.trapped().is_empty() {
            return Err(Error::SingularSystem);
        }
        let rows: Vec<Vec<(usize, Q)>> = self.rows.iter().map(|r| r.next.clone()).collect();
        expected_steps(&rows)
    }

    /// Probability of coordinating in exactly round `k`, for `k = 1..=rounds`.
    pub fn round_distribution(&self, rounds: usize) -> Vec<Q> {
        let mut mass = vec![Q::zero(); self.len()];
        mass[self.start] = Q::one();
        let mut out = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let mut next = vec![Q::zero(); self.len()];
            let mut won = Q::zero();
            for (i, m) in mass.iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                won += m * &self.rows[i].win;
                for (t, w) in &self.rows[i].next {
                    next[*t] += m * w;
                }
            }
            out.push(won);
            mass = next;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EctResult {
    pub value: Q,
    pub chain_size: usize,
    pub derivation: Vec<String>,
}

pub fn exact_ect(game: &WlcGame, p: &ProtocolSpec) -> Result<EctResult> {
    exact_ect_from(&Stage::initial(Arc::new(game.clone())), p)
}

pub fn exact_ect_from(stage: &Stage, p: &ProtocolSpec) -> Result<EctResult> {
    exact_ect_with(stage, p, ChainOptions::default())
}

pub fn exact_ect_with(stage: &Stage, p: &ProtocolSpec, opts: ChainOptions) -> Result<EctResult> {
    let chain = MarkovQuotient::build(stage, p, opts)?;
    let values = chain.expected_times()?;
    let derivation = chain
        .reps
        .iter()
        .zip(&chain.rows)
        .zip(&values)
        .enumerate()
        .map(|(i, ((rep, row), v))| {
            format!(
                "state {i} (after {}): win {} -> {} successor classes, ECT {v}",
                history_text(rep),
                row.win,
                row.next.len()
            )
        })
        .collect();
    Ok(EctResult {
        value: values[chain.start].clone(),
        chain_size: chain.len(),
        derivation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GctValue {
    Finite(u64),
    Infinite,
}

impl fmt::Display for GctValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GctValue::Finite(n) => write!(f, "{n}"),
            GctValue::Infinite => f.write_str("INFINITE"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GctResult {
    pub value: GctValue,
    /// A concrete history: for a finite value, a longest non-coordinating
    /// play; for `Infinite`, a play that returns to a class already visited.
    pub witness: Vec<Profile>,
}

const WHITE: u8 = 0;
const GRAY: u8 = 1;
const BLACK: u8 = 2;

struct GctSearch<'e, 'a> {
    ex: &'e mut Expander<'a>,
    color: Vec<u8>,
    longest: Vec<u64>,
    stack: Vec<usize>,
    cycle: Option<(Vec<usize>, usize)>,
}

impl GctSearch<'_, '_> {
    fn grow(&mut self) {
        let n = self.ex.states.len();
        self.color.resize(n, WHITE);
        self.longest.resize(n, 0);
    }

    /// Returns false once a cycle has been found.
    fn visit(&mut self, s: usize) -> Result<bool> {
        self.ex.expand(s)?;
        self.grow();
        self.color[s] = GRAY;
        self.stack.push(s);
        let targets: Vec<usize> = self.ex.states[s]
            .succ
            .as_ref()
            .expect("expanded")
            .next
            .keys()
            .map(|k| self.ex.target(k))
            .collect();
        let mut best = 0;
        for t in targets {
            match self.color[t] {
                GRAY => {
                    self.cycle = Some((self.stack.clone(), t));
                    return Ok(false);
                }
                WHITE => {
                    if !self.visit(t)? {
                        return Ok(false);
                    }
                }
                _ => {}
            }
            best = best.max(self.longest[t]);
        }
        self.longest[s] = best + 1;
        self.color[s] = BLACK;
        self.stack.pop();
        Ok(true)
    }
}

pub fn gct(game: &WlcGame, p: &ProtocolSpec) -> Result<GctResult> {
    gct_from(&Stage::initial(Arc::new(game.clone())), p)
}

pub fn gct_from(stage: &Stage, p: &ProtocolSpec) -> Result<GctResult> {
    gct_with(stage, p, ChainOptions::default())
}

pub fn gct_with(stage: &Stage, p: &ProtocolSpec, opts: ChainOptions) -> Result<GctResult> {
    if stage.is_final() {
        return Err(Error::FinalStage);
    }
    stage.game().require_two_players()?;
    let mut ex = Expander::new(p, opts);
    let s0 = ex.intern(stage.clone())?;
    let mut search = GctSearch {
        ex: &mut ex,
        color: Vec::new(),
        longest: Vec::new(),
        stack: Vec::new(),
        cycle: None,
    };
    let finished = search.visit(s0)?;
    let longest = core::mem::take(&mut search.longest);
    let cycle = search.cycle.take();
    ex.verify_pending()?;
    if finished {
        // follow a longest chain of non-coordinating rounds
        let mut path = vec![s0];
        let mut cur = s0;
        while longest[cur] > 1 {
            let succ = ex.states[cur].succ.as_ref().expect("expanded");
            let next = succ
                .next
                .keys()
                .map(|k| ex.target(k))
                .find(|&t| longest[t] + 1 == longest[cur])
                .expect("a longest successor exists");
            path.push(next);
            cur = next;
        }
        Ok(GctResult {
            value: GctValue::Finite(longest[s0]),
            witness: realize(&mut ex, stage, &path)?,
        })
    } else {
        let (mut path, back) = cycle.expect("a cycle was found");
        path.push(back);
        Ok(GctResult {
            value: GctValue::Infinite,
            witness: realize(&mut ex, stage, &path)?,
        })
    }
}

/// Turns a path of states into a real history starting at `stage`.
fn realize(ex: &mut Expander<'_>, stage: &Stage, path: &[usize]) -> Result<Vec<Profile>> {
    let mut cur = stage.clone();
    let mut out = Vec::new();
    let key_of = |ex: &Expander<'_>, i: usize| -> StageClassKey {
        ex.keys
            .iter()
            .find(|(_, &j)| j == i)
            .map(|(k, _)| k.clone())
            .expect("interned")
    };
    for &t in &path[1..] {
        let want = key_of(ex, t);
        let mut found = None;
        for (prof, _) in support_profiles(ex.protocol, &cur)? {
            if cur.game().is_winning(&prof.0) {
                continue;
            }
            let s = cur.play_round(&prof)?;
            if ex.key(&s)? == want {
                found = Some((prof, s));
                break;
            }
        }
        let (prof, s) = found.ok_or_else(|| {
            Error::NotSimilarityInvariant(format!(
                "{} cannot reproduce a chain transition after {}",
                ex.protocol,
                history_text(&cur)
            ))
        })?;
        out.push(prof);
        cur = s;
    }
    Ok(out)
}

/// Lower and upper bounds on the ECT from raw (unquotiented) expansion to
/// `depth` rounds, where every stage still open after `depth` rounds is
/// assumed to need between 1 and `tail_bound` more rounds.
pub fn raw_bracket(stage: &Stage, p: &ProtocolSpec, depth: usize, tail_bound: &Q) -> Result<(Q, Q)> {
    // ECT = Σ_{k≥1} P(T ≥ k)
    let mut frontier: Vec<(Stage, Q)> = vec![(stage.clone(), Q::one())];
    let mut partial = Q::zero();
    for _ in 0..depth {
        let alive: Q = frontier.iter().fold(Q::zero(), |a, (_, w)| a + w);
        partial += alive;
        let mut next = Vec::new();
        for (s, w) in frontier {
            for (prof, pw) in support_profiles(p, &s)? {
                if !s.game().is_winning(&prof.0) {
                    next.push((s.play_round(&prof)?, &w * pw));
                }
            }
        }
        frontier = next;
    }
    let open: Q = frontier.iter().fold(Q::zero(), |a, (_, w)| a + w);
    Ok((&partial + &open, partial + open * tail_bound))
}
