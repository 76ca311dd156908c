//! Isomorph-free census of small two-player games.
//!
//! Games are compared up to renaming (choice permutations and the player
//! swap) through the canonical form of the bare game. Games whose choices
//! all have degree at most two are unions of paths and cycles and are
//! generated from component multisets; brute-force scans over all
//! relations of a given shape serve as the cross-check.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::analysis::{exact_ect, exact_ect_from, three_choice_fixed_point, Algebraic};
use crate::error::{Error, Result};
use crate::game::{ChoiceId, Stage, WlcGame};
use crate::notation::{build_str, path_component_name};
use crate::protocols::{table_key, ProtocolSpec, TableProtocol};
use crate::rational::{q, qi, Q};
use crate::symmetry::{focal_points, one_round_solvable, profile_set_key, StageClassKey};

/// Canonical key of a game up to renaming.
pub fn game_key(game: &WlcGame) -> StageClassKey {
    profile_set_key(game, &[])
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Constraints {
    pub max_degree: Option<usize>,
    /// Inclusive range of `|W|`.
    pub edges: Option<(usize, usize)>,
}

impl Constraints {
    pub fn max_degree(d: usize) -> Self {
        Self {
            max_degree: Some(d),
            edges: None,
        }
    }

    fn admits_edges(&self, e: usize) -> bool {
        self.edges.is_none_or(|(lo, hi)| lo <= e && e <= hi)
    }
}

/// How a census entry's coordination time is certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Some pair of classes is completely winning: ECT 1.
    OneRound,
    Exact { value: Q, method: String },
    Algebraic { value: Algebraic, method: String },
}

impl Certificate {
    pub fn method(&self) -> &str {
        match self {
            Certificate::OneRound => "one-round solvable",
            Certificate::Exact { method, .. } | Certificate::Algebraic { method, .. } => method,
        }
    }

    /// Exact comparison for rationals, high-precision shadow otherwise.
    pub fn is_below(&self, bound: &Q) -> bool {
        match self {
            Certificate::OneRound => qi(1) < *bound,
            Certificate::Exact { value, .. } => value < bound,
            Certificate::Algebraic { value, .. } => value.approx < *bound,
        }
    }

    pub fn value_text(&self) -> String {
        match self {
            Certificate::OneRound => "1".into(),
            Certificate::Exact { value, .. } => value.to_string(),
            Certificate::Algebraic { value, .. } => value.to_string(),
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.value_text(), self.method())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusEntry {
    pub notation: String,
    pub game: WlcGame,
    pub edge_count: usize,
    pub degree_multiset: Vec<Vec<usize>>,
    pub has_initial_focal_point: bool,
    pub one_round_solvable: bool,
    /// Filled in by `census_report`.
    pub certificate: Option<Certificate>,
    /// Listed by hand rather than produced by the degree-≤2 enumeration.
    pub special: bool,
}

impl CensusEntry {
    pub fn new(game: WlcGame) -> Result<Self> {
        let stage = Stage::initial(Arc::new(game.clone()));
        Ok(Self {
            notation: game_notation(&game)?,
            edge_count: game.winning().len(),
            degree_multiset: game.degree_multiset(),
            has_initial_focal_point: !focal_points(&stage)?.is_empty(),
            one_round_solvable: one_round_solvable(&stage)?.is_some(),
            certificate: None,
            special: false,
            game,
        })
    }
}

struct Component {
    left: Vec<usize>,
    right: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

fn components(game: &WlcGame) -> Vec<Component> {
    let (n1, n2) = (game.choice_count(0), game.choice_count(1));
    let mut seen = [vec![false; n1], vec![false; n2]];
    let mut out = Vec::new();
    for start in 0..n1 {
        if seen[0][start] {
            continue;
        }
        seen[0][start] = true;
        let mut stack = vec![ChoiceId::new(0, start)];
        let mut comp = Component {
            left: Vec::new(),
            right: Vec::new(),
            edges: Vec::new(),
        };
        while let Some(c) = stack.pop() {
            if c.player == 0 {
                comp.left.push(c.local);
            } else {
                comp.right.push(c.local);
            }
            for &d in game.neighbors(c) {
                let d = ChoiceId::new(1 - c.player, d);
                if !seen[d.player][d.local] {
                    seen[d.player][d.local] = true;
                    stack.push(d);
                }
            }
        }
        comp.left.sort_unstable();
        comp.right.sort_unstable();
        for w in game.winning() {
            if comp.left.binary_search(&w[0]).is_ok() {
                comp.edges.push((w[0], w[1]));
            }
        }
        out.push(comp);
    }
    out
}

/// Sort key and name of one component, in the orientation given.
fn component_name(game: &WlcGame, c: &Component, swap: bool) -> ((usize, bool, usize), String) {
    let (l, r) = if swap {
        (c.right.len(), c.left.len())
    } else {
        (c.left.len(), c.right.len())
    };
    let e = c.edges.len();
    let nodes = l + r;
    let max_deg = c
        .left
        .iter()
        .map(|&x| game.degree(ChoiceId::new(0, x)))
        .chain(c.right.iter().map(|&y| game.degree(ChoiceId::new(1, y))))
        .max()
        .unwrap_or(0);
    let cycle = e == nodes;
    let simple = max_deg <= 2 && (cycle || e + 1 == nodes);
    let name = if simple {
        path_component_name(l, r, cycle)
    } else if e == l * r {
        format!("{l}x{r}")
    } else {
        let pos = |v: &[usize], x: usize| v.binary_search(&x).expect("in component");
        let mut pairs: Vec<(usize, usize)> = c
            .edges
            .iter()
            .map(|&(a, b)| {
                let (i, j) = (pos(&c.left, a), pos(&c.right, b));
                if swap {
                    (j, i)
                } else {
                    (i, j)
                }
            })
            .collect();
        pairs.sort_unstable();
        let body: Vec<String> = pairs.iter().map(|(i, j)| format!("{i}-{j}")).collect();
        format!("E({l}x{r}: {})", body.join(" "))
    };
    // larger components first, cycles before paths, fewer left choices first
    ((usize::MAX - e, !cycle, l), name)
}

/// Notation for a two-player game from its component decomposition, e.g.
/// `Sigma(3)+2*(1x1)`. Games made only of single edges are written `CM(m)`.
pub fn game_notation(game: &WlcGame) -> Result<String> {
    game.require_two_players()?;
    let comps = components(game);
    if comps.iter().all(|c| c.edges.len() == 1) {
        return Ok(format!("CM({})", comps.len()));
    }
    let named = |swap: bool| {
        let mut v: Vec<_> = comps.iter().map(|c| component_name(game, c, swap)).collect();
        v.sort();
        v
    };
    let (a, b) = (named(false), named(true));
    let chosen = if b < a { b } else { a };
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < chosen.len() {
        let mut j = i;
        while j < chosen.len() && chosen[j].1 == chosen[i].1 {
            j += 1;
        }
        let name = &chosen[i].1;
        parts.push(if j - i == 1 {
            name.clone()
        } else {
            format!("{}*({name})", j - i)
        });
        i = j;
    }
    Ok(parts.join("+"))
}

/// Largest `m` for which unconstrained enumeration is attempted.
pub const MAX_UNCONSTRAINED_M: usize = 4;
/// Largest `m` for the path/cycle enumeration.
pub const MAX_PATH_CYCLE_M: usize = 8;

/// Result of scanning every relation of one shape.
#[derive(Clone, Debug)]
pub struct ShapeScan {
    pub left: usize,
    pub right: usize,
    pub relations_examined: u64,
    pub classes: BTreeMap<StageClassKey, WlcGame>,
}

/// Scans all winning relations on `left × right` choices (every choice in
/// some winning pair, optional degree cap) and keeps one game per class.
pub fn scan_shape(left: usize, right: usize, max_degree: Option<usize>) -> Result<ShapeScan> {
    if left * right > 25 || (max_degree.is_none_or(|d| d > 2) && left * right > 16) {
        return Err(Error::TooLarge(format!("{left}x{right} relations")));
    }
    let cap = max_degree.unwrap_or(usize::MAX);
    // row masks admissible on their own
    let rows: Vec<u32> = (1u32..(1 << right))
        .filter(|m| (m.count_ones() as usize) <= cap)
        .collect();
    let mut scan = ShapeScan {
        left,
        right,
        relations_examined: 0,
        classes: BTreeMap::new(),
    };
    if max_degree.is_none() {
        // every relation, including those with empty rows, counts as examined
        scan.relations_examined = 1u64 << (left * right);
    }
    let mut chosen = vec![0u32; left];
    let mut col = vec![0usize; right];
    fill(&rows, cap, 0, &mut chosen, &mut col, &mut scan)?;
    Ok(scan)
}

fn fill(
    rows: &[u32],
    cap: usize,
    i: usize,
    chosen: &mut [u32],
    col: &mut [usize],
    scan: &mut ShapeScan,
) -> Result<()> {
    if i == chosen.len() {
        if scan.right > 0 && col.contains(&0) {
            return Ok(());
        }
        let mut winning = Vec::new();
        for (a, &mask) in chosen.iter().enumerate() {
            for b in 0..scan.right {
                if mask >> b & 1 == 1 {
                    winning.push(vec![a, b]);
                }
            }
        }
        let g = WlcGame::new(vec![scan.left, scan.right], winning)?;
        scan.classes.entry(game_key(&g)).or_insert(g);
        return Ok(());
    }
    for &mask in rows {
        let ok = (0..scan.right).all(|b| mask >> b & 1 == 0 || col[b] < cap);
        if !ok {
            continue;
        }
        for (b, c) in col.iter_mut().enumerate() {
            *c += (mask >> b & 1) as usize;
        }
        chosen[i] = mask;
        if cap != usize::MAX {
            scan.relations_examined += 1;
        }
        fill(rows, cap, i + 1, chosen, col, scan)?;
        for (b, c) in col.iter_mut().enumerate() {
            *c -= (mask >> b & 1) as usize;
        }
    }
    Ok(())
}

/// All classes of m-choice games by brute force over shapes `a × m`,
/// `a ≤ m` (the player swap covers `m × a`).
pub fn brute_force_classes(m: usize, max_degree: Option<usize>) -> Result<Vec<WlcGame>> {
    let mut all = BTreeMap::new();
    for a in 1..=m {
        all.extend(scan_shape(a, m, max_degree)?.classes);
    }
    Ok(all.into_values().collect())
}

/// Path/cycle component types fitting in `m × m`: (left, right, cycle).
fn component_types(m: usize) -> Vec<(usize, usize, bool)> {
    let mut t = Vec::new();
    for l in 1..=m {
        for r in 1..=m {
            if l.abs_diff(r) <= 1 {
                t.push((l, r, false));
            }
        }
        if l >= 2 {
            t.push((l, l, true));
        }
    }
    t
}

/// Games all of whose choices have degree ≤ 2, as unions of paths and
/// cycles, with larger side exactly `m`.
pub fn path_cycle_classes(m: usize) -> Result<Vec<WlcGame>> {
    if m > MAX_PATH_CYCLE_M {
        return Err(Error::TooLarge(format!("path/cycle census for m = {m}")));
    }
    let types = component_types(m);
    let mut out = BTreeMap::new();
    let mut pick = Vec::new();
    multisets(&types, 0, (0, 0), m, &mut pick, &mut out)?;
    Ok(out.into_values().collect())
}

fn multisets(
    types: &[(usize, usize, bool)],
    from: usize,
    used: (usize, usize),
    m: usize,
    pick: &mut Vec<usize>,
    out: &mut BTreeMap<StageClassKey, WlcGame>,
) -> Result<()> {
    if used.0.max(used.1) == m {
        let text: Vec<String> = pick
            .iter()
            .map(|&i| {
                let (l, r, c) = types[i];
                path_component_name(l, r, c)
            })
            .collect();
        let g = build_str(&text.join("+"))?;
        out.entry(game_key(&g)).or_insert(g);
    }
    for (i, &(l, r, _)) in types.iter().enumerate().skip(from) {
        if used.0 + l <= m && used.1 + r <= m {
            pick.push(i);
            multisets(types, i, (used.0 + l, used.1 + r), m, pick, out)?;
            pick.pop();
        }
    }
    Ok(())
}

/// One representative per renaming class of valid m-choice games meeting
/// the constraints, ordered by edge count and then notation.
pub fn enumerate_m_choice(m: usize, constraints: &Constraints) -> Result<Vec<CensusEntry>> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let games = match constraints.max_degree {
        Some(d) if d <= 2 => path_cycle_classes(m)?
            .into_iter()
            .filter(|g| g.degree_multiset().iter().flatten().all(|&x| x <= d))
            .collect(),
        _ if m <= MAX_UNCONSTRAINED_M => brute_force_classes(m, constraints.max_degree)?,
        _ => {
            return Err(Error::TooLarge(format!(
                "unconstrained census for m = {m} (limit {MAX_UNCONSTRAINED_M})"
            )))
        }
    };
    let mut entries = games
        .into_iter()
        .filter(|g| constraints.admits_edges(g.winning().len()))
        .map(CensusEntry::new)
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| (a.edge_count, &a.notation).cmp(&(b.edge_count, &b.notation)));
    Ok(entries)
}

/// G★: the 5-choice game with one degree-3 choice per player and no edge
/// between them.
pub const G_STAR: &str = "E(3x2: 0-0 0-1 1-1 2-1)+E(2x3: 0-0 0-1 0-2 1-2)";

/// A protocol that plays per-player `weights` in the first round and WM
/// afterwards.
pub fn first_round_then_wm(game: &WlcGame, weights: [Vec<(usize, Q)>; 2]) -> Result<ProtocolSpec> {
    let stage = Stage::initial(Arc::new(game.clone()));
    let key = table_key(&stage)?;
    let mut t = TableProtocol::new().with_fallback(ProtocolSpec::Wm);
    for (p, w) in weights.iter().enumerate() {
        t.insert_q(&key, p, w);
    }
    Ok(ProtocolSpec::Table(Arc::new(t)))
}

/// Half the mass uniformly on choices with `first`, half on those with
/// `second`.
fn halves(game: &WlcGame, player: usize, first: impl Fn(ChoiceId) -> bool, second: impl Fn(ChoiceId) -> bool) -> Vec<(usize, Q)> {
    let a: Vec<usize> = game.choices(player).filter(|&c| first(c)).map(|c| c.local).collect();
    let b: Vec<usize> = game.choices(player).filter(|&c| second(c)).map(|c| c.local).collect();
    let mut w = Vec::new();
    for (set, n) in [(&a, a.len()), (&b, b.len())] {
        for &l in set {
            w.push((l, q(1, 2 * n as i64)));
        }
    }
    w
}

/// The symmetric first-round split used for the higher-degree specials.
fn special_protocol(game: &WlcGame, notation: &str) -> Result<Option<ProtocolSpec>> {
    let deg = |c: ChoiceId| game.degree(c);
    let weights = |p: usize| -> Vec<(usize, Q)> {
        match notation {
            "1x4+4x1" => halves(game, p, |c| deg(c) == 4, |c| deg(c) == 1),
            "Sigma(3)+SigmaR(3)" => {
                // the middle of a 5-choice path versus the other degree-2 choices
                let inner = |c: ChoiceId| {
                    deg(c) == 2
                        && game
                            .neighbors(c)
                            .iter()
                            .all(|&d| game.degree(ChoiceId::new(1 - c.player, d)) == 2)
                };
                halves(game, p, inner, |c| deg(c) == 2 && !inner(c))
            }
            _ => halves(game, p, |c| deg(c) == 3, |c| deg(c) == 2),
        }
    };
    let is_special = matches!(notation, "1x4+4x1" | "Sigma(3)+SigmaR(3)") || game_key(game) == game_key(&build_str(G_STAR)?);
    if !is_special {
        return Ok(None);
    }
    Ok(Some(first_round_then_wm(game, [weights(0), weights(1)])?))
}

/// A completely winning pair of classes turned into a table protocol; its
/// exact ECT must be 1.
pub fn one_round_protocol(stage: &Stage) -> Result<Option<ProtocolSpec>> {
    let Some((x1, x2)) = one_round_solvable(stage)? else {
        return Ok(None);
    };
    let key = table_key(stage)?;
    let mut t = TableProtocol::new();
    for (p, xs) in [(0, &x1), (1, &x2)] {
        let w: Vec<(usize, Q)> = xs.iter().map(|c| (c.local, q(1, xs.len() as i64))).collect();
        t.insert_q(&key, p, &w);
    }
    Ok(Some(ProtocolSpec::Table(Arc::new(t))))
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub m: usize,
    pub entries: Vec<CensusEntry>,
    /// Entries without an initial focal point that are not one-round solvable.
    pub hard: Vec<String>,
    /// `3 − 2·9/25` for m = 5: the WM bound for every 5-choice game with
    /// more than eight winning pairs.
    pub dense_wm_bound: Option<Q>,
}

impl CensusReport {
    /// Entry with the greatest certified value.
    pub fn maximal(&self) -> Option<&CensusEntry> {
        let val = |e: &CensusEntry| match e.certificate.as_ref() {
            Some(Certificate::Exact { value, .. }) => value.clone(),
            Some(Certificate::Algebraic { value, .. }) => value.approx.clone(),
            _ => qi(1),
        };
        self.entries.iter().max_by(|a, b| val(a).cmp(&val(b)))
    }
}

fn certify(entry: &CensusEntry) -> Result<Certificate> {
    let g = &entry.game;
    if entry.one_round_solvable {
        let stage = Stage::initial(Arc::new(g.clone()));
        let p = one_round_protocol(&stage)?.expect("solvable");
        let ect = exact_ect_from(&stage, &p)?.value;
        debug_assert_eq!(ect, qi(1));
        return Ok(Certificate::OneRound);
    }
    if g.is_choice_matching() {
        return Ok(Certificate::Exact {
            value: exact_ect(g, &ProtocolSpec::La)?.value,
            method: "LA".into(),
        });
    }
    let fixed = |method: &str| -> Result<Certificate> {
        Ok(Certificate::Algebraic {
            value: three_choice_fixed_point()?.e1,
            method: method.into(),
        })
    };
    let sub_uniform = |sub: &str, method: &str| -> Result<Certificate> {
        Ok(Certificate::Exact {
            value: exact_ect(&build_str(sub)?, &ProtocolSpec::Uniform)?.value,
            method: method.into(),
        })
    };
    match entry.notation.as_str() {
        "1x2+2x1" => return fixed("optimal mixing (fixed point)"),
        "1x2+2x1+2*(1x1)" => return fixed("optimal play in the 1x2+2x1 subgame"),
        "O(3)" => return sub_uniform("O(3)", "UNIFORM"),
        "O(3)+2*(1x1)" => return sub_uniform("O(3)", "UNIFORM within the O(3) subgame"),
        _ => {}
    }
    if let Some(p) = special_protocol(g, &entry.notation)? {
        return Ok(Certificate::Exact {
            value: exact_ect(g, &p)?.value,
            method: "first-round split, then WM".into(),
        });
    }
    // anything else: the best built-in protocol
    let mut best: Option<(Q, &str)> = None;
    for (p, name) in [
        (ProtocolSpec::Wm, "WM"),
        (ProtocolSpec::La, "LA"),
        (ProtocolSpec::Uniform, "UNIFORM"),
    ] {
        if let Ok(r) = exact_ect(g, &p) {
            if best.as_ref().is_none_or(|(v, _)| r.value < *v) {
                best = Some((r.value, name));
            }
        }
    }
    let (value, method) = best.ok_or(Error::SingularSystem)?;
    Ok(Certificate::Exact {
        value,
        method: method.into(),
    })
}

/// The degree-≤2 census for m ∈ {3, 5}, classified and certified; for
/// m = 5 the higher-degree specials 1x4+4x1 and G★ are appended.
pub fn census_report(m: usize) -> Result<CensusReport> {
    if m != 3 && m != 5 {
        return Err(Error::UnsupportedM(m));
    }
    let cons = Constraints {
        max_degree: Some(2),
        edges: if m == 5 { Some((5, 8)) } else { None },
    };
    let mut entries = enumerate_m_choice(m, &cons)?;
    if m == 5 {
        for text in ["1x4+4x1", G_STAR] {
            let mut e = CensusEntry::new(build_str(text)?)?;
            e.special = true;
            if text == G_STAR {
                e.notation = "G*".into();
            }
            entries.push(e);
        }
    }
    let mut hard = Vec::new();
    for e in &mut entries {
        if !e.has_initial_focal_point && !e.one_round_solvable {
            hard.push(e.notation.clone());
        }
        e.certificate = Some(certify(e)?);
    }
    Ok(CensusReport {
        m,
        entries,
        hard,
        dense_wm_bound: (m == 5).then(|| qi(3) - qi(2) * q(9, 25)),
    })
}
