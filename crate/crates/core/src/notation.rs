//! A small expression language for naming games.
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := INT '*' factor | INT '(' expr ')' | factor
//! factor := '(' expr ')'
//!         | 'CM(' m ')' | 'CMn(' n ',' m ')'
//!         | 'O(' m ')' | 'Z(' m ')' | 'Sigma(' m ')' | 'SigmaR(' m ')'
//!         | 'complement(' expr ')'
//!         | 'E(' a 'x' b ':' (i '-' j)* ')'
//!         | INT ('x' INT)+
//! ```
//!
//! `AxB` is the full product, `+` the disjoint union, `k*(e)` (or `k(e)`)
//! the k-fold disjoint union. `E(...)` lists the winning pairs of a
//! two-player component explicitly. Whitespace is insignificant.
//!
//! Choices are numbered player-major, components in the order written.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::game::{complement, WlcGame};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameExpr {
    /// Two-player choice matching game with `m` choices.
    Cm(usize),
    /// `n`-player choice matching game with `m` choices each.
    CmN(usize, usize),
    /// Winning pairs form a 2m-cycle.
    Cycle(usize),
    /// Winning pairs form a (2m-1)-edge path.
    Zigzag(usize),
    /// (m-1) x m choices on a (2m-2)-edge path.
    Sigma(usize),
    /// `Sigma` with the players swapped.
    SigmaR(usize),
    /// Full product of the given choice counts.
    Product(Vec<usize>),
    Multiple(usize, Box<GameExpr>),
    Sum(Box<GameExpr>, Box<GameExpr>),
    Complement(Box<GameExpr>),
    /// Explicit two-player component: counts and winning pairs.
    Edges(usize, usize, Vec<(usize, usize)>),
}

impl GameExpr {
    pub fn sum(a: GameExpr, b: GameExpr) -> GameExpr {
        GameExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn n_players(&self) -> Result<usize> {
        Ok(match self {
            GameExpr::CmN(n, _) => *n,
            GameExpr::Product(f) => f.len(),
            GameExpr::Multiple(_, e) | GameExpr::Complement(e) => e.n_players()?,
            GameExpr::Sum(a, b) => {
                let (x, y) = (a.n_players()?, b.n_players()?);
                if x != y {
                    return Err(Error::Arity(format!(
                        "cannot add a {x}-player game to a {y}-player game"
                    )));
                }
                x
            }
            _ => 2,
        })
    }
}

impl fmt::Display for GameExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameExpr::Cm(m) => write!(f, "CM({m})"),
            GameExpr::CmN(n, m) => write!(f, "CMn({n},{m})"),
            GameExpr::Cycle(m) => write!(f, "O({m})"),
            GameExpr::Zigzag(m) => write!(f, "Z({m})"),
            GameExpr::Sigma(m) => write!(f, "Sigma({m})"),
            GameExpr::SigmaR(m) => write!(f, "SigmaR({m})"),
            GameExpr::Product(dims) => {
                for (i, d) in dims.iter().enumerate() {
                    if i > 0 {
                        f.write_str("x")?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
            GameExpr::Multiple(k, e) => write!(f, "{k}*({e})"),
            GameExpr::Sum(a, b) => match **b {
                GameExpr::Sum(..) => write!(f, "{a} + ({b})"),
                _ => write!(f, "{a} + {b}"),
            },
            GameExpr::Complement(e) => write!(f, "complement({e})"),
            GameExpr::Edges(a, b, edges) => {
                write!(f, "E({a}x{b}:")?;
                for (i, j) in edges {
                    write!(f, " {i}-{j}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn int(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("number too large")
        })
    }

    fn positive(&mut self, min: usize, what: &str) -> Result<usize> {
        let start = self.pos;
        let v = self.int()?;
        if v < min {
            self.pos = start;
            self.skip_ws();
            return self.err(format!("{what} must be at least {min}"));
        }
        Ok(v)
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn expr(&mut self) -> Result<GameExpr> {
        let start = self.peek_pos();
        let mut lhs = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.term()?;
            let e = GameExpr::sum(lhs, rhs);
            if let Err(Error::Arity(msg)) = e.n_players() {
                return Err(Error::Arity(format!("{msg} (expression at position {start})")));
            }
            lhs = e;
        }
        Ok(lhs)
    }

    fn peek_pos(&mut self) -> usize {
        self.skip_ws();
        self.pos
    }

    fn term(&mut self) -> Result<GameExpr> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let k = self.int()?;
                match self.peek() {
                    Some(b'*') => {
                        self.pos += 1;
                        let inner = self.factor()?;
                        self.multiple(start, k, inner)
                    }
                    Some(b'(') => {
                        self.pos += 1;
                        let inner = self.expr()?;
                        self.expect(b')')?;
                        self.multiple(start, k, inner)
                    }
                    _ => {
                        self.pos = start;
                        self.product()
                    }
                }
            }
            _ => self.factor(),
        }
    }

    fn multiple(&mut self, start: usize, k: usize, inner: GameExpr) -> Result<GameExpr> {
        if k == 0 {
            return Err(Error::Syntax {
                pos: start,
                msg: "multiplicity must be positive".into(),
            });
        }
        Ok(GameExpr::Multiple(k, Box::new(inner)))
    }

    fn product(&mut self) -> Result<GameExpr> {
        let mut dims = vec![self.positive(1, "choice count")?];
        while self.peek() == Some(b'x') {
            self.pos += 1;
            dims.push(self.positive(1, "choice count")?);
        }
        if dims.len() < 2 {
            return self.err("expected 'x' in a product such as 2x3");
        }
        Ok(GameExpr::Product(dims))
    }

    fn factor(&mut self) -> Result<GameExpr> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.product(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident();
                self.expect(b'(')?;
                let e = match name {
                    "CM" => GameExpr::Cm(self.positive(1, "m")?),
                    "CMn" => {
                        let n = self.positive(1, "player count")?;
                        self.expect(b',')?;
                        GameExpr::CmN(n, self.positive(1, "m")?)
                    }
                    "O" => GameExpr::Cycle(self.positive(2, "m")?),
                    "Z" => GameExpr::Zigzag(self.positive(1, "m")?),
                    "Sigma" => GameExpr::Sigma(self.positive(2, "m")?),
                    "SigmaR" => GameExpr::SigmaR(self.positive(2, "m")?),
                    "complement" => GameExpr::Complement(Box::new(self.expr()?)),
                    "E" => self.edges()?,
                    _ => {
                        return Err(Error::Syntax {
                            pos: start,
                            msg: format!("unknown game constructor {name:?}"),
                        })
                    }
                };
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
        }
    }

    fn edges(&mut self) -> Result<GameExpr> {
        let a = self.positive(1, "choice count")?;
        self.expect(b'x')?;
        let b = self.positive(1, "choice count")?;
        self.expect(b':')?;
        let mut edges = Vec::new();
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let start = self.pos;
            let i = self.int()?;
            self.expect(b'-')?;
            let j = self.int()?;
            if i >= a || j >= b {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("edge {i}-{j} is outside {a}x{b}"),
                });
            }
            edges.push((i, j));
        }
        Ok(GameExpr::Edges(a, b, edges))
    }
}

pub fn parse_notation(text: &str) -> Result<GameExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    if p.peek().is_none() {
        return p.err("empty game expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    e.n_players()?;
    Ok(e)
}

/// Raw (counts, winning tuples) of an expression, before validation.
fn raw(e: &GameExpr) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    let two = |a: usize, b: usize, edges: Vec<(usize, usize)>| {
        (vec![a, b], edges.into_iter().map(|(i, j)| vec![i, j]).collect())
    };
    Ok(match e {
        GameExpr::Cm(m) => two(*m, *m, (0..*m).map(|i| (i, i)).collect()),
        GameExpr::CmN(n, m) => (vec![*m; *n], (0..*m).map(|i| vec![i; *n]).collect()),
        GameExpr::Cycle(m) => two(
            *m,
            *m,
            (0..*m).flat_map(|i| [(i, i), (i, (i + 1) % m)]).collect(),
        ),
        GameExpr::Zigzag(m) => two(
            *m,
            *m,
            (0..*m)
                .flat_map(|i| [(i, i), (i, i + 1)])
                .filter(|&(_, j)| j < *m)
                .collect(),
        ),
        GameExpr::Sigma(m) => two(m - 1, *m, (0..m - 1).flat_map(|i| [(i, i), (i, i + 1)]).collect()),
        GameExpr::SigmaR(m) => two(*m, m - 1, (0..m - 1).flat_map(|i| [(i, i), (i + 1, i)]).collect()),
        GameExpr::Product(dims) => {
            let mut tuples = vec![Vec::new()];
            for &d in dims {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t: Vec<usize>| {
                        (0..d).map(move |i| {
                            let mut t = t.clone();
                            t.push(i);
                            t
                        })
                    })
                    .collect();
            }
            (dims.clone(), tuples)
        }
        GameExpr::Edges(a, b, edges) => two(*a, *b, edges.clone()),
        GameExpr::Multiple(k, inner) => {
            let part = raw(inner)?;
            let mut acc = part.clone();
            for _ in 1..*k {
                acc = union(acc, part.clone());
            }
            acc
        }
        GameExpr::Sum(a, b) => {
            e.n_players()?;
            union(raw(a)?, raw(b)?)
        }
        GameExpr::Complement(inner) => {
            let g = build(inner)?;
            let c = complement(&g)?;
            (c.counts().to_vec(), c.winning().to_vec())
        }
    })
}

fn union(
    (mut counts, mut winning): (Vec<usize>, Vec<Vec<usize>>),
    (counts_b, winning_b): (Vec<usize>, Vec<Vec<usize>>),
) -> (Vec<usize>, Vec<Vec<usize>>) {
    let offsets = counts.clone();
    for t in winning_b {
        winning.push(t.iter().zip(&offsets).map(|(i, o)| i + o).collect());
    }
    for (c, d) in counts.iter_mut().zip(counts_b) {
        *c += d;
    }
    (counts, winning)
}

pub fn build(e: &GameExpr) -> Result<WlcGame> {
    let (counts, winning) = raw(e)?;
    WlcGame::new(counts, winning)
}

/// Parses and builds in one step.
pub fn build_str(text: &str) -> Result<WlcGame> {
    build(&parse_notation(text)?)
}

impl core::str::FromStr for GameExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_notation(s)
    }
}

/// Notation for a single connected two-player component whose degrees are
/// at most two (a path or an even cycle), in the naming used by the census.
/// `left`/`right` are the component's choice counts and `cycle` tells
/// whether it closes up.
pub fn path_component_name(left: usize, right: usize, cycle: bool) -> String {
    match (left, right, cycle) {
        (a, b, true) => {
            debug_assert_eq!(a, b);
            format!("O({a})")
        }
        (1, 1, false) => "1x1".to_string(),
        (1, 2, false) => "1x2".to_string(),
        (2, 1, false) => "2x1".to_string(),
        (a, b, false) if a == b => format!("Z({a})"),
        (a, b, false) if a + 1 == b => format!("Sigma({b})"),
        (a, b, false) => {
            debug_assert_eq!(a, b + 1);
            format!("SigmaR({a})")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(text: &str) -> usize {
        build_str(text).unwrap().winning().len()
    }

    #[test]
    fn named_constructors() {
        let cm3 = build_str("CM(3)").unwrap();
        assert_eq!(cm3.counts(), &[3, 3]);
        assert!(cm3.is_choice_matching());
        assert_eq!(edges("1x1"), 1);
        let g = build_str("Sigma(3) + 2*(1x1)").unwrap();
        assert_eq!(g.max_choices(), 5);
        assert_eq!(g.winning().len(), 6);
        let o5 = build_str("O(5)").unwrap();
        assert_eq!(o5.total_choices(), 10);
        assert_eq!(o5.winning().len(), 10);
        assert!(o5.all_choices().all(|c| o5.degree(c) == 2));
        let g = build_str("1x2 + 2x1").unwrap();
        assert_eq!(g.degree_multiset(), vec![vec![2, 1, 1], vec![2, 1, 1]]);
        assert_eq!(edges("Z(3)"), 5);
        assert_eq!(build_str("Sigma(4)").unwrap().counts(), &[3, 4]);
        assert_eq!(build_str("SigmaR(4)").unwrap().counts(), &[4, 3]);
        assert_eq!(build_str("CMn(3,4)").unwrap().winning().len(), 4);
        assert_eq!(build_str("2x2x2").unwrap().winning().len(), 8);
        assert_eq!(build_str("O(2)").unwrap(), build_str("2x2").unwrap());
    }

    #[test]
    fn juxtaposed_multiplicity() {
        assert_eq!(build_str("2(1x1)").unwrap(), build_str("CM(2)").unwrap());
        assert_eq!(build_str("3 * 1x1").unwrap(), build_str("CM(3)").unwrap());
    }

    #[test]
    fn numbering_is_player_major_in_written_order() {
        let g = build_str("1x2 + 1x1").unwrap();
        assert_eq!(g.counts(), &[2, 3]);
        assert_eq!(g.winning(), &[vec![0, 0], vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn explicit_edges() {
        let g = build_str("E(3x2: 0-0 0-1 1-1 2-1)").unwrap();
        assert_eq!(g.counts(), &[3, 2]);
        assert_eq!(g.winning().len(), 4);
        assert!(matches!(
            parse_notation("E(2x2: 0-2)"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            parse_notation("CM(3) +"),
            Err(Error::Syntax {
                pos: 7,
                msg: "unexpected end of input".into()
            })
        );
        assert!(matches!(parse_notation(""), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_notation("CQ(3)"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_notation("CM(3))"), Err(Error::Syntax { pos: 5, .. })));
        assert!(matches!(parse_notation("0*(1x1)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_notation("O(1)"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(parse_notation("CM(2) + 2x2x2"), Err(Error::Arity(_))));
        assert!(matches!(parse_notation("CMn(3,2) + 1x1"), Err(Error::Arity(_))));
    }

    #[test]
    fn printer_round_trips() {
        for text in [
            "CM(3)",
            "1x2 + 2x1 + 2*(1x1)",
            "complement(O(5))",
            "3*(Z(2) + 1x1) + (Sigma(3) + SigmaR(3))",
            "E(3x2: 0-0 0-1 1-1 2-1)",
            "CMn(3,2)",
        ] {
            let e = parse_notation(text).unwrap();
            let printed = e.to_string();
            assert_eq!(parse_notation(&printed).unwrap(), e, "{text} -> {printed}");
        }
    }
}
