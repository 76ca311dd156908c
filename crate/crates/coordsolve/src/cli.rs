//! Command-line front end.

use std::path::Path;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use coordsolve_core::analysis::{
    bounds_table, exact_ect, exact_ect_with, formula_e, gct_with, la_cm_closed_form, oscp, summary_table,
    three_choice_fixed_point, wm_ect_bound, wm_vs_la_table, Algebraic, BoundValue, ChainOptions, FormulaEParams,
    GctValue, MarkovQuotient, DEFAULT_MAX_CLASSES, FIXED_POINT_TOLERANCE, GCT_TYPO_NOTE,
};
use coordsolve_core::enumeration::{census_report, game_notation};
use coordsolve_core::montecarlo::{SimConfig, DEFAULT_MAX_ROUNDS};
use coordsolve_core::notation::build_str;
use coordsolve_core::protocols::ProtocolSpec;
use coordsolve_core::rational::{parse_q, q, qi, to_decimal};
use coordsolve_core::symmetry::{canonical_key, conjugates, focal_points, one_round_solvable, stage_symmetry};
use coordsolve_core::{Profile, Stage, Q};

use crate::formats::{load_stage, load_table};
use crate::parallel::simulate_stage_parallel;
use crate::render::{Format, Output};

#[derive(Debug, Error)]
pub enum CliError {
    /// `--help` or `--version` output; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0:#}")]
    Compute(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "coordsolve", version, about = "Exact and simulated coordination times of repeated win-lose coordination games")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Render rationals as decimals with this many digits.
    #[arg(long, global = true, value_name = "N")]
    pub decimal: Option<usize>,
    /// Re-check results against independent formulas and fail on mismatch.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Never emit a timestamp header.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Prefix output with a generation timestamp.
    #[arg(long, global = true)]
    pub timestamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    /// Game notation such as "CM(6)" or "1x2+2x1", or @file.json for a game
    /// or stage.
    #[arg(long)]
    pub game: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact expected coordination time.
    Ect {
        #[command(flatten)]
        game: GameArgs,
        /// wm, la, uniform, touched:P or @table.json
        #[arg(long, default_value = "wm")]
        protocol: String,
        #[arg(long, default_value_t = DEFAULT_MAX_CLASSES)]
        max_classes: usize,
    },
    /// Guaranteed coordination time (worst case over the protocol's support).
    Gct {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value = "la")]
        protocol: String,
        #[arg(long, default_value_t = DEFAULT_MAX_CLASSES)]
        max_classes: usize,
    },
    /// Probability of coordinating in the next round.
    Oscp {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value = "uniform")]
        protocol: String,
    },
    /// Seeded repeated-play simulation.
    Simulate {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value = "wm")]
        protocol: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: u64,
        /// Emit the round-count histogram instead of the summary.
        #[arg(long)]
        histogram: bool,
    },
    /// Renaming classes, focal points and conjugates of a stage.
    Classify {
        #[command(flatten)]
        game: GameArgs,
    },
    /// Reproduce a summary table.
    Table {
        #[command(subcommand)]
        which: TableKind,
    },
    /// Classified census of m-choice games (m = 3 or 5).
    Census {
        #[arg(long)]
        m: usize,
    },
    /// The two-touched-edge ECT formula and its minimizers.
    FormulaE {
        /// Probability of picking from a touched edge.
        #[arg(long, default_value = "0")]
        p: String,
        /// Number of untouched edges.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        e1: String,
        #[arg(long)]
        e2: String,
        /// Tabulate the formula at p = 0, 1/K, ..., 1 instead.
        #[arg(long, value_name = "K")]
        sweep: Option<usize>,
    },
    /// Stationary values of the symmetric 3-choice analysis.
    FixedPoint,
}

#[derive(Debug, Clone, Subcommand)]
pub enum TableKind {
    /// Optimal ECT and GCT of CM(m) for m = 1..max-m.
    Summary {
        #[arg(long, default_value_t = 9)]
        max_m: usize,
    },
    /// Greatest optimal ECT among m-choice games.
    Bounds {
        #[arg(long, default_value_t = 9)]
        max_m: usize,
    },
    /// WM against LA on odd CM(m).
    WmVsLa {
        #[arg(long, default_value_t = 9)]
        max_m: usize,
    },
}

/// Parses `argv` (including the program name) and runs the command,
/// returning the complete output.
pub fn run<I, T>(argv: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp
        | clap::error::ErrorKind::DisplayVersion
        | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => CliError::Help(e.render().to_string()),
        _ => CliError::Usage(e.render().to_string()),
    })?;
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let ctx = Ctx { common: &cli.common };
    let out = match &cli.command {
        Command::Ect { game, protocol, max_classes } => ctx.ect(game, protocol, *max_classes)?,
        Command::Gct { game, protocol, max_classes } => ctx.gct(game, protocol, *max_classes)?,
        Command::Oscp { game, protocol } => ctx.oscp(game, protocol)?,
        Command::Simulate {
            game,
            protocol,
            trials,
            seed,
            max_rounds,
            histogram,
        } => ctx.simulate(
            game,
            protocol,
            SimConfig {
                trials: *trials,
                seed: *seed,
                max_rounds: *max_rounds,
            },
            *histogram,
        )?,
        Command::Classify { game } => ctx.classify(game)?,
        Command::Table { which } => match which {
            TableKind::Summary { max_m } => ctx.summary(*max_m)?,
            TableKind::Bounds { max_m } => ctx.bounds(*max_m)?,
            TableKind::WmVsLa { max_m } => ctx.wm_vs_la(*max_m)?,
        },
        Command::Census { m } => ctx.census(*m)?,
        Command::FormulaE { p, n, e1, e2, sweep } => ctx.formula_e(p, *n, e1, e2, *sweep)?,
        Command::FixedPoint => ctx.fixed_point()?,
    };
    let header = (cli.common.timestamp && !cli.common.deterministic).then(|| {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        format!("generated at unix time {secs}")
    });
    Ok(out.render(cli.common.format, header.as_deref()))
}

/// Resolves `--game`: notation, or `@path` to a JSON game/stage file.
pub fn resolve_stage(spec: &str) -> Result<(Stage, String), CliError> {
    if let Some(path) = spec.strip_prefix('@') {
        let stage = load_stage(Path::new(path)).map_err(usage)?;
        let name = game_notation(stage.game()).unwrap_or_else(|_| path.to_string());
        Ok((stage, name))
    } else {
        let g = build_str(spec).map_err(|e| usage(format!("--game {spec:?}: {e}")))?;
        Ok((Stage::initial(Arc::new(g)), spec.trim().to_string()))
    }
}

/// Resolves `--protocol`: a built-in name, `touched:p`, or `@table.json`.
pub fn resolve_protocol(spec: &str) -> Result<ProtocolSpec, CliError> {
    match spec.strip_prefix('@') {
        Some(path) => load_table(Path::new(path)).map_err(usage),
        None => ProtocolSpec::parse(spec).map_err(|e| usage(format!("--protocol: {e}"))),
    }
}

fn history_text(stage: &Stage) -> String {
    let parts: Vec<String> = stage.history().iter().map(|p| profile_text(stage, p)).collect();
    parts.join(" ")
}

fn profile_text(stage: &Stage, p: &Profile) -> String {
    let g = stage.game();
    let parts: Vec<String> = p.choices().map(|c| g.label(c)).collect();
    format!("({})", parts.join(","))
}

fn verify_failed(what: impl std::fmt::Display) -> CliError {
    CliError::Compute(anyhow!("verification failed: {what}"))
}

struct Ctx<'a> {
    common: &'a Common,
}

impl Ctx<'_> {
    fn q(&self, x: &Q) -> String {
        match self.common.decimal {
            Some(d) => to_decimal(x, d),
            None => x.to_string(),
        }
    }

    fn alg(&self, a: &Algebraic) -> String {
        match self.common.decimal {
            Some(d) => a.decimal(d),
            None => a.to_string(),
        }
    }

    fn ect(&self, game: &GameArgs, protocol: &str, max_classes: usize) -> Result<Output, CliError> {
        let (stage, name) = resolve_stage(&game.game)?;
        let p = resolve_protocol(protocol)?;
        let opts = ChainOptions {
            max_classes,
            ..ChainOptions::default()
        };
        let r = exact_ect_with(&stage, &p, opts).context("exact ECT")?;
        if self.common.verify {
            verify_ect(&stage, &p, &r.value, opts)?;
        }
        let v = self.q(&r.value);
        Ok(Output::record(vec![
            ("game", json!(name)),
            ("history", json!(history_text(&stage))),
            ("protocol", json!(p.name())),
            ("ect", json!(v)),
            ("chain_size", json!(r.chain_size)),
        ])
        .with_text(v))
    }

    fn gct(&self, game: &GameArgs, protocol: &str, max_classes: usize) -> Result<Output, CliError> {
        let (stage, name) = resolve_stage(&game.game)?;
        let p = resolve_protocol(protocol)?;
        let opts = ChainOptions {
            max_classes,
            ..ChainOptions::default()
        };
        let r = gct_with(&stage, &p, opts).context("GCT")?;
        let witness: Vec<String> = r.witness.iter().map(|w| profile_text(&stage, w)).collect();
        if self.common.verify {
            verify_gct(&stage, &p, r.value, &r.witness)?;
        }
        let v = r.value.to_string();
        Ok(Output::record(vec![
            ("game", json!(name)),
            ("history", json!(history_text(&stage))),
            ("protocol", json!(p.name())),
            ("gct", json!(v)),
            ("witness", json!(witness.join(" "))),
        ])
        .with_text(v))
    }

    fn oscp(&self, game: &GameArgs, protocol: &str) -> Result<Output, CliError> {
        let (stage, name) = resolve_stage(&game.game)?;
        let p = resolve_protocol(protocol)?;
        let x = oscp(&stage, &p).context("OSCP")?;
        if self.common.verify && stage.rounds() == 0 && p == ProtocolSpec::Uniform {
            let g = stage.game();
            let direct = q(g.winning().len() as i64, g.product_size() as i64);
            if direct != x {
                return Err(verify_failed(format!("OSCP {x} but |W|/|C1×C2| = {direct}")));
            }
        }
        let v = self.q(&x);
        Ok(Output::record(vec![
            ("game", json!(name)),
            ("history", json!(history_text(&stage))),
            ("protocol", json!(p.name())),
            ("oscp", json!(v)),
        ])
        .with_text(v))
    }

    fn simulate(&self, game: &GameArgs, protocol: &str, cfg: SimConfig, histogram: bool) -> Result<Output, CliError> {
        let (stage, name) = resolve_stage(&game.game)?;
        let p = resolve_protocol(protocol)?;
        if cfg.trials == 0 || cfg.max_rounds == 0 {
            return Err(usage("--trials and --max-rounds must be at least 1"));
        }
        let r = simulate_stage_parallel(&stage, &p, &cfg).context("simulation")?;
        let mut notes = Vec::new();
        if self.common.verify {
            let exact = coordsolve_core::analysis::exact_ect_from(&stage, &p).context("exact ECT for --verify")?;
            let e = coordsolve_core::rational::to_f64(&exact.value);
            let z = (r.mean_rounds - e) / r.std_error;
            let within = (r.mean_rounds - e).abs() <= 3.0 * r.std_error || (r.std_error == 0.0 && r.mean_rounds == e);
            if !within {
                return Err(verify_failed(format!(
                    "mean {} is {z:.2} standard errors from the exact {}",
                    r.mean_rounds, exact.value
                )));
            }
            notes.push(format!("verified: exact ECT {} within 3 standard errors", exact.value));
        }
        if histogram {
            let mut out = Output::table(&["rounds", "count"]);
            for (k, c) in &r.histogram {
                out.push(vec![json!(k), json!(c)]);
            }
            if r.truncated > 0 {
                out.push(vec![json!(format!(">{}", cfg.max_rounds)), json!(r.truncated)]);
            }
            out.notes = notes;
            return Ok(out);
        }
        let fields = vec![
            ("game", json!(name)),
            ("protocol", json!(p.name())),
            ("trials", json!(r.trials)),
            ("seed", json!(r.seed)),
            ("max_rounds", json!(r.max_rounds)),
            ("mean_rounds", json!(r.mean_rounds)),
            ("std_error", json!(r.std_error)),
            ("truncated", json!(r.truncated)),
            ("max_observed", json!(r.max_observed)),
            ("first_round_wins", json!(r.first_round_wins)),
            ("generator", json!(r.generator)),
        ];
        let text: Vec<String> = fields
            .iter()
            .map(|(k, v)| match v {
                Value::Number(n) if n.is_f64() => format!("{k}: {:.6}", n.as_f64().unwrap_or(f64::NAN)),
                Value::String(s) => format!("{k}: {s}"),
                other => format!("{k}: {other}"),
            })
            .collect();
        let mut out = Output::record(fields);
        out.notes = notes;
        Ok(out.with_text(text.join("\n")))
    }

    fn classify(&self, game: &GameArgs) -> Result<Output, CliError> {
        let (stage, name) = resolve_stage(&game.game)?;
        let g = stage.game();
        let sym = stage_symmetry(&stage).context("symmetry")?;
        let focal = focal_points(&stage).context("focal points")?;
        let conj = if g.is_choice_matching() {
            Some(conjugates(&stage).context("conjugates")?)
        } else {
            None
        };
        let solvable = if stage.is_final() {
            None
        } else {
            one_round_solvable(&stage).context("one-round check")?
        };
        let key = canonical_key(&stage).context("class key")?;
        let block_text = |b: &[coordsolve_core::ChoiceId]| {
            let parts: Vec<String> = b.iter().map(|&c| g.label(c)).collect();
            format!("{{{}}}", parts.join(","))
        };
        let classes: Vec<String> = sym.partition.blocks.iter().map(|b| block_text(b)).collect();
        let focal_text: Vec<String> = focal.iter().map(|&c| g.label(c)).collect();
        let conj_text: Option<Vec<String>> = conj
            .as_ref()
            .map(|v| v.iter().map(|(a, b)| format!("({},{})", g.label(*a), g.label(*b))).collect());
        let solvable_text = match &solvable {
            Some((a, b)) => format!("yes: {} x {}", block_text(a), block_text(b)),
            None => "no".into(),
        };
        if self.common.format == Format::Csv {
            let mut out = Output::table(&["choice", "player", "class", "focal"]);
            for c in g.all_choices() {
                let class = sym.partition.blocks.iter().position(|b| b.contains(&c)).unwrap_or(0);
                out.push(vec![
                    json!(g.label(c)),
                    json!(c.player + 1),
                    json!(class),
                    json!(focal.contains(&c)),
                ]);
            }
            return Ok(out);
        }
        let mut lines = vec![
            format!("game: {name}"),
            format!("history: {}", history_text(&stage)),
            format!("renamings: {}", sym.order),
            format!("player swap: {}", if sym.has_swap { "yes" } else { "no" }),
            format!("classes: {}", classes.join(" ")),
            format!("focal points: {}", focal_text.join(" ")),
        ];
        if let Some(c) = &conj_text {
            lines.push(format!("conjugates: {}", c.join(" ")));
        }
        lines.push(format!("one-round solvable: {solvable_text}"));
        lines.push(format!("class key: {key}"));
        Ok(Output::record(vec![
            ("game", json!(name)),
            ("history", json!(history_text(&stage))),
            ("renamings", json!(sym.order.to_string())),
            ("player_swap", json!(sym.has_swap)),
            ("classes", json!(classes)),
            ("focal_points", json!(focal_text)),
            ("conjugates", json!(conj_text)),
            ("one_round_solvable", json!(solvable_text)),
            ("class_key", json!(key.to_string())),
        ])
        .with_text(lines.join("\n")))
    }

    fn summary(&self, max_m: usize) -> Result<Output, CliError> {
        let rows = summary_table(max_m).context("summary table")?;
        let mut out = Output::table(&["m", "ect", "ect_protocol", "gct", "gct_protocol"]);
        for r in &rows {
            if self.common.verify {
                if r.ect != r.expected_ect {
                    return Err(verify_failed(format!("m = {}: ECT {} but closed form {}", r.m, r.ect, r.expected_ect)));
                }
                if r.gct != r.expected_gct {
                    return Err(verify_failed(format!("m = {}: GCT {} but expected {}", r.m, r.gct, r.expected_gct)));
                }
            }
            out.push(vec![
                json!(r.m),
                json!(self.q(&r.ect)),
                json!(r.ect_protocol),
                json!(r.gct.to_string()),
                json!(r.gct_protocol),
            ]);
        }
        if self.common.verify {
            out.notes.push(format!("verified: {} rows against the closed forms", rows.len()));
        }
        out.notes.push(GCT_TYPO_NOTE.to_string());
        Ok(out)
    }

    fn bounds(&self, max_m: usize) -> Result<Output, CliError> {
        if max_m == 0 {
            return Err(usage("--max-m must be at least 1"));
        }
        let mut out = Output::table(&["m", "bound", "witness"]);
        for m in 1..=max_m {
            let r = bounds_table(m).context("bounds table")?;
            let text = match &r.value {
                BoundValue::Exact(x) => self.q(x),
                BoundValue::Algebraic(a) => self.alg(a),
            };
            if self.common.verify {
                verify_bound(m, &r.value)?;
            }
            out.push(vec![json!(m), json!(text), json!(r.witness)]);
        }
        Ok(out)
    }

    fn wm_vs_la(&self, max_m: usize) -> Result<Output, CliError> {
        let rows = wm_vs_la_table(max_m).context("comparison table")?;
        let mut out = Output::table(&["m", "wm", "la"]);
        for r in &rows {
            if self.common.verify {
                let wm = qi(3) - q(2, r.m as i64);
                let la = la_cm_closed_form(r.m).context("closed form")?.ect;
                if r.wm != wm || r.la != la {
                    return Err(verify_failed(format!("m = {}: ({}, {}) vs ({wm}, {la})", r.m, r.wm, r.la)));
                }
            }
            out.push(vec![json!(r.m), json!(self.q(&r.wm)), json!(self.q(&r.la))]);
        }
        Ok(out)
    }

    fn census(&self, m: usize) -> Result<Output, CliError> {
        if m != 3 && m != 5 {
            return Err(usage(format!("--m must be 3 or 5 (got {m})")));
        }
        let report = census_report(m).context("census")?;
        let mut out = Output::table(&["|W|", "notation", "focal", "solvable", "ect_or_bound", "method"]);
        for e in &report.entries {
            let cert = e.certificate.as_ref();
            let value = match cert {
                Some(coordsolve_core::enumeration::Certificate::Exact { value, .. }) => self.q(value),
                Some(coordsolve_core::enumeration::Certificate::Algebraic { value, .. }) => self.alg(value),
                Some(c) => c.value_text(),
                None => String::new(),
            };
            out.push(vec![
                json!(e.edge_count),
                json!(e.notation),
                json!(if e.has_initial_focal_point { "yes" } else { "no" }),
                json!(if e.one_round_solvable { "yes" } else { "no" }),
                json!(value),
                json!(cert.map(|c| c.method().to_string()).unwrap_or_default()),
            ]);
        }
        if self.common.verify {
            verify_census(m, &report)?;
            out.notes.push("verified: class counts per |W| match the published tables".into());
        }
        if let Some(top) = report.maximal() {
            out.notes.push(format!("greatest optimal ECT: {}", top.notation));
        }
        if let Some(b) = &report.dense_wm_bound {
            out.notes.push(format!("games with |W| > 8: WM bound at most {b}"));
        }
        Ok(out)
    }

    fn formula_e(&self, p: &str, n: usize, e1: &str, e2: &str, sweep: Option<usize>) -> Result<Output, CliError> {
        let parse = |name: &str, t: &str| parse_q(t).map_err(|e| usage(format!("--{name}: {e}")));
        let (e1, e2) = (parse("e1", e1)?, parse("e2", e2)?);
        if let Some(k) = sweep {
            if k == 0 {
                return Err(usage("--sweep must be at least 1"));
            }
            let mut out = Output::table(&["p", "ect"]);
            for i in 0..=k {
                let p = q(i as i64, k as i64);
                let r = formula_e(&FormulaEParams {
                    p: p.clone(),
                    n,
                    e1: e1.clone(),
                    e2: e2.clone(),
                })
                .map_err(usage)?;
                out.push(vec![json!(self.q(&p)), json!(self.q(&r.value))]);
            }
            return Ok(out);
        }
        let p = parse("p", p)?;
        let r = formula_e(&FormulaEParams {
            p: p.clone(),
            n,
            e1: e1.clone(),
            e2: e2.clone(),
        })
        .map_err(usage)?;
        if self.common.verify {
            // direct evaluation of the weighted outcomes
            let nq = qi(n as i64);
            let direct = &p * &p * (q(1, 2) + q(1, 2) * (qi(1) + &e1))
                + qi(2) * &p * (qi(1) - &p) * qi(2)
                + (qi(1) - &p) * (qi(1) - &p) * (qi(1) / &nq + (&nq - qi(1)) / &nq * (qi(1) + &e2));
            if direct != r.value {
                return Err(verify_failed(format!("formula gives {direct}, coefficients give {}", r.value)));
            }
        }
        let fields = vec![
            ("p", json!(self.q(&p))),
            ("value", json!(self.q(&r.value))),
            ("a", json!(self.q(&r.a))),
            ("b", json!(self.q(&r.b))),
            ("c", json!(self.q(&r.c))),
            ("minimizers", json!(r.minimizers.to_string())),
            ("minimum", json!(self.q(&r.minimum))),
        ];
        let text: Vec<String> = fields
            .iter()
            .map(|(k, v)| format!("{k}: {}", v.as_str().unwrap_or_default()))
            .collect();
        Ok(Output::record(fields).with_text(text.join("\n")))
    }

    fn fixed_point(&self) -> Result<Output, CliError> {
        let fp = three_choice_fixed_point().context("fixed point")?;
        if self.common.verify {
            let s17 = 17f64.sqrt();
            let e2 = (3.0 + s17) / 4.0;
            let e1 = (1.0 + (4.0 + s17).sqrt()) / 2.0;
            for (name, got, want) in [("E2", fp.e2.to_f64(), e2), ("E1", fp.e1.to_f64(), e1)] {
                if (got - want).abs() > FIXED_POINT_TOLERANCE {
                    return Err(verify_failed(format!("{name} = {got} vs closed form {want}")));
                }
            }
            for (x0, a, b) in &fp.iterated {
                if (a - e2).abs() > FIXED_POINT_TOLERANCE || (b - e1).abs() > FIXED_POINT_TOLERANCE {
                    return Err(verify_failed(format!("iteration from {x0} reached ({a}, {b})")));
                }
            }
        }
        let mut out = Output::table(&["name", "symbol", "value"]);
        for (name, a) in [("E2", &fp.e2), ("p2", &fp.p2), ("E1", &fp.e1), ("p1", &fp.p1)] {
            let v = match self.common.decimal {
                Some(d) => a.decimal(d),
                None => a.decimal(50),
            };
            out.push(vec![json!(name), json!(a.symbol), json!(v)]);
        }
        for (x0, a, b) in &fp.iterated {
            out.notes.push(format!("damped iteration from {x0:.1}: E2 = {a:.12}, E1 = {b:.12}"));
        }
        Ok(out)
    }
}

fn verify_ect(stage: &Stage, p: &ProtocolSpec, value: &Q, opts: ChainOptions) -> Result<(), CliError> {
    let g = stage.game();
    if *value < qi(1) {
        return Err(verify_failed(format!("ECT {value} is below 1")));
    }
    // a lower bound from the first rounds of the chain
    let chain = MarkovQuotient::build(stage, p, opts).context("chain for --verify")?;
    if !chain.is_stochastic() {
        return Err(verify_failed("transition rows do not sum to 1"));
    }
    let dist = chain.round_distribution(64);
    let won: Q = dist.iter().fold(qi(0), |a, x| a + x);
    let partial = dist
        .iter()
        .enumerate()
        .fold(qi(0), |a, (k, x)| a + qi(k as i64 + 1) * x);
    let lower = partial + qi(65) * (qi(1) - won);
    if lower > *value {
        return Err(verify_failed(format!("first 64 rounds already give {lower} > {value}")));
    }
    if stage.rounds() == 0 {
        let m = g.counts()[0] as i64;
        match p {
            ProtocolSpec::Wm => {
                let bound = wm_ect_bound(g).context("WM bound")?;
                if *value > bound {
                    return Err(verify_failed(format!("WM ECT {value} exceeds 3 − 2p = {bound}")));
                }
                if g.is_choice_matching() && *value != qi(3) - q(2, m) {
                    return Err(verify_failed(format!("WM ECT {value} differs from 3 − 2/{m}")));
                }
            }
            ProtocolSpec::La if g.is_choice_matching() && m % 2 == 1 => {
                let closed = la_cm_closed_form(m as usize).context("closed form")?.ect;
                if *value != closed {
                    return Err(verify_failed(format!("LA ECT {value} differs from closed form {closed}")));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn verify_gct(stage: &Stage, p: &ProtocolSpec, value: GctValue, witness: &[Profile]) -> Result<(), CliError> {
    match value {
        GctValue::Finite(n) => {
            // the witness must be a legal losing run of n − 1 rounds
            if witness.len() as u64 + 1 != n {
                return Err(verify_failed(format!("witness has {} rounds for GCT {n}", witness.len())));
            }
            let mut s = stage.clone();
            for w in witness {
                if stage.game().is_winning(&w.0) {
                    return Err(verify_failed("witness contains a winning profile"));
                }
                s = s.play_round(w).context("replaying witness")?;
            }
            let after = oscp(&s, p).context("OSCP after witness")?;
            if stage.game().is_choice_matching() && stage.rounds() == 0 && *p == ProtocolSpec::La {
                let m = stage.game().counts()[0] as u64;
                if m % 2 == 1 && n != m.div_ceil(2) {
                    return Err(verify_failed(format!("LA GCT {n} differs from ⌈{m}/2⌉")));
                }
            }
            // the last round of the worst run must be a sure win
            if after != qi(1) {
                return Err(verify_failed(format!("after the witness the protocol wins with probability {after}, not 1")));
            }
        }
        GctValue::Infinite => {
            if witness.is_empty() {
                return Err(verify_failed("INFINITE without a witness loop"));
            }
        }
    }
    Ok(())
}

fn verify_bound(m: usize, value: &BoundValue) -> Result<(), CliError> {
    match (m, value) {
        (3, BoundValue::Algebraic(a)) => {
            let want = (1.0 + (4.0 + 17f64.sqrt()).sqrt()) / 2.0;
            if (a.to_f64() - want).abs() > FIXED_POINT_TOLERANCE {
                return Err(verify_failed(format!("m = 3 bound {} vs {want}", a.to_f64())));
            }
        }
        (5, BoundValue::Exact(x)) => {
            let la = exact_ect(&build_str("CM(5)").context("CM(5)")?, &ProtocolSpec::La).context("LA on CM(5)")?;
            if la.value != *x {
                return Err(verify_failed(format!("m = 5 bound {x} vs LA on CM(5) {}", la.value)));
            }
        }
        (_, BoundValue::Exact(x)) => {
            let wm = exact_ect(&build_str(&format!("CM({m})")).context("CM(m)")?, &ProtocolSpec::Wm)
                .context("WM on CM(m)")?;
            if wm.value != *x {
                return Err(verify_failed(format!("m = {m} bound {x} vs WM on CM({m}) {}", wm.value)));
            }
        }
        (_, v) => return Err(verify_failed(format!("m = {m}: unexpected bound {v}"))),
    }
    Ok(())
}

fn verify_census(m: usize, report: &coordsolve_core::enumeration::CensusReport) -> Result<(), CliError> {
    let published: &[(usize, usize)] = match m {
        3 => &[(3, 2), (4, 3), (5, 2), (6, 1)],
        _ => &[(5, 3), (6, 6), (7, 9), (8, 10)],
    };
    for &(w, count) in published {
        let got = report
            .entries
            .iter()
            .filter(|e| !e.special && e.edge_count == w)
            .count();
        if got != count {
            return Err(verify_failed(format!("|W| = {w}: {got} classes, published {count}")));
        }
    }
    let keys: std::collections::BTreeSet<_> = report
        .entries
        .iter()
        .map(|e| coordsolve_core::enumeration::game_key(&e.game))
        .collect();
    if keys.len() != report.entries.len() {
        return Err(verify_failed("census contains isomorphic duplicates"));
    }
    if report.entries.iter().any(|e| e.certificate.is_none()) {
        return Err(anyhow!("census entry without certificate").into());
    }
    Ok(())
}
