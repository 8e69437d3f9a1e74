use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use qualred_core::analysis::{
    check_conditions, check_preservation, check_selected, maximal_elements, ConditionReport, Hypothesis,
    MaximalElements, Verdict,
};
use qualred_core::engine::restrict;
use qualred_core::gamespec::{pairing_to_json, Profile};
use qualred_core::lab::{
    self, discretize, enumerate_maximal_reductions, Check, Constraints, FuzzConfig, GenMode, GeneratorConfig, LabError,
    QMode,
};
use qualred_core::reduction::{
    default_step_op, parse_path_script, run_path, star_reduce, PathMode, ReductionError, ReductionTrace, TraceStatus,
};
use qualred_core::{parse_game, Pairing, QualitativeGame};
use serde_json::{json, Map, Value};

use crate::output::{emit, emit_raw, paint, row, Report};
use crate::{CheckArgs, Format, FuzzArgs, GameArgs, OracleArgs, ReduceArgs};

pub const EXIT_PARSE: u8 = 1;
pub const EXIT_INVALID_PATH: u8 = 2;
pub const EXIT_CAPPED: u8 = 3;
pub const EXIT_VACUOUS: u8 = 4;
pub const EXIT_CHECK_FAILED: u8 = 5;
pub const EXIT_NOT_EQUAL: u8 = 6;
pub const EXIT_BOUND: u8 = 7;

/// An error carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn fail(code: u8, message: impl Into<String>) -> anyhow::Error {
    Failure {
        code,
        message: message.into(),
    }
    .into()
}

fn load(args: &GameArgs) -> Result<QualitativeGame> {
    let text = std::fs::read_to_string(&args.game).with_context(|| format!("reading {}", args.game.display()))?;
    let game = parse_game(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", args.game.display())))?;
    match &args.grid {
        None => Ok(game),
        Some(step) => {
            let step = qualred_intervalset::parse_rational(step).map_err(|e| anyhow!("bad grid step `{step}`: {e}"))?;
            Ok(discretize(&game, &step)?)
        }
    }
}

fn pairing_cells(game: &QualitativeGame, h: &Pairing) -> Vec<String> {
    h.factors()
        .iter()
        .enumerate()
        .map(|(i, f)| game.render_set(i, f))
        .collect()
}

fn pairing_text(game: &QualitativeGame, h: &Pairing) -> String {
    pairing_cells(game, h)
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{} = {s}", i + 1))
        .collect::<Vec<_>>()
        .join("; ")
}

fn status_code(status: TraceStatus) -> u8 {
    match status {
        TraceStatus::Converged => 0,
        TraceStatus::Capped => EXIT_CAPPED,
        TraceStatus::Vacuous => EXIT_VACUOUS,
    }
}

fn trace_for(game: &QualitativeGame, args: &ReduceArgs, mode: PathMode) -> Result<ReductionTrace> {
    let max_iters = args.max_iters as usize;
    let Some(path) = &args.path else {
        return Ok(star_reduce(game, args.op, max_iters));
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let script = parse_path_script(game, &text).map_err(|e| fail(EXIT_INVALID_PATH, script_error(path, &e)))?;
    let step_op = args.path_op.unwrap_or_else(|| default_step_op(args.op));
    run_path(game, args.op, step_op, &script, mode, max_iters)
        .map_err(|e| fail(EXIT_INVALID_PATH, script_error(path, &e)))
}

fn script_error(path: &Path, e: &ReductionError) -> String {
    format!("{}: {e}", path.display())
}

fn trace_rows(game: &QualitativeGame, trace: &ReductionTrace) -> Vec<Vec<String>> {
    let mut rows = vec![row(["stage", "player", "set", "eliminated"])];
    for (t, h) in trace.stages.iter().enumerate() {
        for (i, cell) in pairing_cells(game, h).into_iter().enumerate() {
            let removed = trace
                .eliminated
                .get(t)
                .map(|e| game.render_set(i, &e[i]))
                .unwrap_or_default();
            rows.push(vec![t.to_string(), (i + 1).to_string(), cell, removed]);
        }
    }
    rows
}

fn trace_text(game: &QualitativeGame, trace: &ReductionTrace) -> String {
    let mut s = format!(
        "{} under {}: {}\n",
        game.name,
        trace.op,
        paint(trace.status.name(), trace.status == TraceStatus::Converged)
    );
    for (t, h) in trace.stages.iter().enumerate() {
        s += &format!("stage {t}: {}\n", pairing_text(game, h));
        if let Some(step) = trace.steps.get(t) {
            let removed = Pairing::new(trace.eliminated[t].clone());
            let kind = if step.scripted { "scripted" } else { "fast" };
            s += &format!("  {kind} step removes {}\n", pairing_text(game, &removed));
            if let Some(w) = &step.violation {
                s += &format!(
                    "  {}: player {} strategy {} ({})\n",
                    paint("invalid", false),
                    w.player + 1,
                    game.render_strategy(w.player, &w.strategy),
                    w.note
                );
            }
            if !step.scripted && !step.fast_audit.holds {
                s += &format!("  fast condition: {}\n", paint("fails", false));
            }
        }
    }
    s
}

fn conditions_json(game: &QualitativeGame, report: &ConditionReport, which: (bool, bool)) -> Value {
    Value::Array(
        report
            .stages
            .iter()
            .map(|s| {
                let mut m = Map::new();
                m.insert("stage".into(), json!(s.stage));
                if which.0 {
                    m.insert("C".into(), s.c.to_json(game));
                }
                if which.1 {
                    m.insert("D".into(), s.d.to_json(game));
                }
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn reduce(args: &ReduceArgs) -> Result<u8> {
    let game = load(&args.game)?;
    let trace = trace_for(&game, args, PathMode::Strict)?;
    let conditions = args.conditions.then(|| check_conditions(&game, &trace));
    let mut json = trace.to_json(&game);
    json["game"] = json!(game.name);
    json["valid_path"] = json!(trace.is_valid_path());
    if let Some(c) = &conditions {
        json["conditions"] = conditions_json(&game, c, (true, true));
    }
    let csv = || trace_rows(&game, &trace);
    let text = || {
        let mut s = trace_text(&game, &trace);
        if let Some(c) = &conditions {
            for st in &c.stages {
                s += &format!(
                    "stage {}: C {}, D {}\n",
                    st.stage,
                    paint(st.c.name(), st.c.holds()),
                    paint(st.d.name(), st.d.holds())
                );
            }
        }
        s
    };
    emit(
        &args.game.common,
        Format::Json,
        Report {
            json,
            csv: &csv,
            text: &text,
        },
    )?;
    Ok(status_code(trace.status))
}

fn parse_list<T: std::str::FromStr<Err = String>>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow!(e)))
        .collect()
}

fn verdict_text(game: &QualitativeGame, v: &Verdict) -> String {
    match v {
        Verdict::Holds => paint("holds", true),
        Verdict::NotApplicable(why) => format!("{} ({why})", paint("not-applicable", false)),
        Verdict::Fails(w) => {
            let mut s = paint("fails", false);
            s += &format!(" for player {}", w.player + 1);
            if let Some(p) = &w.profile {
                s += &format!(" at {}", game.render_profile(p));
            }
            if let Some(x) = &w.strategy {
                s += &format!(" with {}", game.render_strategy(w.player, x));
            }
            if !w.note.is_empty() {
                s += &format!(": {}", w.note);
            }
            s
        }
    }
}

fn verdict_witness(game: &QualitativeGame, v: &Verdict) -> String {
    match v {
        Verdict::Holds => String::new(),
        Verdict::NotApplicable(why) => why.clone(),
        Verdict::Fails(w) => w.to_json(game).to_string(),
    }
}

pub fn check(args: &CheckArgs) -> Result<u8> {
    let game = load(&args.game)?;
    let hypotheses: Option<Vec<Hypothesis>> = match (&args.hypotheses, &args.conditions) {
        (Some(h), _) if h.trim().eq_ignore_ascii_case("all") => Some(Hypothesis::ALL.to_vec()),
        (Some(h), _) => Some(parse_list(h)?),
        (None, None) => Some(Hypothesis::ALL.to_vec()),
        (None, Some(_)) => None,
    };
    let which = match &args.conditions {
        None => None,
        Some(c) => {
            let mut which = (false, false);
            for name in c.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match name.to_ascii_uppercase().as_str() {
                    "C" => which.0 = true,
                    "D" => which.1 = true,
                    _ => bail!("unknown condition `{name}` (expected C or D)"),
                }
            }
            Some(which)
        }
    };
    let hyp_report = hypotheses.map(|h| check_selected(&game, &h));
    let cond = which.map(|w| {
        let trace = star_reduce(&game, args.op, args.max_iters as usize);
        (w, check_conditions(&game, &trace))
    });
    let hyp_ok = hyp_report.as_ref().is_none_or(|r| r.all_hold());
    let cond_ok = cond
        .as_ref()
        .is_none_or(|((c, d), r)| (!c || r.c_holds()) && (!d || r.d_holds()));
    let holds = hyp_ok && cond_ok;

    let mut json = json!({ "game": game.name, "holds": holds });
    if let Some(r) = &hyp_report {
        json["hypotheses"] = r.to_json(&game);
    }
    if let Some((w, r)) = &cond {
        json["conditions"] = json!({ "op": args.op.name(), "stages": conditions_json(&game, r, *w) });
    }
    let csv = || {
        let mut rows = vec![row(["check", "stage", "verdict", "witness"])];
        if let Some(r) = &hyp_report {
            for (h, v) in &r.entries {
                rows.push(vec![
                    h.name().into(),
                    String::new(),
                    v.name().into(),
                    verdict_witness(&game, v),
                ]);
            }
        }
        if let Some(((c, d), r)) = &cond {
            for st in &r.stages {
                for (on, name, v) in [(*c, "C", &st.c), (*d, "D", &st.d)] {
                    if on {
                        rows.push(vec![
                            name.into(),
                            st.stage.to_string(),
                            v.name().into(),
                            verdict_witness(&game, v),
                        ]);
                    }
                }
            }
        }
        rows
    };
    let text = || {
        let mut s = String::new();
        if let Some(r) = &hyp_report {
            for (h, v) in &r.entries {
                s += &format!("{}: {}\n", h.name(), verdict_text(&game, v));
            }
        }
        if let Some(((c, d), r)) = &cond {
            for st in &r.stages {
                for (on, name, v) in [(*c, "C", &st.c), (*d, "D", &st.d)] {
                    if on {
                        s += &format!("{name} at stage {}: {}\n", st.stage, verdict_text(&game, v));
                    }
                }
            }
        }
        s
    };
    emit(
        &args.game.common,
        Format::Json,
        Report {
            json,
            csv: &csv,
            text: &text,
        },
    )?;
    Ok(if holds { 0 } else { EXIT_CHECK_FAILED })
}

fn maximal_rows(game: &QualitativeGame, m: &MaximalElements) -> Vec<Vec<String>> {
    let n = game.players();
    let mut rows = vec![(1..=n).map(|i| format!("player{i}")).collect::<Vec<_>>()];
    match m {
        MaximalElements::Profiles(ps) => {
            for p in ps {
                rows.push(
                    game.profile_strategies(p)
                        .iter()
                        .enumerate()
                        .map(|(i, s)| game.render_strategy(i, s))
                        .collect(),
                );
            }
        }
        MaximalElements::Region(cells) => {
            for c in cells {
                let mut r: Vec<String> = c.factors.iter().map(|f| f.to_string()).collect();
                if !c.relations.is_empty() {
                    r.push(c.describe());
                }
                rows.push(r);
            }
        }
    }
    rows
}

fn maximal_text(game: &QualitativeGame, m: &MaximalElements) -> String {
    let lines: Vec<String> = match m {
        MaximalElements::Profiles(ps) => ps.iter().map(|p| game.render_profile(p)).collect(),
        MaximalElements::Region(cells) => cells.iter().map(|c| c.describe()).collect(),
    };
    if lines.is_empty() {
        "no maximal elements".into()
    } else {
        lines.join("\n")
    }
}

pub fn maximal(args: &GameArgs) -> Result<u8> {
    let game = load(args)?;
    let m = maximal_elements(&game);
    let csv = || maximal_rows(&game, &m);
    let text = || maximal_text(&game, &m);
    emit(
        &args.common,
        Format::Json,
        Report {
            json: m.to_json(&game),
            csv: &csv,
            text: &text,
        },
    )?;
    Ok(0)
}

pub fn preserve(args: &ReduceArgs) -> Result<u8> {
    let game = load(&args.game)?;
    let trace = trace_for(&game, args, PathMode::Audit)?;
    let report = check_preservation(&game, &trace);
    let reduced = restrict(&game, trace.limit());
    let mut json = report.to_json(&game, &reduced);
    json["game"] = json!(game.name);
    json["op"] = json!(args.op.name());
    json["limit"] = pairing_to_json(&game, trace.limit());
    let verdict = if report.equal() { "EQUAL" } else { "NOT-EQUAL" };
    let render = |ps: &[Profile]| ps.iter().map(|p| game.render_profile(p)).collect::<Vec<_>>().join(" ");
    let csv = || {
        vec![
            row([
                "verdict",
                "label",
                "limit",
                "only_original",
                "only_reduced",
                "trace_valid",
            ]),
            vec![
                verdict.into(),
                report.label.name().into(),
                pairing_text(&game, trace.limit()),
                render(&report.only_original),
                render(&report.only_reduced),
                report.trace_valid.to_string(),
            ],
        ]
    };
    let text = || {
        let mut s = format!("{} ({})\n", paint(verdict, report.equal()), report.label.name());
        s += &format!("limit: {}\n", pairing_text(&game, trace.limit()));
        s += &format!(
            "maximal in G: {}\n",
            maximal_text(&game, &report.original).replace('\n', " ")
        );
        s += &format!(
            "maximal in the reduction: {}\n",
            maximal_text(&reduced, &report.reduced).replace('\n', " ")
        );
        if !report.only_original.is_empty() {
            s += &format!("only in G: {}\n", render(&report.only_original));
        }
        if !report.only_reduced.is_empty() {
            s += &format!("only in the reduction: {}\n", render(&report.only_reduced));
        }
        if !report.trace_valid {
            s += "the elimination path contains invalid steps\n";
        }
        s
    };
    emit(
        &args.game.common,
        Format::Json,
        Report {
            json,
            csv: &csv,
            text: &text,
        },
    )?;
    Ok(if report.equal() { 0 } else { EXIT_NOT_EQUAL })
}

pub fn oracle(args: &OracleArgs) -> Result<u8> {
    let game = load(&args.game)?;
    let r = match enumerate_maximal_reductions(&game, args.op, args.bound) {
        Ok(r) => r,
        Err(e @ LabError::BoundExceeded { .. }) => return Err(fail(EXIT_BOUND, e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let json = json!({
        "game": game.name,
        "op": args.op.name(),
        "count": r.limits.len(),
        "maximal_reductions": r.limits.iter().map(|h| pairing_to_json(&game, h)).collect::<Vec<_>>(),
        "d_everywhere": r.d_everywhere,
        "visited": r.visited,
    });
    let csv = || {
        let mut rows = vec![std::iter::once("index".to_string())
            .chain((1..=game.players()).map(|i| format!("player{i}")))
            .collect::<Vec<_>>()];
        for (k, h) in r.limits.iter().enumerate() {
            rows.push(std::iter::once(k.to_string()).chain(pairing_cells(&game, h)).collect());
        }
        rows
    };
    let text = || {
        let mut s = format!("{} maximal reduction(s) under {}\n", r.limits.len(), args.op);
        for h in &r.limits {
            s += &format!("  {}\n", pairing_text(&game, h));
        }
        s += &format!(
            "condition D along every order: {}\n",
            paint(if r.d_everywhere { "holds" } else { "fails" }, r.d_everywhere)
        );
        s
    };
    emit(
        &args.game.common,
        Format::Json,
        Report {
            json,
            csv: &csv,
            text: &text,
        },
    )?;
    Ok(0)
}

fn fuzz_config(args: &FuzzArgs) -> Result<FuzzConfig> {
    if args.players < 2 {
        bail!("need at least two players");
    }
    let sizes = match &args.sizes {
        Some(s) if s.len() != args.players => bail!("--sizes lists {} counts for {} players", s.len(), args.players),
        Some(s) => s.clone(),
        None => vec![3; args.players],
    };
    let mode: GenMode = args.mode.parse().map_err(|e: String| anyhow!(e))?;
    let mut generator = GeneratorConfig::new(sizes, args.seed, mode);
    generator.q = args.q.parse::<QMode>().map_err(|e| anyhow!(e))?;
    let mut constraints = Constraints::default();
    for c in args.constrain.iter().flatten() {
        match c.trim().to_ascii_lowercase().as_str() {
            "irreflexive" => constraints.irreflexive = true,
            "propertyt-pair" => constraints.property_t_pair = true,
            "q-reflexive" => constraints.q_reflexive = true,
            other => bail!("unknown constraint `{other}` (expected irreflexive, propertyT-pair or q-reflexive)"),
        }
    }
    generator.constraints = constraints;
    let mut cfg = FuzzConfig::new(generator, args.trials);
    cfg.random_sizes = args.max_size;
    if let Some(checks) = &args.check {
        cfg.checks = checks
            .iter()
            .map(|c| c.parse::<Check>().map_err(|e| anyhow!(e)))
            .collect::<Result<_>>()?;
    }
    cfg.ops = args.ops.clone();
    cfg.oracle_op = args.oracle_op;
    cfg.oracle_bound = args.oracle_bound;
    cfg.max_iters = args.max_iters as usize;
    Ok(cfg)
}

pub fn fuzz(args: &FuzzArgs) -> Result<u8> {
    let cfg = fuzz_config(args)?;
    let report = lab::fuzz(&cfg)?;
    match args.common.format.unwrap_or(Format::Csv) {
        Format::Csv => emit_raw(&args.common, report.to_csv())?,
        format => {
            let text = || {
                let mut s = format!("{} trials, master seed {}\n", report.trials.len(), report.master_seed);
                s += &format!("order-dependent games: {}\n", report.order_dependent());
                for c in &report.checks {
                    let v = report.violations(*c);
                    s += &format!("{c}: {} violation(s)\n", paint(&v.to_string(), v == 0));
                }
                for f in &report.findings {
                    s += &format!(
                        "\n{} in trial {} (seed {}): {}\n{}",
                        f.check, f.trial, f.seed, f.detail, f.shrunk
                    );
                }
                s
            };
            let csv = Vec::new;
            let common = crate::Common {
                format: Some(format),
                out: args.common.out.clone(),
            };
            emit(
                &common,
                Format::Json,
                Report {
                    json: report.to_json(),
                    csv: &csv,
                    text: &text,
                },
            )?;
        }
    }
    Ok(if report.findings.is_empty() {
        0
    } else {
        EXIT_CHECK_FAILED
    })
}
