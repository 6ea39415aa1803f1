use std::path::Path;

use eloforge::bounds::{self, BoundReport, BoundScale};
use eloforge::potfn::ValidationGrid;
use eloforge::search::{compare, SearchProblem};
use eloforge::strategies::{ladder_transcript, repeat_win};
use eloforge::tails::DEFAULT_QUAD_TOL;
use eloforge::{path_engine, Error, PotFunction, TailFunctions, Transcript};
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::output::{num, opt, write_file, CliError, Outcome, Table};

pub const QUAD_TOL_VAR: &str = "ELOFORGE_QUAD_TOL";

/// Shared run settings recorded in every output header.
pub struct Context {
    pub quad_tol: f64,
    pub seed: u64,
}

impl Context {
    pub fn from_env(seed: u64) -> Result<Self, CliError> {
        let quad_tol = match std::env::var(QUAD_TOL_VAR) {
            Ok(s) => {
                let v: f64 = s.trim().parse().map_err(|_| CliError::flag(QUAD_TOL_VAR, format!("`{s}` is not a number")))?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::flag(QUAD_TOL_VAR, format!("must be positive, got {s}")));
                }
                v
            }
            Err(_) => DEFAULT_QUAD_TOL,
        };
        Ok(Self { quad_tol, seed })
    }

    fn config(&self, subcommand: &str, params: Value) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("subcommand".into(), subcommand.into());
        m.insert("quad_tol".into(), self.quad_tol.into());
        m.insert("seed".into(), self.seed.into());
        if let Value::Object(p) = params {
            m.extend(p);
        }
        m
    }

    fn tails(&self, pot: PotFunction) -> Result<TailFunctions, CliError> {
        TailFunctions::with_tol(pot, self.quad_tol).map_err(|e| CliError::flag(QUAD_TOL_VAR, e))
    }
}

fn is_table_path(arg: &str) -> bool {
    arg.ends_with(".csv") || Path::new(arg).is_file()
}

fn read_table(arg: &str) -> Result<(String, Vec<(f64, f64)>), CliError> {
    let text = std::fs::read_to_string(arg).map_err(|e| CliError::flag("--sigma", format!("cannot read {arg}: {e}")))?;
    let name = Path::new(arg).file_stem().map_or_else(|| arg.to_string(), |s| s.to_string_lossy().into_owned());
    let points = PotFunction::parse_table_csv(&text).map_err(|e| CliError::flag("--sigma", e))?;
    Ok((name, points))
}

/// Resolves `--sigma`, validating table pots against the four assumptions.
pub fn load_pot(arg: &str) -> Result<PotFunction, CliError> {
    if is_table_path(arg) {
        let (name, points) = read_table(arg)?;
        PotFunction::from_table(name, &points).map_err(|e| CliError::flag("--sigma", e))
    } else {
        PotFunction::from_name(arg).map_err(|e| CliError::flag("--sigma", e))
    }
}

fn emit(path: &Option<std::path::PathBuf>, transcript: &Transcript) -> Result<(), CliError> {
    if let Some(p) = path {
        write_file(p, &transcript.to_json(), "--emit")?;
    }
    Ok(())
}

fn path_value(p: &Option<std::path::PathBuf>) -> Value {
    p.as_ref().map_or(Value::Null, |p| p.display().to_string().into())
}

pub fn validate_pot(ctx: &Context, args: &ValidatePotArgs) -> Result<Outcome, CliError> {
    let arg = &args.sigma.sigma;
    let pot = if is_table_path(arg) {
        let (name, points) = read_table(arg)?;
        PotFunction::from_table_unvalidated(name, &points).map_err(|e| CliError::flag("--sigma", e))?
    } else {
        load_pot(arg)?
    };
    let report = pot.validate(&ValidationGrid::default()).map_err(CliError::runtime)?;
    let mut table =
        Table::new(ctx.config("validate-pot", json!({ "sigma": arg })), &["item", "passed", "value", "detail"]);
    for c in &report.checks {
        table.row(vec![format!("assumption_{}", c.assumption), c.passed.to_string(), opt(c.witness), c.detail.clone()]);
    }
    if report.passed() {
        let k = BoundReport::constants_for(&pot, 1.0);
        let constants = [
            ("sup4", Some(report.sup4)),
            ("C1", Some(k.c1)),
            ("C2", Some(k.c2)),
            ("C", Some(k.c)),
            ("A", k.threshold),
            ("c1", k.ladder_c1),
        ];
        for (name, v) in constants {
            let detail = if v.is_none() { "does not exist" } else { "" };
            table.row(vec![name.into(), String::new(), opt(v), detail.into()]);
        }
    }
    Ok(Outcome { text: table.render(), violation: !report.passed() })
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<Outcome, CliError> {
    let pot = load_pot(&args.sigma.sigma)?;
    let tails = ctx.tails(pot.clone())?;
    let k = args.n2_wins;
    let (r, transcript) = repeat_win(&pot, k);
    let (lo, hi) = bounds::theorem1_interval(k, &tails).map_err(|e| CliError::flag("--n2-wins", e))?;
    let inside = lo <= r && r <= hi;
    emit(&args.emit, &transcript)?;
    let cfg = json!({ "sigma": args.sigma.sigma, "n2_wins": k, "emit": path_value(&args.emit) });
    let mut table = Table::new(ctx.config("simulate", cfg), &["sigma", "k", "r", "interval_lo", "interval_hi", "inside"]);
    table.row(vec![pot.name(), k.to_string(), num(r), num(lo), num(hi), inside.to_string()]);
    Ok(Outcome { text: table.render(), violation: !inside })
}

pub fn ladder(ctx: &Context, args: &LadderArgs) -> Result<Outcome, CliError> {
    let pot = load_pot(&args.sigma.sigma)?;
    let k = args.games;
    let cfg = json!({
        "sigma": args.sigma.sigma,
        "games": k,
        "A": args.threshold,
        "certify": args.certify,
        "emit": path_value(&args.emit),
    });
    let config = ctx.config("ladder", cfg);
    let threshold = match args.threshold {
        Some(a) if !(a > 0.0 && a.is_finite()) => return Err(CliError::flag("--A", format!("must be positive, got {a}"))),
        Some(a) => Some(a),
        None => pot.compute_a(),
    };
    let Some(a) = threshold else {
        if args.certify {
            return Err(CliError::flag(
                "--certify",
                format!("{} has no ladder threshold A; pass --A to force a ladder run", pot.name()),
            ));
        }
        let (r, transcript) = repeat_win(&pot, k);
        emit(&args.emit, &transcript)?;
        let mut table = Table::new(config, &["sigma", "k", "strategy", "r1", "players_used"]);
        table.row(vec![pot.name(), k.to_string(), "repeat_win".into(), num(r), (if k == 0 { 0 } else { 2 }).to_string()]);
        return Ok(Outcome { text: table.render(), violation: false });
    };
    let (run, transcript) = match ladder_transcript(&pot, k, a) {
        Ok(v) => v,
        Err(e @ Error::Domain { .. }) => return Err(CliError::flag("--A", e)),
        Err(e) => return Err(CliError::runtime(e)),
    };
    emit(&args.emit, &transcript)?;
    if args.certify {
        let mut table = Table::new(config, &["certificate", "lhs", "rhs", "margin", "holds"]);
        let certs = run.certificates();
        for c in &certs {
            table.row(vec![c.name.into(), num(c.lhs), num(c.rhs), num(c.margin()), c.holds().to_string()]);
        }
        let violation = certs.iter().any(|c| !c.holds());
        return Ok(Outcome { text: table.render(), violation });
    }
    let budget = run.player_budget();
    let mut table = Table::new(
        config,
        &[
            "sigma",
            "k",
            "strategy",
            "A",
            "c1",
            "r1",
            "guarantee",
            "players_used",
            "early_stop_games",
            "early_stop_players",
            "player_cap",
        ],
    );
    let (stop_games, stop_players) = run
        .early_stop
        .as_ref()
        .map_or((String::new(), String::new()), |e| (e.games_played.to_string(), e.players_used.to_string()));
    table.row(vec![
        pot.name(),
        k.to_string(),
        "ladder".into(),
        num(run.threshold),
        num(run.c1),
        num(run.r1),
        num(run.guarantee),
        run.players_used().to_string(),
        stop_games,
        stop_players,
        num(budget.lhs),
    ]);
    Ok(Outcome { text: table.render(), violation: false })
}

pub fn search(ctx: &Context, args: &SearchArgs) -> Result<Outcome, CliError> {
    let pot = load_pot(&args.sigma.sigma)?;
    let tails = ctx.tails(pot.clone())?;
    let mut problem = SearchProblem::new(pot.clone(), args.n, args.k).map_err(|e| {
        let flag = if args.n < 2 || args.n > eloforge::search::MAX_PLAYERS { "-n" } else { "-k" };
        CliError::flag(flag, e)
    })?;
    if args.no_symmetry {
        problem = problem.without_symmetry();
    }
    let c = compare(&problem, &tails).map_err(CliError::runtime)?;
    emit(&args.emit, &c.search.best_transcript)?;
    let cfg = json!({
        "sigma": args.sigma.sigma,
        "n": args.n,
        "k": args.k,
        "symmetry": !args.no_symmetry,
        "emit": path_value(&args.emit),
    });
    let mut table = Table::new(
        ctx.config("search", cfg),
        &[
            "sigma",
            "n",
            "k",
            "optimum",
            "repeat_win",
            "ladder",
            "interval_lo",
            "interval_hi",
            "coro1_cap",
            "nodes_expanded",
            "pruned",
            "consistent",
            "violations",
        ],
    );
    table.row(vec![
        pot.name(),
        args.n.to_string(),
        args.k.to_string(),
        num(c.optimum),
        num(c.repeat_win),
        opt(c.ladder),
        opt(c.theorem1_interval.map(|i| i.0)),
        opt(c.theorem1_interval.map(|i| i.1)),
        num(c.coro1_cap),
        c.search.nodes_expanded.to_string(),
        c.search.pruned.to_string(),
        c.consistent().to_string(),
        c.violations.join("; "),
    ]);
    Ok(Outcome { text: table.render(), violation: !c.consistent() })
}

pub fn bounds(ctx: &Context, args: &BoundsArgs) -> Result<Outcome, CliError> {
    let pot = load_pot(&args.sigma.sigma)?;
    let tails = ctx.tails(pot.clone())?;
    let cfg = json!({
        "sigma": args.sigma.sigma,
        "games": args.games,
        "rating": args.rating,
        "at": args.at,
        "constants": args.constants,
        "a": args.a,
    });
    let config = ctx.config("bounds", cfg);
    if !(args.a > 0.0 && args.a.is_finite()) {
        return Err(CliError::flag("--a", format!("must be positive, got {}", args.a)));
    }
    if let Some(points) = &args.at {
        let mut table = Table::new(config, &["x", "f", "g", "f_inv", "g_inv"]);
        for &x in points {
            let at = |r: eloforge::Result<f64>| r.map_err(|e| CliError::flag("--at", e));
            let f = at(tails.eval_f(x))?;
            let g = at(tails.eval_g(x))?;
            let fi = at(tails.invert_f(x))?;
            let gi = at(tails.invert_g(x))?;
            table.row(vec![num(x), num(f), num(g), num(fi), num(gi)]);
        }
        return Ok(Outcome { text: table.render(), violation: false });
    }
    let report = match (args.games, args.rating) {
        (Some(k), _) => BoundReport::for_games(k, &tails, args.a).map_err(|e| bounds_error(e, "--games"))?,
        (_, Some(r)) => BoundReport::for_rating(r, &tails, args.a).map_err(|e| bounds_error(e, "--rating"))?,
        _ => unreachable!("clap requires one of --games, --rating, --at"),
    };
    let mut header = vec![
        "sigma",
        "scale",
        "value",
        "theorem1_lo",
        "theorem1_hi",
        "ladder_lower",
        "phi_lower",
        "games_lower",
        "rating_cap",
    ];
    let (scale, value) = match report.scale {
        BoundScale::Games(k) => ("games", k.to_string()),
        BoundScale::Rating(r) => ("rating", num(r)),
    };
    let mut row = vec![
        report.sigma_name.clone(),
        scale.into(),
        value,
        opt(report.theorem1_interval.map(|i| i.0)),
        opt(report.theorem1_interval.map(|i| i.1)),
        opt(report.thm2_lower),
        opt(report.lemma3_phi_lb),
        opt(report.thm3_games_lb),
        opt(report.coro1_cap),
    ];
    if args.constants {
        let k = &report.constants;
        header.extend(["C1", "C2", "C", "a", "A", "c1"]);
        row.extend([num(k.c1), num(k.c2), num(k.c), num(k.a), opt(k.threshold), opt(k.ladder_c1)]);
    }
    let mut table = Table::new(config, &header);
    table.row(row);
    Ok(Outcome { text: table.render(), violation: false })
}

fn bounds_error(e: Error, scale_flag: &'static str) -> CliError {
    match e {
        Error::GrowthPremise { .. } => CliError::flag("--a", e),
        e => CliError::flag(scale_flag, e),
    }
}

pub fn certify_path(ctx: &Context, args: &CertifyPathArgs) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::flag("--in", format!("cannot read {}: {e}", args.input.display())))?;
    let transcript = Transcript::from_json(&text).map_err(|e| CliError::flag("--in", e))?;
    let sigma = args.sigma.clone().unwrap_or_else(|| transcript.sigma.clone());
    let pot = load_pot(&sigma)?;
    if !(args.rating.is_finite() && args.rating > 0.0) {
        return Err(CliError::flag("--rating", format!("must be positive, got {}", args.rating)));
    }
    let tails = ctx.tails(pot)?;
    let (_, report) = path_engine::make_upset_free(transcript.n, &transcript.edges(), &tails, args.rating)
        .map_err(|e| match e {
            Error::Domain { .. } => CliError::flag("--rating", e),
            e => CliError::flag("--in", e),
        })?;
    let cfg = json!({
        "sigma": sigma,
        "in": args.input.display().to_string(),
        "rating": args.rating,
    });
    let mut out = match report.to_json() {
        Value::Object(m) => m,
        _ => unreachable!("reports serialize to objects"),
    };
    out.insert("config".into(), Value::Object(ctx.config("certify-path", cfg)));
    let text = serde_json::to_string_pretty(&Value::Object(out)).expect("report serializes") + "\n";
    Ok(Outcome { text, violation: !report.certified() })
}

const TABLE1_SIGMAS: [&str; 5] = ["logistic", "erf", "alg:p=1", "alg:p=2", "alg:p=3"];

pub fn table1(ctx: &Context, args: &Table1Args) -> Result<Outcome, CliError> {
    let k = args.k;
    if k == 0 {
        return Err(CliError::flag("--k", "must be at least 1"));
    }
    let mut table = Table::new(
        ctx.config("table1", json!({ "k": k })),
        &["sigma", "k", "n2_closed_form", "n2_repeat_win", "n_inf_order", "n_inf_formula"],
    );
    for arg in TABLE1_SIGMAS {
        let pot = PotFunction::from_name(arg).expect("built-in name");
        let row = bounds::table1_row(&pot, k).map_err(|e| CliError::flag("--k", e))?;
        let (r, _) = repeat_win(&pot, k);
        table.row(vec![row.sigma_name, k.to_string(), num(row.n2_value), num(r), num(row.n_inf_order), row.n_inf_formula]);
    }
    Ok(Outcome { text: table.render(), violation: false })
}
