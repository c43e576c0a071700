//! The `safe-diffusion` command line.
//!
//! Data goes to `out`, diagnostics to `err`. Exit status is 0 on success,
//! 1 on bad input and 2 when a result fails its own verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::css::{self, CssOptions};
use crate::error::{Error, Result};
use crate::experiment::{self, ExperimentConfig};
use crate::game::{self, Color};
use crate::io::{self, NumberFormat};
use crate::ratio;
use crate::special::{self, MaryTreeSpec, SpiderSpec};
use crate::tree::{self, Tree};
use crate::zerosum;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "safe-diffusion", version, about = "Safe strategies for two-player competitive diffusion on trees")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Render numbers as decimals instead of exact "p/q" strings.
    #[arg(long, global = true)]
    float: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
struct TreeSource {
    /// Edge-list file: vertex count on the first line, then one "u v" pair per line.
    #[arg(long, value_name = "FILE")]
    tree: Option<PathBuf>,
    /// Spider with M legs of length L.
    #[arg(long, num_args = 2, value_names = ["M", "L"])]
    spider: Option<Vec<usize>>,
    /// Complete M-ary tree of height H.
    #[arg(long, num_args = 2, value_names = ["M", "H"])]
    ctree: Option<Vec<usize>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weights, centroid and centroid kind.
    Centroid(TreeSource),
    /// Player 1's payoff matrix.
    Matrix(TreeSource),
    /// Round-by-round diffusion from two starts.
    Simulate {
        #[command(flatten)]
        source: TreeSource,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
    },
    /// Exact safety value with both optimal strategies.
    Value(TreeSource),
    /// Centroidal safe strategy.
    Css {
        /// Tree file (same as --tree).
        file: Option<PathBuf>,
        #[command(flatten)]
        source: TreeSource,
        /// Reject bicentroidal trees instead of rooting at the smaller centroid vertex.
        #[arg(long)]
        strict_centroidal: bool,
    },
    /// Strategy C_S(k) on a spider; without --k the best k is searched.
    Spider {
        legs: usize,
        leg_length: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Value and optimal strategies of a complete tree.
    Ctree { arity: usize, height: usize },
    /// Random centroidal trees: CSS against an upper bound.
    Experiment {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        exact_threshold: Option<usize>,
        /// key=value file; flags override it.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Where records.csv and histogram.csv are written.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
}

enum Failure {
    Input(Error),
    Verify(String, Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.into())
    }
}

struct Output {
    text: String,
}

impl Output {
    fn json(v: &Value) -> Output {
        Output { text: format!("{}\n", serde_json::to_string_pretty(v).expect("json value")) }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            EXIT_OK
        }
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
        Err(Failure::Verify(msg, doc)) => {
            let _ = out.write_all(Output::json(&doc).text.as_bytes());
            let _ = writeln!(err, "verification failed: {msg}");
            EXIT_VERIFY
        }
    }
}

fn pair(v: &[usize]) -> (usize, usize) {
    (v[0], v[1])
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

fn load_tree(src: &TreeSource) -> Result<Tree> {
    if let Some(p) = &src.tree {
        return tree::parse_tree(&read_file(p)?);
    }
    if let Some(v) = &src.spider {
        let (m, l) = pair(v);
        return Ok(special::build_spider(SpiderSpec::new(m, l)?));
    }
    if let Some(v) = &src.ctree {
        let (m, h) = pair(v);
        return Ok(special::build_mary_tree(MaryTreeSpec::new(m, h)?));
    }
    Err(Error::InvalidParameter("one of --tree, --spider or --ctree is required".into()))
}

fn execute(cli: &Cli) -> std::result::Result<Output, Failure> {
    let fmt = if cli.float { NumberFormat::Decimal } else { NumberFormat::Fraction };
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Centroid(src) => {
            let t = load_tree(src)?;
            let c = t.centroid();
            let w = t.weight_table();
            if csv {
                let mut text = String::from("vertex,weight,co_weight,centroid\n");
                for v in 0..t.n() {
                    let mark = c.vertices.contains(&v) as u8;
                    text.push_str(&format!("{v},{},{},{mark}\n", w.weight[v], w.co_weight[v]));
                }
                return Ok(Output { text });
            }
            Ok(Output::json(&json!({
                "schema": "safe-diffusion/centroid/v1",
                "n": t.n(),
                "kind": c.kind,
                "centroid": c.vertices,
                "root": c.root,
                "weight": w.weight,
                "co_weight": w.co_weight,
            })))
        }
        Command::Matrix(src) => {
            let a = game::game_matrix(&load_tree(src)?);
            if csv {
                return Ok(Output { text: a.to_csv() });
            }
            let rows: Vec<&[u32]> = a.rows().collect();
            Ok(Output::json(&json!({ "schema": "safe-diffusion/matrix/v1", "n": a.n(), "rows": rows })))
        }
        Command::Simulate { source, x, y } => {
            let t = load_tree(source)?;
            t.check_vertex(*x)?;
            t.check_vertex(*y)?;
            let c = game::simulate_diffusion(&t, *x, *y)?;
            let name = |c: &Color| match c {
                Color::Player1 => "player1",
                Color::Player2 => "player2",
                Color::Grey => "grey",
                Color::White => "white",
            };
            if csv {
                let mut text = String::from("vertex,color\n");
                for (v, col) in c.colors.iter().enumerate() {
                    text.push_str(&format!("{v},{}\n", name(col)));
                }
                return Ok(Output { text });
            }
            Ok(Output::json(&json!({
                "schema": "safe-diffusion/simulation/v1",
                "x": x,
                "y": y,
                "rounds": c.rounds,
                "colors": c.colors.iter().map(name).collect::<Vec<_>>(),
                "gain": c.count(Color::Player1),
                "opponent_gain": c.count(Color::Player2),
            })))
        }
        Command::Value(src) => {
            let t = load_tree(src)?;
            let a = game::game_matrix(&t);
            let sol = zerosum::solve_value(&a)?;
            let mut doc = io::solution_to_json(&sol, fmt);
            doc["n"] = json!(t.n());
            if !zerosum::verify_solution(&a, &sol) {
                return Err(Failure::Verify("solution certificate rejected".into(), doc));
            }
            Ok(Output::json(&doc))
        }
        Command::Css { file, source, strict_centroidal } => {
            let t = match file {
                Some(p) if source.tree.is_none() && source.spider.is_none() && source.ctree.is_none() => {
                    tree::parse_tree(&read_file(p)?)?
                }
                Some(_) => {
                    return Err(Error::InvalidParameter("give the tree either positionally or by flag".into()).into())
                }
                None => load_tree(source)?,
            };
            let res = css::css_run_with(&t, CssOptions { strict_centroidal: *strict_centroidal })?;
            let doc = css_document(&res, fmt);
            if !res.verified() {
                return Err(Failure::Verify("the centroid is not a worst reply to the CSS strategy".into(), doc));
            }
            Ok(Output::json(&doc))
        }
        Command::Spider { legs, leg_length, k } => {
            let spec = SpiderSpec::new(*legs, *leg_length)?;
            let t = special::build_spider(spec);
            let (k, sweep) = match k {
                Some(k) => (*k, None),
                None => {
                    let best = special::spider_optimal_k(spec)?;
                    (best.k, Some(best.sweep))
                }
            };
            let strategy = special::spider_strategy(spec, k)?;
            let (ggain, _) = game::guaranteed_gain(&t, &strategy)?;
            let body = special::spider_body_gain(spec, k)?;
            let mut doc = json!({
                "schema": "safe-diffusion/spider/v1",
                "legs": legs,
                "leg_length": leg_length,
                "n": spec.n(),
                "k": k,
                "strategy": io::strategy_entries(&strategy, fmt),
                "body_gain": fmt.value(&body),
                "guaranteed_gain": fmt.value(&ggain),
                "upper_bound": leg_length,
            });
            if let Some(s) = sweep {
                doc["sweep"] = Value::Array(s.iter().map(|g| fmt.value(g)).collect());
            }
            if ggain != body {
                return Err(Failure::Verify("guaranteed gain differs from the body gain".into(), doc));
            }
            Ok(Output::json(&doc))
        }
        Command::Ctree { arity, height } => {
            let spec = MaryTreeSpec::new(*arity, *height)?;
            let t = special::build_mary_tree(spec);
            let mu1 = special::mary_mu1(spec);
            let mu2 = special::mary_mu2(spec);
            let value = special::mary_value(spec);
            let (g1, _) = game::guaranteed_gain(&t, &mu1)?;
            let (g2, _) = game::maximal_gain(&t, &mu2)?;
            let doc = json!({
                "schema": "safe-diffusion/ctree/v1",
                "arity": arity,
                "height": height,
                "n": spec.n(),
                "value": fmt.value(&value),
                "mu1": io::strategy_entries(&mu1, fmt),
                "mu2": io::strategy_entries(&mu2, fmt),
                "mu1_guaranteed_gain": fmt.value(&g1),
                "mu2_maximal_gain": fmt.value(&g2),
            });
            if g1 != value || g2 != value {
                return Err(Failure::Verify("optimal strategies do not attain the value".into(), doc));
            }
            Ok(Output::json(&doc))
        }
        Command::Experiment { n, trials, seed, exact_threshold, config, out_dir } => {
            let mut cfg = match config {
                Some(p) => ExperimentConfig::parse(&read_file(p)?)?,
                None => ExperimentConfig::default(),
            };
            if let Some(v) = n {
                cfg.n = *v;
            }
            if let Some(v) = trials {
                cfg.trials = *v;
            }
            if let Some(v) = seed {
                cfg.seed = *v;
            }
            if let Some(v) = exact_threshold {
                cfg.exact_threshold = *v;
            }
            let rep = experiment::run_experiment(&cfg)?;
            if csv && out_dir.is_none() {
                return Ok(Output { text: rep.records_csv() });
            }
            let dir = out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("records.csv"), rep.records_csv())?;
            std::fs::write(dir.join("histogram.csv"), rep.histogram.to_csv())?;
            let opt = |r: &Option<ratio::Ratio>| r.as_ref().map(|v| fmt.value(v)).unwrap_or(Value::Null);
            let doc = json!({
                "schema": "safe-diffusion/experiment/v1",
                "n": cfg.n,
                "trials": cfg.trials,
                "seed": cfg.seed,
                "exact_threshold": cfg.exact_threshold,
                "completed": rep.records.len(),
                "failures": rep.failures.iter().map(|(i, e)| json!({"trial": i, "error": e})).collect::<Vec<_>>(),
                "mean_diff_ratio": opt(&rep.mean),
                "median_diff_ratio": opt(&rep.median),
                "overflow": rep.histogram.overflow,
                "records": dir.join("records.csv").display().to_string(),
                "histogram": dir.join("histogram.csv").display().to_string(),
            });
            Ok(Output::json(&doc))
        }
    }
}

fn css_document(res: &css::CssResult, fmt: NumberFormat) -> Value {
    let branches: Vec<Value> = res
        .ordered_branches
        .iter()
        .map(|b| {
            json!({
                "index": b.index,
                "size": b.vertices.len(),
                "class": b.class,
                "criterion": fmt.value(&b.criterion),
                "u": b.u.vertex,
                "t": b.t.map(|k| k.vertex),
                "s": b.s.map(|k| k.vertex),
                "used": res.branches_used.iter().any(|u| u.branch.index == b.index),
            })
        })
        .collect();
    json!({
        "schema": "safe-diffusion/css/v1",
        "n": res.strategy.len(),
        "root": res.root,
        "alpha": fmt.value(&res.alpha),
        "strategy": io::strategy_entries(&res.strategy, fmt),
        "guaranteed_gain": fmt.value(&res.guaranteed_gain),
        "centroid_gain": fmt.value(&res.centroid_gain),
        "trace": res.trace.iter().map(|g| fmt.value(g)).collect::<Vec<_>>(),
        "branches": branches,
        "centroid_check": {
            "passed": res.centroid_check.passed,
            "centroid_value": fmt.value(&res.centroid_check.centroid_value),
            "minimum": fmt.value(&res.centroid_check.minimum),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["safe-diffusion"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn value_of_complete_tree() {
        let (code, out, _) = call(&["value", "--ctree", "2", "2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], "24/11");
        assert_eq!(v["schema"], io::SOLUTION_SCHEMA);
    }

    #[test]
    fn conflicting_sources_are_input_errors() {
        let (code, _, err) = call(&["value", "--ctree", "2", "2", "--spider", "3", "2"]);
        assert_eq!(code, 1);
        assert!(!err.is_empty());
        let (code, _, _) = call(&["centroid"]);
        assert_eq!(code, 1);
        let (code, _, _) = call(&["spider", "2", "2"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn spider_and_ctree() {
        let (code, out, _) = call(&["spider", "3", "4"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["k"], 1);
        assert_eq!(v["guaranteed_gain"], "3/1");
        let (code, out, _) = call(&["ctree", "2", "3", "--float"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"mu1\""));
    }
}
