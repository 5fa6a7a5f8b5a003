//! Batch front end for `gkm-core`.
//!
//! `run` never prints; it returns the exit code together with the text that
//! belongs on stdout and stderr, which keeps the binary thin and the
//! behaviour testable.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use gkm_core::gkm::as_symplectic;
use gkm_core::graphfile::{parse_graph, GraphFile};
use gkm_core::lattice::parse_int_vector;
use gkm_core::quantization::{character_expand, check_xi, multiplicity, polarize};
use gkm_core::reduction::{chi_reduced, moment_map, qr_check, vertex_residues, MomentMap};
use gkm_core::selftest::{selftest, Sizes};
use gkm_core::{Error, GkmAction, KClass, LatticeVector, LaurentPoly, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Character,
    Multiplicity,
    Reduce,
    Residue,
    QrCheck,
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum MomentChoice {
    /// symplectic values when the class is symplectic, ranks otherwise
    #[default]
    Auto,
    Rank,
    Symplectic,
}

/// Exact characters of torus actions on GKM graphs.
#[derive(Clone, Debug, Parser)]
#[command(name = "gkm", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// graph file (JSON); not used by `selftest`
    pub input: Option<PathBuf>,
    /// polarizing vector, e.g. `1,0`
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    /// level of the reduction, e.g. `1/2`
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// weight whose multiplicity is wanted, e.g. `0,1`
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// class name in the graph file; defaults to the only class
    #[arg(long)]
    pub class: Option<String>,
    /// vertex name for `residue`; all vertices if omitted
    #[arg(long)]
    pub vertex: Option<String>,
    #[arg(long, value_enum, default_value_t = MomentChoice::Auto)]
    pub moment: MomentChoice,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// add a deliberately invalid class to the selftest batteries
    #[arg(long)]
    pub inject_corrupt: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn checked(passed: bool, stdout: String) -> Self {
        Outcome {
            code: if passed { 0 } else { 2 },
            stdout,
            stderr: String::new(),
        }
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// The mathematical requirement behind each error.
pub fn law(e: &Error) -> &'static str {
    match e {
        Error::ZeroVector | Error::NotPrimitive(_) => "xi must be a primitive lattice vector",
        Error::NotGeneric { .. } => "xi must pair nonzero with every isotropy weight",
        Error::DimMismatch { .. } => "all weights live in the same lattice Z^n",
        Error::ZeroWeight => "denominator factors 1 - x^gamma need gamma != 0",
        Error::NotDivisible(_) => "exact division in the character ring",
        Error::PoleAtPoint(_) => "evaluation points must avoid the poles",
        Error::TruncationOverflow { .. } => "series expansion stays within its term budget",
        Error::InternalDivisionFailure { .. } => "the localized character is a Laurent polynomial",
        Error::CycleError { .. } => "the xi-orientation of a GKM graph is acyclic",
        Error::InvalidMomentMap { .. } => "a moment map increases along xi-oriented edges",
        Error::NotRegular { .. } => "the level must be a regular value of the moment map",
        Error::WrongWallCount { .. } => "wall crossing compares adjacent chambers",
        Error::ZeroNotRegular { .. } => {
            "zero must be a regular value: alpha_p(xi) != 0 at every vertex"
        }
        Error::NotSymplectic => "symplectic class: f_p is a monomial x^alpha_p",
        Error::SamplingExhausted { .. } => "random sampling found a pole-free point",
        Error::Unknown { .. } => "names refer to entries of the input",
        Error::Parse(_) => "input follows the graph file format",
        Error::Invalid(_) => "GKM axioms and K-class compatibility",
    }
}

fn render_error(e: &Error) -> String {
    match e {
        Error::Invalid(vs) => vs.iter().map(|v| format!("{v}\n")).collect(),
        _ => format!("error: {e} [{}]\n", law(e)),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invalid(_) | Error::InternalDivisionFailure { .. } => 2,
        _ => 1,
    }
}

pub fn run(config: &RunConfig) -> Outcome {
    match dispatch(config) {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("usage error: {msg}\n"),
        },
        Err(Failure::Core(e)) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: render_error(&e),
        },
    }
}

fn require<'a>(v: &'a Option<String>, flag: &str, cmd: Command) -> Res<&'a str> {
    v.as_deref()
        .ok_or_else(|| Failure::Usage(format!("`{}` needs --{flag}", command_name(cmd))))
}

fn command_name(cmd: Command) -> String {
    cmd.to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

fn load(config: &RunConfig) -> Res<GraphFile> {
    let path = config.input.as_ref().ok_or_else(|| {
        Failure::Usage(format!(
            "`{}` needs an input file",
            command_name(config.command)
        ))
    })?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_graph(&text)?)
}

fn load_action(graph: &GraphFile) -> Res<Arc<GkmAction>> {
    Ok(graph.action().map_err(Error::Invalid)?)
}

fn select_class(config: &RunConfig, graph: &GraphFile, action: &Arc<GkmAction>) -> Res<KClass> {
    let name = match &config.class {
        Some(n) => n.clone(),
        None => {
            let names: Vec<&str> = graph.class_names().collect();
            match names.as_slice() {
                [one] => one.to_string(),
                [] => return Err(Failure::Usage("the input defines no classes".into())),
                _ => {
                    return Err(Failure::Usage(format!(
                        "several classes ({}); pick one with --class",
                        names.join(", ")
                    )))
                }
            }
        }
    };
    Ok(graph.class(action, &name)?)
}

fn parse_xi(config: &RunConfig, action: &GkmAction) -> Res<LatticeVector> {
    let xi = LatticeVector(parse_int_vector(require(
        &config.xi,
        "xi",
        config.command,
    )?)?);
    check_xi(action, &xi)?;
    Ok(xi)
}

fn poly_json(p: &LaurentPoly) -> Value {
    p.to_json()
}

fn render(config: &RunConfig, text: String, value: Value) -> String {
    match config.output {
        OutputFormat::Text => format!("{text}\n"),
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&value).expect("json values serialize")
        ),
    }
}

fn dispatch(config: &RunConfig) -> Res<Outcome> {
    match config.command {
        Command::Selftest => {
            let report = selftest(config.seed, &Sizes::default(), config.inject_corrupt);
            let value = json!({
                "seed": report.seed,
                "passed": report.passed(),
                "entries": report.entries.iter().map(|e| json!({
                    "name": e.name,
                    "law": e.law,
                    "cases": e.cases,
                    "failures": e.failures,
                })).collect::<Vec<_>>(),
            });
            Ok(Outcome::checked(
                report.passed(),
                render(config, report.to_string(), value),
            ))
        }
        Command::Validate => validate(config),
        Command::Character => {
            let graph = load(config)?;
            let action = load_action(&graph)?;
            let f = select_class(config, &graph, &action)?;
            let xi = parse_xi(config, &action)?;
            let res = character_expand(&f, &polarize(&action, &xi)?)?;
            let value = json!({ "xi": xi.0, "character": poly_json(&res.poly) });
            Ok(Outcome::ok(render(config, res.poly.to_string(), value)))
        }
        Command::Multiplicity => {
            let graph = load(config)?;
            let action = load_action(&graph)?;
            let f = select_class(config, &graph, &action)?;
            let xi = parse_xi(config, &action)?;
            let alpha = Weight(parse_int_vector(require(
                &config.alpha,
                "alpha",
                config.command,
            )?)?);
            alpha.check_dim(action.n())?;
            let s = as_symplectic(&f).ok_or(Error::NotSymplectic)?;
            let m = multiplicity(&s, &polarize(&action, &xi)?, &alpha)?;
            let value = json!({ "xi": xi.0, "alpha": alpha.0, "multiplicity": m.to_string() });
            Ok(Outcome::ok(render(config, m.to_string(), value)))
        }
        Command::Reduce => {
            let graph = load(config)?;
            let action = load_action(&graph)?;
            let f = select_class(config, &graph, &action)?;
            let xi = parse_xi(config, &action)?;
            let c_text = require(&config.c, "c", config.command)?;
            let c: BigRational = c_text
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("--c: `{c_text}` is not a rational number")))?;
            let symplectic = as_symplectic(&f);
            let m = match (config.moment, &symplectic) {
                (MomentChoice::Rank, _) | (MomentChoice::Auto, None) => moment_map(&action, &xi)?,
                (_, Some(s)) => MomentMap::symplectic(s, &xi)?,
                (MomentChoice::Symplectic, None) => return Err(Error::NotSymplectic.into()),
            };
            let chi = chi_reduced(&f, &m, &c)?;
            let value = json!({
                "xi": xi.0,
                "c": c.to_string(),
                "moment": m.values().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "chi_red": poly_json(&chi),
            });
            Ok(Outcome::ok(render(config, chi.to_string(), value)))
        }
        Command::Residue => {
            let graph = load(config)?;
            let action = load_action(&graph)?;
            let f = select_class(config, &graph, &action)?;
            let xi = parse_xi(config, &action)?;
            let residues = vertex_residues(&f, &xi)?;
            let selected: Vec<usize> = match &config.vertex {
                Some(v) => vec![action.vertex_index(v).ok_or_else(|| Error::Unknown {
                    kind: "vertex",
                    name: v.clone(),
                })?],
                None => action.vertices().collect(),
            };
            let text = selected
                .iter()
                .map(|&p| format!("{}: {}", action.vertex_name(p), residues[p]))
                .collect::<Vec<_>>()
                .join("\n");
            let value = Value::Object(
                selected
                    .iter()
                    .map(|&p| (action.vertex_name(p).to_string(), poly_json(&residues[p])))
                    .collect(),
            );
            Ok(Outcome::ok(render(
                config,
                text,
                json!({ "xi": xi.0, "residues": value }),
            )))
        }
        Command::QrCheck => {
            let graph = load(config)?;
            let action = load_action(&graph)?;
            let f = select_class(config, &graph, &action)?;
            let xi = parse_xi(config, &action)?;
            let s = as_symplectic(&f).ok_or(Error::NotSymplectic)?;
            let report = qr_check(&s, &xi)?;
            let value = json!({
                "xi": xi.0,
                "passed": report.passed(),
                "character": poly_json(&report.character),
                "invariant": poly_json(&report.invariant),
                "chi_red": poly_json(&report.reduced),
            });
            Ok(Outcome::checked(
                report.passed(),
                render(config, report.to_string(), value),
            ))
        }
    }
}

fn validate(config: &RunConfig) -> Res<Outcome> {
    let graph = load(config)?;
    let action = match graph.action() {
        Ok(a) => a,
        Err(vs) => {
            let text = vs
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            let value = json!({ "valid": false, "violations": vs });
            return Ok(Outcome::checked(false, render(config, text, value)));
        }
    };
    let mut lines = vec![format!(
        "OK  n = {}, {} vertices, valence {}",
        action.n(),
        action.num_vertices(),
        action.valence()
    )];
    let mut all_ok = true;
    let mut classes = serde_json::Map::new();
    for name in graph.class_names() {
        match graph.class(&action, name) {
            Ok(f) => {
                let kind = if as_symplectic(&f).is_some() {
                    "symplectic"
                } else {
                    "valid"
                };
                lines.push(format!("class {name}: {kind}"));
                classes.insert(
                    name.to_string(),
                    json!({ "valid": true, "symplectic": kind == "symplectic" }),
                );
            }
            Err(Error::Invalid(vs)) => {
                all_ok = false;
                lines.push(format!("class {name}: invalid"));
                lines.extend(vs.iter().map(|v| format!("  {v}")));
                classes.insert(
                    name.to_string(),
                    json!({ "valid": false, "violations": vs }),
                );
            }
            Err(e) => return Err(e.into()),
        }
    }
    let value = json!({
        "valid": all_ok,
        "n": action.n(),
        "vertices": action.num_vertices(),
        "valence": action.valence(),
        "classes": classes,
    });
    Ok(Outcome::checked(
        all_ok,
        render(config, lines.join("\n"), value),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("gkm").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn parses_flags() {
        let c = config(&[
            "reduce", "g.json", "--xi", "-1,2", "--c", "-1/2", "--moment", "rank", "--output",
            "json",
        ]);
        assert_eq!(c.command, Command::Reduce);
        assert_eq!(c.xi.as_deref(), Some("-1,2"));
        assert_eq!(c.c.as_deref(), Some("-1/2"));
        assert_eq!(c.moment, MomentChoice::Rank);
        assert_eq!(c.output, OutputFormat::Json);
        assert_eq!(c.seed, 42);
    }

    #[test]
    fn missing_input_is_a_usage_error() {
        let o = run(&config(&["character", "--xi", "1,0"]));
        assert_eq!(o.code, 1);
        assert!(o.stderr.contains("needs an input file"));
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(exit_code(&Error::Invalid(Vec::new())), 2);
        assert_eq!(exit_code(&Error::NotPrimitive(vec![2, 0])), 1);
        assert_eq!(exit_code(&Error::ZeroNotRegular { vertex: "p".into() }), 1);
        assert!(render_error(&Error::NotSymplectic).contains("monomial"));
    }
}
