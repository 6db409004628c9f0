//! `commscale` command-line front end.
//!
//! Reports are JSON, series are CSV, graphs use the line-oriented promise
//! graph format. Numbers carry 12 significant digits. Exit status is 0 on
//! success, 1 on domain errors and 2 on usage errors.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use commscale::ensemble::{self, compare, compare_value, fit_power_law, generate, read_pairs, write_csv, DEFAULT_K};
use commscale::format::{round12, sig12};
use commscale::meanfield::{
    self, class_output, correction_factor, delta_exponent, equilibrium_volume, infrastructure_volume, node_degree,
    parse_ratio, predicted_exponent, to_f64, Couplings,
};
use commscale::observed::{observed, OBSERVED};
use commscale::promisegraph::{
    self, aggregate, classify_pattern, community_members, find_bindings, parse_graph, reduce_conditionals,
    total_value, write_graph, ClassifyOptions, DEFAULT_SCARCE_FRACTION,
};
use commscale::uslkit::{effective_exponent, response_time, serial_time, usl_fit, usl_peak, usl_speedup, UslError};
use commscale::{
    AgentId, EnsembleSpec, Exponent, Polarity, Population, QueueParams, ScalingClass, ScalingParams, SerialModel,
    TypeTag, UslParams,
};

#[derive(Debug, Parser)]
#[command(name = "commscale", version, about = "Scaling laws for functional communities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    /// Embedding dimension D.
    #[arg(long = "D", default_value_t = 2)]
    d: u32,
    /// Hausdorff dimension H, as a decimal or fraction such as 3/2.
    #[arg(long = "H", default_value = "1", value_parser = parse_exponent)]
    h: Exponent,
}

impl ModelArgs {
    fn params(&self) -> Result<ScalingParams> {
        Ok(ScalingParams::new(self.d, self.h)?)
    }
}

#[derive(Debug, Clone, Args)]
struct InputArg {
    /// Read from this file instead of standard input.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Predicted exponent of every scaling class.
    Exponents {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Equilibrium volume, infrastructure volume and class output for one population.
    Yield {
        #[command(flatten)]
        model: ModelArgs,
        /// Active agents N_I.
        #[arg(long)]
        active: f64,
        /// Inactive agents N_0.
        #[arg(long, default_value_t = 0.0)]
        inactive: f64,
        #[arg(long, default_value = "interaction", value_parser = parse_class)]
        class: ScalingClass,
        /// g_I
        #[arg(long = "g-i", default_value_t = 1.0)]
        g_i: f64,
        /// g_Y
        #[arg(long = "g-y", default_value_t = 1.0)]
        g_y: f64,
        /// G_Y
        #[arg(long = "big-g-y", default_value_t = 1.0)]
        big_g_y: f64,
        /// c_Y
        #[arg(long = "c-y", default_value_t = 1.0)]
        c_y: f64,
        /// v_Y
        #[arg(long = "v-y", default_value_t = 1.0)]
        v_y: f64,
        /// L
        #[arg(long = "length", default_value_t = 1.0)]
        length: f64,
    },
    /// Synthetic ensemble as `N,Y` CSV.
    Ensemble {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_class)]
        class: ScalingClass,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 1e3)]
        nmin: f64,
        #[arg(long, default_value_t = 1e7)]
        nmax: f64,
        /// Standard deviation of the log-normal noise.
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        /// Inactive fraction N_0 / N.
        #[arg(long, default_value_t = 0.0)]
        inactive: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Log-log power-law fit of `N,Y` CSV.
    Fit {
        #[command(flatten)]
        io: InputArg,
    },
    /// Compare a fitted, given or published exponent with a class prediction.
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_class)]
        class: Option<ScalingClass>,
        /// Fit this `N,Y` CSV file (`-` for standard input).
        #[arg(long, conflicts_with_all = ["beta", "reference"])]
        input: Option<PathBuf>,
        #[arg(long, conflicts_with = "reference")]
        beta: Option<f64>,
        #[arg(long, requires = "beta")]
        stderr: Option<f64>,
        /// Published exponent by key; `list` prints the table.
        #[arg(long)]
        reference: Option<String>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: f64,
    },
    /// USL speedup for N = 1..nmax as `N,speedup` CSV.
    UslEval {
        #[arg(long, allow_negative_numbers = true)]
        contention: f64,
        #[arg(long)]
        coherency: f64,
        #[arg(long, default_value_t = 64)]
        nmax: u32,
        /// Print only the worker count of peak speedup.
        #[arg(long)]
        peak: bool,
    },
    /// Fit USL coefficients to `N,speedup` CSV.
    UslFit {
        #[command(flatten)]
        io: InputArg,
    },
    /// Serial time model T(N) = sigma + pi/N + kappa N.
    Serial {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        pi: f64,
        #[arg(long, default_value_t = 0.0)]
        kappa: f64,
        #[arg(long)]
        n: f64,
        /// Also report T(gamma N) / T(N).
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Single-queue response time 1 / (mu - lambda).
    Queue {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        mu: f64,
    },
    /// Promise graph operations.
    #[command(subcommand)]
    Graph(GraphCommand),
}

#[derive(Debug, Subcommand)]
enum GraphCommand {
    /// Network value, density and component summary.
    Value {
        #[command(flatten)]
        io: InputArg,
    },
    /// One line per binding: giver, receiver, type, effective constraint.
    Bindings {
        #[command(flatten)]
        io: InputArg,
    },
    /// Resolve assisted conditional offers and print the graph.
    Reduce {
        #[command(flatten)]
        io: InputArg,
    },
    /// Replace a set of agents by one superagent and print the graph.
    Aggregate {
        #[command(flatten)]
        io: InputArg,
        /// Comma-separated member ids.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_agent)]
        members: Vec<AgentId>,
        #[arg(long = "id", value_parser = parse_agent)]
        super_id: AgentId,
    },
    /// Dependency class of an output offer.
    Classify {
        #[command(flatten)]
        io: InputArg,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_agent)]
        giver: AgentId,
        #[arg(long, value_parser = parse_agent)]
        receiver: AgentId,
        #[arg(long = "type", value_parser = parse_tag)]
        type_tag: TypeTag,
        /// Superagent member set, comma-separated; repeatable.
        #[arg(long)]
        group: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SCARCE_FRACTION)]
        scarce_fraction: f64,
    },
    /// Agents bound to an authority by membership promises.
    Community {
        #[command(flatten)]
        io: InputArg,
        #[arg(long, value_parser = parse_agent)]
        authority: AgentId,
        #[arg(long = "type", value_parser = parse_tag)]
        type_tag: TypeTag,
    },
}

fn parse_exponent(s: &str) -> std::result::Result<Exponent, String> {
    parse_ratio(s).ok_or_else(|| format!("expected a decimal or fraction, got {s:?}"))
}

fn parse_class(s: &str) -> std::result::Result<ScalingClass, String> {
    ScalingClass::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = ScalingClass::ALL.iter().map(|c| c.name()).collect();
        format!("unknown class {s:?}; expected one of {}", names.join(", "))
    })
}

fn parse_agent(s: &str) -> std::result::Result<AgentId, String> {
    AgentId::new(s).map_err(|e| e.to_string())
}

fn parse_tag(s: &str) -> std::result::Result<TypeTag, String> {
    TypeTag::new(s).map_err(|e| e.to_string())
}

/// Rounds every float in a JSON value to 12 significant digits.
fn rounded(value: Value) -> Value {
    match value {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => n.as_f64().map(num).unwrap_or(Value::Number(n)),
        Value::Array(items) => Value::Array(items.into_iter().map(rounded).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round12(x))
    } else {
        Value::Null
    }
}

fn to_json(value: Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(&rounded(value))? + "\n")
}

fn read_text(io: &InputArg) -> Result<String> {
    match io.input.as_deref() {
        Some(path) if path != Path::new("-") => {
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("cannot read standard input")?;
            Ok(s)
        }
    }
}

fn read_graph(io: &InputArg) -> Result<promisegraph::PromiseGraph> {
    Ok(parse_graph(&read_text(io)?)?)
}

fn read_samples(path: Option<&Path>) -> Result<Vec<commscale::EnsembleSample>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => ensemble::ingest_csv(p)?,
        _ => ensemble::read_csv(io::stdin().lock())?,
    })
}

fn exponents(model: &ModelArgs) -> Result<String> {
    let params = model.params()?;
    let mut out = Map::new();
    let mut exact = Map::new();
    for class in ScalingClass::ALL {
        match predicted_exponent(class, &params, true) {
            Ok(e) => {
                out.insert(class.name().into(), num(to_f64(e)));
                exact.insert(class.name().into(), json!(e.to_string()));
            }
            Err(meanfield::MeanFieldError::Unsupported(_)) => {
                out.insert(class.name().into(), Value::Null);
                exact.insert(class.name().into(), Value::Null);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let delta = delta_exponent(&params);
    out.insert("D".into(), json!(params.dimension()));
    out.insert("H".into(), num(to_f64(params.hausdorff())));
    out.insert("delta".into(), num(to_f64(delta)));
    out.insert("exact".into(), Value::Object(exact));
    to_json(Value::Object(out))
}

fn yield_report(
    model: &ModelArgs,
    active: f64,
    inactive: f64,
    class: ScalingClass,
    couplings: Couplings,
) -> Result<String> {
    let params = ScalingParams::with_couplings(model.d, model.h, couplings)?;
    let pop = Population::new(active, inactive)?;
    let volume = equilibrium_volume(&pop, &params)?;
    to_json(json!({
        "class": class.name(),
        "output": class_output(class, &pop, &params)?,
        "equilibrium_volume": volume,
        "infrastructure_volume": infrastructure_volume(volume, &pop, &params)?,
        "node_degree": node_degree(&pop, volume, &params)?,
        "correction_factor": correction_factor(class, &pop, &params)?,
        "N": pop.total(),
    }))
}

fn compare_report(
    model: &ModelArgs,
    class: Option<ScalingClass>,
    input: Option<&Path>,
    beta: Option<f64>,
    stderr: Option<f64>,
    reference: Option<&str>,
    k: f64,
) -> Result<String> {
    let params = model.params()?;
    if reference == Some("list") {
        let rows: Vec<Value> = OBSERVED
            .iter()
            .map(|o| {
                json!({
                    "key": o.key,
                    "measure": o.measure,
                    "source": o.source,
                    "beta": o.beta,
                    "beta_high": o.beta_high,
                    "uncertainty": o.uncertainty,
                    "class": o.class.map(|c| c.name()),
                })
            })
            .collect();
        return to_json(Value::Array(rows));
    }
    let (comparison, source) = if let Some(key) = reference {
        let o = observed(key).ok_or_else(|| anyhow!("unknown reference {key:?}; use --reference list"))?;
        let class = class
            .or(o.class)
            .ok_or_else(|| anyhow!("reference {key:?} has no default class; pass --class"))?;
        (compare_value(o.beta, o.uncertainty, class, &params, k)?, json!(key))
    } else if let Some(b) = beta {
        let class = class.ok_or_else(|| anyhow!("--beta needs --class"))?;
        (compare_value(b, stderr.unwrap_or(0.0), class, &params, k)?, json!("value"))
    } else {
        let class = class.ok_or_else(|| anyhow!("fitting data needs --class"))?;
        let fit = fit_power_law(&read_samples(input)?)?;
        (compare(&fit, class, &params, k)?, json!("fit"))
    };
    let mut value = serde_json::to_value(&comparison)?;
    value["source"] = source;
    to_json(value)
}

fn usl_eval(contention: f64, coherency: f64, nmax: u32, peak: bool) -> Result<String> {
    let p = UslParams::new(contention, coherency)?;
    if peak {
        return Ok(sig12(usl_peak(&p)?) + "\n");
    }
    if nmax < 1 {
        bail!("--nmax must be at least 1");
    }
    let mut out = String::from("N,speedup\n");
    for n in 1..=nmax {
        out += &format!("{n},{}\n", sig12(usl_speedup(n as f64, &p)?));
    }
    Ok(out)
}

fn usl_fit_report(io: &InputArg) -> Result<String> {
    let text = read_text(io)?;
    let data = read_pairs(text.as_bytes(), ["N", "speedup"])?;
    let fit = usl_fit(&data)?;
    let peak = match usl_peak(&fit.params) {
        Ok(p) => num(p),
        Err(UslError::Unbounded { .. }) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    to_json(json!({
        "contention": fit.params.contention(),
        "coherency": fit.params.coherency(),
        "residual": fit.residual,
        "iterations": fit.iterations,
        "peak": peak,
    }))
}

fn serial_report(sigma: f64, pi: f64, kappa: f64, n: f64, gamma: Option<f64>) -> Result<String> {
    let m = SerialModel::new(sigma, pi, kappa)?;
    let time = serial_time(n, &m)?;
    let exponent = match effective_exponent(n, &m) {
        Ok(x) => Some(x),
        Err(UslError::UnsupportedRegime { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut out = json!({ "time": time, "effective_exponent": exponent.map_or(Value::Null, num) });
    if let Some(g) = gamma {
        if !(g.is_finite() && g > 0.0) {
            bail!("--gamma must be positive, got {g}");
        }
        out["ratio"] = num(serial_time(g * n, &m)? / time);
        out["power_law_ratio"] = exponent.map_or(Value::Null, |x| num(g.powf(-x)));
    }
    to_json(out)
}

fn classify_report(
    graph: &promisegraph::PromiseGraph,
    model: &ModelArgs,
    key: (&AgentId, &AgentId, &TypeTag),
    groups: &[String],
    scarce_fraction: f64,
) -> Result<String> {
    let (giver, receiver, type_tag) = key;
    let output = graph
        .promises()
        .iter()
        .find(|p| {
            p.polarity == Polarity::Offer && &p.giver == giver && &p.receiver == receiver && &p.type_tag == type_tag
        })
        .ok_or_else(|| anyhow!("no offer {giver} -> {receiver} of type {type_tag} in graph"))?;
    let mut options = ClassifyOptions { scarce_fraction, groups: Vec::new() };
    for g in groups {
        let members = g
            .split(',')
            .map(AgentId::new)
            .collect::<std::result::Result<BTreeSet<_>, _>>()
            .with_context(|| format!("invalid --group {g:?}"))?;
        options.groups.push(members);
    }
    let class = classify_pattern(graph, output, &options)?;
    let params = model.params()?;
    let exponent = predicted_exponent(class, &params, true)?;
    to_json(json!({
        "class": class.name(),
        "exponent": num(to_f64(exponent)),
        "exponent_exact": exponent.to_string(),
    }))
}

fn graph(cmd: &GraphCommand) -> Result<String> {
    match cmd {
        GraphCommand::Value { io } => to_json(serde_json::to_value(total_value(&read_graph(io)?)?)?),
        GraphCommand::Bindings { io } => {
            let g = read_graph(io)?;
            let mut out = String::new();
            for b in find_bindings(&g) {
                let chi: Vec<&str> = b.effective_constraint.iter().map(String::as_str).collect();
                out += &format!("{} {} {} {}\n", b.giver(), b.receiver(), b.type_tag(), chi.join(","));
            }
            Ok(out)
        }
        GraphCommand::Reduce { io } => Ok(write_graph(&reduce_conditionals(&read_graph(io)?))),
        GraphCommand::Aggregate { io, members, super_id } => {
            let members: BTreeSet<AgentId> = members.iter().cloned().collect();
            Ok(write_graph(&aggregate(&read_graph(io)?, &members, super_id)?))
        }
        GraphCommand::Classify { io, model, giver, receiver, type_tag, group, scarce_fraction } => {
            classify_report(&read_graph(io)?, model, (giver, receiver, type_tag), group, *scarce_fraction)
        }
        GraphCommand::Community { io, authority, type_tag } => {
            let members = community_members(&read_graph(io)?, authority, type_tag)?;
            let ids: Vec<&str> = members.iter().map(AgentId::as_str).collect();
            to_json(json!({ "count": ids.len(), "members": ids }))
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Exponents { model } => exponents(&model),
        Command::Yield { model, active, inactive, class, g_i, g_y, big_g_y, c_y, v_y, length } => {
            let couplings = Couplings {
                infra_span: g_i,
                yield_coupling: g_y,
                interaction_coupling: big_g_y,
                transport_cost: c_y,
                process_volume: v_y,
                length_scale: length,
            };
            yield_report(&model, active, inactive, class, couplings)
        }
        Command::Ensemble { model, class, n, nmin, nmax, noise, inactive, seed } => {
            let spec = EnsembleSpec {
                n_samples: n,
                n_min: nmin,
                n_max: nmax,
                noise_sigma: noise,
                inactive_fraction: inactive,
                seed,
                ..EnsembleSpec::new(class, model.params()?)
            };
            let mut buf = Vec::new();
            write_csv(&generate(&spec)?, &mut buf)?;
            Ok(String::from_utf8(buf)?)
        }
        Command::Fit { io } => {
            let fit = fit_power_law(&read_samples(io.input.as_deref())?)?;
            to_json(serde_json::to_value(fit)?)
        }
        Command::Compare { model, class, input, beta, stderr, reference, k } => {
            compare_report(&model, class, input.as_deref(), beta, stderr, reference.as_deref(), k)
        }
        Command::UslEval { contention, coherency, nmax, peak } => usl_eval(contention, coherency, nmax, peak),
        Command::UslFit { io } => usl_fit_report(&io),
        Command::Serial { sigma, pi, kappa, n, gamma } => serial_report(sigma, pi, kappa, n, gamma),
        Command::Queue { lambda, mu } => Ok(sig12(response_time(&QueueParams { lambda, mu })?) + "\n"),
        Command::Graph(cmd) => graph(&cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
