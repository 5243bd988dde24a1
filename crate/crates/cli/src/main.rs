use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use highergraph::finite_category::DEFAULT_TRUNCATION;
use highergraph::io::{load_edges_csv, load_groups_csv, load_model, save_model, AnyModel};
use highergraph::kan::{check_adjunction, left_kan, triangle_identities, ModelFunctor};
use highergraph::models::{DirectedGraph, DirectedHypergraph};
use highergraph::presheaf::{count_morphisms, CellId};
use highergraph::{CategoryTag, Error, ObjectId, Presheaf};

#[derive(Parser)]
#[command(name = "highergraph", version, about = "Validate, convert and query higher-graph models")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Truncation for models built from CSV and for conversions out of graphs.
    #[arg(long, global = true, env = "HIGHERGRAPH_TRUNCATION", default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,

    /// Cap on candidate assignments tried by hom enumeration.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a model is a valid presheaf.
    Validate { input: PathBuf },
    /// Change the model type along a built-in functor.
    Convert {
        input: PathBuf,
        /// Conversion name, e.g. graph-hypergraph or clique.
        #[arg(long)]
        via: Option<String>,
        /// Source model, combined with --to as an alternative to --via.
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        /// Write the document here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Cell counts, dimension and degeneracy census.
    Stats { input: PathBuf },
    /// Count the morphisms between two models over the same index category.
    Homs { source: PathBuf, target: PathBuf },
    /// Check the adjunctions of a roster functor on a pair of models.
    AdjointCheck {
        /// Model over the source category.
        source: PathBuf,
        /// Model over the target category; defaults to the left Kan extension of the source.
        target: Option<PathBuf>,
        /// Functor name (i, A, skeletal, symmetric, simplicial); defaults to every applicable one.
        #[arg(long)]
        via: Option<String>,
        /// Also check the second adjunction, restriction against right Kan extension.
        #[arg(long)]
        second: bool,
    },
    /// Clique completion of a directed graph.
    Clique {
        input: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// All iterated faces of a simplex, given by label or as `[n]#k`.
    Faces { input: PathBuf, cell: String },
    /// The 1-skeleton of a semi-simplicial set.
    Skeleton {
        input: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
    report: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let report = match &e {
            Error::Invalid(r) => Some(json!({
                "valid": false,
                "violations": r.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })),
            _ => None,
        };
        Failure { code: 1, message: e.to_string(), report }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into(), report: None }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(report) = f.report {
                println!("{}", render(cli.format, &report));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// JSON documents, `*.groups.csv` hypergraphs and `*.edges.csv` graphs.
fn load(path: &Path, truncation: usize) -> CliResult<AnyModel> {
    let bytes = read(path)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    if name.ends_with(".groups.csv") {
        let groups = load_groups_csv(&bytes)?;
        let longest = groups.iter().map(Vec::len).max().unwrap_or(0);
        let h = DirectedHypergraph::from_group_records(&groups, Some(truncation.max(longest).max(2)))?;
        return Ok(AnyModel::Hypergraph(h));
    }
    if name.ends_with(".edges.csv") {
        let (vertices, edges) = load_edges_csv(&bytes)?;
        return Ok(AnyModel::Graph(DirectedGraph::from_edge_list(&vertices, &edges)?));
    }
    Ok(load_model(&bytes)?)
}

fn render(format: Format, value: &Value) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("json values serialize"),
        Format::Table => table(value),
    }
}

fn table(value: &Value) -> String {
    match value {
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}: {}", compact(v))).collect::<Vec<_>>().join("\n"),
        other => compact(other),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn counts(p: &Presheaf) -> Value {
    json!(p.cell_counts())
}

fn emit_model(model: &AnyModel, output: &Option<PathBuf>) -> CliResult<String> {
    let bytes = save_model(model);
    match output {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(String::from_utf8(bytes).expect("documents are UTF-8")),
    }
}

fn run(cli: &Cli) -> CliResult<String> {
    let t = cli.truncation;
    match &cli.command {
        Command::Validate { input } => {
            let model = load(input, t)?;
            let p = model.presheaf();
            let out = match cli.format {
                Format::Json => render(
                    cli.format,
                    &json!({
                        "valid": true,
                        "model": model.kind().name(),
                        "dimension": p.dimension(),
                        "cells": counts(p),
                    }),
                ),
                Format::Table => format!(
                    "valid, dimension {}, cells [{}]",
                    p.dimension(),
                    p.cell_counts().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                ),
            };
            Ok(out + "\n")
        }
        Command::Convert { input, via, from, to, output } => {
            let name = match (via, from, to) {
                (Some(v), None, None) => v.clone(),
                (None, Some(f), Some(t)) => format!("{f}-{t}"),
                _ => return Err(usage("give either --via or both --from and --to")),
            };
            let model = load(input, t)?;
            let converted = convert(&normalize(&name), model, t, cli.budget)?;
            emit_model(&converted, output)
        }
        Command::Stats { input } => {
            let model = load(input, t)?;
            let p = model.presheaf();
            let census: Vec<Value> = p
                .census()
                .iter()
                .map(|c| {
                    json!({
                        "object": c.object.to_string(),
                        "raw": c.raw,
                        "nondegenerate": c.nondegenerate,
                        "nondegenerate_orbits": c.nondegenerate_orbits,
                        "maximal": c.maximal,
                        "maximal_orbits": c.maximal_orbits,
                    })
                })
                .collect();
            let value = json!({
                "model": model.kind().name(),
                "index_cat": p.index().tag().name(),
                "truncation": p.index().truncation(),
                "dimension": p.dimension(),
                "cells": counts(p),
                "total": p.total_cells(),
                "census": census,
            });
            Ok(render(cli.format, &value) + "\n")
        }
        Command::Homs { source, target } => {
            let (s, g) = (load(source, t)?, load(target, t)?);
            let n = count_morphisms(s.presheaf(), g.presheaf(), cli.budget)?;
            Ok(render(cli.format, &json!({ "count": n })) + "\n")
        }
        Command::AdjointCheck { source, target, via, second } => {
            let f = load(source, t)?;
            let g = target.as_ref().map(|p| load(p, t)).transpose()?;
            adjoint_check(cli, f.presheaf(), g.as_ref().map(AnyModel::presheaf), via.as_deref(), *second)
        }
        Command::Clique { input, output } => {
            let model = load(input, t)?;
            let converted = convert("clique", model, t, cli.budget)?;
            emit_model(&converted, output)
        }
        Command::Faces { input, cell } => {
            let AnyModel::SemiSimplicialSet(x) = load(input, t)? else {
                return Err(usage("faces needs a semi_simplicial_set"));
            };
            let c = parse_cell(x.presheaf(), cell)?;
            let faces: Vec<Value> = x
                .subsimplices(&c)?
                .iter()
                .map(|c| json!({ "cell": c.to_string(), "label": x.presheaf().label(c) }))
                .collect();
            Ok(render(cli.format, &json!({ "faces": faces })) + "\n")
        }
        Command::Skeleton { input, output } => {
            let model = load(input, t)?;
            let converted = convert("sset-graph", model, t, cli.budget)?;
            emit_model(&converted, output)
        }
    }
}

fn normalize(name: &str) -> String {
    name.replace('→', "-").to_lowercase()
}

fn parse_cell(p: &Presheaf, text: &str) -> CliResult<CellId> {
    if let Some((obj, idx)) = text.split_once('#') {
        let object: ObjectId = obj.parse()?;
        let index: usize = idx.parse().map_err(|_| usage(format!("bad cell index in {text:?}")))?;
        if index >= p.cell_count(&object) {
            return Err(usage(format!("no cell {text}")));
        }
        return Ok(CellId::new(object, index));
    }
    p.objects().iter().find_map(|o| p.find(o, text)).ok_or_else(|| usage(format!("no cell labelled {text:?}")))
}

fn wrong_input(name: &str, model: &AnyModel) -> Failure {
    usage(format!("{name} does not apply to a {}", model.kind()))
}

fn convert(name: &str, model: AnyModel, t: usize, budget: u64) -> CliResult<AnyModel> {
    let out = match (name, &model) {
        ("graph-hypergraph", AnyModel::Graph(g)) => AnyModel::Hypergraph(g.to_hypergraph(t)?),
        ("hypergraph-graph", AnyModel::Hypergraph(h)) => AnyModel::Graph(h.to_graph()?),
        ("hypergraph-sset", AnyModel::Hypergraph(h)) => AnyModel::SimplicialSet(h.to_simplicial()?),
        ("sset-hypergraph", AnyModel::SimplicialSet(x)) => AnyModel::Hypergraph(x.to_hypergraph()?),
        ("graph-semisset-skeletal", AnyModel::Graph(g)) => AnyModel::SemiSimplicialSet(g.to_semi_simplicial(t)?),
        ("graph-semisset-clique" | "clique", AnyModel::Graph(g)) => {
            AnyModel::SemiSimplicialSet(g.clique_completion(t, budget)?)
        }
        ("semisset-symmetric", AnyModel::SemiSimplicialSet(x)) => AnyModel::SymmetricSSet(x.symmetrize()?.model),
        ("semisset-sset", AnyModel::SemiSimplicialSet(x)) => AnyModel::SimplicialSet(x.to_simplicial()?),
        ("sset-graph" | "semisset-graph", AnyModel::SemiSimplicialSet(x)) => AnyModel::Graph(x.one_skeleton()?),
        (
            "graph-hypergraph"
            | "hypergraph-graph"
            | "hypergraph-sset"
            | "sset-hypergraph"
            | "graph-semisset-skeletal"
            | "graph-semisset-clique"
            | "clique"
            | "semisset-symmetric"
            | "semisset-sset"
            | "sset-graph"
            | "semisset-graph",
            _,
        ) => return Err(wrong_input(name, &model)),
        _ => return Err(usage(format!("unknown conversion {name:?}"))),
    };
    Ok(out)
}

/// Roster functors starting at `tag`.
fn applicable(tag: CategoryTag) -> Vec<&'static str> {
    match tag {
        CategoryTag::Graph => vec!["i", "skeletal"],
        CategoryTag::Hyper => vec!["A", "hypergraph-semisset"],
        CategoryTag::SemiSimplex => vec!["symmetric", "simplicial"],
        _ => Vec::new(),
    }
}

fn adjoint_check(cli: &Cli, f: &Presheaf, g: Option<&Presheaf>, via: Option<&str>, second: bool) -> CliResult<String> {
    let names: Vec<&str> = match via {
        Some(v) => vec![v],
        None => applicable(f.index().tag()),
    };
    if names.is_empty() {
        return Err(usage(format!("no built-in functor starts at {}", f.index().tag())));
    }
    // graphs carry no truncation of their own; follow the target model
    let size = match (f.index().tag(), g) {
        (CategoryTag::Graph, Some(g)) => g.index().truncation(),
        (CategoryTag::Graph, None) => cli.truncation,
        _ => f.index().truncation(),
    };
    let mut results = Vec::new();
    let mut all_hold = true;
    for name in names {
        let h = ModelFunctor::by_name(name, size)?;
        if let Some(g) = g {
            if g.index().category != h.target().category {
                if via.is_some() {
                    return Err(usage(format!(
                        "{name} expects a target model over {} (truncation {})",
                        h.target().tag(),
                        h.target().truncation()
                    )));
                }
                continue;
            }
        }
        let owned;
        let target = match g {
            Some(g) => g,
            None => {
                owned = left_kan(&h, f)?.presheaf;
                &owned
            }
        };
        let adj = check_adjunction(&h, f, target, cli.budget, second)?;
        let tri = triangle_identities(&h, f, target, cli.budget, second)?;
        all_hold &= adj.holds() && tri.holds();
        let mut entry = json!({
            "functor": h.name(),
            "hom_left_kan_to_target": adj.left.domain,
            "hom_source_to_restriction": adj.left.codomain,
            "bijective": adj.left.bijective,
            "triangle_identities": tri.left_counit_after_unit && tri.restricted_counit_after_unit,
        });
        if let Some(w) = &adj.left.witness {
            entry["witness"] = json!(w);
        }
        if let Some(r) = &adj.right {
            entry["second"] = json!({
                "hom_target_to_right_kan": r.domain,
                "hom_restriction_to_source": r.codomain,
                "bijective": r.bijective,
                "triangle_identities": tri.right.is_some_and(|(a, b)| a && b),
            });
        }
        results.push(entry);
    }
    if results.is_empty() {
        return Err(usage("no built-in functor matches the given pair of models"));
    }
    let value = json!({ "holds": all_hold, "checks": results });
    let out = render(cli.format, &value) + "\n";
    if all_hold {
        Ok(out)
    } else {
        Err(Failure { code: 1, message: "adjunction check failed".into(), report: Some(value) })
    }
}
