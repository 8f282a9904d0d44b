//! The `dendroid` command line: K₀ and Kan computations on construction
//! expressions, hom and face listings, and the verification suites.

use std::io::Write;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dset::DSet;
use crate::expr::{self, ExprError};
use crate::kan::{self, KanReport};
use crate::kzero::{self, KzeroError};
use crate::omega::{self, FaceLabel};
use crate::tree::Tree;
use crate::verify::{self, VerifyOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "dendroid", version, about = "K0 and Kan conditions for finite dendroidal sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Largest number of vertices of trees checked for horn filling
    #[arg(long, global = true, default_value = "3", value_parser = positive)]
    pub max_vertices: usize,
    /// Largest vertex arity of trees checked for horn filling
    #[arg(long, global = true, default_value = "3", value_parser = positive)]
    pub max_arity: usize,
    /// Corolla arity cutoff for K0 relations (at least the set's own bound)
    #[arg(long, global = true)]
    pub arity_bound: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute K0 of an expression
    K0 { expr: String },
    /// Check inner or full horn filling up to the tree bounds
    CheckKan {
        #[arg(long, conflicts_with = "full", required_unless_present = "full")]
        inner: bool,
        #[arg(long)]
        full: bool,
        expr: String,
    },
    /// List all maps S -> T in the tree category
    Hom { source: String, target: String },
    /// List the faces of a tree
    Faces { tree: String },
    /// Run a verification suite (or `all`)
    Verify { suite: String },
}

#[derive(Debug, thiserror::Error)]
enum InputError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Kzero(#[from] KzeroError),
    #[error("{0}")]
    Other(String),
}

struct Output {
    text: String,
    json: serde_json::Value,
    code: i32,
}

#[derive(Serialize)]
struct GeneratorDoc {
    index: usize,
    label: String,
    token: String,
}

#[derive(Serialize)]
struct RelationDoc {
    arity: usize,
    source: String,
    relation: String,
    entries: Vec<(usize, i64)>,
}

#[derive(Serialize)]
struct ComponentDoc {
    component: usize,
    members: Vec<String>,
    representative: String,
    image: String,
}

#[derive(Serialize)]
struct K0Doc {
    expression: String,
    group: String,
    rank: usize,
    torsion: Vec<String>,
    arity_bound: usize,
    generators: Vec<GeneratorDoc>,
    relations: Vec<RelationDoc>,
    lambda: Vec<ComponentDoc>,
    lambda_injective: bool,
    lambda_surjective: bool,
}

fn build(src: &str) -> Result<DSet, InputError> {
    let e = expr::parse(src)?;
    Ok(expr::evaluate(&e)?)
}

fn cmd_k0(src: &str, cli: &Cli) -> Result<Output, InputError> {
    let d = build(src)?;
    let pres = kzero::presentation(&d, cli.arity_bound)?;
    let group = pres.group();
    let lam = kzero::lambda(&d)?;
    let eta = Arc::new(Tree::eta());
    let mut lambda = Vec::new();
    for (c, &rep) in lam.representatives.iter().enumerate() {
        let members: Vec<String> = lam
            .components
            .class_of
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k == c)
            .map(|(v, _)| lam.components.labels[v].clone())
            .collect();
        let coords = group.generator_coordinates(pres.generator_index(&lam.components.vertices[rep]).expect("η-dendrex"));
        let image: Vec<String> = coords.torsion.iter().chain(&coords.free).map(ToString::to_string).collect();
        lambda.push(ComponentDoc {
            component: c,
            representative: lam.components.labels[rep].clone(),
            members,
            image: format!("({})", image.join(", ")),
        });
    }
    let doc = K0Doc {
        expression: src.to_string(),
        group: group.render(),
        rank: group.rank(),
        torsion: group.torsion().iter().map(ToString::to_string).collect(),
        arity_bound: pres.arity_bound,
        generators: pres
            .generators
            .iter()
            .enumerate()
            .map(|(i, x)| GeneratorDoc {
                index: i,
                label: d.label(&eta, x),
                token: x.to_string(),
            })
            .collect(),
        relations: pres
            .rows
            .iter()
            .map(|r| RelationDoc {
                arity: r.arity,
                source: r.source.clone(),
                relation: pres.render_row(r),
                entries: r.entries.clone(),
            })
            .collect(),
        lambda,
        lambda_injective: lam.injective,
        lambda_surjective: lam.surjective,
    };
    let mut text = format!("K0 = {}\n", doc.group);
    text.push_str(&format!("generators ({}):\n", doc.generators.len()));
    for g in &doc.generators {
        text.push_str(&format!("  g{} = {}  [{}]\n", g.index, g.label, g.token));
    }
    text.push_str(&format!("relations ({}, corollas up to arity {}):\n", doc.relations.len(), doc.arity_bound));
    for r in &doc.relations {
        text.push_str(&format!("  {}  [C{} {}]\n", r.relation, r.arity, r.source));
    }
    text.push_str(&format!("lambda on {} components:\n", doc.lambda.len()));
    for c in &doc.lambda {
        text.push_str(&format!("  [{}] {{{}}} -> {}\n", c.representative, c.members.join(", "), c.image));
    }
    text.push_str(&format!(
        "lambda injective: {}, surjective: {}\n",
        doc.lambda_injective, doc.lambda_surjective
    ));
    Ok(Output {
        text,
        json: serde_json::to_value(&doc).expect("serializable"),
        code: EXIT_PASS,
    })
}

fn cmd_check_kan(src: &str, full: bool, cli: &Cli) -> Result<Output, InputError> {
    let d = build(src)?;
    let report: KanReport = if full {
        kan::check_fully_kan(&d, cli.max_vertices, cli.max_arity)
    } else {
        kan::check_inner_kan(&d, cli.max_vertices, cli.max_arity)
    };
    Ok(Output {
        text: report.render(),
        json: serde_json::to_value(&report).expect("serializable"),
        code: if report.passed { EXIT_PASS } else { EXIT_FAIL },
    })
}

fn tree_arg(src: &str) -> Result<Arc<Tree>, InputError> {
    Ok(expr::parse_tree(src)?.tree)
}

fn cmd_hom(s: &str, t: &str) -> Result<Output, InputError> {
    let (s, t) = (tree_arg(s)?, tree_arg(t)?);
    let maps: Vec<String> = omega::hom(&s, &t).iter().map(ToString::to_string).collect();
    let mut text = format!("{} maps {s} => {t}\n", maps.len());
    for m in &maps {
        text.push_str(&format!("  {m}\n"));
    }
    let json = serde_json::json!({
        "source": s.to_string(),
        "target": t.to_string(),
        "count": maps.len(),
        "maps": maps,
    });
    Ok(Output {
        text,
        json,
        code: EXIT_PASS,
    })
}

fn cmd_faces(t: &str) -> Result<Output, InputError> {
    let t = tree_arg(t)?;
    let mut text = String::new();
    let mut faces = Vec::new();
    for f in omega::faces(&t) {
        let kind = match f.label {
            FaceLabel::Inner(_) => "inner",
            FaceLabel::Outer(_) | FaceLabel::Colour(_) => "outer",
        };
        let label = f.label.render(&t);
        text.push_str(&format!("{label}\t{kind}\t{}\n", f.map));
        faces.push(serde_json::json!({"label": label, "kind": kind, "map": f.map.to_string()}));
    }
    if faces.is_empty() {
        text.push_str("no faces\n");
    }
    Ok(Output {
        text,
        json: serde_json::json!({"tree": t.to_string(), "faces": faces}),
        code: EXIT_PASS,
    })
}

fn cmd_verify(suite: &str, cli: &Cli) -> Result<Output, InputError> {
    let opts = VerifyOptions {
        max_vertices: cli.max_vertices,
        max_arity: cli.max_arity,
        seed: cli.seed,
    };
    let reports = verify::run_suite(suite, &opts).ok_or_else(|| {
        InputError::Other(format!(
            "unknown suite `{suite}`; available: {}, all",
            verify::SUITES.join(", ")
        ))
    })?;
    let passed = reports.iter().all(|r| r.passed);
    Ok(Output {
        text: reports.iter().map(|r| r.render()).collect(),
        json: serde_json::json!({"passed": passed, "suites": reports}),
        code: if passed { EXIT_PASS } else { EXIT_FAIL },
    })
}

fn dispatch(cli: &Cli) -> Result<Output, InputError> {
    match &cli.command {
        Command::K0 { expr } => cmd_k0(expr, cli),
        Command::CheckKan { full, expr, .. } => cmd_check_kan(expr, *full, cli),
        Command::Hom { source, target } => cmd_hom(source, target),
        Command::Faces { tree } => cmd_faces(tree),
        Command::Verify { suite } => cmd_verify(suite, cli),
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let _ = match cli.format {
                Format::Text => write!(out, "{}", o.text),
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("serializable")),
            };
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
