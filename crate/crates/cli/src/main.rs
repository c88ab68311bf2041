use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use shellkit_core::complex_shell::{
    find_shelling_order, lattice_order_complex, order_complex, DimFormula, SimplicialComplex,
    DEFAULT_FACET_CAP,
};
use shellkit_core::corpus::{classify_all, corpus, CSV_HEADER};
use shellkit_core::generators::generate;
use shellkit_core::lattice_props::{
    find_sub_m_chain, is_comodernistic, is_left_modular, is_modernistic,
};
use shellkit_core::order_congruence::{
    canonical_chain, index_blocks, ocl_edge_labeling, order_congruence_lattice, verify_prop_5_1,
    OclFile,
};
use shellkit_core::shelling::{
    comodernistic_labeling, lift_to_el_labeling, search_recursive_atom_ordering,
    verify_cl_labeling, verify_el_shelling, verify_recursive_atom_ordering, AtomOrderingTable,
    ChainEdgeLabeling, EdgeLabeling, Label, LabelingFile, RisingMode, SearchCaps,
};
use shellkit_core::{ElemId, Error, Lattice, Poset, PosetFile};

#[derive(Parser)]
#[command(
    name = "shellkit",
    version,
    about = "Lexicographic shellability toolkit for finite lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelMode {
    Comodernistic,
    Lift,
    Ocl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Checker {
    El,
    Cl,
    Rao,
    Shelling,
    Prop51,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a generated poset as JSON.
    Gen { name: String, size: usize },
    /// Build the order congruence lattice of a poset.
    Ocl {
        #[arg(long)]
        input: PathBuf,
    },
    /// Left-modular elements, (co)modernistic verdicts and a sub-M-chain.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Construct an edge labeling.
    Label {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: LabelMode,
        /// Index into the lexicographic list of linear extensions (ocl mode).
        #[arg(long, default_value_t = 0)]
        linext: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run a verifier. Exit 0 on pass, 1 on failure.
    Verify {
        #[arg(value_enum)]
        checker: Checker,
        #[arg(long)]
        input: PathBuf,
        /// Labeling JSON (el, cl) or a file with an `atom_ordering` table (rao).
        #[arg(long)]
        labeling: Option<PathBuf>,
        /// Search cap: facets for shelling, elements for rao.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        cap: Option<u64>,
        #[arg(long)]
        strict_lex: bool,
        #[arg(long)]
        paper_dim_formula: bool,
    },
    /// Enumerate all lattices up to a size and classify them.
    Corpus {
        max_n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Hasse diagram as DOT, or the order complex as JSON.
    Export {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        labeling: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
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

type CmdResult = Result<ExitCode, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("invalid {what} JSON: {e}")))
}

fn read_poset(path: &Path) -> Result<Poset, Failure> {
    let file: PosetFile = parse(&read_input(path)?, "poset")?;
    Ok(Poset::from_file(&file)?)
}

fn read_lattice(path: &Path) -> Result<Lattice, Failure> {
    Ok(Lattice::from_poset(read_poset(path)?)?)
}

fn read_labeling(path: &Path) -> Result<EdgeLabeling, Failure> {
    let file: LabelingFile = parse(&read_input(path)?, "labeling")?;
    Ok(EdgeLabeling::from_file(&file)?)
}

fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    if !text.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
}

fn emit_json<T: Serialize>(value: &T) {
    emit(&serde_json::to_string_pretty(value).expect("serializable"));
}

fn verdict_code(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn rising_mode(strict_lex: bool) -> RisingMode {
    if strict_lex {
        RisingMode::LinearExtension
    } else {
        RisingMode::PartialOrder
    }
}

fn nth_linext(p: &Poset, k: usize) -> Result<Vec<ElemId>, Failure> {
    p.linear_extensions()
        .nth(k)
        .ok_or_else(|| Failure::Usage(format!("linear extension index {k} out of range")))
}

fn cmd_gen(name: &str, size: usize) -> CmdResult {
    emit_json(&generate(name, size)?.to_file());
    Ok(ExitCode::SUCCESS)
}

fn cmd_ocl(input: &Path) -> CmdResult {
    let ocl = order_congruence_lattice(&read_poset(input)?)?;
    emit_json(&ocl.to_file());
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(input: &Path) -> CmdResult {
    let l = read_lattice(input)?;
    let left_modular: Vec<ElemId> = (0..l.len()).filter(|&m| is_left_modular(&l, m)).collect();
    let sub_m = find_sub_m_chain(&l).ok();
    let report = json!({
        "elements": l.poset().names(),
        "size": l.len(),
        "left_modular": left_modular,
        "comodernistic": is_comodernistic(&l),
        "modernistic": is_modernistic(&l),
        "sub_m_chain": sub_m.map(|m| m.chain),
    });
    emit_json(&report);
    Ok(ExitCode::SUCCESS)
}

/// `ocl` input: an [`OclFile`] (its ground poset is used) or a plain poset.
fn read_ground(path: &Path) -> Result<Poset, Failure> {
    let text = read_input(path)?;
    let value: Value = parse(&text, "input")?;
    if value.get("ground").is_some() {
        let file: OclFile = parse(&text, "order congruence lattice")?;
        Ok(Poset::from_file(&file.ground)?)
    } else {
        let file: PosetFile = parse(&text, "poset")?;
        Ok(Poset::from_file(&file)?)
    }
}

fn cmd_label(input: &Path, mode: LabelMode, linext: usize, format: Format) -> CmdResult {
    let (l, labeling, extra) = match mode {
        LabelMode::Comodernistic | LabelMode::Lift => {
            let l = read_lattice(input)?;
            let c = comodernistic_labeling(&l)?;
            let extra = json!({
                "atom_ordering": c.atom_ordering,
                "sub_m_chains": c.family.chains.iter()
                    .map(|(x, m)| (x.to_string(), m.chain.clone()))
                    .collect::<BTreeMap<String, Vec<ElemId>>>(),
            });
            let labeling = match mode {
                LabelMode::Lift => lift_to_el_labeling(&l, &c)?,
                _ => EdgeLabeling::from_integers(&c.labels),
            };
            (l, labeling, extra)
        }
        LabelMode::Ocl => {
            let p = read_ground(input)?;
            let ocl = order_congruence_lattice(&p)?;
            let order = nth_linext(&p, linext)?;
            let labeling = ocl_edge_labeling(&ocl, &order)?;
            let extra = json!({
                "linext": order,
                "canonical_chain": canonical_chain(&ocl, &order)?,
                "indexed_blocks": ocl.partitions.iter()
                    .map(|op| index_blocks(op, &order).blocks)
                    .collect::<Vec<_>>(),
            });
            (ocl.lattice, labeling, extra)
        }
    };
    match format {
        Format::Dot => emit(&hasse_dot(&l, Some(&labeling))),
        Format::Json => {
            let mut value = serde_json::to_value(labeling.to_file()).expect("serializable");
            if let (Value::Object(map), Value::Object(more)) = (&mut value, extra) {
                map.extend(more);
            }
            emit_json(&value);
        }
        Format::Csv => return Err(Failure::Usage("label supports json and dot".into())),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    checker: Checker,
    input: &Path,
    labeling: Option<&Path>,
    cap: Option<usize>,
    strict_lex: bool,
    paper_dim_formula: bool,
) -> CmdResult {
    let need_labeling = || {
        labeling
            .ok_or_else(|| Failure::Usage("this checker needs --labeling".into()))
            .and_then(read_labeling)
    };
    match checker {
        Checker::El => {
            let l = read_lattice(input)?;
            let report = verify_el_shelling(&l, &need_labeling()?, rising_mode(strict_lex))?;
            emit_json(&report);
            Ok(verdict_code(report.passed()))
        }
        Checker::Cl => {
            let l = read_lattice(input)?;
            let cl = ChainEdgeLabeling::from_edge_labeling(&l, &need_labeling()?)?;
            let report = verify_cl_labeling(&l, &cl, rising_mode(strict_lex))?;
            emit_json(&report);
            Ok(verdict_code(report.passed()))
        }
        Checker::Rao => {
            let l = read_lattice(input)?;
            match labeling {
                Some(path) => {
                    let value: Value = parse(&read_input(path)?, "atom ordering")?;
                    let table_value = value.get("atom_ordering").cloned().unwrap_or(value);
                    let table: AtomOrderingTable = serde_json::from_value(table_value)
                        .map_err(|e| Failure::Usage(format!("invalid atom ordering table: {e}")))?;
                    let report = verify_recursive_atom_ordering(&l, &table)?;
                    emit_json(&report);
                    Ok(verdict_code(report.passed()))
                }
                None => {
                    let mut caps = SearchCaps::default();
                    if let Some(c) = cap {
                        caps.max_elements = c;
                    }
                    let found = search_recursive_atom_ordering(&l, caps)?;
                    emit_json(&json!({
                        "verdict": if found.is_some() { "pass" } else { "fail" },
                        "atom_ordering": found,
                    }));
                    Ok(verdict_code(found.is_some()))
                }
            }
        }
        Checker::Shelling => {
            let complex = complex_of(&read_poset(input)?);
            let formula = if paper_dim_formula {
                DimFormula::Paper
            } else {
                DimFormula::Standard
            };
            let order = find_shelling_order(&complex, cap.unwrap_or(DEFAULT_FACET_CAP), formula)?;
            emit_json(&json!({
                "verdict": if order.is_some() { "pass" } else { "fail" },
                "facets": complex.facets,
                "order": order,
            }));
            Ok(verdict_code(order.is_some()))
        }
        Checker::Prop51 => {
            let report = verify_prop_5_1(&read_poset(input)?)?;
            emit_json(&report);
            Ok(verdict_code(report.passed()))
        }
    }
}

/// Proper part for lattices, the whole order complex otherwise.
fn complex_of(p: &Poset) -> SimplicialComplex {
    match Lattice::from_poset(p.clone()) {
        Ok(l) => lattice_order_complex(&l),
        Err(_) => order_complex(p),
    }
}

fn cmd_corpus(max_n: usize, format: Format) -> CmdResult {
    let lattices = corpus(max_n)?;
    let rows = classify_all(&lattices)?;
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in &rows {
                out.push_str(&r.to_csv());
                out.push('\n');
            }
            emit(&out);
        }
        Format::Json => {
            let mut out = String::new();
            for (r, l) in rows.iter().zip(&lattices) {
                let line = json!({ "classification": r, "lattice": l.poset().to_file() });
                out.push_str(&serde_json::to_string(&line).expect("serializable"));
                out.push('\n');
            }
            emit(&out);
        }
        Format::Dot => return Err(Failure::Usage("corpus supports csv and json".into())),
    }
    Ok(ExitCode::SUCCESS)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn hasse_dot(l: &Lattice, labeling: Option<&EdgeLabeling>) -> String {
    poset_dot(l.poset(), labeling)
}

fn poset_dot(p: &Poset, labeling: Option<&EdgeLabeling>) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for x in 0..p.len() {
        out.push_str(&format!("  n{x} [label=\"{}\"];\n", dot_escape(p.name(x))));
    }
    for &(x, y) in p.covers() {
        let attrs = match labeling.and_then(|el| el.label_id(x, y).map(|id| (el, id))) {
            None => String::new(),
            Some((el, id)) => match el.label_poset().label(id) {
                Label::Int(v) => format!(" [label=\"{v}\"]"),
                tuple => format!(
                    " [label=\"{}\", tooltip=\"{}\"]",
                    el.label_poset().rank(id),
                    dot_escape(&tuple.to_string())
                ),
            },
        };
        out.push_str(&format!("  n{x} -> n{y}{attrs};\n"));
    }
    out.push_str("}\n");
    out
}

fn cmd_export(input: &Path, labeling: Option<&Path>, format: Format) -> CmdResult {
    let p = read_poset(input)?;
    match format {
        Format::Dot => {
            let labeling = labeling.map(read_labeling).transpose()?;
            emit(&poset_dot(&p, labeling.as_ref()));
        }
        Format::Json => emit_json(&complex_of(&p)),
        Format::Csv => return Err(Failure::Usage("export supports dot and json".into())),
    }
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("SHELLKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "SHELLKIT_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CmdResult {
    configure_threads()?;
    match cli.command {
        Command::Gen { name, size } => cmd_gen(&name, size),
        Command::Ocl { input } => cmd_ocl(&input),
        Command::Analyze { input } => cmd_analyze(&input),
        Command::Label {
            input,
            mode,
            linext,
            format,
        } => cmd_label(&input, mode, linext, format),
        Command::Verify {
            checker,
            input,
            labeling,
            cap,
            strict_lex,
            paper_dim_formula,
        } => cmd_verify(
            checker,
            &input,
            labeling.as_deref(),
            cap.map(|c| c as usize),
            strict_lex,
            paper_dim_formula,
        ),
        Command::Corpus { max_n, format } => cmd_corpus(max_n, format),
        Command::Export {
            input,
            labeling,
            format,
        } => cmd_export(&input, labeling.as_deref(), format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
