use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ehrq_core::eval::{
    corpus_stats, evaluate_predictions, read_dataset, read_predictions, verify_equivalence, write_jsonl, DatasetRecord,
    EvalReport, Store,
};
use ehrq_core::fixture::{builtin_templates, five_to_nine_mapping, gen_fixture, FixtureSchema, FixtureSpec};
use ehrq_core::kg::{build_kg, execute_sparql, kg_metrics, KnowledgeGraph};
use ehrq_core::query::{parse_sparql, parse_sql, serialize_sparql, serialize_sql, Lang, SqlQuery, Tokenization};
use ehrq_core::relational::{execute_sql, load_database, Database, ResultSet};
use ehrq_core::schema::{build_schema_graph, load_manifest, SchemaManifest};
use ehrq_core::transpile::{load_templates, renormalize_sql, sample_query_corpus, sql_to_sparql, ColumnMapping};
use ehrq_core::value::CellValue;

#[derive(Parser)]
#[command(name = "ehrq", version, about = "Relational EHR data as a knowledge graph: transpile, run and score SQL and SPARQL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct StoreArgs {
    /// Schema manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Directory holding one `<table>.csv` per manifest table.
    #[arg(long)]
    data: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic database (manifest, CSVs and query templates).
    GenFixture {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        patients: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// five_table or nine_table.
        #[arg(long, default_value = "nine_table")]
        schema: FixtureSchema,
    },
    /// Compile a database into triples; prints triple count and depth.
    BuildKg {
        #[command(flatten)]
        store: StoreArgs,
        /// Optional TSV dump of every triple.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translate SQL into SPARQL, one query or a whole dataset file.
    Transpile {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        sql: Option<String>,
        /// Dataset JSONL; the `sparql` field of every line is filled in.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite SQL from one schema into another.
    Renormalize {
        #[arg(long)]
        source_manifest: PathBuf,
        #[arg(long)]
        target_manifest: PathBuf,
        /// JSON object `{"table.column": "table.column"}`.
        #[arg(long)]
        mapping: PathBuf,
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        sql: Option<String>,
        /// Dataset JSONL; every `sql` field is rewritten and `sparql` cleared.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "split")]
        tokenization: Tokenization,
    },
    /// Instantiate query templates with values sampled from the data.
    SampleCorpus {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        templates: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "split")]
        tokenization: Tokenization,
    },
    /// Execute one SQL query; prints the result as JSON.
    RunSql {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        query: String,
    },
    /// Execute one SPARQL query against the compiled graph.
    RunSparql {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        query: String,
    },
    /// Check that every SQL query and its translation return the same answer.
    VerifyEquivalence {
        #[command(flatten)]
        store: StoreArgs,
        /// Dataset JSONL; only the `sql` field is read.
        #[arg(long)]
        corpus: PathBuf,
        /// Full JSON report including every mismatch.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Score predictions with logic-form, execution and structural accuracy.
    Evaluate {
        /// Predictions JSONL of `{"gold", "pred"}`.
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        lang: Lang,
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long, default_value = "split")]
        tokenization: Tokenization,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Length statistics and histograms of a dataset.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Evaluation report aligned with the dataset, for per-join accuracies.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value = "split")]
        tokenization: Tokenization,
    },
}

/// A failed check that is not an error of the tool itself.
#[derive(Debug)]
struct ValidationFailure(String);

impl std::fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationFailure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<ValidationFailure>().is_none() {
                eprintln!("error: {e:#}");
            } else {
                eprintln!("{e}");
            }
            ExitCode::from(1)
        }
    }
}

fn open_store(s: &StoreArgs) -> Result<(SchemaManifest, Database)> {
    let manifest = load_manifest(&s.manifest).with_context(|| format!("loading {}", s.manifest.display()))?;
    let db = load_database(&manifest, &s.data).with_context(|| format!("loading {}", s.data.display()))?;
    Ok((manifest, db))
}

fn open_kg(s: &StoreArgs) -> Result<(SchemaManifest, Database, KnowledgeGraph)> {
    let (manifest, db) = open_store(s)?;
    let kg = build_kg(&db, &manifest);
    Ok((manifest, db, kg))
}

fn cell_json(c: &CellValue) -> Value {
    match c {
        CellValue::Null => Value::Null,
        CellValue::Text(s) => json!(s),
        CellValue::Integer(i) => json!(i),
        CellValue::Float(x) => json!(x),
    }
}

fn result_json(r: &ResultSet) -> Value {
    json!({
        "columns": r.columns,
        "rows": r.rows.iter().map(|row| row.iter().map(cell_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::GenFixture { out, patients, seed, schema } => {
            let fixture = gen_fixture(FixtureSpec { n_patients: patients, seed, schema }).map_err(anyhow::Error::msg)?;
            fixture.write_to(&out).with_context(|| format!("writing {}", out.display()))?;
            fs::write(out.join("templates.json"), builtin_templates(schema))?;
            if schema == FixtureSchema::FiveTable {
                fs::write(out.join("mapping_to_nine.json"), five_to_nine_mapping().to_json_string() + "\n")?;
            }
            println!("wrote {} tables for {patients} patients to {}", fixture.manifest.tables.len(), out.display());
        }
        Command::BuildKg { store, out } => {
            let (_, _, kg) = open_kg(&store)?;
            if let Some(p) = &out {
                fs::write(p, kg.dump_tsv()).with_context(|| format!("writing {}", p.display()))?;
            }
            print!("{}", pretty(&kg_metrics(&kg)));
        }
        Command::Transpile { manifest, sql, input, out } => {
            let manifest = load_manifest(&manifest)?;
            let graph = build_schema_graph(&manifest)?;
            if let Some(sql) = sql {
                let q = parse_sql(&sql)?;
                emit(out.as_deref(), &(serialize_sparql(&sql_to_sparql(&q, &graph)?).to_line() + "\n"))?;
            } else {
                let input = input.expect("clap enforces one of --sql/--input");
                let mut records = read_dataset(&input)?;
                for (i, r) in records.iter_mut().enumerate() {
                    let q = parse_sql(&r.sql).with_context(|| format!("line {}", i + 1))?;
                    let s = sql_to_sparql(&q, &graph).with_context(|| format!("line {}", i + 1))?;
                    r.sparql = Some(serialize_sparql(&s).to_line());
                }
                emit(out.as_deref(), &write_jsonl(&records))?;
            }
        }
        Command::Renormalize { source_manifest, target_manifest, mapping, sql, input, out, tokenization } => {
            let source = load_manifest(&source_manifest)?;
            let target = build_schema_graph(&load_manifest(&target_manifest)?)?;
            let text = fs::read_to_string(&mapping).with_context(|| format!("reading {}", mapping.display()))?;
            let mapping = ColumnMapping::from_json_str(&text)?;
            let rewrite = |s: &str| -> Result<String> {
                let q = renormalize_sql(&parse_sql(s)?, &mapping, &source, &target)?;
                Ok(serialize_sql(&q, tokenization).to_line())
            };
            if let Some(sql) = sql {
                emit(out.as_deref(), &(rewrite(&sql)? + "\n"))?;
            } else {
                let input = input.expect("clap enforces one of --sql/--input");
                let mut records = read_dataset(&input)?;
                for (i, r) in records.iter_mut().enumerate() {
                    r.sql = rewrite(&r.sql).with_context(|| format!("line {}", i + 1))?;
                    r.sparql = None;
                }
                emit(out.as_deref(), &write_jsonl(&records))?;
            }
        }
        Command::SampleCorpus { store, templates, n, seed, out, tokenization } => {
            let (manifest, db) = open_store(&store)?;
            let graph = build_schema_graph(&manifest)?;
            let templates = load_templates(&templates)?;
            let pairs = sample_query_corpus(&templates, &db, n, seed)?;
            let records: Vec<DatasetRecord> = pairs
                .iter()
                .zip(templates.iter().cycle())
                .map(|(p, t)| DatasetRecord {
                    nlq_template: t.nlq.clone(),
                    nlq_natural: Some(p.nlq.clone()),
                    sql: serialize_sql(&p.sql, tokenization).to_line(),
                    sparql: sql_to_sparql(&p.sql, &graph).ok().map(|s| serialize_sparql(&s).to_line()),
                })
                .collect();
            fs::write(&out, write_jsonl(&records)).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} pairs to {}", records.len(), out.display());
        }
        Command::RunSql { store, query } => {
            let (_, db) = open_store(&store)?;
            let r = execute_sql(&db, &parse_sql(&query)?)?;
            print!("{}", pretty(&result_json(&r)));
        }
        Command::RunSparql { store, query } => {
            let (_, _, kg) = open_kg(&store)?;
            let r = execute_sparql(&kg, &parse_sparql(&query)?)?;
            print!("{}", pretty(&result_json(&r)));
        }
        Command::VerifyEquivalence { store, corpus, report } => {
            let (manifest, db, kg) = open_kg(&store)?;
            let graph = build_schema_graph(&manifest)?;
            let queries: Vec<SqlQuery> = read_dataset(&corpus)?
                .iter()
                .enumerate()
                .map(|(i, r)| parse_sql(&r.sql).with_context(|| format!("{} line {}", corpus.display(), i + 1)))
                .collect::<Result<_>>()?;
            let rep = verify_equivalence(&queries, &db, &kg, &graph);
            if let Some(p) = &report {
                fs::write(p, pretty(&rep)).with_context(|| format!("writing {}", p.display()))?;
            }
            println!("match_rate {:.3} ({}/{})", rep.match_rate, rep.matched, rep.n);
            for m in rep.mismatches.iter().take(10) {
                eprintln!("mismatch at {}: {}\n  sql:    {}\n  sparql: {}", m.index, m.note, m.sql, m.sparql.as_deref().unwrap_or("-"));
            }
            if rep.matched != rep.n {
                bail!(ValidationFailure(format!("{} of {} queries disagree", rep.n - rep.matched, rep.n)));
            }
        }
        Command::Evaluate { pred, lang, store, tokenization, out } => {
            let pairs = read_predictions(&pred)?;
            let (_, db, kg) = open_kg(&store)?;
            let store = match lang {
                Lang::Sql => Store::Sql(&db),
                Lang::Sparql => Store::Sparql(&kg),
            };
            let report = evaluate_predictions(&pairs, store, tokenization)?;
            emit(out.as_deref(), &pretty(&report))?;
        }
        Command::Stats { dataset, out, report, tokenization } => {
            let records = read_dataset(&dataset)?;
            let report: Option<EvalReport> = match &report {
                Some(p) => Some(
                    serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
                        .with_context(|| format!("parsing {}", p.display()))?,
                ),
                None => None,
            };
            let stats = corpus_stats(&records, report.as_ref().map(|r| r.pairs.as_slice()), tokenization)?;
            stats.write_to(&out).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "{} queries: mean sql {:.2}, mean sparql {:.2}, mean nlq {:.2} tokens",
                stats.n, stats.mean_sql_len, stats.mean_sparql_len, stats.mean_nlq_len
            );
        }
    }
    Ok(())
}
