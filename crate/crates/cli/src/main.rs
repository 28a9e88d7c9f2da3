//! `qrsid`: batch verification of the identity catalog.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qrsid::catalog::{proof_failures, Assignment, Catalog, Filter, Status};
use qrsid::ctengine::{master_check, sample_master, Master};
use qrsid::hyper::{sample_assignment, summation_check, Summation};
use qrsid::partitions::{first_mismatch, graded_product, s_table, t_table};
use qrsid::products::{format_exponent_table, prodmake};
use qrsid::report::{Summary, VerifyReport};
use qrsid::{Error, Exponent, Monomial, ProductExpr, QSeries, SumSide};

#[derive(Parser)]
#[command(name = "qrsid", version, about = "Exact verification of multi-sum Rogers-Ramanujan type identities")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compare sum and product sides of catalog records.
    Verify(VerifyArgs),
    /// Print the truncated expansion of an expression.
    Expand(ExprArgs),
    /// Recover product exponents `a: e_a` from an expansion.
    Prodmake(ExprArgs),
    /// Compare the colored partition counts S with T.
    Oracle {
        #[arg(long, default_value_t = 12)]
        nmax: u32,
    },
    /// Check random instances of the constant-term masters or the summation formulas.
    Sample(SampleArgs),
    /// Catalog maintenance.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    id: Option<String>,
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 40)]
    cap: i64,
    /// `name=monomial`, e.g. `u=-q^(1/2)`; requires --id.
    #[arg(long = "assign", requires = "id")]
    assign: Vec<String>,
    /// proved-in-paper, cited or conjecture.
    #[arg(long)]
    status: Option<String>,
    /// Only ids starting with this prefix.
    #[arg(long)]
    prefix: Option<String>,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Omit wall times so that output is reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct ExprArgs {
    /// `P: <product>`, `S: <id>`, `Q: <series>` or a JSON sum side.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    expr: Option<String>,
    /// File holding an expression in the same syntax.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    cap: i64,
    #[arg(long = "assign")]
    assign: Vec<String>,
}

#[derive(Args)]
struct SampleArgs {
    /// masters or summations.
    #[arg(long, default_value = "masters")]
    family: String,
    /// Only this formula, by name.
    #[arg(long)]
    only: Option<String>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 20)]
    cap: i64,
    #[arg(long, default_value_t = 20240601)]
    seed: u64,
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Write the catalog as JSON.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List record ids with status and parameters.
    List,
}

/// Failure modes mapped to exit codes.
enum Fail {
    Usage(String),
    Check,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Verify(a) => verify(a),
        Cmd::Expand(a) => expand(a),
        Cmd::Prodmake(a) => run_prodmake(a),
        Cmd::Oracle { nmax } => oracle(nmax),
        Cmd::Sample(a) => sample(a),
        Cmd::Catalog { cmd } => catalog(cmd),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Check) => ExitCode::from(1),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_assign(items: &[String]) -> Result<Assignment, Fail> {
    let mut out = Assignment::new();
    for item in items {
        let (name, value) =
            item.split_once('=').ok_or_else(|| Fail::Usage(format!("--assign expects name=monomial, got {item:?}")))?;
        let m = Monomial::parse(value.trim()).map_err(|e| Fail::Usage(format!("--assign {name}: {e}")))?;
        out.insert(name.trim().to_string(), m);
    }
    Ok(out)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, Fail> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Fail::Usage(e.to_string()))
}

fn emit(reports: &mut [VerifyReport], json: bool, timing: bool) {
    if !timing {
        for r in reports.iter_mut() {
            r.wall_ms = None;
        }
    }
    let mut out = std::io::stdout().lock();
    if json {
        let text = serde_json::to_string_pretty(&*reports).expect("reports serialize");
        let _ = writeln!(out, "{text}");
    } else {
        for r in reports.iter() {
            let _ = writeln!(out, "{r}");
        }
        let _ = writeln!(out, "{}", Summary::of(reports));
    }
}

fn verify(a: VerifyArgs) -> Result<(), Fail> {
    let cat = Catalog::from_env()?;
    let cap = Exponent::from_integer(a.cap);
    let status = match &a.status {
        None => None,
        Some(s) => Some(Status::parse(s).ok_or_else(|| Fail::Usage(format!("unknown status {s:?}")))?),
    };
    if a.id.is_none() && !a.assign.is_empty() {
        return Err(Fail::Usage("--assign needs --id".into()));
    }
    let assign = parse_assign(&a.assign)?;
    let pool = pool(a.jobs)?;
    let mut reports = match &a.id {
        Some(id) => {
            let rec = cat.get(id)?;
            if status.is_some_and(|s| s != rec.status) {
                Vec::new()
            } else {
                let given = (!a.assign.is_empty()).then_some(&assign);
                pool.install(|| cat.verify_identity(id, given, cap))?
            }
        }
        None => {
            let filter = Filter { status, id_prefix: a.prefix.clone() };
            pool.install(|| cat.verify_all(cap, &filter))
        }
    };
    emit(&mut reports, a.json, !a.no_timing);
    if proof_failures(&reports).is_empty() {
        Ok(())
    } else {
        Err(Fail::Check)
    }
}

fn read_expr(a: &ExprArgs) -> Result<String, Fail> {
    match (&a.expr, &a.file) {
        (Some(e), _) => Ok(e.clone()),
        (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| Fail::Usage(format!("{}: {e}", p.display()))),
        (None, None) => Err(Fail::Usage("one of --expr or --file is required".into())),
    }
}

/// Expands `P:`, `S:` and `Q:` expressions and JSON sum sides.
fn eval_expr(text: &str, assign: &Assignment, cap: Exponent) -> Result<QSeries, Fail> {
    let map: HashMap<String, Monomial> = assign.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let t = text.trim();
    if t.starts_with('{') || t.starts_with('[') {
        let side: SumSide = serde_json::from_str(t)
            .map_err(|e| Fail::Usage(format!("parse error at line {}, column {}: {e}", e.line(), e.column())))?;
        side.validate()?;
        return Ok(side.eval(&map, cap)?);
    }
    let (tag, body) = t.split_once(':').ok_or_else(|| Fail::Usage("expression needs a P:, S: or Q: prefix".into()))?;
    let body = body.trim();
    let shift = |e: Error| relocate(e, text, body);
    match tag.trim() {
        "P" => Ok(ProductExpr::parse(body).map_err(shift)?.substitute(&map)?.eval(cap)?),
        "Q" if body.contains('|') => Ok(QSeries::parse(body).map_err(shift)?.truncate(cap)),
        "Q" => Ok(QSeries::parse(&format!("{body} | cap={cap}")).map_err(shift)?),
        "S" => {
            let cat = Catalog::from_env()?;
            let rec = cat.get(body.trim())?;
            let given = if assign.is_empty() && !rec.param_names().is_empty() {
                rec.assignments().remove(0)
            } else {
                assign.clone()
            };
            Ok(rec.sides(&given, cap)?.0)
        }
        other => Err(Fail::Usage(format!("unknown expression tag {other:?}"))),
    }
}

/// Moves a parse position inside `body` to the matching position in `text`.
fn relocate(e: Error, text: &str, body: &str) -> Error {
    let Error::Parse { msg, line, column } = e else { return e };
    let start = body.as_ptr() as usize - text.as_ptr() as usize;
    let before = &text[..start];
    let line0 = before.matches('\n').count();
    let col0 = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1);
    let column = if line == 1 { column + col0 } else { column };
    Error::Parse { msg, line: line + line0, column }
}

fn expand(a: ExprArgs) -> Result<(), Fail> {
    let s = eval_expr(&read_expr(&a)?, &parse_assign(&a.assign)?, Exponent::from_integer(a.cap))?;
    println!("{s}");
    Ok(())
}

fn run_prodmake(a: ExprArgs) -> Result<(), Fail> {
    let s = eval_expr(&read_expr(&a)?, &parse_assign(&a.assign)?, Exponent::from_integer(a.cap))?;
    print!("{}", format_exponent_table(&prodmake(&s)?));
    Ok(())
}

fn oracle(nmax: u32) -> Result<(), Fail> {
    let (s, t) = (s_table(nmax), t_table(nmax));
    let n = nmax as usize;
    println!("{:>3} {:>3} {:>3} {:>8} {:>8}", "u", "v", "n", "S", "T");
    for u in 0..=n {
        for v in 0..=n {
            for m in 0..=n {
                let (x, y) = (s[u][v][m], t[u][v][m]);
                if x != 0 || y != 0 {
                    let mark = if x == y { "" } else { "  <-- mismatch" };
                    println!("{u:>3} {v:>3} {m:>3} {x:>8} {y:>8}{mark}");
                }
            }
        }
    }
    let mut ok = true;
    match first_mismatch(&s, &t) {
        None => println!("S=T verified for all (u,v,n), n<={nmax}"),
        Some((u, v, m)) => {
            println!("S!=T first at (u,v,n)=({u},{v},{m})");
            ok = false;
        }
    }
    match first_mismatch(&t, &graded_product(nmax)) {
        None => println!("T matches (-aq,-bq;q) for all (u,v,n), n<={nmax}"),
        Some((u, v, m)) => {
            println!("T differs from (-aq,-bq;q) first at (u,v,n)=({u},{v},{m})");
            ok = false;
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Fail::Check)
    }
}

fn sample(a: SampleArgs) -> Result<(), Fail> {
    let cap = Exponent::from_integer(a.cap);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut reports = Vec::new();
    match a.family.as_str() {
        "masters" => {
            let which: Vec<Master> = match &a.only {
                None => Master::ALL.to_vec(),
                Some(n) => vec![Master::from_name(n).ok_or_else(|| Fail::Usage(format!("unknown master {n:?}")))?],
            };
            for m in which {
                for _ in 0..a.count {
                    reports.push(master_check(m, &sample_master(m, &mut rng), cap));
                }
            }
        }
        "summations" => {
            let which: Vec<Summation> = match &a.only {
                None => Summation::ALL.to_vec(),
                Some(n) => {
                    vec![Summation::from_name(n).ok_or_else(|| Fail::Usage(format!("unknown summation {n:?}")))?]
                }
            };
            for m in which {
                for _ in 0..a.count {
                    reports.push(summation_check(m, &sample_assignment(m, &mut rng), cap));
                }
            }
        }
        other => return Err(Fail::Usage(format!("unknown family {other:?}, expected masters or summations"))),
    }
    emit(&mut reports, false, false);
    let s = Summary::of(&reports);
    if s.fail + s.error == 0 {
        Ok(())
    } else {
        Err(Fail::Check)
    }
}

fn catalog(cmd: CatalogCmd) -> Result<(), Fail> {
    let cat = Catalog::from_env()?;
    match cmd {
        CatalogCmd::Export { out: None } => println!("{}", cat.to_json()),
        CatalogCmd::Export { out: Some(p) } => {
            std::fs::write(&p, cat.to_json() + "\n").map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?
        }
        CatalogCmd::List => {
            for r in &cat.records {
                let params = r.param_names();
                if params.is_empty() {
                    println!("{} [{}]", r.id, r.status.as_str());
                } else {
                    println!("{} [{}] {}", r.id, r.status.as_str(), params.join(","));
                }
            }
        }
    }
    Ok(())
}
