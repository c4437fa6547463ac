//! The `grpdef` command line.
//!
//! Exit codes: 0 success, 1 inconclusive or not found, 2 input error,
//! 3 budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use grpdef_core::analysis::{
    certify_large, closed_form_invariants, family_rdef, power_quotient_certificate, relative_size, thomas_infiniteness,
    verify_certificate, CertificateJson, CertifyInput, ClosedFamily, LargenessCertificate, RdefFamily, ThomasVerdict,
    Verdict,
};
use grpdef_core::arith::{is_prime, RationalJson};
use grpdef_core::presentations::{parse_word, Presentation};
use grpdef_core::quotients::{
    search_witness, todd_coxeter, Family, QuotientWitness, SearchBudget, SearchMode, SearchParams, Targets, WitnessJson,
    DEFAULT_MAX_COSETS, DEFAULT_MAX_IMAGE, DEFAULT_SEARCH_NODES,
};
use grpdef_core::rewriting::{
    reidemeister_schreier_full, reidemeister_schreier_power_aware, tietze_simplify, SubgroupPresentation,
    TietzeOptions,
};
use grpdef_core::words::Word;
use grpdef_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INCONCLUSIVE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "grpdef", version, about = "Deficiency invariants and largeness certificates for finite presentations")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Print only the JSON payload.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for witness search (default: GRPDEF_THREADS, else 1).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_IMAGE)]
    max_image: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SEARCH_NODES)]
    search_nodes: u64,
    #[arg(long, global = true)]
    time_ms: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deficiency, p-deficiencies and abelian invariants.
    Analyze {
        file: PathBuf,
        /// Prime for def_p and d_p; repeatable (default 2, 3, 5).
        #[arg(long = "p")]
        primes: Vec<u64>,
    },
    /// Search for a finite quotient with prescribed relator-root orders.
    Witness {
        file: PathBuf,
        #[command(flatten)]
        targets: TargetOpts,
        #[command(flatten)]
        range: RangeOpts,
        /// Return the least witness instead of the first one found.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Build or verify a largeness certificate.
    Certify {
        /// Presentation file (omit with --verify).
        file: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["degrees", "cyclic"])]
        witness: Option<PathBuf>,
        #[command(flatten)]
        range: RangeOpts,
        /// Recompute a stored certificate and compare.
        #[arg(long, conflicts_with_all = ["file", "witness", "degrees", "cyclic"])]
        verify: Option<PathBuf>,
    },
    /// Reidemeister–Schreier presentation of a witness kernel.
    Subgroup {
        file: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        /// Rewrite every relator at every coset.
        #[arg(long, conflicts_with = "power_aware")]
        full: bool,
        /// One conjugate per root cycle (default).
        #[arg(long)]
        power_aware: bool,
        /// Drop empty and duplicate relators.
        #[arg(long)]
        simplify: bool,
        /// With --simplify, also eliminate generators killed by length-one relators.
        #[arg(long, requires = "simplify")]
        eliminate: bool,
    },
    /// Closed-form residual deficiency of a family.
    Family {
        #[command(subcommand)]
        family: FamilyCommand,
    },
    /// Relative size of elements of a free group against a witness kernel.
    Relsize {
        rank: usize,
        #[arg(long)]
        witness: PathBuf,
        /// Semicolon-separated words over the default generator names.
        #[arg(long)]
        elements: String,
    },
    /// Certify ⟨x1..xd | g1^q, ..⟩ through a no-collapse quotient.
    PowerQuotient {
        rank: usize,
        #[arg(long)]
        elements: String,
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        range: RangeOpts,
    },
    /// Enumerate cosets of a subgroup.
    ToddCoxeter {
        file: PathBuf,
        /// Semicolon-separated subgroup generators.
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// Infiniteness test from a no-collapse quotient.
    Thomas {
        file: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    /// Closed-form gradients of free and surface groups.
    ClosedForm {
        /// `free` or `surface`.
        family: String,
        parameter: u64,
    },
}

#[derive(Subcommand, Debug)]
enum FamilyCommand {
    Triangle { l: u64, m: u64, n: u64 },
    /// JSON matrix; off-diagonal entries are integers or "inf".
    Coxeter { matrix: PathBuf },
    Tetra { e1: u64, e2: u64, e3: u64, m: u64, p: u64, q: u64 },
    /// Comma-separated e1..en and m1..mn.
    Chain { e: String, m: String },
    /// Comma-separated e1..en and m1..m(2n-3).
    Star { e: String, m: String },
    /// Comma-separated generator orders and the relator exponent.
    Orq { orders: String, s: u64 },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TargetOpts {
    /// Every root keeps its full exponent.
    #[arg(long)]
    no_collapse: bool,
    /// Exact root orders, comma-separated.
    #[arg(long)]
    orders: Option<String>,
    /// Any homomorphism with non-trivial image.
    #[arg(long)]
    any: bool,
}

#[derive(Args, Debug)]
struct RangeOpts {
    /// Permutation degrees, `lo..hi`.
    #[arg(long, value_parser = parse_range, conflicts_with = "cyclic")]
    degrees: Option<(usize, usize)>,
    /// Cyclic moduli, `lo..hi`.
    #[arg(long, value_parser = parse_range)]
    cyclic: Option<(usize, usize)>,
}

impl RangeOpts {
    fn family(&self, default: (usize, usize)) -> Family {
        match (self.degrees, self.cyclic) {
            (_, Some((lo, hi))) => Family::Cyclic { lo, hi },
            (Some((lo, hi)), None) => Family::Symmetric { lo, hi },
            (None, None) => Family::Symmetric {
                lo: default.0,
                hi: default.1,
            },
        }
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected lo..hi, got `{s}`"))?;
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad lower bound in `{s}`"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad upper bound in `{s}`"))?;
    if lo == 0 || lo > hi {
        return Err(format!("empty or invalid range `{s}`"));
    }
    Ok((lo, hi))
}

/// Outcome of a command: exit code plus JSON payload and human rendering.
struct Outcome {
    code: u8,
    payload: Value,
    text: String,
}

impl Outcome {
    fn ok(payload: Value, text: String) -> Self {
        Outcome {
            code: EXIT_OK,
            payload,
            text,
        }
    }
}

enum Failure {
    Lib(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } | Error::NotFound { exhausted: false } => EXIT_BUDGET,
        Error::NotFound { exhausted: true } => EXIT_INCONCLUSIVE,
        _ => EXIT_INPUT,
    }
}

/// Runs the command line `argv` (including the program name), writing to
/// `out` and `err`, and returns the exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let json_mode = cli.global.json;
    match run(&cli) {
        Ok(o) => {
            let _ = if json_mode {
                writeln!(out, "{}", serde_json::to_string_pretty(&o.payload).expect("JSON values serialize"))
            } else {
                write!(out, "{}", o.text)
            };
            o.code
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Lib(e) => (exit_code(&e), e.to_string()),
                Failure::Input(m) => (EXIT_INPUT, m),
            };
            if json_mode {
                let _ = writeln!(out, "{}", json!({"error": msg, "exit_code": code}));
            }
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn read_presentation(path: &Path) -> Result<Presentation, Failure> {
    Ok(Presentation::parse(&read(path)?)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_witness(path: &Path, p: &Presentation) -> Result<QuotientWitness, Failure> {
    let json: WitnessJson = read_json(path)?;
    Ok(QuotientWitness::from_json(&json, p.generator_names())?)
}

fn parse_words(text: &str, names: &[String]) -> Result<Vec<Word>, Failure> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_word(s, names).map_err(Failure::from))
        .collect()
}

fn parse_list(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Failure::Input(format!("expected a comma-separated list of integers, got `{text}`")))
        })
        .collect()
}

fn rational(r: &num_rational::BigRational) -> Value {
    serde_json::to_value(RationalJson::from(r)).expect("plain data")
}

fn threads(g: &GlobalOpts) -> usize {
    g.threads
        .or_else(|| std::env::var("GRPDEF_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(1)
        .max(1)
}

fn search_params(g: &GlobalOpts, targets: Targets, family: Family, mode: SearchMode) -> SearchParams {
    SearchParams::new(targets, family)
        .mode(mode)
        .budget(SearchBudget {
            nodes: g.search_nodes,
            time_ms: g.time_ms,
        })
        .threads(threads(g))
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze { file, primes } => analyze(&read_presentation(file)?, primes),
        Command::Witness {
            file,
            targets,
            range,
            exhaustive,
        } => {
            let p = read_presentation(file)?;
            let t = if targets.no_collapse {
                Targets::NoCollapse
            } else if let Some(o) = &targets.orders {
                Targets::Orders(parse_list(o)?)
            } else {
                Targets::Homomorphism
            };
            let mode = if *exhaustive {
                SearchMode::ExhaustiveMinimal
            } else {
                SearchMode::First
            };
            let w = search_witness(&p, &search_params(g, t, range.family((1, 8)), mode))?;
            witness_outcome(&p, &w)
        }
        Command::Certify {
            file,
            witness,
            range,
            verify,
        } => {
            if let Some(path) = verify {
                let stored: CertificateJson = read_json(path)?;
                let report = verify_certificate(&stored, g.max_image)?;
                let valid = report.is_valid();
                let payload = json!({"valid": valid, "mismatches": report.mismatches, "recomputed": report.recomputed});
                let text = if valid {
                    format!("certificate verified (digest {})\n", stored.subgroup_presentation_digest)
                } else {
                    format!("certificate does not verify: {}\n", report.mismatches.join(", "))
                };
                return Ok(Outcome {
                    code: if valid { EXIT_OK } else { EXIT_INCONCLUSIVE },
                    payload,
                    text,
                });
            }
            let file = file
                .as_ref()
                .ok_or_else(|| Failure::Input("certify needs a presentation file or --verify".into()))?;
            let p = read_presentation(file)?;
            let input = match witness {
                Some(wp) => CertifyInput::Witness(read_witness(wp, &p)?),
                None => CertifyInput::Search(search_params(
                    g,
                    Targets::NoCollapse,
                    range.family((1, 8)),
                    SearchMode::ExhaustiveMinimal,
                )),
            };
            let cert = certify_large(&p, input, g.max_image)?;
            Ok(certificate_outcome(&cert))
        }
        Command::Subgroup {
            file,
            witness,
            full,
            power_aware: _,
            simplify,
            eliminate,
        } => {
            let p = read_presentation(file)?;
            let w = read_witness(witness, &p)?;
            let table = grpdef_core::quotients::regular_coset_table(&w, g.max_image)?;
            let mut q = if *full {
                reidemeister_schreier_full(&p, &table)?
            } else {
                reidemeister_schreier_power_aware(&p, &table)?
            };
            if *simplify {
                q = tietze_simplify(
                    &q,
                    TietzeOptions {
                        eliminate_trivial_generators: *eliminate,
                    },
                );
            }
            Ok(subgroup_outcome(&q))
        }
        Command::Family { family } => {
            let f = match family {
                FamilyCommand::Triangle { l, m, n } => RdefFamily::Triangle { l: *l, m: *m, n: *n },
                FamilyCommand::Coxeter { matrix } => RdefFamily::Coxeter {
                    matrix: coxeter_matrix(&read_json(matrix)?)?,
                },
                FamilyCommand::Tetra { e1, e2, e3, m, p, q } => RdefFamily::Tetrahedral {
                    e: [*e1, *e2, *e3],
                    m: *m,
                    p: *p,
                    q: *q,
                },
                FamilyCommand::Chain { e, m } => RdefFamily::Chain {
                    e: parse_list(e)?,
                    m: parse_list(m)?,
                },
                FamilyCommand::Star { e, m } => RdefFamily::Star {
                    e: parse_list(e)?,
                    m: parse_list(m)?,
                },
                FamilyCommand::Orq { orders, s } => RdefFamily::OneRelatorQuotient {
                    orders: parse_list(orders)?,
                    s: *s,
                },
            };
            let r = family_rdef(&f)?;
            let text = format!(
                "rdef = {}\n{}\n",
                r.value,
                if r.greater_than_one { "greater than one" } else { "not greater than one" }
            );
            Ok(Outcome::ok(r.to_json_value(), text))
        }
        Command::Relsize { rank, witness, elements } => {
            let names = Presentation::default_names(*rank);
            let json: WitnessJson = read_json(witness)?;
            let w = QuotientWitness::from_json(&json, &names)?;
            let words = parse_words(elements, &names)?;
            if words.is_empty() {
                return Err(Failure::Input("no elements given".into()));
            }
            let report = relative_size(&words, &w)?;
            let payload = serde_json::to_value(report.to_json(&names)).expect("plain data");
            let mut text = String::new();
            for e in &payload["entries"].as_array().cloned().unwrap_or_default() {
                text += &format!("nu({}) = {} via {}\n", e["element"].as_str().unwrap_or(""), e["nu"], e["attained_by"].as_str().unwrap_or(""));
            }
            text += &format!("relsize = {}\n", report.total);
            Ok(Outcome::ok(payload, text))
        }
        Command::PowerQuotient {
            rank,
            elements,
            q,
            range,
        } => {
            let names = Presentation::default_names(*rank);
            let words = parse_words(elements, &names)?;
            let params = search_params(g, Targets::NoCollapse, range.family((1, 8)), SearchMode::ExhaustiveMinimal);
            let report = power_quotient_certificate(*rank, &words, *q, &params, g.max_image)?;
            let adjustments: Vec<Value> = report
                .adjustments
                .iter()
                .map(|(i, e)| json!({"element": i, "root_exponent": e}))
                .collect();
            let mut payload = json!({
                "presentation": report.presentation.to_json(),
                "adjustments": adjustments,
                "rdef": rational(&report.rdef),
                "threshold_met": report.threshold_met,
                "verdict": report.verdict(),
            });
            let mut text = format!("presentation: {}\nrdef = {}\n", report.presentation, report.rdef);
            if let Some(c) = &report.certificate {
                payload["certificate"] = serde_json::to_value(c.to_json()).expect("plain data");
                text += &certificate_outcome(c).text;
            } else {
                text += "rdef is at most 1; nothing to certify\nverdict: inconclusive\n";
            }
            Ok(Outcome {
                code: verdict_code(report.verdict()),
                payload,
                text,
            })
        }
        Command::ToddCoxeter { file, subgroup } => {
            let p = read_presentation(file)?;
            let gens = match subgroup {
                Some(s) => parse_words(s, p.generator_names())?,
                None => Vec::new(),
            };
            let t = todd_coxeter(&p, &gens, g.max_cosets)?;
            let payload = json!({"index": t.index(), "table": t.to_json(p.generator_names())});
            Ok(Outcome::ok(payload, format!("index {}\n", t.index())))
        }
        Command::Thomas { file, witness } => {
            let p = read_presentation(file)?;
            let w = read_witness(witness, &p)?;
            let r = thomas_infiniteness(&p, &w)?;
            let payload = json!({
                "verdict": r.verdict,
                "quantity": rational(&r.quantity),
                "no_collapse": r.no_collapse,
            });
            let text = format!(
                "n - sum 1/m_i = {}\nno collapse: {}\nverdict: {}\n",
                r.quantity,
                r.no_collapse,
                match r.verdict {
                    ThomasVerdict::Infinite => "infinite",
                    ThomasVerdict::Unknown => "unknown",
                }
            );
            let code = match r.verdict {
                ThomasVerdict::Infinite => EXIT_OK,
                ThomasVerdict::Unknown => EXIT_INCONCLUSIVE,
            };
            Ok(Outcome { code, payload, text })
        }
        Command::ClosedForm { family, parameter } => {
            let f = match family.as_str() {
                "free" => ClosedFamily::Free(*parameter),
                "surface" => ClosedFamily::Surface(*parameter),
                other => return Err(Failure::Input(format!("unknown closed-form family `{other}`"))),
            };
            let c = closed_form_invariants(f)?;
            let text = format!(
                "deficiency {}\nrank {}\ndeficiency gradient {}\nrank gradient {}\neuler characteristic {}\nl2 betti {}\n",
                c.deficiency, c.rank, c.deficiency_gradient, c.rank_gradient, c.euler_characteristic, c.l2_betti
            );
            Ok(Outcome::ok(serde_json::to_value(c.to_json()).expect("plain data"), text))
        }
    }
}

fn analyze(p: &Presentation, primes: &[u64]) -> Result<Outcome, Failure> {
    let primes: Vec<u64> = if primes.is_empty() { vec![2, 3, 5] } else { primes.to_vec() };
    if let Some(&bad) = primes.iter().find(|&&q| !is_prime(q)) {
        return Err(Failure::Input(format!("{bad} is not prime")));
    }
    let ab = p.abelian_invariants();
    let mut per_prime = Vec::new();
    let mut text = format!("presentation: {p}\ndeficiency: {}\n", p.deficiency());
    for &q in &primes {
        let d = p.p_deficiency(q)?;
        text += &format!("def_{q}: {d}\nd_{q}: {}\n", ab.p_rank(q));
        per_prime.push(json!({"p": q, "def_p": rational(&d), "d_p": ab.p_rank(q)}));
    }
    let torsion: Vec<String> = ab.torsion.iter().map(ToString::to_string).collect();
    text += &format!(
        "betti_1: {}\ntorsion: [{}]\ninfinite abelianization: {}\n",
        ab.betti,
        torsion.join(", "),
        p.has_infinite_abelianization()
    );
    let payload = json!({
        "presentation": p.to_json(),
        "deficiency": p.deficiency(),
        "betti": ab.betti,
        "torsion": serde_json::to_value(&ab).expect("plain data")["torsion"],
        "infinite_abelianization": p.has_infinite_abelianization(),
        "primes": per_prime,
    });
    Ok(Outcome::ok(payload, text))
}

fn witness_outcome(p: &Presentation, w: &QuotientWitness) -> Result<Outcome, Failure> {
    let orders = grpdef_core::quotients::relator_root_orders(p, w)?;
    let no_collapse = grpdef_core::quotients::is_no_collapse(p, w)?;
    let wj = w.to_json(p.generator_names());
    let mut text = format!("degree {}\n", w.degree());
    for (name, img) in p.generator_names().iter().zip(w.images()) {
        text += &format!("{name} -> {img}\n");
    }
    text += &format!("root orders {orders:?}\nno collapse: {no_collapse}\n");
    let payload = json!({"witness": wj, "orders": orders, "no_collapse": no_collapse});
    Ok(Outcome::ok(payload, text))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::CertifiedLarge => EXIT_OK,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn certificate_outcome(c: &LargenessCertificate) -> Outcome {
    let json = c.to_json();
    let text = format!(
        "index {}\nroot orders {:?}\nrdef lower bound {}\npredicted deficiency {}\nachieved deficiency {}\nverdict: {}\ndigest {}\n",
        c.index,
        c.orders,
        c.rdef_lower,
        c.predicted,
        c.achieved,
        match c.verdict {
            Verdict::CertifiedLarge => "certified-large",
            Verdict::Inconclusive => "inconclusive",
        },
        json.subgroup_presentation_digest
    );
    Outcome {
        code: verdict_code(c.verdict),
        payload: serde_json::to_value(json).expect("plain data"),
        text,
    }
}

fn subgroup_outcome(q: &SubgroupPresentation) -> Outcome {
    let ab = q.abelian_invariants();
    let mut payload = serde_json::to_value(q.to_json()).expect("plain data");
    payload["deficiency"] = json!(q.deficiency());
    payload["abelian_invariants"] = serde_json::to_value(&ab).expect("plain data");
    let torsion: Vec<String> = ab.torsion.iter().map(ToString::to_string).collect();
    let text = format!(
        "index {}\ngenerators {}\nrelators {}\ndeficiency {}\nbetti_1 {}\ntorsion [{}]\n",
        q.index(),
        q.generator_count(),
        q.relators().len(),
        q.deficiency(),
        ab.betti,
        torsion.join(", ")
    );
    Outcome::ok(payload, text)
}

fn coxeter_matrix(v: &Value) -> Result<Vec<Vec<Option<u64>>>, Failure> {
    let bad = || Failure::Input("Coxeter matrix must be an array of rows of integers or \"inf\"".into());
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| match x {
                    Value::Number(n) => n.as_u64().map(Some).ok_or_else(bad),
                    Value::String(s) if s == "inf" || s == "∞" => Ok(None),
                    Value::Null => Ok(None),
                    _ => Err(bad()),
                })
                .collect()
        })
        .collect()
}
