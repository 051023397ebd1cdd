//! `narrowlie`: build, verify and classify narrow Carnot algebras.
//!
//! Exit codes: 0 success or true verdict, 1 false verdict, 2 usage or data
//! error, 3 inconclusive search.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use narrowlie::automorphism::{self, ExtendedMap};
use narrowlie::catalog;
use narrowlie::cohomology::{self, Cochain2, CochainJson};
use narrowlie::enumerate::{self, EnumConfig};
use narrowlie::extension::{self, ExtensionSpec};
use narrowlie::iso::{self, ExtensionVerdict, IsoVerdict, SearchConfig};
use narrowlie::structure;
use narrowlie::{Field, GradedLieAlgebra, Scalar};
use serde_json::{json, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "narrowlie", version, about = "Exact computations with narrow Carnot Lie algebras")]
struct Cli {
    /// Machine-readable JSON reports.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArg {
    /// Q or Qi. Catalog inputs are built over it; JSON inputs must match it.
    #[arg(long)]
    field: Option<Field>,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Height bound of the values tried by the isomorphism solver.
    #[arg(long, default_value_t = SearchConfig::default().height)]
    height: u32,
    /// Node budget of the case-split solver.
    #[arg(long, default_value_t = SearchConfig::default().max_nodes)]
    max_nodes: usize,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            height: self.height,
            max_nodes: self.max_nodes,
            ..SearchConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List catalog families, or print one catalog algebra.
    Catalog {
        /// For example `n2(len=12)`; the `catalog:` prefix is optional.
        spec: Option<String>,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Jacobi identity and Carnot condition.
    Verify {
        algebra: String,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Dimensions of Z², B² and H² by grading.
    Cohomology {
        algebra: String,
        /// Inclusive range `a..b`; defaults to `2..length+1`.
        #[arg(long)]
        gradings: Option<String>,
        /// Print the chosen H² representatives.
        #[arg(long)]
        representatives: bool,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Central extension by one or more cocycles of one grading.
    Extend {
        #[arg(long)]
        algebra: String,
        /// Cochain JSON file; repeat for a multi-dimensional extension.
        #[arg(long = "cocycle", required = true)]
        cocycles: Vec<PathBuf>,
        /// Labels of the new basis vectors.
        #[arg(long = "label")]
        labels: Vec<String>,
        /// Write the extended algebra as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Graded isomorphism test with a verified witness or certificate.
    Iso {
        a: String,
        b: String,
        /// Search over the quadratic extension by the square root of this
        /// number instead of the base field.
        #[arg(long)]
        sqrt: Option<String>,
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Isomorphism invariants.
    Invariants {
        algebra: String,
        #[command(flatten)]
        field: FieldArg,
    },
    /// Breadth-first classification by central extensions.
    Enumerate {
        #[arg(long)]
        max_length: usize,
        #[arg(long, default_value = "Q")]
        field: Field,
        /// Height bound of candidate subspaces.
        #[arg(long, default_value_t = EnumConfig::default().height)]
        height: u32,
        /// Allow two consecutive two-dimensional components.
        #[arg(long)]
        allow_2_2: bool,
        /// Keep classes that only become isomorphic over a quadratic extension.
        #[arg(long)]
        no_merge_forms: bool,
        #[arg(long, default_value_t = EnumConfig::default().max_candidates)]
        max_candidates: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Associated graded algebra and the naturally-graded test.
    Gr {
        algebra: String,
        /// Write the associated graded algebra as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        search: SearchArgs,
    },
}

/// Failure with its exit code.
struct Failure(u8, String);

impl From<narrowlie::Error> for Failure {
    fn from(e: narrowlie::Error) -> Self {
        Failure(2, e.to_string())
    }
}

type Outcome = Result<(u8, Report), Failure>;

/// Text and JSON forms of one report.
struct Report {
    text: String,
    json: Value,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

fn load(input: &str, field: Option<Field>) -> Result<GradedLieAlgebra, Failure> {
    if let Some(spec) = input.strip_prefix("catalog:") {
        return Ok(catalog::from_spec(spec, field.unwrap_or(Field::Q))?);
    }
    let g = GradedLieAlgebra::from_json(&read(Path::new(input))?)?;
    if let Some(f) = field {
        f.check_same(g.field())?;
    }
    Ok(g)
}

fn dims_string(g: &GradedLieAlgebra) -> String {
    let dims: Vec<String> = g.dims().iter().map(usize::to_string).collect();
    format!("({})", dims.join(","))
}

fn envelope(command: &str, config: Value, body: Value) -> Value {
    json!({ "version": VERSION, "command": command, "config": config, "report": body })
}

fn parse_range(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure(2, format!("bad grading range '{s}', expected a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a < 2 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn matrix_text(rows: &[Vec<String>]) -> String {
    let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

fn cmd_catalog(spec: Option<String>, field: Option<Field>) -> Outcome {
    let field = field.unwrap_or(Field::Q);
    let Some(spec) = spec else {
        let text = catalog::FAMILIES
            .iter()
            .map(|(name, keys)| format!("{name:<8} {keys}\n"))
            .collect();
        let list: Vec<Value> = catalog::FAMILIES
            .iter()
            .map(|(name, keys)| json!({ "family": name, "keys": keys }))
            .collect();
        return Ok((0, Report { text, json: envelope("catalog", json!({}), json!(list)) }));
    };
    let spec = spec.strip_prefix("catalog:").unwrap_or(&spec);
    let g = catalog::from_spec(spec, field)?;
    let text = format!("{} {} dim {} over {}\n{}\n", g.display_name(), dims_string(&g), g.dim(), field, g.to_json());
    let json = envelope("catalog", json!({ "spec": spec, "field": field }), json!(g.to_json_value()));
    Ok((0, Report { text, json }))
}

fn cmd_verify(input: &str, field: Option<Field>) -> Outcome {
    let g = load(input, field)?;
    let jac = structure::jacobi_check(&g);
    let st = structure::is_carnot(&g);
    let mut text = String::new();
    if jac.is_ok() {
        text.push_str("jacobi: ok");
    } else {
        let v = &jac.violations[0];
        let (x, y, z) = v.triple;
        text.push_str(&format!(
            "jacobi: FAILED ({} violations, first at {}, {}, {})",
            jac.violations.len(),
            g.label(g.global(x)),
            g.label(g.global(y)),
            g.label(g.global(z))
        ));
    }
    if st.carnot {
        text.push_str(&format!(", carnot: ok (length {})\n", st.length));
    } else {
        text.push_str(&format!(", carnot: no (top grading {})\n", st.length));
    }
    let violations: Vec<Value> = jac
        .violations
        .iter()
        .map(|v| {
            let (x, y, z) = v.triple;
            json!({
                "triple": [g.label(g.global(x)), g.label(g.global(y)), g.label(g.global(z))],
                "residual": v.residual.iter().map(|s| s.to_field_string(g.field())).collect::<Vec<_>>(),
            })
        })
        .collect();
    let json = envelope(
        "verify",
        json!({ "input": input, "field": g.field() }),
        json!({
            "name": g.display_name(),
            "dims": g.dims(),
            "jacobi": { "ok": jac.is_ok(), "triples_checked": jac.triples_checked, "violations": violations },
            "carnot": { "ok": st.carnot, "length": st.length },
        }),
    );
    let code = if jac.is_ok() && st.carnot { 0 } else { 1 };
    Ok((code, Report { text, json }))
}

fn cmd_cohomology(input: &str, gradings: Option<String>, reps: bool, field: Option<Field>) -> Outcome {
    let g = load(input, field)?;
    let len = g.length();
    let (a, b) = match gradings {
        Some(s) => parse_range(&s)?,
        None => (2, len + 1),
    };
    let mut text = format!("{} {} over {}\n   k  Z2  B2  H2\n", g.display_name(), dims_string(&g), g.field());
    let mut rows = Vec::new();
    for k in a..=b {
        let s = cohomology::h2_slice(&g, k)?;
        text.push_str(&format!("{k:>4} {:>3} {:>3} {:>3}\n", s.dim_z2(), s.dim_b2(), s.dim_h2()));
        let mut row = json!({ "grading": k, "z2": s.dim_z2(), "b2": s.dim_b2(), "h2": s.dim_h2() });
        if reps {
            let cochains: Vec<CochainJson> = s.representatives(&g).iter().map(|c| c.to_json_value(g.field())).collect();
            for c in &cochains {
                text.push_str(&format!("       {}\n", serde_json::to_string(c).expect("cochains serialize")));
            }
            row["representatives"] = json!(cochains);
        }
        rows.push(row);
    }
    // brackets of total grading <= L determine every slice up to L
    text.push_str(&format!("stable up to k = {len} for any algebra with this quotient\n"));
    let json = envelope(
        "cohomology",
        json!({ "input": input, "field": g.field(), "gradings": [a, b] }),
        json!({ "name": g.display_name(), "dims": g.dims(), "stable_up_to": len, "slices": rows }),
    );
    Ok((0, Report { text, json }))
}

fn cmd_extend(input: &str, files: &[PathBuf], labels: Vec<String>, out: Option<PathBuf>, field: Option<Field>) -> Outcome {
    let g = load(input, field)?;
    let mut cocycles = Vec::new();
    for f in files {
        let raw: CochainJson =
            serde_json::from_str(&read(f)?).map_err(|e| Failure(2, format!("{}: {e}", f.display())))?;
        cocycles.push(Cochain2::from_json_value(&raw)?);
    }
    let k = cocycles[0].grading;
    let mut spec = ExtensionSpec::new(k, cocycles);
    if !labels.is_empty() {
        spec.labels = labels;
    }
    let r = extension::central_extend(&g, &spec)?;
    let carnot_ext = extension::is_carnot_extension(&g, &spec)?;
    let body = r.algebra.to_json();
    if let Some(p) = &out {
        write(p, &body)?;
    }
    let mut text = format!(
        "extension of {} at grading {k}: {} independent: {}, carnot: {} (length {})\n",
        g.display_name(),
        dims_string(&r.algebra),
        if r.independent { "yes" } else { "no" },
        if r.carnot.carnot { "yes" } else { "no" },
        r.carnot.length
    );
    if out.is_none() {
        text.push_str(&body);
        text.push('\n');
    }
    let json = envelope(
        "extend",
        json!({ "input": input, "field": g.field(), "cocycles": files }),
        json!({
            "extension": spec.to_json_value(g.field()),
            "independent": r.independent,
            "carnot": r.carnot.carnot,
            "carnot_extension": carnot_ext,
            "length": r.carnot.length,
            "algebra": r.algebra.to_json_value(),
        }),
    );
    Ok((if r.carnot.carnot { 0 } else { 1 }, Report { text, json }))
}

fn extended_text(m: &ExtendedMap, field: Field) -> String {
    let first: Vec<Vec<String>> = m.blocks[0]
        .iter()
        .map(|r| r.iter().map(|s| s.to_field_string(&m.d, field)).collect())
        .collect();
    matrix_text(&first)
}

fn cmd_iso(a: &str, b: &str, sqrt: Option<String>, field: Option<Field>, cfg: SearchConfig) -> Outcome {
    let g = load(a, field)?;
    let h = load(b, field)?;
    let f = g.field();
    let config = json!({ "inputs": [a, b], "field": f, "search": cfg, "sqrt": sqrt });
    if let Some(d) = sqrt {
        let d: Scalar = d.parse()?;
        let v = iso::iso_over_extension(&g, &h, &d, cfg)?;
        let (code, text, body) = match &v {
            ExtensionVerdict::Iso(m) => (
                0,
                format!("isomorphic over {f}(sqrt({})): A = {}\n", d.to_field_string(f), extended_text(m, f)),
                json!({ "verdict": "iso", "witness": m.to_json_value(f) }),
            ),
            ExtensionVerdict::NonIso(branches) => (
                1,
                format!("not isomorphic over {f}(sqrt({}))\n", d.to_field_string(f)),
                json!({ "verdict": "non-iso", "certificate": { "kind": "infeasible", "branches": branches } }),
            ),
            ExtensionVerdict::Unknown(why) => (3, format!("unknown: {why}\n"), json!({ "verdict": "unknown", "reason": why })),
        };
        return Ok((code, Report { text, json: envelope("iso", config, body) }));
    }
    let v = iso::iso_search(&g, &h, cfg)?;
    let text = match &v {
        IsoVerdict::VerifiedIso(m) => {
            let w = m.to_json_value(f);
            format!("isomorphic over {f}: A = {}\n", matrix_text(&w.blocks[0]))
        }
        IsoVerdict::VerifiedNonIso(_) => {
            let body = v.to_json_value(f);
            format!("not isomorphic over {f}: {}\n", body["certificate"])
        }
        IsoVerdict::Unknown(why) => format!("unknown: {why}\n"),
    };
    let code = match v {
        IsoVerdict::VerifiedIso(_) => 0,
        IsoVerdict::VerifiedNonIso(_) => 1,
        IsoVerdict::Unknown(_) => 3,
    };
    Ok((code, Report { text, json: envelope("iso", config, v.to_json_value(f)) }))
}

fn cmd_invariants(input: &str, field: Option<Field>) -> Outcome {
    let g = load(input, field)?;
    let fp = iso::fingerprint(&g)?;
    let mut body = fp.to_json_value();
    let disc = automorphism::real_form_discriminant(&g).ok();
    if let Some(d) = &disc {
        body["real_form_discriminant"] = serde_json::to_value(d).expect("discriminant serializes");
    }
    let mut text = format!("{} {} over {}\n", g.display_name(), dims_string(&g), g.field());
    if let Value::Object(m) = &body {
        for (k, v) in m {
            text.push_str(&format!("  {k}: {v}\n"));
        }
    }
    let json = envelope("invariants", json!({ "input": input, "field": g.field() }), body);
    Ok((0, Report { text, json }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_enumerate(
    max_length: usize,
    field: Field,
    height: u32,
    allow_2_2: bool,
    no_merge: bool,
    max_candidates: usize,
    out: Option<PathBuf>,
    dot: Option<PathBuf>,
) -> Outcome {
    let cfg = EnumConfig {
        max_length,
        field,
        height,
        forbid_2_2: !allow_2_2,
        merge_forms: !no_merge,
        max_candidates,
        ..EnumConfig::default()
    };
    let c = enumerate::classify(&cfg)?;
    let body = c.to_json_value();
    if let Some(p) = &out {
        write(p, &serde_json::to_string_pretty(&body).expect("json serializes"))?;
    }
    if let Some(p) = &dot {
        write(p, &c.to_dot())?;
    }
    let json = json!({ "version": VERSION, "command": "enumerate", "config": cfg, "report": body });
    let code = if c.nodes.iter().any(|n| !n.flags.unresolved_against.is_empty()) { 3 } else { 0 };
    Ok((code, Report { text: c.summary(), json }))
}

fn cmd_gr(input: &str, out: Option<PathBuf>, field: Option<Field>, cfg: SearchConfig) -> Outcome {
    let g = load(input, field)?;
    let gr = structure::associated_graded(&g)?;
    if let Some(p) = &out {
        write(p, &gr.to_json())?;
    }
    let v = iso::is_naturally_graded(&g, cfg)?;
    let verdict = match v.natural {
        Some(true) => "naturally graded",
        Some(false) => "not naturally graded",
        None => "unknown",
    };
    let text = format!(
        "{} {}: gr {} {}; {verdict} ({})\n",
        g.display_name(),
        dims_string(&g),
        dims_string(&gr),
        if gr.dims() == g.dims() { "same dims" } else { "different dims" },
        v.reason
    );
    let json = envelope(
        "gr",
        json!({ "input": input, "field": g.field(), "search": cfg }),
        json!({
            "dims": g.dims(),
            "gr_dims": gr.dims(),
            "naturally_graded": v.natural,
            "reason": v.reason,
            "gr": gr.to_json_value(),
        }),
    );
    let code = match v.natural {
        Some(true) => 0,
        Some(false) => 1,
        None => 3,
    };
    Ok((code, Report { text, json }))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Catalog { spec, field } => cmd_catalog(spec, field.field),
        Command::Verify { algebra, field } => cmd_verify(&algebra, field.field),
        Command::Cohomology {
            algebra,
            gradings,
            representatives,
            field,
        } => cmd_cohomology(&algebra, gradings, representatives, field.field),
        Command::Extend {
            algebra,
            cocycles,
            labels,
            out,
            field,
        } => cmd_extend(&algebra, &cocycles, labels, out, field.field),
        Command::Iso { a, b, sqrt, field, search } => cmd_iso(&a, &b, sqrt, field.field, search.config()),
        Command::Invariants { algebra, field } => cmd_invariants(&algebra, field.field),
        Command::Enumerate {
            max_length,
            field,
            height,
            allow_2_2,
            no_merge_forms,
            max_candidates,
            out,
            dot,
        } => cmd_enumerate(max_length, field, height, allow_2_2, no_merge_forms, max_candidates, out, dot),
        Command::Gr {
            algebra,
            out,
            field,
            search,
        } => cmd_gr(&algebra, out, field.field, search.config()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok((code, report)) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("json serializes"));
            } else {
                print!("{}", report.text);
            }
            ExitCode::from(code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
