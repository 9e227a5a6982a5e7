use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use d4lift::artin_schreier::{different_degree, genus_katz_gabber, reduce_class, ASClass};
use d4lift::lift::certificate::{kummer_analysis, reduction_matches, LiftCertificate};
use d4lift::lift::identity::{verify_identity_general, verify_identity_small};
use d4lift::lift::{construct_lift, verify_certificate};
use d4lift::parse::{parse_field_elem, parse_poly, parse_poly_in};
use d4lift::tower::{
    classify_supersimple, different_of_composite, galois_type, is_supersimple, GaloisType, SupersimpleDescription,
};
use d4lift::{Error, ExtensionPolicy, FieldSpec, Var};

#[derive(Parser, Debug)]
#[command(name = "d4lift", version, about = "Supersimple D4-extensions in characteristic 2 and their lifts")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Coefficient field: gf2 or gf2_<n>.
    #[arg(long, global = true, default_value = "gf2")]
    field: String,
    /// Bits of 2-adic precision for lifts.
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
    /// Move to GF(2^2n) when a trace obstruction appears.
    #[arg(long, global = true)]
    auto_extend: bool,
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical representative of the class of w^2 - w = f.
    Reduce { expr: String },
    /// Supersimple description (eta, Q) of a class over k((v)).
    Classify { expr: String },
    /// Different exponent of a class, and of the D4 composite when supersimple.
    Different { expr: String },
    /// Genus of the Katz-Gabber cover of a class.
    Genus { expr: String },
    /// Whether the class over k((v)) comes from k((t)).
    GaloisTest { expr: String },
    /// Build a lift certificate from a class or from --eta and --q.
    Lift {
        expr: Option<String>,
        #[arg(long, requires = "q", conflicts_with = "expr")]
        eta: Option<String>,
        #[arg(long, requires = "eta")]
        q: Option<String>,
        /// Also write the certificate JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the lifting identity symbolically.
    VerifyIdentity {
        /// General case parameter; the small case when omitted.
        #[arg(long)]
        m: Option<u32>,
    },
    /// Re-check a certificate file.
    VerifyCert { path: PathBuf },
}

struct Output {
    text: Vec<(&'static str, String)>,
    json: Json,
}

enum Json {
    Value(Value),
    /// Already serialized, printed as is.
    Raw(String),
}

impl From<Value> for Json {
    fn from(v: Value) -> Self {
        Json::Value(v)
    }
}

impl Output {
    fn render(&self, as_json: bool) -> String {
        if as_json {
            return match &self.json {
                Json::Value(v) => serde_json::to_string_pretty(v).expect("values serialize"),
                Json::Raw(s) => s.clone(),
            };
        }
        let width = self.text.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        self.text
            .iter()
            .map(|(k, v)| {
                if k.is_empty() {
                    v.clone()
                } else {
                    format!("{:width$}  {v}", format!("{k}:"), width = width + 1)
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn policy(opts: &GlobalOpts) -> ExtensionPolicy {
    if opts.auto_extend {
        ExtensionPolicy::AutoExtend
    } else {
        ExtensionPolicy::Fail
    }
}

fn class_in(field: FieldSpec, expr: &str, var: Option<Var>) -> d4lift::Result<ASClass> {
    let f = match var {
        Some(var) => parse_poly_in(field, expr, var)?,
        None => parse_poly(field, expr)?,
    };
    reduce_class(field, &f)
}

fn class_json(c: &ASClass) -> Value {
    json!({
        "var": c.var().as_char().to_string(),
        "representative": c.representative().to_string(),
        "pole_order": c.pole_order(),
    })
}

fn description_json(d: &SupersimpleDescription) -> Value {
    json!({
        "field": d.field().name(),
        "eta": d.eta().to_string(),
        "q": d.q().to_string(),
        "d": d.d(),
    })
}

fn certificate_summary(cert: &LiftCertificate) -> Vec<(&'static str, String)> {
    let p = &cert.parameters;
    let mut out = vec![
        ("field", cert.field.name()),
        ("precision", cert.precision.to_string()),
        ("case", format!("{:?}", cert.case()).to_lowercase()),
        ("description", cert.description.to_string()),
    ];
    if let (Some(g), Some(m)) = (&p.gamma, p.m) {
        out.push(("gamma", g.to_text()));
        out.push(("m", m.to_string()));
    }
    out.extend([
        ("F", cert.f.to_string()),
        ("G", cert.g.to_string()),
        ("H", cert.h.to_string()),
        ("identity", cert.checks.identity_verified.to_string()),
        ("reduction matches", cert.checks.reduction_matches.to_string()),
        (
            "non-galois witness",
            format!("2^{} * unit", cert.checks.witness_valuation),
        ),
        ("genus (C2, C3)", format!("{}, {}", cert.genus.g2, cert.genus.g3)),
    ]);
    out
}

fn run(cli: &Cli) -> d4lift::Result<Output> {
    let opts = &cli.opts;
    let field = FieldSpec::from_name(&opts.field)?;
    match &cli.command {
        Command::Reduce { expr } => {
            let c = class_in(field, expr, None)?;
            Ok(Output {
                text: vec![
                    ("representative", c.representative().to_string()),
                    ("pole order", c.pole_order().to_string()),
                ],
                json: class_json(&c).into(),
            })
        }
        Command::Classify { expr } => {
            let c = class_in(field, expr, Some(Var::V))?;
            let cl = classify_supersimple(&c, policy(opts))?;
            let d = &cl.description;
            let mut text = vec![
                ("field", d.field().name()),
                ("eta", d.eta().to_string()),
                ("Q", d.q().to_string()),
                ("d", d.d().to_string()),
                ("branch", cl.branch.to_string()),
            ];
            let mut doc = description_json(d);
            doc["branch"] = json!(cl.branch.to_string());
            if let Some(e) = &cl.embedding {
                text.push(("embedding", format!("a -> {}", e.apply(e.source().generator()))));
                doc["extended_from"] = json!(e.source().name());
            }
            Ok(Output { text, json: doc.into() })
        }
        Command::Different { expr } => {
            let c = class_in(field, expr, None)?;
            let different = different_degree(&c)?;
            let mut text = vec![("different", different.to_string())];
            let mut doc = json!({ "class": class_json(&c), "different": different });
            if c.var() == Var::V && galois_type(&c)? == GaloisType::NonGalois && is_supersimple(&c)? {
                let cl = classify_supersimple(&c, policy(opts))?;
                let composite = different_of_composite(&cl.description);
                text.push(("composite different", composite.to_string()));
                doc["composite_different"] = json!(composite);
            }
            Ok(Output { text, json: doc.into() })
        }
        Command::Genus { expr } => {
            let c = class_in(field, expr, None)?;
            let genus = genus_katz_gabber(&c)?;
            Ok(Output {
                text: vec![("genus", genus.to_string())],
                json: json!({ "class": class_json(&c), "genus": genus }).into(),
            })
        }
        Command::GaloisTest { expr } => {
            let c = class_in(field, expr, Some(Var::V))?;
            let kind = galois_type(&c)?;
            let galois = kind != GaloisType::NonGalois;
            let mut text = vec![("galois", galois.to_string()), ("type", kind.to_string())];
            let mut doc = json!({ "galois": galois, "type": kind.to_string() });
            if kind == GaloisType::NonGalois {
                let s = is_supersimple(&c)?;
                text.push(("supersimple", s.to_string()));
                doc["supersimple"] = json!(s);
            }
            Ok(Output { text, json: doc.into() })
        }
        Command::Lift { expr, eta, q, out } => {
            let desc = match (expr, eta, q) {
                (Some(expr), None, None) => {
                    let c = class_in(field, expr, Some(Var::V))?;
                    classify_supersimple(&c, policy(opts))?.description
                }
                (None, Some(eta), Some(q)) => {
                    SupersimpleDescription::new(parse_field_elem(field, eta)?, parse_poly_in(field, q, Var::T)?)?
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "lift takes a class expression or both --eta and --q".into(),
                    ))
                }
            };
            let cert = construct_lift(&desc, opts.precision)?;
            let json_text = cert.to_json();
            if let Some(path) = out {
                std::fs::write(path, format!("{json_text}\n"))
                    .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(Output {
                text: certificate_summary(&cert),
                json: Json::Raw(json_text),
            })
        }
        Command::VerifyIdentity { m } => {
            let report = match m {
                None => verify_identity_small()?,
                Some(m) => verify_identity_general(*m)?,
            };
            let case = m.map_or("small".to_string(), |m| format!("general, m = {m}"));
            Ok(Output {
                text: vec![("", report.to_string())],
                json: json!({ "case": case, "holds": true, "message": report.to_string() }).into(),
            })
        }
        Command::VerifyCert { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            let cert = LiftCertificate::from_json(&text)?;
            verify_certificate(&cert)?;
            let reduction = reduction_matches(&cert, &cert.description);
            let kummer = kummer_analysis(&cert)?;
            let mut lines = vec![("", "certificate verified".to_string())];
            lines.extend(certificate_summary(&cert));
            Ok(Output {
                text: lines,
                json: json!({
                    "verified": true,
                    "description": description_json(&cert.description),
                    "reduction_class": reduction.f_bar_class.to_string(),
                    "witness_valuation": kummer.witness_valuation,
                    "witness_unit": kummer.witness_unit.to_text(),
                })
                .into(),
            })
        }
    }
}

fn error_json(code: &str, message: &str) -> String {
    serde_json::to_string_pretty(&json!({ "error": { "code": code, "message": message } })).expect("values serialize")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            if std::env::args().any(|a| a == "--json") {
                println!("{}", error_json("UsageError", e.to_string().trim()));
            } else {
                eprint!("{e}");
            }
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            println!("{}", out.render(cli.opts.json));
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.opts.json {
                println!("{}", error_json(e.code(), &e.to_string()));
            } else {
                eprintln!("error[{}]: {e}", e.code());
            }
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
