//! `bmk`: verify the master identity for `B(m,k)`, count admissible words,
//! print generating series, normal forms and characteristic coefficients.
//!
//! Exit codes: 0 success, 1 an identity or cross-check failed, 2 usage or
//! input error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bmk::charpoly::{char_coeffs, SymMatrix};
use bmk::enumerate::{count_admissible, f_series, CountMethod};
use bmk::identity::verify_master;
use bmk::polyring::Poly;
use bmk::rewrite::normal_form;
use bmk::words::{AlgebraParams, Variant, Word};

#[derive(Debug, Parser)]
#[command(
    name = "bmk",
    version,
    about = "Exact computations in the algebras B(m,k)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check first factor times second factor equals 1 through a t-degree.
    Verify {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Highest t-degree checked.
        #[arg(long, visible_alias = "len", default_value_t = 6)]
        cap: usize,
        #[command(flatten)]
        matrix: MatrixArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Count admissible words of each length with all three methods.
    Count {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Longest word length counted.
        #[arg(long, visible_alias = "cap", default_value_t = 10)]
        len: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Strict)]
        variant: VariantArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the admissible-word series with the inverted symmetric-function sum.
    Series {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Highest t-degree printed.
        #[arg(long, visible_alias = "len", default_value_t = 4)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Strict)]
        variant: VariantArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Normal form of a word in the admissible basis.
    NormalForm {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Comma-separated letters, e.g. 3,2,1.
        #[arg(long)]
        word: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Coefficients c_r: (-1)^r times the sum of the r x r principal minors.
    Charpoly {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        matrix: MatrixArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct AlgebraArgs {
    /// Number of generators.
    #[arg(long)]
    m: usize,
    /// Relation degree, 2 <= k <= m.
    #[arg(long)]
    k: usize,
}

impl AlgebraArgs {
    fn params(&self) -> Result<AlgebraParams, String> {
        AlgebraParams::new(self.m, self.k).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Args)]
struct MatrixArgs {
    /// identity, ones, symbolic, random, or a path to a JSON matrix file.
    #[arg(long, default_value = "identity")]
    matrix: String,
    /// Seed for --matrix random.
    #[arg(long)]
    seed: Option<u64>,
}

impl MatrixArgs {
    fn load(&self, m: usize) -> Result<SymMatrix, String> {
        let a = match self.matrix.as_str() {
            "identity" => SymMatrix::identity(m),
            "ones" => SymMatrix::ones(m),
            "symbolic" => SymMatrix::symbolic(m),
            "random" => {
                let seed = self.seed.ok_or("--matrix random requires --seed")?;
                SymMatrix::random(m, seed)
            }
            path => {
                let path = PathBuf::from(path);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read matrix file {}: {e}", path.display()))?;
                SymMatrix::from_json_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
        };
        if a.dim() != m {
            return Err(format!("matrix is {0}x{0} but --m is {m}", a.dim()));
        }
        Ok(a)
    }

    fn describe(&self) -> String {
        match (self.matrix.as_str(), self.seed) {
            ("random", Some(seed)) => format!("random(seed={seed})"),
            (other, _) => other.to_string(),
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Strict,
    Weak,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Strict => Variant::Strict,
            VariantArg::Weak => Variant::Weak,
        }
    }
}

/// Rendered output plus whether every check in it passed.
struct Report {
    text: String,
    json: Value,
    pass: bool,
}

fn poly_json(p: &Poly) -> Value {
    serde_json::to_value(p.to_json_terms()).expect("poly terms serialize")
}

fn verify(alg: &AlgebraArgs, cap: usize, matrix: &MatrixArgs) -> Result<Report, String> {
    let params = alg.params()?;
    let a = matrix.load(params.m())?;
    let report = verify_master(&a, &params, cap).map_err(|e| e.to_string())?;
    let mut text = format!(
        "verify m={} k={} cap={} matrix={}\n",
        params.m(),
        params.k(),
        cap,
        matrix.describe()
    );
    for d in &report.per_degree {
        let status = if d.ok { "ok" } else { "FAIL" };
        writeln!(
            text,
            "  degree {}: {status} ({} residual terms)",
            d.d, d.residual_terms
        )
        .unwrap();
    }
    if let Some(f) = &report.first_failure {
        writeln!(text, "first failing degree {}:", f.d).unwrap();
        for t in &f.terms {
            let mono = t
                .monomial
                .iter()
                .map(|(v, e)| format!("{v}^{e}"))
                .collect::<Vec<_>>()
                .join("*");
            writeln!(
                text,
                "  {} {}",
                t.coeff,
                if mono.is_empty() { "1".into() } else { mono }
            )
            .unwrap();
        }
    }
    text.push_str(if report.pass { "PASS\n" } else { "FAIL\n" });
    Ok(Report {
        text,
        json: serde_json::to_value(&report).expect("report serializes"),
        pass: report.pass,
    })
}

fn count(alg: &AlgebraArgs, len: usize, variant: Variant) -> Result<Report, String> {
    let params = alg.params()?;
    let tables = CountMethod::ALL
        .iter()
        .map(|&method| count_admissible(&params, len, variant, method))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let agree = tables.windows(2).all(|w| w[0].values == w[1].values);
    let mut text = format!(
        "count m={} k={} variant={variant} len={len}\n",
        params.m(),
        params.k()
    );
    let width = tables
        .iter()
        .flat_map(|t| t.values.iter().map(|v| v.to_string().len()))
        .max()
        .unwrap_or(1)
        .max(8);
    write!(text, "{:>4}", "l").unwrap();
    for t in &tables {
        write!(text, "  {:>width$}", t.method.as_str()).unwrap();
    }
    text.push('\n');
    for l in 0..=len {
        write!(text, "{l:>4}").unwrap();
        for t in &tables {
            write!(text, "  {:>width$}", t.values[l].to_string()).unwrap();
        }
        if tables.iter().any(|t| t.values[l] != tables[0].values[l]) {
            text.push_str("  DISAGREE");
        }
        text.push('\n');
    }
    text.push_str(if agree {
        "methods agree\n"
    } else {
        "methods DISAGREE\n"
    });
    Ok(Report {
        text,
        json: json!({ "tables": tables, "agree": agree }),
        pass: agree,
    })
}

fn series(alg: &AlgebraArgs, cap: usize, variant: Variant) -> Result<Report, String> {
    let params = alg.params()?;
    let check = f_series(&params, cap, variant).map_err(|e| e.to_string())?;
    let mut text = format!(
        "series m={} k={} variant={variant} cap={cap}\n",
        params.m(),
        params.k()
    );
    writeln!(text, "denominator: {}", check.denominator).unwrap();
    for d in 0..=cap as u32 {
        writeln!(text, "degree {d}: {}", check.lhs.poly().t_component(d)).unwrap();
    }
    text.push_str(if check.equal {
        "admissible series equals inverted denominator: PASS\n"
    } else {
        "admissible series differs from inverted denominator: FAIL\n"
    });
    let json = json!({
        "params": params,
        "cap": cap,
        "variant": variant,
        "denominator": poly_json(&check.denominator),
        "lhs": poly_json(check.lhs.poly()),
        "rhs": poly_json(check.rhs.poly()),
        "equal": check.equal,
    });
    Ok(Report {
        text,
        json,
        pass: check.equal,
    })
}

fn normal_form_cmd(alg: &AlgebraArgs, word: &str) -> Result<Report, String> {
    let params = alg.params()?;
    let w: Word = word.parse().map_err(|e: bmk::Error| e.to_string())?;
    let w = Word::checked(w.into_letters(), &params).map_err(|e| e.to_string())?;
    let nf = normal_form(&w, &params).map_err(|e| e.to_string())?;
    let mut text = format!("normal form of {w} in B({},{})\n", params.m(), params.k());
    if nf.is_empty() {
        text.push_str("  0\n");
    }
    for (v, c) in nf.iter() {
        writeln!(text, "  {c:+} {v}").unwrap();
    }
    Ok(Report {
        text,
        json: serde_json::to_value(&nf).expect("combination serializes"),
        pass: true,
    })
}

fn charpoly(m: usize, matrix: &MatrixArgs) -> Result<Report, String> {
    if m == 0 {
        return Err("--m must be at least 1".into());
    }
    let a = matrix.load(m)?;
    let coeffs = char_coeffs(&a);
    let mut text = format!("charpoly m={m} matrix={}\n", matrix.describe());
    let mut rows = Vec::with_capacity(coeffs.len());
    for (r, c) in coeffs.iter().enumerate() {
        writeln!(text, "c_{r} = {c}").unwrap();
        rows.push(json!({ "r": r, "coeff": poly_json(c) }));
    }
    Ok(Report {
        text,
        json: Value::Array(rows),
        pass: true,
    })
}

fn run(cli: &Cli) -> Result<(Report, Format), String> {
    match &cli.command {
        Command::Verify {
            alg,
            cap,
            matrix,
            out,
        } => Ok((verify(alg, *cap, matrix)?, out.format)),
        Command::Count {
            alg,
            len,
            variant,
            out,
        } => Ok((count(alg, *len, (*variant).into())?, out.format)),
        Command::Series {
            alg,
            cap,
            variant,
            out,
        } => Ok((series(alg, *cap, (*variant).into())?, out.format)),
        Command::NormalForm { alg, word, out } => Ok((normal_form_cmd(alg, word)?, out.format)),
        Command::Charpoly { m, matrix, out } => Ok((charpoly(*m, matrix)?, out.format)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, format)) => {
            let body = match format {
                Format::Text => report.text,
                Format::Json => serde_json::to_string_pretty(&report.json).expect("json") + "\n",
            };
            // a closed pipe downstream is not an error worth reporting
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
