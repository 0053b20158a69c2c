use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use steinberg_core::hecke::{hecke_cosets, hecke_in_basis, verify_eigen_chain, EigenReport};
use steinberg_core::homology::{build_complex, build_complex_seeded, GammaComplex};
use steinberg_core::linalg::{Coeff, Field};
use steinberg_core::oracle::{manin_dim, manin_hecke};
use steinberg_core::report::{render_json, BettiTable};
use steinberg_core::selfcheck;
use steinberg_core::voronoi::CellComplexTable;
use steinberg_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "steinberg", version, about = "Voronoi homology and Hecke operators for Gamma_0(N) in SL(n,Z)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate Voronoi cells modulo SL(n,Z).
    Cells(Common),
    /// Betti numbers of the coinvariant complex.
    Homology(Common),
    /// Matrix and eigenvalues of T(l,k) on H_degree.
    Hecke(Common),
    /// Classical Manin-symbol dimension and Hecke polynomial (n = 2).
    Oracle(Common),
    /// Run the consistency suite.
    Verify(Common),
    /// Certify an eigenvector of T(l,1) on the chain level (n = 2).
    Nofake(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    level: u64,
    /// `Q` or `Fp:<p>`.
    #[arg(long, default_value = "Q")]
    field: String,
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    degree: usize,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "STEINBERG_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Work limit for one-sharbly reduction.
    #[arg(long, default_value_t = 256)]
    budget: usize,
    /// Seed for redundant randomized self-checks. Never changes results.
    #[arg(long)]
    seed: Option<u64>,
    /// Proposed eigenvalue for `nofake`.
    #[arg(long)]
    eigenvalue: Option<String>,
    /// Index of the homology generator used by `nofake`.
    #[arg(long, default_value_t = 0)]
    cycle: usize,
}

struct RunConfig {
    common: Common,
    field: Field,
}

impl RunConfig {
    fn new(common: Common) -> Result<Self> {
        let field: Field = common.field.parse()?;
        if common.level == 0 {
            return Err(Error::InvalidInput("--level must be positive".into()));
        }
        Ok(RunConfig { common, field })
    }

    fn ell(&self) -> Result<u64> {
        self.common.ell.ok_or_else(|| Error::InvalidInput("--ell is required".into()))
    }

    fn stem(&self) -> String {
        format!("n{}-N{}-{}", self.common.n, self.common.level, self.field.tag())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Unsupported(_) | Error::Io(_) => 1,
        Error::Precondition(_) => 2,
        Error::Undetermined(_) => 3,
        Error::Invariant(_) => 4,
    }
}

fn write_out(cfg: &RunConfig, name: &str, contents: &str) -> Result<()> {
    if let Some(dir) = &cfg.common.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn cache_path(dir: &Path, cfg: &RunConfig) -> PathBuf {
    dir.join(format!("complex-{}.json", cfg.stem()))
}

/// Builds the complex, or loads and re-verifies it from the cache directory.
fn complex(cfg: &RunConfig) -> Result<GammaComplex> {
    let c = &cfg.common;
    let built = match &c.cache_dir {
        Some(dir) => {
            let path = cache_path(dir, cfg);
            if path.exists() {
                let text = fs::read_to_string(&path)?;
                GammaComplex::from_json(&serde_json::from_str::<Value>(&text)?)?
            } else {
                let g = build_complex(c.n, c.level, cfg.field)?;
                fs::create_dir_all(dir)?;
                fs::write(&path, render_json(&g.to_json()?))?;
                g
            }
        }
        None => build_complex(c.n, c.level, cfg.field)?,
    };
    if let Some(seed) = c.seed {
        let shuffled = build_complex_seeded(c.n, c.level, cfg.field, Some(seed))?;
        if shuffled.to_json()? != built.to_json()? {
            return Err(Error::Invariant(format!("seeded rebuild with seed {seed} differs")));
        }
    }
    Ok(built)
}

fn cells(cfg: &RunConfig) -> Result<()> {
    let t = CellComplexTable::cached(cfg.common.n)?;
    let text = render_json(&t.to_json());
    if cfg.common.out.is_some() {
        write_out(cfg, &format!("cells-n{}.json", cfg.common.n), &text)?;
        let counts: Vec<String> = t.orbit_counts().iter().map(|(d, c)| format!("{d}:{c}")).collect();
        println!("n={} orbits by dimension {}", cfg.common.n, counts.join(", "));
    } else {
        print!("{text}");
    }
    Ok(())
}

fn homology(cfg: &RunConfig) -> Result<()> {
    let t = BettiTable::of(&complex(cfg)?)?;
    write_out(cfg, &format!("betti-{}.csv", cfg.stem()), &t.csv())?;
    write_out(cfg, &format!("betti-{}.json", cfg.stem()), &render_json(&t.to_json()))?;
    println!("{}", t.line());
    Ok(())
}

fn hecke_report(cfg: &RunConfig) -> Result<EigenReport> {
    let c = &cfg.common;
    let g = complex(cfg)?;
    let op = hecke_cosets(c.n, cfg.ell()?, c.k)?;
    let h = g.homology(c.degree)?;
    let report = hecke_in_basis(&g, &op, &h, c.budget)?;
    if let Some(seed) = c.seed {
        let again = hecke_in_basis(&g, &op, &h.with_random_basis(seed)?, c.budget)?;
        if again.char_poly != report.char_poly {
            return Err(Error::Invariant(format!("characteristic polynomial changed under basis seed {seed}")));
        }
    }
    Ok(report)
}

fn hecke(cfg: &RunConfig) -> Result<()> {
    let r = hecke_report(cfg)?;
    let csv = format!("{}\n{}\n", EigenReport::csv_header(), r.csv_row());
    let name = format!("hecke-{}-T{}_{}-H{}", cfg.stem(), r.ell, r.k, r.degree);
    write_out(cfg, &format!("{name}.csv"), &csv)?;
    write_out(cfg, &format!("{name}.json"), &render_json(&r.to_json()))?;
    print!("{csv}");
    Ok(())
}

fn oracle(cfg: &RunConfig) -> Result<()> {
    let level = cfg.common.level;
    let dim = manin_dim(level)?;
    let mut v = json!({ "level": level, "dimension": dim });
    println!("N={level} dim={dim}");
    if let Some(ell) = cfg.common.ell {
        let (m, p) = manin_hecke(level, ell)?;
        let f = Field::Rational;
        v["ell"] = json!(ell);
        v["matrix"] = json!(m.iter().map(|r| r.iter().map(|x| f.render(x)).collect::<Vec<_>>()).collect::<Vec<_>>());
        v["char_poly"] = json!(p.render());
        println!("T{ell} char poly {}", p.render());
    }
    write_out(cfg, &format!("oracle-N{level}.json"), &render_json(&v))?;
    Ok(())
}

fn verify(cfg: &RunConfig) -> Result<()> {
    let seed = cfg.common.seed.unwrap_or(0);
    let mut first_failure = None;
    let mut lines = String::new();
    for check in selfcheck::checks() {
        let line = match (check.run)(seed) {
            Ok(detail) => format!("PASS {}: {detail}", check.name),
            Err(e) => {
                let line = format!("FAIL {}: {e}", check.name);
                first_failure.get_or_insert(e);
                line
            }
        };
        println!("{line}");
        lines.push_str(&line);
        lines.push('\n');
    }
    write_out(cfg, "verify.txt", &lines)?;
    match first_failure {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

fn parse_coeff(field: Field, s: &str) -> Result<Coeff> {
    let q: Coeff = s.trim().parse().map_err(|_| Error::InvalidInput(format!("cannot parse eigenvalue '{s}'")))?;
    field.try_reduce(&q).ok_or_else(|| Error::InvalidInput(format!("{s} is not defined in {field}")))
}

fn nofake(cfg: &RunConfig) -> Result<()> {
    let c = &cfg.common;
    let g = complex(cfg)?;
    let op = hecke_cosets(c.n, cfg.ell()?, c.k)?;
    let h = g.homology(1)?;
    let x = h
        .cycles
        .get(c.cycle)
        .ok_or_else(|| Error::InvalidInput(format!("H1 has {} generators, --cycle {} is out of range", h.dimension, c.cycle)))?
        .clone();
    let a = match &c.eigenvalue {
        Some(s) => parse_coeff(cfg.field, s)?,
        None => {
            let r = hecke_in_basis(&g, &op, &h, c.budget)?;
            match r.eigenvalues.as_slice() {
                [(a, _)] if r.residual.degree() == Some(0) => a.clone(),
                _ => return Err(Error::InvalidInput("no single eigenvalue to test; pass --eigenvalue".into())),
            }
        }
    };
    let w = verify_eigen_chain(&g, &x, &op, &a, c.budget)?;
    let mut summary = w.summary();
    summary["verified"] = json!(w.check()?);
    let text = render_json(&summary);
    write_out(cfg, &format!("nofake-{}-T{}.json", cfg.stem(), op.ell), &text)?;
    print!("{text}");
    Ok(())
}

fn run(command: Command) -> Result<()> {
    let (common, f): (Common, fn(&RunConfig) -> Result<()>) = match command {
        Command::Cells(c) => (c, cells),
        Command::Homology(c) => (c, homology),
        Command::Hecke(c) => (c, hecke),
        Command::Oracle(c) => (c, oracle),
        Command::Verify(c) => (c, verify),
        Command::Nofake(c) => (c, nofake),
    };
    f(&RunConfig::new(common)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
