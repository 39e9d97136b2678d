//! `spdgeo`: distances, geodesics, means and verification suites for
//! kernel metrics on positive definite matrices.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 numeric/domain error (with a JSON error object on stderr).

use std::collections::BTreeMap;
use std::process::ExitCode;

use spdgeo::geodesic::{
    alm_3mean, closed_form_distance, curve_length, geodesic_point, karcher_mean,
    numeric_shortest_distance, Curve, GeodesicFamily, PathSearchConfig,
};
use spdgeo::matcore::io::{self, fmt_f64};
use spdgeo::means::{format_kernel, kernel_eval, mean_eval, parse_kernel, parse_mean, KernelSpec};
use spdgeo::metric::metric_eval;
use spdgeo::verify::{run_check, run_all_with_samples, CheckSpec, CATALOG};
use spdgeo::{random_spd, NormSpec, SpdMatrix};

const USAGE: &str = "spdgeo — kernel-metric geometry on positive definite matrices

USAGE:
  spdgeo mean-eval   --mean <spec> --x <f> --y <f>
  spdgeo kernel-eval --kernel <spec> --x <f> --y <f>
  spdgeo metric-eval --kernel <spec> --d <file> --h <file> --k <file>
  spdgeo geodesic    --family <fam> --a <file> --b <file> --t <f> [--out <file>]
  spdgeo distance    --family <fam> --norm <norm> --a <file> --b <file>
  spdgeo length      --kernel <spec> --path <files...> --norm <norm> [--quad <n>]
  spdgeo shortest    --kernel <spec> --a <file> --b <file>
                     [--segments <n>] [--iters <n>] [--seed <s>] [--out <file>]
  spdgeo karcher     --alpha <f> --inputs <files...> --tol <f> [--max-iter <n>] [--out <file>]
  spdgeo alm3        --inputs <a> <b> <c> --tol <f> [--out <file>]
  spdgeo compare     --a <file> --b <file> --thetas <list> --means <list> --norm <norm>
  spdgeo verify      [--check <name>] [--seed <s>] [--dim <n>] [--samples <n>]
  spdgeo gen         --n <n> --seed <s> --spread <f> --out <file>

  <spec>  mean/kernel grammar MEAN[:param]^THETA, e.g. stolarsky:3.5^1,
          geometric^2, alpha:0.5^2, wyd:0.25^1 (mean-eval takes the mean
          part alone)
  <fam>   theta:<f> | alpha:<f> | fisher
  <norm>  hs | op | schatten:<p> | kyfan:<k>

Matrix files are JSON: {\"n\": int, \"complex\": bool, \"data\": [[re, im], ...]}.
The SPDGEO_THREADS variable caps verification parallelism (0 = auto).";

/// Usage-level error: wrong flags or malformed flag values.
struct UsageError(String);

enum Failure {
    Usage(UsageError),
    Numeric(spdgeo::Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e)
    }
}

impl From<spdgeo::Error> for Failure {
    fn from(e: spdgeo::Error) -> Self {
        Failure::Numeric(e)
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        println!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    match dispatch(&args) {
        Ok(code) => code,
        Err(Failure::Usage(UsageError(msg))) => {
            eprintln!("error: {msg}\n\n{USAGE}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(err)) => {
            let kind = match &err {
                spdgeo::Error::Io(_) | spdgeo::Error::Json(_) => "io",
                spdgeo::Error::Parse(_) => "parse",
                spdgeo::Error::NonConvergence { .. } => "non-convergence",
                _ => "domain",
            };
            eprintln!(
                "{}",
                serde_json::json!({"error": err.to_string(), "kind": kind})
            );
            ExitCode::from(3)
        }
    }
}

fn dispatch(args: &[String]) -> Result<ExitCode, Failure> {
    let command = args
        .first()
        .ok_or_else(|| UsageError("missing command".into()))?;
    let flags = Flags::parse(&args[1..])?;
    match command.as_str() {
        "mean-eval" => cmd_mean_eval(&flags),
        "kernel-eval" => cmd_kernel_eval(&flags),
        "metric-eval" => cmd_metric_eval(&flags),
        "geodesic" => cmd_geodesic(&flags),
        "distance" => cmd_distance(&flags),
        "length" => cmd_length(&flags),
        "shortest" => cmd_shortest(&flags),
        "karcher" => cmd_karcher(&flags),
        "alm3" => cmd_alm3(&flags),
        "compare" => cmd_compare(&flags),
        "verify" => cmd_verify(&flags),
        "gen" => cmd_gen(&flags),
        other => Err(UsageError(format!("unknown command `{other}`")).into()),
    }
}

/// `--key value...` flag multimap; every flag takes at least one value and
/// multi-value flags absorb values until the next flag.
struct Flags {
    values: BTreeMap<String, Vec<String>>,
    consumed: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Self, UsageError> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for arg in args {
            if let Some(key) = arg.strip_prefix("--") {
                if key.is_empty() {
                    return Err(UsageError("empty flag name".into()));
                }
                if values.contains_key(key) {
                    return Err(UsageError(format!("duplicate flag --{key}")));
                }
                values.insert(key.to_string(), Vec::new());
                current = Some(key.to_string());
            } else {
                let key = current
                    .as_ref()
                    .ok_or_else(|| UsageError(format!("stray argument `{arg}`")))?;
                values.get_mut(key).expect("current key exists").push(arg.clone());
            }
        }
        for (key, vals) in &values {
            if vals.is_empty() {
                return Err(UsageError(format!("flag --{key} needs a value")));
            }
        }
        Ok(Self {
            values,
            consumed: Default::default(),
        })
    }

    fn one(&self, key: &str) -> Result<&str, UsageError> {
        self.consumed.borrow_mut().insert(key.to_string());
        let vals = self
            .values
            .get(key)
            .ok_or_else(|| UsageError(format!("missing required flag --{key}")))?;
        if vals.len() != 1 {
            return Err(UsageError(format!("flag --{key} takes exactly one value")));
        }
        Ok(&vals[0])
    }

    fn many(&self, key: &str) -> Result<Vec<String>, UsageError> {
        self.consumed.borrow_mut().insert(key.to_string());
        let vals = self
            .values
            .get(key)
            .ok_or_else(|| UsageError(format!("missing required flag --{key}")))?;
        // Accept both space-separated and comma-separated lists.
        Ok(vals
            .iter()
            .flat_map(|v| v.split(','))
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect())
    }

    fn opt(&self, key: &str) -> Result<Option<&str>, UsageError> {
        self.consumed.borrow_mut().insert(key.to_string());
        match self.values.get(key) {
            None => Ok(None),
            Some(vals) if vals.len() == 1 => Ok(Some(&vals[0])),
            Some(_) => Err(UsageError(format!("flag --{key} takes exactly one value"))),
        }
    }

    fn f64(&self, key: &str) -> Result<f64, UsageError> {
        self.one(key)?
            .parse()
            .map_err(|_| UsageError(format!("flag --{key} expects a number")))
    }

    fn usize(&self, key: &str) -> Result<usize, UsageError> {
        self.one(key)?
            .parse()
            .map_err(|_| UsageError(format!("flag --{key} expects a nonnegative integer")))
    }

    fn u64(&self, key: &str) -> Result<u64, UsageError> {
        self.one(key)?
            .parse()
            .map_err(|_| UsageError(format!("flag --{key} expects a 64-bit seed")))
    }

    /// Rejects flags that no handler consumed.
    fn finish(&self) -> Result<(), UsageError> {
        let consumed = self.consumed.borrow();
        for key in self.values.keys() {
            if !consumed.contains(key) {
                return Err(UsageError(format!("unknown flag --{key}")));
            }
        }
        Ok(())
    }
}

fn parse_family(text: &str) -> Result<GeodesicFamily<f64>, UsageError> {
    if text == "fisher" {
        return Ok(GeodesicFamily::FisherRao);
    }
    if let Some(v) = text.strip_prefix("theta:") {
        let theta: f64 = v
            .parse()
            .map_err(|_| UsageError(format!("bad theta in family `{text}`")))?;
        return Ok(GeodesicFamily::Theta(theta));
    }
    if let Some(v) = text.strip_prefix("alpha:") {
        let alpha: f64 = v
            .parse()
            .map_err(|_| UsageError(format!("bad alpha in family `{text}`")))?;
        return Ok(GeodesicFamily::Alpha(alpha));
    }
    Err(UsageError(format!(
        "unknown family `{text}` (expected theta:<f>, alpha:<f> or fisher)"
    )))
}

fn parse_norm(text: &str) -> Result<NormSpec<f64>, Failure> {
    match text {
        "hs" => Ok(NormSpec::HilbertSchmidt),
        "op" => Ok(NormSpec::Operator),
        _ => {
            if let Some(v) = text.strip_prefix("schatten:") {
                let p: f64 = v
                    .parse()
                    .map_err(|_| UsageError(format!("bad Schatten p in `{text}`")))?;
                return Ok(NormSpec::schatten(p)?);
            }
            if let Some(v) = text.strip_prefix("kyfan:") {
                let k: usize = v
                    .parse()
                    .map_err(|_| UsageError(format!("bad Ky Fan k in `{text}`")))?;
                return Ok(NormSpec::ky_fan(k)?);
            }
            Err(UsageError(format!(
                "unknown norm `{text}` (expected hs, op, schatten:<p> or kyfan:<k>)"
            ))
            .into())
        }
    }
}

fn parse_kernel_flag(text: &str) -> Result<KernelSpec<f64>, Failure> {
    Ok(parse_kernel(text)?)
}

fn write_or_print(out: Option<&str>, m: &spdgeo::HermitianMatrix<f64>) -> Result<(), Failure> {
    match out {
        Some(path) => io::write_matrix(path, m)?,
        None => println!("{}", io::matrix_to_json(m)),
    }
    Ok(())
}

fn cmd_mean_eval(flags: &Flags) -> Result<ExitCode, Failure> {
    let mean = parse_mean::<f64>(flags.one("mean")?)?;
    let x = flags.f64("x")?;
    let y = flags.f64("y")?;
    flags.finish()?;
    println!("{}", fmt_f64(mean_eval(&mean, x, y)?));
    Ok(ExitCode::SUCCESS)
}

fn cmd_kernel_eval(flags: &Flags) -> Result<ExitCode, Failure> {
    let kernel = parse_kernel_flag(flags.one("kernel")?)?;
    let x = flags.f64("x")?;
    let y = flags.f64("y")?;
    flags.finish()?;
    println!("{}", fmt_f64(kernel_eval(&kernel, x, y)?));
    Ok(ExitCode::SUCCESS)
}

fn cmd_metric_eval(flags: &Flags) -> Result<ExitCode, Failure> {
    let kernel = parse_kernel_flag(flags.one("kernel")?)?;
    let d = io::read_spd(flags.one("d")?)?;
    let h = io::read_matrix(flags.one("h")?)?;
    let k = io::read_matrix(flags.one("k")?)?;
    flags.finish()?;
    println!("{}", fmt_f64(metric_eval(&kernel, &d, &h, &k)?));
    Ok(ExitCode::SUCCESS)
}

fn cmd_geodesic(flags: &Flags) -> Result<ExitCode, Failure> {
    let family = parse_family(flags.one("family")?)?;
    let a = io::read_spd(flags.one("a")?)?;
    let b = io::read_spd(flags.one("b")?)?;
    let t = flags.f64("t")?;
    let out = flags.opt("out")?.map(String::from);
    flags.finish()?;
    let p = geodesic_point(family, &a, &b, t)?;
    write_or_print(out.as_deref(), p.herm())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_distance(flags: &Flags) -> Result<ExitCode, Failure> {
    let family = parse_family(flags.one("family")?)?;
    let norm = parse_norm(flags.one("norm")?)?;
    let a = io::read_spd(flags.one("a")?)?;
    let b = io::read_spd(flags.one("b")?)?;
    flags.finish()?;
    println!("{}", fmt_f64(closed_form_distance(family, &norm, &a, &b)?));
    Ok(ExitCode::SUCCESS)
}

fn cmd_length(flags: &Flags) -> Result<ExitCode, Failure> {
    let kernel = parse_kernel_flag(flags.one("kernel")?)?;
    let files = flags.many("path")?;
    let norm = parse_norm(flags.one("norm")?)?;
    let quad = match flags.opt("quad")? {
        Some(v) => v
            .parse()
            .map_err(|_| UsageError("flag --quad expects an integer".into()))?,
        None => spdgeo::geodesic::DEFAULT_QUAD_SEGMENT,
    };
    flags.finish()?;
    let nodes: Vec<SpdMatrix<f64>> = files
        .iter()
        .map(io::read_spd)
        .collect::<spdgeo::Result<_>>()?;
    let curve = Curve::polyline_uniform(nodes)?;
    println!("{}", fmt_f64(curve_length(&kernel, &curve, &norm, quad)?));
    Ok(ExitCode::SUCCESS)
}

fn cmd_shortest(flags: &Flags) -> Result<ExitCode, Failure> {
    let kernel = parse_kernel_flag(flags.one("kernel")?)?;
    let a = io::read_spd(flags.one("a")?)?;
    let b = io::read_spd(flags.one("b")?)?;
    let mut cfg = PathSearchConfig::<f64>::default();
    if let Some(v) = flags.opt("segments")? {
        cfg.segments = v
            .parse()
            .map_err(|_| UsageError("flag --segments expects an integer".into()))?;
    }
    if let Some(v) = flags.opt("iters")? {
        cfg.max_iterations = v
            .parse()
            .map_err(|_| UsageError("flag --iters expects an integer".into()))?;
    }
    if let Some(v) = flags.opt("seed")? {
        cfg.seed = v
            .parse()
            .map_err(|_| UsageError("flag --seed expects a 64-bit seed".into()))?;
    }
    let out = flags.opt("out")?.map(String::from);
    flags.finish()?;
    let sp = numeric_shortest_distance(&kernel, &a, &b, &cfg)?;
    println!("{}", fmt_f64(sp.distance));
    if !sp.converged {
        eprintln!(
            "{}",
            serde_json::json!({
                "warning": "iteration budget exhausted; value is best-so-far",
                "iterations": sp.iterations,
            })
        );
    }
    if let Some(path) = out {
        if let Curve::Polyline { nodes, .. } = &sp.path {
            let dump: Vec<serde_json::Value> =
                nodes.iter().map(|n| io::matrix_to_value(n.herm())).collect();
            std::fs::write(&path, serde_json::to_string(&dump).map_err(spdgeo::Error::from)?)
                .map_err(spdgeo::Error::from)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_karcher(flags: &Flags) -> Result<ExitCode, Failure> {
    let alpha = flags.f64("alpha")?;
    let files = flags.many("inputs")?;
    let tol = flags.f64("tol")?;
    let max_iter = match flags.opt("max-iter")? {
        Some(v) => v
            .parse()
            .map_err(|_| UsageError("flag --max-iter expects an integer".into()))?,
        None => 200,
    };
    let out = flags.opt("out")?.map(String::from);
    flags.finish()?;
    let mats: Vec<SpdMatrix<f64>> = files
        .iter()
        .map(io::read_spd)
        .collect::<spdgeo::Result<_>>()?;
    let mean = karcher_mean(&mats, alpha, tol, max_iter)?;
    write_or_print(out.as_deref(), mean.herm())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_alm3(flags: &Flags) -> Result<ExitCode, Failure> {
    let files = flags.many("inputs")?;
    if files.len() != 3 {
        return Err(UsageError("alm3 needs exactly three input files".into()).into());
    }
    let tol = flags.f64("tol")?;
    let out = flags.opt("out")?.map(String::from);
    flags.finish()?;
    let a = io::read_spd(&files[0])?;
    let b = io::read_spd(&files[1])?;
    let c = io::read_spd(&files[2])?;
    let mean = alm_3mean(&a, &b, &c, tol)?;
    write_or_print(out.as_deref(), mean.herm())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(flags: &Flags) -> Result<ExitCode, Failure> {
    let a = io::read_spd(flags.one("a")?)?;
    let b = io::read_spd(flags.one("b")?)?;
    let thetas: Vec<f64> = flags
        .many("thetas")?
        .iter()
        .map(|v| {
            v.parse()
                .map_err(|_| UsageError(format!("bad theta `{v}` in --thetas")))
        })
        .collect::<Result<_, _>>()?;
    let mean_names = flags.many("means")?;
    let norm = parse_norm(flags.one("norm")?)?;
    flags.finish()?;
    // delta_M_theta is the length of the pull-back family geodesic under the
    // M^theta metric: the bound that certifies the Example 4.7 comparisons.
    println!("mean,theta,delta_M_theta,delta_phi_theta,relation");
    for name in &mean_names {
        let mean = parse_mean::<f64>(name)?;
        for &theta in &thetas {
            let phi_m = KernelSpec::new(mean.clone(), theta);
            let curve = Curve::closed_form(GeodesicFamily::Theta(theta), a.clone(), b.clone())?;
            let len_m = curve_length(&phi_m, &curve, &norm, 64)?;
            let dist = closed_form_distance(GeodesicFamily::Theta(theta), &norm, &a, &b)?;
            let tol = 1e-9 * dist.max(1.0);
            let relation = if (len_m - dist).abs() <= tol {
                "="
            } else if len_m > dist {
                ">="
            } else {
                "<="
            };
            println!(
                "{},{},{},{},{}",
                format_kernel(&phi_m)?,
                fmt_f64(theta),
                fmt_f64(len_m),
                fmt_f64(dist),
                relation
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(flags: &Flags) -> Result<ExitCode, Failure> {
    let seed = match flags.opt("seed")? {
        Some(v) => v
            .parse()
            .map_err(|_| UsageError("flag --seed expects a 64-bit seed".into()))?,
        None => 7,
    };
    let dim = match flags.opt("dim")? {
        Some(v) => v
            .parse()
            .map_err(|_| UsageError("flag --dim expects an integer".into()))?,
        None => 3,
    };
    let samples = match flags.opt("samples")? {
        Some(v) => v
            .parse()
            .map_err(|_| UsageError("flag --samples expects an integer".into()))?,
        None => 200,
    };
    let check = flags.opt("check")?.map(String::from);
    flags.finish()?;
    let reports = match check {
        Some(name) => {
            if !CATALOG.contains(&name.as_str()) {
                return Err(spdgeo::Error::UnknownCheck(name).into());
            }
            vec![run_check(
                &CheckSpec::new(name, seed)
                    .with_dimension(dim)
                    .with_samples(samples),
            )?]
        }
        None => run_all_with_samples(seed, dim, samples)?,
    };
    let mut all_pass = true;
    for report in &reports {
        all_pass &= report.pass;
        println!(
            "{}",
            serde_json::to_string(report).map_err(spdgeo::Error::from)?
        );
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_gen(flags: &Flags) -> Result<ExitCode, Failure> {
    let n = flags.usize("n")?;
    let seed = flags.u64("seed")?;
    let spread = flags.f64("spread")?;
    let out = flags.one("out")?.to_string();
    flags.finish()?;
    if n < 1 {
        return Err(UsageError("--n must be at least 1".into()).into());
    }
    let m = random_spd::<f64>(n, seed, spread);
    io::write_matrix(out, m.herm())?;
    Ok(ExitCode::SUCCESS)
}
