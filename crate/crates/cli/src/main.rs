use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use relcris::bpair::{classify, vcris_rank, Classification};
use relcris::doc::{self, JobDocument, Lattice, SubobjectDoc};
use relcris::filmod::{FilteredModule, Point, Subobject};
use relcris::profile::Profile;
use relcris::verdict::{Outcome, Report};
use relcris::Error;

/// Filtered φ-modules over W(k)[[Y]]: validation, Hodge and Newton numbers,
/// weak admissibility, Breuil modules and admissibility classification.
#[derive(Parser)]
#[command(name = "relcris", version)]
struct Cli {
    #[command(flatten)]
    prec: PrecisionFlags,
    /// Print JSON reports instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct PrecisionFlags {
    /// p-adic precision N_p of literals.
    #[arg(long, global = true)]
    prec_p: Option<i64>,
    /// Truncation order in Y.
    #[arg(long, global = true)]
    prec_y: Option<usize>,
    /// Truncation order in u.
    #[arg(long, global = true)]
    prec_u: Option<usize>,
    /// Truncation order in c.
    #[arg(long, global = true)]
    prec_c: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PointArg {
    Closed,
    Generic,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of a filtered (φ, ∇)-module.
    Validate { file: PathBuf },
    /// Hodge number t_H.
    Hodge { file: PathBuf },
    /// Newton number t_N at a point (both points if omitted).
    Newton {
        file: PathBuf,
        #[arg(long, value_enum)]
        point: Option<PointArg>,
    },
    /// Punctual weak admissibility.
    Weakadm {
        file: PathBuf,
        /// JSON list of subobjects to test.
        #[arg(long, conflicts_with = "auto")]
        subobjects: Option<PathBuf>,
        /// Enumerate subobjects automatically.
        #[arg(long)]
        auto: bool,
    },
    /// Strong divisibility of the lattices listed in the job.
    Lattice { file: PathBuf },
    /// Build and verify the Breuil module of an admissible reducible module.
    Breuil {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank of V_cris for Φ = diag(p, 1) and rank-1 Fil¹.
    BpairRank { file: PathBuf },
    /// Classify one job, several, or every *.json in a directory.
    Classify {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Worker threads for batches.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Exit status: conclusive, invalid input, inconclusive at precision.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Status {
    Ok = 0,
    Inconclusive = 2,
    Invalid = 1,
}

impl Status {
    fn of_error(e: &Error) -> Status {
        if e.is_precision_limited() {
            Status::Inconclusive
        } else {
            Status::Invalid
        }
    }

    fn of_report(r: &Report) -> Status {
        if r.any_fail() {
            Status::Invalid
        } else if !r.is_conclusive() {
            Status::Inconclusive
        } else {
            Status::Ok
        }
    }

    fn worst(self, other: Status) -> Status {
        // invalid input dominates inconclusive
        match (self, other) {
            (Status::Invalid, _) | (_, Status::Invalid) => Status::Invalid,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Ok,
        }
    }
}

struct Output {
    text: String,
    status: Status,
}

impl Output {
    fn new() -> Self {
        Output { text: String::new(), status: Status::Ok }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn fail(mut self, e: &Error) -> Self {
        self.line(format!("error: {e}"));
        self.status = self.status.worst(Status::of_error(e));
        self
    }
}

struct Job {
    doc: JobDocument,
    profile: Profile,
    module: FilteredModule,
}

fn load(path: &Path, prec: PrecisionFlags) -> Result<Job, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let doc = doc::parse_job(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let profile = doc.profile_with(prec.prec_p, prec.prec_y, prec.prec_u, prec.prec_c)?;
    let module = doc.module.build(&profile)?;
    Ok(Job { doc, profile, module })
}

fn report_lines(out: &mut Output, r: &Report) {
    for c in &r.checks {
        out.line(c.to_string());
    }
}

/// Runs validation and stops at the first failing axiom.
fn require_valid(out: &mut Output, job: &Job) -> bool {
    let r = job.module.validate();
    if let Some(c) = r.first_failure() {
        out.line(format!("invalid module: {c}"));
        out.status = Status::Invalid;
        return false;
    }
    if !r.is_conclusive() {
        out.status = out.status.worst(Status::Inconclusive);
        for c in r.checks.iter().filter(|c| matches!(c.outcome, Outcome::Inconclusive(_))) {
            out.line(format!("warning: {c}"));
        }
    }
    true
}

fn cmd_validate(job: &Job, json_out: bool) -> Output {
    let mut out = Output::new();
    let r = job.module.validate();
    if json_out {
        out.line(serde_json::to_string_pretty(&json!({ "checks": r, "valid": r.all_pass() })).unwrap());
    } else {
        report_lines(&mut out, &r);
        match r.first_failure() {
            Some(c) => out.line(format!("invalid: {} fails", c.name)),
            None if r.all_pass() => out.line("valid"),
            None => out.line("inconclusive"),
        }
    }
    out.status = Status::of_report(&r);
    out
}

fn cmd_hodge(job: &Job, json_out: bool) -> Output {
    let mut out = Output::new();
    if !require_valid(&mut out, job) {
        return out;
    }
    match job.module.hodge_number() {
        Ok(t) if json_out => out.line(json!({ "hodge": t, "modulus": job.profile.modulus_label() }).to_string()),
        Ok(t) => out.line(format!("t_H = {t} {}", job.profile.modulus_label())),
        Err(e) => return out.fail(&e),
    }
    out
}

fn cmd_newton(job: &Job, point: Option<PointArg>, json_out: bool) -> Output {
    let mut out = Output::new();
    if !require_valid(&mut out, job) {
        return out;
    }
    let points: Vec<Point> = match point {
        Some(PointArg::Closed) => vec![Point::Closed],
        Some(PointArg::Generic) => vec![Point::Generic],
        None => vec![Point::Closed, Point::Generic],
    };
    for p in points {
        match job.module.newton_number(p) {
            Ok(t) if json_out => out.line(
                json!({ "point": p.name(), "newton": t.to_string(), "modulus": job.profile.modulus_label() }).to_string(),
            ),
            Ok(t) => out.line(format!("t_N({}) = {t} {}", p.name(), job.profile.modulus_label())),
            Err(e) => return out.fail(&e),
        }
    }
    if point != Some(PointArg::Generic) && !json_out {
        if let Ok(s) = job.module.newton_slopes_closed() {
            let s: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            out.line(format!("slopes({}) = [{}]", Point::Closed.name(), s.join(", ")));
        }
    }
    out
}

impl PartialEq for PointArg {
    fn eq(&self, other: &Self) -> bool {
        matches!((self, other), (PointArg::Closed, PointArg::Closed) | (PointArg::Generic, PointArg::Generic))
    }
}

fn cmd_weakadm(job: &Job, subobjects: Option<&Path>, auto: bool, json_out: bool) -> Output {
    let mut out = Output::new();
    if !require_valid(&mut out, job) {
        return out;
    }
    let docs: Option<Vec<SubobjectDoc>> = match subobjects {
        Some(p) => match fs::read_to_string(p)
            .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
            .and_then(|t| doc::parse_json(&t))
        {
            Ok(d) => Some(d),
            Err(e) => return out.fail(&e),
        },
        None if auto || job.doc.options.auto == Some(true) => None,
        None => job.doc.subobjects.clone(),
    };
    let subs: Option<Vec<Subobject>> = match docs {
        Some(ref d) => match d.iter().map(|s| s.build(&job.profile)).collect::<Result<Vec<_>, _>>() {
            Ok(s) => Some(s),
            Err(e) => return out.fail(&e),
        },
        None => None,
    };
    let mut wa = match job.module.check_punctual_weak_admissibility(subs.as_deref()) {
        Ok(w) => w,
        Err(e) => return out.fail(&e),
    };
    if let Some(d) = &docs {
        for (r, s) in wa.subobjects.iter_mut().zip(d) {
            if let Some(l) = &s.label {
                r.label = l.clone();
            }
        }
    }
    if json_out {
        out.line(serde_json::to_string_pretty(&doc::weak_admissibility_json(&wa)).unwrap());
        return out;
    }
    out.line(format!("mode: {}", wa.mode.name()));
    out.line(format!("t_H = {}, t_N(closed) = {}, t_N(generic) = {}", wa.hodge, wa.newton.closed, wa.newton.generic));
    for s in &wa.subobjects {
        out.line(format!(
            "  {}: t_H = {}, t_N = ({}, {}) {}",
            s.label,
            s.hodge,
            s.newton.closed,
            s.newton.generic,
            if s.holds { "ok" } else { "violates" }
        ));
    }
    if let Some((j, s)) = wa.filtration_bound {
        out.line(format!("  max weight {j} ≤ slope {s}"));
    }
    let verdict = if wa.holds { "punctually weakly admissible" } else { "not punctually weakly admissible" };
    out.line(format!("{verdict} {}", wa.modulus));
    out
}

fn cmd_lattice(job: &Job, json_out: bool) -> Output {
    let mut out = Output::new();
    if !require_valid(&mut out, job) {
        return out;
    }
    let Some(lattices) = &job.doc.lattices else {
        return out.fail(&Error::Parse("the job lists no lattices".into()));
    };
    let mut all = Vec::new();
    for (i, l) in lattices.iter().enumerate() {
        let label = l.label.clone().unwrap_or_else(|| format!("lattice {i}"));
        let rep = l.build(&job.profile).and_then(|lat| match lat {
            Lattice::Closed { basis, fil1 } => job.module.verify_lattice_closed(&basis, fil1.as_ref()),
            Lattice::Generic { basis, fil1 } => job.module.verify_lattice_generic(&basis, fil1.as_ref()),
        });
        match rep {
            Ok(r) => {
                let point = match l.point {
                    doc::PointDoc::Closed => "closed",
                    doc::PointDoc::Generic => "generic",
                };
                if !r.is_conclusive() {
                    out.status = out.status.worst(Status::Inconclusive);
                }
                if json_out {
                    all.push(json!({ "label": label, "point": point, "strongly_divisible": r.all_pass(), "checks": r }));
                } else {
                    out.line(format!("{label} ({point} point):"));
                    for c in &r.checks {
                        out.line(format!("  {c}"));
                    }
                    let v = if r.all_pass() {
                        "strongly divisible"
                    } else if r.any_fail() {
                        "not strongly divisible"
                    } else {
                        "inconclusive"
                    };
                    out.line(format!("  {v}"));
                }
            }
            Err(e) => return out.fail(&e),
        }
    }
    if json_out {
        out.line(serde_json::to_string_pretty(&all).unwrap());
    }
    out
}

fn classification(job: &Job) -> Result<Classification, Error> {
    classify(&job.module)
}

fn cmd_breuil(job: &Job, dest: Option<&Path>) -> Output {
    let mut out = Output::new();
    if !require_valid(&mut out, job) {
        return out;
    }
    let c = match classification(job) {
        Ok(c) => c,
        Err(e) => return out.fail(&e),
    };
    let Some((m, report)) = &c.breuil else {
        let e = Error::UnsupportedShape(format!("no Breuil module is built for a {} module", c.verdict.name()));
        return out.fail(&e);
    };
    let export = serde_json::to_string_pretty(&doc::breuil_to_json(m, report)).unwrap();
    report_lines(&mut out, report);
    out.status = out.status.worst(Status::of_report(report));
    match dest {
        Some(p) => {
            if let Err(e) = fs::write(p, export + "\n") {
                return out.fail(&Error::Parse(format!("{}: {e}", p.display())));
            }
            out.line(format!("wrote {}", p.display()));
        }
        None => out.line(export),
    }
    out
}

fn cmd_bpair_rank(job: &Job, json_out: bool) -> Output {
    let mut out = Output::new();
    if !require_valid(&mut out, job) {
        return out;
    }
    let c = match classification(job) {
        Ok(c) => c,
        Err(e) => return out.fail(&e),
    };
    let Some((f, g)) = &c.generator else {
        let e = Error::UnsupportedShape(format!("V_cris rank needs a rank-1 Fil¹ (module is {})", c.verdict.name()));
        return out.fail(&e);
    };
    let rank = match &c.rank {
        Some(r) => r.clone(),
        None => match vcris_rank(&job.profile, f, g) {
            Ok(r) => r,
            Err(e) => return out.fail(&e),
        },
    };
    if json_out {
        out.line(serde_json::to_string_pretty(&doc::rank_json(&rank)).unwrap());
        return out;
    }
    report_lines(&mut out, &rank.report);
    out.line(format!("rank V_cris = {} {}", rank.rank, job.profile.modulus_label()));
    out
}

fn classify_one(path: &Path, prec: PrecisionFlags, json_out: bool) -> Output {
    let mut out = Output::new();
    let job = match load(path, prec) {
        Ok(j) => j,
        Err(e) => return out.fail(&e),
    };
    let c = match classification(&job) {
        Ok(c) => c,
        Err(e) => return out.fail(&e),
    };
    if json_out {
        let mut v = doc::classification_to_json(&c);
        v["file"] = json!(path.display().to_string());
        out.line(serde_json::to_string_pretty(&v).unwrap());
        return out;
    }
    out.line(format!("t_H = {}, t_N = ({}, {})", c.hodge, c.newton.closed, c.newton.generic));
    if let Some(r) = &c.rank {
        let d = r.weierstrass_degree.map_or("∞".to_string(), |d| d.to_string());
        out.line(format!("Weierstrass degree of f = {d}, rank V_cris = {}", r.rank));
    }
    if let Some((_, rep)) = &c.breuil {
        let v = if rep.all_pass() { "verified" } else { "not verified" };
        out.line(format!("Breuil module {v}"));
        out.status = out.status.worst(Status::of_report(rep));
    }
    out.line(format!("{} {}", c.verdict.name(), c.modulus));
    out
}

fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Error> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn cmd_classify(paths: &[PathBuf], jobs: usize, prec: PrecisionFlags, json_out: bool) -> Output {
    let files = match expand(paths) {
        Ok(f) => f,
        Err(e) => return Output::new().fail(&e),
    };
    if files.len() == 1 && !paths[0].is_dir() {
        return classify_one(&files[0], prec, json_out);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => return Output::new().fail(&Error::Parse(e.to_string())),
    };
    let results: Vec<Output> = pool.install(|| files.par_iter().map(|f| classify_one(f, prec, json_out)).collect());
    let mut out = Output::new();
    for (f, r) in files.iter().zip(results) {
        if !json_out {
            out.line(format!("== {}", f.display()));
        }
        out.text.push_str(&r.text);
        out.status = out.status.worst(r.status);
    }
    out
}

fn run(cli: Cli) -> Output {
    let prec = cli.prec;
    let with_job = |file: &Path, f: &dyn Fn(&Job) -> Output| match load(file, prec) {
        Ok(job) => f(&job),
        Err(e) => Output::new().fail(&e),
    };
    let json_out = cli.json;
    match &cli.command {
        Command::Validate { file } => with_job(file, &|j| cmd_validate(j, json_out)),
        Command::Hodge { file } => with_job(file, &|j| cmd_hodge(j, json_out)),
        Command::Newton { file, point } => with_job(file, &|j| cmd_newton(j, *point, json_out)),
        Command::Weakadm { file, subobjects, auto } => {
            with_job(file, &|j| cmd_weakadm(j, subobjects.as_deref(), *auto, json_out))
        }
        Command::Lattice { file } => with_job(file, &|j| cmd_lattice(j, json_out)),
        Command::Breuil { file, out } => with_job(file, &|j| cmd_breuil(j, out.as_deref())),
        Command::BpairRank { file } => with_job(file, &|j| cmd_bpair_rank(j, json_out)),
        Command::Classify { paths, jobs } => cmd_classify(paths, *jobs, prec, json_out),
    }
}

fn main() -> ExitCode {
    let out = run(Cli::parse());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.text.as_bytes());
    ExitCode::from(out.status as u8)
}
