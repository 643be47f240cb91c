use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use diffset::analysis::{self, mann_test};
use diffset::search::{self, ScanRow, ScanStatus, SearchResult, SearchSpec};
use diffset::setfile::{profile_check, profile_checks_all, SetFile, SetReport};
use diffset::singer::{self, COSET_CONVENTION};
use diffset::{AbelianGroup, DifferenceSet, Resources, Status, TheoremReport};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "diffset",
    version,
    about = "Construct, verify and analyse abelian difference sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, env = "DIFFSET_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Largest field order built and largest k² fully verified (e.g. 268435456 or 2^28).
    #[arg(long, global = true, value_parser = parse_size, default_value = "2^28")]
    ceiling: u64,
    /// Leave wall-clock times out of reports.
    #[arg(long, global = true)]
    no_timestamps: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a Singer set from GF(q^d), or the d = 4 set over GF(q^s) with --s.
    Construct {
        #[command(flatten)]
        source: Source,
        /// Set file to write (default: singer-q<q>-d<d>.set or singer-q<q>-s<s>.set).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fully verify a set file.
    Verify {
        #[arg(long)]
        set: PathBuf,
    },
    /// Intersection numbers and bounds for the subgroups of a given order.
    Profile {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        subgroup_order: u64,
    },
    /// The Mann test relative to the subgroups of a given order.
    Mann {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        subgroup_order: u64,
    },
    /// Run one theorem checker on a concrete instance.
    Check {
        theorem: TheoremId,
        #[command(flatten)]
        args: CheckArgs,
    },
    /// Exhaustive search, pruned to unions of multiplier orbits.
    Search(SearchArgs),
    /// Look for embedded minimal sets in the d = 4 Singer sets over GF(q^s).
    Scan {
        #[arg(long)]
        q: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<u32>,
    },
}

#[derive(Args, Debug, Clone)]
struct Source {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, conflicts_with = "s")]
    d: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    /// Read the set from a file instead of constructing it.
    #[arg(long, conflicts_with_all = ["q", "d", "s"])]
    set: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CheckArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    a: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    /// Group descriptor such as "Z_3 x Z_195" (lem4.1 only).
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    set: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    /// Group descriptor; defaults to Z_v.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    v: Option<u64>,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    lambda: u64,
    /// Multiplier m: search unions of orbits of x -> m x.
    #[arg(long, default_value_t = 1)]
    m: u64,
    /// Node budget (orbit search) or subset budget (brute force).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    max_results: Option<usize>,
    /// Test every k-subset instead of orbit unions.
    #[arg(long)]
    brute: bool,
    /// Directory for one set file per class plus summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TheoremId {
    #[value(name = "thm2.2")]
    ClassicalProfile,
    #[value(name = "lem4.1")]
    FixedPoints,
    #[value(name = "lem4.2")]
    RestrictionSize,
    #[value(name = "thm4.3")]
    Main,
    #[value(name = "thm5.1")]
    DistinguishedCoset,
    #[value(name = "cor5.2")]
    EvenSplit,
    #[value(name = "thm6.1")]
    MinimalEmbedding,
    #[value(name = "jv")]
    PlanarSubset,
    #[value(name = "ho")]
    PlanarContainment,
    #[value(name = "thm3.1")]
    TraceContainment,
    #[value(name = "cor3.2")]
    SingerRestriction,
    #[value(name = "hall")]
    Hall,
}

/// Accepts `N` or `B^E`.
fn parse_size(s: &str) -> Result<u64, String> {
    let bad = || format!("expected an integer or B^E, found {s:?}");
    match s.split_once('^') {
        Some((b, e)) => {
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            b.checked_pow(e).ok_or_else(|| format!("{s} overflows"))
        }
        None => s.trim().replace('_', "").parse().map_err(|_| bad()),
    }
}

struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

struct Ctx {
    json: bool,
    res: Resources,
    timestamps: bool,
}

/// Writes to stdout, tolerating a closed pipe.
fn write_out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

impl Ctx {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
        if self.json {
            write_out(&(serde_json::to_string_pretty(value)? + "\n"));
        } else {
            write_out(&text());
        }
        Ok(())
    }
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Verified => EXIT_OK,
        Status::HypothesisNotMet => EXIT_HYPOTHESIS,
        Status::Falsified => EXIT_FAILED,
    }
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure(format!("this command needs --{flag}")))
}

/// A set to analyse, with what is known about how it was obtained.
struct Loaded {
    set: DifferenceSet,
    field_descriptor: Option<String>,
    notes: Vec<String>,
}

fn verify_if_allowed(
    d: &mut DifferenceSet,
    res: &Resources,
    notes: &mut Vec<String>,
) -> Result<(), Failure> {
    let p = d.params();
    if d.is_verified() {
        return Ok(());
    }
    if res.allows_full_verification(p.v, p.k) {
        if !d.verify(res.workers)?.verified {
            return Err(Failure(format!("input is not a {} difference set", p)));
        }
    } else {
        notes.push(format!(
            "full verification skipped: k² = {} exceeds the ceiling {}",
            p.k as u128 * p.k as u128,
            res.ceiling
        ));
    }
    Ok(())
}

fn read_set(path: &Path) -> Result<SetFile, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    SetFile::parse(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load(src: &Source, res: &Resources) -> Result<Loaded, Failure> {
    let mut notes = Vec::new();
    if let Some(path) = &src.set {
        let mut set = read_set(path)?.to_candidate()?;
        verify_if_allowed(&mut set, res, &mut notes)?;
        return Ok(Loaded {
            set,
            field_descriptor: None,
            notes,
        });
    }
    let q = need(src.q, "q")?;
    let built = match (src.d, src.s) {
        (_, Some(s)) => singer::singer_construct_streamed(q, s, res)?,
        (Some(d), None) => singer::singer_construct(q, d, res)?,
        (None, None) => return Err(Failure("give --d, --s or --set".into())),
    };
    notes.push(COSET_CONVENTION.to_string());
    if !built.set.is_verified() {
        let k = built.set.params().k;
        notes.push(format!(
            "full verification skipped: k² = {} exceeds the ceiling {}",
            k as u128 * k as u128,
            res.ceiling
        ));
    }
    Ok(Loaded {
        set: built.set,
        field_descriptor: Some(built.spec.field_descriptor),
        notes,
    })
}

fn set_report(loaded: &Loaded) -> SetReport {
    let d = &loaded.set;
    let mut r = SetReport::new(d, None);
    r.verified = d.is_verified();
    r.lambda_observed = d.is_verified().then(|| d.params().lambda);
    r.field_descriptor = loaded.field_descriptor.clone();
    r.notes = loaded.notes.clone();
    r
}

fn construct(ctx: &Ctx, source: &Source, out: Option<&Path>) -> Outcome {
    if source.set.is_some() {
        return Err(Failure(
            "construct builds a set; --set is not accepted".into(),
        ));
    }
    let loaded = load(source, &ctx.res)?;
    let q = need(source.q, "q")?;
    let path = match (out, source.s) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(s)) => PathBuf::from(format!("singer-q{q}-s{s}.set")),
        (None, None) => PathBuf::from(format!("singer-q{q}-d{}.set", source.d.unwrap_or(0))),
    };
    std::fs::write(&path, SetFile::from_set(&loaded.set).render())
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let mut report = set_report(&loaded);
    if let Some(checks) = profile_checks_all(&loaded.set)? {
        report.profile_checks = checks;
    } else {
        report
            .notes
            .push("group too large to profile every subgroup".into());
    }
    report.notes.push(format!("set file: {}", path.display()));
    ctx.emit(&report, || report.render_text())?;
    let profiles_ok = report.profile_checks.iter().all(|c| c.ok());
    Ok(if profiles_ok { EXIT_OK } else { EXIT_FAILED })
}

fn verify(ctx: &Ctx, path: &Path) -> Outcome {
    let file = read_set(path)?;
    let mut d = file.to_candidate()?;
    let p = d.params();
    if !ctx.res.allows_full_verification(p.v, p.k) {
        return Err(Failure(format!(
            "k² = {} exceeds the ceiling {}; raise --ceiling to verify",
            p.k as u128 * p.k as u128,
            ctx.res.ceiling
        )));
    }
    let v = d.verify(ctx.res.workers)?;
    let report = SetReport::new(&d, Some(&v));
    ctx.emit(&report, || report.render_text())?;
    Ok(if v.verified { EXIT_OK } else { EXIT_FAILED })
}

fn profile(ctx: &Ctx, source: &Source, order: u64) -> Outcome {
    let loaded = load(source, &ctx.res)?;
    let mut report = set_report(&loaded);
    for h in loaded.set.group().subgroups_of_order(order)? {
        report.profile_checks.push(profile_check(&loaded.set, &h));
    }
    ctx.emit(&report, || report.render_text())?;
    let ok = report.profile_checks.iter().all(|c| c.ok());
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn emit_reports(ctx: &Ctx, reports: &[TheoremReport]) -> Outcome {
    if ctx.json {
        let value = if let [single] = reports {
            serde_json::to_value(single)?
        } else {
            serde_json::to_value(reports)?
        };
        write_out(&(serde_json::to_string_pretty(&value)? + "\n"));
    } else {
        let texts: Vec<String> = reports.iter().map(TheoremReport::render_text).collect();
        write_out(&texts.join("\n"));
    }
    Ok(reports
        .iter()
        .map(|r| status_code(r.status))
        .max()
        .unwrap_or(EXIT_OK))
}

fn decorate(mut r: TheoremReport, loaded: &Loaded) -> TheoremReport {
    if r.field_descriptor.is_none() {
        r.field_descriptor = loaded.field_descriptor.clone();
    }
    r.notes.extend(loaded.notes.iter().cloned());
    r
}

fn mann(ctx: &Ctx, source: &Source, order: u64) -> Outcome {
    let loaded = load(source, &ctx.res)?;
    let d = &loaded.set;
    let mut reports = Vec::new();
    for u in d.group().subgroups_of_order(order)? {
        reports.push(decorate(mann_test(d, &u)?.to_theorem_report(d), &loaded));
    }
    emit_reports(ctx, &reports)
}

fn check(ctx: &Ctx, id: TheoremId, a: &CheckArgs) -> Outcome {
    let res = &ctx.res;
    let tower = |a: &CheckArgs| -> Result<Loaded, Failure> {
        load(
            &Source {
                q: a.q,
                d: None,
                s: Some(need(a.s, "s")?),
                set: a.set.clone(),
            },
            res,
        )
    };
    let from_file = |a: &CheckArgs| {
        a.set.clone().map(|set| Source {
            q: None,
            d: None,
            s: None,
            set: Some(set),
        })
    };
    let report = match id {
        TheoremId::ClassicalProfile => {
            let l = tower(a)?;
            decorate(
                analysis::check_thm_classical_profile(&l.set, need(a.q, "q")?, need(a.s, "s")?)?,
                &l,
            )
        }
        TheoremId::FixedPoints => {
            let (q, s) = (need(a.q, "q")?, need(a.s, "s")?);
            let group = match &a.group {
                Some(g) => g.parse::<AbelianGroup>()?,
                None => {
                    let v =
                        diffset::Params::classical(q.checked_pow(s).ok_or("q^s overflows")?, 4)?.v;
                    AbelianGroup::cyclic(v)?
                }
            };
            analysis::check_lemma_mfix(&group, q, s)?
        }
        TheoremId::RestrictionSize => {
            let l = tower(a)?;
            decorate(
                analysis::check_lemma_size(&l.set, need(a.q, "q")?, need(a.s, "s")?)?,
                &l,
            )
        }
        TheoremId::Main => {
            let l = tower(a)?;
            decorate(
                analysis::check_main(&l.set, need(a.q, "q")?, need(a.s, "s")?, res)?,
                &l,
            )
        }
        TheoremId::DistinguishedCoset => {
            let q = need(a.q, "q")?;
            let src = from_file(a).unwrap_or(Source {
                q: Some(q),
                d: Some(4),
                s: None,
                set: None,
            });
            let l = load(&src, res)?;
            decorate(analysis::check_dintk(&l.set, q)?, &l)
        }
        TheoremId::EvenSplit => {
            let l = tower(a)?;
            decorate(
                analysis::check_hk(&l.set, need(a.q, "q")?, need(a.s, "s")?)?,
                &l,
            )
        }
        TheoremId::MinimalEmbedding => {
            let src = from_file(a).unwrap_or(Source {
                q: Some(a.q.unwrap_or(2)),
                d: None,
                s: Some(need(a.s, "s")?),
                set: None,
            });
            if src.q != Some(2) && src.set.is_none() {
                return Err(Failure("thm6.1 concerns q = 2".into()));
            }
            let l = load(&src, res)?;
            decorate(analysis::check_minimal_embedding(&l.set, res)?, &l)
        }
        TheoremId::PlanarSubset => {
            let m = need(a.m, "m")?;
            let src = from_file(a).unwrap_or(Source {
                q: Some(m * m),
                d: Some(3),
                s: None,
                set: None,
            });
            let l = load(&src, res)?;
            decorate(analysis::check_planar_subset(&l.set, m, res)?, &l)
        }
        TheoremId::PlanarContainment => {
            let (m, s) = (need(a.m, "m")?, need(a.s, "s")?);
            let order = m.checked_pow(s).ok_or("m^s overflows")?;
            let src = from_file(a).unwrap_or(Source {
                q: Some(order),
                d: Some(3),
                s: None,
                set: None,
            });
            let l = load(&src, res)?;
            decorate(analysis::check_ho(&l.set, m, s, res)?, &l)
        }
        TheoremId::TraceContainment => singer::containment_theorem_report(
            need(a.q, "q")?,
            need(a.a, "a")?,
            need(a.b, "b")?,
            res,
        )?,
        TheoremId::SingerRestriction => {
            singer::singer_restriction_check(need(a.q, "q")?, need(a.s, "s")?, res)?
        }
        TheoremId::Hall => {
            let src = from_file(a).unwrap_or(Source {
                q: a.q,
                d: a.d,
                s: a.s,
                set: None,
            });
            let l = load(&src, res)?;
            decorate(analysis::hall_check(&l.set)?, &l)
        }
    };
    emit_reports(ctx, &[report])
}

fn search_text(r: &SearchResult) -> String {
    let p = r.spec.params;
    let mut out = format!(
        "spec: group={} v={} k={} lambda={} m={}\n",
        r.spec.group, p.v, p.k, p.lambda, r.spec.multiplier
    );
    out += &format!(
        "sets: {}\nclasses: {}\nnodes: {}\ncomplete: {}\n",
        r.sets.len(),
        r.classes,
        r.nodes,
        r.complete
    );
    if let Some(sec) = r.seconds {
        out += &format!("seconds: {sec:.3}\n");
    }
    for rep in &r.representatives {
        out += &format!("class: {}\n", diffset::report::set_string(rep));
    }
    for s in &r.sets {
        out += &format!("set: {}\n", diffset::report::set_string(s));
    }
    out
}

fn search(ctx: &Ctx, a: &SearchArgs) -> Outcome {
    let group = match (&a.group, a.v) {
        (Some(g), _) => g.parse::<AbelianGroup>()?,
        (None, Some(v)) => AbelianGroup::cyclic(v)?,
        (None, None) => return Err(Failure("give --group or --v".into())),
    };
    if let Some(v) = a.v {
        if v != group.order() {
            return Err(Failure(format!(
                "--v {v} does not match the group order {}",
                group.order()
            )));
        }
    }
    let mut result = if a.brute {
        let mut r =
            search::brute_force_search(&group, a.k, a.lambda, a.budget.unwrap_or(10_000_000))?;
        if a.m != 1 {
            let spec = SearchSpec {
                multiplier: a.m,
                ..r.spec.clone()
            };
            let fixed: Vec<Vec<u64>> = r
                .sets
                .iter()
                .filter(|s| {
                    let mut img: Vec<u64> = s.iter().map(|&x| group.scale(x, a.m)).collect();
                    img.sort_unstable();
                    &img == *s
                })
                .cloned()
                .collect();
            let reps: std::collections::BTreeSet<Vec<u64>> = fixed
                .iter()
                .map(|s| search::canonical_form(&group, s))
                .collect();
            r = SearchResult {
                spec,
                classes: reps.len(),
                representatives: reps.into_iter().collect(),
                sets: fixed,
                ..r
            };
        }
        r
    } else {
        let mut spec = SearchSpec::new(group.clone(), a.k, a.lambda, a.m)?;
        spec.budget = a.budget;
        spec.max_results = a.max_results;
        search::orbit_union_search(&spec, ctx.res.workers)?
    };
    if !ctx.timestamps {
        result.seconds = None;
    }
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| Failure(format!("{}: {e}", dir.display())))?;
        for (i, rep) in result.representatives.iter().enumerate() {
            let file = SetFile {
                group: group.clone(),
                params: result.spec.params,
                elements: rep.clone(),
            };
            let path = dir.join(format!("class-{i:03}.set"));
            std::fs::write(&path, file.render())
                .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        }
        let path = dir.join("summary.json");
        std::fs::write(&path, serde_json::to_string_pretty(&result)? + "\n")
            .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    }
    ctx.emit(&result, || search_text(&result))?;
    if !result.complete {
        eprintln!("warning: budget exhausted; results are partial");
        return Ok(EXIT_ERROR);
    }
    Ok(EXIT_OK)
}

fn scan_text(rows: &[ScanRow]) -> String {
    let mut out = String::from("q\ts\tv\tstatus\tq'\t|S|\n");
    for r in rows {
        let opt = |x: Option<u64>| x.map_or("-".to_string(), |x| x.to_string());
        out += &format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.q,
            r.s,
            r.v,
            r.status.as_str(),
            opt(r.minimal_q),
            opt(r.subgroup_order)
        );
        if let Some(m) = &r.message {
            out += &format!("# s={}: {m}\n", r.s);
        }
    }
    out
}

fn scan(ctx: &Ctx, q: u64, s: &[u32]) -> Outcome {
    let rows = search::conjecture_scan(q, s, &ctx.res)?;
    ctx.emit(&rows, || scan_text(&rows))?;
    Ok(if rows.iter().any(|r| r.status == ScanStatus::Error) {
        EXIT_ERROR
    } else if rows.iter().any(|r| r.status == ScanStatus::NotFound) {
        EXIT_FAILED
    } else {
        EXIT_OK
    })
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        json: cli.json,
        res: Resources::new(cli.ceiling, cli.workers),
        timestamps: !cli.no_timestamps,
    };
    match &cli.command {
        Command::Construct { source, out } => construct(&ctx, source, out.as_deref()),
        Command::Verify { set } => verify(&ctx, set),
        Command::Profile {
            source,
            subgroup_order,
        } => profile(&ctx, source, *subgroup_order),
        Command::Mann {
            source,
            subgroup_order,
        } => mann(&ctx, source, *subgroup_order),
        Command::Check { theorem, args } => check(&ctx, *theorem, args),
        Command::Search(args) => search(&ctx, args),
        Command::Scan { q, s } => scan(&ctx, *q, s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
