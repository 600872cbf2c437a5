//! Batch front end: parse input files, run one pipeline verb, report as JSON.

pub mod svg;

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use tangleforge::equiv::moves::{self, GenMap, Mode};
use tangleforge::equiv::{simplify, Presentation, DEFAULT_BUDGET};
use tangleforge::folding::FoldGraph;
use tangleforge::{realize, Diagram, FreeTargetHom, Generator, SplittingTuple, Verdict, Word};

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Random fold orders tried by `fold` when checking confluence.
const FOLD_ORDERS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Verify,
    Realize,
    Readoff,
    Roundtrip,
    Fold,
    Pushout,
    Invariants,
    Move,
    Render,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MoveKind {
    /// Heegaard stabilization.
    S,
    /// Genus stabilization (one handle for pairs, three for triples).
    Sg,
    /// Pair perturbation; `--side` picks the side.
    Sb1,
    /// Triple perturbation, shared endpoint.
    Sb2,
    /// Triple perturbation, unshared endpoint.
    Sb3,
    /// Cyclic rotation of a triple.
    C,
    /// Target automorphism on hom `--pair i`.
    H,
    /// Surface automorphism.
    M,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Shared,
    Unshared,
}

#[derive(Parser, Debug)]
#[command(name = "tangleforge", about = "Bounding homomorphisms, diagrams and splitting tuples")]
pub struct Command {
    pub verb: Verb,
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Tietze step budget.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// 1-based indices `i,j`; a single `i` for `--kind h`.
    #[arg(long)]
    pub pair: Option<String>,
    #[arg(long, value_enum)]
    pub kind: Option<MoveKind>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub side: Option<u8>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub color: Option<u8>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Unknown,
    Fail,
}

impl Status {
    fn worst(self, other: Status) -> Status {
        self.max(other)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
}

impl Report {
    fn new(status: Status, payload: Value) -> Self {
        Report { status, payload, diagnostics: Vec::new() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad argv or unreadable/ill-formed input: exit 2.
    #[error("{0}")]
    Usage(String),
    /// The operation ran and refused: exit 1.
    #[error("{0}")]
    Semantic(String),
}

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn semantic(msg: impl fmt::Display) -> CliError {
    CliError::Semantic(msg.to_string())
}

/// Runs one invocation. The exit code is 0 ok, 1 fail, 2 usage or parse error, 3 unknown.
pub fn run<I, S>(argv: I) -> (i32, Report)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cmd = match Command::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let kind = e.kind();
            let text = e.render().to_string();
            if matches!(kind, clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                let mut r = Report::new(Status::Ok, Value::Null);
                r.diagnostics.push(text);
                return (0, r);
            }
            return error_report(usage(text.trim_end()));
        }
    };
    match dispatch(&cmd) {
        Ok(r) => {
            let code = match r.status {
                Status::Ok => 0,
                Status::Fail => 1,
                Status::Unknown => 3,
            };
            (code, r)
        }
        Err(e) => error_report(e),
    }
}

fn error_report(e: CliError) -> (i32, Report) {
    let code = match e {
        CliError::Usage(_) => 2,
        CliError::Semantic(_) => 1,
    };
    let mut r = Report::new(Status::Fail, Value::Null);
    r.diagnostics.push(e.to_string());
    (code, r)
}

fn dispatch(cmd: &Command) -> Result<Report, CliError> {
    let single = || -> Result<&Path, CliError> {
        match cmd.inputs.as_slice() {
            [p] => Ok(p),
            _ => Err(usage(format!("{:?} takes exactly one input", cmd.verb).to_lowercase())),
        }
    };
    match cmd.verb {
        Verb::Verify => verify_all(cmd),
        Verb::Invariants => invariants_all(cmd),
        Verb::Realize => realize_cmd(cmd, single()?),
        Verb::Readoff => readoff_cmd(cmd, single()?),
        Verb::Roundtrip => roundtrip_cmd(single()?),
        Verb::Fold => fold_cmd(cmd, single()?),
        Verb::Pushout => pushout_cmd(cmd, single()?),
        Verb::Move => move_cmd(cmd),
        Verb::Render => render_cmd(cmd, single()?),
    }
}

// ---- inputs ----

enum Input {
    Hom(FreeTargetHom),
    Tuple(SplittingTuple),
    Diagram(Diagram),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn first_content_line(text: &str) -> &str {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("")
}

fn load(path: &Path) -> Result<Input, CliError> {
    let text = read(path)?;
    let at = |e: &dyn fmt::Display| usage(format!("{}: {e}", path.display()));
    let head = first_content_line(&text);
    if head.starts_with('{') {
        Diagram::from_json(&text).map(Input::Diagram).map_err(|e| at(&e))
    } else if head.starts_with("flavor") {
        text.parse().map(Input::Tuple).map_err(|e: tangleforge::TupleError| at(&e))
    } else {
        text.parse().map(Input::Hom).map_err(|e: tangleforge::SurfaceError| at(&e))
    }
}

fn load_hom(path: &Path) -> Result<FreeTargetHom, CliError> {
    match load(path)? {
        Input::Hom(h) => Ok(h),
        _ => Err(usage(format!("{}: expected a homomorphism file", path.display()))),
    }
}

fn load_tuple(path: &Path) -> Result<SplittingTuple, CliError> {
    match load(path)? {
        Input::Tuple(t) => Ok(t),
        _ => Err(usage(format!("{}: expected a tuple file", path.display()))),
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// `i,j` as 0-based indices.
fn parse_pair(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || usage(format!("--pair expects `i,j`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a - 1, b - 1))
}

fn parse_index(s: &str) -> Result<usize, CliError> {
    let bad = || usage(format!("--pair expects a 1-based index, got `{s}`"));
    let i: usize = s.trim().parse().map_err(|_| bad())?;
    i.checked_sub(1).ok_or_else(bad)
}

// ---- verify / invariants (fan out over inputs) ----

fn fan_out(cmd: &Command, f: fn(&Command, &Path) -> Result<Report, CliError>) -> Result<Report, CliError> {
    if let [p] = cmd.inputs.as_slice() {
        return f(cmd, p);
    }
    let results: Vec<Result<Report, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = cmd.inputs.iter().map(|p| s.spawn(move || f(cmd, p))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut status = Status::Ok;
    let mut payload = Vec::new();
    let mut diagnostics = Vec::new();
    for (p, r) in cmd.inputs.iter().zip(results) {
        let r = r?;
        status = status.worst(r.status);
        diagnostics.extend(r.diagnostics.into_iter().map(|d| format!("{}: {d}", p.display())));
        payload.push(json!({ "input": p.display().to_string(), "result": r.payload }));
    }
    Ok(Report { status, payload: Value::Array(payload), diagnostics })
}

fn verify_all(cmd: &Command) -> Result<Report, CliError> {
    fan_out(cmd, verify_one)
}

fn invariants_all(cmd: &Command) -> Result<Report, CliError> {
    fan_out(cmd, invariants_one)
}

fn bounding_json(hom: &FreeTargetHom) -> Result<(bool, Value, Vec<String>), CliError> {
    let rep = hom.verify_bounding().map_err(semantic)?;
    let f: serde_json::Map<String, Value> = rep.f.iter().map(|(p, l)| (p.to_string(), json!(l.to_string()))).collect();
    let conj: serde_json::Map<String, Value> =
        rep.conjugators.iter().map(|(p, w)| (p.to_string(), json!(w.to_string()))).collect();
    let pairs: Vec<[u32; 2]> = rep.strand_pairs().into_iter().map(|(i, j)| [i, j]).collect();
    let v = json!({
        "genus": hom.sig().genus,
        "bridges": hom.sig().bridges,
        "bounding": rep.ok,
        "conditions": { "surjective": rep.surjective, "cond1": rep.cond1, "cond2": rep.cond2 },
        "f": f,
        "conjugators": conj,
        "strand_pairs": pairs,
    });
    Ok((rep.ok, v, rep.failures))
}

fn verify_one(cmd: &Command, path: &Path) -> Result<Report, CliError> {
    match load(path)? {
        Input::Hom(h) => {
            let (ok, v, failures) = bounding_json(&h)?;
            let mut r = Report::new(if ok { Status::Ok } else { Status::Fail }, v);
            r.diagnostics = failures;
            Ok(r)
        }
        Input::Tuple(t) => {
            let verdict = t.verify_membership(cmd.budget).map_err(semantic)?;
            let status = match verdict.value {
                Verdict::Holds => Status::Ok,
                Verdict::Fails => Status::Fail,
                Verdict::Unknown => Status::Unknown,
            };
            let mut r = Report::new(
                status,
                json!({
                    "flavor": t.flavor().to_string(),
                    "genus": t.sig().genus,
                    "bridges": t.sig().bridges,
                    "verdict": verdict.value.as_str(),
                    "evidence": verdict.evidence,
                }),
            );
            if verdict.value != Verdict::Holds {
                r.diagnostics = verdict.evidence;
            }
            Ok(r)
        }
        Input::Diagram(_) => Err(usage(format!("{}: verify takes a homomorphism or tuple file", path.display()))),
    }
}

fn invariants_one(_: &Command, path: &Path) -> Result<Report, CliError> {
    let t = load_tuple(path)?;
    let sig = t.sig();
    let mut v = json!({
        "flavor": t.flavor().to_string(),
        "genus": sig.genus,
        "bridges": sig.bridges,
    });
    let mut r = Report::new(Status::Ok, Value::Null);
    if sig.bridges == 0 {
        r.diagnostics.push("no bridges: link invariants are not defined".into());
    } else if t.arity() == 2 {
        v["components"] = json!(t.link_components(0, 1).map_err(semantic)?);
    } else {
        let [c12, c23, c31] = t.sector_components().map_err(semantic)?;
        v["components"] = json!({ "12": c12, "23": c23, "31": c31 });
        v["euler_characteristic"] = json!(t.euler_characteristic().map_err(semantic)?);
        v["surface_components"] = json!(t.surface_components().map_err(semantic)?);
        v["spherical"] = json!(t.is_spherical().map_err(semantic)?);
    }
    r.payload = v;
    Ok(r)
}

// ---- diagrams ----

fn census_json(d: &Diagram) -> Value {
    let c = d.component_census();
    let ends: Vec<[u32; 2]> = {
        let mut e: Vec<(u32, u32)> = c.endpoints.values().flatten().copied().collect();
        e.sort_unstable();
        e.into_iter().map(|(i, j)| [i, j]).collect()
    };
    json!({ "closed": c.closed_total(), "arcs": c.arc_total(), "endpoints": ends })
}

fn realize_cmd(cmd: &Command, path: &Path) -> Result<Report, CliError> {
    let hom = load_hom(path)?;
    let res = realize(&hom).map_err(semantic)?;
    let text = res.diagram.to_json();
    if let Some(out) = &cmd.out {
        write(out, &text)?;
    }
    if let Some(p) = &cmd.svg {
        write(p, &svg::render(&res.diagram))?;
    }
    let diagram: Value = serde_json::from_str(&text).expect("diagram JSON is valid");
    Ok(Report::new(
        Status::Ok,
        json!({
            "census": census_json(&res.diagram),
            "band_count": res.band_count,
            "cut_system": res.diagram.is_cut_system().map_err(semantic)?,
            "diagram": diagram,
        }),
    ))
}

fn readoff_cmd(cmd: &Command, path: &Path) -> Result<Report, CliError> {
    let d = match load(path)? {
        Input::Diagram(d) => d,
        _ => return Err(usage(format!("{}: readoff takes a diagram JSON file", path.display()))),
    };
    let hom = d.read_off().map_err(semantic)?;
    let text = hom.to_string();
    if let Some(out) = &cmd.out {
        write(out, &text)?;
    }
    Ok(Report::new(Status::Ok, json!({ "hom": text })))
}

fn roundtrip_cmd(path: &Path) -> Result<Report, CliError> {
    let hom = load_hom(path)?;
    let res = realize(&hom).map_err(semantic)?;
    let back = res.diagram.read_off().map_err(semantic)?;
    let equal = back == hom;
    let mut r = Report::new(
        if equal { Status::Ok } else { Status::Fail },
        json!({ "equal": equal, "census": census_json(&res.diagram), "hom": back.to_string() }),
    );
    r.diagnostics.push(if equal { "readoff equals input".into() } else { "readoff differs from input".into() });
    Ok(r)
}

fn render_cmd(cmd: &Command, path: &Path) -> Result<Report, CliError> {
    let d = match load(path)? {
        Input::Diagram(d) => d,
        Input::Hom(h) => realize(&h).map_err(semantic)?.diagram,
        Input::Tuple(_) => return Err(usage(format!("{}: render takes a diagram or homomorphism", path.display()))),
    };
    d.validate().map_err(semantic)?;
    let text = svg::render(&d);
    let dest = cmd.svg.as_ref().or(cmd.out.as_ref());
    let payload = match dest {
        Some(p) => {
            write(p, &text)?;
            json!({ "svg": p.display().to_string() })
        }
        None => json!({ "svg": text }),
    };
    Ok(Report::new(Status::Ok, payload))
}

// ---- folding ----

/// A homomorphism folds its images on the target basis; any other file is one word per line.
fn fold_cmd(cmd: &Command, path: &Path) -> Result<Report, CliError> {
    let text = read(path)?;
    let (words, basis): (Vec<Word>, BTreeSet<Generator>) = match load(path) {
        Ok(Input::Hom(h)) => (h.images().values().cloned().collect(), h.sig().target_basis()),
        _ => {
            let mut ws = Vec::new();
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let w: Word = line.parse().map_err(|e| usage(format!("{}:{}: {e}", path.display(), n + 1)))?;
                ws.push(w);
            }
            let basis = ws.iter().flat_map(Word::generators).collect();
            (ws, basis)
        }
    };
    let words: Vec<Word> = words.into_iter().filter(|w| !w.is_empty()).collect();
    let start = FoldGraph::wedge_from_words(&words).map_err(semantic)?;
    let mut g = start.clone();
    let trace = g.fold_to_core();
    let canon = g.canonical_form();
    let mut rng = ChaCha8Rng::seed_from_u64(cmd.seed);
    let confluent = (0..FOLD_ORDERS).all(|_| {
        let mut h = start.clone();
        h.fold_to_core_random(&mut rng);
        h.canonical_form() == canon
    });
    let rose = g.is_rose_on(&basis);
    let steps: Vec<Value> = trace
        .iter()
        .map(|f| json!({ "kind": format!("{:?}", f.kind), "edges": [f.edges.0, f.edges.1], "survivor": f.survivor }))
        .collect();
    let mut r = Report::new(
        if rose { Status::Ok } else { Status::Fail },
        json!({
            "rose": rose,
            "basis": basis.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "confluent": confluent,
            "seed": cmd.seed,
            "trace": steps,
        }),
    );
    if !rose {
        r.diagnostics.push("core graph is not the rose on the basis".into());
    }
    Ok(r)
}

// ---- pushouts ----

fn presentation_json(p: &Presentation, budget: usize) -> Value {
    let s = simplify(p, budget);
    json!({
        "presentation": p.to_string(),
        "abelianization": p.abelianization().to_string(),
        "simplified": s.presentation.to_string(),
        "simplified_abelianization": s.presentation.abelianization().to_string(),
        "steps": s.steps,
        "exhausted": s.exhausted,
        "free": s.presentation.is_free(),
    })
}

fn pushout_cmd(cmd: &Command, path: &Path) -> Result<Report, CliError> {
    let t = load_tuple(path)?;
    let (which, p) = match &cmd.pair {
        Some(s) => {
            let (i, j) = parse_pair(s)?;
            (format!("{},{}", i + 1, j + 1), t.pushout_pair(i, j).map_err(semantic)?)
        }
        None if t.arity() == 2 => ("1,2".to_string(), t.pushout_pair(0, 1).map_err(semantic)?),
        None => ("all".to_string(), t.pushout_tuple().map_err(semantic)?),
    };
    let mut v = presentation_json(&p, cmd.budget);
    v["homs"] = json!(which);
    Ok(Report::new(Status::Ok, v))
}

// ---- moves ----

/// `[forward]` and `[inverse]` sections, each a generator map.
fn load_automorphism(path: &Path) -> Result<(GenMap, GenMap), CliError> {
    let text = read(path)?;
    let mut sections: [Option<String>; 2] = [None, None];
    let mut current: Option<usize> = None;
    for (n, line) in text.lines().enumerate() {
        let t = line.trim();
        match t {
            "[forward]" | "[inverse]" => {
                let k = usize::from(t == "[inverse]");
                if sections[k].is_some() {
                    return Err(usage(format!("{}:{}: section given twice", path.display(), n + 1)));
                }
                sections[k] = Some(String::new());
                current = Some(k);
            }
            _ if t.is_empty() || t.starts_with('#') => {}
            _ => {
                let k = current
                    .ok_or_else(|| usage(format!("{}:{}: expected `[forward]` or `[inverse]`", path.display(), n + 1)))?;
                let s = sections[k].as_mut().expect("section opened");
                s.push_str(t);
                s.push('\n');
            }
        }
    }
    let parse = |s: &Option<String>, name: &str| -> Result<GenMap, CliError> {
        let s = s.as_ref().ok_or_else(|| usage(format!("{}: missing [{name}] section", path.display())))?;
        moves::parse_gen_map(s).map_err(|e| usage(format!("{} [{name}]: {e}", path.display())))
    };
    Ok((parse(&sections[0], "forward")?, parse(&sections[1], "inverse")?))
}

fn move_cmd(cmd: &Command) -> Result<Report, CliError> {
    let kind = cmd.kind.ok_or_else(|| usage("move needs --kind"))?;
    let needs_map = matches!(kind, MoveKind::H | MoveKind::M);
    let (tuple_path, map_path) = match (cmd.inputs.as_slice(), needs_map) {
        ([t], false) => (t, None),
        ([t, m], true) => (t, Some(m)),
        (_, false) => return Err(usage("move takes one tuple file")),
        (_, true) => return Err(usage("this move takes a tuple file and an automorphism file")),
    };
    let t = load_tuple(tuple_path)?;
    let mut diagnostics = Vec::new();
    let color = cmd.color.unwrap_or(1) as usize;
    let mode_for = |default: Mode| -> Result<Mode, CliError> {
        match (cmd.mode, default) {
            (None, m) => Ok(m),
            (Some(ModeArg::Shared), Mode::Shared) | (Some(ModeArg::Unshared), Mode::Unshared) => Ok(default),
            (Some(_), _) => Err(usage("--mode contradicts --kind (sb2 is shared, sb3 unshared)")),
        }
    };
    let out = match kind {
        MoveKind::S => moves::stabilize_heegaard(&t),
        MoveKind::Sg => moves::stabilize_genus(&t),
        MoveKind::Sb1 => {
            let side = cmd.side.unwrap_or(1) as usize;
            moves::normalize_for_perturb(&t).and_then(|n| {
                if n != t {
                    diagnostics.push("relabeled into perturbation normal form first".to_string());
                }
                moves::perturb(&n, side)
            })
        }
        MoveKind::Sb2 | MoveKind::Sb3 => {
            let mode = mode_for(if kind == MoveKind::Sb2 { Mode::Shared } else { Mode::Unshared })?;
            moves::normalize_for_triple(&t, color, mode).and_then(|n| {
                if n != t {
                    diagnostics.push("relabeled into perturbation normal form first".to_string());
                }
                moves::perturb_triple(&n, color, mode)
            })
        }
        MoveKind::C => moves::cyclic(&t),
        MoveKind::H => {
            let (f, g) = load_automorphism(map_path.expect("checked"))?;
            let i = match &cmd.pair {
                Some(s) => parse_index(s)?,
                None => return Err(usage("--kind h needs --pair i to pick the homomorphism")),
            };
            moves::target_automorphism(&t, i, &f, &g)
        }
        MoveKind::M => {
            let (f, g) = load_automorphism(map_path.expect("checked"))?;
            moves::surface_automorphism(&t, &f, &g)
        }
    }
    .map_err(semantic)?;
    let text = out.to_string();
    if let Some(p) = &cmd.out {
        write(p, &text)?;
    }
    let mut r = Report::new(
        Status::Ok,
        json!({ "genus": out.sig().genus, "bridges": out.sig().bridges, "tuple": text }),
    );
    r.diagnostics = diagnostics;
    Ok(r)
}
