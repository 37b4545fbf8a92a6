//! Benchmark model registry, configuration sweeps and report output.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use crate::domain::{Domain, Val, VarId};
use crate::engine::{EngineConfig, PropEntry, Space};
use crate::error::{Error, Result};
use crate::model::{Constraint, Model, Strength};
use crate::prop::{AllDiffDomain, Dfa, GuardedLeq, LinearEqBounds, Sweep};
use crate::search::{Brancher, Limits, Mode, ValSelect, VarSelect};

/// Registry entry: name, default size, accepted size range, description.
#[derive(Clone, Copy, Debug)]
pub struct ModelInfo {
    pub name: &'static str,
    pub default: u32,
    pub min: u32,
    pub max: u32,
    pub about: &'static str,
}

const fn info(name: &'static str, default: u32, min: u32, max: u32, about: &'static str) -> ModelInfo {
    ModelInfo { name, default, min, max, about }
}

pub const MODELS: &[ModelInfo] = &[
    info("queens", 8, 4, 400, "n-queens with pairwise disequalities"),
    info("queens-a", 8, 4, 400, "n-queens with three naive alldifferent"),
    info("alpha", 26, 26, 26, "alpha cipher, 20 linear equations"),
    info("donald-b", 10, 10, 10, "DONALD+GERALD=ROBERT, bounds propagation"),
    info("donald-d", 10, 10, 10, "DONALD+GERALD=ROBERT, domain propagation"),
    info("donald-v", 10, 10, 10, "DONALD+GERALD=ROBERT, naive alldifferent"),
    info("golomb", 7, 2, 10, "optimal Golomb ruler"),
    info("all-interval", 8, 3, 14, "all-interval series"),
    info("magic-sequence", 10, 4, 60, "self-describing sequence, all solutions"),
    info("magic-square", 4, 3, 6, "magic square"),
    info("minsort", 20, 2, 500, "prefix minima over a permutation"),
    info("grocery", 4, 4, 4, "four prices: sum 7.11, product 7.11"),
    info("partition", 8, 4, 12, "equal sums and sums of squares"),
    info("picture-small", 10, 10, 10, "10x10 nonogram"),
    info("min-events", 20, 1, 500, "min constraints with far-away arguments"),
    info("exactly-events", 20, 2, 500, "exactly with many impossible positions"),
];

pub fn model_info(name: &str) -> Result<&'static ModelInfo> {
    MODELS.iter().find(|m| m.name == name).ok_or_else(|| Error::UnknownModel(name.into()))
}

/// Builds a registry model at size `n`.
pub fn build_model(name: &str, n: u32) -> Result<Model> {
    let info = model_info(name)?;
    if n < info.min || n > info.max {
        return Err(Error::SizeOutOfRange { model: name.into(), size: n, min: info.min, max: info.max });
    }
    let n = n as usize;
    Ok(match name {
        "queens" => queens(n),
        "queens-a" => queens_a(n),
        "alpha" => alpha(),
        "donald-b" => donald(name, Strength::Bounds, Strength::Bounds),
        "donald-d" => donald(name, Strength::Domain, Strength::Domain),
        "donald-v" => donald(name, Strength::Bounds, Strength::Naive),
        "golomb" => golomb(n),
        "all-interval" => all_interval(n),
        "magic-sequence" => magic_sequence(n),
        "magic-square" => magic_square(n),
        "minsort" => minsort(n),
        "grocery" => grocery(),
        "partition" => partition(n),
        "picture-small" => picture_small(),
        "min-events" => min_events(n),
        "exactly-events" => exactly_events(n),
        _ => unreachable!("registry entry without builder"),
    })
}

fn brancher(vars: Vec<VarId>, vs: VarSelect, val: ValSelect) -> Brancher {
    Brancher::new(vars, vs, val)
}

fn linear(coeffs: Vec<Val>, vars: Vec<VarId>, rhs: Val) -> Constraint {
    Constraint::Linear { coeffs, vars, rhs }
}

fn queens(n: usize) -> Model {
    let mut m = Model::new(format!("queens-{n}"));
    let x = m.vars(n, 0, n as Val - 1);
    for i in 0..n {
        for j in i + 1..n {
            let d = (j - i) as Val;
            m.post(Constraint::Neq { x: x[i], y: x[j], c: 0 }, Strength::Naive);
            m.post(Constraint::Neq { x: x[i], y: x[j], c: d }, Strength::Naive);
            m.post(Constraint::Neq { x: x[i], y: x[j], c: -d }, Strength::Naive);
        }
    }
    m.brancher = brancher(x, VarSelect::FirstUnfixed, ValSelect::EqInfVsGeq);
    m.mode = if n <= 10 { Mode::All } else { Mode::First };
    m
}

fn queens_a(n: usize) -> Model {
    let mut m = Model::new(format!("queens-a-{n}"));
    let top = n as Val - 1;
    let x = m.vars(n, 0, top);
    let up = m.vars(n, 0, 2 * top);
    let down = m.vars(n, -top, top);
    for i in 0..n {
        m.post(Constraint::EqOffset { x: up[i], y: x[i], c: i as Val }, Strength::Bounds);
        m.post(Constraint::EqOffset { x: down[i], y: x[i], c: -(i as Val) }, Strength::Bounds);
    }
    m.post(Constraint::AllDiff(x.clone()), Strength::Naive);
    m.post(Constraint::AllDiff(up), Strength::Naive);
    m.post(Constraint::AllDiff(down), Strength::Naive);
    m.brancher = brancher(x, VarSelect::FirstUnfixed, ValSelect::EqInfVsGeq);
    m.mode = if n <= 10 { Mode::All } else { Mode::First };
    m
}

pub const ALPHA_WORDS: [(&str, Val); 20] = [
    ("ballet", 45),
    ("cello", 43),
    ("concert", 74),
    ("flute", 30),
    ("fugue", 50),
    ("glee", 66),
    ("jazz", 58),
    ("lyre", 47),
    ("oboe", 53),
    ("opera", 65),
    ("polka", 59),
    ("quartet", 50),
    ("saxophone", 134),
    ("scale", 51),
    ("solo", 37),
    ("song", 61),
    ("soprano", 82),
    ("theme", 72),
    ("violin", 100),
    ("waltz", 34),
];

fn alpha() -> Model {
    let mut m = Model::new("alpha");
    let x = m.vars(26, 1, 26);
    for (word, sum) in ALPHA_WORDS {
        let mut coeffs = [0 as Val; 26];
        for b in word.bytes() {
            coeffs[(b - b'a') as usize] += 1;
        }
        let (c, v): (Vec<Val>, Vec<VarId>) =
            coeffs.iter().zip(&x).filter(|(c, _)| **c != 0).map(|(c, v)| (*c, *v)).unzip();
        m.post(linear(c, v, sum), Strength::Bounds);
    }
    m.post(Constraint::AllDiff(x.clone()), Strength::Domain);
    m.brancher = brancher(x, VarSelect::MinSize, ValSelect::EqInfVsGeq);
    m
}

/// Letters of DONALD+GERALD=ROBERT in variable order.
pub const DONALD_LETTERS: [char; 10] = ['d', 'o', 'n', 'a', 'l', 'g', 'e', 'r', 'b', 't'];

fn donald(name: &str, lin: Strength, alldiff: Strength) -> Model {
    let mut m = Model::new(name);
    let mut letters = Vec::new();
    for c in DONALD_LETTERS {
        let lo = if matches!(c, 'd' | 'g' | 'r') { 1 } else { 0 };
        letters.push(m.var(lo, 9));
    }
    let [d, _o, n, a, l, g, e, r, b, t] = letters[..] else { unreachable!() };
    let c = m.vars(5, 0, 1);
    // one equation per column, right to left
    m.post(linear(vec![2, -1, -10], vec![d, t, c[0]], 0), lin);
    m.post(linear(vec![2, 1, -1, -10], vec![l, c[0], r, c[1]], 0), lin);
    m.post(linear(vec![2, 1, -1, -10], vec![a, c[1], e, c[2]], 0), lin);
    m.post(linear(vec![1, 1, 1, -1, -10], vec![n, r, c[2], b, c[3]], 0), lin);
    m.post(linear(vec![1, 1, -10], vec![e, c[3], c[4]], 0), lin);
    m.post(linear(vec![1, 1, 1, -1], vec![d, g, c[4], r], 0), lin);
    m.post(Constraint::AllDiff(letters.clone()), alldiff);
    m.brancher = brancher(letters, VarSelect::InputOrder, ValSelect::EqInfVsGeq);
    m.mode = Mode::All;
    m
}

/// Marks come first in variable order; the last mark is the length.
fn golomb(n: usize) -> Model {
    let mut m = Model::new(format!("golomb-{n}"));
    let top = (n * n) as Val;
    let mut marks = vec![m.constant(0)];
    marks.extend(m.vars(n - 1, 1, top));
    let mut diffs = Vec::new();
    let mut first_last = (None, None);
    for i in 0..n {
        for j in i + 1..n {
            let k = (j - i) as Val;
            let dij = m.var(k * (k + 1) / 2, top);
            m.post(Constraint::Plus { x: marks[j], y: marks[i], z: dij }, Strength::Bounds);
            if (i, j) == (0, 1) {
                first_last.0 = Some(dij);
            }
            if n >= 3 && (i, j) == (n - 2, n - 1) {
                first_last.1 = Some(dij);
            }
            diffs.push(dij);
        }
    }
    for w in marks.windows(2) {
        m.post(Constraint::Leq { x: w[0], y: w[1], c: -1 }, Strength::Bounds);
    }
    if let (Some(a), Some(b)) = first_last {
        m.post(Constraint::Leq { x: a, y: b, c: -1 }, Strength::Bounds);
    }
    m.post(Constraint::AllDiff(diffs), Strength::Bounds);
    let len = *marks.last().unwrap();
    m.brancher = brancher(marks, VarSelect::InputOrder, ValSelect::EqInfVsGeq);
    m.mode = Mode::Minimize(len);
    m
}

fn all_interval(n: usize) -> Model {
    let mut m = Model::new(format!("all-interval-{n}"));
    let top = n as Val - 1;
    let x = m.vars(n, 0, top);
    let mut dist = Vec::new();
    for i in 0..n - 1 {
        let t = m.var(-top, top);
        let d = m.var(1, top);
        m.post(Constraint::Plus { x: x[i + 1], y: x[i], z: t }, Strength::Bounds);
        m.post(Constraint::Abs { x: t, y: d }, Strength::Bounds);
        dist.push(d);
    }
    m.post(Constraint::AllDiff(x.clone()), Strength::Bounds);
    m.post(Constraint::AllDiff(dist.clone()), Strength::Bounds);
    // reversal and complement symmetry
    m.post(Constraint::Leq { x: x[0], y: x[1], c: -1 }, Strength::Bounds);
    if dist.len() >= 2 {
        m.post(Constraint::Leq { x: dist[dist.len() - 1], y: dist[0], c: -1 }, Strength::Bounds);
    }
    m.brancher = brancher(x, VarSelect::MinSize, ValSelect::EqInfVsGeq);
    m
}

fn magic_sequence(n: usize) -> Model {
    let mut m = Model::new(format!("magic-sequence-{n}"));
    let x = m.vars(n, 0, n as Val - 1);
    for i in 0..n {
        m.post(Constraint::Exactly { xs: x.clone(), m: x[i], k: i as Val }, Strength::Domain);
    }
    m.post(linear(vec![1; n], x.clone(), n as Val), Strength::Bounds);
    m.post(linear((0..n as Val).collect(), x.clone(), n as Val), Strength::Bounds);
    m.brancher = brancher(x, VarSelect::InputOrder, ValSelect::EqInfVsGeq);
    m.mode = Mode::All;
    m
}

fn magic_square(n: usize) -> Model {
    let mut m = Model::new(format!("magic-square-{n}"));
    let nn = (n * n) as Val;
    let x = m.vars(n * n, 1, nn);
    let sum = n as Val * (nn + 1) / 2;
    let at = |r: usize, c: usize| x[r * n + c];
    for i in 0..n {
        m.post(linear(vec![1; n], (0..n).map(|c| at(i, c)).collect(), sum), Strength::Bounds);
        m.post(linear(vec![1; n], (0..n).map(|r| at(r, i)).collect(), sum), Strength::Bounds);
    }
    m.post(linear(vec![1; n], (0..n).map(|i| at(i, i)).collect(), sum), Strength::Bounds);
    m.post(linear(vec![1; n], (0..n).map(|i| at(i, n - 1 - i)).collect(), sum), Strength::Bounds);
    m.post(Constraint::AllDiff(x.clone()), Strength::Domain);
    m.brancher = brancher(x, VarSelect::MinSize, ValSelect::SplitLeGe);
    m
}

/// `s_k = min(s_{k-1}, x_k)` over a permutation `x`, with `s_k ≥ n-1-k`.
/// The only solution sorts `x` descending.
fn minsort(n: usize) -> Model {
    let mut m = Model::new(format!("minsort-{n}"));
    let top = n as Val - 1;
    let x = m.vars(n, 0, top);
    let s: Vec<VarId> = (0..n).map(|k| m.var(top - k as Val, top)).collect();
    let first = m.constant(top);
    for k in 0..n {
        let prev = if k == 0 { first } else { s[k - 1] };
        m.post(Constraint::Min { x0: s[k], x1: prev, x2: x[k] }, Strength::Bounds);
    }
    m.post(Constraint::AllDiff(x.clone()), Strength::Naive);
    m.brancher = brancher(x, VarSelect::InputOrder, ValSelect::EqInfVsGeq);
    m
}

fn grocery() -> Model {
    let mut m = Model::new("grocery");
    let p = m.vars(4, 0, 711);
    let ab = m.var(0, 711 * 711);
    let abc = m.var(0, 711 * 711 * 711);
    let total = m.constant(711_000_000);
    m.post(Constraint::Mult { x: ab, y: p[0], z: p[1] }, Strength::Bounds);
    m.post(Constraint::Mult { x: abc, y: ab, z: p[2] }, Strength::Bounds);
    m.post(Constraint::Mult { x: total, y: abc, z: p[3] }, Strength::Bounds);
    m.post(linear(vec![1; 4], p.clone(), 711), Strength::Bounds);
    for w in p.windows(2) {
        m.post(Constraint::Leq { x: w[0], y: w[1], c: 0 }, Strength::Bounds);
    }
    m.brancher = brancher(p, VarSelect::InputOrder, ValSelect::SplitLeGe);
    m
}

/// Splits `1..=2n` into two increasing halves `x`, `y` with equal sums and
/// equal sums of squares; `x` holds 1.
fn partition(n: usize) -> Model {
    let mut m = Model::new(format!("partition-{n}"));
    let top = 2 * n as Val;
    let x = m.vars(n, 1, top);
    let y = m.vars(n, 1, top);
    let sq = |m: &mut Model, v: &[VarId]| -> Vec<VarId> {
        v.iter()
            .map(|&a| {
                let s = m.var(1, top * top);
                m.post(Constraint::Mult { x: s, y: a, z: a }, Strength::Bounds);
                s
            })
            .collect()
    };
    let xs = sq(&mut m, &x);
    let ys = sq(&mut m, &y);
    let mut all = x.clone();
    all.extend(&y);
    m.post(Constraint::AllDiff(all.clone()), Strength::Domain);
    let half = top * (top + 1) / 4;
    m.post(linear(vec![1; n], x.clone(), half), Strength::Bounds);
    m.post(linear(vec![1; n], y.clone(), half), Strength::Bounds);
    let mut c = vec![1; n];
    c.extend(vec![-1; n]);
    let mut v = xs;
    v.extend(ys);
    m.post(linear(c, v, 0), Strength::Bounds);
    for w in x.windows(2).chain(y.windows(2)) {
        m.post(Constraint::Leq { x: w[0], y: w[1], c: -1 }, Strength::Bounds);
    }
    m.post(Constraint::Leq { x: x[0], y: y[0], c: -1 }, Strength::Bounds);
    m.brancher = brancher(all, VarSelect::InputOrder, ValSelect::EqInfVsGeq);
    m
}

pub const PICTURE: [&str; 10] = [
    "..######..",
    ".#......#.",
    "#..#..#..#",
    "#........#",
    "#.#....#.#",
    "#..####..#",
    ".#......#.",
    "..######..",
    "....##....",
    "...####...",
];

/// Run lengths of filled cells in a line.
pub fn runs(line: impl IntoIterator<Item = bool>) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = 0;
    for filled in line {
        if filled {
            cur += 1;
        } else if cur > 0 {
            out.push(cur);
            cur = 0;
        }
    }
    if cur > 0 {
        out.push(cur);
    }
    out
}

fn picture_small() -> Model {
    let mut m = Model::new("picture-small");
    let h = PICTURE.len();
    let w = PICTURE[0].len();
    let cell = |r: usize, c: usize| PICTURE[r].as_bytes()[c] == b'#';
    let x = m.vars(h * w, 0, 1);
    for r in 0..h {
        let dfa = Arc::new(Dfa::nonogram(&runs((0..w).map(|c| cell(r, c)))));
        m.post(Constraint::Regular { xs: x[r * w..(r + 1) * w].to_vec(), dfa }, Strength::Domain);
    }
    for c in 0..w {
        let dfa = Arc::new(Dfa::nonogram(&runs((0..h).map(|r| cell(r, c)))));
        m.post(Constraint::Regular { xs: (0..h).map(|r| x[r * w + c]).collect(), dfa }, Strength::Domain);
    }
    m.brancher = brancher(x, VarSelect::InputOrder, ValSelect::EqInfVsGeq);
    m
}

/// `y_i = min(x_i, z_i)` where every `z_i` lies above every `x_i`; the
/// `z_i` are branched on first.
fn min_events(n: usize) -> Model {
    let mut m = Model::new(format!("min-events-{n}"));
    let top = n as Val;
    let x = m.vars(n, 0, top);
    let z = m.vars(n, top + 1, 3 * top);
    let y = m.vars(n, 0, top);
    for i in 0..n {
        m.post(Constraint::Min { x0: y[i], x1: x[i], x2: z[i] }, Strength::Bounds);
    }
    let mut order = z;
    order.extend(x);
    m.brancher = brancher(order, VarSelect::InputOrder, ValSelect::EqInfVsGeq);
    m
}

/// `exactly(xs, m, 0)` where the odd positions cannot be 0; those are
/// branched on first.
fn exactly_events(n: usize) -> Model {
    let mut m = Model::new(format!("exactly-events-{n}"));
    let top = n as Val;
    let xs: Vec<VarId> = (0..n).map(|i| m.var(if i % 2 == 1 { 1 } else { 0 }, top)).collect();
    let count = m.var(0, top);
    m.post(Constraint::Exactly { xs: xs.clone(), m: count, k: 0 }, Strength::Domain);
    let mut order: Vec<VarId> = xs.iter().copied().skip(1).step_by(2).collect();
    order.extend(xs.iter().copied().step_by(2));
    order.push(count);
    m.brancher = brancher(order, VarSelect::InputOrder, ValSelect::EqInfVsGeq);
    m
}

/// Small hand-written propagation problems used for traces.
pub const EXAMPLES: &[&str] = &["ex-incremental", "ex-repeated"];

/// Space for a trace example, with all propagators queued.
///
/// `ex-incremental`: `x1 = 2·x2`, `x1 = 3·x3` over `[0,17]×[0,9]×[0,6]`.
/// `ex-repeated` adds `x2 ≤ 6 → x1 ≤ x3 + 7` and a domain alldifferent over
/// `x1..x5` with `x4, x5 ∈ [0,3]`.
pub fn example_space(name: &str, cfg: EngineConfig) -> Result<Space> {
    let v = |i: u32| VarId(i);
    let lin = |a: Val, b: VarId| -> Result<PropEntry> {
        Ok(PropEntry::single(LinearEqBounds::new(&[-a, 1], &[b, v(0)], 0)?.with_sweep(Sweep::Sequential)))
    };
    match name {
        "ex-incremental" => {
            let mut s = Space::new(Domain::from_bounds(&[(0, 17), (0, 9), (0, 6)]), cfg)?;
            s.post(lin(2, v(1))?);
            s.post(lin(3, v(2))?);
            Ok(s)
        }
        "ex-repeated" => {
            let mut s = Space::new(Domain::from_bounds(&[(0, 17), (0, 9), (0, 6), (0, 3), (0, 3)]), cfg)?;
            s.post(lin(2, v(1))?);
            s.post(lin(3, v(2))?);
            s.post_prop(GuardedLeq::new(v(1), 6, v(0), v(2), 7));
            s.post_prop(AllDiffDomain::new((0..5).map(v).collect()));
            Ok(s)
        }
        _ => Err(Error::UnknownModel(name.into())),
    }
}

/// One benchmark run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub model: String,
    pub cell: String,
    pub steps: u64,
    pub enqueues: u64,
    pub failures: u64,
    pub solutions: u64,
    pub nodes: u64,
    pub audit_violations: u64,
    pub time_ms: f64,
}

/// Solves `model` under `cfg`.
pub fn run(model: &Model, cfg: EngineConfig, limits: Limits) -> Result<RunRecord> {
    let start = Instant::now();
    let r = model.solve(cfg, limits)?;
    let time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(RunRecord {
        model: model.name.clone(),
        cell: cfg.label(),
        steps: r.stats.steps,
        enqueues: r.stats.enqueues,
        failures: r.stats.failures,
        solutions: r.stats.solutions,
        nodes: r.stats.nodes,
        audit_violations: r.stats.audit_violations,
        time_ms,
    })
}

/// One record per (model, cell), models outermost. Cells run on separate
/// threads per model.
pub fn sweep(models: &[Model], cells: &[EngineConfig], limits: Limits) -> Result<Vec<RunRecord>> {
    for c in cells {
        c.validate()?;
    }
    let mut out = Vec::with_capacity(models.len() * cells.len());
    for m in models {
        let rows: Vec<Result<RunRecord>> = std::thread::scope(|sc| {
            let handles: Vec<_> = cells.iter().map(|&c| sc.spawn(move || run(m, c, limits))).collect();
            handles.into_iter().map(|h| h.join().expect("benchmark thread panicked")).collect()
        });
        for r in rows {
            out.push(r?);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Table,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

const HEADER: [&str; 6] = ["model", "cell", "steps", "failures", "solutions", "time_ms"];

fn render(rows: &[[String; 6]], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(HEADER).expect("write to memory");
            for r in rows {
                w.write_record(r).expect("write to memory");
            }
            out = String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields");
        }
        Format::Table => {
            let mut width = HEADER.map(str::len);
            for r in rows {
                for (w, c) in width.iter_mut().zip(r) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |cells: [&str; 6], out: &mut String| {
                for (i, c) in cells.iter().enumerate() {
                    if i < 2 {
                        let _ = write!(out, "{c:<w$}", w = width[i]);
                    } else {
                        let _ = write!(out, "{c:>w$}", w = width[i]);
                    }
                    out.push_str(if i + 1 < cells.len() { "  " } else { "\n" });
                }
            };
            line(HEADER, &mut out);
            for r in rows {
                line(r.each_ref().map(String::as_str), &mut out);
            }
        }
    }
    out
}

/// Absolute counters, one row per record.
pub fn emit(records: &[RunRecord], format: Format) -> String {
    let rows: Vec<[String; 6]> = records
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                r.cell.clone(),
                r.steps.to_string(),
                r.failures.to_string(),
                r.solutions.to_string(),
                format!("{:.3}", r.time_ms),
            ]
        })
        .collect();
    render(&rows, format)
}

fn percent(ratio: f64) -> String {
    format!("{:+.1}%", (ratio - 1.0) * 100.0)
}

/// Steps and time of every non-baseline cell relative to the baseline cell
/// of the same model, plus an `average` row per cell with the geometric mean
/// of the ratios.
pub fn emit_relative(records: &[RunRecord], baseline: &str, format: Format) -> Result<String> {
    let base = |model: &str| records.iter().find(|r| r.model == model && r.cell == baseline);
    if !records.is_empty() && !records.iter().any(|r| r.cell == baseline) {
        return Err(Error::InvalidConfig(format!("baseline cell `{baseline}` is not in the sweep")));
    }
    let mut rows = Vec::new();
    let mut cells: Vec<&str> = Vec::new();
    let mut logs: Vec<(f64, f64, usize)> = Vec::new();
    for r in records.iter().filter(|r| r.cell != baseline) {
        let Some(b) = base(&r.model) else { continue };
        let rs = ratio(r.steps as f64, b.steps as f64);
        let rt = ratio(r.time_ms, b.time_ms);
        let i = match cells.iter().position(|c| *c == r.cell) {
            Some(i) => i,
            None => {
                cells.push(&r.cell);
                logs.push((0.0, 0.0, 0));
                cells.len() - 1
            }
        };
        logs[i].0 += rs.ln();
        logs[i].1 += rt.ln();
        logs[i].2 += 1;
        rows.push([
            r.model.clone(),
            r.cell.clone(),
            percent(rs),
            r.failures.to_string(),
            r.solutions.to_string(),
            percent(rt),
        ]);
    }
    for (c, (ls, lt, k)) in cells.iter().zip(&logs) {
        let k = *k as f64;
        rows.push([
            "average".into(),
            c.to_string(),
            percent((ls / k).exp()),
            String::new(),
            String::new(),
            percent((lt / k).exp()),
        ]);
    }
    Ok(render(&rows, format))
}

fn ratio(a: f64, b: f64) -> f64 {
    // zero counts compare as equal; keeps the log finite
    (a.max(1e-9)) / (b.max(1e-9))
}

/// Node limit used by the CLI so that a bad cell cannot run forever.
pub fn default_limits() -> Limits {
    Limits { nodes: Some(5_000_000), keep: 1_000 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Policy;

    #[test]
    fn incremental_example_without_fixpoint_reasoning() {
        let cfg = EngineConfig::default().with_policy(Policy::Input);
        let mut s = example_space("ex-incremental", cfg).unwrap();
        assert!(s.propagate());
        assert_eq!(s.domain(), &Domain::from_bounds(&[(0, 12), (0, 6), (0, 4)]));
        // x2 drops to [0,6] only after x1 reaches [0,12], and that change
        // re-enqueues the propagator that made it
        assert_eq!(s.stats().prop_steps, vec![4, 3]);
        assert_eq!(s.stats().steps, 7);
    }

    #[test]
    fn queens_has_quadratic_disequalities() {
        let m = build_model("queens", 8).unwrap();
        assert_eq!(m.constraints.len(), 84);
        assert!(m.constraints.iter().all(|(c, _)| matches!(c, Constraint::Neq { .. })));
    }

    #[test]
    fn queens_a_has_three_naive_alldiffs() {
        let m = build_model("queens-a", 8).unwrap();
        let n = m.constraints.iter().filter(|(c, s)| matches!(c, Constraint::AllDiff(_)) && *s == Strength::Naive).count();
        assert_eq!(n, 3);
    }

    #[test]
    fn minsort_has_one_min_per_element() {
        let m = build_model("minsort", 20).unwrap();
        assert_eq!(m.constraints.iter().filter(|(c, _)| matches!(c, Constraint::Min { .. })).count(), 20);
    }

    #[test]
    fn registry_errors() {
        assert!(matches!(build_model("warehouse", 3), Err(Error::UnknownModel(_))));
        assert!(matches!(build_model("queens", 2), Err(Error::SizeOutOfRange { .. })));
        for info in MODELS {
            build_model(info.name, info.default).unwrap();
        }
    }

    #[test]
    fn known_solutions_check() {
        let m = build_model("donald-d", 10).unwrap();
        // d o n a l g e r b t, then carries
        let a = [5, 2, 6, 4, 8, 1, 9, 7, 3, 0, 1, 1, 0, 1, 1];
        assert!(m.check(&a));
        let m = build_model("alpha", 26).unwrap();
        let sol = [5, 13, 9, 16, 20, 4, 24, 21, 25, 17, 23, 2, 8, 12, 10, 19, 7, 11, 15, 3, 1, 26, 6, 22, 14, 18];
        assert!(m.check(&sol));
    }

    #[test]
    fn picture_clues_accept_the_picture() {
        let m = build_model("picture-small", 10).unwrap();
        let a: Vec<Val> = PICTURE.iter().flat_map(|r| r.bytes().map(|b| Val::from(b == b'#'))).collect();
        assert!(m.check(&a));
    }

    #[test]
    fn runs_of_a_line() {
        assert_eq!(runs([true, true, false, true]), vec![2, 1]);
        assert!(runs([false, false]).is_empty());
    }

    #[test]
    fn csv_shape() {
        assert_eq!(emit(&[], Format::Csv), "model,cell,steps,failures,solutions,time_ms\n");
        let r = RunRecord {
            model: "m".into(),
            cell: "events".into(),
            steps: 10,
            enqueues: 12,
            failures: 1,
            solutions: 2,
            nodes: 3,
            audit_violations: 0,
            time_ms: 0.5,
        };
        let out = emit(std::slice::from_ref(&r), Format::Csv);
        assert_eq!(out.lines().count(), 2);
        assert_eq!(out.lines().nth(1).unwrap(), "m,events,10,1,2,0.500");
        let mut s = r.clone();
        s.cell = "input".into();
        s.steps = 15;
        let rel = emit_relative(&[r, s], "events", Format::Csv).unwrap();
        assert!(rel.contains("m,input,+50.0%"));
        assert!(rel.contains("average,input,+50.0%"));
    }

    #[test]
    fn repeated_runs_are_deterministic() {
        let m = build_model("queens", 6).unwrap();
        let cfg = EngineConfig::default();
        let a = run(&m, cfg, Limits::default()).unwrap();
        let b = run(&m, cfg, Limits::default()).unwrap();
        assert_eq!((a.steps, a.failures, a.solutions), (b.steps, b.failures, b.solutions));
        assert_eq!(sweep(&[m], &[cfg], Limits::default()).unwrap().len(), 1);
    }
}
