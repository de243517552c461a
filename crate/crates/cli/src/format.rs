//! Line-oriented text formats for observed data, simulation truth and
//! inference results.
//!
//! Every file starts with a `<kind> <format version>` line followed by the
//! provenance lines `version`, `config` and `seed`. Fields then appear in a
//! fixed order as `key value...`; list-valued fields give a count and one
//! entry per following line. Reals are written in Rust's shortest
//! round-trip form, so a read/write cycle is bit-exact.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rdsnet_core::graph::{AdjacencyMatrix, BitMatrix};
use rdsnet_core::sim::{ObservedData, RecruitmentEvent};
use rdsnet_core::submodular::BoundKind;
use rdsnet_core::timing::TimingFamily;
use rdsnet_core::vine::InferenceResult;
use rdsnet_core::{BitSet, TimingModel};

use crate::error::{CliError, Result};

pub const VERSION: &str = concat!("rdsnet ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub version: String,
    pub config: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config: impl Into<String>, seed: u64) -> Self {
        Provenance { version: VERSION.to_string(), config: config.into(), seed }
    }

    /// One-line form for formats that only allow comments.
    pub fn comment(&self) -> String {
        format!("{} config={} seed={}", self.version, self.config, self.seed)
    }

    fn write(&self, s: &mut String) {
        let _ = writeln!(s, "version {}", self.version);
        let _ = writeln!(s, "config {}", self.config);
        let _ = writeln!(s, "seed {}", self.seed);
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        let version = r.rest("version")?.to_string();
        let config = r.rest("config")?.to_string();
        let seed = r.scalar("seed")?;
        Ok(Provenance { version, config, seed })
    }
}

/// Sequential reader over non-blank lines.
struct Reader<'a> {
    path: PathBuf,
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(path: &Path, text: &'a str) -> Self {
        let lines =
            text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty()).collect();
        Reader { path: path.to_path_buf(), lines, pos: 0 }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> CliError {
        CliError::Parse { path: self.path.clone(), line, msg: msg.into() }
    }

    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        let last = self.lines.last().map_or(0, |l| l.0);
        let l = *self.lines.get(self.pos).ok_or_else(|| self.err(last + 1, "unexpected end of file"))?;
        self.pos += 1;
        Ok(l)
    }

    /// Everything after `key` on the next line.
    fn rest(&mut self, key: &str) -> Result<&'a str> {
        let (no, line) = self.next_line()?;
        let mut it = line.splitn(2, char::is_whitespace);
        if it.next() != Some(key) {
            return Err(self.err(no, format!("expected `{key}`")));
        }
        Ok(it.next().unwrap_or("").trim())
    }

    fn tokens(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let no = self.lines.get(self.pos).map_or(0, |l| l.0);
        Ok((no, self.rest(key)?.split_whitespace().collect()))
    }

    fn parse<T: FromStr>(&self, line: usize, tok: &str) -> Result<T> {
        tok.parse().map_err(|_| self.err(line, format!("cannot parse `{tok}`")))
    }

    fn scalar<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let (no, t) = self.tokens(key)?;
        match t.as_slice() {
            [x] => self.parse(no, x),
            _ => Err(self.err(no, format!("`{key}` takes one value"))),
        }
    }

    fn list<T: FromStr>(&mut self, key: &str, len: usize) -> Result<Vec<T>> {
        let (no, t) = self.tokens(key)?;
        if t.len() != len {
            return Err(self.err(no, format!("`{key}` needs {len} values, found {}", t.len())));
        }
        t.iter().map(|x| self.parse(no, x)).collect()
    }

    /// `key <count>` followed by `count` lines of whitespace-separated tokens.
    fn block(&mut self, key: &str) -> Result<Vec<(usize, Vec<&'a str>)>> {
        let count: usize = self.scalar(key)?;
        (0..count)
            .map(|_| {
                let (no, l) = self.next_line()?;
                Ok((no, l.split_whitespace().collect()))
            })
            .collect()
    }

    fn pairs(&mut self, key: &str, n: usize) -> Result<Vec<(usize, usize)>> {
        self.block(key)?
            .into_iter()
            .map(|(no, t)| match t.as_slice() {
                [a, b] => {
                    let (a, b): (usize, usize) = (self.parse(no, a)?, self.parse(no, b)?);
                    if a >= n || b >= n {
                        return Err(self.err(no, format!("index out of range for n={n}")));
                    }
                    Ok((a, b))
                }
                _ => Err(self.err(no, "expected a pair")),
            })
            .collect()
    }

    fn header(&mut self, kind: &str) -> Result<Provenance> {
        let (no, t) = self.tokens(kind)?;
        if t != ["1"] {
            return Err(self.err(no, format!("unsupported {kind} format version")));
        }
        Provenance::read(self)
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some(&(no, _)) => Err(self.err(no, "trailing content")),
            None => Ok(()),
        }
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_observed(obs: &ObservedData, prov: &Provenance) -> String {
    let n = obs.n();
    let mut s = String::from("rdsnet-observed 1\n");
    prov.write(&mut s);
    let _ = writeln!(s, "n {n}");
    let _ = writeln!(s, "seeds {}", join(&obs.seeds));
    let _ = writeln!(s, "degrees {}", join(&obs.degrees));
    let _ = writeln!(s, "times {}", join(&obs.times));
    let _ = writeln!(s, "recruitments {}", obs.recruitments.len());
    for (r, i) in &obs.recruitments {
        let _ = writeln!(s, "{r} {i}");
    }
    let _ = writeln!(s, "coupons {n}");
    for i in 0..n {
        let row: String = (0..n).map(|j| if obs.coupons.get(i, j) { '1' } else { '0' }).collect();
        let _ = writeln!(s, "{row}");
    }
    s
}

pub fn read_observed(path: &Path, text: &str) -> Result<(ObservedData, Provenance)> {
    let mut r = Reader::new(path, text);
    let prov = r.header("rdsnet-observed")?;
    let n: usize = r.scalar("n")?;
    let (no, seeds) = r.tokens("seeds")?;
    let seeds: Vec<usize> = seeds.iter().map(|x| r.parse(no, x)).collect::<Result<_>>()?;
    let degrees = r.list("degrees", n)?;
    let times = r.list("times", n)?;
    let recruitments = r.pairs("recruitments", n)?;
    let rows = r.block("coupons")?;
    if rows.len() != n {
        return Err(r.err(0, format!("coupon matrix needs {n} rows")));
    }
    let mut coupons = BitMatrix::new(n);
    for (i, (no, row)) in rows.iter().enumerate() {
        let bits = row.first().copied().unwrap_or("");
        if bits.len() != n || row.len() != 1 {
            return Err(r.err(*no, format!("coupon row needs {n} digits")));
        }
        for (j, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => coupons.set(i, j, true),
                _ => return Err(r.err(*no, "coupon digits must be 0 or 1")),
            }
        }
    }
    r.finish()?;
    if seeds.iter().any(|&m| m >= n) {
        return Err(r.err(0, "seed index out of range"));
    }
    Ok((ObservedData { coupons, degrees, times, recruitments, seeds }, prov))
}

/// What the simulator knows and inference does not.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthFile {
    /// Population-graph label of each subject.
    pub nodes: Vec<String>,
    pub pendants: Vec<u64>,
    pub adjacency: AdjacencyMatrix,
    pub events: Vec<RecruitmentEvent>,
}

pub fn write_truth(t: &TruthFile, prov: &Provenance) -> String {
    let mut s = String::from("rdsnet-truth 1\n");
    prov.write(&mut s);
    let _ = writeln!(s, "n {}", t.nodes.len());
    let _ = writeln!(s, "nodes {}", t.nodes.join(" "));
    let _ = writeln!(s, "pendants {}", join(&t.pendants));
    let edges: Vec<(usize, usize)> = t.adjacency.edges().collect();
    let _ = writeln!(s, "edges {}", edges.len());
    for (i, j) in edges {
        let _ = writeln!(s, "{i} {j}");
    }
    let _ = writeln!(s, "events {}", t.events.len());
    for e in &t.events {
        let who = e.recruiter.map_or("-".to_string(), |r| r.to_string());
        let _ = writeln!(s, "{who} {} {}", e.recruitee, e.time);
    }
    s
}

pub fn read_truth(path: &Path, text: &str) -> Result<(TruthFile, Provenance)> {
    let mut r = Reader::new(path, text);
    let prov = r.header("rdsnet-truth")?;
    let n: usize = r.scalar("n")?;
    let nodes: Vec<String> = r.list("nodes", n)?;
    let pendants = r.list("pendants", n)?;
    let mut adjacency = AdjacencyMatrix::new(n);
    for (i, j) in r.pairs("edges", n)? {
        if i == j {
            return Err(r.err(0, "self-loop in truth edges"));
        }
        adjacency.set(i, j, true);
    }
    let mut events = Vec::new();
    for (no, t) in r.block("events")? {
        let [who, whom, time] = t.as_slice() else {
            return Err(r.err(no, "expected `recruiter recruitee time`"));
        };
        let recruiter = if *who == "-" { None } else { Some(r.parse(no, who)?) };
        events.push(RecruitmentEvent { recruiter, recruitee: r.parse(no, whom)?, time: r.parse(no, time)? });
    }
    r.finish()?;
    Ok((TruthFile { nodes, pendants, adjacency, events }, prov))
}

/// Outcome of the A/θ alternation, when one was run.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternationMeta {
    pub rounds: usize,
    pub zeta: f64,
    pub theta_failed: bool,
}

fn opt_real(x: Option<f64>) -> String {
    x.map_or("none".to_string(), |v| v.to_string())
}

fn write_model(s: &mut String, m: &TimingModel) {
    let _ = writeln!(s, "{} {}", m.family().name(), join(m.params()));
}

pub fn write_inference(res: &InferenceResult, alt: Option<&AlternationMeta>, prov: &Provenance) -> String {
    let mut s = String::from("rdsnet-inference 1\n");
    prov.write(&mut s);
    let _ = writeln!(s, "n {}", res.n);
    let _ = writeln!(s, "bound {}", res.kind.name());
    let _ = writeln!(s, "offset {}", res.offset);
    let _ = writeln!(s, "log_partition_lower {}", opt_real(res.log_partition_lower));
    let _ = writeln!(s, "log_partition_upper {}", opt_real(res.log_partition_upper));
    match &res.upper_candidates {
        Some(c) => {
            let _ = writeln!(s, "candidates {}", join(c.iter().map(|(k, v)| format!("{} {v}", k.name()))));
        }
        None => s.push_str("candidates none\n"),
    }
    let _ = writeln!(s, "converged {}", res.converged);
    let _ = writeln!(s, "oracle_calls {}", res.oracle_calls);
    let _ = writeln!(s, "u_max {}", res.u_max);
    let _ = writeln!(s, "bits {}", res.pendant_bits);
    let _ = writeln!(s, "degrees {}", join(&res.degrees));
    let _ = writeln!(s, "revealed {}", res.revealed.len());
    for (i, j) in &res.revealed {
        let _ = writeln!(s, "{i} {j}");
    }
    // line k of this block is codec index k
    let _ = writeln!(s, "free {}", res.free_edges.len());
    for ((i, j), w) in res.free_edges.iter().zip(&res.edge_weights) {
        let _ = writeln!(s, "{i} {j} {w}");
    }
    let b = res.pendant_bits as usize;
    let _ = writeln!(s, "pendant_weights {}", res.n);
    for k in 0..res.n {
        let _ = writeln!(s, "{}", join(&res.pendant_weights[k * b..(k + 1) * b]));
    }
    match &res.anchor {
        Some(a) => {
            let _ = writeln!(s, "anchor {} {}", a.count(), join(a.iter()));
        }
        None => s.push_str("anchor none\n"),
    }
    let _ = writeln!(s, "theta {}", res.theta.len());
    for m in &res.theta {
        write_model(&mut s, m);
    }
    match alt {
        Some(a) => {
            let _ = writeln!(s, "alternation {} {} {}", a.rounds, a.zeta, a.theta_failed);
        }
        None => s.push_str("alternation none\n"),
    }
    s
}

pub fn read_inference(path: &Path, text: &str) -> Result<(InferenceResult, Option<AlternationMeta>, Provenance)> {
    let mut r = Reader::new(path, text);
    let prov = r.header("rdsnet-inference")?;
    let n: usize = r.scalar("n")?;
    let (no, kind) = r.tokens("bound")?;
    let kind = kind
        .first()
        .and_then(|k| BoundKind::from_name(k))
        .ok_or_else(|| r.err(no, "unknown bound kind"))?;
    let offset = r.scalar("offset")?;
    let opt = |r: &mut Reader<'_>, key: &str| -> Result<Option<f64>> {
        let (no, t) = r.tokens(key)?;
        match t.as_slice() {
            ["none"] => Ok(None),
            [x] => Ok(Some(r.parse(no, x)?)),
            _ => Err(r.err(no, format!("`{key}` takes one value"))),
        }
    };
    let log_partition_lower = opt(&mut r, "log_partition_lower")?;
    let log_partition_upper = opt(&mut r, "log_partition_upper")?;
    let (no, c) = r.tokens("candidates")?;
    let upper_candidates = match c.as_slice() {
        ["none"] => None,
        [a, x, b, y, c, z] => {
            let kind = |s: &str| BoundKind::from_name(s).ok_or_else(|| r.err(no, "unknown bound kind"));
            Some([(kind(a)?, r.parse(no, x)?), (kind(b)?, r.parse(no, y)?), (kind(c)?, r.parse(no, z)?)])
        }
        _ => return Err(r.err(no, "malformed candidates")),
    };
    let converged = r.scalar("converged")?;
    let oracle_calls = r.scalar("oracle_calls")?;
    let u_max = r.scalar("u_max")?;
    let pendant_bits: u32 = r.scalar("bits")?;
    let degrees = r.list("degrees", n)?;
    let revealed = r.pairs("revealed", n)?;
    let mut free_edges = Vec::new();
    let mut edge_weights = Vec::new();
    for (no, t) in r.block("free")? {
        let [i, j, w] = t.as_slice() else {
            return Err(r.err(no, "expected `i j weight`"));
        };
        let (i, j): (usize, usize) = (r.parse(no, i)?, r.parse(no, j)?);
        if i >= j || j >= n {
            return Err(r.err(no, "free pair must satisfy i < j < n"));
        }
        free_edges.push((i, j));
        edge_weights.push(r.parse(no, w)?);
    }
    let rows = r.block("pendant_weights")?;
    if rows.len() != n {
        return Err(r.err(0, format!("pendant_weights needs {n} rows")));
    }
    let mut pendant_weights = Vec::new();
    for (no, t) in rows {
        if t.len() != pendant_bits as usize {
            return Err(r.err(no, format!("expected {pendant_bits} weights")));
        }
        for w in t {
            pendant_weights.push(r.parse(no, w)?);
        }
    }
    let len = free_edges.len() + n * pendant_bits as usize;
    let (no, t) = r.tokens("anchor")?;
    let anchor = match t.as_slice() {
        ["none"] => None,
        [count, rest @ ..] => {
            let count: usize = r.parse(no, count)?;
            let idx: Vec<usize> = rest.iter().map(|x| r.parse(no, x)).collect::<Result<_>>()?;
            if idx.len() != count || idx.iter().any(|&k| k >= len) {
                return Err(r.err(no, "malformed anchor"));
            }
            Some(BitSet::from_indices(len, idx))
        }
        [] => return Err(r.err(no, "malformed anchor")),
    };
    let mut theta = Vec::new();
    for (no, t) in r.block("theta")? {
        let family = match t.first() {
            Some(&"exponential") => TimingFamily::Exponential,
            Some(&"weibull") => TimingFamily::Weibull,
            _ => return Err(r.err(no, "unknown timing family")),
        };
        let p: Vec<f64> = t[1..].iter().map(|x| r.parse(no, x)).collect::<Result<_>>()?;
        theta.push(family.with_params(&p).map_err(|e| r.err(no, e.to_string()))?);
    }
    let (no, t) = r.tokens("alternation")?;
    let alt = match t.as_slice() {
        ["none"] => None,
        [rounds, zeta, failed] => Some(AlternationMeta {
            rounds: r.parse(no, rounds)?,
            zeta: r.parse(no, zeta)?,
            theta_failed: r.parse(no, failed)?,
        }),
        _ => return Err(r.err(no, "malformed alternation")),
    };
    r.finish()?;
    let res = InferenceResult {
        n,
        revealed,
        free_edges,
        edge_weights,
        pendant_bits,
        u_max,
        degrees,
        pendant_weights,
        kind,
        anchor,
        offset,
        log_partition_lower,
        log_partition_upper,
        upper_candidates,
        converged,
        oracle_calls,
        theta,
    };
    Ok((res, alt, prov))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(CliError::io(path))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    std::fs::write(path, contents).map_err(CliError::io(path))
}
