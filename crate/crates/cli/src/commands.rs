use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use itertools::Itertools;
use mbcr_core::bounds::{
    decimal, enumerate_cut_types, file_size_bound, int, mbcr_lower_bound, mbcr_point, optimal_tradeoff_lp,
    show, single_loss_bound, CutType, OptimalFace, Rational, SystemParams,
};
use mbcr_core::code::{CodeParams, MbcrCode, NodeShare, Phase, Stripe};
use mbcr_core::flowgraph::{build_graph, cut_capacity, max_flow, type_cut, FlowGraph};
use mbcr_core::gf::Field;
use mbcr_core::mds::GeneratorSpec;
use mbcr_core::simulator::{run_simulation, FailureModel};
use serde_json::json;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::flowspec;
use crate::format::{bytes_to_symbols, symbols_to_bytes, ShareFile, ShareHeader};

pub const POLY_ENV: &str = "MBCR_FIELD_POLY";

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Encode(a) => encode(&a, out),
        Command::Decode(a) => decode(&a, out),
        Command::Repair(a) => repair(&a, out),
        Command::Bound(a) => bound(&a, out),
        Command::Flowgraph(a) => flowgraph(&a, out),
        Command::Simulate(a) => simulate(&a, out),
    }
}

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Io(format!("stdout: {e}"))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(stdout_err)?
    };
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn parse_poly(text: &str) -> CliResult<u32> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| CliError::Usage(format!("'{text}' is not a polynomial (use hex like 0x11d or decimal)")))
}

impl CodeArgs {
    pub fn build(&self) -> CliResult<CodeParams> {
        let (k, r) = (self.k, self.r);
        let n = self.n.unwrap_or(k + r);
        let d = self.d.unwrap_or(k);
        let generator = match self.generator {
            GeneratorArg::Builtin => {
                if self.field_degree.is_some_and(|m| m != 1) || self.poly.is_some() || self.points.is_some() {
                    return usage("the builtin generator is fixed over GF(2); drop --field-degree/--poly/--points");
                }
                GeneratorSpec::builtin_gf2()
            }
            GeneratorArg::Vandermonde => {
                let m = self.field_degree.unwrap_or(8);
                let poly = match (&self.poly, std::env::var(POLY_ENV)) {
                    (Some(p), _) => Some(parse_poly(p)?),
                    (None, Ok(p)) if !p.trim().is_empty() => Some(parse_poly(&p)?),
                    _ => None,
                };
                let field = match poly {
                    Some(p) => Field::new(m, p)?,
                    None => Field::with_degree(m)?,
                };
                match &self.points {
                    Some(points) => GeneratorSpec::vandermonde(&field, k, points.clone()),
                    None => GeneratorSpec::default_vandermonde(&field, k, n.saturating_sub(1))?,
                }
            }
        };
        Ok(CodeParams::new(n, k, d, r, generator)?)
    }
}

fn share_path(dir: &Path, id: usize) -> PathBuf {
    dir.join(format!("node_{id}.mbcr"))
}

fn write_shares(dir: &Path, files: &[ShareFile]) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    files
        .iter()
        .map(|f| {
            let path = share_path(dir, f.header.node_id as usize);
            write(&path, &f.to_bytes())?;
            Ok(path)
        })
        .collect()
}

fn encode(a: &EncodeArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = a.code.build()?;
    let code = MbcrCode::new(params.clone())?;
    let data = read(&a.input)?;
    let m = params.field().degree();
    let mut symbols = bytes_to_symbols(&data, m);
    let b = params.stripe_len();
    let stripes = symbols.len().div_ceil(b);
    let stripe_count = u32::try_from(stripes).map_err(|_| CliError::Usage("input needs more than 2^32 stripes".into()))?;
    symbols.resize(stripes * b, 0);

    let mut per_node: Vec<Vec<NodeShare>> = vec![Vec::with_capacity(stripes); params.n];
    for chunk in symbols.chunks(b) {
        for share in code.encode(&Stripe::new(chunk.to_vec()))? {
            per_node[share.node_id - 1].push(share);
        }
    }
    let files: Vec<ShareFile> = per_node
        .into_iter()
        .enumerate()
        .map(|(i, shares)| ShareFile {
            header: ShareHeader::for_params(&params, i + 1, data.len() as u64, stripe_count),
            shares,
        })
        .collect();
    write_shares(&a.out_dir, &files)?;
    say!(out, "encoded {} bytes into {stripes} stripes of B = {b} symbols over GF(2^{m})", data.len());
    say!(out, "wrote {} share files to {} ({} symbols per stripe each)", params.n, a.out_dir.display(), params.alpha());
    Ok(())
}

fn load_consistent(paths: &[PathBuf]) -> CliResult<Vec<ShareFile>> {
    let files = paths
        .iter()
        .map(|p| {
            ShareFile::from_bytes(&read(p)?).map_err(|e| match e {
                CliError::Corruption(msg) => CliError::Corruption(format!("{}: {msg}", p.display())),
                other => other,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    if let Some(first) = files.first() {
        for (f, p) in files.iter().zip(paths).skip(1) {
            if !f.header.same_encoding(&first.header) {
                return Err(CliError::Corruption(format!(
                    "header mismatch: {} was produced by a different encoding than {}",
                    p.display(),
                    paths[0].display()
                )));
            }
        }
    }
    Ok(files)
}

fn decode(a: &DecodeArgs, out: &mut dyn Write) -> CliResult<()> {
    let files = load_consistent(&a.shares)?;
    let header = files[0].header.clone();
    let params = header.code_params()?;
    let code = MbcrCode::new(params.clone())?;

    let mut chosen: BTreeMap<usize, &ShareFile> = BTreeMap::new();
    for f in &files {
        if chosen.len() == params.k {
            break;
        }
        chosen.entry(f.header.node_id as usize).or_insert(f);
    }
    if chosen.len() < params.k {
        return usage(format!(
            "insufficient shares: need {} distinct nodes, got {}",
            params.k,
            chosen.len()
        ));
    }
    let ids: Vec<usize> = chosen.keys().copied().collect();
    let decoder = code.decoder(&ids)?;
    let mut symbols = Vec::with_capacity(header.stripes as usize * params.stripe_len());
    for s in 0..header.stripes as usize {
        let shares: Vec<&NodeShare> = chosen.values().map(|f| &f.shares[s]).collect();
        symbols.extend(decoder.decode(&code, &shares)?.into_inner());
    }
    let m = params.field().degree();
    let len = usize::try_from(header.original_len).map_err(|_| CliError::Corruption("length overflow".into()))?;
    let capacity_bits = symbols.len() as u64 * m as u64;
    if header.original_len * 8 > capacity_bits {
        return Err(CliError::Corruption(format!(
            "header claims {} bytes but the shares hold only {} bits",
            header.original_len, capacity_bits
        )));
    }
    let bytes = symbols_to_bytes(&symbols, m, len);
    write(&a.output, &bytes)?;
    say!(out, "decoded {} bytes from nodes {} into {}", bytes.len(), ids.iter().join(","), a.output.display());
    Ok(())
}

fn repair(a: &RepairArgs, out: &mut dyn Write) -> CliResult<()> {
    let files = load_consistent(&a.survivors)?;
    let params = files[0].header.code_params()?;
    let code = MbcrCode::new(params.clone())?;
    let plan = code.plan_repair(&a.failed)?;

    let mut survivors: BTreeMap<usize, Vec<NodeShare>> = BTreeMap::new();
    for f in &files {
        let id = f.header.node_id as usize;
        if plan.failed.contains(&id) {
            return usage(format!("node {id} is listed as failed but its share file was given"));
        }
        if survivors.insert(id, f.shares.clone()).is_some() {
            return usage(format!("share file for node {id} given twice"));
        }
    }
    let outcome = code.execute_repair(&plan, &survivors)?;
    let t = &outcome.transcript;

    let template = &files[0].header;
    let regenerated: Vec<ShareFile> = outcome
        .regenerated
        .iter()
        .map(|(&id, shares)| ShareFile {
            header: ShareHeader {
                node_id: id as u16,
                ..template.clone()
            },
            shares: shares.clone(),
        })
        .collect();
    let written = write_shares(&a.out_dir, &regenerated)?;

    let gamma_bound = mbcr_lower_bound(&SystemParams::new(params.stripe_len() as u64, params.k, params.d, params.r))?;
    let received = t.received_per_newcomer();
    let gamma = received.values().copied().max().unwrap_or(0);
    let ratio = int(gamma as i64) / &gamma_bound;
    let p1 = t.count(Phase::Download);
    let p2 = t.count(Phase::Exchange);

    say!(out, "failed: {}", plan.failed.iter().join(" "));
    say!(out, "survivors: {}", plan.survivors.iter().join(" "));
    say!(out, "stripes: {}", t.stripes);
    say!(out, "phase 1 transfers: {p1}");
    say!(out, "phase 2 transfers: {p2}");
    say!(out, "total transfers: {}", p1 + p2);
    say!(out, "packets moved: {}", t.packets());
    for (id, count) in &received {
        say!(out, "newcomer {id} received: {count}");
    }
    say!(out, "gamma bound: {} ({})", show(&gamma_bound), decimal(&gamma_bound, 6));
    say!(out, "ratio: {} ({})", show(&ratio), decimal(&ratio, 6));
    for path in &written {
        say!(out, "wrote {}", path.display());
    }

    if let Some(path) = &a.transcript {
        let doc = json!({
            "failed": plan.failed,
            "survivors": plan.survivors,
            "stripes": t.stripes,
            "phase1_transfers": p1,
            "phase2_transfers": p2,
            "total_transfers": p1 + p2,
            "packets": t.packets(),
            "received": received,
            "gamma_bound": show(&gamma_bound),
            "ratio": show(&ratio),
            "transfers": t.transfers,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
        write(path, text.as_bytes())?;
    }
    Ok(())
}

fn pair(p: &(Rational, Rational)) -> String {
    format!("({}, {})", show(&p.0), show(&p.1))
}

/// One-line LP verdict; `Err` when the LP disagrees with the closed form.
pub fn lp_verdict(p: &SystemParams) -> CliResult<String> {
    let lp = optimal_tradeoff_lp(p)?;
    let bound = mbcr_lower_bound(p)?;
    let point = mbcr_point(p)?;
    if lp.gamma != bound {
        return Err(CliError::Corruption(format!(
            "LP optimum {} differs from the closed-form bound {}",
            show(&lp.gamma),
            show(&bound)
        )));
    }
    match &lp.face {
        OptimalFace::Vertex(v) if *v == point => Ok(format!("vertex matches closed form {}", pair(v))),
        OptimalFace::Segment(a, b) if lp.attains(&point) => Ok(format!(
            "closed form {} lies on the optimal segment {}-{}",
            pair(&point),
            pair(a),
            pair(b)
        )),
        OptimalFace::Ray(a) if lp.attains(&point) => Ok(format!(
            "closed form {} lies on the optimal ray from {}",
            pair(&point),
            pair(a)
        )),
        _ => Err(CliError::Corruption(format!(
            "closed form {} is not optimal for the LP",
            pair(&point)
        ))),
    }
}

fn bound(a: &BoundArgs, out: &mut dyn Write) -> CliResult<()> {
    if let Some(grid) = &a.grid {
        let &[kmax, dmax, rmax] = grid.as_slice() else {
            return usage("--grid takes three values K,D,R");
        };
        let mut failures = 0;
        for k in 1..=kmax {
            for d in k..=dmax {
                for r in 1..=rmax {
                    let p = SystemParams::unit(k, d, r);
                    match lp_verdict(&p) {
                        Ok(v) => say!(out, "k={k} d={d} r={r} B={}: {v}", p.b),
                        Err(e) => {
                            failures += 1;
                            say!(out, "k={k} d={d} r={r} B={}: MISMATCH {e}", p.b);
                        }
                    }
                }
            }
        }
        if failures > 0 {
            return Err(CliError::Corruption(format!("{failures} grid points failed LP verification")));
        }
        if a.file_size.is_none() && a.k.is_none() {
            return Ok(());
        }
    }

    let (Some(b), Some(k), Some(d), Some(r)) = (a.file_size, a.k, a.d, a.r) else {
        return usage("bound needs -B, -k, -d and -r (or --grid alone)");
    };
    let p = SystemParams::new(b, k, d, r);
    let gamma = mbcr_lower_bound(&p)?;
    let (b1, b2) = mbcr_point(&p)?;
    say!(out, "parameters: B = {b}, k = {k}, d = {d}, r = {r}");
    say!(out, "repair bandwidth lower bound: {} ({})", show(&gamma), decimal(&gamma, 6));
    say!(out, "optimal point: beta1 = {} ({}), beta2 = {} ({})", show(&b1), decimal(&b1, 6), show(&b2), decimal(&b2, 6));
    if a.compare_single_loss {
        let single = single_loss_bound(b, k, d)?;
        say!(out, "single-loss bound: {} ({})", show(&single), decimal(&single, 6));
        let saving = &single - &gamma;
        say!(out, "cooperative saving per newcomer: {} ({})", show(&saving), decimal(&saving, 6));
    }
    if a.lp_verify {
        say!(out, "lp: {}", lp_verdict(&p)?);
    }
    Ok(())
}

fn collector_type(g: &FlowGraph) -> Option<(CutType, Vec<mbcr_core::flowgraph::StageGroup>)> {
    let groups = g.collector_groups();
    if groups.iter().any(|grp| grp.stage < 1) {
        return None;
    }
    let t = CutType::new(groups.iter().map(|grp| grp.nodes.len()).collect(), g.params.r).ok()?;
    Some((t, groups))
}

fn flowgraph(a: &FlowgraphArgs, out: &mut dyn Write) -> CliResult<()> {
    let text = String::from_utf8(read(&a.spec)?).map_err(|_| CliError::Usage("spec is not UTF-8".into()))?;
    let spec = flowspec::parse(&text)?;
    let p = &spec.params;
    let dc = a.dc.clone().or(spec.dc.clone());

    let g = match dc {
        Some(dc) => build_graph(p, &spec.history, &dc)?,
        None => {
            let mut best: Option<(Rational, FlowGraph)> = None;
            for dc in (1..=p.n).combinations(p.k) {
                let g = build_graph(p, &spec.history, &dc)?;
                let v = max_flow(&g)?.value;
                say!(out, "collector {}: max-flow {}", dc.iter().join(","), show(&v));
                if best.as_ref().map_or(true, |(b, _)| v < *b) {
                    best = Some((v, g));
                }
            }
            best.expect("at least one collector").1
        }
    };

    let flow = max_flow(&g)?.value;
    say!(out, "vertices: {}", g.vertices.len());
    say!(out, "edges: {}", g.edges.len());
    say!(out, "stages: {}", g.stages());
    say!(out, "collector: {}", g.dc.iter().join(","));
    say!(out, "max-flow: {} ({})", show(&flow), decimal(&flow, 6));

    let min_type = enumerate_cut_types(p.k, p.r)
        .into_iter()
        .map(|t| {
            let v = file_size_bound(&t, p.d, p.r, &p.beta1, &p.beta2);
            (v, t)
        })
        .min_by(|x, y| x.0.cmp(&y.0));
    if let Some((v, t)) = &min_type {
        say!(out, "minimum type-cut bound over all types: {} (type {t})", show(v));
    }

    match collector_type(&g) {
        Some((t, groups)) => {
            let cap = cut_capacity(&g, &type_cut(&g, &t, &groups)?)?;
            let cap = cap.value.map_or("inf".to_string(), |v| show(&v));
            say!(out, "collector type cut {t}: capacity {cap}");
        }
        None => say!(out, "collector type cut: none (collector reads unrepaired nodes)"),
    }

    if let Some(parts) = &a.cut_type {
        let t = CutType::new(parts.clone(), p.r)?;
        let groups = g.collector_groups();
        let cut = type_cut(&g, &t, &groups)?;
        let cap = cut_capacity(&g, &cut)?;
        let algebraic = file_size_bound(&t, p.d, p.r, &p.beta1, &p.beta2);
        match cap.value {
            Some(v) => say!(out, "cut type {t}: capacity {} (algebraic bound {})", show(&v), show(&algebraic)),
            None => say!(out, "cut type {t}: infinite (algebraic bound {})", show(&algebraic)),
        }
    }

    match &a.edges {
        Some(path) => {
            write(path, g.edge_list().as_bytes())?;
            say!(out, "edge list written to {}", path.display());
        }
        None => {
            say!(out, "# edges: from to capacity");
            out.write_all(g.edge_list().as_bytes()).map_err(stdout_err)?;
        }
    }
    Ok(())
}

pub fn parse_schedule(text: &str) -> CliResult<Vec<Vec<usize>>> {
    let mut sets = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let set = flowspec::parse_nodes(content).map_err(|e| CliError::Usage(format!("schedule line {}: {e}", no + 1)))?;
        if set.iter().collect::<BTreeSet<_>>().len() != set.len() {
            return usage(format!("schedule line {}: repeated node", no + 1));
        }
        sets.push(set);
    }
    Ok(sets)
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = a.code.build()?;
    let (model, default_rounds) = match &a.schedule {
        Some(path) => {
            let text = String::from_utf8(read(path)?).map_err(|_| CliError::Usage("schedule is not UTF-8".into()))?;
            let sets = parse_schedule(&text)?;
            let len = sets.len();
            (FailureModel::Schedule(sets), len)
        }
        None => (FailureModel::UniformRandom, 10),
    };
    let rounds = a.rounds.unwrap_or(default_rounds);
    let report = run_simulation(params, a.stripes, rounds, &model, a.seed)?;
    let json = report.to_json();
    match &a.output {
        Some(path) => {
            write(path, json.as_bytes())?;
            say!(
                out,
                "{} rounds, ratio {}, audits {}/{} passed; report written to {}",
                report.totals.rounds,
                report.ratio.exact,
                report.totals.collectors_passed,
                report.totals.collectors_audited,
                path.display()
            );
        }
        None => say!(out, "{json}"),
    }
    if !report.ratio.all_rounds_optimal || report.totals.collectors_passed != report.totals.collectors_audited {
        return Err(CliError::Corruption("a round missed the bound or failed its audit".into()));
    }
    Ok(())
}
