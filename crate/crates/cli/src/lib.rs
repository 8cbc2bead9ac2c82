//! Command-line front end: parse, classify, reduce, translate and verify.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use regcorr::alba::{run, AlbaResult, Strategy};
use regcorr::algebra::{dist_duality_roundtrip, duality_roundtrip};
use regcorr::classify::{
    find_certificate, is_inductive, is_sahlqvist, transitive_closure, CertKind, Certificate, CertificateJson, Verdict,
};
use regcorr::corpus::{is_s5, LEMMON_AXIOMS, LEMMON_SYSTEMS};
use regcorr::fol::{correspondent_with, eval_fo, parse_fo, Fo, FoEnv};
use regcorr::gen::{inductive_corpus, GenOptions};
use regcorr::semantics::{
    enumerate_dist_frames, enumerate_frames, enumerate_posets, eval_quasi, frame_at, frame_count, frame_valid, Frame,
};
use regcorr::syntax::{eps_to_string, parse_eps, parse_inequality, Eps, Inequality, Signature, Sym};

#[derive(Parser, Debug)]
#[command(name = "regcorr", version, about = "Correspondence engine for regular modal logics")]
pub struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Signature file declaring extra connectives (default: HAR with dia, box, neg).
    #[arg(long, global = true, value_name = "FILE")]
    pub sig: Option<PathBuf>,
    /// Include wall-clock timings in reports.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Inequality such as `box p <= p`.
    #[arg(required_unless_present = "file")]
    pub text: Option<String>,
    /// Read the inequality from a file instead.
    #[arg(long, short, conflicts_with = "text")]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Order {
    /// Order-type, e.g. `p=1,q=d`.
    #[arg(long)]
    pub eps: Option<String>,
    /// Dependency order, e.g. `p<q,q<r`.
    #[arg(long, requires = "eps")]
    pub omega: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Bounds {
    /// Check every frame with at most this many worlds.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub max_n: u8,
    /// Also check frames sampled at four worlds.
    #[arg(long)]
    pub deep: bool,
    /// Number of four-world frames sampled by `--deep`.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Seed for sampling and random generation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sahlqvist / inductive classification.
    Classify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: Order,
    },
    /// Pure quasi-inequalities and first-order correspondent, verified on finite frames.
    Correspond {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: Order,
        /// Emit the rule log as JSON lines.
        #[arg(long)]
        trace: bool,
        /// Use bounded search instead of the certificate-guided strategy.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Compare an inequality with a first-order sentence on finite frames.
    Check {
        inequality: String,
        sentence: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Round-trip frames through complex algebras and atom structures.
    Duality {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=4))]
        max_n: u8,
        /// Also round-trip sampled four-world frames.
        #[arg(long)]
        deep: bool,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lemmon's axioms and the systems E2–E5.
    Axioms {
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Run the guided reduction on seeded random inductive inequalities.
    Soundness {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[command(flatten)]
        bounds: Bounds,
    },
}

/// Result of one subcommand: the machine report, its rendering and whether
/// every verdict was positive.
#[derive(Debug)]
pub struct Outcome {
    pub ok: bool,
    pub report: Value,
    pub text: String,
    /// JSON lines emitted before the report (`--trace`).
    pub trace: Vec<String>,
}

/// Frames of one size, exhaustive or sampled.
pub struct FrameSet {
    pub worlds: usize,
    pub sampled: bool,
    pub frames: Vec<Frame>,
}

pub fn frame_sets(b: &Bounds) -> Vec<FrameSet> {
    let max_n = b.max_n as usize;
    let mut out: Vec<FrameSet> = (1..=max_n)
        .map(|n| FrameSet {
            worlds: n,
            sampled: false,
            frames: enumerate_frames(n).collect(),
        })
        .collect();
    if b.deep && max_n < 4 {
        out.push(sample_frames(4, b.samples, b.seed));
    }
    out
}

fn sample_frames(n: usize, count: usize, seed: u64) -> FrameSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = frame_count(n);
    FrameSet {
        worlds: n,
        sampled: true,
        frames: (0..count).map(|_| frame_at(n, rng.gen_range(0..total))).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeVerdict {
    pub worlds: usize,
    pub sampled: bool,
    pub frames: usize,
    pub mismatches: usize,
    pub counterexample: Option<Frame>,
}

/// Evaluate an agreement check on every frame of every set.
pub fn compare<F>(sets: &[FrameSet], agree: F) -> Result<Vec<SizeVerdict>>
where
    F: Fn(&Frame) -> Result<bool> + Sync,
{
    sets.iter()
        .map(|s| {
            let results: Vec<bool> = s
                .frames
                .par_iter()
                .map(&agree)
                .collect::<Result<_>>()?;
            let bad: Vec<usize> = (0..results.len()).filter(|&k| !results[k]).collect();
            Ok(SizeVerdict {
                worlds: s.worlds,
                sampled: s.sampled,
                frames: s.frames.len(),
                mismatches: bad.len(),
                counterexample: bad.first().map(|&k| s.frames[k].clone()),
            })
        })
        .collect()
}

fn all_agree(v: &[SizeVerdict]) -> bool {
    v.iter().all(|s| s.mismatches == 0)
}

fn sentence_holds(f: &Frame, phi: &Fo) -> Result<bool> {
    Ok(eval_fo(f, phi, &FoEnv::default())?)
}

fn verdict_lines(v: &[SizeVerdict], out: &mut String) {
    for s in v {
        let how = if s.sampled { "sampled" } else { "all" };
        let _ = write!(out, "  |W|={} ({} {}): ", s.worlds, how, s.frames);
        match &s.counterexample {
            None => {
                let _ = writeln!(out, "agree");
            }
            Some(f) => {
                let _ = writeln!(out, "{} mismatches, e.g. {}", s.mismatches, f);
            }
        }
    }
}

pub fn load_signature(path: Option<&PathBuf>) -> Result<Signature> {
    match path {
        None => Ok(Signature::har()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(Signature::from_text(&text)?)
        }
    }
}

fn read_input(input: &Input, sig: &Signature) -> Result<Inequality> {
    let text = match (&input.text, &input.file) {
        (_, Some(p)) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        (Some(t), None) => t.clone(),
        (None, None) => bail!("no inequality given"),
    };
    Ok(parse_inequality(text.trim(), sig, false)?)
}

/// `p<q, q<r` or the chain `p<q<r`, transitively closed.
pub fn parse_omega(text: &str) -> Result<Vec<(Sym, Sym)>> {
    let mut pairs = BTreeSet::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let chain: Vec<&str> = part.split('<').map(str::trim).collect();
        if chain.len() < 2 || chain.iter().any(|v| v.is_empty()) {
            bail!("bad dependency `{}`: expected `p<q`", part);
        }
        for w in chain.windows(2) {
            pairs.insert((Sym::from(w[0]), Sym::from(w[1])));
        }
    }
    Ok(transitive_closure(&pairs).into_iter().collect())
}

fn explicit_order(order: &Order) -> Result<Option<(Eps, Vec<(Sym, Sym)>)>> {
    let Some(eps) = &order.eps else { return Ok(None) };
    let omega = match &order.omega {
        Some(o) => parse_omega(o)?,
        None => vec![],
    };
    Ok(Some((parse_eps(eps)?, omega)))
}

fn verdict_json(v: &Verdict) -> Value {
    json!({ "ok": v.ok, "violations": v.violations })
}

pub fn cmd_classify(input: &Input, order: &Order, sig: &Signature) -> Result<Outcome> {
    let ineq = read_input(input, sig)?;
    if let Some((eps, omega)) = explicit_order(order)? {
        let s = is_sahlqvist(&ineq, &eps, sig)?;
        let i = is_inductive(&ineq, &eps, &omega, sig)?;
        let mut text = format!("{}\n  eps: {}\n", ineq, eps_to_string(&eps));
        let _ = writeln!(text, "  sahlqvist: {}", if s.ok { "yes" } else { "no" });
        let _ = writeln!(text, "  inductive: {}", if i.ok { "yes" } else { "no" });
        for v in s.violations.iter().chain(&i.violations).take(6) {
            let _ = writeln!(text, "    {:?}: {}", v.side, v.reason);
        }
        return Ok(Outcome {
            ok: s.ok || i.ok,
            report: json!({
                "input": ineq.to_string(),
                "eps": eps,
                "omega": omega,
                "sahlqvist": verdict_json(&s),
                "inductive": verdict_json(&i),
            }),
            text,
            trace: vec![],
        });
    }
    let cert = find_certificate(&ineq, sig)?;
    let mut text = format!("{}\n", ineq);
    match &cert {
        Some(c) => {
            let _ = writeln!(text, "  {:?} at {}", c.kind, eps_to_string(&c.eps));
            if !c.omega.is_empty() {
                let pairs: Vec<String> = c.omega.iter().map(|(a, b)| format!("{}<{}", a, b)).collect();
                let _ = writeln!(text, "  omega: {}", pairs.join(", "));
            }
        }
        None => {
            let _ = writeln!(text, "  neither Sahlqvist nor inductive for any order-type");
        }
    }
    let report = match &cert {
        Some(c) => serde_json::to_value(CertificateJson::found(c))?,
        None => json!({ "kind": null }),
    };
    Ok(Outcome {
        ok: cert.is_some(),
        report: json!({ "input": ineq.to_string(), "certificate": report }),
        text,
        trace: vec![],
    })
}

fn strategy_for(ineq: &Inequality, order: &Order, exhaustive: bool, sig: &Signature) -> Result<Strategy> {
    if exhaustive {
        return Ok(Strategy::exhaustive());
    }
    if let Some((eps, omega)) = explicit_order(order)? {
        let kind = if omega.is_empty() && is_sahlqvist(ineq, &eps, sig)?.ok {
            CertKind::Sahlqvist
        } else {
            CertKind::Inductive
        };
        return Ok(Strategy::Guided(Certificate { kind, eps, omega }));
    }
    Ok(match find_certificate(ineq, sig)? {
        Some(c) => Strategy::Guided(c),
        None => Strategy::exhaustive(),
    })
}

#[derive(Serialize)]
pub struct RunReport {
    pub input: String,
    pub certificate: Option<CertificateJson>,
    pub result: &'static str,
    pub safe: Option<bool>,
    pub pure: Vec<String>,
    pub stuck: Vec<Vec<String>>,
    pub remaining: Vec<String>,
    pub fo: Option<String>,
    pub fo_ast: Option<Fo>,
    pub verdicts: Vec<SizeVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<Value>,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_correspond(
    input: &Input,
    order: &Order,
    trace: bool,
    exhaustive: bool,
    bounds: &Bounds,
    sig: &Signature,
    timings: bool,
) -> Result<Outcome> {
    let ineq = read_input(input, sig)?;
    let strategy = strategy_for(&ineq, order, exhaustive, sig)?;
    let cert = match &strategy {
        Strategy::Guided(c) => Some(CertificateJson::found(c)),
        Strategy::Exhaustive { .. } => None,
    };
    let t0 = Instant::now();
    let alba = run(&ineq, &strategy, sig)?;
    let t_alba = ms(t0);
    let trace_lines = if trace {
        alba.trace().iter().map(serde_json::to_string).collect::<Result<Vec<_>, _>>()?
    } else {
        vec![]
    };
    let mut report = RunReport {
        input: ineq.to_string(),
        certificate: cert,
        result: if alba.is_success() { "success" } else { "failure" },
        safe: None,
        pure: vec![],
        stuck: vec![],
        remaining: vec![],
        fo: None,
        fo_ast: None,
        verdicts: vec![],
        timings_ms: None,
    };
    let mut text = format!("{}\n", ineq);
    let mut t_verify = 0.0;
    match &alba {
        AlbaResult::Failure { stuck, remaining, .. } => {
            report.stuck = stuck.iter().map(|s| s.lines()).collect();
            report.remaining = remaining.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(text, "  reduction failed; remaining variables: {}", report.remaining.join(", "));
            for s in stuck {
                let _ = writeln!(text, "  stuck: {}", s);
            }
        }
        AlbaResult::Success { pure, safe, .. } => {
            let corr = correspondent_with(&ineq, &strategy, sig)?;
            report.safe = Some(*safe);
            report.pure = pure.iter().map(|q| q.to_string()).collect();
            report.fo = Some(corr.fo.to_string());
            let _ = writeln!(text, "  safe: {}", safe);
            for q in &report.pure {
                let _ = writeln!(text, "  pure: {}", q);
            }
            let _ = writeln!(text, "  first-order: {}", corr.fo);
            let t1 = Instant::now();
            let fo = corr.fo.clone();
            report.verdicts = compare(&frame_sets(bounds), |f| {
                let modal = frame_valid(f, &ineq)?;
                let quasi = pure.iter().try_fold(true, |acc, q| eval_quasi(f, q).map(|v| acc && v))?;
                let first = sentence_holds(f, &fo)?;
                Ok(modal == quasi && quasi == first)
            })?;
            t_verify = ms(t1);
            report.fo_ast = Some(corr.fo);
            let _ = writeln!(text, "  verification (input vs output vs first-order):");
            verdict_lines(&report.verdicts, &mut text);
        }
    }
    if timings {
        report.timings_ms = Some(json!({ "reduction": t_alba, "verification": t_verify }));
    }
    let ok = alba.is_success() && all_agree(&report.verdicts);
    Ok(Outcome {
        ok,
        report: serde_json::to_value(&report)?,
        text,
        trace: trace_lines,
    })
}

pub fn cmd_check(inequality: &str, sentence: &str, bounds: &Bounds, sig: &Signature) -> Result<Outcome> {
    let ineq = parse_inequality(inequality, sig, false)?;
    let fo = parse_fo(sentence)?;
    if !fo.is_sentence() {
        bail!("`{}` is not a sentence of the frame language", fo);
    }
    let verdicts = compare(&frame_sets(bounds), |f| Ok(frame_valid(f, &ineq)? == sentence_holds(f, &fo)?))?;
    let ok = all_agree(&verdicts);
    let mut text = format!("{}\n{}\n  {}\n", ineq, fo, if ok { "equivalent" } else { "not equivalent" });
    verdict_lines(&verdicts, &mut text);
    Ok(Outcome {
        ok,
        report: json!({
            "input": ineq.to_string(),
            "sentence": fo.to_string(),
            "equivalent": ok,
            "verdicts": verdicts,
        }),
        text,
        trace: vec![],
    })
}

#[derive(Serialize)]
struct DualityCount {
    worlds: usize,
    sampled: bool,
    frames: usize,
    failures: usize,
}

pub fn cmd_duality(max_n: usize, deep: bool, samples: usize, seed: u64) -> Result<Outcome> {
    let mut sets: Vec<FrameSet> = (1..=max_n)
        .map(|n| FrameSet {
            worlds: n,
            sampled: false,
            frames: enumerate_frames(n).collect(),
        })
        .collect();
    if deep && max_n < 4 {
        sets.push(sample_frames(4, samples, seed));
    }
    let kripke: Vec<DualityCount> = sets
        .iter()
        .map(|s| DualityCount {
            worlds: s.worlds,
            sampled: s.sampled,
            frames: s.frames.len(),
            failures: s.frames.par_iter().filter(|f| duality_roundtrip(f).is_err()).count(),
        })
        .collect();
    let distributive: Vec<DualityCount> = (1..=max_n.min(3))
        .map(|n| {
            let frames: Vec<_> = enumerate_posets(n).iter().flat_map(enumerate_dist_frames).collect();
            DualityCount {
                worlds: n,
                sampled: false,
                frames: frames.len(),
                failures: frames.par_iter().filter(|f| dist_duality_roundtrip(f).is_err()).count(),
            }
        })
        .collect();
    let ok = kripke.iter().chain(&distributive).all(|c| c.failures == 0);
    let mut text = String::new();
    for (label, counts) in [("kripke", &kripke), ("distributive", &distributive)] {
        for c in counts {
            let how = if c.sampled { "sampled" } else { "all" };
            let _ = writeln!(
                text,
                "{} |W|={}: {}/{} round-trips ({})",
                label,
                c.worlds,
                c.frames - c.failures,
                c.frames,
                how
            );
        }
    }
    Ok(Outcome {
        ok,
        report: json!({ "kripke": kripke, "distributive": distributive, "ok": ok }),
        text,
        trace: vec![],
    })
}

#[derive(Serialize)]
struct AxiomRow {
    label: &'static str,
    modal: &'static str,
    inequality: String,
    certificate: Option<CertificateJson>,
    pure: Vec<String>,
    correspondent: String,
    condition: Vec<&'static str>,
    verdicts: Vec<SizeVerdict>,
}

#[derive(Serialize)]
struct SystemRow {
    name: &'static str,
    axioms: Vec<&'static str>,
    class: &'static str,
    correspondent: String,
    verdicts: Vec<SizeVerdict>,
}

pub fn cmd_axioms(bounds: &Bounds) -> Result<Outcome> {
    let sig = Signature::har();
    let sets = frame_sets(bounds);
    let mut text = String::new();
    let mut ok = true;
    let mut axioms = Vec::new();
    let mut fo_of = std::collections::BTreeMap::new();
    for a in &LEMMON_AXIOMS {
        let ineq = a.inequality();
        let cert = find_certificate(&ineq, &sig)?.context("built-in axiom has no certificate")?;
        let corr = correspondent_with(&ineq, &Strategy::Guided(cert.clone()), &sig)?;
        let expected = a.expected();
        let fo = corr.fo.clone();
        let verdicts = compare(&sets, |f| {
            let e = sentence_holds(f, &expected)?;
            Ok(sentence_holds(f, &fo)? == e && frame_valid(f, &ineq)? == e)
        })?;
        let good = all_agree(&verdicts);
        ok &= good;
        let names: Vec<&str> = a.condition.iter().map(|k| regcorr::fol::reference(k).unwrap().name).collect();
        let _ = writeln!(
            text,
            "{:5} {:22} {:?} at {:9} {:55} {}",
            a.label,
            a.modal,
            cert.kind,
            eps_to_string(&cert.eps),
            if names.is_empty() { "⊤".to_string() } else { names.join(" and ") },
            if good { "ok" } else { "MISMATCH" }
        );
        fo_of.insert(a.label, corr.fo.clone());
        axioms.push(AxiomRow {
            label: a.label,
            modal: a.modal,
            inequality: ineq.to_string(),
            certificate: Some(CertificateJson::found(&cert)),
            pure: corr.alba.pure().unwrap_or(&[]).iter().map(|q| q.to_string()).collect(),
            correspondent: corr.fo.to_string(),
            condition: names,
            verdicts,
        });
    }
    let _ = writeln!(text);
    let mut systems = Vec::new();
    let mut e5 = None;
    for s in &LEMMON_SYSTEMS {
        let conj = Fo::and_all(s.axioms.iter().map(|l| fo_of[l].clone()));
        let expected = s.expected();
        let verdicts = compare(&sets, |f| Ok(sentence_holds(f, &conj)? == sentence_holds(f, &expected)?))?;
        let good = all_agree(&verdicts);
        ok &= good;
        let _ = writeln!(
            text,
            "{}  {:18} {:78} {}",
            s.name,
            s.axioms.join(" "),
            s.class,
            if good { "ok" } else { "MISMATCH" }
        );
        if s.name == "E5" {
            e5 = Some(conj.clone());
        }
        systems.push(SystemRow {
            name: s.name,
            axioms: s.axioms.to_vec(),
            class: s.class,
            correspondent: conj.to_string(),
            verdicts,
        });
    }
    let e5 = e5.context("E5 missing from the corpus")?;
    let s5 = compare(&sets, |f| Ok(sentence_holds(f, &e5)? == is_s5(f)))?;
    let s5_ok = all_agree(&s5);
    ok &= s5_ok;
    let checked: usize = s5.iter().map(|v| v.frames).sum();
    let _ = writeln!(
        text,
        "\nE5 = S5 (N = W and S an equivalence) on {} frames: {}",
        checked,
        if s5_ok { "ok" } else { "MISMATCH" }
    );
    Ok(Outcome {
        ok,
        report: json!({ "axioms": axioms, "systems": systems, "e5_is_s5": { "ok": s5_ok, "verdicts": s5 }, "ok": ok }),
        text,
        trace: vec![],
    })
}

#[derive(Serialize)]
pub struct SoundnessReport {
    pub seed: u64,
    pub inequalities: usize,
    pub inductive_only: usize,
    pub successes: usize,
    pub safe: usize,
    pub unsound: Vec<String>,
    pub failed: Vec<String>,
    pub frames: usize,
}

pub fn cmd_soundness(count: usize, depth: usize, vars: usize, bounds: &Bounds) -> Result<Outcome> {
    let sig = Signature::har();
    let corpus = inductive_corpus(bounds.seed, count, &GenOptions::base(depth, vars), &sig);
    let frames: Vec<Frame> = frame_sets(bounds).into_iter().flat_map(|s| s.frames).collect();
    let results: Vec<(bool, bool, Option<String>, Option<String>)> = corpus
        .par_iter()
        .map(|(ineq, cert)| match run(ineq, &Strategy::Guided(cert.clone()), &sig) {
            Ok(AlbaResult::Success { pure, safe, .. }) => {
                let bad = frames.iter().find(|f| {
                    let lhs = frame_valid(f, ineq).unwrap_or(false);
                    let rhs = pure.iter().all(|q| eval_quasi(f, q).unwrap_or(!lhs));
                    lhs != rhs
                });
                (true, safe, bad.map(|f| format!("{} on {}", ineq, f)), None)
            }
            Ok(AlbaResult::Failure { .. }) => (false, false, None, Some(ineq.to_string())),
            Err(e) => (false, false, None, Some(format!("{}: {}", ineq, e))),
        })
        .collect();
    let report = SoundnessReport {
        seed: bounds.seed,
        inequalities: corpus.len(),
        inductive_only: corpus.iter().filter(|(_, c)| c.kind == CertKind::Inductive).count(),
        successes: results.iter().filter(|r| r.0).count(),
        safe: results.iter().filter(|r| r.1).count(),
        unsound: results.iter().filter_map(|r| r.2.clone()).collect(),
        failed: results.iter().filter_map(|r| r.3.clone()).collect(),
        frames: frames.len(),
    };
    let ok = report.successes == report.inequalities && report.safe == report.inequalities && report.unsound.is_empty();
    let mut text = format!(
        "{} inequalities (seed {}, {} inductive only), {} frames\n  success {}/{}, safe {}/{}, unsound {}\n",
        report.inequalities,
        report.seed,
        report.inductive_only,
        report.frames,
        report.successes,
        report.inequalities,
        report.safe,
        report.inequalities,
        report.unsound.len()
    );
    for line in report.failed.iter().chain(&report.unsound).take(10) {
        let _ = writeln!(text, "  {}", line);
    }
    Ok(Outcome {
        ok,
        report: serde_json::to_value(&report)?,
        text,
        trace: vec![],
    })
}

/// Dispatch a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let sig = load_signature(cli.sig.as_ref())?;
    match &cli.command {
        Command::Classify { input, order } => cmd_classify(input, order, &sig),
        Command::Correspond {
            input,
            order,
            trace,
            exhaustive,
            bounds,
        } => cmd_correspond(input, order, *trace, *exhaustive, bounds, &sig, cli.timings),
        Command::Check {
            inequality,
            sentence,
            bounds,
        } => cmd_check(inequality, sentence, bounds, &sig),
        Command::Duality {
            max_n,
            deep,
            samples,
            seed,
        } => cmd_duality(*max_n as usize, *deep, *samples, *seed),
        Command::Axioms { bounds } => cmd_axioms(bounds),
        Command::Soundness {
            count,
            depth,
            vars,
            bounds,
        } => cmd_soundness(*count, *depth, *vars, bounds),
    }
}

/// Error report printed on failure, with a coarse category.
pub fn error_json(err: &anyhow::Error) -> Value {
    let kind = if err.downcast_ref::<regcorr::syntax::Error>().is_some() {
        "syntax"
    } else if err.downcast_ref::<regcorr::classify::Error>().is_some() {
        "classify"
    } else if err.downcast_ref::<regcorr::alba::Error>().is_some() {
        "alba"
    } else if err.downcast_ref::<regcorr::fol::Error>().is_some() {
        "fol"
    } else if err.downcast_ref::<regcorr::semantics::Error>().is_some() {
        "semantics"
    } else if err.downcast_ref::<std::io::Error>().is_some() {
        "io"
    } else {
        "input"
    };
    json!({ "error": kind, "message": format!("{:#}", err) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("regcorr").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn omega_syntax() {
        let o = parse_omega("p<q<r").unwrap();
        assert_eq!(o.len(), 3);
        assert!(o.contains(&(Sym::from("p"), Sym::from("r"))));
        assert!(parse_omega("p<").is_err());
        assert!(parse_omega("p").is_err());
    }

    #[test]
    fn check_reflexivity() {
        let out = execute(&cli(&["check", "box p <= p", "∀x(Nx→Rxx)"])).unwrap_err();
        // The Unicode form needs explicit argument parentheses.
        assert!(error_json(&out)["error"] == "fol");
        let out = execute(&cli(&["check", "box p <= p", "∀x(N(x)→R(x,x))"])).unwrap();
        assert!(out.ok);
        assert_eq!(out.report["equivalent"], true);
        let out = execute(&cli(&["check", "box p <= p", "![x]: N(x)"])).unwrap();
        assert!(!out.ok);
    }

    #[test]
    fn classify_reports_certificates() {
        let out = execute(&cli(&["--json", "classify", "box (p -> q) <= box (box p -> box q)"])).unwrap();
        assert!(out.ok);
        assert_eq!(out.report["certificate"]["kind"], "Sahlqvist");
        let out = execute(&cli(&[
            "classify",
            "box (p -> q) <= box (box p -> box q)",
            "--eps",
            "p=1,q=1",
            "--omega",
            "p<q",
        ]))
        .unwrap();
        assert_eq!(out.report["sahlqvist"]["ok"], false);
        assert_eq!(out.report["inductive"]["ok"], true);
        let out = execute(&cli(&["classify", "box dia p <= dia box p"])).unwrap();
        assert!(!out.ok);
    }

    #[test]
    fn correspond_traces_and_verifies() {
        let out = execute(&cli(&["correspond", "box p <= p", "--trace"])).unwrap();
        assert!(out.ok, "{}", out.text);
        assert_eq!(out.report["fo"], "![i0]: (N(i0) => R(i0,i0))");
        assert!(!out.trace.is_empty());
        for line in &out.trace {
            let v: Value = serde_json::from_str(line).unwrap();
            assert!(v["rule"].is_string());
        }
        assert!(out.report.get("timings_ms").is_none());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = execute(&cli(&["--json", "correspond", "dia p <= box dia p"])).unwrap();
        let b = execute(&cli(&["--json", "correspond", "dia p <= box dia p"])).unwrap();
        assert_eq!(a.report, b.report);
    }

    #[test]
    fn errors_are_categorised() {
        let e = execute(&cli(&["classify", "box p <="])).unwrap_err();
        assert_eq!(error_json(&e)["error"], "syntax");
        let e = execute(&cli(&["correspond", "box p <= p", "--eps", "p=1", "--omega", "p<p"])).unwrap_err();
        assert_eq!(error_json(&e)["error"], "alba");
    }

    #[test]
    fn duality_on_two_worlds() {
        let out = execute(&cli(&["duality", "--max-n", "2"])).unwrap();
        assert!(out.ok);
        assert_eq!(out.report["kripke"][1]["frames"], 25);
    }
}
