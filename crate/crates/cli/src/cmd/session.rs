use std::io::BufReader;
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use clap::{ArgGroup, Args, ValueEnum};
use embcol::counting::embcolpoly_eval;
use embcol::ffield::{FieldElem, PrimeModulus};
use embcol::graphs::{rand_field, PatternGraph};
use embcol::ip::wire::{prove_remote, serve_tcp, verify_remote, verify_tcp, ProverReport};
use embcol::ip::{replay, run_ip, session_modulus, HonestExact, MalformedProver, OptimalCheat, Prover, Session, Transcript};
use embcol::rng;
use serde_json::{json, Value};

use crate::args::{parse_pattern, parse_prime, require_seed, usage};
use crate::input::{load_colored, read_text, write_text};
use crate::report::Report;
use crate::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Exact round polynomials.
    Honest,
    /// Keeps a false claim alive against every challenge but D.
    Cheat,
    /// Sends one coefficient too few.
    Malformed,
}

impl Backend {
    fn build(self) -> Box<dyn Prover + Send> {
        match self {
            Backend::Honest => Box::new(HonestExact::new()),
            Backend::Cheat => Box::new(OptimalCheat::new()),
            Backend::Malformed => Box::new(MalformedProver),
        }
    }
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("transport").required(true).args(["listen", "stdio"])))]
pub struct ProveArgs {
    /// Serve sessions on this TCP address, one per connection.
    #[arg(long)]
    listen: Option<String>,
    /// Serve one session on stdin/stdout; the report goes to stderr.
    #[arg(long)]
    pub stdio: bool,
    #[arg(long, value_enum, default_value = "honest")]
    backend: Backend,
    /// Stop after this many TCP sessions (default: serve until killed).
    #[arg(long)]
    sessions: Option<usize>,
}

fn prover_record(r: &embcol::Result<ProverReport>) -> Value {
    match r {
        Ok(p) => json!({ "accept": p.accept, "reason": p.reason, "rounds": p.rounds }),
        Err(e) => json!({ "accept": false, "error": e.to_string() }),
    }
}

pub fn prove(a: ProveArgs) -> anyhow::Result<Outcome> {
    let params = json!({ "backend": format!("{:?}", a.backend).to_lowercase(), "listen": a.listen, "stdio": a.stdio, "sessions": a.sessions });
    let backend = a.backend;
    let make = move |_: &Session| Ok(backend.build());
    let results = if a.stdio {
        let mut input = std::io::stdin().lock();
        let mut output = std::io::stdout().lock();
        vec![prove_remote(&mut input, &mut output, make)]
    } else {
        let addr = a.listen.as_deref().expect("clap enforces one transport");
        let listener = TcpListener::bind(addr).map_err(|e| usage("--listen", format!("cannot bind {addr}: {e}")))?;
        // tests and scripts bind port 0 and read the real port from here
        eprintln!("listening on {}", listener.local_addr()?);
        serve_tcp(&listener, make, a.sessions)?
    };
    let mut report = Report::new("prove", None, params);
    report.records = results.iter().map(prover_record).collect();
    let accepted = results.iter().filter(|r| matches!(r, Ok(p) if p.accept)).count();
    report.result = json!({ "sessions": results.len(), "accepted": accepted });
    Ok(Outcome { report, failed: accepted != results.len() })
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("remote").args(["connect", "exec"])))]
pub struct VerifyArgs {
    /// Re-check a stored transcript; no prover involved.
    #[arg(long, conflicts_with_all = ["connect", "exec", "instance"])]
    replay: Option<PathBuf>,
    /// Field instance JSON with n a power of two.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Random field instance when --instance is absent.
    #[arg(long, value_parser = parse_pattern, default_value = "k11")]
    pattern: PatternGraph,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, value_parser = parse_prime)]
    q: Option<PrimeModulus>,
    /// Claimed value mod q (default: the true value).
    #[arg(long, conflicts_with = "lie")]
    claim: Option<u64>,
    /// Claim the true value plus one.
    #[arg(long)]
    lie: bool,
    /// Prover at this TCP address.
    #[arg(long)]
    connect: Option<String>,
    /// Spawn this prover command and talk to it over its stdin/stdout.
    #[arg(long)]
    exec: Option<String>,
    /// In-process prover when no remote is given.
    #[arg(long, value_enum, default_value = "honest")]
    backend: Backend,
    /// Store the transcript here (default: $EMBCOL_TRANSCRIPT if set).
    #[arg(long, env = "EMBCOL_TRANSCRIPT")]
    transcript: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn verify(a: VerifyArgs) -> anyhow::Result<Outcome> {
    if let Some(path) = &a.replay {
        return verify_replay(path);
    }
    let seed = require_seed(a.seed)?;
    let mut r = rng::stream(seed);
    let x = match &a.instance {
        Some(path) => load_colored("--instance", path)?,
        None => {
            if !a.n.is_power_of_two() {
                return Err(usage("--n", "must be a power of two"));
            }
            let q = match a.q {
                Some(q) => q,
                None => session_modulus(&a.pattern, a.n, 0, &mut r)?,
            };
            rand_field(&a.pattern, a.n, q, &mut r)
        }
    };
    let q = x.modulus().ok_or_else(|| usage("--instance", "needs a field instance"))?;
    let truth = embcolpoly_eval(&x, None)?;
    let claim = match (a.claim, a.lie) {
        (Some(c), _) if c >= q.q() => return Err(usage("--claim", format!("{c} is not reduced mod {q}"))),
        (Some(c), _) => q.elem(c),
        (None, true) => q.add(truth, FieldElem::ONE),
        (None, false) => truth,
    };
    let session = Session::new(x, claim).map_err(|e| usage("--instance", e.to_string()))?;
    let session_rng = rng::fork(&mut r);
    let transport = if a.connect.is_some() { "tcp" } else if a.exec.is_some() { "stdio" } else { "in-process" };
    let run = if let Some(addr) = &a.connect {
        verify_tcp(addr.as_str(), session, session_rng)
    } else if let Some(cmdline) = &a.exec {
        verify_spawned(cmdline, session, session_rng)?
    } else {
        run_ip(session, &mut a.backend.build(), session_rng)
    };
    let params = json!({
        "pattern": a.pattern,
        "n": a.n,
        "instance": a.instance.as_ref().map(|p| p.display().to_string()),
        "q": q.q().to_string(),
        "claim": claim,
        "claim_is_true": claim == truth,
        "transport": transport,
        "backend": (transport == "in-process").then(|| format!("{:?}", a.backend).to_lowercase()),
    });
    let mut report = Report::new("verify", Some(seed), params);
    match run {
        Ok(t) => {
            if let Some(path) = &a.transcript {
                write_text("--transcript", path, &t.to_json())?;
            }
            let accepted = t.verdict.accepted();
            report.query_count("prover_messages", t.rounds.len() as u64);
            report.result = json!({ "outcome": if accepted { "accept" } else { "reject" }, "verdict": t.verdict, "rounds": t.rounds.len() });
            Ok(Outcome { report, failed: !accepted })
        }
        Err(embcol::Error::Transport(e)) => {
            report.result = json!({ "outcome": "transport-error", "error": e });
            Ok(Outcome { report, failed: true })
        }
        Err(e) => Err(e.into()),
    }
}

fn verify_spawned(cmdline: &str, session: Session, rng: rng::Stream) -> anyhow::Result<embcol::Result<Transcript>> {
    let mut words = cmdline.split_whitespace();
    let program = words.next().ok_or_else(|| usage("--exec", "empty command"))?;
    let mut child = Command::new(program)
        .args(words)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| usage("--exec", format!("cannot start {program}: {e}")))?;
    let mut to_child = child.stdin.take().expect("piped stdin");
    let mut from_child = BufReader::new(child.stdout.take().expect("piped stdout"));
    let result = verify_remote(&mut from_child, &mut to_child, session, rng);
    drop(to_child);
    let _ = child.wait();
    Ok(result)
}

fn verify_replay(path: &std::path::Path) -> anyhow::Result<Outcome> {
    let t = Transcript::from_json(&read_text("--replay", path)?).map_err(|e| usage("--replay", e.to_string()))?;
    let verdict = replay(&t)?;
    let consistent = verdict == t.verdict;
    let mut report = Report::new("verify", None, json!({ "replay": path.display().to_string() }));
    report.result = json!({
        "outcome": if verdict.accepted() { "accept" } else { "reject" },
        "verdict": verdict,
        "recorded_verdict": t.verdict,
        "consistent": consistent,
        "rounds": t.rounds.len(),
    });
    Ok(Outcome { report, failed: !(verdict.accepted() && consistent) })
}
