//! Newline-delimited JSON transport for sessions between separate processes.
//!
//! The verifier opens with a `session` message carrying the public input.
//! After that the prover sends `poly`, the verifier answers with `i`, and
//! the verifier closes with `verdict`.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::prover::Prover;
use super::verifier::Verifier;
use super::xtilde::xtilde_at;
use super::{Session, Transcript, Verdict};
use crate::error::{Error, Result};
use crate::ffield::{FieldElem, UniPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Message {
    Session(Session),
    Poly {
        round: usize,
        coeffs: Vec<FieldElem>,
    },
    #[serde(rename = "i")]
    Challenge {
        round: usize,
        value: FieldElem,
    },
    Verdict {
        accept: bool,
        reason: String,
    },
}

impl Message {
    fn verdict(v: &Verdict) -> Self {
        match v {
            Verdict::Accept => Message::Verdict { accept: true, reason: "ACCEPT".into() },
            Verdict::Reject { round, reason } => Message::Verdict { accept: false, reason: format!("{reason} at round {round}") },
        }
    }
}

fn transport(e: impl std::fmt::Display) -> Error {
    Error::Transport(e.to_string())
}

fn send<W: Write>(w: &mut W, msg: &Message) -> Result<()> {
    let line = serde_json::to_string(msg).expect("messages serialize");
    writeln!(w, "{line}").and_then(|_| w.flush()).map_err(transport)
}

/// Next message; `Ok(None)` is a line that does not parse, EOF is a
/// transport error.
fn recv<R: BufRead>(r: &mut R) -> Result<Option<Message>> {
    let mut line = String::new();
    let read = r.read_line(&mut line).map_err(transport)?;
    if read == 0 {
        return Err(Error::Transport("peer closed the connection".into()));
    }
    Ok(serde_json::from_str(line.trim_end()).ok())
}

/// Verifier end of a session over a byte stream.
pub fn verify_remote<R: BufRead, W: Write, G: Rng>(
    reader: &mut R,
    writer: &mut W,
    session: Session,
    rng: G,
) -> Result<Transcript> {
    send(writer, &Message::Session(session.clone()))?;
    let mut verifier = Verifier::new(session, rng);
    while verifier.awaiting_poly() {
        let round = verifier.round();
        let coeffs = match recv(reader)? {
            Some(Message::Poly { round: r, coeffs }) if r == round => coeffs,
            _ => Vec::new(),
        };
        if let Some(value) = verifier.receive(coeffs) {
            send(writer, &Message::Challenge { round, value })?;
        }
    }
    let (transcript, _) = verifier.finish();
    send(writer, &Message::verdict(&transcript.verdict))?;
    Ok(transcript)
}

/// Outcome as seen by the prover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverReport {
    pub accept: bool,
    pub reason: String,
    pub rounds: usize,
}

/// Prover end of one session. The prover tracks x̃ and the claim from its own
/// messages and the received challenges.
pub fn prove_remote<R, W, F>(reader: &mut R, writer: &mut W, make_prover: F) -> Result<ProverReport>
where
    R: BufRead,
    W: Write,
    F: FnOnce(&Session) -> Result<Box<dyn Prover + Send>>,
{
    let session = match recv(reader)? {
        Some(Message::Session(s)) => s,
        _ => {
            send(writer, &Message::Verdict { accept: false, reason: "MALFORMED session message".into() })?;
            return Err(Error::Malformed("expected a session message".into()));
        }
    };
    let mut prover = make_prover(&session)?;
    let q = session.q;
    let mut x = session.instance.clone();
    let mut claim = session.claim;
    let mut round = 0;
    loop {
        if x.n() > 1 {
            let coeffs = prover.round_poly(round, &x, claim)?;
            send(writer, &Message::Poly { round, coeffs: coeffs.clone() })?;
            match recv(reader)? {
                Some(Message::Challenge { round: r, value }) if r == round && value.value() < q.q() => {
                    claim = UniPoly::new(coeffs).eval(q, value);
                    x = xtilde_at(&x, value)?;
                    round += 1;
                }
                Some(Message::Verdict { accept, reason }) => return Ok(ProverReport { accept, reason, rounds: round }),
                _ => return Err(Error::Malformed(format!("unexpected message in round {round}"))),
            }
        } else {
            return match recv(reader)? {
                Some(Message::Verdict { accept, reason }) => Ok(ProverReport { accept, reason, rounds: round }),
                _ => Err(Error::Malformed("expected a verdict".into())),
            };
        }
    }
}

/// Serve sessions on a listener, one per connection, until `max_sessions`
/// have been handled (forever if `None`).
pub fn serve_tcp<F>(listener: &TcpListener, make_prover: F, max_sessions: Option<usize>) -> Result<Vec<Result<ProverReport>>>
where
    F: Fn(&Session) -> Result<Box<dyn Prover + Send>>,
{
    let mut reports = Vec::new();
    for stream in listener.incoming() {
        let stream = stream.map_err(transport)?;
        let mut reader = BufReader::new(stream.try_clone().map_err(transport)?);
        let mut writer = stream;
        reports.push(prove_remote(&mut reader, &mut writer, &make_prover));
        if max_sessions.is_some_and(|m| reports.len() >= m) {
            break;
        }
    }
    Ok(reports)
}

pub fn verify_tcp<A: ToSocketAddrs, G: Rng>(addr: A, session: Session, rng: G) -> Result<Transcript> {
    let stream = TcpStream::connect(addr).map_err(transport)?;
    let mut reader = BufReader::new(stream.try_clone().map_err(transport)?);
    let mut writer = stream;
    verify_remote(&mut reader, &mut writer, session, rng)
}

#[cfg(test)]
mod tests {
    use super::super::prover::{HonestExact, OptimalCheat};
    use super::super::verifier::{replay, run_ip};
    use super::super::{session_modulus, RejectReason};
    use super::*;
    use crate::counting::embcolpoly_eval;
    use crate::graphs::{rand_field, PatternGraph};
    use crate::rng;

    fn session(n: usize, lie: bool) -> Session {
        let h = PatternGraph::biclique(1, 2);
        let mut r = rng::stream(4);
        let q = session_modulus(&h, n, 0, &mut r).unwrap();
        let x = rand_field(&h, n, q, &mut r);
        let c = embcolpoly_eval(&x, None).unwrap();
        Session::new(x, if lie { q.add(c, FieldElem::ONE) } else { c }).unwrap()
    }

    fn honest(_: &Session) -> Result<Box<dyn Prover + Send>> {
        Ok(Box::new(HonestExact::new()))
    }

    #[test]
    fn loopback_session_matches_in_process() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || serve_tcp(&listener, honest, Some(2)).unwrap());
        let s = session(8, false);
        let remote = verify_tcp(addr, s.clone(), rng::stream(9)).unwrap();
        let local = run_ip(s.clone(), &mut HonestExact::new(), rng::stream(9)).unwrap();
        assert_eq!(remote, local);
        assert_eq!(remote.verdict, Verdict::Accept);
        assert_eq!(replay(&remote).unwrap(), Verdict::Accept);
        let lie = verify_tcp(addr, session(8, true), rng::stream(9)).unwrap();
        assert!(!lie.verdict.accepted());
        let reports = server.join().unwrap();
        assert!(reports[0].as_ref().unwrap().accept);
        assert!(!reports[1].as_ref().unwrap().accept);
    }

    #[test]
    fn cheating_prover_over_the_wire() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let cheat = |_: &Session| -> Result<Box<dyn Prover + Send>> { Ok(Box::new(OptimalCheat::new())) };
        let server = std::thread::spawn(move || serve_tcp(&listener, cheat, Some(1)).unwrap());
        let t = verify_tcp(addr, session(16, true), rng::stream(1)).unwrap();
        assert!(matches!(t.verdict, Verdict::Reject { reason: RejectReason::FinalMismatch, .. }));
        server.join().unwrap();
    }

    #[test]
    fn garbage_and_hangups() {
        let s = session(4, false);
        let mut out = Vec::new();
        let mut input = std::io::Cursor::new(b"not json\n".to_vec());
        let t = verify_remote(&mut input, &mut out, s.clone(), rng::stream(0)).unwrap();
        assert_eq!(t.verdict, Verdict::Reject { round: 0, reason: RejectReason::Malformed });
        let last = String::from_utf8(out).unwrap().lines().last().unwrap().to_string();
        assert!(last.contains("\"verdict\"") && last.contains("MALFORMED"));
        let mut empty = std::io::Cursor::new(Vec::new());
        let err = verify_remote(&mut empty, &mut Vec::new(), s, rng::stream(0)).unwrap_err();
        assert!(matches!(err, Error::Transport(_)));
    }

    #[test]
    fn message_shapes() {
        let m = Message::Challenge { round: 2, value: FieldElem::ONE };
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"type":"i","round":2,"value":"1"}"#);
        let p: Message = serde_json::from_str(r#"{"type":"poly","round":0,"coeffs":["3","4"]}"#).unwrap();
        assert!(matches!(p, Message::Poly { round: 0, .. }));
    }
}
