//! Adapter for an external Prover9 binary. The problem is written to the
//! prover's standard input; nothing touches the filesystem.

use std::io::{Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::fol::Prover9Names;

use super::{ProverError, ProverProblem, ProverVerdict, Status};

pub const DEFAULT_PROVER9_TIMEOUT: Duration = Duration::from_secs(10);

/// Prover9 input text for `problem`, with one renaming shared by all
/// formulas.
pub fn prover9_input(problem: &ProverProblem) -> String {
    let names = Prover9Names::for_sentences(problem.premises.iter().chain([&problem.conclusion]));
    let mut out = String::from("formulas(assumptions).\n");
    for p in &problem.premises {
        out.push_str(&names.render(p));
        out.push('\n');
    }
    out.push_str("end_of_list.\n\nformulas(goals).\n");
    out.push_str(&names.render(&problem.conclusion));
    out.push_str("\nend_of_list.\n");
    out
}

/// Reads a Prover9 transcript. `THEOREM PROVED` means entailed; `SEARCH
/// FAILED` after the set of support ran empty means not entailed; a search
/// stopped by a resource limit is inconclusive.
pub fn interpret_prover9_output(stdout: &str, exit_code: Option<i32>) -> Result<Status, ProverError> {
    if stdout.contains("THEOREM PROVED") {
        return Ok(Status::Entailed);
    }
    if stdout.contains("SEARCH FAILED") {
        // Prover9 exits with 2 when the set of support is exhausted.
        if stdout.contains("sos_empty") || exit_code == Some(2) {
            return Ok(Status::NotEntailed);
        }
        return Ok(Status::Unsupported);
    }
    let tail: String = stdout.lines().rev().take(5).collect::<Vec<_>>().join(" | ");
    Err(ProverError::UnparseableOutput(if tail.is_empty() {
        format!("empty output (exit code {exit_code:?})")
    } else {
        tail
    }))
}

/// Runs Prover9 on `problem`, killing it after `timeout`.
pub fn prove_external(
    problem: &ProverProblem,
    binary_path: &Path,
    timeout: Duration,
) -> Result<ProverVerdict, ProverError> {
    let input = prover9_input(problem);
    let mut child = Command::new(binary_path)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| ProverError::Spawn(format!("{}: {e}", binary_path.display())))?;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let writer = thread::spawn(move || {
        // A prover that exits early closes the pipe; that is not an error here.
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout.read_to_string(&mut buf);
        buf
    });

    let started = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if started.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(ProverError::Timeout(timeout));
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(e) => return Err(ProverError::Spawn(e.to_string())),
        }
    };
    let _ = writer.join();
    let output = reader.join().unwrap_or_default();
    interpret_prover9_output(&output, status.code()).map(ProverVerdict::external)
}
