use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use txs_cli::script::{Interpreter, Options, Status};

fn txs() -> Command {
    Command::new(env!("CARGO_BIN_EXE_txs"))
}

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn with_stdin(mut cmd: Command, input: &str) -> Output {
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("txs-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn spin2_example_passes() {
    let o = txs().arg("run").arg(example("spin2.txs")).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let last = out.lines().last().unwrap();
    assert_eq!(
        last,
        "-PD[b][PD[a][H[c,-c]]] + PD[-c][PD[a][H[b,c]]] + PD[-c][PD[b][H[a,c]]] - PD[-c][PD[c][H[a,b]]] \
         - metric[a,b]*PD[-d][PD[-c][H[c,d]]] + metric[a,b]*PD[-d][PD[d][H[c,-c]]]"
    );
}

#[test]
fn gauss_bonnet_example_passes() {
    let o = txs().arg("run").arg(example("gauss-bonnet.txs")).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).ends_with("{C3 -> (-4 - C1 - C2), C4 -> (2 + 1/2*C1 + C2)}\n"));
}

#[test]
fn canon_subcommand() {
    let o = txs().args(["canon", "Ricci[-c,-a]"]).output().unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o), "Ricci[-a,-c]\n");
    let o = txs().args(["--format", "latex", "canon", "Ricci[-c,-a]"]).output().unwrap();
    assert_eq!(stdout(&o), "R_{ac}\n");
    let o = txs().args(["--format", "json", "canon", "Ricci[-c,-a]"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v.is_object() || v.is_array(), "{}", v);
}

#[test]
fn one_shot_subcommands() {
    let run = |args: &[&str]| {
        let o = txs().args(args).output().unwrap();
        assert!(o.status.success(), "{:?}: {}", args, stderr(&o));
        stdout(&o)
    };
    assert_eq!(run(&["--dim", "2", "euler"]), "-RicciScalar[]\n");
    let out = run(&["contractions", "Riemann[-a,-b,-c,-d]*Riemann[-e,-f,-g,-h]"]);
    assert_eq!(out.matches(", ").count() + 1, 4, "{}", out);
    assert_eq!(
        run(&["contractions", "Riemann[-a,-b,-c,-d]*Riemann[-e,-f,-g,-h]", "--frees=-a,-b", "--sym", "antisym"]),
        "{}\n"
    );
    assert_eq!(run(&["var-d", "RicciScalar[]"]), "-g[a,c]*g[b,d]*Ricci[-c,-d]\n");
    assert_eq!(run(&["simplify", "CD[a][Ricci[-a,-b]]"]), "1/2*CD[-b][RicciScalar[]]\n");
    let out = run(&["--dim", "2", "ddis", "Riemann[-a,-b,-c,-d]", "--frees=-a,-b"]);
    assert!(out.starts_with("{") && out.contains("RicciScalar"), "{}", out);
    let out = run(&["configurations", "Ricci[-a,-b]*V[-c]", "--prelude", temp_file("v.txs", "manifold M d a..h\nmetric g on M signature -1\ntensor V(a)\n").to_str().unwrap()]);
    assert!(out.contains("V[-c]"), "{}", out);
}

#[test]
fn solve_subcommands_emit_let_statements() {
    let eqs = temp_file("eqs.txt", "C1*Ricci[-a,-b] + C2*g[-a,-b]*RicciScalar[] == Ricci[-a,-b]\n");
    let prelude = temp_file("p.txs", "manifold M d a..h\nmetric g on M signature -1\nconstants C1 C2\n");
    let o = txs()
        .args(["--prelude", prelude.to_str().unwrap(), "solve-constants", eqs.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "let solution = {C1 -> 1, C2 -> 0}\n");

    let eqs = temp_file("teqs.txt", "Ricci[-a,-b] - 2*V[-a]*V[-b]\n");
    let prelude = temp_file("q.txs", "manifold M d a..h\nmetric g on M signature -1\ntensor V(a)\n");
    let o = txs()
        .args([
            "--prelude",
            prelude.to_str().unwrap(),
            "solve-tensors",
            eqs.to_str().unwrap(),
            "--target",
            "Ricci",
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "let rules = {Ricci[-a,-b] -> 2*V[-a]*V[-b]}\n");
}

#[test]
fn undeclared_tensor_error_names_head_and_line() {
    let p = temp_file("bad.txs", "manifold M 4 a..h\nmetric g on M signature -1\n\nprint Foo[-a]\n");
    let o = txs().arg("run").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 4"), "{}", err);
    assert!(err.contains("Foo"), "{}", err);
}

#[test]
fn parse_errors_have_locations() {
    let p = temp_file("syntax.txs", "manifold M 4 a..h\nprint Riemann[-a,-b\n");
    let o = txs().arg("run").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2: syntax error at line 1, column"), "{}", stderr(&o));
}

#[test]
fn failed_assertion_exits_with_one_and_prints_both_sides() {
    let p = temp_file(
        "fail.txs",
        "manifold M 4 a..h\nmetric g on M signature -1\nexpect Ricci[-a,-b] == Ricci[-b,-a] + 1*Ricci[-a,-b]\nprint 1\n",
    );
    let o = txs().arg("run").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("left:  Ricci[-a,-b]"), "{}", err);
    assert!(err.contains("right: 2*Ricci[-a,-b]"), "{}", err);
    assert_eq!(stdout(&o), "", "execution stops at the failure");

    let o = txs().arg("run").arg("--keep-going").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn usage_errors_exit_with_two() {
    let o = txs().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = txs().args(["--conventions", "riemann=3", "canon", "g[a,b]"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = txs().args(["run", "/nonexistent/script.txs"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn conventions_flag_flips_commutators() {
    let p = temp_file(
        "conv.txs",
        "manifold M 4 a..h\nmetric g on M signature -1\ntensor V(a)\nsort_covds CD[-b][CD[-c][V[-a]]]\n",
    );
    let plus = stdout(&txs().arg("run").arg(&p).output().unwrap());
    let minus = stdout(
        &txs()
            .args(["--conventions", "riemann=-1,ricci=+1", "run"])
            .arg(&p)
            .output()
            .unwrap(),
    );
    assert!(plus.contains("+ Riemann"), "{}", plus);
    assert!(minus.contains("- Riemann"), "{}", minus);
}

#[test]
fn repl_recovers_from_errors_and_quits_cleanly() {
    let mut cmd = txs();
    cmd.arg("repl");
    let o = with_stdin(cmd, "canon Ricci[-c,-a]\nlet x = Ricci[a\nprint Nope[a]\ncanon Ricci[-b,-a]\n:quit\nprint 1\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Ricci[-a,-c]\nRicci[-a,-b]\n");
    assert!(stderr(&o).contains("syntax error"));
    assert!(stderr(&o).contains("Nope"));
}

#[test]
fn repl_transcript_replays_byte_identically() {
    let save = std::env::temp_dir().join(format!("txs-save-{}.txs", std::process::id()));
    let input = format!(
        "tensor T(a,b,c) sym {{{{a,b}},{{c}}}}\n\
         let x = T[-c,-b,-a] + T[-a,-c,-b]\n\
         canon x\n\
         bogus statement here\n\
         young(T[-a,-b,-c], {{{{a,b}},{{c}}}})\n\
         let y = euler(4)\n\
         print y\n\
         :save {}\n\
         :quit\n",
        save.display()
    );
    let mut cmd = txs();
    cmd.arg("repl");
    let live = with_stdin(cmd, &input);
    assert_eq!(live.status.code(), Some(0), "{}", stderr(&live));
    let saved = std::fs::read_to_string(&save).unwrap();
    assert!(!saved.contains("bogus"));
    let replay = txs().arg("run").arg(&save).output().unwrap();
    assert!(replay.status.success(), "{}", stderr(&replay));
    assert_eq!(live.stdout, replay.stdout);
}

#[test]
fn interpreter_reports_status_per_statement() {
    let mut it = Interpreter::new(Options {
        keep_going: true,
        ..Options::default()
    });
    let report = it.run_source(
        "manifold M 3 a..f\nmetric g on M signature 1\nexpect-count 1 Ricci[-a,-b]\n\
         expect-zero Ricci[-a,-b]\nprint Ricci[-b,-a]\nmanifold N 3 a..c\n",
    );
    let st: Vec<Status> = report.statements.iter().map(|s| s.status).collect();
    assert_eq!(st, [Status::Ok, Status::Ok, Status::Ok, Status::Fail, Status::Ok, Status::Error]);
    assert_eq!(report.exit_code(), 2);
    assert_eq!(report.outputs(), "Ricci[-b,-a]\n");
    assert_eq!(report.summary().lines().count(), 6);
}

#[test]
fn scripts_bind_solutions_and_rules() {
    let mut it = Interpreter::new(Options::default());
    let report = it.run_source(
        "manifold M d a..h\nmetric g on M signature -1\nconstants k\ntensor S(a,b) sym symmetric\n\
         let sol = {k -> 3}\nexpect subst(k*RicciScalar[], sol) == 3*RicciScalar[]\n\
         let r = {S[a,b] -> Ricci[a,b]}\nexpect subst(S[-a,-b]*g[a,b], r) == RicciScalar[]\n\
         let div = {g[a,b] -> (2*Ricci[a,b])/(RicciScalar[])}\nexpect-count 1 div\n\
         let l = {Ricci[-a,-b], RicciScalar[]}\nexpect length(l) == 2\nexpect item(l, 2) == RicciScalar[]\n\
         check-numeric Riemann[-a,-b,-c,-d] + Riemann[-b,-a,-c,-d]\n",
    );
    let bad: Vec<_> = report
        .statements
        .iter()
        .filter(|s| s.status != Status::Ok && !s.source.starts_with("check-numeric"))
        .map(|s| s.output.clone())
        .collect();
    assert!(bad.is_empty(), "{:?}", bad);
    // the manifold dimension is symbolic, so the numeric check cannot run
    assert_eq!(report.statements.last().unwrap().status, Status::Error);
}

#[test]
fn tensor_symmetry_keyword_is_optional() {
    let mut it = Interpreter::new(Options::default());
    let report = it.run_source(
        "manifold M d a..h\nmetric g on M signature -1\ntensor S(a,b) symmetric\ntensor A(a,b) sym antisymmetric\n\
         tensor T(a,b,c) {{a,b},{c}}\nexpect-zero S[a,b] - S[b,a]\nexpect-zero A[a,b] + A[b,a]\n\
         expect-zero T[a,b,c] + T[c,b,a]\n",
    );
    assert_eq!(report.exit_code(), 0, "{}", report.summary());
}
