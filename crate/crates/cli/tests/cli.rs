use std::process::{Command, Output};

fn fdprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdprop")).args(args).output().expect("run fdprop")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_names_every_model() {
    let o = fdprop(&["list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for name in ["queens", "golomb", "donald-v", "exactly-events", "ex-repeated"] {
        assert!(out.contains(name), "{name} missing from:\n{out}");
    }
}

#[test]
fn bench_csv_grid() {
    let o = fdprop(&["bench", "--model", "queens,magic-sequence", "--size", "6", "--policy", "dfix,events", "--queue", "fifo,lifo", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "model,cell,steps,failures,solutions,time_ms");
    assert_eq!(lines.len(), 1 + 2 * 4);
    // queens-6 has four solutions in every cell
    // labels with commas are quoted
    assert!(lines.iter().any(|l| l.starts_with("magic-sequence-6,\"events,lifo\",")));
    assert_eq!(lines.iter().filter(|l| l.starts_with("queens-6,") && l.rsplit(',').nth(1) == Some("4")).count(), 4);
}

#[test]
fn bench_relative_to_baseline() {
    let o = fdprop(&["bench", "--model", "queens", "--size", "6", "--policy", "input,dfix", "--baseline", "input"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains('%') && out.contains("average"), "{out}");
}

#[test]
fn invalid_cells_are_skipped() {
    let o = fdprop(&["bench", "--model", "queens", "--size", "5", "--fixpoint", "static,dynamic", "--dyn-events", "full"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipping"));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn trace_prints_steps() {
    let o = fdprop(&["trace", "--model", "ex-incremental", "--policy", "input"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("#1 "));
    assert!(out.lines().last().unwrap().starts_with("fixpoint after"));
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(fdprop(&["bench", "--model", "nonexistent"]).status.code(), Some(2));
    assert_eq!(fdprop(&["bench", "--model", "queens", "--size", "2"]).status.code(), Some(2));
    assert_eq!(fdprop(&["bench", "--model", "queens", "--queue", "random"]).status.code(), Some(2));
    assert_eq!(fdprop(&["frobnicate"]).status.code(), Some(2));
}
