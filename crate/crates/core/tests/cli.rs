use std::path::PathBuf;
use std::process::{Command, Output};

use causalnet::net::serialize_net;
use causalnet::transforms::{builtin, Builtin};

fn nets_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../nets")
}

fn net_path(name: &str) -> String {
    nets_dir().join(format!("{name}.net")).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causalnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn shipped_nets_match_the_builtins() {
    for b in Builtin::ALL {
        let on_disk = std::fs::read_to_string(net_path(b.name())).unwrap();
        assert_eq!(on_disk, serialize_net(&builtin(b)), "{}", b.name());
        let o = run(&["example", b.name()]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), on_disk);
    }
}

#[test]
fn compare_reports_a_witness() {
    let o = run(&["compare", &net_path("repeated_pure_m"), &net_path("centralised"), "-k", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(
        stdout(&o),
        "INEQUIVALENT (bound 4)\nwitness (B, complete):\nevents: e1:a e2:a e3:b e4:c\norder: e1<e2 e1<e4 e2<e3 e4<e3\n"
    );
    let o = run(&["compare", &net_path("repeated_pure_m"), &net_path("deadlocking"), "-k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "EQUIVALENT (bound 3)\n");
}

#[test]
fn distributed_verdicts_and_exit_codes() {
    let o = run(&["distributed", &net_path("repeated_pure_m")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "NOT DISTRIBUTED\nchain: a -> b -> c\nconcurrent: (a, c)\n");
    let o = run(&["distributed", &net_path("deadlocking")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("DISTRIBUTED\n"));
}

#[test]
fn pure_m_and_deadlock() {
    let o = run(&["pure-m", &net_path("pure_m")]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(1), "pure M: (a, b, c) @ {p,q}\n".into()));
    let o = run(&["pure-m", &net_path("centralised")]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "no pure M\n".into()));
    let o = run(&["deadlock", &net_path("deadlocking")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("local deadlock\ntrace: [tau1]\nmarking: {pb,qc}\ndead: a\nlive: b,c\n"));
    let o = run(&["deadlock", &net_path("pure_m")]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "no local deadlock\n".into()));
}

#[test]
fn reach_counts_dependency_markings() {
    let o = run(&["reach", "--dependency", &net_path("repeated_pure_m")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("markings: 5\nbound: 81\n"));
}

#[test]
fn tsv_output() {
    let o = run(&["--format", "tsv", "compare", &net_path("repeated_pure_m"), &net_path("centralised"), "-k", "4"]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "verdict\tinequivalent\t4");
    assert_eq!(lines[1], "witness\tB\tcomplete");
    assert!(lines.iter().all(|l| l.contains('\t')));
}

#[test]
fn refine_writes_a_contact_free_net() {
    let dir = std::env::temp_dir().join(format!("causalnet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("refined.net");
    let o = run(&["refine", &net_path("repeated_pure_m"), "-t", "b", "-o", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "refined b: new place s_b, new transition tau_b\n");
    let o = run(&["validate", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["compare", &net_path("repeated_pure_m"), target.to_str().unwrap(), "-k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn errors_exit_with_two() {
    let o = run(&["validate", "/nonexistent/x.net"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["refine", &net_path("pure_m"), "-t", "zz"]).status.code(), Some(2));
    assert_eq!(run(&["example", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["unfold".to_owned(), net_path("centralised"), "-k".into(), "3".into()],
        vec!["pomsets".to_owned(), net_path("deadlocking"), "-k".into(), "3".into()],
        vec!["reach".to_owned(), "--dependency".into(), net_path("centralised")],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
    }
}
