use std::path::Path;
use std::process::{Command, Output};

fn ergodic(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergodic"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn exit_codes_follow_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let o = ergodic(&["sweep-joinings", "--max-order", "6"], d);
    assert_eq!(code(&o), 0);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("experiment,N,value_re,value_im,bound,verdict\n"));
    assert_eq!(csv.lines().count(), 1 + 25);

    std::fs::write(
        d.join("fail.toml"),
        "experiment = \"weighted_multirec\"\nx = \"rotation(GOLDEN)\"\nweight = \"level(thue-morse,0)\"\n\
         arc = \"arc(0,1/100)\"\nk = 2\nscan_max = 50\nwitness_threshold = 0.5\nschedule = { start = 64 }\n",
    )
    .unwrap();
    assert_eq!(code(&ergodic(&["run", "fail.toml"], d)), 1);

    std::fs::write(
        d.join("refused.toml"),
        "experiment = \"ww\"\nx = \"rotation(1/4)\"\ny = \"rotation(1/2)\"\nf = [\"char(1)\"]\nphi = [\"char(1)\"]\n\
         schedule = { start = 64, doublings = 3 }\n",
    )
    .unwrap();
    let o = ergodic(&["run", "refused.toml", "--format", "json"], d);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stdout).unwrap().contains("\"REFUSED\""));

    std::fs::write(d.join("bad.toml"), "experiment = \"ww\"\ntolerance = -1\n").unwrap();
    let o = ergodic(&["run", "bad.toml"], d);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stderr).unwrap().contains("tolerance"));
    assert_eq!(code(&ergodic(&["run", "missing.toml"], d)), 3);
    assert_eq!(code(&ergodic(&["frobnicate"], d)), 3);
    assert_eq!(code(&ergodic(&["--help"], d)), 0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = ergodic(
        &[
            "tempered",
            "--folner",
            "intervals",
            "--max-n",
            "100",
            "--out",
            "t.json",
            "--format",
            "json",
        ],
        d,
    );
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let report =
        ergodic_lab::report::from_json(&std::fs::read_to_string(d.join("t.json")).unwrap())
            .unwrap();
    assert_eq!(report.verdict, ergodic_lab::Verdict::Pass);
}
