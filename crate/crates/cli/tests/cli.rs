use std::path::Path;
use std::process::{Command, Output};

fn plethys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plethys"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn zoo_fixture_roundtrips_through_the_parser() {
    let emitted = plethys(&["zoo", "surjection", "--nmax", "2"]);
    assert!(emitted.status.success(), "{}", stderr(&emitted));
    let text = stdout(&emitted);
    assert!(text.starts_with("OBJECTS\n"));

    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "surj.fx", &text);
    for suite in ["category", "monoid", "monoidal"] {
        let o = plethys(&["check", suite, "--fixture", &path]);
        assert!(o.status.success(), "{suite}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("result: pass"));
    }
}

#[test]
fn parse_errors_report_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.fx", "OBJECTS\nA idA\nMORPHISMS\nf A\n");
    let o = plethys(&["check", "category", "--fixture", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":4:1:"), "{}", stderr(&o));

    let path = write(dir.path(), "dangling.fx", "OBJECTS\nA idA\nBIMODULE\nval A Z x\n");
    let o = plethys(&["check", "category", "--fixture", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":4:7: unknown object Z"), "{}", stderr(&o));
}

#[test]
fn corrupted_unit_table_fails_the_monoid_suite() {
    let emitted = plethys(&["zoo", "surjection", "--nmax", "2"]);
    let text = stdout(&emitted);
    assert!(text.contains("s2:01 f01\n"));
    let broken = text
        .replace("s2:01 f01\n", "s2:01 f10\n")
        .replace("s2:10 f10\n", "s2:10 f01\n");

    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "broken.fx", &broken);
    let o = plethys(&["check", "monoid", "--fixture", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation:"), "{}", stdout(&o));
    assert!(stdout(&o).contains("result: fail"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = [
        "check",
        "monoid",
        "--zoo",
        "surjection",
        "--nmax",
        "2",
        "--seed",
        "7",
        "--summary",
    ];
    let first = plethys(&args);
    let second = plethys(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).contains("summary.status=pass"));
}

#[test]
fn rep_suite_accepts_constant_fibers() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "rep.fx",
        "OBJECTS\nA idA\nBIMODULE\nval A A x y\nREP\nx u v\ny w\n",
    );
    let o = plethys(&["check", "rep", "--fixture", &path]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn finvect_target_linearizes_before_checking() {
    let o = plethys(&[
        "check",
        "monoid",
        "--zoo",
        "surjection",
        "--nmax",
        "2",
        "--target",
        "finvect",
    ]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
}
