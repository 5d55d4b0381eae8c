use std::path::Path;
use std::process::{Command, Output};

fn prio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prio"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn build(dir: &Path, n: usize, strategy: &str) -> (String, String) {
    let path = dir.join(format!("code-{n}-{strategy}.json"));
    let path = path.to_str().unwrap().to_string();
    let out = prio(&[
        "build",
        "-n",
        &n.to_string(),
        "--strategy",
        strategy,
        "--output",
        &path,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    (path, stdout(&out).trim().to_string())
}

#[test]
fn build_banners() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(build(dir.path(), 2, "builtin").1, "(2; 3, 2)");
    assert_eq!(build(dir.path(), 3, "builtin").1, "(3; 5, 4)");
    assert_eq!(build(dir.path(), 4, "builtin").1, "(4; 7, 8)");
    assert_eq!(build(dir.path(), 15, "builtin").1, "(15; 114, 16384)");
}

#[test]
fn build_without_output_writes_descriptor_to_stdout() {
    let out = prio(&["build", "-n", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim(), "(3; 5, 4)");
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["n"], 3);
    assert_eq!(value["m1"], 5);
}

#[test]
fn descriptor_file_is_stable_through_load() {
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = build(dir.path(), 6, "builtin");
    let first = std::fs::read_to_string(&path).unwrap();
    let parsed = prio_core::CodeDescriptor::from_json(&first).unwrap();
    assert_eq!(parsed.to_json(), first);
    let again = prio_core::CodeDescriptor::from_code(&parsed.to_code().unwrap(), false);
    assert_eq!(again.to_json(), first);
}

#[test]
fn n3_golden_table() {
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = build(dir.path(), 3, "builtin");
    let out = prio(&["table", "--code", &path]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "m2\\m1,0,1,2,3,4\n\
         0,000,112,121,211,122\n\
         1,001,002,120,210,220\n\
         2,010,102,020,201,202\n\
         3,100,012,021,200,022\n"
    );
    let text = stdout(&prio(&["table", "-n", "3", "--format", "text"]));
    assert_eq!(text.lines().count(), 6);
    let json: serde_json::Value =
        serde_json::from_slice(&prio(&["table", "-n", "3", "--format", "json"]).stdout).unwrap();
    assert_eq!(json["cells"][2][1], "102");
}

#[test]
fn encode_and_decode() {
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = build(dir.path(), 3, "builtin");
    assert_eq!(
        stdout(&prio(&["encode", "--code", &path, "1", "2"])),
        "102\n"
    );
    assert_eq!(
        stdout(&prio(&["decode", "--code", &path, "102"])),
        "page1=1 page2=2\n"
    );
    assert_eq!(
        stdout(&prio(&["decode", "-n", "3", "000"])),
        "page1=0 page2=0\n"
    );
    let json: serde_json::Value =
        serde_json::from_slice(&prio(&["decode", "-n", "3", "022", "--format", "json"]).stdout)
            .unwrap();
    assert_eq!(json, serde_json::json!({"page1": 4, "page2": 3}));
}

#[test]
fn runtime_errors_exit_1() {
    for args in [
        &["encode", "-n", "3", "5", "0"][..],
        &["encode", "-n", "3", "0", "4"],
        &["decode", "-n", "3", "222"],
        &["decode", "-n", "3", "1x2"],
        &["table", "--code", "/nonexistent/code.json"],
        &["rates", "2", "9"],
        &["search-patterns", "--u", "0", "-n", "5"],
        &[
            "search-patterns",
            "--u",
            "2",
            "-n",
            "10",
            "--strategy",
            "builtin",
        ],
    ] {
        let out = prio(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["build"][..],
        &["build", "-n", "1"],
        &["build", "-n", "25"],
        &["build", "-n", "4", "--strategy", "random"],
        &["build", "-n", "4", "--format", "csv"],
        &["table"],
        &["table", "-n", "3", "--code", "x.json"],
        &["verify", "-n", "3", "--format", "csv"],
        &["frobnicate"],
    ] {
        assert_eq!(prio(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn rates_csv() {
    let out = stdout(&prio(&["rates", "3", "15"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 14);
    assert_eq!(lines[0], "n,M1,M2,R_sum,fixed_M,fixed_R");
    assert_eq!(lines[1], "3,5,4,1.441,4,1.333");
    assert_eq!(lines[13], "15,114,16384,1.389,-,-");
    let default = stdout(&prio(&["rates"]));
    assert_eq!(default, out);
}

#[test]
fn search_patterns() {
    let out = prio(&[
        "search-patterns",
        "--u",
        "2",
        "-n",
        "7",
        "--strategy",
        "exact",
    ]);
    assert!(out.status.success());
    let family: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(family["provenance"], "exact");
    assert_eq!(family["patterns"].as_array().unwrap().len(), 7);

    let greedy = stdout(&prio(&[
        "search-patterns",
        "--u",
        "2",
        "-n",
        "5",
        "--strategy",
        "greedy",
    ]));
    assert_eq!(
        greedy,
        "{\"n\":5,\"u\":2,\"provenance\":\"greedy\",\"patterns\":[[0,1,2],[0,3,4]]}\n"
    );
    let builtin = stdout(&prio(&[
        "search-patterns",
        "--u",
        "3",
        "-n",
        "9",
        "--strategy",
        "builtin",
        "--format",
        "text",
    ]));
    assert_eq!(
        builtin,
        "[0, 1, 2, 3, 4]\n[3, 4, 5, 6, 7]\n[0, 1, 6, 7, 8]\n"
    );
}

#[test]
fn build_then_verify_every_strategy() {
    let dir = tempfile::tempdir().unwrap();
    for strategy in ["builtin", "greedy", "exact"] {
        for n in 2..=12 {
            let (path, _) = build(dir.path(), n, strategy);
            let out = prio(&["verify", "--code", &path]);
            assert_eq!(
                out.status.code(),
                Some(0),
                "n={n} {strategy}\n{}",
                stdout(&out)
            );
            assert!(stdout(&out).ends_with("result: pass\n"));
        }
    }
}

#[test]
fn verify_flags_a_damaged_file() {
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = build(dir.path(), 5, "builtin");
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // Drop one word of the first weight-2 block.
    value["page_one"][6]["vectors"]
        .as_array_mut()
        .unwrap()
        .remove(0);
    std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    let out = prio(&["verify", "--code", &path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"inclusion"), "{failed:?}");
    assert!(failed.contains(&"page1-structure"));
}
