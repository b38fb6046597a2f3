use std::path::Path;
use std::process::{Command, Output};

fn vilenkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vilenkin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(csv: &str) -> Vec<&str> {
    csv.lines()
        .filter(|l| !l.contains("config_hash="))
        .collect()
}

#[test]
fn exit_codes() {
    assert_eq!(
        vilenkin(&["lemma1", "--radix", "2^4"]).status.code(),
        Some(0)
    );
    assert_eq!(vilenkin(&["--help"]).status.code(), Some(0));
    assert_eq!(vilenkin(&["--version"]).status.code(), Some(0));
    assert_eq!(vilenkin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(vilenkin(&["lemma1"]).status.code(), Some(1));
    assert_eq!(
        vilenkin(&["lemma1", "--radix", "1,2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        vilenkin(&["lebesgue-scan", "--radix", "2^4", "--to", "16"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        vilenkin(&["divergence", "--radix", "2^4", "--alphas", "1,4"])
            .status
            .code(),
        Some(1)
    );
    // A negative tolerance is rejected; a zero tolerance makes float checks fail.
    assert_eq!(
        vilenkin(&["equiv-check", "--radix", "2^4", "--tolerance", "-1"])
            .status
            .code(),
        Some(1)
    );
    let strict = vilenkin(&[
        "equiv-check",
        "--radix",
        "3^4",
        "--random",
        "20",
        "--tolerance",
        "0",
    ]);
    assert_eq!(strict.status.code(), Some(2), "{}", stdout(&strict));
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &[
            "gat",
            "--radix",
            "2^6",
            "--corpus-size",
            "6",
            "--seed",
            "4",
            "--threads",
            "2",
        ][..],
        &[
            "lebesgue-scan",
            "--radix",
            "2,3,4",
            "--depth",
            "5",
            "--threads",
            "3",
        ][..],
        &[
            "divergence",
            "--radix",
            "2,3",
            "--depth",
            "8",
            "--alpha-rule",
            "k4",
            "--format",
            "json",
        ][..],
    ] {
        let a = vilenkin(args);
        let b = vilenkin(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let base = [
        "gat",
        "--radix",
        "2^6",
        "--corpus-size",
        "8",
        "--seed",
        "11",
    ];
    let one = vilenkin(&[&base[..], &["--threads", "1"]].concat());
    let four = vilenkin(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(body(&stdout(&one)), body(&stdout(&four)));
}

#[test]
fn csv_header_and_columns() {
    let out = stdout(&vilenkin(&["lebesgue-scan", "--radix", "2^12"]));
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some(concat!(
            "# vilenkin lebesgue-scan ",
            env!("CARGO_PKG_VERSION")
        ))
    );
    assert!(lines
        .next()
        .unwrap()
        .starts_with("# radix=2^12 depth=12 config_hash="));
    assert_eq!(lines.next(), Some("# table=lebesgue"));
    assert_eq!(
        lines.next(),
        Some("n,v,v_star,L_n,lower_bound,upper_bound,lower_slack,upper_slack")
    );
    let rows: Vec<&str> = out
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 4095);
    assert!(rows[0].starts_with("1,") && rows[1].starts_with("2,"));
    let l = |row: &str| row.split(',').nth(3).unwrap().parse::<f64>().unwrap();
    assert_eq!(l(rows[1]), 1.0);
    assert_eq!(l(rows[2]), 1.5);
    for k in 1..12 {
        assert!((l(rows[(1usize << k) - 1]) - 1.0).abs() < 1e-12);
    }
    assert!(out.contains("# violations=0\n"));
}

#[test]
fn json_mirror() {
    let out = stdout(&vilenkin(&["lemma1", "--radix", "2^5", "--format", "json"]));
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["experiment"], "lemma1");
    assert_eq!(doc["depth"], 5);
    assert_eq!(doc["tables"][0]["rows"][0][3], "1/1");
    assert_eq!(doc["tables"][0]["rows"][2][3], "2/3");
    assert_eq!(doc["summary"]["violations"], 0);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &config,
        format!(
            "# scan settings\nradix = 2^6\nfrom = 5\nto = 9\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let cfg = config.to_str().unwrap();

    let o = vilenkin(&["lebesgue-scan", "--config", cfg]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# radix=2^6 depth=6"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 5);

    let o = vilenkin(&[
        "lebesgue-scan",
        "--config",
        cfg,
        "--to",
        "6",
        "--radix",
        "3^3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# radix=3^3 depth=3"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 2);

    std::fs::write(&config, "radix=2^4\nthreads=zero\n").unwrap();
    assert_eq!(
        vilenkin(&["lemma1", "--config", cfg]).status.code(),
        Some(1)
    );
    assert_eq!(
        vilenkin(&["lemma1", "--config", &format!("{cfg}.missing")])
            .status
            .code(),
        Some(1)
    );
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn transform_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let c = dir.path().join("c.json");
    let g = dir.path().join("g.json");
    let values: Vec<String> = (0..24)
        .map(|t| format!("[{}.5,{}]", t % 5, t % 3))
        .collect();
    write(
        &f,
        &format!(
            r#"{{"radices":[2,3,4],"depth":3,"values":[{}]}}"#,
            values.join(",")
        ),
    );

    let o = vilenkin(&[
        "transform",
        "--input",
        f.to_str().unwrap(),
        "--verify",
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let notes = String::from_utf8(o.stderr).unwrap();
    assert!(notes.contains("naive_deviation="), "{notes}");
    let o = vilenkin(&[
        "transform",
        "--input",
        c.to_str().unwrap(),
        "--inverse",
        "--out",
        g.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));

    let read = |p: &Path| -> Vec<[f64; 2]> {
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        serde_json::from_value(v["values"].clone()).unwrap()
    };
    for (a, b) in read(&f).iter().zip(read(&g)) {
        assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
    }

    // Constant one transforms to the unit vector at 0.
    write(
        &f,
        r#"{"radices":[3,3],"depth":2,"values":[[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],[1,0]]}"#,
    );
    let o = vilenkin(&["transform", "--input", f.to_str().unwrap()]);
    let coeffs: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let coeffs: Vec<[f64; 2]> = serde_json::from_value(coeffs["values"].clone()).unwrap();
    assert!((coeffs[0][0] - 1.0).abs() < 1e-12);
    assert!(coeffs[1..]
        .iter()
        .all(|c| c[0].abs() < 1e-12 && c[1].abs() < 1e-12));

    write(
        &f,
        "{\"radices\": [2,\n  2], \"depth\": 2,\n  \"values\": [[1,0],,]}",
    );
    let o = vilenkin(&["transform", "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 3"));
}

#[test]
fn kernel_and_equivalence_commands() {
    let o = vilenkin(&["kernel", "--radix", "2,3,4", "--depth", "9"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# identity_cases=19"));

    let o = stdout(&vilenkin(&["kernel", "--radix", "2^3", "--n", "3"]));
    assert!(o.contains("# lebesgue_constant=1.5"));
    assert!(o.contains("\n0,3.0,0.0\n"));

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    write(
        &f,
        r#"{"radices":[2,2],"depth":2,"values":[[1,0],[-1,0],[0,0],[0,2]]}"#,
    );
    let o = vilenkin(&["equiv-check", "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# radix=2^2 depth=2"));
}

#[test]
fn gat_rank_two_convergence_vanishes() {
    let o = stdout(&vilenkin(&[
        "gat",
        "--radix",
        "2^6",
        "--corpus-size",
        "2",
        "--ranks",
        "2",
    ]));
    let rows: Vec<Vec<&str>> = o
        .lines()
        .skip_while(|l| !l.starts_with("member,rank,n,"))
        .skip(1)
        .take_while(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 2 * 5);
    // S_k f = f for k ≥ M_2, so the sum stops growing and the mean decays like 1/ln n.
    let conv: Vec<f64> = rows[..5].iter().map(|r| r[3].parse().unwrap()).collect();
    let n: Vec<f64> = rows[..5].iter().map(|r| r[2].parse().unwrap()).collect();
    for i in 1..5 {
        let scaled = conv[i] * n[i].ln() / (conv[0] * n[0].ln());
        assert!((scaled - 1.0).abs() < 1e-9);
    }
}
