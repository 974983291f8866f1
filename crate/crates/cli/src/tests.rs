use super::*;
use prlocus::crystals::supersingular;

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("prlocus").chain(args.iter().copied()))
}

fn body(o: &Outcome) -> Vec<&str> {
    o.stdout.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn supersingular_dominates_ordinary() {
    let o = cli(&["polygon", "1/2x2", "0x1, 1x1"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(body(&o).contains(&"dominates,0,1,true"));
    assert!(body(&o).contains(&"dominates,1,0,false"));
}

#[test]
fn malformed_polygon_exits_2() {
    for bad in ["1/2", "ax1", "0x-1", ""] {
        let o = cli(&["polygon", bad]);
        assert_eq!(o.code, EXIT_INPUT, "{bad:?}");
        assert!(o.stderr.contains("error"), "{bad:?}");
    }
    assert_eq!(cli(&["polygon"]).code, EXIT_INPUT);
    assert_eq!(
        cli(&["polygon", "0x1", "--format", "yaml"]).code,
        EXIT_INPUT
    );
}

#[test]
fn polygon_mean_matches_the_library() {
    let specs = ["0x1, 1x1", "1/2x2", "0x1,1/3x3,1x1"];
    let o = cli(&["polygon", specs[0], specs[1], "--format", "json"]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    let ps: Vec<Polygon> = specs[..2]
        .iter()
        .map(|s| parse_polygon(s, None).unwrap())
        .collect();
    assert_eq!(
        v["result"]["mean"],
        serde_json::to_value(mean(&ps).unwrap().to_json()).unwrap()
    );
    // different endpoints: no mean, no dominance
    let o = cli(&["polygon", specs[0], specs[2], "--format", "json"]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["result"]["mean"], Value::Null);
    assert_eq!(v["result"]["dominates"][0][1], Value::Null);
}

#[test]
fn counterexample_at_q2_is_empty() {
    let o = cli(&["counterexample", "--q", "2", "--format", "csv"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(
        body(&o),
        vec![
            "q,profile_pi1,profile_pi2,candidates,count",
            "2,4 2,3 3,4096,0"
        ]
    );
}

#[test]
fn counterexample_budget_exits_3() {
    assert_eq!(
        cli(&["counterexample", "--q", "3", "--budget", "1000"]).code,
        EXIT_BUDGET
    );
}

#[test]
fn localmodel_u11_table() {
    let o = cli(&["localmodel", "U11", "--q", "5"]);
    assert_eq!(o.code, EXIT_OK);
    let b = body(&o);
    for row in [
        "5,torsion,25",
        "5,isotropy,50",
        "5,intersection,10",
        "5,total,65",
    ] {
        assert!(b.contains(&row), "{row}");
    }
    assert_eq!(cli(&["localmodel", "U31"]).code, EXIT_INPUT);
    assert_eq!(
        cli(&["localmodel", "U21", "--q", "7", "--budget", "100"]).code,
        EXIT_BUDGET
    );
    assert_eq!(cli(&["localmodel", "--q", "9"]).code, EXIT_OK);
}

#[test]
fn localmodel_json_carries_equations_and_points() {
    let o = cli(&[
        "localmodel",
        "U21",
        "--q",
        "3",
        "--format",
        "json",
        "--verbose",
    ]);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["result"]["equations"][2], "d + x^2*d + y^2*d = 0");
    assert_eq!(
        v["result"]["points"].as_array().unwrap().len() as u64,
        v["result"]["counts"]["total"].as_u64().unwrap()
    );
}

#[test]
fn deform_supersingular_trace() {
    let o = cli(&["deform"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let b = body(&o);
    assert_eq!(b.len(), 2);
    assert!(b[0].starts_with("step 1: newton (1/2x2) -> (0x1, 1x1)"));
    assert_eq!(b[1], "mu_ordinary: true");
    assert!(o.stdout.lines().next().unwrap().contains("precision="));
    let al = cli(&["deform", "--case", "AL"]);
    assert_eq!(al.code, EXIT_OK, "{}", al.stderr);
    assert_eq!(body(&al).last(), Some(&"mu_ordinary: true"));
}

#[test]
fn deform_errors_map_to_exit_codes() {
    assert_eq!(cli(&["deform", "--case", "AR"]).code, EXIT_UNSUPPORTED);
    assert_eq!(cli(&["deform", "--case", "AU"]).code, EXIT_INPUT);
    assert_eq!(cli(&["deform", "--case", "XX"]).code, EXIT_INPUT);
    // a signature whose PR polygon is not the Hodge polygon
    assert_eq!(cli(&["deform", "--sig", "0"]).code, EXIT_INPUT);
    let e = CliError::from(DeformError::Crystal(CrystalError::PrecisionExhausted {
        m: 4,
    }));
    assert_eq!(e.code, EXIT_PRECISION);
    assert_eq!(
        CliError::from(CrystalError::PrecisionExhausted { m: 4 }).code,
        EXIT_PRECISION
    );
    let e = CliError::from(DeformError::BudgetExhausted {
        budget: 1,
        trace: vec![],
    });
    assert_eq!(e.code, EXIT_BUDGET);
}

#[test]
fn deform_random_fixture_is_seeded() {
    let args = [
        "deform",
        "--fixture",
        "random",
        "--case",
        "C",
        "--h",
        "2",
        "--seed",
        "3",
        "--format",
        "json",
    ];
    let a = cli(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    assert_eq!(a, cli(&args));
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["result"]["mu_ordinary"], true);
    assert_eq!(v["parameters"]["seed"], 3);
}

#[test]
fn deform_reads_a_crystal_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let c = supersingular(5, Case::C).unwrap();
    std::fs::write(
        &path,
        serde_json::to_string(&CrystalJson::from_crystal(&c)).unwrap(),
    )
    .unwrap();
    let o = cli(&["deform", "--input", path.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(body(&o).last(), Some(&"mu_ordinary: true"));
    assert!(o.stdout.contains("p=5"));
}

#[test]
fn enumerate_table() {
    let o = cli(&[
        "enumerate",
        "--q",
        "2",
        "--e",
        "2",
        "--h",
        "2",
        "--sig",
        "1,1",
    ]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(
        body(&o),
        vec![
            "stratum_polygon,count,q,rapoport",
            "\"(0x1, 1x1)\",6,2,true",
            "(1/2x2),3,2,false"
        ]
    );
    assert_eq!(cli(&["enumerate", "--case", "AR"]).code, EXIT_UNSUPPORTED);
    assert_eq!(cli(&["enumerate", "--sig", "1;x"]).code, EXIT_INPUT);
    assert_eq!(
        cli(&[
            "enumerate",
            "--q",
            "4",
            "--e",
            "3",
            "--h",
            "3",
            "--budget",
            "10"
        ])
        .code,
        EXIT_BUDGET
    );
}

#[test]
fn lift_is_certified() {
    for i in 0..9 {
        let o = cli(&["lift", "--index", &i.to_string(), "--format", "json"]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["result"]["generic_rapoport"], true);
        assert_eq!(v["result"]["reduces_to_input"], true);
        assert_eq!(v["result"]["truncated_is_pr"], true);
    }
    assert_eq!(cli(&["lift", "--index", "9"]).code, EXIT_INPUT);
    assert_eq!(cli(&["lift", "--case", "AR"]).code, EXIT_UNSUPPORTED);
    let c = cli(&["lift", "--case", "C", "--q", "3", "--format", "json"]);
    assert_eq!(c.code, EXIT_OK, "{}", c.stderr);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "q = 3\nbudget = 1000000\nformat = \"csv\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = cli(&["localmodel", "--config", c]);
    assert!(body(&o).contains(&"3,total,9"));
    let o = cli(&["localmodel", "--config", c, "--q", "5"]);
    assert!(body(&o).contains(&"5,total,65"));
    std::fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(cli(&["localmodel", "--config", c]).code, EXIT_INPUT);
    assert_eq!(
        cli(&["localmodel", "--config", "/nonexistent.toml"]).code,
        EXIT_INPUT
    );
}

#[test]
fn out_writes_the_rendered_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let o = cli(&["counterexample", "--out", path.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        cli(&["counterexample"]).stdout
    );
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["polygon", "0x1,1x1", "1/2x2", "--format", "json"][..],
        &["enumerate", "--q", "3", "--format", "csv"],
        &[
            "localmodel",
            "U21",
            "--q",
            "5",
            "--format",
            "json",
            "--verbose",
        ],
        &["deform", "--format", "json"],
        &["lift", "--seed", "11", "--format", "json"],
    ] {
        assert_eq!(cli(args), cli(args), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
    assert_eq!(cli(&["--version"]).code, EXIT_OK);
    assert_eq!(cli(&["bogus"]).code, EXIT_INPUT);
}
