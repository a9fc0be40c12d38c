use std::fs;
use std::path::Path;

use mixability::cli::run;
use mixability::io::ResultDocument;
use rand::{Rng, SeedableRng};
use tempfile::TempDir;

fn mix(args: &[&str]) -> mixability::cli::Outcome {
    run(std::iter::once("mixability").chain(args.iter().copied()))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn doc(args: &[&str]) -> ResultDocument {
    let out = mix(args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    ResultDocument::from_json(&out.stdout).unwrap()
}

#[test]
fn gamma_of_generated_mixable_consecutive() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("mc.csv");
    let out = mix(&[
        "gen",
        "mixable-consecutive",
        "--d",
        "3",
        "--k",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0);
    let g = doc(&["gamma", path.to_str().unwrap(), "--solver", "brute"]);
    assert_eq!(g.value, "6");
    assert_eq!(g.status, "exact");
}

#[test]
fn partition_of_three_ones_is_not_mixable() {
    let dir = TempDir::new().unwrap();
    let text = mix(&["gen", "partition", "--values", "1,1,1"]).stdout;
    let path = write(&dir, "p.csv", &text);
    let c = doc(&["check", &path]);
    assert_eq!(c.details["mixable"], false);
    assert_eq!(c.objective, "mixability");
}

#[test]
fn beta_is_complement_of_gamma_on_random_files() {
    let dir = TempDir::new().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
    for t in 0..50 {
        let (m, d) = (rng.gen_range(1..=4), rng.gen_range(1..=3));
        let rows: Vec<Vec<i128>> = (0..m)
            .map(|_| (0..d).map(|_| rng.gen_range(-5..10)).collect())
            .collect();
        let l = *rows.iter().flatten().max().unwrap();
        let text: String = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
                    + "\n"
            })
            .collect();
        let comp: String = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| (l - v).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
                    + "\n"
            })
            .collect();
        let a = write(&dir, &format!("a{t}.csv"), &text);
        let c = write(&dir, &format!("c{t}.csv"), &comp);
        let beta: i128 = doc(&["beta", &a, "--solver", "brute"])
            .value
            .parse()
            .unwrap();
        let gamma: i128 = doc(&["gamma", &c, "--solver", "brute"])
            .value
            .parse()
            .unwrap();
        assert_eq!(beta, d as i128 * l - gamma, "{rows:?}");
    }
}

#[test]
fn verify_accepts_solver_output_and_rejects_tampering() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "1/2,3,0\n2,1/4,1\n0,1,5\n");
    for solver in ["brute", "dp", "swap", "2approx", "ptas", "valueset", "auto"] {
        let out = mix(&["gamma", &a, "--solver", solver]);
        assert_eq!(out.code, 0, "{solver}: {}", out.stderr);
        let r = write(&dir, "r.json", &out.stdout);
        assert_eq!(mix(&["verify", &a, &r]).code, 0, "{solver}");
    }
    let out = mix(&["beta", &a, "--solver", "dp"]);
    let mut tampered = ResultDocument::from_json(&out.stdout).unwrap();
    tampered.value = "100".into();
    let r = write(&dir, "bad.json", &tampered.to_json());
    assert_eq!(mix(&["verify", &a, &r]).code, 2);
}

#[test]
fn multiset_solver_through_cli() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "1,3,2,1,3\n2,1,3,3,2\n3,2,1,2,1\n");
    assert_eq!(doc(&["gamma", &a, "--solver", "multiset"]).value, "10");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(mix(&["gamma", "/nonexistent/file.csv"]).code, 1);
    let bad = write(&dir, "bad.csv", "1,2\n3\n");
    assert_eq!(mix(&["gamma", &bad]).code, 1);
    let a = write(&dir, "a.csv", "1,2,3\n4,5,6\n7,8,9\n");
    assert_eq!(mix(&["gamma", &a, "--solver", "nope"]).code, 1);
    assert_eq!(
        mix(&["gamma", &a, "--solver", "brute", "--budget-states", "3"]).code,
        2
    );
    assert_eq!(mix(&["gamma", &a, "--solver", "2approx"]).code, 0);
    let wide = write(&dir, "w.csv", "1,2\n");
    assert_eq!(mix(&["gamma", &wide, "--solver", "2approx"]).code, 1);
    assert_eq!(mix(&["--help"]).code, 0);
}

#[test]
fn var_bounds_uniform_example() {
    let dir = TempDir::new().unwrap();
    let text: String = std::iter::once("# N=4 d=2\n".to_string())
        .chain((0..=4).map(|r| format!("{r},{r}\n")))
        .collect();
    let m = write(&dir, "m.csv", &text);
    let full = doc(&["var-bounds", &m, "--alpha", "0", "--upper-rows", "full"]);
    assert_eq!(full.details["upper"]["value"], "4");
    let brute = doc(&["var-bounds", &m, "--alpha", "1/2", "--N", "4"]);
    let dp = doc(&["var-bounds", &m, "--alpha", "1/2", "--solver", "dp"]);
    assert_eq!(brute.value, dp.value);
    assert_eq!(
        mix(&["var-bounds", &m, "--alpha", "1/2", "--N", "5"]).code,
        1
    );
}

#[test]
fn output_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "0,1\n1,0\n");
    let out_path = dir.path().join("out.json");
    let out = mix(&["check", &a, "--output", out_path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let d = ResultDocument::from_json(&fs::read_to_string(Path::new(&out_path)).unwrap()).unwrap();
    assert_eq!(d.details["mixable"], true);
}

#[test]
fn generators_produce_parseable_instances() {
    let dir = TempDir::new().unwrap();
    let a = write(
        &dir,
        "a.csv",
        &mix(&["gen", "mixable-consecutive", "--d", "2", "--k", "1"]).stdout,
    );
    for args in [
        vec!["gen", "consecutive", "--n", "5", "--d", "3", "--seed", "2"],
        vec!["gen", "adversarial-identity", "--n", "4"],
        vec![
            "gen", "n3dm", "--first", "1,2", "--second", "3,-4", "--third", "5,6",
        ],
        vec!["gen", "glue", "--a", &a, "--b", &a],
        vec!["gen", "glue", "--a", &a, "--b", &a, "--stacked"],
        vec!["gen", "additive-stress", "--input", &a, "--k", "3"],
    ] {
        let out = mix(&args);
        assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
        mixability::io::parse_instance(&out.stdout).unwrap();
    }
}
