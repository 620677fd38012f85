//! Drive the command-line layer from code: run a sampler, then replay it from
//! its sidecar and check the data file is reproduced byte for byte.

use std::fs;

use tsp_anneal::experiment::run;

fn main() {
    let dir = std::env::temp_dir().join("tsp-anneal-example");
    let (a, b) = (dir.join("first"), dir.join("replay"));
    let code = run([
        "tsp-anneal",
        "sample-quenched",
        "--n",
        "12",
        "--beta",
        "3",
        "--count",
        "200",
        "--seed",
        "9",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let sidecar = a.join("quenched_samples.csv.meta.json");
    println!("{}", fs::read_to_string(&sidecar).unwrap());
    let code =
        run(["tsp-anneal", "rerun", "--sidecar", sidecar.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(code, 0);
    let same = fs::read(a.join("quenched_samples.csv")).unwrap()
        == fs::read(b.join("quenched_samples.csv")).unwrap();
    println!("replay identical: {same}");
    // a missing required flag is a usage error
    assert_eq!(run(["tsp-anneal", "sample-quenched", "--n", "12"]), 1);
}
