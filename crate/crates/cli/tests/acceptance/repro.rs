use std::path::Path;
use std::process::Command;

use crate::Check;

const CONFIG: &str = r#"
seed = 2024

[tail]
samples = 200000

[ctrw]
n_list = [100.0, 400.0]
t_list = [0.5, 1.0]
paths = 3000

[compare]
n_scale = 100.0
paths = 5000
d = 0.3

[boltzmann]
n_scale = 50.0
paths = 2000
starts = [{ k = 0.1, branch = 2 }, { k = -0.3, branch = 1 }]

[chain]
n_sites = 64
ensemble = 6
snapshots = 4
"#;

const COMMANDS: [&str; 7] = ["tail", "ctrw", "fit", "compare", "boltzmann", "fracdiff", "chain"];

fn run_all(root: &Path, threads: &str) -> Result<(), String> {
    for cmd in COMMANDS {
        let out = Command::new(env!("CARGO_BIN_EXE_superdiff"))
            .arg("--config")
            .arg(root.join("run.toml"))
            .arg("--out")
            .arg(root.join(format!("threads-{threads}")))
            .args(["--threads", threads, cmd])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{cmd} with {threads} threads: {}", String::from_utf8_lossy(&out.stderr)));
        }
    }
    Ok(())
}

pub fn run(c: &mut Check) {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), CONFIG).unwrap();
    for threads in ["1", "4"] {
        if let Err(e) = run_all(dir.path(), threads) {
            c.require(false, e);
            return;
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(dir.path().join("threads-1"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut compared = 0;
    for name in &names {
        let a = std::fs::read(dir.path().join("threads-1").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("threads-4").join(name));
        c.require(b.as_ref().is_ok_and(|b| *b == a), format!("{} differs between 1 and 4 threads", name.to_string_lossy()));
        compared += 1;
    }
    let csvs = names.iter().filter(|n| n.to_string_lossy().ends_with(".csv")).count();
    c.require(csvs >= 8, format!("only {csvs} CSV files written"));
    c.note(format!("{compared} artifacts ({csvs} CSV) byte-identical under --threads 1 and --threads 4"));
}
