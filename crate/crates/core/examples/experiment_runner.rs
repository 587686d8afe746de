//! Running registered experiments programmatically and adding a plugin.

use std::collections::BTreeMap;

use spectral_kit::experiments::{Artifact, Experiment, ExperimentSpec, ParamSpec, Registry};
use spectral_kit::table::Table;

fn main() -> spectral_kit::Result<()> {
    let mut registry = Registry::default();
    registry.register(Experiment::new(
        "squares",
        "table of n and n^2",
        vec![ParamSpec::new("n", 5, "rows")],
        |ctx| {
            let mut t = Table::new(&["n", "n2"]);
            for i in 0..ctx.params.get::<usize>("n")? {
                t.push_reals(&[i as f64, (i * i) as f64]);
            }
            Ok(vec![Artifact::csv("squares.csv", t)])
        },
    ))?;
    print!("{}", registry.list_text());

    let out = std::env::temp_dir().join("spectral-kit-example");
    let manifest = registry.run(&ExperimentSpec {
        name: "deriv-benchmark".into(),
        params: BTreeMap::from([("N".to_string(), "32".to_string())]),
        out_dir: out.clone(),
        seed: None,
    })?;
    for f in manifest.files {
        println!("{} {}", f.sha256, out.join(f.path).display());
    }
    Ok(())
}
