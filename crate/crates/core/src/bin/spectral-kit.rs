use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use spectral_kit::experiments::{parse_overrides, ExperimentSpec, Registry};
use spectral_kit::pde::parse_key_values;
use spectral_kit::{Error, Result};

const USAGE: &str = "\
usage: spectral-kit <experiment> [--key value]... [--out DIR] [--seed S] [--config FILE]
       spectral-kit list [--json]

Parameters come from the experiment defaults, then --config (key=value lines),
then the command line. SPECTRAL_KIT_THREADS caps the worker threads.
Exit codes: 0 ok, 2 bad arguments, 3 numerical failure.";

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("SPECTRAL_KIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("SPECTRAL_KIT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn run(args: &[String]) -> Result<()> {
    let registry = Registry::default();
    let mut args = args;
    if args.first().map(String::as_str) == Some("run") {
        args = &args[1..];
    }
    let Some(name) = args.first() else {
        return Err(Error::InvalidArgument(USAGE.into()));
    };
    match name.as_str() {
        "-h" | "--help" | "help" => {
            println!("{USAGE}\n\nexperiments:\n{}", registry.list_text());
            return Ok(());
        }
        "list" => {
            match args.get(1).map(String::as_str) {
                Some("--json") => print!("{}", registry.list_json()?),
                None => print!("{}", registry.list_text()),
                Some(other) => return Err(Error::InvalidArgument(format!("unexpected `{other}`"))),
            }
            return Ok(());
        }
        _ => {}
    }
    // validate the name before parsing the rest
    registry.get(name)?;
    let mut cli = parse_overrides(&args[1..])?;
    let out_dir = cli
        .remove("out")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out").join(name));
    let seed = cli
        .remove("seed")
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| Error::InvalidArgument(format!("--seed must be an unsigned integer, got `{s}`")))
        })
        .transpose()?;
    let mut params: BTreeMap<String, String> = match cli.remove("config") {
        Some(path) => parse_key_values(&std::fs::read_to_string(&path)?)?,
        None => BTreeMap::new(),
    };
    params.extend(cli);
    let manifest = registry.run(&ExperimentSpec {
        name: name.clone(),
        params,
        out_dir: out_dir.clone(),
        seed,
    })?;
    for f in &manifest.files {
        println!("{}  {}", f.sha256, out_dir.join(&f.path).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    match init_threads().and_then(|_| run(&args)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spectral-kit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
