//! Full comparison with an optional config file.
//!
//! cargo run --release --example compare -- [config] [out_dir]

use pkm::config::Config;
use pkm::report::run_comparison;

fn main() -> pkm::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = match args.next() {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let out = args.next().unwrap_or_else(|| "out/compare".into());
    let report = run_comparison(&config, &out)?;
    print!("{}", report.to_text());
    println!("{} files written to {out}", report.files.len());
    Ok(())
}
