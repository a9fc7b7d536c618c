//! Writes the rounding fixtures and a few random instances as JSON files.
//!
//! cargo run --example fixtures_dump -- <dir>

use darpsv::fixtures::{ride_rounding, subtour_rounding};
use darpsv::gen::{random_instance, RandomParams};

fn main() -> anyhow::Result<()> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;
    let mut all = vec![ride_rounding(), subtour_rounding()];
    all.extend((0..3).map(|s| {
        random_instance(
            s,
            &RandomParams {
                n: 4,
                ..RandomParams::default()
            },
        )
    }));
    for inst in all {
        let path = dir.join(format!("{}.json", inst.name));
        std::fs::write(&path, inst.to_json()?)?;
        println!("{}", path.display());
    }
    Ok(())
}
