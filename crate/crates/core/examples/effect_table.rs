//! Effect table without conformity: every mode and search against
//! centralized thorough search, in both environments, as CSV on stdout.
//! Uses the same grid/stats pipeline as the `sweep` and `stats` commands.
//!
//! `cargo run --release --example effect_table -- [runs]`

use nkcs_org::cli::{cmd_stats, run_grid, CommonArgs, GridSpec};
use nkcs_org::{CoordinationMode, NetworkKind, SearchMode};

fn main() -> nkcs_org::Result<()> {
    let runs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let mut grid = GridSpec::full(&[false]);
    grid.networks = Some(vec![NetworkKind::Line]);
    grid.modes = Some(CoordinationMode::ALL.to_vec());
    grid.searches = Some(SearchMode::ALL.to_vec());

    let dir = std::env::temp_dir().join("nkcs-org-effect-table");
    let common = CommonArgs {
        runs: Some(runs),
        ..CommonArgs::with_out(&dir)
    };
    let index = run_grid(&grid, &common, None)?;
    for file in cmd_stats(&index, None, &dir)? {
        if file
            .file_name()
            .is_some_and(|n| n.to_string_lossy().starts_with("effects"))
        {
            print!("{}", std::fs::read_to_string(&file)?);
        }
    }
    Ok(())
}
