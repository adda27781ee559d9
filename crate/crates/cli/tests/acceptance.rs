//! Full acceptance suite: one line per criterion, nonzero exit on failure.

use std::process::ExitCode;

use sphmean_cli::acceptance::{selftest, Faults, Level};

fn main() -> ExitCode {
    println!("running acceptance criteria 1-8 at full level");
    match selftest(Level::Full, Faults::default(), |o| println!("{o}")) {
        Ok(_) => {
            println!("acceptance: all criteria passed");
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("acceptance: {e}");
            ExitCode::FAILURE
        }
    }
}
