use std::process::ExitCode;
use std::time::Instant;

use syntomic_core::verify;

fn main() -> ExitCode {
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for index in 1..=9 {
        if !filter.is_empty() && !filter.contains(&index) {
            continue;
        }
        let start = Instant::now();
        let result = verify::criterion(index);
        println!("{result} ({:.2?})", start.elapsed());
        failed += usize::from(!result.pass);
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
