use std::process::ExitCode;
use wwl::selftest::{run_criterion, SuiteConfig, Tolerances, CRITERIA};

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let tol = Tolerances::default();
    // WWL_CRITERIA=5,10 restricts the run
    let only: Option<Vec<u32>> = std::env::var("WWL_CRITERIA")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let selected: Vec<u32> = CRITERIA.iter().map(|c| c.0).filter(|id| only.as_ref().is_none_or(|o| o.contains(id))).collect();
    let mut failed = 0;
    for &id in &selected {
        let r = run_criterion(id, &cfg, &tol);
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id:>2} [{}] {} ({:.1}s)", r.name, r.summary(), r.seconds);
        if !r.pass {
            failed += 1;
            for c in r.checks.iter().filter(|c| !c.pass()) {
                println!("       {}: {:.3e} vs limit {:.1e}", c.name, c.value, c.limit);
            }
        }
    }
    println!("{} of {} criteria passed", selected.len() - failed, selected.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
