//! The acceptance suite, one test per criterion. Each test prints its
//! pass/fail line; run with `--nocapture` to see them all.

use thhforge_cli::verify::{run, Status, VerifyOptions};

fn criterion(id: u32) {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&VerifyOptions {
        jobs: 1,
        maxdeg: None,
        cache_dir: dir.path().to_path_buf(),
        only: Some(vec![id]),
    })
    .unwrap();
    assert_eq!(report.criteria.len(), 1);
    print!("{}", report.lines().lines().next().unwrap_or_default());
    println!();
    let c = &report.criteria[0];
    assert_eq!(c.status, Status::Pass, "criterion {id} ({}): {}", c.name, c.detail);
}

macro_rules! criteria {
    ($($name:ident = $id:expr;)*) => {
        $(
            #[test]
            fn $name() {
                criterion($id);
            }
        )*
    };
}

criteria! {
    criterion_01_steenrod_ranks = 1;
    criterion_02_sq4_kernel_pipeline = 2;
    criterion_03_adem_instances = 3;
    criterion_04_hochschild_closed_forms = 4;
    criterion_05_square_zero_hochschild = 5;
    criterion_06_idempotent_algebra = 6;
    criterion_07_bar_roundtrip = 7;
    criterion_08_bokstedt_closed_forms = 8;
    criterion_09_odd_page_homology = 9;
    criterion_10_coaction_formulas = 10;
    criterion_11_nishida_certificates = 11;
    criterion_12_adams_spectral_sequences = 12;
    criterion_13_exhaustive_property_suites = 13;
}

#[test]
fn every_criterion_has_a_test() {
    assert_eq!(thhforge_cli::verify::criterion_ids(), (1..=13).collect::<Vec<_>>());
}
