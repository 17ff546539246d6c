//! Runs alone in its own binary: it sets a process-wide variable.

use effcharge::refdata::*;

#[test]
fn data_dir_override_reads_from_directory() {
    let dir = std::env::temp_dir().join(format!("effcharge-data-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text = "# provenance: published-table\n# source: local copy\nspecies,E2,E_var,E_MCHF,E_HF\nHe,-2.9,-2.9,-2.9,-2.8\n";
    std::fs::write(dir.join("table1.csv"), text).unwrap();

    std::env::set_var(DATA_DIR_ENV, &dir);
    let f = read_dataset(Dataset::Table1).unwrap();
    assert!(f.origin.ends_with("table1.csv"));
    assert!(!f.is_pristine());
    let t = load_reference(Dataset::Table1).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t[0].source, "local copy");
    let missing = load_reference(Dataset::Table2).unwrap_err();
    assert_eq!(missing.kind(), "io");

    std::env::remove_var(DATA_DIR_ENV);
    assert!(read_dataset(Dataset::Table1).unwrap().is_pristine());
    std::fs::remove_dir_all(&dir).unwrap();
}
