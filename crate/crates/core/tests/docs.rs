use fano_lines::suite::CHECKS;

fn table_rows() -> Vec<Vec<String>> {
    let path = format!("{}/../../docs/traceability.md", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| l.starts_with("| T"))
        .map(|l| l.trim_matches('|').split(" | ").map(|c| c.trim().to_string()).collect())
        .collect()
}

#[test]
fn traceability_table_covers_every_check_once() {
    let rows = table_rows();
    assert_eq!(rows.len(), CHECKS.len());
    for (name, anchor, _) in CHECKS {
        let hits: Vec<_> = rows.iter().filter(|r| r[2] == format!("`{name}`")).collect();
        assert_eq!(hits.len(), 1, "{name}");
        assert_eq!(hits[0][0], *anchor, "{name}");
        assert!(hits[0][3].split(", ").all(|id| ["FX-N1", "FX-N2", "FX-C1", "FX-C2"].contains(&id)), "{name}");
    }
}
