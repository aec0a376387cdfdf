use std::path::Path;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use roughcount::tables::{
    check_table, diff_tables, fixture, generate_table, overall_status, parse_csv, parse_json, render_table, Cell,
    Source, TableFormat, TableId,
};
use roughcount::bounds::Status;
use roughcount::{Error, PrimeTable};

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::new(10_000).unwrap())
}

fn fixtures_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn fixture_checksums() {
    let sums = std::fs::read_to_string(fixtures_dir().join("SHA256SUMS")).unwrap();
    let mut seen = 0;
    for line in sums.lines().filter(|l| !l.trim().is_empty()) {
        let (digest, name) = line.split_once("  ").expect("two-space separator");
        let bytes = std::fs::read(fixtures_dir().join(name)).unwrap();
        assert_eq!(hex(&Sha256::digest(&bytes)), digest, "{name}");
        seen += 1;
    }
    assert_eq!(seen, TableId::ALL.len());
}

#[test]
fn every_table_matches_its_fixture() {
    let reports: Vec<_> = TableId::ALL
        .into_iter()
        .map(|id| check_table(id, table()).unwrap())
        .collect();
    for r in &reports {
        assert!(r.mismatches.is_empty(), "{}: {:?}", r.target, r.mismatches);
        assert_eq!(r.status, Status::Pass, "{}", r.target);
    }
    assert_eq!(overall_status(&reports), Status::Pass);
}

#[test]
fn sparse_table_lists_the_omitted_primes() {
    let r = check_table(TableId::T4, table()).unwrap();
    let note = r.notes.iter().find(|n| n.contains("not printed")).expect("note");
    assert!(note.starts_with("28 computed rows"), "{note}");
    for p in [1637, 1997, 2333, 2707] {
        assert!(note.contains(&format!("p={p}")), "{p}");
    }
    // a non-sparse table treats missing printed rows as mismatches
    let mut printed = fixture(TableId::T3).unwrap();
    printed.rows.pop();
    let r = diff_tables(&generate_table(TableId::T3, table()).unwrap(), &printed).unwrap();
    assert_eq!(r.mismatches.len(), 1);
    assert_eq!(r.status, Status::Fail);
}

#[test]
fn printed_row_counts() {
    let counts: Vec<(TableId, usize)> = TableId::ALL
        .into_iter()
        .map(|id| (id, fixture(id).unwrap().rows.len()))
        .collect();
    let expect = [15, 20, 20, 215, 179, 129, 129, 129, 35, 52, 34];
    for ((id, n), want) in counts.iter().zip(expect) {
        assert_eq!(*n, want, "table {id}");
    }
}

#[test]
fn fixture_internal_consistency() {
    // b = ⌊2n/p⌋ + 1 and the scan columns increase while present
    for (id, p) in [(TableId::T9, 11), (TableId::T10, 13)] {
        for row in fixture(id).unwrap().rows {
            let (Cell::Int(n), Cell::Int(b)) = (&row[0], &row[2]) else { panic!() };
            assert_eq!(*b, 2 * n / p + 1);
        }
    }
    for id in [TableId::T2a, TableId::T2b] {
        for row in fixture(id).unwrap().rows {
            let values: Vec<u64> = row[1..]
                .iter()
                .filter_map(|c| match c {
                    Cell::Int(v) => Some(*v),
                    _ => None,
                })
                .collect();
            assert!(values.windows(2).all(|w| w[0] <= w[1]), "{:?}", row[0]);
            let first_empty = row[1..].iter().position(|c| *c == Cell::Empty).unwrap_or(row.len() - 1);
            assert!(row[1 + first_empty..].iter().all(|c| *c == Cell::Empty));
        }
    }
}

#[test]
fn csv_round_trip_of_fixtures() {
    for id in TableId::ALL {
        let f = fixture(id).unwrap();
        let csv = render_table(&f, TableFormat::Csv);
        let back = parse_csv(id, &csv, Source::Fixture).unwrap();
        assert_eq!(back, f, "table {id}");
    }
}

#[test]
fn json_round_trip_is_exact() {
    for id in TableId::ALL {
        let computed = generate_table(id, table()).unwrap();
        let back = parse_json(&render_table(&computed, TableFormat::Json)).unwrap();
        assert_eq!(back, computed, "table {id}");
    }
}

#[test]
fn markdown_rendering() {
    let md = render_table(&fixture(TableId::T1).unwrap(), TableFormat::Markdown);
    let mut lines = md.lines();
    assert!(lines.next().unwrap().starts_with("Table 1:"));
    assert_eq!(lines.next(), Some(""));
    assert_eq!(lines.next(), Some("| p | n | phi | members |"));
    assert_eq!(lines.next(), Some("|---|---|---|---|"));
    assert_eq!(lines.next(), Some("| 11 | 22 | 5 | 1, 11, 13, 17, 19 |"));
}

#[test]
fn schema_errors() {
    assert!(matches!(
        parse_csv(TableId::T5, "p,f\n19,0.181\n", Source::Fixture),
        Err(Error::Schema(_))
    ));
    assert!(matches!(
        parse_csv(TableId::T5, "p,f,g\n19,0.181\n", Source::Fixture),
        Err(Error::Parse(_))
    ));
    let t1 = fixture(TableId::T1).unwrap();
    let t9 = fixture(TableId::T9).unwrap();
    assert!(matches!(diff_tables(&t1, &t9), Err(Error::Schema(_))));
    let mut json = render_table(&t9, TableFormat::Json);
    json = json.replacen("\"b\"", "\"c\"", 1);
    assert!(matches!(parse_json(&json), Err(Error::Schema(_))));
}

#[test]
fn rounding_at_the_tolerance_edge() {
    let csv = "p,f,g\n19,0.1806,0.180\n";
    let shifted = parse_csv(TableId::T5, csv, Source::Fixture).unwrap();
    let mut computed = generate_table(TableId::T5, table()).unwrap();
    computed.rows.truncate(1);
    let r = diff_tables(&computed, &shifted).unwrap();
    assert!(r.mismatches.is_empty());
    let far = parse_csv(TableId::T5, "p,f,g\n19,0.1825,0.180\n", Source::Fixture).unwrap();
    let r = diff_tables(&computed, &far).unwrap();
    assert_eq!(r.mismatches.len(), 1);
    assert_eq!(r.mismatches[0].column, "f");
}

#[test]
fn generation_needs_enough_primes() {
    let small = PrimeTable::new(100).unwrap();
    assert!(matches!(
        generate_table(TableId::T4, &small),
        Err(Error::ResourceLimit { .. })
    ));
}
