use std::path::PathBuf;

use oneshot_pir::symbolic::build_symbolic;
use oneshot_pir_tools::formats::{parse_generator, parse_symbolic, read_file, write_generator, write_symbolic};

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden").join(name);
    read_file(&path).unwrap()
}

#[test]
fn golden_files_parse_and_match_recursion() {
    for (name, header) in [
        ("s3_n4_r3.txt", (4, 3, 3)),
        ("s4_n4_r3.txt", (4, 3, 4)),
        ("s3_n4_r2.txt", (4, 2, 3)),
        ("s4_n4_r2.txt", (4, 2, 4)),
    ] {
        let text = golden(name);
        let (h, s) = parse_symbolic(&text).unwrap();
        assert_eq!(h, header);
        let built = build_symbolic(h.0, h.1, h.2).unwrap();
        assert_eq!(s.entries(), built.entries());
        assert_eq!(write_symbolic(&built), text);
    }
}

#[test]
fn golden_row_counts() {
    assert_eq!(parse_symbolic(&golden("s4_n4_r3.txt")).unwrap().1.rows(), 13);
    assert_eq!(parse_symbolic(&golden("s4_n4_r2.txt")).unwrap().1.rows(), 12);
}

#[test]
fn generator_text_round_trip() {
    let text = "# coded storage\n2 4 5\n1 0 1 1\n0 1 1 2\n";
    let g = parse_generator(text).unwrap();
    assert_eq!(g.modulus().q(), 5);
    assert_eq!(write_generator(&g), "2 4 5\n1 0 1 1\n0 1 1 2\n");
}

#[test]
fn missing_file_reports_path() {
    let err = read_file(&PathBuf::from("/nonexistent/x.txt")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/x.txt"));
}
