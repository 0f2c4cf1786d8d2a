use ahs_core::datasets::{generate, load_file, write_file};
use ahs_core::{DatasetSpec, Error, Family, FileFormat};

#[test]
fn round_trip_every_family_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    for family in Family::ALL {
        let spec = DatasetSpec::new(family, 500, 1000, 3);
        let data = generate(&spec).unwrap();
        for format in [FileFormat::Text, FileFormat::Binary] {
            let path = dir.path().join(format!("{}.{format:?}", family.as_str()));
            write_file(&path, &data, format).unwrap();
            assert_eq!(load_file(&path, format).unwrap(), data, "{family:?} {format:?}");
        }
    }
}

#[test]
fn extremes_survive_text_and_binary() {
    let dir = tempfile::tempdir().unwrap();
    let data = vec![i64::MIN, -1, 0, 1, i64::MAX];
    for format in [FileFormat::Text, FileFormat::Binary] {
        let path = dir.path().join("x");
        write_file(&path, &data, format).unwrap();
        assert_eq!(load_file(&path, format).unwrap(), data);
    }
}

#[test]
fn bad_token_names_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "3\n-1\nabc\n2\n").unwrap();
    let err = load_file(&path, FileFormat::Text).unwrap_err();
    assert!(matches!(err, Error::InvalidToken { line: 3, .. }), "{err:?}");
    assert!(err.to_string().contains("line 3"));
}

#[test]
fn truncated_binary_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.bin");
    std::fs::write(&path, [0u8; 12]).unwrap();
    assert!(load_file(&path, FileFormat::Binary).is_err());
}

#[test]
fn missing_file_is_io_error() {
    let err = load_file(std::path::Path::new("/nonexistent/ahs/input"), FileFormat::Text).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}
