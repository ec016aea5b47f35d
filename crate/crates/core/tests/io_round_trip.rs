use ppid_core::corpus;
use ppid_core::io::{load_distribution, write_json, write_tsv, Format};
use ppid_core::{decompose, DecomposeOptions};

#[test]
fn corpus_round_trips_through_both_formats() {
    for name in corpus::NAMES {
        let d = corpus::build(name, None).unwrap();
        for format in [Format::Tsv, Format::Json] {
            let mut buf = Vec::new();
            match format {
                Format::Tsv => write_tsv(&d, &mut buf).unwrap(),
                Format::Json => write_json(&d, &mut buf).unwrap(),
            }
            let back = load_distribution(buf.as_slice(), format).unwrap();
            assert!(back.same_distribution(&d), "{name} {format:?}");
            let a = decompose(&d, &DecomposeOptions::default()).unwrap();
            let b = decompose(&back, &DecomposeOptions::default()).unwrap();
            assert_eq!(a.averages(), b.averages());
        }
    }
}
