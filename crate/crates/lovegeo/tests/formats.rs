use lovegeo::config::OutputFormat;
use lovegeo::io::{read_samples, render_samples, GridFile, ProfileFile, ProfileRecord};
use lovegeo_core::asymptotics::EndSample;
use lovegeo_core::DimensionPair;
use proptest::prelude::*;
use tempfile::TempDir;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * a.abs().max(b.abs())
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1e-6f64..1e-6]
}

fn record() -> impl Strategy<Value = ProfileRecord> {
    (finite(), finite(), finite(), finite(), finite(), finite()).prop_map(|(tau, s, sdot, t, r, c)| ProfileRecord {
        tau,
        s,
        sdot,
        t,
        sigma2k_residual: r,
        first_integral: c,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_round_trip(samples in proptest::collection::vec(record(), 1..20), json in any::<bool>()) {
        let dir = TempDir::new().unwrap();
        let (format, name) = if json { (OutputFormat::Json, "p.json") } else { (OutputFormat::Csv, "p.csv") };
        let file = ProfileFile { n: 5, k: 2, samples };
        let path = dir.path().join(name);
        std::fs::write(&path, file.render(format)).unwrap();
        let back = ProfileFile::read(&path, DimensionPair::new(5, 2).unwrap()).unwrap();
        prop_assert_eq!(back.samples.len(), file.samples.len());
        for (a, b) in file.samples.iter().zip(&back.samples) {
            prop_assert!(close(a.tau, b.tau) && close(a.s, b.s) && close(a.sdot, b.sdot));
            prop_assert!(close(a.t, b.t) && close(a.sigma2k_residual, b.sigma2k_residual));
            prop_assert!(close(a.first_integral, b.first_integral));
        }
        // A second write of the re-read file is byte-identical.
        prop_assert_eq!(back.render(format), file.render(format));
    }

    #[test]
    fn grid_round_trip(
        n in 1usize..4, spacing in 0.01f64..2.0, seed in proptest::collection::vec(finite(), 125), json in any::<bool>(),
    ) {
        let extents = vec![5usize; n];
        let count = 5usize.pow(n as u32);
        let file = GridFile { n, spacing, origin: vec![-1.5; n], extents, values: seed[..count].to_vec() };
        let dir = TempDir::new().unwrap();
        let (format, name) = if json { (OutputFormat::Json, "g.json") } else { (OutputFormat::Csv, "g.csv") };
        let path = dir.path().join(name);
        std::fs::write(&path, file.render(format)).unwrap();
        let back = GridFile::read(&path).unwrap();
        prop_assert_eq!(back.n, n);
        prop_assert_eq!(&back.extents, &file.extents);
        prop_assert!(close(back.spacing, spacing));
        prop_assert!(back.values.iter().zip(&file.values).all(|(a, b)| close(*a, *b)));
        prop_assert!(back.into_grid().is_ok());
    }

    #[test]
    fn samples_round_trip(rows in proptest::collection::vec((finite(), finite(), finite(), finite()), 1..30)) {
        let samples: Vec<EndSample> = rows.iter().map(|(a, b, c, u)| EndSample { x: vec![*a, *b, *c], u: *u }).collect();
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("end.csv");
        std::fs::write(&path, render_samples(&samples)).unwrap();
        let back = read_samples(&path, 3).unwrap();
        prop_assert_eq!(back.len(), samples.len());
        for (a, b) in samples.iter().zip(&back) {
            prop_assert!(close(a.u, b.u));
            prop_assert!(a.x.iter().zip(&b.x).all(|(p, q)| close(*p, *q)));
        }
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    let dir = TempDir::new().unwrap();
    let dims = DimensionPair::new(3, 1).unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "tau,s\n1,2\n").unwrap();
    assert_eq!(ProfileFile::read(&bad, dims).unwrap_err().exit_code(), 2);
    std::fs::write(&bad, "x1,x2,u\n1,2,3\n").unwrap();
    assert_eq!(read_samples(&bad, 3).unwrap_err().exit_code(), 2);
    std::fs::write(&bad, "n,spacing,origin_1,extent_1\n1,0.1,0\nvalue\n").unwrap();
    assert_eq!(GridFile::read(&bad).unwrap_err().exit_code(), 2);
}
