use exz::diagnostics::{compare_measures, CompareGrid};
use exz::io::domain_from_path;
use exz::potential::{leja_points, MeasureCloud};
use std::path::Path;

fn cloud_from_csv(path: &str) -> MeasureCloud {
    let text = std::fs::read_to_string(path).unwrap();
    let atoms: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    MeasureCloud::uniform(atoms).unwrap()
}

#[test]
fn probe_tv_trend() {
    let domain = domain_from_path(Path::new("/tmp/smoke/sector32.json")).unwrap();
    let mu = leja_points(&domain, 512, 8192).unwrap();
    let grid = CompareGrid::for_domain(&domain);
    for n in [50, 100, 150] {
        let nu = cloud_from_csv(&format!("/tmp/smoke/seq32/zeros_{n}.csv"));
        let rep = compare_measures(&nu, &mu, None, &grid).unwrap();
        println!(
            "n={n}: tv={:.4} pot={:.5} hull={:.4}",
            rep.histogram_tv, rep.potential_sup_distance, rep.hull_escape_fraction
        );
    }
}
