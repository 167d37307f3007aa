//! Every cargo example runs to completion.

mod ball_cover {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ball_cover.rs"));
}

mod expansiveness {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/expansiveness.rs"));
}

mod generate_chain_csv {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/generate_chain_csv.rs"));
}

mod metrics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/metrics.rs"));
}

mod move_points {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/move_points.rs"));
}

mod perturbed_ifs {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/perturbed_ifs.rs"));
}

mod semiconjugacy {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/semiconjugacy.rs"));
}

mod shadow_cat_map {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/shadow_cat_map.rs"));
}

mod shadow_contraction {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/shadow_contraction.rs"));
}

mod torus_skew_newton {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/torus_skew_newton.rs"));
}

mod uniqueness {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/uniqueness.rs"));
}

#[test]
fn ball_cover_runs() {
    ball_cover::run_example().expect("ball_cover");
}

#[test]
fn expansiveness_runs() {
    expansiveness::run_example().expect("expansiveness");
}

#[test]
fn generate_chain_csv_runs() {
    generate_chain_csv::run_example().expect("generate_chain_csv");
}

#[test]
fn metrics_runs() {
    metrics::run_example().expect("metrics");
}

#[test]
fn move_points_runs() {
    move_points::run_example().expect("move_points");
}

#[test]
fn perturbed_ifs_runs() {
    perturbed_ifs::run_example().expect("perturbed_ifs");
}

#[test]
fn semiconjugacy_runs() {
    semiconjugacy::run_example().expect("semiconjugacy");
}

#[test]
fn shadow_cat_map_runs() {
    shadow_cat_map::run_example().expect("shadow_cat_map");
}

#[test]
fn shadow_contraction_runs() {
    shadow_contraction::run_example().expect("shadow_contraction");
}

#[test]
fn torus_skew_newton_runs() {
    torus_skew_newton::run_example().expect("torus_skew_newton");
}

#[test]
fn uniqueness_runs() {
    uniqueness::run_example().expect("uniqueness");
}
