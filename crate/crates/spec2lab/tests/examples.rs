//! Every example runs as part of the test suite.

#[path = "../examples/attainable_region.rs"]
mod attainable_region;
#[path = "../examples/collapsing_symbol.rs"]
mod collapsing_symbol;
#[path = "../examples/dilation.rs"]
mod dilation;
#[path = "../examples/galerkin_pollution.rs"]
mod galerkin_pollution;
#[path = "../examples/nested_truncations.rs"]
mod nested_truncations;
#[path = "../examples/perturbation_radius.rs"]
mod perturbation_radius;
#[path = "../examples/planting_targets.rs"]
mod planting_targets;
#[path = "../examples/rotation_embedding.rs"]
mod rotation_embedding;
#[path = "../examples/second_order_spectrum.rs"]
mod second_order_spectrum;

#[test]
fn attainable_region_runs() {
    attainable_region::run_example().unwrap();
}

#[test]
fn collapsing_symbol_runs() {
    collapsing_symbol::run_example().unwrap();
}

#[test]
fn dilation_runs() {
    dilation::run_example().unwrap();
}

#[test]
fn galerkin_pollution_runs() {
    galerkin_pollution::run_example().unwrap();
}

#[test]
fn nested_truncations_runs() {
    nested_truncations::run_example().unwrap();
}

#[test]
fn perturbation_radius_runs() {
    perturbation_radius::run_example().unwrap();
}

#[test]
fn planting_targets_runs() {
    planting_targets::run_example().unwrap();
}

#[test]
fn rotation_embedding_runs() {
    rotation_embedding::run_example().unwrap();
}

#[test]
fn second_order_spectrum_runs() {
    second_order_spectrum::run_example().unwrap();
}
