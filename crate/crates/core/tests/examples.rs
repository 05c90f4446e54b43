macro_rules! example_test {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(keyed_streams, "keyed_streams.rs");
example_test!(schedules_and_sparsity, "schedules_and_sparsity.rs");
example_test!(samplers, "samplers.rs");
example_test!(quadrature, "quadrature.rs");
example_test!(hypotheses, "hypotheses.rs");
example_test!(series_bounds, "series_bounds.rs");
example_test!(weighted_series, "weighted_series.rs");
example_test!(kronecker, "kronecker.rs");
example_test!(mixed_path, "mixed_path.rs");
example_test!(ensemble, "ensemble.rs");
example_test!(config_run, "config_run.rs");
