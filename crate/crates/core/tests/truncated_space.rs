mod common;

#[test]
fn explicit_sum_equals_green_pipeline() {
    let c = common::truncated::helium_truncated();
    assert!((c.singles - c.pipeline_singles).abs() < 1e-10, "singles {} vs {}", c.singles, c.pipeline_singles);
    assert!((c.doubles - c.pipeline_doubles).abs() < 1e-10, "doubles {} vs {}", c.doubles, c.pipeline_doubles);
}
