mod common;

#[test]
fn library_enumeration_matches_the_oracle() {
    common::local_bounds::library_enumeration_matches_the_oracle();
}

#[test]
fn liftings_preserve_local_bounds_exactly() {
    common::local_bounds::liftings_preserve_local_bounds_exactly();
}

#[test]
fn input_and_outcome_liftings_preserve_nonsignaling_bounds() {
    common::local_bounds::input_and_outcome_liftings_preserve_nonsignaling_bounds();
}
