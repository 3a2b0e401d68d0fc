mod common;

#[test]
fn relaxations_bound_random_quantum_models() {
    common::npa::relaxations_bound_random_quantum_models();
}

#[test]
fn model_moment_matrices_are_explicit_gram_matrices() {
    common::npa::model_moment_matrices_are_explicit_gram_matrices();
}

#[test]
fn bounds_tighten_with_the_level() {
    common::npa::bounds_tighten_with_the_level();
}

#[test]
fn canonicalization_on_random_words() {
    common::npa::canonicalization_on_random_words();
}
