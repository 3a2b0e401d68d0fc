mod common;

#[test]
fn coarse_graining_carries_the_outcome_lifted_value() {
    common::transports::coarse_graining_carries_the_outcome_lifted_value();
}

#[test]
fn splitting_preserves_the_value() {
    common::transports::splitting_preserves_the_value();
}

#[test]
fn conditioning_on_the_added_party_scales_the_value() {
    common::transports::conditioning_on_the_added_party_scales_the_value();
}

#[test]
fn deterministic_party_embedding_keeps_the_value() {
    common::transports::deterministic_party_embedding_keeps_the_value();
}

#[test]
fn shifting_subtracts_the_bound() {
    common::transports::shifting_subtracts_the_bound();
}
