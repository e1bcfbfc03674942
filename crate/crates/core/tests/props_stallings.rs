mod common;

use common::*;

#[test]
fn folding_confluence() {
    check_folding_confluence(CASES).unwrap();
}

#[test]
fn nielsen_schreier() {
    check_nielsen_schreier(CASES).unwrap();
}

#[test]
fn pullback_symmetry() {
    check_pullback_symmetry(CASES).unwrap();
}

#[test]
fn generators_are_members() {
    check_generators_are_members(CASES).unwrap();
}

#[test]
fn intersection_membership() {
    check_intersection_membership(CASES).unwrap();
}

#[test]
fn double_coset_soundness() {
    check_double_coset_soundness(CASES).unwrap();
}
