mod common;

use common::*;

#[test]
fn balance_orientation_independent() {
    check_balance_orientation_independent(CASES).unwrap();
}

#[test]
fn balance_tree_independent() {
    check_balance_tree_independent(CASES).unwrap();
}

#[test]
fn gbs_idempotent() {
    check_gbs_idempotent(CASES).unwrap();
}

#[test]
fn double_cover() {
    check_double_cover(CASES).unwrap();
}

#[test]
fn classify_consistency() {
    check_classify_consistency(CASES).unwrap();
}
