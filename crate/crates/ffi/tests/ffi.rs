use std::ffi::{CStr, CString};
use std::ptr;

use ghnclab_ffi::*;

fn subgroup(rank: usize, gens: &[&str]) -> *mut GhnclabSubgroup {
    let owned: Vec<CString> = gens.iter().map(|g| CString::new(*g).unwrap()).collect();
    let ptrs: Vec<_> = owned.iter().map(|c| c.as_ptr()).collect();
    let mut h = ptr::null_mut();
    let s = unsafe { ghnclab_subgroup_new(rank, ptrs.as_ptr(), ptrs.len(), &mut h) };
    assert_eq!(s, GhnclabStatus::Ok);
    h
}

fn last_error() -> String {
    let p = ghnclab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn subgroup_queries() {
    let h = subgroup(2, &["aa", "b", "abA"]);
    let (mut rank, mut verts, mut index) = (0, 0, 0);
    unsafe {
        assert_eq!(ghnclab_subgroup_rank(h, &mut rank), GhnclabStatus::Ok);
        assert_eq!(ghnclab_subgroup_vertices(h, &mut verts), GhnclabStatus::Ok);
        assert_eq!(ghnclab_subgroup_index(h, &mut index), GhnclabStatus::Ok);
    }
    assert_eq!((rank, verts, index), (3, 2, 2));

    let mut member = false;
    let w = CString::new("aba").unwrap();
    unsafe { assert_eq!(ghnclab_subgroup_contains(h, w.as_ptr(), &mut member), GhnclabStatus::Ok) };
    assert!(member);
    let w = CString::new("ab").unwrap();
    unsafe { assert_eq!(ghnclab_subgroup_contains(h, w.as_ptr(), &mut member), GhnclabStatus::Ok) };
    assert!(!member);

    let mut dot = ptr::null_mut();
    unsafe {
        assert_eq!(ghnclab_subgroup_dot(h, &mut dot), GhnclabStatus::Ok);
        assert!(CStr::from_ptr(dot).to_str().unwrap().starts_with("digraph"));
        ghnclab_string_free(dot);
        ghnclab_subgroup_free(h);
    }
}

#[test]
fn intersection_and_check() {
    let u = subgroup(2, &["a", "bab"]);
    let v = subgroup(2, &["aa", "b"]);
    let mut i = ptr::null_mut();
    let mut r = GhnclabGhncResult::default();
    let mut rank = 0;
    unsafe {
        assert_eq!(ghnclab_intersection(u, v, &mut i), GhnclabStatus::Ok);
        assert_eq!(ghnclab_subgroup_rank(i, &mut rank), GhnclabStatus::Ok);
        assert_eq!(ghnclab_ghnc_check(u, v, &mut r), GhnclabStatus::Ok);
    }
    assert_eq!(rank, 1);
    assert!(r.holds && r.classical_holds);
    assert_eq!(r.rhs, 1);
    assert!(r.lhs <= r.rhs);
    unsafe {
        ghnclab_subgroup_free(i);
        ghnclab_subgroup_free(u);
        ghnclab_subgroup_free(v);
    }
}

#[test]
fn hall_completion_example() {
    let h = subgroup(3, &["aa", "b", "abA"]);
    let (mut index, mut cover) = (0, 0);
    unsafe {
        assert_eq!(ghnclab_hall_completion(h, &mut index, &mut cover), GhnclabStatus::Ok);
        ghnclab_subgroup_free(h);
    }
    assert_eq!((index, cover), (2, 5));
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new("a?").unwrap();
    let ptrs = [bad.as_ptr()];
    let mut h = ptr::null_mut();
    let s = unsafe { ghnclab_subgroup_new(2, ptrs.as_ptr(), 1, &mut h) };
    assert_eq!(s, GhnclabStatus::Parse);
    assert!(h.is_null());
    assert!(!last_error().is_empty());

    let c = CString::new("c").unwrap();
    let ptrs = [c.as_ptr()];
    let s = unsafe { ghnclab_subgroup_new(2, ptrs.as_ptr(), 1, &mut h) };
    assert_eq!(s, GhnclabStatus::InvalidInput);

    let mut rank = 0;
    assert_eq!(unsafe { ghnclab_subgroup_rank(ptr::null(), &mut rank) }, GhnclabStatus::NullPointer);
    unsafe {
        ghnclab_subgroup_free(ptr::null_mut());
        ghnclab_string_free(ptr::null_mut());
    }
}

#[test]
fn graph_of_groups_roundtrip() {
    let json = CString::new(
        r#"{"alphabet_ranks": {"v": 1},
            "edges": [{"id": "e", "from": "v", "to": "v", "word_from": "a", "word_to": "A"}]}"#,
    )
    .unwrap();
    let mut g = ptr::null_mut();
    let mut chi = 7;
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(ghnclab_gog_from_json(json.as_ptr(), &mut g), GhnclabStatus::Ok, "{}", last_error());
        assert_eq!(ghnclab_gog_euler(g, &mut chi), GhnclabStatus::Ok);
        assert_eq!(ghnclab_gog_classify_json(g, &mut report), GhnclabStatus::Ok);
        let text = CStr::from_ptr(report).to_str().unwrap().to_owned();
        ghnclab_string_free(report);
        ghnclab_gog_free(g);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["balanced"], true);
    }
    assert_eq!(chi, 0);

    let bad = CString::new("{").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ghnclab_gog_from_json(bad.as_ptr(), &mut g) }, GhnclabStatus::Parse);
}

#[test]
fn header_is_generated() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ghnclab.h")).unwrap();
    for f in ["ghnclab_subgroup_new", "ghnclab_ghnc_check", "ghnclab_last_error", "GhnclabSubgroup"] {
        assert!(header.contains(f), "{f}");
    }
}
