use std::ffi::{CStr, CString};
use std::ptr;

use bistellar_ffi::*;

const TRIANGLE_BOUNDARY: &str = r#"{"dimension": 1, "vertices": [0, 1, 2], "maximal_simplexes": [[0, 1], [0, 2], [1, 2]]}"#;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(bst_last_error()) }.to_str().unwrap().to_owned()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    bst_string_free(s);
    out
}

fn load(json: &str) -> *mut BstComplex {
    let mut k = ptr::null_mut();
    let status = unsafe { bst_complex_from_json(cstr(json).as_ptr(), &mut k) };
    assert_eq!(status, BstStatus::Ok, "{}", last_error());
    k
}

#[test]
fn json_round_trip_and_queries() {
    let k = load(TRIANGLE_BOUNDARY);
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(bst_complex_to_json(k, &mut json), BstStatus::Ok);
        let back = load(&take(json));
        let (mut d1, mut d2) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(bst_complex_digest(k, &mut d1), BstStatus::Ok);
        assert_eq!(bst_complex_digest(back, &mut d2), BstStatus::Ok);
        let d1 = take(d1);
        assert_eq!(d1, take(d2));
        assert_eq!(d1.len(), 64);

        let mut dim = -2;
        assert_eq!(bst_complex_dimension(k, &mut dim), BstStatus::Ok);
        assert_eq!(dim, 1);
        let mut chi = 7;
        assert_eq!(bst_complex_euler_characteristic(k, &mut chi), BstStatus::Ok);
        assert_eq!(chi, 0);
        let mut closed = false;
        assert_eq!(bst_complex_is_closed_pseudomanifold(k, &mut closed), BstStatus::Ok);
        assert!(closed);
        bst_complex_free(back);
        bst_complex_free(k);
    }
}

#[test]
fn f_vector_reports_needed_length_and_truncates() {
    let k = load(TRIANGLE_BOUNDARY);
    unsafe {
        let mut needed = 0;
        assert_eq!(bst_complex_f_vector(k, ptr::null_mut(), 0, &mut needed), BstStatus::Ok);
        assert_eq!(needed, 2);
        let mut one = [0u64; 1];
        assert_eq!(bst_complex_f_vector(k, one.as_mut_ptr(), 1, &mut needed), BstStatus::Ok);
        assert_eq!(one, [3]);
        let mut buf = [0u64; 4];
        assert_eq!(bst_complex_f_vector(k, buf.as_mut_ptr(), 4, &mut needed), BstStatus::Ok);
        assert_eq!(buf, [3, 3, 0, 0]);
        assert_eq!(bst_complex_f_vector(k, ptr::null_mut(), 1, &mut needed), BstStatus::NullPointer);
        bst_complex_free(k);
    }
}

#[test]
fn moves_subdivision_and_isomorphism() {
    let k = load(TRIANGLE_BOUNDARY);
    unsafe {
        let mut b = ptr::null_mut();
        assert_eq!(bst_barycentric(k, &mut b), BstStatus::Ok);
        let mut needed = 0;
        let mut f = [0u64; 2];
        bst_complex_f_vector(b, f.as_mut_ptr(), 2, &mut needed);
        assert_eq!(f, [6, 6]);

        // Subdividing an edge of the triangle boundary gives a 4-cycle, so
        // it is isomorphic to neither K nor βK.
        let mv = cstr(r#"{"A": [0, 1], "B": [3]}"#);
        assert_eq!(bst_apply_move(k, mv.as_ptr()), BstStatus::Ok);
        bst_complex_f_vector(k, f.as_mut_ptr(), 2, &mut needed);
        assert_eq!(f, [4, 4]);
        let mut iso = true;
        assert_eq!(bst_isomorphic(k, b, &mut iso), BstStatus::Ok);
        assert!(!iso);

        // Not applicable: the link of a vertex of a 4-cycle is two points,
        // but [1, 2] is already present.
        let bad = cstr(r#"{"A": [3], "B": [1, 2]}"#);
        let before = {
            let mut d = ptr::null_mut();
            bst_complex_digest(k, &mut d);
            take(d)
        };
        assert_eq!(bst_apply_move(k, bad.as_ptr()), BstStatus::Invariant);
        assert!(!last_error().is_empty());
        let mut d = ptr::null_mut();
        bst_complex_digest(k, &mut d);
        assert_eq!(take(d), before, "a rejected move must leave the complex alone");

        // The inverse restores the triangle boundary.
        let inv = cstr(r#"{"A": [3], "B": [0, 1]}"#);
        assert_eq!(bst_apply_move(k, inv.as_ptr()), BstStatus::Ok);
        let orig = load(TRIANGLE_BOUNDARY);
        assert_eq!(bst_isomorphic(k, orig, &mut iso), BstStatus::Ok);
        assert!(iso);
        bst_complex_free(orig);
        bst_complex_free(b);
        bst_complex_free(k);
    }
}

#[test]
fn relate_then_replay_reaches_a_closed_complex() {
    let k1 = r#"{"dimension": 1, "vertices": [0, 1, 2], "maximal_simplexes": [[0, 1], [1, 2], [0, 2]],
        "geometry": "euclidean", "coordinates": {"0": [0.1], "1": [0.45], "2": [0.8]}, "periods": [1.0]}"#;
    let k2 = r#"{"dimension": 1, "vertices": [10, 11, 12, 13], "maximal_simplexes": [[10, 11], [11, 12], [12, 13], [10, 13]],
        "geometry": "euclidean", "coordinates": {"10": [0.0], "11": [0.25], "12": [0.5], "13": [0.75]}, "periods": [1.0]}"#;
    unsafe {
        let mut seq = ptr::null_mut();
        let mut start = ptr::null_mut();
        let status = bst_relate(cstr(k1).as_ptr(), cstr(k2).as_ptr(), &mut seq, &mut start);
        assert_eq!(status, BstStatus::Ok, "{}", last_error());
        let seq = take(seq);
        assert!(seq.contains("\"moves\""));
        let mut end = ptr::null_mut();
        assert_eq!(bst_replay_sequence(start, cstr(&seq).as_ptr(), &mut end), BstStatus::Ok, "{}", last_error());
        let mut closed = false;
        bst_complex_is_closed_pseudomanifold(end, &mut closed);
        assert!(closed);
        // Replaying from the wrong start fails the digest check.
        let mut other = ptr::null_mut();
        assert_eq!(bst_replay_sequence(end, cstr(&seq).as_ptr(), &mut other), BstStatus::Invariant);
        assert!(other.is_null());
        bst_complex_free(end);
        bst_complex_free(start);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(bst_complex_from_json(cstr("{not json").as_ptr(), &mut k), BstStatus::Input);
        assert!(k.is_null());
        let inconsistent = r#"{"dimension": 2, "vertices": [0, 1], "maximal_simplexes": [[0, 1]]}"#;
        assert_eq!(bst_complex_from_json(cstr(inconsistent).as_ptr(), &mut k), BstStatus::Input);
        assert!(!last_error().is_empty());

        assert_eq!(bst_complex_from_json(ptr::null(), &mut k), BstStatus::NullPointer);
        assert!(last_error().contains("null"));
        assert_eq!(bst_complex_from_json(cstr(TRIANGLE_BOUNDARY).as_ptr(), ptr::null_mut()), BstStatus::NullPointer);
        let mut dim = 0;
        assert_eq!(bst_complex_dimension(ptr::null(), &mut dim), BstStatus::NullPointer);
        assert_eq!(bst_apply_move(ptr::null_mut(), cstr("{}").as_ptr()), BstStatus::NullPointer);

        bst_complex_free(ptr::null_mut());
        bst_string_free(ptr::null_mut());
    }
}

#[test]
fn total_bound_matches_exact_integer() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(bst_total_bound(2, 1, 1, 8, &mut s), BstStatus::Ok);
        assert_eq!(take(s), (8 * 6u128.pow(28)).to_string());
        let v = CStr::from_ptr(bst_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
