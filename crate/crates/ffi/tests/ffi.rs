use std::ffi::{CStr, CString};
use std::ptr;

use geobst_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(geobst_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn greedy_round_trip() {
    unsafe {
        let keys = [1usize, 2, 3, 4, 5];
        let mut seq = ptr::null_mut();
        assert_eq!(geobst_sequence_new(5, keys.as_ptr(), keys.len(), &mut seq), GeobstStatus::Ok);
        let mut len = 0;
        assert_eq!(geobst_sequence_len(seq, &mut len), GeobstStatus::Ok);
        assert_eq!(len, 5);
        let mut trace = ptr::null_mut();
        assert_eq!(geobst_run_greedy(seq, ptr::null(), &mut trace), GeobstStatus::Ok);
        let mut cost = 0;
        assert_eq!(geobst_trace_cost(trace, &mut cost), GeobstStatus::Ok);
        assert_eq!(cost, 9);
        let mut ok = false;
        assert_eq!(geobst_trace_is_satisfied(trace, &mut ok), GeobstStatus::Ok);
        assert!(ok);
        let mut text = ptr::null_mut();
        assert_eq!(geobst_trace_to_text(trace, &mut text), GeobstStatus::Ok);
        assert!(CStr::from_ptr(text).to_str().unwrap().starts_with("# n=5 m=5"));
        geobst_string_free(text);
        geobst_trace_free(trace);
        geobst_sequence_free(seq);
    }
}

#[test]
fn generated_sequence_with_initial_tree() {
    unsafe {
        let class = CString::new("preorder").unwrap();
        let mut seq = ptr::null_mut();
        assert_eq!(geobst_generate(class.as_ptr(), 32, 2, 4, &mut seq), GeobstStatus::Ok);
        let init = CString::new("balanced").unwrap();
        let mut trace = ptr::null_mut();
        assert_eq!(geobst_run_greedy(seq, init.as_ptr(), &mut trace), GeobstStatus::Ok);
        let mut ok = false;
        assert_eq!(geobst_trace_is_satisfied(trace, &mut ok), GeobstStatus::Ok);
        assert!(ok);
        geobst_trace_free(trace);
        geobst_sequence_free(seq);
    }
}

#[test]
fn rgreedy_with_text_tree() {
    unsafe {
        let s = CString::new("6 6\n6 4 5 3 2 1\n").unwrap();
        let mut seq = ptr::null_mut();
        assert_eq!(geobst_sequence_from_text(s.as_ptr(), &mut seq), GeobstStatus::Ok);
        let t = CString::new("(2,1 | 3,1,2 3,2,1)").unwrap();
        let mut tree = ptr::null_mut();
        assert_eq!(geobst_tree_from_text(t.as_ptr(), &mut tree), GeobstStatus::Ok);
        let mut trace = ptr::null_mut();
        assert_eq!(geobst_run_rgreedy(seq, tree, &mut trace), GeobstStatus::Ok);
        let mut cost = 0;
        geobst_trace_cost(trace, &mut cost);
        assert_eq!(cost, 15);
        geobst_trace_free(trace);

        let mut canon = ptr::null_mut();
        assert_eq!(geobst_tree_decompose(seq, &mut canon), GeobstStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(geobst_tree_to_text(canon, &mut text), GeobstStatus::Ok);
        assert!(CStr::from_ptr(text).to_str().unwrap().starts_with('('));
        geobst_string_free(text);
        geobst_tree_free(canon);
        geobst_tree_free(tree);
        geobst_sequence_free(seq);
    }
}

#[test]
fn opt_and_limits() {
    unsafe {
        let keys = [2usize, 1];
        let mut seq = ptr::null_mut();
        geobst_sequence_new(2, keys.as_ptr(), 2, &mut seq);
        let (mut cost, mut exact) = (0, false);
        assert_eq!(geobst_opt(seq, 1_000_000, &mut cost, &mut exact), GeobstStatus::Ok);
        assert_eq!((cost, exact), (3, true));
        geobst_sequence_free(seq);

        let keys = [3usize, 6, 1, 4, 2, 5];
        geobst_sequence_new(6, keys.as_ptr(), 6, &mut seq);
        assert_eq!(geobst_opt(seq, 1, &mut cost, &mut exact), GeobstStatus::ResourceLimit);
        assert!(!exact);
        assert!(cost >= 6);
        assert!(last_error().contains("resource limit"));
        geobst_sequence_free(seq);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let keys = [1usize, 3];
        let mut seq = ptr::null_mut();
        assert_eq!(geobst_sequence_new(2, keys.as_ptr(), 2, &mut seq), GeobstStatus::InvalidArgument);
        assert!(seq.is_null());
        assert!(last_error().contains("invalid argument"));
        assert_eq!(geobst_sequence_new(2, keys.as_ptr(), 2, ptr::null_mut()), GeobstStatus::NullPointer);
        let bad = CString::new("3 2\n1\n").unwrap();
        assert_eq!(geobst_sequence_from_text(bad.as_ptr(), &mut seq), GeobstStatus::Parse);
        let mut cost = 0;
        assert_eq!(geobst_trace_cost(ptr::null(), &mut cost), GeobstStatus::NullPointer);
        let class = CString::new("nope").unwrap();
        assert_eq!(geobst_generate(class.as_ptr(), 4, 2, 0, &mut seq), GeobstStatus::InvalidArgument);
        geobst_sequence_free(ptr::null_mut());
        geobst_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/geobst.h")).unwrap();
    for name in [
        "geobst_last_error",
        "geobst_string_free",
        "geobst_sequence_new",
        "geobst_generate",
        "geobst_sequence_from_text",
        "geobst_sequence_to_text",
        "geobst_sequence_len",
        "geobst_sequence_free",
        "geobst_tree_decompose",
        "geobst_tree_from_text",
        "geobst_tree_to_text",
        "geobst_tree_free",
        "geobst_run_greedy",
        "geobst_run_rgreedy",
        "geobst_trace_cost",
        "geobst_trace_is_satisfied",
        "geobst_trace_to_text",
        "geobst_trace_free",
        "geobst_opt",
        "typedef struct GeobstSequence GeobstSequence",
        "GEOBST_STATUS_PANIC = 5",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
