use std::ffi::{CStr, CString};
use std::ptr;

use phrasebound_ffi::*;

const GRID: &str = r#"File type = "ooTextFile"
Object class = "TextGrid"

xmin = 0
xmax = 2
tiers? <exists>
size = 1
item []:
    item [1]:
        class = "IntervalTier"
        name = "words"
        xmin = 0
        xmax = 2
        intervals: size = 5
        intervals [1]:
            xmin = 0
            xmax = 0.2
            text = ""
        intervals [2]:
            xmin = 0.2
            xmax = 0.6
            text = "after"
        intervals [3]:
            xmin = 0.6
            xmax = 0.9
            text = "sil"
        intervals [4]:
            xmin = 0.9
            xmax = 1.8
            text = "dinner"
        intervals [5]:
            xmin = 1.8
            xmax = 2
            text = ""
"#;

fn last_error() -> String {
    let p = pb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn textgrid_pauses() {
    unsafe {
        let mut grid = ptr::null_mut();
        assert_eq!(pb_textgrid_parse(GRID.as_ptr(), GRID.len(), &mut grid), PbStatus::Ok);
        let (mut xmin, mut xmax) = (f64::NAN, f64::NAN);
        assert_eq!(pb_textgrid_span(grid, &mut xmin, &mut xmax), PbStatus::Ok);
        assert_eq!((xmin, xmax), (0.0, 2.0));

        let mut count = 0;
        assert_eq!(pb_textgrid_pauses(grid, 0.01, ptr::null_mut(), 0, &mut count), PbStatus::Ok);
        assert_eq!(count, 1);
        let mut buf = [PbPause::default(); 4];
        assert_eq!(pb_textgrid_pauses(grid, 0.01, buf.as_mut_ptr(), buf.len(), &mut count), PbStatus::Ok);
        assert_eq!(buf[0].after_word, 0);
        assert!((buf[0].duration - 0.3).abs() < 1e-9);

        assert_eq!(pb_textgrid_pauses(grid, 0.5, ptr::null_mut(), 0, &mut count), PbStatus::Ok);
        assert_eq!(count, 0);
        assert_eq!(pb_textgrid_pauses(grid, -1.0, ptr::null_mut(), 0, &mut count), PbStatus::InvalidArgument);
        pb_textgrid_free(grid);
    }
}

#[test]
fn textgrid_errors() {
    unsafe {
        let mut grid = ptr::null_mut();
        let bad = GRID.replace("xmax = 0.6", "xmax = 0.1");
        assert_eq!(pb_textgrid_parse(bad.as_ptr(), bad.len(), &mut grid), PbStatus::Parse);
        assert!(grid.is_null());
        assert!(last_error().contains("line"), "{}", last_error());
        assert_eq!(pb_textgrid_parse(ptr::null(), 5, &mut grid), PbStatus::NullPointer);
        assert_eq!(pb_textgrid_parse(GRID.as_ptr(), GRID.len(), ptr::null_mut()), PbStatus::NullPointer);
        pb_textgrid_free(ptr::null_mut());
    }
}

#[test]
fn buffer_too_small() {
    let short = "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n0\n3\n<exists>\n1\n\"IntervalTier\"\n\"words\"\n0\n3\n5\n\
                 0\n0.5\n\"one\"\n0.5\n1\n\"sil\"\n1\n1.5\n\"two\"\n1.5\n2\n\"sp\"\n2\n3\n\"three\"\n";
    unsafe {
        let mut grid = ptr::null_mut();
        assert_eq!(pb_textgrid_parse(short.as_ptr(), short.len(), &mut grid), PbStatus::Ok, "{}", last_error());
        let mut count = 0;
        let mut one = [PbPause::default(); 1];
        assert_eq!(pb_textgrid_pauses(grid, 0.01, one.as_mut_ptr(), 1, &mut count), PbStatus::BufferTooSmall);
        assert_eq!(count, 2);
        assert_eq!(pb_textgrid_pauses(grid, 0.01, ptr::null_mut(), 2, &mut count), PbStatus::NullPointer);
        let mut two = [PbPause::default(); 2];
        assert_eq!(pb_textgrid_pauses(grid, 0.01, two.as_mut_ptr(), 2, &mut count), PbStatus::Ok);
        assert_eq!((two[0].after_word, two[1].after_word), (0, 1));
        pb_textgrid_free(grid);
    }
}

#[test]
fn syllables() {
    let word = CString::new("banana").unwrap();
    let mut n = 0;
    assert_eq!(unsafe { pb_count_syllables(word.as_ptr(), &mut n) }, PbStatus::Ok);
    assert_eq!(n, 3);
    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { pb_count_syllables(invalid.as_ptr().cast(), &mut n) }, PbStatus::InvalidUtf8);
}

#[test]
fn sensitivity() {
    let mut s = PbSensitivity::default();
    assert_eq!(unsafe { pb_sensitivity_score(3, 1, 1, 5, &mut s) }, PbStatus::Ok);
    assert_eq!((s.precision, s.recall, s.f1), (0.75, 0.75, 0.75));
    assert_eq!(unsafe { pb_sensitivity_score(0, 0, 4, 4, &mut s) }, PbStatus::Ok);
    assert!(s.precision.is_nan());
    assert_eq!((s.recall, s.f1, s.f1_zero_tp), (0.0, 0.0, true));
    assert_eq!(unsafe { pb_sensitivity_score(0, 0, 0, 0, ptr::null_mut()) }, PbStatus::NullPointer);
}

#[test]
fn effect() {
    let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let b: Vec<f64> = a.iter().map(|v| 3.0 * v + 10.0).collect();
    let mut e = PbEffect::default();
    assert_eq!(unsafe { pb_effect_test(a.as_ptr(), 6, b.as_ptr(), 6, false, 0.05, &mut e) }, PbStatus::Ok);
    assert!(!e.paired && e.exact && e.significant);
    assert_eq!(e.statistic, 0.0);
    // Six distinct negative differences: p = 2 / 64.
    assert_eq!(unsafe { pb_effect_test(a.as_ptr(), 6, b.as_ptr(), 6, true, 0.05, &mut e) }, PbStatus::Ok);
    assert!(e.paired && e.exact && (e.p_value - 2.0 / 64.0).abs() < 1e-12, "{e:?}");
    assert_eq!(unsafe { pb_effect_test(a.as_ptr(), 3, b.as_ptr(), 3, false, 0.05, &mut e) }, PbStatus::InvalidArgument);
    assert!(last_error().contains('5'), "{}", last_error());
    assert_eq!(unsafe { pb_effect_test(a.as_ptr(), 6, b.as_ptr(), 6, false, 1.5, &mut e) }, PbStatus::InvalidArgument);
}

#[test]
fn lasso_round_trip() {
    // y = 1 + 2 x0 - x1 exactly.
    let n = 40;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let (a, b) = (i as f64 / 10.0, ((i * 7) % 11) as f64);
        x.extend([a, b]);
        y.push(1.0 + 2.0 * a - b);
    }
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(pb_lasso_fit(x.as_ptr(), y.as_ptr(), n, 2, 0.0, &mut model), PbStatus::Ok);
        let mut intercept = 0.0;
        let mut coef = [0.0; 2];
        assert_eq!(pb_lasso_coef(model, &mut intercept, coef.as_mut_ptr(), 2), PbStatus::Ok);
        assert!((intercept - 1.0).abs() < 1e-6 && (coef[0] - 2.0).abs() < 1e-6 && (coef[1] + 1.0).abs() < 1e-6, "{intercept} {coef:?}");
        let mut pred = vec![0.0; n];
        assert_eq!(pb_lasso_predict(model, x.as_ptr(), n, 2, pred.as_mut_ptr()), PbStatus::Ok);
        assert!(pred.iter().zip(&y).all(|(p, t)| (p - t).abs() < 1e-5));
        assert_eq!(pb_lasso_coef(model, &mut intercept, coef.as_mut_ptr(), 3), PbStatus::InvalidArgument);
        assert_eq!(pb_lasso_predict(model, x.as_ptr(), n, 1, pred.as_mut_ptr()), PbStatus::InvalidArgument);
        pb_lasso_free(model);

        assert_eq!(pb_lasso_fit(x.as_ptr(), y.as_ptr(), n, 2, -1.0, &mut model), PbStatus::Numeric);
        assert!(model.is_null());
        assert_eq!(pb_lasso_fit(x.as_ptr(), y.as_ptr(), n, 0, 0.1, &mut model), PbStatus::InvalidArgument);
    }
}

#[test]
fn errors_are_per_thread() {
    let mut n = 0;
    assert_eq!(unsafe { pb_count_syllables(ptr::null(), &mut n) }, PbStatus::NullPointer);
    std::thread::spawn(|| assert!(pb_last_error().is_null())).join().unwrap();
    assert!(last_error().contains("word"));
}
