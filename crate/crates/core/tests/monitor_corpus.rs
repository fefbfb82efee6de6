mod common;

use voxlabel::buchi::{ltl_to_buchi, run_monitor, MonitorNfa, Verdict};
use voxlabel::ltl::{parse_ltl, Alphabet};

#[test]
fn verdicts_match_lasso_extension_oracle() {
    let a = Alphabet::new(&["split_lane", "moving_vehicle"]).unwrap();
    for text in common::CORPUS {
        let f = parse_ltl(text, &a).unwrap();
        let m = MonitorNfa::new(ltl_to_buchi(&f, &a).unwrap());
        for len in 0..=4 {
            for w in common::words(2, len) {
                assert_eq!(
                    run_monitor(&m, &w),
                    common::oracle_verdict(&f, &w, 2),
                    "{text} on {w:?}"
                );
            }
        }
    }
}

#[test]
fn split_lane_twice_is_a_bad_prefix_at_the_second_step() {
    let a = Alphabet::new(&["split_lane"]).unwrap();
    let f = parse_ltl(common::CORPUS[0], &a).unwrap();
    let m = MonitorNfa::new(ltl_to_buchi(&f, &a).unwrap());
    let s = a.symbol(&["split_lane"]).unwrap();
    let e = a.symbol::<&str>(&[]).unwrap();
    assert_eq!(run_monitor(&m, &[s, s]), Verdict::BadPrefix(1));
    assert_eq!(run_monitor(&m, &[s, e, s, e]), Verdict::Undetermined);
    assert_eq!(run_monitor(&m, &[e, s, e, s, s]), Verdict::BadPrefix(4));
    assert_eq!(run_monitor(&m, &[]), Verdict::Undetermined);
}
