use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use irc_core::dm_region::{full_joint, hybrid_term, theorem1_region, Destination};
use irc_core::verify::random;
use irc_core::NamedJoint;

fn names(parts: &[&[&str]]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().map(|s| s.to_string())).collect()
}

// The four relay subsets for two relays, written out one by one.
fn brute_force(j: &NamedJoint, w: &[&str], y: &str, base: [&str; 2], v: &[&str]) -> f64 {
    let mi = |a: Vec<String>, b: Vec<String>, c: Vec<String>| j.mutual_info(&a, &b, &c).unwrap();
    let none = mi(
        names(&[w]),
        names(&[&["Yh3_1", "Yh3_2", y]]),
        names(&[v, &["X3_1", "X3_2", "Q"]]),
    );
    let first = mi(
        names(&[w, &["X3_1"]]),
        names(&[&["Yh3_2", y]]),
        names(&[v, &["X3_2", "Q"]]),
    ) - mi(
        names(&[&["Yh3_1"]]),
        names(&[&["Y3_1"]]),
        names(&[&base, &["X3_1", "X3_2", "Yh3_2", y, "Q"]]),
    );
    let second = mi(
        names(&[w, &["X3_2"]]),
        names(&[&["Yh3_1", y]]),
        names(&[v, &["X3_1", "Q"]]),
    ) - mi(
        names(&[&["Yh3_2"]]),
        names(&[&["Y3_2"]]),
        names(&[&base, &["X3_1", "X3_2", "Yh3_1", y, "Q"]]),
    );
    let both = mi(names(&[w, &["X3_1", "X3_2"]]), names(&[&[y]]), names(&[v, &["Q"]]))
        - mi(
            names(&[&["Yh3_1", "Yh3_2"]]),
            names(&[&["Y3_1", "Y3_2"]]),
            names(&[&base, &["X3_1", "X3_2", y, "Q"]]),
        );
    none.min(first).min(second).min(both)
}

#[test]
fn two_relay_hybrid_term_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let inst = random::dm_instance(&mut rng, 2, 2, 2);
        let j = full_joint(&inst.channel, &inst.input).unwrap();
        let node4: [(&[&str], &[&str]); 4] = [
            (&["X1"], &["U2"]),
            (&["X1"], &["U1", "U2"]),
            (&["X1", "U2"], &[]),
            (&["X1", "U2"], &["U1"]),
        ];
        for (w, v) in node4 {
            let got = hybrid_term(&j, w, Destination::Node4, v, 2).unwrap();
            let want = brute_force(&j, w, "Y4", ["X1", "U2"], v);
            assert!((got - want).abs() < 1e-12, "{w:?} | {v:?}: {got} vs {want}");
        }
        let node5: [(&[&str], &[&str]); 4] = [
            (&["X2"], &["U1"]),
            (&["X2"], &["U1", "U2"]),
            (&["X2", "U1"], &[]),
            (&["X2", "U1"], &["U2"]),
        ];
        for (w, v) in node5 {
            let got = hybrid_term(&j, w, Destination::Node5, v, 2).unwrap();
            let want = brute_force(&j, w, "Y5", ["X2", "U1"], v);
            assert!((got - want).abs() < 1e-12, "{w:?} | {v:?}: {got} vs {want}");
        }
    }
}

#[test]
fn two_relay_region_is_well_formed() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let inst = random::dm_instance(&mut rng, 2, 2, 2);
    let region = theorem1_region(&inst.channel, &inst.input).unwrap();
    assert_eq!(region.len(), 7);
    assert!(region.iter().all(|i| i.rhs.is_finite()));
}
