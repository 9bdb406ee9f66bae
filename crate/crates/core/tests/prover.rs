use ordrep::prover::render::{COLUMNS, EXTREMAL_HEADER, NOTE_PREFIX};
use ordrep::prover::types::UNIT;
use ordrep::prover::*;
use ordrep::{EdgeOrder, Metric, PointConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_ORDER: &str = "de < ad < ac < ab < ce < be < bc < cd < ae < bd";

fn known() -> EdgeOrder {
    parse_order_text(KNOWN_ORDER).unwrap()
}

fn refute_known() -> ProofLog {
    let limits = ProveLimits { max_depth: 1, ..ProveLimits::default() };
    match prove(&known(), ConstraintMode::ExtremalOnly, limits).unwrap() {
        ProveResult::Refuted(log) => log,
        ProveResult::Unknown { reason, .. } => panic!("not refuted: {reason}"),
    }
}

fn sample_order(n: usize, rng: &mut ChaCha8Rng) -> EdgeOrder {
    let coords: Vec<f64> = (0..2 * n).map(|_| rng.gen()).collect();
    EdgeOrder::from_config(&PointConfig::new(n, 2, coords, Metric::Euclidean).unwrap()).unwrap()
}

#[test]
fn order_text_round_trips() {
    assert_eq!(order_text(&known()), KNOWN_ORDER);
}

#[test]
fn seed_lines_match_the_reference_transcript() {
    let text = render_proof(&refute_known());
    let lines: Vec<&str> = text.lines().collect();
    let at = lines.iter().position(|l| *l == COLUMNS).unwrap();
    assert_eq!(lines[0], format!("TEST OF EDGE ORDER {KNOWN_ORDER}"));
    assert_eq!(lines[1], EXTREMAL_HEADER);
    let expect = [
        "1.\tsmallest\ta:de, b:ad, b:de, c:ad, c:de, d:bc, e:ab, e:ac < 60\t",
        "2.\tdominated\ta:be, a:ce, b:ac, b:cd, c:ab, d:ab, d:ac, d:be, d:ce, e:ad < 90\t",
        "3.\tlargest\ta:bc, a:bd, a:cd, b:ae, c:ae, c:bd, d:ae, e:bd, e:cd > 60\t",
        "4.\ton bndry\ta,b,d,e since in fn[X]\t",
    ];
    for (k, e) in expect.iter().enumerate() {
        assert_eq!(lines[at + 1 + k], *e);
    }
}

#[test]
fn boundary_points_exclude_c_inside_abd() {
    let mut s = init_state(&known(), ConstraintMode::ExtremalOnly).unwrap();
    assert_eq!(s.propagate(), Propagation::Fixpoint);
    let fact = Fact::new(2, [0, 1, 3], Alt::Hull);
    assert_eq!(s.status(&fact), Some(false));
    let shown = s.lines().iter().any(|l| matches!(&l.prop, Prop::Fact { fact: f, holds: false, .. } if *f == fact));
    assert!(shown);
    // a, b, d and e are farthest neighbours, so none lies inside a triangle
    for p in [0, 1, 3, 4] {
        let others: Vec<usize> = (0..5).filter(|&q| q != p).take(3).collect();
        assert_eq!(s.status(&Fact::new(p, [others[0], others[1], others[2]], Alt::Hull)), Some(false));
    }
}

#[test]
fn known_order_is_refuted_with_one_split_and_checks() {
    let log = refute_known();
    let splits = log.root.entries.iter().filter(|e| matches!(e, Entry::Cases(_))).count();
    assert_eq!(splits, 1);
    let Some(Entry::Cases(c)) = log.root.entries.last() else { panic!("ends in a split") };
    assert_eq!(c.branches.len(), 4);
    let text = render_proof(&log);
    assert!(text.contains("CASE ANALYSIS using points a,bcd:"));
    assert!(text.contains("CONTRADICTION in all four cases!"));
    assert_eq!(check_proof(&text).unwrap(), CheckOutcome::Refutation);
    // the full order also refutes it, and the transcript checks under it
    let full = prove(&known(), ConstraintMode::FullOrder, ProveLimits::default()).unwrap();
    assert!(full.is_refuted());
    assert_eq!(check_proof(&render_proof(full.log())).unwrap(), CheckOutcome::Refutation);
}

#[test]
fn lines_are_numbered_consecutively() {
    let log = refute_known();
    let numbers: Vec<usize> = log.lines().iter().map(|l| l.number).collect();
    assert_eq!(numbers, (1..=numbers.len()).collect::<Vec<_>>());
    for l in log.lines() {
        assert!(l.refs.iter().all(|&r| r < l.number));
    }
}

#[test]
fn empty_interval_is_a_contradiction() {
    let mut s = init_state(&known(), ConstraintMode::ExtremalOnly).unwrap();
    let a_de = Angle::new(0, 3, 4);
    // a:de < 60 as the smallest angle of ade
    let (_, hi) = s.bounds(a_de);
    assert_eq!(hi, Bnd { value: 60 * UNIT, strict: true });
    assert!(s.give_bound(a_de, Dir::Lower, Bnd { value: 50 * UNIT, strict: false }).is_ok());
    let id = s.give_bound(a_de, Dir::Lower, Bnd { value: 60 * UNIT, strict: false }).unwrap_err();
    assert!(s.lines().iter().any(|l| l.number == id && l.tag == Tag::Contradiction));
}

#[test]
fn betweenness_adds_angles() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let order = sample_order(4, &mut rng);
    let mut s = init_state(&order, ConstraintMode::FullOrder).unwrap();
    assert_eq!(s.propagate(), Propagation::Fixpoint);
    // c seen from a between b and d; then a:bd = a:bc + a:cd
    let fact = Fact::new(0, [1, 2, 3], Alt::Middle(2));
    if s.status(&fact) == Some(false) {
        return;
    }
    s.assume(&fact);
    let mut closed = s.give_bound(Angle::new(0, 1, 2), Dir::Lower, Bnd { value: 100 * UNIT, strict: false }).is_err();
    closed |= s.give_bound(Angle::new(0, 2, 3), Dir::Lower, Bnd { value: 100 * UNIT, strict: false }).is_err();
    closed |= matches!(s.propagate(), Propagation::Contradiction(_));
    assert!(closed);
}

#[test]
fn planar_orders_are_never_refuted() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for it in 0..1500 {
        let n = 5 + it % 2;
        let order = sample_order(n, &mut rng);
        for mode in [ConstraintMode::FullOrder, ConstraintMode::ExtremalOnly] {
            let r = prove(&order, mode, ProveLimits::default()).unwrap();
            assert!(!r.is_refuted(), "{}", render_proof(r.log()));
        }
    }
}

#[test]
fn unknown_results_check_as_non_refutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let order = sample_order(5, &mut rng);
    let r = prove(&order, ConstraintMode::FullOrder, ProveLimits::default()).unwrap();
    let ProveResult::Unknown { log, reason } = r else { panic!("planar order refuted") };
    let text = render_proof(&log);
    assert!(text.trim_end().ends_with(&format!("{NOTE_PREFIX}{reason}")));
    assert_eq!(check_proof(&text).unwrap(), CheckOutcome::NonRefutation);
}

#[test]
fn full_order_refutes_whatever_extremal_refutes() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut extremal = 0;
    for _ in 0..600 {
        let order = EdgeOrder::random(5, &mut rng);
        let e = prove(&order, ConstraintMode::ExtremalOnly, ProveLimits::default()).unwrap();
        if e.is_refuted() {
            extremal += 1;
            assert!(prove(&order, ConstraintMode::FullOrder, ProveLimits::default()).unwrap().is_refuted());
        }
    }
    assert!(extremal > 0);
}

#[test]
fn random_refutations_replay() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut refuted = 0;
    for _ in 0..400 {
        let order = EdgeOrder::random(5, &mut rng);
        let r = prove(&order, ConstraintMode::FullOrder, ProveLimits::default()).unwrap();
        let expect = if r.is_refuted() { CheckOutcome::Refutation } else { CheckOutcome::NonRefutation };
        refuted += r.is_refuted() as usize;
        assert_eq!(check_proof(&render_proof(r.log())).unwrap(), expect);
    }
    assert!(refuted > 0);
}

#[test]
fn tampered_transcripts_are_rejected() {
    let text = render_proof(&refute_known());
    let lines: Vec<&str> = text.lines().collect();
    let edit = |f: &dyn Fn(&mut Vec<String>)| {
        let mut v: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        f(&mut v);
        v.join("\n") + "\n"
    };
    let find = |pat: &str| lines.iter().position(|l| l.contains(pat)).unwrap();

    // a tripod bound that does not follow from its premises
    let t = find("tripod");
    let weaker = edit(&|v| v[t] = v[t].replace("= 150", "= 140").replace("< 150", "< 140"));
    assert!(check_proof(&weaker).is_err());

    // a smallest-angle claim about an angle that is not the smallest
    let one = find("1.\tsmallest");
    let wrong = edit(&|v| v[one] = v[one].replace("a:de,", "a:bd,"));
    assert!(check_proof(&wrong).is_err());

    // citing a later line
    let cite_later = edit(&|v| v[t] = format!("{}99.", v[t]));
    assert!(check_proof(&cite_later).is_err());

    // dropping the last case leaves the split open
    let last_case = lines.iter().rposition(|l| l.contains("(iv) ASSUMING")).unwrap();
    let end = find("CONTRADICTION in all four cases!");
    let dropped = edit(&|v| {
        v.drain(last_case..end);
    });
    assert!(check_proof(&dropped).is_err());

    // a different order in the header
    let header = edit(&|v| v[0] = "TEST OF EDGE ORDER ad < de < ac < ab < ce < be < bc < cd < ae < bd".into());
    assert!(check_proof(&header).is_err());

    // renumbering breaks consecutiveness
    let renumbered = edit(&|v| v[t] = v[t].replacen(&format!("{}.", t), "77.", 1));
    assert!(check_proof(&renumbered).is_err() || renumbered == text);
}

#[test]
fn empty_log_renders_the_header_only() {
    let log = ProofLog::empty(known(), ConstraintMode::ExtremalOnly);
    let text = render_proof(&log);
    assert!(text.ends_with(&format!("{COLUMNS}\n")));
    assert!(!text.lines().any(|l| l.starts_with("1.")));
    assert_eq!(check_proof(&text).unwrap(), CheckOutcome::NonRefutation);
}

#[test]
fn too_few_points_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let order = EdgeOrder::random(3, &mut rng);
    assert!(prove(&order, ConstraintMode::FullOrder, ProveLimits::default()).is_err());
    assert!(init_state(&order, ConstraintMode::FullOrder).is_err());
}

#[test]
fn line_limit_turns_a_refutation_into_unknown() {
    let limits = ProveLimits { max_depth: 1, max_lines: 10 };
    let r = prove(&known(), ConstraintMode::ExtremalOnly, limits).unwrap();
    assert!(!r.is_refuted());
}
