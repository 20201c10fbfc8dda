use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vn_core::constructions::{base_alpha0, spine};
use vn_core::element::{random_element, random_partition};
use vn_core::verify::random_involution;
use vn_core::*;

fn alpha(n: usize) -> Alphabet {
    Alphabet::new(n).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact uniform measure of the union of cones.
fn measure(words: &[Word], n: usize) -> BigRational {
    let base = BigRational::from_integer((n as i64).into());
    words.iter().fold(BigRational::zero(), |acc, w| {
        acc + num_traits::pow(base.clone(), w.len()).recip()
    })
}

/// Partition check by brute force: pairwise prefix-freeness plus measure 1.
fn partition_oracle(words: &[Word], n: usize) -> bool {
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            if i != j && a.is_prefix_of(b) {
                return false;
            }
        }
    }
    measure(words, n) == BigRational::one()
}

/// Evaluation oracle: two elements agree iff they agree on every word of a
/// level deep enough for both domains.
fn agree_on_level(g: &VnElement, h: &VnElement) -> bool {
    let level = g.depth().max(h.depth());
    Word::all_of_length(g.alphabet(), level)
        .iter()
        .all(|w| g.apply_word(w).unwrap() == h.apply_word(w).unwrap())
}

fn degree() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(3), Just(5)]
}

fn random_word<R: Rng>(a: Alphabet, max_len: usize, rng: &mut R) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_letters((0..len).map(|_| rng.gen_range(1..=a.degree())).collect::<Vec<u8>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partition_check_matches_measure(n in 2usize..5, seed: u64, drop in 0usize..3) {
        let a = alpha(n);
        let mut r = rng(seed);
        let p = random_partition(a, r.gen_range(0..6), 4, &mut r);
        let mut words = p.words().to_vec();
        prop_assert!(partition_oracle(&words, n));
        prop_assert!(is_partition_set(&words, a).unwrap());
        // Damage the set: drop words, or add an extension of a member.
        if drop > 0 && words.len() > 1 {
            words.truncate(words.len() - drop.min(words.len() - 1));
        } else {
            let extra = words[0].child(1);
            words.push(extra);
        }
        prop_assert_eq!(is_partition_set(&words, a).unwrap(), partition_oracle(&words, n));
    }

    #[test]
    fn refine_is_common_coarsest(n in 2usize..4, seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let p = random_partition(a, r.gen_range(0..6), 4, &mut r);
        let q = random_partition(a, r.gen_range(0..6), 4, &mut r);
        let pq = p.refine(&q).unwrap();
        prop_assert_eq!(&pq, &q.refine(&p).unwrap());
        prop_assert!(partition_oracle(pq.words(), n));
        for w in pq.words() {
            prop_assert!(p.prefix_of(w).is_some() && q.prefix_of(w).is_some());
            // Coarsest: w is a member of p or of q.
            prop_assert!(p.words().contains(w) || q.words().contains(w));
        }
        let level = p.max_len() + r.gen_range(0..2);
        prop_assert!(is_partition_set(p.expand_to_level(level).unwrap().words(), a).unwrap());
    }

    #[test]
    fn point_equality_matches_prefixes(seed: u64) {
        let a = alpha(2);
        let mut r = rng(seed);
        let mk = |r: &mut ChaCha8Rng| {
            let pre = random_word(a, 3, r);
            let mut per = random_word(a, 3, r);
            if per.is_empty() {
                per = Word::from_letters(vec![1]);
            }
            (pre, per)
        };
        let (p1, q1) = mk(&mut r);
        let (p2, q2) = mk(&mut r);
        let x = point_normalize(p1.clone(), q1.clone()).unwrap();
        let y = point_normalize(p2.clone(), q2.clone()).unwrap();
        prop_assert_eq!(point_normalize(x.preperiod().clone(), x.period().clone()).unwrap(), x.clone());
        let lcm = q1.len() * q2.len();
        let k = p1.len() + p2.len() + 2 * lcm;
        let raw = |pre: &Word, per: &Word, i: usize| {
            if i < pre.len() { pre.letters()[i] } else { per.letters()[(i - pre.len()) % per.len()] }
        };
        let same = (0..k).all(|i| raw(&p1, &q1, i) == raw(&p2, &q2, i));
        prop_assert_eq!(x == y, same);
        for i in 0..k {
            prop_assert_eq!(x.letter(i), raw(&p1, &q1, i));
        }
    }

    #[test]
    fn reduced_form_is_unique(n in degree(), seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let g = random_element(a, 5, 4, &mut r);
        // Random refinement of the domain.
        let domain = PartitionSet::new(a, g.domain().iter().cloned()).unwrap();
        let extra = random_partition(a, r.gen_range(0..4), 3, &mut r);
        let fine = domain.refine(&extra).unwrap();
        let table = g.refined_table(&fine).unwrap();
        prop_assert_eq!(&VnElement::from_table(a, table).unwrap(), &g);
        let level = g.domain().iter().map(Word::len).max().unwrap() + 1;
        prop_assert_eq!(&VnElement::from_table(a, g.expanded_table(level).unwrap()).unwrap(), &g);
        prop_assert_eq!(&VnElement::from_text(&g.to_text()).unwrap(), &g);
    }

    #[test]
    fn group_axioms(n in degree(), seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let g = random_element(a, 4, 3, &mut r);
        let h = random_element(a, 4, 3, &mut r);
        let k = random_element(a, 4, 3, &mut r);
        let id = VnElement::identity(a);
        prop_assert_eq!(g.compose(&h).unwrap().compose(&k).unwrap(), g.compose(&h.compose(&k).unwrap()).unwrap());
        prop_assert_eq!(g.compose(&g.inverse()).unwrap(), id.clone());
        prop_assert_eq!(g.compose(&id).unwrap(), g.clone());
        prop_assert_eq!(g.conjugate(&h).unwrap().conjugate(&h.inverse()).unwrap(), g.clone());
        prop_assert!(g.commutator(&g).unwrap().is_identity());
        prop_assert_eq!(g.commutator(&h).unwrap().inverse(), h.commutator(&g).unwrap());
        // compose agrees with pointwise evaluation
        let level = g.depth() + h.depth();
        let gh = g.compose(&h).unwrap();
        for w in Word::all_of_length(a, level) {
            prop_assert_eq!(gh.apply_word(&w).unwrap(), g.apply_word(&h.apply_word(&w).unwrap()).unwrap());
        }
    }

    #[test]
    fn equality_matches_evaluation(n in degree(), seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let g = random_element(a, 3, 2, &mut r);
        let h = if r.gen_bool(0.3) { g.clone() } else { random_element(a, 3, 2, &mut r) };
        prop_assert_eq!(g == h, agree_on_level(&g, &h));
    }

    #[test]
    fn point_image_is_prefix_consistent(n in degree(), seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let g = random_element(a, 5, 4, &mut r);
        let mut per = random_word(a, 3, &mut r);
        if per.is_empty() {
            per = Word::from_letters(vec![n as u8]);
        }
        let p = point_normalize(random_word(a, 3, &mut r), per).unwrap();
        let image = g.apply_point(&p);
        let len = g.depth() + 8;
        let via_word = g.apply_word(&p.prefix(len)).unwrap();
        prop_assert_eq!(image.prefix(via_word.len()), via_word);
    }

    #[test]
    fn boundary_points_are_fixed(n in degree(), seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let g = random_element(a, 5, 4, &mut r);
        let report = g.support();
        let words: Vec<Word> = report.cones.iter().map(|c| c.0.clone()).collect();
        prop_assert!(is_partition_set(&words, a).unwrap());
        for (w, status) in &report.cones {
            let img = g.apply_word(w).unwrap();
            match status {
                ConeStatus::Fixed => prop_assert_eq!(&img, w),
                ConeStatus::Moved => prop_assert!(!img.is_comparable(w)),
                ConeStatus::Boundary(fp) => {
                    prop_assert!(w.is_prefix_of(&fp.prefix(w.len())));
                    prop_assert_eq!(&g.apply_point(fp), fp);
                }
            }
        }
    }

    #[test]
    fn volume_preservation_is_closed(n in degree(), seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let vp = |r: &mut ChaCha8Rng| loop {
            // Level permutations composed with embedded sigma_dots.
            let w = random_word(a, 2, r);
            let g = embed(&w, &sigma_dot(a)).unwrap();
            let level = 3;
            let mut pts = Word::all_of_length(a, level);
            use rand::seq::SliceRandom;
            pts.shuffle(r);
            let p = VnElement::from_table(a, Word::all_of_length(a, level).into_iter().zip(pts).collect()).unwrap();
            let x = g.compose(&p).unwrap();
            if x.is_volume_preserving() { return x; }
        };
        let g = vp(&mut r);
        let h = vp(&mut r);
        prop_assert!(g.compose(&h).unwrap().is_volume_preserving());
        prop_assert!(g.inverse().is_volume_preserving());
        for k in 1..=4 {
            let s = sigma_dot(a);
            let c = s.commutator(&embed(&spine(k), &s).unwrap()).unwrap();
            prop_assert!(c.is_volume_preserving());
        }
    }

    #[test]
    fn sign_is_multiplicative_and_refinement_invariant(n in prop_oneof![Just(3usize), Just(5)], seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let g = random_element(a, 4, 3, &mut r);
        let h = random_element(a, 4, 3, &mut r);
        prop_assert_eq!(g.sign().unwrap() * h.sign().unwrap(), g.compose(&h).unwrap().sign().unwrap());
        prop_assert_eq!(g.sign_refinement_probe(10, seed), ProbeOutcome::WellDefined);
    }

    #[test]
    fn embedding_is_a_homomorphism(n in degree(), seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let g = random_element(a, 3, 3, &mut r);
        let h = random_element(a, 3, 3, &mut r);
        let u = random_word(a, 3, &mut r);
        let v = random_word(a, 3, &mut r);
        prop_assert_eq!(
            embed(&u, &g.compose(&h).unwrap()).unwrap(),
            embed(&u, &g).unwrap().compose(&embed(&u, &h).unwrap()).unwrap()
        );
        prop_assert_eq!(embed(&u, &embed(&v, &g).unwrap()).unwrap(), embed(&u.concat(&v), &g).unwrap());
        prop_assert!(embed(&u, &g).unwrap().support().supported_in(&u));
    }

    #[test]
    fn translation_by_t(n in degree(), seed: u64, k in 1usize..6) {
        let a = alpha(n);
        let mut r = rng(seed);
        let g = random_element(a, 4, 4, &mut r);
        let t = make_t(a);
        prop_assert_eq!(embed(&spine(k), &g).unwrap().conjugate(&t).unwrap(), embed(&spine(k + 1), &g).unwrap());
        let tail = random_word(a, 4, &mut r);
        prop_assert_eq!(t.apply_word(&spine(2).concat(&tail)).unwrap(), spine(1).concat(&tail));
    }

    #[test]
    fn s_alpha_constructors_agree(n in degree(), seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let ell = r.gen_range(0..=6);
        let seq: Vec<VnElement> = (0..ell)
            .map(|_| if r.gen_bool(0.5) { VnElement::identity(a) } else { random_element(a, 3, 3, &mut r) })
            .collect();
        prop_assert_eq!(make_s_alpha(a, &seq).unwrap(), make_s_alpha_direct(a, &seq).unwrap());
    }

    #[test]
    fn s_alpha_involution_iff_entries_involutive(n in prop_oneof![Just(2usize), Just(3)], seed: u64) {
        let a = alpha(n);
        let mut r = rng(seed);
        let ell = r.gen_range(1..=5);
        let mut seq: Vec<VnElement> = (0..ell)
            .map(|_| if r.gen_bool(0.4) { VnElement::identity(a) } else { random_involution(a, &mut r) })
            .collect();
        let s = make_s_alpha(a, &seq).unwrap();
        prop_assert_eq!(s.order_bounded(4), Order::Finite(2));
        // Swap in an order-3 entry.
        let three = if n == 2 {
            VnElement::from_text("vn 2\n1 -> 2.1\n2.1 -> 2.2\n2.2 -> 1\n").unwrap()
        } else {
            dot(&Permutation::parse(a, "(1 2 3)").unwrap(), a).unwrap()
        };
        prop_assert_eq!(three.order_bounded(3), Order::Finite(3));
        let i = r.gen_range(0..ell);
        seq[i] = three;
        let s = make_s_alpha(a, &seq).unwrap();
        prop_assert!(!s.compose(&s).unwrap().is_identity());
    }

    #[test]
    fn plans_satisfy_padding_conditions(n in degree(), size in 1usize..5, powers: bool) {
        let a = alpha(n);
        let strategy = if powers { SidonStrategy::PowersOfTwo } else { SidonStrategy::Greedy };
        let base = vec![base_alpha0(a); size];
        let plan = plan_alpha(&base, strategy).unwrap();
        let members = plan.support().members().to_vec();
        let pad = plan.padding();
        prop_assert_eq!(members.len(), size);
        prop_assert!(vn_core::constructions::is_sidon(&members));
        prop_assert_eq!(pad, members.last().unwrap() - members.first().unwrap());
        for i in 1..=plan.len() {
            let nonid = !plan.entries()[i - 1].is_identity();
            prop_assert_eq!(nonid, members.contains(&(i as u64)));
            prop_assert!(plan.entries()[i - 1].order_bounded(2) != Order::ExceedsBound(2));
            if (i as u64) <= pad || (i as u64) + pad >= plan.len() as u64 {
                prop_assert!(!nonid);
            }
        }
    }
}

#[test]
fn greedy_sidon_matches_brute_force() {
    // Brute-force oracle: at each step take the least integer keeping all
    // pairwise differences distinct, checking every pair from scratch.
    let mut expected: Vec<u64> = Vec::new();
    let mut c = 1;
    while expected.len() < 10 {
        let mut cand = expected.clone();
        cand.push(c);
        let mut diffs = Vec::new();
        for i in 0..cand.len() {
            for j in i + 1..cand.len() {
                diffs.push(cand[j] - cand[i]);
            }
        }
        let total = diffs.len();
        diffs.sort();
        diffs.dedup();
        if diffs.len() == total {
            expected = cand;
        }
        c += 1;
    }
    assert_eq!(sidon_generate(10, SidonStrategy::Greedy).members(), expected.as_slice());
    assert_eq!(&expected[..4], &[1, 2, 4, 8]);
}

#[test]
fn partition_measure_examples() {
    let a = alpha(2);
    let w = |s: &str| s.parse::<Word>().unwrap();
    assert_eq!(measure(&[w("1"), w("2.1")], 2), BigRational::new(3.into(), 4.into()));
    assert!(!is_partition_set(&[w("1"), w("2.1")], a).unwrap());
}

#[test]
fn refine_brute_force_example() {
    // Tree union of {11,12,2} and {1,21,22}: all leaves at depth 2.
    let a = alpha(2);
    let p = |items: &[&str]| PartitionSet::new(a, items.iter().map(|s| s.parse().unwrap())).unwrap();
    let lhs = p(&["1.1", "1.2", "2"]).refine(&p(&["1", "2.1", "2.2"])).unwrap();
    let oracle: Vec<Word> = Word::all_of_length(a, 2);
    assert_eq!(lhs.words(), oracle.as_slice());
}

#[test]
fn expand_then_reduce_round_trip_100() {
    let mut r = rng(7);
    for _ in 0..100 {
        let n = [2, 3, 5][r.gen_range(0..3)];
        let a = alpha(n);
        let g = random_element(a, 5, 4, &mut r);
        let level = g.domain().iter().map(Word::len).max().unwrap() + r.gen_range(0..2);
        assert_eq!(VnElement::from_table(a, g.expanded_table(level).unwrap()).unwrap(), g);
    }
}

#[test]
fn even_degree_sign_witness() {
    let a = alpha(2);
    let s = sigma_dot(a);
    let ProbeOutcome::Inconsistent { base, refined, refined_parity } = s.sign_refinement_probe(0, 0) else {
        panic!("expected a witness");
    };
    assert_eq!((base, refined_parity), (Sign::Minus, Sign::Plus));
    // Independent parity computation of both tables: level-1 images (2, 1)
    // form a transposition; refined images (2.1, 2.2, 1) a 3-cycle.
    let images: Vec<String> = refined.iter().map(|p| p.1.to_string()).collect();
    assert_eq!(images, ["2.1", "2.2", "1"]);
}
