use kenclose::approx::{approx_decide, decision_slack, laminar_count, Decision, LaminarBatch};
use kenclose::diag1d::DiagStructure;
use kenclose::minplus::{convolve_min_plus, decide_convolution};
use kenclose::oracle::{brute_force_opt, Constraint};
use kenclose::subsetsum::build_subsetsum_index;
use kenclose::{exact::solve_exact, score, Point, Rect, ScoreKind};
use proptest::prelude::*;

fn points(max_n: usize, range: i64) -> impl Strategy<Value = Vec<Point<i64>>> {
    prop::collection::vec((0..range, 0..range).prop_map(|(x, y)| Point::new(x, y)), 1..=max_n)
}

/// Windows of `k` consecutive survivors as `(start, end, weight)`.
fn windows(w: &[i64], alive: &[usize], k: usize) -> Vec<(usize, usize, i64)> {
    alive.windows(k).map(|s| (s[0], s[k - 1], s.iter().map(|&i| w[i]).sum())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn score_is_monotone_under_nesting(
        (x0, y0, w, h) in (-50i64..50, -50i64..50, 0i64..40, 0i64..40),
        (a, b, c, d) in (0i64..10, 0i64..10, 0i64..10, 0i64..10),
    ) {
        let inner = Rect::new(x0, y0, x0 + w, y0 + h);
        let outer = Rect::new(x0 - a, y0 - b, x0 + w + c, y0 + h + d);
        for kind in [ScoreKind::Perimeter, ScoreKind::Area] {
            prop_assert!(score(&inner, kind).unwrap() <= score(&outer, kind).unwrap());
        }
    }

    #[test]
    fn all_points_give_bounding_box(p in points(25, 30)) {
        let s = brute_force_opt(&p, p.len(), ScoreKind::Area, Constraint::None).unwrap();
        prop_assert_eq!(s.axis_rect().unwrap(), &Rect::bounding(&p).unwrap());
    }

    #[test]
    fn exact_score_monotone_in_k(p in points(30, 20)) {
        for kind in [ScoreKind::Area, ScoreKind::Perimeter] {
            let scores: Vec<i64> = (1..=p.len()).map(|k| solve_exact(&p, k, kind).unwrap().score).collect();
            prop_assert!(scores.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn convolution_decides_itself(
        ab in prop::collection::vec((0i64..100, 0i64..100), 1..20),
        pick in any::<prop::sample::Index>(),
    ) {
        let a: Vec<i64> = ab.iter().map(|p| p.0).collect();
        let b: Vec<i64> = ab.iter().map(|p| p.1).collect();
        let c = convolve_min_plus(&a, &b).unwrap();
        prop_assert_eq!(&c, &convolve_min_plus(&b, &a).unwrap());
        let mut c: Vec<i64> = c[..a.len()].to_vec();
        prop_assert!(decide_convolution(&a, &b, &c).unwrap());
        // every entry of the exact convolution is tight
        let l = pick.index(c.len());
        c[l] += 1;
        prop_assert!(!decide_convolution(&a, &b, &c).unwrap());
    }

    #[test]
    fn diag_fragments_stay_consistent(
        mut vals in prop::collection::vec(0i64..200, 1..=64),
        wts in prop::collection::vec(-9i64..=9, 64),
        k_pick in any::<prop::sample::Index>(),
        marked_seed in prop::collection::vec(any::<prop::sample::Index>(), 0..=8),
        ops in prop::collection::vec(0u8..2, 8),
        weighted in any::<bool>(),
    ) {
        vals.sort_unstable();
        let n = vals.len();
        let w = &wts[..n];
        let k = 1 + k_pick.index(n);
        let mut marked: Vec<usize> = marked_seed.iter().map(|i| i.index(n)).collect();
        marked.sort_unstable();
        marked.dedup();
        let q = marked.len().max(1);
        let mut ds = DiagStructure::build(&vals, weighted.then_some(w), k, q, &marked, false).unwrap();
        let mut alive: Vec<usize> = (0..n).collect();
        let mut deleted = 0;
        for (t, &m) in marked.iter().enumerate() {
            if ops[t] == 0 {
                ds.delete_marked(m).unwrap();
                alive.retain(|&p| p != m);
                deleted += 1;
            } else {
                ds.unmark(m).unwrap();
            }
            let frags = ds.fragments();
            prop_assert!(frags.len() <= 4 * q + 1);
            let wins = windows(if weighted { w } else { &vals }, &alive, k);
            for f in &frags {
                prop_assert!(f.diag_index >= k && f.diag_index <= k + deleted);
                let inside: Vec<i64> = wins
                    .iter()
                    .filter(|x| x.0 >= f.span.0 && x.0 <= f.span.1)
                    .map(|&(s, e, wt)| if weighted { wt } else { vals[e] - vals[s] })
                    .collect();
                prop_assert_eq!(Some(f.min_value), inside.iter().copied().min());
            }
        }
    }

    #[test]
    fn decision_certificates_are_sound(p in points(24, 12), k_pick in any::<prop::sample::Index>(), scale in 1u32..8) {
        prop_assume!(p.len() >= 2);
        let k = 2 + k_pick.index(p.len() - 1);
        let pf: Vec<Point<f64>> = p.iter().map(|q| Point::new(q.x as f64, q.y as f64)).collect();
        let opt = solve_exact(&pf, k, ScoreKind::Area).unwrap().score;
        for eps in [0.03, 0.25] {
            for a in [opt * 0.5, opt * 0.9, opt, opt * 1.1, scale as f64] {
                match approx_decide(&pf, k, eps, a).unwrap() {
                    Decision::CertifiedAbove => prop_assert!(opt > a, "certified above {} but opt is {}", a, opt),
                    Decision::Found(r) => {
                        prop_assert!(r.count_enclosed(&pf) >= k);
                        prop_assert!(r.width() * r.height() <= (1.0 + decision_slack(eps)) * a * (1.0 + 1e-9));
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closest_window_matches_scan(
        wts in prop::collection::vec(-50i64..=50, 1..=128),
        k_pick in any::<prop::sample::Index>(),
        del_seed in prop::collection::vec(any::<prop::sample::Index>(), 0..=6),
        target in -300i64..=300,
    ) {
        let n = wts.len();
        let k = 1 + k_pick.index(n);
        let values: Vec<i64> = (0..n as i64).collect();
        let mut del: Vec<usize> = del_seed.iter().map(|i| i.index(n)).collect();
        del.sort_unstable();
        del.dedup();
        let q = del.len().max(1);
        let idx = build_subsetsum_index(&values, &wts, k, q).unwrap();
        let alive: Vec<usize> = (0..n).filter(|i| del.binary_search(i).is_err()).collect();
        let best = windows(&wts, &alive, k)
            .into_iter()
            .min_by_key(|&(s, _, w)| ((w - target).abs(), w, s));
        match (best, idx.query_closest(&del, target)) {
            (Some((s, e, w)), Ok((got, win))) => {
                prop_assert_eq!(got, w);
                prop_assert_eq!(win, (s, e));
            }
            (None, Err(_)) => {}
            (b, g) => prop_assert!(false, "oracle {:?} vs index {:?}", b, g),
        }
    }

    #[test]
    fn laminar_matches_naive(
        splits in prop::collection::vec((0i64..30, 1i64..12, 1i64..5), 1..12),
        pts in prop::collection::vec((-2i64..45, -2i64..25), 0..40),
    ) {
        // nested chain plus disjoint siblings: interval i sits inside i-1
        // when it fits, otherwise it starts a new tower to the right
        let mut rects: Vec<Rect<i64>> = Vec::new();
        let mut base = 0;
        for &(off, len, dh) in &splits {
            let fits = rects.last().filter(|r| r.x_hi - r.x_lo > 2);
            let r = match fits {
                Some(o) => {
                    let lo = o.x_lo + 1 + off % (o.x_hi - o.x_lo - 1);
                    Rect::new(lo, 0, (lo + len).min(o.x_hi - 1).max(lo), o.y_hi + dh)
                }
                None => {
                    let lo = base + off % 3 + 1;
                    Rect::new(lo, 0, lo + len, dh)
                }
            };
            base = base.max(r.x_hi + 1);
            rects.push(r);
        }
        let des: Vec<Point<i64>> = rects.iter().map(|r| Point::new(r.x_hi, r.y_hi)).collect();
        let pts: Vec<Point<i64>> = pts.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        let batch = LaminarBatch::new(rects.clone(), des, pts.clone()).unwrap();
        let want: Vec<usize> = rects.iter().map(|r| r.count_enclosed(&pts)).collect();
        prop_assert_eq!(laminar_count(&batch), want);
    }
}
