use arithstruct::bounds::{general_bound, Ctx};
use arithstruct::brute::{certified_r_max, enumerate_brute_with, Scope, DEFAULT_CERT_BUDGET};
use arithstruct::reduction::{reduce_structure, LiftEnumerator};
use arithstruct::structures::{d_from_r, verify};
use arithstruct::Multigraph;
use num_bigint::BigInt;
use proptest::prelude::*;

fn lift_rs(g: &Multigraph<i64>) -> Vec<Vec<i64>> {
    LiftEnumerator::new(DEFAULT_CERT_BUDGET).structures(g).unwrap().to_vec()
}

fn brute_rs(g: &Multigraph<i64>) -> Vec<Vec<i64>> {
    let cert = certified_r_max(g, DEFAULT_CERT_BUDGET).unwrap().unwrap();
    let res = enumerate_brute_with(g, &cert, Some(&cert), Scope::All).unwrap();
    assert!(res.complete);
    res.structures.into_iter().map(|s| s.r).collect()
}

#[test]
fn counts_stay_below_the_general_bound() {
    let mut graphs = vec![
        Multigraph::complete(4, 1i64).unwrap(),
        Multigraph::complete(3, 2).unwrap(),
        Multigraph::cycle(5).unwrap(),
    ];
    for n in 3..=6 {
        graphs.push(Multigraph::path(n).unwrap());
    }
    for g in graphs {
        let count = lift_rs(&g).len();
        let bound = general_bound(g.n(), &BigInt::from(g.edge_count()), 128).unwrap();
        assert!(BigInt::from(count) <= bound.value, "{g:?}: {count} > {}", bound.value);
    }
}

#[test]
fn cycles_lift_and_search_agree() {
    for n in 3..=5 {
        let c = Multigraph::cycle(n).unwrap();
        let lifted = lift_rs(&c);
        assert_eq!(lifted, brute_rs(&c), "C{n}");
        for r in &lifted {
            assert!(verify(&c, &d_from_r(&c, r).unwrap()).unwrap());
        }
    }
}

#[test]
fn non_increasing_scope_is_the_sorted_part() {
    let g = Multigraph::complete(3, 3i64).unwrap();
    let cert = certified_r_max(&g, DEFAULT_CERT_BUDGET).unwrap().unwrap();
    let all = enumerate_brute_with(&g, &cert, Some(&cert), Scope::All).unwrap();
    let dec = enumerate_brute_with(&g, &cert, Some(&cert), Scope::NonIncreasing).unwrap();
    let sorted: Vec<_> = all.structures.into_iter().filter(|s| s.is_decreasing()).collect();
    assert_eq!(dec.structures, sorted);
    assert_eq!(dec.count(), 21);
}

/// `sigma_0(M) <= f(M)` for every `3 <= M <= 10^6`. `f` increases beyond
/// `e^e`, so a block whose largest `sigma_0` is below `f` at its start
/// needs no pointwise work.
#[test]
fn f_dominates_divisor_count_up_to_a_million() {
    const TOP: usize = 1_000_000;
    let mut sigma = vec![0u32; TOP + 1];
    for d in 1..=TOP {
        for k in (d..=TOP).step_by(d) {
            sigma[k] += 1;
        }
    }
    let mut ctx = Ctx::new(128).unwrap();
    let mut below_f = |s: u32, m: usize| {
        let lm = ctx.ln(&ctx.small(m as u64));
        let f = ctx.nicolas_f(&lm).unwrap();
        let f = ctx.exp(&f);
        ctx.small(u64::from(s)).cmp(&f).is_some_and(|c| c <= 0)
    };
    let mut start = 3;
    while start <= TOP {
        let end = if start < 16 { start + 1 } else { (start + 512).min(TOP + 1) };
        let top = *sigma[start..end].iter().max().unwrap();
        if !below_f(top, start) {
            for m in start..end {
                assert!(below_f(sigma[m], m), "M = {m}");
            }
        }
        start = end;
    }
}

fn small_graph() -> impl Strategy<Value = Multigraph<i64>> {
    (3usize..=4)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(0i64..=2, n * (n - 1) / 2)))
        .prop_filter_map("connected", |(n, mults)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if mults[k] > 0 {
                        edges.push((i, j, mults[k]));
                    }
                    k += 1;
                }
            }
            Multigraph::from_edges(n, &edges).ok().filter(|g| g.is_connected())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lift_and_search_agree(g in small_graph()) {
        prop_assert_eq!(lift_rs(&g), brute_rs(&g));
    }

    #[test]
    fn every_reduction_verifies(g in small_graph()) {
        for r in lift_rs(&g) {
            let s = d_from_r(&g, &r).unwrap();
            for i in 0..g.n() {
                let (g2, s2, step) = reduce_structure(&g, &s, i).unwrap();
                prop_assert_eq!(step.s, s.d[i]);
                prop_assert!(verify(&g2, &s2).unwrap());
            }
        }
    }
}
