use std::collections::BTreeMap;

use itertools::Itertools;
use mbcr_core::code::{CodeParams, MbcrCode, NodeShare, Phase, Stripe};
use mbcr_core::gf::{Field, Symbol};
use proptest::prelude::*;

/// Shift-and-add multiplication modulo `poly`, independent of the log tables.
fn slow_mul(a: u32, b: u32, m: u32, poly: u32) -> u32 {
    let (mut a, mut b, mut acc) = (a, b, 0u32);
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

fn slow_pow(a: u32, e: usize, m: u32, poly: u32) -> u32 {
    (0..e).fold(1, |acc, _| slow_mul(acc, a, m, poly))
}

fn code_for(k: usize, r: usize, m: u32) -> MbcrCode {
    let field = Field::with_degree(m).unwrap();
    MbcrCode::new(CodeParams::vandermonde(k, r, &field).unwrap()).unwrap()
}

fn stripe_from(code: &MbcrCode, raw: &[u32]) -> Stripe {
    let mask = code.field().order() - 1;
    Stripe::new(raw.iter().map(|&v| (v & mask) as Symbol).collect())
}

fn params() -> impl Strategy<Value = (usize, usize, u32)> {
    (1usize..=3, 1usize..=3, prop_oneof![Just(4u32), Just(8u32)])
}

fn case() -> impl Strategy<Value = (usize, usize, u32, Vec<u32>, u64)> {
    params().prop_flat_map(|(k, r, m)| {
        let b = k * (k + r);
        (Just(k), Just(r), Just(m), prop::collection::vec(any::<u32>(), b), any::<u64>())
    })
}

fn pick<T: Clone>(items: &[T], count: usize, salt: u64) -> Vec<T> {
    let all: Vec<Vec<T>> = items.iter().cloned().combinations(count).collect();
    all[(salt % all.len() as u64) as usize].clone()
}

#[test]
fn sizes_follow_the_family() {
    for (k, r) in (1..=3).cartesian_product(1..=3) {
        let code = code_for(k, r, 8);
        let p = code.params();
        let n = k + r;
        assert_eq!(p.stripe_len(), k * n);
        assert_eq!(p.alpha(), k + n - 1);
        assert_eq!((p.beta1(), p.beta2()), (2, 1));
        assert_eq!(p.gamma(), 2 * k + r - 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shares_match_direct_evaluation((k, r, m, raw, _) in case()) {
        let code = code_for(k, r, m);
        let poly = code.field().poly();
        let n = k + r;
        let stripe = stripe_from(&code, &raw);
        let x: Vec<&[Symbol]> = stripe.as_slice().chunks(k).collect();
        for share in code.encode(&stripe).unwrap() {
            let i = share.node_id;
            prop_assert_eq!(&share.systematic[..], x[i - 1]);
            for t in 1..n {
                let g = (i - 1 + t) % n;
                // column t uses evaluation point t - 1
                let expect = (0..k).fold(0u32, |acc, j| {
                    acc ^ slow_mul(x[g][j] as u32, slow_pow(t as u32 - 1, j, m, poly), m, poly)
                });
                prop_assert_eq!(share.parity(t) as u32, expect, "node {} offset {}", i, t);
            }
        }
    }

    #[test]
    fn any_k_nodes_reconstruct((k, r, m, raw, salt) in case()) {
        let code = code_for(k, r, m);
        let stripe = stripe_from(&code, &raw);
        let shares = code.encode(&stripe).unwrap();
        let ids = pick(&(1..=k + r).collect::<Vec<_>>(), k, salt);
        let chosen: Vec<&NodeShare> = ids.iter().map(|&i| &shares[i - 1]).collect();
        prop_assert_eq!(code.reconstruct(&chosen).unwrap(), stripe);
    }

    #[test]
    fn encoding_is_linear((k, r, m, raw, salt) in case()) {
        let code = code_for(k, r, m);
        let a = stripe_from(&code, &raw);
        let shifted: Vec<u32> = raw.iter().map(|v| v.rotate_left(salt as u32 % 32)).collect();
        let b = stripe_from(&code, &shifted);
        let sum = Stripe::new(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x ^ y).collect());
        let (ea, eb, es) = (code.encode(&a).unwrap(), code.encode(&b).unwrap(), code.encode(&sum).unwrap());
        for ((sa, sb), ss) in ea.iter().zip(&eb).zip(&es) {
            let combined: Vec<Symbol> = sa.symbols().zip(sb.symbols()).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(combined, ss.symbols().collect::<Vec<_>>());
        }
    }

    #[test]
    fn repair_restores_every_share((k, r, m, raw, salt) in case()) {
        let code = code_for(k, r, m);
        let n = k + r;
        let stripe = stripe_from(&code, &raw);
        let shares = code.encode(&stripe).unwrap();
        let failed = pick(&(1..=n).collect::<Vec<_>>(), r, salt);
        let survivors: BTreeMap<usize, Vec<NodeShare>> = (1..=n)
            .filter(|i| !failed.contains(i))
            .map(|i| (i, vec![shares[i - 1].clone()]))
            .collect();
        let plan = code.plan_repair(&failed).unwrap();
        let outcome = code.execute_repair(&plan, &survivors).unwrap();
        for &f in &failed {
            prop_assert_eq!(&outcome.regenerated[&f][0], &shares[f - 1]);
        }
        let t = &outcome.transcript;
        // each newcomer hears two symbols from each of the d = k survivors and one from every other newcomer
        prop_assert_eq!(t.count(Phase::Download), 2 * k * r);
        prop_assert_eq!(t.count(Phase::Exchange), r * (r - 1));
        for &f in &failed {
            prop_assert_eq!(t.received_per_newcomer()[&f], 2 * k + r - 1);
        }
    }

    #[test]
    fn collectors_mixing_regenerated_nodes_decode((k, r, m, raw, salt) in case()) {
        let code = code_for(k, r, m);
        let n = k + r;
        let stripe = stripe_from(&code, &raw);
        let mut shares = code.encode(&stripe).unwrap();
        let failed = pick(&(1..=n).collect::<Vec<_>>(), r, salt);
        let survivors: BTreeMap<usize, Vec<NodeShare>> = (1..=n)
            .filter(|i| !failed.contains(i))
            .map(|i| (i, vec![shares[i - 1].clone()]))
            .collect();
        let outcome = code.execute_repair(&code.plan_repair(&failed).unwrap(), &survivors).unwrap();
        for (&f, regen) in &outcome.regenerated {
            shares[f - 1] = regen[0].clone();
        }
        for ids in (1..=n).combinations(k) {
            let chosen: Vec<&NodeShare> = ids.iter().map(|&i| &shares[i - 1]).collect();
            prop_assert_eq!(code.reconstruct(&chosen).unwrap(), stripe.clone());
        }
    }
}

#[test]
fn wrong_failure_counts_are_rejected() {
    let code = code_for(2, 2, 8);
    assert!(code.plan_repair(&[1]).is_err());
    assert!(code.plan_repair(&[1, 1]).is_err());
    assert!(code.plan_repair(&[1, 2, 3]).is_err());
    assert!(code.plan_repair(&[1, 5]).is_err());
}

#[test]
fn corrupted_parity_is_reported() {
    let code = code_for(3, 2, 8);
    let stripe = Stripe::new((0..15).collect());
    let mut shares = code.encode(&stripe).unwrap();
    // node 2 stores a parity about group 1 at offset 4
    shares[1].parity[3] ^= 1;
    let chosen: Vec<&NodeShare> = shares[..3].iter().collect();
    assert!(matches!(code.reconstruct(&chosen), Err(mbcr_core::Error::Corruption(_))));
}
