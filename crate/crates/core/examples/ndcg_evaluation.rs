//! Scores a submitted ranking against the true relevance of a year.
//!
//! cargo run --release --example ndcg_evaluation -- [ranking.tsv truth.tsv] [k]
//!
//! Without files, scores the three-affiliation example and its ideal order.

use std::collections::BTreeMap;
use std::path::Path;

use affrank::bench::{dcg, ndcg_at_k, read_ranking, read_truth, RankedList, DEFAULT_K};
use affrank::AffiliationId;

fn main() -> affrank::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    if args.len() >= 3 {
        let k = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_K);
        let ranking = read_ranking(Path::new(&args[1]), "submitted".into(), 0)?;
        let truth = read_truth(Path::new(&args[2]))?;
        let r = ndcg_at_k(&ranking, &truth, k)?;
        println!("NDCG@{k} {:.6} (DCG {:.4}, ideal {:.4}{})", r.ndcg, r.dcg, r.idcg, if r.degenerate { ", all-zero truth" } else { "" });
        return Ok(());
    }

    println!("dcg([2, 3, 1]) = {:.4}", dcg(&[2.0, 3.0, 1.0], DEFAULT_K)?);
    let truth: BTreeMap<AffiliationId, f64> = [("A", 3.0), ("B", 2.0), ("C", 1.0)].map(|(a, r)| (a.into(), r)).into();
    for order in [["B", "A", "C"], ["A", "B", "C"], ["C", "B", "A"]] {
        let entries = order.iter().enumerate().map(|(i, a)| ((*a).into(), -(i as f64))).collect();
        let list = RankedList::from_ordered("toy".into(), 2016, entries)?;
        let r = ndcg_at_k(&list, &truth, DEFAULT_K)?;
        println!("{order:?}: dcg {:.4} / idcg {:.4} = {:.4}", r.dcg, r.idcg, r.ndcg);
    }
    Ok(())
}
