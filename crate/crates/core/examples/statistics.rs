// Metrics and the pairwise comparison machinery on a small hand-made table.

use fknn::eval::metrics::{bac, kappa, micro_f1};
use fknn::eval::stats::{average_ranks, holm_adjust, wilcoxon_signed_rank};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = [1, 1, 2, 2, 3, 3];
    let pred = [1, 2, 2, 2, 3, 1];
    println!("BAC {:.3}  kappa {:.3}  micro-F1 {:.3}", bac(&truth, &pred, 3), kappa(&truth, &pred), micro_f1(&truth, &pred));

    // scores[case][method]
    let scores = vec![
        vec![0.61, 0.70, 0.74],
        vec![0.58, 0.66, 0.71],
        vec![0.64, 0.69, 0.69],
        vec![0.55, 0.71, 0.77],
        vec![0.60, 0.65, 0.72],
        vec![0.62, 0.73, 0.70],
        vec![0.57, 0.68, 0.75],
        vec![0.59, 0.64, 0.73],
    ];
    let names = ["B", "AW", "FKNN"];
    let ranks = average_ranks(&scores);
    for (n, r) in names.iter().zip(&ranks) {
        println!("{n:>5}: average rank {r:.3}");
    }

    let col = |j: usize| scores.iter().map(|row| row[j]).collect::<Vec<f64>>();
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let raw: Vec<f64> = pairs.iter().map(|&(i, j)| wilcoxon_signed_rank(&col(i), &col(j)).p_value).collect();
    let adj = holm_adjust(&raw);
    for (((i, j), p), h) in pairs.iter().zip(&raw).zip(&adj) {
        println!("{} vs {}: p = {p:.4}, Holm p = {h:.4}", names[*i], names[*j]);
    }
    Ok(())
}
