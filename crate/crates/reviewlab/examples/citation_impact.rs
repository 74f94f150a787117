//! Correlate review scores with later citation impact.
//!
//! Impact is measured as log10(1 + citations). The example fits the
//! calibration model on the shipped synthetic dataset, then correlates three
//! score kinds (calibrated quality, raw impact score, raw confidence) with
//! citation impact over accepted, rejected, and all papers — the same grid
//! the published experiment reported. It also writes the
//! differential-privacy-style noised scatter plot the study used to publish
//! per-paper data without identifying papers.
//!
//! Run with: `cargo run --example citation_impact`

use std::path::Path;

use reviewlab::calibration::{grid_fit, AssignmentGraph, GridSpec};
use reviewlab::data::{load_decisions, load_duplicates, load_outcomes, load_reviews, Dataset, Fate};
use reviewlab::impact::{
    citation_impact, committee_score_correlation, correlation_report, dp_scatter, scatter_svg,
    QualitySource, ScoreKind, Subset, DEFAULT_SCATTER_SCALE_X, DEFAULT_SCATTER_SCALE_Y,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample");
    let dataset = Dataset::new(
        load_reviews(dir.join("reviews.csv"))?,
        load_duplicates(dir.join("duplicates.csv"))?,
        load_decisions(dir.join("decisions.csv"))?,
        load_outcomes(dir.join("outcomes.csv"))?,
    );

    let (graph, scores) = AssignmentGraph::from_reviews(&dataset.reviews)?;
    let fit = grid_fit(&scores, &graph, &GridSpec::default())?;
    println!(
        "calibrated {} papers; traced outcomes for {} of {}",
        fit.per_paper.len(),
        dataset.outcomes.iter().filter(|o| o.fate != Fate::Untraced).count(),
        dataset.outcomes.len()
    );

    println!("\ncorrelation of per-paper scores with log10(1 + citations):");
    println!("  score kind           subset     rho      se     n   significant");
    for kind in [ScoreKind::QualityCalibrated, ScoreKind::Impact, ScoreKind::Confidence] {
        for subset in [Subset::Accepted, Subset::Rejected, Subset::All] {
            match correlation_report(&dataset, &fit, kind, subset, QualitySource::PosteriorF) {
                Ok(r) => println!(
                    "  {:<20} {:<9} {:+.3}   {:.3}  {:>4}   {}",
                    kind.as_str(),
                    subset.as_str(),
                    r.rho,
                    r.se,
                    r.n,
                    if r.significant { "yes" } else { "no" }
                ),
                Err(e) => println!("  {:<20} {:<9} ({e})", kind.as_str(), subset.as_str()),
            }
        }
    }

    // On duplicated papers the two committees scored the same manuscript
    // independently — their score-vs-score correlation bounds how much of
    // the score is reproducible signal.
    let cc = committee_score_correlation(
        &dataset,
        &fit,
        ScoreKind::QualityCalibrated,
        QualitySource::PosteriorF,
    )?;
    println!(
        "\ncommittee-1 vs committee-2 calibrated scores on duplicated papers: rho {:+.3} (n = {})",
        cc.rho, cc.n
    );

    // Publishable scatter: Laplace noise on both axes.
    let quality = fit.paper_quality();
    let points: Vec<(f64, f64)> = dataset
        .outcomes
        .iter()
        .filter(|o| o.fate != Fate::Untraced)
        .filter_map(|o| quality.get(&o.paper_id).map(|&q| (q, citation_impact(o.citations))))
        .collect();
    let noised = dp_scatter(&points, DEFAULT_SCATTER_SCALE_X, DEFAULT_SCATTER_SCALE_Y, 7)?;
    let svg = scatter_svg(&noised, "Calibrated score vs citation impact (noised)");
    let out = std::env::temp_dir().join("reviewlab_scatter.svg");
    std::fs::write(&out, svg)?;
    println!(
        "\nwrote noised scatter of {} papers to {} (Laplace scales {} / {})",
        noised.len(),
        out.display(),
        DEFAULT_SCATTER_SCALE_X,
        DEFAULT_SCATTER_SCALE_Y
    );
    Ok(())
}
