//! Timeline analysis of review arrivals: do late reviews look different?
//!
//! The published experiment tracked reviews as they arrived, compared the
//! reviews submitted before the official deadline with those trickling in
//! during the two weeks after, and found the late ones carried lower
//! confidence and quality scores. This example runs that pipeline on the
//! shipped synthetic dataset (which plants a 0.1 confidence drop on late
//! reviews): cumulative arrivals, per-paper coverage, papers below quorum,
//! a moving-window mean, and the Welch two-sample deadline split test.
//!
//! Run with: `cargo run --example late_reviews`

use std::path::Path;

use chrono::Duration;
use reviewlab::data::load_reviews;
use reviewlab::timeline::{
    cumulative_reviews, deadline_split_test, default_cutoff, default_deadline,
    moving_window_mean, papers_below_quorum, reviews_per_paper_series, sample_grid, ReviewField,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reviews = load_reviews(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample/reviews.csv"),
    )?;
    let deadline = default_deadline();
    let cutoff = default_cutoff();
    println!(
        "{} reviews; deadline {}, late-review cutoff {}",
        reviews.len(),
        deadline.format("%Y-%m-%d"),
        cutoff.format("%Y-%m-%d")
    );

    let cumulative = cumulative_reviews(&reviews);
    let at_deadline = cumulative.iter().filter(|p| p.t <= deadline).last().unwrap();
    let total = cumulative.last().unwrap();
    println!(
        "arrivals: {} of {} reviews were in by the deadline ({:.0}%)",
        at_deadline.value,
        total.value,
        100.0 * at_deadline.value / total.value
    );

    let grid = sample_grid(deadline - Duration::days(14), cutoff, Duration::days(2))?;
    let coverage = reviews_per_paper_series(&reviews, &grid);
    let below = papers_below_quorum(&reviews, 3, &grid);
    println!("\nper-paper coverage (median reviews) and papers below the 3-review quorum:");
    for (c, b) in coverage.iter().zip(&below) {
        println!(
            "  {}   median {:>3}   below quorum {:>3} of {}",
            c.t.format("%m-%d"),
            c.median,
            b.value,
            b.n
        );
    }

    let window = moving_window_mean(&reviews, ReviewField::Confidence, Duration::days(4), Duration::days(1))?;
    let (first, last) = (window.first().unwrap(), window.last().unwrap());
    println!(
        "\n4-day moving mean confidence: {:.3} (window ending {}) → {:.3} (window ending {})",
        first.value,
        first.t.format("%m-%d"),
        last.value,
        last.t.format("%m-%d")
    );

    println!("\ndeadline split test (before vs after, Welch two-sample t):");
    println!("  field        before   after    t      p");
    for field in [ReviewField::Confidence, ReviewField::Quality, ReviewField::Impact, ReviewField::Length] {
        let r = deadline_split_test(&reviews, field, deadline, cutoff)?;
        println!(
            "  {:<10} {:7.3}  {:7.3}  {:+5.2}  {:.4}",
            field.as_str(),
            r.mean_before,
            r.mean_after,
            r.t_stat,
            r.p_value
        );
    }
    println!("\n(the shipped corpus plants a 0.1 confidence drop on post-deadline reviews;");
    println!("at study scale — thousands of reviews — such a drop is detected at p < 0.001)");
    Ok(())
}
