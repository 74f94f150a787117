//! Tabulate where rejected papers ended up.
//!
//! The published experiment traced its rejected submissions a year later:
//! roughly half could be found again, split between other conference or
//! journal venues, preprint-server-only versions, and bare PDFs. This
//! example builds that fate table from the shipped synthetic outcomes,
//! including the per-venue breakdown (small venues pool into an "other"
//! bucket below a count threshold) and the Sankey-diagram link list used to
//! draw submitted → track → fate flows.
//!
//! Run with: `cargo run --example rejected_paper_fates`

use std::path::Path;

use reviewlab::data::load_outcomes;
use reviewlab::impact::fate_table_with_threshold;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let outcomes = load_outcomes(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample/outcomes.csv"),
    )?;
    // The study used a threshold of 10 papers; the shipped corpus is small,
    // so 3 keeps the per-venue breakdown visible.
    let table = fate_table_with_threshold(&outcomes, 3);

    println!("traced fates of {} submissions:", outcomes.len());
    println!("  published here (accepted):  {:>4}", table.counts.this_conference);
    println!("  later at another venue:     {:>4}", table.counts.other_venue);
    println!("  preprint server only:       {:>4}", table.counts.preprint_only);
    println!("  bare PDF only:              {:>4}", table.counts.pdf_only);
    println!("  untraced:                   {:>4}", table.counts.untraced);

    println!(
        "\nvenues with at least {} papers (spellings are normalized and aliased,",
        table.venue_threshold
    );
    println!("so e.g. \"NIPS 2015\" and \"NeurIPS\" count as one venue):");
    for row in &table.venues {
        println!("  {:<12} {:>4}", row.venue, row.count);
    }
    if table.other_venue_bucket > 0 {
        println!("  {:<12} {:>4}  (venues below the threshold)", "other", table.other_venue_bucket);
    }

    println!("\nSankey links (source → target: count):");
    for link in &table.sankey {
        println!("  {} → {}: {}", link.source, link.target, link.count);
    }
    Ok(())
}
