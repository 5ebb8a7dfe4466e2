//! Multi-threaded campaign execution.
//!
//! Workers claim blocks from a shared counter and send finished tallies
//! back; the caller folds them strictly in block order, so the result is
//! identical for every worker count.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc;
use std::thread;

use stochsource_core::{Campaign, CampaignTally, MeasurementSet};

use crate::{Error, Result};

pub fn run_tally(campaign: &Campaign, workers: usize) -> Result<CampaignTally> {
    let blocks = campaign.block_count();
    let next = AtomicU64::new(0);
    let mut total = campaign.empty_tally();
    let (tx, rx) = mpsc::channel();
    thread::scope(|scope| -> Result<()> {
        for _ in 0..workers.max(1) {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let b = next.fetch_add(1, Ordering::Relaxed);
                if b >= blocks {
                    break;
                }
                let out = campaign.run_block(b);
                let failed = out.is_err();
                if tx.send((b, out)).is_err() || failed {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut merged = 0;
        for (b, tally) in rx.iter() {
            let tally = tally.inspect_err(|_| next.store(blocks, Ordering::Relaxed))?;
            pending.insert(b, tally);
            while let Some(t) = pending.remove(&merged) {
                total.merge(&t);
                merged += 1;
            }
        }
        if merged != blocks {
            return Err(Error::Worker);
        }
        Ok(())
    })?;
    Ok(total)
}

pub fn run(campaign: &Campaign, workers: usize) -> Result<Vec<MeasurementSet>> {
    let tally = run_tally(campaign, workers)?;
    Ok(campaign.finish(&tally)?)
}
