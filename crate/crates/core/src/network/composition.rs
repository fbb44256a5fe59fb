use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Partition, WeightedProjection};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommunityComposition {
    /// 1-based rank by size.
    pub rank: usize,
    pub community: usize,
    pub size: usize,
    pub parties: BTreeMap<String, usize>,
}

/// The `top_n` largest communities with their party counts.
///
/// Ranked by size, larger first; equal sizes are ordered by their smallest member id.
pub fn community_composition(
    partition: &Partition,
    p: &WeightedProjection,
    top_n: usize,
) -> Vec<CommunityComposition> {
    // community -> (smallest member, size, parties)
    let mut groups: BTreeMap<usize, (usize, usize, BTreeMap<String, usize>)> = BTreeMap::new();
    for (u, &c) in partition.communities.iter().enumerate() {
        let entry = groups.entry(c).or_insert((u, 0, BTreeMap::new()));
        entry.1 += 1;
        *entry.2.entry(p.nodes()[u].party.clone()).or_insert(0) += 1;
    }
    let mut ranked: Vec<_> = groups.into_iter().collect();
    ranked.sort_by(|(_, a), (_, b)| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
        .into_iter()
        .take(top_n)
        .enumerate()
        .map(
            |(i, (community, (_, size, parties)))| CommunityComposition {
                rank: i + 1,
                community,
                size,
                parties,
            },
        )
        .collect()
}

/// Long format: `rank,community,size,party,count`.
pub fn write_composition_csv<W: Write>(out: W, rows: &[CommunityComposition]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "community", "size", "party", "count"])?;
    for r in rows {
        for (party, count) in &r.parties {
            w.write_record([
                r.rank.to_string(),
                r.community.to_string(),
                r.size.to_string(),
                party.clone(),
                count.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
