//! GraphML export of the bipartite and projected networks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use super::{BipartiteGraph, NetworkError, Partition, WeightedProjection};

/// Optional short codes for speaker ids, read from `speaker_id,code` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpeakerLabels(BTreeMap<String, String>);

impl SpeakerLabels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses CSV with a `speaker_id,code` header.
    pub fn parse(text: &str) -> Result<Self, NetworkError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut map = BTreeMap::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| NetworkError::Labels {
                line,
                message: e.to_string(),
            })?;
            match (rec.get(0), rec.get(1)) {
                (Some(id), Some(code)) if !id.is_empty() && !code.is_empty() => {
                    map.insert(id.to_owned(), code.to_owned());
                }
                _ => {
                    return Err(NetworkError::Labels {
                        line,
                        message: "expected `speaker_id,code`".into(),
                    })
                }
            }
        }
        Ok(SpeakerLabels(map))
    }

    pub fn load(path: &Path) -> Result<Self, NetworkError> {
        let text = std::fs::read_to_string(path).map_err(|e| NetworkError::Labels {
            line: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// Code for `id`, or the id itself when unmapped.
    pub fn label<'a>(&'a self, id: &'a str) -> &'a str {
        self.0.get(id).map_or(id, String::as_str)
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const HEADER: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">
"#;

fn key(buf: &mut String, id: &str, domain: &str, ty: &str) {
    let _ = writeln!(
        buf,
        r#"  <key id="{id}" for="{domain}" attr.name="{id}" attr.type="{ty}"/>"#
    );
}

fn data(buf: &mut String, key: &str, value: &str) {
    let _ = write!(buf, r#"<data key="{key}">{}</data>"#, escape(value));
}

/// Speaker nodes are `s:<speaker_id>`, topic nodes `t:<topic_id>`.
pub fn write_bipartite_graphml<W: Write>(
    mut out: W,
    g: &BipartiteGraph,
    labels: &SpeakerLabels,
) -> io::Result<()> {
    let mut buf = String::from(HEADER);
    key(&mut buf, "label", "node", "string");
    key(&mut buf, "kind", "node", "string");
    key(&mut buf, "party", "node", "string");
    key(&mut buf, "words", "node", "long");
    key(&mut buf, "weight", "edge", "int");
    let _ = writeln!(
        buf,
        r#"  <graph id="term-{}" edgedefault="undirected">"#,
        g.term
    );
    for s in g.speakers() {
        let _ = write!(buf, r#"    <node id="s:{}">"#, escape(&s.id));
        data(&mut buf, "label", labels.label(&s.id));
        data(&mut buf, "kind", "speaker");
        data(&mut buf, "party", &s.party);
        data(&mut buf, "words", &s.words.to_string());
        buf.push_str("</node>\n");
    }
    for &t in g.topics() {
        let _ = write!(buf, r#"    <node id="t:{t}">"#);
        data(&mut buf, "label", &format!("topic {t}"));
        data(&mut buf, "kind", "topic");
        buf.push_str("</node>\n");
    }
    for (i, (s, t)) in g.links().enumerate() {
        let _ = write!(
            buf,
            r#"    <edge id="e{i}" source="s:{}" target="t:{}">"#,
            escape(&g.speakers()[s].id),
            g.topics()[t]
        );
        data(&mut buf, "weight", "1");
        buf.push_str("</edge>\n");
    }
    buf.push_str("  </graph>\n</graphml>\n");
    out.write_all(buf.as_bytes())
}

/// Node ids are speaker ids; `community` is written when a partition is given.
pub fn write_projection_graphml<W: Write>(
    mut out: W,
    p: &WeightedProjection,
    partition: Option<&Partition>,
    labels: &SpeakerLabels,
) -> io::Result<()> {
    let mut buf = String::from(HEADER);
    key(&mut buf, "label", "node", "string");
    key(&mut buf, "party", "node", "string");
    key(&mut buf, "words", "node", "long");
    key(&mut buf, "community", "node", "int");
    key(&mut buf, "weight", "edge", "int");
    let _ = writeln!(
        buf,
        r#"  <graph id="term-{}-speakers" edgedefault="undirected">"#,
        p.term
    );
    for (u, n) in p.nodes().iter().enumerate() {
        let _ = write!(buf, r#"    <node id="{}">"#, escape(&n.id));
        data(&mut buf, "label", labels.label(&n.id));
        data(&mut buf, "party", &n.party);
        data(&mut buf, "words", &n.words.to_string());
        if let Some(c) = partition.and_then(|pt| pt.communities.get(u)) {
            data(&mut buf, "community", &c.to_string());
        }
        buf.push_str("</node>\n");
    }
    for (i, &(a, b, w)) in p.edges().iter().enumerate() {
        let _ = write!(
            buf,
            r#"    <edge id="e{i}" source="{}" target="{}">"#,
            escape(&p.nodes()[a].id),
            escape(&p.nodes()[b].id)
        );
        data(&mut buf, "weight", &w.to_string());
        buf.push_str("</edge>\n");
    }
    buf.push_str("  </graph>\n</graphml>\n");
    out.write_all(buf.as_bytes())
}
