//! File exports consumed by external plotting and layout tools.
//!
//! Every writer is deterministic: floats use shortest round-trip
//! formatting and rows follow entity and window order.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::fmt::fmt_f64;
use crate::geometry::{Embedding, SurrogateStats};
use crate::network::{ranked_links, ExposureNetwork, NodeStats, SpanningTree};
use crate::panel::Labels;
use crate::rolling::MetricSeries;

#[derive(Debug, Serialize)]
pub struct EmbeddingExport<'a> {
    pub window_start: &'a str,
    pub window_end: &'a str,
    pub entity_ids: &'a [String],
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    /// Row per entity, first `dim` coordinates.
    pub coordinates: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surrogate: Option<&'a SurrogateStats>,
}

impl<'a> EmbeddingExport<'a> {
    pub fn new(emb: &'a Embedding, dim: usize, window: (&'a str, &'a str)) -> Self {
        let c = emb.coordinates();
        let dim = dim.min(c.ncols());
        Self {
            window_start: window.0,
            window_end: window.1,
            entity_ids: emb.entity_ids(),
            dim,
            eigenvalues: emb.eigenvalues().iter().copied().collect(),
            coordinates: (0..c.nrows())
                .map(|k| (0..dim).map(|r| c[(k, r)]).collect())
                .collect(),
            surrogate: emb.surrogate_stats(),
        }
    }
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// `rank,eigenvalue,surrogate_quantile`, rank counted from 1.
pub fn write_eigs_csv<W: Write>(w: W, emb: &Embedding) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["rank", "eigenvalue", "surrogate_quantile"])?;
    let stats = emb.surrogate_stats();
    for (r, v) in emb.eigenvalues().iter().enumerate() {
        let q = stats.map_or(String::new(), |s| fmt_f64(s.threshold[r]));
        out.write_record([(r + 1).to_string(), fmt_f64(*v), q])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct GraphNode<'a> {
    pub id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<&'a str>,
    pub strength: f64,
    pub closeness: f64,
}

#[derive(Debug, Serialize)]
pub struct GraphEdge<'a> {
    pub source: &'a str,
    pub target: &'a str,
    pub weight: f64,
    /// 1 for the strongest link.
    pub rank: usize,
    pub top: bool,
}

#[derive(Debug, Serialize)]
pub struct GraphExport<'a> {
    pub window_start: &'a str,
    pub window_end: &'a str,
    pub top_k: usize,
    pub nodes: Vec<GraphNode<'a>>,
    pub edges: Vec<GraphEdge<'a>>,
}

impl<'a> GraphExport<'a> {
    pub fn new(
        net: &'a ExposureNetwork,
        stats: &[NodeStats],
        labels: &'a Labels,
        top_k: usize,
        window: (&'a str, &'a str),
    ) -> Self {
        let ids = net.entity_ids();
        let nodes = ids
            .iter()
            .zip(stats)
            .map(|(id, s)| GraphNode {
                id,
                label: labels.get(id).map(|l| l.display_name.as_str()),
                group: labels.group(id),
                strength: s.strength,
                closeness: s.closeness,
            })
            .collect();
        let edges = ranked_links(net)
            .into_iter()
            .enumerate()
            .map(|(r, l)| GraphEdge {
                source: &ids[l.i],
                target: &ids[l.j],
                weight: l.weight,
                rank: r + 1,
                top: r < top_k,
            })
            .collect();
        Self {
            window_start: window.0,
            window_end: window.1,
            top_k,
            nodes,
            edges,
        }
    }
}

const MAX_PENWIDTH: f64 = 8.0;
const GROUP_COLORS: [&str; 6] = ["blue", "red", "darkgreen", "orange", "purple", "brown"];

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT graph. Edge pen width is proportional to weight (the
/// heaviest edge gets [`MAX_PENWIDTH`]); top-k edges are blue, the rest cyan.
pub fn write_graph_dot<W: Write>(mut w: W, graph: &GraphExport<'_>) -> Result<()> {
    writeln!(w, "graph exposures {{")?;
    let mut groups: Vec<&str> = graph.nodes.iter().filter_map(|n| n.group).collect();
    groups.sort_unstable();
    groups.dedup();
    for n in &graph.nodes {
        let mut attrs = vec![format!("strength={}", fmt_f64(n.strength))];
        attrs.push(format!("closeness={}", fmt_f64(n.closeness)));
        if let Some(label) = n.label {
            attrs.push(format!("label={}", dot_id(label)));
        }
        if let Some(g) = n.group {
            let idx = groups.iter().position(|x| *x == g).unwrap_or(0);
            attrs.push(format!("group={}", dot_id(g)));
            attrs.push(format!("color={}", GROUP_COLORS[idx % GROUP_COLORS.len()]));
        }
        writeln!(w, "  {} [{}];", dot_id(n.id), attrs.join(", "))?;
    }
    let max = graph.edges.iter().map(|e| e.weight).fold(0.0_f64, f64::max);
    for e in &graph.edges {
        let width = if max > 0.0 { MAX_PENWIDTH * e.weight / max } else { 0.0 };
        let color = if e.top { "blue" } else { "cyan" };
        writeln!(
            w,
            "  {} -- {} [weight={}, penwidth={}, rank={}, color={}];",
            dot_id(e.source),
            dot_id(e.target),
            fmt_f64(e.weight),
            fmt_f64(width),
            e.rank,
            color
        )?;
    }
    writeln!(w, "}}")?;
    Ok(())
}

/// `window_start,window_end,entity,strength,closeness`.
pub fn write_nodes_csv<W: Write>(w: W, stats: &[NodeStats], window: (&str, &str)) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["window_start", "window_end", "entity", "strength", "closeness"])?;
    for s in stats {
        out.write_record([
            window.0,
            window.1,
            &s.entity_id,
            &fmt_f64(s.strength),
            &fmt_f64(s.closeness),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_mst_csv<W: Write>(w: W, tree: &SpanningTree, ids: &[String]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["source", "target", "distance"])?;
    for e in &tree.edges {
        out.write_record([&ids[e.i], &ids[e.j], &fmt_f64(e.distance)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_mst_dot<W: Write>(mut w: W, tree: &SpanningTree, ids: &[String]) -> Result<()> {
    writeln!(w, "graph mst {{")?;
    for id in ids {
        writeln!(w, "  {};", dot_id(id))?;
    }
    for e in &tree.edges {
        writeln!(
            w,
            "  {} -- {} [distance={}];",
            dot_id(&ids[e.i]),
            dot_id(&ids[e.j]),
            fmt_f64(e.distance)
        )?;
    }
    writeln!(w, "}}")?;
    Ok(())
}

/// `window_start,window_end,V,C[,effective_dim]`.
pub fn write_rolling_csv<W: Write>(w: W, ms: &MetricSeries) -> Result<()> {
    let auto = ms.effective_dim();
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["window_start", "window_end", "V", "C"];
    if auto.is_some() {
        header.push("effective_dim");
    }
    out.write_record(&header)?;
    for (i, win) in ms.windows.iter().enumerate() {
        let mut row = vec![
            win.start_label.clone(),
            win.end_label.clone(),
            fmt_f64(win.volume),
            fmt_f64(win.clustering),
        ];
        if let Some(d) = &auto {
            row.push(d[i].to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Long format `window_start,window_end,entity,strength,closeness`.
pub fn write_entities_rolling_csv<W: Write>(w: W, ms: &MetricSeries) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["window_start", "window_end", "entity", "strength", "closeness"])?;
    for win in &ms.windows {
        for (k, id) in win.entity_ids.iter().enumerate() {
            out.write_record([
                win.start_label.as_str(),
                win.end_label.as_str(),
                id,
                &fmt_f64(win.strength[k]),
                &fmt_f64(win.closeness[k]),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}
