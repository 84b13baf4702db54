use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::{Edge, GraphError, NetworkGraph, NodeId};

/// Reads a `follower followee` edge list. Blank lines and lines starting
/// with `#` are skipped; node count is one past the largest id seen.
pub fn parse_edge_list<R: Read>(reader: R) -> Result<NetworkGraph, GraphError> {
    let mut edges = Vec::new();
    let mut max_id: Option<u32> = None;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut next_id = |what: &str| -> Result<u32, GraphError> {
            let tok = fields.next().ok_or_else(|| GraphError::Parse {
                line: line_no,
                message: format!("missing {what}"),
            })?;
            tok.parse::<u32>().map_err(|_| GraphError::Parse {
                line: line_no,
                message: format!("invalid {what} {tok:?}"),
            })
        };
        let follower = next_id("follower")?;
        let followee = next_id("followee")?;
        if let Some(extra) = fields.next() {
            return Err(GraphError::Parse {
                line: line_no,
                message: format!("unexpected trailing field {extra:?}"),
            });
        }
        if follower == followee {
            return Err(GraphError::SelfLoopAt {
                line: line_no,
                node: NodeId(follower),
            });
        }
        max_id = Some(max_id.unwrap_or(0).max(follower).max(followee));
        edges.push(Edge::new(follower, followee));
    }
    let node_count = max_id.map_or(0, |m| m as usize + 1);
    NetworkGraph::from_edges(node_count, edges)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<NetworkGraph, GraphError> {
    parse_edge_list(File::open(path)?)
}

/// Companion strength file for an edge-list path: `net.edges` -> `net.strengths`.
pub fn strengths_path_for(path: &Path) -> PathBuf {
    path.with_extension("strengths")
}

impl NetworkGraph {
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# nodes {} edges {}", self.node_count(), self.edge_count())?;
        for e in self.edges() {
            writeln!(w, "{} {}", e.follower, e.followee)?;
        }
        w.flush()
    }

    pub fn write_strengths<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (e, s) in self.edges().zip(self.strengths()) {
            writeln!(w, "{} {} {:.6}", e.follower, e.followee, s)?;
        }
        w.flush()
    }

    /// Writes the edge list to `path` and strengths next to it.
    pub fn save(&self, path: &Path) -> std::io::Result<PathBuf> {
        self.write_edge_list(BufWriter::new(File::create(path)?))?;
        let spath = strengths_path_for(path);
        self.write_strengths(BufWriter::new(File::create(&spath)?))?;
        Ok(spath)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<NetworkGraph, GraphError> {
        parse_edge_list(s.as_bytes())
    }

    #[test]
    fn small_file() {
        let g = parse("0 1\n1 0\n2 1\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.is_reciprocal(Edge::new(0, 1)));
    }

    #[test]
    fn comments_blank_lines_and_duplicates() {
        let g = parse("# header\n\n0 1\n   \n0\t1\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn self_loop_is_rejected() {
        assert!(matches!(parse("0 0\n"), Err(GraphError::SelfLoopAt { line: 1, .. })));
    }

    #[test]
    fn malformed_lines_report_line_number() {
        assert!(matches!(parse("0 1\n1 x\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(parse("0 1\n\n7\n"), Err(GraphError::Parse { line: 3, .. })));
        assert!(matches!(parse("0 1 2\n"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(parse("-1 2\n"), Err(GraphError::Parse { line: 1, .. })));
    }

    #[test]
    fn export_round_trip() {
        let g = parse("0 1\n1 0\n0 2\n2 0\n1 2\n2 1\n3 0\n").unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = parse_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back, g);

        let mut sbuf = Vec::new();
        g.write_strengths(&mut sbuf).unwrap();
        let text = String::from_utf8(sbuf).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(first, "0 1 0.500000");
        assert_eq!(text.lines().count(), g.edge_count());
    }
}
