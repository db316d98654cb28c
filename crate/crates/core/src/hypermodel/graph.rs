use std::fmt::Write as _;
use std::io::{self, Write};

use crate::{Error, Result};

/// A k-uniform hypergraph on vertices `0..n`.
///
/// Edges are stored flat (`k` ids per edge), each strictly increasing, and
/// sorted lexicographically across edges. The incidence index maps every
/// vertex to the ids of the edges containing it, in increasing edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: u32,
    k: u32,
    edges: Vec<u32>,
    offsets: Vec<usize>,
    incidence: Vec<u32>,
}

impl Hypergraph {
    /// Builds a hypergraph from arbitrary edges. Each edge is sorted; edges
    /// with repeated or out-of-range vertices, and duplicate edges, are
    /// rejected.
    pub fn from_edges<I, E>(n: u32, k: u32, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[u32]>,
    {
        if k == 0 {
            return Err(Error::InvalidHypergraph("k must be positive".into()));
        }
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for edge in edges {
            let mut e = edge.as_ref().to_vec();
            if e.len() != k as usize {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {e:?} has {} vertices, expected {k}",
                    e.len()
                )));
            }
            e.sort_unstable();
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange { vertex: v as u64, n });
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidHypergraph(format!("edge {e:?} repeats a vertex")));
            }
            rows.push(e);
        }
        rows.sort_unstable();
        if let Some(w) = rows.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidHypergraph(format!("duplicate edge {:?}", w[0])));
        }
        let flat = rows.into_iter().flatten().collect();
        Ok(Self::from_canonical(n, k, flat))
    }

    /// `flat` must already be canonical: strictly increasing within each edge,
    /// strictly increasing lexicographically across edges, ids below `n`.
    pub(crate) fn from_canonical(n: u32, k: u32, edges: Vec<u32>) -> Self {
        debug_assert_eq!(edges.len() % k as usize, 0);
        let mut degree = vec![0usize; n as usize + 1];
        for &v in &edges {
            degree[v as usize + 1] += 1;
        }
        for v in 0..n as usize {
            degree[v + 1] += degree[v];
        }
        let offsets = degree;
        let mut cursor = offsets.clone();
        let mut incidence = vec![0u32; edges.len()];
        for (e, edge) in edges.chunks_exact(k as usize).enumerate() {
            for &v in edge {
                incidence[cursor[v as usize]] = e as u32;
                cursor[v as usize] += 1;
            }
        }
        Self { n, k, edges, offsets, incidence }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.k as usize
    }

    pub fn edge(&self, e: usize) -> &[u32] {
        let k = self.k as usize;
        &self.edges[e * k..(e + 1) * k]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.edges.chunks_exact(self.k as usize)
    }

    /// Ids of the edges containing `v`.
    pub fn incident_edges(&self, v: u32) -> &[u32] {
        &self.incidence[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Plain-text form: a header line `n k m`, then one edge per line.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{} {} {}", self.n, self.k, self.edge_count())?;
        let mut line = String::new();
        for edge in self.edges() {
            line.clear();
            for (i, v) in edge.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                write!(line, "{v}").unwrap();
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the plain-text form. Blank lines and lines starting with `#`
    /// are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header line".into(),
        })?;
        let fields = parse_numbers(hline, header)?;
        let [n, k, m] = fields[..] else {
            return Err(Error::Parse { line: hline, message: "header must be `n k m`".into() });
        };
        let (n, k) = (to_u32(hline, n)?, to_u32(hline, k)?);
        let mut edges = Vec::with_capacity(m as usize);
        for (line, l) in lines {
            let e: Vec<u32> = parse_numbers(line, l)?
                .into_iter()
                .map(|v| to_u32(line, v))
                .collect::<Result<_>>()?;
            edges.push(e);
        }
        if edges.len() as u64 != m {
            return Err(Error::Parse {
                line: hline,
                message: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edges(n, k, edges)
    }
}

fn parse_numbers(line: usize, s: &str) -> Result<Vec<u64>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<u64>().map_err(|e| Error::Parse { line, message: format!("{t:?}: {e}") })
        })
        .collect()
}

fn to_u32(line: usize, v: u64) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Parse { line, message: format!("{v} exceeds u32") })
}
