//! Plain-text edge-list format: a header line `n m`, then `m` lines `u v`
//! with `u < v`, sorted. Vertices are `1..=n`.

use std::fmt::Write as _;

use super::{Graph, GraphError};

pub fn write_graph(g: &Graph) -> Result<String, GraphError> {
    let n = g.vertex_count() as u32;
    if let Some(v) = g.vertices().zip(1..).find(|(v, i)| v != i).map(|(v, _)| v) {
        return Err(GraphError::Infeasible(format!(
            "edge-list format needs ids 1..={n}, found {v}"
        )));
    }
    let mut out = format!("{} {}\n", n, g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").expect("writing to a String");
    }
    Ok(out)
}

pub fn read_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let parse_err = |line: usize, message: String| GraphError::Parse {
        line: line + 1,
        message,
    };
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "missing header".into()))?;
    let nums = parse_pair(header).map_err(|m| parse_err(hl, m))?;
    let (n, m) = nums;
    let mut g = Graph::with_vertices(n);
    let mut count = 0;
    for (i, line) in lines {
        let (u, v) = parse_pair(line).map_err(|msg| parse_err(i, msg))?;
        g.add_edge(u, v).map_err(|e| parse_err(i, e.to_string()))?;
        count += 1;
    }
    if count != m {
        return Err(parse_err(
            hl,
            format!("header announces {m} edges, found {count}"),
        ));
    }
    Ok(g)
}

fn parse_pair(line: &str) -> Result<(u32, u32), String> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<u32, String> {
        let tok = it
            .next()
            .ok_or_else(|| format!("expected two integers in `{line}`"))?;
        tok.parse().map_err(|_| format!("bad integer `{tok}`"))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(format!("trailing data in `{line}`"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_sorted_edges() {
        let g = Graph::from_edges(4, &[(3, 4), (2, 1), (1, 3)]).unwrap();
        assert_eq!(write_graph(&g).unwrap(), "4 3\n1 2\n1 3\n3 4\n");
        assert_eq!(read_graph("4 3\n1 2\n1 3\n3 4\n").unwrap(), g);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_graph("").is_err());
        assert!(read_graph("3 2\n1 2\n").is_err());
        assert!(read_graph("3 1\n1 4\n").is_err());
        assert!(read_graph("3 1\n1 x\n").is_err());
        let mut g = Graph::with_vertices(3);
        g.remove_vertex(2).unwrap();
        assert!(write_graph(&g).is_err());
    }
}
