//! Weights and centroid of a small tree given as an edge list.

use safe_diffusion::tree::parse_tree;

fn main() -> safe_diffusion::Result<()> {
    let t = parse_tree("7\n0 1\n1 2\n1 3\n3 4\n3 5\n5 6\n")?;
    let w = t.weight_table();
    for v in 0..t.n() {
        println!("vertex {v}: weight {} co-weight {}", w.weight[v], w.co_weight[v]);
    }
    let c = t.centroid();
    println!("centroid {:?} ({:?})", c.vertices, c.kind);
    for b in t.branches_at(c.root) {
        println!("  branch via {} with {} edges", b.neighbor, b.edges());
    }
    Ok(())
}
