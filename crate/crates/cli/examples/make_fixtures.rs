//! Regenerates the bundled fixtures:
//!
//! ```text
//! cargo run -p areal-decomp-cli --example make_fixtures -- crates/cli/fixtures
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use areal_decomp::AdjacencyGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// Adjacency file text, one line per region.
pub fn adjacency_text(g: &AdjacencyGraph) -> String {
    let mut s = format!("n={}\n", g.n());
    for i in 0..g.n() {
        let nbrs: Vec<String> = g.neighbors(i).iter().map(|j| j.to_string()).collect();
        writeln!(s, "{i}: {}", nbrs.join(" ")).unwrap();
    }
    s
}

/// Smooth log relative risk on a lattice: two broad waves plus a local bump.
pub fn lattice_truth(nrow: usize, ncol: usize) -> Vec<f64> {
    (0..nrow * ncol)
        .map(|k| {
            let (i, j) = ((k / ncol) as f64, (k % ncol) as f64);
            let bump = (-((i - 6.0).powi(2) + (j - 3.0).powi(2)) / 4.0).exp();
            0.4 * (i / 3.0).sin() + 0.3 * (j / 4.0).cos() + 0.3 * bump - 0.2
        })
        .collect()
}

fn write_lattice(dir: &Path) {
    let (nrow, ncol) = (10, 10);
    let g = AdjacencyGraph::grid(nrow, ncol).unwrap();
    let truth = lattice_truth(nrow, ncol);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut counts = String::from("region_id,y,e\n");
    let mut truth_csv = String::from("region_id,eta\n");
    for (k, t) in truth.iter().enumerate() {
        let e: f64 = rng.random_range(50.0..200.0);
        let y = Poisson::new(e * t.exp()).unwrap().sample(&mut rng) as u64;
        writeln!(counts, "r{k:03},{y},{e:.4}").unwrap();
        writeln!(truth_csv, "r{k:03},{t:.17e}").unwrap();
    }
    fs::create_dir_all(dir).unwrap();
    fs::write(dir.join("counts.csv"), counts).unwrap();
    fs::write(dir.join("truth.csv"), truth_csv).unwrap();
    fs::write(dir.join("adjacency.txt"), adjacency_text(&g)).unwrap();
    fs::write(
        dir.join("config.toml"),
        "counts = \"counts.csv\"\nadjacency = \"adjacency.txt\"\ntruth = \"truth.csv\"\noutput = \"out\"\nscales = [0.0, 1.0, 25.0]\n\n[sampler]\niterations = 22000\nburn_in = 2000\nthinning = 10\nseed = 7\n",
    )
    .unwrap();
}

fn write_tiny(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    fs::write(
        dir.join("counts.csv"),
        "region_id,y,e\nA,3,2.5\nB,7,4.0\nC,1,2.0\nD,5,3.5\n",
    )
    .unwrap();
    fs::write(
        dir.join("adjacency.txt"),
        "# 2x2 block, row-major\nn=4\n0: 1 2\n1: 0 3\n2: 0 3\n3: 1 2\n",
    )
    .unwrap();
    fs::write(
        dir.join("config.toml"),
        "counts = \"counts.csv\"\nadjacency = \"adjacency.txt\"\noutput = \"out\"\nscales = [0.0, 1.0]\ndense_oracle = true\n\n[sampler]\niterations = 2000\nburn_in = 500\nthinning = 5\nseed = 1\n",
    )
    .unwrap();
}

fn main() {
    let root = std::env::args().nth(1).unwrap_or_else(|| "crates/cli/fixtures".into());
    let root = Path::new(&root);
    write_tiny(&root.join("tiny4"));
    write_lattice(&root.join("lattice10"));
}
