//! Writes the plots, tables and LaTeX that explain a clustering.

use ml_workbench::engines::{kmeans, Init};
use ml_workbench::explain::{explain_clustering, SvgRenderer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x: Vec<Vec<f64>> = (0..60)
        .map(|i| {
            let c = (i % 3) as f64 * 3.0;
            vec![c + (i as f64 * 0.37).sin(), c + (i as f64 * 0.73).cos(), (i as f64 * 0.11).sin()]
        })
        .collect();
    let names = ["x", "y", "z"].map(String::from);
    let result = kmeans(&x, 3, 0, Init::PlusPlus)?;
    let bundle = explain_clustering("_2023-03-01_09-00-00", &result, &x, &names)?;

    let out = tempfile::tempdir()?;
    let dir = bundle.write(out.path(), &SvgRenderer)?;
    for plot in &bundle.plots {
        println!("plot  {}  {}", plot.file, plot.title);
    }
    for table in &bundle.tables {
        println!("table {}  {} rows", table.file, table.rows.len());
    }
    for s in &bundle.latex_snippets {
        println!("latex {}", s.file);
    }
    println!("written under {}", dir.display());
    Ok(())
}
