//! ATPF shapes: evaluate them, and compare the first moment and tail mass
//! used by the closed forms with adaptive quadrature.

use mtc_traffic::atpf::AtpfSpec;

fn main() -> mtc_traffic::Result<()> {
    let shapes = [
        AtpfSpec::exponential(1.0)?,
        AtpfSpec::exponential(3.0)?,
        AtpfSpec::disk_step(5.0, 0.8)?,
        "table:0:1,2:0.6,5:0.1,8:0".parse::<AtpfSpec>()?,
    ];
    println!("{:<28} {:>10} {:>10} {:>12}", "atpf", "I_f", "quadrature", "tail(r=4)");
    for atpf in &shapes {
        println!(
            "{:<28} {:>10.6} {:>10.6} {:>12.4e}",
            atpf.to_string(),
            atpf.first_moment_integral(),
            atpf.first_moment_by_quadrature()?,
            atpf.tail_mass(4.0)?,
        );
    }

    println!("\nf(d) at a few distances:");
    for d in [0.0, 1.0, 2.5, 5.0, 10.0] {
        let row: Vec<String> = shapes
            .iter()
            .map(|a| format!("{:.4}", a.evaluate(d).unwrap()))
            .collect();
        println!("  d = {d:>4}: {}", row.join("  "));
    }
    Ok(())
}
