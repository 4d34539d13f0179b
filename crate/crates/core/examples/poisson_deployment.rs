//! Draw device deployments in the cell and compare the empirical count with
//! the Poisson mean `λ_M π R²`.

use std::f64::consts::PI;

use mtc_traffic::point_process::{sample_ppp, Point, Window};
use mtc_traffic::rng::{stream, StreamRole};

fn main() -> mtc_traffic::Result<()> {
    let density = 0.1;
    let cell = Window::disk(Point::ORIGIN, 20.0)?;
    let counts: Vec<usize> = (0..2000)
        .map(|t| sample_ppp(density, &cell, &mut stream(7, t, StreamRole::Devices)).map(|r| r.len()))
        .collect::<Result<_, _>>()?;

    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    println!("expected count  {:.3}", density * PI * 400.0);
    println!("empirical mean  {mean:.3}");
    println!("variance/mean   {:.3}", var / mean);

    let one = sample_ppp(density, &cell, &mut stream(7, 0, StreamRole::Devices))?;
    println!("\nfirst five devices of realization 0:");
    for p in one.points.iter().take(5) {
        println!("  ({:7.3}, {:7.3})  r = {:.3}", p.x, p.y, p.distance(&Point::ORIGIN));
    }

    let ring = Window::annulus(Point::ORIGIN, 20.0, 40.0)?;
    let outer = sample_ppp(0.01, &ring, &mut stream(7, 0, StreamRole::Events))?;
    println!(
        "\n{} events in the 20..40 m annulus (mean {:.1})",
        outer.len(),
        0.01 * ring.area()
    );
    Ok(())
}
