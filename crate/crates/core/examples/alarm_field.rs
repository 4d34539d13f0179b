//! Per-device alarm probabilities for one realization, the truncated event
//! window that makes them accurate, and a check of the mean against
//! `1 - exp(-2π λ_E I_f)`.

use mtc_traffic::alarm_field::{alarm_probability, field_for_realization, required_event_window, truncation_radius};
use mtc_traffic::analytics::mean_alarm_probability;
use mtc_traffic::atpf::AtpfSpec;
use mtc_traffic::point_process::{sample_ppp, Point, Window};
use mtc_traffic::rng::{stream, StreamRole};

fn main() -> mtc_traffic::Result<()> {
    let atpf = AtpfSpec::exponential(1.0)?;
    let lambda_e = 0.01;
    let cell = Window::disk(Point::ORIGIN, 20.0)?;

    let r_t = truncation_radius(&atpf, lambda_e, 1e-6)?;
    let window = required_event_window(&cell, &atpf, lambda_e, 1e-6)?;
    println!(
        "truncation radius {r_t:.3} m, event window area {:.0} m²",
        window.area()
    );

    let devices = sample_ppp(0.1, &cell, &mut stream(3, 0, StreamRole::Devices))?;
    let events = sample_ppp(lambda_e, &window, &mut stream(3, 0, StreamRole::Events))?;
    let field = field_for_realization(&devices, &events, &atpf)?;
    let alarmed = field.per_device_p.iter().filter(|&&p| p > 0.1).count();
    println!(
        "{} devices, {} events, {alarmed} devices with p_x > 0.1, max p_x {:.3}",
        devices.len(),
        events.len(),
        field.per_device_p.iter().cloned().fold(0.0, f64::max)
    );

    // Mean over event realizations for a device at the origin.
    let n = 5000;
    let mean = (0..n)
        .map(|t| {
            let ev = sample_ppp(lambda_e, &window, &mut stream(3, t, StreamRole::Auxiliary)).unwrap();
            alarm_probability(&Point::ORIGIN, &ev, &atpf)
        })
        .sum::<f64>()
        / n as f64;
    println!(
        "mean p_x at origin {mean:.5}, closed form {:.5}",
        mean_alarm_probability(lambda_e, &atpf)?
    );
    Ok(())
}
