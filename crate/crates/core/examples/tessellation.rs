//! Launch-grid density for increasing tessellation frequency.

use mmray::geometry::{direction_count, nominal_spacing, tessellate_half_icosahedron, tessellate_icosahedron, Vec3};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>4} {:>8} {:>12} {:>12}", "N", "rays", "nominal", "measured");
    for n in [1, 2, 5, 10, 20, 50] {
        let t = tessellate_icosahedron(n)?;
        assert_eq!(t.len(), direction_count(n));
        // Mean angle to the nearest neighbour over a sample of directions.
        let step = (t.len() / 200).max(1);
        let sample: Vec<f64> = t
            .directions
            .iter()
            .step_by(step)
            .map(|d| {
                t.directions
                    .iter()
                    .filter(|o| *o != d)
                    .map(|o| d.angle_to(*o))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let mean = sample.iter().sum::<f64>() / sample.len() as f64;
        println!(
            "{n:>4} {:>8} {:>11.3}° {:>11.3}°",
            t.len(),
            nominal_spacing(n).to_degrees(),
            mean.to_degrees()
        );
    }
    let half = tessellate_half_icosahedron(10, Vec3::Z)?;
    println!("half-icosahedron above a floor, N=10: {} rays", half.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
