use iwatsuka::field::MagneticProfile;
use iwatsuka::fiber::solve_fiber_spectral;

fn main() {
    let p = MagneticProfile::model_power_tail(1.0, 2.0, 2.0, 1.0, 2.0).unwrap();
    for k in [240.0, 480.0] {
        let a = &solve_fiber_spectral(&p, k, 1, 60).unwrap()[0];
        let b = &solve_fiber_spectral(&p, k, 1, 100).unwrap()[0];
        let mut d2 = 0.0;
        for j in 0..a.coeffs.len().min(b.coeffs.len()) {
            d2 += (a.coeffs[j] - b.coeffs[j]).powi(2);
        }
        println!("k={k}: self-distance between basis sizes = {:.3e}, e_a={:.15}, e_b={:.15}",
                 d2.sqrt(), a.energy, b.energy);
        // coefficient tail sizes
        let n = a.coeffs.len();
        println!("  coeffs near end: {:?}", &a.coeffs[n-4..]);
        println!("  coeffs 5..10: {:?}", &a.coeffs[5..10]);
    }
}
