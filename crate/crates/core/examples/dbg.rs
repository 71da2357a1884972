use num_complex::Complex64;
use susy_confluent::elliptic::LatticeData;
use susy_confluent::grid::{make_grid, SampledFunction};
use susy_confluent::params::ChainParameters;
use susy_confluent::seeds::{build_seed, FamilySpec, SeedRequest};
use susy_confluent::stencil::DerivativeStencil;
use susy_confluent::transform::{transform, zero_brackets};
use susy_confluent::wronskian::reduced_bundle;

fn main() {
    let l = LatticeData::new(0.5).unwrap();
    let z = Complex64::new(0.5 * l.omega(), 0.0);
    println!("wp(w/2)  = {:?} (expect 1.2071067811865475)", l.wp(z));
    println!("wp'(w/2) = {:?} (expect -2.414213562373095)", l.wp_prime(z));
    println!("zeta(w/2) = {:?}", l.zeta(z));
    println!("sigma(w/2) = {:?}", l.sigma(z));

    let h = 1e-5;
    let dz = Complex64::new(h, 0.0);
    for z in [Complex64::new(0.7, 0.3), Complex64::new(1.3, -0.6)] {
        let fd = (l.zeta(z + dz).unwrap() - l.zeta(z - dz).unwrap()) / (2.0 * h);
        println!("zeta' fd = {fd:?} vs -wp = {:?}", -l.wp(z).unwrap());
    }

    // PT k=3
    let grid = make_grid(-10.0, 10.0, 2001).unwrap();
    let kappa = 2.0f64.sqrt();
    let d2 = -(-2.0 * kappa * 0.0f64).exp() / (8.0 * kappa.powi(3));
    let seed = build_seed(&SeedRequest {
        family: FamilySpec::FreeParticle,
        epsilon: Complex64::new(-kappa * kappa, 0.0),
        k: 3,
        grid,
    })
    .unwrap();
    let p = ChainParameters::new(seed.epsilon, 3, vec![0.0, 0.0], vec![0.0, d2]).unwrap();
    let b = reduced_bundle(&seed, &p).unwrap();
    let r = transform(&seed.v0, &b).unwrap();
    let mut worst = (0.0f64, 0.0f64);
    for (i, x) in grid.points().enumerate() {
        let expect = -2.0 * kappa * kappa / (kappa * x).cosh().powi(2);
        let d = (r.vk.value(i).re - expect).abs();
        if d > worst.0 {
            worst = (d, x);
        }
    }
    println!("PT k3 worst dev {} at x = {}", worst.0, worst.1);
    println!("singular? {:?}", r.singularities);
    // analytic W' vs stencil at k=3/4 for lame
    let grid = make_grid(-7.5, 7.5, 2001).unwrap();
    let seed = build_seed(&SeedRequest {
        family: FamilySpec::Lame { m: 0.5 },
        epsilon: Complex64::new(-0.5, 0.0),
        k: 4,
        grid,
    })
    .unwrap();
    let p = ChainParameters::new(seed.epsilon, 4, vec![0.12; 3], vec![0.08; 3]).unwrap();
    let b = reduced_bundle(&seed, &p).unwrap();
    let d1 = DerivativeStencil::default_for(1).apply(&b.w_k).unwrap();
    let wx = b.w_k_x.as_ref().unwrap();
    let mut worst = (0.0f64, 0.0f64);
    let scale = b.w_k.max_abs();
    for (i, x) in grid.points().enumerate() {
        let d = (d1.value(i) - wx.value(i)).norm() / scale;
        if d > worst.0 {
            worst = (d, x);
        }
    }
    println!("lame k4 W' dev {} at x = {} (scale {scale})", worst.0, worst.1);

    // numeric seed: flat potential
    let grid = make_grid(-8.0, 8.0, 2001).unwrap();
    let seed = build_seed(&SeedRequest {
        family: FamilySpec::Numeric {
            potential: SampledFunction::zeros(grid),
        },
        epsilon: Complex64::new(-1.0, 0.0),
        k: 2,
        grid,
    });
    match seed {
        Ok(s) => {
            println!("numeric flat: wronskian dev {}", s.diagnostics.wronskian_deviation);
            let x0 = grid.x_min();
            let mut worst = 0.0f64;
            for (i, x) in grid.points().enumerate() {
                let expect = (x - x0).exp();
                worst = worst.max((s.u[0].value(i).re - expect).abs() / expect);
            }
            println!("numeric flat: u rel error {worst}");
        }
        Err(e) => println!("numeric flat seed failed: {e}"),
    }

    // singular bracket k=3 D1=0.5
    let grid = make_grid(-10.0, 10.0, 2001).unwrap();
    let seed = build_seed(&SeedRequest {
        family: FamilySpec::FreeParticle,
        epsilon: Complex64::new(-1.0, 0.0),
        k: 3,
        grid,
    })
    .unwrap();
    let p = ChainParameters::new(seed.epsilon, 3, vec![0.0, 0.0], vec![0.5, 0.1]).unwrap();
    let b = reduced_bundle(&seed, &p).unwrap();
    let br = zero_brackets(&b.w_k, 1e-12 * b.w_k.max_abs());
    println!("brackets: {br:?}");
}
