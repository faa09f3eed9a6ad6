use frackix::kinetic::*;
use frackix::layer::*;
use std::time::Instant;

fn main() {
    let kernel = TurnKernel::uniform(2).unwrap();
    let params = ModelParams::derive(1.5, 1.0, 0.0, 1.0, 0.1, &kernel).unwrap();
    let run = |m: usize| {
        let t0 = Instant::now();
        let ords = OrdinateSet::circle(m).unwrap();
        let grid = HalfSpaceGrid::graded(20000.0, 0.005, 1.10).unwrap();
        let op = TransportOperator::build(&params, &kernel, ords, grid, [0.0, 0.0]).unwrap();
        let albedo = extract_albedo(&op).unwrap();
        let nn = op.grid().nodes().len();
        println!("  m={m} nodes={nn} took {:.0}s", t0.elapsed().as_secs_f64());
        albedo
    };
    let w_mu = |al: &AlbedoData| -> f64 {
        al.w.iter().zip(&al.mu_in).zip(&al.w_in).map(|((w, mu), q)| w * mu * q).sum()
    };
    let w_mu2 = |al: &AlbedoData| -> f64 {
        al.w.iter().zip(&al.mu_in).zip(&al.w_in).map(|((w, mu), q)| w * mu * mu * q).sum()
    };
    let a32 = run(32);
    let a64 = run(64);
    println!("fine grid 32->64: dWmu {:.3e} dWmu2 {:.3e}",
        ((w_mu(&a32) - w_mu(&a64)) / w_mu(&a32)).abs(),
        ((w_mu2(&a32) - w_mu2(&a64)) / w_mu2(&a32)).abs());
}
