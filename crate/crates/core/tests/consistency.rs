use graphlab_core::density::{t_kernel_mc, t_kernel_quad};
use graphlab_core::{BuiltinGraphon, PatternGraph, Seed};

fn grid_for(k: usize, dim: usize) -> usize {
    match (dim, k) {
        (1, 2) => 1024,
        (1, 3) => 256,
        (1, _) => 96,
        (_, 2) => 32,
        (_, 3) => 12,
        _ => 8,
    }
}

#[test]
fn monte_carlo_agrees_with_quadrature_on_builtins() {
    let builtins = [
        BuiltinGraphon::UniformLimit,
        BuiltinGraphon::RankedLimit,
        BuiltinGraphon::PrefixRatio,
        BuiltinGraphon::PrefixLimit,
        BuiltinGraphon::PrefLog(1.0),
        BuiltinGraphon::SpagLimit(0.5),
        BuiltinGraphon::HalfGraph,
    ];
    for (bi, b) in builtins.iter().enumerate() {
        let w = b.kernel().unwrap();
        for (fi, name) in ["K2", "K3", "P3", "C4"].iter().enumerate() {
            let f: PatternGraph = name.parse().unwrap();
            let grid = grid_for(f.node_count(), w.dim());
            let fine = t_kernel_quad(&f, &w, grid).unwrap();
            // halving the grid gives the quadrature error bar
            let coarse = t_kernel_quad(&f, &w, grid / 2).unwrap();
            let mc = t_kernel_mc(&f, &w, 400_000, Seed::new(77, (bi * 4 + fi) as u64)).unwrap();
            let bar = mc.stderr.hypot((fine - coarse).abs());
            assert!(
                (mc.estimate - fine).abs() <= 4.0 * bar,
                "{b} {name}: mc {} +- {}, quad {fine} (coarse {coarse})",
                mc.estimate,
                mc.stderr
            );
        }
    }
}

#[test]
fn closed_forms_for_the_log_kernel() {
    // t(F, L_c) = c^l prod r_i!
    let w = BuiltinGraphon::PrefLog(0.5).kernel().unwrap();
    for name in ["K2", "P3", "K3"] {
        let f: PatternGraph = name.parse().unwrap();
        let want = graphlab_core::density::t_log_closed(&f, 0.5).unwrap();
        let mc = t_kernel_mc(&f, &w, 1_000_000, Seed::new(78, 0)).unwrap();
        assert!(
            (mc.estimate - want).abs() <= 4.0 * mc.stderr,
            "{name}: {} vs {want}",
            mc.estimate
        );
    }
}

#[test]
fn prefix_ratio_triangle_density_by_both_methods() {
    let u = BuiltinGraphon::PrefixRatio.kernel().unwrap();
    let k3: PatternGraph = "K3".parse().unwrap();
    let mc = t_kernel_mc(&k3, &u, 1_000_000, Seed::new(79, 0)).unwrap();
    assert!((mc.estimate - 5.0 / 36.0).abs() < 3.0 * mc.stderr);
}
