use std::time::Instant;

fn main() {
    for (name, sys) in [
        ("printed", invsched::system::aps_model()),
        ("a32-zero", invsched::system::aps_model_a32_zero()),
    ] {
        let t0 = Instant::now();
        let result = invsched::invariant::max_invariant(&sys, 50).unwrap();
        let t_inv = t0.elapsed();
        let t1 = Instant::now();
        let st = invsched::safetime::safe_time(&sys, &result.set, 6).unwrap();
        println!(
            "{name}: C_inf {} rows in {} iters ({t_inv:.2?}); alpha={} hit_cap={} sets={:?} ({:.2?}); total {:.2?}",
            result.set.num_rows(),
            result.iterations,
            st.alpha,
            st.hit_cap,
            st.feasible_sets.iter().map(|s| s.num_rows()).collect::<Vec<_>>(),
            t1.elapsed(),
            t0.elapsed()
        );
    }
}
