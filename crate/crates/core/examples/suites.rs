use blurlab_core::verify::run_suite;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    for s in &args {
        let t = std::time::Instant::now();
        match run_suite(s, 1) {
            Ok(rep) => {
                for c in &rep.checks {
                    println!(
                        "[{}] {} :: {} — {}{}",
                        if c.pass { "PASS" } else { "FAIL" },
                        rep.suite,
                        c.name,
                        c.details,
                        c.counterexample
                            .as_ref()
                            .map(|x| format!(" | {}", &x[..x.len().min(300)]))
                            .unwrap_or_default()
                    );
                }
            }
            Err(e) => println!("[ERROR] {s}: {e}"),
        }
        println!("  ({s}: {:?})", t.elapsed());
    }
}
