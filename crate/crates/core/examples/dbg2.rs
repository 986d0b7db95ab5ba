use blurlab_core::cipher::*;
use blurlab_core::simplex::*;

fn main() {
    let p = Dist::bernoulli(0.5).unwrap();
    let params = KeyedParams { rate: 2.0, key_rate: 0.25, alpha: f64::INFINITY, delta: 0.0, epsilon: 0.5, seed: 1 };
    let zero = DistortionSpec::with_level_ratio(DistortionMatrix::zero(2, 2), 0, 1).unwrap();
    let e = DistortionSpec::with_level_f64(DistortionMatrix::hamming(2), 0.1).unwrap();
    let sys = build_keyed_system(&p, 8, &zero, &e, &params).unwrap();
    println!("rate_prime = {}", sys.rate_prime);
    for kt in &sys.kept {
        println!(
            "type {:?}: joint {:?} mi={:.3} crd={:.3} N={} books={} any_e={}",
            kt.type_vec.counts(),
            kt.choice.joint.counts(),
            kt.choice.type_mi_bits,
            kt.choice.crd_value_bits,
            kt.books.codewords_per_book,
            kt.books.num_books(),
            kt.books.any_event_e()
        );
    }
    let out = keyed_map_adversary(&sys).unwrap();
    println!("messages checked: {}", out.per_message.len());
    println!("success = {}", out.report.success.as_f64());
}
