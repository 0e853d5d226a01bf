//! Self-contained substitution-cipher demo: encrypt template-shaped
//! plaintexts under a random key, then recover the key with the crib attack.
//!
//!     cargo run --example crack_cipher [SEED]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use acars_audit::cipher::{
    crack_with_crib, recovery_accuracy, CribTemplate, SubstitutionKey,
};

fn main() -> anyhow::Result<()> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(42);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let template = CribTemplate::shipped();
    let key = SubstitutionKey::random(&mut rng);
    let plaintexts: Vec<String> =
        (0..50).map(|_| template.generate_plaintext(&mut rng)).collect();
    let ciphertexts: Vec<String> = plaintexts.iter().map(|p| key.encrypt(p)).collect();

    println!("sample plaintext:  {}", plaintexts[0]);
    println!("sample ciphertext: {}", ciphertexts[0]);

    let lines: Vec<&str> = ciphertexts.iter().map(String::as_str).collect();
    let result = crack_with_crib(&lines, &template)?;
    println!(
        "aligned {} lines; {:.1}% of the alphabet pinned by crib literals",
        result.aligned_lines,
        result.coverage * 100.0
    );

    let recovered: Vec<String> = ciphertexts.iter().map(|c| result.key.decrypt(c)).collect();
    println!("sample decryption: {}", recovered[0]);
    if let Some(acc) = recovery_accuracy(&plaintexts, &recovered, 3) {
        println!("accuracy on chars seen >= 3 times: {:.1}%", acc * 100.0);
    }
    Ok(())
}
