//! Weak-cipher detection and recovery.
//!
//! Some operators push "private" traffic through a monoalphabetic
//! substitution over a fixed alphabet. This module flags such traffic via
//! the index of coincidence and recovers keys with a known-plaintext crib.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

/// Cipher alphabet: uppercase letters, digits, space and common punctuation.
pub const ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 ./-:,()";

/// 1/len: expected IoC for uniformly random text over [`ALPHABET`].
pub fn random_ioc() -> f64 {
    1.0 / ALPHABET.len() as f64
}

pub fn alphabet_index(c: u8) -> Option<usize> {
    ALPHABET.iter().position(|&a| a == c)
}

/// Index of coincidence of `text` over [`ALPHABET`]. Characters outside the
/// alphabet are ignored. Returns `None` for fewer than 2 in-alphabet chars.
pub fn index_of_coincidence(text: &str) -> Option<f64> {
    let mut counts = [0u64; 64];
    let mut n = 0u64;
    for &b in text.as_bytes() {
        if let Some(i) = alphabet_index(b) {
            counts[i] += 1;
            n += 1;
        }
    }
    if n < 2 {
        return None;
    }
    let num: u64 = counts.iter().map(|&c| c * c.saturating_sub(1)).sum();
    Some(num as f64 / (n * (n - 1)) as f64)
}

/// Verdict from [`classify_encrypted`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CipherVerdict {
    pub is_encrypted: bool,
    pub index_of_coincidence: f64,
    pub printable_ratio: f64,
}

/// Classify a message body as likely-encrypted using its IoC.
///
/// Flags text whose character statistics are printable but implausible:
/// nearly all characters fall in the cipher alphabet, yet the IoC sits far
/// below the peaked profile of language/telemetry (random text over the
/// alphabet gives IoC ≈ 1/|alphabet|). `is_encrypted` is only ever set for
/// texts that clear the `min_len` gate, so a text flagged at gate g is
/// flagged at any smaller gate too. The caller is expected to suppress the
/// flag when a content detector already explained the message.
pub fn classify_encrypted(text: &str, min_len: usize, threshold: f64) -> CipherVerdict {
    let total = text.len();
    let in_alphabet = text.bytes().filter(|&b| alphabet_index(b).is_some()).count();
    let printable_ratio = if total == 0 {
        0.0
    } else {
        in_alphabet as f64 / total as f64
    };
    let ioc = index_of_coincidence(text).unwrap_or(f64::NAN);
    let is_encrypted = in_alphabet >= min_len
        && printable_ratio >= 0.9
        && ioc.is_finite()
        && ioc < threshold;
    CipherVerdict {
        is_encrypted,
        index_of_coincidence: ioc,
        printable_ratio,
    }
}

pub const DEFAULT_MIN_LEN: usize = 40;
pub const DEFAULT_IOC_THRESHOLD: f64 = 0.045;

/// A bijective mapping over [`ALPHABET`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionKey {
    /// `map[i]` is the index the i-th alphabet char encrypts to.
    map: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum KeyError {
    #[error("key must be a permutation of the {0}-char alphabet")]
    NotAPermutation(usize),
}

impl SubstitutionKey {
    pub fn identity() -> Self {
        SubstitutionKey {
            map: (0..ALPHABET.len()).collect(),
        }
    }

    /// Build from an explicit permutation of alphabet indices.
    pub fn from_permutation(map: Vec<usize>) -> Result<Self, KeyError> {
        let n = ALPHABET.len();
        let mut seen = vec![false; n];
        if map.len() != n {
            return Err(KeyError::NotAPermutation(n));
        }
        for &i in &map {
            if i >= n || seen[i] {
                return Err(KeyError::NotAPermutation(n));
            }
            seen[i] = true;
        }
        Ok(SubstitutionKey { map })
    }

    /// Uniformly random key.
    pub fn random(rng: &mut impl Rng) -> Self {
        let mut map: Vec<usize> = (0..ALPHABET.len()).collect();
        map.shuffle(rng);
        SubstitutionKey { map }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        SubstitutionKey { map: inv }
    }

    /// Encrypt; characters outside the alphabet pass through unchanged.
    pub fn encrypt(&self, plaintext: &str) -> String {
        plaintext
            .bytes()
            .map(|b| match alphabet_index(b) {
                Some(i) => ALPHABET[self.map[i]] as char,
                None => b as char,
            })
            .collect()
    }

    pub fn decrypt(&self, ciphertext: &str) -> String {
        self.inverse().encrypt(ciphertext)
    }

    /// Plain-to-cipher mapping as `(plain, cipher)` char pairs.
    pub fn pairs(&self) -> Vec<(char, char)> {
        self.map
            .iter()
            .enumerate()
            .map(|(i, &j)| (ALPHABET[i] as char, ALPHABET[j] as char))
            .collect()
    }
}

/// A known-plaintext crib: a fixed-format message template.
#[derive(Clone, Debug)]
pub struct CribTemplate {
    /// Literal characters; `None` at variable positions.
    pub literals: Vec<Option<u8>>,
    /// Expected frequency ranking of variable-field characters, most
    /// frequent first. Used to fill mappings the literals don't constrain.
    pub ranking: Vec<u8>,
}

#[derive(Debug, Error)]
pub enum CribError {
    #[error("template needs a literal line and a mask line")]
    MissingLines,
    #[error("mask length {mask} does not match literal length {lit}")]
    LengthMismatch { lit: usize, mask: usize },
    #[error("bad mask char {0:?}: expected 'L' or 'V'")]
    BadMask(char),
    #[error("char {0:?} is outside the cipher alphabet")]
    OutOfAlphabet(char),
    #[error("template has no literal positions")]
    NoLiterals,
}

impl CribTemplate {
    /// Parse the two-or-three-line template format: literals (with `_`
    /// placeholders), mask (`L`/`V`), optional variable-char ranking.
    /// `#` lines and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, CribError> {
        let mut lines = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let lit_line = lines.next().ok_or(CribError::MissingLines)?;
        let mask_line = lines.next().ok_or(CribError::MissingLines)?;
        if lit_line.len() != mask_line.len() {
            return Err(CribError::LengthMismatch {
                lit: lit_line.len(),
                mask: mask_line.len(),
            });
        }
        let mut literals = Vec::with_capacity(lit_line.len());
        for (lc, mc) in lit_line.bytes().zip(mask_line.bytes()) {
            match mc {
                b'L' => {
                    if alphabet_index(lc).is_none() {
                        return Err(CribError::OutOfAlphabet(lc as char));
                    }
                    literals.push(Some(lc));
                }
                b'V' => literals.push(None),
                other => return Err(CribError::BadMask(other as char)),
            }
        }
        if literals.iter().all(Option::is_none) {
            return Err(CribError::NoLiterals);
        }
        let ranking = match lines.next() {
            Some(line) => {
                for b in line.bytes() {
                    if alphabet_index(b).is_none() {
                        return Err(CribError::OutOfAlphabet(b as char));
                    }
                }
                line.as_bytes().to_vec()
            }
            None => Vec::new(),
        };
        Ok(CribTemplate { literals, ranking })
    }

    pub fn shipped() -> Self {
        Self::parse(crate::defaults::CRIB_TEMPLATE).expect("shipped template parses")
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Generate one plaintext instance of the template. Variable positions
    /// draw from the ranking with a steep 2^-rank distribution (matching the
    /// skew the recovery step assumes), or uniformly from the alphabet when
    /// no ranking is shipped.
    pub fn generate_plaintext(&self, rng: &mut impl Rng) -> String {
        let mut out = String::with_capacity(self.len());
        for lit in &self.literals {
            match lit {
                Some(b) => out.push(*b as char),
                None => {
                    let b = if self.ranking.is_empty() {
                        ALPHABET[rng.gen_range(0..ALPHABET.len())]
                    } else {
                        // geometric over the ranking, clamped to its tail
                        let mut idx = 0;
                        while idx + 1 < self.ranking.len() && rng.gen_bool(0.5) {
                            idx += 1;
                        }
                        self.ranking[idx]
                    };
                    out.push(b as char);
                }
            }
        }
        out
    }
}

/// Result of a successful crib attack.
#[derive(Clone, Debug)]
pub struct CrackResult {
    pub key: SubstitutionKey,
    /// Number of ciphertext lines that aligned with the template.
    pub aligned_lines: usize,
    /// Alphabet indices pinned by literal constraints (high confidence);
    /// the rest were filled by frequency ranking or arbitrarily.
    pub constrained: Vec<bool>,
    /// Fraction of the alphabet pinned by literal constraints.
    pub coverage: f64,
}

#[derive(Debug, Error)]
pub enum CrackError {
    #[error("no ciphertext line aligned with the crib template")]
    NoAlignment,
    #[error("crib constraints conflict: cipher char {cipher:?} maps to both {a:?} and {b:?}")]
    InconsistentConstraints { cipher: char, a: char, b: char },
    #[error("crib constraints conflict: cipher chars {a:?} and {b:?} both map to plain {plain:?}")]
    ConflictingCiphers { plain: char, a: char, b: char },
}

fn ci_char(i: usize) -> char {
    ALPHABET[i] as char
}

/// Recover a substitution key from ciphertext lines assumed to follow the
/// crib template.
///
/// Alignment: a line aligns if its length matches the template and every
/// literal position holds an in-alphabet char consistent with a bijection.
/// Literal positions pin cipher→plain pairs exactly; variable-position
/// cipher chars are then matched to the template ranking by observed
/// frequency; any residue is paired arbitrarily (but deterministically) to
/// complete the permutation.
pub fn crack_with_crib(lines: &[&str], template: &CribTemplate) -> Result<CrackResult, CrackError> {
    let n = ALPHABET.len();
    // plain index -> cipher index, from literal constraints
    let mut plain_to_cipher: Vec<Option<usize>> = vec![None; n];
    let mut cipher_to_plain: Vec<Option<usize>> = vec![None; n];
    let mut aligned_lines = 0;
    let mut var_counts: BTreeMap<usize, u64> = BTreeMap::new();

    'line: for line in lines {
        // structural alignment: right length, every position in-alphabet
        if line.len() != template.len()
            || !line.bytes().all(|b| alphabet_index(b).is_some())
        {
            continue 'line;
        }
        let bytes = line.as_bytes();
        aligned_lines += 1;
        for (pos, lit) in template.literals.iter().enumerate() {
            let ci = alphabet_index(bytes[pos]).expect("checked above");
            match lit {
                Some(lb) => {
                    let pi = alphabet_index(*lb).expect("validated at parse");
                    if let Some(prev) = cipher_to_plain[ci] {
                        if prev != pi {
                            return Err(CrackError::InconsistentConstraints {
                                cipher: ci_char(ci),
                                a: ci_char(prev),
                                b: ci_char(pi),
                            });
                        }
                    }
                    if let Some(prev) = plain_to_cipher[pi] {
                        if prev != ci {
                            return Err(CrackError::ConflictingCiphers {
                                plain: ci_char(pi),
                                a: ci_char(prev),
                                b: ci_char(ci),
                            });
                        }
                    }
                    plain_to_cipher[pi] = Some(ci);
                    cipher_to_plain[ci] = Some(pi);
                }
                None => {
                    *var_counts.entry(ci).or_insert(0) += 1;
                }
            }
        }
    }

    if aligned_lines == 0 {
        return Err(CrackError::NoAlignment);
    }

    let constrained: Vec<bool> = plain_to_cipher.iter().map(Option::is_some).collect();
    let coverage = constrained.iter().filter(|&&c| c).count() as f64 / n as f64;

    // Frequency step: rank unassigned cipher chars seen at variable
    // positions and pair them with the template ranking in order.
    let mut ranked_cipher: Vec<(usize, u64)> = var_counts
        .into_iter()
        .filter(|(ci, _)| cipher_to_plain[*ci].is_none())
        .collect();
    ranked_cipher.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut rank_iter = ranked_cipher.into_iter().map(|(ci, _)| ci);
    for &rb in &template.ranking {
        let pi = alphabet_index(rb).expect("validated at parse");
        if plain_to_cipher[pi].is_some() {
            continue;
        }
        let Some(ci) = rank_iter.next() else { break };
        plain_to_cipher[pi] = Some(ci);
        cipher_to_plain[ci] = Some(pi);
    }

    // Complete the permutation deterministically.
    let mut free_cipher: Vec<usize> = (0..n).filter(|&ci| cipher_to_plain[ci].is_none()).collect();
    free_cipher.reverse();
    for (pi, slot) in plain_to_cipher.iter_mut().enumerate() {
        if slot.is_none() {
            let ci = free_cipher.pop().expect("counts match");
            *slot = Some(ci);
            cipher_to_plain[ci] = Some(pi);
        }
    }

    let map: Vec<usize> = plain_to_cipher.into_iter().map(Option::unwrap).collect();
    Ok(CrackResult {
        key: SubstitutionKey::from_permutation(map).expect("constructed as a bijection"),
        aligned_lines,
        constrained,
        coverage,
    })
}

/// Per-character recovery accuracy over chars that occur at least
/// `min_occurrences` times in the reference plaintexts.
pub fn recovery_accuracy(
    reference: &[String],
    recovered: &[String],
    min_occurrences: u64,
) -> Option<f64> {
    let mut counts: BTreeMap<u8, u64> = BTreeMap::new();
    for line in reference {
        for b in line.bytes() {
            if alphabet_index(b).is_some() {
                *counts.entry(b).or_insert(0) += 1;
            }
        }
    }
    let mut total = 0u64;
    let mut correct = 0u64;
    for (r, g) in reference.iter().zip(recovered) {
        for (rb, gb) in r.bytes().zip(g.bytes()) {
            if alphabet_index(rb).is_some() && counts[&rb] >= min_occurrences {
                total += 1;
                if rb == gb {
                    correct += 1;
                }
            }
        }
    }
    (total > 0).then(|| correct as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alphabet_has_no_duplicates() {
        let mut seen = std::collections::HashSet::new();
        for &b in ALPHABET {
            assert!(seen.insert(b), "duplicate {:?}", b as char);
        }
        assert_eq!(ALPHABET.len(), 44);
    }

    #[test]
    fn ioc_of_repeated_char_is_one() {
        assert!((index_of_coincidence("AAAAAAAA").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ioc_of_flat_text_is_low() {
        // each alphabet char exactly once -> IoC 0
        let text: String = ALPHABET.iter().map(|&b| b as char).collect();
        assert_eq!(index_of_coincidence(&text).unwrap(), 0.0);
    }

    #[test]
    fn ioc_needs_two_chars() {
        assert!(index_of_coincidence("A").is_none());
        assert!(index_of_coincidence("").is_none());
    }

    #[test]
    fn classify_short_text_never_flagged() {
        let v = classify_encrypted("SHORT", DEFAULT_MIN_LEN, DEFAULT_IOC_THRESHOLD);
        assert!(!v.is_encrypted);
    }

    #[test]
    fn classify_language_vs_flat() {
        let english = "REQUEST DESCENT FL240 DUE WEATHER REQUEST DESCENT FL240 DUE WEATHER";
        let v = classify_encrypted(english, DEFAULT_MIN_LEN, DEFAULT_IOC_THRESHOLD);
        assert!(!v.is_encrypted);
        assert!(v.index_of_coincidence > DEFAULT_IOC_THRESHOLD);
        // near-uniform synthetic stream
        let flat: String = (0..440).map(|i| ALPHABET[i % 44] as char).collect();
        let v = classify_encrypted(&flat, DEFAULT_MIN_LEN, DEFAULT_IOC_THRESHOLD);
        assert!(v.is_encrypted);
        assert!((v.printable_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_uniform_random_string() {
        // independent oracle: expected IoC of a uniform string is 1/|alphabet|;
        // averaged over many draws the sample IoC must sit near it and the
        // classifier must flag each draw.
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let mut sum = 0.0;
        let trials = 200;
        for _ in 0..trials {
            let text: String = (0..100)
                .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char)
                .collect();
            let v = classify_encrypted(&text, DEFAULT_MIN_LEN, DEFAULT_IOC_THRESHOLD);
            assert!(v.is_encrypted, "ioc {}", v.index_of_coincidence);
            sum += v.index_of_coincidence;
        }
        let mean = sum / trials as f64;
        assert!((mean - random_ioc()).abs() < 0.005, "mean ioc {mean}");
    }

    #[test]
    fn classify_monotone_in_length_gate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let text: String = (0..100)
            .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char)
            .collect();
        for g in [100, 80, 40, 10, 0] {
            assert!(classify_encrypted(&text, g, DEFAULT_IOC_THRESHOLD).is_encrypted);
        }
        assert!(!classify_encrypted(&text, 101, DEFAULT_IOC_THRESHOLD).is_encrypted);
    }

    #[test]
    fn crack_reports_conflicting_constraints() {
        let template = CribTemplate::parse("AB_\nLLV").unwrap();
        // line 1 pins A->X, B->Y; line 2 forces A->Y: collision on Y
        let err = crack_with_crib(&["XY0", "YX0"], &template).unwrap_err();
        assert!(matches!(err, CrackError::InconsistentConstraints { cipher: 'Y', .. }
            | CrackError::ConflictingCiphers { .. }));
    }

    #[test]
    fn encrypt_decrypt_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let key = SubstitutionKey::random(&mut rng);
        let pt = "POS/N47.46/E008.54/FL360/T1205Z";
        assert_eq!(key.decrypt(&key.encrypt(pt)), pt);
    }

    #[test]
    fn identity_key_is_noop() {
        let pt = "HELLO 123";
        assert_eq!(SubstitutionKey::identity().encrypt(pt), pt);
    }

    #[test]
    fn out_of_alphabet_chars_pass_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let key = SubstitutionKey::random(&mut rng);
        let ct = key.encrypt("A#B");
        assert_eq!(ct.as_bytes()[1], b'#');
    }

    #[test]
    fn bad_permutation_rejected() {
        assert!(SubstitutionKey::from_permutation(vec![0; ALPHABET.len()]).is_err());
        assert!(SubstitutionKey::from_permutation(vec![0, 1]).is_err());
    }

    #[test]
    fn shipped_template_parses() {
        let t = CribTemplate::shipped();
        assert_eq!(t.len(), 31);
        assert_eq!(t.literals[0], Some(b'P'));
        assert_eq!(t.literals[5], None);
        assert_eq!(t.ranking, b"0123456789");
    }

    #[test]
    fn template_rejects_bad_input() {
        assert!(matches!(
            CribTemplate::parse("ABC\nLLX"),
            Err(CribError::BadMask('X'))
        ));
        assert!(matches!(
            CribTemplate::parse("ABC\nLL"),
            Err(CribError::LengthMismatch { .. })
        ));
        assert!(matches!(
            CribTemplate::parse("___\nVVV"),
            Err(CribError::NoLiterals)
        ));
        assert!(matches!(CribTemplate::parse("ABC"), Err(CribError::MissingLines)));
    }

    #[test]
    fn crack_recovers_literal_constrained_chars_exactly() {
        let template = CribTemplate::shipped();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let key = SubstitutionKey::random(&mut rng);
        let plaintexts: Vec<String> =
            (0..60).map(|_| template.generate_plaintext(&mut rng)).collect();
        let ciphertexts: Vec<String> = plaintexts.iter().map(|p| key.encrypt(p)).collect();
        let refs: Vec<&str> = ciphertexts.iter().map(String::as_str).collect();
        let result = crack_with_crib(&refs, &template).unwrap();
        assert_eq!(result.aligned_lines, 60);
        // every literal char of every line decrypts correctly
        let recovered: Vec<String> = ciphertexts.iter().map(|c| result.key.decrypt(c)).collect();
        for (p, r) in plaintexts.iter().zip(&recovered) {
            for (pos, lit) in template.literals.iter().enumerate() {
                if lit.is_some() {
                    assert_eq!(p.as_bytes()[pos], r.as_bytes()[pos]);
                }
            }
        }
    }

    #[test]
    fn crack_accuracy_on_frequent_chars() {
        let template = CribTemplate::shipped();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let key = SubstitutionKey::random(&mut rng);
        let plaintexts: Vec<String> =
            (0..120).map(|_| template.generate_plaintext(&mut rng)).collect();
        let ciphertexts: Vec<String> = plaintexts.iter().map(|p| key.encrypt(p)).collect();
        let refs: Vec<&str> = ciphertexts.iter().map(String::as_str).collect();
        let result = crack_with_crib(&refs, &template).unwrap();
        let recovered: Vec<String> = ciphertexts.iter().map(|c| result.key.decrypt(c)).collect();
        let acc = recovery_accuracy(&plaintexts, &recovered, 3).unwrap();
        assert!(acc >= 0.95, "accuracy {acc}");
    }

    #[test]
    fn crack_rejects_unaligned_corpus() {
        let template = CribTemplate::shipped();
        assert!(matches!(
            crack_with_crib(&["WRONG LENGTH", "ALSO WRONG"], &template),
            Err(CrackError::NoAlignment)
        ));
    }

    #[test]
    fn generated_plaintext_matches_template_shape() {
        let template = CribTemplate::shipped();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let pt = template.generate_plaintext(&mut rng);
            assert_eq!(pt.len(), template.len());
            for (pos, lit) in template.literals.iter().enumerate() {
                match lit {
                    Some(b) => assert_eq!(pt.as_bytes()[pos], *b),
                    None => assert!(template.ranking.contains(&pt.as_bytes()[pos])),
                }
            }
        }
    }
}
