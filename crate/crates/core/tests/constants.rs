//! Published integer sequences reproduced from independent routes.

use ellpf_core::ellpf::glaisher_t;
use ellpf_core::soslattice::enumerate_states;

/// Alternating-sign-matrix count `∏_{k=0}^{n−1} (3k+1)!/(n+k)!`, exact in u128 for small n.
fn asm_count(n: u128) -> u128 {
    let fact = |m: u128| (1..=m).product::<u128>();
    let num: u128 = (0..n).map(|k| fact(3 * k + 1)).product();
    let den: u128 = (0..n).map(|k| fact(n + k)).product();
    num / den
}

#[test]
fn height_matrices_are_counted_by_the_asm_formula() {
    let listed = [1usize, 2, 7, 42, 429];
    for (i, &count) in listed.iter().enumerate() {
        let n = i + 1;
        assert_eq!(enumerate_states(n).unwrap().len(), count);
        assert_eq!(asm_count(n as u128), count as u128);
    }
}

#[test]
fn glaisher_numbers_match_the_listed_values() {
    let listed = ["1", "23", "1681", "257543", "67637281"];
    for (j, v) in listed.iter().enumerate() {
        assert_eq!(glaisher_t(j).unwrap().to_string(), *v);
    }
}
