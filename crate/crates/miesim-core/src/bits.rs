//! Word-level helpers for bit-packed vectors.

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn get(words: &[u64], i: usize) -> bool {
    (words[i >> 6] >> (i & 63)) & 1 == 1
}

#[inline]
pub(crate) fn set(words: &mut [u64], i: usize, v: bool) {
    let m = 1u64 << (i & 63);
    if v {
        words[i >> 6] |= m;
    } else {
        words[i >> 6] &= !m;
    }
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

#[inline]
pub(crate) fn is_zero(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

/// Mask with bit `i` set for every index in `idx`.
pub(crate) fn mask_of(n: usize, idx: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut m = vec![0u64; words_for(n)];
    for i in idx {
        set(&mut m, i, true);
    }
    m
}

/// log_i of the scalar produced by multiplying two Hermitian-form Paulis.
///
/// On return `(x1, z1)` holds the bits of the product. The operands are
/// unsigned: the caller folds signs in separately. Counting is done mod 4 per
/// bit position with two accumulator words.
#[inline]
pub(crate) fn mul_log_i(x1: &mut [u64], z1: &mut [u64], x2: &[u64], z2: &[u64]) -> u8 {
    let mut cnt1: u64;
    let mut cnt2: u64;
    let mut total: u32 = 0;
    for w in 0..x1.len() {
        let (ox, oz) = (x1[w], z1[w]);
        let (bx, bz) = (x2[w], z2[w]);
        if bx | bz == 0 {
            continue;
        }
        let nx = ox ^ bx;
        let nz = oz ^ bz;
        x1[w] = nx;
        z1[w] = nz;
        let x1z2 = ox & bz;
        let anti = (bx & oz) ^ x1z2;
        cnt2 = (nx ^ nz ^ x1z2) & anti;
        cnt1 = anti;
        // per position: anti marks an i^{±1}; cnt2 marks the ones that are i^{-1} = i^3
        total += cnt1.count_ones() + 2 * cnt2.count_ones();
    }
    (total & 3) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    // single-qubit table: (x, z) -> letter index I=0, X=1, Z=2, Y=3
    fn enc(p: char) -> (u64, u64) {
        match p {
            'I' => (0, 0),
            'X' => (1, 0),
            'Z' => (0, 1),
            'Y' => (1, 1),
            _ => unreachable!(),
        }
    }

    #[test]
    fn single_qubit_products_match_table() {
        // (a, b, log_i, product) with a·b = i^log · product
        let table = [
            ('X', 'Y', 1, 'Z'),
            ('Y', 'Z', 1, 'X'),
            ('Z', 'X', 1, 'Y'),
            ('Y', 'X', 3, 'Z'),
            ('Z', 'Y', 3, 'X'),
            ('X', 'Z', 3, 'Y'),
            ('X', 'X', 0, 'I'),
            ('Y', 'Y', 0, 'I'),
            ('Z', 'Z', 0, 'I'),
            ('I', 'Y', 0, 'Y'),
            ('Y', 'I', 0, 'Y'),
        ];
        for (a, b, log, c) in table {
            let (ax, az) = enc(a);
            let (bx, bz) = enc(b);
            let mut x = [ax];
            let mut z = [az];
            let got = mul_log_i(&mut x, &mut z, &[bx], &[bz]);
            assert_eq!(got, log, "{a}{b}");
            assert_eq!((x[0], z[0]), enc(c), "{a}{b}");
        }
    }
}
