//! Amplitude update kernels. Qubit `q` is bit `q` of the basis-state index.

use num_complex::Complex64 as C64;

pub(crate) fn apply_1q(state: &mut [C64], q: usize, m: &[C64; 4]) {
    let bit = 1usize << q;
    let len = state.len();
    let mut base = 0;
    while base < len {
        for i in base..base + bit {
            let j = i | bit;
            let a = state[i];
            let b = state[j];
            state[i] = m[0] * a + m[1] * b;
            state[j] = m[2] * a + m[3] * b;
        }
        base += bit << 1;
    }
}

/// `first` is the most significant bit of the local 4x4 index.
pub(crate) fn apply_2q(state: &mut [C64], first: usize, second: usize, m: &[C64; 16]) {
    let bf = 1usize << first;
    let bs = 1usize << second;
    let mask = bf | bs;
    for i in 0..state.len() {
        if i & mask != 0 {
            continue;
        }
        let idx = [i, i | bs, i | bf, i | bf | bs];
        let v = [state[idx[0]], state[idx[1]], state[idx[2]], state[idx[3]]];
        for (r, &target) in idx.iter().enumerate() {
            let row = &m[4 * r..4 * r + 4];
            state[target] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

/// Pauli X/Y/Z on one qubit, used for noise insertion (`p` in 1..=3).
pub(crate) fn apply_pauli(state: &mut [C64], q: usize, p: u8) {
    let bit = 1usize << q;
    let i_unit = C64::new(0.0, 1.0);
    for i in 0..state.len() {
        if i & bit != 0 {
            continue;
        }
        let j = i | bit;
        match p {
            1 => state.swap(i, j),
            2 => {
                let (a, b) = (state[i], state[j]);
                state[i] = -i_unit * b;
                state[j] = i_unit * a;
            }
            3 => state[j] = -state[j],
            _ => {}
        }
    }
}
