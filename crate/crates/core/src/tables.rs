//! Fixed data: an explicit (4,3)-HWP(24; 4, 7) on vertex set Z_24.

/// Eleven 2-factors: four C4-factors, then seven C3-factors.
pub const K24_FACTORS: [&[&[usize]]; 11] = [
    &[&[0, 1, 10, 9], &[2, 3, 17, 16], &[4, 5, 19, 18], &[6, 7, 8, 15], &[11, 12, 21, 20], &[13, 14, 23, 22]],
    &[&[0, 2, 4, 6], &[1, 3, 5, 7], &[10, 12, 14, 8], &[16, 18, 20, 22], &[17, 19, 21, 23], &[9, 11, 13, 15]],
    &[&[0, 3, 4, 7], &[1, 2, 5, 6], &[10, 11, 14, 15], &[16, 19, 20, 23], &[17, 18, 21, 22], &[9, 12, 13, 8]],
    &[&[0, 4, 1, 5], &[2, 6, 3, 7], &[11, 15, 12, 8], &[16, 20, 17, 21], &[18, 22, 19, 23], &[9, 13, 10, 14]],
    &[&[0, 8, 16], &[1, 9, 17], &[2, 10, 18], &[3, 11, 19], &[4, 12, 20], &[5, 13, 21], &[6, 14, 22], &[7, 15, 23]],
    &[&[0, 13, 19], &[1, 14, 20], &[2, 15, 21], &[3, 8, 22], &[4, 9, 23], &[5, 10, 16], &[6, 11, 17], &[7, 12, 18]],
    &[&[0, 14, 18], &[1, 15, 19], &[2, 8, 20], &[3, 9, 21], &[4, 10, 22], &[5, 11, 23], &[6, 12, 16], &[7, 13, 17]],
    &[&[0, 15, 20], &[1, 8, 21], &[2, 9, 22], &[3, 10, 23], &[4, 11, 16], &[5, 12, 17], &[6, 13, 18], &[7, 14, 19]],
    &[&[0, 12, 23], &[1, 13, 16], &[2, 14, 17], &[3, 15, 18], &[4, 8, 19], &[5, 9, 20], &[6, 10, 21], &[7, 11, 22]],
    &[&[0, 11, 21], &[1, 12, 22], &[2, 13, 23], &[3, 14, 16], &[4, 15, 17], &[5, 8, 18], &[6, 9, 19], &[7, 10, 20]],
    &[&[0, 10, 17], &[1, 11, 18], &[2, 12, 19], &[3, 13, 20], &[4, 14, 21], &[5, 15, 22], &[6, 8, 23], &[7, 9, 16]],
];

/// The perfect matching left over by [`K24_FACTORS`].
pub const K24_MATCHING: [[usize; 2]; 12] = [
    [0, 22], [1, 23], [2, 11], [3, 12], [4, 13], [5, 14],
    [6, 20], [7, 21], [8, 17], [9, 18], [10, 19], [15, 16],
];
