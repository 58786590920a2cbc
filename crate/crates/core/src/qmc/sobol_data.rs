//! Primitive polynomials and initial direction numbers for the Sobol'
//! generator, dimensions 2..=128.
//!
//! Data: S. Joe and F. Y. Kuo, "Constructing Sobol sequences with better
//! two-dimensional projections", SIAM J. Sci. Comput. 30 (2008), the
//! `new-joe-kuo-6.21201` table from <https://web.maths.unsw.edu.au/~fkuo/sobol/>.
//! Dimension 1 (van der Corput, base 2) needs no table entry.

/// Per-dimension entry: primitive-polynomial degree `s`, interior
/// coefficient bits `a` (excluding the leading and trailing 1), and the
/// odd initial values `m_1..m_s`.
pub(crate) struct JoeKuoEntry {
    pub degree: u32,
    pub a: u32,
    pub m: &'static [u32],
}

/// Entries for dimensions 2..=128, in order.
pub(crate) const JOE_KUO: &[JoeKuoEntry] = &[
    JoeKuoEntry { degree: 1, a: 0, m: &[1] }, // dim 2
    JoeKuoEntry { degree: 2, a: 1, m: &[1, 3] }, // dim 3
    JoeKuoEntry { degree: 3, a: 1, m: &[1, 3, 1] }, // dim 4
    JoeKuoEntry { degree: 3, a: 2, m: &[1, 1, 1] }, // dim 5
    JoeKuoEntry { degree: 4, a: 1, m: &[1, 1, 3, 3] }, // dim 6
    JoeKuoEntry { degree: 4, a: 4, m: &[1, 3, 5, 13] }, // dim 7
    JoeKuoEntry { degree: 5, a: 2, m: &[1, 1, 5, 5, 17] }, // dim 8
    JoeKuoEntry { degree: 5, a: 4, m: &[1, 1, 5, 5, 5] }, // dim 9
    JoeKuoEntry { degree: 5, a: 7, m: &[1, 1, 7, 11, 19] }, // dim 10
    JoeKuoEntry { degree: 5, a: 11, m: &[1, 1, 5, 1, 1] }, // dim 11
    JoeKuoEntry { degree: 5, a: 13, m: &[1, 1, 1, 3, 11] }, // dim 12
    JoeKuoEntry { degree: 5, a: 14, m: &[1, 3, 5, 5, 31] }, // dim 13
    JoeKuoEntry { degree: 6, a: 1, m: &[1, 3, 3, 9, 7, 49] }, // dim 14
    JoeKuoEntry { degree: 6, a: 13, m: &[1, 1, 1, 15, 21, 21] }, // dim 15
    JoeKuoEntry { degree: 6, a: 16, m: &[1, 3, 1, 13, 27, 49] }, // dim 16
    JoeKuoEntry { degree: 6, a: 19, m: &[1, 1, 1, 15, 7, 5] }, // dim 17
    JoeKuoEntry { degree: 6, a: 22, m: &[1, 3, 1, 15, 13, 25] }, // dim 18
    JoeKuoEntry { degree: 6, a: 25, m: &[1, 1, 5, 5, 19, 61] }, // dim 19
    JoeKuoEntry { degree: 7, a: 1, m: &[1, 3, 7, 11, 23, 15, 103] }, // dim 20
    JoeKuoEntry { degree: 7, a: 4, m: &[1, 3, 7, 13, 13, 15, 69] }, // dim 21
    JoeKuoEntry { degree: 7, a: 7, m: &[1, 1, 3, 13, 7, 35, 63] }, // dim 22
    JoeKuoEntry { degree: 7, a: 8, m: &[1, 3, 5, 9, 1, 25, 53] }, // dim 23
    JoeKuoEntry { degree: 7, a: 14, m: &[1, 3, 1, 13, 9, 35, 107] }, // dim 24
    JoeKuoEntry { degree: 7, a: 19, m: &[1, 3, 1, 5, 27, 61, 31] }, // dim 25
    JoeKuoEntry { degree: 7, a: 21, m: &[1, 1, 5, 11, 19, 41, 61] }, // dim 26
    JoeKuoEntry { degree: 7, a: 28, m: &[1, 3, 5, 3, 3, 13, 69] }, // dim 27
    JoeKuoEntry { degree: 7, a: 31, m: &[1, 1, 7, 13, 1, 19, 1] }, // dim 28
    JoeKuoEntry { degree: 7, a: 32, m: &[1, 3, 7, 5, 13, 19, 59] }, // dim 29
    JoeKuoEntry { degree: 7, a: 37, m: &[1, 1, 3, 9, 25, 29, 41] }, // dim 30
    JoeKuoEntry { degree: 7, a: 41, m: &[1, 3, 5, 13, 23, 1, 55] }, // dim 31
    JoeKuoEntry { degree: 7, a: 42, m: &[1, 3, 7, 3, 13, 59, 17] }, // dim 32
    JoeKuoEntry { degree: 7, a: 50, m: &[1, 3, 1, 3, 5, 53, 69] }, // dim 33
    JoeKuoEntry { degree: 7, a: 55, m: &[1, 1, 5, 5, 23, 33, 13] }, // dim 34
    JoeKuoEntry { degree: 7, a: 56, m: &[1, 1, 7, 7, 1, 61, 123] }, // dim 35
    JoeKuoEntry { degree: 7, a: 59, m: &[1, 1, 7, 9, 13, 61, 49] }, // dim 36
    JoeKuoEntry { degree: 7, a: 62, m: &[1, 3, 3, 5, 3, 55, 33] }, // dim 37
    JoeKuoEntry { degree: 8, a: 14, m: &[1, 3, 1, 15, 31, 13, 49, 245] }, // dim 38
    JoeKuoEntry { degree: 8, a: 21, m: &[1, 3, 5, 15, 31, 59, 63, 97] }, // dim 39
    JoeKuoEntry { degree: 8, a: 22, m: &[1, 3, 1, 11, 11, 11, 77, 249] }, // dim 40
    JoeKuoEntry { degree: 8, a: 38, m: &[1, 3, 1, 11, 27, 43, 71, 9] }, // dim 41
    JoeKuoEntry { degree: 8, a: 47, m: &[1, 1, 7, 15, 21, 11, 81, 45] }, // dim 42
    JoeKuoEntry { degree: 8, a: 49, m: &[1, 3, 7, 3, 25, 31, 65, 79] }, // dim 43
    JoeKuoEntry { degree: 8, a: 50, m: &[1, 3, 1, 1, 19, 11, 3, 205] }, // dim 44
    JoeKuoEntry { degree: 8, a: 52, m: &[1, 1, 5, 9, 19, 21, 29, 157] }, // dim 45
    JoeKuoEntry { degree: 8, a: 56, m: &[1, 3, 7, 11, 1, 33, 89, 185] }, // dim 46
    JoeKuoEntry { degree: 8, a: 67, m: &[1, 3, 3, 3, 15, 9, 79, 71] }, // dim 47
    JoeKuoEntry { degree: 8, a: 70, m: &[1, 3, 7, 11, 15, 39, 119, 27] }, // dim 48
    JoeKuoEntry { degree: 8, a: 84, m: &[1, 1, 3, 1, 11, 31, 97, 225] }, // dim 49
    JoeKuoEntry { degree: 8, a: 97, m: &[1, 1, 1, 3, 23, 43, 57, 177] }, // dim 50
    JoeKuoEntry { degree: 8, a: 103, m: &[1, 3, 7, 7, 17, 17, 37, 71] }, // dim 51
    JoeKuoEntry { degree: 8, a: 115, m: &[1, 3, 1, 5, 27, 63, 123, 213] }, // dim 52
    JoeKuoEntry { degree: 8, a: 122, m: &[1, 1, 3, 5, 11, 43, 53, 133] }, // dim 53
    JoeKuoEntry { degree: 9, a: 8, m: &[1, 3, 5, 5, 29, 17, 47, 173, 479] }, // dim 54
    JoeKuoEntry { degree: 9, a: 13, m: &[1, 3, 3, 11, 3, 1, 109, 9, 69] }, // dim 55
    JoeKuoEntry { degree: 9, a: 16, m: &[1, 1, 1, 5, 17, 39, 23, 5, 343] }, // dim 56
    JoeKuoEntry { degree: 9, a: 22, m: &[1, 3, 1, 5, 25, 15, 31, 103, 499] }, // dim 57
    JoeKuoEntry { degree: 9, a: 25, m: &[1, 1, 1, 11, 11, 17, 63, 105, 183] }, // dim 58
    JoeKuoEntry { degree: 9, a: 44, m: &[1, 1, 5, 11, 9, 29, 97, 231, 363] }, // dim 59
    JoeKuoEntry { degree: 9, a: 47, m: &[1, 1, 5, 15, 19, 45, 41, 7, 383] }, // dim 60
    JoeKuoEntry { degree: 9, a: 52, m: &[1, 3, 7, 7, 31, 19, 83, 137, 221] }, // dim 61
    JoeKuoEntry { degree: 9, a: 55, m: &[1, 1, 1, 3, 23, 15, 111, 223, 83] }, // dim 62
    JoeKuoEntry { degree: 9, a: 59, m: &[1, 1, 5, 13, 31, 15, 55, 25, 161] }, // dim 63
    JoeKuoEntry { degree: 9, a: 62, m: &[1, 1, 3, 13, 25, 47, 39, 87, 257] }, // dim 64
    JoeKuoEntry { degree: 9, a: 67, m: &[1, 1, 1, 11, 21, 53, 125, 249, 293] }, // dim 65
    JoeKuoEntry { degree: 9, a: 74, m: &[1, 1, 7, 11, 11, 7, 57, 79, 323] }, // dim 66
    JoeKuoEntry { degree: 9, a: 81, m: &[1, 1, 5, 5, 17, 13, 81, 3, 131] }, // dim 67
    JoeKuoEntry { degree: 9, a: 82, m: &[1, 1, 7, 13, 23, 7, 65, 251, 475] }, // dim 68
    JoeKuoEntry { degree: 9, a: 87, m: &[1, 3, 5, 1, 9, 43, 3, 149, 11] }, // dim 69
    JoeKuoEntry { degree: 9, a: 91, m: &[1, 1, 3, 13, 31, 13, 13, 255, 487] }, // dim 70
    JoeKuoEntry { degree: 9, a: 94, m: &[1, 3, 3, 1, 5, 63, 89, 91, 127] }, // dim 71
    JoeKuoEntry { degree: 9, a: 103, m: &[1, 1, 3, 3, 1, 19, 123, 127, 237] }, // dim 72
    JoeKuoEntry { degree: 9, a: 104, m: &[1, 1, 5, 7, 23, 31, 37, 243, 289] }, // dim 73
    JoeKuoEntry { degree: 9, a: 109, m: &[1, 1, 5, 11, 17, 53, 117, 183, 491] }, // dim 74
    JoeKuoEntry { degree: 9, a: 122, m: &[1, 1, 1, 5, 1, 13, 13, 209, 345] }, // dim 75
    JoeKuoEntry { degree: 9, a: 124, m: &[1, 1, 3, 15, 1, 57, 115, 7, 33] }, // dim 76
    JoeKuoEntry { degree: 9, a: 137, m: &[1, 3, 1, 11, 7, 43, 81, 207, 175] }, // dim 77
    JoeKuoEntry { degree: 9, a: 138, m: &[1, 3, 1, 1, 15, 27, 63, 255, 49] }, // dim 78
    JoeKuoEntry { degree: 9, a: 143, m: &[1, 3, 5, 3, 27, 61, 105, 171, 305] }, // dim 79
    JoeKuoEntry { degree: 9, a: 145, m: &[1, 1, 5, 3, 1, 3, 57, 249, 149] }, // dim 80
    JoeKuoEntry { degree: 9, a: 152, m: &[1, 1, 3, 5, 5, 57, 15, 13, 159] }, // dim 81
    JoeKuoEntry { degree: 9, a: 157, m: &[1, 1, 1, 11, 7, 11, 105, 141, 225] }, // dim 82
    JoeKuoEntry { degree: 9, a: 167, m: &[1, 3, 3, 5, 27, 59, 121, 101, 271] }, // dim 83
    JoeKuoEntry { degree: 9, a: 173, m: &[1, 3, 5, 9, 11, 49, 51, 59, 115] }, // dim 84
    JoeKuoEntry { degree: 9, a: 176, m: &[1, 1, 7, 1, 23, 45, 125, 71, 419] }, // dim 85
    JoeKuoEntry { degree: 9, a: 181, m: &[1, 1, 3, 5, 23, 5, 105, 109, 75] }, // dim 86
    JoeKuoEntry { degree: 9, a: 182, m: &[1, 1, 7, 15, 7, 11, 67, 121, 453] }, // dim 87
    JoeKuoEntry { degree: 9, a: 185, m: &[1, 3, 7, 3, 9, 13, 31, 27, 449] }, // dim 88
    JoeKuoEntry { degree: 9, a: 191, m: &[1, 3, 1, 15, 19, 39, 39, 89, 15] }, // dim 89
    JoeKuoEntry { degree: 9, a: 194, m: &[1, 1, 1, 1, 1, 33, 73, 145, 379] }, // dim 90
    JoeKuoEntry { degree: 9, a: 199, m: &[1, 3, 1, 15, 15, 43, 29, 13, 483] }, // dim 91
    JoeKuoEntry { degree: 9, a: 218, m: &[1, 1, 7, 3, 19, 27, 85, 131, 431] }, // dim 92
    JoeKuoEntry { degree: 9, a: 220, m: &[1, 3, 3, 3, 5, 35, 23, 195, 349] }, // dim 93
    JoeKuoEntry { degree: 9, a: 227, m: &[1, 3, 3, 7, 9, 27, 39, 59, 297] }, // dim 94
    JoeKuoEntry { degree: 9, a: 229, m: &[1, 1, 3, 9, 11, 17, 13, 241, 157] }, // dim 95
    JoeKuoEntry { degree: 9, a: 230, m: &[1, 3, 7, 15, 25, 57, 33, 189, 213] }, // dim 96
    JoeKuoEntry { degree: 9, a: 234, m: &[1, 1, 7, 1, 9, 55, 73, 83, 217] }, // dim 97
    JoeKuoEntry { degree: 9, a: 236, m: &[1, 3, 3, 13, 19, 27, 23, 113, 249] }, // dim 98
    JoeKuoEntry { degree: 9, a: 241, m: &[1, 3, 5, 3, 23, 43, 3, 253, 479] }, // dim 99
    JoeKuoEntry { degree: 9, a: 244, m: &[1, 1, 5, 5, 11, 5, 45, 117, 217] }, // dim 100
    JoeKuoEntry { degree: 9, a: 253, m: &[1, 3, 3, 7, 29, 37, 33, 123, 147] }, // dim 101
    JoeKuoEntry { degree: 10, a: 4, m: &[1, 3, 1, 15, 5, 5, 37, 227, 223, 459] }, // dim 102
    JoeKuoEntry { degree: 10, a: 13, m: &[1, 1, 7, 5, 5, 39, 63, 255, 135, 487] }, // dim 103
    JoeKuoEntry { degree: 10, a: 19, m: &[1, 3, 1, 7, 9, 7, 87, 249, 217, 599] }, // dim 104
    JoeKuoEntry { degree: 10, a: 22, m: &[1, 1, 3, 13, 9, 47, 7, 225, 363, 247] }, // dim 105
    JoeKuoEntry { degree: 10, a: 50, m: &[1, 3, 7, 13, 19, 13, 9, 67, 9, 737] }, // dim 106
    JoeKuoEntry { degree: 10, a: 55, m: &[1, 3, 5, 5, 19, 59, 7, 41, 319, 677] }, // dim 107
    JoeKuoEntry { degree: 10, a: 64, m: &[1, 1, 5, 3, 31, 63, 15, 43, 207, 789] }, // dim 108
    JoeKuoEntry { degree: 10, a: 69, m: &[1, 1, 7, 9, 13, 39, 3, 47, 497, 169] }, // dim 109
    JoeKuoEntry { degree: 10, a: 98, m: &[1, 3, 1, 7, 21, 17, 97, 19, 415, 905] }, // dim 110
    JoeKuoEntry { degree: 10, a: 107, m: &[1, 3, 7, 1, 3, 31, 71, 111, 165, 127] }, // dim 111
    JoeKuoEntry { degree: 10, a: 115, m: &[1, 1, 5, 11, 1, 61, 83, 119, 203, 847] }, // dim 112
    JoeKuoEntry { degree: 10, a: 121, m: &[1, 3, 3, 13, 9, 61, 19, 97, 47, 35] }, // dim 113
    JoeKuoEntry { degree: 10, a: 127, m: &[1, 1, 7, 7, 15, 29, 63, 95, 417, 469] }, // dim 114
    JoeKuoEntry { degree: 10, a: 134, m: &[1, 3, 1, 9, 25, 9, 71, 57, 213, 385] }, // dim 115
    JoeKuoEntry { degree: 10, a: 140, m: &[1, 3, 5, 13, 31, 47, 101, 57, 39, 341] }, // dim 116
    JoeKuoEntry { degree: 10, a: 145, m: &[1, 1, 3, 3, 31, 57, 125, 173, 365, 551] }, // dim 117
    JoeKuoEntry { degree: 10, a: 152, m: &[1, 3, 7, 1, 13, 57, 67, 157, 451, 707] }, // dim 118
    JoeKuoEntry { degree: 10, a: 158, m: &[1, 1, 1, 7, 21, 13, 105, 89, 429, 965] }, // dim 119
    JoeKuoEntry { degree: 10, a: 161, m: &[1, 1, 5, 9, 17, 51, 45, 119, 157, 141] }, // dim 120
    JoeKuoEntry { degree: 10, a: 171, m: &[1, 3, 7, 7, 13, 45, 91, 9, 129, 741] }, // dim 121
    JoeKuoEntry { degree: 10, a: 181, m: &[1, 3, 7, 1, 23, 57, 67, 141, 151, 571] }, // dim 122
    JoeKuoEntry { degree: 10, a: 194, m: &[1, 1, 3, 11, 17, 47, 93, 107, 375, 157] }, // dim 123
    JoeKuoEntry { degree: 10, a: 199, m: &[1, 3, 3, 5, 11, 21, 43, 51, 169, 915] }, // dim 124
    JoeKuoEntry { degree: 10, a: 203, m: &[1, 1, 5, 3, 15, 55, 101, 67, 455, 625] }, // dim 125
    JoeKuoEntry { degree: 10, a: 208, m: &[1, 3, 5, 9, 1, 23, 29, 47, 345, 595] }, // dim 126
    JoeKuoEntry { degree: 10, a: 227, m: &[1, 3, 7, 7, 5, 49, 29, 155, 323, 589] }, // dim 127
    JoeKuoEntry { degree: 10, a: 242, m: &[1, 3, 3, 7, 5, 41, 127, 61, 261, 717] }, // dim 128
];
