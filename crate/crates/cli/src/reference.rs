//! Published double-coset counts for p = 2, by size `2^(m+k)`.
//! Trailing zero cells are omitted; the last field is the row total.

pub const TABLE_ONE: &[(usize, &[u64], u64)] = &[
    (1, &[1], 1),
    (2, &[1], 1),
    (3, &[1, 1], 2),
    (4, &[1, 1], 2),
    (5, &[1, 1, 1, 1], 4),
    (6, &[1, 2, 2, 2, 1], 8),
    (7, &[1, 3, 7, 13, 11], 35),
    (8, &[1, 1, 2, 4, 3, 3, 2], 16),
    (9, &[1, 1, 2, 5, 6, 10, 15, 11], 51),
    (10, &[1, 1, 3, 8, 13, 22, 32, 43, 22], 145),
    (11, &[1, 2, 4, 14, 39, 97, 218, 395, 342], 1112),
    (12, &[1, 3, 8, 17, 27, 53, 97, 154, 247, 341, 197], 1145),
    (13, &[1, 3, 9, 23, 53, 150, 399, 965, 2173, 3818, 3335], 10929),
    (14, &[1, 4, 15, 50, 135, 341, 826, 1942, 4399, 8983, 13737, 10967], 41400),
    (
        15,
        &[1, 5, 22, 89, 328, 1202, 4268, 13960, 41210, 104946, 194791, 181963],
        542785,
    ),
    (
        16,
        &[1, 1, 2, 6, 15, 24, 55, 100, 209, 407, 955, 1938, 4755, 8390, 13783, 9743],
        40384,
    ),
    (
        17,
        &[1, 1, 2, 6, 16, 29, 77, 189, 537, 1609, 5223, 15898, 45965, 113336, 208574, 191706],
        583169,
    ),
    (
        18,
        &[
            1, 1, 2, 7, 21, 51, 158, 442, 1240, 3555, 10602, 32233, 95157, 257733, 589685, 974086,
            816834,
        ],
        2781808,
    ),
];

/// Row `n` of [`TABLE_ONE`].
pub fn table_one_row(n: usize) -> Option<(&'static [u64], u64)> {
    TABLE_ONE
        .iter()
        .find(|(r, _, _)| *r == n)
        .map(|&(_, cells, total)| (cells, total))
}
