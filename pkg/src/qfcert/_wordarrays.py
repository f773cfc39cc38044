"""Vectorized word enumeration and matrix batch evaluation.

Words are stored as int8 arrays of letter ranks.  Rank order is the
shortlex generator order (positive letters then inverses), so arrays
built by in-order extension are shortlex-sorted within each length.
Genus-2 throughout (8 ranks); lengths up to 8 pack into base-8 integers
for rotation-minimum tests.
"""

from __future__ import annotations

import numpy as np

RANK_COUNT = 8
# rank r <-> letter: 0..3 -> 1..4, 4..7 -> -1..-4
RANK_TO_LETTER = np.array([1, 2, 3, 4, -1, -2, -3, -4], dtype=np.int8)
INVERSE_RANK = np.array([4, 5, 6, 7, 0, 1, 2, 3], dtype=np.int8)


def letters_to_ranks(letters: tuple[int, ...]) -> np.ndarray:
    out = np.empty(len(letters), dtype=np.int8)
    for i, x in enumerate(letters):
        out[i] = (x - 1) if x > 0 else (3 - x)
    return out


def ranks_to_letters(ranks: np.ndarray) -> tuple[int, ...]:
    return tuple(int(RANK_TO_LETTER[r]) for r in ranks)


def reduced_word_levels(maxlen: int) -> list[np.ndarray]:
    """Freely reduced words as rank arrays, one (n, L) array per length L.

    Each level is in shortlex order.  Level L is built by appending every
    non-cancelling rank to each level-(L-1) word in rank order.
    """
    levels: list[np.ndarray] = []
    current = np.arange(RANK_COUNT, dtype=np.int8).reshape(-1, 1)
    levels.append(current)
    for _ in range(2, maxlen + 1):
        n = current.shape[0]
        last = current[:, -1]
        # candidate extensions: all ranks except the inverse of the last letter
        ext = np.broadcast_to(np.arange(RANK_COUNT, dtype=np.int8), (n, RANK_COUNT))
        keep = ext != INVERSE_RANK[last][:, None]
        parent_idx, rank_new = np.nonzero(keep)
        new = np.empty((parent_idx.size, current.shape[1] + 1), dtype=np.int8)
        new[:, :-1] = current[parent_idx]
        new[:, -1] = rank_new
        levels.append(new)
        current = new
    return levels


def pack_base8(words: np.ndarray) -> np.ndarray:
    """Pack rank rows into integers; lexicographic order is preserved."""
    n, L = words.shape
    out = np.zeros(n, dtype=np.int64)
    for j in range(L):
        out = out * 8 + words[:, j].astype(np.int64)
    return out


def conjugacy_class_mask(words: np.ndarray) -> np.ndarray:
    """True for rows that are cyclically reduced and minimal among rotations."""
    n, L = words.shape
    mask = words[:, 0] != INVERSE_RANK[words[:, -1]]
    if L == 1:
        return mask
    own = pack_base8(words)
    best = own.copy()
    for shift in range(1, L):
        rot = np.concatenate([words[:, shift:], words[:, :shift]], axis=1)
        np.minimum(best, pack_base8(rot), out=best)
    return mask & (own == best)


def compose_matrices(words: np.ndarray, gen_mats: np.ndarray,
                     chunk: int = 1 << 18) -> np.ndarray:
    """Product matrices for rank rows; gen_mats is (8, 2, 2) complex."""
    n, L = words.shape
    out = np.empty((n, 2, 2), dtype=complex)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        m = gen_mats[words[lo:hi, 0]]
        for j in range(1, L):
            m = np.einsum("nij,njk->nik", m, gen_mats[words[lo:hi, j]])
        out[lo:hi] = m
    return out


def traces(mats: np.ndarray) -> np.ndarray:
    return mats[..., 0, 0] + mats[..., 1, 1]


def translation_lengths(mats: np.ndarray) -> np.ndarray:
    """Vectorized trace-based translation length (0 for non-translation types)."""
    tr = traces(mats)
    half = tr.astype(complex) / 2.0
    u = np.arccosh(half)
    ell = 2.0 * np.abs(u.real)
    # real trace with |tr| <= 2: elliptic/parabolic/identity -> 0
    real_tr = np.abs(tr.imag) <= 1e-9
    ell[real_tr & (np.abs(tr.real) <= 2.0 + 1e-9)] = 0.0
    return ell


def attracting_fixed_pairs(mats: np.ndarray) -> np.ndarray:
    """Projective pairs (w1, w2), unit norm, of the attracting fixed points.

    Caller must ensure the maps are translation types (distinct-modulus
    eigenvalues); ties are resolved arbitrarily.
    """
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 0]
    d = mats[..., 1, 1]
    tr = a + d
    sq = np.sqrt(tr * tr - 4.0 + 0j)
    kp = (tr + sq) / 2.0
    km = (tr - sq) / 2.0
    kappa = np.where(np.abs(kp) >= np.abs(km), kp, km)
    v1 = np.stack([b, kappa - a], axis=-1)
    v2 = np.stack([kappa - d, c], axis=-1)
    n1 = np.abs(v1[..., 0]) ** 2 + np.abs(v1[..., 1]) ** 2
    n2 = np.abs(v2[..., 0]) ** 2 + np.abs(v2[..., 1]) ** 2
    v = np.where((n1 >= n2)[..., None], v1, v2)
    norm = np.sqrt(np.abs(v[..., 0]) ** 2 + np.abs(v[..., 1]) ** 2)
    return v / norm[..., None]


def repelling_fixed_pairs(mats: np.ndarray) -> np.ndarray:
    inv = np.empty_like(mats)
    inv[..., 0, 0] = mats[..., 1, 1]
    inv[..., 0, 1] = -mats[..., 0, 1]
    inv[..., 1, 0] = -mats[..., 1, 0]
    inv[..., 1, 1] = mats[..., 0, 0]
    return attracting_fixed_pairs(inv)


def disk_angles_turns(pairs: np.ndarray) -> np.ndarray:
    """Boundary-circle positions of real projective pairs, in turns [0, 1).

    The upper-half-plane boundary point (w1 : w2) maps into the disk via
    z -> (z - i)/(z + i); the angle is the argument of the image.
    """
    w1 = pairs[..., 0]
    w2 = pairs[..., 1]
    u = w1 - 1j * w2
    v = w1 + 1j * w2
    ang = np.angle(u * np.conj(v)) / (2.0 * np.pi)
    return np.mod(ang, 1.0)


def canonical_sign(mats: np.ndarray) -> np.ndarray:
    """Flip each matrix's sign so the first significant entry of
    (a, b, c, d) has positive real part (or positive imaginary part when
    the real part vanishes)."""
    flat = mats.reshape(mats.shape[0], 4)
    absf = np.abs(flat)
    signif = absf > 1e-9
    # force a pick even for near-zero rows
    signif[:, 3] |= ~signif.any(axis=1)
    first = np.argmax(signif, axis=1)
    lead = flat[np.arange(flat.shape[0]), first]
    use_imag = np.abs(lead.real) <= 1e-12 * np.abs(lead)
    key = np.where(use_imag, lead.imag, lead.real)
    sign = np.where(key < 0.0, -1.0, 1.0)
    return mats * sign[:, None, None]


def quantize_keys(mats: np.ndarray, decimals: int = 6) -> np.ndarray:
    """Integer fingerprint rows for element dedup after canonical_sign."""
    flat = mats.reshape(mats.shape[0], 4)
    parts = np.stack([flat.real, flat.imag], axis=-1).reshape(mats.shape[0], 8)
    return np.round(parts * (10.0 ** decimals)).astype(np.int64)


def rows_as_void(rows: np.ndarray) -> np.ndarray:
    """View integer key rows as scalars comparable by memcmp (for sorting,
    searchsorted-based membership, and uniqueness)."""
    rows = np.ascontiguousarray(rows)
    return rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()


def member_of_sorted(values: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Boolean mask: which values occur in the sorted array `table`."""
    if table.size == 0:
        return np.zeros(values.shape[0], dtype=bool)
    pos = np.searchsorted(table, values)
    inside = pos < table.size
    out = np.zeros(values.shape[0], dtype=bool)
    out[inside] = table[pos[inside]] == values[inside]
    return out
