"""Regenerates the constant BRIEF test-pair table in ``brief_pattern.py``.

Pairs are drawn from an isotropic Gaussian with sigma = patch / 5, rounded to
integer offsets, clipped to the 31x31 patch; pairs with coincident points are
redrawn.  Run as ``python -m bottleqc.align._pattern_gen`` to print the table.
"""
import numpy as np

PATTERN_SEED = 0x0B0771E5
PATCH_SIZE = 31
N_PAIRS = 256


def generate_pattern(seed: int = PATTERN_SEED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    half = PATCH_SIZE // 2
    sigma = PATCH_SIZE / 5.0
    pairs = []
    while len(pairs) < N_PAIRS:
        p = np.clip(np.rint(rng.normal(0.0, sigma, size=4)), -half, half).astype(int)
        if p[0] == p[2] and p[1] == p[3]:
            continue
        pairs.append(tuple(int(v) for v in p))
    return np.array(pairs, dtype=np.int64)


def render_table(pattern: np.ndarray) -> str:
    rows = ",\n".join("    (%d, %d, %d, %d)" % tuple(r) for r in pattern)
    return "BRIEF_PAIRS = (\n" + rows + ",\n)\n"


if __name__ == "__main__":
    print(render_table(generate_pattern()))
