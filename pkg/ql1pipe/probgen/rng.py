"""
SplitMix64 generator with uniform and Box-Muller normal streams.

The k-th output of a generator seeded with s is mix(s + k * GAMMA) mod 2^64,
which lets blocks of outputs be produced with vectorized uint64 arithmetic.
"""
import numpy as np

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_GAMMA = np.uint64(GAMMA)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30); _S27 = np.uint64(27); _S31 = np.uint64(31); _S11 = np.uint64(11)
_TWO_M53 = 2.0 ** -53


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


class Rng:
    def __init__(self, seed: int) -> None:
        """
        Deterministic SplitMix64 stream.

        ### Parameters:
        :param seed: Any integer; reduced modulo 2^64.

        ### Methods:
        - public
          - next / next_block: Raw 64-bit outputs.
          - uniform / uniforms: Doubles in [0, 1) from the top 53 bits.
          - normal / normals: Box-Muller cosine branch, sine partner discarded.
          - sample_positions: First k entries of a partial Fisher-Yates shuffle of range(n).
        """
        self.state = int(seed) & MASK

    def next_block(self, count: int) -> np.ndarray:
        if count < 0:
            raise ValueError("count must be nonnegative, got {}.".format(count))

        with np.errstate(over="ignore"):
            steps = np.arange(1, count + 1, dtype=np.uint64)
            out = _mix(np.uint64(self.state) + _GAMMA * steps)

        self.state = (self.state + count * GAMMA) & MASK
        return out

    def next(self) -> int:
        return int(self.next_block(1)[0])

    def uniforms(self, count: int) -> np.ndarray:
        return (self.next_block(count) >> _S11).astype(np.float64) * _TWO_M53

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def normals(self, count: int) -> np.ndarray:
        start = self.state
        u = self.uniforms(2 * count)
        u1 = u[0::2]; u2 = u[1::2]
        if np.all(u1 > 0.0):
            return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

        # a zero u1 shifts the pairing, so replay the stream draw by draw
        self.state = start
        out = np.empty(count)
        for i in range(count):
            a = self.uniforms(1)
            while a[0] == 0.0:
                a = self.uniforms(1)

            c = self.uniforms(1)
            out[i] = (np.sqrt(-2.0 * np.log(a)) * np.cos(2.0 * np.pi * c))[0]

        return out

    def normal(self) -> float:
        return float(self.normals(1)[0])

    def sample_positions(self, n: int, k: int) -> np.ndarray:
        """
        Positions of k distinct indices from range(n), in draw order.
        Draw i swaps index i with i + floor(u (n - i)).
        """
        if not 0 <= k <= n:
            raise ValueError("Cannot sample {} positions from {}.".format(k, n))

        idx = np.arange(n)
        u = self.uniforms(k)
        for i in range(k):
            j = i + min(int(u[i] * (n - i)), n - i - 1)
            idx[i], idx[j] = idx[j], idx[i]

        return idx[:k].copy()
