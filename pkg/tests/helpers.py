import random
from fractions import Fraction

from neighbortrace.weyl import element_from_word, root_system


def random_word(kind: str, rng: random.Random, length: int = 40) -> tuple[int, ...]:
    rank = root_system(kind).rank
    return tuple(rng.randrange(1, rank + 1) for _ in range(length))


def random_weyl_elements(kind: str, count: int, seed: int, even: bool = False):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        word = random_word(kind, rng, rng.randrange(10, 60))
        if even and len(word) % 2:
            word = word + (1,)
        out.append(element_from_word(kind, word))
    return out


def random_unimodular(n: int, rng: random.Random, steps: int = 30) -> list[list[int]]:
    """A product of elementary integer row operations and one permutation."""
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-2, -1, 1, 2))
        m[i] = [a + c * b for a, b in zip(m[i], m[j])]
    rng.shuffle(m)
    return m


def as_fractions(v):
    return tuple(Fraction(x) for x in v)


def _sigma(m: int, power: int) -> int:
    return sum(d**power for d in range(1, m + 1) if m % d == 0)


def _eisenstein_series(k: int, length: int) -> list[int]:
    const = {4: 240, 6: -504}[k]
    return [1] + [const * _sigma(m, k - 1) for m in range(1, length)]


def _mul(a, b, length):
    return [sum(a[i] * b[m - i] for i in range(m + 1)) for m in range(length)]


def cusp_coefficient_oracle(k: int, index: int) -> int:
    """q^index coefficient of the normalized level-one cusp form of weight k, via (E4^3 - E6^2)/1728."""
    length = index + 1
    e4, e6 = _eisenstein_series(4, length), _eisenstein_series(6, length)
    cube = _mul(_mul(e4, e4, length), e4, length)
    square = _mul(e6, e6, length)
    delta = [(a - b) // 1728 for a, b in zip(cube, square)]
    extra = {12: [], 16: [4], 18: [6], 20: [4, 4], 22: [4, 6], 26: [4, 4, 6]}[k]
    for e in extra:
        delta = _mul(delta, _eisenstein_series(e, length), length)
    return delta[index]
