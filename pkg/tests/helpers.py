import random
from fractions import Fraction

from evokit.core import EvolutionAlgebra


def random_algebra(rng: random.Random, n: int, upper: bool = False, values=(-2, -1, 0, 1, 2)) -> EvolutionAlgebra:
    rows = [[Fraction(rng.choice(values)) if (not upper or j > i) else 0 for j in range(n)] for i in range(n)]
    return EvolutionAlgebra.from_rows(rows)


# criterion number -> (passed, detail); printed by the terminal summary hook
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
