import random

from hybridtab.syntax import And, At, Box, Dia, Neg, Nom, Or, Prop

PROPS = ("p", "q")
NOMS = ("i", "j")


def random_nnf(rng: random.Random, connectives: int, props=PROPS, noms=NOMS):
    """A random NNF formula with exactly ``connectives`` connectives, where
    a negated atom counts as one."""
    if connectives == 0:
        if rng.random() < 0.35:
            return Nom(rng.choice(noms))
        return Prop(rng.choice(props))
    kind = rng.choice(("and", "or", "dia", "box", "at", "neg", "dia", "box"))
    if kind == "neg":
        atom = random_nnf(rng, 0, props, noms)
        if connectives == 1:
            return Neg(atom)
        kind = "and"
    if kind in ("and", "or"):
        k = rng.randint(0, connectives - 1)
        a = random_nnf(rng, k, props, noms)
        b = random_nnf(rng, connectives - 1 - k, props, noms)
        return And(a, b) if kind == "and" else Or(a, b)
    sub = random_nnf(rng, connectives - 1, props, noms)
    if kind == "dia":
        return Dia(sub)
    if kind == "box":
        return Box(sub)
    return At(rng.choice(noms), sub)


def corpus(seed: int, count: int, max_connectives: int = 12):
    rng = random.Random(seed)
    return [random_nnf(rng, rng.randint(1, max_connectives)) for _ in range(count)]
