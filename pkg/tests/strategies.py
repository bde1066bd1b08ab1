from hypothesis import strategies as st

from hybridtab.semantics import KripkeModel
from hybridtab.syntax import And, At, Box, Dia, Neg, Nom, Or, Prop

PROPS = ("p", "q")
NOMS = ("i", "j")

atoms = st.one_of(st.sampled_from(PROPS).map(Prop), st.sampled_from(NOMS).map(Nom))


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(children, children).map(lambda t: And(*t)),
        st.tuples(children, children).map(lambda t: Or(*t)),
        children.map(Dia),
        children.map(Box),
        st.tuples(st.sampled_from(NOMS), children).map(lambda t: At(*t)),
    )


formulas = st.recursive(atoms, _extend, max_leaves=8)


@st.composite
def models(draw, max_worlds: int = 3):
    n = draw(st.integers(1, max_worlds))
    worlds = tuple(range(n))
    pairs = [(a, b) for a in worlds for b in worlds]
    rel = frozenset(draw(st.sets(st.sampled_from(pairs))))
    props = {p: frozenset(draw(st.sets(st.sampled_from(worlds)))) for p in PROPS}
    noms = {i: draw(st.sampled_from(worlds)) for i in NOMS}
    return KripkeModel(worlds, rel, props, noms)
