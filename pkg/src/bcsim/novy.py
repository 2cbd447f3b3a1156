"""Permutation-based bit commitment: honest protocol and its coherent attack.

Honest commit: Alice hides x behind y = pi(x), answers n-1 random
inner-product queries about y, then announces z = a XOR b where a says
which of the two surviving solutions y is. The attacker instead runs the
same steps on superposed registers, measuring only what must be spoken
aloud. The post-commit state has support on exactly two basis labels, so
Alice can later either measure it to unveil a perfectly distributed bit,
or uncompute everything and hand back the input qubit untouched.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from random import Random

from . import gf2
from .engine import Party, Phase, Topology, Transcript, novy_topology
from .gf2 import BitMatrix, BitVector
from .perm import ToyPermutation
from .qsim import MeasurementRecord, SparseState, cached_layout, init_state


@dataclass
class NovyHonestState:
    b: int
    x: BitVector
    y: BitVector
    hashes: BitMatrix
    responses: tuple[int, ...]
    a: int
    z: int
    phase: Phase = Phase.WAIT


@dataclass
class NovyAttackState:
    n: int
    perm: ToyPermutation
    state: SparseState
    z: int
    y0: BitVector
    y1: BitVector
    transcript: Transcript
    topo: Topology
    phase: Phase = Phase.WAIT


@lru_cache(maxsize=8192)
def _parity_fn(h_int: int, n: int):
    """y -> parity of h & y, table-backed for small widths."""
    if n <= 12:
        table = tuple((h_int & y).bit_count() & 1 for y in range(1 << n))
        return table.__getitem__
    return lambda y: (h_int & y).bit_count() & 1


def honest_commit(b: int, n: int, p: ToyPermutation, rng: Random) -> tuple[NovyHonestState, Transcript]:
    if b not in (0, 1):
        raise ValueError(f"committed bit must be 0 or 1, got {b!r}")
    if n < 2:
        raise ValueError("n must be at least 2")
    if p.n != n:
        raise ValueError(f"permutation width {p.n} does not match n={n}")
    topo = novy_topology()
    t = Transcript()

    x = BitVector.from_int(rng.getrandbits(n), n)
    y = p.forward(x)
    hashes = gf2.sample_independent_rows(n - 1, n, rng)
    responses = []
    for i, h in enumerate(hashes.rows, start=1):
        t.announce(topo, Party.BOB, Party.ALICE, Phase.COMMIT, f"h_{i}", h)
        r_i = gf2.dot(h, y)
        responses.append(r_i)
        t.announce(topo, Party.ALICE, Party.BOB, Phase.COMMIT, f"r_{i}", r_i)

    solutions = gf2.solve_affine(hashes, BitVector(tuple(responses)))
    a = solutions.index(y)
    z = a ^ b
    t.announce(topo, Party.ALICE, Party.BOB, Phase.COMMIT, "z", z)

    st = NovyHonestState(b=b, x=x, y=y, hashes=hashes,
                         responses=tuple(responses), a=a, z=z)
    return st, t


def honest_unveil(st: NovyHonestState, t: Transcript) -> None:
    """Alice discloses (b, x)."""
    if st.phase is not Phase.WAIT:
        raise ValueError(f"cannot unveil from phase {st.phase.value}")
    topo = novy_topology()
    t.announce(topo, Party.ALICE, Party.BOB, Phase.UNVEIL, "b", st.b)
    t.announce(topo, Party.ALICE, Party.BOB, Phase.UNVEIL, "x", st.x)
    st.phase = Phase.UNVEIL


def _commit_system(t: Transcript) -> tuple[BitMatrix, BitVector, int]:
    try:
        hs = t.series("h_")
        rs = t.series("r_")
        z = t.value("z")
    except KeyError as exc:
        raise ValueError(f"malformed transcript: {exc}") from exc
    if not hs or len(hs) != len(rs):
        raise ValueError("malformed transcript: hash/response rounds do not line up")
    return BitMatrix.from_rows(hs), BitVector(tuple(rs)), z


def honest_unveil_check(t: Transcript, b: int, x: BitVector, p: ToyPermutation) -> bool:
    """Bob's acceptance test: recompute the two solutions and compare pi(x)."""
    hashes, responses, z = _commit_system(t)
    solutions = gf2.solve_affine(hashes, responses)
    if len(solutions) != 2:
        raise ValueError(f"malformed transcript: {len(solutions)} solutions, expected 2")
    return p.forward(x) == solutions[z ^ b]


def attack_commit(psi: tuple[complex, complex], n: int, p: ToyPermutation,
                  rng: Random) -> tuple[NovyAttackState, Transcript]:
    """Run the commit phase coherently, announcing only measured values."""
    alpha, beta = psi
    if n < 2:
        raise ValueError("n must be at least 2")
    if p.n != n:
        raise ValueError(f"permutation width {p.n} does not match n={n}")
    topo = novy_topology()
    t = Transcript()

    layout = cached_layout((("B", 1), ("X", n), ("Y", n)))
    s = init_state(layout)
    s = s.prepare_qubit("B", alpha, beta)
    s = s.uniform_superpose("X")
    s = s.coherent_eval(p.forward_fn(), ["X"], "Y")

    hashes = gf2.sample_independent_rows(n - 1, n, rng)
    responses = []
    for i, h in enumerate(hashes.rows, start=1):
        t.announce(topo, Party.BOB, Party.ALICE, Phase.COMMIT, f"h_{i}", h)
        s = s.add_register("R", 1)
        s = s.coherent_eval(_parity_fn(h.to_int(), n), ["Y"], "R")
        rec, s = s.measure(["R"], rng)
        r_i = rec.value
        responses.append(r_i)
        t.announce(topo, Party.ALICE, Party.BOB, Phase.COMMIT, f"r_{i}", r_i)
        s = s.xor_constant("R", r_i).discard_zeroed("R")

    # The two surviving preimage/image pairs are now pinned down classically
    # by the announced system; Alice knows (y0, y1) but works on Y, not X.
    y0, y1 = gf2.solve_affine(hashes, BitVector(tuple(responses)))
    y1_int = y1.to_int()
    s = s.add_register("Z", 1)
    s = s.coherent_eval(lambda b, y: b ^ (1 if y == y1_int else 0), ["B", "Y"], "Z")
    rec, s = s.measure(["Z"], rng)
    z = rec.value
    t.announce(topo, Party.ALICE, Party.BOB, Phase.COMMIT, "z", z)
    s = s.xor_constant("Z", z).discard_zeroed("Z")

    st = NovyAttackState(n=n, perm=p, state=s, z=z, y0=y0, y1=y1,
                         transcript=t, topo=topo)
    return st, t


def attack_unveil(st: NovyAttackState, rng: Random) -> tuple[int, BitVector, tuple[MeasurementRecord, ...]]:
    """Measure B then X and disclose them; always passes Bob's check."""
    if st.phase is not Phase.WAIT:
        raise ValueError(f"cannot unveil from phase {st.phase.value}")
    rec_b, s = st.state.measure(["B"], rng)
    rec_x, s = s.measure(["X"], rng)
    st.state = s
    st.phase = Phase.UNVEIL
    b = rec_b.value
    x = BitVector.from_int(rec_x.value, st.n)
    st.transcript.announce(st.topo, Party.ALICE, Party.BOB, Phase.UNVEIL, "b", b)
    st.transcript.announce(st.topo, Party.ALICE, Party.BOB, Phase.UNVEIL, "x", x)
    return b, x, (rec_b, rec_x)


def attack_recover(st: NovyAttackState) -> SparseState:
    """Uncompute X and Y from B and hand back the input qubit.

    Both lookups are keyed on B alone: the solution index is b XOR z, the
    image is read off the announced system, and the preimage needs the
    permutation inverse (Alice never learned x0, x1 directly). An
    equivalent route would erase Y from X via the forward map first and
    then erase X by inverse lookup; the two-lookup form is the default.
    """
    if st.phase is not Phase.WAIT:
        raise ValueError(f"cannot recover from phase {st.phase.value}")
    z = st.z
    ys = (st.y0.to_int(), st.y1.to_int())
    xs = (st.perm.inverse_int(ys[0]), st.perm.inverse_int(ys[1]))
    s = st.state.coherent_eval(lambda b: ys[b ^ z], ["B"], "Y")
    s = s.coherent_eval(lambda b: xs[b ^ z], ["B"], "X")
    s = s.discard_zeroed("X")
    s = s.discard_zeroed("Y")
    st.state = s
    st.phase = Phase.RECOVER
    return s
