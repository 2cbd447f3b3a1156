"""Two-prover bit commitment: honest protocol and its entangled attack.

Honestly, Alice and Alyson agree on a random string r before being
separated; committing to b means sending z = r XOR m_b for Bob's
announced masks m_0 = 0^n, m_1. The attack replaces the shared string by
n correlated register pairs, evaluates z coherently, and measures only
z. Both provers can then unveil consistent values without talking, or,
once allowed back together, uncompute their registers and return the
input qubit.
"""
from __future__ import annotations

from dataclasses import dataclass
from random import Random

from .engine import Party, Phase, SeparationBreachError, Topology, Transcript, two_prover_topology
from .gf2 import BitVector
from .qsim import MeasurementRecord, SparseState, cached_layout, init_state


@dataclass
class TwoProverHonestState:
    n: int
    r: BitVector
    r_prime: BitVector
    transcript: Transcript
    topo: Topology
    m0: BitVector | None = None
    m1: BitVector | None = None
    b: int | None = None
    z: BitVector | None = None
    phase: Phase = Phase.COMMIT


@dataclass
class TwoProverAttackState:
    n: int
    state: SparseState
    transcript: Transcript
    topo: Topology
    m0: BitVector | None = None
    m1: BitVector | None = None
    z: BitVector | None = None
    phase: Phase = Phase.COMMIT


def _sample_mask(n: int, rng: Random, allow_zero: bool) -> BitVector:
    # m1 = 0^n makes both unveilings verify identically, so it is excluded
    # by default; pass allow_zero for the unrestricted variant.
    while True:
        v = rng.getrandbits(n)
        if v or allow_zero:
            return BitVector.from_int(v, n)


def honest_init(n: int, rng: Random) -> TwoProverHonestState:
    """Alice draws r and shares it with Alyson, then the pair is split."""
    if n < 1:
        raise ValueError("n must be at least 1")
    topo = two_prover_topology()
    t = Transcript()
    r = BitVector.from_int(rng.getrandbits(n), n)
    t.announce(topo, Party.ALICE, Party.ALYSON, Phase.INIT, "r_prime", r)
    return TwoProverHonestState(n=n, r=r, r_prime=r, transcript=t, topo=topo)


def honest_commit(st: TwoProverHonestState, b: int, rng: Random, *,
                  allow_zero_m1: bool = False) -> Transcript:
    if b not in (0, 1):
        raise ValueError(f"committed bit must be 0 or 1, got {b!r}")
    if st.phase is not Phase.COMMIT:
        raise ValueError(f"cannot commit from phase {st.phase.value}")
    t, topo, n = st.transcript, st.topo, st.n
    m0 = BitVector.zeros(n)
    m1 = _sample_mask(n, rng, allow_zero_m1)
    t.announce(topo, Party.BOB, Party.ALICE, Phase.COMMIT, "m_0", m0)
    t.announce(topo, Party.BOB, Party.ALICE, Phase.COMMIT, "m_1", m1)
    z = st.r ^ (m1 if b else m0)
    t.announce(topo, Party.ALICE, Party.BOB, Phase.COMMIT, "z", z)
    st.m0, st.m1, st.b, st.z = m0, m1, b, z
    st.phase = Phase.WAIT
    return t


def honest_unveil(st: TwoProverHonestState) -> None:
    if st.phase is not Phase.WAIT:
        raise ValueError(f"cannot unveil from phase {st.phase.value}")
    t, topo = st.transcript, st.topo
    t.announce(topo, Party.ALICE, Party.BOB, Phase.UNVEIL, "b", st.b)
    t.announce(topo, Party.ALICE, Party.BOB, Phase.UNVEIL, "r", st.r)
    t.announce(topo, Party.ALYSON, Party.BOB, Phase.UNVEIL, "r_disclosed", st.r_prime)
    st.phase = Phase.UNVEIL


def honest_unveil_check(t: Transcript, b: int, r: BitVector, r_prime: BitVector) -> bool:
    """Bob's acceptance test: r = r' and z = r XOR m_b."""
    try:
        m0 = t.value("m_0")
        m1 = t.value("m_1")
        z = t.value("z")
    except KeyError as exc:
        raise ValueError(f"malformed transcript: {exc}") from exc
    return r == r_prime and z == r ^ (m1 if b else m0)


def attack_init(n: int) -> TwoProverAttackState:
    """Share n correlated register pairs instead of a classical string."""
    if n < 1:
        raise ValueError("n must be at least 1")
    topo = two_prover_topology()
    t = Transcript()
    layout = cached_layout((("B", 1), ("R", n), ("Z", n), ("Rp", n)))
    s = init_state(layout).epr_pairs("R", "Rp")
    return TwoProverAttackState(n=n, state=s, transcript=t, topo=topo)


def attack_commit(st: TwoProverAttackState, psi: tuple[complex, complex], rng: Random, *,
                  allow_zero_m1: bool = False) -> Transcript:
    """Evaluate z = r XOR m_b coherently, measure Z, announce z."""
    if st.phase is not Phase.COMMIT:
        raise ValueError(f"cannot commit from phase {st.phase.value}")
    alpha, beta = psi
    t, topo, n = st.transcript, st.topo, st.n
    m0 = BitVector.zeros(n)
    m1 = _sample_mask(n, rng, allow_zero_m1)
    t.announce(topo, Party.BOB, Party.ALICE, Phase.COMMIT, "m_0", m0)
    t.announce(topo, Party.BOB, Party.ALICE, Phase.COMMIT, "m_1", m1)

    masks = (0, m1.to_int())
    s = st.state.prepare_qubit("B", alpha, beta)
    s = s.coherent_eval(lambda b, r: r ^ masks[b], ["B", "R"], "Z")
    rec, s = s.measure(["Z"], rng)
    z = BitVector.from_int(rec.value, n)
    t.announce(topo, Party.ALICE, Party.BOB, Phase.COMMIT, "z", z)

    st.m0, st.m1, st.z = m0, m1, z
    st.state = s
    st.phase = Phase.WAIT
    return t


def attack_unveil(st: TwoProverAttackState, rng: Random) -> tuple[int, BitVector, BitVector, tuple[MeasurementRecord, ...]]:
    """Alice measures B and R, Alyson measures R'; both disclose to Bob.

    The support invariant R = R' on every label guarantees the two
    disclosures agree without any communication.
    """
    if st.phase is not Phase.WAIT:
        raise ValueError(f"cannot unveil from phase {st.phase.value}")
    rec_b, s = st.state.measure(["B"], rng)
    rec_r, s = s.measure(["R"], rng)
    rec_rp, s = s.measure(["Rp"], rng)
    st.state = s
    st.phase = Phase.UNVEIL
    b = rec_b.value
    r = BitVector.from_int(rec_r.value, st.n)
    rp = BitVector.from_int(rec_rp.value, st.n)
    t, topo = st.transcript, st.topo
    t.announce(topo, Party.ALICE, Party.BOB, Phase.UNVEIL, "b", b)
    t.announce(topo, Party.ALICE, Party.BOB, Phase.UNVEIL, "r", r)
    t.announce(topo, Party.ALYSON, Party.BOB, Phase.UNVEIL, "r_disclosed", rp)
    return b, r, rp, (rec_b, rec_r, rec_rp)


def reunite(st: TwoProverAttackState) -> None:
    """Bring the provers back together; only then can they jointly uncompute."""
    if st.phase is not Phase.WAIT:
        raise ValueError(f"cannot reunite from phase {st.phase.value}")
    st.phase = Phase.RECOVER
    st.transcript.announce(st.topo, Party.ALICE, Party.ALYSON, Phase.RECOVER, "reunion", 1)


def attack_recover(st: TwoProverAttackState) -> SparseState:
    """Erase R and R' by recomputing z XOR m_b from B, then discard them.

    Requires the reunion: while separated, neither prover can reach the
    other's register, so attempting this raises SeparationBreachError.
    """
    if st.phase is not Phase.RECOVER:
        raise SeparationBreachError(
            f"recovery needs the provers reunited; current phase is {st.phase.value}"
        )
    z_int = st.z.to_int()
    masks = (0, st.m1.to_int())
    erase = lambda b: z_int ^ masks[b]
    s = st.state.coherent_eval(erase, ["B"], "R")
    s = s.coherent_eval(erase, ["B"], "Rp")
    s = s.discard_zeroed("R")
    s = s.discard_zeroed("Rp")
    # Z holds the announced constant; XOR it away and drop the register too.
    s = s.xor_constant("Z", z_int).discard_zeroed("Z")
    st.state = s
    return s
