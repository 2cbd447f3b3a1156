"""Full invariant suite: one check per acceptance-level claim.

Each criterion is a standalone function returning a CriterionOutcome, so
the CLI selftest and the pytest acceptance module share one source of
truth for tolerances and budgets.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from random import Random
from typing import Callable, TextIO

from . import gf2, novy, twoprover
from .engine import SeparationBreachError
from .gf2 import BitMatrix, BitVector
from .harness import (
    ScenarioConfig,
    bob_view_distribution,
    compare_distributions,
    exact_transcript_distribution,
    mixed_honest_distribution,
    run_trials,
)
from .perm import ToyPermutation
from .qsim import RegisterLayout, init_state

HADAMARD = (1 / math.sqrt(2), 1 / math.sqrt(2))


@dataclass
class CriterionOutcome:
    name: str
    passed: bool
    detail: str
    seconds: float
    budget_s: float


def _random_qubit(rng: Random) -> tuple[complex, complex]:
    alpha = complex(rng.gauss(0, 1), rng.gauss(0, 1))
    beta = complex(rng.gauss(0, 1), rng.gauss(0, 1))
    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    return alpha / norm, beta / norm


def _check(name: str, budget_s: float, fn: Callable[[], tuple[bool, str]]) -> CriterionOutcome:
    started = time.perf_counter()
    passed, detail = fn()
    elapsed = time.perf_counter() - started
    if elapsed > budget_s:
        passed = False
        detail += f" [exceeded budget {budget_s}s: took {elapsed:.2f}s]"
    return CriterionOutcome(name, passed, detail, elapsed, budget_s)


def novy_attack_completeness() -> CriterionOutcome:
    def body():
        config = ScenarioConfig(protocol="novy-attack", n=6, psi=HADAMARD,
                                unveil=True, trials=10_000, seed=2026)
        report = run_trials(config)
        ones = report.b_counts.get("1", 0)
        freq = ones / report.trials
        sigma = math.sqrt(0.25 / report.trials)
        ok = report.acceptance_rate == 1.0 and abs(freq - 0.5) <= 3 * sigma
        return ok, (f"acceptance_rate={report.acceptance_rate}, "
                    f"b1_freq={freq:.4f} (want 0.5 within {3 * sigma:.4f})")
    return _check("novy attack completeness (n=6, 1e4 trials)", 10.0, body)


def novy_recovery() -> CriterionOutcome:
    def body():
        rng = Random(7)
        worst = 1.0
        for trial in range(100):
            n = 3 + trial % 6
            psi = _random_qubit(rng)
            p = ToyPermutation(n)
            st, _ = novy.attack_commit(psi, n, p, Random(f"recovery:{trial}"))
            final = novy.attack_recover(st)  # discards X and Y or raises
            worst = min(worst, final.fidelity_pure("B", *psi))
            if final.support_size > 2:
                return False, f"recovered support {final.support_size} > 2"
        return worst >= 1 - 1e-9, f"min_fidelity={worst!r} over 100 random states, n in 3..8"
    return _check("novy recovery of the unmeasured input", 10.0, body)


def novy_post_commit_states() -> CriterionOutcome:
    def body():
        n = 3
        p = ToyPermutation(n)
        alpha, beta = 0.6, 0.8
        seen = {}
        for seed in range(64):
            st, t = novy.attack_commit((alpha, beta), n, p, Random(seed))
            if st.z in seen:
                continue
            y0, y1 = gf2.solve_affine(BitMatrix.from_rows(t.series("h_")),
                                      BitVector(tuple(t.series("r_"))))
            x0, x1 = p.inverse(y0), p.inverse(y1)
            if st.z == 0:
                expect = {(0, x0, y0): alpha, (1, x1, y1): beta}
            else:
                expect = {(0, x1, y1): alpha, (1, x0, y0): beta}
            labels = {}
            for (b, x, y), amp in expect.items():
                label = (b << (2 * n)) | (x.to_int() << n) | y.to_int()
                labels[label] = amp
            if set(st.state.amps) != set(labels):
                return False, f"support mismatch in z={st.z} branch"
            err = max(abs(st.state.amps[l] - labels[l]) for l in labels)
            if err > 1e-10:
                return False, f"amplitude error {err!r} in z={st.z} branch"
            seen[st.z] = True
            if len(seen) == 2:
                return True, "both z branches match the two-term post-commit state to 1e-10"
        return False, f"only saw z branches {sorted(seen)} in 64 seeds"
    return _check("novy post-commit golden states (z=0 and z=1)", 1.0, body)


def twoprover_attack() -> CriterionOutcome:
    def body():
        n = 4
        config = ScenarioConfig(protocol="2p-attack", n=n, psi=HADAMARD,
                                unveil=True, trials=10_000, seed=11)
        report = run_trials(config)
        if report.acceptance_rate != 1.0:
            return False, f"acceptance_rate={report.acceptance_rate}"
        # acceptance == r = r' = z XOR m_b on every trial, by Bob's check.
        fid_config = ScenarioConfig(protocol="2p-attack", n=n, psi=(0.6, 0.8),
                                    unveil=False, trials=200, seed=12)
        fid_report = run_trials(fid_config)
        if fid_report.min_fidelity < 1 - 1e-9:
            return False, f"min recovery fidelity {fid_report.min_fidelity!r}"
        st = twoprover.attack_init(n)
        twoprover.attack_commit(st, HADAMARD, Random(3))
        try:
            twoprover.attack_recover(st)
            return False, "recovery during separation did not raise"
        except SeparationBreachError:
            pass
        return True, (f"acceptance_rate=1.0 over 10000 trials, "
                      f"min_fidelity={fid_report.min_fidelity!r}, separation enforced")
    return _check("two-prover attack: unveiling, recovery, separation", 10.0, body)


def exact_concealment() -> CriterionOutcome:
    def body():
        details = []
        for n in (2, 3):
            perm_a, perm_c = (3, 1) if n == 2 else (5, 3)
            views = []
            for b in (0, 1):
                config = ScenarioConfig(protocol="novy-honest", n=n, b=b,
                                        perm_a=perm_a, perm_c=perm_c)
                views.append(bob_view_distribution(config))
            tv = compare_distributions(*views)
            details.append(f"novy n={n}: tv={tv!r}")
            if tv >= 1e-12:
                return False, "; ".join(details)
        for n in (1, 2, 3):
            views = []
            for b in (0, 1):
                config = ScenarioConfig(protocol="2p-honest", n=n, b=b)
                views.append(bob_view_distribution(config))
            tv = compare_distributions(*views)
            details.append(f"2p n={n}: tv={tv!r}")
            if tv >= 1e-12:
                return False, "; ".join(details)
        return True, "; ".join(details)
    return _check("exact concealment of Bob's view (b=0 vs b=1)", 30.0, body)


def transcript_equivalence() -> CriterionOutcome:
    def body():
        details = []
        for q in (0.0, 0.5, 1.0):
            psi = (math.sqrt(1 - q), math.sqrt(q))
            attack = ScenarioConfig(protocol="novy-attack", n=2, psi=psi,
                                    perm_a=3, perm_c=1)
            tv = compare_distributions(exact_transcript_distribution(attack),
                                       mixed_honest_distribution(attack, q))
            details.append(f"novy q={q}: tv={tv:.2e}")
            if tv >= 1e-10:
                return False, "; ".join(details)
            for n in (1, 2):
                attack = ScenarioConfig(protocol="2p-attack", n=n, psi=psi)
                tv = compare_distributions(exact_transcript_distribution(attack),
                                           mixed_honest_distribution(attack, q))
                details.append(f"2p n={n} q={q}: tv={tv:.2e}")
                if tv >= 1e-10:
                    return False, "; ".join(details)
        return True, "; ".join(details)
    return _check("attack transcripts match honest Bernoulli(q) commitments", 30.0, body)


def commuting_controls() -> CriterionOutcome:
    def body():
        details = []
        for n, (a, c) in ((2, (3, 1)), (3, (5, 3))):
            psi = (0.6, 0.8j)
            config = ScenarioConfig(protocol="novy-attack", n=n, psi=psi,
                                    perm_a=a, perm_c=c)
            late = exact_transcript_distribution(config)
            early = exact_transcript_distribution(config, early_measure=True)
            tv = compare_distributions(late, early)
            details.append(f"n={n}: tv={tv:.2e}")
            if tv >= 1e-10:
                return False, "; ".join(details)
        return True, "; ".join(details)
    return _check("early vs unveil-time measurement of B, X", 10.0, body)


def _brute_force_solutions(rows: list[int], rhs: list[int], n: int) -> list[int]:
    out = []
    for y in range(1 << n):
        if all(((row & y).bit_count() & 1) == r for row, r in zip(rows, rhs)):
            out.append(y)
    return out


def gf2_solver_oracle() -> CriterionOutcome:
    def body():
        checked = 0
        for n in (1, 2, 3):
            for m in range(n + 1):
                for combo in range(1 << (n * m)):
                    rows = [(combo >> (n * i)) & ((1 << n) - 1) for i in range(m)]
                    matrix = BitMatrix.from_rows(
                        [BitVector.from_int(v, n) for v in rows], n)
                    for rhs_combo in range(1 << m):
                        rhs = [(rhs_combo >> i) & 1 for i in range(m)]
                        got = [v.to_int() for v in
                               gf2.solve_affine(matrix, BitVector(tuple(rhs)))]
                        want = _brute_force_solutions(rows, rhs, n)
                        if got != want:
                            return False, f"mismatch at n={n} rows={rows} rhs={rhs}"
                        checked += 1
        rng = Random(99)
        for _ in range(1000):
            n = rng.choice((4, 5, 6))
            m = rng.randint(0, n)
            rows = [rng.getrandbits(n) for _ in range(m)]
            rhs = [rng.getrandbits(1) for _ in range(m)]
            matrix = BitMatrix.from_rows([BitVector.from_int(v, n) for v in rows], n)
            got = [v.to_int() for v in gf2.solve_affine(matrix, BitVector(tuple(rhs)))]
            want = _brute_force_solutions(rows, rhs, n)
            if got != want:
                return False, f"mismatch at n={n} rows={rows} rhs={rhs}"
            checked += 1
        rng = Random(100)
        for _ in range(1000):
            n = rng.randint(1, 8)
            m = rng.randint(0, n)
            matrix = gf2.sample_independent_rows(m, n, rng)
            if gf2.rank(matrix) != m:
                return False, f"sampler produced rank {gf2.rank(matrix)} != {m}"
            checked += 1
        return True, f"{checked} solver instances match brute force; sampler rank always m"
    return _check("GF(2) solver equals brute-force enumeration", 5.0, body)


def simulator_invariants() -> CriterionOutcome:
    def body():
        layout = RegisterLayout([("B", 1), ("X", 3), ("Y", 3)])
        p = ToyPermutation(3)
        s = init_state(layout)
        states = [s]
        s = s.prepare_qubit("B", 0.6, 0.8j)
        states.append(s)
        s = s.uniform_superpose("X")
        states.append(s)
        s = s.coherent_eval(p.forward_fn(), ["X"], "Y")
        states.append(s)
        for i, state in enumerate(states):
            if abs(state.norm() - 1.0) > 1e-10:
                return False, f"norm {state.norm()!r} after op {i}"
        undone = s.coherent_eval(p.forward_fn(), ["X"], "Y")
        if undone.amps != states[2].amps:
            return False, "coherent_eval applied twice is not the exact identity"
        probe = init_state(RegisterLayout([("Q", 1)])).coherent_sample({0: 0.25, 1: 0.75}, "Q")
        counts = 0
        n_samples = 10_000
        rng = Random(5)
        for _ in range(n_samples):
            rec, _ = probe.measure(["Q"], rng)
            counts += rec.value
        freq = counts / n_samples
        sigma = math.sqrt(0.25 * 0.75 / n_samples)
        if abs(freq - 0.75) > 3 * sigma:
            return False, f"Born frequency {freq} not within 3 sigma of 0.75"
        return True, (f"norms exact, double-eval identity exact, "
                      f"Born freq {freq:.4f} vs 0.75 within {3 * sigma:.4f}")
    return _check("simulator unit invariants", 5.0, body)


ALL_CRITERIA: tuple[Callable[[], CriterionOutcome], ...] = (
    novy_attack_completeness,
    novy_recovery,
    novy_post_commit_states,
    twoprover_attack,
    exact_concealment,
    transcript_equivalence,
    commuting_controls,
    gf2_solver_oracle,
    simulator_invariants,
)


def run_selftest(stream: TextIO) -> bool:
    all_passed = True
    for criterion in ALL_CRITERIA:
        outcome = criterion()
        status = "PASS" if outcome.passed else "FAIL"
        stream.write(f"{status} {outcome.name} ({outcome.seconds:.2f}s): {outcome.detail}\n")
        all_passed &= outcome.passed
    return all_passed
