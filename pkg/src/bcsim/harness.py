"""Scenario runner, exact-enumeration oracles, and report emission.

The enumeration oracles recompute protocol outcome distributions without
any random sampling: honest protocols by sweeping every party coin,
attacks by walking each measurement's exact branch probabilities. They
are deliberately independent of the trial runner so that empirical
frequencies can be checked against them.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from random import Random
from typing import Iterable

from . import engine, gf2
from .engine import ProtocolOutcome, Transcript
from .gf2 import BitMatrix, BitVector
from .perm import ToyPermutation
from .qsim import RegisterLayout, SparseState, init_state

PROTOCOLS = ("novy-honest", "novy-attack", "2p-honest", "2p-attack")
NOVY_ENUM_LIMIT = 3
TWOP_ENUM_LIMIT = 2
VIEW_ENUM_LIMIT = 3


class ConfigError(ValueError):
    """A scenario configuration is invalid."""


def _parse_amplitude(raw) -> complex:
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return complex(raw[0], raw[1])
    raise ConfigError(f"amplitude must be a number or [re, im], got {raw!r}")


@dataclass
class ScenarioConfig:
    protocol: str
    n: int
    b: int | None = None
    psi: tuple[complex, complex] | None = None
    perm_a: int = 5
    perm_c: int = 3
    unveil: bool = True
    trials: int = 1
    seed: int = 0
    allow_zero_m1: bool = False

    def validate(self) -> "ScenarioConfig":
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if self.is_attack:
            if self.psi is None or self.b is not None:
                raise ConfigError("attack scenarios take psi, not b")
            alpha, beta = self.psi
            if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-10:
                raise ConfigError("psi must be normalized")
        else:
            if self.b not in (0, 1) or self.psi is not None:
                raise ConfigError("honest scenarios take b in {0, 1}, not psi")
        if self.protocol.startswith("novy"):
            if self.n < 2:
                raise ConfigError("novy scenarios need n >= 2")
            try:
                self.permutation()
            except ValueError as exc:
                raise ConfigError(f"invalid permutation: {exc}") from exc
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        return self

    @property
    def is_attack(self) -> bool:
        return self.protocol.endswith("attack")

    def permutation(self) -> ToyPermutation:
        return ToyPermutation(self.n, self.perm_a, self.perm_c)

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {"protocol", "n", "b", "psi", "perm", "unveil", "trials", "seed",
                 "allow_zero_m1"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            protocol = raw["protocol"]
            n = raw["n"]
        except KeyError as exc:
            raise ConfigError(f"missing config field: {exc}") from exc
        psi = None
        if "psi" in raw:
            spec = raw["psi"]
            if not isinstance(spec, dict) or set(spec) != {"alpha", "beta"}:
                raise ConfigError('psi must be {"alpha": ..., "beta": ...}')
            psi = (_parse_amplitude(spec["alpha"]), _parse_amplitude(spec["beta"]))
        perm = raw.get("perm", {})
        if not isinstance(perm, dict):
            raise ConfigError('perm must be {"a": int, "c": int}')
        config = cls(
            protocol=protocol,
            n=n,
            b=raw.get("b"),
            psi=psi,
            perm_a=perm.get("a", 5),
            perm_c=perm.get("c", 3),
            unveil=bool(raw.get("unveil", True)),
            trials=raw.get("trials", 1),
            seed=raw.get("seed", 0),
            allow_zero_m1=bool(raw.get("allow_zero_m1", False)),
        )
        return config.validate()

    @classmethod
    def from_json_file(cls, path: str) -> "ScenarioConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out: dict = {"protocol": self.protocol, "n": self.n,
                     "unveil": self.unveil, "trials": self.trials, "seed": self.seed}
        if self.b is not None:
            out["b"] = self.b
        if self.psi is not None:
            out["psi"] = {"alpha": [self.psi[0].real, self.psi[0].imag],
                          "beta": [self.psi[1].real, self.psi[1].imag]}
        if self.protocol.startswith("novy"):
            out["perm"] = {"a": self.perm_a, "c": self.perm_c}
        if self.protocol.startswith("2p"):
            out["allow_zero_m1"] = self.allow_zero_m1
        return out


@dataclass
class TrialReport:
    config: dict
    trials: int
    acceptance_rate: float | None
    b_counts: dict[str, int]
    min_fidelity: float | None
    mean_fidelity: float | None
    tv_unveiled_bit: float | None
    transcript_sample: list[dict]
    wall_clock_s: float

    def payload(self) -> dict:
        """Deterministic part of the report (wall clock excluded)."""
        return {
            "config": self.config,
            "trials": self.trials,
            "acceptance_rate": self.acceptance_rate,
            "b_counts": self.b_counts,
            "min_fidelity": self.min_fidelity,
            "mean_fidelity": self.mean_fidelity,
            "tv_unveiled_bit": self.tv_unveiled_bit,
            "transcript_sample": self.transcript_sample,
        }


def trial_rng(seed: int, index: int) -> Random:
    # String seeding hashes via sha512, stable across processes.
    return Random(f"{seed}:{index}")


def run_trials(config: ScenarioConfig, trials: int | None = None,
               seed: int | None = None) -> TrialReport:
    """Run independent seeded executions and aggregate the outcomes."""
    config.validate()
    n_trials = config.trials if trials is None else trials
    base_seed = config.seed if seed is None else seed
    if n_trials < 1:
        raise ConfigError("trials must be positive")

    started = time.perf_counter()
    accepted = 0
    accept_seen = 0
    b_counts: dict[str, int] = {}
    fidelities: list[float] = []
    sample: list[dict] = []
    for i in range(n_trials):
        transcript, outcome = engine.run_protocol(config, trial_rng(base_seed, i))
        if i == 0:
            sample = transcript.to_json()
        if outcome.accepted is not None:
            accept_seen += 1
            accepted += int(outcome.accepted)
        if outcome.unveiled_bit is not None:
            key = str(outcome.unveiled_bit)
            b_counts[key] = b_counts.get(key, 0) + 1
        if outcome.recovery_fidelity is not None:
            fidelities.append(outcome.recovery_fidelity)

    acceptance_rate = accepted / accept_seen if accept_seen else None
    tv = None
    if b_counts:
        total = sum(b_counts.values())
        empirical = {0: b_counts.get("0", 0) / total, 1: b_counts.get("1", 0) / total}
        tv = compare_distributions(empirical, expected_bit_distribution(config))
    return TrialReport(
        config=config.to_dict(),
        trials=n_trials,
        acceptance_rate=acceptance_rate,
        b_counts=dict(sorted(b_counts.items())),
        min_fidelity=min(fidelities) if fidelities else None,
        mean_fidelity=sum(fidelities) / len(fidelities) if fidelities else None,
        tv_unveiled_bit=tv,
        transcript_sample=sample,
        wall_clock_s=time.perf_counter() - started,
    )


def expected_bit_distribution(config: ScenarioConfig) -> dict[int, float]:
    """Exact distribution of the unveiled bit for a scenario."""
    if config.is_attack:
        alpha, beta = config.psi
        return {0: abs(alpha) ** 2, 1: abs(beta) ** 2}
    return {config.b: 1.0}


def compare_distributions(p: dict, q: dict) -> float:
    """Total variation distance: half the L1 distance over the union support."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def emit_report(report: TrialReport, fmt: str) -> str:
    """Serialize a report; JSON output is byte-stable for a fixed config+seed."""
    if fmt == "json":
        return json.dumps(report.payload(), sort_keys=True, separators=(",", ":"))
    if fmt == "text":
        lines = [f"protocol: {report.config['protocol']}  n: {report.config['n']}",
                 f"trials: {report.trials}"]
        if report.acceptance_rate is not None:
            lines.append(f"acceptance_rate: {report.acceptance_rate}")
        if report.b_counts:
            lines.append(f"b_counts: {report.b_counts}")
        if report.tv_unveiled_bit is not None:
            lines.append(f"tv_unveiled_bit: {report.tv_unveiled_bit}")
        if report.min_fidelity is not None:
            lines.append(f"min_fidelity: {report.min_fidelity}")
            lines.append(f"mean_fidelity: {report.mean_fidelity}")
        lines.append(f"wall_clock_s: {report.wall_clock_s:.3f}")
        return "\n".join(lines)
    raise ValueError(f"unknown format {fmt!r}")


# -- outcome keys -------------------------------------------------------

def novy_outcome_key(hs: Iterable[BitVector], rs: Iterable[int], z: int,
                     b: int, x: BitVector) -> str:
    h_part = ",".join(str(h) for h in hs)
    r_part = ",".join(str(r) for r in rs)
    return f"h={h_part} r={r_part} z={z} b={b} x={x}"


def novy_view_key(hs: Iterable[BitVector], rs: Iterable[int], z: int) -> str:
    h_part = ",".join(str(h) for h in hs)
    r_part = ",".join(str(r) for r in rs)
    return f"h={h_part} r={r_part} z={z}"


def twop_outcome_key(m0: BitVector, m1: BitVector, z: BitVector,
                     b: int, r: BitVector, rp: BitVector) -> str:
    return f"m0={m0} m1={m1} z={z} b={b} r={r} rp={rp}"


def twop_view_key(m0: BitVector, m1: BitVector, z: BitVector) -> str:
    return f"m0={m0} m1={m1} z={z}"


def outcome_key_from_transcript(config: ScenarioConfig, t: Transcript) -> str:
    """Key an unveiled run by its announced values plus disclosed secrets."""
    if config.protocol.startswith("novy"):
        return novy_outcome_key(t.series("h_"), t.series("r_"), t.value("z"),
                                t.value("b"), t.value("x"))
    return twop_outcome_key(t.value("m_0"), t.value("m_1"), t.value("z"),
                            t.value("b"), t.value("r"), t.value("r_disclosed"))


# -- exact enumeration --------------------------------------------------

def independent_row_tuples(n: int, m: int) -> list[tuple[BitVector, ...]]:
    """All ordered m-tuples of linearly independent width-n rows."""
    results: list[tuple[BitVector, ...]] = []

    def extend(prefix: list[int], basis: dict[int, int]):
        if len(prefix) == m:
            results.append(tuple(BitVector.from_int(v, n) for v in prefix))
            return
        for cand in range(1 << n):
            red = cand
            ok = False
            while red:
                high = red.bit_length() - 1
                if high not in basis:
                    ok = True
                    break
                red ^= basis[high]
            if not ok:
                continue
            basis2 = dict(basis)
            basis2[red.bit_length() - 1] = red
            extend(prefix + [cand], basis2)

    extend([], {})
    return results


def _m1_values(n: int, allow_zero: bool) -> list[int]:
    return [v for v in range(1 << n) if v or allow_zero]


def _novy_honest_table(n: int, b: int, p: ToyPermutation) -> dict[str, float]:
    tuples = independent_row_tuples(n, n - 1)
    weight = 1.0 / (len(tuples) * (1 << n))
    table: dict[str, float] = {}
    for hs in tuples:
        matrix = BitMatrix.from_rows(hs, n)
        for x_int in range(1 << n):
            x = BitVector.from_int(x_int, n)
            y = p.forward(x)
            rs = [gf2.dot(h, y) for h in hs]
            solutions = gf2.solve_affine(matrix, BitVector(tuple(rs)))
            a = solutions.index(y)
            z = a ^ b
            key = novy_outcome_key(hs, rs, z, b, x)
            table[key] = table.get(key, 0.0) + weight
    return table


def _novy_attack_table(n: int, psi: tuple[complex, complex], p: ToyPermutation,
                       early_measure: bool = False) -> dict[str, float]:
    """Walk every measurement branch of the coherent commit exactly.

    With early_measure, B and X are measured right after the initial
    superposition is built; the later unveiling measurements then see
    point masses, which is what "control registers commute" predicts.
    """
    alpha, beta = psi
    tuples = independent_row_tuples(n, n - 1)
    p_h = 1.0 / len(tuples)
    table: dict[str, float] = {}
    layout = RegisterLayout([("B", 1), ("X", n), ("Y", n)])
    base = init_state(layout).prepare_qubit("B", alpha, beta)
    base = base.uniform_superpose("X").coherent_eval(p.forward_fn(), ["X"], "Y")

    def add(key: str, prob: float):
        table[key] = table.get(key, 0.0) + prob

    for hs in tuples:
        matrix = BitMatrix.from_rows(hs, n)
        h_ints = [h.to_int() for h in hs]

        def unveil(s: SparseState, prob: float, rs: list[int], z: int):
            for b_val, p_b in sorted(s.marginal_distribution(["B"]).items()):
                if p_b <= 0.0:
                    continue
                _, s_b = s.postselect(["B"], b_val)
                for x_val, p_x in sorted(s_b.marginal_distribution(["X"]).items()):
                    if p_x <= 0.0:
                        continue
                    add(novy_outcome_key(hs, rs, z, b_val, BitVector.from_int(x_val, n)),
                        prob * p_b * p_x)

        def z_step(s: SparseState, prob: float, rs: list[int]):
            solutions = gf2.solve_affine(matrix, BitVector(tuple(rs)))
            y1_int = solutions[1].to_int()
            s = s.add_register("Z", 1)
            s = s.coherent_eval(lambda b, y: b ^ (1 if y == y1_int else 0), ["B", "Y"], "Z")
            for z_val, p_z in sorted(s.marginal_distribution(["Z"]).items()):
                if p_z <= 0.0:
                    continue
                _, s_z = s.postselect(["Z"], z_val)
                s_z = s_z.xor_constant("Z", z_val).discard_zeroed("Z")
                unveil(s_z, prob * p_z, rs, z_val)

        def rounds(s: SparseState, prob: float, i: int, rs: list[int]):
            if i == n:
                z_step(s, prob, rs)
                return
            s = s.add_register("R", 1)
            s = s.coherent_eval(_round_parity(h_ints[i - 1], n), ["Y"], "R")
            for r_val, p_r in sorted(s.marginal_distribution(["R"]).items()):
                if p_r <= 0.0:
                    continue
                _, s_r = s.postselect(["R"], r_val)
                s_r = s_r.xor_constant("R", r_val).discard_zeroed("R")
                rounds(s_r, prob * p_r, i + 1, rs + [r_val])

        if early_measure:
            for bx, p_bx in sorted(base.marginal_distribution(["B", "X"]).items()):
                if p_bx <= 0.0:
                    continue
                _, s0 = base.postselect(["B", "X"], bx)
                rounds(s0, p_h * p_bx, 1, [])
        else:
            rounds(base, p_h, 1, [])
    return table


def _round_parity(h_int: int, n: int):
    from .novy import _parity_fn
    return _parity_fn(h_int, n)


def _twop_honest_table(n: int, b: int, allow_zero_m1: bool) -> dict[str, float]:
    m0 = BitVector.zeros(n)
    m1s = _m1_values(n, allow_zero_m1)
    weight = 1.0 / (len(m1s) * (1 << n))
    table: dict[str, float] = {}
    for m1_int in m1s:
        m1 = BitVector.from_int(m1_int, n)
        for r_int in range(1 << n):
            r = BitVector.from_int(r_int, n)
            z = r ^ (m1 if b else m0)
            key = twop_outcome_key(m0, m1, z, b, r, r)
            table[key] = table.get(key, 0.0) + weight
    return table


def _twop_attack_table(n: int, psi: tuple[complex, complex],
                       allow_zero_m1: bool) -> dict[str, float]:
    alpha, beta = psi
    m0 = BitVector.zeros(n)
    m1s = _m1_values(n, allow_zero_m1)
    p_m = 1.0 / len(m1s)
    table: dict[str, float] = {}
    layout = RegisterLayout([("B", 1), ("R", n), ("Z", n), ("Rp", n)])
    base = init_state(layout).epr_pairs("R", "Rp").prepare_qubit("B", alpha, beta)
    for m1_int in m1s:
        m1 = BitVector.from_int(m1_int, n)
        masks = (0, m1_int)
        s = base.coherent_eval(lambda b, r: r ^ masks[b], ["B", "R"], "Z")
        for z_val, p_z in sorted(s.marginal_distribution(["Z"]).items()):
            if p_z <= 0.0:
                continue
            _, s_z = s.postselect(["Z"], z_val)
            z = BitVector.from_int(z_val, n)
            for b_val, p_b in sorted(s_z.marginal_distribution(["B"]).items()):
                if p_b <= 0.0:
                    continue
                _, s_b = s_z.postselect(["B"], b_val)
                for r_val, p_r in sorted(s_b.marginal_distribution(["R"]).items()):
                    if p_r <= 0.0:
                        continue
                    _, s_r = s_b.postselect(["R"], r_val)
                    for rp_val, p_rp in sorted(s_r.marginal_distribution(["Rp"]).items()):
                        if p_rp <= 0.0:
                            continue
                        key = twop_outcome_key(m0, m1, z, b_val,
                                               BitVector.from_int(r_val, n),
                                               BitVector.from_int(rp_val, n))
                        table[key] = table.get(key, 0.0) + p_m * p_z * p_b * p_r * p_rp
    return table


def exact_transcript_distribution(config: ScenarioConfig, *,
                                  early_measure: bool = False) -> dict[str, float]:
    """Exact distribution over announced values plus unveiled outcomes."""
    config.validate()
    if config.protocol.startswith("novy"):
        if config.n > NOVY_ENUM_LIMIT:
            raise ConfigError(f"enumeration bound exceeded: novy needs n <= {NOVY_ENUM_LIMIT}")
    else:
        if config.n > TWOP_ENUM_LIMIT:
            raise ConfigError(f"enumeration bound exceeded: 2p needs n <= {TWOP_ENUM_LIMIT}")
    if config.protocol == "novy-honest":
        return _novy_honest_table(config.n, config.b, config.permutation())
    if config.protocol == "novy-attack":
        return _novy_attack_table(config.n, config.psi, config.permutation(),
                                  early_measure=early_measure)
    if config.protocol == "2p-honest":
        return _twop_honest_table(config.n, config.b, config.allow_zero_m1)
    return _twop_attack_table(config.n, config.psi, config.allow_zero_m1)


def mixed_honest_distribution(config: ScenarioConfig, q: float) -> dict[str, float]:
    """Honest outcome table with the committed bit drawn Bernoulli(q)."""
    base = config.to_dict()
    base["protocol"] = config.protocol.replace("attack", "honest")
    base.pop("psi", None)
    base["b"] = 0
    t0 = exact_transcript_distribution(ScenarioConfig.from_dict(base))
    base["b"] = 1
    t1 = exact_transcript_distribution(ScenarioConfig.from_dict(base))
    table: dict[str, float] = {}
    for key, prob in t0.items():
        table[key] = table.get(key, 0.0) + (1.0 - q) * prob
    for key, prob in t1.items():
        table[key] = table.get(key, 0.0) + q * prob
    return table


def bob_view_distribution(config: ScenarioConfig) -> dict[str, float]:
    """Exact distribution of everything Bob sees during commit.

    Enumeration here allows n up to 3 for both protocol families, which
    the concealment checks rely on.
    """
    config.validate()
    if config.n > VIEW_ENUM_LIMIT:
        raise ConfigError(f"enumeration bound exceeded: views need n <= {VIEW_ENUM_LIMIT}")
    table: dict[str, float] = {}
    if config.protocol == "novy-honest":
        full = _novy_honest_table(config.n, config.b, config.permutation())
        for key, prob in full.items():
            view = key.split(" b=")[0]
            table[view] = table.get(view, 0.0) + prob
        return table
    if config.protocol == "2p-honest":
        full = _twop_honest_table(config.n, config.b, config.allow_zero_m1)
    elif config.protocol == "2p-attack":
        if config.n > TWOP_ENUM_LIMIT:
            raise ConfigError(f"enumeration bound exceeded: 2p attack views need n <= {TWOP_ENUM_LIMIT}")
        full = _twop_attack_table(config.n, config.psi, config.allow_zero_m1)
    else:
        raise ConfigError("view enumeration supports novy-honest, 2p-honest, 2p-attack")
    for key, prob in full.items():
        view = key.split(" b=")[0]
        table[view] = table.get(view, 0.0) + prob
    return table


def empirical_transcript_distribution(config: ScenarioConfig, trials: int,
                                      seed: int) -> dict[str, float]:
    """Outcome-key frequencies over seeded runs, for oracle-agreement checks."""
    if not config.unveil:
        raise ConfigError("empirical outcome keys need unveiling runs")
    counts: dict[str, int] = {}
    for i in range(trials):
        transcript, _ = engine.run_protocol(config, trial_rng(seed, i))
        key = outcome_key_from_transcript(config, transcript)
        counts[key] = counts.get(key, 0) + 1
    return {key: c / trials for key, c in counts.items()}
