"""Exact sparse state-vector simulation over named bit registers.

A joint state is a mapping from integer basis labels to complex
amplitudes; registers are named, fixed-width bit fields packed into the
label, first-declared register in the most significant bits. All
measurements are computational-basis. Classical functions enter the
state only through XOR-style coherent evaluation, which keeps every
operation reversible and lets ancillas be disposed of with a machine
check that they were actually uncomputed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from random import Random
from typing import Callable, Iterable, Mapping, Sequence

PRUNE_EPS = 1e-12
NORM_EPS = 1e-10


class UncomputationError(Exception):
    """A register was discarded while still holding nonzero bits."""


class RegisterLayout:
    """Ordered named bit registers packed into integer basis labels."""

    __slots__ = ("names", "widths", "total_bits", "_spec")

    def __init__(self, registers: Sequence[tuple[str, int]]):
        names: list[str] = []
        widths: list[int] = []
        for name, width in registers:
            if width <= 0:
                raise ValueError(f"register {name!r} must have positive width")
            if name in names:
                raise ValueError(f"duplicate register name {name!r}")
            names.append(name)
            widths.append(width)
        self.names = tuple(names)
        self.widths = tuple(widths)
        self.total_bits = sum(widths)
        spec: dict[str, tuple[int, int, int]] = {}
        offset = 0
        for name, width in zip(self.names, self.widths):
            shift = self.total_bits - offset - width
            spec[name] = (shift, (1 << width) - 1, width)
            offset += width
        self._spec = spec

    def registers(self) -> tuple[tuple[str, int], ...]:
        return tuple(zip(self.names, self.widths))

    def spec(self, name: str) -> tuple[int, int, int]:
        """(shift, mask, width) of a register within a label."""
        try:
            return self._spec[name]
        except KeyError:
            raise ValueError(f"unknown register {name!r}") from None

    def width(self, name: str) -> int:
        return self.spec(name)[2]

    def value(self, label: int, name: str) -> int:
        shift, mask, _ = self.spec(name)
        return (label >> shift) & mask

    def without(self, name: str) -> "RegisterLayout":
        self.spec(name)
        return cached_layout(tuple(r for r in self.registers() if r[0] != name))

    def with_appended(self, name: str, width: int) -> "RegisterLayout":
        return cached_layout(self.registers() + ((name, width),))

    def format_label(self, label: int) -> str:
        if self.total_bits == 0:
            return ""
        return f"{label:0{self.total_bits}b}"

    def __eq__(self, other) -> bool:
        return isinstance(other, RegisterLayout) and self.registers() == other.registers()

    def __hash__(self):
        return hash(self.registers())

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}:{w}" for n, w in self.registers())
        return f"RegisterLayout({inner})"


@lru_cache(maxsize=None)
def cached_layout(registers: tuple[tuple[str, int], ...]) -> RegisterLayout:
    """Shared immutable layout instance; register churn is hot in trial loops."""
    return RegisterLayout(registers)


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of one computational-basis measurement.

    ``value`` concatenates the measured registers' bits in the order they
    were listed; ``probability`` is the Born probability the outcome had
    at sampling time.
    """

    registers: tuple[str, ...]
    value: int
    probability: float

    def __post_init__(self):
        if not 0.0 < self.probability <= 1.0 + 1e-9:
            raise ValueError(f"outcome probability {self.probability} outside (0, 1]")


class SparseState:
    """Joint quantum state as {basis label -> amplitude} over a layout."""

    __slots__ = ("layout", "amps")

    def __init__(self, layout: RegisterLayout, amps: Mapping[int, complex], *, check: bool = True):
        if check:
            amps = {label: amp for label, amp in amps.items() if abs(amp) > PRUNE_EPS}
            norm = 0.0
            for amp in amps.values():
                norm += amp.real * amp.real + amp.imag * amp.imag
            if abs(norm - 1.0) > NORM_EPS:
                raise ValueError(f"state norm {norm!r} departs from 1")
        self.layout = layout
        self.amps = dict(amps)

    # -- inspection -----------------------------------------------------

    @property
    def support_size(self) -> int:
        return len(self.amps)

    def norm(self) -> float:
        return sum(a.real * a.real + a.imag * a.imag for a in self.amps.values())

    def amplitude(self, label: int) -> complex:
        return self.amps.get(label, 0j)

    def dump(self) -> str:
        """One line per support label: '<bits> <re> <im>', ascending labels."""
        lines = []
        for label in sorted(self.amps):
            amp = self.amps[label]
            lines.append(f"{self.layout.format_label(label)} {amp.real!r} {amp.imag!r}")
        return "\n".join(lines)

    def allclose(self, other: "SparseState", tol: float = 1e-9) -> bool:
        if self.layout != other.layout:
            return False
        for label in self.amps.keys() | other.amps.keys():
            if abs(self.amps.get(label, 0j) - other.amps.get(label, 0j)) > tol:
                return False
        return True

    def _require_zeroed(self, name: str) -> None:
        shift, mask, _ = self.layout.spec(name)
        for label in self.amps:
            if (label >> shift) & mask:
                raise ValueError(f"register {name!r} must be all-zero in every support label")

    # -- preparation ----------------------------------------------------

    def prepare_qubit(self, reg: str, alpha: complex, beta: complex) -> "SparseState":
        """Put a zeroed 1-bit register into alpha|0> + beta|1>, unentangled."""
        shift, _, width = self.layout.spec(reg)
        if width != 1:
            raise ValueError(f"register {reg!r} must have width 1")
        alpha = complex(alpha)
        beta = complex(beta)
        if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > NORM_EPS:
            raise ValueError("amplitudes are not normalized")
        self._require_zeroed(reg)
        new: dict[int, complex] = {}
        hi = 1 << shift
        for label, amp in self.amps.items():
            if abs(alpha) > PRUNE_EPS:
                new[label] = amp * alpha
            if abs(beta) > PRUNE_EPS:
                new[label | hi] = amp * beta
        return SparseState(self.layout, new)

    def uniform_superpose(self, reg: str) -> "SparseState":
        """Expand a zeroed register into the equal superposition of all values."""
        shift, _, width = self.layout.spec(reg)
        self._require_zeroed(reg)
        size = 1 << width
        scale = 1.0 / math.sqrt(size)
        new: dict[int, complex] = {}
        for label, amp in self.amps.items():
            scaled = amp * scale
            for v in range(size):
                new[label | (v << shift)] = scaled
        return SparseState(self.layout, new)

    def epr_pairs(self, reg_a: str, reg_b: str) -> "SparseState":
        """Fill two zeroed same-width registers with perfectly correlated pairs."""
        shift_a, _, width_a = self.layout.spec(reg_a)
        shift_b, _, width_b = self.layout.spec(reg_b)
        if width_a != width_b:
            raise ValueError(f"width mismatch: {reg_a!r}={width_a}, {reg_b!r}={width_b}")
        self._require_zeroed(reg_a)
        self._require_zeroed(reg_b)
        size = 1 << width_a
        scale = 1.0 / math.sqrt(size)
        new: dict[int, complex] = {}
        for label, amp in self.amps.items():
            scaled = amp * scale
            for v in range(size):
                new[label | (v << shift_a) | (v << shift_b)] = scaled
        return SparseState(self.layout, new)

    def coherent_sample(self, probs: Mapping[int, float] | Sequence[float], reg: str) -> "SparseState":
        """Load sqrt-amplitudes of a probability table into a zeroed register."""
        shift, mask, _ = self.layout.spec(reg)
        self._require_zeroed(reg)
        if isinstance(probs, Mapping):
            table = dict(probs)
        else:
            table = dict(enumerate(probs))
        total = 0.0
        for v, p in table.items():
            if v & ~mask:
                raise ValueError(f"value {v} exceeds register {reg!r}")
            if p < 0:
                raise ValueError(f"negative probability {p}")
            total += p
        if abs(total - 1.0) > NORM_EPS:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        roots = {v: math.sqrt(p) for v, p in table.items() if p > 0.0}
        new: dict[int, complex] = {}
        for label, amp in self.amps.items():
            for v, root in roots.items():
                new[label | (v << shift)] = amp * root
        return SparseState(self.layout, new)

    # -- reversible evolution --------------------------------------------

    def coherent_eval(self, f: Callable[..., int], inputs: Sequence[str], target: str) -> "SparseState":
        """XOR f(input values) into the target register on every label.

        Amplitudes are untouched; repeating the call with the same
        arguments is the identity.
        """
        if target in inputs:
            raise ValueError("target register cannot also be an input")
        t_shift, t_mask, _ = self.layout.spec(target)
        specs = [self.layout.spec(name)[:2] for name in inputs]
        new: dict[int, complex] = {}
        if len(specs) == 1:
            s0, m0 = specs[0]
            for label, amp in self.amps.items():
                out = f((label >> s0) & m0)
                if out & ~t_mask:
                    raise ValueError(f"f output {out} exceeds register {target!r}")
                new[label ^ (out << t_shift)] = amp
        else:
            for label, amp in self.amps.items():
                out = f(*((label >> s) & m for s, m in specs))
                if out & ~t_mask:
                    raise ValueError(f"f output {out} exceeds register {target!r}")
                new[label ^ (out << t_shift)] = amp
        return SparseState(self.layout, new, check=False)

    def xor_constant(self, reg: str, value: int) -> "SparseState":
        """XOR a known classical constant into a register (erases it when equal)."""
        shift, mask, _ = self.layout.spec(reg)
        if value & ~mask:
            raise ValueError(f"value {value} exceeds register {reg!r}")
        patch = value << shift
        new = {label ^ patch: amp for label, amp in self.amps.items()}
        return SparseState(self.layout, new, check=False)

    # -- measurement -----------------------------------------------------

    def marginal_distribution(self, regs: Sequence[str]) -> dict[int, float]:
        """Exact Born probabilities of the joint value of the listed registers.

        Keys concatenate the registers' bits in listed order (a single
        register's key is just its value).
        """
        out: dict[int, float] = {}
        if len(regs) == 1:
            shift, mask, _ = self.layout.spec(regs[0])
            for label, amp in self.amps.items():
                v = (label >> shift) & mask
                out[v] = out.get(v, 0.0) + amp.real * amp.real + amp.imag * amp.imag
        else:
            specs = [self.layout.spec(r) for r in regs]
            for label, amp in self.amps.items():
                v = 0
                for shift, mask, width in specs:
                    v = (v << width) | ((label >> shift) & mask)
                out[v] = out.get(v, 0.0) + amp.real * amp.real + amp.imag * amp.imag
        return out

    def postselect(self, regs: Sequence[str], value: int) -> tuple[float, "SparseState"]:
        """Condition on a joint outcome; returns (probability, collapsed state)."""
        kept: list[tuple[int, complex]] = []
        prob = 0.0
        if len(regs) == 1:
            shift, mask, _ = self.layout.spec(regs[0])
            for label, amp in self.amps.items():
                if (label >> shift) & mask == value:
                    kept.append((label, amp))
                    prob += amp.real * amp.real + amp.imag * amp.imag
        else:
            specs = [self.layout.spec(r) for r in regs]
            for label, amp in self.amps.items():
                v = 0
                for shift, mask, width in specs:
                    v = (v << width) | ((label >> shift) & mask)
                if v == value:
                    kept.append((label, amp))
                    prob += amp.real * amp.real + amp.imag * amp.imag
        if prob <= 0.0:
            raise ValueError(f"outcome {value} has zero probability")
        scale = 1.0 / math.sqrt(prob)
        new = {label: amp * scale for label, amp in kept}
        return prob, SparseState(self.layout, new, check=False)

    def measure(self, regs: Sequence[str], rng: Random) -> tuple[MeasurementRecord, "SparseState"]:
        """Sample the listed registers with Born probabilities and collapse."""
        marg = self.marginal_distribution(regs)
        u = rng.random()
        values = sorted(marg)
        chosen = values[-1]  # guard: float dust may leave the cumulative < 1
        acc = 0.0
        for value in values:
            acc += marg[value]
            if u < acc:
                chosen = value
                break
        _, post = self.postselect(regs, chosen)
        return MeasurementRecord(tuple(regs), chosen, marg[chosen]), post

    # -- analysis and disposal --------------------------------------------

    def fidelity_pure(self, reg: str, alpha: complex, beta: complex) -> float:
        """Overlap <psi|rho|psi> of a 1-bit register's reduced state with (alpha, beta)."""
        shift, _, width = self.layout.spec(reg)
        if width != 1:
            raise ValueError(f"register {reg!r} must have width 1")
        hi = 1 << shift
        components: dict[int, list[complex]] = {}
        for label, amp in self.amps.items():
            rest = label & ~hi
            pair = components.get(rest)
            if pair is None:
                pair = [0j, 0j]
                components[rest] = pair
            pair[(label >> shift) & 1] = amp
        ca = complex(alpha).conjugate()
        cb = complex(beta).conjugate()
        fid = 0.0
        for c0, c1 in components.values():
            overlap = ca * c0 + cb * c1
            fid += overlap.real * overlap.real + overlap.imag * overlap.imag
        return fid

    def discard_zeroed(self, reg: str) -> "SparseState":
        """Drop a register proven to be |0..0| on every support label.

        Raises UncomputationError otherwise: a failed discard means some
        erase step upstream did not actually uncompute the register.
        """
        shift, mask, width = self.layout.spec(reg)
        for label in self.amps:
            if (label >> shift) & mask:
                raise UncomputationError(
                    f"register {reg!r} not uncomputed: support label "
                    f"{self.layout.format_label(label)} has nonzero bits"
                )
        new_layout = self.layout.without(reg)
        low_mask = (1 << shift) - 1
        drop = shift + width
        new = {
            ((label >> drop) << shift) | (label & low_mask): amp
            for label, amp in self.amps.items()
        }
        return SparseState(new_layout, new, check=False)

    def add_register(self, name: str, width: int) -> "SparseState":
        """Append a fresh zeroed register at the least significant end."""
        new_layout = self.layout.with_appended(name, width)
        new = {label << width: amp for label, amp in self.amps.items()}
        return SparseState(new_layout, new, check=False)


def init_state(layout: RegisterLayout) -> SparseState:
    """All registers |0..0| with amplitude 1."""
    return SparseState(layout, {0: complex(1.0)}, check=False)
