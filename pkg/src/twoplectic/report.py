"""Identity reports and the trial runner behind every ``verify_*`` function.

A trial check is any picklable callable ``check(rng) -> str | None``; it
returns ``None`` when the identity holds on the sampled inputs and a printable
counterexample otherwise.  Per-trial generators are keyed by
``(seed, suite, identity, trial)`` so results never depend on scheduling.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

from .ring import make_rng

Check = Callable[..., Optional[str]]


@dataclass(frozen=True)
class Settings:
    trials: int = 100
    seed: int = 0
    max_degree: int = 3
    coeff_bound: int = 3
    max_terms: int = 3
    jobs: int = 1


@dataclass(frozen=True)
class IdentityResult:
    name: str
    anchor: str
    trials: int
    failures: int
    counterexample: Optional[str] = None
    expect_failure: bool = False

    @property
    def passed(self) -> bool:
        if self.expect_failure:
            return self.failures > 0
        return self.failures == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tag = " (expected failure)" if self.expect_failure else ""
        text = f"{status}  {self.name}{tag}: {self.failures}/{self.trials} failing  [{self.anchor}]"
        if self.counterexample and not (self.passed and not self.expect_failure):
            text += f"\n      first counterexample: {self.counterexample}"
        return text


@dataclass
class SuiteReport:
    suite: str
    identities: list[IdentityResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.identities)

    @property
    def failures(self) -> int:
        return sum(not r.passed for r in self.identities)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "identities": [r.to_dict() for r in self.identities],
        }


@dataclass
class Report:
    suites: list[SuiteReport] = field(default_factory=list)
    settings: Optional[Settings] = None

    @property
    def overall_pass(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_dict(self) -> dict:
        out = {"overall_pass": self.overall_pass, "suites": [s.to_dict() for s in self.suites]}
        if self.settings is not None:
            # jobs is a scheduling detail and must not change the report
            out["settings"] = {k: v for k, v in asdict(self.settings).items() if k != "jobs"}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = []
        for s in self.suites:
            lines.append(f"== {s.suite}: {'PASS' if s.passed else 'FAIL'}")
            lines.extend("  " + r.line() for r in s.identities)
        lines.append(f"overall: {'PASS' if self.overall_pass else 'FAIL'}")
        return "\n".join(lines) + "\n"


# -- trial runner -------------------------------------------------------------

_POOLS: dict[int, ProcessPoolExecutor] = {}


def _pool(jobs: int) -> ProcessPoolExecutor:
    if jobs not in _POOLS:
        _POOLS[jobs] = ProcessPoolExecutor(max_workers=jobs)
    return _POOLS[jobs]


def shutdown_pools() -> None:
    for pool in _POOLS.values():
        pool.shutdown()
    _POOLS.clear()


def _run_chunk(check: Check, seed: int, suite: str, name: str, indices: list[int]):
    out = []
    for i in indices:
        msg = check(make_rng(seed, suite, name, i))
        if msg is not None:
            out.append((i, msg))
    return out


def run_identity(
    name: str,
    anchor: str,
    check: Check,
    settings: Settings,
    suite: str,
    trials: Optional[int] = None,
    expect_failure: bool = False,
) -> IdentityResult:
    n = settings.trials if trials is None else trials
    idx = list(range(n))
    if settings.jobs > 1 and n > 1:
        size = max(1, -(-n // (settings.jobs * 4)))
        chunks = [idx[k:k + size] for k in range(0, n, size)]
        pool = _pool(settings.jobs)
        futures = [pool.submit(_run_chunk, check, settings.seed, suite, name, c) for c in chunks]
        bad = [item for f in futures for item in f.result()]
    else:
        bad = _run_chunk(check, settings.seed, suite, name, idx)
    bad.sort()
    return IdentityResult(
        name=name,
        anchor=anchor,
        trials=n,
        failures=len(bad),
        counterexample=f"trial {bad[0][0]}: {bad[0][1]}" if bad else None,
        expect_failure=expect_failure,
    )


def single(name: str, anchor: str, message: Optional[str], expect_failure: bool = False) -> IdentityResult:
    """Result for a deterministic one-shot check (fixtures, golden values)."""
    return IdentityResult(
        name=name,
        anchor=anchor,
        trials=1,
        failures=0 if message is None else 1,
        counterexample=message,
        expect_failure=expect_failure,
    )


def mismatch(residual, **context) -> Optional[str]:
    """``None`` if the residual is exactly zero, else a printable counterexample."""
    if residual.is_zero():
        return None
    parts = [f"residual = {residual}"]
    parts.extend(f"{k} = {v}" for k, v in context.items())
    return "; ".join(parts)
