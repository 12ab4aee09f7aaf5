"""Law-check reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"


@dataclass
class LawReport:
    name: str
    instance: str = ""
    verdicts: List[Tuple[int, bool]] = field(default_factory=list)
    counterexample: Optional[str] = None
    seed: Optional[int] = None
    skipped: Optional[str] = None

    def record(self, rank: int, ok: bool, counterexample: Optional[str] = None) -> bool:
        self.verdicts.append((rank, ok))
        if not ok and self.counterexample is None:
            self.counterexample = counterexample or f"rank {rank}"
        return ok

    def fail(self, counterexample: str, rank: int = -1) -> None:
        self.record(rank, False, counterexample)

    @property
    def verdict(self) -> str:
        if self.skipped is not None:
            return SKIPPED
        return PASS if all(ok for _, ok in self.verdicts) else FAIL

    @property
    def ok(self) -> bool:
        return self.verdict != FAIL

    def to_dict(self) -> Dict:
        d = {"name": self.name, "instance": self.instance, "verdict": self.verdict,
             "ranks": [{"rank": r, "ok": ok} for r, ok in self.verdicts]}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.skipped is not None:
            d["reason"] = self.skipped
        if self.seed is not None:
            d["seed"] = self.seed
        return d

    def to_text(self) -> str:
        line = f"{self.verdict:7} {self.name}"
        if self.instance:
            line += f" [{self.instance}]"
        if self.counterexample is not None and self.verdict == FAIL:
            line += f"  counterexample: {self.counterexample}"
        if self.skipped is not None:
            line += f"  ({self.skipped})"
        return line

    def __str__(self):
        return self.to_text()
