from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS, FAIL, NOT_APPLICABLE = "pass", "fail", "not-applicable"


@dataclass
class Report:
    """Outcome of a verification sweep.

    ``status`` is ``"pass"``, ``"fail"`` (a counterexample was found) or
    ``"not-applicable"`` (precondition or budget failure).
    """

    check: str
    status: str
    bound: Any = None
    witness: Any = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def exit_code(self) -> int:
        return {PASS: 0, FAIL: 1}.get(self.status, 2)

    def to_dict(self) -> dict:
        out = {"check": self.check, "pass": self.passed, "status": self.status,
               "bound": self.bound, "witness": self.witness}
        out.update(self.details)
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def __bool__(self):
        return self.passed
