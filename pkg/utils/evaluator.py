from collections import OrderedDict
from typing import NamedTuple, Optional


class Check(NamedTuple):
    name: str
    passed: Optional[bool]  # None for an informational note
    value: object
    threshold: object
    detail: str


class Evaluator:
    """Collect verification checks and print the PASS/FAIL report."""

    def __init__(self, cfg=None):
        self.cfg = cfg
        self.reset()

    def reset(self):
        self._checks = []

    def process(self, name, passed, value=None, threshold=None, detail=""):
        self._checks.append(Check(name, bool(passed), value, threshold, detail))

    def note(self, name, detail, value=None):
        self._checks.append(Check(name, None, value, None, detail))

    @property
    def checks(self):
        return list(self._checks)

    @property
    def all_passed(self):
        return all(c.passed is not False for c in self._checks)

    def evaluate(self):
        results = OrderedDict()
        n_pass = sum(c.passed is True for c in self._checks)
        n_fail = sum(c.passed is False for c in self._checks)

        print("=> result")
        for c in self._checks:
            if c.passed is None:
                print(f"  NOTE   {c.name}: {c.detail}")
                continue
            tag = "[PASS]" if c.passed else "[FAIL]"
            line = f"  {tag} {c.name}"
            if c.value is not None:
                line += f": {_fmt(c.value)}"
            if c.threshold is not None:
                line += f" (threshold {_fmt(c.threshold)})"
            if c.detail:
                line += f"  {c.detail}"
            print(line)
            results[c.name] = c.value

        print(f"* checks: {n_pass + n_fail:,}\n* passed: {n_pass:,}\n* failed: {n_fail:,}")
        results["passed"] = n_pass
        results["failed"] = n_fail
        return results


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
