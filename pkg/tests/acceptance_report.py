"""Collects the one-line PASS/FAIL verdicts printed by the acceptance tests."""
LINES: list[str] = []


def report(name: str, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    LINES.append(line)
    return ok
