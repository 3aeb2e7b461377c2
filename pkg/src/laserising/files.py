"""Plain-text Ising problem files.

::

    # two-site antiferromagnet
    M 2
    J 0 1 1.0
    H 0 0.25

``M`` must come first. Coupling lines need ``0 <= i < j < M``. A pair or
field given twice is an error, and ``#`` starts a comment.
"""

from __future__ import annotations

from pathlib import Path

from .ising import IsingProblem


class ProblemFileError(ValueError):
    def __init__(self, line: int, reason: str, path: str | None = None):
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {reason}")
        self.line = line
        self.reason = reason


def parse_problem(text: str, path: str | None = None) -> IsingProblem:
    m = None
    couplings: dict[tuple[int, int], float] = {}
    fields: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]

        def bad(reason: str):
            return ProblemFileError(lineno, reason, path)

        try:
            if kind == "M":
                if m is not None:
                    raise bad("site count given twice")
                if len(tok) != 2:
                    raise bad("expected 'M <site_count>'")
                m = int(tok[1])
                if m < 1:
                    raise bad("site count must be positive")
                continue
            if m is None:
                raise bad("the first record must be 'M <site_count>'")
            if kind == "J":
                if len(tok) != 4:
                    raise bad("expected 'J <i> <j> <value>'")
                i, j, v = int(tok[1]), int(tok[2]), float(tok[3])
                if not i < j:
                    raise bad(f"coupling indices must satisfy i < j, got {i} {j}")
                if i < 0 or j >= m:
                    raise bad(f"coupling ({i}, {j}) out of range for M={m}")
                if (i, j) in couplings:
                    raise bad(f"duplicate coupling ({i}, {j})")
                couplings[(i, j)] = v
            elif kind == "H":
                if len(tok) != 3:
                    raise bad("expected 'H <i> <value>'")
                i, v = int(tok[1]), float(tok[2])
                if not 0 <= i < m:
                    raise bad(f"field index {i} out of range for M={m}")
                if i in fields:
                    raise bad(f"duplicate field on site {i}")
                fields[i] = v
            else:
                raise bad(f"unknown record type {kind!r}")
        except ValueError as exc:
            if isinstance(exc, ProblemFileError):
                raise
            raise bad(f"malformed number ({exc})") from None
    if m is None:
        raise ProblemFileError(0, "empty problem: no 'M' record", path)
    zeeman = tuple(fields.get(i, 0.0) for i in range(m))
    return IsingProblem(m, couplings, zeeman)


def parse_problem_file(path) -> IsingProblem:
    """Read and validate a problem file; errors carry the offending line number."""
    return parse_problem(Path(path).read_text(), str(path))


def format_problem(problem: IsingProblem) -> str:
    lines = [f"M {problem.site_count}"]
    lines += [f"J {i} {j} {v!r}" for (i, j), v in problem.couplings.items()]
    lines += [f"H {i} {h!r}" for i, h in enumerate(problem.zeeman) if h != 0.0]
    return "\n".join(lines) + "\n"


def write_problem_file(problem: IsingProblem, path) -> None:
    Path(path).write_text(format_problem(problem))
