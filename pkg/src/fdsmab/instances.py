"""Benchmark parsers (JSSP, PSPLIB single-mode), model building, result files."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .model import Model


class ParseError(ValueError):
    pass


@dataclass
class JsspInstance:
    jobs: list[list[tuple[int, int]]]
    n_machines: int
    name: str = ""

    @property
    def n_ops(self) -> int:
        return sum(len(j) for j in self.jobs)


@dataclass
class RcpspInstance:
    """Activities are 0-based; index 0 is the dummy source, the last one the sink."""

    durations: list[int]
    demands: list[list[int]]
    successors: list[list[int]]
    capacities: list[int]
    name: str = ""

    @property
    def n_jobs(self) -> int:
        return len(self.durations)

    @property
    def n_real(self) -> int:
        return max(0, len(self.durations) - 2)


def read_text(path) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise OSError(f"{path}: {e.strerror or e}") from e


# --- JSSP --------------------------------------------------------------------

def parse_jssp(text: str, name: str = "") -> JsspInstance:
    """Standard OR-library layout: ``jobs machines`` then one line per job of
    ``machine duration`` pairs. Blank lines and ``#`` comments are skipped."""
    lines = [(k + 1, ln.split("#", 1)[0].split()) for k, ln in enumerate(text.splitlines())]
    lines = [(k, toks) for k, toks in lines if toks]
    if not lines:
        raise ParseError("line 1: empty JSSP input")
    k0, head = lines[0]
    if len(head) != 2:
        raise ParseError(f"line {k0}: header must be 'jobs machines'")
    try:
        n_jobs, n_mach = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(f"line {k0}: non-integer header") from None
    body = lines[1:]
    jobs = []
    for k, toks in body[:n_jobs]:
        if len(toks) % 2:
            raise ParseError(f"line {k}: odd token count {len(toks)}")
        if len(toks) != 2 * n_mach:
            raise ParseError(f"line {k}: expected {2 * n_mach} tokens, got {len(toks)}")
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise ParseError(f"line {k}: non-integer token") from None
        ops = []
        for m, d in zip(vals[::2], vals[1::2]):
            if d < 0:
                raise ParseError(f"line {k}: negative duration {d}")
            if not 0 <= m < n_mach:
                raise ParseError(f"line {k}: machine id {m} outside [0, {n_mach})")
            ops.append((m, d))
        if len({m for m, _ in ops}) != len(ops):
            raise ParseError(f"line {k}: job visits a machine twice")
        jobs.append(ops)
    if len(jobs) < n_jobs:
        raise ParseError(f"line {k0}: header announces {n_jobs} jobs, found {len(jobs)}")
    return JsspInstance(jobs, n_mach, name)


def format_jssp(inst: JsspInstance) -> str:
    out = [f"{len(inst.jobs)} {inst.n_machines}"]
    for job in inst.jobs:
        out.append(" ".join(f"{m} {d}" for m, d in job))
    return "\n".join(out) + "\n"


# --- PSPLIB ------------------------------------------------------------------

_SECTION = re.compile(r"^\*+\s*$", re.M)


def _section(text: str, title: str) -> list[str]:
    m = re.search(re.escape(title) + r"\s*\n", text)
    if not m:
        raise ParseError(f"section {title!r} missing")
    rest = text[m.end():]
    end = _SECTION.search(rest)
    block = rest[: end.start()] if end else rest
    return [ln for ln in block.splitlines() if ln.strip()]


def _ints(line: str, section: str) -> list[int]:
    try:
        return [int(t) for t in line.split()]
    except ValueError:
        raise ParseError(f"section {section!r}: non-numeric row {line.strip()!r}") from None


def parse_psplib(text: str, name: str = "") -> RcpspInstance:
    """PSPLIB single-mode ``.sm`` file. Dummy source and sink are kept."""
    m = re.search(r"jobs \(incl\. supersource/sink \)\s*:\s*(\d+)", text)
    if not m:
        raise ParseError("section 'header': jobs count missing")
    n_jobs = int(m.group(1))
    m = re.search(r"-\s*renewable\s*:\s*(\d+)", text)
    if not m:
        raise ParseError("section 'RESOURCES': renewable count missing")
    n_res = int(m.group(1))

    prec = [ln for ln in _section(text, "PRECEDENCE RELATIONS:") if ln.split()[0].isdigit()]
    if len(prec) != n_jobs:
        raise ParseError(f"section 'PRECEDENCE RELATIONS': {len(prec)} rows, header says {n_jobs}")
    successors: list[list[int]] = [[] for _ in range(n_jobs)]
    for ln in prec:
        vals = _ints(ln, "PRECEDENCE RELATIONS")
        if len(vals) < 3 or len(vals) != 3 + vals[2]:
            raise ParseError(f"section 'PRECEDENCE RELATIONS': bad row {ln.strip()!r}")
        j = vals[0] - 1
        if not 0 <= j < n_jobs:
            raise ParseError(f"section 'PRECEDENCE RELATIONS': job {vals[0]} out of range")
        for s in vals[3:]:
            if not 1 <= s <= n_jobs:
                raise ParseError(f"section 'PRECEDENCE RELATIONS': successor {s} out of range")
            successors[j].append(s - 1)

    reqs = [ln for ln in _section(text, "REQUESTS/DURATIONS:") if ln.split()[0].isdigit()]
    if len(reqs) != n_jobs:
        raise ParseError(f"section 'REQUESTS/DURATIONS': {len(reqs)} rows, header says {n_jobs}")
    durations = [0] * n_jobs
    demands = [[0] * n_res for _ in range(n_jobs)]
    for ln in reqs:
        vals = _ints(ln, "REQUESTS/DURATIONS")
        if len(vals) != 3 + n_res:
            raise ParseError(f"section 'REQUESTS/DURATIONS': expected {3 + n_res} fields in {ln.strip()!r}")
        j = vals[0] - 1
        durations[j] = vals[2]
        demands[j] = vals[3:]

    avail = _section(text, "RESOURCEAVAILABILITIES:")
    rows = [ln for ln in avail if not ln.strip().startswith("R")]
    if len(rows) != 1:
        raise ParseError("section 'RESOURCEAVAILABILITIES': expected one row of capacities")
    caps = _ints(rows[0], "RESOURCEAVAILABILITIES")
    if len(caps) != n_res:
        raise ParseError(f"section 'RESOURCEAVAILABILITIES': {len(caps)} values for {n_res} resources")
    return RcpspInstance(durations, demands, successors, caps, name)


def format_psplib(inst: RcpspInstance) -> str:
    n, r = inst.n_jobs, len(inst.capacities)
    star = "*" * 72
    out = [star, f"projects                      :  1",
           f"jobs (incl. supersource/sink ):  {n}",
           f"horizon                       :  {sum(inst.durations)}",
           "RESOURCES",
           f"  - renewable                 :  {r}   R",
           "  - nonrenewable              :  0   N",
           "  - doubly constrained        :  0   D",
           star, "PRECEDENCE RELATIONS:",
           "jobnr.    #modes  #successors   successors"]
    for j in range(n):
        succ = "".join(f"  {s + 1}" for s in inst.successors[j])
        out.append(f"   {j + 1}        1          {len(inst.successors[j])}{succ}")
    out += [star, "REQUESTS/DURATIONS:",
            "jobnr. mode duration  " + "  ".join(f"R {k + 1}" for k in range(r)),
            "-" * 72]
    for j in range(n):
        dem = "".join(f"  {d}" for d in inst.demands[j])
        out.append(f"  {j + 1}      1     {inst.durations[j]}{dem}")
    out += [star, "RESOURCEAVAILABILITIES:",
            "  " + "  ".join(f"R {k + 1}" for k in range(r)),
            "  " + "  ".join(str(c) for c in inst.capacities), star]
    return "\n".join(out) + "\n"


def topological_order(successors) -> list[int]:
    n = len(successors)
    indeg = [0] * n
    for succ in successors:
        for s in succ:
            indeg[s] += 1
    order = [j for j in range(n) if indeg[j] == 0]
    k = 0
    while k < len(order):
        for s in successors[order[k]]:
            indeg[s] -= 1
            if indeg[s] == 0:
                order.append(s)
        k += 1
    if len(order) != n:
        raise ParseError("section 'PRECEDENCE RELATIONS': precedence graph has a cycle")
    return order


# --- model building ----------------------------------------------------------

def build_model(inst, cap: int | None = None) -> Model:
    if isinstance(inst, JsspInstance):
        model = _build_jssp(inst)
    elif isinstance(inst, RcpspInstance):
        model = _build_rcpsp(inst)
    else:
        raise TypeError(f"unsupported instance type {type(inst).__name__}")
    if cap is not None:
        model.limit_objective(cap)
    return model


def _build_jssp(inst: JsspInstance) -> Model:
    horizon = sum(d for job in inst.jobs for _, d in job)
    model = Model(name=inst.name)
    by_machine: list[list[int]] = [[] for _ in range(inst.n_machines)]
    for job in inst.jobs:
        prev = None
        for m, d in job:
            v = model.new_interval(0, horizon - d, d)
            by_machine[m].append(v)
            if prev is not None:
                model.add_precedence(prev, v)
            prev = v
    for ops in by_machine:
        if len(ops) >= 2:
            model.add_no_overlap(ops)
    model.set_objective(range(len(model.variables)))
    return model


def _build_rcpsp(inst: RcpspInstance) -> Model:
    topological_order(inst.successors)
    horizon = sum(inst.durations)
    model = Model(name=inst.name)
    n = inst.n_jobs
    for j, d in enumerate(inst.durations):
        hi = 0 if j == 0 else horizon - d
        model.new_interval(0, hi, d)
    for j, succ in enumerate(inst.successors):
        for s in succ:
            model.add_precedence(j, s)
    for r, cap in enumerate(inst.capacities):
        users = [(j, inst.demands[j][r]) for j in range(n) if inst.demands[j][r] > 0]
        if users:
            model.add_cumulative([j for j, _ in users], [d for _, d in users], cap)
    sink = n - 1
    preds = [j for j in range(n) if sink in inst.successors[j]]
    model.set_objective(preds or [sink])
    return model


def load_instance(path, kind: str | None = None):
    text = read_text(path)
    name = Path(str(path)).stem
    if kind is None:
        kind = "rcpsp" if str(path).endswith(".sm") or "PRECEDENCE RELATIONS" in text else "jssp"
    return parse_psplib(text, name) if kind == "rcpsp" else parse_jssp(text, name)


def lower_bound_heuristic(inst) -> int:
    """Max of the critical path length and per-resource load bounds."""
    if isinstance(inst, JsspInstance):
        cp = max((sum(d for _, d in job) for job in inst.jobs), default=0)
        load = [0] * inst.n_machines
        for job in inst.jobs:
            for m, d in job:
                load[m] += d
        return max([cp] + load)
    order = topological_order(inst.successors)
    est = [0] * inst.n_jobs
    for j in order:
        for s in inst.successors[j]:
            est[s] = max(est[s], est[j] + inst.durations[j])
    cp = max((est[j] + inst.durations[j] for j in range(inst.n_jobs)), default=0)
    best = cp
    for r, cap in enumerate(inst.capacities):
        energy = sum(inst.durations[j] * inst.demands[j][r] for j in range(inst.n_jobs))
        best = max(best, -(-energy // cap) if cap > 0 else 0)
    return best


# --- result records ----------------------------------------------------------

@dataclass
class RunRecord:
    instance: str
    strategy: str
    seed: int
    fingerprint: str
    status: str
    branches: int
    restarts: int
    rollbacks: int
    elapsed: float
    proven_bound: int | None = None
    objective: int | None = None
    cap: int | None = None


RECORD_FIELDS = [f.name for f in dataclasses.fields(RunRecord)]
_INT_FIELDS = {"seed", "branches", "restarts", "rollbacks"}
_OPT_INT_FIELDS = {"proven_bound", "objective", "cap"}


def config_fingerprint(*configs) -> str:
    blob = json.dumps([c.to_dict() if hasattr(c, "to_dict") else c for c in configs],
                      sort_keys=True, default=str)
    return hashlib.sha1(blob.encode()).hexdigest()[:12]


def _coerce(row: dict) -> RunRecord:
    vals = {}
    for k in RECORD_FIELDS:
        v = row.get(k, "")
        if k in _INT_FIELDS:
            vals[k] = int(v)
        elif k in _OPT_INT_FIELDS:
            vals[k] = None if v in ("", None) else int(v)
        elif k == "elapsed":
            vals[k] = float(v)
        else:
            vals[k] = str(v)
    return RunRecord(**vals)


def write_results(records, path, fmt: str | None = None) -> None:
    """Write records as CSV (``.csv``), TSV (``.tsv``) or JSON lines (``.jsonl``)."""
    path = Path(path)
    fmt = fmt or {".tsv": "tsv", ".jsonl": "jsonl"}.get(path.suffix, "csv")
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "jsonl":
                fh.write(json.dumps({"columns": RECORD_FIELDS}) + "\n")
                for r in records:
                    fh.write(json.dumps(dataclasses.asdict(r)) + "\n")
                return
            w = csv.writer(fh, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
            w.writerow(RECORD_FIELDS)
            for r in records:
                w.writerow(["" if getattr(r, k) is None else
                            (repr(r.elapsed) if k == "elapsed" else getattr(r, k))
                            for k in RECORD_FIELDS])
    except OSError as e:
        raise OSError(f"{path}: cannot write results ({e.strerror or e})") from e


def read_results(path, fmt: str | None = None) -> list[RunRecord]:
    path = Path(path)
    fmt = fmt or {".tsv": "tsv", ".jsonl": "jsonl"}.get(path.suffix, "csv")
    try:
        with open(path, newline="") as fh:
            if fmt == "jsonl":
                lines = [ln for ln in fh if ln.strip()]
                return [_coerce(json.loads(ln)) for ln in lines[1:]]
            rows = list(csv.DictReader(fh, delimiter="\t" if fmt == "tsv" else ","))
    except OSError as e:
        raise OSError(f"{path}: cannot read results ({e.strerror or e})") from e
    return [_coerce(r) for r in rows]
