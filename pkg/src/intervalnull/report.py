"""Result rows for the CLI, the bundled study data and the published tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources

from intervalnull import inference
from intervalnull.dist import NormalLikelihood, SpecialInterval
from intervalnull.effects import TwoByTwoTable, likelihood

HEADER = ["study", "outcome", "n_t", "e_t", "n_c", "e_c"]
JSON_KEYS = ["method", "hyper", "significance", "interval_prob", "prob_ge_lower", "ci_lo", "ci_hi", "diagnostics"]


class InputError(ValueError):
    """Malformed or incomplete study file."""


@dataclass(frozen=True)
class StudyRecord:
    study: str
    outcome: str
    n_t: int
    e_t: int
    n_c: int
    e_c: int

    @property
    def label(self) -> str:
        return f"{self.study} {self.outcome}"

    def table(self) -> TwoByTwoTable:
        return TwoByTwoTable(self.n_t, self.e_t, self.n_c, self.e_c)


def parse_studies(text: str) -> list[StudyRecord]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("empty study file") from None
    if [h.strip() for h in header] != HEADER:
        raise InputError(f"expected header {','.join(HEADER)!r}, got {','.join(header)!r}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(HEADER):
            raise InputError(f"line {lineno}: expected {len(HEADER)} fields, got {len(row)}")
        try:
            counts = [int(cell) for cell in row[2:]]
        except ValueError:
            raise InputError(f"line {lineno}: counts must be integers") from None
        records.append(StudyRecord(row[0].strip(), row[1].strip(), *counts))
    if not records:
        raise InputError("study file has no data rows")
    return records


def load_studies(path=None) -> list[StudyRecord]:
    """Read a study CSV; ``None`` loads the bundled CLARIFY/STAMINA data."""
    if path is None:
        text = resources.files("intervalnull").joinpath("data/studies.csv").read_text(encoding="utf-8")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
    return parse_studies(text)


def select_study(records, study: str, outcome: str | None = None) -> StudyRecord:
    hits = [
        r for r in records
        if r.study.lower() == study.lower() and (outcome is None or r.outcome.lower() == outcome.lower())
    ]
    if not hits:
        raise InputError(f"no row for study={study!r} outcome={outcome!r}")
    if len(hits) > 1:
        raise InputError(f"study {study!r} is ambiguous; pass --outcome")
    return hits[0]


@dataclass
class ResultRow:
    method: str
    hyper: float | None
    significance: float | None
    interval_prob: float
    prob_ge_lower: float
    ci_lo: float
    ci_hi: float
    diagnostics: dict = field(default_factory=dict)
    label: str = ""

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in JSON_KEYS}


def _row(result: inference.MethodResult, significance, level, label="") -> ResultRow:
    lo, hi = result.or_interval(level)
    diagnostics = dict(result.diagnostics)
    diagnostics["mixture_prob_ge_lower"] = result.mixture_prob_ge_lower
    return ResultRow(
        result.method, result.hyper, significance, result.interval_prob,
        result.prob_ge_lower, lo, hi, diagnostics, label or result.method,
    )


def method_rows(lik: NormalLikelihood, interval: SpecialInterval, method: str, values=(), level=0.95, priors=()):
    """One row per hyper-probability in ``values`` (a single row for ``flat``).

    Raises :class:`~intervalnull.inference.FloorViolationError` for a p-hybrid
    value below the floor, and :class:`~intervalnull.inference.NoEvidenceError`
    for p-hybrid when no one-sided test applies and no ``priors`` are given.
    """
    if method == "flat":
        return [_row(inference.flat_posterior(lik, interval), None, level)]
    if method == "two-step":
        return [_row(inference.two_step(lik, interval, a), None, level) for a in values]
    if method == "q-hybrid":
        q = inference.q_value(lik, interval, interval.upper())
        return [_row(inference.q_hybrid(lik, interval, b), q, level) for b in values]
    if method == "p-hybrid":
        p, side = inference.one_sided_p(lik, interval)
        if side == "none":
            if not priors:
                raise inference.NoEvidenceError(
                    "neither one-sided P value points away from the interval; "
                    "pass --prior to carry the prior interval probability over"
                )
            return [_row(inference.prior_carryover(lik, interval, v), None, level) for v in priors]
        return [_row(inference.p_hybrid(lik, interval, g), p, level) for g in values]
    raise ValueError(f"unknown method {method!r}")


# -- published tables ----------------------------------------------------------

# (label, method, hyper, interval_prob, prob_ge_lower, ci_lo, ci_hi) as printed
PUBLISHED_TABLES = {
    1: {
        "study": ("CLARIFY", "ACS"),
        "title": "CLARIFY study, acute coronary syndromes",
        "rows": [
            ("Bayesian, flat prior", "flat", None, "0.004", "0.005", "0.135", "0.697"),
            ("Two-step Bayesian", "two-step", 0.5, "0.064", "0.065", "0.136", "0.992"),
            ("Two-step Bayesian", "two-step", 0.8, "0.214", "0.215", "0.141", "1.060"),
            ("One-sided P hybrid", "p-hybrid", 0.05, "0.049", "0.05", "0.136", "0.971"),
            ("One-sided P hybrid", "p-hybrid", 0.02, "0.019", "0.02", "0.135", "0.813"),
            ("One-sided P hybrid", "p-hybrid", 0.01, "0.099", "0.01", "0.135", "0.725"),
            ("Q value hybrid", "q-hybrid", 0.05, "0.05", "0.051", "0.136", "0.973"),
            ("Q value hybrid", "q-hybrid", 0.01, "0.01", "0.011", "0.135", "0.732"),
        ],
        "significance": {"p-hybrid": "0.0049", "q-hybrid": "0.0060"},
    },
    2: {
        "study": ("CLARIFY", "MI"),
        "title": "CLARIFY study, myocardial infarction",
        "rows": [
            ("Bayesian, flat prior", "flat", None, "0.0154", "0.026", "0.106", "0.913"),
            ("Two-step Bayesian", "two-step", 0.5, "0.232", "0.242", "0.112", "1.082"),
            ("Two-step Bayesian", "two-step", 0.8, "0.547", "0.557", "0.128", "1.093"),
            ("One-sided P hybrid", "p-hybrid", 0.20, "0.189", "0.20", "0.111", "1.078"),
            ("One-sided P hybrid", "p-hybrid", 0.10, "0.089", "0.10", "0.108", "1.054"),
            ("One-sided P hybrid", "p-hybrid", 0.05, "0.039", "0.05", "0.106", "1.007"),
            ("Q value hybrid", "q-hybrid", 0.20, "0.20", "0.211", "0.111", "1.079"),
            ("Q value hybrid", "q-hybrid", 0.05, "0.05", "0.061", "0.107", "1.023"),
        ],
        "significance": {"p-hybrid": "0.0259", "q-hybrid": "0.0365"},
    },
    3: {
        "study": ("STAMINA", "ACS"),
        "title": "STAMINA study, acute coronary syndromes",
        "rows": [
            ("Bayesian, flat prior", "flat", None, "0.095", "0.138", "0.344", "1.192"),
            ("Two-step Bayesian", "two-step", 0.5, "0.446", "0.488", "0.369", "1.112"),
            ("Two-step Bayesian", "two-step", 0.8, "0.763", "0.805", "0.423", "1.099"),
            ("P / Q value hybrid", "q-hybrid", 0.5, "0.5", "0.543", "0.375", "1.104"),
            ("P / Q value hybrid", "q-hybrid", 0.8, "0.8", "0.843", "0.437", "1.098"),
        ],
        "significance": {"p-hybrid": "0.1379", "q-hybrid": "0.1805"},
    },
}

REPRO_INTERVAL = SpecialInterval(0.0, 0.1)


@dataclass
class ReproducedTable:
    table_id: int
    title: str
    likelihood: NormalLikelihood
    p_value: float
    q_value: float
    rows: list
    # (row index, column, printed, computed)
    mismatches: list


def _printed_decimals(s: str) -> int:
    return len(s.split(".")[1]) if "." in s else 0


def reproduce_table(table_id: int, records=None, level: float = 0.95) -> ReproducedTable:
    """Recompute a published table and list every cell that disagrees with print.

    A cell disagrees when the computed value, rounded to the printed number of
    decimals, differs from the printed value.
    """
    entry = PUBLISHED_TABLES[table_id]
    records = records if records is not None else load_studies()
    rec = select_study(records, *entry["study"])
    lik = likelihood(rec.table())
    interval = REPRO_INTERVAL
    p, _ = inference.one_sided_p(lik, interval)
    q = inference.q_value(lik, interval, interval.upper())

    rows, mismatches = [], []
    for i, (label, method, hyper, *printed) in enumerate(entry["rows"]):
        (row,) = method_rows(lik, interval, method, [hyper] if hyper is not None else [], level)
        row.label = label
        rows.append(row)
        computed = (row.interval_prob, row.prob_ge_lower, row.ci_lo, row.ci_hi)
        for col, shown, value in zip(("interval_prob", "prob_ge_lower", "ci_lo", "ci_hi"), printed, computed):
            if round(value, _printed_decimals(shown)) != float(shown):
                mismatches.append((i, col, shown, value))
    return ReproducedTable(table_id, entry["title"], lik, p, q, rows, mismatches)


# -- rendering -------------------------------------------------------------------


def _fmt(x, digits=3):
    if x is None:
        return "-"
    return f"{x:.{digits}f}"


def render_rows(rows, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps([r.as_dict() for r in rows], indent=2, sort_keys=False)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(JSON_KEYS)
        for r in rows:
            d = r.as_dict()
            d["diagnostics"] = json.dumps(d["diagnostics"], sort_keys=True)
            writer.writerow(["" if d[k] is None else (repr(d[k]) if isinstance(d[k], float) else d[k]) for k in JSON_KEYS])
        return buf.getvalue().rstrip("\n")
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")

    header = ("method", "hyper", "signif.", "P(in I)", "P(>=lower)", "central interval (OR)")
    body = [
        (
            r.label or r.method,
            _fmt(r.hyper, 2) if r.hyper is not None else "-",
            _fmt(r.significance, 4),
            _fmt(r.interval_prob),
            _fmt(r.prob_ge_lower),
            f"({_fmt(r.ci_lo)}, {_fmt(r.ci_hi)})",
        )
        for r in rows
    ]
    widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(b, widths)) for b in body]
    return "\n".join(lines)


def render_reproduction(tab: ReproducedTable, fmt: str = "table") -> str:
    body = render_rows(tab.rows, fmt)
    if fmt != "table":
        return body
    head = (
        f"Table {tab.table_id}: {tab.title}\n"
        f"log OR = {tab.likelihood.estimate:.4f}, se = {tab.likelihood.se:.5f}, "
        f"one-sided P = {tab.p_value:.4f}, Q = {tab.q_value:.4f}, special interval [-0.1, 0.1]\n"
    )
    notes = []
    for i, col, shown, value in tab.mismatches:
        note = f"  row {i + 1} ({tab.rows[i].label}, hyper {tab.rows[i].hyper}): {col} printed {shown}, computed {value:.4f}"
        if col == "prob_ge_lower" or (col == "interval_prob" and tab.rows[i].method == "p-hybrid"):
            note += _MISMATCH_HINTS.get((tab.table_id, tab.rows[i].method, col), "")
        notes.append(note)
    tail = ""
    if notes:
        tail = "\n\nCells differing from the printed table:\n" + "\n".join(notes)
    return head + "\n" + body + tail


_MISMATCH_HINTS = {
    (1, "p-hybrid", "interval_prob"): " (printed value is a typo; gamma - lambda*(1-gamma) = 0.009)",
    (2, "p-hybrid", "interval_prob"): " (printed value matches gamma minus the flat upper-tail mass)",
}
