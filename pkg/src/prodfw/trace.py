"""Per-iteration solver records and their CSV serialization."""

import csv
from dataclasses import dataclass
import io
import os

CSV_COLUMNS = ("iter", "time_s", "f", "fw_gap", "step_type", "lambda", "big_lambda",
               "active_set_size")


def _fmt(v):
    return format(float(v), ".17g")


@dataclass
class StepRecord:
    """One solver step taken from ``x_t``.

    ``f`` and ``fw_gap`` are evaluated at ``x_t``; ``f_next`` at ``x_{t+1}``.
    ``alignment`` is ``<grad f(x_t), d_t>``.
    """

    iter: int
    step_type: str
    lam: float
    big_lambda: float
    fw_vertex: tuple
    away_vertex: tuple
    alignment: float
    f: float
    fw_gap: float
    f_next: float
    active_set_size: int
    wall_time: float
    block: int = None

    def row(self):
        return [str(self.iter), _fmt(self.wall_time), _fmt(self.f), _fmt(self.fw_gap),
                self.step_type, _fmt(self.lam), _fmt(self.big_lambda),
                str(self.active_set_size)]


class Trace:
    """In-memory solver log plus the final state of the run."""

    def __init__(self, algo, step_rule=None):
        self.algo = algo
        self.step_rule = step_rule
        self.records = []
        self.final_x = None
        self.final_f = None
        self.final_gap = None
        self.converged = False
        self.n_iter = 0

    def append(self, rec):
        self.records.append(rec)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def column(self, name):
        return [getattr(r, name) for r in self.records]

    def iterations_to(self, gap_tol):
        """First iteration whose starting iterate has FW gap <= ``gap_tol``.

        Returns ``n_iter`` when the run stopped on the gap test and None when
        the tolerance was never reached.
        """
        for r in self.records:
            if r.fw_gap <= gap_tol:
                return r.iter
        if self.final_gap is not None and self.final_gap <= gap_tol:
            return self.n_iter
        return None

    def to_csv(self, path_or_buf=None):
        """Write the trace; returns the CSV text when no destination is given."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            writer.writerow(r.row())
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if isinstance(path_or_buf, (str, os.PathLike)):
            with open(path_or_buf, "w", newline="") as fh:
                fh.write(text)
        else:
            path_or_buf.write(text)
        return text


def read_trace_csv(path):
    """Load a trace CSV as a list of dicts with numeric fields converted."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected trace header {reader.fieldnames}")
        rows = []
        for r in reader:
            rows.append({
                "iter": int(r["iter"]), "time_s": float(r["time_s"]), "f": float(r["f"]),
                "fw_gap": float(r["fw_gap"]), "step_type": r["step_type"],
                "lambda": float(r["lambda"]), "big_lambda": float(r["big_lambda"]),
                "active_set_size": int(r["active_set_size"]),
            })
    return rows
