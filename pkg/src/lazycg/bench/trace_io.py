"""CSV serialization of run traces.

Numbers are written with 17 significant digits, so every float survives a
write/read cycle bit for bit.  Two footer lines follow the rows::

    # summary: cache_hit_rate=...,positive=...,negative=...,lp_calls=...
    # params: algorithm=...,K=...,C=...

Both are ignored by CSV readers that skip ``#`` comments.
"""

import csv
import io
import math
from dataclasses import dataclass, field

from ..algorithms import BASE_COLUMNS

SUMMARY_PREFIX = "# summary: "
PARAMS_PREFIX = "# params: "
TEXT_COLUMNS = ("answer",)


def format_value(value):
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "%.17g" % value
    if value is None:
        return "nan"
    return str(value)


def parse_value(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _footer(prefix, values):
    body = ",".join(f"{k}={format_value(v)}" for k, v in values.items())
    return f"{prefix}{body}\n"


def _parse_footer(line, prefix):
    out = {}
    body = line[len(prefix):].strip()
    if not body:
        return out
    for item in body.split(","):
        key, _, value = item.partition("=")
        out[key] = parse_value(value)
    return out


@dataclass
class TraceData:
    """A trace read back from disk."""

    columns: list
    rows: list
    summary: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def column(self, name):
        return [r.get(name, math.nan) for r in self.rows]

    @property
    def algorithm(self):
        return self.params.get("algorithm")


def trace_params(trace, extra=None):
    params = {"algorithm": trace.algorithm}
    params.update(trace.params)
    if extra:
        params.update(extra)
    return params


def dumps_trace(trace, extra_params=None):
    out = io.StringIO()
    columns = trace.columns
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for rec in trace.records:
        writer.writerow([format_value(rec.get(c, math.nan)) for c in columns])
    out.write(_footer(SUMMARY_PREFIX, trace.summary()))
    out.write(_footer(PARAMS_PREFIX, trace_params(trace, extra_params)))
    return out.getvalue()


def write_trace(trace, path, extra_params=None):
    with open(path, "w", newline="") as fh:
        fh.write(dumps_trace(trace, extra_params))


def loads_trace(text):
    lines = text.splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    summary, params = {}, {}
    for ln in lines:
        if ln.startswith(SUMMARY_PREFIX):
            summary = _parse_footer(ln, SUMMARY_PREFIX)
        elif ln.startswith(PARAMS_PREFIX):
            params = _parse_footer(ln, PARAMS_PREFIX)
    reader = csv.reader(body)
    header = next(reader)
    missing = [c for c in BASE_COLUMNS if c not in header]
    if missing:
        raise ValueError(f"trace is missing columns {missing}")
    rows = []
    for raw in reader:
        rows.append({c: (v if c in TEXT_COLUMNS else parse_value(v))
                     for c, v in zip(header, raw)})
    return TraceData(header, rows, summary, params)


def read_trace(path):
    with open(path, newline="") as fh:
        return loads_trace(fh.read())
