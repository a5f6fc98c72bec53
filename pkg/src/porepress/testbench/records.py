"""Benchmark records and their CSV / JSON serialisation."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

COLUMNS = ('grid', 'xi', 'eta', 'tau', 'pc', 'workers', 'iterations',
           'converged', 'residual', 'time_ms')


@dataclass
class BenchmarkRecord:
    grid: int
    xi: float
    eta: float
    tau: float
    pc: str
    workers: int
    iterations: int
    converged: bool
    wall_time_seconds: float
    residual: float
    error: str | None = None

    def row(self) -> dict:
        return {'grid': self.grid, 'xi': self.xi, 'eta': self.eta, 'tau': self.tau,
                'pc': self.pc, 'workers': self.workers, 'iterations': self.iterations,
                'converged': self.converged, 'residual': self.residual,
                'time_ms': self.wall_time_seconds * 1e3}


def _fmt_float(x: float) -> str:
    return format(float(x), '.17g')


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return _fmt_float(value)
    return str(value)


def _json_value(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        if math.isnan(value):
            return 'NaN'
        if math.isinf(value):
            return 'Infinity' if value > 0 else '-Infinity'
        return _fmt_float(value)
    if isinstance(value, int):
        return str(value)
    return json.dumps(value)


def records_to_csv(records, stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(COLUMNS)
    for rec in records:
        row = rec.row()
        writer.writerow([_csv_cell(row[c]) for c in COLUMNS])


def records_to_json(records, stream):
    # floats are written with 17 significant digits, which json.dumps cannot do
    objs = []
    for rec in records:
        row = rec.row()
        body = ', '.join(f'{json.dumps(c)}: {_json_value(row[c])}' for c in COLUMNS)
        objs.append('  {' + body + '}')
    stream.write('[\n' + ',\n'.join(objs) + ('\n' if objs else '') + ']\n')


def export_records(records, fmt: str, path) -> None:
    """Write records as ``csv`` or ``json`` to ``path``."""
    if fmt not in ('csv', 'json'):
        raise ValueError(f"unknown export format {fmt!r}")
    path = Path(path)
    try:
        with path.open('w', newline='') as fh:
            (records_to_csv if fmt == 'csv' else records_to_json)(records, fh)
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc.strerror or exc}") from exc


def read_records(path, fmt: str | None = None) -> list[dict]:
    """Parse an exported file back into row dictionaries (typed)."""
    path = Path(path)
    fmt = fmt or path.suffix.lstrip('.')
    if fmt == 'json':
        return json.loads(path.read_text())
    out = []
    with path.open(newline='') as fh:
        for row in csv.DictReader(fh):
            out.append({
                'grid': int(row['grid']), 'xi': float(row['xi']),
                'eta': float(row['eta']), 'tau': float(row['tau']), 'pc': row['pc'],
                'workers': int(row['workers']), 'iterations': int(row['iterations']),
                'converged': row['converged'] == 'true',
                'residual': float(row['residual']), 'time_ms': float(row['time_ms'])})
    return out
