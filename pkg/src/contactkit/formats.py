"""File formats: form documents, sampled-section tables, solver dumps.

Forms travel as JSON with exact rational coefficient parts, so the
Laurent variant round-trips losslessly.  Sampled sections are columnar
text, one node per row, with a header declaring the mesh; float columns
use repr, which round-trips binary-exactly.  Solver results dump as a
metadata document plus one columnar file per homotopy frame.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .ci import CIResult
from .coefficients import LaurentPoly, Monomial
from .errors import ParseError, VariantError
from .forms import Form, covector_index, covector_name
from .grids import CubeGrid, GridSection
from .reports import VerificationReport
from .scalars import QC

FORMAT_NAME = "contactkit-form"
FORMAT_VERSION = 1


# -- forms ------------------------------------------------------------------


def form_to_document(form: Form) -> dict:
    if form.variant != "laurent":
        raise VariantError("only exact-coefficient forms have a file format")
    terms = []
    for word, coeff in form.sorted_terms():
        entries = []
        for mono, value in coeff.sorted_terms():
            re_s, im_s = value.part_strings()
            entries.append({
                "zexp": list(mono.zexp),
                "zbarexp": list(mono.zbarexp),
                "re": re_s,
                "im": im_s,
            })
        terms.append({
            "wedge": [covector_name(i, form.m) for i in word],
            "coeff": entries,
        })
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "m": form.m,
        "degree": form.degree,
        "terms": terms,
    }


def _term_context(idx: int) -> str:
    return f"terms[{idx}]"


def form_from_document(doc: dict) -> Form:
    if not isinstance(doc, dict):
        raise ParseError("form document must be an object")
    try:
        m = int(doc["m"])
        degree = int(doc["degree"])
        raw_terms = doc["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed form header: {exc}") from None
    terms = {}
    for idx, raw in enumerate(raw_terms):
        where = _term_context(idx)
        try:
            word = tuple(covector_index(name, m) for name in raw["wedge"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"{where}: bad wedge: {exc}") from None
        if len(word) != degree:
            raise ParseError(f"{where}: wedge length {len(word)} != degree {degree}")
        if any(b <= a for a, b in zip(word, word[1:])):
            raise ParseError(f"{where}: wedge indices must be strictly increasing")
        if word in terms:
            raise ParseError(f"{where}: duplicate wedge")
        poly_terms = {}
        for jdx, entry in enumerate(raw.get("coeff", [])):
            try:
                mono = Monomial(tuple(int(e) for e in entry["zexp"]),
                                tuple(int(e) for e in entry["zbarexp"]))
                value = QC(Fraction(str(entry["re"])), Fraction(str(entry["im"])))
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"{where}.coeff[{jdx}]: {exc}") from None
            if mono.m != m:
                raise ParseError(f"{where}.coeff[{jdx}]: exponent length != m")
            if not value.is_zero:
                poly_terms[mono] = value
        terms[word] = LaurentPoly(m, poly_terms)
    try:
        return Form(m, degree, terms)
    except Exception as exc:
        raise ParseError(f"inconsistent form document: {exc}") from None


def save_form(form: Form, path: str | Path) -> None:
    Path(path).write_text(json.dumps(form_to_document(form), indent=2) + "\n")


def load_form(path: str | Path) -> Form:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return form_from_document(doc)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


# -- sampled sections -------------------------------------------------------


def _upper_pairs(m: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(m) for j in range(i + 1, m)]


def section_to_text(section: GridSection) -> str:
    grid = section.grid
    m = grid.m
    lines = [
        "# contactkit sampled section",
        f"n {grid.n}",
        f"nodes {grid.nodes}",
        "bounds " + " ".join(repr(float(b)) for lo_hi in grid.bounds for b in lo_hi),
    ]
    cols = [f"i{k + 1}" for k in range(m)]
    cols += [f"a{k + 1}.{p}" for k in range(m) for p in ("re", "im")]
    cols += [f"beta{i + 1}{j + 1}.{p}" for i, j in _upper_pairs(m) for p in ("re", "im")]
    lines.append("columns " + " ".join(cols))
    pairs = _upper_pairs(m)
    for node in np.ndindex(grid.shape):
        row = [str(k) for k in node]
        for k in range(m):
            v = section.a[node + (k,)]
            row += [repr(float(v.real)), repr(float(v.imag))]
        for i, j in pairs:
            v = section.beta[node + (i, j)]
            row += [repr(float(v.real)), repr(float(v.imag))]
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def section_from_text(text: str) -> GridSection:
    header: dict[str, list[str]] = {}
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] in ("n", "nodes", "bounds", "columns"):
            header[parts[0]] = parts[1:]
            continue
        rows.append((lineno, parts))
    try:
        n = int(header["n"][0])
        nodes = int(header["nodes"][0])
        flat = [float(b) for b in header["bounds"]]
    except (KeyError, IndexError, ValueError) as exc:
        raise ParseError(f"bad section header: {exc}") from None
    m = 2 * n + 1
    if len(flat) != 2 * m:
        raise ParseError(f"bounds carry {len(flat)} numbers, expected {2 * m}")
    bounds = tuple((flat[2 * k], flat[2 * k + 1]) for k in range(m))
    grid = CubeGrid(n, nodes, bounds)
    pairs = _upper_pairs(m)
    width = m + 2 * m + 2 * len(pairs)
    a = np.zeros(grid.shape + (m,), dtype=complex)
    beta = np.zeros(grid.shape + (m, m), dtype=complex)
    seen = 0
    for lineno, parts in rows:
        if len(parts) != width:
            raise ParseError(f"line {lineno}: {len(parts)} columns, expected {width}")
        try:
            node = tuple(int(p) for p in parts[:m])
            vals = [float(p) for p in parts[m:]]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if any(not 0 <= k < nodes for k in node):
            raise ParseError(f"line {lineno}: node index {node} out of range")
        for k in range(m):
            a[node + (k,)] = complex(vals[2 * k], vals[2 * k + 1])
        off = 2 * m
        for (i, j), k in zip(pairs, range(len(pairs))):
            v = complex(vals[off + 2 * k], vals[off + 2 * k + 1])
            beta[node + (i, j)] = v
            beta[node + (j, i)] = -v
        seen += 1
    if seen != grid.n_nodes:
        raise ParseError(f"{seen} node rows, expected {grid.n_nodes}")
    return GridSection(grid, a, beta)


def save_section(section: GridSection, path: str | Path) -> None:
    Path(path).write_text(section_to_text(section))


def load_section(path: str | Path) -> GridSection:
    try:
        return section_from_text(Path(path).read_text())
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


# -- solver dumps -----------------------------------------------------------


def dump_ci_result(result: CIResult, outdir: str | Path) -> list[Path]:
    """Write meta.json plus frame_0000 ... frame_NNNN columnar files."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    meta_path = outdir / "meta.json"
    meta_path.write_text(json.dumps(result.meta(), indent=2) + "\n")
    written.append(meta_path)
    digits = max(4, int(math.log10(max(1, len(result.frames) - 1))) + 1)
    for k, frame in enumerate(result.frames):
        path = outdir / f"frame_{k:0{digits}d}.txt"
        save_section(frame, path)
        written.append(path)
    return written


def save_report(report: VerificationReport, path: str | Path) -> None:
    Path(path).write_text(report.to_text() + "\n")
