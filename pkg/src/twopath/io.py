"""JSON and CSV formats.

Complex numbers are ``[re, im]`` pairs; matrices are nested row lists of such
pairs. Floats are written with Python's shortest round-trip repr in JSON and
with 17 significant digits in CSV, both lossless for doubles.
"""
import csv
import io as _io
import json

import numpy as np

from .channels import DensityMatrix, KrausChannel
from .dilation import Dilation, assemble_dilation
from .errors import DimensionError, ParseError
from .gluing import GluingMatrix


def encode_array(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_array(x) for x in a]


def _is_pair(obj):
    return (
        isinstance(obj, list)
        and len(obj) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    )


def decode_array(obj, ndim, name="array"):
    """Decode nested ``[re, im]`` lists of exactly ``ndim`` levels, rejecting ragged data."""

    def walk(node, depth):
        if depth == ndim:
            if not _is_pair(node):
                raise ParseError(f"{name}: expected [re, im] pair, got {node!r}")
            return complex(node[0], node[1])
        if not isinstance(node, list) or not node:
            raise ParseError(f"{name}: expected a nonempty list at depth {depth}")
        items = [walk(x, depth + 1) for x in node]
        if depth < ndim - 1:
            shapes = {np.shape(x) for x in items}
            if len(shapes) != 1:
                raise ParseError(f"{name}: non-rectangular data at depth {depth}")
        return items

    return np.array(walk(obj, 0), dtype=complex)


def _require(obj, key, name):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{name}: missing key {key!r}")
    return obj[key]


def channel_to_json(ch):
    return {
        "source_dim": ch.source_dim,
        "target_dim": ch.target_dim,
        "kraus": encode_array(ch.kraus_ops),
    }


def channel_from_json(obj):
    ops = decode_array(_require(obj, "kraus", "channel"), 3, "kraus")
    sd, td = _require(obj, "source_dim", "channel"), _require(obj, "target_dim", "channel")
    if ops.shape[1:] != (td, sd):
        raise ParseError(f"Kraus operators have shape {ops.shape[1:]}, header says ({td}, {sd})")
    try:
        return KrausChannel(tuple(ops))
    except DimensionError as exc:
        raise ParseError(f"channel: {exc}") from exc


def gluing_to_json(g):
    out = {"C": encode_array(g.C)}
    if g.is_lsp:
        out["lsp"] = {"c1": encode_array(g.lsp_factors[0]), "c2": encode_array(g.lsp_factors[1])}
    return out


def gluing_from_json(obj):
    c = decode_array(_require(obj, "C", "gluing"), 2, "C")
    lsp = obj.get("lsp")
    factors = None
    if lsp is not None:
        factors = (
            decode_array(_require(lsp, "c1", "lsp"), 1, "c1"),
            decode_array(_require(lsp, "c2", "lsp"), 1, "c2"),
        )
    return GluingMatrix(c, lsp_factors=factors)


def state_to_json(rho):
    return {"dim": rho.dim, "rho": encode_array(rho.matrix)}


def state_from_json(obj):
    m = decode_array(_require(obj, "rho", "state"), 2, "rho")
    if "dim" in obj and m.shape != (obj["dim"], obj["dim"]):
        raise ParseError(f"state matrix has shape {m.shape}, header says dim {obj['dim']}")
    try:
        return DensityMatrix(m)
    except DimensionError as exc:
        raise ParseError(f"state: {exc}") from exc


def dilation_to_json(dil):
    return {
        "channel": channel_to_json(dil.channel),
        "ancilla_dim": dil.ancilla_dim,
        "anchor": encode_array(dil.anchor),
        "a_tuple": encode_array(dil.a_tuple.T),
        "W": encode_array(dil.W),
        "U": encode_array(dil.U),
    }


def dilation_from_json(obj, verify=True):
    """Rebuild a :class:`Dilation`; with ``verify`` every invariant is rechecked."""
    ch = channel_from_json(_require(obj, "channel", "dilation"))
    anchor = decode_array(_require(obj, "anchor", "dilation"), 1, "anchor")
    a = decode_array(_require(obj, "a_tuple", "dilation"), 2, "a_tuple").T
    w = decode_array(_require(obj, "W", "dilation"), 2, "W")
    u = decode_array(_require(obj, "U", "dilation"), 2, "U")
    n = _require(obj, "ancilla_dim", "dilation")
    if anchor.size != n or a.shape[0] != n:
        raise ParseError("ancilla vectors do not match ancilla_dim")
    if verify:
        dil = assemble_dilation(ch, a, anchor, w)
        if np.max(np.abs(dil.U - u)) > 1e-10:
            raise ParseError("stored U differs from W + R")
        return dil
    return Dilation(ch, n, anchor, a, w, u)


def tomography_to_json(result):
    return {
        "C_hat": encode_array(result.C_hat),
        "identifiable": bool(result.identifiable),
        "rank": int(result.identifiable_subspace_rank),
        "residual": float(result.residual),
        "null_dirs": [encode_array(d) for d in result.undetermined_directions],
    }


FRINGE_HEADER = ["chi", "p1_direct", "p1_formula", "absE", "argE"]


def fringe_csv(report):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FRINGE_HEADER)
    abs_e, arg_e = report.abs_E, report.arg_E
    for chi, pd, pf in zip(report.chis, report.p1_direct, report.p1_formula):
        writer.writerow([f"{x:.17g}" for x in (chi, pd, pf, abs_e, arg_e)])
    return buf.getvalue()


def dumps(obj):
    return json.dumps(obj, indent=1) + "\n"


def load_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
