"""JSON encodings for matrices, channels, decompositions, and run output.

Complex entries are encoded as [re, im] pairs so files stay valid JSON and
diff cleanly. Element angles are stored in degrees, matching the CLI.
"""
from __future__ import annotations

import math

import numpy as np

from .channels import KrausChannel
from .decomposition import OPERATORS, SignedDecomposition, SignedTerm, TimePartition, TimeSlot
from .errors import OutOfRange
from .experiment import CoincidenceRecord, ProtocolResult, SweepResult, TomographyResult
from .optics import OpticalElement


def encode_matrix(mat: np.ndarray) -> list:
    """Nested lists of [re, im] pairs."""
    mat = np.asarray(mat, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def decode_matrix(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise OutOfRange(f"malformed matrix payload: {exc}") from None
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise OutOfRange(f"matrix payload must be rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_json(channel: KrausChannel) -> dict:
    return {"kind": "kraus", "operators": [encode_matrix(k) for k in channel.operators]}


def channel_from_json(obj: dict) -> KrausChannel:
    return KrausChannel(operators=tuple(decode_matrix(k) for k in obj["operators"]))


def term_to_json(term: SignedTerm) -> dict:
    if term.name in OPERATORS:
        return {"op": term.name, "weight": float(term.weight)}
    return {"matrix": encode_matrix(term.operator), "weight": float(term.weight)}


def term_from_json(obj: dict) -> SignedTerm:
    weight = float(obj["weight"])
    if "matrix" in obj:
        return SignedTerm(name=obj.get("op", "custom"), operator=decode_matrix(obj["matrix"]), weight=weight)
    name = obj.get("op")
    if name not in OPERATORS:
        raise OutOfRange(f"unknown operator name {name!r} and no matrix given")
    return SignedTerm(name=name, operator=OPERATORS[name], weight=weight)


def decomposition_to_json(decomposition: SignedDecomposition) -> dict:
    return {
        "terms": [term_to_json(t) for t in decomposition.terms],
        "notes": list(decomposition.notes),
    }


def decomposition_from_json(obj: dict) -> SignedDecomposition:
    return SignedDecomposition(
        terms=tuple(term_from_json(t) for t in obj["terms"]),
        notes=tuple(obj.get("notes", ())),
    )


def partition_to_json(partition: TimePartition) -> dict:
    return {
        "total": float(partition.total),
        "slots": [{"duration": float(s.duration), "sign": s.sign} for s in partition.slots],
    }


def partition_from_json(obj: dict) -> TimePartition:
    return TimePartition(
        total=float(obj["total"]),
        slots=tuple(TimeSlot(float(s["duration"]), int(s["sign"])) for s in obj["slots"]),
    )


_POL_AXES = {"H": 0.0, "V": 90.0}


def sequence_to_json(sequence) -> list:
    out = []
    for element in sequence:
        deg = math.degrees(element.angle)
        if element.kind == "pol":
            for axis, axis_deg in _POL_AXES.items():
                if math.isclose(deg % 180, axis_deg, abs_tol=1e-9):
                    out.append({"kind": "pol", "axis": axis})
                    break
            else:
                out.append({"kind": "pol", "deg": deg})
        else:
            out.append({"kind": element.kind, "deg": deg})
    return out


def sequence_from_json(data) -> tuple:
    elements = []
    for item in data:
        if "axis" in item:
            axis = str(item["axis"]).upper()
            if axis not in _POL_AXES:
                raise OutOfRange(f"unknown polarizer axis {item['axis']!r}")
            deg = _POL_AXES[axis]
        else:
            deg = float(item["deg"])
        elements.append(OpticalElement(kind=item["kind"], angle=math.radians(deg)))
    return tuple(elements)


def record_to_json(record: CoincidenceRecord) -> dict:
    return {
        "label": record.label,
        "duration": record.duration,
        "counts": record.counts,
        "sign": record.sign,
        "slot": record.slot,
    }


def record_from_json(obj: dict) -> CoincidenceRecord:
    return CoincidenceRecord(
        label=str(obj["label"]),
        duration=float(obj["duration"]),
        counts=float(obj["counts"]),
        sign=int(obj["sign"]),
        slot=int(obj["slot"]),
    )


def tomography_to_json(result: TomographyResult) -> dict:
    return {
        "rho": encode_matrix(result.rho_hat),
        "method": result.method,
        "min_eig_pre_clip": result.min_eig_pre_clip,
        "iterations": result.iterations,
        "converged": result.converged,
        "log_likelihood": result.log_likelihood,
    }


def run_to_json(run: ProtocolResult) -> dict:
    """Raw run payload: per-slot records plus reconstruction diagnostics."""
    return {
        "records": [record_to_json(r) for r in run.records],
        "effective": {k: float(v) for k, v in run.effective.items()},
        "reconstruction": tomography_to_json(run.reconstruction),
        "theory": encode_matrix(run.theory),
    }


def sweep_to_json(result: SweepResult) -> dict:
    from .experiment import SWEEP_COLUMNS

    rows = [
        [
            row.lam,
            row.gamma,
            row.fid_theory,
            row.fid_sim,
            row.purity_theory,
            row.purity_sim,
            row.conc_theory,
            row.conc_sim,
            row.seed,
        ]
        for row in result.rows
    ]
    return {
        "columns": list(SWEEP_COLUMNS),
        "rows": rows,
        "death_sim": result.death_sim,
        "death_theory": result.death_theory,
        "metadata": result.metadata,
    }
