"""JSON encodings of matrices, bases, measurement sets, states and strategies.

Floats are written with Python's shortest round-trip repr, so every file
reloads to the identical doubles.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bases import HermitianBasis
from .linalg import ValidationError
from .measurements import MumSet, SimSet
from .optimizer import BobStrategy
from .states import BipartiteState


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
        if len(data) != rows * cols:
            raise ValidationError(f"matrix has {len(data)} entries, expected {rows * cols}")
        arr = np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed matrix: {exc}") from exc
    return arr.reshape(rows, cols)


def basis_to_json(basis: HermitianBasis) -> dict:
    return {"dim": basis.dim, "operators": [matrix_to_json(f) for f in basis.operators]}


def basis_from_json(obj) -> HermitianBasis:
    return HermitianBasis(int(obj["dim"]), np.array([matrix_from_json(m) for m in obj["operators"]]))


def mum_to_json(mums: MumSet) -> dict:
    return {
        "dim": mums.dim,
        "t": float(mums.t),
        "kappa": float(mums.kappa),
        "povms": [[matrix_to_json(p) for p in povm] for povm in mums.povms],
    }


def mum_from_json(obj) -> MumSet:
    povms = np.array([[matrix_from_json(m) for m in povm] for povm in obj["povms"]])
    return MumSet(int(obj["dim"]), float(obj["t"]), float(obj["kappa"]), povms)


def sim_to_json(sim: SimSet) -> dict:
    return {
        "dim": sim.dim,
        "t": float(sim.t),
        "eta": float(sim.eta),
        "operators": [matrix_to_json(p) for p in sim.operators],
    }


def sim_from_json(obj) -> SimSet:
    ops = np.array([matrix_from_json(m) for m in obj["operators"]])
    return SimSet(int(obj["dim"]), float(obj["t"]), float(obj["eta"]), ops)


def state_to_json(state: BipartiteState) -> dict:
    return {"dA": state.dA, "dB": state.dB, "matrix": matrix_to_json(state.matrix)}


def state_from_json(obj) -> BipartiteState:
    return BipartiteState(matrix_from_json(obj["matrix"]), int(obj["dA"]), int(obj["dB"]))


def distribution_to_json(p) -> dict:
    p = np.asarray(p, dtype=float)
    return {"dX": int(p.shape[0]), "dY": int(p.shape[1]), "p": p.tolist()}


def distribution_from_json(obj) -> np.ndarray:
    p = np.array(obj["p"], dtype=float)
    if p.shape != (int(obj["dX"]), int(obj["dY"])):
        raise ValidationError(f"distribution shape {p.shape} does not match ({obj['dX']}, {obj['dY']})")
    return p


def strategy_to_json(strategy: BobStrategy) -> dict:
    return {"dim": strategy.dim, "unitaries": [matrix_to_json(u) for u in strategy.unitaries]}


def strategy_from_json(obj) -> BobStrategy:
    strategy = BobStrategy(np.array([matrix_from_json(u) for u in obj["unitaries"]]))
    if strategy.dim != int(obj["dim"]):
        raise ValidationError("strategy dimension does not match its unitaries")
    return strategy


def _native(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False, default=_native) + "\n"


def save(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def load(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
