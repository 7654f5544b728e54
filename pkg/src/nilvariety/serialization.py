"""JSON wire formats shared by the service, the CLI, and the test suite.

Scalars travel as decimal strings ("5", "-3/7" over the rationals, residues
over a prime field); field specs as {"kind": "Q"} or {"kind": "Fp", "p": 5};
quadruples as {"n", "field", "X", "Y", "i", "j"} with an optional
"variety" tag ("N" default, "S" for the rank-one-sum variety).
"""

from __future__ import annotations

from .errors import PreconditionError
from .fields import Field, field_from_json
from .hilbert import Orientation, PsiImage
from .canonical import CanonicalParams, StabilizerReport
from .census import CensusRecord, SlopeEstimate
from .linalg import Matrix, Vec
from .slices import RegularSliceParams, SliceData
from .strata import Quadruple
from .svariety import SQuadruple


def matrix_to_json(M: Matrix):
    f = M.field
    return [[f.fmt(a) for a in row] for row in M.rows]


def matrix_from_json(field: Field, rows, nrows=None, ncols=None) -> Matrix:
    M = Matrix.from_rows(field, [[field.parse(str(a)) for a in row] for row in rows])
    if nrows is not None and (M.nrows != nrows or M.ncols != ncols):
        raise PreconditionError(f"matrix must be {nrows}x{ncols}")
    return M


def vec_to_json(field: Field, v: Vec):
    return [field.fmt(a) for a in v]


def vec_from_json(field: Field, entries, length=None) -> Vec:
    v = tuple(field.parse(str(a)) for a in entries)
    if length is not None and len(v) != length:
        raise PreconditionError(f"vector must have length {length}")
    return v


def quadruple_to_json(q: Quadruple, variety: str = "N") -> dict:
    f = q.field
    return {"variety": variety, "n": q.n, "field": f.to_json(),
            "X": matrix_to_json(q.X), "Y": matrix_to_json(q.Y),
            "i": vec_to_json(f, q.i), "j": vec_to_json(f, q.j)}


def quadruple_from_json(obj: dict) -> Quadruple:
    f = field_from_json(obj["field"])
    n = int(obj["n"])
    return Quadruple(f, n,
                     matrix_from_json(f, obj["X"], n, n),
                     matrix_from_json(f, obj["Y"], n, n),
                     vec_from_json(f, obj["i"], n),
                     vec_from_json(f, obj["j"], n))


def squadruple_to_json(q: SQuadruple) -> dict:
    f = q.field
    return {"variety": "S", "n": q.n, "field": f.to_json(),
            "X": matrix_to_json(q.A), "Y": matrix_to_json(q.B),
            "i": vec_to_json(f, q.i), "j": vec_to_json(f, q.j)}


def squadruple_from_json(obj: dict) -> SQuadruple:
    f = field_from_json(obj["field"])
    n = int(obj["n"])
    return SQuadruple(f, n,
                      matrix_from_json(f, obj["X"], n, n),
                      matrix_from_json(f, obj["Y"], n, n),
                      vec_from_json(f, obj["i"], n),
                      vec_from_json(f, obj["j"], n))


def psi_image_to_json(p: PsiImage) -> dict:
    f = p.field
    return {"n": p.n, "field": f.to_json(), "t": p.t,
            "right_orientation": p.right_orientation.value,
            "a": [f.fmt(c) for c in p.a],
            "left_orientation": p.left_orientation.value,
            "b": [f.fmt(c) for c in p.b],
            "pretty": str(p)}


def psi_image_from_json(obj: dict) -> PsiImage:
    f = field_from_json(obj["field"])
    return PsiImage(f, int(obj["n"]), int(obj["t"]),
                    Orientation(obj["right_orientation"]),
                    tuple(f.parse(str(c)) for c in obj["a"]),
                    Orientation(obj["left_orientation"]),
                    tuple(f.parse(str(c)) for c in obj["b"]))


def canonical_params_to_json(p: CanonicalParams) -> dict:
    f = p.field
    return {"n": p.n, "t": p.t, "field": f.to_json(),
            "a": [f.fmt(c) for c in p.a], "b": [f.fmt(c) for c in p.b]}


def canonical_params_from_json(obj: dict) -> CanonicalParams:
    f = field_from_json(obj["field"])
    return CanonicalParams(f, int(obj["n"]), int(obj["t"]),
                           tuple(f.parse(str(c)) for c in obj["a"]),
                           tuple(f.parse(str(c)) for c in obj["b"]))


def stabilizer_report_to_json(field: Field, rep: StabilizerReport) -> dict:
    return {"dim": rep.dim, "basis": [matrix_to_json(M) for M in rep.basis]}


def _cell_key(cell) -> str:
    return f"{cell[0]},{cell[1]}"


def _cell_from_key(key: str):
    a, b = key.split(",")
    return (int(a), int(b))


def slice_data_to_json(s: SliceData) -> dict:
    f = s.field
    return {"kind": "slice", "n": s.n, "r": s.r, "field": f.to_json(),
            "X1": matrix_to_json(s.X1), "Y1": matrix_to_json(s.Y1),
            "i": vec_to_json(f, s.i),
            "X2": matrix_to_json(s.X2), "Y2": matrix_to_json(s.Y2),
            "alpha": {_cell_key(c): vec_to_json(f, v) for c, v in s.alpha.items()},
            "beta": {_cell_key(c): vec_to_json(f, v) for c, v in s.beta.items()}}


def slice_data_from_json(obj: dict) -> SliceData:
    f = field_from_json(obj["field"])
    n, r = int(obj["n"]), int(obj["r"])
    m = n - r
    return SliceData(
        f, n, r,
        matrix_from_json(f, obj["X1"], r, r),
        matrix_from_json(f, obj["Y1"], r, r),
        vec_from_json(f, obj["i"], n),
        matrix_from_json(f, obj["X2"], m, m),
        matrix_from_json(f, obj["Y2"], m, m),
        {_cell_from_key(k): vec_from_json(f, v, m) for k, v in obj.get("alpha", {}).items()},
        {_cell_from_key(k): vec_from_json(f, v, m) for k, v in obj.get("beta", {}).items()})


def regular_slice_params_to_json(p: RegularSliceParams) -> dict:
    f = p.field
    return {"kind": "regular", "n": p.n, "r": p.r, "field": f.to_json(),
            "c": [f.fmt(x) for x in p.c], "d": [f.fmt(x) for x in p.d],
            "alpha": [vec_to_json(f, row) for row in p.alpha_rows],
            "beta": vec_to_json(f, p.beta_top)}


def regular_slice_params_from_json(obj: dict) -> RegularSliceParams:
    f = field_from_json(obj["field"])
    return RegularSliceParams(
        f, int(obj["n"]), int(obj["r"]),
        tuple(f.parse(str(x)) for x in obj.get("c", [])),
        tuple(f.parse(str(x)) for x in obj.get("d", [])),
        tuple(vec_from_json(f, row) for row in obj.get("alpha", [])),
        vec_from_json(f, obj.get("beta", [])))


def census_record_to_json(rec: CensusRecord) -> dict:
    return {"variety": rec.variety, "n": rec.n, "q": rec.q,
            "r": rec.r, "s": rec.s, "commuting": rec.commuting,
            "count": str(rec.count)}


def census_record_from_json(obj: dict) -> CensusRecord:
    return CensusRecord(obj["variety"], int(obj["n"]), int(obj["q"]),
                        None if obj.get("r") is None else int(obj["r"]),
                        None if obj.get("s") is None else int(obj["s"]),
                        obj.get("commuting"),
                        int(obj["count"]))


def slope_estimate_to_json(est: SlopeEstimate) -> dict:
    return {"variety": est.variety, "n": est.n,
            "pairs": [[q, str(c)] for q, c in est.pairs],
            "slope": f"{est.slope.numerator}/{est.slope.denominator}",
            "slope_float": float(est.slope),
            "residuals": list(est.residuals)}
