"""FastAPI service exposing the exact-arithmetic core.

Precondition violations map to HTTP 422, internal postcondition failures to
HTTP 500; the CLI translates those into exit codes 1 and 2.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import serialization as ser
from ..canonical import (CanonicalParams, canonical_quadruple, orbit_equivalent,
                         stabilizer_dim)
from ..census import (CensusRecord, dimension_slope, enumerate_N, enumerate_S,
                      filter_records)
from ..errors import InternalCheckError, PreconditionError
from ..fields import field_from_json
from ..hilbert import psi
from ..linalg import Matrix, inverse
from ..slices import build_slice_point, regular_slice_point, stratum_jump_sample
from ..strata import classify, is_in_N, triangularize_pair
from ..svariety import (classify_S, is_in_S, s_canonical, s_deform,
                        s_stabilizer_dim, trace_pairing_check, triangularize_S)
from . import schemas as sc


def create_app() -> FastAPI:
    app = FastAPI(title="nilvariety",
                  description="exact computations with rank-one-commutator "
                              "nilpotent matrix quadruples")

    @app.exception_handler(PreconditionError)
    async def _precondition(request: Request, exc: PreconditionError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(InternalCheckError)
    async def _internal(request: Request, exc: InternalCheckError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    def n_quad(model: sc.QuadrupleModel):
        return ser.quadruple_from_json(model.model_dump())

    def s_quad(model: sc.QuadrupleModel):
        return ser.squadruple_from_json(model.model_dump())

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/membership", response_model=sc.MembershipResponse)
    def membership(req: sc.ClassifyRequest):
        if req.variety == "S":
            return sc.MembershipResponse(member=is_in_S(s_quad(req.quadruple)))
        return sc.MembershipResponse(member=is_in_N(n_quad(req.quadruple)))

    @app.post("/classify", response_model=sc.ClassifyResponse)
    def classify_endpoint(req: sc.ClassifyRequest):
        if req.variety == "S":
            r, s = classify_S(s_quad(req.quadruple))
            return sc.ClassifyResponse(variety="S", r=r, s=s)
        lab = classify(n_quad(req.quadruple))
        return sc.ClassifyResponse(variety="N", r=lab.r, s=lab.s,
                                   commuting=lab.commuting)

    @app.post("/psi", response_model=sc.PsiResponse)
    def psi_endpoint(q: sc.QuadrupleModel):
        return sc.PsiResponse(**ser.psi_image_to_json(psi(n_quad(q))))

    @app.post("/canonical", response_model=sc.QuadrupleModel)
    def canonical_endpoint(req: sc.CanonicalRequest):
        params = ser.canonical_params_from_json(req.model_dump())
        return sc.QuadrupleModel(**ser.quadruple_to_json(canonical_quadruple(params)))

    @app.post("/stabilizer", response_model=sc.StabilizerResponse)
    def stabilizer_endpoint(req: sc.ClassifyRequest):
        if req.variety == "S":
            q = s_quad(req.quadruple)
            if not is_in_S(q):
                raise PreconditionError("quadruple is not in the variety")
            return sc.StabilizerResponse(dim=s_stabilizer_dim(q), basis=[])
        q = n_quad(req.quadruple)
        rep = stabilizer_dim(q)
        return sc.StabilizerResponse(
            dim=rep.dim, basis=[ser.matrix_to_json(M) for M in rep.basis])

    @app.post("/orbit-equivalent", response_model=sc.OrbitEquivalentResponse)
    def orbit_endpoint(req: sc.OrbitEquivalentRequest):
        eq, G = orbit_equivalent(n_quad(req.first), n_quad(req.second))
        return sc.OrbitEquivalentResponse(
            equivalent=eq, conjugator=None if G is None else ser.matrix_to_json(G))

    @app.post("/triangularize", response_model=sc.TriangularizeResponse)
    def triangularize_endpoint(req: sc.ClassifyRequest):
        if req.variety == "S":
            G = triangularize_S(s_quad(req.quadruple))
        else:
            G = triangularize_pair(n_quad(req.quadruple))
        return sc.TriangularizeResponse(g=ser.matrix_to_json(G),
                                        g_inverse=ser.matrix_to_json(inverse(G)))

    @app.post("/deform", response_model=sc.QuadrupleModel)
    def deform_endpoint(req: sc.DeformRequest):
        q = s_quad(req.quadruple)
        tau = q.field.parse(req.tau)
        out = s_deform(q, tau, r=req.r)
        return sc.QuadrupleModel(**ser.squadruple_to_json(out))

    @app.post("/slice/build", response_model=sc.QuadrupleModel)
    def slice_build_endpoint(req: sc.SliceBuildRequest):
        data = ser.slice_data_from_json(req.model_dump())
        return sc.QuadrupleModel(**ser.quadruple_to_json(build_slice_point(data)))

    @app.post("/slice/regular", response_model=sc.QuadrupleModel)
    def slice_regular_endpoint(req: sc.SliceRegularRequest):
        params = ser.regular_slice_params_from_json(req.model_dump())
        return sc.QuadrupleModel(**ser.quadruple_to_json(regular_slice_point(params)))

    @app.post("/slice/jump", response_model=sc.SliceJumpResponse)
    def slice_jump_endpoint(req: sc.SliceJumpRequest):
        out, t = stratum_jump_sample(n_quad(req.quadruple), req.seed)
        return sc.SliceJumpResponse(
            quadruple=sc.QuadrupleModel(**ser.quadruple_to_json(out)), t=t)

    @app.post("/s-canonical", response_model=sc.QuadrupleModel)
    def s_canonical_endpoint(req: sc.SCanonicalRequest):
        f = field_from_json(req.field.model_dump())
        corner = None
        if req.corner is not None:
            corner = ser.matrix_from_json(f, req.corner, req.r, req.n - req.r)
        q = s_canonical(f, req.n, req.r, corner)
        return sc.QuadrupleModel(**ser.squadruple_to_json(q))

    @app.post("/trace-pairing", response_model=sc.TracePairingResponse)
    def trace_pairing_endpoint(req: sc.TracePairingRequest):
        return sc.TracePairingResponse(
            ok=trace_pairing_check(s_quad(req.quadruple), req.maxlen))

    @app.post("/census", response_model=sc.CensusResponse)
    def census_endpoint(req: sc.CensusRequest):
        fn = enumerate_S if req.variety == "S" else enumerate_N
        records = fn(req.n, req.q, stratified=req.stratified, jobs=req.jobs)
        return sc.CensusResponse(records=[
            sc.CensusRecordModel(**ser.census_record_to_json(rec)) for rec in records])

    @app.post("/slope", response_model=sc.SlopeResponse)
    def slope_endpoint(req: sc.SlopeRequest):
        records = [ser.census_record_from_json(m.model_dump()) for m in req.records]
        est = dimension_slope(filter_records(records, req.filter))
        return sc.SlopeResponse(**ser.slope_estimate_to_json(est))

    return app


app = create_app()
