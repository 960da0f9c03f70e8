"""FastAPI application wiring the handlers to routes.

Input problems map to 400, numerical failures (ill-conditioning, rank
deficiency) to 422; everything else is left to the framework.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import InputError, NumericalError
from . import handlers, schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="pkexplain",
        description="Exact Shapley attributions for product-kernel predictors, "
        "MMD and HSIC.",
    )

    @app.exception_handler(InputError)
    async def _input_error(request: Request, exc: InputError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(NumericalError)
    async def _numerical_error(request: Request, exc: NumericalError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/healthz", response_model=schemas.HealthResponse)
    def healthz():
        return handlers.health()

    @app.post("/explain", response_model=schemas.ExplainResponse)
    def explain(req: schemas.ExplainRequest):
        return handlers.explain(req)

    @app.post("/mmd", response_model=schemas.AttributionDoc)
    def mmd(req: schemas.MmdRequest):
        return handlers.mmd(req)

    @app.post("/hsic", response_model=schemas.HsicResponse, response_model_exclude_none=True)
    def hsic(req: schemas.HsicRequest):
        return handlers.hsic(req)

    @app.post("/fit", response_model=schemas.ModelDoc)
    def fit(req: schemas.FitRequest):
        return handlers.fit(req)

    @app.post("/datagen/linear", response_model=schemas.GenLinearResponse)
    def datagen_linear(req: schemas.GenLinearRequest):
        return handlers.datagen_linear(req)

    @app.post("/datagen/nonlinear", response_model=schemas.GenNonlinearResponse)
    def datagen_nonlinear(req: schemas.GenNonlinearRequest):
        return handlers.datagen_nonlinear(req)

    @app.post("/datagen/mmd-pair", response_model=schemas.GenMmdPairResponse)
    def datagen_mmd_pair(req: schemas.GenMmdPairRequest):
        return handlers.datagen_mmd_pair(req)

    return app


app = create_app()
