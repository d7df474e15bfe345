"""FastAPI service exposing the pipeline over HTTP.

Endpoints operate on paths visible to the server process (a shared media
store), mirroring the CLI subcommands one to one. Run it with::

    uvicorn memcrop.service.app:app
    # or: memcrop serve --host 0.0.0.0 --port 8000
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, stages
from ..errors import MemcropError
from ..pipeline import PipelineManifest, run_pipeline
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="memcrop", version=__version__)

    @app.exception_handler(MemcropError)
    async def memcrop_error_handler(request: Request, exc: MemcropError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"detail": str(exc), "kind": type(exc).__name__},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/saliency", response_model=schemas.SaliencyResponse)
    def saliency(req: schemas.SaliencyRequest) -> schemas.SaliencyResponse:
        summaries = stages.saliency_stage(
            req.video_roots,
            req.backend.to_config(),
            threshold_k=req.threshold_k,
            stride=req.stride,
            offset=req.sample_offset,
            out_dir=req.out_dir,
        )
        return schemas.SaliencyResponse(
            videos=[
                schemas.VideoSaliencyModel(
                    video_id=s.video_id,
                    width=s.width,
                    height=s.height,
                    frames=[
                        schemas.FrameSaliencyModel(
                            frame_index=f.frame_index,
                            centroid_x=f.centroid_x,
                            centroid_y=f.centroid_y,
                            area=f.area,
                        )
                        for f in s.frames
                    ],
                    map_paths=list(s.map_paths),
                )
                for s in summaries
            ]
        )

    @app.post("/plan", response_model=schemas.PlanResponse)
    def plan(req: schemas.PlanRequest) -> schemas.PlanResponse:
        trajectories = stages.plan_stage(
            req.video_roots,
            req.saliency.to_config(),
            req.plan.to_config(),
            stride=req.stride,
            offset=req.sample_offset,
            centroid_on_mask=req.centroid_on_mask,
            out_dir=req.out_dir,
        )
        return schemas.PlanResponse(
            trajectories=[
                schemas.TrajectoryModel(
                    video_id=t.video_id,
                    src_width=t.src_width,
                    src_height=t.src_height,
                    strategy=t.strategy,
                    fallback=t.fallback,
                    rects=[
                        schemas.RectModel(frame_index=i, x=r.x, y=r.y, w=r.w, h=r.h)
                        for i, r in t.rects
                    ],
                )
                for t in trajectories
            ]
        )

    @app.post("/render", response_model=schemas.RenderResponse)
    def render(req: schemas.RenderRequest) -> schemas.RenderResponse:
        results = stages.render_stage(
            [(job.frames_dir, job.trajectory) for job in req.jobs],
            req.render.to_config(),
            req.out_root,
        )
        return schemas.RenderResponse(
            videos=[schemas.RenderedVideoModel(**r) for r in results]
        )

    @app.post("/score", response_model=schemas.ScoreResponse)
    def score(req: schemas.ScoreRequest) -> schemas.ScoreResponse:
        scores = stages.score_stage(
            req.video_roots,
            req.scorer.to_config(),
            stride=req.stride,
            offset=req.sample_offset,
            out_csv=req.out_csv,
            per_frame_csv=req.per_frame_csv,
        )
        return schemas.ScoreResponse(
            scores=[schemas.VideoScoreModel(video_id=v, score=s) for v, s in scores]
        )

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(req: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
        records = stages.evaluate_stage(req.before_csv, req.after_csv, out_csv=req.out_csv)
        improved = sum(1 for r in records if r.delta > 0)
        decreased = sum(1 for r in records if r.delta < 0)
        return schemas.EvaluateResponse(
            records=[
                schemas.EvaluationRecordModel(
                    video_id=r.video_id,
                    score_before=r.score_before,
                    score_after=r.score_after,
                    delta=r.delta,
                )
                for r in records
            ],
            improved=improved,
            decreased=decreased,
            unchanged=len(records) - improved - decreased,
        )

    @app.post("/report", response_model=schemas.ReportResponse)
    def report(req: schemas.ReportRequest) -> schemas.ReportResponse:
        outputs = stages.report_stage(
            req.evaluation_csv,
            req.out_dir,
            thresholds=tuple(req.thresholds),
            label=req.label,
            compare_csv=req.compare_csv,
            compare_labels=req.compare_labels,
        )
        return schemas.ReportResponse(outputs={k: str(v) for k, v in outputs.items()})

    @app.post("/run", response_model=schemas.RunResponse)
    def run(req: schemas.RunRequest) -> schemas.RunResponse:
        manifest = PipelineManifest(
            video_roots=tuple(req.video_roots),
            output_root=req.output_root,
            plan=req.plan.to_config(),
            render=req.render.to_config(),
            scorer=req.scorer.to_config(),
            saliency=req.saliency.to_config(),
            stride=req.stride,
            sample_offset=req.sample_offset,
            centroid_on_mask=req.centroid_on_mask,
            workers=req.workers,
            fail_fast=req.fail_fast,
            save_frames=req.save_frames,
            thresholds=tuple(req.thresholds),
        )
        result = run_pipeline(manifest)
        improved, decreased, unchanged = result.partition
        return schemas.RunResponse(
            processed=len(result.records),
            improved=improved,
            decreased=decreased,
            unchanged=unchanged,
            failures=[
                schemas.FailureModel(video_id=v, error=e) for v, e in result.failures
            ],
            outputs={k: str(v) for k, v in result.outputs.items()},
        )

    return app


app = create_app()
