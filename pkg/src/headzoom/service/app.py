"""FastAPI wrapper around the core package.

REST endpoints expose the batch pipeline (calibrate, synthesize, replay,
metrics, stats); the /ws endpoint carries the live session protocol with
one frame per text message. One server hosts one engine session: the
first socket that speaks becomes the pose producer, any number of other
sockets receive the broadcast VIEW/RESULT stream.
"""
from __future__ import annotations

import asyncio
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .. import __version__
from ..calibration import CalibrationError, CalibrationProfile, calibrate
from ..geometry import DegeneratePoseError
from ..metrics import compute_report
from ..modes import EngineConfig, EngineError, replay
from ..stats import MetricTable, StatsError, analyze, report_text, report_tsv
from ..trace_io import BadScriptError, TraceParseError, TrialValidationError, parse_script, synthesize_trace
from .models import (
    CalibrateRequest,
    MetricsRequest,
    MetricsResponse,
    PoseModel,
    ProfileModel,
    ReplayRequest,
    ReplayResponse,
    StatsRequest,
    StatsResponse,
    SynthesizeRequest,
    SynthesizeResponse,
    ViewModel,
)
from .session import Session

_DOMAIN_ERRORS = (
    CalibrationError,
    DegeneratePoseError,
    EngineError,
    TraceParseError,
    TrialValidationError,
    BadScriptError,
    StatsError,
    ValueError,
)


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=f"{type(exc).__name__}: {exc}")


class SessionHub:
    """Connection registry for the single live session."""

    def __init__(self, session: Session):
        self.session = session
        self.clients: dict[int, WebSocket] = {}
        self.producer_id: int | None = None
        self._next_id = 0
        self._lock = asyncio.Lock()

    async def register(self, ws: WebSocket) -> int:
        async with self._lock:
            self._next_id += 1
            self.clients[self._next_id] = ws
            return self._next_id

    async def unregister(self, client_id: int) -> None:
        async with self._lock:
            self.clients.pop(client_id, None)
            if self.producer_id == client_id:
                # engine simply holds its last state until a producer returns
                self.producer_id = None

    async def broadcast(self, frames: list[str]) -> None:
        for frame in frames:
            stale = []
            for cid, ws in list(self.clients.items()):
                try:
                    await ws.send_text(frame)
                except Exception:
                    stale.append(cid)
            for cid in stale:
                await self.unregister(cid)

    async def handle(self, client_id: int, ws: WebSocket, line: str) -> None:
        if self.producer_id is None:
            self.producer_id = client_id
        if self.producer_id != client_id:
            await ws.send_text("ERR another producer is connected")
            return
        frames = self.session.handle_line(line)
        errors = [f for f in frames if f.startswith("ERR ")]
        rest = [f for f in frames if not f.startswith("ERR ")]
        for frame in errors:  # errors go to the sender only
            await ws.send_text(frame)
        await self.broadcast(rest)


def create_app(
    config: EngineConfig | None = None,
    profile: CalibrationProfile | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="headzoom", version=__version__)
    hub = SessionHub(Session(config, profile))
    app.state.hub = hub

    if frontend_dir is not None and Path(frontend_dir, "index.html").exists():
        app.mount("/app", StaticFiles(directory=frontend_dir, html=True), name="app")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/api/calibrate", response_model=ProfileModel)
    def api_calibrate(req: CalibrateRequest) -> ProfileModel:
        try:
            profile = calibrate(
                [p.to_pose() for p in req.neutral],
                [p.to_pose() for p in req.forward],
                [p.to_pose() for p in req.backward],
            )
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc)
        return ProfileModel.from_profile(profile)

    @app.post("/api/synthesize", response_model=SynthesizeResponse)
    def api_synthesize(req: SynthesizeRequest) -> SynthesizeResponse:
        try:
            script = parse_script(req.script)
            trace = synthesize_trace(
                script, req.profile.to_profile() if req.profile else None
            )
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc)
        return SynthesizeResponse(
            trace=[PoseModel.from_pose(s) for s in trace.samples], rate_hz=trace.rate_hz
        )

    @app.post("/api/replay", response_model=ReplayResponse)
    def api_replay(req: ReplayRequest) -> ReplayResponse:
        try:
            config = req.config.to_config() if req.config else EngineConfig(mode="static")
            profile = req.profile.to_profile() if req.profile else None
            views = replay((p.to_pose() for p in req.trace), config, profile)
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc)
        return ReplayResponse(views=[ViewModel.from_view(v) for v in views])

    @app.post("/api/metrics", response_model=MetricsResponse)
    def api_metrics(req: MetricsRequest) -> MetricsResponse:
        try:
            report = compute_report(
                req.trial.to_trial(),
                [p.to_pose() for p in req.trace],
                [v.to_record() for v in req.views],
                req.profile.to_profile(),
                hit_radius_uv=req.hit_radius_uv
                if req.hit_radius_uv is not None
                else 105.0 / 2800.0,
                zoom_epsilon=req.zoom_epsilon,
            )
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc)
        return MetricsResponse(
            participant=report.participant,
            mode=report.mode,
            image_id=report.image_id,
            completion_time_s=report.completion_time_s,
            total_head_movement_m=report.total_head_movement_m,
            total_head_rotation_rad=report.total_head_rotation_rad,
            avg_head_movement_m=report.avg_head_movement_m,
            avg_head_rotation_rad=report.avg_head_rotation_rad,
            max_lean_m=report.max_lean_m,
            hover_time_s=report.hover_time_s,
            zoom_change_count=report.zoom_change_count,
            total_zoom_distance=report.total_zoom_distance,
            avg_zoom=report.avg_zoom,
            max_zoom=report.max_zoom,
            false_positives=report.false_positives,
            success=report.success,
            image_user_grade=report.image_user_grade,
        )

    @app.post("/api/stats", response_model=StatsResponse)
    def api_stats(req: StatsRequest) -> StatsResponse:
        try:
            table = MetricTable.from_wide_tsv(req.table_tsv)
            report = analyze(table)
        except _DOMAIN_ERRORS as exc:
            raise _bad_request(exc)
        return StatsResponse(
            empty=report.empty,
            report_tsv=report_tsv(report),
            report_text=report_text(report),
        )

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket) -> None:
        await ws.accept()
        client_id = await hub.register(ws)
        try:
            while True:
                line = await ws.receive_text()
                await hub.handle(client_id, ws, line)
        except WebSocketDisconnect:
            pass
        finally:
            await hub.unregister(client_id)

    return app
