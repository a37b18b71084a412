"""HTTP serving endpoint for subscription-time estimation.

Endpoints (HTTP/1.1, JSON bodies, UTF-8):

    POST /v1/predict  {household fields}  -> {car_kwh, monthly_installment_eur}
    POST /v1/explain  {household fields}  -> {car_kwh, trace}   (409 unless the
                                              loaded model is explainable)
    GET  /v1/model                        -> {kind, version, schema}

Status codes: 400 malformed JSON, 422 schema-valid JSON with invalid or
unknown field values, 404 unknown route, 405 wrong method.

The monthly installment is car_kwh * unit_price / 12, rounded half-up to
cents. The unit price comes from PriceConfig, overridable with the
HEARTHCAST_UNIT_PRICE environment variable.

Requests are served concurrently against an immutable model snapshot;
reload_model swaps the snapshot atomically, so in-flight requests finish
on the model they started with.
"""

from __future__ import annotations

import json
import os
import threading
from decimal import Decimal, ROUND_HALF_UP
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .data import CATEGORY_SETS, HouseholdRecord, feature_schema
from .errors import DataError
from .jsonio import dumps_canonical
from .metrics import PriceConfig
from .models import FORMAT_VERSION, ConstrainedTreeModel, ForecastModel, load_model

_IGNORED_FIELDS = ("observed_kwh", "car_kwh")  # targets, meaningless for predict
_NUMERIC_FIELDS = {"surface_m2": float, "occupants": int, "max_power_kva": int, "reading_days": int}


def env_price(default: PriceConfig | None = None) -> PriceConfig:
    """PriceConfig honoring the HEARTHCAST_UNIT_PRICE override."""
    raw = os.environ.get("HEARTHCAST_UNIT_PRICE")
    if raw is None:
        return default or PriceConfig()
    try:
        return PriceConfig(unit_price_eur_per_kwh=float(raw))
    except ValueError as err:
        raise DataError(f"invalid HEARTHCAST_UNIT_PRICE {raw!r}: {err}")


def record_from_fields(fields: dict) -> HouseholdRecord:
    """Validate a JSON body against the record schema (CSV field names)."""
    if not isinstance(fields, dict):
        raise DataError("request body must be a JSON object of household fields")
    known = set(_NUMERIC_FIELDS) | set(CATEGORY_SETS)
    unknown = [k for k in fields if k not in known and k not in _IGNORED_FIELDS]
    if unknown:
        raise DataError(f"unknown fields {sorted(unknown)}")
    values: dict = {}
    for name, cast in _NUMERIC_FIELDS.items():
        if name not in fields:
            if name == "reading_days":
                values[name] = 0
                continue
            raise DataError(f"missing field {name!r}")
        raw = fields[name]
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise DataError(f"{name} must be a number, got {raw!r}")
        if cast is int and float(raw) != int(raw):
            raise DataError(f"{name} must be an integer, got {raw!r}")
        values[name] = cast(raw)
    for name in CATEGORY_SETS:
        if name not in fields:
            raise DataError(f"missing field {name!r}")
        raw = fields[name]
        if not isinstance(raw, str) or raw not in CATEGORY_SETS[name]:
            raise DataError(f"unknown category {raw!r} for {name}")
        values[name] = raw
    return HouseholdRecord(**values)


def monthly_installment_eur(car_kwh: float, price: PriceConfig) -> float:
    """Yearly cost spread over 12 equal payments, rounded half-up to cents."""
    yearly = Decimal(repr(car_kwh)) * Decimal(repr(price.unit_price_eur_per_kwh))
    monthly = (yearly / Decimal(12)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return float(monthly)


class ServeState:
    """Immutable (model, price) snapshot holder with atomic replacement."""

    def __init__(self, model: ForecastModel, price: PriceConfig):
        self._lock = threading.Lock()
        self._snapshot = (model, price)

    @property
    def snapshot(self) -> tuple[ForecastModel, PriceConfig]:
        return self._snapshot  # single reference read: atomic under the GIL

    def reload_model(self, path: str) -> None:
        model = load_model(path)  # parse fully before swapping
        with self._lock:
            self._snapshot = (model, self._snapshot[1])


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    state: ServeState  # set by make_server

    def log_message(self, format, *args):  # quiet by default
        pass

    def _send(self, status: int, payload: dict) -> None:
        body = dumps_canonical(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_record(self) -> HouseholdRecord | None:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length)
        try:
            fields = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as err:
            self._send(400, {"error": f"malformed JSON: {err}"})
            return None
        try:
            return record_from_fields(fields)
        except DataError as err:
            self._send(422, {"error": str(err)})
            return None

    def do_GET(self):
        if self.path != "/v1/model":
            self._send(404, {"error": f"no such route {self.path}"})
            return
        model, _price = self.state.snapshot
        self._send(200, {"kind": model.kind, "version": FORMAT_VERSION, "schema": feature_schema()})

    def do_POST(self):
        if self.path not in ("/v1/predict", "/v1/explain"):
            self._send(404, {"error": f"no such route {self.path}"})
            return
        model, price = self.state.snapshot
        if self.path == "/v1/explain" and not isinstance(model, ConstrainedTreeModel):
            # consume the body so keep-alive stays coherent
            self.rfile.read(int(self.headers.get("Content-Length") or 0))
            self._send(409, {"error": f"model kind {model.kind!r} has no explanation traces"})
            return
        record = self._read_record()
        if record is None:
            return
        if self.path == "/v1/predict":
            car = model.predict_record(record)
            self._send(
                200,
                {"car_kwh": car, "monthly_installment_eur": monthly_installment_eur(car, price)},
            )
        else:
            car, trace = model.predict_explain(record)
            self._send(200, {"car_kwh": car, "trace": trace.to_dict()})


def make_server(model_path: str, port: int, price: PriceConfig | None = None) -> ThreadingHTTPServer:
    """Build (but do not start) the threaded HTTP server."""
    state = ServeState(load_model(model_path), env_price(price))
    handler = type("BoundHandler", (_Handler,), {"state": state})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.state = state  # reachable for hot reload
    return server


def serve(model_path: str, port: int, price: PriceConfig | None = None) -> None:
    server = make_server(model_path, port, price)
    host, bound_port = server.server_address[:2]
    print(f"serving {model_path} on http://{host}:{bound_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
