"""Annotation HTTP server.

Stateless JSON service over one immutable model:

  POST /v1/parse-span  decode POS tags; body {"pos": [...], "words": [...]?,
                       "mode": "span" | "sentence", "source": ...?}
  POST /v1/chunk       same body, always sentence mode
  GET  /v1/model       tagset, labels, feature count, training iterations
  POST /v1/save        append one tagged item to the columnar file named
                       by --allow-write; 403 unless that flag was given

Responses carry the structural tags, the bracketed tree, repair
diagnostics, per-position candidate counts and any unknown POS tags.
Bodies are UTF-8 JSON with sorted keys, so replaying a request yields
byte-identical responses.
"""

from __future__ import annotations

import argparse
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional, Sequence

from .codec import decode_tags
from .corpus import COLUMNAR_HEADER, format_tagged, format_tree
from .decoder import decode_sequence, decode_span
from .errors import ChunkletError
from .model_io import ParserModel, load_model
from .tags import NO_CAT, REL_VALUES, StructuralTag, TagSequence
from .trees import validate_tree

DEFAULT_PORT = 8311


class RequestProblem(Exception):
    """Client-side request defect; maps to a 4xx response."""

    def __init__(self, message: str, status: int = 400):
        super().__init__(message)
        self.status = status


def _as_string_list(value, name: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise RequestProblem(f"field {name!r} must be a list of strings")
    return value


class AnnotationService:
    """Pure request handlers; the HTTP layer only does transport."""

    def __init__(self, model: Optional[ParserModel], write_path: Optional[str]):
        self.model = model
        self.write_path = write_path
        self._write_lock = threading.Lock()

    def _require_model(self) -> ParserModel:
        if self.model is None:
            raise ChunkletError("no model loaded")
        return self.model

    def parse_span(self, body: dict, force_sentence: bool = False) -> dict:
        model = self._require_model()
        if not isinstance(body, dict):
            raise RequestProblem("request body must be a JSON object")
        pos = _as_string_list(body.get("pos"), "pos")
        if not pos:
            raise RequestProblem("empty span: field 'pos' must be non-empty")
        words = body.get("words")
        if words is not None:
            words = _as_string_list(words, "words")
            if len(words) != len(pos):
                raise RequestProblem("'words' and 'pos' differ in length")
        mode = "sentence" if force_sentence else body.get("mode", "span")
        if mode not in ("span", "sentence"):
            raise RequestProblem(f"unknown mode {mode!r}")
        source = body.get("source")
        if source is not None and not isinstance(source, str):
            raise RequestProblem("field 'source' must be a string")
        try:
            scorer = model.scorer(source)
        except ValueError as exc:
            raise RequestProblem(str(exc)) from exc

        decode = decode_sequence if mode == "sentence" else decode_span
        seq, score = decode(pos, model.inventory, scorer, words)
        result = decode_tags(seq.tags, seq.words)
        validate_tree(result.tree)
        unknown = sorted({p for p in pos if p not in model.inventory.by_pos})
        return {
            "tags": [
                {"pos": t.pos, "rel": t.rel, "cat": t.cat} for t in seq.tags
            ],
            "words": list(seq.words) if seq.words else None,
            "tree": format_tree(result.tree),
            "repairs": [
                {
                    "index": r.index,
                    "tag": [r.tag.pos, r.tag.rel, r.tag.cat],
                    "reason": r.reason,
                }
                for r in result.repairs
            ],
            "candidates": [
                len(model.inventory.candidates(p)) for p in pos
            ],
            "unknown_tags": unknown,
            "mode": mode,
            "score": score,
        }

    def model_info(self) -> dict:
        model = self._require_model()
        labels = sorted(
            {
                t.cat
                for tags in model.inventory.by_pos.values()
                for t in tags
                if t.cat != NO_CAT
            }
        )
        return {
            "tagset": sorted(model.inventory.by_pos),
            "labels": labels,
            "features": model.feature_count,
            "iterations": int(model.metadata.get("iterations", 0)),
            "sources": [
                name
                for name, present in (
                    ("maxent", model.maxent is not None),
                    ("interpolation", model.interpolation is not None),
                )
                if present
            ],
            "mode": model.metadata.get("mode", "chunking"),
        }

    def save(self, body: dict) -> dict:
        self._require_model()
        if self.write_path is None:
            raise RequestProblem(
                "saving is disabled; restart with --allow-write", status=403
            )
        if not isinstance(body, dict):
            raise RequestProblem("request body must be a JSON object")
        rows = body.get("tags")
        if not isinstance(rows, list) or not rows:
            raise RequestProblem("field 'tags' must be a non-empty list")
        tags = []
        for row in rows:
            if (
                not isinstance(row, list)
                or len(row) != 3
                or not all(isinstance(c, str) for c in row)
            ):
                raise RequestProblem("each tag must be [pos, rel, cat]")
            if row[1] not in REL_VALUES:
                raise RequestProblem(f"unknown rel symbol {row[1]!r}")
            tags.append(StructuralTag(row[0], row[1], row[2]))
        words = body.get("words")
        if words is not None:
            words = _as_string_list(words, "words")
            if len(words) != len(tags):
                raise RequestProblem("'words' and 'tags' differ in length")
        seq = TagSequence(tuple(tags), tuple(words) if words else None)
        block = format_tagged([seq])
        body_lines = block[len(COLUMNAR_HEADER) + 1 :]
        with self._write_lock:
            path = Path(self.write_path)
            if path.exists() and path.stat().st_size > 0:
                with open(path, "a", encoding="utf-8") as handle:
                    handle.write("\n" + body_lines)
            else:
                path.write_text(block, encoding="utf-8")
        return {"appended": 1, "path": str(self.write_path)}


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def service(self) -> AnnotationService:
        return self.server.service  # type: ignore[attr-defined]

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        if getattr(self.server, "quiet", False):
            return
        super().log_message(format, *args)

    def _send_json(self, status: int, payload: dict) -> None:
        data = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _send_error(self, status: int, message: str) -> None:
        self._send_json(status, {"error": message})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise RequestProblem("request body is empty")
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise RequestProblem(f"body is not valid JSON: {exc}") from exc

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:
        if self.path != "/v1/model":
            self._send_error(404, f"unknown path {self.path}")
            return
        try:
            self._send_json(200, self.service.model_info())
        except ChunkletError as exc:
            self._send_error(503, str(exc))

    def do_POST(self) -> None:
        routes = {
            "/v1/parse-span": lambda b: self.service.parse_span(b),
            "/v1/chunk": lambda b: self.service.parse_span(b, force_sentence=True),
            "/v1/save": self.service.save,
        }
        handler = routes.get(self.path)
        if handler is None:
            self._send_error(404, f"unknown path {self.path}")
            return
        try:
            body = self._read_body()
            self._send_json(200, handler(body))
        except RequestProblem as exc:
            self._send_error(exc.status, str(exc))
        except ChunkletError as exc:
            self._send_error(503, str(exc))
        except Exception as exc:  # pragma: no cover - last-resort guard
            self._send_error(500, f"internal error: {exc}")


def make_server(
    model: Optional[ParserModel],
    port: int = 0,
    allow_write: Optional[str] = None,
    host: str = "127.0.0.1",
    quiet: bool = False,
) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), _Handler)
    server.service = AnnotationService(model, allow_write)  # type: ignore[attr-defined]
    server.quiet = quiet  # type: ignore[attr-defined]
    return server


def run(
    model_path: str,
    port: int = DEFAULT_PORT,
    allow_write: Optional[str] = None,
    host: str = "127.0.0.1",
) -> int:
    model = load_model(model_path)
    server = make_server(model, port=port, allow_write=allow_write, host=host)
    mode = "read-only" if allow_write is None else f"writing to {allow_write}"
    print(f"serving on http://{host}:{server.server_address[1]} ({mode})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="chunklet-server", description="Annotation HTTP server."
    )
    parser.add_argument("--model", required=True, help="model file")
    parser.add_argument("--port", type=int, default=DEFAULT_PORT)
    parser.add_argument(
        "--allow-write",
        dest="allow_write",
        default=None,
        help="enable POST /v1/save appending to this columnar file",
    )
    args = parser.parse_args(argv)
    try:
        return run(args.model, port=args.port, allow_write=args.allow_write)
    except ChunkletError as exc:
        print(f"chunklet-server: error: {exc}")
        return 2


if __name__ == "__main__":
    import sys

    sys.exit(main())
