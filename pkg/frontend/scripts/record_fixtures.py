"""Record wire fixtures for the frontend tests from a live server.

Trains the toy model, starts the annotation server on a free port,
replays the requests the UI tests make, and stores the raw response
bodies under tests/fixtures/.  Golden export files are written with
the corpus serializers so the client's export code can be checked
byte for byte.
"""

import json
import pathlib
import threading
import urllib.request

from chunklet.codec import encode_tree
from chunklet.corpus import format_tagged, format_tree, parse_bracketed
from chunklet.estimators import MaxentPartialParser
from chunklet.model_io import load_model, save_model
from chunklet.server import make_server

HERE = pathlib.Path(__file__).resolve().parent
FIXTURES = HERE.parent / "tests" / "fixtures"

TOY_CORPUS = (
    "(NP (ART _) (NN _))\n"
    "(NP (ART _) (ADJA _) (NN _))\n"
    "(NP (ART _) (NN _))\n"
    "(PP (APPR _) (NP (ART _) (NN _)))\n"
    "(PP (APPR _) (NP (ART _) (ADJA _) (NN _)))\n"
    "(PP (APPR _) (NP (ART _) (NN _)))\n"
) * 4

REQUESTS = {
    "parse_span_pp.json": (
        "/v1/parse-span",
        {"pos": ["APPR", "ART", "NN"], "words": ["auf", "dem", "Berg"]},
    ),
    "parse_span_np.json": (
        "/v1/parse-span",
        {"pos": ["ART", "NN"], "words": ["die", "Katze"]},
    ),
    "parse_span_bare.json": ("/v1/parse-span", {"pos": ["ART", "NN"]}),
    "parse_sentence.json": (
        "/v1/chunk",
        {
            "pos": ["ART", "NN", "VVFIN", "APPR", "ART", "NN"],
            "words": ["die", "Katze", "schläft", "auf", "dem", "Berg"],
        },
    ),
}

# the session the export tests build: two accepted chunks of one sentence
EXPORT_TREES = [
    "(NP (ART die) (NN Katze))",
    "(PP (APPR auf) (NP (ART dem) (NN Berg)))",
]


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    corpus = [parse_bracketed(line) for line in TOY_CORPUS.splitlines()]
    model_path = HERE / "toy.model"
    save_model(MaxentPartialParser(iterations=6).fit(corpus).as_model(), model_path)

    server = make_server(load_model(model_path), port=0, quiet=True)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    try:
        for name, (path, body) in REQUESTS.items():
            request = urllib.request.Request(
                base + path,
                data=json.dumps(body).encode("utf-8"),
                method="POST",
                headers={"Content-Type": "application/json"},
            )
            with urllib.request.urlopen(request) as response:
                (FIXTURES / name).write_bytes(response.read())
            print(f"recorded {name}")
        with urllib.request.urlopen(base + "/v1/model") as response:
            (FIXTURES / "model_info.json").write_bytes(response.read())
        print("recorded model_info.json")
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)

    trees = [parse_bracketed(line) for line in EXPORT_TREES]
    bracketed = "".join(format_tree(t) + "\n" for t in trees)
    (FIXTURES / "export_session.brackets").write_text(bracketed, encoding="utf-8")
    columnar = format_tagged([encode_tree(t) for t in trees])
    (FIXTURES / "export_session.tags").write_text(columnar, encoding="utf-8")
    model_path.unlink()
    print("recorded export_session.{brackets,tags}")


if __name__ == "__main__":
    main()
