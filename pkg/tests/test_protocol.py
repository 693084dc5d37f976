"""Session phases, wire envelopes, pipe and HTTP transports."""

import io
import json
import threading
import urllib.error
import urllib.request

import pytest

from splkit.protocol import Session, dumps, parse_features_payload
from splkit.server import make_http_server, run_pipe
from conftest import GOLDEN


def minimal_payload():
    return {
        "method": "features",
        "artifacts": [
            {
                "id": "a1",
                "tags": [],
                "provides": [{"k": "x"}],
                "requires": {"all": [], "not": [], "any": [], "one": []},
                "variables": {},
            }
        ],
        "features": [{"name": "F1", "artifacts": ["a1"], "tags": []}],
        "globals": {},
    }


def rename_payload():
    return {
        "method": "features",
        "artifacts": [
            {"id": "add", "provides": [{"syntax": "@Sum"}],
             "requires": {"all": [{"syntax": "@Term"}, {"syntax": "@Expr"}]}},
            {"id": "wrap", "provides": [{"syntax": "@Expr"}],
             "requires": {"all": [{"syntax": "@AddExpr"}]}},
            {"id": "term", "provides": [{"syntax": "@Term"}]},
        ],
        "features": [
            {"name": "Additive", "artifacts": ["add"]},
            {"name": "Wrapper", "artifacts": ["wrap"]},
            {"name": "Term", "artifacts": ["term"]},
        ],
        "globals": {"Sum": "Sum", "Term": "Term", "Expr": "Expr", "AddExpr": "AddExpr"},
    }


# -- loading -------------------------------------------------------------------


def test_minimal_load():
    session = Session()
    response = session.dispatch(minimal_payload())
    assert response["method"] == "featureModel" and response["ok"]
    assert [(n["name"], n["kind"]) for n in response["nodes"]] == [
        ("F1", "concrete"),
        ("root", "root"),
    ]
    assert response["dependencies"] == []
    assert response["active"] == ["root"]
    assert session.phase == "Loaded"


def test_every_feature_appears_exactly_once(rotlog_session):
    payload = rotlog_session.feature_model_payload()
    names = [n["name"] for n in payload["nodes"] if n["kind"] == "concrete"]
    assert len(names) == len(set(names)) == 13


def test_unknown_artifact_ref_keeps_session_empty():
    session = Session()
    payload = minimal_payload()
    payload["features"][0]["artifacts"] = ["ghost"]
    response = session.dispatch(payload)
    assert not response["ok"] and response["error"] == "UnknownArtifactRef"
    assert session.phase == "Empty"


def test_duplicate_names_rejected():
    session = Session()
    payload = minimal_payload()
    payload["features"].append(payload["features"][0])
    response = session.dispatch(payload)
    assert not response["ok"] and response["error"] == "DuplicateName"


def test_schema_errors():
    session = Session()
    assert session.dispatch({"method": "features"})["error"] == "SchemaError"
    assert session.dispatch({"no": "method"})["error"] == "SchemaError"
    assert session.dispatch({"method": "bogus"})["error"] == "SchemaError"
    payload = minimal_payload()
    payload["features"][0]["artifacts"] = []
    assert session.dispatch(payload)["error"] == "SchemaError"
    payload = minimal_payload()
    payload["artifacts"][0]["provides"] = [{"k": "@Ghost"}]
    assert session.dispatch(payload)["error"] == "SchemaError"


def test_parse_features_payload_roundtrip():
    artifacts, features, globals_table = parse_features_payload(rename_payload())
    assert set(artifacts) == {"add", "wrap", "term"}
    assert [f.name for f in features] == ["Additive", "Wrapper", "Term"]
    assert globals_table.lookup("Sum") == "Sum"


def test_reload_replaces_session(rotlog_session):
    response = rotlog_session.dispatch(minimal_payload())
    assert response["ok"]
    assert [n["name"] for n in response["nodes"] if n["kind"] == "concrete"] == ["F1"]


# -- phase gating ----------------------------------------------------------------


def test_requests_before_load_fail():
    session = Session()
    for envelope in (
        {"method": "activate", "feature": "x"},
        {"method": "updateAttribute", "feature": None, "attribute": "a", "value": "v"},
        {"method": "validate"},
        {"method": "commit"},
    ):
        response = session.dispatch(envelope)
        assert not response["ok"] and response["error"] == "PhaseError"


def test_commit_gate(rotlog_session):
    session = rotlog_session
    assert session.dispatch({"method": "commit"})["error"] == "NotValidated"
    session.dispatch({"method": "activate", "feature": "rot.Parameter"})
    verdict = session.dispatch({"method": "validate"})
    assert verdict["valid"]
    # any mutation spoils the verdict until the next validate
    session.dispatch({"method": "activate", "feature": "visit:preorder"})
    assert session.dispatch({"method": "commit"})["error"] == "NotValidated"
    assert session.dispatch({"method": "validate"})["valid"]
    response = session.dispatch({"method": "commit"})
    assert response["ok"] and session.phase == "Committed"


def test_commit_payload_totality(rotlog_session):
    session = rotlog_session
    session.dispatch({"method": "activate", "feature": "rot.Parameter"})
    session.dispatch({"method": "validate"})
    response = session.dispatch({"method": "commit"})
    # full global table present even though everything is at its default
    assert response["globals"] == {"Cmd": "Cmd", "Program": "Program", "String": "String", "Task": "Task"}
    assert response["locals"] == {}  # Parameter declares no variables


def test_commit_hook_receives_payload(rotlog_session):
    seen = []
    rotlog_session.on_commit = seen.append
    rotlog_session.dispatch({"method": "activate", "feature": "rot.Parameter"})
    rotlog_session.dispatch({"method": "validate"})
    rotlog_session.dispatch({"method": "commit"})
    assert seen and "rot.Parameter" in seen[0]["active"]


# -- updateAttribute ---------------------------------------------------------------


def test_global_rename_produces_edge_delta():
    session = Session()
    assert session.dispatch(rename_payload())["ok"]
    response = session.dispatch(
        {"method": "updateAttribute", "feature": None, "attribute": "Sum", "value": "AddExpr"}
    )
    assert response["ok"]
    assert {"from": "Wrapper", "to": "Additive", "kind": "all", "atom": "syntax=AddExpr", "group": None} in response["added"]
    assert session.phase == "Configuring"


def test_noop_update_empty_delta(rotlog_session):
    response = rotlog_session.dispatch(
        {"method": "updateAttribute", "feature": None, "attribute": "Task", "value": "Task"}
    )
    assert response == {"method": "updateAttribute", "ok": True, "added": [], "removed": []}


def test_priority_change_never_touches_edges(rotlog_session):
    response = rotlog_session.dispatch(
        {
            "method": "updateAttribute",
            "feature": "rot.Backup.eval",
            "attribute": "priority",
            "value": "5",
        }
    )
    assert response == {"method": "updateAttribute", "ok": True, "added": [], "removed": []}
    payload = rotlog_session.feature_model_payload()
    node = next(n for n in payload["nodes"] if n["name"] == "rot.Backup.eval")
    assert node["attributes"] == {"order": "0", "priority": "5"}


def test_update_attribute_errors(rotlog_session):
    assert (
        rotlog_session.dispatch(
            {"method": "updateAttribute", "feature": "ghost", "attribute": "a", "value": "v"}
        )["error"]
        == "UnknownFeature"
    )
    assert (
        rotlog_session.dispatch(
            {"method": "updateAttribute", "feature": "rot.Backup", "attribute": "nope", "value": "v"}
        )["error"]
        == "UnknownAttribute"
    )
    assert (
        rotlog_session.dispatch(
            {"method": "updateAttribute", "feature": None, "attribute": "NotAGlobal", "value": "v"}
        )["error"]
        == "UnknownAttribute"
    )


# -- activate ------------------------------------------------------------------------


def test_activate_wire(rotlog_session):
    response = rotlog_session.dispatch({"method": "activate", "feature": "rot.Backup"})
    assert response["ok"]
    assert response["active"] == ["root", "rot.Backup", "rot.Parameter", "syntax", "syntax#2", "task"]


def test_activate_errors(rotlog_session):
    assert rotlog_session.dispatch({"method": "activate", "feature": "ghost"})["error"] == "UnknownFeature"
    assert rotlog_session.dispatch({"method": "activate", "feature": "root"})["error"] == "RootToggle"


# -- validate wire shape ----------------------------------------------------------------


def test_validate_wire_valid(rotlog_session):
    response = rotlog_session.dispatch({"method": "validate"})
    assert response == {
        "method": "validate",
        "ok": True,
        "valid": True,
        "problems": {},
        "suggestions": [],
    }


def test_validate_reports_markers_in_model(rotlog_session):
    payload = rotlog_session.feature_model_payload()
    by_name = {n["name"]: n for n in payload["nodes"]}
    assert by_name["rot.Backup"]["unsatisfiable"] == []
    # every requirement in the sample corpus has at least one provider
    assert all(n["unsatisfiable"] == [] for n in payload["nodes"])


# -- batch configuration -----------------------------------------------------------------


def test_load_configuration_adds_ancestors_and_root(rotlog_session):
    rotlog_session.load_configuration(
        {"active": ["rot.Parameter"], "locals": {}, "globals": {}}
    )
    assert rotlog_session.config.active == {"root", "syntax", "rot.Parameter"}
    verdict = rotlog_session.dispatch({"method": "validate"})
    assert verdict["valid"]


def test_load_configuration_rejects_unknowns(rotlog_session):
    from splkit.errors import UnknownAttribute, UnknownFeature

    with pytest.raises(UnknownFeature):
        rotlog_session.load_configuration({"active": ["ghost"]})
    with pytest.raises(UnknownAttribute):
        rotlog_session.load_configuration({"active": [], "globals": {"Nope": "x"}})


# -- transports ----------------------------------------------------------------------------


def golden_lines(name, direction):
    path = GOLDEN / "transcripts" / f"{name}.{direction}.ndjson"
    return path.read_text(encoding="utf-8").splitlines()


def test_pipe_transport_replays_golden_transcripts():
    for name in ("load", "configure", "commit"):
        stdin = io.StringIO((GOLDEN / "transcripts" / f"{name}.in.ndjson").read_text(encoding="utf-8"))
        stdout = io.StringIO()
        run_pipe(Session(), stdin, stdout)
        assert stdout.getvalue() == (GOLDEN / "transcripts" / f"{name}.out.ndjson").read_text(encoding="utf-8")


def test_pipe_transport_bad_json_line():
    stdout = io.StringIO()
    run_pipe(Session(), io.StringIO("not json\n"), stdout)
    response = json.loads(stdout.getvalue())
    assert not response["ok"] and response["error"] == "SchemaError"


@pytest.fixture
def http_server():
    server = make_http_server(Session(), "127.0.0.1", 0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()
    server.server_close()


def http_post(server, body: str) -> tuple[int, str]:
    host, port = server.server_address
    request = urllib.request.Request(
        f"http://{host}:{port}/rpc",
        data=body.encode("utf-8"),
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(request) as response:
            return response.status, response.read().decode("utf-8")
    except urllib.error.HTTPError as err:
        return err.code, err.read().decode("utf-8")


def test_http_transport_matches_pipe_envelopes(http_server):
    for request_line, expected in zip(golden_lines("configure", "in"), golden_lines("configure", "out")):
        status, body = http_post(http_server, request_line)
        assert status == 200
        assert body == expected


def test_http_get_model(http_server):
    host, port = http_server.server_address
    with urllib.request.urlopen(f"http://{host}:{port}/model") as response:
        empty = json.loads(response.read())
    assert not empty["ok"] and empty["error"] == "PhaseError"

    http_post(http_server, golden_lines("load", "in")[0])
    with urllib.request.urlopen(f"http://{host}:{port}/model") as response:
        assert response.read().decode("utf-8") == golden_lines("load", "out")[0]


def test_http_bad_json_is_400(http_server):
    status, body = http_post(http_server, "{broken")
    assert status == 400
    assert json.loads(body)["error"] == "SchemaError"


def test_http_cors_preflight(http_server):
    host, port = http_server.server_address
    request = urllib.request.Request(f"http://{host}:{port}/rpc", method="OPTIONS")
    with urllib.request.urlopen(request) as response:
        assert response.status == 204
        assert response.headers["Access-Control-Allow-Origin"] == "*"


def test_replaying_prefix_reproduces_state():
    requests = [json.loads(line) for line in golden_lines("commit", "in")]
    first = Session()
    responses_one = [first.dispatch(req) for req in requests]
    second = Session()
    responses_two = [second.dispatch(req) for req in requests]
    assert [dumps(r) for r in responses_one] == [dumps(r) for r in responses_two]
    assert first.config.active == second.config.active
