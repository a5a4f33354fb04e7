import json
from pathlib import Path

import httpx
import pytest

from mrplan.llm.client import (
    AuthenticationError,
    BackendConfig,
    BackendError,
    ChatClient,
    ScriptedBackend,
    TokenLimitError,
    TransportError,
    load_script,
)


def reply(text, finish="stop"):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}, "finish_reason": finish}]})


def client(handler, **cfg):
    seen = []

    def record(request):
        seen.append(request)
        return handler(request)

    c = ChatClient(BackendConfig(api_key_env="MRPLAN_TEST_KEY", **cfg),
                   transport=httpx.MockTransport(record), sleep=lambda s: None)
    return c, seen


@pytest.fixture(autouse=True)
def api_key(monkeypatch):
    monkeypatch.setenv("MRPLAN_TEST_KEY", "sk-test")


def test_happy_path_sends_chat_body():
    c, seen = client(lambda r: reply("plan { }"), model="m1", temperature=0.0, max_tokens=77)
    assert c.complete("hello") == "plan { }"
    body = json.loads(seen[0].content)
    assert body == {"model": "m1", "messages": [{"role": "user", "content": "hello"}],
                    "temperature": 0.0, "max_tokens": 77}
    assert seen[0].headers["authorization"] == "Bearer sk-test"
    assert c.calls == [{"prompt": "hello", "response": "plan { }", "attempts": 1}]


def test_retries_then_transport_error():
    def boom(request):
        raise httpx.ConnectError("refused", request=request)

    delays = []
    c, seen = client(boom, retries=2, backoff=(0.5, 1.5))
    c.sleep = delays.append
    with pytest.raises(TransportError) as exc:
        c.complete("x")
    assert len(seen) == 3 and exc.value.attempts == 3
    assert delays == [0.5, 1.5]


def test_server_error_recovers_on_retry():
    responses = iter([httpx.Response(503), httpx.Response(429), reply("ok")])
    c, seen = client(lambda r: next(responses), retries=2)
    assert c.complete("x") == "ok"
    assert c.calls[0]["attempts"] == 3


def test_missing_key_fails_before_any_request(monkeypatch):
    monkeypatch.delenv("MRPLAN_TEST_KEY")
    c, seen = client(lambda r: reply("never"))
    with pytest.raises(AuthenticationError, match="MRPLAN_TEST_KEY"):
        c.complete("x")
    assert seen == []


def test_rejected_credentials_are_not_retried():
    c, seen = client(lambda r: httpx.Response(401, json={"error": {"message": "bad key"}}), retries=2)
    with pytest.raises(AuthenticationError):
        c.complete("x")
    assert len(seen) == 1


def test_token_limits():
    c, _ = client(lambda r: reply("plan {", finish="length"))
    with pytest.raises(TokenLimitError, match="truncated"):
        c.complete("x")
    c, _ = client(lambda r: httpx.Response(400, json={"error": {"code": "context_length_exceeded"}}))
    with pytest.raises(TokenLimitError):
        c.complete("x")


def test_malformed_payloads():
    c, _ = client(lambda r: httpx.Response(200, json={"nothing": True}))
    with pytest.raises(BackendError, match="malformed"):
        c.complete("x")
    c, _ = client(lambda r: httpx.Response(200, text="<html>"))
    with pytest.raises(BackendError, match="not JSON"):
        c.complete("x")


def test_config_from_toml(tmp_path):
    path = tmp_path / "b.toml"
    path.write_text('[backend]\nkind = "scripted"\nmodel = "m"\nretries = 4\nbackoff = [0.1, 0.2]\n'
                    'script = "replies.json"\n')
    cfg = BackendConfig.from_toml(path)
    assert (cfg.kind, cfg.model, cfg.retries, cfg.backoff) == ("scripted", "m", 4, (0.1, 0.2))
    assert cfg.script == str(tmp_path / "replies.json")
    assert cfg.delay(5) == 0.2
    path.write_text("[backend]\ncolour = 'red'\n")
    with pytest.raises(ValueError, match="colour"):
        BackendConfig.from_toml(path)


def test_shipped_configs_load():
    root = Path(__file__).resolve().parent.parent / "configs"
    assert BackendConfig.from_toml(root / "mock.toml").kind == "oracle-mock"
    assert BackendConfig.from_toml(root / "backend.example.toml").kind == "http"


def test_config_validation():
    with pytest.raises(ValueError):
        BackendConfig(kind="carrier-pigeon")
    with pytest.raises(ValueError):
        BackendConfig(retries=-1)


def test_scripted_backend_replies_verbatim():
    b = ScriptedBackend(["  one\n", "two"])
    assert b.complete("p1") == "  one\n"
    assert b.complete("p2") == "two"
    assert b.prompts == ["p1", "p2"]
    with pytest.raises(BackendError, match="exhausted"):
        b.complete("p3")


def test_load_script(tmp_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"el01": ["a", "b"]}))
    assert load_script(path, "el01") == ["a", "b"]
    with pytest.raises(BackendError):
        load_script(path, "el02")
    path.write_text(json.dumps(["x"]))
    assert load_script(path) == ["x"]
