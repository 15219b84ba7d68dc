import json

import pytest

from gridwatch.cli import main
from gridwatch.store import PortalStore


@pytest.fixture()
def state_dir(tmp_path):
    d = tmp_path / "portal"
    d.mkdir()
    return d


def run(state_dir, *argv, capsys=None):
    code = main(["--state-dir", str(state_dir), *argv])
    if capsys is None:
        return code, None, None
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAddLsRm:
    def test_add_prints_id_and_persists(self, state_dir, capsys):
        code, out, _ = run(state_dir, "add", "node1.example.org", capsys=capsys)
        assert code == 0
        rid = out.strip()
        state = PortalStore(state_dir).load_state()
        assert state.get(rid).hostname == "node1.example.org"

    def test_ls_shows_resources(self, state_dir, capsys):
        run(state_dir, "add", "a.org", capsys=capsys)
        run(state_dir, "add", "b.org", capsys=capsys)
        code, out, _ = run(state_dir, "ls", capsys=capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 2
        assert "a.org" in out and "b.org" in out
        assert "UNKNOWN" in out

    def test_rm_removes(self, state_dir, capsys):
        _, out, _ = run(state_dir, "add", "a.org", capsys=capsys)
        rid = out.strip()
        code, _, _ = run(state_dir, "rm", rid, capsys=capsys)
        assert code == 0
        assert PortalStore(state_dir).load_state().resources == []

    def test_rm_unknown_fails(self, state_dir, capsys):
        code, _, err = run(state_dir, "rm", "nope", capsys=capsys)
        assert code == 1
        assert err.startswith("gridwatch:")

    def test_add_blank_hostname_fails(self, state_dir, capsys):
        code, _, err = run(state_dir, "add", "  ", capsys=capsys)
        assert code == 1
        assert "hostname" in err


class TestSet:
    def test_set_fields(self, state_dir, capsys):
        _, out, _ = run(state_dir, "add", "a.org", capsys=capsys)
        rid = out.strip()
        code, _, _ = run(
            state_dir, "set", rid,
            "type=tcp-probe", "port=22", "label=login node",
            "lat=49.5", "lon=16.25", "enabled=false",
            capsys=capsys,
        )
        assert code == 0
        r = PortalStore(state_dir).load_state().get(rid)
        assert r.type == "tcp-probe"
        assert r.port == 22
        assert r.label == "login node"
        assert (r.location.lat, r.location.lon) == (49.5, 16.25)
        assert r.enabled is False

    def test_set_unknown_field_fails(self, state_dir, capsys):
        _, out, _ = run(state_dir, "add", "a.org", capsys=capsys)
        code, _, err = run(state_dir, "set", out.strip(), "warp=9", capsys=capsys)
        assert code == 1
        assert "unknown field" in err

    def test_set_bad_latitude_fails(self, state_dir, capsys):
        _, out, _ = run(state_dir, "add", "a.org", capsys=capsys)
        code, _, err = run(state_dir, "set", out.strip(), "lat=123", capsys=capsys)
        assert code == 1
        assert "lat" in err

    def test_set_missing_equals_fails(self, state_dir, capsys):
        _, out, _ = run(state_dir, "add", "a.org", capsys=capsys)
        code, _, err = run(state_dir, "set", out.strip(), "port", capsys=capsys)
        assert code == 1
        assert "key=value" in err


class TestExportImport:
    def test_round_trip(self, state_dir, tmp_path, capsys):
        _, out, _ = run(state_dir, "add", "a.org", capsys=capsys)
        rid = out.strip()
        run(state_dir, "set", rid, "type=http-xml", "endpoint=http://a.org/info",
            capsys=capsys)
        code, out, _ = run(state_dir, "export", capsys=capsys)
        assert code == 0
        exported = json.loads(out)

        other = tmp_path / "other"
        other.mkdir()
        dump = tmp_path / "dump.json"
        dump.write_text(json.dumps(exported))
        code, _, _ = run(other, "import", str(dump), capsys=capsys)
        assert code == 0
        restored = PortalStore(other).load_state()
        assert restored.to_dict() == exported

    def test_import_rejects_bad_payload(self, state_dir, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"version": 1, "resources": [{"id": "x"}]}')
        code, _, err = run(state_dir, "import", str(bad), capsys=capsys)
        assert code == 1
        assert err.startswith("gridwatch:")

    def test_import_missing_file_fails(self, state_dir, capsys):
        code, _, err = run(state_dir, "import", "/no/such/file.json", capsys=capsys)
        assert code == 1
        assert err.startswith("gridwatch:")


class TestDelegation:
    def test_monitor_once_runs_a_cycle(self, state_dir, capsys):
        run(state_dir, "add", "a.org", capsys=capsys)
        code, out, _ = run(state_dir, "monitor", "--once", capsys=capsys)
        assert code == 0
        report = json.loads(out.strip().splitlines()[-1])
        assert len(report["outcomes"]) == 1

    def test_simgrid_bad_scenario_fails(self, state_dir, capsys):
        code = main(["simgrid", "serve", "/no/such/scenario.json"])
        assert code == 1
