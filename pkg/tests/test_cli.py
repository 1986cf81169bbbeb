"""CLI thin client: subcommands, config-file merge, and the HTTP path."""
import socket
import threading
import time

import pytest
from click.testing import CliRunner

from ciftn.cli import _parse_ebn0, main


@pytest.fixture
def runner():
    return CliRunner()


class TestParsing:
    def test_range_form(self):
        assert _parse_ebn0("0:1:3") == [0.0, 1.0, 2.0, 3.0]
        assert _parse_ebn0("2:0.5:3") == [2.0, 2.5, 3.0]

    def test_list_form(self):
        assert _parse_ebn0("1,2.5,7") == [1.0, 2.5, 7.0]


class TestSe:
    def test_reference_values(self, runner):
        r = runner.invoke(main, ["se", "--tau", "0.45"])
        assert r.exit_code == 0
        assert "ci_ftn,0.45,0.3,1,1.71" in r.output
        assert "nyquist_qpsk,1,0.3,2,1.54" in r.output


class TestTrace:
    def test_writes_csv(self, runner, tmp_path):
        out = tmp_path / "trace.csv"
        r = runner.invoke(main, ["trace", "--out", str(out)])
        assert r.exit_code == 0
        text = out.read_text()
        assert text.startswith("quantity,index,value")
        assert "zeta,,0.819" in text


class TestIsiTable:
    def test_writes_csv_and_reports_deviations(self, runner, tmp_path):
        out = tmp_path / "table.csv"
        r = runner.invoke(main, ["isi-table", "--isi-len", "10", "--out", str(out)])
        assert r.exit_code == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 7
        assert "ref" in r.output  # per-row deviation report on stderr


class TestBer:
    def test_runs_and_writes_csv(self, runner, tmp_path):
        out = tmp_path / "ber.csv"
        r = runner.invoke(
            main,
            ["ber", "--mode", "nyquist_bpsk", "--ebn0", "4:2:6", "--min-errors", "120",
             "--seed", "3", "--out", str(out)],
        )
        assert r.exit_code == 0, r.output
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "ebn0_db,bits,errors,ber,ci_halfwidth"
        assert len(lines) == 3

    def test_frames_flag_caps_bits(self, runner, tmp_path):
        out = tmp_path / "ber.csv"
        r = runner.invoke(
            main,
            ["ber", "--mode", "nyquist_bpsk", "--ebn0", "0", "--frames", "4",
             "--min-errors", "100", "--allow-low-errors", "--out", str(out)],
        )
        assert r.exit_code == 0, r.output
        # stop rule rounds to the 64-frame batch, so at most one round runs
        bits = int(out.read_text().strip().splitlines()[1].split(",")[1])
        assert bits == 64 * 672

    def test_config_file_defaults_and_flag_priority(self, runner, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("mode = nyquist_bpsk\nebn0 = 4:2:6\nmin_errors = 120\nseed = 3\n")
        out1 = tmp_path / "a.csv"
        r = runner.invoke(main, ["ber", "--config", str(cfg), "--out", str(out1)])
        assert r.exit_code == 0, r.output
        out2 = tmp_path / "b.csv"
        r = runner.invoke(
            main, ["ber", "--config", str(cfg), "--ebn0", "4", "--out", str(out2)]
        )
        assert r.exit_code == 0
        assert len(out1.read_text().strip().splitlines()) == 3  # header + 2 points
        assert len(out2.read_text().strip().splitlines()) == 2  # flag overrode the file

    def test_unknown_config_key_rejected(self, runner, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("warp = 9\n")
        r = runner.invoke(main, ["ber", "--config", str(cfg)])
        assert r.exit_code != 0

    def test_invalid_config_reports_error(self, runner):
        r = runner.invoke(main, ["ber", "--mode", "conventional_ftn", "--ebn0", "4"])
        assert r.exit_code != 0
        assert "pairwise" in r.output


class TestServerPath:
    def test_thin_client_against_live_service(self, runner):
        import uvicorn

        from ciftn.service.app import app

        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            port = s.getsockname()[1]
        config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
        server = uvicorn.Server(config)
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        try:
            deadline = time.time() + 10
            while not server.started:
                if time.time() > deadline:
                    pytest.fail("service did not start")
                time.sleep(0.05)
            r = runner.invoke(
                main, ["se", "--tau", "0.45", "--server", f"http://127.0.0.1:{port}"]
            )
            assert r.exit_code == 0, r.output
            assert "1.71" in r.output
        finally:
            server.should_exit = True
            thread.join(timeout=5)
