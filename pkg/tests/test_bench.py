import json
import os

import pytest

from vqe_bench.bench import (
    BenchRecord,
    DataFileError,
    comparison_table,
    emit_comparison,
    initdata,
    known_ansatz,
    load_record,
    record_path,
    rounddata,
    run_sweep,
    save_record,
    savedata,
)
from vqe_bench.cli import main
from vqe_bench.driver import OptimizerConfig
from vqe_bench.hamiltonian import bundled_molecule

FAST_CFG = OptimizerConfig(gradient_tolerance=1e-6)


class TestInitData:
    def test_skeleton_contents(self, tmp_path):
        record = initdata("H4", [0.8, 1.0], tmp_path)
        assert record.bond_lengths == [0.8, 1.0]
        assert record.energies == {}
        on_disk = load_record(record_path(tmp_path, "H4"))
        assert on_disk.energies == {}
        assert on_disk.fci == [None, None]

    def test_reinit_without_force_refused(self, tmp_path):
        initdata("H4", [0.8], tmp_path)
        before = record_path(tmp_path, "H4").read_bytes()
        with pytest.raises(DataFileError, match="exists"):
            initdata("H4", [0.9], tmp_path)
        assert record_path(tmp_path, "H4").read_bytes() == before
        initdata("H4", [0.9], tmp_path, force=True)  # force clobbers

    def test_savedata_adds_exactly_one_key(self, tmp_path):
        initdata("H4", [0.8, 1.0], tmp_path)
        path = record_path(tmp_path, "H4")
        record = savedata(path, "UCCSD", 1.0, -2.1, 3.5, 14)
        assert list(record.energies) == ["UCCSD"]
        assert record.energies["UCCSD"] == [None, -2.1]
        assert record.runtimes["UCCSD"] == [None, 3.5]
        assert record.n_params["UCCSD"] == [None, 14]


class TestSaveData:
    def test_round_trip(self, tmp_path):
        initdata("X", [1.0], tmp_path)
        path = record_path(tmp_path, "X")
        savedata(path, "A", 1.0, -1.25, 0.5, 3)
        loaded = load_record(path)
        assert loaded.energies["A"] == [-1.25]

    def test_sequential_writes_preserved(self, tmp_path):
        initdata("X", [1.0], tmp_path)
        path = record_path(tmp_path, "X")
        savedata(path, "A", 1.0, -1.0)
        savedata(path, "B", 1.0, -2.0)
        loaded = load_record(path)
        assert loaded.energies == {"A": [-1.0], "B": [-2.0]}

    def test_unknown_bond_length(self, tmp_path):
        initdata("X", [1.0], tmp_path)
        with pytest.raises(ValueError, match="unknown bond length"):
            savedata(record_path(tmp_path, "X"), "A", 9.9, -1.0)

    def test_malformed_file_refused(self, tmp_path):
        path = record_path(tmp_path, "X")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("{ not json")
        with pytest.raises(DataFileError, match="not valid JSON"):
            savedata(path, "A", 1.0, -1.0)
        assert path.read_text() == "{ not json"  # never overwritten

    def test_crash_safe_write(self, tmp_path, monkeypatch):
        initdata("X", [1.0], tmp_path)
        path = record_path(tmp_path, "X")
        before = path.read_bytes()
        record = load_record(path)
        record.slot("energies", "A")[0] = -1.0

        def boom(src, dst):
            raise OSError("simulated crash")

        monkeypatch.setattr(os, "replace", boom)
        with pytest.raises(OSError):
            save_record(record, path)
        monkeypatch.undo()
        assert path.read_bytes() == before
        assert list(path.parent.glob("*.tmp")) == []
        load_record(path)  # still parses

    def test_serialization_byte_stable(self, tmp_path):
        initdata("X", [1.0, 2.0], tmp_path)
        path = record_path(tmp_path, "X")
        savedata(path, "A", 1.0, -1.234567890123, 0.25, 7)
        text = path.read_text()
        reparsed = BenchRecord.from_dict(json.loads(text))
        assert reparsed.serialize() == text
        assert load_record(path).to_dict() == reparsed.to_dict()


class TestRoundData:
    def base_record(self):
        return BenchRecord(molecule="X", bond_lengths=[1.0],
                           energies={"A": [-1.137283]},
                           fci=[-1.137283], hf=[-1.1], ccsd=None,
                           runtimes={"A": [0.123456]},
                           n_params={"A": [5]})

    def test_half_even_rounding(self):
        record = rounddata(self.base_record(), 4)
        assert record.energies["A"] == [-1.1373]
        assert record.fci == [-1.1373]

    def test_half_even_at_zero_decimals(self):
        record = self.base_record()
        record.energies["A"] = [-0.5]
        rounded = rounddata(record, 0)
        assert rounded.energies["A"][0] == 0.0  # half-to-even picks 0

    def test_runtimes_untouched(self):
        record = rounddata(self.base_record(), 2)
        assert record.runtimes["A"] == [0.123456]

    def test_idempotent(self):
        once = rounddata(self.base_record(), 3)
        twice = rounddata(once, 3)
        assert once.to_dict() == twice.to_dict()

    def test_negative_decimals_rejected(self):
        with pytest.raises(ValueError):
            rounddata(self.base_record(), -1)


class TestRunSweep:
    def test_h2_sweep_and_failure_tolerance(self, tmp_path):
        spec = bundled_molecule("H2")
        record = run_sweep(spec, ["UCCSD", "9-UpCCGSD"], FAST_CFG, seed=5,
                           data_dir=tmp_path, threads=2)
        fci = record.fci[0]
        assert abs(record.energies["UCCSD"][0] - fci) < 1e-7
        assert record.n_params["UCCSD"] == [2]
        assert record.runtimes["UCCSD"][0] > 0
        # 9 blocks of generalized pairs is fine, so it runs; use a truly
        # unknown name to exercise the per-point failure path
        record = run_sweep(spec, ["NOPE"], FAST_CFG, seed=5,
                           data_dir=tmp_path, threads=1)
        assert record.energies["NOPE"] == [None]

    def test_sweep_determinism(self, tmp_path):
        spec = bundled_molecule("H2")
        a = run_sweep(spec, ["UCCSD", "BRC"], FAST_CFG, seed=3,
                      data_dir=tmp_path / "a", threads=2)
        b = run_sweep(spec, ["UCCSD", "BRC"], FAST_CFG, seed=3,
                      data_dir=tmp_path / "b", threads=1)
        assert a.energies == b.energies
        assert a.n_params == b.n_params

    def test_lock_rejects_concurrent_sweep(self, tmp_path):
        spec = bundled_molecule("H2")
        initdata("H2", spec.bond_lengths, tmp_path)
        lock = record_path(tmp_path, "H2").with_suffix(".json.lock")
        lock.write_text("123")
        with pytest.raises(DataFileError, match="another sweep"):
            run_sweep(spec, ["UCCSD"], FAST_CFG, seed=0, data_dir=tmp_path)
        lock.unlink()
        run_sweep(spec, ["BRC"], FAST_CFG, seed=0, data_dir=tmp_path)
        assert not lock.exists()  # released after the sweep

    def test_mismatched_bond_lengths_refused(self, tmp_path):
        initdata("H2", [9.0], tmp_path)
        with pytest.raises(DataFileError, match="disagree"):
            run_sweep(bundled_molecule("H2"), ["UCCSD"], FAST_CFG, seed=0,
                      data_dir=tmp_path)


class TestEmitComparison:
    def record_with_data(self):
        return BenchRecord(
            molecule="X", bond_lengths=[1.0, 2.0],
            energies={"A": [-1.0, -2.0], "B": [-1.001, None]},
            fci=[-1.0, -2.0], hf=[-0.9, -1.9],
            ccsd=[-1.1, -2.1],
            runtimes={"A": [0.5, 0.75]},
            n_params={"A": [4, 4]})

    def test_zero_errors_when_energies_match_fci(self):
        record = self.record_with_data()
        record.energies = {"A": [-1.0, -2.0]}
        record.ccsd = None
        columns, rows = comparison_table(record, "errors")
        assert columns == ["bond_length", "A_error",
                           "chem_acc_lower", "chem_acc_upper"]
        assert [row[1] for row in rows] == [0.0, 0.0]

    def test_band_columns(self):
        _, rows = comparison_table(self.record_with_data(), "errors")
        for row in rows:
            assert row[-2] == -0.0016
            assert row[-1] == 0.0016

    def test_ccsd_column_included_and_may_go_below_fci(self):
        columns, rows = comparison_table(self.record_with_data(), "errors")
        ccsd_col = columns.index("CCSD_error")
        assert rows[0][ccsd_col] == pytest.approx(-0.1)

    def test_missing_fci_rejected(self):
        record = self.record_with_data()
        record.fci = [None, -2.0]
        with pytest.raises(DataFileError, match="fci"):
            comparison_table(record, "errors")

    def test_untouched_points_emit_null_rows(self):
        record = BenchRecord(molecule="X", bond_lengths=[1.0, 2.0],
                             energies={"A": [-1.0, None]},
                             fci=[-1.0, None], hf=[-0.9, None])
        _, rows = comparison_table(record, "errors")
        assert rows[0][1] == 0.0
        assert rows[1][1] is None

    def test_params_kind(self):
        record = BenchRecord(molecule="X", bond_lengths=[1.0, 2.0],
                             n_params={"BRC": [4, 4]},
                             fci=[-1.0, -2.0], hf=[-0.9, -1.9])
        columns, rows = comparison_table(record, "params")
        assert columns == ["bond_length", "BRC"]
        assert [row[1] for row in rows] == [4, 4]

    def test_csv_json_equivalence(self):
        record = self.record_with_data()
        csv_text = emit_comparison(record, "errors", "csv")
        payload = json.loads(emit_comparison(record, "errors", "json"))
        lines = csv_text.strip().split("\n")
        assert lines[0].split(",") == payload["columns"]
        for line, row in zip(lines[1:], payload["rows"]):
            cells = line.split(",")
            for cell, value in zip(cells, row):
                if value is None:
                    assert cell == ""
                else:
                    assert float(cell) == pytest.approx(value, abs=1e-15)

    def test_column_order_is_sorted(self):
        record = self.record_with_data()
        record.energies["0-first"] = [None, None]
        columns, _ = comparison_table(record, "errors")
        names = [c[:-6] for c in columns[1:-2]]
        assert names == sorted(names)


class TestAnsatzRegistry:
    def test_known_names(self):
        for name in ("UCCSD", "UCCSD0", "QUCC", "1-UpCCGSD", "7-UpCCGSD",
                     "HEA", "LDCA", "BRC", "ADAPT", "qubit-ADAPT", "QCC"):
            assert known_ansatz(name)
        assert not known_ansatz("NOPE")
        assert not known_ansatz("k-UpCCGSD")


class TestCli:
    def test_full_workflow(self, tmp_path):
        data_dir = str(tmp_path / "data")
        assert main(["init", "--molecule", "H2", "--data-dir", data_dir]) == 0
        assert main(["fci", "--molecule", "H2", "--data-dir", data_dir]) == 0
        assert main(["run", "--molecule", "H2", "--ansatz", "UCCSD",
                     "--data-dir", data_dir, "--seed", "1"]) == 0
        assert main(["record", "--molecule", "H2", "--reference", "ccsd",
                     "--bond-length", "0.7414", "--energy", "-1.1372",
                     "--data-dir", data_dir]) == 0
        out = tmp_path / "errors.csv"
        assert main(["compare", "--molecule", "H2", "--kind", "errors",
                     "--data-dir", data_dir, "--output", str(out)]) == 0
        header = out.read_text().splitlines()[0]
        assert header.startswith("bond_length,CCSD_error,UCCSD_error")
        assert header.endswith("chem_acc_lower,chem_acc_upper")

    def test_usage_error_exit_code(self, tmp_path):
        assert main(["run", "--molecule", "H2", "--ansatz", "NOPE",
                     "--data-dir", str(tmp_path)]) == 1
        assert main(["init", "--molecule", "UNOBTANIUM",
                     "--data-dir", str(tmp_path)]) == 1

    def test_data_file_error_exit_code(self, tmp_path):
        assert main(["compare", "--molecule", "H2",
                     "--data-dir", str(tmp_path / "void")]) == 2
        data_dir = str(tmp_path / "data")
        main(["init", "--molecule", "H2", "--data-dir", data_dir])
        assert main(["init", "--molecule", "H2", "--data-dir", data_dir]) == 2

    def test_record_bad_bond_length_is_usage_error(self, tmp_path):
        data_dir = str(tmp_path / "data")
        main(["init", "--molecule", "H2", "--data-dir", data_dir])
        assert main(["record", "--molecule", "H2", "--ansatz", "UCCSD",
                     "--bond-length", "9.9", "--energy", "-1.0",
                     "--data-dir", data_dir]) == 1

    def test_dump_hamiltonian(self, tmp_path):
        out = tmp_path / "h2.txt"
        assert main(["dump-hamiltonian", "--molecule", "H2",
                     "--bond-length", "0.7414", "--output", str(out)]) == 0
        from vqe_bench.operators import load_qubit_operator

        op = load_qubit_operator(out.read_text())
        assert len(op) == 15

    def test_env_threads_parsing(self, monkeypatch):
        from vqe_bench.cli import resolve_threads

        monkeypatch.setenv("VQE_BENCH_THREADS", "7")
        assert resolve_threads(None) == 7
        assert resolve_threads(2) == 2
        monkeypatch.delenv("VQE_BENCH_THREADS")
        assert resolve_threads(None) == 4
