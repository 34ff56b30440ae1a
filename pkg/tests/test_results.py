import json

import pytest

from ddsim.results import (
    Record,
    ResultError,
    ResultSet,
    build_manifest,
    read_result_dir,
    records_from_csv,
    records_to_csv,
    report_csv,
    write_result_dir,
)


def sample_records():
    records = []
    for seq in ("FREE", "XY4"):
        for n in (0, 4):
            for qubit in ("0", "1"):
                for state in ("haar00", "z+"):
                    records.append(
                        Record(
                            sequence=seq, tau=1, qubit=qubit, state=state,
                            n_pulses=n, shots=128,
                            fidelity=0.9 - 0.01 * n + (0.005 if seq == "XY4" else 0.0),
                        )
                    )
    return records


class TestRecordsCsv:
    def test_roundtrip(self):
        records = sample_records()
        again = records_from_csv(records_to_csv(records))
        assert again == records

    def test_float_repr_is_shortest_roundtrip(self):
        text = records_to_csv(
            [Record(sequence="FREE", tau=1, qubit="0", state="z+",
                    n_pulses=0, shots=10, fidelity=0.1 + 0.2)]
        )
        assert "0.30000000000000004" in text

    def test_header_is_enforced(self):
        with pytest.raises(ResultError):
            records_from_csv("a,b,c\n1,2,3\n")

    def test_bell_row_roundtrip(self):
        rec = Record(
            sequence="XY4", tau=2, qubit="0+1", state="phi+", n_pulses=8,
            shots=0, p00=0.5, p01=0.0, p10=0.0, p11=0.5,
        )
        again = records_from_csv(records_to_csv([rec]))[0]
        assert again == rec
        assert again.fidelity is None


class TestResultSet:
    def test_duplicate_cells_rejected(self):
        rec = sample_records()[0]
        rs = ResultSet(records=[rec, rec])
        with pytest.raises(ResultError):
            rs.validate()

    def test_manifest_contents(self):
        manifest = build_manifest({"kind": "TYPE1_SWEEP"}, seed=42)
        assert manifest["seed"] == 42
        assert manifest["spec"] == {"kind": "TYPE1_SWEEP"}
        assert manifest["suite_version"]
        assert "ibmqx5.csv" in manifest["fixture_checksums"]
        assert all(len(v) == 64 for v in manifest["fixture_checksums"].values())

    def test_write_and_read_dir(self, tmp_path):
        rs = ResultSet(records=sample_records(), manifest=build_manifest({"kind": "BELL"}, 7))
        out = tmp_path / "run"
        write_result_dir(rs, str(out))
        again = read_result_dir(str(out))
        assert again.records == rs.records
        assert again.manifest["seed"] == 7
        assert again.manifest["record_count"] == len(rs.records)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["schema"].startswith("ddsim/run-manifest")

    def test_missing_dir(self, tmp_path):
        with pytest.raises(ResultError):
            read_result_dir(str(tmp_path / "nope"))


class TestReport:
    def test_row_count_matches_aggregates(self):
        records = sample_records()
        text = report_csv(records, resamples=100, seed=0)
        lines = text.strip().splitlines()
        assert lines[0] == "sequence,N,tau,mean_fidelity,ci_halfwidth"
        # aggregates: 2 sequences x 2 pulse counts (states and qubits pooled)
        assert len(lines) - 1 == 4

    def test_bell_rows_expand_outcomes(self):
        records = [
            Record(sequence="XY4", tau=1, qubit="0+1", state="phi+", n_pulses=4,
                   shots=0, p00=0.5, p01=0.0, p10=0.0, p11=0.5),
        ]
        text = report_csv(records, resamples=50, seed=0)
        lines = text.strip().splitlines()[1:]
        labels = [line.split(",")[0] for line in lines]
        assert labels == [f"XY4@phi+:{p}" for p in ("p00", "p01", "p10", "p11")]

    def test_angle_sweep_keeps_state_in_label(self):
        records = [
            Record(sequence="FREE", tau=1, qubit="0", state="theta03",
                   n_pulses=40, shots=10, fidelity=0.8),
            Record(sequence="FREE", tau=1, qubit="1", state="theta03",
                   n_pulses=40, shots=10, fidelity=0.9),
        ]
        text = report_csv(records, resamples=50, seed=0)
        lines = text.strip().splitlines()[1:]
        assert len(lines) == 1
        assert lines[0].startswith("FREE@theta03,40,1,")

    def test_deterministic(self):
        records = sample_records()
        assert report_csv(records, resamples=200, seed=1) == report_csv(
            records, resamples=200, seed=1
        )
