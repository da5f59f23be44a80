from __future__ import annotations

import json
import os

import pytest

from dynloc.experiments import (
    ProtocolSpec,
    SweepSpec,
    WORKERS_ENV_VAR,
    class_label,
    default_bundle,
    default_gauss_markov_bundle,
    parse_spec_file,
    read_provenance,
    read_summary,
    resolve_protocol_config,
    run_sweep,
    spec_from_dict,
    spec_to_dict,
    summarize,
    write_runs_csv,
    write_summary_csv,
)
from dynloc.protocols import DvmConfig, MadrdConfig, SfrConfig


def _tiny_spec(**overrides) -> SweepSpec:
    base = dict(
        speed_classes=((0.5, 1.0), (4.0, 5.0)),
        pause_times=(0.0, 30.0),
        protocols=(
            ProtocolSpec("sfr", "sfr", {"period": 2.0}),
            ProtocolSpec("madrd", "madrd", {"t_max": [10.0, 6.0]}),
        ),
        repetitions=2,
        duration=60.0,
        seed_base=77,
    )
    base.update(overrides)
    return SweepSpec(**base)


def _one_class_spec(**overrides) -> SweepSpec:
    base = dict(
        speed_classes=((4.0, 5.0),),
        pause_times=(0.0,),
        protocols=(
            ProtocolSpec("sfr", "sfr", {"period": 2.0}),
            ProtocolSpec("madrd", "madrd", {"t_max": 6.0}),
        ),
        repetitions=1,
        duration=60.0,
        seed_base=77,
    )
    base.update(overrides)
    return SweepSpec(**base)


# ---------------------------------------------------------------------------
# Spec container and parameter resolution
# ---------------------------------------------------------------------------


def test_class_label_format():
    assert class_label((0.5, 1.0)) == "0.5:1"
    assert class_label((8.0, 10.0)) == "8:10"


def test_resolve_scalar_params_apply_to_every_class():
    pspec = ProtocolSpec("sfr", "sfr", {"period": 2.0})
    for ci in range(3):
        cfg = resolve_protocol_config(pspec, ci, 3)
        assert isinstance(cfg, SfrConfig) and cfg.period == 2.0


def test_resolve_list_params_select_by_class_index():
    pspec = ProtocolSpec("madrd", "madrd", {"t_max": [10.0, 6.0, 1.5]})
    caps = [resolve_protocol_config(pspec, ci, 3).t_max for ci in range(3)]
    assert caps == [10.0, 6.0, 1.5]


def test_resolve_rejects_wrong_length_list():
    pspec = ProtocolSpec("dvm", "dvm", {"t_max": [10.0, 6.0]})
    with pytest.raises(ValueError, match="t_max"):
        resolve_protocol_config(pspec, 0, 3)


def test_resolve_rejects_unknown_parameter():
    pspec = ProtocolSpec("sfr", "sfr", {"cadence": 2.0})
    with pytest.raises(ValueError, match="cadence"):
        resolve_protocol_config(pspec, 0, 1)


def test_spec_validation_messages_name_the_field():
    with pytest.raises(ValueError, match="speed_classes"):
        _tiny_spec(speed_classes=())
    with pytest.raises(ValueError, match="repetitions"):
        _tiny_spec(repetitions=0)
    with pytest.raises(ValueError, match="mobility"):
        _tiny_spec(mobility="teleport")
    with pytest.raises(ValueError, match="speed_classes"):
        _tiny_spec(speed_classes=((5.0, 4.0),))
    with pytest.raises(ValueError, match="label"):
        _tiny_spec(
            protocols=(
                ProtocolSpec("x", "sfr", {}),
                ProtocolSpec("x", "dvm", {}),
            )
        )


def test_default_bundle_shape():
    spec = default_bundle()
    assert [class_label(c) for c in spec.speed_classes] == ["0.5:1", "4:5", "8:10"]
    assert spec.pause_times == (0.0, 30.0, 60.0, 120.0, 300.0)
    assert [p.kind for p in spec.protocols] == ["sfr", "dvm", "madrd"]
    assert spec.repetitions == 10
    madrd = spec.protocols[2]
    assert resolve_protocol_config(madrd, 2, 3).t_max < resolve_protocol_config(madrd, 0, 3).t_max


def test_default_gauss_markov_bundle_shape():
    spec = default_gauss_markov_bundle()
    assert spec.mobility == "gauss_markov"
    assert len(spec.speed_classes) == 1 and spec.pause_times == (0.0,)


# ---------------------------------------------------------------------------
# Sweep execution
# ---------------------------------------------------------------------------


def test_sweep_emits_one_record_per_cell_rep_protocol():
    spec = _tiny_spec()
    records = run_sweep(spec)
    assert len(records) == 2 * 2 * 2 * 2  # classes * pauses * protocols * reps
    keys = {(r.speed_class, r.pause_time, r.protocol, r.rep) for r in records}
    assert len(keys) == len(records)
    assert {r.speed_class for r in records} == {"0.5:1", "4:5"}


def test_sweep_pairs_protocols_on_identical_traces():
    records = run_sweep(_tiny_spec())
    by_cell_rep: dict[tuple, set[str]] = {}
    for r in records:
        by_cell_rep.setdefault((r.speed_class, r.pause_time, r.rep), set()).add(r.trace_sha)
    for shas in by_cell_rep.values():
        assert len(shas) == 1  # both protocols saw the same ground truth


def test_sweep_reps_use_distinct_traces():
    records = run_sweep(_tiny_spec())
    sfr = [r for r in records if r.protocol == "sfr" and r.speed_class == "4:5" and r.pause_time == 0.0]
    assert sfr[0].trace_sha != sfr[1].trace_sha
    assert sfr[0].noise_seed != sfr[1].noise_seed


def test_sweep_is_reproducible():
    spec = _tiny_spec()
    assert run_sweep(spec) == run_sweep(spec)


def test_sweep_changes_with_seed_base():
    a = run_sweep(_tiny_spec())
    b = run_sweep(_tiny_spec(seed_base=78))
    assert [r.trace_sha for r in a] != [r.trace_sha for r in b]


def test_sweep_parallel_equals_serial():
    spec = _tiny_spec()
    assert run_sweep(spec, workers=1) == run_sweep(spec, workers=2)


def test_sweep_worker_count_from_environment(monkeypatch):
    spec = _one_class_spec()
    monkeypatch.setenv(WORKERS_ENV_VAR, "2")
    from_env = run_sweep(spec)
    monkeypatch.setenv(WORKERS_ENV_VAR, "not-a-number")
    with pytest.raises(ValueError, match=WORKERS_ENV_VAR):
        run_sweep(spec)
    monkeypatch.delenv(WORKERS_ENV_VAR)
    assert from_env == run_sweep(spec)


def test_sweep_writes_one_events_file_per_run(tmp_path):
    spec = _tiny_spec(repetitions=1)
    events_dir = tmp_path / "events"
    run_sweep(spec, events_dir=events_dir)
    names = sorted(p.name for p in events_dir.iterdir())
    assert len(names) == 2 * 2 * 2  # classes * pauses * protocols, 1 rep
    assert "events_s0.5-1_p0_sfr_r0.csv" in names
    assert "events_s4-5_p30_madrd_r0.csv" in names


def test_gauss_markov_sweep_runs():
    spec = _tiny_spec(
        mobility="gauss_markov",
        speed_classes=((4.0, 5.0),),
        pause_times=(0.0,),
        repetitions=1,
        protocols=(ProtocolSpec("sfr", "sfr", {"period": 2.0}),),
    )
    records = run_sweep(spec)
    assert len(records) == 1 and records[0].localization_count == 31


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


def test_summary_has_one_row_per_cell_protocol():
    spec = _tiny_spec()
    rows = summarize(spec, run_sweep(spec))
    assert len(rows) == 2 * 2 * 2
    sfr_rows = [r for r in rows if r.protocol == "sfr"]
    assert all(r.ratio_to_sfr == 1.0 and r.ratio_std == 0.0 for r in sfr_rows)


def test_summary_ratio_is_paired_mean_over_reps():
    spec = _tiny_spec()
    records = run_sweep(spec)
    by_run = {(r.speed_class, r.pause_time, r.protocol, r.rep): r for r in records}
    rows = summarize(spec, records)
    row = next(r for r in rows if r.protocol == "madrd" and r.speed_class == "4:5" and r.pause_time == 0.0)
    manual = [
        by_run[("4:5", 0.0, "madrd", rep)].localization_count
        / by_run[("4:5", 0.0, "sfr", rep)].localization_count
        for rep in range(spec.repetitions)
    ]
    assert row.ratio_to_sfr == pytest.approx(sum(manual) / len(manual))


def test_summary_without_sfr_leaves_ratios_empty():
    spec = _tiny_spec(protocols=(ProtocolSpec("dvm", "dvm", {"t_max": 6.0}),))
    rows = summarize(spec, run_sweep(spec))
    assert rows and all(r.ratio_to_sfr is None and r.ratio_std is None for r in rows)


def test_summary_single_rep_has_zero_std():
    spec = _one_class_spec()
    rows = summarize(spec, run_sweep(spec))
    assert all(r.localizations_std == 0.0 and r.error_std == 0.0 for r in rows)


# ---------------------------------------------------------------------------
# Serialization round trips
# ---------------------------------------------------------------------------


def test_spec_dict_round_trip():
    spec = _tiny_spec()
    assert spec_from_dict(spec_to_dict(spec)) == spec
    assert spec_from_dict(json.loads(json.dumps(spec_to_dict(spec)))) == spec
    full = default_bundle()
    assert spec_from_dict(spec_to_dict(full)) == full


def test_spec_from_dict_rejects_unknown_keys():
    d = spec_to_dict(_tiny_spec())
    d["warp_factor"] = 9
    with pytest.raises(ValueError, match="warp_factor"):
        spec_from_dict(d)


def test_csv_round_trip_with_provenance(tmp_path):
    spec = _tiny_spec(repetitions=1)
    records = run_sweep(spec)
    rows = summarize(spec, records)
    runs_path = tmp_path / "runs.csv"
    summary_path = tmp_path / "summary.csv"
    write_runs_csv(runs_path, spec, records)
    write_summary_csv(summary_path, spec, rows)

    assert read_provenance(runs_path) == spec_to_dict(spec)
    config, parsed = read_summary(summary_path)
    assert spec_from_dict(config) == spec
    assert len(parsed) == len(rows)
    first = parsed[0]
    assert first["protocol"] == rows[0].protocol
    assert first["mean_localizations"] == pytest.approx(rows[0].mean_localizations)


def test_missing_ratio_serializes_as_empty_field(tmp_path):
    spec = _tiny_spec(
        repetitions=1,
        speed_classes=((4.0, 5.0),),
        pause_times=(0.0,),
        protocols=(ProtocolSpec("dvm", "dvm", {"t_max": 6.0}),),
    )
    path = tmp_path / "summary.csv"
    write_summary_csv(path, spec, summarize(spec, run_sweep(spec)))
    data_line = [
        line for line in path.read_text().splitlines() if line and not line.startswith("#")
    ][1]
    fields = data_line.split(",")
    assert fields[6] == "" and fields[7] == ""  # ratio columns stay blank
    _, parsed = read_summary(path)
    assert parsed[0]["ratio_to_sfr"] is None


def test_sweep_regenerated_from_provenance_is_byte_identical(tmp_path):
    spec = _one_class_spec(pause_times=(0.0, 30.0))
    first = tmp_path / "first.csv"
    write_runs_csv(first, spec, run_sweep(spec))

    recovered = spec_from_dict(read_provenance(first))
    second = tmp_path / "second.csv"
    write_runs_csv(second, recovered, run_sweep(recovered))
    assert first.read_bytes() == second.read_bytes()


# ---------------------------------------------------------------------------
# Spec files
# ---------------------------------------------------------------------------

GOOD_SPEC = """
[sweep]
speed_classes = 0.5:1, 4:5
pause_times = 0, 30
repetitions = 3
duration = 120
noise = 0.4
area = 250x200
backtracking = true

[sfr]
period = 2

[madrd]
t_max = 10, 6
divergence_threshold = 5
"""


def test_parse_spec_file_round_trip():
    spec = parse_spec_file(GOOD_SPEC)
    assert spec.speed_classes == ((0.5, 1.0), (4.0, 5.0))
    assert spec.pause_times == (0.0, 30.0)
    assert spec.repetitions == 3
    assert spec.noise_max == 0.4
    assert (spec.area_w, spec.area_h) == (250.0, 200.0)
    assert spec.backtracking_enabled is True
    assert spec.protocols[0] == ProtocolSpec("sfr", "sfr", {"period": 2.0})
    assert spec.protocols[1].params["t_max"] == [10.0, 6.0]
    assert spec.protocols[1].params["divergence_threshold"] == 5.0


def test_parse_spec_file_kind_key_overrides_section_name():
    spec = parse_spec_file(
        "[sweep]\nspeed_classes = 4:5\n\n[baseline]\nkind = sfr\nperiod = 1\n"
    )
    assert spec.protocols[0].label == "baseline"
    assert spec.protocols[0].kind == "sfr"


def test_parse_spec_file_errors_name_the_field():
    with pytest.raises(ValueError, match="speed_classes"):
        parse_spec_file("[sweep]\npause_times = 0\n\n[sfr]\nperiod = 2\n")
    with pytest.raises(ValueError, match="sweep"):
        parse_spec_file("[sfr]\nperiod = 2\n")
    with pytest.raises(ValueError, match="protocol"):
        parse_spec_file("[sweep]\nspeed_classes = 4:5\n")
    with pytest.raises(ValueError, match="madrd.t_max"):
        parse_spec_file(
            "[sweep]\nspeed_classes = 4:5\n\n[madrd]\nt_max = fast\n"
        )
    with pytest.raises(ValueError, match="not parseable"):
        parse_spec_file("speed_classes = 4:5\n[sweep")
    with pytest.raises(ValueError, match="repetitons"):
        parse_spec_file(
            "[sweep]\nspeed_classes = 4:5\nrepetitons = 50\n\n[sfr]\nperiod = 2\n"
        )


def test_parsed_spec_runs():
    spec = parse_spec_file(
        "[sweep]\nspeed_classes = 4:5\nrepetitions = 1\nduration = 30\n\n[sfr]\nperiod = 2\n"
    )
    records = run_sweep(spec)
    assert len(records) == 1 and records[0].localization_count == 16
