import json

import pytest

from acnmap.cli import main
from acnmap.interchange import Layer, Network, load_mapping, save_network
from acnmap.model import NeuronSpec

from conftest import FIXTURES


@pytest.fixture
def bin_net():
    return str(FIXTURES / "network_bin16.json")


@pytest.fixture
def real_net():
    return str(FIXTURES / "network_real16.json")


def test_map_then_verify_ok(tmp_path, bin_net, capsys):
    netlist = tmp_path / "bin16.netlist.json"
    assert main(["map", "--network", bin_net, "--out", str(netlist),
                 "--cmin", "2", "--pillar-bias", "2", "--pillar-ballast", "2"]) == 0
    assert netlist.exists()
    manifest = json.loads((tmp_path / "bin16.netlist.json.manifest.json").read_text())
    assert manifest["command"] == "map"
    assert manifest["inputs"][0]["sha256"]

    assert main(["verify", "--network", bin_net, "--netlist", str(netlist)]) == 0
    out = capsys.readouterr().out
    assert "0 mismatches" in out


def test_verify_catches_corruption(tmp_path, bin_net):
    netlist = tmp_path / "bin16.netlist.json"
    main(["map", "--network", bin_net, "--out", str(netlist), "--cmin", "2"])
    data = json.loads(netlist.read_text())
    # shrink one synapse capacitor by half: some input must flip
    for row in data["neurons"][0]["capacitors"]:
        if row["role"] == "synapse":
            row["fF"] *= 0.5
            break
    netlist.write_text(json.dumps(data))
    assert main(["verify", "--network", bin_net, "--netlist", str(netlist)]) == 6


def test_map_relu_infeasible_exit_code(tmp_path):
    big = Network(name="big", layers=(
        Layer("hidden", "binary",
              (NeuronSpec(weights=(1.5, -0.2), name="h0"),)),
        Layer("output", "linear",
              (NeuronSpec(weights=(1.0,), name="o0"),)),
    ))
    net_path = tmp_path / "big.json"
    save_network(big, net_path)
    code = main(["map", "--network", str(net_path), "--mapping", "relu",
                 "--ct", "100", "--vmax", "1.0",
                 "--out", str(tmp_path / "out.json")])
    assert code == 7


def test_map_with_prune_and_portable_pipeline(tmp_path, real_net):
    netlist = tmp_path / "pruned.json"
    assert main(["map", "--network", real_net, "--out", str(netlist),
                 "--prune", "0.01", "--cmin", "2",
                 "--pillar-bias", "2", "--pillar-ballast", "2",
                 "--parasitic-pos", "1", "--parasitic-neg", "1"]) == 0
    mapped, provenance = load_mapping(netlist)
    assert len(mapped) == 16
    assert provenance["prune_threshold"] == 0.01


def test_sweep_config_file_and_determinism(tmp_path):
    config = tmp_path / "sweep.cfg"
    config.write_text("n=6\ncount=40\nsigma=0.1\ntau=0.1\nmapping=conditional\n"
                      "ct=100\nseed=5\nlabel=tiny\n")
    csv_a = tmp_path / "a.csv"
    csv_b = tmp_path / "b.csv"
    assert main(["sweep", "--config", str(config), "--out-csv", str(csv_a)]) == 0
    assert main(["sweep", "--config", str(config), "--out-csv", str(csv_b)]) == 0
    assert csv_a.read_bytes() == csv_b.read_bytes()
    header = csv_a.read_text().splitlines()[0]
    assert header.startswith("label,mapping,n,count,sigma,tau")
    assert (tmp_path / "a.csv.manifest.json").exists()


def test_sweep_without_outputs_still_writes_manifest(tmp_path, monkeypatch):
    config = tmp_path / "sweep.cfg"
    config.write_text("n=4\ncount=5\nseed=1\n")
    monkeypatch.chdir(tmp_path)
    assert main(["sweep", "--config", str(config)]) == 0
    assert (tmp_path / "acnmap-sweep.manifest.json").exists()


def test_sweep_json_config_list(tmp_path):
    config = tmp_path / "sweep.json"
    config.write_text(json.dumps([
        {"n": 6, "count": 10, "mapping": "conditional", "seed": 1, "label": "a"},
        {"n": 6, "count": 10, "mapping": "balanced", "seed": 1, "label": "b"},
    ]))
    out = tmp_path / "two.csv"
    plots = tmp_path / "plots"
    assert main(["sweep", "--config", str(config), "--out-csv", str(out),
                 "--plots", str(plots)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    assert (plots / "ballast_vs_direction.svg").exists()
    assert (plots / "cap_norm_a.svg").exists()


def test_sweep_unknown_preset(tmp_path):
    assert main(["sweep", "--preset", "table9"]) == 3


def test_sweep_bad_config_key(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("count=10\nn=4\nwidth=9\n")
    assert main(["sweep", "--config", str(config)]) == 3


def test_report_with_corpus(tmp_path, bin_net, capsys):
    netlist = tmp_path / "netlist.json"
    main(["map", "--network", bin_net, "--out", str(netlist), "--cmin", "2",
          "--pillar-bias", "2", "--pillar-ballast", "2"])
    out_csv = tmp_path / "report.csv"
    out_json = tmp_path / "report.json"
    plots = tmp_path / "plots"
    assert main(["report", "--netlist", str(netlist),
                 "--corpus", str(FIXTURES / "corpus16.json"),
                 "--tolerance-mv", "5", "--plots", str(plots),
                 "--out-csv", str(out_csv), "--out-json", str(out_json)]) == 0
    out = capsys.readouterr().out
    assert "instability" in out
    assert "|delta_vm|" in out
    assert (plots / "cos_theta.svg").exists()
    lines = out_csv.read_text().splitlines()
    assert len(lines) == 17  # header + 16 neurons
    assert json.loads(out_json.read_text())["format"] == "acn-report"


def test_tile_command(tmp_path, capsys):
    # unit-quantizable netlist: binary weights, zero bias
    net = Network(name="bin22", layers=(
        Layer("hidden", "binary",
              (NeuronSpec(weights=tuple([1.0] * 12 + [-1.0] * 10),
                          name="b0", quantization="binary"),)),
        Layer("output", "linear", (NeuronSpec(weights=(1.0,), name="o0"),)),
    ))
    net_path = tmp_path / "net.json"
    save_network(net, net_path)
    netlist = tmp_path / "netlist.json"
    main(["map", "--network", str(net_path), "--ct", "220", "--out", str(netlist)])
    out = tmp_path / "tiles.json"
    assert main(["tile", "--netlist", str(netlist), "--unit", "10",
                 "--out", str(out)]) == 0
    plan = json.loads(out.read_text())["plans"][0]
    assert plan["ballast_tiles"] == [0, 2]
    # a unit that does not divide the capacitors is an error
    assert main(["tile", "--netlist", str(netlist), "--unit", "7"]) == 8


def test_missing_network_file(tmp_path):
    assert main(["map", "--network", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o.json")]) == 3


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
