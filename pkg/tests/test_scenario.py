import pytest

from coexsim.scenario import (ScenarioError, emit_scenario, load_scenario,
                              parse_scenario, toggled)
from conftest import scenario_path

MINIMAL = """
nodes:
  - {id: a, kind: wifi, position: [0.0, 0.0], traffic: {kind: none}}
"""


class TestCanonicalFiles:
    def test_emulation_geometry(self, emulation_cfg):
        coord = emulation_cfg.node("coordinator")
        node2 = emulation_cfg.node("node2")
        assert coord.traffic.kind == "cts-inject"
        assert coord.traffic.power_dbm == 1.0
        assert node2.position.distance_to(coord.position) == pytest.approx(3.0)
        assert emulation_cfg.node("node3").position.distance_to(coord.position) == pytest.approx(40.0)
        assert emulation_cfg.medium.path_loss.kind == "log-distance"
        assert emulation_cfg.medium.path_loss.exponent == 3.0

    def test_conference_room_shape(self, conference_cfg):
        assert conference_cfg.reservation.enabled
        kinds = sorted(n.kind for n in conference_cfg.nodes)
        assert kinds.count("wimax-ss") == 1
        assert kinds.count("wimax-bs") == 1
        saturated = [n for n in conference_cfg.nodes
                     if n.kind == "wifi" and n.traffic.kind == "saturated"]
        assert len(saturated) == 2
        systems = {n.system for n in saturated}
        assert len(systems) == 2

    def test_colocated_platform(self, colocated_cfg):
        assert colocated_cfg.arbiter.enabled
        plats = colocated_cfg.platforms()
        assert plats["ss1"] is not None
        assert plats["ss1"] == plats["wifi1"]
        assert plats["ap"] is None

    @pytest.mark.parametrize("name", ["emulation", "conference_room", "colocated"])
    def test_round_trip(self, name):
        cfg = load_scenario(scenario_path(name))
        assert parse_scenario(emit_scenario(cfg)) == cfg


class TestValidation:
    def test_minimal_defaults(self):
        cfg = parse_scenario(MINIMAL)
        node = cfg.nodes[0]
        assert node.tx_power_dbm == 20.0
        assert node.decode_sensitivity_dbm == -85.0
        assert node.cca_threshold_dbm == -82.0
        assert node.channel_mhz == 2412.0
        assert cfg.duration_us == 30_000_000
        assert cfg.medium.preset == "staccato"

    def test_empty_document(self):
        cfg = parse_scenario("")
        assert cfg.nodes == ()

    def test_syntax_error(self):
        with pytest.raises(ScenarioError) as err:
            parse_scenario("nodes: [}")
        assert "(syntax)" in err.value.errors[0]

    def test_duplicate_node_id_names_the_id(self):
        text = """
nodes:
  - {id: a, kind: wifi, position: [0.0, 0.0]}
  - {id: a, kind: wifi, position: [1.0, 0.0]}
"""
        with pytest.raises(ScenarioError) as err:
            parse_scenario(text)
        assert any("duplicate node id 'a'" in e for e in err.value.errors)

    def test_dangling_collocated_reference(self):
        text = """
nodes:
  - {id: a, kind: wifi, position: [0.0, 0.0], collocated_with: ghost}
"""
        with pytest.raises(ScenarioError) as err:
            parse_scenario(text)
        assert any("collocated_with" in e and "ghost" in e for e in err.value.errors)

    def test_unknown_key_is_an_error_with_path(self):
        with pytest.raises(ScenarioError) as err:
            parse_scenario("durationus: 5\n")
        assert any("durationus" in e and "unknown key" in e for e in err.value.errors)

    def test_unknown_nested_key(self):
        text = """
nodes:
  - {id: a, kind: wifi, position: [0.0, 0.0], traffic: {kind: none, typo_key: 1}}
"""
        with pytest.raises(ScenarioError) as err:
            parse_scenario(text)
        assert any("nodes[0].traffic.typo_key" in e for e in err.value.errors)

    def test_ss_requires_base_station(self):
        text = """
nodes:
  - {id: s, kind: wimax-ss, position: [0.0, 0.0]}
"""
        with pytest.raises(ScenarioError) as err:
            parse_scenario(text)
        assert any("nodes[0].bs" in e for e in err.value.errors)

    def test_saturated_wifi_requires_peer(self):
        text = """
nodes:
  - {id: a, kind: wifi, position: [0.0, 0.0], traffic: {kind: saturated}}
"""
        with pytest.raises(ScenarioError) as err:
            parse_scenario(text)
        assert any("nodes[0].peer" in e for e in err.value.errors)

    def test_out_of_range_value(self):
        text = """
nodes:
  - {id: a, kind: wifi, position: [0.0, 0.0], tx_power_dbm: 99.0}
"""
        with pytest.raises(ScenarioError) as err:
            parse_scenario(text)
        assert any("tx_power_dbm" in e for e in err.value.errors)

    def test_warmup_must_fit_inside_run(self):
        with pytest.raises(ScenarioError):
            parse_scenario("duration_us: 1000\nwarmup_us: 1000\n")

    def test_intel_preset_tolerances(self):
        cfg = parse_scenario("medium: {preset: intel}\n")
        assert cfg.medium.victim_tolerance_dbm("wimax") == -121.0
        assert cfg.medium.victim_tolerance_dbm("wifi") == -117.0
        default = parse_scenario("")
        assert default.medium.victim_tolerance_dbm("wimax") == -118.0


class TestToggle:
    def test_toggle_is_the_only_difference(self, conference_cfg):
        off = toggled(conference_cfg, "reservation", False)
        assert not off.reservation.enabled
        assert toggled(off, "reservation", True) == conference_cfg
        on = toggled(conference_cfg, "arbiter", True)
        assert on.arbiter.enabled
        assert on.nodes == conference_cfg.nodes

    def test_unknown_mechanism(self, conference_cfg):
        with pytest.raises(ValueError):
            toggled(conference_cfg, "warp-drive", True)
