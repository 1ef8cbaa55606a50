import pytest

from prodnet.core_model import load_economy, load_flow_state, validate_equilibrium
from prodnet.errors import InvariantError, UnknownEntityError
from prodnet.fixtures import FixtureId, build, emit, fixture_name, list_fixtures, lpr_tech_id


@pytest.mark.parametrize("fixture", [f for f in FixtureId])
def test_every_fixture_is_an_equilibrium(fixture):
    economy, state = build(fixture)
    assert validate_equilibrium(economy, state) == []


@pytest.mark.parametrize("t", [2, 4, 9, 10])
def test_lpr_family_is_an_equilibrium(t):
    assert validate_equilibrium(*build(f"LprFamily({t})")) == []


def test_lpr_ids_are_padded():
    assert lpr_tech_id(3, 0, 1) == "01"
    assert lpr_tech_id(9, 10, 2) == "1002"
    economy, _ = build(FixtureId.LPR_FAMILY, t=9)
    assert economy.has_tech("0001")


def test_lpr_family_too_small():
    with pytest.raises(InvariantError):
        build("LprFamily(1)")


def test_names():
    names = list_fixtures()
    assert "Fig1Chain" in names
    assert "LprFamily" in names
    assert fixture_name("LprFamily(4)") == "LprFamily4"
    assert fixture_name(FixtureId.LPR_FAMILY) == "LprFamily3"
    assert fixture_name("Fig7Power") == "Fig7Power"


def test_unknown_fixture():
    with pytest.raises(UnknownEntityError):
        build("Fig99")


def test_emit_writes_loadable_files(tmp_path):
    economy_path, flows_path = emit("Fig9FiveCountry", tmp_path)
    assert economy_path.name == "Fig9FiveCountry.economy.json"
    assert flows_path.name == "Fig9FiveCountry.flows.json"
    economy = load_economy(economy_path)
    state = load_flow_state(flows_path, economy)
    assert validate_equilibrium(economy, state) == []


def test_emit_family_member(tmp_path):
    paths = emit("LprFamily(4)", tmp_path / "out")
    assert [p.name for p in paths] == ["LprFamily4.economy.json", "LprFamily4.flows.json"]
    assert all(p.exists() for p in paths)
