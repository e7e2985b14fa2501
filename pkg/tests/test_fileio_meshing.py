import json

import numpy as np
import pytest

from uavgen import fileio as io
from uavgen import meshing as ms
from uavgen import tape as tp
from uavgen import zspace as zs
from uavgen.decoders import default_decoders
from uavgen.losses import ALMConfig
from uavgen.training import TrainConfig, TrainResult, train


@pytest.fixture(scope="module")
def tiny_result():
    cfg = TrainConfig(
        zeta_dim=2, batch=16, epochs=3, seed=0, alm=ALMConfig(warmup_epochs=2)
    )
    return train(cfg)


class TestCheckpoint:
    def test_round_trip(self, tiny_result, tmp_path):
        path = tmp_path / "ckpt.json"
        io.save_checkpoint(path, tiny_result)
        net, config, alm_state, sampler = io.load_checkpoint(path)
        zeta = tp.Tensor(np.random.default_rng(0).uniform(-1, 1, size=(4, 2)))
        with tp.no_grad():
            za, _ = tiny_result.net.forward(zeta)
            zb, _ = net.forward(zeta)
        np.testing.assert_array_equal(za.values, zb.values)
        np.testing.assert_array_equal(alm_state.mu, tiny_result.alm_state.mu)
        assert sampler.bins == tiny_result.sampler.bins
        assert config.batch == 16

    def test_version_guard(self, tiny_result, tmp_path):
        path = tmp_path / "ckpt.json"
        io.save_checkpoint(path, tiny_result)
        doc = json.loads(path.read_text())
        doc["version"] = 999
        path.write_text(json.dumps(doc))
        with pytest.raises(ValueError, match="version"):
            io.load_checkpoint(path)


class TestDesignFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "designs.json"
        rng = np.random.default_rng(1)
        z = zs.sample_uniform(rng, 5)
        io.save_designs(path, z, "case1", metrics={"objective": np.arange(5.0)})
        z2, case, metrics, meta = io.load_designs(path)
        np.testing.assert_array_equal(z, z2)
        assert case == "case1"
        np.testing.assert_array_equal(metrics["objective"], np.arange(5.0))

    def test_shape_guard(self, tmp_path):
        with pytest.raises(ValueError):
            io.save_designs(tmp_path / "x.json", np.zeros((3, 5)), "case1")


class TestLogs:
    def test_jsonl_round_trip(self, tiny_result, tmp_path):
        path = tmp_path / "log.jsonl"
        io.write_log(path, tiny_result.log)
        records = io.read_log(path)
        assert len(records) == 3
        assert records[0]["epoch"] == 0
        assert "feasible_fraction" in records[0]


class TestMeshing:
    @pytest.fixture(scope="class")
    def craft(self):
        decs = default_decoders()
        rng = np.random.default_rng(2)
        z = zs.sample_uniform(rng, 2)
        with tp.no_grad():
            return zs.build_aircraft(tp.Tensor(z), decs, "case1")

    def test_all_parts_edge_closed(self, craft):
        for part in ms.aircraft_mesh(craft, 0):
            assert ms.edge_closed(part["faces"]), part["name"]

    def test_parts_named_and_tagged(self, craft):
        names = [p["name"] for p in ms.aircraft_mesh(craft, 1)]
        assert names == ["fuselage", "wing1", "wing2", "box1", "box2", "box3"]

    def test_payload_flat_arrays(self, craft):
        payload = ms.mesh_to_payload(ms.aircraft_mesh(craft, 0))
        part = payload[0]
        assert len(part["vertices"]) % 3 == 0
        assert len(part["faces"]) % 3 == 0
        assert max(part["faces"]) < len(part["vertices"]) // 3

    def test_save(self, craft, tmp_path):
        path = tmp_path / "mesh.json"
        ms.save_mesh(path, ms.aircraft_mesh(craft, 0))
        doc = json.loads(path.read_text())
        assert doc["version"] == 1 and len(doc["parts"]) == 6
