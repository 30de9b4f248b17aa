"""
Unit tests for run configuration and trace persistence
"""
import json

import numpy as np
import pytest
from pydantic import ValidationError

from crinifer.maps import make_map
from crinifer.output import (
    RunConfig,
    TraceSettings,
    dumps,
    hair_filename,
    load_store,
    ray_filename,
    read_manifest,
    save_store,
    verify_manifest,
)
from crinifer.symbolic import SignedAddress, parse_address
from crinifer.utils.errors import (
    AddressSyntaxError,
    ChecksumMismatchError,
    MapSpecError,
    MissingTraceError,
)
from crinifer.utils.models import Sign


@pytest.mark.unit
class TestRunConfig:
    """Test the declarative run description"""

    def test_defaults(self):
        """Test the default run traces the tracked addresses of cosh"""
        config = RunConfig()
        assert config.map == "cosh"
        assert config.model_map() == make_map("scaled-cosh", 0.1)
        assert [str(a) for a in config.address_list()] == config.addresses
        assert config.trace.pullback().depth == 20

    def test_generated_addresses(self):
        """Test periodic addresses from a symbol list"""
        config = RunConfig(symbols=["R", "L"], max_period=2)
        assert [str(a) for a in config.address_list()] == ["(R)", "(R.L)", "(L.R)", "(L)"]

    def test_max_period_needs_symbols(self):
        """Test the generator requires symbols"""
        with pytest.raises(ValidationError):
            RunConfig(max_period=2)

    def test_invalid_symbol(self):
        """Test unknown symbol tokens"""
        with pytest.raises(ValidationError):
            RunConfig(symbols=["X"], max_period=1)

    def test_invalid_address(self):
        """Test malformed address literals"""
        with pytest.raises(AddressSyntaxError):
            RunConfig(addresses=["R.(L"])

    def test_invalid_map(self):
        """Test unknown map specifications"""
        with pytest.raises(MapSpecError):
            RunConfig(map="tanh")

    def test_limits(self):
        """Test field bounds and unknown keys"""
        with pytest.raises(ValidationError):
            RunConfig(stage=2)
        with pytest.raises(ValidationError):
            RunConfig(colour="red")
        with pytest.raises(ValidationError):
            TraceSettings(samples=0)

    def test_file_round_trip(self, tmp_path):
        """Test from_file reads what dumps wrote"""
        config = RunConfig(addresses=["R.(R)"], canonical_depth=2, output_dir=str(tmp_path))
        path = tmp_path / "run.json"
        path.write_text(config.dumps())
        assert RunConfig.from_file(path) == config

    def test_canonical_dumps(self):
        """Test canonical JSON is key-sorted with a trailing newline"""
        text = dumps({"b": 1, "a": [1.5, None]})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert RunConfig().dumps() == RunConfig().dumps()


@pytest.mark.unit
class TestFileNames:
    """Test file naming of traces"""

    def test_hair_filename(self):
        """Test parentheses become a p prefix"""
        assert hair_filename(parse_address("(R)")) == "hair-pR.json"

    def test_ray_filename(self):
        """Test the sign appears as a word"""
        key = SignedAddress(parse_address("L.(R)"), Sign.MINUS)
        assert ray_filename(key) == "ray-L_pR-minus.json"


@pytest.mark.unit
class TestStore:
    """Test saving and loading traces"""

    def test_round_trip(self, output_dir, model_store, context, cosh_map):
        """Test hairs and rays come back unchanged"""
        save_store(output_dir, model_store, context.rays, cosh_map)
        store, rays = load_store(output_dir)
        assert set(store.hairs) == set(model_store.hairs)
        for address, hair in model_store.hairs.items():
            assert np.array_equal(store.hairs[address].z, hair.z)
        assert set(rays) == set(context.rays)
        key = SignedAddress(parse_address("(R)"), Sign.PLUS)
        assert rays[key].split_events == context.rays[key].split_events
        assert store.map_g == model_store.map_g

    def test_endpoint_flags_survive(self, output_dir, model_store):
        """Test endpoint convergence flags are written and read back"""
        save_store(output_dir, model_store)
        manifest = read_manifest(output_dir)
        assert manifest["endpoints"] == {str(a): f for a, f in model_store.endpoint_flags.items()}
        store, _ = load_store(output_dir)
        assert store.endpoint_flags == model_store.endpoint_flags

    def test_manifest(self, output_dir, model_store, context, cosh_map):
        """Test the manifest lists every file with its checksum"""
        save_store(output_dir, model_store, context.rays, cosh_map, extra={"note": "x"})
        manifest = read_manifest(output_dir)
        assert manifest["target_map"] == "cosh"
        assert manifest["precision"] == "double"
        assert len(manifest["hairs"]) == 5
        assert len(manifest["rays"]) == 10
        assert len(manifest["files"]) == 15
        assert manifest["note"] == "x"

    def test_deterministic(self, output_dir, model_store, context, cosh_map):
        """Test saving twice writes identical bytes"""
        path = save_store(output_dir, model_store, context.rays, cosh_map)
        first = path.read_bytes()
        save_store(output_dir, model_store, context.rays, cosh_map)
        assert path.read_bytes() == first

    def test_rays_only(self, output_dir, context, cosh_map):
        """Test a directory without model hairs"""
        save_store(output_dir, rays=context.rays, map_f=cosh_map)
        store, rays = load_store(output_dir)
        assert store is None
        assert len(rays) == 10

    def test_checksum_mismatch(self, output_dir, context, cosh_map):
        """Test edited files are refused"""
        save_store(output_dir, rays=context.rays, map_f=cosh_map)
        name = ray_filename(SignedAddress(parse_address("(R)"), Sign.PLUS))
        data = json.loads((output_dir / name).read_text())
        data["depth"] = 99
        (output_dir / name).write_text(dumps(data))
        with pytest.raises(ChecksumMismatchError):
            load_store(output_dir)

    def test_missing_file(self, output_dir, context, cosh_map):
        """Test files listed but absent"""
        save_store(output_dir, rays=context.rays, map_f=cosh_map)
        (output_dir / ray_filename(SignedAddress(parse_address("(R)"), Sign.MINUS))).unlink()
        with pytest.raises(MissingTraceError):
            verify_manifest(output_dir)

    def test_missing_manifest(self, output_dir):
        """Test an empty directory"""
        with pytest.raises(MissingTraceError) as info:
            read_manifest(output_dir)
        assert "crinifer trace" in str(info.value)
