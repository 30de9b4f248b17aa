"""
Run configuration and JSON persistence of traced hairs and canonical rays
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..maps.entire_maps import EntireMap, make_map, parse_map_spec
from ..model.space import ModelStore
from ..rays.canonical import DEFAULT_TRACKED, CanonicalRay
from ..rays.tracer import PullbackConfig, RayTail
from ..symbolic.addresses import (
    ExternalAddress,
    SignedAddress,
    parse_address,
    parse_symbol,
    periodic_addresses,
)
from ..utils.errors import ChecksumMismatchError, MissingTraceError
from ..utils.helpers import slugify

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
FORMAT_VERSION = 2


def dumps(data: Any) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline"""
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=True) + "\n"


def sha256_of(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class TraceSettings(BaseModel):
    """Pullback sampling of a run"""
    model_config = ConfigDict(extra="forbid")

    start_radius: float = 8.0
    samples: int = Field(32, ge=1)
    depth: int = Field(20, ge=0)
    refine_tol: float = Field(1e-7, gt=0)
    t_max: float = 64.0
    max_points: int = Field(20000, ge=2)

    def pullback(self) -> PullbackConfig:
        return PullbackConfig(**self.model_dump())


class RunConfig(BaseModel):
    """A single declarative run description"""
    model_config = ConfigDict(extra="forbid")

    map: str = "cosh"
    model_lambda: float = Field(0.1, gt=0)
    addresses: List[str] = Field(default_factory=lambda: list(DEFAULT_TRACKED))
    max_period: Optional[int] = Field(None, ge=1)
    symbols: List[str] = Field(default_factory=list)
    trace: TraceSettings = Field(default_factory=TraceSettings)
    canonical_depth: int = Field(12, ge=0)
    stage: int = Field(12, ge=3)
    sample_size: int = Field(50, ge=1)
    core_radius: float = Field(0.01, gt=0)
    output_dir: str = "crinifer_output"

    @field_validator("map")
    @classmethod
    def _valid_map(cls, value: str) -> str:
        parse_map_spec(value)
        return value

    @field_validator("addresses")
    @classmethod
    def _valid_addresses(cls, value: List[str]) -> List[str]:
        for literal in value:
            parse_address(literal)
        return value

    @field_validator("symbols")
    @classmethod
    def _valid_symbols(cls, value: List[str]) -> List[str]:
        for token in value:
            parse_symbol(token)
        return value

    @model_validator(mode="after")
    def _generator_needs_symbols(self) -> "RunConfig":
        if self.max_period is not None and not self.symbols:
            raise ValueError("max_period needs a symbol list")
        return self

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        return cls.model_validate_json(Path(path).read_text())

    def dumps(self) -> str:
        return dumps(self.model_dump(mode="json"))

    def target_map(self) -> EntireMap:
        return parse_map_spec(self.map)

    def model_map(self) -> EntireMap:
        target = self.target_map()
        return make_map(f"scaled-{target.kind}", target.scale * self.model_lambda, target.precision)

    def address_list(self) -> List[ExternalAddress]:
        """Listed addresses, or all periodic ones up to max_period in lexicographic order"""
        if self.max_period is not None:
            return list(periodic_addresses(self.symbols, self.max_period))
        return [parse_address(literal) for literal in self.addresses]

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)


# -- file layout ----------------------------------------------------------

def hair_filename(address: ExternalAddress) -> str:
    return f"hair-{slugify(str(address))}.json"


def ray_filename(key: SignedAddress) -> str:
    return f"ray-{slugify(str(key.address))}-{key.sign.slug}.json"


def _write(directory: Path, name: str, payload: Dict[str, Any]) -> str:
    path = directory / name
    path.write_text(dumps(payload))
    return sha256_of(path)


def save_store(
    directory: Path,
    store: Optional[ModelStore] = None,
    rays: Optional[Dict[SignedAddress, CanonicalRay]] = None,
    map_f: Optional[EntireMap] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write hairs and canonical rays as JSON and a manifest of their checksums"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files: Dict[str, str] = {}
    hairs: Dict[str, str] = {}
    endpoints: Dict[str, bool] = {}
    canonical: Dict[str, str] = {}

    # files are written in a stable order so reruns produce identical manifests
    if store is not None:
        for address in sorted(store.hairs, key=str):
            name = hair_filename(address)
            files[name] = _write(directory, name, store.hairs[address].to_dict())
            hairs[str(address)] = name
            if address in store.endpoint_flags:
                endpoints[str(address)] = bool(store.endpoint_flags[address])
    if rays is not None:
        for key in sorted(rays, key=str):
            name = ray_filename(key)
            files[name] = _write(directory, name, rays[key].to_dict())
            canonical[str(key)] = name

    source = store.map_g if store is not None else map_f
    manifest = {
        "format": FORMAT_VERSION,
        "model_map": store.map_g.spec if store is not None else None,
        "target_map": map_f.spec if map_f is not None else None,
        "precision": source.precision_mode.value if source is not None else None,
        "trace": store.cfg.to_dict() if store is not None else None,
        "hairs": hairs,
        "endpoints": endpoints,
        "rays": canonical,
        "files": files,
    }
    if extra:
        manifest.update(extra)
    path = directory / MANIFEST
    path.write_text(dumps(manifest))
    logger.info(f"saved {len(files)} trace files to {directory}")
    return path


def read_manifest(directory: Path) -> Dict[str, Any]:
    path = Path(directory) / MANIFEST
    if not path.exists():
        raise MissingTraceError(
            f"no manifest in {directory}; run 'crinifer trace --config <file>' first"
        )
    return json.loads(path.read_text())


def verify_manifest(directory: Path) -> Dict[str, Any]:
    """Check every listed file against its checksum; returns the manifest"""
    directory = Path(directory)
    manifest = read_manifest(directory)
    for name, digest in manifest["files"].items():
        path = directory / name
        if not path.exists():
            raise MissingTraceError(f"{path} listed in the manifest is missing")
        if sha256_of(path) != digest:
            raise ChecksumMismatchError(str(path))
    return manifest


def load_store(
    directory: Path, alphabet=None
) -> Tuple[Optional[ModelStore], Dict[SignedAddress, CanonicalRay]]:
    """Read back what save_store wrote, refusing on any checksum mismatch"""
    directory = Path(directory)
    manifest = verify_manifest(directory)
    store = None
    if manifest.get("model_map"):
        hairs = {}
        for literal, name in manifest["hairs"].items():
            tail = RayTail.from_dict(json.loads((directory / name).read_text()))
            hairs[parse_address(literal)] = tail
        cfg = PullbackConfig(**manifest["trace"])
        map_g = parse_map_spec(manifest["model_map"])
        flags = {
            parse_address(literal): flag for literal, flag in manifest.get("endpoints", {}).items()
        }
        store = ModelStore(map_g, cfg, hairs, flags, alphabet)
    rays = {}
    for name in manifest["rays"].values():
        ray = CanonicalRay.from_dict(json.loads((directory / name).read_text()))
        rays[ray.signed_address] = ray
    return store, rays

