"""Run configuration document (JSON) and its conversion to library objects."""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .drive import DriveProtocol
from .errors import ConfigurationError, CTAPError
from .lattice import ChainSpec, DisorderSpec, sample_disorder
from .protocol import TransferConfig


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ChainSection(_Strict):
    n_sites: int
    j_nn: float = 1.0
    j_nnn: float = 0.0
    a: float = 1.0
    b: float = 1.0
    site_energies: Optional[List[float]] = None


class ProtocolSection(_Strict):
    omega: float
    tau: float
    delay: float
    t_half: float
    envelope: Literal["stirap", "constant"] = "stirap"


class DisorderSection(_Strict):
    delta_hopping: float = 0.0
    delta_onsite: float = 0.0
    master_seed: int = Field(default=0, ge=0, lt=2**64)


class ExperimentSection(_Strict):
    kind: Literal["hopping", "onsite", "both"] = "hopping"
    deltas: List[float] = Field(default_factory=lambda: [0.1, 0.2, 0.3])
    n_realizations: int = Field(default=20, ge=1)
    ratios: List[float] = Field(default_factory=lambda: [0.0, 0.05, 0.1, 0.15])
    omegas: List[float] = Field(default_factory=lambda: [10.0, 20.0, 40.0])
    cdt_duration: Optional[float] = None


class RunConfigDocument(_Strict):
    chain: ChainSection
    protocol: ProtocolSection
    model: Literal["full", "effective"] = "full"
    frame: Literal["drive", "lab"] = "drive"
    initial_site: int = 1
    target_site: Optional[int] = None
    disorder: Optional[DisorderSection] = None
    realization_index: Optional[int] = Field(default=None, ge=0)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)

    def chain_spec(self) -> ChainSpec:
        return ChainSpec(**self.chain.model_dump())

    def drive_protocol(self) -> DriveProtocol:
        return DriveProtocol(**self.protocol.model_dump())

    def disorder_spec(self) -> Optional[DisorderSpec]:
        return None if self.disorder is None else DisorderSpec(**self.disorder.model_dump())

    def transfer_config(self) -> TransferConfig:
        chain = self.chain_spec()
        realization = None
        spec = self.disorder_spec()
        if spec is not None and self.realization_index is not None:
            realization = sample_disorder(spec, self.realization_index, chain.n_sites)
        return TransferConfig(
            chain=chain,
            protocol=self.drive_protocol(),
            model=self.model,
            initial_site=self.initial_site,
            target_site=self.target_site,
            realization=realization,
            frame=self.frame,
        )

    def with_overrides(self, seed: Optional[int] = None, model: Optional[str] = None) -> "RunConfigDocument":
        doc = self.model_copy(deep=True)
        if seed is not None:
            disorder = doc.disorder or DisorderSection()
            doc.disorder = disorder.model_copy(update={"master_seed": seed})
        if model is not None:
            doc.model = model
        return RunConfigDocument.model_validate(doc.model_dump())

    def dumps(self) -> str:
        return self.model_dump_json(indent=2)


def _describe(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<document>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def parse_config(text: str, source: str = "<string>") -> RunConfigDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{source}: not valid JSON ({exc})") from exc
    try:
        doc = RunConfigDocument.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"{source}: {_describe(exc)}") from exc
    try:
        doc.transfer_config()
    except CTAPError as exc:
        raise ConfigurationError(f"{source}: {exc}") from exc
    return doc


def load_config(path) -> RunConfigDocument:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))


def reference_document() -> RunConfigDocument:
    """Configuration of the 19-site reference transfer."""
    p = DriveProtocol.from_ratios()
    return RunConfigDocument(
        chain=ChainSection(n_sites=19),
        protocol=ProtocolSection(omega=p.omega, tau=p.tau, delay=p.delay, t_half=p.t_half),
    )
