"""Experiment configuration: families, sections, lambda sampling, tolerances."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .. import __version__
from ..corpus import bundled_family, bundled_section, non_torsion_corpus, torsion_sections
from ..family import FamilyPoint, WeierstrassFamily, section_from_json

DEFAULT_TOLERANCES = {
    "canonical": 1e-8,  # absolute tail bound for fiber heights
    "silverman_rel": 1e-4,  # tail bound relative to h_S in the Silverman sweep
    "newton": 1e-9,
}

_CORPORA = {
    "bundled": lambda: [bundled_section()],
    "non_torsion": non_torsion_corpus,
    "torsion": torsion_sections,
}


def _family(spec) -> WeierstrassFamily:
    if spec is None or spec == "bundled" or (isinstance(spec, dict) and spec.get("bundled")):
        return bundled_family()
    if spec == "legendre":
        return WeierstrassFamily.legendre()
    return WeierstrassFamily.from_json(spec)


def _fraction_list(values) -> list[Fraction]:
    return [Fraction(str(v)) for v in values]


@dataclass(frozen=True)
class SamplingRule:
    """list | farey (height <= H in an interval) | random (bounded num/den) | powers (base^k + offset)."""

    rule: str = "farey"
    values: tuple = ()
    H: int = 12
    interval: tuple = (Fraction(-2), Fraction(2))
    count: int = 40
    num_bound: int = 40
    den_bound: int = 40
    seed: int = 0
    base: int = 2
    exponents: tuple = ()
    offset: int = 1

    @classmethod
    def from_json(cls, data) -> "SamplingRule":
        data = dict(data or {})
        kw = {"rule": data.get("rule", "farey")}
        if "values" in data:
            kw["values"] = tuple(_fraction_list(data["values"]))
        if "interval" in data:
            kw["interval"] = tuple(_fraction_list(data["interval"]))
        if "exponents" in data:
            kw["exponents"] = tuple(int(e) for e in data["exponents"])
        for key in ("H", "count", "num_bound", "den_bound", "seed", "base", "offset"):
            if key in data:
                kw[key] = int(data[key])
        rule = cls(**kw)
        if rule.rule not in ("list", "farey", "random", "powers"):
            raise ValueError(f"unknown sampling rule {rule.rule!r}")
        return rule

    def to_json(self) -> dict:
        out = {"rule": self.rule}
        if self.rule == "list":
            out["values"] = [str(v) for v in self.values]
        elif self.rule == "farey":
            out.update(H=self.H, interval=[str(v) for v in self.interval])
        elif self.rule == "random":
            out.update(count=self.count, num_bound=self.num_bound, den_bound=self.den_bound, seed=self.seed)
        else:
            out.update(base=self.base, exponents=list(self.exponents), offset=self.offset)
        return out

    def generate(self, family: Optional[WeierstrassFamily] = None) -> list[Fraction]:
        """Sorted distinct rationals, singular values of the family removed."""
        if self.rule == "list":
            pts = set(self.values)
        elif self.rule == "farey":
            lo, hi = self.interval
            pts = {
                Fraction(p, q)
                for q in range(1, self.H + 1)
                for p in range(-self.H, self.H + 1)
                if lo <= Fraction(p, q) <= hi
            }
        elif self.rule == "random":
            rng = random.Random(self.seed)
            pts = set()
            while len(pts) < self.count:
                pts.add(Fraction(rng.randint(-self.num_bound, self.num_bound), rng.randint(1, self.den_bound)))
        else:
            return [Fraction(self.base**k + self.offset) for k in self.exponents]
        if family is not None:
            pts = {p for p in pts if not family.is_singular_value(p)}
        return sorted(pts)


@dataclass
class ExperimentConfig:
    family: WeierstrassFamily = field(default_factory=bundled_family)
    sections: list = field(default_factory=lambda: [bundled_section()])
    lambda_samples: SamplingRule = field(default_factory=SamplingRule)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    cache_dir: str = "heightlab-cache"
    experiments: list = field(default_factory=list)
    seed: int = 0
    raw: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if any(not v > 0 for v in self.tolerances.values()):
            raise ValueError("tolerances must be positive")

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        family = _family(data.get("family"))
        sections: list[FamilyPoint] = []
        for spec in data.get("sections", [{"corpus": "bundled"}]):
            if "corpus" in spec:
                sections.extend(_CORPORA[spec["corpus"]]())
            else:
                sections.append(section_from_json(_family(spec.get("family", data.get("family"))), spec))
        tolerances = dict(DEFAULT_TOLERANCES)
        tolerances.update({k: float(v) for k, v in data.get("tolerances", {}).items()})
        return cls(
            family=family,
            sections=sections,
            lambda_samples=SamplingRule.from_json(data.get("lambda_samples")),
            tolerances=tolerances,
            cache_dir=data.get("cache_dir", "heightlab-cache"),
            experiments=list(data.get("experiments", [])),
            seed=int(data.get("seed", 0)),
            raw=data,
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_json(self) -> dict:
        return {
            "family": self.family.to_json(),
            "sections": [{"family": s.family.to_json(), **s.to_json()} for s in self.sections],
            "lambda_samples": self.lambda_samples.to_json(),
            "tolerances": {k: self.tolerances[k] for k in sorted(self.tolerances)},
            "experiments": self.experiments,
            "seed": self.seed,
        }

    def config_hash(self) -> str:
        """Hash of everything that can change a result (not cache_dir), plus code version."""
        blob = json.dumps({"config": self.to_json(), "version": __version__}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def samples(self) -> list[Fraction]:
        return self.lambda_samples.generate(self.family)


def default_config() -> ExperimentConfig:
    """The non-torsion corpus with one run of every experiment."""
    return ExperimentConfig.from_json({
        "sections": [{"corpus": "non_torsion"}],
        "lambda_samples": {"rule": "farey", "H": 12, "interval": ["-2", "2"]},
        "tolerances": {"canonical": 1e-4},
        "experiments": [
            {"kind": "inequality"},
            {"kind": "degree_growth", "section": 0, "N_list": [0, 1, 2, 3, 4, 5, 6]},
            {"kind": "silverman_limit", "section": 0,
             "lambda_sequence": {"rule": "powers", "base": 2, "exponents": list(range(26, 146, 5))}},
            {"kind": "torsion_growth", "section": 0, "N_list": [20, 30, 40, 60], "disc": [0.5, 0.0, 0.45], "grid": 64},
        ],
    })
