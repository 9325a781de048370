"""
CONFIG - Configuração do Experimento
Carrega o documento (YAML ou JSON), aplica defaults, valida e gera o eco resolvido
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from src.core.errors import ConfigError

logger = logging.getLogger(__name__)

VALID_METHODS = ("trace", "gershgorin", "evd", "cox", "smi", "omniscient", "quiescent")
LOADING_METHODS = ("trace", "gershgorin", "evd")
VALID_ARCHITECTURES = ("mpdr", "gsc")
MAX_SEED = 2 ** 64
# Mesma folga de src.analysis.loading.WNG_CEILING_TOLERANCE_DB
WNG_CEILING_TOLERANCE_DB = 1e-9


def _section(raw: Dict[str, Any], name: str) -> Dict[str, Any]:
    value = raw.get(name, {}) or {}
    if not isinstance(value, dict):
        raise ConfigError("esperado um objeto", field=name)
    return value


def _reject_unknown(section: Dict[str, Any], allowed, prefix: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"campo desconhecido (válidos: {', '.join(sorted(allowed))})", field=f"{prefix}.{key}")


def _power_from_db(reference: float, value_db: float) -> float:
    try:
        return reference * 10.0 ** (value_db / 10.0)
    except OverflowError:
        return math.inf


def _number(section: Dict[str, Any], key: str, default, prefix: str, cast=float):
    value = section.get(key, default)
    if isinstance(value, bool):
        raise ConfigError(f"esperado número, recebido {value!r}", field=f"{prefix}.{key}")
    try:
        number = cast(value)
    except (TypeError, ValueError, OverflowError):
        raise ConfigError(f"esperado número, recebido {value!r}", field=f"{prefix}.{key}")
    # int() truncaria 2.7 em silêncio
    if cast is int and isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"esperado inteiro, recebido {value!r}", field=f"{prefix}.{key}")
    return number


def _flag(section: Dict[str, Any], key: str, default: bool, prefix: str) -> bool:
    value = section.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(f"esperado true/false, recebido {value!r}", field=f"{prefix}.{key}")
    return value


@dataclass(frozen=True)
class ScenarioConfig:
    """Mundo simulado: ULA, janela, fontes e processo de nascimento/morte."""
    num_elements: int = 15
    element_spacing: float = 0.5          # fração do comprimento de onda
    center_frequency_hz: float = 1000.0   # só metadado
    window_length: int = 37
    total_snapshots: int = 20000
    target_angle_deg: float = 90.0
    snr_db: float = -5.0
    inr_db: float = 7.0
    noise_power: float = 1.0
    max_interferers: int = 2
    birth_probability: float = 0.002
    mean_lifetime: float = 1000.0
    rng_seed: int = 0
    beampattern_window_db: Tuple[float, float] = (-13.0, -3.0)
    angle_grid_step_deg: float = 1.0

    @property
    def target_power(self) -> float:
        return _power_from_db(self.noise_power, self.snr_db)

    @property
    def interferer_power(self) -> float:
        return _power_from_db(self.noise_power, self.inr_db)

    @classmethod
    def from_dict(cls, section: Dict[str, Any]) -> "ScenarioConfig":
        prefix = "scenario"
        names = {f.name for f in dataclasses.fields(cls)}
        _reject_unknown(section, names, prefix)
        defaults = cls()

        window = section.get("beampattern_window_db", defaults.beampattern_window_db)
        if not isinstance(window, (list, tuple)) or len(window) != 2:
            raise ConfigError("esperado par [lo_db, hi_db]", field=f"{prefix}.beampattern_window_db")
        try:
            window = (float(window[0]), float(window[1]))
        except (TypeError, ValueError):
            raise ConfigError("valores não numéricos", field=f"{prefix}.beampattern_window_db")

        config = cls(
            num_elements=_number(section, "num_elements", defaults.num_elements, prefix, int),
            element_spacing=_number(section, "element_spacing", defaults.element_spacing, prefix),
            center_frequency_hz=_number(section, "center_frequency_hz", defaults.center_frequency_hz, prefix),
            window_length=_number(section, "window_length", defaults.window_length, prefix, int),
            total_snapshots=_number(section, "total_snapshots", defaults.total_snapshots, prefix, int),
            target_angle_deg=_number(section, "target_angle_deg", defaults.target_angle_deg, prefix),
            snr_db=_number(section, "snr_db", defaults.snr_db, prefix),
            inr_db=_number(section, "inr_db", defaults.inr_db, prefix),
            noise_power=_number(section, "noise_power", defaults.noise_power, prefix),
            max_interferers=_number(section, "max_interferers", defaults.max_interferers, prefix, int),
            birth_probability=_number(section, "birth_probability", defaults.birth_probability, prefix),
            mean_lifetime=_number(section, "mean_lifetime", defaults.mean_lifetime, prefix),
            rng_seed=_number(section, "rng_seed", defaults.rng_seed, prefix, int),
            beampattern_window_db=window,
            angle_grid_step_deg=_number(section, "angle_grid_step_deg", defaults.angle_grid_step_deg, prefix),
        )
        config.validate()
        return config

    def validate(self) -> None:
        prefix = "scenario"
        if self.num_elements < 2:
            raise ConfigError("ULA precisa de M >= 2", field=f"{prefix}.num_elements")
        if not (self.element_spacing > 0):
            raise ConfigError("espaçamento deve ser > 0", field=f"{prefix}.element_spacing")
        if self.window_length < 1:
            raise ConfigError("janela deve ter L >= 1", field=f"{prefix}.window_length")
        if self.total_snapshots < 1:
            raise ConfigError("T deve ser >= 1", field=f"{prefix}.total_snapshots")
        if not (0.0 < self.target_angle_deg < 180.0):
            raise ConfigError("ângulo do alvo deve estar em (0, 180)", field=f"{prefix}.target_angle_deg")
        if not (math.isfinite(self.noise_power) and self.noise_power > 0):
            raise ConfigError("potência de ruído deve ser finita e > 0", field=f"{prefix}.noise_power")
        for key, power in (("snr_db", self.target_power), ("inr_db", self.interferer_power)):
            if not (math.isfinite(power) and power >= 0):
                raise ConfigError(f"potência linear não finita ({power})", field=f"{prefix}.{key}")
        if self.max_interferers < 0:
            raise ConfigError("deve ser >= 0", field=f"{prefix}.max_interferers")
        if not (0.0 <= self.birth_probability <= 1.0):
            raise ConfigError("probabilidade deve estar em [0, 1]", field=f"{prefix}.birth_probability")
        if not (self.mean_lifetime >= 1.0):
            raise ConfigError("vida média deve ser >= 1 snapshot", field=f"{prefix}.mean_lifetime")
        if not (0 <= self.rng_seed < MAX_SEED):
            raise ConfigError("semente deve caber em 64 bits sem sinal", field=f"{prefix}.rng_seed")
        lo_db, hi_db = self.beampattern_window_db
        if not (lo_db < hi_db < 0):
            raise ConfigError("esperado lo_db < hi_db < 0", field=f"{prefix}.beampattern_window_db")
        if not (0 < self.angle_grid_step_deg < 90):
            raise ConfigError("passo da grade deve estar em (0, 90)", field=f"{prefix}.angle_grid_step_deg")

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["beampattern_window_db"] = list(self.beampattern_window_db)
        return data


@dataclass(frozen=True)
class LoadingConfig:
    """Piso de WNG em dB; se wng_min_db for nulo usa 10log10(M) - wng_margin_db."""
    wng_min_db: Optional[float] = None
    wng_margin_db: float = 3.0

    def resolved_wng_min_db(self, num_elements: int) -> float:
        if self.wng_min_db is not None:
            return self.wng_min_db
        return 10.0 * math.log10(num_elements) - self.wng_margin_db

    @classmethod
    def from_dict(cls, section: Dict[str, Any], num_elements: int) -> "LoadingConfig":
        prefix = "loading"
        _reject_unknown(section, {"wng_min_db", "wng_margin_db"}, prefix)
        margin = _number(section, "wng_margin_db", 3.0, prefix)
        raw_floor = section.get("wng_min_db")
        floor = None if raw_floor is None else _number(section, "wng_min_db", None, prefix)
        config = cls(wng_min_db=floor, wng_margin_db=margin)

        ceiling = 10.0 * math.log10(num_elements)
        resolved = config.resolved_wng_min_db(num_elements)
        if not (0.0 <= resolved <= ceiling + WNG_CEILING_TOLERANCE_DB):
            raise ConfigError(f"piso {resolved:.4f} dB fora de [0, {ceiling:.4f}] dB",
                              field=f"{prefix}.wng_min_db")
        # eco sempre com o valor resolvido; a folga acima do teto vira o próprio teto
        resolved = min(resolved, ceiling)
        return cls(wng_min_db=resolved, wng_margin_db=margin)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ExperimentConfig:
    """Experimento completo: cenário, piso de WNG, métodos, arquiteturas e execução."""
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    loading: LoadingConfig = field(default_factory=lambda: LoadingConfig(wng_min_db=10.0 * math.log10(15) - 3.0))
    methods: Tuple[str, ...] = VALID_METHODS
    architectures: Tuple[str, ...] = VALID_ARCHITECTURES
    trials: int = 1
    output_dir: str = "data/outputs"
    workers: int = 1
    include_warmup: bool = False
    scan_decimation: int = 10
    scan_grid_step_deg: float = 1.0

    @property
    def wng_min_db(self) -> float:
        return self.loading.resolved_wng_min_db(self.scenario.num_elements)

    @classmethod
    def from_dict(cls, raw: Optional[Dict[str, Any]]) -> "ExperimentConfig":
        """
        Constrói a configuração a partir do documento bruto.

        Args:
            raw: Dict com seções "scenario", "loading" e "experiment"

        Returns:
            ExperimentConfig validada

        Raises:
            ConfigError: campo inválido (com caminho)
        """
        raw = raw or {}
        if not isinstance(raw, dict):
            raise ConfigError("documento de configuração deve ser um objeto")
        _reject_unknown(raw, {"scenario", "loading", "experiment"}, "config")

        scenario = ScenarioConfig.from_dict(_section(raw, "scenario"))
        loading = LoadingConfig.from_dict(_section(raw, "loading"), scenario.num_elements)

        prefix = "experiment"
        section = _section(raw, prefix)
        allowed = {"methods", "architectures", "trials", "output_dir", "workers",
                   "include_warmup", "scan_decimation", "scan_grid_step_deg"}
        _reject_unknown(section, allowed, prefix)

        config = cls(
            scenario=scenario,
            loading=loading,
            methods=_choice_list(section, "methods", VALID_METHODS, prefix),
            architectures=_choice_list(section, "architectures", VALID_ARCHITECTURES, prefix),
            trials=_number(section, "trials", 1, prefix, int),
            output_dir=str(section.get("output_dir", "data/outputs")),
            workers=_number(section, "workers", 1, prefix, int),
            include_warmup=_flag(section, "include_warmup", False, prefix),
            scan_decimation=_number(section, "scan_decimation", 10, prefix, int),
            scan_grid_step_deg=_number(section, "scan_grid_step_deg", 1.0, prefix),
        )
        config.validate()
        return config

    def validate(self) -> None:
        self.scenario.validate()
        if self.trials < 1:
            raise ConfigError("deve ser >= 1", field="experiment.trials")
        if self.workers < 1:
            raise ConfigError("deve ser >= 1", field="experiment.workers")
        if not self.methods:
            raise ConfigError("lista de métodos vazia", field="experiment.methods")
        if not self.architectures:
            raise ConfigError("lista de arquiteturas vazia", field="experiment.architectures")
        if self.scan_decimation < 1:
            raise ConfigError("deve ser >= 1", field="experiment.scan_decimation")
        if not (0 < self.scan_grid_step_deg < 90):
            raise ConfigError("passo deve estar em (0, 90)", field="experiment.scan_grid_step_deg")
        if self.scenario.rng_seed + self.trials - 1 >= MAX_SEED:
            raise ConfigError("semente + trials excede 64 bits", field="scenario.rng_seed")
        ceiling = 10.0 * math.log10(self.scenario.num_elements)
        if self.wng_min_db > ceiling + WNG_CEILING_TOLERANCE_DB:
            raise ConfigError(f"piso acima do teto {ceiling:.4f} dB", field="loading.wng_min_db")

    def with_overrides(self, trials: Optional[int] = None, seed: Optional[int] = None,
                       output_dir: Optional[str] = None, workers: Optional[int] = None) -> "ExperimentConfig":
        """Aplica as flags da CLI; o resultado aparece no eco."""
        config = self
        if seed is not None:
            config = dataclasses.replace(config, scenario=dataclasses.replace(config.scenario, rng_seed=int(seed)))
        if trials is not None:
            config = dataclasses.replace(config, trials=int(trials))
        if output_dir is not None:
            config = dataclasses.replace(config, output_dir=str(output_dir))
        if workers is not None:
            config = dataclasses.replace(config, workers=int(workers))
        config.validate()
        return config

    def to_dict(self) -> Dict[str, Any]:
        """Eco resolvido: todos os defaults explícitos."""
        return {
            "scenario": self.scenario.to_dict(),
            "loading": self.loading.to_dict(),
            "experiment": {
                "methods": list(self.methods),
                "architectures": list(self.architectures),
                "trials": self.trials,
                "output_dir": self.output_dir,
                "workers": self.workers,
                "include_warmup": self.include_warmup,
                "scan_decimation": self.scan_decimation,
                "scan_grid_step_deg": self.scan_grid_step_deg,
            },
        }


def _choice_list(section: Dict[str, Any], key: str, valid: Tuple[str, ...], prefix: str) -> Tuple[str, ...]:
    values = section.get(key, list(valid))
    if isinstance(values, str) or not isinstance(values, (list, tuple)):
        raise ConfigError("esperado uma lista", field=f"{prefix}.{key}")
    result = []
    for value in values:
        name = str(value).lower()
        if name not in valid:
            raise ConfigError(f"valor inválido {value!r} (válidos: {', '.join(valid)})", field=f"{prefix}.{key}")
        if name not in result:
            result.append(name)
    # ordem canônica: colunas do CSV não dependem da ordem no arquivo
    return tuple(name for name in valid if name in result)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Lê o arquivo de configuração (JSON ou YAML; JSON é YAML válido).

    Raises:
        ConfigError: arquivo ausente, sintaxe inválida ou campo inválido
    """
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"arquivo não encontrado: {config_path}")
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"sintaxe inválida em {config_path}: {e}")
    logger.info(f"Configuração carregada de {config_path}")
    return ExperimentConfig.from_dict(raw)
