"""
Configuration management module for cddp-toolkit
Centralized configuration for model constants, solver limits and defaults
"""
import os
import json
from pathlib import Path
from typing import Any, Dict, List, Optional
from dataclasses import dataclass, asdict, field, fields

import yaml


DEFAULTS_FILE = Path(__file__).resolve().parent.parent.parent / "config" / "default.yaml"


@dataclass
class ModelConfig:
    """Problem-model constants"""
    penalty_factor: float = 10.0  # F0 = factor * (max F_strip + max F_stack + max E * total flow)
    basic_capacity_level: int = 1  # S_0i := S_{level,i}
    capacity_tolerance: float = 1e-6
    weight_tolerance: float = 1e-9


@dataclass
class TestbedConfig:
    """Instance generator defaults"""
    __test__ = False  # not a pytest class

    slack_set: List[int] = field(default_factory=lambda: [5, 10, 15, 20, 30])
    density: float = 0.25
    flow_range: List[int] = field(default_factory=lambda: [10, 50])
    n_levels: int = 5
    cost_factor: float = 1.0
    ladder_base: float = 0.6
    ladder_step: float = 0.2


@dataclass
class SolverConfig:
    """Limits for the in-repo solvers"""
    time_limit: float = 60.0  # seconds per submodel
    node_limit: int = 200000
    lsh_restarts: int = 5
    omega_exact_threshold: int = 64  # exact if |M| * |I| <= threshold
    oracle_max_leaves: float = 1e8
    integrality_tolerance: float = 1e-6
    jobs: int = 1


@dataclass
class AlgorithmConfig:
    """Matheuristic defaults"""
    kappa: int = 2
    rho: float = 0.0
    delta: int = 1
    bound_option: str = "both"  # "1", "2" or "both"
    escalation: str = "textual"  # or "literal": k + delta * |K|
    basic_capacity: str = "fallback"  # or "always"
    step0_option: int = 1


@dataclass
class OperationalConfig:
    """Operational configuration settings"""
    log_level: str = "WARNING"
    log_file: Optional[str] = None
    enable_color_output: bool = True
    report_format: str = "csv"


_SECTIONS = {
    "model": ModelConfig,
    "testbed": TestbedConfig,
    "solver": SolverConfig,
    "algorithm": AlgorithmConfig,
    "operational": OperationalConfig,
}


def _read_file(path: Path) -> Dict[str, Any]:
    with open(path, 'r') as f:
        if path.suffix in ('.yaml', '.yml'):
            data = yaml.safe_load(f)
        else:
            data = json.load(f)
    return data or {}


class ConfigManager:
    """Centralized configuration manager"""

    def __init__(self, config_file: Optional[str] = None):
        self.model_config = ModelConfig()
        self.testbed_config = TestbedConfig()
        self.solver_config = SolverConfig()
        self.algorithm_config = AlgorithmConfig()
        self.operational_config = OperationalConfig()
        if DEFAULTS_FILE.exists():
            self._apply(_read_file(DEFAULTS_FILE))
        self.config_file = config_file or self._find_user_config()
        self._load_config()

    def _find_user_config(self) -> Optional[str]:
        """Get the first user configuration file that exists"""
        candidates = []
        env_path = os.environ.get("CDDP_CONFIG")
        if env_path:
            candidates.append(Path(env_path))
        candidates += [
            Path.cwd() / "cddp.yaml",
            Path.cwd() / "cddp.json",
            Path.home() / ".cddp" / "config.yaml",
        ]
        for path in candidates:
            if path.exists():
                return str(path)
        return None

    def _apply(self, config_data: Dict[str, Any]) -> None:
        for section, cls in _SECTIONS.items():
            if section not in config_data or not config_data[section]:
                continue
            known = {f.name for f in fields(cls)}
            current = asdict(self._section(section))
            current.update({k: v for k, v in config_data[section].items() if k in known})
            setattr(self, f"{section}_config", cls(**current))

    def _section(self, name: str) -> Any:
        return getattr(self, f"{name}_config")

    def _load_config(self) -> None:
        """Load configuration from file"""
        if not self.config_file or not Path(self.config_file).exists():
            return
        self._apply(_read_file(Path(self.config_file)))

    def as_dict(self) -> Dict[str, Any]:
        return {name: asdict(self._section(name)) for name in _SECTIONS}

    def save_config(self, path: Optional[str] = None) -> str:
        """Save current configuration to file"""
        target = Path(path or self.config_file or Path.cwd() / "cddp.yaml")
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'w') as f:
            if target.suffix in ('.yaml', '.yml'):
                yaml.safe_dump(self.as_dict(), f, default_flow_style=False)
            else:
                json.dump(self.as_dict(), f, indent=2)
        self.config_file = str(target)
        return self.config_file

    def get_setting(self, section: str, key: str) -> Any:
        """Get a configuration setting"""
        return getattr(self._section(section), key, None)

    def set_setting(self, section: str, key: str, value: Any) -> None:
        """Set a configuration setting"""
        setattr(self._section(section), key, value)


# Global configuration instance
_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """Get the global configuration manager instance"""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def reset_config_manager(config_file: Optional[str] = None) -> ConfigManager:
    """Replace the global manager, e.g. after --config on the command line"""
    global _config_manager
    _config_manager = ConfigManager(config_file)
    return _config_manager


def get_model_config() -> ModelConfig:
    return get_config_manager().model_config


def get_testbed_config() -> TestbedConfig:
    return get_config_manager().testbed_config


def get_solver_config() -> SolverConfig:
    return get_config_manager().solver_config


def get_algorithm_config() -> AlgorithmConfig:
    return get_config_manager().algorithm_config


def get_operational_config() -> OperationalConfig:
    """Get the operational configuration"""
    return get_config_manager().operational_config
