import threading
import tomllib
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field


def get_project_root() -> Path:
    """Get the project root directory"""
    return Path(__file__).resolve().parent.parent


PROJECT_ROOT = get_project_root()
DATA_ROOT = Path(__file__).resolve().parent / "data"


class NumericsSettings(BaseModel):
    hermitian_tol: float = Field(1e-12, description="Max |m - m^dagger| entry")
    trace_tol: float = Field(1e-12, description="Max |tr(m) - 1|")
    psd_tol: float = Field(
        1e-10, description="Eigenvalues in [-psd_tol, 0) are clamped to zero"
    )
    cptp_tol: float = Field(1e-10, description="Max |sum K^dagger K - I| entry")


class SearchSettings(BaseModel):
    """Minimum-output-entropy search over pure target states"""

    theta_points: int = Field(64, ge=2, description="Polar grid points on [0, pi]")
    phi_points: int = Field(128, ge=1, description="Azimuthal grid points on [0, 2pi)")
    tolerance: float = Field(1e-8, description="Powell ftol on the entropy")
    min_step: float = Field(1e-7, description="Powell xtol in radians")
    max_sweeps: int = Field(500, description="Powell iteration limit")


class SweepSettings(BaseModel):
    q_min: float = Field(0.0, description="Lowest depolarising strength")
    q_max: float = Field(1.0, description="Highest depolarising strength")
    steps: int = Field(101, description="Number of grid points, both ends included")
    gamma: float = Field(0.5, description="Control amplitude weight")
    workers: int = Field(1, description="Executor threads used to evaluate rows")


class ExperimentSettings(BaseModel):
    visibility: float = Field(0.853, description="Interferometric visibility")
    visibility_err: float = Field(0.018, description="1 sigma visibility uncertainty")
    measurements: Optional[Path] = Field(
        None, description="Measurement CSV (None for the bundled table)"
    )
    mc_samples: int = Field(1000, description="Monte Carlo resamples")
    mc_seed: int = Field(2019, description="Monte Carlo seed")


class PlotSettings(BaseModel):
    width: int = Field(960, description="SVG width in pixels")
    height: int = Field(600, description="SVG height in pixels")
    floor: float = Field(1e-12, description="Values below are clamped before log10")


class LogSettings(BaseModel):
    print_level: str = Field("INFO", description="stderr log level")
    logfile_level: str = Field("DEBUG", description="Log file level")
    to_file: bool = Field(False, description="Whether to also write logs/ files")


class AppConfig(BaseModel):
    numerics: NumericsSettings = Field(default_factory=NumericsSettings)
    search: SearchSettings = Field(default_factory=SearchSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    experiment: ExperimentSettings = Field(default_factory=ExperimentSettings)
    plot: PlotSettings = Field(default_factory=PlotSettings)
    logging: LogSettings = Field(default_factory=LogSettings)


class Config:
    _instance = None
    _lock = threading.Lock()
    _initialized = False

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not self._initialized:
            with self._lock:
                if not self._initialized:
                    self._config = None
                    self._load_initial_config()
                    self._initialized = True

    @staticmethod
    def _get_config_path() -> Optional[Path]:
        root = PROJECT_ROOT
        config_path = root / "config" / "config.toml"
        if config_path.exists():
            return config_path
        example_path = root / "config" / "config.example.toml"
        if example_path.exists():
            return example_path
        # installed without the config directory: built-in defaults
        return None

    def _load_config(self) -> dict:
        config_path = self._get_config_path()
        if config_path is None:
            return {}
        with config_path.open("rb") as f:
            return tomllib.load(f)

    def _load_initial_config(self):
        raw_config = self._load_config()

        # only keep sections AppConfig knows about.
        config_dict = {
            name: section
            for name, section in raw_config.items()
            if name in AppConfig.model_fields and isinstance(section, dict)
        }

        experiment = config_dict.get("experiment")
        if experiment and experiment.get("measurements"):
            path = Path(experiment["measurements"])
            if not path.is_absolute():
                experiment["measurements"] = PROJECT_ROOT / path

        self._config = AppConfig(**config_dict)

    @property
    def numerics(self) -> NumericsSettings:
        return self._config.numerics

    @property
    def search(self) -> SearchSettings:
        return self._config.search

    @property
    def sweep(self) -> SweepSettings:
        return self._config.sweep

    @property
    def experiment(self) -> ExperimentSettings:
        return self._config.experiment

    @property
    def plot(self) -> PlotSettings:
        return self._config.plot

    @property
    def logging(self) -> LogSettings:
        return self._config.logging

    @property
    def data_root(self) -> Path:
        """Get the directory holding bundled data files"""
        return DATA_ROOT

    @property
    def root_path(self) -> Path:
        """Get the root path of the application"""
        return PROJECT_ROOT


config = Config()
