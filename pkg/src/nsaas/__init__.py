"""Network-slice-as-a-service orchestration engine over a deterministic
simulated multi-domain (CN/RAN/TN) infrastructure.

Typical usage::

    from nsaas import SliceEngine, EngineConfig

    engine = SliceEngine()
    nsi = engine.submit({"name": "demo", "NST": {"type": "urllc"}})
    print(nsi.state, engine.deployment_report(nsi.id).grand_total_s())
"""

from .config import EngineConfig
from .engine import SliceEngine
from .errors import NsaasError
from .experiments import EXPERIMENTS, ExperimentRunner, scenario_request
from .model import (
    NSI,
    NSSI,
    NSST,
    NST,
    Domain,
    NormalizedRequirements,
    NsiState,
    NssiState,
    ScenarioClass,
    SlaTarget,
    SliceRequest,
    SNssai,
    classify_slice_type,
    denormalize_requirements,
    normalize_requirements,
)
from .orchestrator import DeploymentPlan, DeploymentReport, step_efficiency
from .store import Catalog, Inventory

__all__ = [
    "EngineConfig",
    "SliceEngine",
    "NsaasError",
    "EXPERIMENTS",
    "ExperimentRunner",
    "scenario_request",
    "SNssai",
    "SliceRequest",
    "NormalizedRequirements",
    "SlaTarget",
    "NSST",
    "NST",
    "NSI",
    "NSSI",
    "Domain",
    "ScenarioClass",
    "NsiState",
    "NssiState",
    "classify_slice_type",
    "normalize_requirements",
    "denormalize_requirements",
    "DeploymentPlan",
    "DeploymentReport",
    "step_efficiency",
    "Catalog",
    "Inventory",
]

__version__ = "0.1.0"
