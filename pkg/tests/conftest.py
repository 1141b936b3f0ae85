import copy

import pytest

from nsaas.config import EngineConfig
from nsaas.engine import SliceEngine

# Custom tenant request in the northbound wire shape (field names are the
# wire contract, including the "Burts" spelling).
CUSTOM_TENANT_REQUEST = {
    "name": "Custom 5G Network Slice",
    "NST": {
        "type": "custom",
        "Slice Attributes": {
            "availability": 1,
            "Supported Data Network": "internet",
            "SSQ": {
                "Packet Delay Budget": 0.00012,
                "Packet Error Rate": 0.0000001,
                "Maximum Data Burts Volume": 0.001,
            },
            "UE density": 10000,
        },
        "resource_description": {
            "core": {"nfs": [{"name": "amf"}, {"name": "smf"}, {"name": "upf"}]},
            "ran": {"nfs": [{"name": "ueransim", "type": "gnb", "replicas": 2}]},
            "tn": {"routes": [{"name": "backhaul"}]},
        },
    },
}


def typed_request(nst_type: str, name: str | None = None) -> dict:
    return {"name": name or f"{nst_type}-slice", "NST": {"type": nst_type}}


@pytest.fixture(scope="session")
def config() -> EngineConfig:
    return EngineConfig.load()


@pytest.fixture
def engine(config) -> SliceEngine:
    return SliceEngine(config)


@pytest.fixture
def tenant_request() -> dict:
    return copy.deepcopy(CUSTOM_TENANT_REQUEST)
