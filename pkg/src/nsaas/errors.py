"""Exception hierarchy shared by all engine modules.

Every rejection carries a machine-readable ``code`` so northbound callers
can branch on it without parsing messages.
"""

from __future__ import annotations


class NsaasError(Exception):
    """Base class for all engine errors."""

    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.__doc__)
        self.details = details

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "details": self.details}


class SchemaError(NsaasError):
    """Request body does not match the expected JSON shape."""

    code = "schema_error"

    def __init__(self, message: str, field_path: str = ""):
        super().__init__(message, field_path=field_path)
        self.field_path = field_path


class UnclassifiableRequest(NsaasError):
    """Slice request attributes are mutually contradictory."""

    code = "unclassifiable_request"


class EmptyCatalog(NsaasError):
    """Catalog holds no templates for the queried domain."""

    code = "empty_catalog"


class SequenceConflict(NsaasError):
    """Optimistic-concurrency check failed; re-read and retry."""

    code = "sequence_conflict"


class NoMatch(NsaasError):
    """No catalog template can satisfy the normalized requirements."""

    code = "no_match"


class OverrideConflict(NsaasError):
    """Explicit NF overrides contradict the selected template's sharing policy."""

    code = "override_conflict"


class ValidationError(NsaasError):
    """Rendered slice template failed policy or schema validation."""

    code = "validation_error"

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations), violations=violations)
        self.violations = violations


class PoolExhausted(NsaasError):
    """No free slice differentiator left in the identifier pool."""

    code = "pool_exhausted"


class UnknownScenario(NsaasError):
    """No deployment substep catalog exists for the scenario."""

    code = "unknown_scenario"


class DomainDeployFailure(NsaasError):
    """A domain substep failed during deployment."""

    code = "domain_deploy_failure"

    def __init__(self, domain: str, substep: str, message: str = ""):
        super().__init__(message or f"deployment failed in {domain} at substep {substep}",
                         domain=domain, substep=substep)
        self.domain = domain
        self.substep = substep


class NotFound(NsaasError):
    """Referenced slice instance does not exist or was terminated."""

    code = "not_found"


class ConcurrentModification(NsaasError):
    """Another reconfiguration of the same slice is still in flight."""

    code = "concurrent_modification"


class DuplicateInFlight(NsaasError):
    """An identical request is currently being deployed."""

    code = "duplicate_in_flight"


class QuotaExceeded(NsaasError):
    """Site resource quota would be exceeded by the release."""

    code = "quota_exceeded"


class NoPath(NsaasError):
    """Topology holds no path between the requested endpoints."""

    code = "no_path"


class RuleConflict(NsaasError):
    """A flow rule with the same match but a different action is installed."""

    code = "rule_conflict"


class NoAmfAvailable(NsaasError):
    """Attach attempt while no AMF instance of the slice is ready."""

    code = "no_amf_available"


class NoCapacity(NsaasError):
    """All candidate slices are at their admission cap."""

    code = "no_capacity"


class UnknownExperiment(NsaasError):
    """No experiment is registered under the given name."""

    code = "unknown_experiment"


class RankDeficient(NsaasError):
    """Price-table design matrix does not have full column rank."""

    code = "rank_deficient"
