from .config import Algorithm, EpsilonSchedule, ParticipationMode, FederationConfig
from .client import (
    ClientSpec,
    make_clients,
    check_clients,
    priority_ids,
    nonpriority_ids,
    weighted_loss,
    weighted_accuracy,
)
from .server import (
    ProtocolError,
    lr,
    include_nonpriority,
    client_opt_in,
    aggregate,
    aggregate_partial,
    sample_priority,
)
from .engine import (
    RoundLog,
    FederationResult,
    learning_rate,
    resolve_constants,
    local_update,
    run_federation,
)

__all__ = [
    "Algorithm",
    "EpsilonSchedule",
    "ParticipationMode",
    "FederationConfig",
    "ClientSpec",
    "make_clients",
    "check_clients",
    "priority_ids",
    "nonpriority_ids",
    "weighted_loss",
    "weighted_accuracy",
    "ProtocolError",
    "lr",
    "include_nonpriority",
    "client_opt_in",
    "aggregate",
    "aggregate_partial",
    "sample_priority",
    "RoundLog",
    "FederationResult",
    "learning_rate",
    "resolve_constants",
    "local_update",
    "run_federation",
]
