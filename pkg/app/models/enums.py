from enum import Enum


class LifecycleMode(str, Enum):
    FORMULATED = "FORMULATED"
    SELECTED = "SELECTED"
    EXPANDED = "EXPANDED"
    COMMITTED = "COMMITTED"
    DISPATCHED = "DISPATCHED"
    FINISHED = "FINISHED"
    FAILED = "FAILED"
    REJECTED = "REJECTED"
    RETRACTED = "RETRACTED"

    @property
    def is_terminal(self) -> bool:
        return self in TERMINAL_MODES


TERMINAL_MODES = frozenset({
    LifecycleMode.FINISHED, LifecycleMode.FAILED, LifecycleMode.REJECTED, LifecycleMode.RETRACTED,
})


class LifecycleEvent(str, Enum):
    SELECT = "select"
    EXPAND = "expand"
    COMMIT = "commit"
    DISPATCH = "dispatch"
    FINISH = "finish"
    FAIL = "fail"
    REJECT = "reject"
    RESOURCE_DENIED = "resource-denied"
    RETRACT = "retract"


class AcquisitionOutcome(str, Enum):
    GRANTED = "GRANTED"
    DENIED = "DENIED"
    DEFERRED = "DEFERRED"


class ExecPhase(str, Enum):
    RUNNING = "RUNNING"
    PENDING = "PENDING"


class FormulationMode(str, Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"


class SearchMode(str, Enum):
    UNIFORM = "uniform"
    GREEDY = "greedy"


class PlanOutcome(str, Enum):
    SOLVED = "solved"
    UNSOLVABLE = "unsolvable"
    RESOURCE_LIMIT = "resource-limit"


class EventKind(str, Enum):
    RUN_START = "run-start"
    RUN_END = "run-end"
    GOAL_FORMULATED = "goal-formulated"
    GOAL_SELECTED = "goal-selected"
    GOAL_EXPANDED = "goal-expanded"
    GOAL_COMMITTED = "goal-committed"
    GOAL_DISPATCHED = "goal-dispatched"
    GOAL_FINISHED = "goal-finished"
    GOAL_FAILED = "goal-failed"
    GOAL_REJECTED = "goal-rejected"
    GOAL_RETRACTED = "goal-retracted"
    ILLEGAL_TRANSITION = "illegal-transition"
    PROMISE_ISSUED = "promise-issued"
    PROMISE_RETRACTED = "promise-retracted"
    PROMISE_STALE = "promise-stale"
    ACTION_START = "action-start"
    ACTION_PENDING = "action-pending"
    ACTION_DONE = "action-done"
    ACTION_TIMEOUT = "action-timeout"
    ACTION_RETRY = "action-retry"
    LOCK_GRANTED = "lock-granted"
    LOCK_DENIED = "lock-denied"
    LOCK_DEFERRED = "lock-deferred"
    LOCK_HANDOVER = "lock-handover"
    LOCK_RELEASED = "lock-released"
    LOCK_RELEASE_SUPPRESSED = "lock-release-suppressed"
    WORLD_DUPLICATE = "world-duplicate-update"
