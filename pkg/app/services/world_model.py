# app/services/world_model.py
"""
Shared world model: the simulated ground truth plus one replica per agent.

Updates travel as WorldUpdate messages. The publishing agent applies its own
update at once; every other replica receives it `latency` ticks later, in
per-origin sequence order, with duplicates ignored.
"""
import heapq
import itertools
import logging
from typing import Dict, FrozenSet, Iterable, List, Tuple

from app.models.world import Atom, Time, TimedState, WorldUpdate
from app.services.promises import PromiseStore
from app.services.world import apply_effects, wm_apply

logger = logging.getLogger("app.services.world_model")  # Logger for this module


class WorldReplica:
    def __init__(self, owner: str, init: FrozenSet[Atom]):
        self.owner = owner
        self.state = TimedState(frozenset(init), 0)
        self.promises = PromiseStore()
        self.fact_version = 0
        self.duplicates = 0
        self._expected: Dict[str, int] = {}
        self._buffer: Dict[str, Dict[int, WorldUpdate]] = {}

    @property
    def atoms(self) -> FrozenSet[Atom]:
        return self.state.atoms

    @property
    def promise_version(self) -> int:
        return self.promises.version

    def advance(self, time: Time) -> None:
        self.state = self.state.with_time(time)

    def receive(self, update: WorldUpdate) -> List[WorldUpdate]:
        """Returns the updates applied by this call, in order. Duplicates apply nothing."""
        expected = self._expected.get(update.origin, 1)
        pending = self._buffer.setdefault(update.origin, {})
        if update.seq < expected or update.seq in pending:
            self.duplicates += 1
            logger.warning(f"{self.owner}: duplicate world update {update.origin}#{update.seq} ignored")
            return []
        pending[update.seq] = update
        applied: List[WorldUpdate] = []
        while expected in pending:
            ready = pending.pop(expected)
            self._apply(ready)
            applied.append(ready)
            expected += 1
        self._expected[update.origin] = expected
        return applied

    def _apply(self, update: WorldUpdate) -> None:
        if update.adds or update.dels:
            new_state = wm_apply(update, self.state)
            if new_state.atoms != self.state.atoms:
                self.fact_version += 1
            self.state = new_state
        for record in update.promise_records:
            self.promises.apply_record(record)


class SharedWorldModel:
    def __init__(self, init: FrozenSet[Atom], agents: Iterable[str], latency: Time = 0):
        self.truth = TimedState(frozenset(init), 0)
        self.latency = latency
        self.replicas: Dict[str, WorldReplica] = {a: WorldReplica(a, init) for a in sorted(agents)}
        self._seq: Dict[str, itertools.count] = {}
        self._queue: List[Tuple[Time, int, str, WorldUpdate]] = []
        self._order = itertools.count()

    def replica(self, agent: str) -> WorldReplica:
        return self.replicas[agent]

    def make_update(
        self,
        origin: str,
        adds: Iterable[Atom] = (),
        dels: Iterable[Atom] = (),
        promise_records: Tuple[str, ...] = (),
    ) -> WorldUpdate:
        counter = self._seq.setdefault(origin, itertools.count(1))
        return WorldUpdate(origin, next(counter), frozenset(adds), frozenset(dels), tuple(promise_records))

    def publish(self, update: WorldUpdate, now: Time) -> None:
        if update.adds or update.dels:
            self.truth = apply_effects(self.truth, update.adds, update.dels)
        for agent, replica in self.replicas.items():
            if agent == update.origin or self.latency == 0:
                replica.receive(update)
            else:
                heapq.heappush(self._queue, (now + self.latency, next(self._order), agent, update))

    def deliver(self, now: Time) -> int:
        """Delivers every queued update due at or before `now`; returns how many."""
        delivered = 0
        while self._queue and self._queue[0][0] <= now:
            _, _, agent, update = heapq.heappop(self._queue)
            self.replicas[agent].receive(update)
            delivered += 1
        return delivered

    def advance(self, time: Time) -> None:
        self.truth = self.truth.with_time(time)
        for replica in self.replicas.values():
            replica.advance(time)

    def has_pending(self, agent: str) -> bool:
        """Whether updates addressed to `agent` are still in transit."""
        return any(entry[2] == agent for entry in self._queue)
