# tests/services/test_world_model.py
from app.models.world import Atom, WorldUpdate
from app.services.world_model import SharedWorldModel, WorldReplica

A = Atom("robot-at", ("WALL-E", "BASE"))
B = Atom("robot-at", ("R2D2", "MINE"))
C = Atom("container-can-be-filled", ("C2",))


def test_disjoint_updates_commute():
    first, second = WorldReplica("x", frozenset()), WorldReplica("y", frozenset())
    u1 = WorldUpdate("WALL-E", 1, frozenset({A}))
    u2 = WorldUpdate("R2D2", 1, frozenset({B}), frozenset({C}))
    first.receive(u1)
    first.receive(u2)
    second.receive(u2)
    second.receive(u1)
    assert first.atoms == second.atoms == {A, B}


def test_duplicate_update_is_ignored_and_counted():
    replica = WorldReplica("x", frozenset())
    update = WorldUpdate("WALL-E", 1, frozenset({A}))
    assert replica.receive(update) == [update]
    assert replica.receive(update) == []
    assert replica.atoms == {A}
    assert replica.duplicates == 1


def test_out_of_order_updates_are_buffered():
    replica = WorldReplica("x", frozenset())
    u1 = WorldUpdate("WALL-E", 1, frozenset({A}))
    u2 = WorldUpdate("WALL-E", 2, frozenset(), frozenset({A}))
    assert replica.receive(u2) == []
    assert replica.atoms == frozenset()
    assert replica.receive(u1) == [u1, u2]
    assert replica.atoms == frozenset()
    assert replica.fact_version == 2


def test_promise_records_travel_with_updates():
    replica = WorldReplica("R2D2", frozenset())
    replica.receive(WorldUpdate("WALL-E", 1, promise_records=(
        "promise (machine-in-state M1 READY) @ 300 by WALL-E/StartMachine#1#1",
    )))
    assert len(replica.promises) == 1
    version = replica.promise_version
    replica.receive(WorldUpdate("WALL-E", 2, promise_records=("retract WALL-E/StartMachine#1#1",)))
    assert len(replica.promises) == 0
    assert replica.promise_version > version


def test_zero_latency_keeps_all_replicas_equal():
    world = SharedWorldModel(frozenset({C}), ["WALL-E", "R2D2"])
    world.publish(world.make_update("WALL-E", adds=[A], dels=[C]), now=3)
    world.publish(world.make_update("R2D2", adds=[B]), now=3)
    assert world.truth.atoms == {A, B}
    assert all(r.atoms == world.truth.atoms for r in world.replicas.values())


def test_latency_delays_foreign_replicas_only():
    world = SharedWorldModel(frozenset(), ["WALL-E", "R2D2"], latency=5)
    world.publish(world.make_update("WALL-E", adds=[A]), now=10)
    assert world.replica("WALL-E").atoms == {A}
    assert world.replica("R2D2").atoms == frozenset()
    assert world.has_pending("R2D2") and not world.has_pending("WALL-E")
    assert world.deliver(14) == 0
    assert world.deliver(15) == 1
    assert world.replica("R2D2").atoms == {A}
    assert not world.has_pending("R2D2")


def test_sequence_numbers_increase_per_origin():
    world = SharedWorldModel(frozenset(), ["WALL-E", "R2D2"])
    assert [world.make_update("WALL-E").seq for _ in range(3)] == [1, 2, 3]
    assert world.make_update("R2D2").seq == 1
