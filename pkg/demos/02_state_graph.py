"""
Learning a state graph from recorded tests
==========================================

Replaying human-written tests teaches the state graph which actions lead
where.  Actions nobody executed yet point to the unknown state ``?``.
"""

# %%
from mlec.pipeline import record_suites
from mlec.suites import demo_suite
from mlec.sut import load_demo

sut = load_demo()
graph, stats = record_suites(sut, [demo_suite("login"), demo_suite("address-book")])
print(f"{len(graph)} states, {len(graph.actions)} distinct actions, {stats.actions} actions replayed")

explored = sum(graph.is_explored(s, a) for s in graph.states for a in graph.available(s))
total = sum(len(graph.available(s)) for s in graph.states)
print(f"{explored} of {total} state/action pairs have a concrete target")

# %%
# A road map is the shortest known way to a state that still has
# unexplored actions.  From the login window that is the window itself.
print("road map from the start:", graph.road_map(graph.initial))

# %%
# Repair drops every action that the graph says cannot be executed where the
# walk reaches it.  Here the recorded address-book test is shuffled.
import numpy as np

case = demo_suite("address-book").cases[0]
shuffled = case.copy()
np.random.default_rng(0).shuffle(shuffled.actions)
repaired = graph.repair(shuffled)
print(f"shuffled case: {len(shuffled)} actions, after repair: {len(repaired)}")
print("repairing again changes nothing:", len(graph.repair(repaired)) == len(repaired))

# %%
# The graph can be exported for Graphviz.
print(graph.to_dot().splitlines()[:4])
