"""Tasks package - task graphs, estimators, and the parallelizability bound."""

from .task_graph import TaskGraph, SubtaskProfile, UNBOUNDED
from .bound import parallelizability, amdahl_classic, diagnose
