"""Systems package - contention simulation, role allocation, and persistence."""

from .allocation import optimal_specialist_assignment
from .contention import Policy, SimConfig, simulate, compare_policies
