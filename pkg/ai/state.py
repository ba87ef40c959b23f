"""State discretization and encoding for the stage environment."""

import math


class StateEncoder:
    """Encodes an agent's view of a StageEnv into a flat tuple for Q-table lookup.

    State layout:
    - Own stage: 0..m-1, or m when idle
    - Remaining steps in the current stage: 1..stage_steps[stage], 0 when idle
    - Occupancy of every stage, clipped to min(C_i, N)
    - Buffer non-empty flag for every queued stage
    - Padding phase t mod (padding + 1), present only when padding > 0

    Own stage and remaining steps are counted jointly, so the total is
    (1 + sum(stage_steps)) x prod(min(C_i,N)+1) x 2^queued x (padding+1)
    """

    BUFFER_EMPTY = 0
    BUFFER_READY = 1

    def __init__(self, stage_steps: tuple, occupancy_caps: tuple, queued: tuple = (),
                 padding: int = 0):
        self.stage_steps = tuple(stage_steps)
        self.m = len(self.stage_steps)
        self.idle = self.m
        self.occupancy_caps = tuple(occupancy_caps)
        self.queued = tuple(queued)
        self.padding = padding

    def encode_state(self, stage, remaining: int, occupancy, buffers, t: int) -> tuple:
        """Encode one agent's observation.

        Args:
            stage: the agent's stage index, or None when idle.
            remaining: steps left in the current stage.
            occupancy: agents currently in each stage.
            buffers: jobs waiting in front of each stage.
            t: step within the episode.
        """
        own = self.idle if stage is None else stage
        occ = tuple(min(o, cap) for o, cap in zip(occupancy, self.occupancy_caps))
        flags = tuple(
            self.BUFFER_READY if buffers[j] > 0 else self.BUFFER_EMPTY for j in self.queued
        )
        state = (own, remaining) + occ + flags
        if self.padding > 0:
            state = state + (t % (self.padding + 1),)
        return state

    def state_count(self) -> int:
        return (
            (1 + sum(self.stage_steps))
            * math.prod(cap + 1 for cap in self.occupancy_caps)
            * 2 ** len(self.queued)
            * (self.padding + 1)
        )

    def get_state_description(self, state: tuple) -> dict:
        """Human-readable form for debugging."""
        m = self.m
        q = len(self.queued)
        own = state[0]
        return {
            'stage': 'idle' if own == self.idle else own,
            'remaining': state[1],
            'occupancy': list(state[2:2 + m]),
            'buffers_ready': {j: bool(f) for j, f in zip(self.queued, state[2 + m:2 + m + q])},
            'phase': state[2 + m + q] if self.padding > 0 else None,
        }
