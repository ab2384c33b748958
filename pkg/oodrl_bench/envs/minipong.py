"""MiniPong: a small pixel Pong against a scripted opponent

Geometry on a ``frame_size`` x ``frame_size`` grid (row 0 at the top):

- opponent paddle in columns 2-3, its face at column 4
- agent paddle in columns N-4 and N-3, its face at column N-4
- the ball is a 2x2 block addressed by its top-left pixel

Paddles and ball render as 1.0 on a 0.0 background. The agent scores when
the ball leaves on the left and concedes when it leaves on the right.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from pydantic import Field

from ..corruptions import CorruptionSpec, corrupt
from .base import ActionSpace, Environment, EnvParams, Observation, StepResult

logger = logging.getLogger(__name__)

BALL_SIZE = 2
PADDLE_WIDTH = 2
OPPONENT_COLUMN = 2

NOOP, UP, DOWN = 0, 1, 2


class MiniPongParams(EnvParams):
    frame_size: int = Field(84, ge=16)
    paddle_len: int = Field(12, ge=1)
    ball_speed: int = Field(2, ge=1)
    paddle_speed: int = Field(3, ge=1)
    opponent_skill: float = Field(0.8, ge=0.0, le=1.0)
    max_score: int = Field(21, ge=1)
    frame_stack: int = Field(4, ge=1)
    max_steps: int = Field(10_000, ge=1)


@dataclass(frozen=True)
class MiniPongState:
    ball_x: int
    ball_y: int
    ball_vx: int
    ball_vy: int
    agent_y: int
    opponent_y: int
    agent_score: int = 0
    opponent_score: int = 0
    steps: int = 0
    done: bool = False


def _agent_column(params: MiniPongParams) -> int:
    return params.frame_size - 4


def render_frame(state: MiniPongState, params: MiniPongParams) -> np.ndarray:
    """Binary frame of the current state"""
    n, length = params.frame_size, params.paddle_len
    frame = np.zeros((n, n), dtype=np.float64)
    for top, col in ((state.opponent_y, OPPONENT_COLUMN), (state.agent_y, _agent_column(params))):
        frame[top : top + length, col : col + PADDLE_WIDTH] = 1.0
    frame[state.ball_y : state.ball_y + BALL_SIZE, state.ball_x : state.ball_x + BALL_SIZE] = 1.0
    return frame


def _serve(
    params: MiniPongParams, rng: np.random.Generator, direction: Optional[int] = None
) -> tuple[int, int, int, int]:
    n, speed = params.frame_size, params.ball_speed
    x = n // 2 - 1
    y = int(rng.integers(n // 4, 3 * n // 4))
    vx = direction if direction is not None else (speed if rng.random() < 0.5 else -speed)
    vy = int(rng.integers(-speed, speed + 1))
    return x, y, vx, vy


def minipong_reset(params: MiniPongParams, rng: np.random.Generator) -> MiniPongState:
    n, length = params.frame_size, params.paddle_len
    bx, by, vx, vy = _serve(params, rng)
    centered = (n - length) // 2
    return MiniPongState(bx, by, vx, vy, agent_y=centered, opponent_y=centered)


def _clamp(value: int, low: int, high: int) -> int:
    return max(low, min(high, value))


def _bounce_vy(ball_y: int, paddle_y: int, params: MiniPongParams) -> int:
    """Vertical speed after a paddle hit: proportional to the offset from the paddle center"""
    half = max(params.paddle_len / 2.0, 1.0)
    offset = (ball_y + BALL_SIZE / 2.0) - (paddle_y + params.paddle_len / 2.0)
    vy = int(np.rint(offset / half * params.ball_speed))
    return _clamp(vy, -params.ball_speed, params.ball_speed)


def _overlaps(ball_y: int, paddle_y: int, length: int) -> bool:
    return ball_y + BALL_SIZE > paddle_y and ball_y < paddle_y + length


def minipong_step(
    state: MiniPongState, action: int, params: MiniPongParams, rng: np.random.Generator
) -> tuple[MiniPongState, float, bool, bool]:
    """Advance paddles and ball by one step

    Returns:
        (next_state, reward, terminated, truncated)
    """
    n, length, speed = params.frame_size, params.paddle_len, params.paddle_speed
    top_limit = n - length

    agent_y = state.agent_y
    if action == UP:
        agent_y -= speed
    elif action == DOWN:
        agent_y += speed
    agent_y = _clamp(agent_y, 0, top_limit)

    opponent_y = state.opponent_y
    if rng.random() < params.opponent_skill:
        target = state.ball_y + BALL_SIZE // 2
        center = opponent_y + length // 2
        opponent_y += _clamp(target - center, -speed, speed)
        opponent_y = _clamp(opponent_y, 0, top_limit)

    bx, by, vx, vy = state.ball_x, state.ball_y, state.ball_vx, state.ball_vy
    nx, ny = bx + vx, by + vy

    bottom = n - BALL_SIZE
    if ny < 0:
        ny, vy = -ny, -vy
    elif ny > bottom:
        ny, vy = 2 * bottom - ny, -vy

    agent_face = _agent_column(params)
    opponent_face = OPPONENT_COLUMN + PADDLE_WIDTH
    if vx > 0 and bx + BALL_SIZE <= agent_face < nx + BALL_SIZE and _overlaps(ny, agent_y, length):
        nx = 2 * (agent_face - BALL_SIZE) - nx
        vx = -vx
        vy = _bounce_vy(ny, agent_y, params)
    elif vx < 0 and bx >= opponent_face > nx and _overlaps(ny, opponent_y, length):
        nx = 2 * opponent_face - nx
        vx = -vx
        vy = _bounce_vy(ny, opponent_y, params)

    reward = 0.0
    agent_score, opponent_score = state.agent_score, state.opponent_score
    if nx < 0 or nx > n - BALL_SIZE:
        if nx < 0:
            reward, agent_score = 1.0, agent_score + 1
            direction = params.ball_speed
        else:
            reward, opponent_score = -1.0, opponent_score + 1
            direction = -params.ball_speed
        nx, ny, vx, vy = _serve(params, rng, direction)

    steps = state.steps + 1
    terminated = agent_score >= params.max_score or opponent_score >= params.max_score
    truncated = not terminated and steps >= params.max_steps
    next_state = MiniPongState(
        ball_x=nx,
        ball_y=ny,
        ball_vx=vx,
        ball_vy=vy,
        agent_y=agent_y,
        opponent_y=opponent_y,
        agent_score=agent_score,
        opponent_score=opponent_score,
        steps=steps,
        done=terminated or truncated,
    )
    return next_state, reward, terminated, truncated


class MiniPongEnv(Environment):
    """Pixel Pong with optional observation corruption

    Each rendered frame is corrupted (when a corruption is attached) before
    it enters the frame stack. Corruption noise comes from its own stream
    split off the reset rng, so dynamics are identical with or without a
    corruption for the same seed.
    """

    env_id = "minipong"

    def __init__(
        self,
        params: MiniPongParams | None = None,
        corruption: CorruptionSpec | None = None,
        variant_id: str | None = None,
    ):
        super().__init__(params or MiniPongParams(), variant_id)
        self.corruption = corruption
        self._frames: list[np.ndarray] = []
        self._corruption_rng: Optional[np.random.Generator] = None

    @property
    def observation_dim(self) -> int:
        return self.params.frame_stack * self.params.frame_size**2

    @property
    def observation_shape(self) -> tuple[int, int, int]:
        return (self.params.frame_stack, self.params.frame_size, self.params.frame_size)

    @property
    def action_space(self) -> ActionSpace:
        return ActionSpace(kind="discrete", n=3)

    def _observe(self) -> np.ndarray:
        frame = render_frame(self._state, self.params)
        if self.corruption is not None:
            frame = corrupt(frame, self.corruption, self._corruption_rng)
        return frame

    def _reset(self, rng: np.random.Generator) -> Observation:
        self._corruption_rng = np.random.default_rng(int(rng.integers(0, 2**63 - 1)))
        self._state = minipong_reset(self.params, rng)
        frame = self._observe()
        self._frames = [frame] * self.params.frame_stack
        return np.stack(self._frames)

    def _step(self, action) -> StepResult:
        self._state, reward, terminated, truncated = minipong_step(
            self._state, int(action), self.params, self._rng
        )
        self._frames = self._frames[1:] + [self._observe()]
        return StepResult(np.stack(self._frames), reward, terminated, truncated)

    def set_state(self, state: MiniPongState) -> None:
        """Place the environment in an explicit state (scripted scenarios, tests)"""
        self._state = replace(state, done=False)
        self._frames = [self._observe()] * self.params.frame_stack
        self._episode_done = False
