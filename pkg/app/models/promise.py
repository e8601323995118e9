# app/models/promise.py
from typing import NamedTuple

from app.models.world import Literal, Time


class Promise(NamedTuple):
    literal: Literal
    at: Time  # absolute global time
    goal_id: str
    agent: str

    @property
    def identity(self):
        return (self.literal, self.at, self.goal_id)

    def __str__(self) -> str:
        return f"{self.literal} @ {self.at} by {self.agent}/{self.goal_id}"
