from pydantic import BaseModel, ConfigDict

Position = tuple[float, float, float]


class SimBase(BaseModel):
    """
    Base class for configuration and result models.

    Models are immutable once validated and reject unknown keys, so a typo in a
    scenario file fails loudly instead of silently keeping a default.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)
