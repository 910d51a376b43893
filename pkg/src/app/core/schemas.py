import uuid as uuid_pkg
from datetime import datetime, timezone
from typing import Any

from pydantic import BaseModel, Field, field_serializer
from uuid6 import uuid7


# -------------- mixins --------------
class RunIdSchema(BaseModel):
    run_id: uuid_pkg.UUID = Field(default_factory=uuid7)


class TimestampSchema(BaseModel):
    started_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc).replace(tzinfo=None))
    finished_at: datetime | None = Field(default=None)

    @field_serializer("started_at", "finished_at")
    def serialize_dt(self, value: datetime | None, _info: Any) -> str | None:
        if value is not None:
            return value.isoformat()

        return None
