"""Published JSON schemas plus the validation entry point.

Schema documents live in ``ontwin/schemas/*.json`` and are served verbatim
by the HTTP layer at ``/schema/{name}``.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

from ..errors import SchemaViolation

SCHEMA_NAMES = (
    "topology",
    "lightpath",
    "lightpaths",
    "store",
    "trx_catalog",
    "telemetry_sample",
    "domain_qot",
    "provision_request",
    "provision_report",
    "lp_report",
)


@lru_cache(maxsize=None)
def schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise KeyError(f"no schema named {name!r}")
    text = resources.files(__name__).joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate_document(name: str, doc) -> None:
    """Validate against a shipped schema; raise SchemaViolation with a pointer."""
    validator = jsonschema.Draft202012Validator(schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        raise SchemaViolation(err.message, pointer)
