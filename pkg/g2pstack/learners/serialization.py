"""The `g2pstack-model v1 <kind>` container.

One header line, then a JSON body with sorted keys so that identical models
serialize to identical bytes.
"""

import json

from ..errors import ModelFormatError

MAGIC = "g2pstack-model"
VERSION = "v1"


def dumps_model(model):
    body = json.dumps(model.to_dict(), sort_keys=True, indent=1, ensure_ascii=False)
    return f"{MAGIC} {VERSION} {model.kind}\n{body}\n"


def loads_model(text, registry, source="<model>"):
    header, _, body = text.partition("\n")
    parts = header.split()
    if len(parts) != 3 or parts[0] != MAGIC:
        raise ModelFormatError(f"{source}: not a g2pstack model file")
    if parts[1] != VERSION:
        raise ModelFormatError(f"{source}: unsupported model version {parts[1]}")
    kind = parts[2]
    if kind not in registry:
        raise ModelFormatError(f"{source}: unknown model kind '{kind}'")
    try:
        return registry[kind].from_dict(json.loads(body))
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        raise ModelFormatError(f"{source}: corrupt {kind} model ({exc})") from None
