import logging

import pandas as pd

from hyperent.protocols.base_protocol import registered_protocols

logger = logging.getLogger(__name__)


def list_protocols() -> pd.DataFrame:
    """One row per registered protocol: name, reference anchor, topic and parameter schema"""
    rows = [
        {
            "name": protocol.name,
            "anchor": protocol.anchor,
            "topic": protocol.topic,
            "produces": protocol.produces,
            "parameters": protocol.parameter_schema(),
        }
        for protocol in registered_protocols()
    ]
    logger.debug(f"Listing {len(rows)} protocols")
    return pd.DataFrame(rows, columns=["name", "anchor", "topic", "produces", "parameters"])
