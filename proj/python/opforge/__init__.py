#
# opforge - fragment-seeded molecule generation toolkit
# SPDX-License-Identifier: Apache-2.0
#
"""Fragment-seeded molecule generation: SMILES tools, QED scoring, training and generation."""

import os as _os

# Wheels ship the property tables next to the package.
_data = _os.path.join(_os.path.dirname(__file__), "data")
if "OPFORGE_DATA_DIR" not in _os.environ and _os.path.isdir(_data):
    _os.environ["OPFORGE_DATA_DIR"] = _data

from ._core import (  # noqa: E402
    GenerationRecord,
    GenerationStats,
    Model,
    OpforgeError,
    detokenize,
    is_valid_smiles,
    parse_vina_log,
    run,
    scatter_svg,
    score,
    tokenize,
    train,
)

__all__ = [
    "GenerationRecord",
    "GenerationStats",
    "Model",
    "OpforgeError",
    "detokenize",
    "is_valid_smiles",
    "parse_vina_log",
    "run",
    "scatter_svg",
    "score",
    "tokenize",
    "train",
]
