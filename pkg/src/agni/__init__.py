"""Behavioral simulator and cost models for in-DRAM stochastic-to-binary
number conversion.

The package models a DRAM substrate that converts rate-coded (stochastic)
operands to binary in four charge-sharing steps at fixed 55 ns latency,
together with error statistics, layout/energy overheads, baseline
pop-counter cost models, and system-level CNN StoB-phase estimates.
"""

__version__ = "0.1.0"

from .analog import (  # noqa: F401
    AnalogParams,
    AnalogState,
    ReferenceLadder,
    calibrate,
    default_params,
    lane_voltage,
)
from .numformat import (  # noqa: F401
    BinaryWord,
    StochasticWord,
    UnaryWord,
    popcount,
    stob_oracle,
    to_unary,
    unary_to_binary,
)
from .pipeline import (  # noqa: F401
    ConversionResult,
    TileConfig,
    WaveformTrace,
    convert,
    convert_batch,
    convert_tile,
    emit_trace,
)
from .schedule import (  # noqa: F401
    Signal,
    SignalEvent,
    SignalSchedule,
    default_schedule,
    signal_level,
    validate,
)
