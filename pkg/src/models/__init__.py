from .base import Position, SimBase
from .detection import Detection, DetectorConfig, ToaEstimate
from .positioning import PositionFix, PseudoRangeSet, Schedule
from .report import AggregateStats, ExperimentReport, TrialRecord
from .sample_buffer import SampleBuffer
from .scenario import (
    AnchorConfig,
    CBeaconConfig,
    ChannelConfig,
    ClockModel,
    EchoPath,
    LocatorConfig,
    MicNonlinearity,
    ReceiverConfig,
    Scenario,
    ScheduleConfig,
)
from .signal_params import BeaconFrame, ChirpParams, FrameTiming

__all__ = [
    "Position",
    "SimBase",
    "SampleBuffer",
    "ChirpParams",
    "BeaconFrame",
    "FrameTiming",
    "MicNonlinearity",
    "ClockModel",
    "AnchorConfig",
    "CBeaconConfig",
    "ReceiverConfig",
    "EchoPath",
    "ChannelConfig",
    "ScheduleConfig",
    "LocatorConfig",
    "Scenario",
    "DetectorConfig",
    "Detection",
    "ToaEstimate",
    "PseudoRangeSet",
    "PositionFix",
    "Schedule",
    "TrialRecord",
    "AggregateStats",
    "ExperimentReport",
]
