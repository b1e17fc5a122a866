"""The receiver chain as pipeline stages."""

import logging
from typing import Any

from src.core.exceptions import DetectionError, InsufficientDataError
from src.core.pipeline_runner import PipelineRunner
from src.models.detection import DetectorConfig
from src.models.sample_buffer import SampleBuffer

from .context import MicChoice, ReceiverContext
from .correlation import DynamicChirpCorrelator
from .decoding import decode_with
from .toa import estimate_toas
from .turbocharge import turbocharge

logger = logging.getLogger(__name__)


class _Stage:
    name = "stage"
    consumes: tuple[str, ...] = ()
    produces: tuple[str, ...] = ()

    def __init__(self) -> None:
        self._logger = logger.getChild(self.__class__.__name__)

    def get_stage_info(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "consumes": list(self.consumes),
            "produces": list(self.produces),
        }


class ChannelSelectStage(_Stage):
    """Pick the detection channel, enhancing the secondary in turbo mode."""

    name = "select-channel"
    consumes = ("channels",)
    produces = ("signal",)

    def execute(self, context: ReceiverContext) -> None:
        if context.mic == "primary":
            context.signal = context.primary
            return
        secondary = context.secondary
        if secondary is None:
            raise DetectionError(
                f"Mic '{context.mic}' needs 2-channel audio",
                context={"channels": len(context.channels)},
            )
        if context.mic == "secondary":
            context.signal = secondary
        else:
            context.signal = turbocharge(context.primary, secondary, context.cfg)


class GlobalOffsetStage(_Stage):
    name = "global-offset"
    consumes = ("signal",)
    produces = ("gamma", "gamma_score")

    def execute(self, context: ReceiverContext) -> None:
        if context.signal is None:
            raise DetectionError("No detection channel selected")
        context.correlator = DynamicChirpCorrelator(context.signal, context.cfg)
        context.gamma, context.gamma_score = context.correlator.find_global_offset()


class PreambleStage(_Stage):
    name = "preambles"
    consumes = ("gamma",)
    produces = ("detections",)

    def execute(self, context: ReceiverContext) -> None:
        if context.correlator is None or context.gamma is None:
            raise DetectionError("Preamble search needs the global chirp offset")
        context.detections = context.correlator.detect_preambles(context.gamma)


class DecodeStage(_Stage):
    name = "decode"
    consumes = ("detections",)
    produces = ("detections",)

    def execute(self, context: ReceiverContext) -> None:
        if context.correlator is None:
            raise DetectionError("Decoding needs a correlator")
        decoded = []
        for det in context.detections:
            try:
                beacon_id, parity_ok = decode_with(context.correlator, det)
            except InsufficientDataError:
                self._logger.warning(
                    f"Preamble at {det.b_start:.1f} is cut off by the recording end"
                )
                beacon_id, parity_ok = None, False
            decoded.append(
                det.model_copy(update={"id": beacon_id, "parity_ok": parity_ok})
            )
        context.detections = decoded
        self._logger.info(
            f"Decoded {len(context.decoded)}/{len(decoded)} beacon id(s)"
        )


class ToaStage(_Stage):
    name = "toa"
    consumes = ("detections",)
    produces = ("toas",)

    def execute(self, context: ReceiverContext) -> None:
        context.toas = estimate_toas(context.detections, context.cfg)


class BeaconReceiver:
    """
    Audio to decoded beacons and ToAs.

    With ``decode=False`` the chain stops after preamble detection; ranging
    that pairs preambles by slot needs no ids.
    """

    def __init__(
        self, cfg: DetectorConfig, mic: MicChoice = "primary", decode: bool = True
    ) -> None:
        self._logger = logger.getChild(self.__class__.__name__)
        self.cfg = cfg
        self.mic = mic
        self.runner = (
            PipelineRunner()
            .add_stage(ChannelSelectStage())
            .add_stage(GlobalOffsetStage())
            .add_stage(PreambleStage())
        )
        if decode:
            self.runner.add_stage(DecodeStage()).add_stage(ToaStage())

    def process(self, channels: list[SampleBuffer]) -> ReceiverContext:
        if not channels:
            raise DetectionError("No audio channels given")
        context = ReceiverContext(list(channels), self.cfg, self.mic)
        return self.runner.execute(context)
