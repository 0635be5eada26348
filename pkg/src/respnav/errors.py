"""Exception hierarchy. Each error carries the pipeline stage it belongs to,
which the CLI maps to a stage-specific exit code."""


class RespnavError(Exception):
    """Base class for all pipeline errors."""

    stage = "generic"


class ConfigError(RespnavError):
    stage = "config"


class ConfigMismatch(RespnavError):
    stage = "simulate"


class MissingNavData(RespnavError):
    stage = "navimages"


class DegeneratePatch(RespnavError):
    stage = "motion"


class DegenerateMotion(RespnavError):
    stage = "motion"


class NoTriggers(RespnavError):
    stage = "bin"


class EmptyBin(RespnavError):
    stage = "bin"


class EmptyPhase(RespnavError):
    stage = "recon"


class TooSmall(RespnavError):
    stage = "metrics"


class InsufficientSamples(RespnavError):
    stage = "metrics"


# CLI exit codes. 0 = success, 1 = unexpected error, 2 = config/usage error
# (argparse uses 2 as well), then one code per pipeline stage.
STAGE_EXIT_CODES = {
    "generic": 1,
    "config": 2,
    "pattern": 3,
    "simulate": 4,
    "navimages": 5,
    "motion": 6,
    "bin": 7,
    "recon": 8,
    "metrics": 9,
    "compare": 10,
}


def exit_code_for(err: RespnavError) -> int:
    return STAGE_EXIT_CODES.get(err.stage, 1)
