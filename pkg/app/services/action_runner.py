import logging
import time
from pathlib import Path
from typing import Optional, TextIO

import pydantic

from app.actions import action_handlers
from app.actions.configurations import RunConfig, get_action_configuration
from app.services.errors import (
    ConfigurationNotFound,
    ConfigurationValidationError,
    CoverageError,
    CurveDefinitionError,
    DataFormatError,
    KernelDomainError,
    VerificationFailed,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_CONFIGURATION_ERROR = 2
EXIT_IO_ERROR = 3

_CONFIGURATION_ERRORS = (
    pydantic.ValidationError,
    ConfigurationNotFound,
    ConfigurationValidationError,
    CurveDefinitionError,
    KernelDomainError,
)
_IO_ERRORS = (OSError, DataFormatError, CoverageError)


def _handle_error(exc: Exception, action_id: Optional[str] = None, config_data=None) -> int:
    """
    Logs the failure with its details and returns the process exit code for it.
    """
    if isinstance(exc, VerificationFailed):
        logger.error(f"Action '{action_id}': {exc}", extra={"action_id": action_id, "failed_suites": exc.failed_suites})
        return EXIT_VERIFICATION_FAILED

    message = f"Error in action '{action_id}': {type(exc).__name__}: {exc}"
    error_details = {"action_id": action_id, "config_data": config_data or {}, "error": message}
    if (line_number := getattr(exc, "line_number", None)) is not None:
        error_details["line_number"] = line_number
    if (required_y := getattr(exc, "required_y", None)) is not None:
        error_details["required_y"] = required_y

    if isinstance(exc, _CONFIGURATION_ERRORS):
        logger.error(message, extra=error_details)
        return EXIT_CONFIGURATION_ERROR
    if isinstance(exc, _IO_ERRORS):
        logger.error(message, extra=error_details)
        return EXIT_IO_ERROR
    # Anything else is a defect; keep the traceback
    logger.exception(message, extra=error_details)
    return EXIT_IO_ERROR


def load_run_config(path: Optional[Path] = None) -> RunConfig:
    if path is None:
        return RunConfig()
    return RunConfig.parse_file(path)


def execute_action(
        action_id: str, output: TextIO, config_path: Optional[Path] = None, points: Optional[Path] = None,
        tol: Optional[float] = None
) -> int:
    """Runs one command end to end and returns its exit code."""
    try:  # There must be one action handler implemented for the action
        handler, config_model = action_handlers[action_id]
    except KeyError:
        return _handle_error(KeyError(f"Action '{action_id}' is not supported"), action_id)

    try:  # Parse the run configuration and the command block
        run_config = load_run_config(config_path)
        if tol is not None:
            run_config = run_config.with_tolerance(tol)
        action_config = get_action_configuration(run_config, action_id, config_model)
    except Exception as e:
        return _handle_error(e, action_id)

    logger.info(f"Executing action '{action_id}'...")
    config_data = action_config.dict()
    try:
        start_time = time.monotonic()
        handler(run_config=run_config, action_config=action_config, output=output, points=points)
    except Exception as e:
        return _handle_error(e, action_id, config_data)

    execution_time = time.monotonic() - start_time
    logger.debug(f"Action '{action_id}' executed successfully in {execution_time:.2f} seconds.")
    return EXIT_OK
