import logging
import time
from functools import wraps


logger = logging.getLogger(__name__)


def log_action_activity(action_id: str, title: str, level="INFO", config_data: dict = None, data: dict = None):
    """Logs one activity record; action_id, config_data and data travel as structured fields (json log format)."""
    logger.log(
        logging.getLevelName(level),
        title,
        extra={"action_id": action_id, "config_data": config_data or {}, "data": data or {}},
    )


def activity_logger(on_start=True, on_completion=True, on_error=True):
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            action_id = func.__name__.replace("action_", "")
            action_config = kwargs.get("action_config")
            config_data = action_config.dict() if action_config else {}
            if on_start:
                log_action_activity(action_id, f"Action '{action_id}' started.", config_data=config_data)
            start_time = time.monotonic()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                if on_error:
                    log_action_activity(
                        action_id,
                        f"Action '{action_id}' failed: {type(e).__name__}: {e}",
                        level="ERROR",
                        config_data=config_data,
                        data={"error": str(e)},
                    )
                raise e
            else:
                if on_completion:
                    elapsed = time.monotonic() - start_time
                    log_action_activity(
                        action_id,
                        f"Action '{action_id}' complete in {elapsed:.2f} seconds.",
                        config_data=config_data,
                        data={"elapsed_seconds": elapsed, "result": result},
                    )
                return result
        return wrapper
    return decorator
