import importlib
import inspect

from pydantic import BaseModel

HANDLER_PARAMETERS = ("run_config", "action_config", "output")


class ActionConfiguration(BaseModel):
    class Config:
        extra = "forbid"


class GenericActionConfiguration(ActionConfiguration):
    pass


def command_name(function_name: str, prefix: str) -> str:
    return function_name[len(prefix):].replace("_", "-")


def discover_actions(module_name, prefix):
    """Maps command names (action_kernel_eval -> kernel-eval) to (handler, configuration model)."""
    action_handlers = {}
    module = importlib.import_module(module_name)

    for name, func in inspect.getmembers(module, inspect.isfunction):
        if not name.startswith(prefix):
            continue
        key = command_name(name, prefix)
        signature = inspect.signature(func)
        missing = [p for p in HANDLER_PARAMETERS if p not in signature.parameters]
        if missing:
            raise ValueError(f"Action '{key}' must accept the parameters {', '.join(missing)}.")
        if (config_annotation := signature.parameters["action_config"].annotation) != inspect.Parameter.empty:
            config_model = config_annotation
        else:
            config_model = GenericActionConfiguration
        action_handlers[key] = (func, config_model)

    return action_handlers
