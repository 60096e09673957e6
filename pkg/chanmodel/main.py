"""Main module for the channel-model toolkit."""

import logging
import sys
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from chanmodel import __version__
from chanmodel.cli import SUBCOMMANDS, configure_logging, parse_args
from chanmodel.commands import COMMANDS, RANDOMIZED, RunContext
from chanmodel.error_handling.error_manager import get_error_manager
from chanmodel.error_handling.errors import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_UNEXPECTED,
    ChannelModelError,
    ConfigValidationError,
)
from chanmodel.input.loaders import load_config
from chanmodel.output.file_writer import ResultWriter, to_builtin

logger = logging.getLogger(__name__)


def _config_section(command: str, data: Dict[str, Any]) -> Dict[str, Any]:
    """Pick the command's section of a config file.

    A file may hold one section per command (``drop:``, ``fit_los:`` ...) or
    be the bare settings of the command being run. A top-level ``rng_seed``
    applies to every section that does not set its own.
    """
    names = {name: name for name in SUBCOMMANDS}
    names.update({name.replace("-", "_"): name for name in SUBCOMMANDS})
    if any(key in names for key in data):
        section = {}
        for key, value in data.items():
            if names.get(key) == command:
                section = value or {}
        if not isinstance(section, dict):
            raise ConfigValidationError(f"configuration section '{command}' must be a mapping")
        section = dict(section)
        if "rng_seed" in data:
            section.setdefault("rng_seed", data["rng_seed"])
        return section
    return dict(data)


def _resolve_seed(command: str, flag: Optional[int], configured: Any) -> Optional[int]:
    seed = flag if flag is not None else configured
    if seed is not None:
        try:
            seed = int(seed)
        except (TypeError, ValueError):
            raise ConfigValidationError(f"seed must be an integer, got '{configured}'") from None
        if seed < 0:
            raise ConfigValidationError(f"seed must be non-negative, got {seed}")
        return seed
    if command not in RANDOMIZED:
        return None
    seed = int(np.random.SeedSequence().entropy % 2**63)
    get_error_manager().warn(
        f"no seed given; using generated seed {seed} (pass --seed {seed} to repeat this run)",
        source="cli",
        seed=seed,
    )
    return seed


def _dump_config(target: str, resolved: Dict[str, Any]) -> None:
    text = yaml.safe_dump(to_builtin(resolved), sort_keys=False)
    if target == "-":
        print(text, end="")
    else:
        with open(target, "w") as f:
            f.write(text)
    logging.info("Resolved configuration dumped to %s", target)


def main(args: Optional[List[str]] = None) -> int:
    """Run the main entry point for the toolkit.

    Returns:
        0 on success, 2 for validation errors, 3 for numerical failures,
        1 for anything unexpected.
    """
    parsed_args = parse_args(args)
    configure_logging(parsed_args)
    manager = get_error_manager()
    manager.clear()

    try:
        file_config: Dict[str, Any] = {}
        if parsed_args.config is not None:
            file_config = _config_section(parsed_args.command, load_config(parsed_args.config))
        seed = _resolve_seed(
            parsed_args.command, parsed_args.seed, file_config.pop("rng_seed", None)
        )
        ctx = RunContext(parsed_args.command, parsed_args, file_config, seed)

        logging.info("Running %s", parsed_args.command)
        output = COMMANDS[parsed_args.command](ctx)

        if parsed_args.dump_config is not None:
            _dump_config(parsed_args.dump_config, ctx.resolved)

        metadata = {
            "tool": "chanmodel",
            "version": __version__,
            "command": parsed_args.command,
            "seed": seed,
            "config": ctx.resolved,
            "diagnostics": manager.to_dicts(),
        }
        ResultWriter(metadata).emit(output, parsed_args.format, parsed_args.out)
        if manager.has_errors():
            logging.info(
                "%s finished with %d diagnostic(s):\n%s",
                parsed_args.command,
                len(manager.get_errors()),
                manager.get_error_summary(),
            )
        return EXIT_OK

    except ChannelModelError as e:
        logging.debug("Command failed", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except np.linalg.LinAlgError as e:
        logging.debug("Linear algebra failure", exc_info=True)
        print(f"Error: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as e:
        logging.error("Error: %s", str(e), exc_info=parsed_args.debug)
        print(f"Error: unexpected failure: {e}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
