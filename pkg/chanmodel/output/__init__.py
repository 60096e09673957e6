"""Output writers."""

from .file_writer import CommandOutput, ResultWriter, to_builtin

__all__ = ["CommandOutput", "ResultWriter", "to_builtin"]
