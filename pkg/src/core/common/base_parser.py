"""Base implementation for YAML configuration parsers."""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Generic, TypeVar

from pydantic import BaseModel, ValidationError
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from ..exceptions import ScenarioFileError
from ..protocols import ScenarioParser

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

# Configuration files are small; anything larger is almost surely a mistake.
MAX_FILE_BYTES = 1_048_576


class BaseConfigParser(ScenarioParser, ABC, Generic[ModelT]):
    """
    Abstract base class for YAML configuration parsers.

    Provides file validation, safe YAML loading and error wrapping while
    leaving the mapping from raw data to a model abstract.

    Subclasses must implement:
    - _build(): Turn the loaded YAML data into a validated model

    Subclasses can optionally override:
    - get_supported_extensions(): Accepted file extensions
    - validate_file(): Custom file validation logic
    """

    def __init__(self, encoding: str = "utf-8"):
        """
        Initialize the parser.

        Args:
            encoding: File encoding used when reading
        """
        self.encoding = encoding
        self._logger = logger.getChild(self.__class__.__name__)
        self._yaml = YAML(typ="safe")

    def get_supported_extensions(self) -> list[str]:
        return [".yaml", ".yml"]

    @abstractmethod
    def _build(self, data: Any, file_path: Path) -> ModelT:
        """
        Validate the loaded YAML data into a model.

        Args:
            data: The YAML document as plain Python data
            file_path: Path of the file, for error context

        Returns:
            The validated model

        Raises:
            pydantic.ValidationError: If the data does not match the model
        """
        pass

    def parse(self, file_path: Path) -> ModelT:
        """
        Parse a configuration file into a validated model.

        Raises:
            ScenarioFileError: If the file is missing, unsupported, too large,
                not valid YAML or does not match the model
        """
        self._logger.info(f"Parsing file: {file_path}")

        self.validate_file(file_path)
        content = self._read_file(file_path)
        try:
            data = self._yaml.load(content)
        except YAMLError as e:
            self._logger.error(f"Failed to parse {file_path}: {e}")
            raise ScenarioFileError(f"Invalid YAML: {e}", str(file_path)) from e

        try:
            result = self._build(data, file_path)
        except ValidationError as e:
            self._logger.error(f"Invalid configuration in {file_path}")
            raise ScenarioFileError(
                f"Invalid configuration: {self._summarize(e)}", str(file_path)
            ) from e

        self._logger.debug(f"Successfully parsed {file_path}")
        return result

    @staticmethod
    def _summarize(error: ValidationError) -> str:
        parts = []
        for item in error.errors():
            where = ".".join(str(p) for p in item["loc"]) or "<root>"
            parts.append(f"{where}: {item['msg']}")
        return "; ".join(parts)

    def validate_file(self, file_path: Path) -> None:
        """
        Validate that the file exists, has a supported extension and a
        plausible size.

        Raises:
            ScenarioFileError: If any check fails
        """
        if not file_path.exists():
            raise ScenarioFileError(f"File not found: {file_path}", str(file_path))

        if not file_path.is_file():
            raise ScenarioFileError(
                f"Path is not a file: {file_path}", str(file_path)
            )

        if not self._has_supported_extension(file_path):
            raise ScenarioFileError(
                "Unsupported file extension. "
                f"Supported extensions: {self.get_supported_extensions()}",
                str(file_path),
            )

        size = file_path.stat().st_size
        if size > MAX_FILE_BYTES:
            raise ScenarioFileError(
                f"File is {size} bytes, limit is {MAX_FILE_BYTES}", str(file_path)
            )

    def _has_supported_extension(self, file_path: Path) -> bool:
        supported = self.get_supported_extensions()
        if not supported:
            return True
        return file_path.suffix in supported or any(
            file_path.name.endswith(ext) for ext in supported
        )

    def _read_file(self, file_path: Path) -> str:
        try:
            return file_path.read_text(encoding=self.encoding)
        except UnicodeDecodeError as e:
            self._logger.error(
                f"Failed to decode file {file_path} with encoding {self.encoding}"
            )
            raise ScenarioFileError(
                f"Cannot decode file as {self.encoding}", str(file_path)
            ) from e

    def can_parse(self, file_path: Path) -> bool:
        """
        Check if this parser can handle the given file.

        Returns:
            True if the file exists and has a supported extension
        """
        try:
            return (
                file_path.exists()
                and file_path.is_file()
                and self._has_supported_extension(file_path)
            )
        except OSError:
            return False

    def get_parser_info(self) -> dict[str, Any]:
        return {
            "class_name": self.__class__.__name__,
            "module": self.__class__.__module__,
            "supported_extensions": self.get_supported_extensions(),
            "encoding": self.encoding,
        }
