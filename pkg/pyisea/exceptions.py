# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Exceptions raised for malformed inputs.

Security denials are never raised; they travel as verdicts and events.
"""


class ConfigError(ValueError):
    """Invalid system configuration."""


class PolicyError(ValueError):
    """Invalid policy source or policy image."""


class CapacityError(PolicyError):
    """A policy set does not fit the Policy Register Space."""

    def __init__(self, message: str, slave: int, kind: str, count: int,
                 capacity: int):
        super().__init__(message)
        self.slave = slave
        self.kind = kind
        self.count = count
        self.capacity = capacity


class ImageFormatError(ValueError):
    """Malformed memory image line."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ScenarioError(ValueError):
    """Malformed scenario script, reported with its location."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class PrivilegeError(ValueError):
    """A supervisor operation was attempted on a privileged master."""
