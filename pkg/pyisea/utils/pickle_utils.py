# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Simulation snapshots

A `System` is a plain value between two cycles, so a whole simulation can be
parked on disk and resumed, or handed to another worker process.
"""

import logging
import pickle
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from pyisea.system import System

logger = logging.getLogger(__name__)


def __endswith_pkl_check(file_name: str) -> None:
    if not file_name.endswith(".pkl"):
        raise ValueError(
            "file_name= {} doesn't ends with '.pkl'.".format(file_name))


def save_system_with_pickle(file_name: str, system: "System") -> None:
    """Saves a simulation snapshot taken between two cycles.

    Args:
        file_name (str): file_name.pkl
        system (System): The simulation, with whatever is still in flight.

    Raises:
        ValueError: If the file_name doesn't end with '.pkl'.
    """
    __endswith_pkl_check(file_name)
    with open(file_name, "wb") as dump_file:
        pickle.dump(system, dump_file, pickle.HIGHEST_PROTOCOL)
    logger.info("saved snapshot at cycle %d to %s", system.cycle, file_name)


def load_system_with_pickle(file_name: str) -> "System":
    """Loads a simulation snapshot, ready to keep stepping.

    Args:
        file_name (str): file_name.pkl

    Raises:
        ValueError: Wrong extension, or the file holds no `System`.

    Returns:
        System: The restored simulation.
    """
    from pyisea.system import System

    __endswith_pkl_check(file_name)
    with open(file_name, "rb") as load_file:
        try:
            system = pickle.load(load_file)
        except (pickle.UnpicklingError, EOFError) as err:
            raise ValueError(f"{file_name} is not a simulation snapshot "
                             f"({err})") from err
    if not isinstance(system, System):
        raise ValueError(f"{file_name} holds a {type(system).__name__}, "
                         f"not a System")
    logger.info("resumed snapshot at cycle %d from %s", system.cycle,
                file_name)
    return system
