# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT License.

"""
Exceptions raised by wulffdual.
"""

from typing import Optional

import numpy as np


class WulffDualError(Exception):
    """
    Base class for all wulffdual errors.
    """


class GeometryError(WulffDualError, ValueError):
    """
    Input outside the domain of a geometric primitive.
    """


class PositivityError(WulffDualError):
    """
    An integrand is not positive on its validation grid.
    """

    def __init__(
        self, witness: np.ndarray, value: float, line: Optional[int] = None
    ) -> None:
        self.witness = np.asarray(witness, dtype=float)
        self.value = value
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(
            f"{where}integrand is not positive: value {value:.6g} at {self.witness.round(6).tolist()}"
        )


class SpecError(WulffDualError):
    """
    An integrand definition file could not be understood.
    """

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownKeyError(SpecError):
    """
    A definition file used a key that is not part of the format.
    """


class NonFiniteValueError(SpecError):
    """
    A definition file gave a number that is not a finite float.
    """


class KindMismatchError(SpecError):
    """
    A definition file mixes keys of different kinds or dimensions.
    """


class MissingKeyError(SpecError):
    """
    A definition file omits a required key.
    """


class SampleFileError(SpecError):
    """
    The sample table referenced by a sampled definition is unusable.
    """


class NotConvexIntegrandError(WulffDualError):
    """
    An operation that requires a convex integrand was given something else.
    """

    def __init__(self, witness: np.ndarray, margin: float) -> None:
        self.witness = np.asarray(witness, dtype=float)
        self.margin = margin
        super().__init__(
            f"not a convex integrand: margin {margin:.3g} at {self.witness.round(6).tolist()}"
        )


class NotHemisphericalError(WulffDualError):
    """
    A point set is not contained in an open hemisphere.
    """


class UnsupportedDimensionError(WulffDualError):
    """
    An operation is only available for curves (n = 1).
    """


class FrontError(WulffDualError):
    """
    A wave-front operation was given data it cannot handle.
    """


class ConfigError(WulffDualError, ValueError):
    """
    A run configuration is outside its accepted bounds.
    """
