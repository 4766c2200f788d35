"""HDG elliptic solver and nonhydrostatic slice model."""

from ._core import (
    BesselKind,
    ChannelParams,
    ChannelSolution,
    OracleError,
    SectorParams,
    SliceError,
    bessel,
    bessel_derivative,
    channel_error,
    manufactured_error,
    sector_error,
    standing_wave,
)

__all__ = [
    "BesselKind",
    "ChannelParams",
    "ChannelSolution",
    "OracleError",
    "SectorParams",
    "SliceError",
    "bessel",
    "bessel_derivative",
    "channel_error",
    "manufactured_error",
    "sector_error",
    "standing_wave",
]
