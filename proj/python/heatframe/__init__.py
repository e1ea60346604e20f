"""Heat kernels, nets and band decompositions on Jacobi spaces."""

import json

from ._core import (
    ContractError,
    DomainError,
    ExactnessError,
    band_energies,
    eigenvalue,
    heat_kernel,
    net,
    quadrature,
    verify_json,
)


def verify(**kwargs):
    return json.loads(verify_json(**kwargs))


__all__ = [
    "ContractError",
    "DomainError",
    "ExactnessError",
    "band_energies",
    "eigenvalue",
    "heat_kernel",
    "net",
    "quadrature",
    "verify",
    "verify_json",
]
