"""
eigslab - edge iterated graph systems: construction, scaling exponents,
random-walk checks and DHL percolation.

Modules:
- config: Environment variables, numerical defaults and logging
- exceptions: Error hierarchy with CLI exit codes
- dependencies: Shared helpers (system resolution, validation gate, manifests)
- models: Pydantic schemas for system documents and results
- services: Business logic (system, validation, spectral, resistance, dims,
  walker, percolation, export)
- commands: CLI subcommands
"""

__version__ = "0.1.0"
