"""shipgame: backend for a unit-testing and debugging game.

Players write ShipLang tests for small components, activate them once
coverage is high enough, and debug a sabotaged (mutated) component until
the hidden oracle suite passes again. Everything observable - suites,
coverage, mutants, puzzle grids, telemetry - lives behind plain data types
so the HTTP service stays a thin facade.
"""

__version__ = "0.1.0"
