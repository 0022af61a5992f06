"""Model-guided monkey testing with a genetic algorithm over test suites."""

__version__ = "0.1.0"
