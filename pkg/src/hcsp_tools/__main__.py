"""Entry point for running hcsp_tools as a module."""

from .cli import app

if __name__ == "__main__":
    app()
