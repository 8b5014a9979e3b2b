"""Allow ``python -m sdec_bridge ...`` to behave like the installed script."""

from .cli import main_entry

if __name__ == "__main__":
    main_entry()
