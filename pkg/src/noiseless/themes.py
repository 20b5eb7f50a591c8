"""Theme definitions for text reports."""

from rich.theme import Theme

THEME_MAP = {
    "noiseless-default": Theme(
        {
            "title": "bold cyan",
            "key": "bold",
            "value": "white",
            "pass": "bold green",
            "fail": "bold red",
            "warning": "yellow",  # diagnostics
            "vacuous": "bold magenta",
            "muted": "dim",
        }
    ),
    "noiseless-mono": Theme(
        {
            "title": "bold",
            "key": "bold",
            "value": "none",
            "pass": "bold",
            "fail": "bold reverse",
            "warning": "italic",
            "vacuous": "bold underline",
            "muted": "dim",
        }
    ),
}

DEFAULT_THEME = "noiseless-default"
