from .render import (
    FIGURE_IDS,
    FigureSpec,
    SchemaError,
    figure_payload,
    load_table,
    render,
)

__all__ = ["FIGURE_IDS", "FigureSpec", "SchemaError", "figure_payload",
           "load_table", "render"]

__version__ = "0.1.0"
