"""Figure rendering over kerrtrack run directories (no physics recomputed)."""

__version__ = "0.1.0"

from .io import RunDataError
from .panels import (FigureSpec, drop_surface_mesh, render,
                     render_detuning_panel, render_portrait,
                     render_sweep_heatmap, render_tracking_panel)

__all__ = ["RunDataError", "FigureSpec", "drop_surface_mesh", "render",
           "render_detuning_panel", "render_portrait", "render_sweep_heatmap",
           "render_tracking_panel"]
