"""JSON envelopes, SVG scenes and the command-line interface."""

from .envelope import ReportEnvelope, decode_complex, encode
from .render import SvgScene, render_density, render_fan, render_web, write_svg

__all__ = ["ReportEnvelope", "SvgScene", "decode_complex", "encode", "render_density", "render_fan",
           "render_web", "write_svg"]
