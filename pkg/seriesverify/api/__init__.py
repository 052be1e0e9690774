from seriesverify.api.cli import build_parser, main
from seriesverify.api.reports import load_report, render

__all__ = ["build_parser", "main", "load_report", "render"]
