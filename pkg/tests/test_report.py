"""Tests for report documents and their rendering."""

import io

import yaml
from rich.console import Console

from noiseless.model import AdversaryModel, BoundSource, make_bound
from noiseless.planner import plan
from noiseless.report import (
    bound_document,
    emit,
    moments_document,
    plan_document,
    rounded,
)
from noiseless.themes import THEME_MAP

from .fixtures import example_profile


def text_console() -> Console:
    return Console(file=io.StringIO(), width=120, theme=THEME_MAP["noiseless-mono"])


class TestDocuments:
    """Test report documents."""

    def test_rounding(self):
        """Values keep the requested significant digits."""
        assert rounded(0.123456789012345, 12) == 0.123456789012
        assert rounded(None, 12) is None

    def test_bound_document(self):
        """Bounds report source, parameters, flags and diagnostics."""
        document = bound_document(make_bound(0.5, 1.2, BoundSource.DEPENDENT), 12)
        assert document["source"] == "dependent"
        assert document["vacuous"] is True
        assert document["diagnostics"][0]["code"] == "vacuous-delta"

    def test_moments_document(self, profile_spec):
        """Per-record moments and totals."""
        document = moments_document(profile_spec, 12)
        assert document["n"] == 10_000
        assert document["total_variance"] == 40_000.0
        assert document["sum_abs_third"] == 30_000.0
        assert document["records"][0]["family"] == "moments"

    def test_plan_document(self):
        """The noise plan is spelled out."""
        report = plan(example_profile(1000), AdversaryModel(), target_epsilon=0.5)
        document = plan_document(report, 12)
        assert document["chosen_path"] == "noiseless+noise"
        assert document["noise_plan"]["noise_family"] == "generic-unbiased"
        assert document["noise_plan"]["laplace_scale"] is None


class TestRendering:
    """Test text and structured output."""

    def test_structured_is_yaml(self):
        """Structured output parses back to the document."""
        console = text_console()
        document = bound_document(make_bound(0.5, 0.01, BoundSource.INDEPENDENT), 12)
        emit(document, True, console, "bound", 12)
        assert yaml.safe_load(console.file.getvalue()) == document

    def test_text_tables(self):
        """Text output holds every scalar and the diagnostics table."""
        console = text_console()
        document = {"verdict": "PASS", **bound_document(make_bound(0.5, 1.5, BoundSource.DEPENDENT), 12)}
        emit(document, False, console, "verify", 12)
        output = console.file.getvalue()
        assert "PASS" in output
        assert "vacuous-delta" in output
        assert "dependent" in output

    def test_markup_escaped(self):
        """Text that looks like markup is printed literally."""
        console = text_console()
        emit({"worst_case": "[bold]remove record 3[/bold]"}, False, console, "verify", 12)
        assert "[bold]remove record 3[/bold]" in console.file.getvalue()
