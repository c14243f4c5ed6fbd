"""Tests for base export classes."""

import pytest

from qpcd.exporters.base import ExportConverter, ExportResult


class UpperExporter(ExportConverter):
    format_name = "upper"
    file_extension = ".txt"

    def render(self, payload):
        return str(payload).upper()


class FailingExporter(ExportConverter):
    format_name = "failing"

    def render(self, payload):
        raise ValueError("cannot render")


@pytest.mark.unit
class TestExportResult:
    """Test ExportResult dataclass."""

    def test_defaults(self):
        result = ExportResult(format="json")

        assert result.success is False
        assert result.output_path is None
        assert result.size_bytes == 0
        assert result.error is None
        assert result.metadata == {}


@pytest.mark.unit
class TestExportConverter:
    """Test the export template method."""

    def test_cannot_instantiate_abstract(self):
        with pytest.raises(TypeError):
            ExportConverter()

    def test_export_writes_file(self, tmp_path):
        output = tmp_path / "nested" / "out.txt"

        result = UpperExporter().export("abc", output)

        assert result.success is True
        assert result.format == "upper"
        assert output.read_text() == "ABC"
        assert result.size_bytes == 3
        assert result.duration >= 0

    def test_render_error_reported(self, tmp_path):
        output = tmp_path / "out.txt"

        result = FailingExporter().export("abc", output)

        assert result.success is False
        assert result.error == "cannot render"
        assert not output.exists()

    def test_unwritable_target_reported(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")

        result = UpperExporter().export("abc", blocker / "out.txt")

        assert result.success is False
        assert result.error
