"""
Tests for Run Configuration and the Run Audit

Covers config-file loading, layer precedence, validation messages, and the
sequential, timestamp-free audit trail.
"""

import pytest

from src.audit import RunAudit, RunEventType
from src.config import DEFAULT_TOLERANCES, RunConfig, build_run_config, load_config_file
from src.errors import ConfigError
from src.state import KernelFamily


class TestLoadConfigFile:
    """Tests for KEY=VALUE config files."""

    def test_keys_are_normalized(self, tmp_path):
        """Test that dashed and upper-case keys map onto field names."""
        path = tmp_path / "run.env"
        path.write_text("MAX-SWEEPS=20\nkernel=laplacian\nempty=\n")
        assert load_config_file(str(path)) == {"max_sweeps": "20", "kernel": "laplacian"}

    def test_missing_file(self, tmp_path):
        """Test that a nonexistent file raises ConfigError."""
        with pytest.raises(ConfigError):
            load_config_file(str(tmp_path / "absent.env"))


class TestBuildRunConfig:
    """Tests for merging config layers into a RunConfig."""

    def test_defaults(self):
        """Test defaults come from the shared tolerances."""
        config = build_run_config({"command": "gram", "input": "x.csv"})
        assert config.kernel == KernelFamily.RBF
        assert config.gamma == "auto"
        assert config.tol == DEFAULT_TOLERANCES.psd
        assert config.max_sweeps == 50
        assert config.output == "-"

    def test_flags_override_file(self, tmp_path):
        """Test explicit flags win over config-file values; None flags do not."""
        path = tmp_path / "run.env"
        path.write_text("kernel=linear\nseed=5\nm=3\n")
        config = build_run_config(
            {"command": "nystrom", "input": "x.csv", "seed": 9, "m": None},
            str(path),
        )
        assert config.kernel == KernelFamily.LINEAR
        assert config.seed == 9
        assert config.m == 3

    def test_string_values_are_coerced(self, tmp_path):
        """Test config-file strings become typed values."""
        path = tmp_path / "run.env"
        path.write_text("center=true\ngamma=0.5\np=2\n")
        config = build_run_config({"command": "embed", "input": "x.csv"}, str(path))
        assert config.center is True
        assert config.gamma == 0.5
        assert config.p == 2

    @pytest.mark.parametrize("flags, fragment", [
        ({"command": "embed", "input": "x.csv"}, "--p"),
        ({"command": "nystrom", "input": "x.csv"}, "--m"),
        ({"command": "hsic", "input": "x.csv"}, "--input2"),
        ({"command": "oos-embed", "input": "x.csv"}, "--model"),
        ({"command": "gram"}, "--input"),
        ({"command": "gram", "input": "x.csv", "normalize": "t-mean"}, "--t"),
        ({"command": "gram", "input": "x.csv", "gamma": 0}, "gamma"),
        ({"command": "gram", "input": "x.csv", "kernel": "quadratic"}, "kernel"),
    ])
    def test_invalid_configurations(self, flags, fragment):
        """Test each inconsistency raises ConfigError naming the parameter."""
        with pytest.raises(ConfigError) as exc_info:
            build_run_config(flags)
        assert fragment in str(exc_info.value)

    def test_unknown_file_key_is_rejected(self, tmp_path):
        """Test a typo in a config file fails instead of being ignored."""
        path = tmp_path / "run.env"
        path.write_text("kernal=rbf\n")
        with pytest.raises(ConfigError) as exc_info:
            build_run_config({"command": "gram", "input": "x.csv"}, str(path))
        assert "kernal" in str(exc_info.value)


class TestKernelSpecs:
    """Tests for the kernel specs derived from a RunConfig."""

    def test_second_kernel_falls_back_to_first(self):
        """Test unset *_y fields inherit the first kernel's values."""
        config = RunConfig(command="hsic", input="x.csv", input2="y.csv", kernel="polynomial", degree=2)
        spec_y = config.kernel_spec_y()
        assert spec_y.family == KernelFamily.POLYNOMIAL
        assert spec_y.degree == 2

    def test_second_kernel_overrides(self):
        """Test explicit *_y fields take effect."""
        config = RunConfig(command="hsic", input="x.csv", input2="y.csv", kernel_y="linear", gamma_y=2.0)
        assert config.kernel_spec().family == KernelFamily.RBF
        assert config.kernel_spec_y().family == KernelFamily.LINEAR
        assert config.kernel_spec_y().gamma == 2.0


class TestRunAudit:
    """Tests for the structured run log."""

    def test_events_are_numbered_sequentially(self):
        """Test that sequence numbers start at 1 and increase."""
        audit = RunAudit()
        audit.log_event(RunEventType.INPUT_LOADED, "gram", "loaded x.csv")
        audit.log_event(RunEventType.OUTPUT_WRITTEN, "gram", "result written")
        assert [e.sequence for e in audit.get_events()] == [1, 2]

    def test_filters_and_notices(self):
        """Test filtering by type and operation, and notice extraction."""
        audit = RunAudit()
        audit.log_event(RunEventType.INPUT_LOADED, "mmd", "loaded x.csv")
        audit.notice("mmd", "unequal sample sizes", n=3, m=4)
        audit.log_event(RunEventType.INPUT_LOADED, "hsic", "loaded y.csv")

        assert len(audit.get_events(event_type=RunEventType.INPUT_LOADED)) == 2
        assert len(audit.get_events(operation="mmd")) == 2
        assert audit.notices() == ["unequal sample sizes"]
        assert audit.get_events(event_type=RunEventType.NOTICE)[0].details == {"n": 3, "m": 4}

    def test_summary_is_reproducible(self):
        """Test two identical runs give identical summaries."""
        def trail():
            audit = RunAudit()
            audit.log_event(RunEventType.PARAMETER_RESOLVED, "embed", "gamma 0.5", {"gamma": 0.5})
            audit.notice("embed", "truncated")
            return audit.summary()

        first = trail()
        assert first == trail()
        assert first["total_events"] == 2
        assert first["events_by_type"] == {"parameter_resolved": 1, "notice": 1}
        assert first["events"][1]["event_type"] == "notice"
